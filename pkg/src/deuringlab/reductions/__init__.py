"""Problem-to-problem reductions; each arrow consumes an OracleSuite and
returns a ReductionReport.  REGISTRY exposes bare-solution wrappers for
oracle wiring ("reduction:<name>")."""

from .endring import isogeny_from_moer, moer_from_endring, reduce_ideal
from .hommodule import hommodule_from_isogeny
from .maxorder import (maxorder_from_maxorder_q, maxorder_q_from_maxorder,
                       standard_maximal_order, transport_order)
from .oneend import (IdealBijection, LocalIso, ideal_bijection,
                     local_iso_mod_ell, oneend_from_maxorder,
                     small_nonscalar_endomorphism)
from .report import QueryMeter, ReductionReport


def _sol(fn):
    def run(suite, *args):
        return fn(suite, *args).solution
    run.__name__ = fn.__name__
    return run


REGISTRY = {
    "isogeny_from_moer": _sol(isogeny_from_moer),
    "moer_from_endring": _sol(moer_from_endring),
    "hommodule_from_isogeny": _sol(hommodule_from_isogeny),
    "maxorder_q_from_maxorder": _sol(maxorder_q_from_maxorder),
    "maxorder_from_maxorder_q": _sol(maxorder_from_maxorder_q),
    "oneend_from_maxorder": _sol(oneend_from_maxorder),
}

__all__ = [
    "REGISTRY", "IdealBijection", "LocalIso", "QueryMeter",
    "ReductionReport", "hommodule_from_isogeny", "ideal_bijection",
    "isogeny_from_moer", "local_iso_mod_ell", "maxorder_from_maxorder_q",
    "maxorder_q_from_maxorder", "moer_from_endring", "oneend_from_maxorder",
    "reduce_ideal", "small_nonscalar_endomorphism",
    "standard_maximal_order", "transport_order",
]
