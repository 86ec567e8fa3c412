"""Forwarding arrows: reductions whose work is picking a component of
the oracle answer or relabeling it, with no curve arithmetic of their
own.  Each still returns a ReductionReport so query counts and branches
stay auditable.
"""

from __future__ import annotations

from ..errors import SearchExhausted
from ..isogeny_rep import choose_torsion, hom_matrix_mod
from .maxorder import standard_maximal_order, transport_order
from .oneend import _nonscalar
from .report import QueryMeter, ReductionReport


def isogeny_from_ellpath(suite, E1, E2, ell: int = 2) -> ReductionReport:
    """An ell-path is already an isogeny; forward the instance."""
    meter = QueryMeter(suite)
    phi = suite.ell_path(E1, E2, ell)
    return ReductionReport("isogeny<-ell_isogeny_path", phi,
                           queries=meter.delta(), branch=f"ell-{ell}")


def endring_from_moer(suite, E) -> ReductionReport:
    """Project the matched ring onto its End(E) side."""
    meter = QueryMeter(suite)
    sol = suite.moer(E)
    return ReductionReport("end_ring<-moer", sol.basis,
                           queries=meter.delta(), branch="projection")


def maxorder_from_moer(suite, E) -> ReductionReport:
    """Project the matched ring onto its quaternion side."""
    meter = QueryMeter(suite)
    sol = suite.moer(E)
    return ReductionReport("max_order<-moer", sol.order,
                           queries=meter.delta(), branch="projection")


def maxorderq_from_moer(suite, E) -> ReductionReport:
    """Quaternion side of the matched ring, re-expressed in the standard
    algebra for p."""
    meter = QueryMeter(suite)
    sol = suite.moer(E)
    anchor = standard_maximal_order(E.p)
    out = transport_order(sol.order, anchor)
    return ReductionReport("max_order_q<-moer", out,
                           queries=meter.delta(), branch="tagged")


def oneend_from_endring(suite, E) -> ReductionReport:
    """Any nonscalar element of an End(E) basis answers OneEnd; rank 4
    guarantees one exists among the four."""
    meter = QueryMeter(suite)
    basis = suite.end_ring(E)
    for i, h in enumerate(basis):
        if _nonscalar(h, E):
            return ReductionReport("one_end<-end_ring", h,
                                   queries=meter.delta(),
                                   branch=f"basis-{i}")
    raise SearchExhausted("rank-4 basis with only scalar elements")


def oneend_ac_from_endring_ac(suite, E) -> ReductionReport:
    """Average-case forwarding: the instance distribution is untouched,
    so an average-case EndRing oracle answers average-case OneEnd by the
    same basis-element pick."""
    rep = oneend_from_endring(suite, E)
    return ReductionReport("one_end_avg<-end_ring_avg", rep.solution,
                           queries=rep.queries, branch=rep.branch,
                           notes=["instance forwarded unchanged"])


def isogeny_from_hommodule(suite, E1, E2) -> ReductionReport:
    """Any nonzero element of Hom(E1, E2) is (a rational multiple of) an
    isogeny; pick the first basis element with a nonzero torsion action."""
    meter = QueryMeter(suite)
    basis = suite.hom_module(E1, E2)
    for i, h in enumerate(basis):
        for q, _k in choose_torsion(E1, 10 ** 6, avoid=(E1.p,)):
            m = hom_matrix_mod(h, q)
            if any(x % q for row in m for x in row):
                return ReductionReport("isogeny<-hom_module", h,
                                       queries=meter.delta(),
                                       branch=f"basis-{i}")
            break
    raise SearchExhausted("rank-4 module with only zero basis elements")
