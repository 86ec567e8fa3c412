"""Moving a maximal order between quaternion algebra presentations.

A curve's endomorphism order can be handed out in whatever algebra the
solver happened to build; these arrows re-express it in the standard
algebra (-q, -p) and back.  The standard-side anchor is the order
generated by 1, i, j, k, enlarged to a maximal one.
"""

from __future__ import annotations

from ..quat import (Order, QuatLattice, algebra_isomorphism,
                    algebra_standard, maximalize_order, order_from_lattice)
from .report import QueryMeter, ReductionReport

_ANCHOR_CACHE: dict = {}
_TRANSPORT_CACHE: dict = {}


def standard_maximal_order(p: int) -> Order:
    """Some maximal order of the standard algebra for p, deterministic."""
    if p not in _ANCHOR_CACHE:
        alg, _q = algebra_standard(p)
        seed = order_from_lattice(
            QuatLattice.from_rows(alg, list(alg.basis())), verify=True)
        _ANCHOR_CACHE[p] = maximalize_order(seed, p)
    return _ANCHOR_CACHE[p]


def transport_order(order: Order, target: Order) -> Order:
    """Image of `order` inside target.alg, via an algebra isomorphism
    found by short-vector search around `target`."""
    if order.alg == target.alg:
        return order
    key = (tuple(order.basis()), tuple(target.basis()))
    if key not in _TRANSPORT_CACHE:
        iso = algebra_isomorphism(order.alg, order, target.alg, target)
        lat = QuatLattice.from_rows(target.alg,
                                    [iso.apply(b) for b in order.basis()])
        _TRANSPORT_CACHE[key] = order_from_lattice(lat, verify=True)
    return _TRANSPORT_CACHE[key]


def maxorder_q_from_maxorder(suite, E) -> ReductionReport:
    """Order isomorphic to End(E) presented in the standard algebra."""
    meter = QueryMeter(suite)
    O = suite.max_order(E)
    anchor = standard_maximal_order(E.p)
    out = transport_order(O, anchor)
    if out.disc() != E.p * E.p:
        raise AssertionError("transported order lost maximality")
    return ReductionReport("max_order_q<-max_order", out,
                           queries=meter.delta(),
                           branch="identity" if out is O else "transport")


def maxorder_from_maxorder_q(suite, E) -> ReductionReport:
    """The standard-presentation order already answers MaxOrder; the
    algebra label is the only difference."""
    meter = QueryMeter(suite)
    out = suite.max_order_q(E)
    return ReductionReport("max_order<-max_order_q", out,
                           queries=meter.delta(), branch="forward")
