"""Arrows around the matched-ring presentation of End(E): turning a pair
of matched rings into a connecting isogeny, and lifting a bare End(E)
basis to a matched ring.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from ..deuring.ideals import ideal_to_isogeny_desk
from ..deuring.moer import moer_from_basis
from ..errors import WrongCurve
from ..isogeny_rep import (FrobeniusStep, IsogenyRep, degree_of_hom,
                           pairing_of_homs)
from ..quat import (LeftIdeal, QuatLattice, connecting_ideal,
                    order_from_lattice)
from .maxorder import transport_order
from .report import QueryMeter, ReductionReport


def reduce_ideal(I: LeftIdeal, avoid: int = 1, accept=None) -> LeftIdeal:
    """Equivalent left ideal I * conj(alpha) / Nrd(I) of small norm,
    preferring norms coprime to `avoid` and passing `accept` (a
    predicate on the integer norm); short vectors are scanned norm-first
    with an escalating radius."""
    from ..intlinalg import short_vectors_gram
    from ..quat import minkowski_reduce, pair
    n = I.nrd()
    basis = minkowski_reduce(I)
    gram = [[pair(a, b) for b in basis] for a in basis]
    best = None

    def materialize(alpha):
        lat = QuatLattice.from_rows(
            I.alg, [b * alpha.conj() for b in I.basis()]).scale(
                Fraction(1, int(n)))
        return LeftIdeal.from_lattice(I.order, lat, verify=True)

    bound = max(gram[i][i] for i in range(4))
    seen = 0
    for _ in range(3):
        sv = short_vectors_gram(gram, bound)
        for v, nn in sv[seen:]:
            m = nn / n
            if m.denominator != 1:
                continue
            alpha = I.alg.elt(0)
            for c, b in zip(v, basis):
                alpha = alpha + b * c
            if gcd(int(m), avoid) == 1 and (accept is None or accept(int(m))):
                return materialize(alpha)
            if best is None:
                best = materialize(alpha)
        seen = len(sv)
        bound *= 4
    if best is None:
        raise ValueError("no integral reduction of the ideal")
    return best


def isogeny_from_moer(suite, E1, E2) -> ReductionReport:
    """Connecting isogeny E1 -> E2 out of matched rings on both sides:
    transport End(E2)'s order into End(E1)'s algebra, reduce the
    connecting ideal, and materialize its kernel."""
    meter = QueryMeter(suite)
    sol1 = suite.moer(E1)
    sol2 = suite.moer(E2)
    o2 = transport_order(sol2.order, sol1.order)
    I = connecting_ideal(sol1.order, o2)
    J = reduce_ideal(I, avoid=E1.p)
    if gcd(int(J.nrd()), E1.p) != 1:
        raise ValueError("connecting ideal class has no p-coprime reduction")
    phi = ideal_to_isogeny_desk(E1, sol1, J)
    branch = "direct"
    try:
        out = phi.post_iso(E2)
    except Exception:
        C = phi.codomain
        out = phi.compose(IsogenyRep(C, (FrobeniusStep(C),))).post_iso(E2)
        branch = "conjugate"
    if out.domain != E1 or out.codomain != E2:
        raise WrongCurve("connecting isogeny has wrong endpoints")
    return ReductionReport("isogeny<-moer", out, queries=meter.delta(),
                           branch=branch,
                           notes=[f"ideal norm {J.nrd()}"])


def moer_from_endring(suite, E) -> ReductionReport:
    """Matched ring from a bare End(E) basis: recompute the degree
    pairing, orthogonalize the pure part, match torsion signs."""
    meter = QueryMeter(suite)
    basis = suite.end_ring(E)
    bound = 64 * E.p * E.p
    degs = [degree_of_hom(h, bound) for h in basis]
    gram = [[Fraction(0)] * 4 for _ in range(4)]
    for i in range(4):
        gram[i][i] = Fraction(degs[i])
        for j in range(i + 1, 4):
            gram[i][j] = gram[j][i] = pairing_of_homs(basis[i], basis[j],
                                                      bound)
    sol = moer_from_basis(E, basis, gram)
    return ReductionReport("moer<-end_ring", sol, queries=meter.delta())


def transported_order(suite, E, target):
    """suite.max_order(E) re-expressed in target.alg (helper for arrows
    that compare orders across curves)."""
    return transport_order(suite.max_order(E), target)
