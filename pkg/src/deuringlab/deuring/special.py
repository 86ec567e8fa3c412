"""A starting curve with its endomorphism ring written down explicitly.

For p = 3 mod 4 the curve y^2 = x^3 + x carries the automorphism
(x, y) -> (-x, iy) and Frobenius, and the half-integral combinations
(i + pi)/2 and (1 + i*pi)/2 complete a maximal order in (-1, -p).
Other primes fall back to the brute-force machinery.
"""

from __future__ import annotations

from fractions import Fraction

from ..field_curve import Curve, curve_from_j, get_ctx, is_supersingular
from ..isogeny_rep import (FrobeniusStep, HomElement, IsoStep, IsogenyRep,
                           divide_isogeny)
from ..quat import QuatAlgebra, QuatLattice, order_from_lattice, pair
from .moer import MoerSolution, _verify_products, moer_for_curve


def special_curve_E0(p: int):
    """(Curve, MoerSolution) for a supersingular curve with a known
    endomorphism ring over F_p^2."""
    if p % 4 == 3:
        sol = _e0_explicit(p)
        if sol is not None:
            return sol.curve, sol
    E = _some_supersingular(p)
    return E, moer_for_curve(E)


def _e0_explicit(p: int):
    ctx = get_ctx(p, 1)
    E = Curve(ctx.one, ctx.zero)
    ctx2 = get_ctx(p, 2)
    u = (ctx2.zero - ctx2.one).sqrt()
    iota = IsogenyRep(E, (IsoStep(E, E, u),))
    frob = IsogenyRep(E, (FrobeniusStep(E),))
    one = HomElement.from_isogeny(IsogenyRep.identity(E))
    hi = HomElement.from_isogeny(iota)
    hj = HomElement.from_isogeny(frob)
    hk = HomElement.from_isogeny(frob.compose(iota))  # image i*j
    h3 = divide_isogeny(hi.add(hj), 2)
    h4 = divide_isogeny(one.add(hk), 2)
    if h3 is False or h4 is False:
        return None
    alg = QuatAlgebra(-1, -p)
    i, j, k = alg.basis()[1:]
    half = Fraction(1, 2)
    images = [alg.elt(1), i, (i + j) * half, (alg.elt(1) + k) * half]
    basis = [one, hi, h3, h4]
    gram = [[pair(a, b) for b in images] for a in images]
    order = order_from_lattice(QuatLattice.from_rows(alg, images))
    if order.disc() != p * p:
        return None
    _verify_products(E, basis, images)
    return MoerSolution(E, basis, gram, alg, images, order)


def _some_supersingular(p: int) -> Curve:
    ctx = get_ctx(p, 1)
    if p % 4 == 3:
        return Curve(ctx.one, ctx.zero)
    if p % 3 == 2:
        return Curve(ctx.zero, ctx.one)
    for j in range(p):
        E = curve_from_j(ctx.elt(j))
        if is_supersingular(E):
            return E
    raise ValueError(f"no supersingular curve found over F_{p}")
