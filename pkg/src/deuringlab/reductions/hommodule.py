"""Hom(E1, E2) from End bases on both sides plus one connecting isogeny.

The sixteen products b_j o phi o a_i span a finite-index sublattice of
Hom(E1, E2); the index is an explicit power m times a power of p coming
from the inseparable part of phi.  The m part divides out directly, the
p part is stripped by passing to the mod-p kernel of the degree form.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from sympy import integer_nthroot

from ..deuring.bruteforce import HomSpace, _Builder
from ..errors import BudgetExceeded, NonIntegerM
from ..intlinalg import kernel_mod
from ..isogeny_rep import HomElement, degree_of_hom, hom_compose
from .report import QueryMeter, ReductionReport


def _eighth_root(f: Fraction) -> Fraction:
    rn, okn = integer_nthroot(f.numerator, 8)
    rd, okd = integer_nthroot(f.denominator, 8)
    if not (okn and okd):
        raise NonIntegerM(f"index^8 = {f} is not an eighth power")
    return Fraction(rn, rd)


def _strip_p_part(builder: _Builder, p: int):
    """Replace the lattice by its p-saturation inside Hom: kernel vectors
    of the degree form mod p divide by p."""
    target = Fraction(p * p)
    for _ in range(40):
        if builder.disc() == target:
            return
        g = builder.lattice_gram()
        den = 1
        for row in g:
            for x in row:
                den = den * x.denominator // gcd(den, x.denominator)
        if den % p == 0:
            raise BudgetExceeded("degree form not integral at p")
        gi = [[int(x * den) for x in row] for row in g]
        # the degree form on the sublattice is divisible by p (once per
        # remaining Frobenius factor); strip to expose the radical
        while all(x % p == 0 for row in gi for x in row):
            gi = [[x // p for x in row] for row in gi]
        progressed = False
        for crow in kernel_mod(gi, p):
            if all(c % p == 0 for c in crow):
                continue
            new = [sum(Fraction(c) * builder.rows[i][j]
                       for i, c in enumerate(crow)) / p for j in range(4)]
            if not builder._contains(new):
                builder.rows.append(new)
                progressed = True
        if progressed:
            builder._rehnf()
        else:
            raise BudgetExceeded("p-stripping stalled before disc p^2")
    raise BudgetExceeded("p-stripping did not converge")


def hommodule_from_isogeny(suite, E1, E2, phi=None) -> ReductionReport:
    """Reduced basis of Hom(E1, E2) using End oracles on both ends and
    one Isogeny oracle call.  A connecting isogeny may be supplied
    directly (e.g. one with an inseparable part) instead of the oracle's.
    """
    meter = QueryMeter(suite)
    p = E1.p
    basis1 = suite.end_ring(E1)
    basis2 = suite.end_ring(E2)
    if phi is None:
        phi = suite.isogeny(E1, E2)
    d = phi.degree
    v = 0
    while d % p == 0:
        v += 1
        d //= p
    deg_phi = phi.degree
    bound = 64 * p * p
    d1 = [degree_of_hom(h, bound) for h in basis1]
    d2 = [degree_of_hom(h, bound) for h in basis2]

    space = HomSpace(E1, E2, max(d1) * deg_phi * max(d2))
    builder = _Builder(space)
    phih = HomElement.from_isogeny(phi)
    for a, da in zip(basis1, d1):
        mid = hom_compose(a, phih)
        for b, db in zip(basis2, d2):
            builder.offer(hom_compose(mid, b), da * deg_phi * db)
    if len(builder.ref) < 4:
        raise BudgetExceeded("products of the End bases are degenerate")

    m8 = builder.disc() / Fraction(p) ** (4 * v + 2)
    m = _eighth_root(m8)
    if m != 1:
        builder.rows = [[c / m for c in row] for row in builder.rows]
        builder._rehnf()
    _strip_p_part(builder, p)
    homs, gout = builder.reduced_basis()
    from ..intlinalg import mat_det
    if 16 * mat_det(gout) != p * p:
        raise BudgetExceeded("final lattice is not the full Hom module")
    return ReductionReport(
        "hom_module<-end_ring,isogeny", homs, queries=meter.delta(),
        notes=[f"deg phi {deg_phi}", f"v {v}", f"m {m}"])
