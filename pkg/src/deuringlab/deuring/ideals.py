"""Ideal <-> isogeny translation against an explicit End(E) = O match.

Kernels are read off torsion: an ideal's kernel on E[q] is the common
left kernel of its generators' action matrices, and conversely the ideal
of an isogeny is the sublattice of O killing the kernel, prime by prime.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from sympy import factorint

from ..errors import NonIntegralIdeal, TorsionFieldTooLarge
from ..intlinalg import kernel_mod, lattice_intersect, solve_right
from ..isogeny_rep import (FrobeniusStep, IsogenyRep, action_matrix,
                           get_frame, hom_matrix_mod,
                           isogeny_from_kernel_point)
from ..quat import LeftIdeal, QuatLattice, right_order
from .moer import MoerSolution


@dataclass
class KernelIdeal:
    """A left O-ideal with its kernel isogeny, once materialized."""

    order: object
    ideal: LeftIdeal
    isogeny: IsogenyRep | None = None


def _basis_matrices(moer: MoerSolution, q: int):
    return [hom_matrix_mod(h, q) for h in moer.basis]


def _ideal_matrix(moer: MoerSolution, mats, coords, q: int):
    out = [[0, 0], [0, 0]]
    for c, m in zip(coords, mats):
        if c.denominator != 1:
            raise NonIntegralIdeal("ideal element outside the order")
        cc = int(c) % q
        for i in range(2):
            for j in range(2):
                out[i][j] = (out[i][j] + cc * m[i][j]) % q
    return out


def ideal_to_isogeny_desk(E, moer: MoerSolution, I: LeftIdeal) -> IsogenyRep:
    """The separable isogeny phi_I with kernel E[I]; deg phi_I = Nrd(I)."""
    O = moer.order
    for v in I.basis():
        if not O.contains(v):
            raise NonIntegralIdeal("ideal is not contained in the order")
    n = I.nrd()
    if n.denominator != 1:
        raise NonIntegralIdeal("ideal norm is not an integer")
    n = int(n)
    if gcd(n, E.p) != 1:
        raise TorsionFieldTooLarge("p-part of the norm has no torsion kernel")
    gens = []
    img_rows = [[g.t, g.x, g.y, g.z] for g in moer.images]
    coords = [solve_right(img_rows, [v.t, v.x, v.y, v.z])
              for v in I.basis()]
    for ell, e in sorted(factorint(n).items()):
        q = int(ell) ** int(e)
        frame = get_frame(E, q)
        mats = _basis_matrices(moer, q)
        amats = [_ideal_matrix(moer, mats, c, q) for c in coords]
        stacked = [[m[0][i] for m in amats for i in range(2)],
                   [m[1][i] for m in amats for i in range(2)]]
        for row in kernel_mod(stacked, q):
            a, b = row[0] % q, row[1] % q
            if a or b:
                gens.append(frame.point(a, b))
    chain = IsogenyRep.identity(E)
    for P in gens:
        Q = chain.evaluate(P)
        if not Q.is_infinity():
            chain = chain.compose(
                isogeny_from_kernel_point(chain.codomain, Q))
    if chain.degree != n:
        raise NonIntegralIdeal(
            f"kernel order {chain.degree} != ideal norm {n}")
    return chain


def isogeny_to_ideal(phi: IsogenyRep, moer: MoerSolution,
                     end2: MoerSolution | None = None) -> LeftIdeal:
    """I_phi = n*O + {alpha in O : alpha kills ker(phi)}, n = deg(phi).

    When `end2` (a MoerSolution for the codomain) is given, the right
    order of the result is checked against it up to isomorphism."""
    if phi.domain != moer.curve:
        raise NonIntegralIdeal("isogeny does not start at the order's curve")
    n = phi.degree
    if gcd(n, phi.domain.p) != 1:
        raise TorsionFieldTooLarge("inseparable isogenies are out of scope")
    O = moer.order
    rows = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
    for ell, e in sorted(factorint(n).items()):
        q = int(ell) ** int(e)
        fd = get_frame(phi.domain, q)
        fc = fd if phi.codomain == phi.domain else get_frame(phi.codomain, q)
        mphi = action_matrix(phi.evaluate, fd, fc)
        mats = _basis_matrices(moer, q)
        cond = []
        for v in kernel_mod(mphi, q):
            a, b = v[0] % q, v[1] % q
            if not (a or b):
                continue
            cond.append([( (a * m[0][0] + b * m[1][0]) % q,
                           (a * m[0][1] + b * m[1][1]) % q) for m in mats])
        if not cond:
            continue
        cmat = [[x for pair in [c[m] for c in cond] for x in pair]
                for m in range(4)]
        rows = lattice_intersect(rows, kernel_mod(cmat, q))
    quats = []
    for x in rows:
        q = moer.algebra.elt(0)
        for c, img in zip(x, moer.images):
            q = q + img * c
        quats.append(q)
    lat = QuatLattice.from_rows(moer.algebra, quats)
    ideal = LeftIdeal.from_lattice(O, lat, verify=True)
    nrd = ideal.nrd()
    if nrd != n:
        raise NonIntegralIdeal(f"ideal norm {nrd} != degree {n}")
    if end2 is not None:
        from ..quat import orders_isomorphic
        if not orders_isomorphic(right_order(ideal), end2.order)[0]:
            raise NonIntegralIdeal(
                "right order does not match the codomain endomorphism ring")
    return ideal
