"""From an End(E) lattice to an explicit quaternion order: builds the
algebra from an orthogonal pure frame inside the lattice and the ring
isomorphism End(E) -> O by small torsion lifts.

Convention throughout: the quaternion image of a composition "phi then
psi" is q_psi * q_phi, matching function composition order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from ..errors import BudgetExceeded
from ..intlinalg import frac_sqrt, gram_norm, gram_pair, solve_right
from ..isogeny_rep import (HomElement, IsogenyRep, choose_torsion,
                           degree_of_hom, hom_matrix_mod)
from ..quat import Order, QuatAlgebra, QuatLattice, Quaternion, \
    order_from_lattice
from .bruteforce import end_ring_lattice


@dataclass
class MoerSolution:
    """End(E) basis with a matching quaternion order: basis[i] and
    images[i] correspond under a ring isomorphism End(E) tensor Q -> B."""

    curve: object
    basis: list            # 4 HomElements
    gram: list             # Gram matrix of the basis (degree pairing)
    algebra: QuatAlgebra
    images: list           # 4 Quaternions
    order: Order


def end_ring_bruteforce(E, norm_bound: int | None = None):
    """(4 HomElements, Order): a Minkowski-reduced basis of End(E) and an
    isomorphic maximal quaternion order (disc p^2)."""
    sol = moer_for_curve(E, norm_bound)
    return sol.basis, sol.order


_MOER_CACHE: dict = {}


def moer_for_curve(E, norm_bound: int | None = None) -> MoerSolution:
    key = (E.p, E.a.c, E.b.c)
    if key not in _MOER_CACHE:
        homs, gram = end_ring_lattice(E, norm_bound)
        _MOER_CACHE[key] = moer_from_basis(E, homs, gram)
    return _MOER_CACHE[key]


def moer_from_basis(E, homs, gram, traces=None) -> MoerSolution:
    """Quaternion order isomorphic to the ring spanned by `homs` (with
    `gram` its degree-pairing Gram matrix).  Traces may be supplied when
    already known; recovering them by degree lifts needs torsion levels
    that deeply composed homs cannot always reach."""
    p = E.p
    gram = [[Fraction(x) for x in row] for row in gram]
    degs = [gram[i][i] for i in range(4)]
    if traces is not None:
        tr = [Fraction(t) for t in traces]
    else:
        ident = HomElement.from_isogeny(IsogenyRep.identity(E))
        tr = []
        for h, d in zip(homs, degs):
            s = degree_of_hom(h.add(ident), int(4 * (d + 2)))
            tr.append(Fraction(s) - d - 1)
    one = solve_right(gram, [t / 2 for t in tr])  # coords of the identity
    if gram_norm(gram, one) != 1:
        raise BudgetExceeded("basis Gram does not contain a unit identity")

    units = [[Fraction(int(i == j)) for j in range(4)] for i in range(4)]
    pures = [[u[j] - (t / 2) * one[j] for j in range(4)]
             for u, t in zip(units, tr)]
    cands = sorted((v for v in pures if any(v)),
                   key=lambda v: gram_norm(gram, v))
    e1 = _primitive(cands[0])
    n1 = gram_norm(gram, e1)
    e2 = None
    for v in cands[1:]:
        w = [v[j] - (gram_pair(gram, v, e1) / n1) * e1[j] for j in range(4)]
        if any(w):
            e2 = _primitive(w)
            break
    if e2 is None:
        raise BudgetExceeded("pure part of the lattice is degenerate")
    n2 = gram_norm(gram, e2)
    alg = QuatAlgebra(-n1, -n2)
    nk = n1 * n2

    coords = []
    ambiguous = []
    for m in range(4):
        t = tr[m] / 2
        x = gram_pair(gram, units[m], e1) / n1
        y = gram_pair(gram, units[m], e2) / n2
        z2 = (degs[m] - t * t - x * x * n1 - y * y * n2) / nk
        z = frac_sqrt(z2)
        if z is None:
            raise BudgetExceeded("norm form is not represented exactly")
        coords.append([t, x, y, z])
        if z != 0:
            ambiguous.append(m)
    if ambiguous:
        _fix_signs(E, homs, e1, e2, coords, ambiguous)

    images = [alg.from_coords(c) for c in coords]
    order = order_from_lattice(QuatLattice.from_rows(alg, images))
    if order.disc() != p * p:
        raise BudgetExceeded(f"order discriminant {order.disc()} != p^2")
    _verify_products(E, homs, images)
    return MoerSolution(E, list(homs), gram, alg, images, order)


def _primitive(v):
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [Fraction(x, g) for x in ints]


def _combo_matrix(mats, coeffs, q):
    """sum coeffs[i]*mats[i] mod q; None when a denominator collides."""
    out = [[0, 0], [0, 0]]
    for c, m in zip(coeffs, mats):
        c = Fraction(c)
        if gcd(c.denominator, q) != 1:
            return None
        cc = c.numerator * pow(c.denominator, -1, q) % q
        for i in range(2):
            for j in range(2):
                out[i][j] = (out[i][j] + cc * m[i][j]) % q
    return out


def _mat_mul2(a, b, q):
    return [[sum(a[i][k] * b[k][j] for k in range(2)) % q for j in range(2)]
            for i in range(2)]


def _moduli_for(E, avoid_extra=()):
    avoid = (2, 3) + tuple(avoid_extra)
    return [q for q, _k in choose_torsion(E, 10 ** 6, avoid=avoid)]


def _divisor_primes(homs):
    out = set()
    for h in homs:
        d = getattr(h, "divisor", 1)
        while d % 2 == 0:
            d //= 2
        f = 3
        while f * f <= d:
            if d % f == 0:
                out.add(f)
                while d % f == 0:
                    d //= f
            f += 2
        if d > 1:
            out.add(d)
    return tuple(sorted(out))


def _fix_signs(E, homs, e1, e2, coords, ambiguous):
    """Resolve the k-component signs by one torsion-action check."""
    for q in _moduli_for(E, _divisor_primes(homs)):
        mats = [hom_matrix_mod(h, q) for h in homs]
        m1 = _combo_matrix(mats, e1, q)
        m2 = _combo_matrix(mats, e2, q)
        if m1 is None or m2 is None:
            continue
        mk = _mat_mul2(m2, m1, q)  # image of "he2 then he1", i.e. e1*e2
        done = True
        for m in list(ambiguous):
            t, x, y, z = coords[m]
            hit = []
            usable = 0
            for sgn in (1, -1):
                cand = _combo_matrix(
                    [[[1, 0], [0, 1]], m1, m2, mk],
                    [t, x, y, sgn * z], q)
                if cand is None:
                    continue
                usable += 1
                if cand == mats[m]:
                    hit.append(sgn)
            if len(hit) == 1:
                coords[m][3] = hit[0] * z
                ambiguous.remove(m)
            elif usable == 2 and not hit:
                raise BudgetExceeded("no sign matches the torsion action")
            else:
                done = False
        if done and not ambiguous:
            return
    if ambiguous:
        raise BudgetExceeded("sign disambiguation ran out of moduli")


def _verify_products(E, homs, images, rounds: int = 2):
    """Ring-isomorphism spot check: coords of q_i*q_j in the image basis
    must reproduce the action matrix of b_i after b_j."""
    rows = [[img.t, img.x, img.y, img.z] for img in images]
    used = 0
    for q in _moduli_for(E, _divisor_primes(homs)):
        mats = [hom_matrix_mod(h, q) for h in homs]
        ok_all = True
        for i in range(4):
            for j in range(4):
                prod = images[i] * images[j]
                xcoef = solve_right(rows, [prod.t, prod.x, prod.y, prod.z])
                cand = _combo_matrix(mats, xcoef, q)
                if cand is None:
                    ok_all = False
                    continue
                if cand != _mat_mul2(mats[j], mats[i], q):
                    raise BudgetExceeded(
                        "quaternion images are not a ring isomorphism")
        if ok_all:
            used += 1
            if used >= rounds:
                return
    raise BudgetExceeded("product verification ran out of moduli")
