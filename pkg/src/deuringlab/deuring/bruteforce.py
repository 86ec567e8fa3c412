"""Brute-force End(E) and Hom(E1, E2) lattices from isogeny-graph path
pairs, saturated by torsion divisibility.

All lattice arithmetic runs on cached 2x2 torsion-action matrices; curve
evaluations happen once per generator.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

from sympy import factorint

from ..errors import BudgetExceeded, TorsionFieldTooLarge
from ..field_curve import (Curve, curve_isomorphism, enumerate_ell_subgroups,
                           frobenius_conjugate)
from ..intlinalg import (crt, hnf, hnf_equal, kernel_mod, mat_det,
                         minkowski_transform, solve_right)
from ..isogeny_rep import (FrobeniusStep, HomElement, IsoStep, IsogenyRep,
                           VeluStep, action_matrix, choose_torsion,
                           frame_twist, get_frame, hom_matrix_mod)

BF_PRIME_BOUND = 150
_SCHEDULE = [(3, 2), (4, 3), (5, 3), (6, 4)]
_EXTRA_OFFERS = 12  # candidates taken past rank 4, to shrink the index


class HomSpace:
    """Torsion-matrix arena for Hom(E1, E2): fixed frames, twist factors,
    degree and pairing recovery by CRT."""

    def __init__(self, E1: Curve, E2: Curve, deg_cap: int):
        self.E1 = E1
        self.E2 = E2
        p = E1.p
        self.p = p
        bound = 8 * max(deg_cap, 4 * p * p)
        self.pieces = choose_torsion(E1, 2 * bound, avoid=(2, 3))
        self.mods = [q for q, _k in self.pieces]
        self.N = 1
        for q in self.mods:
            self.N *= q
        self.fd = {q: get_frame(E1, q) for q in self.mods}
        same = E1 == E2
        self.fc = {q: (self.fd[q] if same else get_frame(E2, q))
                   for q in self.mods}
        self.mu = {q: frame_twist(self.fd[q], self.fc[q]) for q in self.mods}

    def matrices_of(self, hom) -> dict:
        return {q: action_matrix(hom.evaluate, self.fd[q], self.fc[q])
                for q in self.mods}

    def deg(self, mats: dict, bound: int) -> int:
        res = []
        for q in self.mods:
            m = mats[q]
            res.append(self.mu[q] * (m[0][0] * m[1][1] - m[0][1] * m[1][0]) % q)
        d = crt(res, self.mods)
        if d > bound:
            raise ValueError(f"degree lift {d} exceeds bound {bound}")
        return d

    def pair(self, mats1, d1, mats2, d2) -> Fraction:
        msum = {q: [[a + b for a, b in zip(r1, r2)]
                    for r1, r2 in zip(mats1[q], mats2[q])]
                for q in self.mods}
        ds = self.deg(msum, 2 * (d1 + d2) + 2 * isqrt(d1 * d2) + 2)
        return Fraction(ds - d1 - d2, 2)


class _Builder:
    """Accumulates candidate homs until rank 4, then saturates the span
    to the full lattice Hom(E1, E2) (disc p^2)."""

    def __init__(self, space: HomSpace):
        self.space = space
        self.ref: list = []        # reference basis: (hom, mats, deg)
        self.gram: list = []       # Gram matrix of the reference basis
        self.rows: list = []       # lattice rows, coords w.r.t. ref basis

    def offer(self, hom: HomElement, deg_hint: int) -> bool:
        """Consider a candidate; True when it changed the state."""
        sp = self.space
        mats = sp.matrices_of(hom)
        d = sp.deg(mats, deg_hint)
        if len(self.ref) < 4:
            cand = self.ref + [(hom, mats, d)]
            g = [[Fraction(a[2]) if i == j else
                  sp.pair(a[1], a[2], b[1], b[2])
                  for j, b in enumerate(cand)] for i, a in enumerate(cand)]
            if mat_det(g) == 0:
                return False
            self.ref = cand
            self.gram = g
            if len(self.ref) == 4:
                self.rows = [[Fraction(int(i == j)) for j in range(4)]
                             for i in range(4)]
            return True
        v = [sp.pair(mats, d, b[1], b[2]) for b in self.ref]
        x = solve_right(self.gram, v)
        if self._contains(x):
            return False
        self.rows.append(x)
        self._rehnf()
        return True

    def _contains(self, x) -> bool:
        _den, im = self._int_rows(self.rows + [x])
        return hnf_equal(im[:-1], im)

    @staticmethod
    def _int_rows(rows):
        den = 1
        for r in rows:
            for c in r:
                den = den * c.denominator // gcd(den, c.denominator)
        return den, [[int(c * den) for c in r] for r in rows]

    def _rehnf(self):
        den, im = self._int_rows(self.rows)
        self.rows = [[Fraction(c, den) for c in row] for row in hnf(im)]

    def lattice_gram(self):
        x = self.rows
        g = self.gram
        xg = [[sum(x[i][k] * g[k][j] for k in range(4)) for j in range(4)]
              for i in range(4)]
        return [[sum(xg[i][k] * x[j][k] for k in range(4)) for j in range(4)]
                for i in range(4)]

    def disc(self) -> Fraction:
        return 16 * mat_det(self.lattice_gram())

    def row_hom(self, x) -> HomElement:
        den = 1
        for c in x:
            den = den * c.denominator // gcd(den, c.denominator)
        terms = []
        for c, (hom, _m, _d) in zip(x, self.ref):
            n = int(c * den)
            if n:
                for tc, rep in hom.terms:
                    terms.append((n * tc, rep))
        return HomElement(self.space.E1, self.space.E2, terms, den)

    def saturate(self):
        target = Fraction(self.space.p ** 2)
        for _ in range(200):
            d = self.disc()
            if d == target:
                return
            f2 = d / target
            assert f2.denominator == 1, "lattice exceeds a maximal lattice"
            s = min(int(q) for q in factorint(int(f2)))
            if s == self.space.p:
                raise BudgetExceeded("index divisible by p; need more paths")
            if not self._divide_at(s):
                raise BudgetExceeded(
                    f"no divisible combination at {s}, disc {d}")
        raise BudgetExceeded("saturation did not converge")

    def _divide_at(self, s: int) -> bool:
        mats = [hom_matrix_mod(self.row_hom(x), s) for x in self.rows]
        flat = [[m[0][0], m[0][1], m[1][0], m[1][1]] for m in mats]
        progressed = False
        for crow in kernel_mod(flat, s):
            if all(c % s == 0 for c in crow):
                continue
            new = [sum(Fraction(c) * self.rows[i][j]
                       for i, c in enumerate(crow)) / s for j in range(4)]
            if not self._contains(new):
                self.rows.append(new)
                progressed = True
        if progressed:
            self._rehnf()
        return progressed

    def reduced_basis(self):
        gl = self.lattice_gram()
        t = minkowski_transform(gl)
        rows = [[sum(Fraction(t[i][k]) * self.rows[k][j] for k in range(4))
                 for j in range(4)] for i in range(4)]
        homs = [self.row_hom(r) for r in rows]
        gout = [[sum(sum(Fraction(t[i][k]) * gl[k][m] for k in range(4))
                     * t[j][m] for m in range(4))
                 for j in range(4)] for i in range(4)]
        return homs, gout


# ---------------------------------------------------------------------------
# path-pair candidate generation

def _canonical_gen(K, ell: int):
    best = K
    T = K.add(K)
    for _ in range(ell - 2):
        if T.key() < best.key():
            best = T
        T = T.add(K)
    return best


def _tree(E: Curve, ell: int, depth: int):
    """Non-backtracking ell-isogeny path reps from E, BFS order."""
    out = [IsogenyRep.identity(E)]
    frontier = [(IsogenyRep.identity(E), None)]
    for _ in range(depth):
        nxt = []
        for phi, back in frontier:
            C = phi.codomain
            for K in enumerate_ell_subgroups(C, ell):
                if back is not None and back.key() == K.key():
                    continue
                st = VeluStep.from_kernel_point(C, K)
                chain = phi.compose(IsogenyRep(C, [st]))
                P, Q, _ = C.torsion_basis(ell)
                img = st.eval(P)
                if img.is_infinity():
                    img = st.eval(Q)
                nxt.append((chain, _canonical_gen(img, ell)))
                out.append(chain)
        frontier = nxt
    return out


def _path_pair_candidates(E1: Curve, E2: Curve, d2: int, d3: int):
    """Homs E1 -> E2 of the shape dual(psi) o iso o phi with phi a 2-power
    path from E1 and psi a 3-power path from E2, plus Frobenius-twisted
    matches; sorted by degree."""
    t2 = _tree(E1, 2, d2)
    t3 = _tree(E2, 3, d3)
    cands = []
    duals: dict = {}
    for psi in t3:
        for phi in t2:
            C, D = phi.codomain, psi.codomain
            routes = []
            if C.j_invariant() == D.j_invariant():
                routes.append(phi)
            if frobenius_conjugate(C).j_invariant() == D.j_invariant():
                routes.append(phi.compose(IsogenyRep(C, [FrobeniusStep(C)])))
            if not routes:
                continue
            if id(psi) not in duals:
                duals[id(psi)] = psi.dual()
            dpsi = duals[id(psi)]
            for route in routes:
                M = route.codomain
                for u in curve_isomorphism(M, D, all_maps=True):
                    chain = route.compose(
                        IsogenyRep(M, [IsoStep(M, D, u)])).compose(dpsi)
                    cands.append((chain.degree, chain))
    cands.sort(key=lambda t: t[0])
    return cands


def end_ring_lattice(E: Curve, norm_bound: int | None = None):
    """Minkowski-reduced basis (4 HomElements) of End(E) with its Gram
    matrix; the lattice has discriminant p^2."""
    return _hom_lattice(E, E, norm_bound, with_identity=True)


def hom_module_lattice(E1: Curve, E2: Curve,
                       norm_bound: int | None = None):
    """Minkowski-reduced basis of Hom(E1, E2) with its Gram matrix
    (pairing (deg(f+g)-deg f-deg g)/2); discriminant p^2."""
    return _hom_lattice(E1, E2, norm_bound, with_identity=(E1 == E2))


def hom_module_bruteforce(E1: Curve, E2: Curve,
                          norm_bound: int | None = None):
    """4 HomElements spanning Hom(E1, E2), Minkowski-reduced."""
    return hom_module_lattice(E1, E2, norm_bound)[0]


def _hom_lattice(E1: Curve, E2: Curve, norm_bound, with_identity: bool):
    p = E1.p
    if p > BF_PRIME_BOUND:
        raise BudgetExceeded(f"p={p} beyond the brute-force search bound")
    last = None
    for d2, d3 in _SCHEDULE:
        cap = 2 ** d2 * 3 ** d3 * p
        space = HomSpace(E1, E2, cap)
        builder = _Builder(space)
        if with_identity:
            builder.offer(HomElement.from_isogeny(IsogenyRep.identity(E1)), 1)
        extra = _EXTRA_OFFERS
        for deg, chain in _path_pair_candidates(E1, E2, d2, d3):
            if norm_bound and deg > norm_bound:
                continue
            builder.offer(HomElement.from_isogeny(chain), deg)
            if len(builder.ref) == 4:
                extra -= 1
                if extra <= 0:
                    break
        if len(builder.ref) < 4:
            last = BudgetExceeded("path pairs did not reach rank 4")
            continue
        try:
            builder.saturate()
        except (BudgetExceeded, TorsionFieldTooLarge) as exc:
            last = exc
            continue
        return builder.reduced_basis()
    raise last if last else BudgetExceeded("empty search schedule")
