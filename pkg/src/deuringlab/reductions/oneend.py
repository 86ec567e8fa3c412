"""One nonscalar endomorphism from MaxOrder oracles.

Three layered pieces: a bijection between order-ell subgroups and
norm-ell left ideals of the order (matching right-order types), a local
splitting O/ellO = M2(F_ell) aligned with the torsion action, and the
assembly of a short order element into torsion images of an actual
endomorphism.  Degenerate graph neighborhoods (repeated j-invariants,
tiny endomorphisms) short-circuit to a directly constructed answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from sympy import primerange

from ..deuring.bruteforce import end_ring_lattice
from ..errors import BudgetExceeded, NoAutomorphismFound, SearchExhausted
from ..field_curve import (curve_isomorphism, enumerate_ell_subgroups,
                           frobenius_conjugate)
from ..intlinalg import kernel_mod
from ..isogeny_rep import (FrobeniusStep, HomElement, InterpolationData,
                           IsoStep, IsogenyRep, VeluStep, get_frame,
                           hom_matrix_mod, isogeny_from_kernel_point,
                           recognize_endomorphism)
from ..quat import (LeftIdeal, QuatLattice, connecting_ideal,
                    minkowski_reduce, orders_isomorphic, pgl2_classes,
                    right_order, split_mod_ell)
from .maxorder import transport_order
from .report import QueryMeter, ReductionReport


# ---------------------------------------------------------------------------
# direct search for tiny endomorphisms

def _cyclic_subgroup_gens(E, d: int):
    """One generator per cyclic subgroup of order exactly d."""
    P, Q, _ = E.torsion_basis(d)
    seen = set()
    out = []
    for a in range(d):
        for b in range(d):
            g = gcd(gcd(a, b), d)
            if g != 1:
                continue
            K = P.mul(a).add(Q.mul(b))
            key = min((K.mul(m).key() for m in range(1, d) if gcd(m, d) == 1))
            if key in seen:
                continue
            seen.add(key)
            out.append(K)
    return out


def _nonscalar(h, E, probes=2) -> bool:
    from ..isogeny_rep import choose_torsion
    used = 0
    for q, _k in choose_torsion(E, 10 ** 6, avoid=(E.p,)):
        m = hom_matrix_mod(h, q)
        if (m[0][1] % q or m[1][0] % q
                or (m[0][0] - m[1][1]) % q):
            return True
        used += 1
        if used >= probes:
            return False
    return False


def small_nonscalar_endomorphism(E, bound: int) -> HomElement:
    """Separable nonscalar endomorphism of degree <= bound, by kernel
    enumeration in increasing degree; degrees divisible by p are skipped.
    """
    for d in range(2, bound + 1):
        if gcd(d, E.p) != 1:
            continue
        for K in _cyclic_subgroup_gens(E, d):
            phi = isogeny_from_kernel_point(E, K)
            C = phi.codomain
            if C.j_invariant() != E.j_invariant():
                continue
            for u in curve_isomorphism(C, E, all_maps=True):
                cand = phi.compose(IsogenyRep(C, (IsoStep(C, E, u),)))
                h = HomElement.from_isogeny(cand)
                if _nonscalar(h, E):
                    return h
    raise SearchExhausted(f"no nonscalar endomorphism of degree <= {bound}")


# ---------------------------------------------------------------------------
# subgroup <-> ideal bijection

@dataclass
class IdealBijection:
    E: object
    ell: int
    order: object                    # maximal order matched to End(E)
    pairs: list = field(default_factory=list)   # (kernel gen, LeftIdeal)
    endo: HomElement | None = None
    branch: str = ""
    notes: list = field(default_factory=list)


def _iso_to(phi: IsogenyRep, target) -> IsogenyRep:
    return phi.post_iso(target)


def _norm_ell_ideals(O, ell: int) -> list[LeftIdeal]:
    """All ell+1 left ideals of norm ell, via lines of O/ellO."""
    split = split_mod_ell(O, ell)
    bs = O.basis()
    out = []
    for line in _all_lines(ell):
        x, y = line
        cond = []
        for im in split.images:
            a, b, c, d = im
            cond.append([(a * x + b * y) % ell, (c * x + d * y) % ell])
        quats = [b * ell for b in bs]
        for v in kernel_mod(cond, ell):
            q = O.alg.elt(0)
            for c, b in zip(v, bs):
                q = q + b * int(c)
            quats.append(q)
        lat = QuatLattice.from_rows(O.alg, quats)
        ide = LeftIdeal.from_lattice(O, lat, verify=True)
        if ide.nrd() != ell:
            raise BudgetExceeded("line ideal has wrong norm")
        out.append(ide)
    return out


def _all_lines(ell):
    return [(1, t) for t in range(ell)] + [(0, 1)]


def ideal_bijection(suite, E, ell: int, order=None,
                    subs=None) -> IdealBijection:
    """Match each order-ell subgroup with the norm-ell left ideal whose
    right order has the neighbor's endomorphism type.  If two neighbors
    share a j-invariant (or a Galois-conjugate one), a small nonscalar
    endomorphism is returned instead of a bijection."""
    if subs is None:
        subs = enumerate_ell_subgroups(E, ell)
    reps = [IsogenyRep(E, (VeluStep.from_kernel_point(E, K),)) for K in subs]
    js = [r.codomain.j_invariant() for r in reps]
    cjs = [frobenius_conjugate(r.codomain).j_invariant() for r in reps]

    for i in range(len(reps)):
        for j in range(len(reps)):
            if i == j:
                continue
            if i < j and js[i] == js[j]:
                chain = _iso_to(reps[i], reps[j].codomain).compose(
                    reps[j].dual())
                return IdealBijection(E, ell, order,
                                      endo=HomElement.from_isogeny(chain),
                                      branch="duplicate-j")
            if cjs[i] == js[j]:
                C = reps[i].codomain
                fr = reps[i].compose(IsogenyRep(C, (FrobeniusStep(C),)))
                chain = _iso_to(fr, reps[j].codomain).compose(reps[j].dual())
                return IdealBijection(E, ell, order,
                                      endo=HomElement.from_isogeny(chain),
                                      branch="conjugate-duplicate-j")

    meter = QueryMeter(suite)
    if order is None:
        order = suite.max_order(E)
    bij = IdealBijection(E, ell, order)
    pool = None
    for K, r in zip(subs, reps):
        Oi = transport_order(suite.max_order(r.codomain), order)
        J = connecting_ideal(order, Oi)
        red = minkowski_reduce(J)
        nJ = int(J.nrd())
        if red[1].nrd() <= ell * nJ:
            bij.endo = small_nonscalar_endomorphism(E, ell * ell)
            bij.branch = "small-endo"
            return bij
        a1 = red[0]
        lat = QuatLattice.from_rows(
            order.alg, [b * a1.conj() for b in J.basis()]).scale(
                Fraction(1, nJ))
        I = LeftIdeal.from_lattice(order, lat, verify=True)
        if I.nrd() != ell:
            # the reduced class missed norm ell; match right orders over
            # the explicit list of norm-ell ideals instead
            if pool is None:
                pool = _norm_ell_ideals(order, ell)
            I = next(ide for ide in pool
                     if orders_isomorphic(right_order(ide), Oi)[0])
            bij.notes.append(f"line-scan fallback at subgroup {len(bij.pairs)}")
        bij.pairs.append((K, I))
    keys = {ide.key() for _K, ide in bij.pairs}
    if len(keys) != len(bij.pairs):
        raise BudgetExceeded("subgroup-to-ideal map is not injective")
    bij.notes.append(f"queries {meter.delta()}")
    return bij


# ---------------------------------------------------------------------------
# local splitting aligned with the torsion action

class LocalIso:
    """lam: O/ellO -> M2(F_ell) with lam(x) the mod-ell action matrix of
    the endomorphism matching x (row convention on the canonical frame).
    lam(xy) = lam(y) lam(x): quaternion products run in composition
    order."""

    def __init__(self, E, ell: int, order, split, P):
        self.E = E
        self.ell = ell
        self.order = order
        self.split = split
        self.P = P  # flat (a, b, c, d) mod ell, the frame alignment

    def matrix(self, q) -> list:
        from ..quat import m2_inv, m2_mul
        f = self.split.apply(q)
        ft = (f[0], f[2], f[1], f[3])
        m = m2_mul(m2_mul(m2_inv(self.P, self.ell), ft, self.ell),
                   self.P, self.ell)
        return [[m[0], m[1]], [m[2], m[3]]]


def _column_kernel(mats, ell: int):
    """Common column kernel line of flat 2x2 matrices, canonicalized:
    the u with M u = 0 for every M, found as a left kernel of the
    stacked transposes."""
    row0 = [x for m in mats for x in (m[0], m[2])]
    row1 = [x for m in mats for x in (m[1], m[3])]
    ker = kernel_mod([row0, row1], ell)
    lines = [tuple(x % ell for x in v) for v in ker if any(x % ell for x in v)]
    if len(lines) != 1:
        raise BudgetExceeded("ideal does not reduce to a single line")
    return _canon_line(lines[0], ell)


def _canon_line(v, ell: int):
    x, y = v[0] % ell, v[1] % ell
    if x:
        inv = pow(x, -1, ell)
        return (1, y * inv % ell)
    return (0, 1)


def local_iso_mod_ell(suite, E, ell: int, order=None) -> ReductionReport:
    """Align the splitting O/ellO = M2(F_ell) with the action on E[ell]
    by matching ideal kernels to subgroup lines; exhaustive over PGL2."""
    meter = QueryMeter(suite)
    bij = ideal_bijection(suite, E, ell, order=order)
    if bij.endo is not None:
        return ReductionReport("local_iso", bij.endo, queries=meter.delta(),
                               branch=bij.branch)
    order = bij.order
    split = split_mod_ell(order, ell)
    frame = get_frame(E, ell)
    targets = []
    for K, ide in bij.pairs:
        u = _column_kernel([split.apply(b) for b in ide.basis()], ell)
        line = _canon_line(frame.dlog(K), ell)
        targets.append((u, line))
    found = None
    for P in pgl2_classes(ell):
        ok = True
        for u, line in targets:
            w = ((u[0] * P[0] + u[1] * P[2]) % ell,
                 (u[0] * P[1] + u[1] * P[3]) % ell)
            if _canon_line(w, ell) != line:
                ok = False
                break
        if ok:
            found = P
            break
    if found is None:
        raise NoAutomorphismFound("no frame alignment matches the bijection")
    li = LocalIso(E, ell, order, split, found)
    one = li.matrix(order.alg.one())
    if one != [[1, 0], [0, 1]]:
        raise NoAutomorphismFound("alignment does not fix the identity")
    return ReductionReport("local_iso", li, queries=meter.delta(),
                           branch="aligned", notes=list(bij.notes))


# ---------------------------------------------------------------------------
# the endomorphism itself

def oneend_from_maxorder(suite, E) -> ReductionReport:
    """Nonscalar endomorphism whose degree is the second successive
    minimum of the order: local images of the short element are glued
    over enough primes and recognized as one endomorphism."""
    meter = QueryMeter(suite)
    p = E.p
    O = suite.max_order(E)
    red = minkowski_reduce(O)
    theta = red[1]
    n = int(theta.nrd())
    if n > 2 * p * p:
        raise BudgetExceeded("second minimum exceeds its norm bound")

    ells, N = [], 1
    for ell in primerange(2, 10 ** 4):
        if ell == p or n % ell == 0:
            continue
        ells.append(int(ell))
        N *= int(ell)
        if N > n:
            break

    pieces = []
    notes = [f"theta nrd {n}", f"moduli {ells}"]
    for ell in ells:
        rep = local_iso_mod_ell(suite, E, ell, order=O)
        if isinstance(rep.solution, HomElement):
            if not _nonscalar(rep.solution, E):
                raise BudgetExceeded("degenerate branch returned a scalar")
            return ReductionReport("one_end<-max_order", rep.solution,
                                   queries=meter.delta(),
                                   branch=f"{rep.branch}@{ell}", notes=notes)
        li = rep.solution
        m = li.matrix(theta)
        frame = get_frame(E, ell)
        pieces.append((ell, frame.P, frame.Q,
                       frame.point(m[0][0], m[0][1]),
                       frame.point(m[1][0], m[1][1])))

    data = InterpolationData(E, E, n, pieces)
    basis, _gram = end_ring_lattice(E)   # desk-scale recognition table
    h = recognize_endomorphism(E, basis, data)
    if not _nonscalar(h, E):
        raise BudgetExceeded("recognized element is scalar")
    return ReductionReport("one_end<-max_order", h, queries=meter.delta(),
                           branch="interpolated", notes=notes)
