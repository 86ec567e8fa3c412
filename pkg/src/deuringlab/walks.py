"""Random walks in small-prime isogeny graphs, the exact stationary
distribution over the supersingular j-line, and mixing diagnostics.

Walks are composed of per-prime segments; each step picks a uniformly
random order-ell subgroup. The stationary weight of a curve is
24/((p-1)*#Aut(E)); walk-length targets come from the exact integer
inequality 9^n * 24 * eps^2 >= 8^n * (p-1) for 2-walks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import factorint

from .field_curve import (Curve, automorphisms, enumerate_ell_subgroups,
                          frobenius_conjugate)
from .isogeny_rep import IsogenyRep, VeluStep
from .rng import Stream


@dataclass
class WalkSpec:
    """An N-walk request: N factored into per-prime segments (sorted by
    prime unless an explicit segment order is given)."""

    N: int
    source: Curve
    seed: object = 0
    order: list | None = None   # optional [(ell, k), ...] segment order

    def segments(self):
        if self.order is not None:
            return list(self.order)
        return sorted((int(l), int(k)) for l, k in factorint(self.N).items())


def random_walk(spec: WalkSpec, rng: Stream | None = None,
                non_backtracking: bool = False):
    """(chain, target): Velu steps with a uniform subgroup choice each
    step; the non-backtracking variant never takes the reverse edge."""
    if spec.N < 1:
        raise ValueError("walk length N must be positive")
    E = spec.source
    if math.gcd(spec.N, E.p) != 1:
        raise ValueError("walk degree must be coprime to p")
    if rng is None:
        rng = Stream.from_seed(spec.seed, "walk")
    chain = IsogenyRep.identity(E)
    for ell, k in spec.segments():
        back_key = None
        for _ in range(k):
            C = chain.codomain
            subs = enumerate_ell_subgroups(C, ell)
            if back_key is not None:
                subs = [K for K in subs if _sub_key(K, ell) != back_key]
            K = subs[rng.randint(len(subs))]
            st = VeluStep.from_kernel_point(C, K)
            if non_backtracking:
                back_key = _reverse_key(C, st, ell)
            chain = chain.compose(IsogenyRep(C, (st,)))
    return chain, chain.codomain


def _sub_key(K, ell: int):
    best = K.key()
    T = K.add(K)
    for _ in range(ell - 2):
        kt = T.key()
        if kt < best:
            best = kt
        T = T.add(K)
    return best


def _reverse_key(C, st, ell: int):
    P, Q, _ = C.torsion_basis(ell)
    img = st.eval(P)
    if img.is_infinity():
        img = st.eval(Q)
    return _sub_key(img, ell)


LAMBDA_NUM, LAMBDA_DEN = 9, 8  # (3/(2*sqrt(2)))^2 per 2-step, squared


def tau(p: int, eps) -> int:
    """Smallest n with (9/8)^n >= (p-1)/(24*eps^2): the 2-walk length
    (in steps, N = 2^n) that contracts distance to the stationary
    distribution below eps. Exact integer arithmetic."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    num, den = eps.numerator, eps.denominator
    lhs_unit = 24 * num * num
    rhs_unit = (p - 1) * den * den
    n = 0
    lhs, rhs = lhs_unit, rhs_unit
    while lhs < rhs:
        n += 1
        lhs *= LAMBDA_NUM
        rhs *= LAMBDA_DEN
    return n


# ---------------------------------------------------------------------------
# stationary distribution over the supersingular j-line

@dataclass
class StationaryDist:
    """Exact weights mu(E) = 24/((p-1)*#Aut(E)) over a full census of
    supersingular curves (one model per j-invariant)."""

    p: int
    curves: dict                      # j key -> Curve
    probs: dict                       # j key -> Fraction
    aut: dict = field(default_factory=dict)   # j key -> #Aut

    def tv_from_uniform(self) -> Fraction:
        m = len(self.probs)
        u = Fraction(1, m)
        return sum(abs(q - u) for q in self.probs.values()) / 2

    def tv_from_point(self, E: Curve) -> Fraction:
        key = E.j_invariant().key()
        return sum((Fraction(int(k == key)) - q).__abs__()
                   for k, q in self.probs.items()) / 2


def supersingular_census(p: int) -> dict:
    """One curve model per supersingular j-invariant, found by BFS in
    the 2-isogeny graph (connected for supersingular curves)."""
    from .deuring.special import _some_supersingular
    E0 = _some_supersingular(p)
    seen = {E0.j_invariant().key(): E0}
    frontier = [E0]
    while frontier:
        nxt = []
        for E in frontier:
            for K in enumerate_ell_subgroups(E, 2):
                C = VeluStep.from_kernel_point(E, K).codomain
                key = C.j_invariant().key()
                if key not in seen:
                    seen[key] = C
                    nxt.append(C)
        frontier = nxt
    return seen


def stationary(p: int) -> StationaryDist:
    census = supersingular_census(p)
    aut = {key: len(automorphisms(E)) for key, E in census.items()}
    probs = {key: Fraction(24, (p - 1) * n) for key, n in aut.items()}
    total = sum(probs.values())
    assert total == 1, f"mass formula failed: sum = {total}"
    return StationaryDist(p, census, probs, aut)


def sample_stationary(p: int, rng: Stream, source: Curve | None = None):
    """A curve whose distribution is eps-close to stationary for
    eps = 1/p, via a 2^tau(p, 1/p)-walk."""
    if source is None:
        from .deuring.special import _some_supersingular
        source = _some_supersingular(p)
    n = tau(p, Fraction(1, p))
    spec = WalkSpec(2 ** n, source)
    _chain, target = random_walk(spec, rng)
    return target


# ---------------------------------------------------------------------------
# empirical mixing

@dataclass
class MixReport:
    p: int
    N: int
    trials: int
    seed: object
    empirical_tv: float
    bound: float
    sigma: float
    histogram: dict

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "N": str(self.N),
            "trials": self.trials,
            "seed": repr(self.seed),
            "empirical_tv": self.empirical_tv,
            "bound": self.bound,
            "sigma": self.sigma,
            "histogram": {str(k): v for k, v in
                          sorted(self.histogram.items())},
        }


class _TransitionCache:
    """Codomain models of all ell-steps from a model, memoized; walking
    for target statistics then costs one dict lookup per step."""

    def __init__(self):
        self.table: dict = {}

    def step_targets(self, E: Curve, ell: int):
        key = (E.p, E.a.key(), E.b.key(), ell)
        hit = self.table.get(key)
        if hit is None:
            hit = [VeluStep.from_kernel_point(E, K).codomain
                   for K in enumerate_ell_subgroups(E, ell)]
            self.table[key] = hit
        return hit


def _walk_target(source: Curve, segments, rng: Stream,
                 cache: _TransitionCache) -> Curve:
    E = source
    for ell, k in segments:
        for _ in range(k):
            targets = cache.step_targets(E, ell)
            E = targets[rng.randint(len(targets))]
    return E


def l2_contraction(N: int) -> float:
    """Prod (2*sqrt(ell)/(ell+1))^k over the factorization of N."""
    out = 1.0
    for ell, k in factorint(N).items():
        out *= (2 * math.sqrt(ell) / (ell + 1)) ** int(k)
    return out


def tv_bound(p: int, N: int) -> float:
    """sqrt(3)/2 * sqrt((p-1)/24) * contraction: the worst-case bound
    for a point mass source."""
    return (math.sqrt(3) / 2 * math.sqrt((p - 1) / 24)
            * l2_contraction(N))


def mixing_stats(p: int, N: int, trials: int, rng: Stream | None = None,
                 seed=0, source: Curve | None = None) -> MixReport:
    """Empirical target histogram of N-walks vs the exact stationary
    distribution; reports TV, the contraction bound, and a 3-sigma-style
    multinomial sampling scale."""
    if rng is None:
        rng = Stream.from_seed(seed, "mix", p, N)
    dist = stationary(p)
    if source is None:
        source = next(iter(dist.curves.values()))
    segments = sorted((int(l), int(k)) for l, k in factorint(N).items()) \
        if N > 1 else []
    cache = _TransitionCache()
    counts: dict = {}
    for t in range(trials):
        sub = rng.split("trial", t)
        tgt = _walk_target(source, segments, sub, cache)
        key = tgt.j_invariant().key()
        counts[key] = counts.get(key, 0) + 1
    emp = 0.0
    for key, q in dist.probs.items():
        emp += abs(counts.get(key, 0) / trials - float(q))
    emp /= 2
    sigma = 0.5 * sum(math.sqrt(float(q) * (1 - float(q)) / trials)
                      for q in dist.probs.values())
    return MixReport(p, N, trials, seed, emp, tv_bound(p, N), sigma, counts)
