"""Self-reductions that trade a worst-case instance for oracle calls on
re-randomized (near-stationary) instances.

All three arrows follow the same shape: push the input curve through a
random walk, query the oracle at the walk's end, and pull the answer
back along the walk. Walk lengths come from the exact mixing bound in
`walks.tau`; the instance the oracle sees is then within the configured
total-variation distance of stationary.
"""

from __future__ import annotations

import math
from fractions import Fraction

from ..deuring.ideals import ideal_to_isogeny_desk, isogeny_to_ideal
from ..deuring.moer import MoerSolution, moer_from_basis
from ..deuring.special import special_curve_E0
from ..errors import BudgetExceeded, RetryBudgetExceeded, TorsionFieldTooLarge
from ..isogeny_rep import (FrobeniusStep, HomElement, IsogenyRep,
                           get_frame, hom_compose,
                           isogeny_from_kernel_point)
from ..quat import connecting_ideal, minkowski_reduce, pair, right_order
from ..rng import Stream
from ..walks import WalkSpec, random_walk, tau, tv_bound
from .endring import reduce_ideal
from .maxorder import transport_order
from .oneend import _nonscalar
from .report import QueryMeter, ReductionReport


def _conjugate(h1, h2):
    return hom_compose(h1, h2)


def oneend_wc_to_ac(suite, E, seed=0) -> ReductionReport:
    """Nonscalar endomorphism of E from a OneEnd oracle that only
    answers on near-stationary curves: walk away, ask, conjugate back."""
    meter = QueryMeter(suite)
    p = E.p
    n = tau(p, Fraction(1, p))
    rng = Stream.from_seed(seed, "oneend-ac")
    eta, Ew = random_walk(WalkSpec(2 ** n, E, seed), rng)
    theta = suite.one_end(Ew)
    he = HomElement.from_isogeny(eta)
    hd = HomElement.from_isogeny(eta.dual())
    out = hom_compose(hom_compose(he, theta), hd)
    if not _nonscalar(out, E):
        # conjugation preserves nonscalarity, so the oracle answer was bad
        raise BudgetExceeded("conjugated endomorphism degenerated to a scalar")
    return ReductionReport("one_end<-one_end_avg", out, queries=meter.delta(),
                           walk_lengths=[n], branch="conjugate",
                           notes=[f"2-walk length {n}"])


def oneend_from_avg_isogeny(suite, E, seed=0, c1=2.0, c2=4.0, eps=None,
                            retries=8) -> ReductionReport:
    """Nonscalar endomorphism of E from an Isogeny oracle on average
    pairs: a non-backtracking 3-walk plus a 2-isogeny hide E on one
    side, a 2-walk re-randomizes the other, and the oracle's connecting
    isogeny closes the loop.  Retries with fresh randomness if the loop
    happens to close to a scalar."""
    meter = QueryMeter(suite)
    p = E.p
    if eps is None:
        eps = Fraction(1, p)
    n = max(1, math.ceil((c1 * math.log(p) - c2 * math.log(float(eps)))
                         / math.log(3)))
    m = tau(p, Fraction(1, p))
    S = E.torsion_basis(2)[0]
    calls = 0
    for trial in range(retries):
        rng = Stream.from_seed(seed, f"oneend-avg-{trial}")
        phi, E1 = random_walk(WalkSpec(3 ** n, E, seed),
                              rng, non_backtracking=True)
        nu = isogeny_from_kernel_point(E1, phi.evaluate(S))
        eta, E3 = random_walk(WalkSpec(2 ** m, E, (seed, trial)), rng)
        sigma = suite.isogeny(nu.codomain, E3)
        calls += 1
        theta = hom_compose(
            hom_compose(HomElement.from_isogeny(phi.compose(nu)),
                        HomElement.from_isogeny(sigma)),
            HomElement.from_isogeny(eta.dual()))
        if _nonscalar(theta, E):
            return ReductionReport(
                "one_end<-isogeny_avg", theta, queries=meter.delta(),
                walk_lengths=[n, m], branch=f"trial-{trial}",
                notes=[f"3-walk length {n}", f"2-walk length {m}",
                       f"oracle calls {calls}"])
    raise RetryBudgetExceeded(
        f"no nonscalar endomorphism after {retries} oracle calls")


def _mixing_modulus(E, level_lcm=6, limit=60, reserve_count=2):
    """(N, reserve, skipped): N is the squarefree product of the usable
    small primes, where usable means the full ell-torsion sits at a
    level dividing level_lcm.  The level cap keeps every field touched
    while evaluating pulled-back endomorphisms inside F_{p^(2*lcm)};
    mixed levels would compound into towers far beyond reach.  The
    first reserve_count usable primes >= 5 are withheld from N so the
    final ring checks still have torsion coprime to every hom divisor."""
    p = E.p
    from sympy import primerange
    usable, skipped = [], []
    for ell in primerange(2, limit):
        ell = int(ell)
        if ell == p:
            continue
        try:
            k = E.torsion_level(ell, level_lcm)
        except TorsionFieldTooLarge:
            skipped.append(ell)
            continue
        if level_lcm % k != 0:
            skipped.append(ell)
            continue
        usable.append(ell)
    reserve = [ell for ell in usable if ell >= 5][:reserve_count]
    N = 1
    for ell in usable:
        if ell not in reserve:
            N *= ell
    if N <= 2:
        raise BudgetExceeded("could not assemble a mixing modulus")
    return N, reserve, skipped


def _divide_where_checkable(big, n):
    """big/n, verifying kernel containment at every prime power with a
    reachable torsion frame; unreachable factors are accepted on the
    right-order argument and re-certified by the ring product check."""
    from sympy import factorint
    from ..isogeny_rep import hom_matrix_mod
    for ell, e in factorint(n).items():
        q = int(ell) ** int(e)
        try:
            m = hom_matrix_mod(big, q)
        except TorsionFieldTooLarge:
            continue
        if any(x % q for row in m for x in row):
            raise BudgetExceeded("pushed-forward endomorphism not integral")
    return HomElement(big.domain, big.codomain, big.terms,
                      big.divisor * n, big.support)


def transport_moer(moer: MoerSolution, kappa: IsogenyRep) -> MoerSolution:
    """Matched ring at the codomain of kappa, pushed forward from one at
    its domain: the codomain's endomorphisms are kappa b kappa-hat / n
    for b in the right order of the ideal of kappa."""
    n = kappa.degree
    I = isogeny_to_ideal(kappa, moer)
    OR = right_order(I)
    basis = minkowski_reduce(OR)
    rows = [[img.t, img.x, img.y, img.z] for img in moer.images]
    from ..intlinalg import solve_right
    hk = HomElement.from_isogeny(kappa)
    hkd = HomElement.from_isogeny(kappa.dual())
    homs = []
    for b in basis:
        c = solve_right(rows, [b.t, b.x, b.y, b.z])
        den = 1
        for x in c:
            den = den * x.denominator // math.gcd(den, x.denominator)
        combo = HomElement.zero(moer.curve, moer.curve)
        for x, h in zip(c, moer.basis):
            combo = combo.add(h.scale(int(x * den)))
        big = hom_compose(hom_compose(hkd, combo), hk)
        homs.append(_divide_where_checkable(big, n * den))
    gram = [[pair(a, b) for b in basis] for a in basis]
    traces = [b.t * 2 for b in basis]
    return moer_from_basis(kappa.codomain, homs, gram, traces=traces)


def conjugate_moer(moer: MoerSolution, target) -> MoerSolution:
    """Matched ring at the Galois conjugate of moer.curve (given as the
    model `target`): pi b pi-hat equals p times the conjugated
    endomorphism, so the divisor-p element is exact by construction and
    the product check inside moer_from_basis certifies it."""
    C = moer.curve
    p = C.p
    out_map = IsogenyRep(C, (FrobeniusStep(C),)).post_iso(target)
    Cp = IsogenyRep(C, (FrobeniusStep(C),)).codomain
    pre = IsogenyRep.identity(target).post_iso(Cp)
    inner = pre.compose(IsogenyRep(Cp, (FrobeniusStep(Cp),)))
    hin = HomElement.from_isogeny(inner)
    hout = HomElement.from_isogeny(out_map)
    homs = []
    for b in moer.basis:
        big = hom_compose(hom_compose(hin, b), hout)
        homs.append(HomElement(target, target, big.terms,
                               big.divisor * p, big.support))
    traces = [img.t * 2 for img in moer.images]
    return moer_from_basis(target, homs, moer.gram, traces=traces)


def moer_from_avg_maxorder(suite, E, seed=0) -> ReductionReport:
    """Matched ring for E from a MaxOrder oracle on near-stationary
    curves: walk to a random curve, get its order, connect it to the
    special curve's explicit ring, and pull the result back along the
    walk."""
    meter = QueryMeter(suite)
    p = E.p
    N, reserve, skipped = _mixing_modulus(E)
    rng = Stream.from_seed(seed, "moer-avg")
    eta, Ew = random_walk(WalkSpec(N, E, seed), rng)
    Ow = suite.max_order(Ew)

    E0, sol0 = special_curve_E0(p)
    o = transport_order(Ow, sol0.order)
    # the ideal norm ends up in hom divisors, so it must stay coprime to
    # every torsion level the pullback walk evaluates at, and its own
    # prime factors must carry reachable torsion frames
    def _frame_ok(m):
        from sympy import factorint
        for ell, e in factorint(m).items():
            try:
                get_frame(E0, int(ell) ** int(e))
            except TorsionFieldTooLarge:
                return False
        return True

    res = 1
    for ell in reserve:
        res *= ell
    J = reduce_ideal(connecting_ideal(sol0.order, o), avoid=p * N * res,
                     accept=_frame_ok)
    if math.gcd(int(J.nrd()), p * N * res) != 1 or not _frame_ok(int(J.nrd())):
        raise BudgetExceeded("connecting ideal class stuck on the walk support")
    kappa = ideal_to_isogeny_desk(E0, sol0, J)
    branch = "direct"
    try:
        sol_w = transport_moer(sol0, kappa.post_iso(Ew))
    except Exception:
        sol_w = conjugate_moer(transport_moer(sol0, kappa), Ew)
        branch = "conjugate"
    sol = transport_moer(sol_w, eta.dual())
    if sol.curve != E:
        raise BudgetExceeded("pulled-back solution landed on a wrong model")
    notes = [f"walk modulus {N}", f"ideal norm {J.nrd()}",
             f"reserved primes {reserve}",
             f"tv bound {tv_bound(p, N):.4f}"]
    if skipped:
        notes.append(f"skipped primes {skipped}")
    return ReductionReport("moer<-max_order_avg", sol, queries=meter.delta(),
                           walk_lengths=[N], branch=branch, notes=notes)
