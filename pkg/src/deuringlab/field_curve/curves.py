"""Short Weierstrass curves over F_{p^2}, group law, torsion, Velu steps.

All curves of interest are supersingular with #E(F_{p^2}) = (p+1)^2, so
the F_{p^2}-Frobenius acts as the scalar -p; torsion fields are then
determined by the multiplicative order of -p modulo the torsion level.
"""

from __future__ import annotations

from math import gcd

from ..errors import (BadKernelOrder, NotASquare, SingularCurve,
                      TorsionFieldTooLarge, WrongCurve)
from ..rng import Stream
from .fields import Fq, FieldCtx, descend, embed, fq_poly_roots, get_ctx

MAX_TORSION_K = 12


class Curve:
    """y^2 = x^3 + a x + b over F_{p^2} (a, b at tower level 1)."""

    __slots__ = ("a", "b", "_j", "_count", "_fscalar", "_coeffs_at", "_tf_cache")

    def __init__(self, a: Fq, b: Fq):
        base = get_ctx(a.ctx.p, 1)
        if a.ctx is not base:
            a2 = descend(a, base)
            if a2 is None:
                raise ValueError("curve coefficients must lie in F_{p^2}")
            a = a2
        if b.ctx is not base:
            b2 = descend(b, base)
            if b2 is None:
                raise ValueError("curve coefficients must lie in F_{p^2}")
            b = b2
        disc = a * a * a * 4 + b * b * 27
        if not disc:
            raise SingularCurve("4a^3 + 27b^2 = 0")
        self.a = a
        self.b = b
        self._j = None
        self._count = None
        self._fscalar = None
        self._coeffs_at = {}
        self._tf_cache = {}

    @property
    def p(self) -> int:
        return self.a.ctx.p

    @property
    def ctx(self) -> FieldCtx:
        return self.a.ctx

    def __eq__(self, other):
        return (isinstance(other, Curve) and self.a == other.a
                and self.b == other.b)

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        return f"Curve(p={self.p}, a={self.a.c}, b={self.b.c})"

    def j_invariant(self) -> Fq:
        if self._j is None:
            a3 = self.a * self.a * self.a * 4
            self._j = a3 * 1728 / (a3 + self.b * self.b * 27)
        return self._j

    def coeffs_at(self, ctx: FieldCtx) -> tuple[Fq, Fq]:
        key = ctx.k
        if key not in self._coeffs_at:
            self._coeffs_at[key] = (embed(self.a, ctx), embed(self.b, ctx))
        return self._coeffs_at[key]

    def infinity(self) -> "Point":
        return Point(self, None, None)

    def point(self, x: Fq, y: Fq) -> "Point":
        a, b = self.coeffs_at(x.ctx)
        if y * y != x * x * x + a * x + b:
            raise WrongCurve("point not on curve")
        return Point(self, x, y)

    def rhs(self, x: Fq) -> Fq:
        a, b = self.coeffs_at(x.ctx)
        return x * x * x + a * x + b

    # -- point counting -----------------------------------------------------

    def count_points(self) -> int:
        """Exact #E(F_{p^2}), certified.

        Tries the Hasse-interval order sieve with random points first and
        falls back to a full enumeration if the candidate set is ambiguous.
        """
        if self._count is None:
            n = self._count_by_orders()
            if n is None:
                n = self._count_naive()
            self._count = n
        return self._count

    def _count_by_orders(self):
        p = self.p
        base = self.ctx
        lo = p * p + 1 - 2 * p
        stream = Stream.from_seed("count", p, self.a.c, self.b.c)
        candidates = None
        exponent = 1
        for _ in range(12):
            P = random_point(self, base, stream)
            Q = P.mul(lo)
            hits = []
            R = Q
            for n in range(lo, p * p + 1 + 2 * p + 1):
                if R.is_infinity():
                    hits.append(n)
                R = R.add(P)
            hits_set = set(hits)
            candidates = hits_set if candidates is None else candidates & hits_set
            # order of P divides any n1 - n0 difference and n0 - 0 offsets
            if len(candidates) == 1:
                return candidates.pop()
            # track exponent via the gcd of differences and a known multiple
            if hits:
                d = 0
                for h in hits[1:]:
                    d = gcd(d, h - hits[0])
                ordP = self._exact_order(P, hits[0], d)
                exponent = exponent * ordP // gcd(exponent, ordP)
        if candidates:
            good = [n for n in candidates
                    if n % exponent == 0 and (n // exponent) and exponent % (n // exponent) == 0]
            if len(good) == 1:
                return good[0]
        return None

    def _exact_order(self, P: "Point", multiple: int, step: int):
        # order divides `multiple`; refine by removing prime factors
        n = multiple
        m = n
        fac = _factorize(n)
        for q in fac:
            while m % q == 0 and P.mul(m // q).is_infinity():
                m //= q
        return m

    def _count_naive(self) -> int:
        base = self.ctx
        squares = _square_table(base)
        a, b = self.a, self.b
        total = 1  # infinity
        for i in range(base.order):
            x = base.from_index(i)
            z = x * x * x + a * x + b
            if not z:
                total += 1
            elif z.c in squares:
                total += 2
        return total

    def is_supersingular(self) -> bool:
        return self.count_points() % self.p == 1

    def frobenius_scalar(self) -> int:
        """s with pi_{p^2} = [s] on E, for curves where Frobenius is scalar
        (s = -p iff #E = (p+1)^2, s = p iff #E = (p-1)^2)."""
        if self._fscalar is None:
            n = self.count_points()
            p = self.p
            if n == (p + 1) ** 2:
                self._fscalar = -p
            elif n == (p - 1) ** 2:
                self._fscalar = p
            else:
                raise ValueError("Frobenius is not scalar on this curve")
        return self._fscalar

    # -- torsion ------------------------------------------------------------

    def torsion_level(self, n: int, max_k: int = MAX_TORSION_K) -> int:
        """Smallest k with E[n] contained in E(F_{p^{2k}})."""
        if n == 1:
            return 1
        s = self.frobenius_scalar()
        for k in range(1, max_k + 1):
            if (s ** k - 1) % n == 0:
                return k
        raise TorsionFieldTooLarge(
            f"E[{n}] needs extension degree beyond 2*{max_k} (p={self.p})")

    def torsion_basis(self, n: int, max_k: int = MAX_TORSION_K):
        """(P, Q, ctx) generating E[n] for n squarefree or a prime power
        (any n with gcd(n, p) = 1 and a single tower level works)."""
        if gcd(n, self.p) != 1:
            raise ValueError("torsion level must be coprime to p")
        if n == 1:
            return self.infinity(), self.infinity(), self.ctx
        key = n
        if key in self._tf_cache:
            return self._tf_cache[key]
        k = self.torsion_level(n, max_k)
        ctx = get_ctx(self.p, k)
        fac = _factorize(n)
        P = self.infinity()
        Q = self.infinity()
        for ell, e in fac.items():
            Pl, Ql = self._prime_power_basis(ell, e, ctx)
            P = P.add(Pl)
            Q = Q.add(Ql)
        assert certify_basis(self, P, Q, n)
        self._tf_cache[key] = (P, Q, ctx)
        return P, Q, ctx

    def _prime_power_basis(self, ell: int, e: int, ctx: FieldCtx):
        s = self.frobenius_scalar()
        m = s ** ctx.k - 1
        v = 0
        mm = m
        while mm % ell == 0:
            mm //= ell
            v += 1
        if v < e:
            raise TorsionFieldTooLarge("requested torsion not rational here")
        cof = (m * m) // ell ** (2 * v)
        stream = Stream.from_seed("torsion", self.p, self.a.c, self.b.c, ell, e, ctx.k)
        pts = []
        for _ in range(400):
            R = random_point(self, ctx, stream).mul(cof)
            # R has ell-power order <= ell^(2v); find exact order
            w = 0
            T = R
            while not T.is_infinity():
                T = T.mul(ell)
                w += 1
            if w < e:
                continue
            R = R.mul(ell ** (w - e))  # exact order ell^e
            if not pts:
                pts.append(R)
                continue
            P0 = pts[0].mul(ell ** (e - 1))
            Q0 = R.mul(ell ** (e - 1))
            # independence mod ell by discrete-log scan
            T = P0.curve.infinity()
            dependent = False
            for a in range(ell):
                if T.eq(Q0):
                    dependent = True
                    break
                T = T.add(P0)
            if not dependent:
                return pts[0], R
        raise RuntimeError("torsion basis sampling failed")  # pragma: no cover


def certify_basis(E: Curve, P, Q, n: int) -> bool:
    """Exact orders n and no relation aP + bQ = 0 detectable at each prime:
    a discrete-log search certificate, no pairings."""
    if n == 1:
        return P.is_infinity() and Q.is_infinity()
    if not (P.mul(n).is_infinity() and Q.mul(n).is_infinity()):
        return False
    for ell in _factorize(n):
        m = n // ell
        P0, Q0 = P.mul(m), Q.mul(m)
        if P0.is_infinity() or Q0.is_infinity():
            return False
        T = E.infinity()
        for a in range(ell):
            if T.eq(Q0):
                return False
            T = T.add(P0)
    return True


class Point:
    """Affine point or the point at infinity; immutable."""

    __slots__ = ("curve", "x", "y")

    def __init__(self, curve: Curve, x: Fq | None, y: Fq | None):
        self.curve = curve
        self.x = x
        self.y = y

    def is_infinity(self) -> bool:
        return self.x is None

    @property
    def ctx(self):
        return self.curve.ctx if self.x is None else self.x.ctx

    def eq(self, other: "Point") -> bool:
        if self.curve != other.curve:
            return False
        if self.is_infinity() or other.is_infinity():
            return self.is_infinity() and other.is_infinity()
        return self.x == other.x and self.y == other.y

    def key(self):
        if self.is_infinity():
            return (1,)
        return (0, self.x.ctx.k, self.x.c, self.y.c)

    def neg(self) -> "Point":
        if self.is_infinity():
            return self
        return Point(self.curve, self.x, -self.y)

    def add(self, other: "Point") -> "Point":
        if self.curve != other.curve:
            raise WrongCurve("points on different curves")
        if self.is_infinity():
            return other
        if other.is_infinity():
            return self
        x1, y1, x2, y2 = self.x, self.y, other.x, other.y
        if x1.ctx is not x2.ctx:
            k = _lcm(x1.ctx.k, x2.ctx.k)
            ctx = get_ctx(self.curve.p, k)
            x1, y1 = embed(x1, ctx), embed(y1, ctx)
            x2, y2 = embed(x2, ctx), embed(y2, ctx)
        if x1 == x2:
            if y1 == -y2:
                return self.curve.infinity()
            a, _ = self.curve.coeffs_at(x1.ctx)
            lam = (x1 * x1 * 3 + a) / (y1 * 2)
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam - x1 - x2
        y3 = lam * (x1 - x3) - y1
        return Point(self.curve, x3, y3)

    def sub(self, other: "Point") -> "Point":
        return self.add(other.neg())

    def mul(self, n: int) -> "Point":
        if n < 0:
            return self.neg().mul(-n)
        R = self.curve.infinity()
        Q = self
        while n:
            if n & 1:
                R = R.add(Q)
            Q = Q.add(Q)
            n >>= 1
        return R

    def at_level(self, ctx: FieldCtx) -> "Point":
        if self.is_infinity():
            return Point(self.curve, None, None)
        return Point(self.curve, embed(self.x, ctx), embed(self.y, ctx))

    def order(self, multiple: int | None = None) -> int:
        """Exact order; `multiple` is any known multiple (defaults to the
        group order at this level via the Frobenius scalar)."""
        if self.is_infinity():
            return 1
        if multiple is None:
            s = self.curve.frobenius_scalar()
            m = s ** self.ctx.k - 1
            multiple = m * m
        n = multiple
        for q in _factorize(n):
            while n % q == 0 and self.mul(n // q).is_infinity():
                n //= q
        return n

    def __repr__(self):
        if self.is_infinity():
            return "Point(inf)"
        return f"Point({self.x.c}, {self.y.c})@k{self.x.ctx.k}"


def random_point(E: Curve, ctx: FieldCtx, stream: Stream) -> Point:
    while True:
        x = ctx.random(stream)
        z = E.rhs(x)
        if not z:
            if stream.randint(2):
                return Point(E, x, z.ctx.zero)
            continue
        if z.is_square():
            y = z.sqrt()
            if stream.randint(2):
                y = -y
            return Point(E, x, y)


# ---------------------------------------------------------------------------
# operations of the public surface

def j_invariant(E: Curve) -> Fq:
    return E.j_invariant()


def is_supersingular(E: Curve) -> bool:
    return E.is_supersingular()


def curve_from_j(j: Fq) -> Curve:
    """A fixed model with the given j-invariant."""
    ctx = get_ctx(j.ctx.p, 1) if j.ctx.k != 1 else j.ctx
    j = descend(j, ctx) if j.ctx.k != 1 else j
    if j == ctx.zero:
        return Curve(ctx.zero, ctx.one)
    if j == ctx.elt(1728):
        return Curve(ctx.one, ctx.zero)
    c = j / (ctx.elt(1728) - j)
    return Curve(c * 3, c * 2)


def velu_codomain_and_kernel(E: Curve, K: Point):
    """Kernel point list and codomain of the separable isogeny with kernel
    <K>, K of prime order ell != p."""
    if K.is_infinity():
        raise BadKernelOrder("kernel generator must have prime order")
    ell = K.order()
    from sympy import isprime
    if not isprime(ell):
        raise BadKernelOrder(f"kernel order {ell} is not prime")
    if ell == E.p:
        raise BadKernelOrder("kernel order equals p")
    kernel = []
    T = K
    for _ in range(ell - 1):
        kernel.append(T)
        T = T.add(K)
    ctx = K.ctx
    a, b = E.coeffs_at(ctx)
    t = ctx.zero
    w = ctx.zero
    for T in kernel:
        tT = T.x * T.x * 3 + a
        uT = T.y * T.y * 2
        t = t + tT
        w = w + uT + T.x * tT
    a2 = a - t * 5
    b2 = b - w * 7
    base = get_ctx(E.p, 1)
    a2d = descend(a2, base)
    b2d = descend(b2, base)
    if a2d is None or b2d is None:
        # kernel not Galois-stable over F_{p^2}; keep the level (not used
        # for the supersingular class we work in, but fail loudly)
        raise ValueError("Velu codomain does not descend to F_{p^2}")
    E2 = Curve(a2d, b2d)
    return kernel, ell, E2


def velu_eval(E: Curve, E2: Curve, kernel: list[Point], P: Point) -> Point:
    """Evaluate the Velu isogeny with the given kernel at P (translation
    sum form: x' = x + sum(x_{P+Q} - x_Q), same for y)."""
    if P.curve != E:
        raise WrongCurve("point not on the domain curve")
    if P.is_infinity():
        return E2.infinity()
    ctx = P.ctx if P.ctx.k % kernel[0].ctx.k == 0 else \
        get_ctx(E.p, _lcm(P.ctx.k, kernel[0].ctx.k))
    P = P.at_level(ctx)
    kern = [Q.at_level(ctx) for Q in kernel]
    for Qe in kern:
        if P.x == Qe.x and P.y == Qe.y:
            return E2.infinity()
    xs, ys = P.x, P.y
    for Qe in kern:
        S = P.add(Qe)
        xs = xs + (S.x - Qe.x)
        ys = ys + (S.y - Qe.y)
    return Point(E2, xs, ys)


def enumerate_ell_subgroups(E: Curve, ell: int,
                            max_k: int = MAX_TORSION_K) -> list[Point]:
    """Canonical generators of the ell+1 order-ell subgroups, sorted by
    generator key; deterministic across runs."""
    P, Q, _ = E.torsion_basis(ell, max_k)
    gens = [Q]
    for i in range(ell):
        gens.append(P.add(Q.mul(i)))
    canon = []
    for g in gens:
        best = g
        T = g.add(g)
        for _ in range(ell - 2):
            if T.key() < best.key():
                best = T
            T = T.add(g)
        canon.append(best)
    canon.sort(key=lambda pt: pt.key())
    return canon


def curve_isomorphism(E1: Curve, E2: Curve, all_maps: bool = False):
    """Twist data u with (x, y) -> (u^2 x, u^3 y) : E1 -> E2, i.e.
    a2 = u^4 a1 and b2 = u^6 b1. Returns (u, ctx) or a list of all such u
    (= automorphisms when E1 == E2); None if j differs."""
    if E1.p != E2.p:
        return None
    if E1.j_invariant() != E2.j_invariant():
        return None
    base = get_ctx(E1.p, 1)
    a1, b1, a2, b2 = E1.a, E1.b, E2.a, E2.b
    sols = []
    if a1 and b1:
        u2 = (b2 * a1) / (b1 * a2)
        for k in (1, 2):
            ctx = get_ctx(E1.p, k)
            for u in fq_poly_roots([-embed(u2, ctx), ctx.zero, ctx.one], ctx):
                if _iso_ok(a1, b1, a2, b2, u):
                    sols.append(u)
            if sols:
                break
    elif not b1:  # j = 1728, u^4 = a2/a1
        c = a2 / a1
        for k in (1, 2, 4):
            ctx = get_ctx(E1.p, k)
            f = [-embed(c, ctx)] + [ctx.zero] * 3 + [ctx.one]
            sols = [u for u in fq_poly_roots(f, ctx) if _iso_ok(a1, b1, a2, b2, u)]
            if sols:
                break
    else:  # j = 0, u^6 = b2/b1
        c = b2 / b1
        for k in (1, 2, 3, 6):
            ctx = get_ctx(E1.p, k)
            f = [-embed(c, ctx)] + [ctx.zero] * 5 + [ctx.one]
            sols = [u for u in fq_poly_roots(f, ctx) if _iso_ok(a1, b1, a2, b2, u)]
            if sols:
                break
    if not sols:
        return [] if all_maps else None
    sols.sort(key=lambda u: (u.ctx.k, u.c))
    if all_maps:
        return sols
    return sols[0], sols[0].ctx


def _iso_ok(a1, b1, a2, b2, u) -> bool:
    u2 = u * u
    u4 = u2 * u2
    return a2 == a1 * u4 and b2 == b1 * u4 * u2


def automorphisms(E: Curve) -> list[Fq]:
    return curve_isomorphism(E, E, all_maps=True)


def frobenius_conjugate(E: Curve) -> Curve:
    """E^{(p)}: coefficients raised to the p-th power."""
    return Curve(E.a.frobenius(), E.b.frobenius())


# ---------------------------------------------------------------------------

_SQ_TABLES: dict = {}


def _square_table(ctx: FieldCtx):
    key = (ctx.p, ctx.k)
    if key not in _SQ_TABLES:
        sq = set()
        for i in range(ctx.order):
            x = ctx.from_index(i)
            sq.add((x * x).c)
        _SQ_TABLES[key] = sq
    return _SQ_TABLES[key]


def _factorize(n: int) -> dict[int, int]:
    from sympy import factorint
    return {int(q): int(e) for q, e in factorint(n).items()}


def _lcm(a, b):
    return a // gcd(a, b) * b
