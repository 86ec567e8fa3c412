"""Quaternion algebras (a,b/Q): exact elements, rank-4 lattices, orders,
left ideals, Minkowski reduction, maximalization and splitting mod ell.

Conventions: basis (1, i, j, k), i^2 = a, j^2 = b, k = ij = -ji.
Lattices are row-convention: basis vectors are rows of a rational 4x4
matrix, canonicalized as (1/den) * HNF(integer matrix).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import NotAnOrder, RankDeficient, SearchExhausted
from .intlinalg import (frac_sqrt, hnf, kernel_mod, mat_det, mat_inv,
                        mat_mul, mat_rank, minkowski_transform,
                        short_vectors_gram)


def _legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


class QuatAlgebra:
    """B = (a, b / Q)."""

    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = Fraction(a)
        self.b = Fraction(b)
        if self.a == 0 or self.b == 0:
            raise ValueError("a, b must be nonzero")

    @property
    def definite(self) -> bool:
        return self.a < 0 and self.b < 0

    def __eq__(self, other):
        return (isinstance(other, QuatAlgebra)
                and self.a == other.a and self.b == other.b)

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        return f"({self.a},{self.b}/Q)"

    def elt(self, t, x=0, y=0, z=0) -> "Quaternion":
        return Quaternion(self, Fraction(t), Fraction(x), Fraction(y), Fraction(z))

    def one(self) -> "Quaternion":
        return self.elt(1)

    def basis(self):
        return (self.elt(1), self.elt(0, 1), self.elt(0, 0, 1), self.elt(0, 0, 0, 1))

    def from_coords(self, v) -> "Quaternion":
        return Quaternion(self, Fraction(v[0]), Fraction(v[1]),
                          Fraction(v[2]), Fraction(v[3]))


class Quaternion:
    __slots__ = ("alg", "t", "x", "y", "z")

    def __init__(self, alg: QuatAlgebra, t, x, y, z):
        self.alg = alg
        self.t = t
        self.x = x
        self.y = y
        self.z = z

    def coords(self):
        return (self.t, self.x, self.y, self.z)

    def __eq__(self, other):
        return (isinstance(other, Quaternion) and self.alg == other.alg
                and self.coords() == other.coords())

    def __hash__(self):
        return hash((self.alg, self.coords()))

    def __add__(self, other):
        return Quaternion(self.alg, self.t + other.t, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    def __sub__(self, other):
        return Quaternion(self.alg, self.t - other.t, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __neg__(self):
        return Quaternion(self.alg, -self.t, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            a, b = self.alg.a, self.alg.b
            t1, x1, y1, z1 = self.coords()
            t2, x2, y2, z2 = other.coords()
            return Quaternion(
                self.alg,
                t1 * t2 + a * x1 * x2 + b * y1 * y2 - a * b * z1 * z2,
                t1 * x2 + x1 * t2 - b * y1 * z2 + b * z1 * y2,
                t1 * y2 + y1 * t2 + a * x1 * z2 - a * z1 * x2,
                t1 * z2 + z1 * t2 + x1 * y2 - y1 * x2,
            )
        f = Fraction(other)
        return Quaternion(self.alg, self.t * f, self.x * f, self.y * f, self.z * f)

    def __rmul__(self, other):
        return self * other  # scalars commute

    def conj(self) -> "Quaternion":
        return Quaternion(self.alg, self.t, -self.x, -self.y, -self.z)

    def trd(self) -> Fraction:
        return 2 * self.t

    def nrd(self) -> Fraction:
        a, b = self.alg.a, self.alg.b
        return (self.t ** 2 - a * self.x ** 2 - b * self.y ** 2
                + a * b * self.z ** 2)

    def inv(self) -> "Quaternion":
        n = self.nrd()
        if n == 0:
            raise ZeroDivisionError("zero quaternion")
        return self.conj() * Fraction(1, 1) * Fraction(n.denominator, n.numerator)

    def is_zero(self) -> bool:
        return not any(self.coords())

    def __repr__(self):
        return f"Q({self.t},{self.x},{self.y},{self.z})"


def pair(alpha: Quaternion, beta: Quaternion) -> Fraction:
    """<a,b> = Trd(a * conj(b)) / 2."""
    a, b = alpha.alg.a, alpha.alg.b
    return (alpha.t * beta.t - a * alpha.x * beta.x - b * alpha.y * beta.y
            + a * b * alpha.z * beta.z)


def algebra_standard(p: int) -> tuple[QuatAlgebra, int]:
    """Standard model of B_{p,infty} = (-q, -p / Q) with the usual q."""
    if p % 4 == 3:
        q = 1
    elif p % 8 == 5:
        q = 2
    else:
        from sympy import isprime
        q = 3
        while not (isprime(q) and q % 4 == 3 and _legendre(p, q) == -1):
            q += 1
    return QuatAlgebra(-q, -p), q


# ---------------------------------------------------------------------------
# lattices

class QuatLattice:
    """Full-rank lattice (1/den) * rowspan_Z(mat), mat in HNF."""

    __slots__ = ("alg", "den", "mat", "_gram")

    def __init__(self, alg: QuatAlgebra, den: int, mat: list[list[int]]):
        self.alg = alg
        self.den = den
        self.mat = mat
        self._gram = None

    @classmethod
    def from_rows(cls, alg: QuatAlgebra, rows) -> "QuatLattice":
        """rows: iterable of Quaternions or rational 4-vectors."""
        vecs = []
        for r in rows:
            if isinstance(r, Quaternion):
                vecs.append(list(r.coords()))
            else:
                vecs.append([Fraction(x) for x in r])
        den = 1
        for v in vecs:
            for x in v:
                den = den * x.denominator // gcd(den, x.denominator)
        im = [[int(x * den) for x in v] for v in vecs]
        h = hnf(im)
        if len(h) != 4:
            raise RankDeficient(f"lattice rank {len(h)} < 4")
        g = den
        for row in h:
            for x in row:
                g = gcd(g, x)
        return cls(alg, den // g, [[x // g for x in row] for row in h])

    def basis(self) -> list[Quaternion]:
        d = Fraction(1, self.den)
        return [self.alg.from_coords([x * d for x in row]) for row in self.mat]

    def rational_rows(self) -> list[list[Fraction]]:
        d = Fraction(1, self.den)
        return [[x * d for x in row] for row in self.mat]

    def __eq__(self, other):
        return (isinstance(other, QuatLattice) and self.alg == other.alg
                and self.den == other.den and self.mat == other.mat)

    def __hash__(self):
        return hash((self.alg, self.den, tuple(tuple(r) for r in self.mat)))

    def key(self):
        return (self.den, tuple(tuple(r) for r in self.mat))

    def gram(self) -> list[list[Fraction]]:
        if self._gram is None:
            bs = self.basis()
            self._gram = [[pair(u, v) for v in bs] for u in bs]
        return self._gram

    def vol_squared(self) -> Fraction:
        return abs(mat_det(self.gram()))

    def disc(self) -> Fraction:
        return 16 * self.vol_squared()

    def norm_of(self, coeffs) -> Fraction:
        """Nrd of an integer combination of the basis."""
        g = self.gram()
        return sum(g[i][j] * coeffs[i] * coeffs[j]
                   for i in range(4) for j in range(4))

    def contains(self, q: Quaternion) -> bool:
        v = [c * self.den for c in q.coords()]
        # back-substitute against the HNF rows (pivot of row i in column i)
        c = [Fraction(0)] * 4
        for i in range(4):
            r = v[i] - sum(c[j] * self.mat[j][i] for j in range(i))
            piv = self.mat[i][i]
            if r % piv != 0:
                return False
            c[i] = r / piv
        return True

    def coords_of(self, q: Quaternion) -> list[Fraction]:
        """Rational coordinates of q w.r.t. the lattice basis."""
        rows = self.rational_rows()
        from .intlinalg import solve_right
        return solve_right(rows, [Fraction(c) for c in q.coords()])

    def add_lattice(self, other: "QuatLattice") -> "QuatLattice":
        return QuatLattice.from_rows(self.alg,
                                     self.rational_rows() + other.rational_rows())

    def scale(self, f) -> "QuatLattice":
        f = Fraction(f)
        return QuatLattice.from_rows(
            self.alg, [[x * f for x in row] for row in self.rational_rows()])

    def dual_coords(self) -> "QuatLattice":
        """Coordinate dual {x : <x, v>_std in Z for v in L} (std dot)."""
        rows = self.rational_rows()
        inv = mat_inv(rows)
        # columns of inv are the dual basis; transpose to rows
        drows = [[inv[r][c] for r in range(4)] for c in range(4)]
        return QuatLattice.from_rows(self.alg, drows)

    def intersect(self, other: "QuatLattice") -> "QuatLattice":
        return self.dual_coords().add_lattice(other.dual_coords()).dual_coords()

    def mul_lattice(self, other: "QuatLattice") -> "QuatLattice":
        rows = []
        for u in self.basis():
            for v in other.basis():
                rows.append(u * v)
        return QuatLattice.from_rows(self.alg, rows)

    def index_in(self, other: "QuatLattice") -> Fraction:
        """[other : self] as a rational (integer when self <= other)."""
        d1 = mat_det(self.rational_rows())
        d2 = mat_det(other.rational_rows())
        return abs(d1 / d2)

    def __repr__(self):
        return f"QuatLattice(den={self.den}, mat={self.mat})"


def left_order(lat: QuatLattice) -> "Order":
    return _stabilizer_order(lat, side="left")


def right_order(lat: QuatLattice) -> "Order":
    return _stabilizer_order(lat, side="right")


def _mult_matrix(v: Quaternion, side: str) -> list[list[Fraction]]:
    """Matrix M with coords(alpha * v) = coords(alpha) * M (side='right',
    i.e. right multiplication by v), or coords(v * alpha) for side='left'."""
    rows = []
    for e in v.alg.basis():
        w = e * v if side == "right" else v * e
        rows.append(list(w.coords()))
    return rows


def _stabilizer_order(lat: QuatLattice, side: str) -> "Order":
    # side='left': {alpha : alpha * L <= L}; conditions x * R_{v_j} in L
    out = None
    for v in lat.basis():
        m = _mult_matrix(v, "right" if side == "left" else "left")
        rows = mat_mul(lat.rational_rows(), mat_inv(m))
        cand = QuatLattice.from_rows(lat.alg, rows)
        out = cand if out is None else out.intersect(cand)
    return Order(out.alg, out.den, out.mat)


class Order(QuatLattice):
    """A lattice that is a ring with 1; verified on construction paths that
    call `check()`."""

    def check(self) -> bool:
        if not self.contains(self.alg.one()):
            return False
        bs = self.basis()
        for u in bs:
            if u.trd().denominator != 1 or u.nrd().denominator != 1:
                return False
            for v in bs:
                if not self.contains(u * v):
                    return False
        return True

    def as_order(self) -> "Order":
        return self


def order_from_lattice(lat: QuatLattice, verify: bool = True) -> Order:
    o = Order(lat.alg, lat.den, lat.mat)
    if verify and not o.check():
        raise NotAnOrder("lattice is not an order")
    return o


# ---------------------------------------------------------------------------
# short vectors / Minkowski reduction

def short_vectors(lat: QuatLattice, bound: Fraction):
    """All (coeffs, norm) with 0 < Nrd <= bound, one per +/- pair
    (canonical sign: first nonzero coefficient positive), sorted by
    (norm, coeffs)."""
    return short_vectors_gram(lat.gram(), Fraction(bound))


def minkowski_reduce(lat: QuatLattice) -> list[Quaternion]:
    """Basis attaining the four successive minima (dimension 4), with
    deterministic tie-breaking by coefficient-lexicographic order."""
    chosen = minkowski_transform(lat.gram())
    bs = lat.basis()
    out = []
    for v in chosen:
        q = lat.alg.elt(0)
        for c, b in zip(v, bs):
            q = q + b * c
        out.append(q)
    return out


def successive_minima(lat: QuatLattice) -> list[Fraction]:
    return [q.nrd() for q in minkowski_reduce(lat)]


# ---------------------------------------------------------------------------
# ideals and connecting ideals

class LeftIdeal(QuatLattice):
    """Left ideal of a maximal order, tracked with its left order."""

    __slots__ = ("order",)

    def __init__(self, order: Order, den: int, mat: list[list[int]]):
        super().__init__(order.alg, den, mat)
        self.order = order

    @classmethod
    def from_lattice(cls, order: Order, lat: QuatLattice,
                     verify: bool = True) -> "LeftIdeal":
        ide = cls(order, lat.den, lat.mat)
        if verify:
            for u in order.basis():
                for v in lat.basis():
                    if not lat.contains(u * v):
                        raise ValueError("not a left ideal of the given order")
        return ide

    def nrd(self):
        idx = self.index_in(self.order)
        n = frac_sqrt(Fraction(idx))
        if n is None:
            raise ValueError("ideal index is not a square")
        return n


def principal_ideal(order: Order, alpha: Quaternion) -> LeftIdeal:
    lat = QuatLattice.from_rows(order.alg, [b * alpha for b in order.basis()])
    return LeftIdeal.from_lattice(order, lat, verify=False)


def connecting_ideal(o1: Order, o2: Order) -> LeftIdeal:
    """I(O1,O2) = d * O1 * O2 with d = [O2 : O1 cap O2]; left O1-, right
    O2-ideal, verified on generators against the set definition."""
    inter = o1.intersect(o2)
    d = inter.index_in(o2)
    if d.denominator != 1:
        raise ValueError("non-integral connecting index")
    d = int(d)
    lat = o1.mul_lattice(o2).scale(d)
    ide = LeftIdeal.from_lattice(o1, lat, verify=True)
    # definition-level guard: alpha * O2 * conj(alpha) <= d * O1 on generators
    do1 = o1.scale(d)
    for alpha in ide.basis():
        for v in o2.basis():
            if not do1.contains(alpha * v * alpha.conj()):
                raise ValueError("connecting ideal fails the set definition")
    return ide


def orders_isomorphic(o1: Order, o2: Order):
    """(bool, witness): conjugate orders iff I(O1,O2) is principal iff the
    first minimum of the normalized form equals 1."""
    ide = connecting_ideal(o1, o2)
    n = ide.nrd()
    red = minkowski_reduce(ide)
    alpha = red[0]
    if alpha.nrd() == n:
        return True, alpha
    return False, None


# ---------------------------------------------------------------------------
# maximalization

def maximalize_order(o: Order, p: int, disc_factors=None) -> Order:
    """Enlarge to a maximal order of B_{p,infty} (disc p^2) by radical
    idealizers at the primes dividing the index."""
    target = Fraction(p * p)
    guard = 0
    while o.disc() != target:
        guard += 1
        if guard > 64:
            raise NotAnOrder("maximalization is not making progress")
        ratio = o.disc() / target
        f2 = frac_sqrt(ratio)
        if f2 is None or f2.denominator != 1:
            raise NotAnOrder(f"disc {o.disc()} incompatible with p^2={target}")
        primes = disc_factors or _prime_factors(int(f2))
        progressed = False
        for q in primes:
            if int(f2) % q != 0:
                continue
            o2 = _radical_idealizer(o, q)
            if o2.disc() >= o.disc():
                # hereditary at q: the idealizer stalls; enlarge directly
                o2 = _enlarge_at(o, q)
            if o2 is not None and o2.disc() < o.disc():
                o = o2
                progressed = True
                break
        if not progressed:
            raise NotAnOrder("radical idealizer stalled")
        disc_factors = None  # recompute from the new index
    o = order_from_lattice(o, verify=True)
    return o


def _radical_coords_mod2(o: Order) -> list[list[int]]:
    """Jacobson radical of O/2O by quasi-regularity: x in rad iff 1 - yx
    is invertible for every y (16 elements, brute force)."""
    table = _structure_constants(o)
    one = [int(f) % 2 for f in o.coords_of(o.alg.one())]

    def mul(u, v):
        out = [0, 0, 0, 0]
        for i in range(4):
            if u[i]:
                for j in range(4):
                    if v[j]:
                        for kk in range(4):
                            out[kk] ^= (u[i] * v[j] * table[i][j][kk]) & 1
        return out

    def invertible(x):
        # left multiplication by x is bijective on (F_2)^4
        rows = [mul(x, [int(i == j) for j in range(4)]) for i in range(4)]
        return len(_row_reduce_mod(rows, 2)) == 4

    from itertools import product
    rad = []
    for x in product(range(2), repeat=4):
        if all(invertible([(o_ - mul(list(y), list(x))[idx]) % 2
                           for idx, o_ in enumerate(one)])
               for y in product(range(2), repeat=4)):
            rad.append(list(x))
    basis = _row_reduce_mod(rad, 2)
    return basis + [[2 * int(i == j) for j in range(4)] for i in range(4)]


def _radical_idealizer(o: Order, q: int) -> Order:
    bs = o.basis()
    if q == 2:
        kern = hnf(_radical_coords_mod2(o))
    else:
        tmat = [[int((bs[i] * bs[j]).trd()) for j in range(4)] for i in range(4)]
        kern = kernel_mod(tmat, q)  # coords w.r.t. o basis
    rows = []
    for krow in kern:
        v = o.alg.elt(0)
        for c, b in zip(krow, bs):
            v = v + b * c
        rows.append(v)
    rad = QuatLattice.from_rows(o.alg, rows)
    cand = right_order(rad)
    if cand.index_in(o) < 1:  # cand strictly larger than o has index < 1
        return order_from_lattice(cand, verify=True)
    cand = left_order(rad)
    return order_from_lattice(cand, verify=True)


def _enlarge_at(o: Order, q: int):
    """Find an overorder of index q by scanning x = v/q, v in O/qO, with
    integral trace and norm, and closing under multiplication."""
    from itertools import product
    bs = o.basis()
    for coords in product(range(q), repeat=4):
        if not any(coords):
            continue
        w = o.alg.elt(0)
        for c, b in zip(coords, bs):
            w = w + b * c
        x = w * Fraction(1, q)
        if o.contains(x):
            continue
        if x.trd().denominator != 1 or x.nrd().denominator != 1:
            continue
        lat = QuatLattice.from_rows(o.alg, o.rational_rows() + [list(x.coords())])
        ok = True
        for _ in range(8):
            lat2 = lat.add_lattice(lat.mul_lattice(lat))
            if lat2 == lat:
                break
            lat = lat2
        else:
            ok = False
        if not ok:
            continue
        cand = Order(lat.alg, lat.den, lat.mat)
        if cand.disc() < o.disc() and cand.check():
            return cand
    return None


def _prime_factors(n: int) -> list[int]:
    from sympy import factorint
    return sorted(int(q) for q in factorint(n))


# ---------------------------------------------------------------------------
# algebra isomorphisms

class AlgebraIso:
    """Q-linear ring isomorphism A -> B given by images of (1, i, j, k)."""

    def __init__(self, A: QuatAlgebra, B: QuatAlgebra,
                 images: list[Quaternion]):
        self.A = A
        self.B = B
        self.images = images
        self._mat = [list(im.coords()) for im in images]
        self._inv = mat_inv([[Fraction(x) for x in row] for row in self._mat])

    def apply(self, q: Quaternion) -> Quaternion:
        c = q.coords()
        out = [sum(Fraction(c[i]) * self._mat[i][j] for i in range(4))
               for j in range(4)]
        return self.B.from_coords(out)

    def apply_inverse(self, q: Quaternion) -> Quaternion:
        c = q.coords()
        out = [sum(Fraction(c[i]) * self._inv[i][j] for i in range(4))
               for j in range(4)]
        return self.A.from_coords(out)

    def verify(self) -> bool:
        ba = self.A.basis()
        for u in ba:
            for v in ba:
                if self.apply(u * v) != self.apply(u) * self.apply(v):
                    return False
        return self.apply(self.A.one()) == self.B.one()


def algebra_isomorphism(A: QuatAlgebra, oA: Order, B: QuatAlgebra,
                        oB: Order) -> AlgebraIso:
    """Find images i', j' in B with i'^2 = a_A, j'^2 = b_A, i'j' = -j'i',
    by bounded short-vector search in (1/2) O_B (escalated once)."""
    if A == B:
        iso = AlgebraIso(A, B, list(B.basis()))
        return iso
    for denom in (2, 4):
        search = oB.scale(Fraction(1, denom))
        iprime = None
        cands_i = _pure_with_norm(search, -A.a)
        cands_j = _pure_with_norm(search, -A.b) if cands_i else []
        for i2 in cands_i:
            for j2 in cands_j:
                if pair(i2, j2) == 0:
                    iprime, jprime = i2, j2
                    break
            if iprime is not None:
                break
        if iprime is None:
            continue
        k2 = iprime * jprime
        iso = AlgebraIso(A, B, [B.one(), iprime, jprime, k2])
        if iso.verify():
            return iso
    raise SearchExhausted("no embedded (i, j) pair found within the bound")


def _pure_with_norm(lat: QuatLattice, target: Fraction):
    """Trace-zero lattice elements of exact reduced norm `target`."""
    if target <= 0:
        return []
    out = []
    for v, n in short_vectors(lat, target):
        if n == target:
            bs = lat.basis()
            q = lat.alg.elt(0)
            for c, b in zip(v, bs):
                q = q + b * c
            if q.trd() == 0:
                out.append(q)
    return out


# ---------------------------------------------------------------------------
# splitting O/ellO = M2(F_ell)

class SplitMap:
    """Isomorphism O/ellO -> M2(F_ell); elements of O/ellO are coordinate
    4-vectors mod ell w.r.t. the order basis."""

    def __init__(self, order: Order, ell: int, images: list):
        self.order = order
        self.ell = ell
        self.images = images  # images of the 4 basis vectors, 2x2 tuples

    def apply_coords(self, c) -> tuple:
        ell = self.ell
        m = [0, 0, 0, 0]
        for ci, im in zip(c, self.images):
            for idx in range(4):
                m[idx] = (m[idx] + ci * im[idx]) % ell
        return tuple(m)

    def apply(self, q: Quaternion) -> tuple:
        co = self.order.coords_of(q)
        c = []
        for f in co:
            if f.denominator % self.ell == 0:
                raise ValueError("element not integral at ell")
            c.append(int(f.numerator * pow(f.denominator, -1, self.ell)) % self.ell)
        return self.apply_coords(c)


def _structure_constants(order: Order):
    bs = order.basis()
    table = []
    for u in bs:
        row = []
        for v in bs:
            co = order.coords_of(u * v)
            assert all(f.denominator == 1 for f in co)
            row.append([int(f) for f in co])
        table.append(row)
    return table


_SPLIT_CACHE: dict = {}


def split_mod_ell(order: Order, ell: int) -> SplitMap:
    key = (order.key(), order.alg.a, order.alg.b, ell)
    if key in _SPLIT_CACHE:
        return _SPLIT_CACHE[key]
    table = _structure_constants(order)
    one = [int(f) % ell for f in order.coords_of(order.alg.one())]

    def mul(u, v):
        out = [0, 0, 0, 0]
        for i in range(4):
            if u[i]:
                for j in range(4):
                    if v[j]:
                        f = u[i] * v[j]
                        tij = table[i][j]
                        for kk in range(4):
                            out[kk] += f * tij[kk]
        return tuple(x % ell for x in out)

    bs = order.basis()
    tr = [int(b.trd()) % ell for b in bs]
    gram = order.gram()

    def nrd_coords(c):
        return sum(gram[i][j] * c[i] * c[j] for i in range(4) for j in range(4)) % ell

    # find a rank-1 idempotent: Trd = 1, Nrd = 0, x not scalar
    e = None
    for c1 in range(ell):
        for c2 in range(ell):
            for c3 in range(ell):
                # solve sum tr[i] c[i] = 1 for c0 if possible
                for c0 in range(ell):
                    c = (c0, c1, c2, c3)
                    if sum(t * x for t, x in zip(tr, c)) % ell != 1:
                        continue
                    if nrd_coords(c) != 0:
                        continue
                    if mul(c, c) != tuple(c):
                        continue
                    # exclude scalars (0 and 1 are the scalar idempotents)
                    if all((c[i] - one[i]) % ell == 0 for i in range(4)):
                        continue
                    e = c
                    break
                if e:
                    break
            if e:
                break
        if e:
            break
    if e is None:
        raise RuntimeError(f"no idempotent found in O/{ell}O")
    # module V = (O/ellO) e, should be 2-dimensional
    gens = [mul(tuple(int(i == j) for j in range(4)), e) for i in range(4)]
    vbasis = _row_reduce_mod(gens, ell)
    if len(vbasis) != 2:
        raise RuntimeError("idempotent has wrong rank")
    # left-multiplication action on V in the basis vbasis
    images = []
    for i in range(4):
        bi = tuple(int(i == j) for j in range(4))
        cols = []
        for w in vbasis:
            prod = mul(bi, w)
            cols.append(_solve_in_span(vbasis, prod, ell))
        # column r holds the coordinates of b_i * w_r
        m = (cols[0][0], cols[1][0], cols[0][1], cols[1][1])
        images.append(m)
    smap = SplitMap(order, ell, images)
    # verify multiplicativity on all basis products
    for i in range(4):
        for j in range(4):
            lhs = smap.apply_coords([x % ell for x in table[i][j]])
            rhs = m2_mul(images[i], images[j], ell)
            if lhs != rhs:
                raise RuntimeError("split map failed verification")
    if smap.apply_coords(one) != (1, 0, 0, 1):
        raise RuntimeError("split map does not send 1 to identity")
    _SPLIT_CACHE[key] = smap
    return smap


def _row_reduce_mod(rows, ell):
    rows = [list(r) for r in rows]
    basis = []
    for r in rows:
        r = [x % ell for x in r]
        for b in basis:
            piv = next(i for i, x in enumerate(b) if x)
            if r[piv]:
                f = r[piv] * pow(b[piv], -1, ell) % ell
                r = [(x - f * y) % ell for x, y in zip(r, b)]
        if any(r):
            basis.append(r)
    return basis


def _solve_in_span(basis, target, ell):
    """Coefficients expressing target in the span of basis rows mod ell;
    brute force over F_ell^n (n <= 2 here)."""
    t = [x % ell for x in target]
    n = len(basis)
    from itertools import product
    for combo in product(range(ell), repeat=n):
        s = [0] * len(target)
        for c, b in zip(combo, basis):
            for i in range(len(target)):
                s[i] = (s[i] + c * b[i]) % ell
        if s == t:
            return list(combo)
    raise RuntimeError("target not in span")


# ---------------------------------------------------------------------------
# M2(F_ell) utilities (matrices as tuples (a, b, c, d) row-major)

def m2_mul(m, n, ell):
    a, b, c, d = m
    e, f, g, h = n
    return ((a * e + b * g) % ell, (a * f + b * h) % ell,
            (c * e + d * g) % ell, (c * f + d * h) % ell)


def m2_det(m, ell):
    return (m[0] * m[3] - m[1] * m[2]) % ell


def m2_inv(m, ell):
    det = m2_det(m, ell)
    if det == 0:
        raise ZeroDivisionError("singular matrix")
    di = pow(det, -1, ell)
    return (m[3] * di % ell, -m[1] * di % ell,
            -m[2] * di % ell, m[0] * di % ell)


def m2_kernel_line(m, ell):
    """Kernel line of a rank-1 matrix as a canonical column vector (x, y)
    with first nonzero entry 1; None for invertible, 'all' for zero."""
    a, b, c, d = (x % ell for x in m)
    if (a, b, c, d) == (0, 0, 0, 0):
        return "all"
    if m2_det(m, ell) != 0:
        return None
    # solve (a b; c d)(x y)^T = 0
    if a or b:
        x, y = b % ell, (-a) % ell
    else:
        x, y = d % ell, (-c) % ell
    if x:
        inv = pow(x, -1, ell)
        return (1, y * inv % ell)
    return (0, 1)


def all_lines(ell):
    return [(1, t) for t in range(ell)] + [(0, 1)]


def matrices_killing_line(line, ell):
    """The left ideal {m : line <= ker m}: all m with m * line = 0."""
    x, y = line
    out = []
    for a in range(ell):
        for b in range(ell):
            if (a * x + b * y) % ell:
                continue
            for c in range(ell):
                for d in range(ell):
                    if (c * x + d * y) % ell == 0:
                        out.append((a, b, c, d))
    return out


def pgl2_classes(ell):
    """Canonical representatives of PGL2(F_ell): first nonzero entry 1."""
    reps = []
    for a in range(ell):
        for b in range(ell):
            for c in range(ell):
                for d in range(ell):
                    m = (a, b, c, d)
                    if m2_det(m, ell) == 0:
                        continue
                    lead = next(x for x in m if x)
                    if lead != 1:
                        continue
                    reps.append(m)
    return reps


def m2_conj(h, m, ell):
    """h m h^-1."""
    return m2_mul(m2_mul(h, m, ell), m2_inv(h, ell), ell)


# ---------------------------------------------------------------------------
# JSON helpers

def frac_str(f) -> str:
    f = Fraction(f)
    return f"{f.numerator}/{f.denominator}"


def frac_from_str(s: str) -> Fraction:
    return Fraction(s)


def quaternion_to_json(q: Quaternion) -> list[str]:
    return [frac_str(c) for c in q.coords()]


def quaternion_from_json(alg: QuatAlgebra, data) -> Quaternion:
    return alg.from_coords([Fraction(s) for s in data])


def lattice_to_json(lat: QuatLattice) -> dict:
    return {
        "algebra": {"a": frac_str(lat.alg.a), "b": frac_str(lat.alg.b)},
        "basis": [[frac_str(x) for x in row] for row in lat.rational_rows()],
    }


def lattice_from_json(data) -> QuatLattice:
    alg = QuatAlgebra(Fraction(data["algebra"]["a"]), Fraction(data["algebra"]["b"]))
    rows = [[Fraction(x) for x in row] for row in data["basis"]]
    return QuatLattice.from_rows(alg, rows)
