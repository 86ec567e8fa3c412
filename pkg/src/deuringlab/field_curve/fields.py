"""Exact arithmetic in F_p, F_{p^2} and the tower levels F_{p^{2k}}.

Each level is F_p[t]/(m_k(t)) with m_k the first irreducible monic
polynomial of degree 2k in the base-p coefficient order (constant
coefficient least significant). That makes serialized coefficients
portable across runs without a global table.
"""

from __future__ import annotations

from ..errors import DivisionByZero, NotASquare

# ---------------------------------------------------------------------------
# dense polynomials over F_p: little-endian int lists, always trimmed

def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _padd(a, b, p):
    n = max(len(a), len(b))
    return _ptrim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p
                   for i in range(n)])


def _psub(a, b, p):
    n = max(len(a), len(b))
    return _ptrim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p
                   for i in range(n)])


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return _ptrim([x % p for x in out])


def _pmod(a, m, p):
    a = list(a)
    dm = len(m) - 1
    inv = pow(m[-1], -1, p)
    while len(a) - 1 >= dm and a:
        if a[-1] == 0:
            a.pop()
            continue
        f = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i in range(len(m)):
            a[shift + i] = (a[shift + i] - f * m[i]) % p
        a.pop()
    return _ptrim(a)


def _ppowmod(a, e, m, p):
    r = [1]
    a = _pmod(a, m, p)
    while e:
        if e & 1:
            r = _pmod(_pmul(r, a, p), m, p)
        a = _pmod(_pmul(a, a, p), m, p)
        e >>= 1
    return r


def _pgcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def _is_irreducible(m, p):
    """Rabin test for a monic polynomial over F_p."""
    d = len(m) - 1
    if d <= 0:
        return False
    x = [0, 1]
    xq = _ppowmod(x, p ** d, m, p)
    if _psub(xq, x, p):
        return False
    dd = d
    primes = []
    q = 2
    while q * q <= dd:
        if dd % q == 0:
            primes.append(q)
            while dd % q == 0:
                dd //= q
        q += 1
    if dd > 1:
        primes.append(dd)
    for q in primes:
        xe = _ppowmod(x, p ** (d // q), m, p)
        if len(_pgcd(_psub(xe, x, p), m, p)) != 1:
            return False
    return True


def _smallest_irreducible(p, d):
    """First monic irreducible of degree d, coefficients enumerated as a
    base-p integer with the constant term least significant."""
    for n in range(p ** d):
        coeffs = []
        t = n
        for _ in range(d):
            coeffs.append(t % p)
            t //= p
        m = coeffs + [1]
        if _is_irreducible(m, p):
            return tuple(m)
    raise RuntimeError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------

_CTX_CACHE: dict = {}


def get_ctx(p: int, k: int = 1) -> "FieldCtx":
    key = (p, k)
    if key not in _CTX_CACHE:
        _CTX_CACHE[key] = FieldCtx(p, k)
    return _CTX_CACHE[key]


class FieldCtx:
    """The field F_{p^{2k}} = F_p[t]/(m(t)), deg m = 2k."""

    def __init__(self, p: int, k: int):
        if p <= 3:
            raise ValueError("need p > 3")
        self.p = p
        self.k = k
        self.d = 2 * k
        self.modulus = _smallest_irreducible(p, self.d)
        self.order = p ** self.d
        d = self.d
        # x^(d+i) mod m for reduction of products
        mm = list(self.modulus)
        rows = []
        cur = _pmod([0] * d + [1], mm, p)
        for _ in range(d - 1):
            rows.append(tuple(cur[i] if i < len(cur) else 0 for i in range(d)))
            cur = _pmod([0] + cur, mm, p)
        self._red_rows = rows
        self._frob_rows = None
        self._nonresidue = None
        self._embed_cache: dict = {}
        self.zero = Fq(self, (0,) * d)
        self.one = Fq(self, (1,) + (0,) * (d - 1))
        self.gen = Fq(self, tuple(int(i == 1) for i in range(d))) if d > 1 else self.one

    def elt(self, coeffs) -> "Fq":
        if isinstance(coeffs, Fq):
            if coeffs.ctx is self:
                return coeffs
            return embed(coeffs, self)
        if isinstance(coeffs, int):
            c = [coeffs % self.p] + [0] * (self.d - 1)
            return Fq(self, tuple(c))
        c = [int(x) % self.p for x in coeffs]
        if len(c) > self.d:
            raise ValueError("too many coefficients")
        c += [0] * (self.d - len(c))
        return Fq(self, tuple(c))

    def from_index(self, n: int) -> "Fq":
        c = []
        for _ in range(self.d):
            c.append(n % self.p)
            n //= self.p
        return Fq(self, tuple(c))

    def random(self, stream) -> "Fq":
        return self.from_index(stream.randint(self.order))

    def _frobenius_rows(self):
        # matrix of x -> x^p on the F_p-basis 1, t, ..., t^(d-1)
        if self._frob_rows is None:
            rows = []
            mm = list(self.modulus)
            for i in range(self.d):
                r = _ppowmod([0] * i + [1], self.p, mm, self.p)
                rows.append(tuple(r[j] if j < len(r) else 0 for j in range(self.d)))
            self._frob_rows = rows
        return self._frob_rows

    def nonresidue(self) -> "Fq":
        if self._nonresidue is None:
            half = (self.order - 1) // 2
            n = 1
            while True:
                x = self.from_index(n)
                if x != self.zero and x ** half != self.one:
                    self._nonresidue = x
                    break
                n += 1
        return self._nonresidue

    def __repr__(self):
        return f"F_{self.p}^{self.d}"


class Fq:
    """Element of a FieldCtx, canonical coefficient tuple."""

    __slots__ = ("ctx", "c")

    def __init__(self, ctx: FieldCtx, coeffs: tuple):
        self.ctx = ctx
        self.c = coeffs

    def __eq__(self, other):
        if not isinstance(other, Fq):
            return NotImplemented
        if self.ctx is other.ctx:
            return self.c == other.c
        return _cross_eq(self, other)

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.k, self.c))

    def __bool__(self):
        return any(self.c)

    def __add__(self, other):
        a, b = _coerce(self, other)
        p = a.ctx.p
        return Fq(a.ctx, tuple((x + y) % p for x, y in zip(a.c, b.c)))

    def __sub__(self, other):
        a, b = _coerce(self, other)
        p = a.ctx.p
        return Fq(a.ctx, tuple((x - y) % p for x, y in zip(a.c, b.c)))

    def __neg__(self):
        p = self.ctx.p
        return Fq(self.ctx, tuple((-x) % p for x in self.c))

    def __mul__(self, other):
        a, b = _coerce(self, other)
        ctx = a.ctx
        p = ctx.p
        d = ctx.d
        if d == 2:
            a0, a1 = a.c
            b0, b1 = b.c
            m0, m1, _ = ctx.modulus
            c0 = a0 * b0
            c2 = a1 * b1
            c1 = (a0 + a1) * (b0 + b1) - c0 - c2
            # reduce c2 * t^2 with t^2 = -m1 t - m0
            return Fq(ctx, ((c0 - c2 * m0) % p, (c1 - c2 * m1) % p))
        out = [0] * (2 * d - 1)
        ac, bc = a.c, b.c
        for i in range(d):
            ai = ac[i]
            if ai:
                for j in range(d):
                    out[i + j] += ai * bc[j]
        res = [x % p for x in out[:d]]
        for i in range(d - 1):
            f = out[d + i] % p
            if f:
                row = ctx._red_rows[i]
                for j in range(d):
                    res[j] = (res[j] + f * row[j]) % p
        return Fq(ctx, tuple(res))

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return (-self) + other

    def inv(self):
        if not any(self.c):
            raise DivisionByZero("inverse of zero")
        ctx = self.ctx
        p = ctx.p
        if ctx.d == 2:
            a0, a1 = self.c
            m0, m1, _ = ctx.modulus
            # norm = a * conj(a) where conj via t -> -m1 - t
            # (a0 + a1 t)(a0 - a1 m1 - a1 t) = a0^2 - a0 a1 m1 + a1^2 m0
            nrm = (a0 * a0 - a0 * a1 * m1 + a1 * a1 * m0) % p
            ninv = pow(nrm, -1, p)
            return Fq(ctx, ((a0 - a1 * m1) * ninv % p, (-a1) * ninv % p))
        # extended Euclid over F_p[x]
        a = _ptrim(list(self.c))
        m = list(ctx.modulus)
        r0, r1 = m, a
        s0, s1 = [], [1]
        while r1:
            # divide r0 by r1
            q = []
            r = list(r0)
            inv_lead = pow(r1[-1], -1, p)
            q = [0] * (len(r) - len(r1) + 1) if len(r) >= len(r1) else []
            while len(r) >= len(r1) and r:
                if r[-1] == 0:
                    r.pop()
                    continue
                f = r[-1] * inv_lead % p
                shift = len(r) - len(r1)
                q[shift] = f
                for i in range(len(r1)):
                    r[shift + i] = (r[shift + i] - f * r1[i]) % p
                r.pop()
            r = _ptrim(r)
            r0, r1 = r1, r
            s0, s1 = s1, _psub(s0, _pmul(q, s1, p), p)
        lead_inv = pow(r0[-1], -1, p)
        s0 = [x * lead_inv % p for x in s0]
        s0 = _pmod(s0, list(ctx.modulus), p)
        return Fq(ctx, tuple(s0[i] if i < len(s0) else 0 for i in range(ctx.d)))

    def __truediv__(self, other):
        a, b = _coerce(self, other)
        return a * b.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        r = self.ctx.one
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def frobenius(self, n: int = 1):
        """x -> x^(p^n)."""
        x = self
        ctx = self.ctx
        n %= ctx.d
        rows = ctx._frobenius_rows()
        p = ctx.p
        for _ in range(n):
            out = [0] * ctx.d
            for i, ci in enumerate(x.c):
                if ci:
                    row = rows[i]
                    for j in range(ctx.d):
                        out[j] += ci * row[j]
            x = Fq(ctx, tuple(v % p for v in out))
        return x

    def is_square(self) -> bool:
        if not any(self.c):
            return True
        return self ** ((self.ctx.order - 1) // 2) == self.ctx.one

    def sqrt(self):
        """A square root, canonical (smaller of the two in coefficient
        order). Raises NotASquare on non-residues."""
        ctx = self.ctx
        if not any(self.c):
            return ctx.zero
        q = ctx.order
        if not self.is_square():
            raise NotASquare(f"{self.c} is not a square in {ctx}")
        if q % 4 == 3:
            r = self ** ((q + 1) // 4)
        else:
            # Tonelli-Shanks
            s, m = q - 1, 0
            while s % 2 == 0:
                s //= 2
                m += 1
            z = ctx.nonresidue() ** s
            c = z
            t = self ** s
            r = self ** ((s + 1) // 2)
            while t != ctx.one:
                i, tt = 0, t
                while tt != ctx.one:
                    tt = tt * tt
                    i += 1
                b = c
                for _ in range(m - i - 1):
                    b = b * b
                m = i
                c = b * b
                t = t * c
                r = r * b
        return min(r, -r, key=lambda x: x.c)

    def key(self):
        """Total order key (coefficient-lexicographic)."""
        return self.c

    def index(self) -> int:
        n = 0
        for x in reversed(self.c):
            n = n * self.ctx.p + x
        return n

    def __repr__(self):
        return f"Fq{self.c}@{self.ctx}"


def _coerce(a: Fq, b) -> tuple[Fq, Fq]:
    if isinstance(b, int):
        return a, a.ctx.elt(b)
    if not isinstance(b, Fq):
        raise TypeError(f"cannot combine Fq with {type(b)}")
    if a.ctx is b.ctx:
        return a, b
    ka, kb = a.ctx.k, b.ctx.k
    if kb % ka == 0:
        return embed(a, b.ctx), b
    if ka % kb == 0:
        return a, embed(b, a.ctx)
    k = _lcm(ka, kb)
    ctx = get_ctx(a.ctx.p, k)
    return embed(a, ctx), embed(b, ctx)


def _lcm(a, b):
    from math import gcd
    return a // gcd(a, b) * b


def _cross_eq(a: Fq, b: Fq) -> bool:
    if a.ctx.p != b.ctx.p:
        return False
    x, y = _coerce(a, b)
    return x.c == y.c


# ---------------------------------------------------------------------------
# polynomials with Fq coefficients (for root finding): little-endian lists

def fq_poly_trim(f):
    while f and not f[-1]:
        f.pop()
    return f


def fq_poly_mul(f, g):
    if not f or not g:
        return []
    ctx = f[0].ctx
    out = [ctx.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = out[i + j] + a * b
    return fq_poly_trim(out)


def fq_poly_sub(f, g):
    ctx = (f or g)[0].ctx
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else ctx.zero
        b = g[i] if i < len(g) else ctx.zero
        out.append(a - b)
    return fq_poly_trim(out)


def fq_poly_mod(f, m):
    f = list(f)
    dm = len(m) - 1
    inv = m[-1].inv()
    while len(f) - 1 >= dm and f:
        if not f[-1]:
            f.pop()
            continue
        c = f[-1] * inv
        shift = len(f) - 1 - dm
        for i in range(len(m)):
            f[shift + i] = f[shift + i] - c * m[i]
        f.pop()
    return fq_poly_trim(f)


def fq_poly_gcd(f, g):
    f, g = fq_poly_trim(list(f)), fq_poly_trim(list(g))
    while g:
        f, g = g, fq_poly_mod(f, g)
    if f:
        inv = f[-1].inv()
        f = [x * inv for x in f]
    return f


def fq_poly_powmod(f, e, m):
    ctx = m[0].ctx
    r = [ctx.one]
    f = fq_poly_mod(f, m)
    while e:
        if e & 1:
            r = fq_poly_mod(fq_poly_mul(r, f), m)
        f = fq_poly_mod(fq_poly_mul(f, f), m)
        e >>= 1
    return r


def fq_poly_roots(f, ctx: FieldCtx, stream=None) -> list[Fq]:
    """All roots of f (Fq coefficients or ints) in ctx, sorted canonically.

    Deterministic: the equal-degree splitting uses a fixed derived stream,
    so results are stable across runs.
    """
    from ..rng import Stream
    if stream is None:
        stream = Stream.from_seed("fq_poly_roots", ctx.p, ctx.k)
    f = [ctx.elt(c) for c in f]
    f = fq_poly_trim(f)
    if len(f) <= 1:
        return []
    q = ctx.order
    x = [ctx.zero, ctx.one]
    xq = fq_poly_powmod(x, q, f)
    lin = fq_poly_gcd(fq_poly_sub(xq, x), f)
    roots: list[Fq] = []

    def split(g):
        if len(g) - 1 == 0:
            return
        if len(g) - 1 == 1:
            roots.append(-g[0] / g[1])
            return
        while True:
            a = ctx.random(stream)
            h = fq_poly_powmod([a, ctx.one], (q - 1) // 2, g)
            d = fq_poly_gcd(fq_poly_sub(h, [ctx.one]), g)
            if 0 < len(d) - 1 < len(g) - 1:
                g2 = fq_poly_divexact(g, d)
                split(d)
                split(g2)
                return

    split(lin)
    return sorted(roots, key=lambda r: r.c)


def fq_poly_divexact(f, d):
    """Exact division of polynomials (remainder must vanish)."""
    f = list(f)
    out = [None] * (len(f) - len(d) + 1)
    inv = d[-1].inv()
    for i in reversed(range(len(out))):
        c = f[i + len(d) - 1] * inv
        out[i] = c
        for j in range(len(d)):
            f[i + j] = f[i + j] - c * d[j]
    assert not any(f[:len(d) - 1]), "inexact polynomial division"
    return fq_poly_trim(out)


# ---------------------------------------------------------------------------
# embeddings between tower levels

def embed(x: Fq, target: FieldCtx) -> Fq:
    src = x.ctx
    if src is target:
        return x
    if src.p != target.p or target.k % src.k != 0:
        raise ValueError(f"no embedding {src} -> {target}")
    mat = _embedding_matrix(src, target)
    p = target.p
    out = [0] * target.d
    for i, ci in enumerate(x.c):
        if ci:
            row = mat[i]
            for j in range(target.d):
                out[j] += ci * row[j]
    return Fq(target, tuple(v % p for v in out))


def descend(x: Fq, target: FieldCtx) -> Fq | None:
    """Inverse of embed when x lies in the embedded subfield, else None."""
    src = x.ctx
    if src is target:
        return x
    if src.p != target.p or src.k % target.k != 0:
        return None
    mat = _embedding_matrix(target, src)  # target.d rows of length src.d
    # solve c * mat = x.c over F_p
    p = src.p
    rows = [list(r) + [0] * target.d for r in mat]
    for i in range(target.d):
        rows[i][src.d + i] = 1
    rhs = list(x.c)
    # gaussian elimination on columns of mat
    pivots = []
    r = 0
    for col in range(src.d):
        piv = next((i for i in range(r, target.d) if rows[i][col] % p != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][col], -1, p)
        rows[r] = [v * inv % p for v in rows[r]]
        for i in range(target.d):
            if i != r and rows[i][col] % p:
                f = rows[i][col]
                rows[i] = [(v - f * w) % p for v, w in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == target.d:
            break
    coeffs = [0] * target.d
    residual = list(rhs)
    for rr, col in enumerate(pivots):
        f = residual[col] % p
        if f:
            for j in range(src.d):
                residual[j] = (residual[j] - f * rows[rr][j]) % p
            for j in range(target.d):
                coeffs[j] = (coeffs[j] + f * rows[rr][src.d + j]) % p
    if any(v % p for v in residual):
        return None
    return Fq(target, tuple(coeffs))


def _mat_mul_modp(a, b, p):
    return [tuple(sum(x * y for x, y in zip(row, col)) % p
                  for col in zip(*b)) for row in a]


def _embedding_matrix(src: FieldCtx, target: FieldCtx):
    """F_p-linear matrix of the embedding src -> target (rows = images of
    the powers of the src generator).

    The full divisor lattice of embeddings is kept transitive: only
    prime-index steps are primitive, every other embedding is a composite
    through the smallest prime factor, and a primitive step must agree
    with every embedding already defined from the levels below it."""
    key = src.k
    if key in target._embed_cache:
        return target._embed_cache[key]
    if src.k == target.k:
        mat = [tuple(int(i == j) for j in range(target.d))
               for i in range(target.d)]
    else:
        ratio = target.k // src.k
        q = min(_prime_factors(ratio))
        if ratio != q:
            # route through the maximal subfield of index q in the target
            mid = get_ctx(src.p, target.k // q)
            mat = _mat_mul_modp(_embedding_matrix(src, mid),
                                _embedding_matrix(mid, target), src.p)
        else:
            mat = _primitive_embedding(src, target)
    target._embed_cache[key] = mat
    return mat


def _prime_factors(n: int):
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def _primitive_embedding(src: FieldCtx, target: FieldCtx):
    p = src.p
    mod = [int(c) for c in src.modulus]
    roots = fq_poly_roots(mod, target)
    if not roots:
        raise RuntimeError("subfield modulus has no root; tower broken")
    q = target.k // src.k
    lower = []
    for d in range(1, src.k):
        # only divisors whose canonical route into the target avoids this
        # very step constrain the root choice (the rest are defined by it)
        if src.k % d == 0 and min(_prime_factors(target.k // d)) < q:
            sub = get_ctx(p, d)
            lower.append((_embedding_matrix(sub, src),
                          _embedding_matrix(sub, target)))
    for r in roots:
        rows = []
        cur = target.one
        for _ in range(src.d):
            rows.append(cur.c)
            cur = cur * r
        if all(_mat_mul_modp(dn, rows, p) == [tuple(t) for t in up]
               for dn, up in lower):
            return rows
    raise RuntimeError("no compatible embedding; tower broken")
