"""Exact integer / rational linear algebra used by the lattice modules.

Everything here is deterministic and allocation-light: matrices are
lists of lists of ints or Fractions, row-vector convention throughout.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt


# ---------------------------------------------------------------------------
# Hermite normal form (row style)

def hnf(rows: list[list[int]]) -> list[list[int]]:
    """Row-style HNF of the Z-module spanned by `rows`.

    Returns the canonical basis: echelon rows, positive pivots, entries
    above each pivot reduced into [0, pivot). Zero rows are dropped.
    """
    m = [list(r) for r in rows if any(r)]
    if not m:
        return []
    ncols = len(m[0])
    basis: list[list[int]] = []
    col = 0
    while col < ncols and m:
        # gather rows with nonzero entry in this column
        while True:
            live = [r for r in m if r[col] != 0]
            if len(live) <= 1:
                break
            live.sort(key=lambda r: abs(r[col]))
            a = live[0]
            for r in live[1:]:
                q = r[col] // a[col]
                for j in range(col, ncols):
                    r[j] -= q * a[j]
            m = [r for r in m if any(r)]
        live = [r for r in m if r[col] != 0]
        if live:
            piv = live[0]
            m.remove(piv)
            if piv[col] < 0:
                piv = [-x for x in piv]
            basis.append(piv)
        col += 1
    # reduce entries above pivots
    for i in reversed(range(len(basis))):
        pc = next(j for j, x in enumerate(basis[i]) if x != 0)
        for k in range(i):
            q = basis[k][pc] // basis[i][pc]
            if q:
                for j in range(len(basis[i])):
                    basis[k][j] -= q * basis[i][j]
    return basis


def hnf_equal(rows_a: list[list[int]], rows_b: list[list[int]]) -> bool:
    return hnf(rows_a) == hnf(rows_b)


# ---------------------------------------------------------------------------
# Rational Gaussian elimination

def mat_det(m: list[list[Fraction]]) -> Fraction:
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for i in range(n):
        piv = next((r for r in range(i, n) if a[r][i] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != i:
            a[i], a[piv] = a[piv], a[i]
            det = -det
        det *= a[i][i]
        inv = 1 / a[i][i]
        for r in range(i + 1, n):
            if a[r][i]:
                f = a[r][i] * inv
                for c in range(i, n):
                    a[r][c] -= f * a[i][c]
    return det


def mat_inv(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == r)) for i in range(n)]
         for r, row in enumerate(m)]
    for i in range(n):
        piv = next((r for r in range(i, n) if a[r][i] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[i], a[piv] = a[piv], a[i]
        inv = 1 / a[i][i]
        a[i] = [x * inv for x in a[i]]
        for r in range(n):
            if r != i and a[r][i]:
                f = a[r][i]
                a[r] = [x - f * y for x, y in zip(a[r], a[i])]
    return [row[n:] for row in a]


def mat_mul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


def solve_right(a: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Solve x * a = rhs for a row vector x (a square invertible)."""
    inv = mat_inv(a)
    return [sum(rhs[j] * inv[j][i] for j in range(len(rhs))) for i in range(len(a))]


def mat_rank(m: list[list[Fraction]]) -> int:
    a = [[Fraction(x) for x in row] for row in m]
    rank = 0
    ncols = len(a[0]) if a else 0
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, len(a)) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = 1 / a[row][col]
        for r in range(row + 1, len(a)):
            if a[r][col]:
                f = a[r][col] * inv
                for c in range(col, ncols):
                    a[r][c] -= f * a[row][c]
        row += 1
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# Kernels modulo prime powers

def integer_left_kernel(a: list[list[int]]) -> list[list[int]]:
    """Basis of {x in Z^nrows : x * a == 0}, via HNF of [a | I]."""
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    aug = [list(row) + [int(i == j) for j in range(nrows)]
           for i, row in enumerate(a)]
    h = hnf(aug)
    return [row[ncols:] for row in h if not any(row[:ncols])]


def kernel_mod(m: list[list[int]], q: int) -> list[list[int]]:
    """HNF basis of the full-rank lattice {c in Z^nrows : c * m == 0 mod q}."""
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    stacked = [list(row) for row in m]
    for j in range(ncols):
        stacked.append([q * int(i == j) for i in range(ncols)])
    kern = integer_left_kernel(stacked)
    return hnf([row[:nrows] for row in kern])


def crt_pair(a1: int, m1: int, a2: int, m2: int) -> tuple[int, int]:
    g = gcd(m1, m2)
    if (a1 - a2) % g != 0:
        raise ValueError("inconsistent congruences")
    l = m1 // g * m2
    t = (a2 - a1) // g * pow(m1 // g, -1, m2 // g) % (m2 // g)
    return (a1 + m1 * t) % l, l


def crt(residues: list[int], moduli: list[int]) -> int:
    a, m = 0, 1
    for r, q in zip(residues, moduli):
        a, m = crt_pair(a, m, r % q, q)
    return a


# ---------------------------------------------------------------------------
# Integer roots

def iroot(n: int, k: int) -> tuple[int, bool]:
    """Floor k-th root and exactness flag."""
    if n < 0:
        raise ValueError("negative radicand")
    if n == 0:
        return 0, True
    if k == 1:
        return n, True
    if k == 2:
        r = isqrt(n)
        return r, r * r == n
    r = int(round(n ** (1.0 / k)))
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r, r ** k == n


def frac_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a rational square, else None."""
    if x < 0:
        return None
    rn, okn = iroot(x.numerator, 2)
    rd, okd = iroot(x.denominator, 2)
    if okn and okd:
        return Fraction(rn, rd)
    return None


def floor_sqrt_frac(x: Fraction) -> int:
    """floor(sqrt(x)) for x >= 0 rational."""
    if x < 0:
        raise ValueError("negative")
    return isqrt(x.numerator * x.denominator) // x.denominator


# ---------------------------------------------------------------------------
# Gram-based reduction (positive definite quadratic forms on Z^n)

def gram_norm(gram, u) -> Fraction:
    n = len(u)
    return sum(gram[i][j] * u[i] * u[j] for i in range(n) for j in range(n))


def gram_pair(gram, u, v) -> Fraction:
    n = len(u)
    return sum(gram[i][j] * u[i] * v[j] for i in range(n) for j in range(n))


def short_vectors_gram(gram, bound):
    """All x in Z^n with 0 < q(x) <= bound, one per +/- pair (first nonzero
    coordinate positive), sorted by (norm, coords). Fincke-Pohst with an
    exact rational Cholesky."""
    n = len(gram)
    a = [[Fraction(gram[i][j]) for j in range(n)] for i in range(n)]
    d = [Fraction(0)] * n
    r = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = a[i][i]
        if d[i] <= 0:
            raise ValueError("Gram not positive definite")
        for j in range(i + 1, n):
            r[i][j] = a[i][j] / d[i]
        for j in range(i + 1, n):
            for kk in range(j, n):
                a[j][kk] -= d[i] * r[i][j] * r[i][kk]
                a[kk][j] = a[j][kk]
    bound = Fraction(bound)
    out = []
    x = [0] * n

    def rec(i, rem):
        if i < 0:
            if any(x):
                v = tuple(x)
                lead = next(c for c in v if c)
                if lead < 0:
                    v = tuple(-c for c in v)
                out.append(v)
            return
        center = -sum(r[i][j] * x[j] for j in range(i + 1, n))
        rad = floor_sqrt_frac(rem / d[i])
        xi = int(center - rad) - 2
        hi = center + rad + 1
        while xi <= hi:
            xi += 1
            diff = Fraction(xi) - center
            used = d[i] * diff * diff
            if used <= rem:
                x[i] = xi
                rec(i - 1, rem - used)
        x[i] = 0

    rec(n - 1, bound)
    res = [(list(v), gram_norm(gram, v)) for v in sorted(set(out))]
    res = [(v, nn) for v, nn in res if 0 < nn <= bound]
    res.sort(key=lambda t: (t[1], t[0]))
    return res


def pre_reduce_gram(gram):
    """Greedy pairwise size-reduction; returns integer coefficient rows."""
    n = len(gram)
    coeff = [[int(i == j) for j in range(n)] for i in range(n)]
    changed = True
    guard = 0
    while changed and guard < 10000:
        guard += 1
        changed = False
        coeff.sort(key=lambda u: gram_norm(gram, u))
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                t = gram_pair(gram, coeff[i], coeff[j]) / gram_norm(gram, coeff[j])
                q = int(t + Fraction(1, 2)) if t >= 0 else -int(-t + Fraction(1, 2))
                if q:
                    new = [a - q * b for a, b in zip(coeff[i], coeff[j])]
                    if gram_norm(gram, new) < gram_norm(gram, coeff[i]):
                        coeff[i] = new
                        changed = True
    return coeff


def minkowski_transform(gram):
    """Integer coefficient rows attaining the successive minima (n <= 4)
    and forming a basis; deterministic tie-breaks."""
    n = len(gram)
    pre = pre_reduce_gram(gram)
    # enumerate in the pre-reduced coordinates; the raw basis can be too
    # skewed for Fincke-Pohst (vanishing trailing Cholesky pivots)
    g2 = [[gram_pair(gram, pre[i], pre[j]) for j in range(n)]
          for i in range(n)]
    bound = max(g2[i][i] for i in range(n))
    sv = short_vectors_gram(g2, bound)
    chosen: list[list[int]] = []
    for v, _nn in sv:
        cand = chosen + [v]
        if len(chosen) == n - 1:
            det = mat_det([[Fraction(x) for x in row] for row in cand])
            if abs(det) == 1:
                chosen.append(v)
                break
        elif mat_rank([[Fraction(x) for x in row] for row in cand]) == len(cand):
            chosen.append(v)
    if len(chosen) != n:
        raise RuntimeError("Minkowski reduction failed to complete a basis")
    return [[sum(v[i] * pre[i][j] for i in range(n)) for j in range(n)]
            for v in chosen]


def lattice_intersect(rows_a, rows_b):
    """HNF basis of the intersection of two full lattices in Z^n given by
    integer basis rows."""
    na, ncols = len(rows_a), len(rows_a[0])
    stacked = [list(r) for r in rows_a] + [[-x for x in r] for r in rows_b]
    kern = integer_left_kernel(stacked)
    out = []
    for k in kern:
        u = k[:na]
        vec = [sum(u[i] * rows_a[i][j] for i in range(na)) for j in range(ncols)]
        out.append(vec)
    return hnf(out)
