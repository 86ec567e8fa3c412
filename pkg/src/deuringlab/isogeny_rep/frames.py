"""Torsion frames: cached bases of E[n] with discrete logs, the scaffolding
that turns isogeny evaluation into 2x2 integer matrices mod n."""

from __future__ import annotations

from math import gcd

from ..errors import TorsionFieldTooLarge, WrongCurve
from ..field_curve import MAX_TORSION_K, get_ctx
from ..field_curve.curves import _lcm
from ..field_curve.fields import descend
from ..intlinalg import crt


_FRAMES: dict = {}


class TorsionFrame:
    """Basis (P, Q) of E[n] with an O(n) discrete-log table and the Weil
    pairing value zeta = e_n(P, Q) of the basis."""

    def __init__(self, E, n: int, max_k: int = MAX_TORSION_K, basis=None):
        self._zeta = None
        self.curve = E
        self.n = n
        if basis is None:
            P, Q, ctx = E.torsion_basis(n, max_k)
        else:
            P, Q = basis
            ctx = get_ctx(E.p, _lcm(P.ctx.k, Q.ctx.k))
        self.P = P.at_level(ctx)
        self.Q = Q.at_level(ctx)
        self.ctx = ctx
        table = {}
        T = E.infinity()
        for a in range(n):
            table[T.at_level(ctx).key()] = a
            T = T.add(self.P)
        self._ptable = table

    def _normalize(self, R):
        if R.is_infinity():
            return R.at_level(self.ctx) if R.ctx is not self.ctx else R
        if R.ctx is self.ctx:
            return R
        if self.ctx.k % R.ctx.k == 0:
            return R.at_level(self.ctx)
        if R.ctx.k % self.ctx.k == 0:
            x = descend(R.x, self.ctx)
            y = descend(R.y, self.ctx)
            if x is None or y is None:
                raise ValueError("point does not lie in the frame field")
            return type(R)(R.curve, x, y)
        raise ValueError("incompatible field levels")

    def dlog(self, R) -> tuple[int, int]:
        """(a, b) with R = aP + bQ; R must lie in E[n]."""
        if R.curve != self.curve:
            raise WrongCurve("dlog against a frame of another curve")
        R = self._normalize(R)
        S = R
        step = self.Q.neg()
        for b in range(self.n):
            k = S.at_level(self.ctx).key()
            if k in self._ptable:
                return self._ptable[k], b
            S = S.add(step)
        raise ValueError(f"point not in E[{self.n}]")

    @property
    def zeta(self):
        if self._zeta is None:
            from ..field_curve.pairing import weil_pairing
            self._zeta = weil_pairing(self.P, self.Q, self.n)
        return self._zeta

    @classmethod
    def from_basis(cls, E, n: int, P, Q) -> "TorsionFrame":
        return cls(E, n, basis=(P, Q))

    def point(self, a: int, b: int):
        return self.P.mul(a % self.n).add(self.Q.mul(b % self.n))


def get_frame(E, n: int, max_k: int = MAX_TORSION_K) -> TorsionFrame:
    key = (E.p, E.a.c, E.b.c, n)
    if key not in _FRAMES:
        _FRAMES[key] = TorsionFrame(E, n, max_k)
    return _FRAMES[key]


def root_dlog(base, val, n: int) -> int:
    """i with base^i = val in the order-n cyclic group generated by base."""
    from ..field_curve.curves import _lcm
    from ..field_curve.fields import embed
    ctx = get_ctx(base.ctx.p, _lcm(base.ctx.k, val.ctx.k))
    base = embed(base, ctx)
    val = embed(val, ctx)
    t = ctx.one
    for i in range(n):
        if t == val:
            return i
        t = t * base
    raise ValueError("value not in the subgroup generated by base")


def frame_twist(frame_dom: TorsionFrame, frame_cod: TorsionFrame) -> int:
    """mu with zeta_cod = zeta_dom^mu; the determinant of a homomorphism's
    action matrix between the frames satisfies deg = det * mu mod n."""
    if frame_dom is frame_cod:
        return 1
    return root_dlog(frame_dom.zeta, frame_cod.zeta, frame_dom.n)


def action_matrix(eval_fn, frame_dom: TorsionFrame,
                  frame_cod: TorsionFrame | None = None):
    """2x2 matrix M (rows = images of P, Q in basis coordinates) of a
    homomorphism given by `eval_fn`, mod frame.n."""
    if frame_cod is None:
        frame_cod = frame_dom
    r1 = frame_cod.dlog(eval_fn(frame_dom.P))
    r2 = frame_cod.dlog(eval_fn(frame_dom.Q))
    return [list(r1), list(r2)]


def choose_torsion(E, bound, avoid=(), max_k: int = MAX_TORSION_K,
                   max_piece: int = 512) -> list[tuple[int, int]]:
    """Prime powers (q, level) with product > bound, gcd with p and all of
    `avoid` equal 1, preferring low field levels then small q."""
    from sympy import factorint
    s = E.frobenius_scalar()
    best: dict[int, tuple[int, int]] = {}  # ell -> (level, q)
    for k in range(1, max_k + 1):
        m = abs(s ** k - 1)
        for ell, e in factorint(m).items():
            ell = int(ell)
            if ell == E.p or any(ell == a or a % ell == 0 for a in avoid):
                continue
            q = ell ** int(e)
            while q > max_piece:
                q //= ell
            if q == 1:
                continue
            if ell not in best:  # keep the lowest level seen for each ell
                best[ell] = (k, q)
    pieces = sorted(best.items(), key=lambda t: (t[1][0], t[0]))
    out = []
    prod = 1
    for ell, (k, q) in pieces:
        out.append((q, k))
        prod *= q
        if prod > bound:
            return out
    raise TorsionFieldTooLarge(
        f"cannot reach torsion product > {bound} within level {max_k}")


def matrix_mod_crt(mats: list, mods: list[int]):
    """CRT-combine 2x2 matrices given mod pairwise coprime moduli."""
    out = [[0, 0], [0, 0]]
    for i in range(2):
        for j in range(2):
            out[i][j] = crt([m[i][j] for m in mats], mods)
    return out
