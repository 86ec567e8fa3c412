"""Weil pairing on E[n] by Miller's algorithm (exact, small n)."""

from __future__ import annotations

from ..rng import Stream
from .curves import Curve, Point, random_point
from .fields import get_ctx
from .curves import _lcm


def _line(E: Curve, A: Point, B: Point, X: Point):
    """g_{A,B}(X): the chord-tangent line through A, B over the vertical
    at A+B, the Miller update factor. Raises ZeroDivisionError at zeros
    or poles hitting X."""
    ctx = X.ctx
    a, _ = E.coeffs_at(ctx)
    xX, yX = X.x, X.y
    if A.is_infinity() or B.is_infinity():
        return ctx.one  # divisor of g_{O,C} is trivial
    if A.x == B.x and not (A.y == B.y):
        # vertical line, sum is O
        v = xX - A.x
        if not v:
            raise ZeroDivisionError
        return v
    if A.x == B.x:
        if not A.y:
            v = xX - A.x
            if not v:
                raise ZeroDivisionError
            return v
        lam = (A.x * A.x * 3 + a) / (A.y * 2)
    else:
        lam = (B.y - A.y) / (B.x - A.x)
    num = yX - A.y - lam * (xX - A.x)
    S = A.add(B)
    if S.is_infinity():
        if not num:
            raise ZeroDivisionError
        return num
    den = xX - S.x
    if not num or not den:
        raise ZeroDivisionError
    return num / den


def _miller(E: Curve, P: Point, n: int, X: Point):
    """f_{n,P}(X)."""
    ctx = X.ctx
    P = P.at_level(ctx)
    f = ctx.one
    T = P
    for bit in bin(n)[3:]:
        f = f * f * _line(E, T, T, X)
        T = T.add(T)
        if bit == "1":
            f = f * _line(E, T, P, X)
            T = T.add(P)
    return f


def _weil_raw(E: Curve, P: Point, Q: Point, n: int, ctx):
    """(-1)^n f_P(Q) / f_Q(P) with Miller-normalized functions."""
    if P.is_infinity() or Q.is_infinity() or P.eq(Q):
        return ctx.one
    val = _miller(E, P, n, Q) / _miller(E, Q, n, P)
    if n % 2:
        val = -val
    return val


def weil_pairing(P: Point, Q: Point, n: int):
    """e_n(P, Q); both points must lie in E[n]. Deterministic; retries a
    failed Miller evaluation with offsets inside E[n] (bilinearity)."""
    E = P.curve
    if P.is_infinity() or Q.is_infinity():
        return get_ctx(E.p, 1).one
    ctx = get_ctx(E.p, _lcm(P.ctx.k, Q.ctx.k))
    P = P.at_level(ctx)
    Q = Q.at_level(ctx)
    try:
        return _weil_raw(E, P, Q, n, ctx)
    except ZeroDivisionError:
        pass
    stream = Stream.from_seed("weil", E.p, ctx.k, P.key(), Q.key(), n)
    for _ in range(64):
        # S = cP + dQ stays in E[n]; e(P,Q+S)/e(P,S) = e(P,Q)
        c, d = stream.randint(n), stream.randint(n)
        S = P.mul(c).add(Q.mul(d))
        try:
            g1 = _weil_raw(E, P, Q.add(S), n, ctx)
            g2 = _weil_raw(E, P, S, n, ctx)
            return g1 / g2
        except ZeroDivisionError:
            continue
    raise RuntimeError("Weil pairing sampling failed")  # pragma: no cover
