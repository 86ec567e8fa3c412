"""JSON encodings for field elements, curves and points.

Field elements are coefficient lists in the tower generator (constant term
first); points carry the tower level k; curves live over F_{p^2}.
"""

from __future__ import annotations

from .curves import Curve, Point
from .fields import Fq, get_ctx


def fq_to_json(x: Fq) -> dict:
    return {"c": list(x.c), "k": x.ctx.k}


def fq_from_json(p: int, data) -> Fq:
    return get_ctx(p, data["k"]).elt(list(data["c"]))


def curve_to_json(E: Curve) -> dict:
    return {"p": E.p, "a": list(E.a.c), "b": list(E.b.c)}


def curve_from_json(data) -> Curve:
    ctx = get_ctx(data["p"], 1)
    return Curve(ctx.elt(list(data["a"])), ctx.elt(list(data["b"])))


def point_to_json(P: Point):
    if P.is_infinity():
        return "inf"
    return {"x": list(P.x.c), "y": list(P.y.c), "k": P.x.ctx.k}


def point_from_json(E: Curve, data) -> Point:
    if data == "inf":
        return E.infinity()
    ctx = get_ctx(E.p, data["k"])
    P = Point(E, ctx.elt(list(data["x"])), ctx.elt(list(data["y"])))
    if not P.is_infinity():
        a, b = E.coeffs_at(ctx)
        if P.y * P.y != P.x * P.x * P.x + a * P.x + b:
            raise ValueError("point not on curve")
    return P
