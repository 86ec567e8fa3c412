"""Formal integer combinations of isogeny chains: evaluation, degree
recovery from torsion action, division by integers, interpolation from
torsion images and recognition against an endomorphism basis."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

from ..errors import (InconsistentImages, NoMatch, TorsionFieldTooLarge,
                      WrongCurve)
from ..field_curve import Curve, Point, certify_basis
from ..intlinalg import crt, solve_right
from .frames import (TorsionFrame, action_matrix, choose_torsion,
                     frame_twist, get_frame)
from .steps import IsogenyRep


class HomElement:
    """(1/divisor) * sum of c_i * phi_i; the divisor records applications
    of divide_isogeny. `support` is None for globally evaluable elements,
    or a torsion modulus N restricting evaluation to E[M], M | N."""

    __slots__ = ("domain", "codomain", "terms", "divisor", "support")

    def __init__(self, domain: Curve, codomain: Curve, terms,
                 divisor: int = 1, support: int | None = None):
        self.domain = domain
        self.codomain = codomain
        self.terms = tuple((int(c), phi) for c, phi in terms)
        for _, phi in self.terms:
            if phi.domain != domain or phi.codomain != codomain:
                raise WrongCurve("term does not match domain/codomain")
        if divisor < 1:
            raise ValueError("divisor must be positive")
        self.divisor = divisor
        self.support = support

    @classmethod
    def from_isogeny(cls, phi: IsogenyRep) -> "HomElement":
        return cls(phi.domain, phi.codomain, [(1, phi)])

    @classmethod
    def zero(cls, domain: Curve, codomain: Curve) -> "HomElement":
        return cls(domain, codomain, [])

    def evaluate(self, P: Point) -> Point:
        if P.curve != self.domain:
            raise WrongCurve("point not on the domain curve")
        if self.support is not None:
            n = P.order()
            if self.support % n != 0:
                raise ValueError("point outside the supported torsion")
        Q = P
        if self.divisor != 1:
            n = P.order()
            shared, cop = 1, self.divisor
            g = gcd(cop, n)
            while g > 1:
                shared *= g
                cop //= g
                g = gcd(cop, n)
            if shared > 1:
                frame = get_frame(self.domain, n * shared)
                a, b = frame.dlog(P)
                if a % shared or b % shared:
                    raise ValueError("divisor does not divide this point")
                Q = frame.point(a // shared, b // shared)
            if cop > 1:
                # division prime to the order is a modular inverse
                Q = Q.mul(pow(cop, -1, Q.order()))
        R = self.codomain.infinity()
        for c, phi in self.terms:
            R = R.add(phi.evaluate(Q).mul(c))
        return R

    def add(self, other: "HomElement") -> "HomElement":
        if self.domain != other.domain or self.codomain != other.codomain:
            raise WrongCurve("mismatched homs")
        v1, v2 = self.divisor, other.divisor
        l = v1 * v2 // gcd(v1, v2)
        terms = ([(c * (l // v1), phi) for c, phi in self.terms]
                 + [(c * (l // v2), phi) for c, phi in other.terms])
        return HomElement(self.domain, self.codomain, terms, l,
                          _combine_support(self.support, other.support))

    def scale(self, m: int) -> "HomElement":
        return HomElement(self.domain, self.codomain,
                          [(c * m, phi) for c, phi in self.terms],
                          self.divisor, self.support)

    def neg(self) -> "HomElement":
        return self.scale(-1)

    def __repr__(self):
        return (f"HomElement({len(self.terms)} terms, divisor={self.divisor},"
                f" support={self.support})")


def hom_compose(h1: HomElement, h2: HomElement) -> HomElement:
    """h2 after h1; expands the product of the two formal sums."""
    if h1.codomain != h2.domain:
        raise WrongCurve("mismatched homs in composition")
    terms = []
    for c1, r1 in h1.terms:
        for c2, r2 in h2.terms:
            terms.append((c1 * c2, r1.compose(r2)))
    return HomElement(h1.domain, h2.codomain, terms,
                      h1.divisor * h2.divisor,
                      _combine_support(h1.support, h2.support))


def _combine_support(s1, s2):
    if s1 is None:
        return s2
    if s2 is None:
        return s1
    return gcd(s1, s2)


def _avoid_of(h) -> tuple:
    d = getattr(h, "divisor", 1)
    return () if d == 1 else tuple(_primes_of(d))


def _primes_of(n: int):
    from sympy import factorint
    return [int(q) for q in factorint(n)]


def hom_matrix_mod(h, q: int):
    """2x2 action matrix of h on E[q] (prime power q, coprime to p)."""
    fd = get_frame(h.domain, q)
    fc = fd if h.codomain == h.domain else get_frame(h.codomain, q)
    return action_matrix(h.evaluate, fd, fc)


def degree_of_hom(h, bound: int) -> int:
    """Exact degree via det of the torsion action mod N > 2*bound."""
    if getattr(h, "support", None) is not None:
        return _degree_supported(h, bound)
    pieces = choose_torsion(h.domain, 2 * bound, avoid=_avoid_of(h))
    res, mods = [], []
    for q, _k in pieces:
        fd = get_frame(h.domain, q)
        fc = fd if h.codomain == h.domain else get_frame(h.codomain, q)
        m = action_matrix(h.evaluate, fd, fc)
        mu = frame_twist(fd, fc)
        res.append(mu * (m[0][0] * m[1][1] - m[0][1] * m[1][0]) % q)
        mods.append(q)
    d = crt(res, mods)
    if d > bound:
        raise ValueError(f"recovered degree {d} exceeds the stated bound")
    return d


def _degree_supported(h, bound: int) -> int:
    res, mods = [], []
    for q, frame, iP, iQ in h.pieces:
        fc = frame if h.codomain == h.domain else get_frame(h.codomain, q)
        m = [list(fc.dlog(iP)), list(fc.dlog(iQ))]
        mu = frame_twist(frame, fc)
        res.append(mu * (m[0][0] * m[1][1] - m[0][1] * m[1][0]) % q)
        mods.append(q)
    n = 1
    for q in mods:
        n *= q
    if n <= 2 * bound:
        raise ValueError("supported torsion too small to pin the degree")
    d = crt(res, mods)
    if d > bound:
        raise ValueError(f"recovered degree {d} exceeds the stated bound")
    return d


def pairing_of_homs(h1, h2, bound: int) -> Fraction:
    """<h1,h2> = (deg(h1+h2) - deg h1 - deg h2)/2; `bound` must dominate
    both degrees."""
    d1 = degree_of_hom(h1, bound)
    d2 = degree_of_hom(h2, bound)
    ds = degree_of_hom(h1.add(h2), 2 * (d1 + d2) + 2 * isqrt(d1 * d2) + 2)
    return Fraction(ds - d1 - d2, 2)


def divide_isogeny(h: HomElement, n: int):
    """h/n when E[n] <= ker h, else False."""
    if n == 1:
        return h
    if n < 1:
        raise ValueError("n must be positive")
    from sympy import factorint
    for ell, e in factorint(n).items():
        q = int(ell) ** int(e)
        m = hom_matrix_mod(h, q)
        if any(x % q for row in m for x in row):
            return False
    return HomElement(h.domain, h.codomain, h.terms, h.divisor * n, h.support)


def is_zero_hom(h, bound: int) -> bool:
    return degree_of_hom(h, bound) == 0 and all(
        x % q == 0
        for q, _k in choose_torsion(h.domain, 2 * bound, avoid=_avoid_of(h))
        for row in hom_matrix_mod(h, q) for x in row)


# ---------------------------------------------------------------------------
# interpolation

class InterpolationData:
    """Degree n and, per prime-power factor q of N, a basis of E[q] with
    prescribed images."""

    def __init__(self, domain: Curve, codomain: Curve, degree: int, pieces):
        self.domain = domain
        self.codomain = codomain
        self.degree = degree
        self.pieces = []  # (q, P, Q, imP, imQ)
        N = 1
        for q, P, Q, iP, iQ in pieces:
            self.pieces.append((q, P, Q, iP, iQ))
            N *= q
        self.N = N
        if gcd(self.N, domain.p * max(degree, 1)) != 1:
            raise ValueError("torsion modulus must be coprime to p*n")
        if self.N <= degree:
            raise ValueError("torsion modulus must exceed the degree")

    @classmethod
    def read_off(cls, h, degree: int, moduli: list[int]) -> "InterpolationData":
        """Record the action of an evaluable hom on the given prime powers."""
        pieces = []
        for q in moduli:
            f = get_frame(h.domain, q)
            pieces.append((q, f.P, f.Q, h.evaluate(f.P), h.evaluate(f.Q)))
        return cls(h.domain, h.codomain, degree, pieces)


class InterpolatedHom:
    """Hom known only through its action on E[N]; support is flagged so
    callers cannot treat it as globally evaluable."""

    __slots__ = ("domain", "codomain", "degree", "support", "pieces",
                 "divisor")

    def __init__(self, data: InterpolationData):
        self.domain = data.domain
        self.codomain = data.codomain
        self.degree = data.degree
        self.support = data.N
        self.divisor = 1
        self.pieces = []
        for q, P, Q, iP, iQ in data.pieces:
            if not certify_basis(data.domain, P, Q, q):
                raise InconsistentImages(f"given points are not a basis of E[{q}]")
            for im in (iP, iQ):
                if im.curve != data.codomain:
                    raise InconsistentImages("image on the wrong curve")
                if not im.mul(q).is_infinity():
                    raise InconsistentImages("image order does not divide q")
            frame = TorsionFrame.from_basis(data.domain, q, P, Q)
            fc = (frame if data.codomain == data.domain
                  else get_frame(data.codomain, q))
            m = [list(fc.dlog(iP)), list(fc.dlog(iQ))]
            mu = frame_twist(frame, fc)
            det = mu * (m[0][0] * m[1][1] - m[0][1] * m[1][0]) % q
            if det != data.degree % q:
                raise InconsistentImages(
                    f"determinant {det} != degree mod {q}")
            self.pieces.append((q, frame, iP, iQ))

    def evaluate(self, P: Point) -> Point:
        if P.curve != self.domain:
            raise WrongCurve("point not on the domain curve")
        n = P.order()
        if self.support % n != 0:
            raise ValueError("point outside the supported torsion")
        out = self.codomain.infinity()
        for q, frame, iP, iQ in self.pieces:
            cof = self.support // q
            t = pow(cof, -1, q) if q > 1 else 0
            Pq = P.mul(cof * t % self.support)
            a, b = frame.dlog(Pq)
            out = out.add(iP.mul(a)).add(iQ.mul(b))
        return out

    def matrix_mod(self, q: int):
        for qq, frame, iP, iQ in self.pieces:
            if qq == q:
                fc = (frame if self.codomain == self.domain
                      else get_frame(self.codomain, q))
                return [list(fc.dlog(iP)), list(fc.dlog(iQ))]
        raise ValueError(f"{q} is not one of the interpolation moduli")


def interpolate(data: InterpolationData) -> InterpolatedHom:
    return InterpolatedHom(data)


# ---------------------------------------------------------------------------
# recognition against an End(E) basis

def recognize_endomorphism(E: Curve, basis, action: InterpolationData,
                           norm_bound: int | None = None) -> HomElement:
    """The unique integer combination of the 4 basis endomorphisms whose
    action on E[N] matches `action`; coefficients via the Gram form."""
    alpha = InterpolatedHom(action)
    N = action.N
    n = action.degree
    moduli = [q for q, *_ in alpha.pieces]
    degs = [degree_of_hom(b, N // 2) for b in basis]
    frames = {q: frame for q, frame, _, _ in alpha.pieces}
    bmats = {q: [action_matrix(b.evaluate, frames[q], frames[q])
                 for b in basis] for q in moduli}

    def lifted_degree(msum_by_q, bound):
        res = [(m[0][0] * m[1][1] - m[0][1] * m[1][0]) % q
               for q, m in zip(moduli, msum_by_q)]
        d = crt(res, moduli)
        if d > bound:
            raise NoMatch("degree lift escapes its bound; torsion too small")
        return d

    # Gram matrix of the basis
    gram = [[Fraction(0)] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(i, 4):
            if i == j:
                gram[i][j] = Fraction(degs[i])
                continue
            msum = [[[x + y for x, y in zip(r1, r2)]
                     for r1, r2 in zip(bmats[q][i], bmats[q][j])]
                    for q in moduli]
            dsum = lifted_degree(msum, 2 * (degs[i] + degs[j])
                                 + 2 * isqrt(degs[i] * degs[j]) + 2)
            gram[i][j] = gram[j][i] = Fraction(dsum - degs[i] - degs[j], 2)
    # inner products <alpha, beta_i>
    amats = {q: alpha.matrix_mod(q) for q in moduli}
    v = []
    for i in range(4):
        msum = [[[x + y for x, y in zip(r1, r2)]
                 for r1, r2 in zip(amats[q], bmats[q][i])]
                for q in moduli]
        dsum = lifted_degree(msum, 2 * (n + degs[i]) + 2 * isqrt(n * degs[i]) + 2)
        v.append(Fraction(dsum - n - degs[i], 2))
    coeffs = solve_right(gram, v)
    if any(c.denominator != 1 for c in coeffs):
        raise NoMatch(f"non-integral coefficients {coeffs}")
    coeffs = [int(c) for c in coeffs]
    # verify the action mod every modulus
    for q in moduli:
        for r in range(2):
            for c in range(2):
                s = sum(coeffs[i] * bmats[q][i][r][c] for i in range(4))
                if (s - amats[q][r][c]) % q:
                    raise NoMatch("combination does not reproduce the action")
    out = HomElement.zero(E, E)
    for c, b in zip(coeffs, basis):
        if c:
            out = out.add(b.scale(c))
    return out
