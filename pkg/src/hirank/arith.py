"""Exact univariate polynomial arithmetic and series at infinity.

Rationals are stdlib Fractions throughout (always reduced, positive
denominator, structural equality).  Poly is a dense immutable coefficient
tuple, lowest degree first, with no trailing zeros; it is written to work
over any commutative coefficient ring that supports +, -, *, and (where an
operation needs it) exact /.  In practice the rings used are Fraction,
Fraction-polynomials (for bivariate work) and Z/p^k units.

The series tools expand a monic polynomial f of degree n = r*m around
X = infinity as f^(1/r) = X^m * (1 + u)^(1/r) with u a power series in 1/X,
by Newton iteration on dense truncated coefficient lists.  The degree-4
principal part of the cube root of a degree-12 polynomial, and the X^-1
coefficient just below it, drive the rank-11 family construction downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable


def _trim(coeffs: list) -> tuple:
    n = len(coeffs)
    while n > 0 and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


class Poly:
    """Dense univariate polynomial, immutable, trailing zeros trimmed."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        if isinstance(coeffs, Poly):
            object.__setattr__(self, "coeffs", coeffs.coeffs)
            return
        object.__setattr__(self, "coeffs", _trim(list(coeffs)))

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    @staticmethod
    def of(*coeffs) -> "Poly":
        """Poly.of(c0, c1, ...) = c0 + c1*X + ... with Fraction coefficients."""
        return Poly([Fraction(c) for c in coeffs])

    @staticmethod
    def x(power: int = 1) -> "Poly":
        return Poly([Fraction(0)] * power + [Fraction(1)])

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial reports -1."""
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def leading(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        return self.degree <= 0 and (self[0] == other)

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = other if isinstance(other, Poly) else Poly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[i] + other[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-(other if isinstance(other, Poly) else Poly([other])))

    def __rsub__(self, other):
        return (-(self)) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    def __rmul__(self, other):
        return Poly([other * c for c in self.coeffs])

    def __pow__(self, e: int):
        assert e >= 0
        result = Poly([Fraction(1)])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divrem(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Exact division with remainder; the divisor's leading coefficient
        must be invertible in the coefficient ring."""
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        num = list(self.coeffs)
        d = other.degree
        lc = other.leading()
        q = [Fraction(0)] * max(len(num) - d, 0)
        for i in range(len(num) - 1 - d, -1, -1):
            c = num[i + d] / lc
            if c:
                q[i] = c
                for j, b in enumerate(other.coeffs):
                    num[i + j] = num[i + j] - c * b
        return Poly(q), Poly(num[:d] if d > 0 else [])

    def __divmod__(self, other):
        return self.divrem(other)

    def __floordiv__(self, other):
        return self.divrem(other)[0]

    def __mod__(self, other):
        return self.divrem(other)[1]

    def __truediv__(self, scalar):
        return Poly([c / scalar for c in self.coeffs])

    def __call__(self, x):
        """Evaluate by Horner; works for scalars and for Poly (composition)."""
        acc = Fraction(0) if not self.coeffs else self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def compose(self, other: "Poly") -> "Poly":
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * other + Poly([c])
        return acc

    def shift(self, a) -> "Poly":
        """f(X + a)."""
        return self.compose(Poly([a, Fraction(1)]))

    def derivative(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "Poly":
        return self / self.leading() if self.coeffs else self

    def content_and_primitive(self) -> tuple[Fraction, "Poly"]:
        """Write f = c * g with c rational > 0 and g primitive integer."""
        import math

        if not self.coeffs:
            return Fraction(0), self
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        return Fraction(g, den), Poly([Fraction(v // g) for v in ints])

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            if i == 0:
                parts.append(f"{c}")
            else:
                xs = "X" if i == 1 else f"X^{i}"
                parts.append(xs if c == 1 else (f"-{xs}" if c == -1 else f"{c}*{xs}"))
        s = " + ".join(parts).replace("+ -", "- ")
        return f"Poly({s})"


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd over Q by the Euclidean algorithm."""
    a, b = f, g
    while b:
        a, b = b, a % b
    return a.monic() if a else a


def poly_xgcd(f: Poly, g: Poly) -> tuple[Poly, Poly, Poly]:
    """(d, u, v) with u f + v g = d = monic gcd."""
    r0, r1 = f, g
    s0, s1 = Poly.of(1), Poly()
    t0, t1 = Poly(), Poly.of(1)
    while r1:
        q, r = r0.divrem(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0:
        lc = r0.leading()
        r0, s0, t0 = r0 / lc, s0 / lc, t0 / lc
    return r0, s0, t0


# -------------------------- polynomials mod p --------------------------


class PolyModP:
    """Dense polynomial over Z/p, coefficients reduced, trailing zeros cut."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Iterable[int]):
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "coeffs", _trim([c % p for c in coeffs]))

    def __setattr__(self, *a):
        raise AttributeError("PolyModP is immutable")

    @staticmethod
    def from_poly(f: Poly, p: int) -> "PolyModP":
        """Reduce a rational polynomial mod p; denominators must be units."""
        out = []
        for c in f.coeffs:
            if c.denominator % p == 0:
                raise ZeroDivisionError(f"coefficient denominator divisible by {p}")
            out.append(c.numerator * pow(c.denominator, -1, p) % p)
        return PolyModP(p, out)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other):
        return (isinstance(other, PolyModP) and self.p == other.p
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyModP(self.p, [self[i] + other[i] for i in range(n)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyModP(self.p, [self[i] - other[i] for i in range(n)])

    def __mul__(self, other):
        if isinstance(other, int):
            return PolyModP(self.p, [c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return PolyModP(self.p, [])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return PolyModP(self.p, out)

    def divrem(self, other):
        if not other:
            raise ZeroDivisionError
        p = self.p
        inv = pow(other.coeffs[-1], -1, p)
        num = list(self.coeffs)
        d = other.degree
        q = [0] * max(len(num) - d, 0)
        for i in range(len(num) - 1 - d, -1, -1):
            c = num[i + d] * inv % p
            if c:
                q[i] = c
                for j, b in enumerate(other.coeffs):
                    num[i + j] = (num[i + j] - c * b) % p
        return PolyModP(p, q), PolyModP(p, num[:d] if d > 0 else [])

    def __mod__(self, other):
        return self.divrem(other)[1]

    def gcd(self, other):
        a, b = self, other
        while b:
            a, b = b, a % b
        if a:
            a = a * pow(a.coeffs[-1], -1, self.p)
        return a

    def derivative(self):
        return PolyModP(self.p, [i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def roots(self) -> list[int]:
        """All roots in Z/p by direct scan (p is small wherever this is used)."""
        return [x for x in range(self.p) if self(x) == 0]

    def __repr__(self):
        return f"PolyModP(p={self.p}, {list(self.coeffs)})"


# -------------------------- series at infinity --------------------------
#
# A series here is a plain list [s0, s1, ..., s_N] meaning sum s_j v^j with
# v = 1/X, truncated at order N inclusive.  All helpers take the truncation
# order explicitly.


def _ser_trunc(a: list, order: int) -> list:
    out = a[: order + 1]
    return out + [Fraction(0)] * (order + 1 - len(out))

def _ser_add(a, b, order):
    a = _ser_trunc(a, order)
    b = _ser_trunc(b, order)
    return [x + y for x, y in zip(a, b)]

def _ser_mul(a, b, order):
    out = [Fraction(0)] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if not x:
            continue
        for j, y in enumerate(b[: order + 1 - i]):
            if y:
                out[i + j] = out[i + j] + x * y
    return out

def _ser_inv(a, order):
    """Inverse of a series whose constant term is 1, by Newton doubling."""
    assert a[0] == 1
    x = [a[0]]
    k = 0
    while k < order:
        k = min(2 * k + 1, order)
        ax = _ser_mul(_ser_trunc(a, k), x, k)
        two_minus = [-c for c in ax]
        two_minus[0] = two_minus[0] + 2
        x = _ser_mul(x, two_minus, k)
    return _ser_trunc(x, order)


def _series_root_of_one_plus_u(u: list, r: int, order: int) -> list:
    """(1 + u)^(1/r) for a series u with u[0] = 0, by Newton iteration.

    Solves g^r = 1 + u via g <- g + (a*g^(1-r) - g)/r, doubling the
    truncation order each round.
    """
    a = list(u)
    a[0] = a[0] + 1
    g = [Fraction(1)]
    k = 0
    while k < order:
        k = min(2 * k + 1, order)
        gr_minus_1 = [Fraction(1)]
        for _ in range(r - 1):
            gr_minus_1 = _ser_mul(gr_minus_1, g, k)
        correction = _ser_mul(_ser_trunc(a, k), _ser_inv(gr_minus_1, k), k)
        g = [(x * (r - 1) + c) / r for x, c in zip(_ser_trunc(g, k), correction)]
    return _ser_trunc(g, order)


@dataclass(frozen=True)
class PrincipalPart:
    """Polynomial part R (monic, degree k) of the expansion of f^(1/r) at
    infinity, together with the coefficient c of X^(-1) right below it."""

    R: Poly
    c: Fraction


def _coerce_fractions(f: Poly) -> Poly:
    if all(isinstance(c, Fraction) for c in f.coeffs):
        return f
    return Poly([Fraction(c) if isinstance(c, int) else c for c in f.coeffs])


def series_cube_root(f: Poly, terms: int | None = None) -> PrincipalPart:
    """Principal part of the cube root of a monic polynomial at infinity.

    f must be monic of degree divisible by 3; with deg f = 3m the expansion
    f^(1/3) = X^m + ... + (coefficient) X^0 + c X^(-1) + O(X^(-2)) is
    computed to `terms` coefficients past X^m (terms >= m+1; default m+2).
    Returns the monic degree-m polynomial part and c.
    """
    f = _coerce_fractions(f)
    n = f.degree
    if n < 0 or n % 3 != 0:
        raise ValueError("degree must be a positive multiple of 3")
    if f.leading() != 1:
        raise ValueError("polynomial must be monic")
    m = n // 3
    if terms is None:
        terms = m + 2
    if terms < m + 1:
        raise ValueError("need at least m+1 series terms to reach X^-1")
    u = [f[n - j] for j in range(terms + 1)]
    u[0] = Fraction(0)
    g = _series_root_of_one_plus_u(u, 3, terms)
    R = Poly(list(reversed(g[: m + 1])))
    assert R.is_monic() and R.degree == m
    return PrincipalPart(R=R, c=g[m + 1])


def series_sqrt_principal(f: Poly, terms: int | None = None) -> PrincipalPart:
    """Same as series_cube_root but for square roots (monic, even degree)."""
    f = _coerce_fractions(f)
    n = f.degree
    if n < 0 or n % 2 != 0:
        raise ValueError("degree must be a positive multiple of 2")
    if f.leading() != 1:
        raise ValueError("polynomial must be monic")
    m = n // 2
    if terms is None:
        terms = m + 2
    u = [f[n - j] for j in range(terms + 1)]
    u[0] = Fraction(0)
    g = _series_root_of_one_plus_u(u, 2, terms)
    R = Poly(list(reversed(g[: m + 1])))
    return PrincipalPart(R=R, c=g[m + 1])


def poly_sqrt(f: Poly) -> Poly | None:
    """Exact square root of f in Q[X], or None if f is not a square."""
    if not f:
        return Poly()
    n = f.degree
    if n % 2 != 0:
        return None
    lc = f.leading()
    if lc.numerator < 0:
        return None
    from math import isqrt

    rn, rd = isqrt(lc.numerator), isqrt(lc.denominator)
    if rn * rn != lc.numerator or rd * rd != lc.denominator:
        return None
    slc = Fraction(rn, rd)
    g = f / lc
    m = n // 2
    if m == 0:
        return Poly([slc])
    pp = series_sqrt_principal(g, m + 1)
    cand = pp.R * slc
    return cand if cand * cand == f else None


# -------------------------- rational functions --------------------------


class RatFunc:
    """Ratio of rational polynomials, reduced, denominator monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = num if isinstance(num, Poly) else Poly.of(num)
        den = Poly.of(1) if den is None else (den if isinstance(den, Poly) else Poly.of(den))
        if not den:
            raise ZeroDivisionError("zero denominator")
        g = poly_gcd(num, den)
        if g and g.degree > 0:
            num, den = num.divrem(g)[0], den.divrem(g)[0]
        lc = den.leading()
        object.__setattr__(self, "num", num / lc)
        object.__setattr__(self, "den", den / lc)

    def __setattr__(self, *a):
        raise AttributeError("RatFunc is immutable")

    @staticmethod
    def of_poly(f: Poly) -> "RatFunc":
        return RatFunc(f, Poly.of(1))

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        return self.den.degree == 0 and self.num == Poly([Fraction(other)])

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = other if isinstance(other, RatFunc) else RatFunc(Poly([Fraction(other)]))
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        other = other if isinstance(other, RatFunc) else RatFunc(Poly([Fraction(other)]))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = other if isinstance(other, RatFunc) else RatFunc(Poly([Fraction(other)]))
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = other if isinstance(other, RatFunc) else RatFunc(Poly([Fraction(other)]))
        if not other.num:
            raise ZeroDivisionError
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RatFunc(Poly([Fraction(other)])) / self

    def __pow__(self, e: int):
        return RatFunc(self.num**e, self.den**e) if e >= 0 else RatFunc(self.den**-e, self.num**-e)

    def __call__(self, t: Fraction) -> Fraction:
        d = self.den(t)
        if d == 0:
            raise ZeroDivisionError(f"pole at t = {t}")
        return self.num(t) / d

    def __repr__(self):
        if self.den.degree == 0:
            return f"RatFunc({self.num!r})"
        return f"RatFunc(({self.num!r}) / ({self.den!r}))"
