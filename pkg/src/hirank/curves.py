"""Elliptic curves over Q in extended Weierstrass form.

The model is y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6 with rational
coefficients, kept fully general (no completed squares) so that curves with
records-sized integer coefficients stay integral.  Points are exact; there
are no height or size caps anywhere.

Also here: reduction mod p with the quadratic-character point count that
the sieve depends on, torsion classification against Mazur's list, and
Nagell's classical procedure turning a plane cubic with a marked smooth
rational point into a Weierstrass model with verified birational maps.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .arith import Poly, RatFunc, poly_sqrt
from .intmath import is_probable_prime, primes_below
from .padic import rational_poly_roots

F0 = Fraction(0)


class BadReduction(ValueError):
    """Discriminant vanishes mod p."""


class DenominatorDivisibleByP(ValueError):
    """A coefficient has p in its denominator."""


class SingularPoint(ValueError):
    """The marked point is a singular point of the cubic."""


class ReducibleCubic(ValueError):
    """The cubic has a line component through the construction."""


class WeierstrassCurve:
    """y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6 over Q, nonsingular."""

    __slots__ = ("a1", "a2", "a3", "a4", "a6",
                 "b2", "b4", "b6", "b8", "c4", "c6", "disc", "j", "_done")

    def __init__(self, a1, a2, a3, a4, a6):
        a1, a2, a3, a4, a6 = (Fraction(v) for v in (a1, a2, a3, a4, a6))
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = (a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4
              + a2 * a3 * a3 - a4 * a4)
        c4 = b2 * b2 - 24 * b4
        c6 = -b2**3 + 36 * b2 * b4 - 216 * b6
        disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        if disc == 0:
            raise ValueError("singular model: discriminant is zero")
        for name, val in (("a1", a1), ("a2", a2), ("a3", a3), ("a4", a4),
                          ("a6", a6), ("b2", b2), ("b4", b4), ("b6", b6),
                          ("b8", b8), ("c4", c4), ("c6", c6), ("disc", disc),
                          ("j", c4**3 / disc)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "_done", True)

    def __setattr__(self, *a):
        raise AttributeError("curves are immutable")

    def __eq__(self, other):
        return (isinstance(other, WeierstrassCurve) and
                (self.a1, self.a2, self.a3, self.a4, self.a6)
                == (other.a1, other.a2, other.a3, other.a4, other.a6))

    def __hash__(self):
        return hash((self.a1, self.a2, self.a3, self.a4, self.a6))

    def __repr__(self):
        return (f"WeierstrassCurve({self.a1}, {self.a2}, {self.a3}, "
                f"{self.a4}, {self.a6})")

    # -------------------------------------------------- points and group law

    def contains(self, P: "Point") -> bool:
        if P.is_infinity:
            return True
        x, y = P.x, P.y
        return (y * y + self.a1 * x * y + self.a3 * y
                == x**3 + self.a2 * x * x + self.a4 * x + self.a6)

    def neg(self, P: "Point") -> "Point":
        if P.is_infinity:
            return P
        return Point(P.x, -P.y - self.a1 * P.x - self.a3)

    def add(self, P: "Point", Q: "Point") -> "Point":
        if not (self.contains(P) and self.contains(Q)):
            raise ValueError("points not on the curve")
        return self._add_unchecked(P, Q)

    def _add_unchecked(self, P, Q):
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
        if x1 == x2:
            if y1 + y2 + a1 * x2 + a3 == 0:
                return Point.infinity()
            # same point: tangent slope
            den = 2 * y1 + a1 * x1 + a3
            lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / den
            nu = (-(x1**3) + a4 * x1 + 2 * a6 - a3 * y1) / den
        else:
            lam = (y2 - y1) / (x2 - x1)
            nu = (y1 * x2 - y2 * x1) / (x2 - x1)
        x3 = lam * lam + a1 * lam - a2 - x1 - x2
        y3 = -(lam + a1) * x3 - nu - a3
        return Point(x3, y3)

    def mul(self, n: int, P: "Point") -> "Point":
        if not self.contains(P):
            raise ValueError("point not on the curve")
        if n < 0:
            n, P = -n, self.neg(P)
        acc = Point.infinity()
        base = P
        while n:
            if n & 1:
                acc = self._add_unchecked(acc, base)
            base = self._add_unchecked(base, base)
            n >>= 1
        return acc

    def point_order(self, P: "Point", cap: int = 16) -> int | None:
        """Smallest n <= cap with nP = infinity, else None."""
        acc = P
        for n in range(1, cap + 1):
            if acc.is_infinity:
                return n
            acc = self._add_unchecked(acc, P)
        return None


class Point:
    """A rational point: infinity or exact affine coordinates."""

    __slots__ = ("is_infinity", "x", "y")

    def __init__(self, x, y):
        object.__setattr__(self, "is_infinity", False)
        object.__setattr__(self, "x", Fraction(x))
        object.__setattr__(self, "y", Fraction(y))

    @classmethod
    def infinity(cls) -> "Point":
        P = object.__new__(cls)
        object.__setattr__(P, "is_infinity", True)
        object.__setattr__(P, "x", None)
        object.__setattr__(P, "y", None)
        return P

    def __setattr__(self, *a):
        raise AttributeError("points are immutable")

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.is_infinity, self.x, self.y))

    def __repr__(self):
        return "Point(infinity)" if self.is_infinity else f"Point({self.x}, {self.y})"


def invariants(E: WeierstrassCurve) -> tuple:
    """(b2, b4, b6, b8, c4, c6, disc, j)."""
    return (E.b2, E.b4, E.b6, E.b8, E.c4, E.c6, E.disc, E.j)


def add(E, P, Q):
    return E.add(P, Q)


def mul(E, n, P):
    return E.mul(n, P)


# ------------------------------- text format -------------------------------


def curve_from_text(line: str) -> WeierstrassCurve:
    """Parse `a1 a2 a3 a4 a6`, space separated, p/q allowed."""
    parts = line.split()
    if len(parts) != 5:
        raise ValueError("curve line must have exactly five entries")
    return WeierstrassCurve(*[Fraction(s) for s in parts])


def curve_to_text(E: WeierstrassCurve) -> str:
    return " ".join(str(v) for v in (E.a1, E.a2, E.a3, E.a4, E.a6))


# ------------------------------ reduction mod p ----------------------------


class CurveModP:
    """Good reduction of a curve at p: residues of a1..a6 with disc != 0."""

    __slots__ = ("p", "a1", "a2", "a3", "a4", "a6", "b2", "b4", "b6", "b8")

    def __init__(self, p, a1, a2, a3, a4, a6):
        if not is_probable_prime(p):
            raise ValueError(f"{p} is not prime")
        a1, a2, a3, a4, a6 = (v % p for v in (a1, a2, a3, a4, a6))
        b2 = (a1 * a1 + 4 * a2) % p
        b4 = (2 * a4 + a1 * a3) % p
        b6 = (a3 * a3 + 4 * a6) % p
        b8 = (a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4
              + a2 * a3 * a3 - a4 * a4) % p
        disc = (-b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6) % p
        if disc == 0:
            raise BadReduction(f"discriminant vanishes mod {p}")
        for name, val in (("p", p), ("a1", a1), ("a2", a2), ("a3", a3),
                          ("a4", a4), ("a6", a6), ("b2", b2), ("b4", b4),
                          ("b6", b6), ("b8", b8)):
            object.__setattr__(self, name, val)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def contains(self, x: int, y: int) -> bool:
        p = self.p
        return ((y * y + self.a1 * x * y + self.a3 * y
                 - x**3 - self.a2 * x * x - self.a4 * x - self.a6) % p == 0)

    def affine_points(self) -> list[tuple[int, int]]:
        """Plain double loop; only sensible for small p (test oracle, p=2)."""
        return [(x, y) for x in range(self.p) for y in range(self.p)
                if self.contains(x, y)]

    def __repr__(self):
        return (f"CurveModP(p={self.p}, [{self.a1}, {self.a2}, {self.a3}, "
                f"{self.a4}, {self.a6}])")


def reduce_mod_p(E: WeierstrassCurve, p: int) -> CurveModP:
    res = []
    for v in (E.a1, E.a2, E.a3, E.a4, E.a6):
        if v.denominator % p == 0:
            raise DenominatorDivisibleByP(f"coefficient {v} not p-integral at {p}")
        res.append(v.numerator * pow(v.denominator, -1, p) % p)
    return CurveModP(p, *res)


_CHI_TABLES: dict[int, bytes] = {}
_CHI_LOCK = threading.Lock()


def _chi_table(p: int) -> bytes:
    """chi[v] = 1 + legendre(v|p), i.e. the number of square roots of v
    mod p.  Read-mostly cache, safe for concurrent readers."""
    table = _CHI_TABLES.get(p)
    if table is None:
        counts = bytearray(p)
        for v in range(p):
            counts[(v * v) % p] += 1
        table = bytes(counts)
        with _CHI_LOCK:
            _CHI_TABLES.setdefault(p, table)
    return table


def count_points(Em: CurveModP) -> int:
    """#E(F_p) including infinity.

    For odd p, complete the square: (2y + a1·x + a3)² = 4x³ + b2·x² +
    2b4·x + b6, so the fiber over x has 1 + chi(B(x)) points.  p = 2 is a
    direct enumeration of the four affine candidates.
    """
    p = Em.p
    if p == 2:
        return 1 + len(Em.affine_points())
    chi = _chi_table(p)
    b2, b4, b6 = Em.b2, Em.b4, Em.b6
    total = 1
    for x in range(p):
        total += chi[(4 * x**3 + b2 * x * x + 2 * b4 * x + b6) % p]
    return total


def good_primes(E: WeierstrassCurve, bound: int, *, odd_only: bool = False):
    """Primes p < bound of good reduction (denominators included)."""
    out = []
    for p in primes_below(bound):
        if odd_only and p == 2:
            continue
        try:
            reduce_mod_p(E, p)
        except (BadReduction, DenominatorDivisibleByP):
            continue
        out.append(p)
    return out


def reduce_point_mod_p(P: Point, p: int) -> tuple[int, int] | None:
    """Image of P in E(F_p); None encodes the point at infinity."""
    if P.is_infinity:
        return None
    if P.x.denominator % p == 0 or P.y.denominator % p == 0:
        return None
    return (P.x.numerator * pow(P.x.denominator, -1, p) % p,
            P.y.numerator * pow(P.y.denominator, -1, p) % p)


# ------------------------------ torsion -----------------------------------


@dataclass(frozen=True)
class TorsionGroup:
    shape: str
    generators: tuple[Point, ...]
    generator_orders: tuple[int, ...]
    order: int
    points: tuple[Point, ...]


def _division_x_polys(E: WeierstrassCurve, m_max: int) -> dict[int, Poly]:
    """x-parts h_m of the division polynomials, with the parity-tracked
    factor of psi_2 removed: psi_m = h_m(x) * psi_2^(m even), where
    psi_2² = B = 4x³ + b2·x² + 2b4·x + b6."""
    b2, b4, b6, b8 = E.b2, E.b4, E.b6, E.b8
    B = Poly.of(b6, 2 * b4, b2, 4)
    B2 = B * B
    h = {
        0: Poly(),
        1: Poly.of(1),
        2: Poly.of(1),
        3: Poly.of(b8, 3 * b6, 3 * b4, b2, 3),
        4: Poly.of(b4 * b8 - b6 * b6, b2 * b8 - b4 * b6, 10 * b8, 10 * b6,
                   5 * b4, b2, 2),
    }
    for m in range(5, m_max + 1):
        if m % 2 == 0:
            k = m // 2
            h[m] = h[k] * (h[k + 2] * h[k - 1] ** 2 - h[k - 2] * h[k + 1] ** 2)
        else:
            k = (m - 1) // 2
            if k % 2 == 1:
                h[m] = h[k + 2] * h[k] ** 3 - B2 * h[k - 1] * h[k + 1] ** 3
            else:
                h[m] = B2 * h[k + 2] * h[k] ** 3 - h[k - 1] * h[k + 1] ** 3
    return h


def torsion_x_poly(E: WeierstrassCurve, m: int) -> Poly:
    """Polynomial whose rational roots are the x-coordinates of the affine
    points of order dividing m."""
    if m < 2:
        raise ValueError("need m >= 2")
    h = _division_x_polys(E, m)
    B = Poly.of(E.b6, 2 * E.b4, E.b2, 4)
    return h[m] * B if m % 2 == 0 else h[m]


def _points_with_x(E: WeierstrassCurve, x: Fraction) -> list[Point]:
    """Rational points of E over x: solve the quadratic in y exactly."""
    L = E.a1 * x + E.a3
    M = x**3 + E.a2 * x * x + E.a4 * x + E.a6
    # y² + L y − M = 0
    disc = L * L + 4 * M
    if disc < 0:
        return []
    rn, rd = math.isqrt(disc.numerator), math.isqrt(disc.denominator)
    if rn * rn != disc.numerator or rd * rd != disc.denominator:
        return []
    s = Fraction(rn, rd)
    ys = {(-L + s) / 2, (-L - s) / 2}
    return [Point(x, y) for y in ys]


def _group_closure(E: WeierstrassCurve, pts: list[Point]) -> set[Point]:
    group = {Point.infinity()}
    frontier = list(pts)
    while frontier:
        q = frontier.pop()
        if q in group:
            continue
        group.add(q)
        frontier.extend(E._add_unchecked(q, g) for g in list(group))
    return group


def torsion_subgroup(E: WeierstrassCurve) -> TorsionGroup:
    """Full rational torsion subgroup with verified generators.

    The order is first bounded by gcd(N_p) over at least 20 good odd primes
    (reduction is injective on torsion at odd good primes), then candidate
    orders are resolved through division-polynomial root finding.
    """
    limit = 1000
    primes = good_primes(E, limit, odd_only=True)
    while len(primes) < 20:
        limit *= 2  # pathological model with tiny good-prime supply below 1000
        primes = good_primes(E, limit, odd_only=True)
    bound = 0
    for p in primes[:25]:
        bound = math.gcd(bound, count_points(reduce_mod_p(E, p)))
    found: list[Point] = []
    for q in (2, 3, 4, 5, 7, 8, 9):
        if bound % q:
            continue
        for x in rational_poly_roots(torsion_x_poly(E, q)):
            for P in _points_with_x(E, x):
                if E.point_order(P) is not None:
                    found.append(P)
    group = _group_closure(E, found)
    n = len(group)
    orders = {P: E.point_order(P) for P in group}
    two_torsion = sum(1 for P in group if orders[P] in (1, 2))
    if two_torsion == 4:
        half = n // 2
        g = next(P for P in group if orders[P] == half)
        sub = {E.mul(k, g) for k in range(half)}
        h2 = next(P for P in group if orders[P] == 2 and P not in sub)
        shape = f"Z/2Z x Z/{half}Z"
        gens, gorders = (h2, g), (2, half)
    else:
        g = next(P for P in group if orders[P] == n)
        shape = f"Z/{n}Z"
        gens, gorders = ((g,), (n,)) if n > 1 else ((), ())
    _assert_mazur(shape, n)
    for P, o in zip(gens, gorders):
        assert E.point_order(P) == o
    return TorsionGroup(shape=shape, generators=tuple(gens),
                        generator_orders=tuple(gorders), order=n,
                        points=tuple(sorted(group, key=_point_key)))


def _point_key(P: Point):
    return (0,) if P.is_infinity else (1, P.x, P.y)


def _assert_mazur(shape: str, n: int):
    cyclic = {f"Z/{k}Z" for k in list(range(1, 11)) + [12]}
    split = {f"Z/2Z x Z/{2 * k}Z" for k in range(1, 5)}
    if shape not in cyclic | split:
        raise AssertionError(f"torsion shape {shape} (order {n}) outside Mazur's list")


# --------------------- plane cubics and Nagell's algorithm -----------------

# monomial order for ternary cubics: exponents of (X, Y, Z)
CUBIC_MONOMIALS = ((3, 0, 0), (2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 1, 1),
                   (1, 0, 2), (0, 3, 0), (0, 2, 1), (0, 1, 2), (0, 0, 3))


class TernaryCubic:
    """Homogeneous cubic form in (X, Y, Z) with rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        clean = {}
        for key, val in coeffs.items():
            key = tuple(key)
            if key not in CUBIC_MONOMIALS:
                raise ValueError(f"not a cubic monomial: {key}")
            val = Fraction(val)
            if val:
                clean[key] = val
        if not clean:
            raise ValueError("zero form")
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    @staticmethod
    def from_vector(vec) -> "TernaryCubic":
        """Ten coefficients in CUBIC_MONOMIALS order."""
        if len(vec) != 10:
            raise ValueError("need 10 coefficients")
        return TernaryCubic({m: v for m, v in zip(CUBIC_MONOMIALS, vec)})

    def vector(self) -> list[Fraction]:
        return [self.coeffs.get(m, F0) for m in CUBIC_MONOMIALS]

    def __eq__(self, other):
        return isinstance(other, TernaryCubic) and self.coeffs == other.coeffs

    def evaluate(self, x, y, z):
        acc = 0
        for (i, j, k), c in self.coeffs.items():
            acc = acc + c * x**i * y**j * z**k
        return acc

    def gradient(self, pt) -> list[Fraction]:
        x, y, z = pt
        out = [F0, F0, F0]
        for (i, j, k), c in self.coeffs.items():
            if i:
                out[0] += c * i * x ** (i - 1) * y**j * z**k
            if j:
                out[1] += c * j * x**i * y ** (j - 1) * z**k
            if k:
                out[2] += c * k * x**i * y**j * z ** (k - 1)
        return out

    def linear_transform(self, N) -> "TernaryCubic":
        """The form C(N·w): substitute each coordinate by a linear form."""
        rows = [[Fraction(N[i][j]) for j in range(3)] for i in range(3)]
        out: dict[tuple, Fraction] = {}

        def mono_mul(d1, d2):
            prod = {}
            for e1, c1 in d1.items():
                for e2, c2 in d2.items():
                    e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                    prod[e] = prod.get(e, F0) + c1 * c2
            return prod

        lin = [{(1, 0, 0): rows[i][0], (0, 1, 0): rows[i][1],
                (0, 0, 1): rows[i][2]} for i in range(3)]
        for (i, j, k), c in self.coeffs.items():
            term = {(0, 0, 0): c}
            for _ in range(i):
                term = mono_mul(term, lin[0])
            for _ in range(j):
                term = mono_mul(term, lin[1])
            for _ in range(k):
                term = mono_mul(term, lin[2])
            for e, v in term.items():
                out[e] = out.get(e, F0) + v
        return TernaryCubic({e: v for e, v in out.items() if v})

    def __repr__(self):
        names = []
        for (i, j, k), c in sorted(self.coeffs.items(), reverse=True):
            mono = "".join(s * e for s, e in zip("XYZ", (i, j, k)))
            names.append(f"{c}*{mono}")
        return "TernaryCubic(" + " + ".join(names) + ")"


def _normalize_projective(pt) -> tuple[int, int, int]:
    fr = [Fraction(v) for v in pt]
    if not any(fr):
        raise ValueError("(0:0:0) is not a projective point")
    den = 1
    for v in fr:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in fr]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    ints = [v // g for v in ints]
    # fix sign of the last nonzero coordinate
    for v in reversed(ints):
        if v:
            if v < 0:
                ints = [-w for w in ints]
            break
    return tuple(ints)


class _FieldElt:
    """Element c0 + c1·Y of Q(X)[Y] / (Y² + L·Y − M): the function field of
    a Weierstrass curve, used for symbolic verification of Nagell maps."""

    __slots__ = ("L", "M", "c0", "c1")

    def __init__(self, L: RatFunc, M: RatFunc, c0, c1=None):
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "c0", self._as_rf(c0))
        object.__setattr__(self, "c1", self._as_rf(0 if c1 is None else c1))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    @staticmethod
    def _as_rf(v) -> RatFunc:
        if isinstance(v, RatFunc):
            return v
        if isinstance(v, Poly):
            return RatFunc(v)
        return RatFunc(Poly([Fraction(v)]))

    def _wrap(self, c0, c1):
        return _FieldElt(self.L, self.M, c0, c1)

    def _coerce(self, other):
        if isinstance(other, _FieldElt):
            return other
        if isinstance(other, (RatFunc, Poly, Fraction, int)):
            return self._wrap(self._as_rf(other), RatFunc(Poly()))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self._wrap(self.c0 + o.c0, self.c1 + o.c1)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.c0, -self.c1)

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        # (c0 + c1 Y)(d0 + d1 Y) with Y² = M − L·Y
        yy = self.c1 * o.c1
        c0 = self.c0 * o.c0 + yy * RatFunc(self.M.num, self.M.den)
        c1 = self.c0 * o.c1 + self.c1 * o.c0 - yy * RatFunc(self.L.num, self.L.den)
        return self._wrap(c0, c1)

    __rmul__ = __mul__

    def conj(self):
        L = RatFunc(self.L.num, self.L.den)
        return self._wrap(self.c0 - self.c1 * L, -self.c1)

    def norm(self) -> RatFunc:
        L = RatFunc(self.L.num, self.L.den)
        M = RatFunc(self.M.num, self.M.den)
        return self.c0 * self.c0 - self.c0 * self.c1 * L - self.c1 * self.c1 * M

    def inverse(self):
        n = self.norm()
        if not n:
            raise ZeroDivisionError("non-invertible element")
        cj = self.conj()
        inv = 1 / n
        return self._wrap(cj.c0 * inv, cj.c1 * inv)

    def __truediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        acc = self._wrap(RatFunc(Poly.of(1)), RatFunc(Poly()))
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def __eq__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else (self.c0 == o.c0 and self.c1 == o.c1)

    def __bool__(self):
        return bool(self.c0) or bool(self.c1)


@dataclass(frozen=True)
class NagellMaps:
    """Birational maps attached to a Nagell reduction.

    forward: projective (x:y:z) on the cubic -> Point on the curve
    backward: Point -> primitive integer projective triple on the cubic
    Exceptional inputs (the handful of points where a denominator of the
    rational map vanishes) raise ZeroDivisionError.
    """

    forward: Callable
    backward: Callable
    base_point: tuple[int, int, int]


def _weierstrass_shaped(cubic: TernaryCubic):
    """Detect C = lambda * (Y²Z + a1·XYZ + a3·YZ² − X³ − a2·X²Z − a4·XZ² − a6·Z³)."""
    c = cubic.coeffs
    lam = c.get((0, 2, 1), F0)
    if not lam:
        return None
    if c.get((0, 3, 0)) or c.get((1, 2, 0)) or c.get((2, 1, 0)):
        return None
    if c.get((3, 0, 0), F0) != -lam:
        return None
    try:
        return WeierstrassCurve(c.get((1, 1, 1), F0) / lam,
                                -c.get((2, 0, 1), F0) / lam,
                                c.get((0, 1, 2), F0) / lam,
                                -c.get((1, 0, 2), F0) / lam,
                                -c.get((0, 0, 3), F0) / lam)
    except ValueError:
        return None


def nagell_cubic_to_weierstrass(cubic: TernaryCubic, pt) -> tuple[WeierstrassCurve, NagellMaps]:
    """Birational map from a plane cubic with marked smooth rational point
    onto a Weierstrass model sending the point to infinity.

    Classical Nagell reduction: move P to the origin, project from P
    (y = t·x), complete the square of the residual conic to get u² =
    quartic(t), then reduce the quartic (tangent-slope shift in the
    generic case, inversion when P is a flex).  The backward map is
    verified symbolically in the function field of the resulting curve
    before anything is returned.
    """
    P = _normalize_projective(pt)
    if cubic.evaluate(*P) != 0:
        raise ValueError("marked point is not on the cubic")
    if not any(cubic.gradient(P)):
        raise SingularPoint(f"cubic is singular at {P}")

    direct = _weierstrass_shaped(cubic)
    if direct is not None and P == (0, 1, 0):
        def forward(v):
            x, y, z = (Fraction(t) for t in v)
            if z == 0:
                return Point.infinity()
            return Point(x / z, y / z)

        def backward(Q: Point):
            if Q.is_infinity:
                return (0, 1, 0)
            return _normalize_projective((Q.x, Q.y, 1))

        return direct, NagellMaps(forward, backward, P)

    # linear change moving P to (0:0:1); unit columns keep it unimodular
    k = next(i for i in range(3) if P[i])
    cols = [e for i, e in enumerate(((1, 0, 0), (0, 1, 0), (0, 0, 1))) if i != k]
    N = [[cols[0][i], cols[1][i], P[i]] for i in range(3)]
    work = cubic.linear_transform(N)

    def chart_parts(w: TernaryCubic):
        f1 = [w.coeffs.get((1, 0, 2), F0), w.coeffs.get((0, 1, 2), F0)]
        f2 = [w.coeffs.get((2, 0, 1), F0), w.coeffs.get((1, 1, 1), F0),
              w.coeffs.get((0, 2, 1), F0)]
        f3 = [w.coeffs.get((3, 0, 0), F0), w.coeffs.get((2, 1, 0), F0),
              w.coeffs.get((1, 2, 0), F0), w.coeffs.get((0, 3, 0), F0)]
        return f1, f2, f3

    f1, f2, f3 = chart_parts(work)
    if not any(f1):
        raise SingularPoint("marked point is singular in the working chart")
    if f1[1] == 0:
        # vertical tangent: swap the chart coordinates
        swap = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
        N = [[sum(N[i][m] * swap[m][j] for m in range(3)) for j in range(3)]
             for i in range(3)]
        work = cubic.linear_transform(N)
        f1, f2, f3 = chart_parts(work)
    if not any(f3):
        raise ReducibleCubic("chart line at infinity is a component")

    alpha, beta = f1
    phi1 = Poly.of(alpha, beta)
    phi2 = Poly.of(*f2)
    phi3 = Poly.of(*f3)
    t0 = -alpha / beta
    e_quartic = phi2 * phi2 - 4 * phi1 * phi3
    if not e_quartic:
        raise ReducibleCubic("discriminant quartic vanishes identically")
    # A square discriminant means the residual intersection splits into two
    # rational branches, i.e. the cubic contains a line away from the point.
    if poly_sqrt(e_quartic) is not None:
        raise ReducibleCubic("cubic splits off a line component")
    q = e_quartic.shift(t0)
    e0 = phi2(t0)

    if e0 != 0:
        u1 = q[1] / (2 * e0)
        u2 = (q[2] - u1 * u1) / (2 * e0)
        r = q[3] - 2 * u1 * u2
        w = q[4] - u2 * u2
        c = 2 * e0
        E = WeierstrassCurve(2 * u1, -2 * u2 * c, r * c, -w * c * c, 0)
        U = Poly.of(e0, u1, u2)
        flex = False
    else:
        q1 = q[1]
        if q1 == 0:
            raise ReducibleCubic("tangent line at the marked point is a component")
        E = WeierstrassCurve(0, q[2], 0, q1 * q[3], q1 * q1 * q[4])
        flex = True

    Ninv_rows = _invert3(N)

    def chart_forward(x, y):
        """(x, y) in the working chart, not the origin -> Weierstrass point."""
        t = y / x
        s = t - t0
        u = 2 * phi3(t) * x + phi2(t)
        if flex:
            sigma = 1 / s
            return Point(q1 * sigma, q1 * u * sigma * sigma)
        if s != 0:
            xt = (u + U(s)) / (s * s)
            yt = xt / s
        else:
            den = u - U(s)
            yt = (r + w * s) / den
            xt = s * yt
        return Point(c * xt, c * c * yt)

    def forward(v):
        vf = [Fraction(t) for t in v]
        if cubic.evaluate(*vf) != 0:
            raise ValueError("point not on the cubic")
        wv = [sum(Ninv_rows[i][j] * vf[j] for j in range(3)) for i in range(3)]
        if wv[2] == 0:
            raise ZeroDivisionError("point on the exceptional chart line")
        x, y = wv[0] / wv[2], wv[1] / wv[2]
        if x == 0 and y == 0:
            return Point.infinity()
        if x == 0:
            raise ZeroDivisionError("point on the vertical line through the base point")
        return chart_forward(x, y)

    def chart_backward(X, Y):
        if flex:
            if X == 0:
                raise ZeroDivisionError("exceptional point")
            sigma = X / q1
            s = 1 / sigma
            u = Y / (q1 * sigma * sigma)
        else:
            if Y == 0:
                raise ZeroDivisionError("exceptional point")
            xt = X / c
            yt = Y / (c * c)
            s = xt / yt
            u = xt * s * s - U(s)
        t = t0 + s
        p3 = phi3(t)
        if p3 == 0:
            raise ZeroDivisionError("exceptional slope")
        x = (u - phi2(t)) / (2 * p3)
        y = t * x
        return x, y

    def backward(Q: Point):
        if Q.is_infinity:
            return P
        x, y = chart_backward(Q.x, Q.y)
        v = [N[i][0] * x + N[i][1] * y + N[i][2] for i in range(3)]
        return _normalize_projective(v)

    _verify_nagell_symbolically(cubic, E, N, phi2, phi3, t0, flex,
                                (q, ) if flex else (U, Fraction(2) * e0))
    return E, NagellMaps(forward, backward, P)


def _invert3(N):
    from ._linalg import rref

    aug = [[Fraction(N[i][j]) for j in range(3)]
           + [Fraction(1 if i == j else 0) for j in range(3)] for i in range(3)]
    R, piv = rref(aug)
    if piv != [0, 1, 2]:
        raise ValueError("transform not invertible")
    return [row[3:] for row in R]


def _verify_nagell_symbolically(cubic, E, N, phi2, phi3, t0, flex, data):
    """Substitute the backward map into the original cubic inside the
    function field Q(X)[Y]/(Y² + L·Y − M) and require exact vanishing;
    then push the result through the forward map and require the identity.
    Together these certify the birational correspondence away from the
    finitely many exceptional points."""
    L = RatFunc(Poly.of(E.a3, E.a1))
    M = RatFunc(Poly.of(E.a6, E.a4, E.a2, 1))
    X = _FieldElt(L, M, RatFunc(Poly.x()))
    Y = _FieldElt(L, M, RatFunc(Poly()), RatFunc(Poly.of(1)))
    if flex:
        (q,) = data
        q1 = q[1]
        sigma = X / q1
        s = 1 / sigma
        u = Y / (q1 * sigma * sigma)
    else:
        U, c = data
        xt = X / c
        yt = Y / (c * c)
        s = xt / yt
        u = xt * s * s - U(s)
    t = s + t0
    x = (u - phi2(t)) / (2 * phi3(t))
    y = t * x
    v = [N[i][0] * x + N[i][1] * y + N[i][2] for i in range(3)]
    if cubic.evaluate(*v):
        raise AssertionError("backward map fails symbolic substitution")
    # forward(backward(X, Y)) must reproduce (X, Y)
    tf = y / x
    sf = tf - t0
    uf = 2 * phi3(tf) * x + phi2(tf)
    if flex:
        sig = 1 / sf
        Xf, Yf = q1 * sig, q1 * uf * sig * sig
    else:
        xtf = (uf + U(sf)) / (sf * sf)
        Xf, Yf = c * xtf, c * c * (xtf / sf)
    if Xf != X or Yf != Y:
        raise AssertionError("forward∘backward is not the identity")
