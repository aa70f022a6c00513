"""Elliptic curves over Q(T): marked sections, specialization, the
three-point interpolation, the Mestre quintic construction, and the
pencil of cubics through nine points on the cuspidal cubic Y^2 Z = X^3.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, lcm

from .arith import Poly, RatFunc, poly_sqrt, series_cube_root
from ._linalg import nullspace, rank
from .curves import Point, TernaryCubic, WeierstrassCurve, _normalize_projective


class DegenerateFiber(ValueError):
    """Specialization lands on a root of the discriminant."""


class SectionPole(ValueError):
    pass


class CoincidentX(ValueError):
    pass


class SingularResult(ValueError):
    pass


class QuinticNonzero(ValueError):
    pass


class NonUniqueDecomposition(ValueError):
    pass


class DegenerateConfiguration(ValueError):
    pass


def _as_poly(v) -> Poly:
    if isinstance(v, Poly):
        return v
    if isinstance(v, (list, tuple)):
        return Poly(v)
    return Poly([Fraction(v)])


def _as_ratfunc(v) -> RatFunc:
    if isinstance(v, RatFunc):
        return v
    if isinstance(v, Poly):
        return RatFunc.of_poly(v)
    return RatFunc(Poly([Fraction(v)]))


class CurveFamily:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with a_i in Q[T],
    plus marked sections (X(T), Y(T))."""

    __slots__ = ("a1", "a2", "a3", "a4", "a6", "sections")

    def __init__(self, a1, a2, a3, a4, a6, sections=(), *, check: bool = True):
        coeffs = tuple(_as_poly(v) for v in (a1, a2, a3, a4, a6))
        secs = tuple((_as_ratfunc(X), _as_ratfunc(Y)) for X, Y in sections)
        for name, val in zip(("a1", "a2", "a3", "a4", "a6"), coeffs):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "sections", secs)
        if not self.discriminant():
            raise ValueError("discriminant vanishes identically")
        if check:
            bad = [i for i, ok in enumerate(verify_sections(self)) if not ok]
            if bad:
                raise ValueError(f"sections {bad} do not satisfy the equation")

    def __setattr__(self, *a):
        raise AttributeError("families are immutable")

    def __eq__(self, other):
        return (isinstance(other, CurveFamily)
                and self.coefficients() == other.coefficients()
                and self.sections == other.sections)

    def __hash__(self):
        return hash((self.coefficients(), self.sections))

    def coefficients(self) -> tuple:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def discriminant(self) -> Poly:
        a1, a2, a3, a4, a6 = self.coefficients()
        b2 = a1 * a1 + 4 * a2
        b4 = a1 * a3 + 2 * a4
        b6 = a3 * a3 + 4 * a6
        b8 = (a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4
              + a2 * a3 * a3 - a4 * a4)
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def genus(self) -> int:
        # reported as max ceil(deg a_i / i); 1 = rational, 2 = K3
        best = 0
        for i, a in zip((1, 2, 3, 4, 6), self.coefficients()):
            if a.degree > 0:
                best = max(best, ceil(Fraction(a.degree, i)))
        return best

    def __repr__(self):
        return (f"CurveFamily(a1={self.a1!r}, a2={self.a2!r}, a3={self.a3!r}, "
                f"a4={self.a4!r}, a6={self.a6!r}, {len(self.sections)} sections)")


def verify_sections(fam: CurveFamily) -> list[bool]:
    """Symbolic on-curve check of each section, as pass/fail entries."""
    a1, a2, a3, a4, a6 = (RatFunc.of_poly(a) for a in fam.coefficients())
    out = []
    for X, Y in fam.sections:
        lhs = Y * Y + a1 * X * Y + a3 * Y
        rhs = X**3 + a2 * X * X + a4 * X + a6
        out.append(lhs == rhs)
    return out


def specialize(fam: CurveFamily, t) -> tuple[WeierstrassCurve, list[Point]]:
    """The fiber at t, with every marked section evaluated and re-verified."""
    t = Fraction(t)
    if fam.discriminant()(t) == 0:
        raise DegenerateFiber(f"discriminant vanishes at t = {t}")
    E = WeierstrassCurve(*(a(t) for a in fam.coefficients()))
    pts = []
    for i, (X, Y) in enumerate(fam.sections):
        try:
            P = Point(X(t), Y(t))
        except ZeroDivisionError:
            raise SectionPole(f"section {i} has a pole at t = {t}") from None
        if not E.contains(P):
            raise ValueError(f"section {i} fails on the fiber at t = {t}")
        pts.append(P)
    return E, pts


# ------------------------- three-point interpolation -----------------------


def interpolate3(p1, p2, p3) -> CurveFamily:
    """The unique y^2 = x^3 + a2 x^2 + a4 x + a6 through three affine points
    with distinct x, returned as a constant family carrying the points."""
    pts = [(Fraction(x), Fraction(y)) for x, y in (p1, p2, p3)]
    xs = [x for x, _ in pts]
    if len(set(xs)) < 3:
        raise CoincidentX(f"x-coordinates {xs} are not distinct")
    # Vandermonde solve for (a2, a4, a6)
    A = [[x * x, x, Fraction(1)] for x in xs]
    b = [y * y - x**3 for x, y in pts]
    det = (A[0][0] * (A[1][1] - A[2][1]) - A[0][1] * (A[1][0] - A[2][0])
           + (A[1][0] * A[2][1] - A[2][0] * A[1][1]))
    assert det != 0  # distinct x make the system nonsingular
    from ._linalg import solve
    a2, a4, a6 = solve(A, b)
    try:
        return CurveFamily(0, a2, 0, a4, a6, sections=pts)
    except ValueError as e:
        if "discriminant" in str(e):
            raise SingularResult("interpolated curve is singular") from None
        raise


# ------------------------------ Mestre ------------------------------------


@dataclass(frozen=True)
class Mestre12:
    x: tuple
    R: Poly
    A2: Poly
    A3: Poly


def _prod_linear(xs) -> Poly:
    P = Poly.of(1)
    for xi in xs:
        P = P * Poly([-Fraction(xi), Fraction(1)])
    return P


def mestre_quintic(x) -> Fraction:
    """The obstruction coefficient: the X^(-1) term of the cube-root
    expansion of prod(X - x_i) at infinity. Vanishes exactly when the
    product splits as R^3 + A2 R + A3 with deg A2 <= 2, deg A3 <= 3.

    Only the five leading symmetric functions matter, so this runs the
    cube-root recurrence on a length-6 series instead of the full product
    (grid certifications evaluate this tens of thousands of times).
    """
    xs = [Fraction(v) for v in x]
    if len(xs) != 12:
        raise ValueError("need exactly 12 values")
    # u(t) = prod(1 - x_i t) mod t^6; u_k = (-1)^k e_k
    u = [Fraction(1), Fraction(0), Fraction(0), Fraction(0), Fraction(0), Fraction(0)]
    for xi in xs:
        for k in range(5, 0, -1):
            u[k] -= xi * u[k - 1]
    # v = u^(1/3) mod t^6 by the triangular cube identity v*v*v = u
    v = [Fraction(1)]
    for k in range(1, 6):
        s = Fraction(0)
        for i in range(k + 1):
            for j in range(k + 1 - i):
                l = k - i - j
                if i < k and j < k and l < k:
                    s += v[i] * v[j] * v[l]
        v.append((u[k] - s) / 3)
    return v[5]


def mestre_family(x):
    """Split prod(X - x_i) = R^3 + A2 R + A3 and return the decomposition,
    the plane cubic Y^3 + A2(X) Y + A3(X) = 0, and the 12 points
    (x_i : R(x_i) : 1) on it."""
    xs = tuple(Fraction(v) for v in x)
    if len(xs) != 12:
        raise ValueError("need exactly 12 values")
    if len(set(xs)) != 12:
        raise ValueError("the 12 values must be distinct")
    P = _prod_linear(xs)
    pp = series_cube_root(P)
    if pp.c != 0:
        raise QuinticNonzero(f"quintic obstruction is {pp.c}, not 0")
    R = pp.R
    D = P - R**3
    A2, A3 = D.divrem(R)
    if A2.degree > 2 or A3.degree > 3 or R**3 + A2 * R + A3 != P:
        raise NonUniqueDecomposition("cube-root split failed its own check")
    cubic = TernaryCubic({
        (0, 3, 0): 1,
        (2, 1, 0): A2[2], (1, 1, 1): A2[1], (0, 1, 2): A2[0],
        (3, 0, 0): A3[3], (2, 0, 1): A3[2], (1, 0, 2): A3[1], (0, 0, 3): A3[0],
    })
    marked = [(xi, R(xi), Fraction(1)) for xi in xs]
    for ptx, pty, ptz in marked:
        assert cubic.evaluate(ptx, pty, ptz) == 0
    return Mestre12(xs, R, A2, A3), cubic, marked


# --------------------------- pencil of cubics ------------------------------


GAMMA = TernaryCubic({(0, 2, 1): 1, (3, 0, 0): -1})     # Y^2 Z = X^3


def cusp_param(u) -> tuple:
    """A(u) = (u : 1 : u^3), the smooth-locus parametrization of GAMMA."""
    u = Fraction(u)
    return (u, Fraction(1), u**3)


@dataclass(frozen=True)
class PlaneCubicPencil:
    C0: TernaryCubic
    C1: TernaryCubic
    base_points: tuple

    def member(self, t) -> TernaryCubic:
        t = Fraction(t)
        v0, v1 = self.C0.vector(), self.C1.vector()
        return TernaryCubic.from_vector([a + t * b for a, b in zip(v0, v1)])


def neron_pencil(u) -> PlaneCubicPencil:
    """Pencil of cubics through A(u_1)..A(u_8) and A(u_0), u_0 = -sum u_i.

    Collinearity on GAMMA is u_i + u_j + u_k = 0, so the nine parameters
    summing to zero is what makes the ninth point a base point for free.
    """
    us = [Fraction(v) for v in u]
    if len(us) != 8:
        raise ValueError("need exactly 8 parameters")
    u0 = -sum(us)
    full = [u0] + us
    if any(v == 0 for v in full) or len(set(full)) != 9:
        raise ValueError("parameters (with u0 = -sum) must be nonzero and distinct")
    pts = [_normalize_projective(cusp_param(v)) for v in full]
    from .curves import CUBIC_MONOMIALS
    rows = [[x**i * y**j * z**k for (i, j, k) in CUBIC_MONOMIALS]
            for (x, y, z) in pts]
    ker = nullspace(rows)
    if len(ker) != 2:
        raise DegenerateConfiguration(
            f"linear system through the nine points has dimension {len(ker)}")
    gamma_vec = GAMMA.vector()
    # pick the kernel vector independent of GAMMA as the second generator
    for cand in ker:
        if rank([gamma_vec, list(cand)]) == 2:
            C0 = TernaryCubic.from_vector(cand)
            break
    else:
        raise DegenerateConfiguration("pencil degenerated onto GAMMA")
    if rank([gamma_vec] + [list(v) for v in ker]) != 2:
        raise DegenerateConfiguration("GAMMA is not a member of the pencil")
    base = tuple(tuple(Fraction(c) for c in p) for p in pts)
    for (x, y, z) in base:
        assert C0.evaluate(x, y, z) == 0 and GAMMA.evaluate(x, y, z) == 0
    return PlaneCubicPencil(C0=C0, C1=GAMMA, base_points=base)


def tangent_line(u) -> tuple:
    """Coefficients (a, b, c) of the line a X + b Y + c Z = 0 through A(u)
    meeting GAMMA at parameters {u, -u/2, -u/2} (tangent at A(-u/2))."""
    u = Fraction(u)
    if u == 0:
        raise ValueError("u = 0 is the cusp")
    return (-Fraction(3, 4) * u * u, -u**3 / 4, Fraction(1))


# ------------------------- group law over Q(T) -----------------------------

# A section is (X, Y) with X, Y in Q(T); None is the zero section. The
# chord-tangent formulas are field-agnostic, so this mirrors the group
# law over Q verbatim.


def family_neg(fam: CurveFamily, P):
    if P is None:
        return None
    a1, a3 = RatFunc.of_poly(fam.a1), RatFunc.of_poly(fam.a3)
    X, Y = P
    return (X, -Y - a1 * X - a3)


def family_add(fam: CurveFamily, P, Q):
    if P is None:
        return Q
    if Q is None:
        return P
    a1, a2, a3, a4, a6 = (RatFunc.of_poly(a) for a in fam.coefficients())
    X1, Y1 = P
    X2, Y2 = Q
    if X1 == X2:
        if Y1 + Y2 + a1 * X2 + a3 == 0:
            return None
        den = 2 * Y1 + a1 * X1 + a3
        lam = (3 * X1 * X1 + 2 * a2 * X1 + a4 - a1 * Y1) / den
        nu = (-(X1**3) + a4 * X1 + 2 * a6 - a3 * Y1) / den
    else:
        lam = (Y2 - Y1) / (X2 - X1)
        nu = (Y1 * X2 - Y2 * X1) / (X2 - X1)
    X3 = lam * lam + a1 * lam - a2 - X1 - X2
    Y3 = -(lam + a1) * X3 - nu - a3
    return (X3, Y3)


def family_point_order(fam: CurveFamily, P, cap: int = 16) -> int | None:
    """Smallest n <= cap with nP the zero section, else None."""
    acc = P
    for n in range(1, cap + 1):
        if acc is None:
            return n
        acc = family_add(fam, acc, P)
    return None


def family_mul(fam: CurveFamily, n: int, P):
    if n < 0:
        return family_mul(fam, -n, family_neg(fam, P))
    acc, add = None, P
    while n:
        if n & 1:
            acc = family_add(fam, acc, add)
        n >>= 1
        if n:
            add = family_add(fam, add, add)
    return acc


def section_order(fam: CurveFamily, P, cap: int = 16) -> int | None:
    """Exact order of a section if <= cap, else None.

    Same answer as family_point_order, but cheap on non-torsion sections:
    the degrees of nP grow quadratically in n, so the naive chain is
    useless once X has degree beyond a handful.  If nP is the zero section
    then n P(t0) = O on every nondegenerate fiber, so the order of P(t0)
    divides n; three large probe fibers pin the only candidate, and the
    single confirmation below stays small because multiples of a genuine
    torsion section do not grow.
    """
    if P is None:
        return 1
    probes = []
    t0 = 10007
    attempts = 0
    while len(probes) < 3 and attempts < 60:
        t = Fraction(t0 + 2 * attempts)
        attempts += 1
        try:
            E = WeierstrassCurve(*[a(t) for a in fam.coefficients()])
            pt = Point(P[0](t), P[1](t))
        except (ZeroDivisionError, ValueError):
            continue
        if not E.contains(pt):
            raise ValueError("not a section of this family")
        n = E.point_order(pt, cap)
        if n is None:
            return None
        probes.append(n)
    if len(probes) < 3:
        return family_point_order(fam, P, cap)
    m = lcm(*probes)
    if m > cap:
        return None
    if family_mul(fam, m, P) is None:
        # the fiber orders all divide the true order, so lcm <= order <= m
        return m
    return family_point_order(fam, P, cap)


# ------------------------------ text format --------------------------------


def family_to_text(fam: CurveFamily) -> str:
    lines = []
    for name, a in zip(("a1", "a2", "a3", "a4", "a6"), fam.coefficients()):
        lines.append(f"{name}: " + " ".join(str(c) for c in (a.coeffs or (0,))))
    for X, Y in fam.sections:
        chunks = []
        for f in (X.num, X.den, Y.num, Y.den):
            chunks.append(" ".join(str(c) for c in (f.coeffs or (0,))))
        lines.append("section: " + "|".join(chunks))
    return "\n".join(lines) + "\n"


def family_from_text(text: str) -> CurveFamily:
    coeffs = {}
    sections = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        if key in ("a1", "a2", "a3", "a4", "a6"):
            coeffs[key] = Poly([Fraction(s) for s in rest.split()])
        elif key == "section":
            parts = rest.split("|")
            if len(parts) != 4:
                raise ValueError("section line needs Xnum|Xden|Ynum|Yden")
            fs = [Poly([Fraction(s) for s in p.split()]) for p in parts]
            try:
                sections.append((RatFunc(fs[0], fs[1]), RatFunc(fs[2], fs[3])))
            except ZeroDivisionError:
                raise ValueError("section line has a zero denominator") from None
        else:
            raise ValueError(f"unrecognized line {line!r}")
    missing = {"a1", "a2", "a3", "a4", "a6"} - set(coeffs)
    if missing:
        raise ValueError(f"missing coefficient lines: {sorted(missing)}")
    return CurveFamily(coeffs["a1"], coeffs["a2"], coeffs["a3"], coeffs["a4"],
                       coeffs["a6"], sections)


# --------------------------- section Y recovery ----------------------------


def section_y_from_x(a_polys, X: RatFunc) -> RatFunc:
    """Solve Y^2 + (a1 X + a3) Y = X^3 + a2 X^2 + a4 X + a6 for Y in Q(T).

    The quadratic's discriminant must be a square in Q(T); raises
    ValueError otherwise. Returns the root with the even square-root
    branch (the other root is its conjugate under [-1]).
    """
    a1, a2, a3, a4, a6 = (RatFunc.of_poly(_as_poly(a)) for a in a_polys)
    B = a1 * X + a3
    C = X**3 + a2 * X * X + a4 * X + a6
    disc = B * B + 4 * C
    num, den = disc.num, disc.den
    root_sq = poly_sqrt(num * den)
    if root_sq is None:
        raise ValueError("quadratic in Y has no root in Q(T)")
    sqrt_disc = RatFunc(root_sq, den)
    return (sqrt_disc - B) / 2
