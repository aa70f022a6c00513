"""Built-in fixtures: the record rank-28 curve, the 4-torsion family with
its four independent sections, the Shioda family, the genus-2 sextic with
its known rational points, the Inose lattice configurations, and the three
shipped Niemeier lattices (E8^3, D16+ + E8, A1^24 glued by the Golay code).
"""

from fractions import Fraction
from functools import lru_cache

from .arith import Poly, RatFunc
from .curves import WeierstrassCurve, Point
from .families import CurveFamily, section_y_from_x
from .lattices import (IntLattice, ade_gram, direct_sum, build_glued_lattice,
                       HYPERBOLIC_GRAM)


# ------------------------------ record curve -------------------------------

RANK28_A4 = -20067762415575526585033208209338542750930230312178956502
RANK28_A6 = 34481611795030556467032985690390720374855944359319180361266008296291939448732243429


@lru_cache(maxsize=None)
def rank28_curve() -> WeierstrassCurve:
    """The record curve of rank at least 28: y^2 + xy + y = x^3 - x^2 + a4 x + a6."""
    return WeierstrassCurve(1, -1, 1, RANK28_A4, RANK28_A6)


# --------------------------- 4-torsion family ------------------------------

_T = Poly.x()


def _lin(c0, c1) -> Poly:
    return Poly([Fraction(c0), Fraction(c1)])


@lru_cache(maxsize=None)
def z4_family() -> CurveFamily:
    """Y^2 + aXY + abY = X^3 + bX^2 with (0,0) of order 4 and four
    independent sections whose X-coordinates are quartic products."""
    a = _lin(-1, 8) * _lin(7, 32)                      # (8T-1)(32T+7)
    b = 8 * _lin(1, 1) * _lin(-8, 15) * _lin(-7, 31)   # 8(T+1)(15T-8)(31T-7)
    # a3 = a1*a2 is forced: it is what makes (0,0) a 4-torsion section.
    coeffs = (a, b, a * b, Poly.of(0), Poly.of(0))
    xs = [
        RatFunc(-15 * _lin(1, 1) * _lin(-7, 31) * _lin(7, 32), Poly.of(4)),
        RatFunc(_lin(-1, 8) * _lin(-8, 15) * _lin(-7, 31) * _lin(7, 32)),
        RatFunc(-_lin(1, 1) * _lin(-1, 8) * _lin(-8, 15) * _lin(7, 32)),
        RatFunc(-4 * _lin(1, 1) * _lin(5, 2) * _lin(-8, 15) * _lin(7, 32)),
    ]
    sections = [(X, section_y_from_x(coeffs, X)) for X in xs]
    sections.append((RatFunc(Poly.of(0)), RatFunc(Poly.of(0))))   # the 4-torsion point
    return CurveFamily(*coeffs, sections=sections)


Z4_SPECIAL_T = Fraction(18745, 6321)


@lru_cache(maxsize=None)
def shioda_family(n: int = 6) -> CurveFamily:
    """y^2 = x^3 + T^n + 1 with the rational section (-T^(n/3), 1)."""
    if n % 3 != 0 or n <= 0:
        raise ValueError("n must be a positive multiple of 3")
    sections = [(RatFunc(-Poly.x(n // 3)), RatFunc(Poly.of(1)))]
    return CurveFamily(0, 0, 0, 0, Poly.x(n) + 1, sections=sections)


# --------------------------- genus-2 sextic --------------------------------

# u^2 = 16 t^6 - 19 t^4 + 88 t^2 - 48; all its known rational points
# away from infinity, closed under both sign flips.

SEXTIC = Poly([Fraction(-48), 0, Fraction(88), 0, Fraction(-19), 0, Fraction(16)])

_SEXTIC_BASE = ((Fraction(2), Fraction(32)),
                (Fraction(14, 13), Fraction(2**6 * 251, 13**3)))


def sextic_points() -> list[tuple[Fraction, Fraction]]:
    pts = []
    for t, u in _SEXTIC_BASE:
        for st in (1, -1):
            for su in (1, -1):
                pts.append((st * t, su * u))
    return pts


def on_sextic(t, u) -> bool:
    t, u = Fraction(t), Fraction(u)
    return u * u == SEXTIC(t)


# ------------------------------ Inose lattices -----------------------------


@lru_cache(maxsize=None)
def inose_ns() -> IntLattice:
    """H + (-E8) + (-E8), the rank-18 configuration with essential
    lattice E8^2."""
    E8 = ade_gram("E", 8)
    return direct_sum(IntLattice(HYPERBOLIC_GRAM), E8.negated(), E8.negated())


def inose_fs() -> tuple[tuple, tuple]:
    """The fiber/section pair spanning the hyperbolic block of inose_ns."""
    f = (1, 0) + (0,) * 16
    s = (-1, 1) + (0,) * 16
    return f, s


@lru_cache(maxsize=None)
def d16_plus() -> IntLattice:
    """The even unimodular rank-16 lattice that is not E8 + E8."""
    n = 16
    glue = [Fraction(j + 1, 2) for j in range(n - 2)] + [Fraction(n - 2, 4), Fraction(n, 4)]
    return build_glued_lattice(ade_gram("D", n), [tuple(glue)])


# --------------------------- Golay code and Niemeier -----------------------

_QR23_GEN = (1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 1)   # x^11+x^10+x^6+x^5+x^4+x^2+1, low first


@lru_cache(maxsize=None)
def golay_basis() -> tuple:
    """Twelve generators of the extended binary Golay code [24,12,8]:
    cyclic shifts of the length-23 quadratic-residue generator, each
    extended by a parity bit."""
    rows = []
    for i in range(12):
        word = [0] * 23
        for j, bit in enumerate(_QR23_GEN):
            word[(i + j) % 23] ^= bit
        word.append(sum(word) % 2)
        rows.append(tuple(word))
    return tuple(rows)


@lru_cache(maxsize=None)
def niemeier(label: str) -> IntLattice:
    """One of the three shipped rank-24 even unimodular lattices, keyed by
    root system: "E8^3", "D16+E8", or "A1^24"."""
    E8 = ade_gram("E", 8)
    if label == "E8^3":
        return direct_sum(E8, E8, E8)
    if label == "D16+E8":
        return direct_sum(d16_plus(), E8)
    if label == "A1^24":
        A1_24 = direct_sum(*[ade_gram("A", 1)] * 24)
        glue = [tuple(Fraction(b, 2) for b in word) for word in golay_basis()]
        return build_glued_lattice(A1_24, glue)
    raise KeyError(f"no shipped lattice {label!r}; "
                   "choose E8^3, D16+E8, or A1^24")


NIEMEIER_LABELS = ("E8^3", "D16+E8", "A1^24")
