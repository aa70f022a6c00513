"""Polynomial, rational function, and series-at-infinity tests.

Expected values here were computed independently of the library code:
divisions by hand (synthetic division), series coefficients by a separate
binomial-convolution expansion written below in this file.
"""

import math
import random
from fractions import Fraction

import pytest

from hirank.arith import (
    Poly,
    PolyModP,
    RatFunc,
    poly_gcd,
    poly_sqrt,
    poly_xgcd,
    series_cube_root,
    series_sqrt_principal,
)

F = Fraction


def rand_poly(rng, deg, den_bound=6):
    return Poly([F(rng.randint(-9, 9), rng.randint(1, den_bound))
                 for _ in range(deg + 1)])


class TestPolyBasics:
    def test_trim_and_degree(self):
        assert Poly.of(0, 0, 0).degree == -1
        assert Poly.of(5).degree == 0
        assert Poly.of(1, 2, 0, 0).degree == 1
        assert not Poly()
        assert Poly.of(3)

    def test_divrem_hand_example(self):
        # synthetic division: (X^3 + 2X + 5) / (X - 1) = X^2 + X + 3 rem 8
        f = Poly.of(5, 2, 0, 1)
        g = Poly.of(-1, 1)
        q, r = f.divrem(g)
        assert q == Poly.of(3, 1, 1)
        assert r == Poly.of(8)

    def test_eval_and_compose(self):
        f = Poly.of(1, -2, 1)  # (X-1)^2
        assert f(F(3)) == 4
        assert f.compose(Poly.of(1, 1)) == Poly.of(0, 0, 1)
        assert f.shift(F(1)) == Poly.of(0, 0, 1)

    def test_derivative(self):
        assert Poly.of(7, 0, 3, 2).derivative() == Poly.of(0, 6, 6)

    def test_content_primitive(self):
        c, g = Poly.of(F(4, 3), F(2, 3), 2).content_and_primitive()
        assert c == F(2, 3)
        assert g == Poly.of(2, 1, 3)
        assert c * g == Poly.of(F(4, 3), F(2, 3), 2)

    def test_immutability(self):
        f = Poly.of(1, 2)
        with pytest.raises(AttributeError):
            f.coeffs = ()


class TestPolyRingProperties:
    def test_ring_axioms_randomized(self):
        rng = random.Random(90125)
        for _ in range(300):
            f = rand_poly(rng, rng.randint(0, 8))
            g = rand_poly(rng, rng.randint(0, 8))
            h = rand_poly(rng, rng.randint(0, 8))
            assert (f + g) * h == f * h + g * h
            assert f * g == g * f
            assert (f * g) * h == f * (g * h)
            assert f - f == Poly()

    def test_divrem_recombines(self):
        rng = random.Random(5150)
        for _ in range(200):
            f = rand_poly(rng, rng.randint(0, 10))
            g = rand_poly(rng, rng.randint(0, 6))
            if not g:
                continue
            q, r = f.divrem(g)
            assert q * g + r == f
            assert r.degree < g.degree

    def test_pow_matches_repeated_mul(self):
        f = Poly.of(F(1, 2), 1, -3)
        acc = Poly.of(1)
        for e in range(6):
            assert f**e == acc
            acc = acc * f

    def test_gcd_divides_both(self):
        rng = random.Random(2112)
        for _ in range(100):
            d = rand_poly(rng, rng.randint(0, 3))
            a = d * rand_poly(rng, rng.randint(0, 4))
            b = d * rand_poly(rng, rng.randint(0, 4))
            if not a or not b:
                continue
            g = poly_gcd(a, b)
            assert g.is_monic()
            assert a % g == Poly()
            assert b % g == Poly()
            if d.degree >= 0:
                assert g.degree >= d.degree

    def test_xgcd_identity(self):
        rng = random.Random(777)
        for _ in range(100):
            a = rand_poly(rng, rng.randint(0, 6))
            b = rand_poly(rng, rng.randint(0, 6))
            if not a and not b:
                continue
            d, u, v = poly_xgcd(a, b)
            assert u * a + v * b == d
            assert d == poly_gcd(a, b)


class TestPolyModP:
    def test_roots_scan(self):
        # X^2 + 1 mod 13: 5^2 = 25 = -1, 8 = -5
        f = PolyModP(13, [1, 0, 1])
        assert f.roots() == [5, 8]

    def test_gcd(self):
        f = PolyModP(7, [-1, 0, 1])   # X^2 - 1
        g = PolyModP(7, [-2, 1, 1])   # (X-1)(X+2)
        assert f.gcd(g) == PolyModP(7, [-1, 1])

    def test_from_poly_rejects_bad_denominator(self):
        with pytest.raises(ZeroDivisionError):
            PolyModP.from_poly(Poly.of(F(1, 5)), 5)
        g = PolyModP.from_poly(Poly.of(F(1, 2), 3), 5)
        assert g.coeffs == (3, 3)

    def test_divrem(self):
        f = PolyModP(11, [5, 2, 0, 1])
        g = PolyModP(11, [10, 1])  # X - 1
        q, r = f.divrem(g)
        assert q * g + r == f
        assert r.coeffs == (8,)


# ---------------- independent series oracle (binomial expansion) ----------


def naive_mul(a, b, order):
    out = [F(0)] * (order + 1)
    for i in range(min(len(a), order + 1)):
        for j in range(min(len(b), order + 1 - i)):
            out[i + j] += a[i] * b[j]
    return out


def binomial_root_series(u, r, order):
    """(1+u)^(1/r) = sum_k C(1/r, k) u^k, truncated.  Independent of the
    Newton iteration in the library."""
    alpha = F(1, r)
    g = [F(0)] * (order + 1)
    g[0] = F(1)
    uk = [F(1)]
    coef = F(1)
    for k in range(1, order + 1):
        coef *= (alpha - (k - 1)) / k
        uk = naive_mul(uk, u, order)
        for j in range(order + 1):
            g[j] += coef * (uk[j] if j < len(uk) else F(0))
    return g


class TestSeriesAtInfinity:
    def test_perfect_cube(self):
        # ((X-2)^4)^3: cube root is exactly (X-2)^4, no X^-1 tail
        base = Poly.of(-2, 1) ** 4
        f = base**3
        pp = series_cube_root(f)
        assert pp.R == base
        assert pp.c == 0

    def test_against_binomial_oracle(self):
        # f = prod (X - i), i = 1..12
        f = Poly.of(1)
        for i in range(1, 13):
            f = f * Poly.of(-i, 1)
        pp = series_cube_root(f)
        n, m = 12, 4
        u = [f[n - j] for j in range(m + 2)]
        u[0] = F(0)
        g = binomial_root_series(u, 3, m + 1)
        assert [pp.R[m - j] for j in range(m + 1)] == g[: m + 1]
        assert pp.c == g[m + 1]

    def test_cube_defect_degree_and_leading(self):
        # f - R^3 = 3c X^(2m-1) + lower terms
        rng = random.Random(424242)
        for _ in range(20):
            f = Poly([F(rng.randint(-20, 20)) for _ in range(12)] + [F(1)])
            pp = series_cube_root(f)
            diff = f - pp.R**3
            assert diff.degree <= 7
            if pp.c != 0:
                assert diff.degree == 7
                assert diff[7] == 3 * pp.c

    def test_translation_equivariance(self):
        rng = random.Random(31337)
        a = F(5, 3)
        f = Poly([F(rng.randint(-9, 9)) for _ in range(12)] + [F(1)])
        pp = series_cube_root(f)
        pps = series_cube_root(f.shift(a))
        assert pps.c == pp.c
        assert pps.R == pp.R.shift(a)

    def test_sqrt_principal(self):
        base = Poly.of(3, 2, 1)
        pp = series_sqrt_principal(base**2)
        assert pp.R == base
        assert pp.c == 0

    def test_input_validation(self):
        with pytest.raises(ValueError):
            series_cube_root(Poly.of(0, 1))  # degree not divisible by 3
        with pytest.raises(ValueError):
            series_cube_root(Poly.of(0, 0, 0, 2))  # not monic


class TestPolySqrt:
    def test_recovers_square(self):
        g = Poly.of(1, 3, 1)
        assert poly_sqrt(g * g) == g

    def test_scalar_squares(self):
        g = Poly.of(2, 2) ** 2  # (2X+2)^2
        assert poly_sqrt(g) == Poly.of(2, 2)
        assert poly_sqrt(Poly.of(F(9, 4))) == Poly.of(F(3, 2))

    def test_rejects_non_squares(self):
        assert poly_sqrt(Poly.of(1, 0, 1)) is None      # X^2 + 1
        assert poly_sqrt(Poly.of(0, 0, 2)) is None      # 2 X^2
        assert poly_sqrt(Poly.of(0, 1)) is None         # odd degree
        assert poly_sqrt(-Poly.of(0, 0, 1)) is None     # negative leading

    def test_randomized_roundtrip(self):
        rng = random.Random(60648)
        for _ in range(50):
            g = rand_poly(rng, rng.randint(0, 5))
            if not g:
                continue
            if g.leading() < 0:
                g = -g
            assert poly_sqrt(g * g) == g


class TestRatFunc:
    def test_reduction(self):
        r = RatFunc(Poly.of(-1, 0, 1), Poly.of(-1, 1))  # (X^2-1)/(X-1)
        assert r.is_polynomial()
        assert r.num == Poly.of(1, 1)

    def test_partial_fractions_identity(self):
        one_minus = RatFunc(Poly.of(1), Poly.of(-1, 1))
        one_plus = RatFunc(Poly.of(1), Poly.of(1, 1))
        s = one_minus + one_plus
        assert s == RatFunc(Poly.of(0, 2), Poly.of(-1, 0, 1))

    def test_eval_and_pole(self):
        r = RatFunc(Poly.of(0, 1), Poly.of(-2, 1))  # X/(X-2)
        assert r(F(3)) == 3
        with pytest.raises(ZeroDivisionError):
            r(F(2))

    def test_field_axioms_randomized(self):
        rng = random.Random(8128)
        for _ in range(60):
            a = RatFunc(rand_poly(rng, rng.randint(0, 3)),
                        rand_poly(rng, rng.randint(0, 2)) + Poly.of(0, 0, 0, 1))
            b = RatFunc(rand_poly(rng, rng.randint(0, 3)),
                        rand_poly(rng, rng.randint(0, 2)) + Poly.of(0, 0, 0, 1))
            assert a + b == b + a
            assert a * b == b * a
            assert a - a == RatFunc(Poly())
            if b:
                assert (a / b) * b == a

    def test_monic_denominator_normalization(self):
        r = RatFunc(Poly.of(2), Poly.of(0, 4))
        assert r.den.is_monic()
        assert r == RatFunc(Poly.of(F(1, 2)), Poly.of(0, 1))
