"""Fixture integrity tests: the rank-28 record curve, the 4-torsion family
with its printed sections, the Shioda family, the sextic with its known
points, the Inose/Niemeier lattice data, and the Golay code.

The Golay weight distribution (759 octads etc.) and the Niemeier root counts
are classical and were recomputed here by exhaustive span enumeration before
freezing.
"""

import random
from collections import Counter
from fractions import Fraction as F

import pytest

from hirank.arith import Poly, RatFunc
from hirank.curves import Point, WeierstrassCurve, invariants, torsion_subgroup
from hirank.families import family_point_order, specialize, verify_sections
from hirank.fixtures import (
    NIEMEIER_LABELS,
    RANK28_A4,
    RANK28_A6,
    SEXTIC,
    Z4_SPECIAL_T,
    d16_plus,
    golay_basis,
    inose_fs,
    inose_ns,
    niemeier,
    on_sextic,
    rank28_curve,
    sextic_points,
    shioda_family,
    z4_family,
)
from hirank.lattices import (
    lattice_invariants,
    mw_group,
    root_decomposition,
)


# ------------------------------ rank-28 curve ------------------------------


def test_rank28_curve_coefficients():
    E = rank28_curve()
    assert (E.a1, E.a2, E.a3) == (1, -1, 1)
    assert E.a4 == RANK28_A4 and E.a6 == RANK28_A6
    assert len(str(-RANK28_A4)) == 56 and len(str(RANK28_A6)) == 83


def test_rank28_curve_invariants():
    b2, b4, b6, b8, c4, c6, disc, j = invariants(rank28_curve())
    assert b2 == -3
    assert b4 == 2 * RANK28_A4 + 1
    assert b6 == 4 * RANK28_A6 + 1
    assert disc > 0 and len(str(disc)) == 166
    # spot checks pin the huge integers without printing them
    assert disc % 9973 == 8681
    assert c4 % 9973 == 791
    assert len(str(j.numerator)) == 169 and len(str(j.denominator)) == 163


def test_rank28_curve_trivial_torsion():
    tor = torsion_subgroup(rank28_curve())
    assert tor.order == 1 and tor.shape == "Z/1Z"


# ---------------------------- 4-torsion family -----------------------------


def test_z4_family_coefficients():
    fam = z4_family()
    a = Poly([F(-7), F(24), F(256)])            # (8T-1)(32T+7)
    b = 8 * Poly([F(1), F(1)]) * Poly([F(-8), F(15)]) * Poly([F(-7), F(31)])
    assert fam.a1 == a and fam.a2 == b and fam.a3 == a * b
    assert not fam.a4 and not fam.a6
    assert fam.genus() == 2


def test_z4_family_sections_verify():
    fam = z4_family()
    assert len(fam.sections) == 5
    assert verify_sections(fam) == [True] * 5
    # printed X-coordinates, in the printed order
    t1 = Poly([F(1), F(1)])
    want = [
        RatFunc(-15 * t1 * Poly([F(-7), F(31)]) * Poly([F(7), F(32)]), Poly.of(4)),
        RatFunc(Poly([F(-1), F(8)]) * Poly([F(-8), F(15)])
                * Poly([F(-7), F(31)]) * Poly([F(7), F(32)])),
        RatFunc(-t1 * Poly([F(-1), F(8)]) * Poly([F(-8), F(15)]) * Poly([F(7), F(32)])),
        RatFunc(-4 * t1 * Poly([F(5), F(2)]) * Poly([F(-8), F(15)]) * Poly([F(7), F(32)])),
    ]
    assert [X for X, _ in fam.sections[:4]] == want
    assert fam.sections[4] == (RatFunc(Poly.of(0)), RatFunc(Poly.of(0)))


def test_z4_family_torsion_section_order_4():
    fam = z4_family()
    assert family_point_order(fam, fam.sections[4]) == 4


def test_z4_specialization_keeps_order_4():
    E, pts = specialize(z4_family(), Z4_SPECIAL_T)
    assert Z4_SPECIAL_T == F(18745, 6321)
    assert pts[4] == Point(F(0), F(0))
    assert E.point_order(pts[4]) == 4
    for P in pts:
        assert E.contains(P)


def test_z4_specialization_random_fibers():
    rng = random.Random(20260815)
    fam = z4_family()
    hits = 0
    while hits < 8:
        t = F(rng.randint(-50, 50), rng.randint(1, 8))
        try:
            E, pts = specialize(fam, t)
        except ValueError:
            continue
        assert E.point_order(pts[4]) == 4
        hits += 1


# ------------------------------ Shioda family ------------------------------


def test_shioda_family_section():
    fam = shioda_family(6)
    assert verify_sections(fam) == [True]
    assert fam.sections[0] == (RatFunc(-Poly.x(2)), RatFunc(Poly.of(1)))
    E, pts = specialize(fam, 1)
    assert (E.a4, E.a6) == (0, 2) and pts == [Point(F(-1), F(1))]


def test_shioda_family_requires_multiple_of_3():
    for bad in (0, -3, 4, 7):
        with pytest.raises(ValueError):
            shioda_family(bad)
    assert shioda_family(9).genus() == 2


# ------------------------------- the sextic --------------------------------


def test_sextic_polynomial():
    assert list(SEXTIC.coeffs) == [F(-48), F(0), F(88), F(0), F(-19), F(0), F(16)]


def test_sextic_points_exact():
    pts = sextic_points()
    assert len(pts) == 8
    for t, u in pts:
        assert u * u == SEXTIC(t)
        assert on_sextic(t, u)
    # sign-orbit closure
    s = set(pts)
    for t, u in pts:
        assert (-t, u) in s and (t, -u) in s
    assert (F(2), F(32)) in s
    assert (F(14, 13), F(16064, 2197)) in s


def test_on_sextic_rejects():
    assert not on_sextic(F(1), F(1))
    assert not on_sextic(F(0), F(7))


# --------------------------- Inose configuration ---------------------------


def test_inose_ns_shape():
    NS = inose_ns()
    assert lattice_invariants(NS) == (18, -1, True, (1, 17))
    g = NS.gram
    assert (g[0][0], g[0][1], g[1][1]) == (0, 1, 0)
    # the two -E8 blocks do not talk to the hyperbolic plane
    assert all(g[i][j] == 0 for i in (0, 1) for j in range(2, 18))


def test_inose_fiber_section_pairing():
    NS = inose_ns()
    f, s = inose_fs()
    assert NS.inner(f, f) == 0
    assert NS.inner(f, s) == 1
    assert NS.inner(s, s) == -2


# ------------------------------ D16+ lattice -------------------------------


def test_d16_plus_invariants():
    L = d16_plus()
    assert lattice_invariants(L) == (16, 1, True, (16, 0))
    rd = root_decomposition(L)
    assert rd.root_count == 480 and rd.components == (("D16", 16),)
    assert mw_group(L).torsion == (2,)


# ------------------------------- Golay code --------------------------------


def test_golay_basis_shape():
    basis = golay_basis()
    assert len(basis) == 12
    assert all(len(w) == 24 and set(w) <= {0, 1} for w in basis)
    assert all(sum(w) == 8 for w in basis)


def test_golay_self_orthogonal():
    basis = golay_basis()
    for u in basis:
        for v in basis:
            assert sum(a * b for a, b in zip(u, v)) % 2 == 0


def test_golay_weight_distribution():
    # enumerate the whole span: the [24,12,8] distribution is unmistakable
    basis = golay_basis()
    words = set()
    for m in range(4096):
        w = (0,) * 24
        for i in range(12):
            if (m >> i) & 1:
                w = tuple(x ^ y for x, y in zip(w, basis[i]))
        words.add(w)
    assert len(words) == 4096          # rank 12 over GF(2)
    dist = Counter(sum(w) for w in words)
    assert dict(dist) == {0: 1, 8: 759, 12: 2576, 16: 759, 24: 1}


# ---------------------------- Niemeier lattices ----------------------------


def test_niemeier_labels():
    assert set(NIEMEIER_LABELS) == {"E8^3", "D16+E8", "A1^24"}
    with pytest.raises(KeyError):
        niemeier("Leech")


def test_niemeier_invariants_and_roots():
    expected = {
        "E8^3": (720, Counter({("E8", 8): 3})),
        "D16+E8": (720, Counter({("D16", 16): 1, ("E8", 8): 1})),
        "A1^24": (48, Counter({("A1", 1): 24})),
    }
    for lbl in NIEMEIER_LABELS:
        L = niemeier(lbl)
        assert lattice_invariants(L) == (24, 1, True, (24, 0))
        rd = root_decomposition(L)
        count, comps = expected[lbl]
        assert rd.root_count == count
        assert Counter(rd.components) == comps


def test_niemeier_mw_groups():
    expected = {"E8^3": (), "D16+E8": (2,), "A1^24": (2,) * 12}
    for lbl in NIEMEIER_LABELS:
        md = mw_group(niemeier(lbl))
        assert md.mw_rank == 0
        assert md.torsion == expected[lbl]
