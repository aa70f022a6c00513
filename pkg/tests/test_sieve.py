"""N_p tables, fixed-point scoring, the blockwise sieve, and the cache."""

import math
from fractions import Fraction

import pytest

from hirank.arith import Poly
from hirank.curves import count_points, invariants, reduce_mod_p
from hirank.families import CurveFamily, specialize
from hirank import sieve as sv

FAM = CurveFamily(0, 0, 0, Poly([0, 1]), Poly.of(1))   # y^2 = x^3 + Tx + 1


@pytest.fixture(scope="module")
def tables():
    tabs, skipped = sv.build_np_tables(FAM, 50)
    assert skipped == []
    return tabs


def test_tables_cover_primes_below_bound(tables):
    assert [t.p for t in tables] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31,
                                     37, 41, 43, 47]


def test_counts_match_per_fiber_point_counts(tables):
    for tab in tables:
        if tab.p > 19:
            continue
        for t in range(tab.p):
            E, _ = specialize(FAM, t)
            if invariants(E)[6].numerator % tab.p == 0:
                assert tab.counts[t] == sv.BAD_FIBER
                assert tab.weights[t] == 0
            else:
                assert tab.counts[t] == count_points(reduce_mod_p(E, tab.p))


def test_bad_fiber_sentinel_at_p5(tables):
    # disc = -16(4T^3 + 27) vanishes mod 5 exactly at t = 3
    p5 = next(t for t in tables if t.p == 5)
    assert p5.counts == (6, 9, 7, sv.BAD_FIBER, 8)
    assert p5.weights == (747, 2408, 1378, 0, 1925)


def test_hasse_bound_everywhere(tables):
    for tab in tables:
        for n in tab.counts:
            if n != sv.BAD_FIBER:
                assert (n - tab.p - 1) ** 2 <= 4 * tab.p


def test_quantization_is_the_documented_rounding(tables):
    for tab in tables:
        for n, w in zip(tab.counts, tab.weights):
            if n != sv.BAD_FIBER:
                assert w == round(math.log(n / tab.p) * 4096)


def test_denominator_primes_are_skipped():
    fam = CurveFamily(0, 0, 0, Poly([0, Fraction(1, 3)]), Poly.of(1))
    tabs, skipped = sv.build_np_tables(fam, 20)
    assert skipped == [3]
    assert [t.p for t in tabs] == [2, 5, 7, 11, 13, 17, 19]


def test_build_threads_agree():
    serial, _ = sv.build_np_tables(FAM, 30)
    parallel, _ = sv.build_np_tables(FAM, 30, threads=3)
    assert parallel == serial


def test_mestre_score_is_table_indexing(tables):
    p5 = next(t for t in tables if t.p == 5)
    assert sv.mestre_score([p5], 7) == p5.weights[2] / 4096
    assert sv.mestre_score([p5], -1) == p5.weights[4] / 4096
    with pytest.raises(ValueError):
        sv.mestre_score([], 1)


def test_supersingular_toy_scores_positive():
    toy = [sv.NpTable(p=p, counts=(p + 1,) * p,
                      weights=(round(math.log((p + 1) / p) * 4096),) * p)
           for p in (3, 5, 7)]
    got = sv.mestre_score(toy, 11)
    exact = sum(math.log(1 + 1 / p) for p in (3, 5, 7))
    assert got > 0
    assert abs(got - exact) <= 3 * 0.5 / 4096


def test_score_depends_only_on_t_mod_product(tables):
    small = [t for t in tables if t.p in (3, 5, 7)]
    for t in (0, 4, 52):
        assert sv._score_fixed(small, t) == sv._score_fixed(small, t + 105)


def naive_top(tabs, rng, k, d=1):
    scored = sorted(((sv._score_fixed(tabs, n, d), -n) for n in rng),
                    reverse=True)
    return [(s, -mn) for s, mn in scored[:k]]


def test_sieve_matches_naive_scoring_bitwise(tables):
    cfg = sv.SieveConfig(prime_bound=50, t_range=(0, 2000), top_k=7,
                         block_size=256)
    got = [(round(c.score * 4096), c.t.numerator)
           for c in sv.sieve_search(tables, cfg)]
    assert got == naive_top(tables, range(0, 2001), 7)


def test_sieve_handles_negative_ranges(tables):
    cfg = sv.SieveConfig(prime_bound=50, t_range=(-300, 300), top_k=5)
    got = [(round(c.score * 4096), c.t.numerator)
           for c in sv.sieve_search(tables, cfg)]
    assert got == naive_top(tables, range(-300, 301), 5)


def test_sieve_rational_grid(tables):
    cfg = sv.SieveConfig(prime_bound=50, t_range=(-500, 500), top_k=5,
                         denominator=6)
    got = [(round(c.score * 4096), (c.t * 6).numerator)
           for c in sv.sieve_search(tables, cfg)]
    assert got == naive_top(tables, range(-500, 501), 5, d=6)
    # direct Fraction scoring reduces first, so p | d applies per point
    assert sv.mestre_score(tables, Fraction(-384, 6)) == \
        sv._score_fixed(tables, -64) / 4096


def test_sieve_is_thread_deterministic(tables, monkeypatch):
    cfg = sv.SieveConfig(prime_bound=50, t_range=(0, 5000), top_k=9,
                         block_size=128)
    serial = sv.sieve_search(tables, cfg)
    assert sv.sieve_search(tables, cfg, threads=5) == serial
    monkeypatch.setenv("HIRANK_THREADS", "3")
    assert sv.sieve_search(tables, cfg) == serial


def test_top_k_beyond_range_returns_everything(tables):
    cfg = sv.SieveConfig(prime_bound=50, t_range=(5, 9), top_k=99)
    cands = sv.sieve_search(tables, cfg)
    assert len(cands) == 5
    assert [c.t for c in cands] == sorted(
        (Fraction(n) for n in range(5, 10)),
        key=lambda t: (-sv._score_fixed(tables, t.numerator), t))


def test_ties_break_toward_smaller_numerator():
    tab = sv.NpTable(p=3, counts=(4, 4, 2), weights=(5, 5, 1))
    cfg = sv.SieveConfig(prime_bound=5, t_range=(0, 8), top_k=4)
    cands = sv.sieve_search([tab], cfg)
    assert [c.t.numerator for c in cands] == [0, 1, 3, 4]


def test_prime_bound_filters_tables(tables):
    cfg = sv.SieveConfig(prime_bound=20, t_range=(0, 400), top_k=3)
    small = [t for t in tables if t.p < 20]
    got = [(round(c.score * 4096), c.t.numerator)
           for c in sv.sieve_search(tables, cfg)]
    assert got == naive_top(small, range(0, 401), 3)


def test_config_validation():
    with pytest.raises(ValueError):
        sv.SieveConfig(prime_bound=2, t_range=(0, 1), top_k=1)
    with pytest.raises(ValueError):
        sv.SieveConfig(prime_bound=10, t_range=(2, 1), top_k=1)
    with pytest.raises(ValueError):
        sv.SieveConfig(prime_bound=10, t_range=(0, 1), top_k=0)
    with pytest.raises(ValueError):
        sv.SieveConfig(prime_bound=10, t_range=(0, 1), top_k=1, denominator=0)


def test_cache_roundtrip(tables, tmp_path):
    path = tmp_path / "tables.bin"
    sv.save_tables(path, FAM, 50, tables)
    assert sv.load_tables(path, FAM, 50) == tables
    assert sv.load_tables(path, FAM, 60) is None
    other = CurveFamily(0, 0, 0, Poly([0, 2]), Poly.of(1))
    assert sv.load_tables(path, other, 50) is None
    with open(path, "r+b") as fh:
        fh.write(b"garbage")
    with pytest.raises(ValueError):
        sv.load_tables(path, FAM, 50)


def test_cached_np_tables_builds_then_loads(tables, tmp_path):
    path = tmp_path / "cache.bin"
    first, skipped = sv.cached_np_tables(FAM, 50, path)
    assert (first, skipped) == (tables, [])
    assert path.exists()
    again, _ = sv.cached_np_tables(FAM, 50, path)
    assert again == tables


def test_score_curve_matches_table_pipeline():
    E, _ = specialize(FAM, 1)
    assert sv.score_curve(E, 50) == 1.787353515625
    manual = 0
    for tab_p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        if invariants(E)[6].numerator % tab_p == 0:
            continue
        n = count_points(reduce_mod_p(E, tab_p))
        manual += round(math.log(n / tab_p) * 4096)
    assert sv.score_curve(E, 50) == manual / 4096
