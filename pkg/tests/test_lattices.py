"""Lattice layer: invariants, short vectors, ADE decomposition, glue,
neighbors, half-hole cosets, and the K3 bookkeeping tables.

Expected values were frozen from independent hand computation and from
cross-checks against classical data (kissing numbers, root system sizes,
unimodular lattice classification in ranks 8 and 16).
"""

import random
from fractions import Fraction as F

import pytest

from hirank.lattices import (
    IntLattice,
    direct_sum,
    lattice_to_text,
    lattice_from_text,
    lattice_invariants,
    short_vectors,
    root_decomposition,
    essential_lattice,
    mw_group,
    MWData,
    orthogonal_complement,
    build_glued_lattice,
    p_neighbor,
    half_hole_cosets,
    k3_tables,
    K3_FIBER_TABLE,
    THIRTEEN_DISCRIMINANTS,
    HYPERBOLIC_GRAM,
    ade_gram,
    NotPositiveDefinite,
    PreconditionFailed,
    DependentS,
    NonIntegralGlue,
    OddGlue,
    BadNeighborVector,
    RankTooLarge,
    UnknownTorsionLabel,
)
from hirank._linalg import bareiss_det, int_kernel, lll_reduce_gram, smith_invariants


H = IntLattice(HYPERBOLIC_GRAM)
E8 = ade_gram("E", 8)
D16 = ade_gram("D", 16)

# Half-sum glue coordinates in the simple-root basis a_i = e_i - e_{i+1}
# (i < n-1), a_{n-1} = e_{n-2} + e_{n-1}; solving the telescoping system
# for (e_1 + ... + e_n)/2 gives (1, 2, 3, ..., n-2, n/2, n/2) halves.
D16_GLUE = (F(1, 2), 1, F(3, 2), 2, F(5, 2), 3, F(7, 2), 4,
            F(9, 2), 5, F(11, 2), 6, F(13, 2), 7, F(7, 2), 4)
D8_SPIN_PLUS = (F(1, 2), 1, F(3, 2), 2, F(5, 2), 3, F(3, 2), 2)
D8_SPIN_MINUS = (F(1, 2), 1, F(3, 2), 2, F(5, 2), 3, 2, F(3, 2))


# --------------------------- construction ----------------------------------


def test_gram_validation():
    with pytest.raises(ValueError):
        IntLattice(((1, 2),))                      # not square
    with pytest.raises(ValueError):
        IntLattice(((0, 1), (2, 0)))               # not symmetric
    with pytest.raises(ValueError):
        IntLattice(((1, 1), (1, 1)))               # det 0
    L = IntLattice(((1, 1), (1, 1)), allow_degenerate=True)
    assert L.disc == 0
    with pytest.raises(AttributeError):
        L.rank = 3


def test_invariants_frozen():
    assert lattice_invariants(H) == (2, -1, True, (1, 1))
    assert lattice_invariants(E8) == (8, 1, True, (8, 0))
    assert lattice_invariants(IntLattice(((2, 0), (0, -2)))) == (2, -4, True, (1, 1))
    assert lattice_invariants(D16) == (16, 4, True, (16, 0))
    assert lattice_invariants(ade_gram("E", 7)) == (7, 2, True, (7, 0))
    assert lattice_invariants(ade_gram("E", 6)) == (6, 3, True, (6, 0))
    odd = IntLattice(((1,),))
    assert odd.is_even is False and odd.signature() == (1, 0)


def test_signature_hyperbolic_block():
    # zero diagonal forces the hyperbolic-pair path in the reduction
    NS = direct_sum(H, E8.negated(), E8.negated())
    assert NS.signature() == (1, 17)
    assert NS.disc == -1
    assert direct_sum(H, H).signature() == (2, 2)
    assert direct_sum(H, E8).signature() == (9, 1)


def test_direct_sum_and_negated():
    rng = random.Random(11)
    for _ in range(20):
        d = [2 * rng.randint(1, 5) for _ in range(3)]
        A = IntLattice(tuple(tuple(d[i] if i == j else 0 for j in range(3))
                             for i in range(3)))
        B = ade_gram("A", rng.randint(1, 3))
        S = direct_sum(A, B)
        assert S.rank == A.rank + B.rank
        assert S.disc == A.disc * B.disc
        assert A.negated().disc == (-1) ** A.rank * A.disc
        pa, qa = A.signature()
        assert A.negated().signature() == (qa, pa)


def test_inner_norm():
    assert H.inner((1, 0), (0, 1)) == 1
    assert H.norm((1, 1)) == 2
    assert H.norm((1, -1)) == -2
    A2 = ade_gram("A", 2)
    assert A2.gram == ((2, -1), (-1, 2))
    assert A2.norm((1, 1)) == 2


# --------------------------- ADE Grams --------------------------------------


def test_ade_discriminants():
    for n in range(1, 6):
        assert ade_gram("A", n).disc == n + 1
    for n in range(2, 7):
        assert ade_gram("D", n).disc == 4
    assert ade_gram("E", 6).disc == 3
    assert ade_gram("E", 7).disc == 2
    assert ade_gram("E", 8).disc == 1


def test_ade_rejects():
    for letter, n in (("B", 3), ("A", 0), ("D", 1), ("E", 5), ("E", 9)):
        with pytest.raises(ValueError):
            ade_gram(letter, n)


# --------------------------- text round trip --------------------------------


def test_lattice_text_roundtrip():
    for L in (H, E8, ade_gram("A", 3), IntLattice(((2, 0), (0, -2)))):
        txt = lattice_to_text(L)
        assert txt.splitlines()[0].strip() == str(L.rank)
        assert lattice_from_text(txt).gram == L.gram


def test_lattice_text_malformed():
    with pytest.raises(ValueError):
        lattice_from_text("")
    with pytest.raises(ValueError):
        lattice_from_text("2\n1 0\n")          # missing entries


# --------------------------- short vectors ----------------------------------


def test_short_vectors_frozen_counts():
    assert len(short_vectors(E8, 2)) == 120          # 240 roots up to sign
    assert len(short_vectors(E8, 4)) == 1200         # + 2160 of norm 4
    assert len(short_vectors(ade_gram("A", 2), 2)) == 3
    assert len(short_vectors(IntLattice(((2, 0), (0, 2))), 2)) == 2
    assert len(short_vectors(D16, 2)) == 240


def test_short_vectors_validity():
    out = short_vectors(E8, 4)
    assert out == sorted(out, key=lambda t: (t[1], t[0]))
    seen = set()
    for v, nm in out:
        assert E8.norm(v) == nm and 0 < nm <= 4
        assert nm % 2 == 0
        assert tuple(-x for x in v) not in seen
        seen.add(v)


def test_short_vectors_threads_deterministic():
    base = short_vectors(E8, 4)
    assert short_vectors(E8, 4, threads=4) == base
    assert short_vectors(E8, 4, threads=2) == base


def test_short_vectors_not_positive_definite():
    with pytest.raises(NotPositiveDefinite):
        short_vectors(H, 2)
    with pytest.raises(NotPositiveDefinite):
        short_vectors(IntLattice(((2, 0), (0, -2))), 2)


def test_lll_transform_properties():
    rng = random.Random(23)
    for _ in range(12):
        n = rng.randint(2, 5)
        A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        G0 = [[sum(A[i][k] * A[j][k] for k in range(n)) + (n if i == j else 0)
               for j in range(n)] for i in range(n)]
        Gr, U = lll_reduce_gram(tuple(map(tuple, G0)))
        assert abs(bareiss_det(U)) == 1
        n_ = len(U)
        recon = [[sum(U[i][a] * G0[a][b] * U[j][b]
                      for a in range(n_) for b in range(n_))
                  for j in range(n_)] for i in range(n_)]
        assert [list(r) for r in Gr] == recon
        assert bareiss_det([list(r) for r in Gr]) == bareiss_det(G0)


# --------------------------- Smith form -------------------------------------


def test_smith_frozen():
    assert smith_invariants([[2, 0], [0, 3]]) == [1, 6]
    assert smith_invariants([[1, 2], [3, 4]]) == [1, 2]
    assert smith_invariants([[2, 4], [4, 8]]) == [2]
    assert smith_invariants([[1, 0], [0, 1]]) == [1, 1]
    assert smith_invariants([[0, 0], [0, 0]]) == []


def test_smith_against_sympy():
    from sympy import Matrix
    from sympy.matrices.normalforms import smith_normal_form

    rng = random.Random(7)
    for _ in range(30):
        n = rng.randint(1, 4)
        m = rng.randint(1, 4)
        A = [[rng.randint(-9, 9) for _ in range(m)] for _ in range(n)]
        ours = smith_invariants([row[:] for row in A])
        snf = smith_normal_form(Matrix(A))
        theirs = sorted(abs(snf[i, i]) for i in range(min(n, m)) if snf[i, i] != 0)
        assert ours == theirs
        for a, b in zip(ours, ours[1:]):
            assert b % a == 0


# --------------------------- root decomposition -----------------------------


def test_root_decomposition_frozen():
    rd = root_decomposition(E8)
    assert rd.components == (("E8", 8),) and rd.root_count == 240
    rd = root_decomposition(D16)
    assert rd.components == (("D16", 16),) and rd.root_count == 480
    rd = root_decomposition(IntLattice(((2, 0, 0), (0, 2, 0), (0, 0, 4))))
    assert rd.components == (("A1", 1), ("A1", 1)) and rd.root_count == 4
    rd = root_decomposition(IntLattice(((4, 0), (0, 6))))
    assert rd.components == () and rd.root_count == 0
    rd = root_decomposition(direct_sum(ade_gram("A", 2), ade_gram("A", 1)))
    assert sorted(rd.components) == [("A1", 1), ("A2", 2)]
    assert rd.root_count == 8


def test_root_counts_closed_form():
    for n in range(1, 5):
        rd = root_decomposition(ade_gram("A", n))
        assert rd.components == ((f"A{n}", n),)
        assert rd.root_count == n * (n + 1)
    for n in range(4, 7):
        rd = root_decomposition(ade_gram("D", n))
        assert rd.components == ((f"D{n}", n),)
        assert rd.root_count == 2 * n * (n - 1)
    for n, count in ((6, 72), (7, 126), (8, 240)):
        rd = root_decomposition(ade_gram("E", n))
        assert rd.components == ((f"E{n}", n),)
        assert rd.root_count == count


def test_root_basis_properties():
    rd = root_decomposition(direct_sum(ade_gram("A", 2), ade_gram("D", 4)))
    L = direct_sum(ade_gram("A", 2), ade_gram("D", 4))
    assert len(rd.root_basis) == sum(r for _, r in rd.components) == 6
    for v in rd.root_basis:
        assert L.norm(v) == 2
    d = rd.as_dict()
    assert d["root_count"] == 6 + 24


# --------------------------- essential lattice / MW -------------------------


def _inose_ns():
    return direct_sum(H, E8.negated(), E8.negated())


def _hyperbolic_fs(NS):
    f = (1, 0) + (0,) * (NS.rank - 2)
    s = (-1, 1) + (0,) * (NS.rank - 2)
    return f, s


def test_essential_inose():
    NS = _inose_ns()
    f, s = _hyperbolic_fs(NS)
    N = essential_lattice(NS, f, s)
    assert lattice_invariants(N) == (16, 1, True, (16, 0))
    rd = root_decomposition(N)
    assert rd.components == (("E8", 8), ("E8", 8)) and rd.root_count == 480
    assert mw_group(N) == MWData(0, ())


def test_essential_rank0():
    f, s = _hyperbolic_fs(H)
    assert essential_lattice(H, f, s).rank == 0


def test_essential_preconditions():
    NS = _inose_ns()
    f, s = _hyperbolic_fs(NS)
    bad = (0, 1) + (0,) * 16
    with pytest.raises(PreconditionFailed):
        essential_lattice(NS, bad, s)            # f.f = 0 fails? no: f.f != 0
    with pytest.raises(PreconditionFailed):
        essential_lattice(NS, f, f)              # s.f = 0
    with pytest.raises(PreconditionFailed):
        essential_lattice(NS, f, (1, 1) + (0,) * 16)   # s.s = 2


def test_mw_frozen():
    assert mw_group(direct_sum(E8, E8)) == MWData(0, ())
    assert mw_group(IntLattice(((4,),))) == MWData(1, ())
    assert mw_group(ade_gram("A", 2)) == MWData(0, ())
    d16_plus = build_glued_lattice(D16, [D16_GLUE])
    assert mw_group(d16_plus) == MWData(0, (2,))


def test_mw_torsion_disc_ratio():
    # |torsion|^2 * disc(N_ess) = disc(R) when R has full rank
    for N in (direct_sum(E8, E8), build_glued_lattice(D16, [D16_GLUE])):
        data = mw_group(N)
        rd = root_decomposition(N)
        n = len(rd.root_basis)
        R_gram = [[N.inner(a, b) for b in rd.root_basis] for a in rd.root_basis]
        disc_R = bareiss_det(R_gram)
        t = 1
        for inv in data.torsion:
            t *= inv
        assert data.mw_rank == N.rank - n
        if n == N.rank:
            assert t * t * N.disc == disc_R


# --------------------------- orthogonal complement --------------------------


def test_complement_frozen():
    roots = [v for v, nm in short_vectors(E8, 2)]
    r0 = roots[0]
    E7 = orthogonal_complement(E8, [r0])
    assert E7.disc == 2
    assert root_decomposition(E7).components == (("E7", 7),)
    r1 = next(r for r in roots if E8.inner(r0, r) == 0)
    D6 = orthogonal_complement(E8, [r0, r1])
    assert D6.disc == 4
    rd = root_decomposition(D6)
    assert rd.components == (("D6", 6),) and rd.root_count == 60
    full = [tuple(1 if j == i else 0 for j in range(8)) for i in range(8)]
    assert orthogonal_complement(E8, full).rank == 0


def test_complement_dependent():
    with pytest.raises(DependentS):
        orthogonal_complement(E8, [(1,) + (0,) * 7, (2,) + (0,) * 7])


def test_complement_disc_index_identity():
    # disc(span) * disc(complement) = disc(L) * index^2
    NS = _inose_ns()
    f, s = _hyperbolic_fs(NS)
    roots = [v for v, nm in short_vectors(E8, 2)]
    r1 = next(r for r in roots if E8.inner(roots[0], r) == 0)
    cases = [
        (E8, [roots[0]]),
        (E8, [roots[0], r1]),
        (NS, [f, s]),
        (D16, [tuple(1 if j == i else 0 for j in range(16)) for i in range(3)]),
    ]
    for L, S in cases:
        G = [list(r) for r in L.gram]
        pair_rows = [[L.inner(sv, tuple(1 if j == i else 0 for j in range(L.rank)))
                      for i in range(L.rank)] for sv in S]
        K = int_kernel(pair_rows)
        comp = orthogonal_complement(L, S)
        span_gram = [[L.inner(a, b) for b in S] for a in S]
        stack = [list(v) for v in S] + [list(v) for v in K]
        assert len(stack) == L.rank
        index = abs(bareiss_det(stack))
        assert bareiss_det(span_gram) * comp.disc == L.disc * index * index


# --------------------------- glue --------------------------------------------


def test_glue_no_glue_identity():
    assert build_glued_lattice(E8, []).gram == E8.gram


def test_glue_d16_plus():
    Lp = build_glued_lattice(D16, [D16_GLUE])
    assert lattice_invariants(Lp) == (16, 1, True, (16, 0))
    rd = root_decomposition(Lp)
    assert rd.components == (("D16", 16),) and rd.root_count == 480


def test_glue_d8_spin_is_e8():
    D8 = ade_gram("D", 8)
    Lp = build_glued_lattice(D8, [D8_SPIN_PLUS])
    assert lattice_invariants(Lp) == (8, 1, True, (8, 0))
    assert root_decomposition(Lp).components == (("E8", 8),)


def test_glue_rejections():
    A1 = ade_gram("A", 1)
    with pytest.raises(NonIntegralGlue):
        build_glued_lattice(A1, [(F(1, 2),)])          # self-pairing 1/2
    with pytest.raises(OddGlue):
        build_glued_lattice(direct_sum(A1, A1), [(F(1, 2), F(1, 2))])
    with pytest.raises(NonIntegralGlue):
        build_glued_lattice(ade_gram("A", 2), [(F(1, 2), 0)])
    with pytest.raises(NonIntegralGlue):
        # both spinor classes of D8 pair with each other in halves
        build_glued_lattice(ade_gram("D", 8), [D8_SPIN_PLUS, D8_SPIN_MINUS])


def test_glue_disc_drop():
    # disc = disc(R) / |glue group|^2
    assert build_glued_lattice(D16, [D16_GLUE]).disc == D16.disc // 4


# --------------------------- p-neighbors ------------------------------------


V_FWD = (0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1)
W_BACK = (3, 3, -5, -7, -6, -8, -3, 2, 0, 1, -1, -1, 3, 4, 1, 4)


def test_p_neighbor_e8e8_to_d16():
    L = direct_sum(E8, E8)
    assert L.norm(V_FWD) == 8
    Lp = p_neighbor(L, V_FWD, 2)
    assert lattice_invariants(Lp) == (16, 1, True, (16, 0))
    rd = root_decomposition(Lp)
    assert rd.components == (("D16", 16),) and rd.root_count == 480
    assert mw_group(Lp) == MWData(0, (2,))


def test_p_neighbor_round_trip():
    L = direct_sum(E8, E8)
    Lp = p_neighbor(L, V_FWD, 2)
    Lq = p_neighbor(Lp, W_BACK, 2)
    assert (Lq.rank, Lq.disc, Lq.is_even) == (L.rank, L.disc, L.is_even)
    assert root_decomposition(Lq).components == (("E8", 8), ("E8", 8))


def test_p_neighbor_rejections():
    L = direct_sum(E8, E8)
    doubled = tuple(2 * x for x in V_FWD)
    with pytest.raises(BadNeighborVector):
        p_neighbor(L, doubled, 2)                       # v in 2L
    root = (1,) + (0,) * 15
    with pytest.raises(BadNeighborVector):
        p_neighbor(L, root, 2)                          # norm 2, not 0 mod 8
    with pytest.raises(BadNeighborVector):
        p_neighbor(L, (1, 0, 1), 2)                     # wrong length
    with pytest.raises(BadNeighborVector):
        p_neighbor(IntLattice(((2, 0), (0, 8))), (0, 1), 2)   # pairing dies mod 2


def test_p_neighbor_preserves_invariants():
    L = direct_sum(E8, E8)
    roots = [v for v, nm in short_vectors(L, 2)]
    rng = random.Random(3)
    built = 0
    while built < 5:
        quad = [rng.choice(roots)]
        for w in rng.sample(roots, len(roots)):
            if all(L.inner(w, u) == 0 for u in quad):
                quad.append(w)
                if len(quad) == 4:
                    break
        if len(quad) < 4:
            continue
        v = tuple(sum(q[i] for q in quad) for i in range(16))
        try:
            Lp = p_neighbor(L, v, 2)
        except BadNeighborVector:
            continue
        built += 1
        assert Lp.rank == L.rank
        assert Lp.is_even
        assert abs(Lp.disc) == abs(L.disc)


# --------------------------- half-hole cosets -------------------------------


def test_half_holes_diag22():
    L = IntLattice(((2, 0), (0, 2)))
    out = half_hole_cosets(L, 2)
    assert [(c.rep, c.min_norm) for c in out] == [((0, 1), 2), ((1, 0), 2)]
    assert half_hole_cosets(L, 10) == []
    assert half_hole_cosets(L, 2, force=True) == out


def test_half_holes_e8():
    out = half_hole_cosets(E8, 0)
    assert len(out) == 120
    assert all(c.min_norm == 2 for c in out)
    assert half_hole_cosets(E8, 4) == []
    # independent bucketing: group norm <= 4 vectors by coset mod 2L
    buckets = {}
    for v, nm in short_vectors(E8, 4):
        key = tuple(x % 2 for x in v)
        if key not in buckets or nm < buckets[key]:
            buckets[key] = nm
    assert len(buckets) == 255
    oracle = {k for k, m in buckets.items() if m % 4 == 2}
    assert {tuple(x % 2 for x in c.rep) for c in out} == oracle


def test_half_holes_residues():
    L = direct_sum(IntLattice(((2, 1), (1, 4))), ade_gram("A", 1))
    for c in half_hole_cosets(L, 0):
        assert c.min_norm % 4 == 2
        assert L.norm(c.rep) == c.min_norm


def test_half_holes_guard_and_threads():
    with pytest.raises(RankTooLarge):
        half_hole_cosets(direct_sum(E8, E8), 2)
    a = half_hole_cosets(E8, 0)
    b = half_hole_cosets(E8, 0, threads=4)
    assert [(c.rep, c.min_norm) for c in a] == [(c.rep, c.min_norm) for c in b]


# --------------------------- K3 tables --------------------------------------


def test_k3_rows_frozen():
    rows = [
        ("0", "1^24", 18),
        ("Z/2Z", "2^8 1^8", 10),
        ("Z/3Z", "3^6 1^6", 6),
        ("Z/4Z", "4^4 2^2 1^4", 4),
        ("Z/5Z", "5^4 1^4", 2),
        ("Z/6Z", "6^2 3^2 2^2 1^2", 2),
        ("Z/7Z", "7^3 1^3", 0),
        ("Z/8Z", "8^2 4 2 1^2", 0),
        ("Z/2Z x Z/2Z", "2^12", 6),
        ("Z/2Z x Z/4Z", "4^4 2^4", 2),
        ("Z/2Z x Z/6Z", "6^3 2^3", 0),
    ]
    assert len(K3_FIBER_TABLE) == 11
    for label, fibers, bound in rows:
        entry = k3_tables(label)
        assert (entry.torsion, entry.fibers, entry.bound) == (label, fibers, bound)


def test_k3_label_spellings():
    for alias in ("trivial", "{0}", "Z/1Z", "0"):
        assert k3_tables(alias).fibers == "1^24"
    for alias in ("(Z/2Z) x (Z/4Z)", "Z/2Z ⊕ Z/4Z", "Z/2Z×Z/4Z",
                  "Z/4Z x Z/2Z", "Z/2Z + Z/4Z"):
        assert k3_tables(alias).bound == 2


def test_k3_genus_bound():
    assert [k3_tables(d) for d in (1, 2, 3, 4, 5)] == [8, 18, 28, 38, 48]


def test_k3_discriminants():
    assert len(THIRTEEN_DISCRIMINANTS) == 13
    for d in THIRTEEN_DISCRIMINANTS:
        assert k3_tables(d) is True
    for d in (-5, -20, -24, -100, -1):
        assert k3_tables(d) is False


def test_k3_errors():
    for bad in ("Z/9Z", "Z/16Z", "Z/2Z x Z/8Z"):
        with pytest.raises(UnknownTorsionLabel):
            k3_tables(bad)
    with pytest.raises(ValueError):
        k3_tables(0)
    with pytest.raises(TypeError):
        k3_tables(2.5)
