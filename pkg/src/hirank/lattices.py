"""Even integral lattices with exact arithmetic.

Invariants, short-vector enumeration (Fincke-Pohst with rational Cholesky
data), ADE root-system decomposition, essential lattice and Mordell-Weil
group of an elliptic-surface Neron-Severi lattice, glue constructions,
Kneser p-neighbors, half-hole coset scans, and the K3 fiber/torsion
bookkeeping tables.  No floating point anywhere; signatures and short
vectors come out of exact symmetric reduction.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from ._linalg import (bareiss_det, int_kernel, lll_reduce_gram, mat_vec,
                      rank as mat_rank, row_basis, smith_invariants)


class NotPositiveDefinite(ValueError):
    """Operation requires a positive definite Gram matrix."""


class PreconditionFailed(ValueError):
    """A stated pairing precondition does not hold."""


class DependentS(ValueError):
    """Sublattice basis vectors are linearly dependent."""


class NonIntegralGlue(ValueError):
    """A glue vector pairs non-integrally with the lattice or itself."""


class OddGlue(ValueError):
    """A glue vector has odd integral self-pairing."""


class BadNeighborVector(ValueError):
    """Vector fails the p-neighbor admissibility conditions."""


class RankTooLarge(ValueError):
    """Coset enumeration guard tripped; pass force=True to override."""


class UnknownTorsionLabel(KeyError):
    """Torsion group label missing from the K3 fiber table."""


class IntLattice:
    """Integral lattice given by a symmetric Gram matrix.

    Nondegenerate unless constructed with allow_degenerate=True.  Instances
    are immutable; all derived data is recomputed on demand (ranks in this
    package stay below ~30, nothing here needs caching).
    """

    __slots__ = ("rank", "gram")

    def __init__(self, gram, *, allow_degenerate: bool = False):
        rows = tuple(tuple(int(x) for x in row) for row in gram)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        object.__setattr__(self, "rank", n)
        object.__setattr__(self, "gram", rows)
        if not allow_degenerate and n and bareiss_det(rows) == 0:
            raise ValueError("degenerate lattice (det 0); flag to allow")

    def __setattr__(self, *a):
        raise AttributeError("IntLattice is immutable")

    def __eq__(self, other):
        return isinstance(other, IntLattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def __repr__(self):
        return f"IntLattice(rank={self.rank}, disc={self.disc})"

    def inner(self, u, v) -> int:
        g = self.gram
        return sum(u[i] * g[i][j] * v[j]
                   for i in range(self.rank) for j in range(self.rank))

    def norm(self, v) -> int:
        return self.inner(v, v)

    @property
    def disc(self) -> int:
        return bareiss_det(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def signature(self) -> tuple[int, int]:
        return _signature(self.gram)

    def negated(self) -> "IntLattice":
        return IntLattice([[-x for x in row] for row in self.gram],
                          allow_degenerate=True)

    def direct_sum(self, other: "IntLattice") -> "IntLattice":
        n, m = self.rank, other.rank
        g = [[0] * (n + m) for _ in range(n + m)]
        for i in range(n):
            g[i][:n] = list(self.gram[i])
        for i in range(m):
            g[n + i][n:] = list(other.gram[i])
        return IntLattice(g, allow_degenerate=True)


def direct_sum(*lattices: IntLattice) -> IntLattice:
    out = IntLattice([])
    for L in lattices:
        out = out.direct_sum(L)
    return out


def lattice_to_text(L: IntLattice) -> str:
    lines = [str(L.rank)]
    lines += [" ".join(str(x) for x in row) for row in L.gram]
    return "\n".join(lines) + "\n"


def lattice_from_text(text: str) -> IntLattice:
    """Parse the rank-then-Gram-rows format; degenerate input is allowed."""
    toks = text.split()
    if not toks:
        raise ValueError("empty lattice file")
    n = int(toks[0])
    if len(toks) != 1 + n * n:
        raise ValueError(f"expected {n}x{n} entries after the rank line")
    vals = [int(t) for t in toks[1:]]
    gram = [vals[i * n:(i + 1) * n] for i in range(n)]
    return IntLattice(gram, allow_degenerate=True)


def _signature(gram) -> tuple[int, int]:
    """Exact inertia (p, q) by symmetric Gaussian reduction.

    Nonzero diagonal pivots contribute their sign; a zero-diagonal block
    with a nonzero off-diagonal entry is a hyperbolic pair contributing
    (1, 1); whatever is left after that is the radical.
    """
    n = len(gram)
    A = [[Fraction(x) for x in row] for row in gram]
    alive = list(range(n))
    pos = neg = 0
    while alive:
        piv = next((i for i in alive if A[i][i] != 0), None)
        if piv is not None:
            d = A[piv][piv]
            if d > 0:
                pos += 1
            else:
                neg += 1
            alive.remove(piv)
            col = {i: A[i][piv] for i in alive}
            for i in alive:
                if col[i]:
                    for j in alive:
                        A[i][j] -= col[i] * A[piv][j] / d
            continue
        pair = None
        for i in alive:
            for j in alive:
                if i != j and A[i][j] != 0:
                    pair = (i, j)
                    break
            if pair:
                break
        if pair is None:
            break  # radical: all remaining pairings vanish
        i0, j0 = pair
        b = A[i0][j0]
        pos += 1
        neg += 1
        alive.remove(i0)
        alive.remove(j0)
        ci = {k: A[k][i0] for k in alive}
        cj = {k: A[k][j0] for k in alive}
        for k in alive:
            for m in alive:
                A[k][m] -= (ci[k] * A[j0][m] + cj[k] * A[i0][m]) / b
    return pos, neg


def lattice_invariants(L: IntLattice):
    """(rank, discriminant, is_even, signature)."""
    return L.rank, L.disc, L.is_even, L.signature()


# --------------------------- short vectors --------------------------------


def _ldl(gram):
    """LDL^T over Q for a positive definite matrix; (diag, multipliers)."""
    n = len(gram)
    A = [[Fraction(x) for x in row] for row in gram]
    D = [Fraction(0)] * n
    M = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        D[i] = A[i][i] - sum(D[k] * M[k][i] * M[k][i] for k in range(i))
        if D[i] <= 0:
            raise NotPositiveDefinite(f"pivot {i} is {D[i]}")
        for j in range(i + 1, n):
            s = A[i][j] - sum(D[k] * M[k][i] * M[k][j] for k in range(i))
            M[i][j] = s / D[i]
    return D, M


def _floor_sqrt(fr: Fraction) -> int:
    assert fr >= 0
    return math.isqrt(fr.numerator * fr.denominator) // fr.denominator


def _floor_plus_sqrt(c: Fraction, r: Fraction) -> int:
    """Largest integer t with t <= c + sqrt(r), exactly."""
    t = (c.numerator // c.denominator) + _floor_sqrt(r)
    while Fraction(t + 1) <= c or (Fraction(t + 1) - c) ** 2 <= r:
        t += 1
    while Fraction(t) > c and (Fraction(t) - c) ** 2 > r:
        t -= 1
    return t


def _canonical_sign(v: tuple) -> tuple:
    for x in v:
        if x > 0:
            return v
        if x < 0:
            return tuple(-y for y in v)
    return v


def short_vectors(L: IntLattice, B: int, *, threads: int | None = None):
    """All v with 0 < v.v <= B, one per {v, -v} pair, sorted by (norm, v).

    Returns a list of (vector, norm) with exact integer norms.  The search
    tree can be split over its top-level branches; results are merged and
    sorted, so the thread count never changes the output.
    """
    n = L.rank
    if n == 0:
        return []
    # enumerate in LLL-reduced coordinates, report in the original basis
    try:
        Gr, U = lll_reduce_gram(L.gram)
    except ValueError as e:
        raise NotPositiveDefinite(str(e)) from None
    D, M = _ldl(Gr)
    budget0 = Fraction(B)

    def to_original(x):
        return tuple(sum(x[i] * U[i][j] for i in range(n)) for j in range(n))

    def level_range(i, c, budget):
        r = budget / D[i]
        hi = _floor_plus_sqrt(-c, r)
        lo = -_floor_plus_sqrt(c, r)
        return lo, hi

    def rec(i, x, budget, out):
        c = sum(M[i][j] * x[j] for j in range(i + 1, n))
        lo, hi = level_range(i, c, budget)
        for xi in range(lo, hi + 1):
            used = D[i] * (xi + c) ** 2
            if used > budget:
                continue
            x[i] = xi
            if i == 0:
                if any(x):
                    v = to_original(x)
                    nm = L.norm(v)
                    if 0 < nm <= B:
                        out.add((_canonical_sign(v), nm))
            else:
                rec(i - 1, x, budget - used, out)
        x[i] = 0

    top = n - 1
    lo, hi = level_range(top, Fraction(0), budget0)
    branches = list(range(lo, hi + 1))

    def run_branch(xt):
        out = set()
        x = [0] * n
        x[top] = xt
        used = D[top] * Fraction(xt) ** 2
        if used > budget0:
            return out
        if top == 0:
            if any(x):
                v = to_original(x)
                nm = L.norm(v)
                if 0 < nm <= B:
                    out.add((_canonical_sign(v), nm))
        else:
            rec(top - 1, x, budget0 - used, out)
        return out

    found: set = set()
    if threads and threads > 1 and len(branches) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            for part in ex.map(run_branch, branches):
                found |= part
    else:
        for xt in branches:
            found |= run_branch(xt)
    return sorted(((v, nm) for v, nm in found), key=lambda t: (t[1], t[0]))


# ------------------------- root decomposition -----------------------------


@dataclass(frozen=True)
class RootDecomposition:
    components: tuple          # ((label, rank), ...) sorted
    root_count: int
    root_basis: tuple          # basis rows of the root sublattice R

    def as_dict(self):
        return {"components": [list(c) for c in self.components],
                "root_count": self.root_count,
                "root_basis": [list(v) for v in self.root_basis]}


_EXCEPTIONAL = {(6, 72): ("E6", 3), (7, 126): ("E7", 2), (8, 240): ("E8", 1)}


def _classify_component(rank_: int, count: int, disc: int) -> str:
    if count == rank_ * (rank_ + 1) and disc == rank_ + 1:
        return f"A{rank_}"
    if rank_ >= 4 and count == 2 * rank_ * (rank_ - 1) and disc == 4:
        return f"D{rank_}"
    if (rank_, count) in _EXCEPTIONAL and disc == _EXCEPTIONAL[(rank_, count)][1]:
        return _EXCEPTIONAL[(rank_, count)][0]
    raise AssertionError(
        f"unrecognized root component: rank {rank_}, {count} roots, disc {disc}")


def root_decomposition(L: IntLattice) -> RootDecomposition:
    """ADE decomposition of the sublattice generated by norm-2 vectors."""
    roots = [v for v, nm in short_vectors(L, 2) if nm == 2]
    if not roots:
        return RootDecomposition((), 0, ())
    k = len(roots)
    seen = [False] * k
    comps = []
    for start in range(k):
        if seen[start]:
            continue
        stack, comp = [start], []
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(k):
                if not seen[j] and L.inner(roots[i], roots[j]) != 0:
                    seen[j] = True
                    stack.append(j)
        comps.append(comp)
    out = []
    for comp in comps:
        vecs = [list(roots[i]) for i in comp]
        basis = row_basis(vecs)
        r = len(basis)
        g = [[L.inner(a, b) for b in basis] for a in basis]
        label = _classify_component(r, 2 * len(comp), bareiss_det(g))
        out.append((label, r))
    out.sort()
    full_basis = row_basis([list(v) for v in roots])
    return RootDecomposition(tuple(out), 2 * k,
                             tuple(tuple(v) for v in full_basis))


# ---------------------- elliptic-surface lattices -------------------------


def essential_lattice(NS: IntLattice, f, s) -> IntLattice:
    """Orthogonal complement of the hyperbolic span(f, s), sign-flipped.

    f is the fiber class, s the zero section: f.f = 0, s.f = 1, s.s = -2.
    """
    if NS.norm(f) != 0:
        raise PreconditionFailed(f"f.f = {NS.norm(f)}, expected 0")
    if NS.inner(s, f) != 1:
        raise PreconditionFailed(f"s.f = {NS.inner(s, f)}, expected 1")
    if NS.norm(s) != -2:
        raise PreconditionFailed(f"s.s = {NS.norm(s)}, expected -2")
    rows = [mat_vec(NS.gram, list(f)), mat_vec(NS.gram, list(s))]
    K = int_kernel(rows)
    gram = [[-NS.inner(a, b) for b in K] for a in K]
    return IntLattice(gram, allow_degenerate=True)


@dataclass(frozen=True)
class MWData:
    mw_rank: int
    torsion: tuple


def mw_group(N_ess: IntLattice) -> MWData:
    """Mordell-Weil rank and torsion read off N_ess / R.

    The rank is rank(N_ess) - rank(R); the torsion invariant factors are
    the nontrivial elementary divisors of the root basis inside N_ess.
    """
    rd = root_decomposition(N_ess)
    if not rd.root_basis:
        return MWData(N_ess.rank, ())
    B = [list(v) for v in rd.root_basis]
    inv = smith_invariants(B)
    tors = tuple(d for d in inv if d > 1)
    return MWData(N_ess.rank - len(B), tors)


def orthogonal_complement(L: IntLattice, S) -> IntLattice:
    """Primitive sublattice orthogonal to the rows of S, with induced Gram."""
    S = [list(v) for v in S]
    if not S:
        return IntLattice([row[:] for row in L.gram], allow_degenerate=True)
    if mat_rank(S) != len(S):
        raise DependentS("sublattice basis is linearly dependent")
    rows = [mat_vec(L.gram, v) for v in S]
    K = int_kernel(rows)
    gram = [[L.inner(a, b) for b in K] for a in K]
    return IntLattice(gram, allow_degenerate=True)


# ------------------------------- gluing -----------------------------------


def build_glued_lattice(R: IntLattice, glue) -> IntLattice:
    """Lattice generated by R and rational glue vectors (R-coordinates).

    Every glue vector must pair integrally with R and with the other glue
    vectors, and must have even self-pairing; the result is again an even
    integral lattice containing R with finite index.
    """
    n = R.rank
    gl = [[Fraction(x) for x in v] for v in glue]
    for v in gl:
        pair = [sum(R.gram[i][j] * v[j] for j in range(n)) for i in range(n)]
        if any(x.denominator != 1 for x in pair):
            raise NonIntegralGlue(f"{v} pairs non-integrally with the lattice")
        self_pair = sum(v[i] * pair[i] for i in range(n))
        if self_pair.denominator != 1:
            raise NonIntegralGlue(f"self-pairing {self_pair} not integral")
        if self_pair.numerator % 2:
            raise OddGlue(f"self-pairing {self_pair} is odd")
    for a in range(len(gl)):
        for b in range(a):
            x = sum(gl[a][i] * R.gram[i][j] * gl[b][j]
                    for i in range(n) for j in range(n))
            if x.denominator != 1:
                raise NonIntegralGlue("glue vectors pair non-integrally")

    den = 1
    for v in gl:
        for x in v:
            den = den * x.denominator // math.gcd(den, x.denominator)
    rows = [[den if i == j else 0 for j in range(n)] for i in range(n)]
    rows += [[int(x * den) for x in v] for v in gl]
    basis = row_basis(rows)
    assert len(basis) == n
    bf = [[Fraction(x, den) for x in row] for row in basis]
    gram = []
    for a in bf:
        line = []
        for b in bf:
            x = sum(a[i] * R.gram[i][j] * b[j]
                    for i in range(n) for j in range(n))
            assert x.denominator == 1
            line.append(int(x))
        gram.append(line)
    out = IntLattice(gram, allow_degenerate=True)
    assert out.is_even
    return out


# ----------------------------- p-neighbors --------------------------------


def p_neighbor(L: IntLattice, v, p: int) -> IntLattice:
    """Kneser neighbor: {x : x.v = 0 mod p} extended by v/p.

    Needs v in L, v not in pL, and v.v = 0 mod 2p^2 so that v/p keeps the
    lattice even.  Rank and |disc| are preserved.
    """
    n = L.rank
    v = [int(x) for x in v]
    if len(v) != n:
        raise BadNeighborVector("vector length does not match the rank")
    if all(x % p == 0 for x in v):
        raise BadNeighborVector("v lies in pL")
    if L.norm(v) % (2 * p * p):
        raise BadNeighborVector(f"v.v = {L.norm(v)} is not 0 mod {2 * p * p}")
    w = mat_vec(L.gram, v)
    wp = [x % p for x in w]
    if not any(wp):
        raise BadNeighborVector("pairing with v vanishes identically mod p")
    j0 = next(i for i in range(n) if wp[i])
    inv = pow(wp[j0], -1, p)
    # index-p sublattice {x : x.w = 0 mod p}
    rows = []
    for i in range(n):
        if i == j0:
            row = [0] * n
            row[j0] = p
        else:
            row = [0] * n
            row[i] = 1
            row[j0] = -(wp[i] * inv) % p
        rows.append(row)
    rows = [[p * x for x in r] for r in rows]          # scale by p
    rows.append(v)                                     # v/p, scaled by p
    basis = row_basis(rows)
    assert len(basis) == n
    bf = [[Fraction(x, p) for x in row] for row in basis]
    gram = []
    for a in bf:
        line = []
        for b in bf:
            x = sum(a[i] * L.gram[i][j] * b[j]
                    for i in range(n) for j in range(n))
            assert x.denominator == 1
            line.append(int(x))
        gram.append(line)
    out = IntLattice(gram, allow_degenerate=True)
    assert out.is_even and abs(out.disc) == abs(L.disc)
    return out


# ---------------------------- half-lattice holes ---------------------------


@dataclass(frozen=True)
class HoleCoset:
    rep: tuple          # minimal-norm representative of the coset c + 2L
    min_norm: int


def half_hole_cosets(L: IntLattice, min_norm: int, *, force: bool = False,
                     threads: int | None = None):
    """Cosets of 2L with minimal norm >= min_norm and norm residue 2 mod 4.

    Exhaustive over all 2^rank - 1 nonzero cosets, so the rank is guarded
    at 12 unless force=True.  The norm residue mod 4 is constant on each
    coset of an even lattice, which is what makes the filter well defined.
    """
    n = L.rank
    if n > 12 and not force:
        raise RankTooLarge(f"rank {n} > 12; pass force=True to override")
    if n == 0:
        return []
    total = (1 << n) - 1
    best: dict = {}
    B = 2 * max(L.gram[i][i] for i in range(n))
    while True:
        for v, nm in short_vectors(L, B, threads=threads):
            key = tuple(x % 2 for x in v)
            if key == (0,) * n:
                continue
            if key not in best or nm < best[key][0]:
                best[key] = (nm, v)
        if len(best) == total:
            break
        B *= 2
    out = []
    for key, (nm, v) in best.items():
        if nm % 4 == 2 and nm >= min_norm:
            out.append(HoleCoset(rep=v, min_norm=nm))
    out.sort(key=lambda h: (h.min_norm, h.rep))
    return out


# ------------------------------ K3 tables ---------------------------------


@dataclass(frozen=True)
class FiberTableEntry:
    torsion: str
    fibers: str
    bound: int


_K3_ROWS = [
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

K3_FIBER_TABLE = {label: FiberTableEntry(label, fibers, bound)
                  for label, fibers, bound in _K3_ROWS}

THIRTEEN_DISCRIMINANTS = (-3, -4, -7, -8, -11, -12, -16, -19,
                          -27, -28, -43, -67, -163)


def _canon_label(s: str) -> str:
    t = s.replace(" ", "")
    for ch in ("×", "⊕", "+"):
        t = t.replace(ch, "x")
    t = t.replace("(", "").replace(")", "")
    if t in ("0", "{0}", "trivial", "Z/1Z"):
        return "0"
    parts = sorted(t.split("x"))
    return " x ".join(parts) if len(parts) > 1 else t


def k3_tables(query):
    """Dispatch on the K3 bookkeeping data of the surface theory.

    A torsion label returns its FiberTableEntry; a positive integer d is
    the arithmetic genus and returns the rank bound 10d - 2; a negative
    integer asks whether it is one of the thirteen singular-K3
    discriminants.
    """
    if isinstance(query, str):
        label = _canon_label(query)
        if label not in K3_FIBER_TABLE:
            raise UnknownTorsionLabel(query)
        return K3_FIBER_TABLE[label]
    if isinstance(query, int):
        if query > 0:
            return 10 * query - 2
        if query < 0:
            return query in THIRTEEN_DISCRIMINANTS
        raise ValueError("query 0 is neither a genus nor a discriminant")
    raise TypeError(f"unsupported query {query!r}")


# --------------------------- standard Grams -------------------------------


HYPERBOLIC_GRAM = ((0, 1), (1, 0))


def _e8_simple_roots():
    half = Fraction(1, 2)
    a1 = [half, -half, -half, -half, -half, -half, -half, half]
    a2 = [1, 1, 0, 0, 0, 0, 0, 0]
    roots = [a1, a2]
    for k in range(2, 8):            # e_{k} - e_{k-1} in 0-based coordinates
        r = [0] * 8
        r[k - 1] = -1
        r[k - 2] = 1
        roots.append(r)
    return roots


def ade_gram(letter: str, n: int) -> IntLattice:
    """Gram matrix of a standard ADE root lattice, built from root vectors."""
    if letter == "A" and n >= 1:
        vecs = []
        for i in range(n):
            r = [0] * (n + 1)
            r[i], r[i + 1] = 1, -1
            vecs.append(r)
    elif letter == "D" and n >= 2:
        vecs = []
        for i in range(n - 1):
            r = [0] * n
            r[i], r[i + 1] = 1, -1
            vecs.append(r)
        last = [0] * n
        last[n - 2] = last[n - 1] = 1
        vecs.append(last)
    elif letter == "E" and n in (6, 7, 8):
        vecs = _e8_simple_roots()[:n]
    else:
        raise ValueError(f"no standard root lattice {letter}{n}")
    def dot(a, b):
        x = sum(Fraction(p) * Fraction(q) for p, q in zip(a, b))
        assert x.denominator == 1
        return int(x)

    gram = [[dot(a, b) for b in vecs] for a in vecs]
    return IntLattice(gram)
