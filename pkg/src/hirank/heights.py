"""Canonical heights, height-pairing Gram matrices, rank certification,
integral points inside a known subgroup, and the quartic residue sieve.

The canonical height here is the doubling limit lim 4^(-n) h(x(2^n P)) with
h = log max(|num|, den).  Writing x_(n+1) = phi(m, e) / (e psi(m, e)) for the
duplication forms and g_n for the integer cancellation at step n, the limit
telescopes exactly:

    hhat(P) = h(x_0) + sum_n 4^(-(n+1)) (log s_n - log g_n)

where s_n is the size of the unreduced step on the max-normalized real pair.
The s-series is a bounded real iteration (no integer blowup), and every g_n
divides the resultant R of the duplication forms, so the g-series splits
into finitely many p-adic iterations over the primes of R.  Both tails decay
like 4^(-n) with constants computed from resultant cofactor identities, which
is what makes the returned error bound sound.
"""

import json
import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import mpmath

from ._linalg import solve
from .arith import Poly, poly_sqrt
from .curves import Point, WeierstrassCurve, torsion_subgroup


class InconclusiveTolerance(ValueError):
    """A Gram pivot's error interval straddles the tolerance."""


class DegenerateSquareQuartic(ValueError):
    """The quartic is a perfect square, so y^2 = Q(x) has a rational curve."""


def _thread_count(threads):
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("HIRANK_THREADS")
    return max(1, int(env)) if env else 1


def _log_big(n: int) -> float:
    # math.log overflows float conversion past ~1e308
    n = abs(n)
    if n == 0:
        raise ValueError("log of zero")
    if n.bit_length() <= 900:
        return math.log(n)
    k = n.bit_length() - 500
    return math.log(n >> k) + k * math.log(2)


# ------------------------------ naive height -------------------------------


def naive_height(P: Point) -> float:
    """log max(|numerator|, denominator) of the x-coordinate."""
    if P.is_infinity:
        raise ValueError("naive height of the point at infinity")
    x = Fraction(P.x)
    return _log_big(max(abs(x.numerator), x.denominator))


# --------------------------- per-curve height data -------------------------


@dataclass(frozen=True)
class _HeightSetup:
    u: int                      # integral-model scaling (x, y) -> (u^2 x, u^3 y)
    b: tuple                    # integer (b2, b4, b6, b8) of the scaled model
    resultant: int              # Res(phi4, psi3), nonzero
    d_inf: float                # bound on |log s_n| over normalized real pairs
    primes: tuple               # ((p, v_p(resultant)), ...)


_SETUP_CACHE: dict = {}


def _duplication_resultant(b2, b4, b6, b8):
    # phi(X) = X^4 - b4 X^2 - 2 b6 X - b8, psi3(X) = 4 X^3 + b2 X^2 + 2 b4 X + b6
    phi = [-b8, -2 * b6, -b4, 0, 1]
    psi = [b6, 2 * b4, b2, 4]
    # solve A phi + B psi = const for deg A <= 2, deg B <= 3; the system
    # matrix is the transposed Sylvester matrix, so Cramer makes the
    # solution integral once scaled by the resultant
    rows = []
    for k in range(7):
        row = []
        for i in range(3):                      # a_i X^i phi
            row.append(Fraction(phi[k - i]) if 0 <= k - i <= 4 else Fraction(0))
        for j in range(4):                      # b_j X^j psi
            row.append(Fraction(psi[k - j]) if 0 <= k - j <= 3 else Fraction(0))
        rows.append(row)
    sol = solve(rows, [Fraction(1)] + [Fraction(0)] * 6)
    if sol is None:
        raise ValueError("singular duplication: discriminant vanishes")
    den = 1
    for c in sol:
        den = den * c.denominator // math.gcd(den, c.denominator)
    resultant = den                              # A phi + B psi = den, integer A, B
    cof = [c * den for c in sol]
    assert all(c.denominator == 1 for c in cof)
    s_tot = sum(abs(int(c)) for c in cof)
    return resultant, s_tot


def _factor_via_sympy(n: int) -> dict:
    from sympy import factorint
    return {int(p): int(e) for p, e in factorint(int(n)).items()}


def _height_setup(E: WeierstrassCurve) -> _HeightSetup:
    key = (Fraction(E.a1), Fraction(E.a2), Fraction(E.a3),
           Fraction(E.a4), Fraction(E.a6))
    hit = _SETUP_CACHE.get(key)
    if hit is not None:
        return hit
    u = 1
    for a in key:
        u = u * a.denominator // math.gcd(u, a.denominator)
    a1, a2, a3, a4, a6 = (int(a * u ** i) for a, i in zip(key, (1, 2, 3, 4, 6)))
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    disc = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    assert disc != 0
    resultant, s_tot = _duplication_resultant(b2, b4, b6, b8)

    # bounds for the normalized real step s_n = max(|phi4|, |e psi3|):
    #   above by the coefficient sums, below via the cofactor identity
    #   A2 phi4 + B3 psi3 = R e^6 on the unit box
    c_phi = 1 + abs(b4) + 2 * abs(b6) + abs(b8)
    c_psi = 4 + abs(b2) + 2 * abs(b4) + abs(b6)
    delta = min(Fraction(1, 2), Fraction(1, 2 * c_phi))
    s_low = min(Fraction(1, 2),
                Fraction(abs(resultant)) * delta ** 7 / s_tot)
    d_inf = max(_log_big(max(c_phi, c_psi, 2)) + 1.0,
                _log_big(s_low.denominator) - _log_big(s_low.numerator) + 1.0)

    # candidate primes: the discriminant's, then whatever else divides R
    rest = abs(resultant)
    primes = {}
    for p in sorted(_factor_via_sympy(abs(disc) * 2)):
        v = 0
        while rest % p == 0:
            rest //= p
            v += 1
        if v:
            primes[p] = v
    if rest > 1:
        for p, _ in sorted(_factor_via_sympy(rest).items()):
            v = 0
            while rest % p == 0:
                rest //= p
                v += 1
            primes[p] = v
    setup = _HeightSetup(u=u, b=(b2, b4, b6, b8), resultant=resultant,
                         d_inf=d_inf, primes=tuple(sorted(primes.items())))
    _SETUP_CACHE[key] = setup
    return setup


def _arch_series(m0: int, e0: int, b, n_steps: int) -> float:
    """sum of 4^(-(n+1)) log s_n over the normalized real duplication orbit."""
    b2, b4, b6, b8 = b
    with mpmath.workprec(240):
        big = mpmath.mpf(max(abs(m0), e0))
        m = mpmath.mpf(m0) / big
        e = mpmath.mpf(e0) / big
        f2, f4, f6, f8 = (mpmath.mpf(v) for v in (b2, b4, b6, b8))
        total = mpmath.mpf(0)
        w = mpmath.mpf(1)
        for _ in range(n_steps):
            m2, e2 = m * m, e * e
            phi = m2 * m2 - f4 * m2 * e2 - 2 * f6 * m * e * e2 - f8 * e2 * e2
            psi = e * (4 * m * m2 + f2 * m2 * e + 2 * f4 * m * e2 + f6 * e * e2)
            s = max(abs(phi), abs(psi))
            w /= 4
            total += w * mpmath.log(s)
            m, e = phi / s, psi / s
        return float(total)


def _padic_series(m0: int, e0: int, b, p: int, r_p: int, n_steps: int) -> float:
    """sum of 4^(-(n+1)) v_p(g_n) log p via iteration mod p^K.

    Every g_n divides the resultant, so each step cancels at most r_p powers
    of p; the residues stay correct because unit factors of g_n scale the
    pair projectively.
    """
    b2, b4, b6, b8 = b
    avail = (n_steps + 2) * r_p + 6
    mod = p ** avail
    m, e = m0 % mod, e0 % mod
    total = 0.0
    w = 1.0
    for _ in range(n_steps):
        m2, e2 = m * m % mod, e * e % mod
        phi = (m2 * m2 - b4 * m2 * e2 - 2 * b6 * m * e * e2 - b8 * e2 * e2) % mod
        psi = e * (4 * m * m2 + b2 * m2 * e + 2 * b4 * m * e2 + b6 * e * e2) % mod
        v = 0
        a1, a2_ = phi, psi
        while v <= r_p and a1 % p == 0 and a2_ % p == 0:
            a1 //= p
            a2_ //= p
            v += 1
        if v > r_p:
            raise AssertionError("cancellation exceeded the resultant bound")
        w /= 4
        if v:
            total += w * v
            avail -= v
            if avail <= r_p + 2:
                raise AssertionError("p-adic precision exhausted")
            mod = p ** avail
            m, e = a1 % mod, a2_ % mod
        else:
            m, e = phi, psi
    return total * math.log(p)


def canonical_height_with_error(E: WeierstrassCurve, P: Point,
                                eps: float = 1e-8) -> tuple:
    """(value, bound) with |value - hhat(P)| <= bound <= eps."""
    if P.is_infinity:
        return 0.0, 0.0
    if not E.contains(P):
        raise ValueError("point is not on the curve")
    if E.point_order(P, cap=16) is not None:
        return 0.0, 0.0
    setup = _height_setup(E)
    x = Fraction(P.x) * setup.u ** 2
    m, e = x.numerator, x.denominator
    log_r = _log_big(setup.resultant) if abs(setup.resultant) > 1 else 0.0
    spread = setup.d_inf + log_r + 1.0
    n_steps = max(6, math.ceil(math.log(spread / (1.5 * eps), 4)))
    total = _log_big(max(abs(m), e))
    total += _arch_series(m, e, setup.b, n_steps)
    for p, r_p in setup.primes:
        total -= _padic_series(m, e, setup.b, p, r_p, n_steps)
    # truncation tail plus double-rounding slop from the float assembly
    bound = (spread / 3.0 * 4.0 ** (-n_steps)
             + 5e-15 * (1.0 + abs(total) + spread))
    return total, bound


def canonical_height(E: WeierstrassCurve, P: Point, eps: float = 1e-8) -> float:
    return canonical_height_with_error(E, P, eps)[0]


def height_pairing(E: WeierstrassCurve, P: Point, Q: Point,
                   eps: float = 1e-8) -> float:
    """(hhat(P+Q) - hhat(P) - hhat(Q)) / 2, symmetric by construction."""
    s = canonical_height(E, E.add(P, Q), eps)
    lo, hi = sorted([canonical_height(E, P, eps), canonical_height(E, Q, eps)])
    return (s - lo - hi) / 2              # fixed order keeps it bitwise symmetric


# ------------------------------- Gram matrices -----------------------------


@dataclass(frozen=True)
class HeightGram:
    points: tuple
    matrix: tuple           # rows of floats
    eps: float              # per-entry error bound


def gram_matrix(E: WeierstrassCurve, points, eps: float = 1e-8,
                threads: int | None = None) -> HeightGram:
    pts = tuple(points)
    n = len(pts)
    pairs = [(i, j) for i in range(n) for j in range(i, n)]

    def entry(ij):
        i, j = ij
        if i == j:
            return ij, canonical_height(E, pts[i], eps)
        return ij, height_pairing(E, pts[i], pts[j], eps)

    workers = _thread_count(threads)
    out = {}
    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            for ij, v in ex.map(entry, pairs):
                out[ij] = v
    else:
        for ij in pairs:
            key, v = entry(ij)
            out[key] = v
    rows = tuple(tuple(out[(min(i, j), max(i, j))] for j in range(n))
                 for i in range(n))
    return HeightGram(points=pts, matrix=rows, eps=2 * eps)


def gram_rank(E: WeierstrassCurve, points, eps: float = 1e-8,
              tol: float = 1e-5, threads: int | None = None) -> tuple:
    """(rank, independent_indices, regulator): a certified lower bound.

    Interval Gaussian elimination with diagonal pivoting; a pivot interval
    containing tol raises InconclusiveTolerance rather than guessing.
    """
    gram = gram_matrix(E, points, eps, threads=threads)
    n = len(gram.points)
    a = [list(row) for row in gram.matrix]
    err = [[gram.eps] * n for _ in range(n)]
    alive = list(range(n))
    chosen = []
    regulator = 1.0
    while alive:
        # the Schur complement of a positive semidefinite matrix stays
        # positive semidefinite, so diagonal pivoting is enough
        certified = [i for i in alive if a[i][i] - err[i][i] > tol]
        if certified:
            piv = max(certified, key=lambda i: a[i][i])
        elif all(a[i][i] + err[i][i] <= tol for i in alive):
            break
        else:
            worst = max(alive, key=lambda i: a[i][i] + err[i][i])
            raise InconclusiveTolerance(
                f"pivot {a[worst][worst]:.3g} +- {err[worst][worst]:.3g} "
                f"straddles tol={tol:.3g}")
        v, ev = a[piv][piv], err[piv][piv]
        chosen.append(piv)
        regulator *= v
        alive.remove(piv)
        for i in alive:
            fi, efi = a[i][piv], err[i][piv]
            for j in alive:
                fj, efj = a[piv][j], err[piv][j]
                a[i][j] -= fi * fj / v
                err[i][j] += (abs(fi) * efj + abs(fj) * efi
                              + abs(fi * fj) * ev / v) / v + 1e-17
    return len(chosen), tuple(sorted(chosen)), regulator


# --------------------------- integral points -------------------------------


def _canonical_pair(E: WeierstrassCurve, P: Point) -> tuple:
    """Between P and -P keep the branch with the larger y."""
    Q = E.neg(P)
    y = max(Fraction(P.y), Fraction(Q.y))
    return (Fraction(P.x), y)


def integral_points_in_span(E: WeierstrassCurve, gens, bound) -> list:
    """Integral (x, y) pairs among sums n_1 g_1 + ... + n_r g_r + torsion.

    bound: an int caps the coefficient box |n_i| <= bound; a float caps the
    canonical height, with the box radius derived from the Gram form.
    """
    gens = list(gens)
    tor = torsion_subgroup(E).points
    if isinstance(bound, bool) or not isinstance(bound, (int, float)):
        raise TypeError("bound must be an int box radius or a float hhat cap")
    cap = None
    if isinstance(bound, int):
        radius = bound
    else:
        cap = float(bound)
        if not gens:
            radius = 0
        else:
            g = gram_matrix(E, gens).matrix
            import numpy
            lam = min(numpy.linalg.eigvalsh(numpy.array(g, dtype=float)))
            if lam <= 0:
                raise ValueError("generators are not certified independent")
            radius = math.isqrt(int(cap / lam)) + 1

    combos = []
    for ns in product(range(-radius, radius + 1), repeat=len(gens)):
        if cap is not None and gens:
            q = sum(ns[i] * ns[j] * g[i][j]
                    for i in range(len(gens)) for j in range(len(gens)))
            if q > cap + 1e-6:
                continue
            combos.append((q, ns))
        else:
            combos.append((sum(v * v for v in ns), ns))
    combos.sort()

    seen = set()
    out = []
    for _, ns in combos:
        S = Point.infinity()
        for c, gpt in zip(ns, gens):
            S = E.add(S, E.mul(c, gpt))
        for t in tor:
            P = E.add(S, t)
            if P.is_infinity:
                continue
            x = Fraction(P.x)
            if x.denominator != 1:
                continue
            pair = _canonical_pair(E, P)
            assert pair[1].denominator == 1    # monic quadratic in y
            if pair not in seen:
                seen.add(pair)
                out.append(pair)
    return sorted(out)


# ------------------------------ quartic sieve ------------------------------


@dataclass(frozen=True)
class Quartic:
    q0: Fraction
    q1: Fraction
    q2: Fraction
    q3: Fraction
    q4: Fraction

    def __post_init__(self):
        for name in ("q0", "q1", "q2", "q3", "q4"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not self.q4 and not self.q3:
            raise ValueError("need q4 != 0 or q3 != 0")
        if poly_sqrt(self.poly()) is not None:
            raise DegenerateSquareQuartic("Q is the square of a quadratic")

    def poly(self) -> Poly:
        return Poly([self.q0, self.q1, self.q2, self.q3, self.q4])

    def __call__(self, x):
        return self.poly()(x)


def quartic_from_text(line: str) -> Quartic:
    vals = [Fraction(s) for s in line.split()]
    if len(vals) != 5:
        raise ValueError("quartic line needs five rationals q0..q4")
    return Quartic(*vals)


_SIEVE_CANDIDATES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                     59, 61, 67, 71, 73, 79, 83, 89, 97, 101)


def _sieve_primes(coeffs, count: int = 16) -> list:
    """The odd primes filtering this quartic hardest, ties to the smaller
    prime, so the chosen set is deterministic."""
    import numpy

    scored = []
    for p in _SIEVE_CANDIDATES:
        c = [v % p for v in coeffs]
        mm = numpy.arange(p, dtype=numpy.int64)[:, None]
        nn = numpy.arange(p, dtype=numpy.int64)[None, :]
        f = (((c[4] * mm + c[3] * nn) * mm % p + c[2] * nn * nn % p) * mm % p
             + c[1] * nn ** 3 % p) * mm % p
        f = (f + c[0] * nn ** 4) % p
        ok = numpy.zeros(p, dtype=bool)
        ok[(mm.ravel() ** 2) % p] = True
        table = ok[f]
        scored.append((float(table.mean()), p, table))
    scored.sort(key=lambda t: (t[0], t[1]))
    return [(p, table) for _, p, table in scored[:count]]


def quartic_search(q: Quartic, height_bound: int,
                   threads: int | None = None) -> list:
    """All rational (x, y), y >= 0, with y^2 = Q(x) and x = m/n in lowest
    terms, |m|, n <= height_bound; residue masks over 16 sieve primes cut the
    box before exact square tests."""
    import numpy

    H = int(height_bound)
    if H < 1:
        raise ValueError("height bound must be >= 1")
    d = 1
    for c in (q.q0, q.q1, q.q2, q.q3, q.q4):
        d = d * c.denominator // math.gcd(d, c.denominator)
    # (x, y) on Q <-> (x, d y) on d^2 Q, which has integer coefficients
    coeffs = [int(c * d * d) for c in (q.q0, q.q1, q.q2, q.q3, q.q4)]
    primes = _sieve_primes(coeffs)

    ms = numpy.arange(-H, H + 1, dtype=numpy.int64)
    mres = {p: numpy.mod(ms, p) for p, _ in primes}
    tables = dict(primes)

    def strip(lo: int, hi: int) -> list:
        found = []
        sel = slice(lo, hi)
        for n in range(1, H + 1):
            mask = numpy.ones(hi - lo, dtype=bool)
            for p, _ in primes:
                mask &= tables[p][mres[p][sel], n % p]
            for m in ms[sel][mask]:
                m = int(m)
                if math.gcd(m, n) != 1:
                    continue
                f = (((coeffs[4] * m + coeffs[3] * n) * m
                      + coeffs[2] * n * n) * m
                     + coeffs[1] * n ** 3) * m + coeffs[0] * n ** 4
                if f < 0:
                    continue
                r = math.isqrt(f)
                if r * r == f:
                    found.append((Fraction(m, n), Fraction(r, d * n * n)))
        return found

    workers = _thread_count(threads)
    total = 2 * H + 1
    if workers > 1:
        edges = [total * k // workers for k in range(workers + 1)]
        spans = [(edges[k], edges[k + 1]) for k in range(workers)
                 if edges[k] < edges[k + 1]]
        results = []
        with ThreadPoolExecutor(max_workers=workers) as ex:
            for part in ex.map(lambda s: strip(*s), spans):
                results.extend(part)
    else:
        results = strip(0, total)
    return sorted(set(results))


# ------------------------------ text formats -------------------------------


def points_from_text(text: str) -> list:
    """Lines of `x_num/x_den y_num/y_den` (plain integers allowed)."""
    pts = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"point line needs two rationals: {line!r}")
        pts.append(Point(Fraction(parts[0]), Fraction(parts[1])))
    return pts


def points_to_text(points) -> str:
    return "".join(f"{Fraction(P.x)} {Fraction(P.y)}\n" for P in points)


def results_json_lines(E: WeierstrassCurve, pairs, eps: float = 1e-8) -> str:
    """One JSON object per (x, y) pair, with its canonical height."""
    lines = []
    for x, y in pairs:
        hhat = canonical_height(E, Point(Fraction(x), Fraction(y)), eps)
        lines.append(json.dumps({"x": str(Fraction(x)), "y": str(Fraction(y)),
                                 "hhat": hhat}))
    return "".join(s + "\n" for s in lines)
