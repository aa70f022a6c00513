"""Specialization scoring: N_p tables over residues, fixed-point log-weights,
and a blockwise sieve for the t with the largest sum of log(N_p / p).

Weights are signed 16-bit at scale 2^(-12).  All scoring paths sum the same
integers, so the sieve is bitwise-identical to naive per-t scoring and
independent of thread count.
"""

import hashlib
import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .curves import WeierstrassCurve
from .families import CurveFamily, family_to_text

SCALE = 1 << 12
BAD_FIBER = 0      # a real fiber always counts the point at infinity


def _thread_count(threads):
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("HIRANK_THREADS")
    return max(1, int(env)) if env else 1


def _quantize(count: int, p: int) -> int:
    # one rounding rule everywhere keeps tables reproducible
    return round(math.log(count / p) * SCALE)


@dataclass(frozen=True)
class NpTable:
    p: int
    counts: tuple      # counts[t] = #fiber(F_p) at t, BAD_FIBER where bad
    weights: tuple     # fixed-point log(counts[t]/p), 0 at bad fibers


@dataclass(frozen=True)
class SieveConfig:
    prime_bound: int
    t_range: tuple            # inclusive [T0, T1] of numerators
    top_k: int
    denominator: int = 1
    block_size: int = 1 << 20

    def __post_init__(self):
        if self.prime_bound < 3:
            raise ValueError("prime bound must be at least 3")
        if self.t_range[0] > self.t_range[1]:
            raise ValueError("empty t range")
        if self.top_k < 1:
            raise ValueError("top_k must be positive")
        if self.denominator < 1 or self.block_size < 1:
            raise ValueError("bad grid parameters")


@dataclass(frozen=True)
class Candidate:
    t: Fraction
    score: float


def _poly_mod(poly, p: int) -> list:
    out = []
    for c in poly.coeffs:
        c = Fraction(c)
        out.append(c.numerator * pow(c.denominator, -1, p) % p)
    return out


def _eval_mod(coeffs: list, t: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * t + c) % p
    return acc


def _count_mod2(fam: CurveFamily, t: int) -> int:
    a = [_eval_mod(_poly_mod(c, 2), t, 2) for c in fam.coefficients()]
    n = 1
    for x in (0, 1):
        for y in (0, 1):
            lhs = (y * y + a[0] * x * y + a[2] * y) % 2
            rhs = (x ** 3 + a[1] * x * x + a[3] * x + a[4]) % 2
            n += lhs == rhs
    return n


def _build_one(fam: CurveFamily, p: int) -> NpTable:
    import numpy

    disc = _poly_mod(fam.discriminant(), p)
    bad = [_eval_mod(disc, t, p) == 0 for t in range(p)]
    if p == 2:
        counts = [BAD_FIBER if bad[t] else _count_mod2(fam, t)
                  for t in range(2)]
    else:
        a1, a2, a3, a4, a6 = fam.coefficients()
        b2 = a1 * a1 + a2 * 4
        b4 = a3 * a1 + a4 * 2
        b6 = a3 * a3 + a6 * 4
        cb2, cb4, cb6 = (_poly_mod(b, p) for b in (b2, b4, b6))
        ts = numpy.arange(p, dtype=numpy.int64)
        xs = ts[None, :]

        def horner(cs):
            acc = numpy.zeros(p, dtype=numpy.int64)
            for c in reversed(cs):
                acc = (acc * ts + c) % p
            return acc

        vb2, vb4, vb6 = horner(cb2), horner(cb4), horner(cb6)
        # complete the square: count chi(4x^3 + b2 x^2 + 2b4 x + b6) per fiber
        f = ((4 * xs + vb2[:, None]) * xs % p + 2 * vb4[:, None]) * xs % p
        f = (f + vb6[:, None]) % p
        square = numpy.zeros(p, dtype=bool)
        square[(ts * ts) % p] = True
        chi = numpy.where(f == 0, 0, numpy.where(square[f], 1, -1))
        ns = p + 1 + chi.sum(axis=1)
        counts = [BAD_FIBER if bad[t] else int(ns[t]) for t in range(p)]
    for t, n in enumerate(counts):
        if n != BAD_FIBER:
            assert (n - p - 1) ** 2 <= 4 * p, (p, t, n)   # Hasse
    weights = tuple(0 if n == BAD_FIBER else _quantize(n, p) for n in counts)
    return NpTable(p=p, counts=tuple(counts), weights=weights)


def build_np_tables(fam: CurveFamily, prime_bound: int,
                    threads: int | None = None) -> tuple:
    """(tables, skipped): one NpTable per prime below the bound, skipping
    primes that divide a coefficient denominator."""
    from sympy import primerange

    den = 1
    for c in fam.coefficients():
        for q in c.coeffs:
            q = Fraction(q)
            den = den * q.denominator // math.gcd(den, q.denominator)
    primes = list(primerange(2, prime_bound))
    skipped = [p for p in primes if den % p == 0]
    good = [p for p in primes if den % p != 0]
    workers = _thread_count(threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            tables = list(ex.map(lambda p: _build_one(fam, p), good))
    else:
        tables = [_build_one(fam, p) for p in good]
    return tables, skipped


# -------------------------------- scoring ----------------------------------


def _score_fixed(tables, n: int, d: int = 1) -> int:
    # grid semantics: primes dividing the grid denominator contribute 0 for
    # every n, whether or not n/d reduces
    total = 0
    for tab in tables:
        if d % tab.p == 0:
            continue
        idx = n * pow(d, -1, tab.p) % tab.p
        total += tab.weights[idx]
    return total


def mestre_score(tables, t) -> float:
    """De-quantized sum of the fixed-point weights at t (larger = better).

    A Fraction t scores with its reduced denominator; grid searches over
    n/d keep d fixed instead (see sieve_search).
    """
    if not tables:
        raise ValueError("no tables")
    t = Fraction(t)
    return _score_fixed(tables, t.numerator, t.denominator) / SCALE


def sieve_search(tables, cfg: SieveConfig,
                 threads: int | None = None) -> list:
    """Top cfg.top_k candidates over the grid n/denominator, n in t_range.

    Blockwise accumulation over int32 arrays; totals are the same integers
    naive scoring produces, so results never depend on blocking or threads.
    Ties break toward the smaller numerator.
    """
    import numpy

    tables = [tab for tab in tables if tab.p < cfg.prime_bound]
    if not tables:
        raise ValueError("no tables below the prime bound")
    d = cfg.denominator
    active = [(tab.p, pow(d, -1, tab.p),
               numpy.asarray(tab.weights, dtype=numpy.int16))
              for tab in tables if d % tab.p != 0]
    t0, t1 = cfg.t_range

    def scan(lo: int, hi: int) -> list:
        ns = numpy.arange(lo, hi, dtype=numpy.int64)
        scores = numpy.zeros(hi - lo, dtype=numpy.int32)
        for p, inv, w in active:
            scores += w[(ns % p) * inv % p]
        k = min(cfg.top_k, hi - lo)
        if k == hi - lo:
            best = numpy.arange(hi - lo)
        else:
            # keep every tie at the cutoff so the global sort sees exactly
            # what naive scoring would
            cut = numpy.partition(scores, hi - lo - k)[hi - lo - k]
            best = numpy.nonzero(scores >= cut)[0]
        return [(int(scores[i]), int(ns[i])) for i in best]

    blocks = []
    lo = t0
    while lo <= t1:
        hi = min(lo + cfg.block_size, t1 + 1)
        blocks.append((lo, hi))
        lo = hi
    workers = _thread_count(threads)
    found = []
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            for part in ex.map(lambda b: scan(*b), blocks):
                found.extend(part)
    else:
        for b in blocks:
            found.extend(scan(*b))
    found.sort(key=lambda sn: (-sn[0], sn[1]))
    return [Candidate(t=Fraction(n, d), score=s / SCALE)
            for s, n in found[:cfg.top_k]]


def score_curve(E: WeierstrassCurve, prime_bound: int) -> float:
    """The same heuristic for a single curve: sum of quantized log(N_p/p)
    over p below the bound, weight 0 at bad reduction."""
    import numpy
    from sympy import primerange

    from .curves import invariants, reduce_mod_p

    b2, b4, b6, b8, c4, c6, disc, j = invariants(E)
    den = 1
    for a in (E.a1, E.a2, E.a3, E.a4, E.a6):
        den = den * Fraction(a).denominator // math.gcd(
            den, Fraction(a).denominator)
    total = 0
    for p in primerange(2, prime_bound):
        if den % p == 0 or Fraction(disc).numerator % p == 0:
            continue
        if p == 2:
            n = 1 + len(reduce_mod_p(E, 2).affine_points())
        else:
            vb = [Fraction(v).numerator * pow(Fraction(v).denominator, -1, p)
                  % p for v in (b2, b4, b6)]
            xs = numpy.arange(p, dtype=numpy.int64)
            f = ((4 * xs + vb[0]) * xs % p + 2 * vb[1]) * xs % p
            f = (f + vb[2]) % p
            square = numpy.zeros(p, dtype=bool)
            square[(xs * xs) % p] = True
            chi = numpy.where(f == 0, 0, numpy.where(square[f], 1, -1))
            n = int(p + 1 + chi.sum())
        total += _quantize(n, p)
    return total / SCALE


# ------------------------------- table cache -------------------------------

_MAGIC = b"HRNPT1\n"


def family_table_key(fam: CurveFamily) -> bytes:
    return hashlib.sha256(family_to_text(fam).encode()).digest()


def _write_uv(out: bytearray, n: int):
    while True:
        b = n & 0x7F
        n >>= 7
        if n:
            out.append(b | 0x80)
        else:
            out.append(b)
            return


def _read_uv(data: bytes, pos: int) -> tuple:
    n = shift = 0
    while True:
        b = data[pos]
        pos += 1
        n |= (b & 0x7F) << shift
        if not b & 0x80:
            return n, pos
        shift += 7


def save_tables(path, fam: CurveFamily, prime_bound: int, tables) -> None:
    out = bytearray(_MAGIC)
    out += family_table_key(fam)
    _write_uv(out, prime_bound)
    _write_uv(out, len(tables))
    for tab in tables:
        _write_uv(out, tab.p)
        for c in tab.counts:
            _write_uv(out, c)
        out += struct.pack(f"<{tab.p}h", *tab.weights)
    with open(path, "wb") as fh:
        fh.write(bytes(out))


def load_tables(path, fam: CurveFamily, prime_bound: int):
    """The cached tables, or None when the header does not match."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:len(_MAGIC)] != _MAGIC:
        raise ValueError("not a table cache file")
    pos = len(_MAGIC)
    key, pos = data[pos:pos + 32], pos + 32
    bound, pos = _read_uv(data, pos)
    if key != family_table_key(fam) or bound != prime_bound:
        return None
    count, pos = _read_uv(data, pos)
    tables = []
    for _ in range(count):
        p, pos = _read_uv(data, pos)
        counts = []
        for _ in range(p):
            c, pos = _read_uv(data, pos)
            counts.append(c)
        weights = struct.unpack_from(f"<{p}h", data, pos)
        pos += 2 * p
        tables.append(NpTable(p=p, counts=tuple(counts), weights=weights))
    return tables


def cached_np_tables(fam: CurveFamily, prime_bound: int, path,
                     threads: int | None = None) -> tuple:
    """(tables, skipped), loading from path when possible, building and
    saving otherwise."""
    if path is not None and os.path.exists(path):
        tables = load_tables(path, fam, prime_bound)
        if tables is not None:
            den = 1
            for c in fam.coefficients():
                for q in c.coeffs:
                    q = Fraction(q)
                    den = den * q.denominator // math.gcd(den, q.denominator)
            from sympy import primerange
            skipped = [p for p in primerange(2, prime_bound) if den % p == 0]
            return tables, skipped
    tables, skipped = build_np_tables(fam, prime_bound, threads=threads)
    if path is not None:
        save_tables(path, fam, prime_bound, tables)
    return tables, skipped
