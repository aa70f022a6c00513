"""Small integer number theory helpers shared across the package.

Everything here is exact: Python ints in, Python ints out.  The factoring
routine is best effort (trial division plus Pollard rho with a work cap) and
says so in its return value; callers that need soundness treat the unfactored
cofactor explicitly.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction


def primes_below(n: int) -> list[int]:
    """All primes < n by a plain sieve of Eratosthenes."""
    if n <= 2:
        return []
    mark = bytearray([1]) * n
    mark[0] = mark[1] = 0
    for p in range(2, math.isqrt(n - 1) + 1):
        if mark[p]:
            mark[p * p :: p] = bytearray(len(mark[p * p :: p]))
    return [i for i in range(n) if mark[i]]


_SMALL_PRIMES = primes_below(1000)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24 via a fixed witness set."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:20]:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # Witnesses covering at least the deterministic 64-bit range, then some.
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int, rng: random.Random, max_iters: int) -> int:
    """One rho attempt with Brent cycling; returns a nontrivial factor or 1."""
    if n % 2 == 0:
        return 2
    y = rng.randrange(1, n)
    c = rng.randrange(1, n)
    m = 128
    g = r = q = 1
    iters = 0
    while g == 1 and iters < max_iters:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
            iters += m
        r *= 2
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    return g if g != n else 1


def factor_best_effort(n: int, trial_bound: int = 100_000,
                       rho_iters: int = 200_000) -> tuple[dict[int, int], int]:
    """Factor |n| as far as practical.

    Returns (factors, cofactor): factors maps prime -> exponent, cofactor is
    1 when the factorization is complete, otherwise the unfactored (composite)
    remainder.  Deterministic: the rho RNG is seeded from n.
    """
    n = abs(n)
    factors: dict[int, int] = {}
    if n <= 1:
        return factors, 1
    for p in primes_below(trial_bound):
        if p * p > n:
            break
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    if n == 1:
        return factors, 1
    rng = random.Random(n)
    stack = [n]
    cofactor = 1
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        d = 1
        for _ in range(3):
            d = _pollard_rho(m, rng, rho_iters)
            if d not in (1, m):
                break
        if d in (1, m):
            cofactor *= m
        else:
            stack.append(d)
            stack.append(m // d)
    return factors, cofactor


def is_perfect_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def isqrt_frac_floor(q: Fraction) -> int:
    """floor(sqrt(q)) for a nonnegative rational q."""
    assert q >= 0
    n, d = q.numerator, q.denominator
    return math.isqrt(n * d) // d


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    """Combine x≡r1 (m1), x≡r2 (m2) for coprime moduli; returns (r, m1*m2)."""
    g, s, _ = xgcd(m1, m2)
    assert g == 1, "moduli must be coprime"
    m = m1 * m2
    return (r1 + (r2 - r1) * s % m2 * m1) % m, m


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended Euclid: returns (g, s, t) with s*a + t*b = g = gcd(a, b)."""
    r0, r1 = a, b
    s0, s1 = 1, 0
    t0, t1 = 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return r0, s0, t0
