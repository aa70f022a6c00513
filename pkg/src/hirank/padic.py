"""p-adic Newton lifting of polynomial systems and rational recognition.

A solution of F(x) = 0 mod p with invertible Jacobian lifts to arbitrarily
high powers of p, doubling the precision exponent each round.  Derivatives
are never formed symbolically: the Jacobian is approximated by one-sided
finite differences with step p^ceil(k/2) at working precision p^k, which
determines it to half precision; two linear corrections with that one
Jacobian then achieve the full doubling k -> 2k.

Once the residues are close enough, rational_reconstruct recognizes each
coordinate as a fraction n/d with |n|, d <= sqrt(m/2) via the half-extended
Euclidean algorithm (2-dimensional lattice reduction), and
lift_and_recognize confirms the recognized vector by exact substitution
before returning it.  An unverified vector is never returned.

Systems are black-box callables over a commutative ring; the Zmod element
type below makes ordinary polynomial code work unchanged mod p^k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence


class SingularJacobian(ArithmeticError):
    """Finite-difference Jacobian not invertible mod p at the start point."""


class NotARoot(ValueError):
    """Start point does not satisfy the system mod p."""


class NoReconstruction(ValueError):
    """No fraction within the numerator/denominator bound for this residue."""


class NoConvergence(RuntimeError):
    """Precision budget exhausted without a verified rational solution."""


class Zmod:
    """Element of Z/m.  Coerces ints and Fractions with unit denominator,
    so Fraction-oriented polynomial code evaluates mod m unchanged."""

    __slots__ = ("m", "v")

    def __init__(self, v: int, m: int):
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "v", v % m)

    def __setattr__(self, *a):
        raise AttributeError("Zmod is immutable")

    def _coerce(self, other) -> int | None:
        if isinstance(other, Zmod):
            if other.m != self.m:
                raise ValueError("mixed moduli")
            return other.v
        if isinstance(other, int):
            return other % self.m
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.m) % self.m
        return None

    def __add__(self, other):
        w = self._coerce(other)
        return NotImplemented if w is None else Zmod(self.v + w, self.m)

    __radd__ = __add__

    def __sub__(self, other):
        w = self._coerce(other)
        return NotImplemented if w is None else Zmod(self.v - w, self.m)

    def __rsub__(self, other):
        w = self._coerce(other)
        return NotImplemented if w is None else Zmod(w - self.v, self.m)

    def __mul__(self, other):
        w = self._coerce(other)
        return NotImplemented if w is None else Zmod(self.v * w, self.m)

    __rmul__ = __mul__

    def __truediv__(self, other):
        w = self._coerce(other)
        return NotImplemented if w is None else Zmod(self.v * pow(w, -1, self.m), self.m)

    def __rtruediv__(self, other):
        w = self._coerce(other)
        if w is None:
            return NotImplemented
        return Zmod(w * pow(self.v, -1, self.m), self.m)

    def __pow__(self, e: int):
        return Zmod(pow(self.v, e, self.m), self.m)

    def __neg__(self):
        return Zmod(-self.v, self.m)

    def __eq__(self, other):
        w = self._coerce(other)
        return NotImplemented if w is None else self.v == w

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __hash__(self):
        return hash((self.m, self.v))

    def __repr__(self):
        return f"Zmod({self.v} mod {self.m})"


@dataclass(frozen=True)
class PadicVector:
    """Residue vector known mod p^k."""

    p: int
    k: int
    values: tuple[int, ...]

    def __post_init__(self):
        m = self.p**self.k
        assert all(0 <= v < m for v in self.values)

    @property
    def modulus(self) -> int:
        return self.p**self.k


def _eval_system(funcs, xs: Sequence[int], modulus: int) -> list[int]:
    args = [Zmod(x, modulus) for x in xs]
    out = []
    for f in funcs:
        val = f(*args)
        out.append(int(val) % modulus if isinstance(val, (Zmod, int)) else int(val))
    return out


def _solve_unit_system(J: list[list[int]], b: list[int], modulus: int, p: int) -> list[int]:
    """Solve J x = b mod `modulus` by elimination on pivots that are units
    mod p.  Raises SingularJacobian when no unit pivot exists."""
    n = len(b)
    A = [row[:] + [bi] for row, bi in zip(J, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] % p != 0), None)
        if piv is None:
            raise SingularJacobian("finite-difference Jacobian singular mod p")
        A[col], A[piv] = A[piv], A[col]
        inv = pow(A[col][col], -1, modulus)
        A[col] = [a * inv % modulus for a in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                c = A[r][col]
                A[r] = [(a - c * ac) % modulus for a, ac in zip(A[r], A[col])]
    return [A[i][n] for i in range(n)]


def _fd_jacobian(funcs, xs: list[int], p: int, k: int, modulus: int) -> list[list[int]]:
    """One-sided finite differences with step h = p^ceil(k/2); the quotient
    matrix agrees with the true Jacobian mod p^ceil(k/2)."""
    n = len(xs)
    h = p ** ((k + 1) // 2)
    base = _eval_system(funcs, xs, modulus)
    J = [[0] * n for _ in range(n)]
    for j in range(n):
        shifted = list(xs)
        shifted[j] = (shifted[j] + h) % modulus
        vals = _eval_system(funcs, shifted, modulus)
        for i in range(n):
            diff = (vals[i] - base[i]) % modulus
            assert diff % h == 0
            J[i][j] = diff // h
    return J


def hensel_newton(funcs: Sequence[Callable], p: int, x0: Sequence[int],
                  target_k: int) -> PadicVector:
    """Lift a mod-p solution of a square polynomial system to mod p^(2^m)
    with 2^m >= target_k.

    Each doubling level computes one finite-difference Jacobian at step
    p^ceil(k/2) and applies two linear Newton corrections with it, which
    takes a solution mod p^k to one mod p^2k.
    """
    funcs = list(funcs)
    if len(funcs) != len(x0):
        raise ValueError("system must be square (one equation per unknown)")
    x = [int(v) % p for v in x0]
    if any(r % p != 0 for r in _eval_system(funcs, x, p)):
        raise NotARoot(f"start point is not a root of the system mod {p}")
    # invertibility mod p is a property of the start point alone
    _solve_unit_system(_fd_jacobian(funcs, x, p, 1, p * p), [0] * len(x), p, p)
    k = 1
    if target_k < 1:
        raise ValueError("target_k must be >= 1")
    while k < target_k:
        k2 = 2 * k
        modulus = p**k2
        J = _fd_jacobian(funcs, x, p, k, modulus)
        for _ in range(2):
            resid = _eval_system(funcs, x, modulus)
            delta = _solve_unit_system(J, resid, modulus, p)
            x = [(xi - di) % modulus for xi, di in zip(x, delta)]
        k = k2
    return PadicVector(p=p, k=k, values=tuple(x))


def rational_reconstruct(a: int, m: int) -> Fraction:
    """Recognize the residue a mod m as a fraction n/d with |n| <= sqrt(m/2),
    0 < d <= sqrt(m/2), gcd(n, d) = 1, gcd(d, m) = 1.

    Half-extended Euclid on (m, a); the solution is unique when it exists.
    Raises NoReconstruction when no fraction meets the bounds.
    """
    if not 0 <= a < m:
        raise ValueError("need 0 <= a < m")
    bound = math.isqrt(m // 2)
    r0, r1 = m, a
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    n, d = r1, t1
    if d < 0:
        n, d = -n, -d
    if d == 0 or d > bound:
        raise NoReconstruction(f"no n/d with |n|,d <= {bound} for residue {a}")
    if math.gcd(n, d) != 1 or math.gcd(d, m) != 1:
        raise NoReconstruction(f"residue {a} mod {m} has no admissible fraction")
    assert (n - a * d) % m == 0
    return Fraction(n, d)


def lift_and_recognize(funcs: Sequence[Callable], p: int, x0: Sequence[int],
                       max_k: int = 256) -> list[Fraction]:
    """Lift mod-p solution until every coordinate reconstructs to a rational
    and the rational vector satisfies the system exactly; then return it.

    The exact verification is mandatory: a vector that reconstructs but
    fails exact substitution is treated as not converged.  Raises
    NoConvergence once the precision exponent would exceed max_k.
    """
    funcs = list(funcs)
    k = 8
    while k <= max_k:
        lifted = hensel_newton(funcs, p, x0, k)
        try:
            candidate = [rational_reconstruct(v, lifted.modulus) for v in lifted.values]
        except NoReconstruction:
            k *= 2
            continue
        if all(f(*candidate) == 0 for f in funcs):
            return candidate
        k *= 2
    raise NoConvergence(f"no verified rational solution up to precision {p}^{max_k}")


@dataclass(frozen=True)
class PolySystem:
    """Square polynomial map parsed from the sparse text format."""

    arity: int
    funcs: tuple[Callable, ...]
    source: str

    def __iter__(self):
        return iter(self.funcs)

    def __len__(self):
        return len(self.funcs)


def _make_sparse_eval(terms):
    def evaluate(*xs):
        acc = 0
        for c, exps in terms:
            t = c
            for x, e in zip(xs, exps):
                if e:
                    t = t * x**e
            acc = acc + t
        return acc

    return evaluate


def parse_poly_system(text: str) -> PolySystem:
    """Parse a polynomial map, one polynomial per line.

    Terms are whitespace separated, each written `coeff:e1,e2,...,en` with
    one exponent per variable (a bare `coeff` means the constant term).
    Blank lines and lines starting with # are skipped.  Example, the map
    (3x - 1, xy - 2):

        3:1,0 -1:0,0
        1:1,1 -2:0,0
    """
    polys = []
    arity = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        terms = []
        for tok in line.split():
            coeff_s, sep, exps_s = tok.partition(":")
            try:
                c = int(coeff_s)
                exps = tuple(int(e) for e in exps_s.split(",")) if sep else ()
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad term {tok!r}") from exc
            if any(e < 0 for e in exps):
                raise ValueError(f"line {lineno}: negative exponent in {tok!r}")
            if exps:
                if arity is None:
                    arity = len(exps)
                elif len(exps) != arity:
                    raise ValueError(f"line {lineno}: expected {arity} exponents")
            terms.append((c, exps))
        polys.append(terms)
    if not polys:
        raise ValueError("empty polynomial system")
    if arity is None:
        arity = 0
    return PolySystem(arity=arity, funcs=tuple(_make_sparse_eval(t) for t in polys),
                      source=text)


def rational_poly_roots(f, prime_attempts: int = 200) -> list:
    """All distinct rational roots of a nonzero rational polynomial.

    Coefficients of division polynomials of record curves run to thousands
    of digits, so divisor enumeration of the constant term is hopeless.
    Instead: reduce the squarefree part mod a prime where it stays
    squarefree, read off the mod-p roots, lift each by hensel_newton, and
    recognize with rational_reconstruct; every candidate is verified by
    exact substitution, so the output is unconditionally correct.
    """
    from .arith import Poly, PolyModP, poly_gcd
    from .intmath import primes_below

    if not isinstance(f, Poly) or not f:
        raise ValueError("need a nonzero polynomial")
    if f.degree == 0:
        return []
    roots = []
    # pull out x = 0 so the numerator bound via the constant term applies
    coeffs = list(f.coeffs)
    if not coeffs[0]:
        roots.append(Fraction(0))
        while not coeffs[0]:
            coeffs.pop(0)
        f = Poly(coeffs)
        if f.degree == 0:
            return roots
    g = f.divrem(poly_gcd(f, f.derivative()))[0]
    _, g = g.content_and_primitive()
    lc = int(g.leading())
    a0 = int(g[0])
    # any rational root n/d has n | a0 and d | lc
    bound_bits = 2 * max(abs(a0), abs(lc)).bit_length() + 4
    for p in primes_below(10**6)[2:]:
        if lc % p == 0:
            continue
        gp = PolyModP.from_poly(g, p)
        if gp.gcd(gp.derivative()).degree == 0:
            break
        prime_attempts -= 1
        if prime_attempts <= 0:
            raise RuntimeError("no prime with squarefree reduction found")
    max_k = 8
    while p**max_k < 2 ** (bound_bits + 2):
        max_k *= 2
    for r in gp.roots():
        try:
            val = lift_and_recognize([lambda x: g(x)], p, [r], max_k=max_k)
        except NoConvergence:
            continue
        roots.append(val[0])
    return sorted(set(roots))
