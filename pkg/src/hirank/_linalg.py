"""Exact linear algebra over Q and Z used by the lattice and family code.

Matrices are lists of lists.  Rational routines expect Fractions (ints are
fine too, they coerce); integer routines expect Python ints and never
overflow.  Nothing here is tuned for size: ranks stay below ~30 everywhere in
this package.
"""

from __future__ import annotations

import math
from fractions import Fraction


def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0]) if B else 0
    assert all(len(r) == k for r in A)
    return [[sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m)]
            for i in range(n)]


def mat_transpose(A):
    return [list(col) for col in zip(*A)] if A else []


def mat_vec(A, v):
    return [sum(r[j] * v[j] for j in range(len(v))) for r in A]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _frac_rows(A):
    return [[Fraction(x) for x in row] for row in A]


def rref(A):
    """Reduced row echelon form over Q; returns (R, pivot_columns)."""
    R = _frac_rows(A)
    if not R:
        return R, []
    rows, cols = len(R), len(R[0])
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if R[i][c] != 0), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return R, pivots


def rank(A) -> int:
    return len(rref(A)[1])


def solve(A, b):
    """One solution of A x = b over Q, or None if inconsistent."""
    if not A:
        return []
    cols = len(A[0])
    aug = [list(row) + [bv] for row, bv in zip(A, b)]
    R, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for r, c in enumerate(pivots):
        x[c] = R[r][-1]
    return x


def nullspace(A):
    """Basis of {x : A x = 0} over Q, denominator-cleared to integer vectors."""
    if not A:
        return []
    cols = len(A[0])
    R, pivots = rref(A)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -R[r][fc]
        den = 1
        for x in v:
            den = den * x.denominator // math.gcd(den, x.denominator)
        w = [int(x * den) for x in v]
        g = 0
        for x in w:
            g = math.gcd(g, x)
        if g > 1:
            w = [x // g for x in w]
        basis.append(w)
    return basis


def bareiss_det(M) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(map(int, row)) for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if piv is None:
                return 0
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = A[k][k]
    return sign * A[-1][-1]


def hnf(A):
    """Row-style Hermite normal form of an integer matrix.

    Returns (H, U) with U unimodular, U A = H, H in echelon form with
    positive pivots and reduced entries above each pivot.  Zero rows of H
    sink to the bottom; the matching rows of U span the left kernel.
    """
    H = [list(map(int, row)) for row in A]
    rows = len(H)
    cols = len(H[0]) if rows else 0
    U = identity(rows)
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if H[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        H[r], H[piv] = H[piv], H[r]
        U[r], U[piv] = U[piv], U[r]
        # Clear below by gcd steps.
        for i in range(r + 1, rows):
            while H[i][c] != 0:
                q = H[r][c] // H[i][c]
                H[r] = [a - q * b for a, b in zip(H[r], H[i])]
                U[r] = [a - q * b for a, b in zip(U[r], U[i])]
                H[r], H[i] = H[i], H[r]
                U[r], U[i] = U[i], U[r]
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        for i in range(r):
            if H[r][c] != 0:
                q = H[i][c] // H[r][c]
                if q:
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
        r += 1
        if r == rows:
            break
    return H, U


def row_basis(A):
    """Basis (as integer rows in HNF) of the lattice generated by A's rows."""
    H, _ = hnf(A)
    return [row for row in H if any(row)]


def int_kernel(A):
    """Basis of {x in Z^n : A x = 0}; saturated (primitive) by construction."""
    At = mat_transpose(A)
    if not At:
        return identity(len(A[0]) if A else 0)
    H, U = hnf(At)
    ker = [U[i] for i in range(len(H)) if not any(H[i])]
    return ker


def lll_reduce_gram(gram, delta=Fraction(3, 4)):
    """LLL on a positive definite Gram matrix, without explicit vectors.

    Returns (G', U) with U unimodular and G' = U G U^T the Gram of the
    reduced basis.  The working Gram A is kept current under ~O(n) row
    operations; Gram-Schmidt data is recomputed from A after each change
    (O(n^3) small fractions, plenty fast at the ranks used here).
    """
    n = len(gram)
    if n == 0:
        return [], []
    U = identity(n)
    A = [[Fraction(x) for x in row] for row in gram]

    def gs():
        mu = [[Fraction(0)] * n for _ in range(n)]
        B = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = A[i][j] - sum(mu[j][k] * mu[i][k] * B[k]
                                  for k in range(j))
                mu[i][j] = s / B[j]
            B[i] = A[i][i] - sum(mu[i][k] ** 2 * B[k] for k in range(i))
            if B[i] <= 0:
                raise ValueError("gram matrix is not positive definite")
        return mu, B

    def row_sub(k, l, q):
        # b_k <- b_k - q b_l, mirrored into the cached Gram
        U[k] = [a - q * b for a, b in zip(U[k], U[l])]
        new_kk = A[k][k] - 2 * q * A[k][l] + q * q * A[l][l]
        new_row = [A[k][j] - q * A[l][j] for j in range(n)]
        A[k] = new_row
        for j in range(n):
            A[j][k] = new_row[j]
        A[k][k] = new_kk

    def row_swap(k, l):
        U[k], U[l] = U[l], U[k]
        A[k], A[l] = A[l], A[k]
        for row in A:
            row[k], row[l] = row[l], row[k]

    mu, B = gs()
    k = 1
    while k < n:
        if abs(mu[k][k - 1]) > Fraction(1, 2):
            row_sub(k, k - 1, round(mu[k][k - 1]))
            mu, B = gs()
        if B[k] < (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            row_swap(k, k - 1)
            mu, B = gs()
            k = max(k - 1, 1)
        else:
            for l in range(k - 2, -1, -1):
                if abs(mu[k][l]) > Fraction(1, 2):
                    row_sub(k, l, round(mu[k][l]))
                    mu, B = gs()
            k += 1
    Gr = [[int(x) for x in row] for row in A]
    return Gr, U


def smith_invariants(A) -> list[int]:
    """Nonzero invariant factors d1 | d2 | ... of an integer matrix.

    Remainders are kept in place (floor reduction against a positive
    pivot), and any nonzero remainder is promoted to be the new, strictly
    smaller pivot; that makes every pass shrink the pivot and guarantees
    termination regardless of signs.
    """
    M = [list(map(int, row)) for row in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    res = []
    top = 0
    while top < rows and top < cols:
        piv, best = None, None
        for i in range(top, rows):
            for j in range(top, cols):
                v = abs(M[i][j])
                if v and (best is None or v < best):
                    best, piv = v, (i, j)
        if piv is None:
            break
        i0, j0 = piv
        M[top], M[i0] = M[i0], M[top]
        for row in M:
            row[top], row[j0] = row[j0], row[top]
        if M[top][top] < 0:
            M[top] = [-x for x in M[top]]
        changed = True
        while changed:
            changed = False
            d = M[top][top]
            for i in range(top + 1, rows):
                q = M[i][top] // d
                if q:
                    M[i] = [a - q * b for a, b in zip(M[i], M[top])]
            for i in range(top + 1, rows):
                if M[i][top]:
                    # remainder in [1, d): promote it to pivot
                    M[top], M[i] = M[i], M[top]
                    changed = True
                    break
            if changed:
                continue
            for j in range(top + 1, cols):
                q = M[top][j] // d
                if q:
                    for row in M:
                        row[j] -= q * row[top]
            for j in range(top + 1, cols):
                if M[top][j]:
                    for row in M:
                        row[top], row[j] = row[j], row[top]
                    changed = True
                    break
        d = M[top][top]
        fix = None
        for i in range(top + 1, rows):
            if any(M[i][j] % d for j in range(top + 1, cols)):
                fix = i
                break
        if fix is not None:
            # pivot row gains the offending row; reclearing shrinks the pivot
            M[top] = [a + b for a, b in zip(M[top], M[fix])]
            continue
        res.append(d)
        top += 1
    return res
