"""Exact integer and rational linear algebra.

Vectors are tuples of Python ints (or ``Fraction``), matrices are lists of
row lists.  Nothing here ever touches floating point; Python integers are
arbitrary precision so there is no overflow at any magnitude.

Conventions for the normal forms:

* ``hnf`` is the *row* Hermite normal form: echelon, positive pivots, entries
  above a pivot reduced into ``[0, pivot)``.
* ``snf`` returns ``S = U A V`` with non-negative diagonal ``d_1 | d_2 | ...``.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Sequence

IntVector = tuple[int, ...]
Matrix = list[list[int]]


# ---------------------------------------------------------------- vectors


def primitive(v: Sequence[int]) -> IntVector:
    """Divide an integer vector by the gcd of its entries.

    Raises:
        ValueError: if ``v`` is the zero vector.
    """
    g = reduce(gcd, v, 0)
    if g == 0:
        raise ValueError("zero has no primitive representative")
    return tuple(x // g for x in v)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def add(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def scale(c, v: Sequence) -> tuple:
    return tuple(c * a for a in v)


def fmt_q(x: Fraction | int) -> str:
    """Exact ``p/q`` string, always with an explicit denominator."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def clear_denominators(v: Sequence) -> IntVector:
    """Smallest positive integer multiple of a rational vector, as ints."""
    den = 1
    for x in v:
        if isinstance(x, Fraction):
            den = den * x.denominator // gcd(den, x.denominator)
    return tuple(int(x * den) for x in v)


# ---------------------------------------------------------------- matrices


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(A: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*A)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    Bt = list(zip(*B))
    return [[dot(row, col) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in A)


def det(A: Sequence[Sequence]) -> int | Fraction:
    """Determinant by Bareiss fraction-free elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(row) for row in A]
    if any(len(row) != n for row in M):
        raise ValueError("determinant of a non-square matrix")
    integral = all(isinstance(x, int) for row in M for x in row)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                M[i][j] = num // prev if integral else num / prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rank(rows: Sequence[Sequence]) -> int:
    """Rank over Q by fraction-free integer elimination."""
    M = [list(clear_denominators(r)) for r in rows]
    if not M:
        return 0
    ncols = len(M[0])
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        for i in range(r + 1, len(M)):
            if M[i][c]:
                a, b = M[r][c], M[i][c]
                M[i] = [a * x - b * y for x, y in zip(M[i], M[r])]
                g = reduce(gcd, M[i], 0)
                if g > 1:
                    M[i] = [x // g for x in M[i]]
        r += 1
        if r == len(M):
            break
    return r


def rref(rows: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    """Reduced row echelon form over Q with zero rows dropped.

    Two generating sets span the same subspace iff their ``rref`` agree, so
    the result doubles as a canonical key for a linear subspace.
    """
    M = [[Fraction(x) for x in r] for r in rows]
    if not M:
        return ()
    ncols = len(M[0])
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        piv = M[r][c]
        M[r] = [x / piv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        r += 1
        if r == len(M):
            break
    return tuple(tuple(row) for row in M[:r])


def pivot_columns(echelon: Sequence[Sequence]) -> list[int]:
    return [next(j for j, x in enumerate(row) if x != 0) for row in echelon]


def reduce_mod_rowspace(echelon: Sequence[Sequence], v: Sequence) -> tuple[Fraction, ...]:
    """Remainder of ``v`` after clearing the pivot columns of an RREF basis."""
    w = [Fraction(x) for x in v]
    for row, c in zip(echelon, pivot_columns(echelon)):
        if w[c] != 0:
            f = w[c]
            w = [a - f * b for a, b in zip(w, row)]
    return tuple(w)


def in_rowspace(echelon: Sequence[Sequence], v: Sequence) -> bool:
    return not any(reduce_mod_rowspace(echelon, v))


def solve(A: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...] | None:
    """One rational solution of ``A x = b``, or None if inconsistent."""
    m = len(A)
    n = len(A[0]) if m else 0
    aug = rref([list(A[i]) + [b[i]] for i in range(m)])
    x = [Fraction(0)] * n
    for row, c in zip(aug, pivot_columns(aug)):
        if c == n:
            return None
        x[c] = row[n]
    return tuple(x)


def inverse(A: Sequence[Sequence]) -> list[list[Fraction]] | None:
    """Rational inverse of a square matrix, or None if singular."""
    n = len(A)
    aug = rref([list(A[i]) + [int(i == j) for j in range(n)] for i in range(n)])
    if len(aug) < n or pivot_columns(aug) != list(range(n)):
        return None
    return [list(row[n:]) for row in aug]


def intersect_rowspaces(A: Sequence[Sequence], B: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    """RREF basis of ``span A ∩ span B``.

    Coefficient vectors ``(a, b)`` with ``a.A = b.B`` form the kernel of the
    transposed stacked matrix; their ``A``-parts span the intersection.
    """
    if not A or not B:
        return ()
    rows = [list(clear_denominators(a)) for a in A] + [[-x for x in clear_denominators(b)] for b in B]
    ker = kernel_lattice_basis(transpose(rows))
    n = len(rows[0])
    vecs = [tuple(sum(k[i] * rows[i][j] for i in range(len(A))) for j in range(n)) for k in ker]
    return rref(vecs) if vecs else ()


def independent_subset(vectors: Sequence[Sequence]) -> list[int]:
    """Indices of a greedy, order-respecting maximal independent subset."""
    chosen: list[int] = []
    basis: tuple = ()
    for i, v in enumerate(vectors):
        if not in_rowspace(basis, v):
            chosen.append(i)
            basis = rref(list(basis) + [v])
    return chosen


# ---------------------------------------------------------------- normal forms


def _row_combine(M: Matrix, i: int, j: int, q: int) -> None:
    """row_i -= q * row_j"""
    M[i] = [a - q * b for a, b in zip(M[i], M[j])]


def hnf(A: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix]:
    """Row Hermite normal form.

    Returns:
        ``(H, U)`` with ``H = U A``, ``U`` unimodular, ``H`` in echelon form
        with positive pivots and the entries above each pivot in
        ``[0, pivot)``.
    """
    H = [list(r) for r in A]
    m = len(H)
    ncols = len(H[0]) if m else 0
    U = identity(m)
    r = 0
    for c in range(ncols):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[p] = H[p], H[r]
            U[r], U[p] = U[p], U[r]
            clean = True
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    _row_combine(H, i, r, q)
                    _row_combine(U, i, r, q)
                    clean = clean and H[i][c] == 0
            if clean:
                break
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        for i in range(r):
            q = H[i][c] // H[r][c]
            if q:
                _row_combine(H, i, r, q)
                _row_combine(U, i, r, q)
        r += 1
    return H, U


def snf(A: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form ``S = U A V`` with ``d_i | d_{i+1}``, ``d_i >= 0``."""
    S = [list(r) for r in A]
    m = len(S)
    n = len(S[0]) if m else 0
    U = identity(m)
    V = identity(n)

    def swap_cols(M, a, b):
        for row in M:
            row[a], row[b] = row[b], row[a]

    def col_combine(M, a, b, q):  # col_a -= q * col_b
        for row in M:
            row[a] -= q * row[b]

    for t in range(min(m, n)):
        entries = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        S[t], S[i0] = S[i0], S[t]
        U[t], U[i0] = U[i0], U[t]
        swap_cols(S, t, j0)
        swap_cols(V, t, j0)
        while True:
            for i in range(t + 1, m):
                q = S[i][t] // S[t][t]
                if q:
                    _row_combine(S, i, t, q)
                    _row_combine(U, i, t, q)
            for j in range(t + 1, n):
                q = S[t][j] // S[t][t]
                if q:
                    col_combine(S, j, t, q)
                    col_combine(V, j, t, q)
            rest = [(abs(S[i][t]), i, t) for i in range(t + 1, m) if S[i][t]]
            rest += [(abs(S[t][j]), t, j) for j in range(t + 1, n) if S[t][j]]
            if rest:
                _, i1, j1 = min(rest)
                if j1 == t:
                    S[t], S[i1] = S[i1], S[t]
                    U[t], U[i1] = U[i1], U[t]
                else:
                    swap_cols(S, t, j1)
                    swap_cols(V, t, j1)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % S[t][t]),
                None,
            )
            if bad is None:
                break
            # row_t += row_bad brings a non-multiple into row t
            _row_combine(S, t, bad, -1)
            _row_combine(U, t, bad, -1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    return S, U, V


def invariant_factors(A: Sequence[Sequence[int]]) -> list[int]:
    S, _, _ = snf(A)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0))]


def kernel_lattice_basis(A: Sequence[Sequence[int]], ncols: int | None = None) -> list[IntVector]:
    """Basis of the saturated lattice ``{x in Z^n : A x = 0}``.

    ``ncols`` is only needed when ``A`` has no rows.
    """
    if not A:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [tuple(r) for r in identity(ncols)]
    H, U = hnf(transpose(A))
    return [tuple(U[i]) for i, row in enumerate(H) if not any(row)]


def integer_solve(A: Sequence[Sequence[int]], b: Sequence[int]) -> IntVector | None:
    """An integer solution of ``A x = b`` via Smith form, or None."""
    S, U, V = snf(A)
    m = len(S)
    n = len(S[0]) if m else 0
    c = matvec(U, b)
    y = [0] * n
    for i in range(m):
        d = S[i][i] if i < n else 0
        if d == 0:
            if c[i] != 0:
                return None
        elif c[i] % d:
            return None
        else:
            y[i] = c[i] // d
    return matvec(V, y)


def affine_hull(points: Sequence[Sequence[int]]) -> tuple[int, IntVector, list[IntVector]]:
    """Dimension, base point and direction vectors of an affine span."""
    if not points:
        raise ValueError("affine hull of an empty set")
    base = tuple(points[0])
    diffs = [sub(p, base) for p in points[1:]]
    dirs = [diffs[i] for i in independent_subset(diffs)]
    return len(dirs), base, dirs


def random_unimodular(rng: random.Random, n: int, steps: int = 8, spread: int = 2) -> Matrix:
    """Random integer matrix of determinant +-1 built from elementary moves."""
    M = identity(n)
    for _ in range(steps):
        move = rng.randrange(3) if n > 1 else 2
        if move == 0:
            i, j = rng.sample(range(n), 2)
            q = rng.randint(-spread, spread)
            _row_combine(M, i, j, -q)
        elif move == 1:
            i, j = rng.sample(range(n), 2)
            M[i], M[j] = M[j], M[i]
        else:
            i = rng.randrange(n)
            M[i] = [-x for x in M[i]]
    return M
