"""Exact integer and rational linear algebra primitives.

Everything in this module is arbitrary-precision: matrices are tuples of
tuples of ``int`` (or ``Fraction`` for the rational helpers), determinants
and normal forms are computed exactly, and no floating point is ever
introduced.  Continued fractions use the minus-sign (Hirzebruch-Jung)
convention r/a = b_1 - 1/(b_2 - 1/(...)), matching exceptional-chain
self-intersections -b_i.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

IntVector = tuple[int, ...]
IntMatrix = tuple[IntVector, ...]


class ExactLatticeError(ValueError):
    """Malformed input to an exact-lattice operation."""


def gcd_all(entries: Sequence[int]) -> int:
    """Greatest common divisor of the absolute values of ``entries``.

    Returns 0 only if every entry is 0.  Raises on empty input.
    """
    if len(entries) == 0:
        raise ExactLatticeError("gcd_all needs at least one entry")
    g = 0
    for e in entries:
        g = gcd(g, abs(int(e)))
    return g


def lcm_all(entries: Sequence[int]) -> int:
    if len(entries) == 0:
        raise ExactLatticeError("lcm_all needs at least one entry")
    out = 1
    for e in entries:
        out = lcm(out, int(e))
    return out


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return g, x, y


def _as_matrix(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    m = [[int(x) for x in row] for row in rows]
    if not m:
        raise ExactLatticeError("empty matrix")
    width = len(m[0])
    if width == 0 or any(len(row) != width for row in m):
        raise ExactLatticeError("matrix must be rectangular and nonempty")
    return m


def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    n, k, m = len(a), len(b), len(b[0])
    assert all(len(row) == k for row in a)
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        arow = a[i]
        orow = out[i]
        for t in range(k):
            c = arow[t]
            if c:
                brow = b[t]
                for j in range(m):
                    orow[j] += c * brow[j]
    return out


def det_int(rows: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    m = [list(map(int, row)) for row in rows]
    n = len(m)
    if any(len(row) != n for row in m):
        raise ExactLatticeError("determinant needs a square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[-1][-1]


def det_fraction(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant of a square matrix with rational entries."""
    den = 1
    for row in rows:
        for x in row:
            den = lcm(den, Fraction(x).denominator)
    scaled = [[int(Fraction(x) * den) for x in row] for row in rows]
    return Fraction(det_int(scaled), den ** len(rows))


def solve_fraction(
    rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> tuple[Fraction, ...]:
    """Solve x * M = rhs for a square invertible M (rows are M's rows)."""
    n = len(rows)
    # Transpose so we do ordinary column elimination on M^T y = rhs^T.
    a = [[Fraction(rows[j][i]) for j in range(n)] for i in range(n)]
    b = [Fraction(v) for v in rhs]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ExactLatticeError("singular matrix in solve")
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        b[col] *= inv
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
                b[i] -= f * b[col]
    return tuple(b)


def invert_fraction(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Exact inverse of a square rational matrix."""
    n = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ExactLatticeError("singular matrix in invert")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [row[n:] for row in a]


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[IntVector]:
    """Row-style Hermite basis of the lattice spanned by ``rows``.

    Returns the nonzero rows of an upper-echelon basis with positive pivots
    and entries above each pivot reduced into [0, pivot).
    """
    m = _as_matrix(rows)
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for j in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][j]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, len(m)):
            if m[i][j]:
                g, x, y = xgcd(m[r][j], m[i][j])
                a, b = m[r][j] // g, m[i][j] // g
                m[r], m[i] = (
                    [x * p + y * q for p, q in zip(m[r], m[i])],
                    [-b * p + a * q for p, q in zip(m[r], m[i])],
                )
        if m[r][j] < 0:
            m[r] = [-x for x in m[r]]
        for i in range(r):
            q = m[i][j] // m[r][j]
            if q:
                m[i] = [p - q * s for p, s in zip(m[i], m[r])]
        pivots.append(j)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]]


def smith_normal_form(
    rows: Sequence[Sequence[int]],
) -> tuple[tuple[int, ...], IntMatrix, IntMatrix]:
    """Smith decomposition M = L * D * R with unimodular L, R.

    Returns ``(invariants, L, R)`` where ``invariants`` is the full diagonal
    of the m x n matrix D (zeros included), each d_i >= 0 and d_i | d_{i+1},
    and L (m x m), R (n x n) satisfy L @ diag @ R == M exactly.
    """
    a = _as_matrix(rows)
    nrows, ncols = len(a), len(a[0])
    # Maintain M = L @ a @ R: row op E on `a` multiplies L by E^-1 on the
    # right (a column op on L); column op F on `a` multiplies R by F^-1 on
    # the left (a row op on R).
    left = identity(nrows)
    right = identity(ncols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        for row in left:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        right[i], right[j] = right[j], right[i]

    def add_row(dst, src, q):
        # a[dst] += q * a[src]; on L: col[src] -= q * col[dst]
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        for row in left:
            row[src] -= q * row[dst]

    def add_col(dst, src, q):
        # a[:,dst] += q * a[:,src]; on R: row[src] -= q * row[dst]
        for row in a:
            row[dst] += q * row[src]
        right[src] = [x - q * y for x, y in zip(right[src], right[dst])]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        for row in left:
            row[i] = -row[i]

    k = 0
    limit = min(nrows, ncols)
    while k < limit:
        # Pivot: smallest nonzero absolute value in the trailing block.
        piv = None
        best = None
        for i in range(k, nrows):
            for j in range(k, ncols):
                if a[i][j] and (best is None or abs(a[i][j]) < best):
                    best, piv = abs(a[i][j]), (i, j)
        if piv is None:
            break
        i, j = piv
        if i != k:
            swap_rows(k, i)
        if j != k:
            swap_cols(k, j)
        dirty = False
        for i in range(k + 1, nrows):
            if a[i][k]:
                q = a[i][k] // a[k][k]
                add_row(i, k, -q)
                dirty = dirty or a[i][k] != 0
        for j in range(k + 1, ncols):
            if a[k][j]:
                q = a[k][j] // a[k][k]
                add_col(j, k, -q)
                dirty = dirty or a[k][j] != 0
        if dirty:
            continue  # remainders left; pick a smaller pivot next pass
        if a[k][k] < 0:
            negate_row(k)
        # Enforce divisibility of the trailing block by the pivot.
        fix = None
        for i in range(k + 1, nrows):
            for j in range(k + 1, ncols):
                if a[i][j] % a[k][k]:
                    fix = i
                    break
            if fix is not None:
                break
        if fix is not None:
            add_row(k, fix, 1)
            continue
        k += 1

    invariants = tuple(a[i][i] for i in range(limit))
    return (
        invariants,
        tuple(tuple(row) for row in left),
        tuple(tuple(row) for row in right),
    )


def hj_continued_fraction(r: int, a: int) -> list[int]:
    """Hirzebruch-Jung expansion [b_1, ..., b_k] of r/a, every b_i >= 2.

    Requires 0 < a < r and gcd(a, r) = 1.  The expansion satisfies
    r/a = b_1 - 1/(b_2 - 1/(... - 1/b_k)).
    """
    r, a = int(r), int(a)
    if not 0 < a < r:
        raise ExactLatticeError(f"need 0 < a < r, got a={a}, r={r}")
    if gcd(a, r) != 1:
        raise ExactLatticeError(f"need gcd(a, r) = 1, got a={a}, r={r}")
    out: list[int] = []
    while a:
        b = -((-r) // a)  # ceil(r / a)
        out.append(b)
        r, a = a, b * a - r
    return out


def hj_expand(terms: Sequence[int]) -> Fraction:
    """Evaluate a minus-sign continued fraction back to a rational."""
    if not terms:
        raise ExactLatticeError("empty continued fraction")
    val = Fraction(terms[-1])
    for b in reversed(terms[:-1]):
        val = b - 1 / val
    return val
