"""Exact integer and rational matrix routines.

Matrices are lists of row lists holding ``int`` or ``Fraction`` entries.
Nothing here touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Matrix = list[list]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def copy(m: Sequence[Sequence]) -> Matrix:
    return [list(row) for row in m]


def transpose(m: Sequence[Sequence]) -> Matrix:
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def vecmat(v: Sequence, m: Sequence[Sequence]) -> list:
    """Row vector times matrix."""
    if not m:
        return []
    return [sum(v[i] * m[i][j] for i in range(len(v))) for j in range(len(m[0]))]


def matvec(m: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in m]


def dot(u: Sequence, v: Sequence):
    return sum(x * y for x, y in zip(u, v))


def bilinear(u: Sequence, gram: Sequence[Sequence], v: Sequence):
    return dot(vecmat(u, gram), v)


def scalar_mul(c, m: Sequence[Sequence]) -> Matrix:
    return [[c * x for x in row] for row in m]


def sub(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def block_diag(*blocks: Sequence[Sequence]) -> Matrix:
    n = sum(len(b) for b in blocks)
    out = zeros(n, n)
    off = 0
    for b in blocks:
        k = len(b)
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = b[i][j]
        off += k
    return out


def is_symmetric(m: Sequence[Sequence]) -> bool:
    n = len(m)
    return all(len(row) == n for row in m) and all(
        m[i][j] == m[j][i] for i in range(n) for j in range(i)
    )


def det(m: Sequence[Sequence]):
    """Determinant by fraction-free Bareiss elimination (exact)."""
    n = len(m)
    if n == 0:
        return 1
    if any(isinstance(x, Fraction) for row in m for x in row):
        return _det_fraction(m)
    a = copy(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _det_fraction(m):
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    d = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            a[k], a[p] = a[p], a[k]
            d = -d
        d *= a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return d


def rref(m: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    a = [[Fraction(x) for x in row] for row in m]
    if not a:
        return [], []
    rows, cols = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    return len(rref(m)[1])


def inverse(m: Sequence[Sequence]) -> Matrix:
    n = len(m)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(m)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red[:n]]


def solve_left(b: Sequence[Sequence], v: Sequence) -> list | None:
    """Rational c with c·b = v, or None if v is outside the row space."""
    bt = transpose(b)
    aug = [list(row) + [v[i]] for i, row in enumerate(bt)]
    red, piv = rref(aug)
    k = len(b)
    if piv and piv[-1] == k:
        return None
    c = [Fraction(0)] * k
    for r, p in enumerate(piv):
        c[p] = red[r][k]
    return c


# -- Smith normal form ------------------------------------------------------


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return (d, u, v) with d = u·m·v diagonal, d[i][i] | d[i+1][i+1], u, v unimodular.

    Diagonal entries are non-negative; zero entries come last.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [[int(x) for x in row] for row in m]
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):
        for row in a:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    t = 0
    while t < min(rows, cols):
        # smallest nonzero entry in the remaining block becomes the pivot
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    if a[i][t]:
                        done = False
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    if a[t][j]:
                        done = False
            if done:
                # enforce divisibility against the rest of the block
                bad = next(
                    ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                     if a[i][j] % a[t][t]),
                    None,
                )
                if bad is None:
                    break
                add_row(t, bad[0], 1)
                continue
            # move the smallest remaining entry of row/col t to the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t, rows) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, cols) if a[t][j]]
            _, i, j = min(cand)
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return a, u, v


def invariant_factors(m: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal of the Smith form (including 1's)."""
    d, _, _ = smith_normal_form(m)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i]]


def abelian_invariants(relations: Sequence[Sequence[int]], ngens: int) -> tuple[list[int], int]:
    """Torsion invariants (>1) and free rank of Z^ngens / rowspan(relations)."""
    if not relations:
        return [], ngens
    facs = invariant_factors(relations)
    torsion = [f for f in facs if f > 1]
    return torsion, ngens - len(facs)


# -- lattices in Z^n / Q^n --------------------------------------------------


def _clear_denominators(rows: Sequence[Sequence]) -> tuple[Matrix, int]:
    den = 1
    for row in rows:
        for x in row:
            den = lcm(den, Fraction(x).denominator)
    return [[int(Fraction(x) * den) for x in row] for row in rows], den


def lattice_basis(rows: Sequence[Sequence]) -> Matrix:
    """Z-basis (as rows) of the subgroup of Q^n generated by ``rows``."""
    if not rows:
        return []
    ints, den = _clear_denominators(rows)
    d, _, v = smith_normal_form(ints)
    vinv = inverse(v)
    out = []
    for i in range(min(len(d), len(d[0]))):
        if d[i][i]:
            out.append([Fraction(d[i][i]) * x / den for x in vinv[i]])
    return [[_norm(x) for x in row] for row in out]


def saturation(rows: Sequence[Sequence]) -> Matrix:
    """Z-basis of Z^n ∩ span_Q(rows), returned as integer rows."""
    if not rows:
        return []
    ints, _ = _clear_denominators(rows)
    d, _, v = smith_normal_form(ints)
    vinv = inverse(v)
    r = sum(1 for i in range(min(len(d), len(d[0]))) if d[i][i])
    return [[int(x) for x in vinv[i]] for i in range(r)]


def left_kernel(m: Sequence[Sequence]) -> Matrix:
    """Primitive integer basis of {x in Z^r : x·m = 0}."""
    r = len(m)
    if r == 0:
        return []
    if not m[0]:
        return identity(r)
    ints, _ = _clear_denominators(m)
    d, u, _ = smith_normal_form(ints)
    nz = sum(1 for i in range(min(len(d), len(d[0]))) if d[i][i])
    return [list(u[i]) for i in range(nz, r)]


def right_kernel(m: Sequence[Sequence]) -> Matrix:
    """Primitive integer basis (as rows) of {x in Z^c : m·x = 0}."""
    return left_kernel(transpose(m))


def in_lattice(basis: Sequence[Sequence], v: Sequence) -> bool:
    c = solve_left(basis, v)
    return c is not None and all(Fraction(x).denominator == 1 for x in c)


def _norm(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x


def content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g
