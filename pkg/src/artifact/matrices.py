"""Exact integer and rational matrix helpers.

Matrices are lists of rows, vectors are lists. Nothing here uses floating
point: entries are ``int`` or ``fractions.Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Sequence

Matrix = list[list[int]]
Vector = list[int]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def copy(a: Sequence[Sequence]) -> list[list]:
    return [list(row) for row in a]


def transpose(a: Sequence[Sequence]) -> list[list]:
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = transpose(b)
    if not bt:
        return [[] for _ in a]
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def dot(u: Sequence, v: Sequence) -> int:
    return sum(x * y for x, y in zip(u, v))


def bilinear(g: Sequence[Sequence], u: Sequence, v: Sequence):
    """Return ``u^T g v``."""
    return dot(u, matvec(g, v))


def columns(vectors: Sequence[Sequence], n: int | None = None) -> list[list]:
    """Matrix whose columns are the given vectors."""
    if not vectors:
        return [[] for _ in range(n or 0)]
    return transpose(vectors)


def block_diag(*blocks: Sequence[Sequence]) -> list[list]:
    size = sum(len(b) for b in blocks)
    out = zeros(size, size)
    k = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[k + i][k + j] = x
        k += len(b)
    return out


def add(a, b):
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def sub(a, b):
    return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]


def scale(c, a):
    return [[c * x for x in row] for row in a]


def vadd(u, v):
    return [x + y for x, y in zip(u, v)]


def vsub(u, v):
    return [x - y for x, y in zip(u, v)]


def vscale(c, v):
    return [c * x for x in v]


def is_zero(a) -> bool:
    return all(x == 0 for row in a for x in row)


def as_int(a):
    """Convert a rational matrix with integral entries to ints; raise otherwise."""
    out = []
    for row in a:
        new = []
        for x in row:
            x = Fraction(x)
            if x.denominator != 1:
                raise ValueError("matrix is not integral")
            new.append(int(x))
        out.append(new)
    return out


def as_int_vector(v):
    return as_int([v])[0]


def det(a: Sequence[Sequence]):
    """Determinant by fraction-free Bareiss elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = copy(a)
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
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num // prev if isinstance(num, int) and isinstance(prev, int) else Fraction(num) / prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def inverse(a: Sequence[Sequence]) -> list[list[Fraction]]:
    """Rational inverse by Gauss-Jordan elimination."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("matrix is singular")
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def int_inverse(a: Sequence[Sequence]) -> Matrix:
    """Inverse of a unimodular integer matrix."""
    return as_int(inverse(a))


def rank(a: Sequence[Sequence]) -> int:
    m = [[Fraction(x) for x in row] for row in a]
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        for i in range(r + 1, rows):
            if m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == rows:
            break
    return r


def solve_rational(a: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Some rational solution of ``a x = b``, or None."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    m = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(a, b)]
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    for i in range(r, rows):
        if m[i][cols] != 0:
            return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = m[i][cols]
    return x


# ---------------------------------------------------------------------------
# Smith normal form and consequences


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``U a V = D`` diagonal, each entry dividing the next.

    ``U`` and ``V`` are unimodular. Diagonal entries are nonnegative.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    d = [list(map(int, row)) for row in a]
    u = identity(m)
    v = identity(n)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        if c:
            d[dst] = [x + c * y for x, y in zip(d[dst], d[src])]
            u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, c):
        if c:
            for row in d:
                row[dst] += c * row[src]
            for row in v:
                row[dst] += c * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if d[i][j] and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            for i in range(t + 1, m):
                add_row(i, t, -(d[i][t] // d[t][t]))
            for j in range(t + 1, n):
                add_col(j, t, -(d[t][j] // d[t][t]))
            # smallest leftover entry in the pivot row/column becomes the new pivot
            cand = None
            for i in range(t + 1, m):
                if d[i][t] and (cand is None or abs(d[i][t]) < cand[0]):
                    cand = (abs(d[i][t]), "r", i)
            for j in range(t + 1, n):
                if d[t][j] and (cand is None or abs(d[t][j]) < cand[0]):
                    cand = (abs(d[t][j]), "c", j)
            if cand is not None:
                if cand[1] == "r":
                    swap_rows(t, cand[2])
                else:
                    swap_cols(t, cand[2])
                continue
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % d[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
    return u, d, v


def smith_diagonal(a) -> list[int]:
    """Nonzero invariant factors of ``a``."""
    if not a or not a[0]:
        return []
    _, d, _ = smith_normal_form(a)
    return [d[i][i] for i in range(min(len(d), len(d[0]))) if d[i][i] != 0]


def kernel(a: Sequence[Sequence[int]], ncols: int | None = None) -> list[Vector]:
    """Integer basis of ``{x : a x = 0}``; the result is saturated."""
    if not a:
        n = ncols or 0
        return [list(e) for e in identity(n)]
    n = len(a[0])
    _, d, v = smith_normal_form(a)
    r = sum(1 for i in range(min(len(d), n)) if d[i][i] != 0)
    vt = transpose(v)
    return [vt[j] for j in range(r, n)]


def left_kernel(a: Sequence[Sequence[int]]) -> list[Vector]:
    """Integer basis of ``{y : y^T a = 0}``."""
    return kernel(transpose(a), len(a))


def solve_integer(a: Sequence[Sequence[int]], b: Sequence[int]) -> Vector | None:
    """Some integer solution of ``a x = b``, or None."""
    m = len(a)
    if m == 0:
        return []
    n = len(a[0])
    u, d, v = smith_normal_form(a)
    ub = matvec(u, b)
    y = [0] * n
    for i in range(m):
        di = d[i][i] if i < n else 0
        if di == 0:
            if ub[i] != 0:
                return None
        else:
            if ub[i] % di:
                return None
            y[i] = ub[i] // di
    return matvec(v, y)


def saturation(vectors: Sequence[Sequence[int]], n: int) -> list[Vector]:
    """Basis of ``span_Q(vectors) ∩ Z^n``."""
    vectors = [list(x) for x in vectors if any(x)]
    if not vectors:
        return []
    b = columns(vectors)
    u, d, _ = smith_normal_form(b)
    r = sum(1 for i in range(min(len(d), len(d[0]))) if d[i][i] != 0)
    uinv = int_inverse(u)
    return hermite_reduce(transpose(uinv)[:r])


def is_primitive(vectors: Sequence[Sequence[int]], n: int) -> bool:
    """True when the vectors are independent and span a saturated sublattice."""
    vectors = [list(x) for x in vectors]
    if not vectors:
        return True
    diag = smith_diagonal(columns(vectors))
    return len(diag) == len(vectors) and all(x == 1 for x in diag)


def extend_to_basis(vectors: Sequence[Sequence[int]], n: int) -> Matrix:
    """Unimodular matrix whose first columns are the given primitive vectors."""
    vectors = [list(x) for x in vectors]
    if not vectors:
        return identity(n)
    if not is_primitive(vectors, n):
        raise ValueError("vectors do not span a primitive sublattice")
    u, _, _ = smith_normal_form(columns(vectors))
    uinv = transpose(int_inverse(u))
    rest = hermite_reduce(uinv[len(vectors):]) if len(vectors) < n else []
    return columns(vectors + rest)


def hermite_reduce(vectors: Sequence[Sequence[int]]) -> list[Vector]:
    """Row-style Hermite normal form of the lattice spanned by the vectors.

    Gives a deterministic, usually small basis of the same lattice.
    """
    rows = [list(x) for x in vectors if any(x)]
    if not rows:
        return []
    n = len(rows[0])
    out: list[Vector] = []
    col = 0
    while rows and col < n:
        nz = [r for r in rows if r[col] != 0]
        if not nz:
            col += 1
            continue
        while len([r for r in rows if r[col] != 0]) > 1:
            nz = sorted((r for r in rows if r[col] != 0), key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for k in range(n):
                    r[k] -= q * piv[k]
            rows = [r for r in rows if any(r)]
        piv = next(r for r in rows if r[col] != 0)
        rows.remove(piv)
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        col += 1
    # reduce entries above pivots
    for i, r in enumerate(out):
        c = next(k for k, x in enumerate(r) if x)
        for j in range(i):
            q = out[j][c] // r[c]
            if q:
                out[j] = [x - q * y for x, y in zip(out[j], r)]
    return out


def coordinates(basis: Sequence[Sequence[int]], x: Sequence[int]) -> list[Fraction] | None:
    """Rational coordinates of ``x`` in the given (independent) basis, or None."""
    if not basis:
        return [] if not any(x) else None
    return solve_rational(columns(basis), list(x))


def int_coordinates(basis: Sequence[Sequence[int]], x: Sequence[int]) -> Vector | None:
    c = coordinates(basis, x)
    if c is None or any(t.denominator != 1 for t in c):
        return None
    return [int(t) for t in c]


def content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def primitive_part(v: Sequence) -> Vector:
    """Primitive integer vector on the ray of a nonzero rational vector."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    w = [int(x * den) for x in fr]
    g = content(w)
    if g == 0:
        raise ValueError("zero vector has no primitive part")
    return [x // g for x in w]


def floor_sqrt_fraction(x: Fraction) -> int:
    """Largest integer ``s`` with ``s*s <= x`` for ``x >= 0``."""
    if x < 0:
        raise ValueError("negative argument")
    s = isqrt(x.numerator // x.denominator)
    while (s + 1) * (s + 1) <= x:
        s += 1
    while s * s > x:
        s -= 1
    return s
