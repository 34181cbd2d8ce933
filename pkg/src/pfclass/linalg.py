"""Exact dense linear algebra over Q and cyclotomic fields.

Matrices are lists of rows.  Entries may be ``Fraction`` or ``CycloNumber``
(mixing is fine).  Every routine is exact; zero tests never use tolerances.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .cyclo import conj, is_zero, simplify

Matrix = list  # list[list[scalar]]

ZERO = Fraction(0)
ONE = Fraction(1)


def zeros(rows: int, cols: int) -> Matrix:
    return [[ZERO] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def shape(m: Matrix) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def to_fractions(m) -> Matrix:
    return [[simplify(Fraction(x) if isinstance(x, (int, str)) else x) for x in row] for row in m]


def transpose(m: Matrix) -> Matrix:
    return [list(col) for col in zip(*m)] if m else []


def conj_transpose(m: Matrix) -> Matrix:
    return [[conj(x) for x in col] for col in zip(*m)] if m else []


def mat_conj(m: Matrix) -> Matrix:
    return [[conj(x) for x in row] for row in m]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [ZERO] * cols
        for k in range(inner):
            x = row[k]
            if is_zero(x):
                continue
            brow = b[k]
            for j in range(cols):
                y = brow[j]
                if not is_zero(y):
                    acc[j] = acc[j] + x * y
        out.append(acc)
    return out


def mat_vec(a: Matrix, v: Sequence) -> list:
    out = []
    for row in a:
        acc = ZERO
        for x, y in zip(row, v):
            if not is_zero(x) and not is_zero(y):
                acc = acc + x * y
        out.append(acc)
    return out


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(c, a: Matrix) -> Matrix:
    return [[c * x for x in row] for row in a]


def mat_eq(a: Matrix, b: Matrix) -> bool:
    if shape(a) != shape(b):
        return False
    return all(is_zero(x - y) for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def is_zero_matrix(a: Matrix) -> bool:
    return all(is_zero(x) for row in a for x in row)


def block_diag(blocks: Sequence[Matrix]) -> Matrix:
    n = sum(len(b) for b in blocks)
    out = zeros(n, sum(shape(b)[1] for b in blocks))
    r = c = 0
    for b in blocks:
        br, bc = shape(b)
        for i in range(br):
            for j in range(bc):
                out[r + i][c + j] = b[i][j]
        r += br
        c += bc
    return out


def block_matrix(blocks: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble a matrix from a grid of equally-shaped-by-row/column blocks."""
    out = []
    for brow in blocks:
        height = len(brow[0])
        for i in range(height):
            row = []
            for b in brow:
                row.extend(b[i])
            out.append(row)
    return out


def kron(a: Matrix, b: Matrix) -> Matrix:
    ar, ac = shape(a)
    br, bc = shape(b)
    out = zeros(ar * br, ac * bc)
    for i in range(ar):
        for j in range(ac):
            x = a[i][j]
            if is_zero(x):
                continue
            for k in range(br):
                for l in range(bc):
                    out[i * br + k][j * bc + l] = x * b[k][l]
    return out


def hstack(mats: Sequence[Matrix]) -> Matrix:
    mats = [m for m in mats if m and m[0]]
    if not mats:
        return []
    return [sum((m[i] for m in mats), []) for i in range(len(mats[0]))]


def columns(m: Matrix) -> list[list]:
    return transpose(m)


def from_columns(cols: Sequence[Sequence], height: int | None = None) -> Matrix:
    if not cols:
        return [[] for _ in range(height or 0)]
    return [list(r) for r in zip(*cols)]


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = [list(row) for row in m]
    rows, cols = shape(a)
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if not is_zero(a[i][c])), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [simplify(x * inv) for x in a[r]]
        for i in range(rows):
            if i != r and not is_zero(a[i][c]):
                f = a[i][c]
                a[i] = [simplify(x - f * y) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1]) if m and m[0] else 0


def nullspace(m: Matrix, ncols: int | None = None) -> list[list]:
    """Basis of the right kernel {x : m x = 0}, one vector per free column."""
    cols = ncols if ncols is not None else shape(m)[1]
    if not m:
        return [[ONE if i == j else ZERO for i in range(cols)] for j in range(cols)]
    red, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * cols
        v[f] = ONE
        for r, p in enumerate(pivots):
            v[p] = simplify(-red[r][f])
        basis.append(v)
    return basis


def column_space(cols: Sequence[Sequence]) -> list[list]:
    """A basis (subset of the given vectors) of their span, preserving order."""
    cols = [list(c) for c in cols]
    if not cols:
        return []
    m = from_columns(cols)
    _, pivots = rref(m)
    return [cols[p] for p in pivots]


def det(m: Matrix):
    n = len(m)
    if n == 0:
        return ONE
    a = [list(row) for row in m]
    result = ONE
    for c in range(n):
        piv = next((i for i in range(c, n) if not is_zero(a[i][c])), None)
        if piv is None:
            return ZERO
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            result = -result
        p = a[c][c]
        result = result * p
        inv = 1 / p
        for i in range(c + 1, n):
            if not is_zero(a[i][c]):
                f = a[i][c] * inv
                row_c = a[c]
                a[i] = [x - f * y if j >= c else x for j, (x, y) in enumerate(zip(a[i], row_c))]
    return simplify(result)


def det_int(m: Sequence[Sequence[int]]) -> int:
    """Fraction-free Bareiss determinant for integer matrices."""
    a = [list(map(int, row)) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def solve(a: Matrix, b: Matrix) -> Matrix:
    """Solve a x = b for square invertible a (b may have several columns)."""
    n = len(a)
    width = shape(b)[1]
    aug = [list(a[i]) + list(b[i]) for i in range(n)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix in solve")
    return [row[n:n + width] for row in red[:n]]


def inverse(a: Matrix) -> Matrix:
    return solve(a, identity(len(a)))


def solve_in_span(basis_cols: Sequence[Sequence], target: Sequence) -> list | None:
    """Coordinates of target in the span of independent columns, or None."""
    k = len(basis_cols)
    if k == 0:
        return [] if all(is_zero(x) for x in target) else None
    m = from_columns(list(basis_cols) + [list(target)])
    red, pivots = rref(m)
    if k in pivots:
        return None
    coords = [ZERO] * k
    for r, p in enumerate(pivots):
        coords[p] = red[r][k]
    return coords


def complement_columns(sub_cols: Sequence[Sequence], ambient: Sequence[Sequence]) -> list[list]:
    """Vectors from ``ambient`` extending independent ``sub_cols`` to a basis of span(sub + ambient)."""
    base = [list(c) for c in sub_cols]
    chosen = column_space(base + [list(c) for c in ambient])
    if chosen[:len(base)] != base:
        raise ValueError("sub_cols are not linearly independent")
    return chosen[len(base):]


def gram(form: Matrix, vecs_left: Sequence[Sequence], vecs_right: Sequence[Sequence] | None = None) -> Matrix:
    """Gram matrix [v_i^T form w_j] for a bilinear form."""
    right = vecs_left if vecs_right is None else vecs_right
    fr = [mat_vec(form, w) for w in right]
    out = []
    for v in vecs_left:
        row = []
        for fw in fr:
            acc = ZERO
            for x, y in zip(v, fw):
                if not is_zero(x) and not is_zero(y):
                    acc = acc + x * y
            row.append(simplify(acc))
        out.append(row)
    return out


def is_symmetric(m: Matrix) -> bool:
    return mat_eq(m, transpose(m))


def is_alternating(m: Matrix) -> bool:
    n = len(m)
    return all(is_zero(m[i][i]) for i in range(n)) and mat_eq(m, mat_scale(-1, transpose(m)))


def is_hermitian(m: Matrix) -> bool:
    return mat_eq(m, conj_transpose(m))
