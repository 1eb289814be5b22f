"""Small exact linear algebra over Fraction matrices.

Matrices are tuples of tuples of Fraction. Everything here is exact; float
paths elsewhere use numpy instead.
"""

from __future__ import annotations

from fractions import Fraction

Matrix = tuple[tuple[Fraction, ...], ...]


def to_matrix(rows) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n)) for i in range(n)
    )


def zero(n: int, m: int | None = None) -> Matrix:
    m = n if m is None else m
    return tuple(tuple(Fraction(0) for _ in range(m)) for _ in range(n))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def mat_rank(rows) -> int:
    """Rank over the rationals by Gaussian elimination."""
    m = [[Fraction(v) for v in row] for row in rows]
    if not m or not m[0]:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][col]
        m[rank] = [v / pv for v in m[rank]]
        for r in range(nrows):
            if r != rank and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_neg(a: Matrix) -> Matrix:
    return tuple(tuple(-x for x in row) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_vec(a: Matrix, v) -> tuple[Fraction, ...]:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def mat_det(a: Matrix) -> Fraction:
    n = len(a)
    m = [list(row) for row in a]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] == 0:
                continue
            factor = m[r][col] * inv
            for c in range(col, n):
                m[r][c] -= factor * m[col][c]
    return det


def mat_inv(a: Matrix) -> Matrix:
    """Gauss-Jordan inverse. Raises ZeroDivisionError on singular input."""
    n = len(a)
    m = [list(row) + list(identity(n)[i]) for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return tuple(tuple(row[n:]) for row in m)


def solve_sequential(a_rows, b_vals):
    """Solve an overdetermined exact system, reading equations in order.

    a_rows: list of coefficient rows, b_vals: right-hand sides. Returns
    (solution, None) when every equation is satisfied, or (None, i) where i is
    the index of the first equation inconsistent with those before it.
    Underdetermined free variables are set to 0.
    """
    ncols = len(a_rows[0]) if a_rows else 0
    pivots: dict[int, tuple[list[Fraction], Fraction]] = {}
    for idx, (row, rhs) in enumerate(zip(a_rows, b_vals)):
        row = [Fraction(x) for x in row]
        rhs = Fraction(rhs)
        for col, (prow, prhs) in pivots.items():
            if row[col] != 0:
                factor = row[col]
                row = [x - factor * y for x, y in zip(row, prow)]
                rhs -= factor * prhs
        lead = next((c for c in range(ncols) if row[c] != 0), None)
        if lead is None:
            if rhs != 0:
                return None, idx
            continue
        inv = 1 / row[lead]
        row = [x * inv for x in row]
        rhs *= inv
        for col in list(pivots):
            prow, prhs = pivots[col]
            if prow[lead] != 0:
                f = prow[lead]
                pivots[col] = ([x - f * y for x, y in zip(prow, row)], prhs - f * rhs)
        pivots[lead] = (row, rhs)
    sol = [Fraction(0)] * ncols
    for col, (_, prhs) in pivots.items():
        sol[col] = prhs
    for idx, (row, rhs) in enumerate(zip(a_rows, b_vals)):
        if sum(Fraction(x) * s for x, s in zip(row, sol)) != Fraction(rhs):
            return None, idx
    return tuple(sol), None
