"""Exact linear algebra over the rationals (row reduction, rank, nullspace)."""

from fractions import Fraction


def rref(rows):
    """Reduced row echelon form of a matrix given as a list of rows.

    Returns ``(reduced_rows, pivot_columns)``. Entries are converted to
    :class:`~fractions.Fraction`; the input is not modified.
    """
    m = [[Fraction(x) for x in row] for row in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows):
    return len(rref(rows)[1])


def nullspace(rows, ncols=None):
    """Basis (list of column vectors) of ``{x : A x = 0}``."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(m, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def column_space(cols):
    """Independent subset spanning the same space as the given column vectors."""
    cols = [list(map(Fraction, c)) for c in cols]
    if not cols:
        return []
    # rows of the matrix whose columns are ``cols``
    rows = [list(r) for r in zip(*cols)]
    _, pivots = rref(rows)
    return [cols[p] for p in pivots]


def span_dim(vectors):
    """Dimension of the span of a list of vectors."""
    if not vectors:
        return 0
    return rank(vectors)
