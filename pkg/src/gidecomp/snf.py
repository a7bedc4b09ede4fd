"""
Integer matrix normal forms for homology computations.

Matrices are lists of rows of Python ints, so entries never overflow.
Pivoting is deterministic: smallest absolute value first, ties broken by
position.
"""


def smith_diagonal(matrix):
    """Non-zero diagonal entries of the Smith normal form, in
    divisibility order.  The input is not modified."""
    a = [list(row) for row in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    top = 0
    while True:
        pivot = None
        best = None
        for r in range(top, m):
            row = a[r]
            for c in range(top, n):
                x = row[c]
                if x and (best is None or abs(x) < best):
                    best = abs(x)
                    pivot = (r, c)
                    if best == 1:
                        break
            if best == 1:
                break
        if pivot is None:
            break
        r, c = pivot
        a[top], a[r] = a[r], a[top]
        if c != top:
            for row in a:
                row[top], row[c] = row[c], row[top]
        # clear column and row below/right of the pivot
        dirty = False
        piv = a[top][top]
        for r in range(top + 1, m):
            x = a[r][top]
            if x:
                qt = x // piv
                if qt:
                    prow, row = a[top], a[r]
                    for cc in range(top, n):
                        row[cc] -= qt * prow[cc]
                if a[r][top]:
                    a[top], a[r] = a[r], a[top]
                    piv = a[top][top]
                    dirty = True
        for c in range(top + 1, n):
            x = a[top][c]
            if x:
                qt = x // piv
                if qt:
                    for row in a:
                        row[c] -= qt * row[top]
                if a[top][c]:
                    for row in a:
                        row[top], row[c] = row[c], row[top]
                    piv = a[top][top]
                    dirty = True
        if dirty:
            continue
        diag.append(abs(piv))
        top += 1

    # enforce divisibility d1 | d2 | ...
    import math
    changed = True
    while changed:
        changed = False
        for i in range(len(diag) - 1):
            if diag[i + 1] % diag[i]:
                g = math.gcd(diag[i], diag[i + 1])
                l = diag[i] * diag[i + 1] // g
                diag[i], diag[i + 1] = g, l
                changed = True
    return diag


def integer_rank(matrix):
    return len(smith_diagonal(matrix))


def cokernel(matrix, n_generators):
    """(free rank, torsion divisors > 1) of Z^g / rowspace(matrix)."""
    if not matrix:
        return n_generators, []
    diag = smith_diagonal(matrix)
    torsion = [d for d in diag if d > 1]
    return n_generators - len(diag), torsion


def homology_summary(d_k, d_k1, n_k):
    """(rank, torsion) of ker(d_k) / im(d_k1) in a chain group of rank n_k.

    d_k maps C_k down, d_k1 maps C_{k+1} into C_k; both are given as row
    lists (one row per target generator is not assumed -- shapes are
    row-major mappings acting on column vectors).
    """
    rank_dk = integer_rank(d_k) if d_k else 0
    if d_k1:
        diag = smith_diagonal(d_k1)
        rank_dk1 = len(diag)
        torsion = [d for d in diag if d > 1]
    else:
        rank_dk1 = 0
        torsion = []
    return n_k - rank_dk - rank_dk1, torsion
