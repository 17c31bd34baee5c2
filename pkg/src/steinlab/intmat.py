"""Exact dense integer linear algebra on lists of Python ints.

Matrices are lists of rows. Everything here is exact; nothing touches floats.
These routines are small-dimensional workhorses (up to a few dozen columns)
used by the ring, lattice and Steinberg layers. The sparse elimination used for
homology lives in :mod:`steinlab.topo`.
"""

from __future__ import annotations

from itertools import combinations


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and a*x + b*y = g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _identity(m: int) -> list[list[int]]:
    return [[int(i == j) for j in range(m)] for i in range(m)]


def hnf_with_transform(rows) -> tuple[list[list[int]], list[list[int]], int]:
    """Row-style Hermite normal form.

    Returns ``(H, U, r)`` where ``U`` is unimodular, ``U @ A == H``, the first
    ``r`` rows of ``H`` are the nonzero HNF rows (positive pivots, entries above
    each pivot reduced into ``[0, pivot)``) and the remaining rows are zero.
    The last ``m - r`` rows of ``U`` are then a basis of the left kernel.
    """
    a = [list(map(int, row)) for row in rows]
    m = len(a)
    ncols = len(a[0]) if m else 0
    u = _identity(m)
    r = 0
    pivots = []
    for j in range(ncols):
        if r == m:
            break
        # gcd-combine column j of rows r..m-1 into row r
        for i in range(r + 1, m):
            if a[i][j] == 0:
                continue
            if a[r][j] == 0:
                a[r], a[i] = a[i], a[r]
                u[r], u[i] = u[i], u[r]
                continue
            g, x, y = xgcd(a[r][j], a[i][j])
            p, q = a[r][j] // g, a[i][j] // g
            ar, ai = a[r], a[i]
            a[r] = [x * s + y * t for s, t in zip(ar, ai)]
            a[i] = [-q * s + p * t for s, t in zip(ar, ai)]
            ur, ui = u[r], u[i]
            u[r] = [x * s + y * t for s, t in zip(ur, ui)]
            u[i] = [-q * s + p * t for s, t in zip(ur, ui)]
        if a[r][j] == 0:
            continue
        if a[r][j] < 0:
            a[r] = [-v for v in a[r]]
            u[r] = [-v for v in u[r]]
        piv = a[r][j]
        for i in range(r):
            f = a[i][j] // piv
            if f:
                a[i] = [s - f * t for s, t in zip(a[i], a[r])]
                u[i] = [s - f * t for s, t in zip(u[i], u[r])]
        pivots.append(j)
        r += 1
    return a, u, r


def hnf(rows) -> list[list[int]]:
    """Nonzero rows of the Hermite normal form of the row lattice."""
    rows = [list(map(int, row)) for row in rows]
    if not rows:
        return []
    h, _, r = hnf_with_transform(rows)
    return h[:r]


def left_kernel(rows) -> list[list[int]]:
    """Z-basis of {x : x @ A = 0} as rows."""
    rows = [list(map(int, row)) for row in rows]
    if not rows:
        return []
    _, u, r = hnf_with_transform(rows)
    return hnf(u[r:])


def transpose(rows, ncols: int | None = None) -> list[list[int]]:
    if not rows:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*rows)]


def right_kernel(rows, ncols: int) -> list[list[int]]:
    """Z-basis of {y : A @ y = 0} for an m x ncols matrix A."""
    if not rows:
        return _identity(ncols)
    return left_kernel(transpose(rows))


def saturate(rows, ncols: int) -> list[list[int]]:
    """HNF basis of (Q-span of rows) intersected with Z^ncols."""
    rows = [r for r in hnf(rows)]
    if not rows:
        return []
    if len(rows) == ncols:
        return _identity(ncols)
    perp = right_kernel(rows, ncols)
    return hnf(right_kernel(perp, ncols))


def intersect(a, b, ncols: int) -> list[list[int]]:
    """HNF basis of the intersection of two row lattices in Z^ncols."""
    a, b = hnf(a), hnf(b)
    if not a or not b:
        return []
    ker = left_kernel(a + b)
    k = len(a)
    out = [[sum(x[i] * a[i][j] for i in range(k)) for j in range(ncols)] for x in ker]
    return hnf(out)


def contains(big, small) -> bool:
    """True iff the row lattice of ``small`` lies inside that of ``big``."""
    big = hnf(big)
    return hnf(big + [list(r) for r in small]) == big


def reduce_mod(vec, basis) -> list[int]:
    """Canonical representative of ``vec`` modulo a full-rank HNF basis."""
    v = list(vec)
    for row in basis:
        j = next(k for k, x in enumerate(row) if x)
        q = v[j] // row[j]
        if q:
            v = [s - q * t for s, t in zip(v, row)]
    return v


def solve_left(rows, target) -> list[int] | None:
    """Integer x with x @ rows == target, or None when there is none."""
    rows = [list(map(int, r)) for r in rows]
    m = len(rows)
    if m == 0:
        return [] if not any(target) else None
    h, u, r = hnf_with_transform(rows)
    # write target in terms of the echelon rows h[:r]
    t = list(target)
    coeffs = [0] * r
    for i in range(r):
        j = next(k for k, x in enumerate(h[i]) if x)
        q, rem = divmod(t[j], h[i][j])
        if rem:
            return None
        coeffs[i] = q
        if q:
            t = [s - q * w for s, w in zip(t, h[i])]
    if any(t):
        return None
    return [sum(coeffs[i] * u[i][k] for i in range(r)) for k in range(m)]


def det(mat) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    a = [list(map(int, row)) for row in mat]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rank(rows) -> int:
    """Rank over Q by fraction-free elimination."""
    a = [list(map(int, row)) for row in rows if any(row)]
    if not a:
        return 0
    m, ncols = len(a), len(a[0])
    r, prev = 0, 1
    for j in range(ncols):
        p = next((i for i in range(r, m) if a[i][j]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][j]
        for i in range(r + 1, m):
            f = a[i][j]
            a[i] = [(piv * s - f * t) // prev for s, t in zip(a[i], a[r])]
        prev = piv
        r += 1
        if r == m:
            break
    return r


def minors(rows, k: int):
    """Yield (row_subset, col_subset, minor) for all k x k minors."""
    m, ncols = len(rows), len(rows[0])
    for rs in combinations(range(m), k):
        for cs in combinations(range(ncols), k):
            yield rs, cs, det([[rows[i][j] for j in cs] for i in rs])


def dense_snf(mat) -> list[int]:
    """Nonzero invariant factors of an integer matrix.

    Textbook Smith reduction: bring a minimal entry to the corner, clear its row
    and column by division with remainder, and enforce divisibility by folding
    offending rows into the pivot row. Kept deliberately naive; it is the
    reference the sparse engine is checked against.
    """
    a = [list(map(int, row)) for row in mat]
    m = len(a)
    ncols = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, ncols):
        entries = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, ncols) if a[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    a[i] = [s - q * w for s, w in zip(a[i], a[t])]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, ncols):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    for row in a:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        done = False
            if not done:
                # move the smallest nonzero entry of the pivot row/col to the corner
                cand = [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t, ncols) if a[t][j]]
                _, i, j = min(cand)
                a[t], a[i] = a[i], a[t]
                for row in a:
                    row[t], row[j] = row[j], row[t]
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, ncols) if a[i][j] % a[t][t]),
                None,
            )
            if bad is None:
                break
            a[t] = [s + w for s, w in zip(a[t], a[bad])]
        diag.append(abs(a[t][t]))
        t += 1
    return diag
