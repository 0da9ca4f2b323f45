"""Exact dense linear algebra over Fraction / Gaussian-rational scalars.

Small systems only (the artifact's exact matrices are at most ~20x20), so
plain fraction-free-less Gaussian elimination is fine and keeps everything
bit-exact and deterministic.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import QQi, is_zero


Matrix = list  # list of rows; rows are lists of Fraction or QQi


def mat_mul(a, b):
    n, k = len(a), len(b)
    m = len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = a[i][0] * b[0][j]
            for t in range(1, k):
                s = s + a[i][t] * b[t][j]
            row.append(s)
        out.append(row)
    return out


def mat_vec(a, v):
    return [sum_exact(a[i][j] * v[j] for j in range(len(v))) for i in range(len(a))]


def sum_exact(items):
    total = None
    for x in items:
        total = x if total is None else total + x
    if total is None:
        raise ValueError("empty exact sum")
    return total


def identity(n, one=Fraction(1)):
    zero = one - one
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(col) for col in zip(*a)]


def rref(a):
    """Reduced row echelon form (in place on a copy); returns (R, pivots)."""
    m = [list(row) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if not is_zero(m[i][c])), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c] if not isinstance(m[r][c], QQi) else QQi(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and not is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [m[i][j] - f * m[r][j] for j in range(cols)]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def nullspace(a):
    """Basis of the right nullspace, exact."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if rows == 0:
        return identity(cols)
    r, pivots = rref(a)
    free = [c for c in range(cols) if c not in pivots]
    zero = a[0][0] - a[0][0]
    one = zero + 1
    basis = []
    for f in free:
        v = [zero] * cols
        v[f] = one
        for i, p in enumerate(pivots):
            v[p] = -r[i][f]
        basis.append(v)
    return basis


def solve(a, b):
    """Solve a x = b exactly (a square nonsingular)."""
    n = len(a)
    aug = [list(a[i]) + [b[i]] for i in range(n)]
    r, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular exact system")
    return [r[i][n] for i in range(n)]


def inverse(a):
    n = len(a)
    zero = a[0][0] - a[0][0]
    one = zero + 1
    aug = [list(a[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    r, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular exact matrix")
    return [row[n:] for row in r]


def det(a):
    n = len(a)
    m = [list(row) for row in a]
    sign = 1
    zero = a[0][0] - a[0][0]
    result = zero + 1
    for c in range(n):
        pivot = next((i for i in range(c, n) if not is_zero(m[i][c])), None)
        if pivot is None:
            return zero
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            sign = -sign
        result = result * m[c][c]
        inv = 1 / m[c][c] if not isinstance(m[c][c], QQi) else QQi(1) / m[c][c]
        for i in range(c + 1, n):
            if not is_zero(m[i][c]):
                f = m[i][c] * inv
                m[i] = [m[i][j] - f * m[c][j] for j in range(n)]
    return result * sign if sign == 1 else -result


def rank(a):
    _, pivots = rref(a)
    return len(pivots)
