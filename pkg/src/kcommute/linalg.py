"""Exact elimination helpers over a field: echelon forms, nullspaces,
characteristic polynomials and univariate polynomial arithmetic.

Vectors are plain lists of scalars; polynomials are coefficient lists,
lowest degree first.
"""
from __future__ import annotations

from .mat import Mat, _inv


def rref(rows, ctx):
    """Reduced row echelon form; returns ``(rows, pivot_columns)``."""
    rows = [list(r) for r in rows]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = _inv(rows[r][c])
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(vectors, ctx) -> int:
    return len(rref(vectors, ctx)[1])


def nullspace(rows, ncols: int, ctx) -> list[list]:
    """Basis of ``{x : rows x = 0}``; free variables set one at a time."""
    red, pivots = rref(rows, ctx) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [ctx.zero] * ncols
        x[f] = ctx.one
        for r, c in zip(red, pivots):
            x[c] = -r[f]
        basis.append(x)
    return basis


def solve(rows, rhs, ctx):
    """One solution of ``rows x = rhs`` with free variables 0, or ``None``."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, ctx)
    if ncols in pivots:
        return None
    x = [ctx.zero] * ncols
    for r, c in zip(red, pivots):
        x[c] = r[ncols]
    return x


def mat_vec(A: Mat, v):
    zero = A.ctx.zero
    out = []
    for row in A.rows:
        s = zero
        for a, x in zip(row, v):
            if a and x:
                s = s + a * x
        out.append(s)
    return out


def from_columns(ctx, cols) -> Mat:
    n = len(cols)
    return Mat(ctx, [[cols[j][i] for j in range(n)] for i in range(n)])


def extend_to_basis(vectors, n: int, ctx) -> list:
    """Append standard basis vectors until ``vectors`` spans the space."""
    out = [list(v) for v in vectors]
    for i in range(n):
        if len(out) == n:
            break
        e = [ctx.one if t == i else ctx.zero for t in range(n)]
        if rank(out + [e], ctx) > len(out):
            out.append(e)
    return out


# -----------------------------------------------------------------------------
# polynomials


def poly_trim(p, ctx):
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def poly_mul(a, b, ctx):
    if not a or not b:
        return []
    out = [ctx.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
    return poly_trim(out, ctx)


def poly_add(a, b, ctx):
    n = max(len(a), len(b))
    a = list(a) + [ctx.zero] * (n - len(a))
    b = list(b) + [ctx.zero] * (n - len(b))
    return poly_trim([x + y for x, y in zip(a, b)], ctx)


def poly_sub(a, b, ctx):
    return poly_add(a, [-y for y in b], ctx)


def poly_divmod(a, b, ctx):
    a, b = poly_trim(a, ctx), poly_trim(b, ctx)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [ctx.zero] * max(len(a) - len(b) + 1, 0)
    inv = _inv(b[-1])
    r = list(a)
    while len(r) >= len(b) and r:
        c = r[-1] * inv
        s = len(r) - len(b)
        q[s] = c
        for i, y in enumerate(b):
            r[s + i] = r[s + i] - c * y
        r.pop()
        r = poly_trim(r, ctx)
    return poly_trim(q, ctx), r


def poly_eval(p, x, ctx):
    acc = ctx.zero
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_xgcd(a, b, ctx):
    """``(g, u, v)`` with ``u a + v b = g``, g monic."""
    r0, r1 = poly_trim(a, ctx), poly_trim(b, ctx)
    s0, s1 = [ctx.one], []
    t0, t1 = [], [ctx.one]
    while r1:
        q, r = poly_divmod(r0, r1, ctx)
        r0, r1 = r1, r
        s0, s1 = s1, poly_sub(s0, poly_mul(q, s1, ctx), ctx)
        t0, t1 = t1, poly_sub(t0, poly_mul(q, t1, ctx), ctx)
    lead = _inv(r0[-1])
    return ([c * lead for c in r0], [c * lead for c in s0], [c * lead for c in t0])


def poly_of_matrix(p, A: Mat) -> Mat:
    n, ctx = A.n, A.ctx
    acc = Mat.zeros(ctx, n)
    for c in reversed(p):
        acc = acc @ A
        if c:
            acc = acc + Mat.identity(ctx, n).scale(c)
    return acc


def charpoly(A: Mat):
    """Characteristic polynomial ``det(x I - A)`` by Berkowitz's
    division-free algorithm."""
    n, ctx = A.n, A.ctx
    if n == 0:
        return [ctx.one]
    # poly coefficients highest degree first during the recursion
    vec = [ctx.one, -A[0, 0]]
    for r in range(1, n):
        R = [A[r, j] for j in range(r)]
        C = [A[i, r] for i in range(r)]
        Ar = A.sub(0, r)
        a = A[r, r]
        # Toeplitz column: 1, -a, -R C, -R A C, -R A^2 C, ...
        col = [ctx.one, -a]
        v = C
        for _ in range(r):
            s = ctx.zero
            for x, y in zip(R, v):
                if x and y:
                    s = s + x * y
            col.append(-s)
            v = mat_vec(Ar, v)
        new = []
        for i in range(r + 2):
            s = ctx.zero
            for j in range(min(i, r) + 1):
                c = col[i - j]
                if c and vec[j]:
                    s = s + c * vec[j]
            new.append(s)
        vec = new
    return list(reversed(vec))
