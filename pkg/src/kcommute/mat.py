"""Finite dense matrices and lazy infinite upper-triangular matrices.

Indices are 0-based throughout.  An infinite matrix is a :class:`LazyMatrix`;
it is block upper triangular with a finite invertible ``corner`` (size 0 for
genuinely triangular matrices, the :class:`TriOracle` family).  For every
``N >= corner`` the top-left ``N x N`` window is a group homomorphism, so
products, inverses and powers of windows are windows of products, inverses
and powers.
"""
from __future__ import annotations

import math
import threading

from .errors import Singular
from .ring import RingCtx


class Mat:
    """Immutable dense square matrix over a :class:`RingCtx`."""

    __slots__ = ("ctx", "rows", "n", "_cols", "_shape")

    def __init__(self, ctx: RingCtx, rows):
        self.ctx = ctx
        self.rows = tuple(tuple(r) for r in rows)
        self.n = len(self.rows)
        self._cols = None
        self._shape = None

    @classmethod
    def build(cls, ctx: RingCtx, rows) -> "Mat":
        rows = [[ctx(x) for x in r] for r in rows]
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("matrix must be square")
        return cls(ctx, rows)

    @classmethod
    def identity(cls, ctx: RingCtx, n: int) -> "Mat":
        z, o = ctx.zero, ctx.one
        return cls(ctx, [[o if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, ctx: RingCtx, n: int) -> "Mat":
        return cls(ctx, [[ctx.zero] * n for _ in range(n)])

    @classmethod
    def diagonal(cls, ctx: RingCtx, entries) -> "Mat":
        entries = [ctx(x) for x in entries]
        n = len(entries)
        return cls(ctx, [[entries[i] if i == j else ctx.zero for j in range(n)] for i in range(n)])

    @classmethod
    def block_diagonal(cls, ctx: RingCtx, blocks) -> "Mat":
        n = sum(b.n for b in blocks)
        rows = [[ctx.zero] * n for _ in range(n)]
        off = 0
        for b in blocks:
            for i in range(b.n):
                rows[off + i][off:off + b.n] = b.rows[i]
            off += b.n
        return cls(ctx, rows)

    # -- access ---------------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @property
    def cols(self):
        if self._cols is None:
            self._cols = tuple(zip(*self.rows)) if self.n else ()
        return self._cols

    def transpose(self) -> "Mat":
        return Mat(self.ctx, self.cols)

    def sub(self, r0: int, r1: int, c0: int | None = None, c1: int | None = None) -> "Mat":
        if c0 is None:
            c0, c1 = r0, r1
        return Mat(self.ctx, [row[c0:c1] for row in self.rows[r0:r1]])

    def top_left(self, m: int) -> "Mat":
        if m == self.n:
            return self
        return Mat(self.ctx, [row[:m] for row in self.rows[:m]])

    def diag(self) -> list:
        return [self.rows[i][i] for i in range(self.n)]

    def trace(self):
        return sum(self.diag(), self.ctx.zero)

    def superdiag(self) -> list:
        return [self.rows[i][i + 1] for i in range(self.n - 1)]

    def _classify(self):
        if self._shape is None:
            upper = all(not self.rows[i][j] for i in range(self.n) for j in range(i))
            lower = all(not self.rows[i][j] for i in range(self.n) for j in range(i + 1, self.n))
            self._shape = (upper, lower)
        return self._shape

    def is_upper(self) -> bool:
        return self._classify()[0]

    def is_lower(self) -> bool:
        return self._classify()[1]

    def is_diagonal(self) -> bool:
        return self.is_upper() and self.is_lower()

    def is_unitriangular(self) -> bool:
        one = self.ctx.one
        return self.is_upper() and all(self.rows[i][i] == one for i in range(self.n))

    def is_identity(self) -> bool:
        return self.is_diagonal() and all(self.rows[i][i] == self.ctx.one for i in range(self.n))

    def is_scalar(self) -> bool:
        return self.is_diagonal() and all(x == self.rows[0][0] for x in self.diag())

    # -- arithmetic -------------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Mat) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __matmul__(self, other: "Mat") -> "Mat":
        if other.n != self.n:
            raise ValueError(f"size mismatch {self.n} vs {other.n}")
        dot = self.ctx.dot
        cols = other.cols
        out = []
        for row in self.rows:
            nz = [(p, a) for p, a in enumerate(row) if a]
            out.append([dot([(a, col[p]) for p, a in nz if col[p]]) for col in cols])
        return Mat(self.ctx, out)

    def __add__(self, other: "Mat") -> "Mat":
        return Mat(self.ctx, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Mat") -> "Mat":
        return Mat(self.ctx, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "Mat":
        return Mat(self.ctx, [[-a for a in r] for r in self.rows])

    def scale(self, c) -> "Mat":
        return Mat(self.ctx, [[c * a for a in r] for r in self.rows])

    def inverse(self) -> "Mat":
        if self.is_upper():
            return _upper_inverse(self)
        if self.is_lower():
            return _upper_inverse(self.transpose()).transpose()
        return _gauss_jordan_inverse(self)

    def __pow__(self, e: int) -> "Mat":
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return Mat.identity(self.ctx, self.n)
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result @ base
            e >>= 1
            if e:
                base = base @ base
        return result

    def det(self):
        rows = [list(r) for r in self.rows]
        n = self.n
        d = self.ctx.one
        for c in range(n):
            piv = next((r for r in range(c, n) if rows[r][c]), None)
            if piv is None:
                return self.ctx.zero
            if piv != c:
                rows[c], rows[piv] = rows[piv], rows[c]
                d = -d
            p = rows[c][c]
            d = d * p
            inv = p.inverse() if hasattr(p, "inverse") else 1 / p
            for r in range(c + 1, n):
                f = rows[r][c]
                if f:
                    f = f * inv
                    rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
        return d

    def __repr__(self):
        return "Mat(" + ", ".join("[" + ", ".join(map(repr, r)) + "]" for r in self.rows) + ")"


def _inv(x):
    return x.inverse() if hasattr(x, "inverse") else 1 / x


def _upper_inverse(A: Mat) -> Mat:
    n, ctx = A.n, A.ctx
    rows = A.rows
    zero = ctx.zero
    dinv = []
    for i in range(n):
        if not rows[i][i]:
            raise Singular(f"zero diagonal entry at {i}")
        dinv.append(_inv(rows[i][i]))
    X = [[zero] * n for _ in range(n)]
    for i in range(n):
        Xi = X[i]
        Xi[i] = dinv[i]
        for j in range(i + 1, n):
            s = zero
            for p in range(i, j):
                x, a = Xi[p], rows[p][j]
                if x and a:
                    s = s + x * a
            Xi[j] = -s * dinv[j] if s else zero
    return Mat(ctx, X)


def _gauss_jordan_inverse(A: Mat) -> Mat:
    n, ctx = A.n, A.ctx
    one, zero = ctx.one, ctx.zero
    aug = [list(A.rows[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c]), None)
        if piv is None:
            raise Singular("matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = _inv(aug[c][c])
        aug[c] = [x * inv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return Mat(ctx, [row[n:] for row in aug])


# -----------------------------------------------------------------------------
# periodic sequences (diagonals and superdiagonals of infinite matrices)


class PeriodicSeq:
    """Infinite sequence ``prefix`` followed by ``period`` repeated forever.

    Stored in canonical form (minimal period, shortest prefix), so two
    sequences are equal iff their fields are equal.
    """

    __slots__ = ("prefix", "period")

    def __init__(self, prefix, period):
        prefix, period = list(prefix), list(period)
        if not period:
            raise ValueError("period must be nonempty")
        q = len(period)
        for d in range(1, q + 1):
            if q % d == 0 and all(period[i] == period[i % d] for i in range(q)):
                period = period[:d]
                break
        while prefix and prefix[-1] == period[-1]:
            prefix.pop()
            period = [period[-1]] + period[:-1]
        self.prefix = tuple(prefix)
        self.period = tuple(period)

    @classmethod
    def constant(cls, value) -> "PeriodicSeq":
        return cls([], [value])

    def __getitem__(self, i: int):
        L = len(self.prefix)
        if i < L:
            return self.prefix[i]
        return self.period[(i - L) % len(self.period)]

    def take(self, n: int) -> list:
        return [self[i] for i in range(n)]

    def shift(self, t: int = 1) -> "PeriodicSeq":
        """Drop the first ``t`` terms (the shift operator applied ``t`` times)."""
        L = len(self.prefix)
        if t <= L:
            return PeriodicSeq(self.prefix[t:], self.period)
        r = (t - L) % len(self.period)
        return PeriodicSeq([], self.period[r:] + self.period[:r])

    def prepend(self, values) -> "PeriodicSeq":
        return PeriodicSeq(list(values) + list(self.prefix), self.period)

    def map(self, f) -> "PeriodicSeq":
        return PeriodicSeq([f(x) for x in self.prefix], [f(x) for x in self.period])

    def zip_with(self, other: "PeriodicSeq", f) -> "PeriodicSeq":
        L = max(len(self.prefix), len(other.prefix))
        q = math.lcm(len(self.period), len(other.period))
        return PeriodicSeq([f(self[i], other[i]) for i in range(L)],
                           [f(self[L + t], other[L + t]) for t in range(q)])

    def is_constant(self, value) -> bool:
        return not self.prefix and len(self.period) == 1 and self.period[0] == value

    def structure_length(self) -> int:
        return len(self.prefix) + len(self.period)

    def __eq__(self, other):
        return (isinstance(other, PeriodicSeq) and self.prefix == other.prefix
                and self.period == other.period)

    def __hash__(self):
        return hash((self.prefix, self.period))

    def __repr__(self):
        return f"PeriodicSeq(prefix={list(self.prefix)!r}, period={list(self.period)!r})"


SuperDiagSpec = PeriodicSeq


# -----------------------------------------------------------------------------
# lazy infinite matrices


class LazyMatrix:
    """Infinite matrix evaluated on demand.

    Subclasses implement ``_window(N)`` (a Mat of size ``N >= corner``) and,
    for triangular ones, ``_entry(i, j)``.
    """

    corner = 0

    def __init__(self, ctx: RingCtx):
        self.ctx = ctx
        self._win = None
        self._memo = {}
        self._lock = threading.Lock()

    def window(self, N: int) -> Mat:
        if N < 0:
            raise ValueError("window size must be nonnegative")
        win = self._win
        if win is not None and win.n >= N:
            return win.top_left(N)
        M = max(N, self.corner)
        win = self._window(M)
        with self._lock:
            if self._win is None or self._win.n < win.n:
                self._win = win
        return win.top_left(N)

    def entry(self, i: int, j: int):
        if self.corner:
            return self.window(max(i, j) + 1)[i, j]
        if i > j:
            return self.ctx.zero
        key = (i, j)
        memo = self._memo
        if key in memo:
            return memo[key]
        val = self._entry(i, j)
        memo.setdefault(key, val)
        return val

    def _entry(self, i: int, j: int):
        return self.window(j + 1)[i, j]

    def _window(self, N: int) -> Mat:
        return Mat(self.ctx, [[self.entry(i, j) if i <= j else self.ctx.zero
                               for j in range(N)] for i in range(N)])

    # structural hints, overridden where known
    def diag_seq(self) -> PeriodicSeq:
        raise NotImplementedError(f"{type(self).__name__} has no finitary diagonal")

    def superdiag_seq(self) -> PeriodicSeq:
        raise NotImplementedError(f"{type(self).__name__} has no finitary superdiagonal")

    def structure_length(self) -> int:
        """Rough size of the finitary data, used to pick verification windows."""
        return 1

    # operator sugar
    def __matmul__(self, other):
        return product(self, other)


class TriOracle(LazyMatrix):
    corner = 0


class Banded(TriOracle):
    """Upper-triangular matrix with finitely many nonzero diagonals, each a
    :class:`PeriodicSeq`; ``diagonals`` maps offset ``d >= 0`` to the sequence
    of entries ``(i, i + d)``."""

    def __init__(self, ctx: RingCtx, diagonals: dict):
        super().__init__(ctx)
        self.diagonals = {d: s for d, s in sorted(diagonals.items())
                          if not s.is_constant(ctx.zero)}
        if any(d < 0 for d in self.diagonals):
            raise ValueError("negative diagonal offset")

    def _entry(self, i, j):
        s = self.diagonals.get(j - i)
        return self.ctx.zero if s is None else s[i]

    def _window(self, N):
        z = self.ctx.zero
        rows = [[z] * N for _ in range(N)]
        for d, s in self.diagonals.items():
            for i in range(N - d):
                rows[i][i + d] = s[i]
        return Mat(self.ctx, rows)

    def diag_seq(self):
        return self.diagonals.get(0, PeriodicSeq.constant(self.ctx.zero))

    def superdiag_seq(self):
        return self.diagonals.get(1, PeriodicSeq.constant(self.ctx.zero))

    def structure_length(self):
        return max((s.structure_length() for s in self.diagonals.values()), default=1)

    def __repr__(self):
        return f"Banded({self.diagonals!r})"


def identity_oracle(ctx: RingCtx) -> Banded:
    return Banded(ctx, {0: PeriodicSeq.constant(ctx.one)})


def superdiag_oracle(ctx: RingCtx, spec: PeriodicSeq, diag=None) -> Banded:
    """The matrix with superdiagonal ``spec``; diagonal ``diag`` (default zero)."""
    diags = {1: spec}
    if diag is not None:
        diags[0] = diag if isinstance(diag, PeriodicSeq) else PeriodicSeq.constant(diag)
    return Banded(ctx, diags)


class Product(LazyMatrix):
    def __init__(self, factors):
        factors = list(factors)
        if len(factors) < 2:
            raise ValueError("a product node needs at least two factors")
        super().__init__(factors[0].ctx)
        self.factors = factors
        self.corner = max(f.corner for f in factors)
        # left-nested binary chain for entry evaluation
        self._left = factors[0] if len(factors) == 2 else Product(factors[:-1])
        self._right = factors[-1]

    def _entry(self, i, j):
        A, B = self._left, self._right
        s = self.ctx.zero
        for p in range(i, j + 1):
            a = A.entry(i, p)
            if a:
                b = B.entry(p, j)
                if b:
                    s = s + a * b
        return s

    def _window(self, N):
        out = self.factors[0].window(N)
        for f in self.factors[1:]:
            out = out @ f.window(N)
        return out

    def diag_seq(self):
        a, b = self._left.diag_seq(), self._right.diag_seq()
        return a.zip_with(b, lambda x, y: x * y)

    def superdiag_seq(self):
        A, B = self._left, self._right
        ad, bd = A.diag_seq(), B.diag_seq()
        left = ad.zip_with(B.superdiag_seq(), lambda x, y: x * y)
        right = A.superdiag_seq().zip_with(bd.shift(1), lambda x, y: x * y)
        return left.zip_with(right, lambda x, y: x + y)

    def structure_length(self):
        return max(f.structure_length() for f in self.factors)


class Inverse(LazyMatrix):
    def __init__(self, of: LazyMatrix):
        super().__init__(of.ctx)
        self.of = of
        self.corner = of.corner

    def _entry(self, i, j):
        A = self.of
        if i == j:
            d = A.entry(i, i)
            if not d:
                raise Singular(f"zero diagonal entry at {i}")
            return _inv(d)
        s = self.ctx.zero
        for p in range(i, j):
            x = self.entry(i, p)
            if x:
                a = A.entry(p, j)
                if a:
                    s = s + x * a
        if not s:
            return s
        return -s * self.entry(j, j)

    def _window(self, N):
        return self.of.window(N).inverse()

    def diag_seq(self):
        return self.of.diag_seq().map(_inv)

    def superdiag_seq(self):
        d = self.of.diag_seq()
        both = d.zip_with(d.shift(1), lambda x, y: x * y)
        return self.of.superdiag_seq().zip_with(both, lambda s, p: -s * _inv(p))

    def structure_length(self):
        return self.of.structure_length()


class Power(LazyMatrix):
    def __init__(self, of: LazyMatrix, e: int):
        super().__init__(of.ctx)
        self.of = of
        self.e = e
        self.corner = of.corner
        base = of if e >= 0 else Inverse(of)
        self._node = _power_chain(base, abs(e))

    def _entry(self, i, j):
        return self._node.entry(i, j)

    def _window(self, N):
        return self.of.window(N) ** self.e

    def diag_seq(self):
        return self._node.diag_seq()

    def superdiag_seq(self):
        return self._node.superdiag_seq()

    def structure_length(self):
        return self.of.structure_length()


def _power_chain(base: LazyMatrix, e: int) -> LazyMatrix:
    if e == 0:
        if base.corner:
            return Product([base, Inverse(base)])
        return identity_oracle(base.ctx)
    if e == 1:
        return base
    half = _power_chain(base, e // 2)
    sq = Product([half, half])
    return sq if e % 2 == 0 else Product([sq, base])


class Conjugate(LazyMatrix):
    """``H X H^-1``."""

    def __init__(self, of: LazyMatrix, by: LazyMatrix):
        super().__init__(of.ctx)
        self.of = of
        self.by = by
        self._node = Product([by, of, Inverse(by)])
        self.corner = self._node.corner

    def _entry(self, i, j):
        return self._node.entry(i, j)

    def _window(self, N):
        H = self.by.window(N)
        return H @ self.of.window(N) @ H.inverse()

    def diag_seq(self):
        return self._node.diag_seq()

    def superdiag_seq(self):
        return self._node.superdiag_seq()

    def structure_length(self):
        return max(self.of.structure_length(), self.by.structure_length())


class DirectSum(LazyMatrix):
    """Block diagonal ``head (+) tail`` with a finite head and infinite tail."""

    def __init__(self, head: Mat, tail: LazyMatrix):
        super().__init__(tail.ctx)
        self.head = head
        self.tail = tail
        self.corner = head.n + tail.corner

    def _window(self, N):
        c = self.head.n
        return Mat.block_diagonal(self.ctx, [self.head, self.tail.window(N - c)])

    def structure_length(self):
        return self.head.n + self.tail.structure_length()


# -----------------------------------------------------------------------------
# module-level operations


def product(*factors):
    if all(isinstance(f, Mat) for f in factors):
        out = factors[0]
        for f in factors[1:]:
            out = out @ f
        return out
    return Product(factors)


def mul(A, B):
    return product(A, B)


def inverse(A):
    return A.inverse() if isinstance(A, Mat) else Inverse(A)


def power(A, e: int):
    return A ** e if isinstance(A, Mat) else Power(A, e)


def commutator(X, Y):
    """``[X, Y] = X Y X^-1 Y^-1``."""
    if isinstance(X, Mat) and isinstance(Y, Mat):
        return X @ Y @ X.inverse() @ Y.inverse()
    return Product([X, Y, Inverse(X), Inverse(Y)])


def conjugate(X, H):
    """``H X H^-1``."""
    if isinstance(X, Mat) and isinstance(H, Mat):
        return H @ X @ H.inverse()
    return Conjugate(X, H)


def window(A, N: int) -> Mat:
    if isinstance(A, Mat):
        return A.top_left(N)
    return A.window(N)


def order_divides(X, k: int, N: int | None = None) -> bool:
    """``X^k == I`` exactly (on the ``N`` window for infinite X)."""
    if not isinstance(X, Mat):
        if N is None:
            raise ValueError("a window size is required for infinite matrices")
        X = X.window(max(N, X.corner))
    return (X ** k).is_identity()
