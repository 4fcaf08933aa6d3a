"""Coherent matrices: ``A = sum_i D_i J(A)^i`` with diagonal ``D_i``.

A :class:`DiagSeq` holds ``D_0, D_1, ...`` as periodic sequences.  The key
rule is the exchange ``J D = S(D) J`` where ``S`` drops the first diagonal
entry, which turns products of expansions into the convolution
``(P * Q)_i = sum_{j<=i} P_j S^j(Q_{i-j})``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import NotCoherent, PreconditionError
from .mat import Banded, LazyMatrix, Mat, PeriodicSeq, TriOracle, _inv
from .ring import RingCtx


@dataclass(frozen=True)
class DiagSeq:
    """Coefficient diagonals ``terms[i] = D_i``; ``D_i = 0`` beyond the list.

    When ``window`` is set the sequence was read off an ``N x N`` window and
    ``terms[i]`` is only meaningful at positions ``p < window - i``.
    """

    ctx: RingCtx
    terms: tuple
    window: int | None = None

    def __getitem__(self, i):
        if i < len(self.terms):
            return self.terms[i]
        return PeriodicSeq.constant(self.ctx.zero)

    def __len__(self):
        return len(self.terms)

    def is_normalized(self) -> bool:
        one = self.ctx.one
        n = self.window
        for i in (0, 1):
            t = self[i]
            if n is None:
                if not t.is_constant(one):
                    return False
            elif any(x != one for x in t.take(n - i)):
                return False
        return True

    def agrees_with(self, other: "DiagSeq", N: int) -> bool:
        """Entrywise equality of all terms on positions ``p < N - i``."""
        for i in range(max(len(self), len(other))):
            if self[i].take(max(N - i, 0)) != other[i].take(max(N - i, 0)):
                return False
        return True


def _trimmed(ctx, terms, window=None) -> DiagSeq:
    terms = list(terms)
    zero = ctx.zero
    while len(terms) > 2:
        t = terms[-1]
        dead = t.is_constant(zero) if window is None else not any(t.take(max(window - len(terms) + 1, 0)))
        if not dead:
            break
        terms.pop()
    return DiagSeq(ctx, tuple(terms), window)


def identity_seq(ctx: RingCtx) -> DiagSeq:
    return DiagSeq(ctx, (PeriodicSeq.constant(ctx.one),))


class JPart(TriOracle):
    def __init__(self, of: LazyMatrix):
        super().__init__(of.ctx)
        self.of = of

    def _entry(self, i, j):
        return self.of.entry(i, j) if j == i + 1 else self.ctx.zero

    def _window(self, N):
        W = self.of.window(N)
        z = self.ctx.zero
        return Mat(self.ctx, [[W[i, j] if j == i + 1 else z for j in range(N)] for i in range(N)])

    def superdiag_seq(self):
        return self.of.superdiag_seq()

    def diag_seq(self):
        return PeriodicSeq.constant(self.ctx.zero)


def jpart(A):
    """The superdiagonal of ``A`` in an otherwise zero matrix."""
    if isinstance(A, Mat):
        z = A.ctx.zero
        return Mat(A.ctx, [[A[i, j] if j == i + 1 else z for j in range(A.n)] for i in range(A.n)])
    try:
        return Banded(A.ctx, {1: A.superdiag_seq()})
    except NotImplementedError:
        return JPart(A)


def shiftS(D, t: int = 1):
    """Shift a diagonal: entry ``i`` of the result is entry ``i + t`` of ``D``.

    Accepts a :class:`PeriodicSeq` or a finite diagonal :class:`Mat` (whose
    vacated trailing entries become zero).
    """
    if isinstance(D, PeriodicSeq):
        return D.shift(t)
    if not D.is_diagonal():
        raise PreconditionError("shiftS needs a diagonal matrix")
    d = D.diag()[t:] + [D.ctx.zero] * min(t, D.n)
    return Mat.diagonal(D.ctx, d)


def seq_product(P: DiagSeq, Q: DiagSeq) -> DiagSeq:
    """Coefficients of the product of two coherent expansions over one J."""
    ctx = P.ctx
    mul = lambda x, y: x * y
    add = lambda x, y: x + y
    out = []
    for i in range(len(P) + len(Q) - 1):
        acc = PeriodicSeq.constant(ctx.zero)
        for j in range(max(0, i - len(Q) + 1), min(i, len(P) - 1) + 1):
            acc = acc.zip_with(P[j].zip_with(Q[i - j].shift(j), mul), add)
        out.append(acc)
    windows = [w for w in (P.window, Q.window) if w is not None]
    return _trimmed(ctx, out, min(windows) if windows else None)


def power_seq(P: DiagSeq, l: int) -> DiagSeq:
    """Raw expansion of ``A^l`` in powers of ``J(A)``; index 1 equals ``l I``."""
    if l < 1:
        raise ValueError("l must be positive")
    R = P
    for _ in range(l - 1):
        R = seq_product(P, R)
    return R


def rescale(P: DiagSeq, c) -> DiagSeq:
    """Divide ``D_i`` by ``c^i``: re-expresses an expansion over ``J`` as one
    over ``c J``."""
    inv = _inv(P.ctx(c))
    terms = []
    f = P.ctx.one
    for t in P.terms:
        terms.append(t.map(lambda x, f=f: x * f))
        f = f * inv
    return DiagSeq(P.ctx, tuple(terms), P.window)


def j_power_diagonal(J: PeriodicSeq, i: int, ctx: RingCtx) -> PeriodicSeq:
    """Entries ``(p, p + i)`` of ``J^i``: ``prod_{t<i} J[p + t]``."""
    acc = PeriodicSeq.constant(ctx.one)
    for t in range(i):
        acc = acc.zip_with(J.shift(t), lambda x, y: x * y)
    return acc


def realize(P: DiagSeq, J: PeriodicSeq) -> Banded:
    """The matrix ``sum_i D_i J^i`` as a banded oracle."""
    ctx = P.ctx
    diags = {}
    for i, t in enumerate(P.terms):
        diags[i] = t.zip_with(j_power_diagonal(J, i, ctx), lambda x, y: x * y)
    return Banded(ctx, diags)


def coherent_solve(A, max_offset: int | None = None, window: int | None = None) -> DiagSeq:
    """Read off a normalized coherent expansion of the unitriangular ``A``.

    Entries of ``D_i`` where ``J(A)^i`` vanishes are set to 0, and the
    corresponding entry of ``A`` must vanish too, else :class:`NotCoherent`.
    """
    if isinstance(A, Mat):
        W = A
    else:
        if window is None:
            raise ValueError("window is required for infinite matrices")
        W = A.window(window)
    ctx, N = W.ctx, W.n
    if not W.is_unitriangular():
        raise PreconditionError("coherent_solve needs a unitriangular matrix")
    if max_offset is None:
        max_offset = N - 1
    J = W.superdiag()
    one, zero = ctx.one, ctx.zero
    terms = [PeriodicSeq([one] * N, [zero]), PeriodicSeq([one] * N, [zero])]
    for i in range(2, min(max_offset, N - 1) + 1):
        vals = []
        for p in range(N - i):
            jp = one
            for t in range(p, p + i):
                jp = jp * J[t]
                if not jp:
                    break
            a = W[p, p + i]
            if jp:
                vals.append(a * _inv(jp))
            elif a:
                raise NotCoherent(f"entry ({p}, {p + i}) is nonzero but J(A)^{i} vanishes there")
            else:
                vals.append(zero)
        terms.append(PeriodicSeq(vals, [zero]))
    return _trimmed(ctx, terms, N)


def reconstruct(P: DiagSeq, J, N: int) -> Mat:
    """``sum_i D_i J^i`` on the ``N`` window (``J`` a sequence or a list)."""
    if not isinstance(J, PeriodicSeq):
        J = PeriodicSeq(list(J), [P.ctx.zero])
    return realize(P, J).window(N)
