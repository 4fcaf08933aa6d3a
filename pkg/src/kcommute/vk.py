"""Vershik-Kerov block matrices ``[[M1, M2], [0, M3]]`` and their
factorization.

The pipeline splits the finite corner into a part without eigenvalue 1 and
a unipotent part, pushes the unipotent part into the infinite unitriangular
tail, kills the remaining coupling with a column-recursive Sylvester solve,
and zips certificates of the two diagonal blocks term by term.
"""
from __future__ import annotations

import threading

from .commfact import (Certificate, CommutatorWord, Term,
                       factor_unitriangular)
from .errors import EigenvalueOne, PreconditionError, VerificationFailure
from .linalg import (charpoly, from_columns, nullspace, poly_divmod, poly_eval, poly_mul,
                     poly_of_matrix, poly_xgcd, rank, rref)
from .mat import (Conjugate, DirectSum, Inverse, LazyMatrix, Mat, Power, Product,
                  identity_oracle)
from .ring import RingCtx
from .slfact import factor_sl


class Coupling:
    """``rows x infinity`` block; subclasses provide ``column(j)``."""

    def __init__(self, ctx: RingCtx, rows: int):
        self.ctx = ctx
        self.rows = rows

    def column(self, j: int) -> list:
        raise NotImplementedError

    def block(self, ncols: int) -> list:
        cols = [self.column(j) for j in range(ncols)]
        return [[cols[j][i] for j in range(ncols)] for i in range(self.rows)]


class PeriodicCoupling(Coupling):
    """Columns ``prefix_cols`` followed by ``period_cols`` repeated."""

    def __init__(self, ctx, rows, prefix_cols, period_cols):
        super().__init__(ctx, rows)
        self.prefix_cols = [tuple(ctx(x) for x in c) for c in prefix_cols]
        self.period_cols = [tuple(ctx(x) for x in c) for c in period_cols] or [(ctx.zero,) * rows]
        if any(len(c) != rows for c in self.prefix_cols + self.period_cols):
            raise ValueError(f"coupling columns must have {rows} entries")

    @classmethod
    def zero(cls, ctx, rows):
        return cls(ctx, rows, [], [[ctx.zero] * rows])

    def column(self, j):
        L = len(self.prefix_cols)
        if j < L:
            return list(self.prefix_cols[j])
        return list(self.period_cols[(j - L) % len(self.period_cols)])

    def left_multiply(self, Q: Mat, rows=None) -> "PeriodicCoupling":
        """``(Q C)`` restricted to ``rows`` (a range) of the product."""
        rows = range(Q.n) if rows is None else rows

        def tf(c):
            full = [sum((Q[i, t] * c[t] for t in range(self.rows) if c[t]), self.ctx.zero)
                    for i in range(Q.n)]
            return [full[i] for i in rows]
        return PeriodicCoupling(self.ctx, len(rows), [tf(c) for c in self.prefix_cols],
                                [tf(c) for c in self.period_cols])

    def with_leading_zero_columns(self, count: int) -> "PeriodicCoupling":
        z = [self.ctx.zero] * self.rows
        return PeriodicCoupling(self.ctx, self.rows, [z] * count + self.prefix_cols, self.period_cols)

    def structure_length(self):
        return len(self.prefix_cols) + 2 * len(self.period_cols)


class VKMat(LazyMatrix):
    """``[[M1, M2], [0, M3]]`` with ``M1`` n x n, ``M2`` a coupling and
    ``M3`` an infinite upper-triangular matrix.  When ``M1`` is upper
    triangular the whole matrix is, and it behaves as a triangular oracle."""

    def __init__(self, m1: Mat, m2: Coupling, m3: LazyMatrix):
        super().__init__(m1.ctx)
        if m2.rows != m1.n:
            raise ValueError("coupling rows must match the corner size")
        self.n = m1.n
        self.m1, self.m2, self.m3 = m1, m2, m3
        self.corner = 0 if m1.is_upper() else m1.n

    def entry(self, i, j):
        n = self.n
        if i < n:
            return self.m1[i, j] if j < n else self.m2.column(j - n)[i]
        if j < n:
            return self.ctx.zero
        return self.m3.entry(i - n, j - n)

    def _entry(self, i, j):
        return self.entry(i, j)

    def _window(self, N):
        n, ctx = self.n, self.ctx
        tail = self.m3.window(N - n)
        coup = self.m2.block(N - n)
        rows = []
        for i in range(n):
            rows.append(list(self.m1.rows[i]) + coup[i])
        for i in range(N - n):
            rows.append([ctx.zero] * n + list(tail.rows[i]))
        return Mat(ctx, rows)

    def diag_seq(self):
        return self.m3.diag_seq().prepend(self.m1.diag())

    def superdiag_seq(self):
        if self.n == 0:
            return self.m3.superdiag_seq()
        vals = self.m1.superdiag() + [self.m2.column(0)[self.n - 1]]
        return self.m3.superdiag_seq().prepend(vals)

    def structure_length(self):
        s = self.m2.structure_length() if hasattr(self.m2, "structure_length") else 1
        return self.n + max(s, self.m3.structure_length())


# -----------------------------------------------------------------------------
# spectral splitting


def _column_space(E: Mat) -> list:
    red, piv = rref(E.transpose().rows, E.ctx)
    return [list(r) for r in red]


def _flag_basis(N0: Mat) -> Mat:
    """Basis in which the nilpotent ``N0`` is strictly upper triangular."""
    m, ctx = N0.n, N0.ctx
    basis = []
    P = Mat.identity(ctx, m)
    while len(basis) < m:
        P = P @ N0
        for v in nullspace([list(r) for r in P.rows], m, ctx):
            if rank(basis + [v], ctx) > len(basis):
                basis.append(v)
        if P == Mat.zeros(ctx, m) and len(basis) < m:
            raise VerificationFailure("flag basis construction stalled")
    return from_columns(ctx, basis)


def spectral_split(M1: Mat, check_det: bool = True) -> tuple[Mat, Mat, Mat]:
    """``(A, Nu, Q)`` with ``Q M1 Q^-1 = diag(A, Nu)``, A without eigenvalue 1
    and Nu unitriangular; either block may be empty."""
    ctx, n = M1.ctx, M1.n
    if check_det and M1.det() != ctx.one:
        raise PreconditionError("spectral_split needs det(M1) = 1")
    one = ctx.one
    chi = charpoly(M1)
    g, m = chi, 0
    x_minus_1 = [-one, one]
    while len(g) > 1:
        q, r = poly_divmod(g, x_minus_1, ctx)
        if r:
            break
        g, m = q, m + 1
    I = Mat.identity(ctx, n)
    if m == 0:
        return M1, Mat(ctx, []), I
    pm = [one]
    for _ in range(m):
        pm = poly_mul(pm, x_minus_1, ctx)
    if m == n:
        WA, WN = [], [[one if i == j else ctx.zero for i in range(n)] for j in range(n)]
    else:
        _, u, v = poly_xgcd(pm, g, ctx)
        EA = poly_of_matrix(poly_mul(u, pm, ctx), M1)   # projector onto ker g(M1)
        EN = poly_of_matrix(poly_mul(v, g, ctx), M1)    # onto ker (M1 - I)^m
        WA, WN = _column_space(EA), _column_space(EN)
        if len(WA) != n - m or len(WN) != m:
            raise VerificationFailure("projector ranks do not match the multiplicity")
    Qinv = from_columns(ctx, WA + WN)
    D = Qinv.inverse() @ M1 @ Qinv
    a = n - m
    Nu0 = D.sub(a, n)
    Z = _flag_basis(Nu0 - Mat.identity(ctx, m))
    Qinv = Qinv @ Mat.block_diagonal(ctx, [Mat.identity(ctx, a), Z])
    Q = Qinv.inverse()
    D = Q @ M1 @ Qinv
    A, Nu = D.sub(0, a), D.sub(a, n)
    if any(D[i, j] for i in range(a) for j in range(a, n)) or \
            any(D[i, j] for i in range(a, n) for j in range(a)):
        raise VerificationFailure("spectral split is not block diagonal")
    if not Nu.is_unitriangular():
        raise VerificationFailure("unipotent block is not unitriangular")
    if a and not poly_eval(g, one, ctx):
        raise VerificationFailure("eigenvalue 1 left in the regular block")
    return A, Nu, Q


# -----------------------------------------------------------------------------
# Sylvester decoupling


class SylvesterCoupling(Coupling):
    """Lazy ``Y`` with ``A Y - Y T = -Bc``; column j solves
    ``(A - I) y_j = -b_j + sum_{i<j} y_i T[i, j]``."""

    def __init__(self, A: Mat, Bc: Coupling, T: LazyMatrix):
        super().__init__(A.ctx, A.n)
        ctx = A.ctx
        AmI = A - Mat.identity(ctx, A.n)
        if A.n and not AmI.det():
            raise EigenvalueOne("1 is an eigenvalue of A")
        self.A, self.Bc, self.T = A, Bc, T
        self._solver = AmI.inverse() if A.n else AmI
        self._cols = []
        self._lock = threading.Lock()

    def column(self, j):
        with self._lock:
            while len(self._cols) <= j:
                c = len(self._cols)
                rhs = [-x for x in self.Bc.column(c)]
                for i in range(c):
                    t = self.T.entry(i, c)
                    if t:
                        yi = self._cols[i]
                        rhs = [r + y * t for r, y in zip(rhs, yi)]
                S = self._solver
                self._cols.append([sum((S[r, s] * rhs[s] for s in range(self.rows) if rhs[s]),
                                       self.ctx.zero) for r in range(self.rows)])
            return list(self._cols[j])


def sylvester_decouple(A: Mat, Bc: Coupling, T: LazyMatrix) -> SylvesterCoupling:
    return SylvesterCoupling(A, Bc, T)


class _NegCoupling(Coupling):
    def __init__(self, base: Coupling, skip: int = 0, rows_total: int | None = None):
        super().__init__(base.ctx, rows_total if rows_total is not None else base.rows)
        self.base, self.skip = base, skip

    def column(self, j):
        col = [-x for x in self.base.column(j + self.skip)]
        return col + [self.ctx.zero] * (self.rows - len(col))


class VKDecoupling:
    """Everything the Theorem-3 style pipeline derives from one VKMat.

    ``conjugator`` W satisfies ``W M W^-1 = diag(A, tail)``.
    """

    def __init__(self, M: VKMat):
        ctx = M.ctx
        self.M = M
        n = M.n
        A, Nu, Q = spectral_split(M.m1)
        a, m = A.n, Nu.n
        self.A, self.Nu, self.Q = A, Nu, Q
        QM2 = M.m2.left_multiply(Q) if isinstance(M.m2, PeriodicCoupling) else None
        if QM2 is None:
            raise PreconditionError("coupling must be prefix+periodic")
        top = QM2.left_multiply(Mat.identity(ctx, n), range(0, a))
        bot = QM2.left_multiply(Mat.identity(ctx, n), range(a, n))
        self.tail = VKMat(Nu, bot, M.m3)
        self.coupling = top.with_leading_zero_columns(m)
        self.Y = sylvester_decouple(A, self.coupling, self.tail)
        # shear [[I, -Y], [0, I]] expressed with corner n
        m1 = [[ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)]
        for i in range(a):
            y = self.Y.column
            for j in range(m):
                m1[i][a + j] = -y(j)[i]
        shear = VKMat(Mat(ctx, m1), _NegCoupling(self.Y, skip=m, rows_total=n), identity_oracle(ctx))
        qi = VKMat(Q, PeriodicCoupling.zero(ctx, n), identity_oracle(ctx))
        self.conjugator = Product([shear, qi])


class VKConjugator(LazyMatrix):
    """``W`` for a VKMat (serializable by reference to the matrix)."""

    def __init__(self, M: VKMat, dec: VKDecoupling | None = None):
        super().__init__(M.ctx)
        self.M = M
        self.dec = dec or decoupling(M)
        self.corner = self.dec.conjugator.corner

    def _window(self, N):
        return self.dec.conjugator.window(N)


class VKTail(LazyMatrix):
    """The unitriangular tail block of the decoupled matrix."""

    def __init__(self, M: VKMat, dec: VKDecoupling | None = None):
        super().__init__(M.ctx)
        self.M = M
        self.dec = dec or decoupling(M)
        self.corner = 0

    def _entry(self, i, j):
        return self.dec.tail.entry(i, j)

    def _window(self, N):
        return self.dec.tail.window(N)

    def diag_seq(self):
        return self.dec.tail.diag_seq()

    def superdiag_seq(self):
        return self.dec.tail.superdiag_seq()

    def structure_length(self):
        return self.dec.tail.structure_length()


_DECOUPLINGS: dict = {}


def decoupling(M: VKMat) -> VKDecoupling:
    key = id(M)
    hit = _DECOUPLINGS.get(key)
    if hit is None or hit.M is not M:
        hit = VKDecoupling(M)
        _DECOUPLINGS[key] = hit
    return hit


def _identity_like(g):
    if isinstance(g, Mat):
        return Mat.identity(g.ctx, g.n)
    return identity_oracle(g.ctx)


def zip_certificates(head: Certificate | None, tail: Certificate, head_size: int,
                     ctx: RingCtx) -> Certificate:
    """Direct sum of two certificates, term by term, padding the shorter one
    with ``[I, I]``."""
    hterms = list(head.word) if head else []
    tterms = list(tail.word)
    L = max(len(hterms), len(tterms))
    gens, terms = {}, []
    Ih = Mat.identity(ctx, head_size)
    It = identity_oracle(ctx)

    def hp(name, e):
        return head.generators[name] ** e

    for idx in range(L):
        if idx < len(hterms):
            h = hterms[idx]
            hx, hy = hp(h.x, h.x_exp), hp(h.y, h.y_exp)
        else:
            hx = hy = Ih
        if idx < len(tterms):
            t = tterms[idx]
            tx = Power(tail.generators[t.x], t.x_exp)
            ty = Power(tail.generators[t.y], t.y_exp)
        else:
            tx = ty = It
        gens[f"X{idx + 1}"] = DirectSum(hx, tx)
        gens[f"Y{idx + 1}"] = DirectSum(hy, ty)
        terms.append(Term(f"X{idx + 1}", 1, f"Y{idx + 1}", 1))
    exceeds = bool(head and head.exceeds_bound)
    return Certificate(ctx, gens, CommutatorWord(tuple(terms)), "theorem3", L, exceeds)


def factor_vk(M: VKMat, ctx: RingCtx | None = None, check_window: int = 16) -> Certificate:
    """Factor a VKMat with ``det M1 = 1`` and unitriangular ``M3``."""
    ctx = ctx or M.ctx
    W3 = M.m3.window(check_window)
    if not W3.is_unitriangular():
        raise PreconditionError("M3 must be unitriangular")
    dec = decoupling(M)
    tail = VKTail(M, dec)
    cert_t = factor_unitriangular(tail, ctx, check_window)
    cert_a = factor_sl(dec.A, ctx) if dec.A.n else None
    cert = zip_certificates(cert_a, cert_t, dec.A.n, ctx)
    Winv = Inverse(VKConjugator(M, dec))
    cert.generators = {g: Conjugate(v, Winv) for g, v in cert.generators.items()}
    if cert_a is not None:
        cert.notes += cert_a.notes
    return cert
