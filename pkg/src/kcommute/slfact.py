"""Factorization in SL_n over cyclotomic fields.

Nonscalar matrices go through an LU similarity (both factors unipotent),
each factor is conjugated to ``I + J`` when it is a single Jordan block and
handled by the unitriangular machinery otherwise.  Scalar matrices ``a I``
are split into two diagonal matrices whose 2x2 blocks ``diag(c, 1/c)`` are
products of two order-k matrices with trace ``theta + 1/theta``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .commfact import (Certificate, CommutatorWord, Term, concat_certificates,
                       conjugate_certificate, eval_word, f_word, factor_superdiag,
                       factor_unitriangular)
from .errors import (DegenerateBlock, KTooSmall, PreconditionError, RootNotInRing,
                     ScalarInput, VerificationFailure)
from .linalg import extend_to_basis, from_columns, mat_vec, rank
from .mat import Mat, _inv
from .ring import RingCtx, kth_root


@dataclass(frozen=True)
class JBlockParams:
    a: object
    theta: object

    @property
    def t(self):
        return self.theta + _inv(self.theta)


def j_block(p: JBlockParams, ctx: RingCtx, printed: bool = False) -> tuple[Mat, Mat]:
    """2x2 matrices J1, J2 of trace t and determinant 1 with
    ``J1 J2 = diag(a, 1/a)``.

    ``printed=True`` reproduces the literal (1,2) entry ``a (a t/(a+1))^2 - 1``
    of J2, which breaks the determinant; kept only to document the misprint.
    """
    theta = ctx(p.theta)
    one = ctx.one
    if theta == one or theta == -one or theta ** ctx.k != one:
        raise DegenerateBlock("theta must be a k-th root of unity other than 1 and -1")
    return j_block_from_trace(p.a, theta + _inv(theta), ctx, printed)


def j_block_from_trace(a, t, ctx: RingCtx, printed: bool = False) -> tuple[Mat, Mat]:
    """The J1, J2 pair from the trace alone.  Over Q this covers k = 3, 4, 6
    (t = -1, 0, 1), where ``x^2 - t x + 1`` is the k-th cyclotomic polynomial."""
    a, t = ctx(a), ctx(t)
    one = ctx.one
    if not a or a == one or a == -one:
        raise DegenerateBlock("a must avoid 0, 1 and -1")
    s = t * _inv(a + one)        # t / (a + 1)
    at = a * s                   # a t / (a + 1)
    J1 = Mat(ctx, [[at, a - at * at], [-_inv(a), s]])
    j2_12 = a * at * at - one if printed else a * s * s - one
    J2 = Mat(ctx, [[at, j2_12], [one, s]])
    return J1, J2


def _choose_root(b, ctx: RingCtx):
    """k-th root of ``b`` on the smallest branch avoiding 1 and -1."""
    one = ctx.one
    for branch in range(ctx.k):
        c = kth_root(b, ctx, branch)
        if c != one and c != -one:
            return c
    raise RootNotInRing(f"every {ctx.k}-th root of {b!r} is +-1")


def scalar_diagonals(alpha, n: int, ctx: RingCtx) -> tuple[list, list]:
    """Diagonals of F and G with ``F G = alpha I`` (needs ``alpha^n = 1``)."""
    alpha = ctx(alpha)
    ainv = _inv(alpha)
    F, G = [], [ctx.one]
    for j in range(1, n, 2):
        F += [alpha ** j, ainv ** j]
    for j in range(2, n, 2):
        G += [alpha ** j, ainv ** j]
    if n % 2:
        F.append(ctx.one)
    else:
        G.append(ctx.one)
    return F, G


def _pairing(n: int, leading_single: bool):
    """Blocks of a diagonal: 1x1 at the front if asked, then pairs, then a
    trailing 1x1 if one entry is left."""
    blocks, i = [], 0
    if leading_single:
        blocks.append((0,))
        i = 1
    while i + 1 < n:
        blocks.append((i, i + 1))
        i += 2
    if i < n:
        blocks.append((i,))
    return blocks


def _j_pair_for_diagonal(diag, leading_single: bool, ctx: RingCtx) -> tuple[Mat, Mat]:
    """Order-k J1, J2 with ``(J1 J2)^k = diag(diag)`` for a diagonal made of
    ``(b, 1/b)`` pairs and unpaired ones."""
    n = len(diag)
    z = ctx.zero
    J1 = [[z] * n for _ in range(n)]
    J2 = [[z] * n for _ in range(n)]
    theta = ctx.omega
    for blk in _pairing(n, leading_single):
        if len(blk) == 1:
            (i,) = blk
            if diag[i] != ctx.one:
                raise VerificationFailure("unpaired diagonal entry is not 1")
            J1[i][i], J2[i][i] = theta, _inv(theta)
            continue
        i, j = blk
        c = _choose_root(diag[i], ctx)
        b1, b2 = j_block(JBlockParams(c, theta), ctx)
        for r in range(2):
            for s in range(2):
                J1[i + r][i + s] = b1[r, s]
                J2[i + r][i + s] = b2[r, s]
    return Mat(ctx, J1), Mat(ctx, J2)


def scalar_factor(alpha, n: int, ctx: RingCtx) -> Certificate:
    """``alpha I_n`` as ``4k - 6`` commutators (requires k >= 3, alpha^n = 1)."""
    k = ctx.k
    if k < 3:
        raise KTooSmall("k=2 scalar case out of scope")
    alpha = ctx(alpha)
    if alpha ** n != ctx.one:
        raise PreconditionError("alpha^n must equal 1 (det = 1)")
    Fd, Gd = scalar_diagonals(alpha, n, ctx)
    F1, F2 = _j_pair_for_diagonal(Fd, False, ctx)
    G1, G2 = _j_pair_for_diagonal(Gd, True, ctx)
    gens = {"F1": F1, "F2": F2, "G1": G1, "G2": G2}
    word = f_word(k, "F1", "F2") + f_word(k, "G1", "G2")
    cert = Certificate(ctx, gens, word, "theorem2", 4 * k - 6)
    if eval_word(word, gens) != Mat.identity(ctx, n).scale(alpha):
        raise VerificationFailure("scalar factorization does not reproduce alpha I")
    return cert


# -----------------------------------------------------------------------------
# LU similarity


def _leading_minors_one(B: Mat) -> bool:
    one = B.ctx.one
    return all(B.top_left(m).det() == one for m in range(1, B.n + 1))


def _candidates(m: int, ctx: RingCtx, budget: int = 200):
    one, zero = ctx.one, ctx.zero
    count = 0
    for i in range(m):
        yield [one if t == i else zero for t in range(m)]
    for c in range(1, 4):
        for i in range(m):
            for j in range(m):
                if i != j:
                    v = [zero] * m
                    v[i] = one
                    v[j] = ctx(c)
                    yield v
                    count += 1
                    if count > budget:
                        return


def _minor_basis(S: Mat, first_only: bool = False):
    """Yield ``R`` with all leading principal minors of ``R S R^-1`` equal to 1."""
    m, ctx = S.n, S.ctx
    if m == 1 or _leading_minors_one(S):
        yield Mat.identity(ctx, m)
        if first_only or m == 1:
            return
    if S.is_scalar():
        return
    for v in _candidates(m, ctx):
        Sv = mat_vec(S, v)
        if rank([v, Sv], ctx) < 2:
            continue
        b2 = [x - y for x, y in zip(Sv, v)]
        basis = extend_to_basis([v, b2], m, ctx)
        Pm = from_columns(ctx, basis)
        Pinv = Pm.inverse()
        B = Pinv @ S @ Pm
        r = B.sub(0, 1, 1, m)
        c = B.sub(1, m, 0, 1)
        rest = B.sub(1, m)
        sc = Mat(ctx, [[rest[i, j] - c[i, 0] * r[0, j] for j in range(m - 1)] for i in range(m - 1)])
        if m - 1 >= 2 and sc.is_scalar():
            continue
        for Rs in _minor_basis(sc, first_only=True):
            R = Mat.block_diagonal(ctx, [Mat.identity(ctx, 1), Rs]) @ Pinv
            yield R
            break


def doolittle(B: Mat) -> tuple[Mat, Mat]:
    """``B = L U`` with L unit lower triangular (no pivoting)."""
    n, ctx = B.n, B.ctx
    zero, one = ctx.zero, ctx.one
    L = [[one if i == j else zero for j in range(n)] for i in range(n)]
    U = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            s = B[i, j]
            for p in range(i):
                if L[i][p] and U[p][j]:
                    s = s - L[i][p] * U[p][j]
            U[i][j] = s
        if not U[i][i]:
            raise VerificationFailure("zero pivot in LU")
        inv = _inv(U[i][i])
        for j in range(i + 1, n):
            s = B[j, i]
            for p in range(i):
                if L[j][p] and U[p][i]:
                    s = s - L[j][p] * U[p][i]
            L[j][i] = s * inv
    return Mat(ctx, L), Mat(ctx, U)


def _is_regular_unipotent(U: Mat) -> bool:
    # unitriangular U is a single Jordan block iff no superdiagonal entry vanishes
    return all(U.superdiag())


def sourour_lu_similarity(A: Mat, prefer_regular: bool = True) -> tuple[Mat, Mat, Mat]:
    """``(P, L, U)`` with ``P A P^-1 = L U``, L unit lower and U unit upper
    triangular.  With ``prefer_regular`` the first similarity making both L
    and U single Jordan blocks is taken when one turns up within budget."""
    ctx = A.ctx
    if A.det() != ctx.one:
        raise PreconditionError("sourour_lu_similarity needs det(A) = 1")
    if A.is_scalar():
        raise ScalarInput("scalar matrices have no unipotent LU similarity")
    first = None
    for tries, P in enumerate(_minor_basis(A)):
        B = P @ A @ P.inverse()
        L, U = doolittle(B)
        _check_sourour(A, P, L, U)
        if first is None:
            first = (P, L, U)
        if not prefer_regular or (_is_regular_unipotent(U) and _is_regular_unipotent(L.transpose())):
            return P, L, U
        if tries > 60:
            break
    if first is None:
        raise VerificationFailure("no LU similarity found within the retry budget")
    return first


def _check_sourour(A, P, L, U):
    one = A.ctx.one
    if not (L.is_lower() and all(x == one for x in L.diag())):
        raise VerificationFailure("L is not unit lower triangular")
    if not U.is_unitriangular():
        raise VerificationFailure("U is not unit upper triangular")
    if P @ A != L @ U @ P:
        raise VerificationFailure("similarity P A P^-1 = L U does not hold")


# -----------------------------------------------------------------------------
# pipeline


def cyclic_basis(U: Mat) -> Mat | None:
    """Z with ``Z^-1 U Z = I + J`` (all-ones superdiagonal) when ``U - I`` is
    a single nilpotent Jordan block, else ``None``."""
    n, ctx = U.n, U.ctx
    N = U - Mat.identity(ctx, n)
    for i in reversed(range(n)):
        v = [ctx.one if t == i else ctx.zero for t in range(n)]
        chain = [v]
        for _ in range(n - 1):
            chain.append(mat_vec(N, chain[-1]))
        if any(chain[-1]):
            return from_columns(ctx, list(reversed(chain)))
    return None


def transpose_certificate(cert: Certificate) -> Certificate:
    """Certificate for ``T^t`` from one for ``T``:
    ``[X^a, Y^b]^t = [(Y^t)^-b, (X^t)^-a]`` and the word order reverses."""
    gens = {g + "t": v.transpose() for g, v in cert.generators.items()}
    terms = tuple(Term(t.y + "t", -t.y_exp, t.x + "t", -t.x_exp) for t in reversed(cert.word.terms))
    return Certificate(cert.ctx, gens, CommutatorWord(terms), cert.producer, cert.claimed_length,
                       cert.exceeds_bound, list(cert.notes))


def _factor_unipotent_upper(U: Mat, ctx: RingCtx) -> tuple[Certificate, bool]:
    """Certificate for unitriangular U; flag is True on the 4k-6 fallback."""
    Z = cyclic_basis(U)
    if Z is not None:
        n = U.n
        z, o = ctx.zero, ctx.one
        IJ = Mat(ctx, [[o if j in (i, i + 1) else z for j in range(n)] for i in range(n)])
        if Z.inverse() @ U @ Z != IJ:
            raise VerificationFailure("cyclic basis did not produce I + J")
        return conjugate_certificate(factor_superdiag(IJ, ctx), Z), False
    return factor_unitriangular(U, ctx), True


def trivial_certificate(ctx: RingCtx, n: int, producer: str) -> Certificate:
    k = ctx.k
    L = 4 * k - 6
    word = CommutatorWord(tuple(Term("I", 1, "I", 1) for _ in range(L)))
    return Certificate(ctx, {"I": Mat.identity(ctx, n)}, word, producer, L)


def factor_sl(A: Mat, ctx: RingCtx | None = None) -> Certificate:
    """``A`` in SL_n as commutators of order-k matrices: 4k-6 in the regular
    case, up to 8k-12 when an LU factor is not a single Jordan block (flagged
    as ``exceeds_bound``)."""
    ctx = ctx or A.ctx
    k = ctx.k
    n = A.n
    if A.det() != ctx.one:
        raise PreconditionError("factor_sl needs det(A) = 1")
    if A.is_identity():
        return trivial_certificate(ctx, n, "theorem2")
    if A.is_scalar():
        return scalar_factor(A[0, 0], n, ctx)
    P, L, U = sourour_lu_similarity(A)
    cert_u, fb_u = _factor_unipotent_upper(U, ctx)
    cert_lt, fb_l = _factor_unipotent_upper(L.transpose(), ctx)
    cert_l = transpose_certificate(cert_lt)
    length = len(cert_l.word) + len(cert_u.word)
    fallback = fb_u or fb_l
    cert = concat_certificates([cert_l, cert_u], "theorem2", length, exceeds_bound=length > 4 * k - 6)
    if fallback:
        cert.notes.append("LU factor not a single Jordan block: unitriangular fallback used")
    cert = conjugate_certificate(cert, P.inverse())
    cert.producer = "theorem2"
    return cert
