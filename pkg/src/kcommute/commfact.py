"""Commutator words, the order-k pair (B, C), conjugators, and the
unitriangular factorization pipeline with certificates.

The central identity: for B, C with ``B^k = C^k = I``,
``(BC)^k = F_k(B, C)`` where ``F_2 = [B, C]`` and
``F_{i+1} = F_i [C^{i-1}, B^i] [B^i, C^i]`` (2k - 3 commutators).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import NotConjugate, PreconditionError, VerificationFailure
from .linalg import nullspace
from .mat import (Banded, Conjugate, Inverse, LazyMatrix, Mat, PeriodicSeq, Power,
                  Product, TriOracle, _inv, identity_oracle)
from .ring import RingCtx


# -----------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class Term:
    """The commutator ``[x^x_exp, y^y_exp]`` of two named generators."""

    x: str
    x_exp: int
    y: str
    y_exp: int

    def renamed(self, mapping) -> "Term":
        return Term(mapping.get(self.x, self.x), self.x_exp, mapping.get(self.y, self.y), self.y_exp)

    def __str__(self):
        def fmt(g, e):
            return g if e == 1 else f"{g}^{e}"
        return f"[{fmt(self.x, self.x_exp)},{fmt(self.y, self.y_exp)}]"


@dataclass(frozen=True)
class CommutatorWord:
    terms: tuple = ()

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __add__(self, other: "CommutatorWord") -> "CommutatorWord":
        return CommutatorWord(self.terms + other.terms)

    def renamed(self, mapping) -> "CommutatorWord":
        return CommutatorWord(tuple(t.renamed(mapping) for t in self.terms))

    def generators(self) -> set:
        return {t.x for t in self.terms} | {t.y for t in self.terms}

    def __str__(self):
        return "".join(map(str, self.terms)) or "1"


def f_word(i: int, b: str = "B", c: str = "C") -> CommutatorWord:
    """``F_i(B, C)``; has ``2i - 3`` terms."""
    if i < 2:
        raise ValueError("f_word needs i >= 2")
    terms = [Term(b, 1, c, 1)]
    for h in range(2, i):
        terms.append(Term(c, h - 1, b, h))
        terms.append(Term(b, h, c, h))
    return CommutatorWord(tuple(terms))


def telescope_tail(B, C, i: int):
    """``C^(i-1) B^i C``, the factor left over after ``F_i`` in ``(BC)^i``."""
    if isinstance(B, Mat):
        return (C ** (i - 1)) @ (B ** i) @ C
    return Product([Power(C, i - 1), Power(B, i), C])


class _PowerCache:
    def __init__(self, gens):
        self.gens = gens
        self.cache = {}
        self.inv = {}

    def get(self, name, e):
        key = (name, e)
        if key not in self.cache:
            g = self.gens[name]
            if isinstance(g, Mat):
                # step from the neighbouring power toward zero
                if e == 0:
                    val = Mat.identity(g.ctx, g.n)
                elif e > 0:
                    val = g if e == 1 else self.get(name, e - 1) @ g
                else:
                    if name not in self.inv:
                        self.inv[name] = g.inverse()
                    val = self.inv[name] if e == -1 else self.get(name, e + 1) @ self.inv[name]
            else:
                val = Power(g, e)
            self.cache[key] = val
        return self.cache[key]


def eval_word(word: CommutatorWord, gens: dict, size=None):
    """Ordered product of the commutators in ``word``.

    Finite generators give a :class:`Mat`; infinite ones a composition node.
    ``size`` supplies the identity for an empty finite word.
    """
    pc = _PowerCache(gens)
    sample = next(iter(gens.values()), None) if gens else None
    finite = isinstance(sample, Mat) or (sample is None and isinstance(size, int))
    if finite:
        if sample is not None:
            ctx, n = sample.ctx, sample.n
        else:
            raise ValueError("empty finite word needs generators to fix the size")
        acc = Mat.identity(ctx, n)
        for t in word:
            X, Y = pc.get(t.x, t.x_exp), pc.get(t.y, t.y_exp)
            Xi, Yi = pc.get(t.x, -t.x_exp), pc.get(t.y, -t.y_exp)
            acc = acc @ X @ Y @ Xi @ Yi
        return acc
    factors = []
    for t in word:
        factors += [pc.get(t.x, t.x_exp), pc.get(t.y, t.y_exp),
                    pc.get(t.x, -t.x_exp), pc.get(t.y, -t.y_exp)]
    if not factors:
        return identity_oracle(sample.ctx)
    if len(factors) == 1:
        return factors[0]
    return Product(factors)


# -----------------------------------------------------------------------------
# the order-k pair


def _seq_of(J, ctx) -> PeriodicSeq:
    if isinstance(J, PeriodicSeq):
        return J
    return PeriodicSeq([ctx(x) for x in J], [ctx.zero])


def bc_pair(J, ctx: RingCtx) -> tuple[Banded, Banded]:
    """Two order-k upper-triangular matrices whose product has superdiagonal
    ``J / k``; hence ``(BC)^k`` has superdiagonal ``J``.

    ``B = diag(1, [[w, a_1/k], [0, 1]], [[w, a_3/k], [0, 1]], ...)`` and
    ``C = diag([[1, a_0/k], [0, 1/w]], [[1, a_2/k], [0, 1/w]], ...)`` with
    ``a_r`` the 0-based superdiagonal of ``J``.
    """
    J = _seq_of(J, ctx)
    kinv = _inv(ctx(ctx.k))
    w, winv = ctx.omega, ctx.omega_inv
    one, zero = ctx.one, ctx.zero
    mul = lambda x, y: x * y
    B = Banded(ctx, {0: PeriodicSeq([], [one, w]),
                     1: J.zip_with(PeriodicSeq([], [zero, kinv]), mul)})
    C = Banded(ctx, {0: PeriodicSeq([], [one, winv]),
                     1: J.zip_with(PeriodicSeq([], [kinv, zero]), mul)})
    return B, C


def bc_pair_finite(J, ctx: RingCtx, n: int) -> tuple[Mat, Mat]:
    """The ``n`` window of :func:`bc_pair`."""
    B, C = bc_pair(J, ctx)
    return B.window(n), C.window(n)


# -----------------------------------------------------------------------------
# conjugators


def _chain_solve(P: Mat, Q: Mat) -> Mat:
    """Unitriangular X with ``P X = X Q`` for unitriangular P, Q sharing a
    superdiagonal.

    The equation at (i, j) determines ``x[i+1][j]`` from entries of smaller
    offset and ``x[i][j-1]``; rows where the superdiagonal chain restarts
    (after a zero) anchor at 0, and entries crossing a zero stay 0.
    """
    ctx, N = P.ctx, P.n
    zero, one = ctx.zero, ctx.one
    s = P.superdiag()
    if s != Q.superdiag():
        bad = next(i for i in range(N - 1) if P[i, i + 1] != Q[i, i + 1])
        raise NotConjugate(f"superdiagonals differ at ({bad + 1}, {bad + 2})")
    block = [0] * N
    for r in range(1, N):
        block[r] = block[r - 1] + (0 if s[r - 1] else 1)
    X = [[one if i == j else zero for j in range(N)] for i in range(N)]
    Pr, Qr = P.rows, Q.rows
    sinv = [_inv(x) if x else None for x in s]
    for d in range(1, N):
        for r in range(1, N - d):
            c = r + d
            if block[r] != block[c] or block[r - 1] != block[r]:
                continue
            i, j = r - 1, c
            acc = Qr[i][j] - Pr[i][j]
            Xi = X[i]
            for p in range(i + 1, j):
                x, q = Xi[p], Qr[p][j]
                if x and q:
                    acc = acc + x * q
            for p in range(i + 2, j):
                a, x = Pr[i][p], X[p][j]
                if a and x:
                    acc = acc - a * x
            X[r][c] = acc * sinv[i] if acc else zero
    return Mat(ctx, X)


class ChainConjugator(TriOracle):
    """Lazy unitriangular X with ``P X = X Q`` (anchored solve, see
    :func:`_chain_solve`).  Window ``N`` only reads the ``N`` windows of P
    and Q, so windows are mutually consistent."""

    def __init__(self, P: LazyMatrix, Q: LazyMatrix):
        super().__init__(P.ctx)
        self.P = P
        self.Q = Q

    def _window(self, N):
        return _chain_solve(self.P.window(N), self.Q.window(N))

    def diag_seq(self):
        return PeriodicSeq.constant(self.ctx.one)

    def structure_length(self):
        return max(self.P.structure_length(), self.Q.structure_length())


def chain_conjugator(P, Q, bound: int | None = None):
    """X with ``P X = X Q``; checked exactly (on the ``bound`` window for
    infinite inputs)."""
    if isinstance(P, Mat):
        X = _chain_solve(P, Q)
        if P @ X != X @ Q:
            raise NotConjugate("no unitriangular conjugator: inputs are not coherent with a common J")
        return X
    X = ChainConjugator(P, Q)
    if bound is not None:
        Pw, Qw, Xw = P.window(bound), Q.window(bound), X.window(bound)
        if Pw @ Xw != Xw @ Qw:
            raise NotConjugate("no unitriangular conjugator on the checked window")
    return X


def conjugator_coherent(A, B, bound: int | None = None):
    """Unitriangular X with ``X A = B X`` for coherent A, B with equal J."""
    return chain_conjugator(B, A, bound)


def _bidiagonal_target(A):
    ctx = A.ctx
    if isinstance(A, Mat):
        z, o = ctx.zero, ctx.one
        return Mat(ctx, [[A[i, i] if i == j else (o if j == i + 1 else z)
                          for j in range(A.n)] for i in range(A.n)])
    return Banded(ctx, {0: A.diag_seq(), 1: PeriodicSeq.constant(ctx.one)})


def _triangular_intertwiner(A: Mat, T: Mat) -> Mat:
    """Invertible upper-triangular X with ``A X = X T`` by a full linear
    solve; free parameters are tried deterministically until the diagonal
    of X is invertible."""
    ctx, n = A.ctx, A.n
    unknowns = [(p, q) for p in range(n) for q in range(p, n)]
    rows = []
    for i in range(n):
        for j in range(i, n):
            row = []
            for p, q in unknowns:
                v = ctx.zero
                if q == j and A[i, p]:
                    v = v + A[i, p]
                if p == i and T[q, j]:
                    v = v - T[q, j]
                row.append(v)
            rows.append(row)
    basis = nullspace(rows, len(unknowns), ctx)
    diag_idx = [unknowns.index((i, i)) for i in range(n)]
    rng = random.Random(0)
    for attempt in range(64):
        coeffs = [ctx.one] * len(basis) if attempt == 0 else [
            ctx(rng.randint(1, 9)) for _ in basis]
        x = [ctx.zero] * len(unknowns)
        for c, v in zip(coeffs, basis):
            x = [a + c * b for a, b in zip(x, v)]
        if all(x[t] for t in diag_idx):
            X = [[ctx.zero] * n for _ in range(n)]
            for (p, q), val in zip(unknowns, x):
                X[p][q] = val
            return Mat(ctx, X)
    raise NotConjugate("no invertible upper-triangular conjugator found")


def conjugator_to_bidiagonal(A):
    """X with ``X^-1 A X`` bidiagonal: diagonal of A, superdiagonal all 1.

    Unitriangular inputs (finite or infinite) use the anchored offset-by-offset
    solve; finite inputs with other diagonals use an exact linear solve.
    """
    T = _bidiagonal_target(A)
    if isinstance(A, Mat):
        if A.is_unitriangular():
            return chain_conjugator(A, T)
        if any(x != A.ctx.one for x in A.superdiag()) or not A.is_upper():
            raise PreconditionError("conjugator_to_bidiagonal needs a triangular matrix with unit superdiagonal")
        X = _triangular_intertwiner(A, T)
        if A @ X != X @ T:
            raise VerificationFailure("bidiagonal conjugator failed its check")
        return X
    if not A.diag_seq().is_constant(A.ctx.one):
        raise PreconditionError("infinite inputs must be unitriangular")
    return ChainConjugator(A, T)


# -----------------------------------------------------------------------------
# certificates

BOUNDS = {
    "cor77": lambda k: 2 * k - 3,
    "cor79": lambda k: 2 * k - 3,
    "theorem1": lambda k: 4 * k - 6,
    "theorem2": lambda k: 4 * k - 6,
    "theorem3": lambda k: 4 * k - 6,
}


@dataclass
class Certificate:
    """Generators of order dividing k plus a commutator word whose product
    is the target."""

    ctx: RingCtx
    generators: dict
    word: CommutatorWord
    producer: str
    claimed_length: int
    exceeds_bound: bool = False
    notes: list = field(default_factory=list)
    declared_k: int | None = None

    @property
    def k(self) -> int:
        """The order claimed for the generators (normally the ring's k)."""
        return self.ctx.k if self.declared_k is None else self.declared_k

    @property
    def length(self) -> int:
        return len(self.word)

    def evaluate(self):
        return eval_word(self.word, self.generators)

    def renamed(self, prefix: str) -> "Certificate":
        mapping = {g: prefix + g for g in self.generators}
        return Certificate(self.ctx, {mapping[g]: v for g, v in self.generators.items()},
                           self.word.renamed(mapping), self.producer, self.claimed_length,
                           self.exceeds_bound, list(self.notes))


def concat_certificates(parts, producer: str, claimed_length: int, exceeds_bound=False) -> Certificate:
    """Product of certificates (left to right), generators prefixed by part."""
    gens, word, notes = {}, CommutatorWord(), []
    for idx, cert in enumerate(parts):
        r = cert.renamed(f"{idx + 1}")
        gens.update(r.generators)
        word = word + r.word
        notes += r.notes
    return Certificate(parts[0].ctx, gens, word, producer, claimed_length, exceeds_bound, notes)


def conjugate_certificate(cert: Certificate, H) -> Certificate:
    """Certificate for ``H T H^-1`` from one for ``T`` (conjugate each generator)."""
    if isinstance(H, Mat):
        Hi = H.inverse()
        gens = {g: H @ v @ Hi for g, v in cert.generators.items()}
    else:
        gens = {g: Conjugate(v, H) for g, v in cert.generators.items()}
    return Certificate(cert.ctx, gens, cert.word, cert.producer, cert.claimed_length,
                       cert.exceeds_bound, list(cert.notes))


# -----------------------------------------------------------------------------
# factorization pipelines


def _superdiag_seq(A) -> PeriodicSeq:
    if isinstance(A, Mat):
        return PeriodicSeq(A.superdiag(), [A.ctx.zero])
    return A.superdiag_seq()


def _check_bidiagonal_unit(A, N=None):
    if isinstance(A, Mat):
        W = A
    elif isinstance(A, Banded):
        if set(A.diagonals) - {0, 1} or not A.diag_seq().is_constant(A.ctx.one):
            raise PreconditionError("input must be I + J: unit diagonal, zero beyond the superdiagonal")
        return
    else:
        W = A.window(N or 16)
    one = W.ctx.one
    for i in range(W.n):
        for j in range(W.n):
            want_zero = j < i or j > i + 1
            if (want_zero and W[i, j]) or (i == j and W[i, j] != one):
                raise PreconditionError("input must be I + J: unit diagonal, zero beyond the superdiagonal")


def factor_superdiag(A, ctx: RingCtx | None = None, check_window: int | None = None) -> Certificate:
    """``A = I + J(A)`` as ``2k - 3`` commutators of two order-k matrices."""
    ctx = ctx or A.ctx
    _check_bidiagonal_unit(A, check_window)
    k = ctx.k
    J = _superdiag_seq(A)
    B, C = bc_pair(J, ctx)
    if isinstance(A, Mat):
        n = A.n
        B, C = B.window(n), C.window(n)
        M = (B @ C) ** k
        X = conjugator_coherent(M, A)
        Xi = X.inverse()
        gens = {"B": X @ B @ Xi, "C": X @ C @ Xi}
    else:
        M = Power(Product([B, C]), k)
        X = conjugator_coherent(M, A, check_window)
        gens = {"B": Conjugate(B, X), "C": Conjugate(C, X)}
    return Certificate(ctx, gens, f_word(k), "cor77", 2 * k - 3)


def _unit_superdiag_ok(A, N) -> bool:
    if isinstance(A, Mat):
        return A.is_unitriangular() and all(x == A.ctx.one for x in A.superdiag())
    try:
        return A.superdiag_seq().is_constant(A.ctx.one) and A.diag_seq().is_constant(A.ctx.one)
    except NotImplementedError:
        W = A.window(N or 16)
        return W.is_unitriangular() and all(x == W.ctx.one for x in W.superdiag())


def factor_unit_superdiag(A, ctx: RingCtx | None = None, check_window: int | None = None) -> Certificate:
    """Unitriangular ``A`` with unit superdiagonal as ``2k - 3`` commutators."""
    ctx = ctx or A.ctx
    if not _unit_superdiag_ok(A, check_window):
        raise PreconditionError("input must be unitriangular with superdiagonal all 1")
    X = conjugator_to_bidiagonal(A)
    if isinstance(A, Mat):
        J1 = _bidiagonal_target(A)
    else:
        J1 = Banded(ctx, {0: PeriodicSeq.constant(ctx.one), 1: PeriodicSeq.constant(ctx.one)})
    inner = factor_superdiag(J1, ctx, check_window)
    cert = conjugate_certificate(inner, X)
    cert.producer = "cor79"
    return cert


def split_superdiag(A):
    """``(B, C)`` with ``A = B C``, ``B = I + sum (a_{i,i+1} - 1) E_{i,i+1}``
    and ``C`` having unit superdiagonal."""
    ctx = A.ctx
    if isinstance(A, Mat):
        n = A.n
        z, o = ctx.zero, ctx.one
        B = Mat(ctx, [[o if i == j else (A[i, j] - o if j == i + 1 else z)
                       for j in range(n)] for i in range(n)])
        return B, B.inverse() @ A
    s = A.superdiag_seq().map(lambda x: x - ctx.one)
    B = Banded(ctx, {0: PeriodicSeq.constant(ctx.one), 1: s})
    return B, Product([Inverse(B), A])


def factor_unitriangular(A, ctx: RingCtx | None = None, check_window: int | None = None) -> Certificate:
    """Unitriangular ``A`` as ``4k - 6`` commutators of four order-k matrices."""
    ctx = ctx or A.ctx
    if isinstance(A, Mat):
        if not A.is_unitriangular():
            raise PreconditionError("input must be unitriangular")
    else:
        W = A.window(check_window or 16)
        if not W.is_unitriangular():
            raise PreconditionError("input must be unitriangular")
    B, C = split_superdiag(A)
    if isinstance(C, Mat):
        assert all(x == ctx.one for x in C.superdiag())
    first = factor_superdiag(B, ctx, check_window)
    second = factor_unit_superdiag(C, ctx, check_window)
    k = ctx.k
    return concat_certificates([first, second], "theorem1", 4 * k - 6)


# -----------------------------------------------------------------------------
# verification


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list
    window: int | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "window": self.window,
                "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                           for c in self.checks]}

    def text(self) -> str:
        lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}" + (f": {c.detail}" if c.detail else "")
                 for c in self.checks]
        return "\n".join(lines)


def _as_window(X, N):
    if isinstance(X, Mat):
        return X
    return X.window(N)


def verify_certificate(cert: Certificate, target, N: int | None = None) -> VerificationReport:
    """Replay a certificate exactly: generator orders, the product, and the
    word length against the producer's claim.  Positions in messages are
    1-based."""
    infinite = not isinstance(target, Mat)
    if infinite:
        corners = [target.corner] + [g.corner for g in cert.generators.values()
                                     if isinstance(g, LazyMatrix)]
        N = max(N or 16, *corners)
    checks = []
    k = cert.k
    bad = []
    for name, g in sorted(cert.generators.items()):
        try:
            W = _as_window(g, N)
            if not (W ** k).is_identity():
                bad.append(name)
        except Exception as exc:  # singular or malformed generator
            bad.append(f"{name} ({exc})")
    checks.append(Check("order", not bad,
                        f"order check failed: g^{k} != I for {', '.join(bad)}" if bad
                        else f"all {len(cert.generators)} generators satisfy g^{k} = I"))
    missing = cert.word.generators() - set(cert.generators)
    if missing:
        checks.append(Check("product", False, f"unknown generators {sorted(missing)}"))
    else:
        try:
            if cert.generators and isinstance(next(iter(cert.generators.values())), Mat):
                P = eval_word(cert.word, cert.generators)
            else:
                P = eval_word(cert.word, cert.generators).window(N) if cert.generators else None
            T = _as_window(target, N)
            if P is None or P.n != T.n:
                checks.append(Check("product", False, "size mismatch between product and target"))
            else:
                pos = next(((i, j) for i in range(T.n) for j in range(T.n) if P[i, j] != T[i, j]), None)
                checks.append(Check("product", pos is None,
                                    "product equals target" if pos is None
                                    else f"product mismatch at ({pos[0] + 1},{pos[1] + 1})"))
        except Exception as exc:
            checks.append(Check("product", False, f"evaluation failed: {exc}"))
    bound = BOUNDS.get(cert.producer)
    length_ok = len(cert.word) == cert.claimed_length
    detail = f"word length {len(cert.word)}, claimed {cert.claimed_length}"
    if bound is None:
        length_ok = False
        detail += f"; unknown producer {cert.producer!r}"
    else:
        b = bound(k)
        if cert.producer in ("theorem2", "theorem3"):
            limit = 2 * b if cert.exceeds_bound else b
            length_ok = length_ok and cert.claimed_length <= limit
            detail += f", bound {limit}" + (" (fallback, exceeds 4k-6)" if cert.exceeds_bound else "")
        else:
            length_ok = length_ok and cert.claimed_length == b
            detail += f", producer bound {b}"
    checks.append(Check("length", length_ok, detail))
    return VerificationReport(checks, N if infinite else None)
