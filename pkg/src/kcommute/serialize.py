"""JSON encodings of scalars, matrices, coefficient sequences and
certificates.

Infinite matrices are written as expression trees over a few node kinds
(``tri-oracle``, ``product``, ``inverse``, ``power``, ``conjugate``, ...),
so a certificate replays exactly from its file.  Output of :func:`dumps` is
canonical: parsing and re-serializing gives identical bytes.
"""
from __future__ import annotations

import json

from .coherent import DiagSeq, JPart
from .commfact import Certificate, ChainConjugator, CommutatorWord, Term
from .errors import PreconditionError
from .mat import (Banded, Conjugate, DirectSum, Inverse, Mat, PeriodicSeq, Power, Product)
from .ring import RingCtx, parse_ring
from .vk import PeriodicCoupling, VKConjugator, VKMat, VKTail


class FormatError(ValueError):
    """Malformed JSON artifact."""


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc


def _need(obj, key):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"missing key {key!r}")
    return obj[key]


# -----------------------------------------------------------------------------
# sequences


def seq_to_json(ctx: RingCtx, s: PeriodicSeq) -> dict:
    return {"prefix": [ctx.to_json(x) for x in s.prefix],
            "period": [ctx.to_json(x) for x in s.period]}


def seq_from_json(ctx: RingCtx, obj) -> PeriodicSeq:
    try:
        return PeriodicSeq([ctx.from_json(x) for x in _need(obj, "prefix")],
                           [ctx.from_json(x) for x in _need(obj, "period")])
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad sequence: {exc}") from exc


def diagseq_to_json(P: DiagSeq) -> dict:
    return {"terms": [seq_to_json(P.ctx, t) for t in P.terms]}


def diagseq_from_json(ctx: RingCtx, obj) -> DiagSeq:
    return DiagSeq(ctx, tuple(seq_from_json(ctx, t) for t in _need(obj, "terms")))


# -----------------------------------------------------------------------------
# matrices


def _dense(A: Mat) -> dict:
    return {"kind": "dense", "n": A.n, "rows": [[A.ctx.to_json(x) for x in r] for r in A.rows]}


def _coupling_to_json(ctx, c: PeriodicCoupling) -> dict:
    return {"prefix_cols": [[ctx.to_json(x) for x in col] for col in c.prefix_cols],
            "period_cols": [[ctx.to_json(x) for x in col] for col in c.period_cols]}


def vk_to_json(M: VKMat) -> dict:
    if not isinstance(M.m2, PeriodicCoupling):
        raise TypeError("only prefix+periodic couplings are serializable")
    return {"kind": "vk", "n": M.n, "m1": _dense(M.m1),
            "m2": _coupling_to_json(M.ctx, M.m2), "m3": matrix_to_json(M.m3)}


def matrix_to_json(A) -> dict:
    """Expression-tree encoding of a finite or lazy matrix."""
    if isinstance(A, Mat):
        return _dense(A)
    ctx = A.ctx
    if isinstance(A, Banded):
        zero = ctx.zero
        out = {"kind": "tri-oracle",
               "diag": seq_to_json(ctx, A.diagonals.get(0, PeriodicSeq.constant(zero))),
               "superdiag": seq_to_json(ctx, A.diagonals.get(1, PeriodicSeq.constant(zero)))}
        bands = {str(d): seq_to_json(ctx, s) for d, s in A.diagonals.items() if d >= 2}
        if bands:
            out["bands"] = bands
        return out
    if isinstance(A, Product):
        return {"kind": "product", "of": [matrix_to_json(f) for f in A.factors]}
    if isinstance(A, Inverse):
        return {"kind": "inverse", "of": matrix_to_json(A.of)}
    if isinstance(A, Power):
        return {"kind": "power", "of": matrix_to_json(A.of), "exp": A.e}
    if isinstance(A, Conjugate):
        return {"kind": "conjugate", "of": matrix_to_json(A.of), "by": matrix_to_json(A.by)}
    if isinstance(A, ChainConjugator):
        return {"kind": "chain-conjugator", "p": matrix_to_json(A.P), "q": matrix_to_json(A.Q)}
    if isinstance(A, DirectSum):
        return {"kind": "directsum", "head": _dense(A.head), "tail": matrix_to_json(A.tail)}
    if isinstance(A, JPart):
        return {"kind": "jpart", "of": matrix_to_json(A.of)}
    if isinstance(A, VKMat):
        return vk_to_json(A)
    if isinstance(A, VKConjugator):
        return {"kind": "vk-conjugator", "of": vk_to_json(A.M)}
    if isinstance(A, VKTail):
        return {"kind": "vk-tail", "of": vk_to_json(A.M)}
    raise TypeError(f"cannot serialize {type(A).__name__}")


class _Parser:
    """Decodes matrix trees; identical subtrees become one shared object so
    lazy caches are reused."""

    def __init__(self, ctx: RingCtx):
        self.ctx = ctx
        self.seen = {}

    def scalar_rows(self, rows, n):
        if not isinstance(rows, list) or len(rows) != n or any(
                not isinstance(r, list) or len(r) != n for r in rows):
            raise FormatError(f"dense matrix needs {n} rows of length {n}")
        try:
            return Mat(self.ctx, [[self.ctx.from_json(x) for x in r] for r in rows])
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad scalar: {exc}") from exc

    def columns(self, cols, rows):
        if not isinstance(cols, list):
            raise FormatError("coupling columns must be a list")
        out = []
        for c in cols:
            if not isinstance(c, list) or len(c) != rows:
                raise FormatError(f"coupling column must have {rows} entries")
            try:
                out.append([self.ctx.from_json(x) for x in c])
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                raise FormatError(f"bad scalar: {exc}") from exc
        return out

    def vk(self, obj) -> VKMat:
        n = _need(obj, "n")
        if not isinstance(n, int) or n < 0:
            raise FormatError("vk corner size must be a nonnegative integer")
        m1 = self.matrix(_need(obj, "m1"))
        if not isinstance(m1, Mat) or m1.n != n:
            raise FormatError("m1 must be a dense n x n matrix")
        m2 = _need(obj, "m2")
        coup = PeriodicCoupling(self.ctx, n, self.columns(_need(m2, "prefix_cols"), n),
                                self.columns(_need(m2, "period_cols"), n))
        m3 = self.matrix(_need(obj, "m3"))
        if isinstance(m3, Mat):
            raise FormatError("m3 must be an infinite matrix")
        return VKMat(m1, coup, m3)

    def matrix(self, obj):
        key = dumps(obj)
        hit = self.seen.get(key)
        if hit is None:
            hit = self._matrix(obj)
            self.seen[key] = hit
        return hit

    def _lazy(self, obj, key):
        A = self.matrix(_need(obj, key))
        if isinstance(A, Mat):
            raise FormatError(f"{key!r} of a composition node must be infinite")
        return A

    def _matrix(self, obj):
        if not isinstance(obj, dict):
            raise FormatError("matrix must be a JSON object")
        kind = obj.get("kind", "vk" if "m1" in obj else None)
        ctx = self.ctx
        if kind == "dense":
            n = _need(obj, "n")
            if not isinstance(n, int) or n < 0:
                raise FormatError("dense size must be a nonnegative integer")
            return self.scalar_rows(_need(obj, "rows"), n)
        if kind == "tri-oracle":
            diags = {0: seq_from_json(ctx, obj["diag"]) if "diag" in obj
                     else PeriodicSeq.constant(ctx.one)}
            if "superdiag" in obj:
                diags[1] = seq_from_json(ctx, obj["superdiag"])
            for d, s in obj.get("bands", {}).items():
                if not str(d).isdigit() or int(d) < 2:
                    raise FormatError(f"band offset must be an integer >= 2, got {d!r}")
                diags[int(d)] = seq_from_json(ctx, s)
            return Banded(ctx, diags)
        if kind == "product":
            of = _need(obj, "of")
            if not isinstance(of, list) or len(of) < 2:
                raise FormatError("product needs at least two factors")
            factors = [self.matrix(f) for f in of]
            if all(isinstance(f, Mat) for f in factors):
                out = factors[0]
                for f in factors[1:]:
                    out = out @ f
                return out
            if any(isinstance(f, Mat) for f in factors):
                raise FormatError("cannot mix dense and infinite factors")
            return Product(factors)
        if kind == "inverse":
            A = self.matrix(_need(obj, "of"))
            return A.inverse() if isinstance(A, Mat) else Inverse(A)
        if kind == "power":
            e = _need(obj, "exp")
            if not isinstance(e, int) or isinstance(e, bool):
                raise FormatError("power exponent must be an integer")
            A = self.matrix(_need(obj, "of"))
            return A ** e if isinstance(A, Mat) else Power(A, e)
        if kind == "conjugate":
            return Conjugate(self._lazy(obj, "of"), self._lazy(obj, "by"))
        if kind == "chain-conjugator":
            return ChainConjugator(self._lazy(obj, "p"), self._lazy(obj, "q"))
        if kind == "directsum":
            head = self.matrix(_need(obj, "head"))
            if not isinstance(head, Mat):
                raise FormatError("directsum head must be dense")
            return DirectSum(head, self._lazy(obj, "tail"))
        if kind == "jpart":
            return JPart(self._lazy(obj, "of"))
        if kind == "vk":
            return self.vk(obj)
        if kind in ("vk-conjugator", "vk-tail"):
            M = self.matrix(_need(obj, "of"))
            if not isinstance(M, VKMat):
                raise FormatError(f"{kind} needs a vk matrix")
            return VKConjugator(M) if kind == "vk-conjugator" else VKTail(M)
        raise FormatError(f"unknown matrix kind {kind!r}")


def matrix_from_json(ctx: RingCtx, obj):
    return _Parser(ctx).matrix(obj)


# -----------------------------------------------------------------------------
# certificates


def certificate_to_json(cert: Certificate) -> dict:
    return {
        "k": cert.k,
        "ring": cert.ctx.descriptor,
        "generators": {g: matrix_to_json(v) for g, v in cert.generators.items()},
        "word": [{"x": {"gen": t.x, "exp": t.x_exp}, "y": {"gen": t.y, "exp": t.y_exp}}
                 for t in cert.word],
        "producer": cert.producer,
        "claimed_length": cert.claimed_length,
        "exceeds_bound": cert.exceeds_bound,
    }


def certificate_from_json(obj) -> Certificate:
    k = _need(obj, "k")
    if not isinstance(k, int) or isinstance(k, bool):
        raise FormatError("k must be an integer")
    ring = _need(obj, "ring")
    if not isinstance(ring, str):
        raise FormatError("ring must be a descriptor string")
    declared = None
    try:
        ctx = parse_ring(ring, k)
    except PreconditionError:
        # the header k does not fit the ring; keep the arithmetic and let the
        # order check reject the claim
        ctx, declared = _arithmetic_ring(ring), k
    except (ValueError, ArithmeticError) as exc:
        raise FormatError(f"bad ring: {exc}") from exc
    parser = _Parser(ctx)
    gens_obj = _need(obj, "generators")
    if not isinstance(gens_obj, dict):
        raise FormatError("generators must be an object")
    gens = {g: parser.matrix(v) for g, v in gens_obj.items()}
    terms = []
    for t in _need(obj, "word"):
        x, y = _need(t, "x"), _need(t, "y")
        xg, yg = _need(x, "gen"), _need(y, "gen")
        xe, ye = _need(x, "exp"), _need(y, "exp")
        if xg not in gens or yg not in gens:
            raise FormatError(f"word references unknown generator {xg if xg not in gens else yg!r}")
        if not all(isinstance(e, int) and not isinstance(e, bool) for e in (xe, ye)):
            raise FormatError("exponents must be integers")
        terms.append(Term(xg, xe, yg, ye))
    cl = _need(obj, "claimed_length")
    if not isinstance(cl, int):
        raise FormatError("claimed_length must be an integer")
    return Certificate(ctx, gens, CommutatorWord(tuple(terms)), str(_need(obj, "producer")),
                       cl, bool(obj.get("exceeds_bound", False)), declared_k=declared)


def _arithmetic_ring(ring: str) -> RingCtx:
    """Some valid context for the descriptor, used only for arithmetic."""
    head, _, tail = ring.partition(":")
    try:
        if head == "Fp":
            p = int(tail)
            k = next(d for d in range(2, p) if (p - 1) % d == 0) if p > 2 else None
            if k is None:
                raise FormatError("F_2 has no usable root of unity")
            return parse_ring(ring, k)
        return parse_ring(ring, 2)
    except (ValueError, PreconditionError) as exc:
        raise FormatError(f"bad ring: {exc}") from exc


def canonicalize(text: str) -> str:
    """Re-encode a JSON document with sorted keys and no whitespace."""
    return dumps(loads(text))
