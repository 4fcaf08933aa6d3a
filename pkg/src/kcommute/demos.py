"""Worked constructions printed step by step, each ending in an exact check."""
from __future__ import annotations

from fractions import Fraction

from .coherent import coherent_solve
from .commfact import bc_pair, eval_word, f_word, telescope_tail
from .mat import Mat, PeriodicSeq, Power, Product
from .ring import RingCtx, make_ring
from .slfact import j_block, JBlockParams, scalar_diagonals, scalar_factor


def fmt_scalar(ctx: RingCtx, x) -> str:
    if ctx.kind == "prime":
        return str(x.v)
    if ctx.kind == "rationals":
        return str(Fraction(x))
    parts = []
    for e, c in enumerate(x.coefficients()):
        if not c:
            continue
        mono = "" if e == 0 else ("z" if e == 1 else f"z^{e}")
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{c}*{mono}")
    return "+".join(parts).replace("+-", "-") or "0"


def fmt_mat(A: Mat, indent: str = "  ") -> str:
    cells = [[fmt_scalar(A.ctx, x) for x in r] for r in A.rows]
    w = max((len(c) for r in cells for c in r), default=1)
    return "\n".join(indent + " ".join(c.rjust(w) for c in r) for r in cells)


def _check(out, label, ok):
    out.append(f"{'ok  ' if ok else 'FAIL'} {label}")
    return ok


def lemma6_k4(N: int = 8) -> tuple[list, bool]:
    """Telescoping of ``(BC)^i`` through the words ``F_i`` for k = 4."""
    ctx = make_ring("cyclotomic", 4, 4)
    out = [f"ring Q(z), z a primitive 4th root of unity; k = 4; window N = {N}"]
    J = PeriodicSeq([], [ctx(1), ctx(2)])
    B, C = bc_pair(J, ctx)
    out += ["B (top-left 6x6) =", fmt_mat(B.window(6)), "C (top-left 6x6) =", fmt_mat(C.window(6))]
    ok = True
    for i in range(2, 5):
        w = f_word(i)
        out.append(f"F_{i}(B,C) = {w}  ({len(w)} terms)")
        lhs = Power(Product([B, C]), i).window(N)
        rhs = eval_word(w, {"B": B, "C": C}).window(N) @ telescope_tail(B, C, i).window(N)
        ok &= _check(out, f"(BC)^{i} = F_{i}(B,C) C^{i - 1} B^{i} C", lhs == rhs)
    BC4 = Power(Product([B, C]), 4).window(N)
    ok &= _check(out, "(BC)^4 = F_4(B,C)", eval_word(f_word(4), {"B": B, "C": C}).window(N) == BC4)
    ok &= _check(out, "superdiagonal of (BC)^4 is J", BC4.superdiag() == J.take(N - 1))
    return out, ok


def lemma5_k2(N: int = 8) -> tuple[list, bool]:
    """Two involutions whose product is coherent with ``D_2`` on odd rows."""
    ctx = make_ring("rationals", 2)
    out = [f"ring Q; k = 2; omega = -1; J = all ones; window N = {N}"]
    J = PeriodicSeq.constant(ctx.one)
    B, C = bc_pair(J, ctx)
    Bw, Cw = B.window(N), C.window(N)
    out += ["B =", fmt_mat(Bw), "C =", fmt_mat(Cw)]
    ok = _check(out, "B^2 = I and C^2 = I", (Bw ** 2).is_identity() and (Cw ** 2).is_identity())
    BC = Bw @ Cw
    out += ["BC =", fmt_mat(BC)]
    D = coherent_solve(BC)
    for i, t in enumerate(D.terms):
        out.append(f"D_{i} diagonal: " + " ".join(fmt_scalar(ctx, x) for x in t.take(N - i)))
    want = [ctx.one if p % 2 else ctx.zero for p in range(N - 2)]
    ok &= _check(out, "D_0 = D_1 = I and D_2 = sum of E_(2i,2i)",
                 D.is_normalized() and len(D) == 3 and D[2].take(N - 2) == want)
    BCk = BC ** 2
    ok &= _check(out, "superdiagonal of (BC)^2 is J", BCk.superdiag() == J.take(N - 1))
    return out, ok


def scalar_even_n2() -> tuple[list, bool]:
    """``-I_2`` as F G and then as 4k - 6 commutators for k = 4."""
    ctx = make_ring("cyclotomic", 4, 8)
    alpha = -ctx.one
    out = ["ring Q(z), z a primitive 8th root of unity; k = 4; alpha = -1, n = 2"]
    Fd, Gd = scalar_diagonals(alpha, 2, ctx)
    F, G = Mat.diagonal(ctx, Fd), Mat.diagonal(ctx, Gd)
    out += ["F =", fmt_mat(F), "G =", fmt_mat(G)]
    ok = _check(out, "F G = -I", F @ G == Mat.identity(ctx, 2).scale(alpha))
    cert = scalar_factor(alpha, 2, ctx)
    for name, g in sorted(cert.generators.items()):
        out += [f"{name} =", fmt_mat(g)]
    out.append(f"word: {cert.word}  ({len(cert.word)} terms)")
    ok &= _check(out, "every generator has order dividing 4",
                 all((g ** 4).is_identity() for g in cert.generators.values()))
    ok &= _check(out, "word evaluates to -I", cert.evaluate() == Mat.identity(ctx, 2).scale(alpha))
    return out, ok


def jblock_k3() -> tuple[list, bool]:
    """The 2x2 order-3 pair with product diag(a, 1/a), a = 2."""
    ctx = make_ring("cyclotomic", 3, 3)
    p = JBlockParams(ctx(2), ctx.omega)
    J1, J2 = j_block(p, ctx)
    out = ["ring Q(z), z a primitive cube root of unity; a = 2, theta = z",
           "J1 =", fmt_mat(J1), "J2 =", fmt_mat(J2)]
    I = Mat.identity(ctx, 2)
    ok = _check(out, "J1^3 = J2^3 = I", J1 ** 3 == I and J2 ** 3 == I)
    ok &= _check(out, "J1 J2 = diag(2, 1/2)", J1 @ J2 == Mat.diagonal(ctx, [ctx(2), ctx("1/2")]))
    ok &= _check(out, "det J1 = det J2 = 1", J1.det() == ctx.one and J2.det() == ctx.one)
    return out, ok


DEMOS = {
    "lemma6-k4": lemma6_k4,
    "lemma5-k2": lemma5_k2,
    "scalar-even-n2": scalar_even_n2,
    "jblock-k3": jblock_k3,
}
