"""Random inputs and independent reference computations for the tests."""
from __future__ import annotations

import random
from fractions import Fraction

import sympy

from kcommute.mat import Banded, Mat, PeriodicSeq
from kcommute.ring import make_ring, parse_ring


def ring(desc: str, k: int):
    return parse_ring(desc, k)


def cyclo_k(k: int):
    """Q(zeta_k), with plain Q standing in for k = 2."""
    return make_ring("rationals", 2) if k == 2 else make_ring("cyclotomic", k, k)


def rand_unitriangular(ctx, n: int, rng: random.Random, bound: int = 9) -> Mat:
    z, o = ctx.zero, ctx.one
    return Mat(ctx, [[o if i == j else (ctx.random(rng, bound) if j > i else z) for j in range(n)]
                     for i in range(n)])


def rand_seq(ctx, rng, max_prefix=3, max_period=3, bound=5, nonzero=False) -> PeriodicSeq:
    return PeriodicSeq([ctx.random(rng, bound, nonzero) for _ in range(rng.randint(0, max_prefix))],
                       [ctx.random(rng, bound, nonzero) for _ in range(rng.randint(1, max_period))])


def rand_banded_unitriangular(ctx, rng, bands=3, bound=5) -> Banded:
    diags = {0: PeriodicSeq.constant(ctx.one)}
    for d in range(1, bands + 1):
        diags[d] = rand_seq(ctx, rng, bound=bound)
    return Banded(ctx, diags)


def rand_sl(ctx, n: int, rng: random.Random, bound: int = 4) -> Mat:
    """Random nonscalar determinant-1 matrix: ``L D U`` with det D = 1,
    conjugated by a random permutation."""
    while True:
        L = rand_unitriangular(ctx, n, rng, bound).transpose()
        U = rand_unitriangular(ctx, n, rng, bound)
        d = [ctx.random(rng, bound, nonzero=True) for _ in range(n - 1)]
        prod = ctx.one
        for x in d:
            prod = prod * x
        D = Mat.diagonal(ctx, d + [ctx.one / prod])
        A = L @ D @ U
        perm = list(range(n))
        rng.shuffle(perm)
        P = Mat(ctx, [[ctx.one if perm[i] == j else ctx.zero for j in range(n)] for i in range(n)])
        A = P @ A @ P.inverse()
        if not A.is_scalar():
            return A


# -----------------------------------------------------------------------------
# oracles built on sympy, independent of the package arithmetic

z = sympy.Symbol("z")


def to_poly(x, m: int) -> sympy.Poly:
    """Cyclotomic element as a rational polynomial in z (reduced mod Phi_m)."""
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator)
                       for c in reversed(x.coefficients())], z, domain="QQ")


def sympy_cyclo_mul(x, y, m: int) -> list:
    phi = sympy.Poly(sympy.cyclotomic_poly(m, z), z, domain="QQ")
    r = (to_poly(x, m) * to_poly(y, m)).rem(phi)
    coeffs = list(reversed(r.all_coeffs()))
    coeffs += [0] * (int(sympy.totient(m)) - len(coeffs))
    return [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in coeffs]


def to_sympy(A: Mat) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in A.rows])


def from_sympy(ctx, M: sympy.Matrix) -> Mat:
    return Mat(ctx, [[Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1]))
                      for x in M.row(i)] for i in range(M.rows)])


def naive_window_product(A, B, N):
    """Entry-by-entry triangular product from oracle entries."""
    ctx = A.ctx
    rows = []
    for i in range(N):
        row = []
        for j in range(N):
            s = ctx.zero
            for p in range(i, j + 1):
                s = s + A.entry(i, p) * B.entry(p, j)
            row.append(s)
        rows.append(row)
    return Mat(ctx, rows)


def rand_vk(ctx, n: int, rng: random.Random, eigen_one: bool | None = None):
    """Random VKMat with det M1 = 1, prefix+periodic coupling and banded
    unitriangular M3.  ``eigen_one`` forces (or forbids) eigenvalue 1 in M1."""
    from kcommute.vk import PeriodicCoupling, VKMat
    if eigen_one is None:
        eigen_one = rng.random() < 0.4
    while True:
        M1 = rand_sl(ctx, n, rng) if n > 1 else Mat.identity(ctx, 1)
        if eigen_one and n > 1:
            # put a 1 on the diagonal of an SL triangular core, then conjugate
            U = rand_unitriangular(ctx, n, rng, 3)
            d = [ctx.random(rng, 4, nonzero=True) for _ in range(n - 2)]
            prod = ctx.one
            for x in d:
                prod = prod * x
            core = U @ Mat.diagonal(ctx, [ctx.one] + d + [ctx.one / prod])
            H = rand_unitriangular(ctx, n, rng, 3).transpose() @ rand_unitriangular(ctx, n, rng, 3)
            M1 = H @ core @ H.inverse()
        has_one = n == 1 or not (M1 - Mat.identity(ctx, n)).det()
        if has_one == eigen_one or n == 1:
            break
    pre = [[ctx.random(rng, 4) for _ in range(n)] for _ in range(rng.randint(0, 2))]
    per = [[ctx.random(rng, 4) for _ in range(n)] for _ in range(rng.randint(1, 2))]
    M2 = PeriodicCoupling(ctx, n, pre, per)
    return VKMat(M1, M2, rand_banded_unitriangular(ctx, rng, bands=2, bound=4))


def rational_part(A: Mat) -> sympy.Matrix:
    """sympy matrix of a matrix whose cyclotomic entries are all rational."""
    def conv(x):
        c = x.coefficients() if hasattr(x, "coefficients") else [Fraction(x)]
        assert not any(c[1:]), "entry is not rational"
        return sympy.Rational(c[0].numerator, c[0].denominator)
    return sympy.Matrix([[conv(x) for x in r] for r in A.rows])
