import random

import pytest
from hypothesis import given, settings, strategies as st

from kcommute.commfact import verify_certificate
from kcommute.errors import DegenerateBlock, KTooSmall, ScalarInput
from kcommute.mat import Mat, order_divides
from kcommute.slfact import (JBlockParams, factor_sl, j_block, j_block_from_trace,
                             scalar_diagonals, scalar_factor, sourour_lu_similarity)

from .helpers import cyclo_k, rand_sl, ring


def test_j_block_k4_a2():
    ctx = ring("cyclo:4", 4)
    i = ctx.omega
    J1, J2 = j_block(JBlockParams(2, i), ctx)
    assert J1 == Mat.build(ctx, [[0, 2], ["-1/2", 0]])
    assert J2 == Mat.build(ctx, [[0, -1], [1, 0]])
    assert J1 @ J2 == Mat.diagonal(ctx, [ctx(2), ctx("1/2")])
    assert J1 @ J1 == Mat.identity(ctx, 2).scale(-ctx.one)
    assert order_divides(J1, 4)


def test_trace_for_k3_is_minus_one():
    ctx = ring("cyclo:3", 3)
    assert JBlockParams(5, ctx.omega).t == -ctx.one


def test_j_block_degenerate():
    ctx = ring("cyclo:4", 4)
    for a in (-1, 0, 1):
        with pytest.raises(DegenerateBlock):
            j_block(JBlockParams(a, ctx.omega), ctx)
    with pytest.raises(DegenerateBlock):
        j_block(JBlockParams(3, ctx.one), ctx)


def test_printed_j2_entry_breaks_determinant():
    ctx = ring("cyclo:3", 3)
    p = JBlockParams(2, ctx.omega)
    J1, J2 = j_block(p, ctx, printed=True)
    assert J2.det() != ctx.one
    assert J1 @ J2 != Mat.diagonal(ctx, [ctx(2), ctx("1/2")])


@pytest.mark.parametrize("k,t", [(3, -1), (4, 0), (6, 1)])
def test_j_block_over_rationals(k, t):
    Q = ring("Q", 2)
    J1, J2 = j_block_from_trace(3, t, Q)
    for J in (J1, J2):
        assert J.trace() == t and J.det() == 1
        assert order_divides(J, k)
    assert J1 @ J2 == Mat.diagonal(Q, [Q(3), Q("1/3")])


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_j_block_identities(k):
    ctx = cyclo_k(k)
    rng = random.Random(k)
    thetas = [ctx.omega ** e for e in range(1, k) if ctx.omega ** e not in (ctx.one, -ctx.one)]
    for _ in range(200):
        theta = rng.choice(thetas)
        a = ctx.random(rng, 6, nonzero=True)
        if a in (ctx.one, -ctx.one):
            continue
        t = theta + ctx.one / theta
        J1, J2 = j_block(JBlockParams(a, theta), ctx)
        assert J1.trace() == t == J2.trace()
        assert J1.det() == ctx.one == J2.det()
        assert J1 @ J2 == Mat.diagonal(ctx, [a, ctx.one / a])
        assert order_divides(J1, k) and order_divides(J2, k)


@pytest.mark.parametrize("k,m", [(3, 9), (4, 8), (6, 36)])
def test_scalar_diagonals_product(k, m):
    ctx = ring(f"cyclo:{m}", k)
    z = ctx.cyclotomic.zeta_power(1)
    for n in range(1, 9):
        for alpha in {ctx.one, -ctx.one if n % 2 == 0 else ctx.one,
                      z ** (m // n) if m % n == 0 else ctx.one}:
            F, G = scalar_diagonals(alpha, n, ctx)
            assert [f * g for f, g in zip(F, G)] == [alpha] * n


def test_scalar_factor_examples():
    ctx = ring("cyclo:8", 4)
    cert = scalar_factor(1, 3, ctx)
    assert cert.length == 10 and cert.evaluate() == Mat.identity(ctx, 3)
    assert scalar_diagonals(-ctx.one, 2, ctx) == ([-ctx.one, -ctx.one], [ctx.one, ctx.one])
    minus = Mat.identity(ctx, 2).scale(-ctx.one)
    cert = scalar_factor(-1, 2, ctx)
    assert verify_certificate(cert, minus).passed
    c9 = ring("cyclo:9", 3)
    z3 = c9.cyclotomic.zeta_power(3)
    cert = scalar_factor(z3, 3, c9)
    assert cert.length == 6
    assert verify_certificate(cert, Mat.identity(c9, 3).scale(z3)).passed


def test_scalar_factor_k2_out_of_scope():
    with pytest.raises(KTooSmall):
        scalar_factor(-1, 2, ring("Q", 2))


def test_sourour_examples():
    ctx = ring("cyclo:3", 3)
    P, L, U = sourour_lu_similarity(Mat.build(ctx, [[1, 2], [3, 7]]))
    assert P == Mat.identity(ctx, 2)
    assert L == Mat.build(ctx, [[1, 0], [3, 1]]) and U == Mat.build(ctx, [[1, 2], [0, 1]])
    A = Mat.build(ctx, [[0, 1], [-1, 0]])
    P, L, U = sourour_lu_similarity(A)
    assert P @ A @ P.inverse() == L @ U == Mat.build(ctx, [[1, -2], [1, -1]])
    with pytest.raises(ScalarInput):
        sourour_lu_similarity(Mat.identity(ctx, 2).scale(-ctx.one))


def test_factor_sl_examples():
    ctx = ring("cyclo:3", 3)
    I = Mat.identity(ctx, 3)
    assert verify_certificate(factor_sl(I, ctx), I).passed
    A = Mat.build(ctx, [[1, 2], [3, 7]])
    cert = factor_sl(A, ctx)
    assert cert.length <= 6 and verify_certificate(cert, A).passed
    c8 = ring("cyclo:8", 4)
    minus = Mat.identity(c8, 2).scale(-c8.one)
    cert = factor_sl(minus, c8)
    assert cert.length == 10 and verify_certificate(cert, minus).passed


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([3, 4]), st.integers(2, 4))
def test_factor_sl_end_to_end(seed, k, n):
    ctx = cyclo_k(k)
    A = rand_sl(ctx, n, random.Random(seed))
    P, L, U = sourour_lu_similarity(A)
    assert P @ A @ P.inverse() == L @ U
    cert = factor_sl(A, ctx)
    rep = verify_certificate(cert, A)
    assert rep.passed, rep.text()
    assert cert.length <= (8 * k - 12 if cert.exceeds_bound else 4 * k - 6)
