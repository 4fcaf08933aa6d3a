import random

import pytest
from hypothesis import given, settings, strategies as st

from kcommute.coherent import (DiagSeq, coherent_solve, identity_seq, jpart, power_seq,
                               realize, reconstruct, rescale, seq_product, shiftS)
from kcommute.commfact import bc_pair
from kcommute.errors import NotCoherent
from kcommute.mat import Mat, PeriodicSeq, Power, Product

from .helpers import cyclo_k, rand_seq, rand_unitriangular, ring

Q = ring("Q", 2)
ONE = PeriodicSeq.constant(Q.one)
ZERO = PeriodicSeq.constant(Q.zero)


def const(c, ctx=Q):
    return PeriodicSeq.constant(ctx(c))


def seq(*cs, ctx=Q):
    return DiagSeq(ctx, tuple(const(c, ctx) for c in cs))


def test_jpart_examples():
    I = Mat.identity(Q, 4)
    assert jpart(I) == Mat.zeros(Q, 4)
    IJ = Mat.build(Q, [[1 if j in (i, i + 1) else 0 for j in range(4)] for i in range(4)])
    assert jpart(IJ) == IJ - I


def test_jpart_of_bc_power_is_k_times_jpart_bc():
    for k in (2, 3, 4):
        ctx = cyclo_k(k)
        B, C = bc_pair(PeriodicSeq.constant(ctx.one), ctx)
        BC = Product([B, C])
        N = 9
        lhs = jpart(Power(BC, k).window(N))
        assert lhs == jpart(BC.window(N)).scale(ctx(k))
        assert jpart(Power(BC, k)).window(N) == lhs


def test_shift_examples():
    assert shiftS(ONE) == ONE
    alt = PeriodicSeq([], [Q.one, Q.zero])
    assert shiftS(alt) == PeriodicSeq([], [Q.zero, Q.one])
    s = PeriodicSeq([Q(5), Q(7)], [Q.one])
    assert shiftS(s, 2) == ONE
    D = Mat.diagonal(Q, [Q(1), Q(2), Q(3)])
    assert shiftS(D) == Mat.diagonal(Q, [Q(2), Q(3), Q(0)])


def test_seq_product_examples():
    x = seq(1, 1)
    assert seq_product(x, x) == seq(1, 2, 1)
    assert seq_product(x, identity_seq(Q)).terms[:2] == x.terms
    assert power_seq(x, 3) == seq(1, 3, 3, 1)
    assert power_seq(x, 1) == x
    assert power_seq(x, 2) == seq(1, 2, 1)


def _expand_direct(P, J, l, N):
    """Matrix power of the realized expansion, read back along J."""
    A = realize(P, J).window(N)
    return A ** l


def test_power_seq_matches_direct_power():
    rng = random.Random(1)
    for _ in range(20):
        terms = (ONE, ONE) + tuple(rand_seq(Q, rng) for _ in range(rng.randint(0, 2)))
        P = DiagSeq(Q, terms)
        J = rand_seq(Q, rng, nonzero=True)
        l = rng.randint(2, 4)
        N = 10
        assert reconstruct(power_seq(P, l), J, N) == _expand_direct(P, J, l, N)


def test_coherent_solve_examples():
    N = 6
    IJ = Mat.build(Q, [[1 if j in (i, i + 1) else 0 for j in range(N)] for i in range(N)])
    P = coherent_solve(IJ)
    assert P.agrees_with(seq(1, 1), N)
    E13 = Mat.build(Q, [[1, 0, 1], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(NotCoherent):
        coherent_solve(E13)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_bc_is_coherent_with_even_d2(k):
    ctx = cyclo_k(k)
    rng = random.Random(k)
    J = rand_seq(ctx, rng, nonzero=True)
    B, C = bc_pair(J, ctx)
    N = 12
    W = Product([B, C]).window(N)
    P = coherent_solve(W)
    # D_2 has ones at 1-based even positions, i.e. 0-based odd ones
    d2 = [ctx.one if p % 2 else ctx.zero for p in range(N - 2)]
    assert P[2].take(N - 2) == d2
    assert all(not any(P[i].take(N - i)) for i in range(3, N))
    assert P.is_normalized()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 24))
def test_round_trip(seed, N):
    rng = random.Random(seed)
    A = rand_unitriangular(Q, N, rng, bound=5)
    # a nonvanishing superdiagonal makes every unitriangular matrix coherent
    rows = [list(r) for r in A.rows]
    for i in range(N - 1):
        rows[i][i + 1] = rows[i][i + 1] or Q.one
    A = Mat(Q, rows)
    P = coherent_solve(A)
    assert reconstruct(P, A.superdiag(), N) == A


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_seq_product_associative(seed):
    rng = random.Random(seed)

    def rand_diagseq():
        return DiagSeq(Q, (ONE, ONE) + tuple(rand_seq(Q, rng) for _ in range(rng.randint(0, 2))))

    a, b, c = rand_diagseq(), rand_diagseq(), rand_diagseq()
    assert seq_product(seq_product(a, b), c) == seq_product(a, seq_product(b, c))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 4, 6]))
def test_lemma4_equivalence(seed, k):
    ctx = cyclo_k(k)
    rng = random.Random(seed)
    one = PeriodicSeq.constant(ctx.one)
    support = rng.randint(2, 4)
    P = DiagSeq(ctx, (one, one) + tuple(rand_seq(ctx, rng) for _ in range(support - 2)))
    J = rand_seq(ctx, rng, nonzero=True)
    N = 12
    Ak = realize(P, J).window(N) ** k
    S = coherent_solve(Ak)
    raw = power_seq(P, k)
    assert raw[1] == PeriodicSeq.constant(ctx(k))
    assert S.agrees_with(rescale(raw, ctx(k)), N)
