import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kcommute.errors import Singular
from kcommute.mat import (Banded, Conjugate, Inverse, Mat, PeriodicSeq, Power, Product,
                          commutator, conjugate, identity_oracle, inverse, order_divides,
                          superdiag_oracle, window)
from kcommute.ring import make_ring

from .helpers import (from_sympy, naive_window_product, rand_banded_unitriangular,
                      rand_unitriangular, to_sympy)

Q = make_ring("rationals", 2)
F7 = make_ring("prime", 3, 7)


def M(rows, ctx=Q):
    return Mat.build(ctx, rows)


def test_inverse_identity():
    assert inverse(Mat.identity(Q, 3)) == Mat.identity(Q, 3)


def test_shear_power():
    assert M([[1, 1], [0, 1]]) ** 5 == M([[1, 5], [0, 1]])


def test_rotation_inverse():
    assert M([[0, 1], [-1, 0]]).inverse() == M([[0, -1], [1, 0]])


def test_singular_inverse():
    with pytest.raises(Singular):
        M([[1, 2], [2, 4]]).inverse()


def test_inverse_matches_sympy():
    rng = random.Random(3)
    for n in range(1, 6):
        for _ in range(5):
            A = Mat(Q, [[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)]
                        for _ in range(n)])
            S = to_sympy(A)
            assert A.det() == Fraction(str(S.det()))
            if S.det() != 0:
                assert A.inverse() == from_sympy(Q, S.inv())


def test_commutator_examples():
    X = M([[1, 1], [0, 1]])
    Y = M([[1, 0], [0, -1]])
    I = Mat.identity(Q, 2)
    assert commutator(I, Y) == I
    assert commutator(X, X) == I
    assert commutator(X, Y) == M([[1, 2], [0, 1]])


def test_order_divides():
    assert order_divides(Mat.identity(Q, 3), 5)
    assert order_divides(Mat.diagonal(F7, [F7.omega, F7.one]), 3)
    assert F7.omega == F7(2)
    assert not order_divides(M([[1, 1], [0, 1]]), 2)


def test_conjugate_examples():
    X = M([[1, 2], [3, 4]])
    assert conjugate(X, Mat.identity(Q, 2)) == X
    D, H = M([[1, 0], [0, 2]]), M([[1, 1], [0, 1]])
    # H D H^-1 by hand: [[1, 2], [0, 2]] [[1, -1], [0, 1]]
    assert conjugate(D, H) == M([[1, 1], [0, 2]])
    # the opposite convention H^-1 D H gives the other sign
    assert conjugate(D, H.inverse()) == M([[1, -1], [0, 2]])


def test_conjugation_preserves_order():
    rng = random.Random(5)
    X = Mat.diagonal(F7, [F7.omega, F7.one, F7.omega ** 2])
    for _ in range(10):
        H = rand_unitriangular(F7, 3, rng) @ rand_unitriangular(F7, 3, rng).transpose()
        assert order_divides(conjugate(X, H), 3) == order_divides(X, 3)
        assert order_divides(conjugate(X, H), 2) == order_divides(X, 2)


def test_window_examples():
    assert window(identity_oracle(Q), 3) == Mat.identity(Q, 3)
    J = superdiag_oracle(Q, PeriodicSeq([], [Q.one]))
    assert window(J, 3) == M([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    IJ = Banded(Q, {0: PeriodicSeq.constant(Q.one), 1: PeriodicSeq.constant(Q.one)})
    assert window(Power(IJ, 2), 3) == M([[1, 2, 1], [0, 1, 2], [0, 0, 1]])
    assert window(Inverse(identity_oracle(Q)), 4) == Mat.identity(Q, 4)


def test_periodic_seq_canonical():
    s = PeriodicSeq([1, 2, 1, 2], [1, 2, 1, 2])
    assert s.prefix == () and s.period == (1, 2)
    assert PeriodicSeq([5, 7], [1]).shift(2) == PeriodicSeq.constant(1)
    assert PeriodicSeq([5, 7], [1, 2]).shift(3).take(3) == [2, 1, 2]


def _composites(A, B):
    return [Product([A, B]), Inverse(A), Power(A, 3), Power(B, -2), Conjugate(A, B),
            Product([Inverse(B), Power(A, 2), B])]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_window_consistency(seed):
    rng = random.Random(seed)
    A = rand_banded_unitriangular(Q, rng, bands=2)
    B = rand_banded_unitriangular(Q, rng, bands=3)
    for X in _composites(A, B):
        big = X.window(rng.randint(8, 20))
        for m in range(big.n + 1):
            assert X.window(m) == big.top_left(m)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_oracle_ops_match_dense_windows(seed):
    rng = random.Random(seed)
    A = rand_banded_unitriangular(F7, rng)
    B = rand_banded_unitriangular(F7, rng)
    N = 10
    assert Product([A, B]).window(N) == A.window(N) @ B.window(N)
    assert Product([A, B]).window(N) == naive_window_product(A, B, N)
    assert Inverse(A).window(N) == A.window(N).inverse()
    assert Power(A, -3).window(N) == A.window(N).inverse() ** 3


class LoggedBanded(Banded):
    """Banded oracle that records every entry request."""

    def __init__(self, ctx, diagonals, log):
        super().__init__(ctx, diagonals)
        self.log = log

    def _entry(self, i, j):
        self.log.append((i, j))
        return super()._entry(i, j)


def test_entry_locality():
    rng = random.Random(11)
    for _ in range(10):
        i = rng.randint(0, 6)
        j = i + rng.randint(0, 6)
        log = []
        base_a = rand_banded_unitriangular(Q, rng)
        base_b = rand_banded_unitriangular(Q, rng)
        A = LoggedBanded(Q, base_a.diagonals, log)
        B = LoggedBanded(Q, base_b.diagonals, log)
        for X in _composites(A, B):
            X.entry(i, j)
        assert log and all(i <= p <= q <= j for p, q in log), (i, j, sorted(set(log)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 6))
def test_superdiagonal_additivity(seed, l):
    rng = random.Random(seed)
    A = rand_unitriangular(Q, 6, rng)
    assert (A ** l).superdiag() == [l * x for x in A.superdiag()]
    X = rand_banded_unitriangular(Q, rng)
    assert Power(X, l).window(8).superdiag() == [l * x for x in X.window(8).superdiag()]
