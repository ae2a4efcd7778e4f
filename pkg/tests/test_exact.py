from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from graphcx.exact import (QQ, PrimeField, SparseMatrix, field_from_spec, kernel_basis,
                           quotient_basis, rank, solve)
from oracles import dense_rank, rank_mod_p

small = st.integers(min_value=-4, max_value=4)
matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


def test_field_specs():
    assert field_from_spec(None) == QQ
    assert field_from_spec("rational") == QQ
    assert field_from_spec("p:101") == PrimeField(101)
    assert field_from_spec("13").p == 13
    with pytest.raises(ValueError):
        PrimeField(15)


def test_prime_field_arithmetic():
    F = PrimeField(7)
    assert F.convert(Fraction(1, 3)) == 5
    assert F.mul(3, F.inv(3)) == 1
    assert F.neg(2) == 5
    with pytest.raises(ZeroDivisionError):
        F.convert(Fraction(1, 7))
    with pytest.raises(ZeroDivisionError):
        QQ.inv(Fraction(0))


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rank_matches_reference(rows):
    assert rank(SparseMatrix.from_dense(rows)) == dense_rank(rows)
    F = PrimeField(101)
    assert rank(SparseMatrix.from_dense(rows, F)) == rank_mod_p(rows, 101)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_kernel_and_rank_nullity(rows):
    m = SparseMatrix.from_dense(rows)
    ker = kernel_basis(m)
    assert len(ker) + rank(m) == m.ncols
    for v in ker:
        assert not any(m.apply(v))


@settings(max_examples=60, deadline=None)
@given(matrices, st.data())
def test_solve_in_image(rows, data):
    m = SparseMatrix.from_dense(rows)
    x = data.draw(st.lists(small, min_size=m.ncols, max_size=m.ncols))
    b = m.apply([Fraction(v) for v in x])
    y = solve(m, b)
    assert y is not None and m.apply(y) == b


def test_solve_outside_image():
    m = SparseMatrix.from_dense([[1, 1], [2, 2]])
    assert solve(m, [1, 0]) is None


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_quotient_kills_subspace(rows):
    n = len(rows[0])
    reps, proj = quotient_basis(n, rows)
    assert len(reps) == n - dense_rank(rows)
    for r in rows:
        assert not any(proj.apply([Fraction(x) for x in r]))
    for j, c in enumerate(reps):
        e = [Fraction(int(i == c)) for i in range(n)]
        assert proj.apply(e) == [Fraction(int(i == j)) for i in range(len(reps))]


def test_sparse_basics():
    m = SparseMatrix.from_dense([[0, 2], [3, 0]])
    assert m.transpose().to_dense() == [[0, 3], [2, 0]]
    assert m.nnz() == 2 and not m.is_zero()
    assert SparseMatrix.identity(3).to_dense()[1] == [0, 1, 0]
    assert m.to_field(PrimeField(5)).to_dense() == [[0, 2], [3, 0]]
