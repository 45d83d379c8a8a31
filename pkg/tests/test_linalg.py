from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dksweyl.linalg import (
    InconsistentSystem,
    Matrix,
    ShapeError,
    det,
    inverse,
    kernel_basis,
    solve,
    to_scalar,
)


def small_matrices(rows=st.integers(0, 4), cols=st.integers(0, 4)):
    return st.tuples(rows, cols).flatmap(
        lambda rc: st.lists(
            st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=rc[1], max_size=rc[1]),
            min_size=rc[0], max_size=rc[0],
        ).map(lambda rows, rc=rc: Matrix(rows, rc))
    )


def square(n_max=4):
    return st.integers(0, n_max).flatmap(lambda n: small_matrices(st.just(n), st.just(n)))


def test_det_examples():
    assert det(Matrix.identity(3)) == 1
    assert det(Matrix([[0, 1], [-1, 0]])) == 1
    assert det(Matrix.identity(0)) == 1


def test_det_rejects_non_square():
    with pytest.raises(ShapeError):
        det(Matrix([[1, 2]]))


def test_kernel_examples():
    assert kernel_basis(Matrix.identity(3)) == []
    assert kernel_basis(Matrix.zeros(1, 2)) == [Matrix.column([1, 0]), Matrix.column([0, 1])]
    assert kernel_basis(Matrix([[1, 1]])) == [Matrix.column([-1, 1])]


def test_solve_examples():
    b = Matrix([[3, F(1, 2)], [0, 7]])
    assert solve(Matrix.identity(2), b) == b
    lam = F(5, 3)
    x = solve(Matrix.column([1, -1]), Matrix([[-lam, 0], [lam, 0]]))
    assert x == Matrix([[-lam, 0]])
    with pytest.raises(InconsistentSystem):
        solve(Matrix.zeros(2, 2), Matrix.column([1, 0]))


def test_fraction_strings_only():
    assert to_scalar("3/4") == F(3, 4)
    assert to_scalar("-2") == -2
    with pytest.raises(ValueError):
        to_scalar("0.5")
    with pytest.raises(ValueError):
        to_scalar("1e3")


def test_json_round_trip_and_layout():
    m = Matrix([[1, F(-2, 3)], [0, 5]])
    data = m.to_json()
    assert data == {"rows": 2, "cols": 2, "entries": ["1", "-2/3", "0", "5"]}
    assert Matrix.from_json(data) == m
    with pytest.raises(ValueError):
        Matrix.from_json({"rows": 1, "cols": 1, "entries": ["0.25"]})


def test_empty_shapes_behave():
    z = Matrix.zeros(0, 3)
    assert (Matrix.zeros(2, 0) @ z) == Matrix.zeros(2, 3)
    assert z.rank() == 0
    assert len(kernel_basis(z)) == 3


@settings(max_examples=60, deadline=None)
@given(small_matrices())
def test_kernel_is_kernel(m):
    basis = kernel_basis(m)
    assert len(basis) == m.cols - m.rank()
    for v in basis:
        assert (m @ v).is_zero()


@settings(max_examples=60, deadline=None)
@given(square(3), square(3))
def test_det_multiplicative(a, b):
    if a.rows != b.rows:
        b = Matrix.identity(a.rows)
    assert det(a @ b) == det(a) * det(b)


@settings(max_examples=60, deadline=None)
@given(square(4))
def test_inverse_when_invertible(m):
    if det(m) == 0:
        return
    assert m @ inverse(m) == Matrix.identity(m.rows)


@settings(max_examples=60, deadline=None)
@given(small_matrices(), st.data())
def test_solve_consistent_systems(a, data):
    x = data.draw(small_matrices(st.just(a.cols), st.integers(0, 2)))
    b = a @ x
    y = solve(a, b)
    assert a @ y == b
