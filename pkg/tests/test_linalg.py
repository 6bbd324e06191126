from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from coincide.linalg import (
    LinAlgError,
    Matrix,
    SubspaceBasis,
    as_rational,
    format_rational,
    image_basis,
    inverse,
    is_invertible,
    kernel_basis,
    quotient_representatives,
    rank,
    rref,
    solve,
    solve_many,
    trace,
)
from oracles import dense_rank

F = Fraction
small = st.integers(-3, 3)


@st.composite
def matrices(draw, max_dim=5):
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    rows = [[draw(small) for _ in range(c)] for _ in range(r)]
    return Matrix.from_rows(rows, c)


def test_float_rejected():
    with pytest.raises(LinAlgError, match="floating point"):
        as_rational(0.5)


def test_rref_pivots_and_form():
    m = Matrix.from_rows([[0, 2, 4], [1, 1, 1], [1, 3, 5]])
    r, piv = rref(m)
    assert piv == [0, 1]
    assert r.to_rows() == [[1, 0, -1], [0, 1, 2], [0, 0, 0]]


def test_kernel_sign_normalized():
    k = kernel_basis(Matrix.from_rows([[1, 1, 0], [0, 0, 1]]))
    assert k.vectors == ((F(1), F(-1), F(0)),)


def test_solve_inconsistent_returns_none():
    assert solve(Matrix.from_rows([[1, 1], [1, 1]]), [1, 2]) is None


def test_solve_sets_free_variables_to_zero():
    assert solve(Matrix.from_rows([[1, 1]]), [3]) == [F(3), F(0)]


def test_inverse_and_singular():
    m = Matrix.from_rows([[2, 1], [1, 1]])
    assert inverse(m) == Matrix.from_rows([[1, -1], [-1, 2]])
    with pytest.raises(LinAlgError):
        inverse(Matrix.from_rows([[1, 2], [2, 4]]))
    assert not is_invertible(Matrix.zeros(2, 3))


def test_empty_shapes():
    assert rank(Matrix.zeros(0, 3)) == 0
    assert kernel_basis(Matrix.zeros(0, 2)).dim == 2
    assert Matrix.zeros(1, 0) @ Matrix.zeros(0, 1) == Matrix.zeros(1, 1)
    assert is_invertible(Matrix.zeros(0, 0))


def test_quotient_requires_containment():
    big = SubspaceBasis.of(2, [[1, 0]])
    small = SubspaceBasis.of(2, [[0, 1]])
    with pytest.raises(LinAlgError):
        quotient_representatives(big, small)


def test_quotient_picks_complement():
    big = SubspaceBasis.of(3, [[1, 0, 0], [0, 1, 0]])
    small = SubspaceBasis.of(3, [[1, 1, 0]])
    q = quotient_representatives(big, small)
    assert q.dim == 1
    together = Matrix.from_columns(list(small.vectors) + list(q.vectors), 3)
    assert rank(together) == 2


def test_format_rational():
    assert format_rational(F(3)) == "3"
    assert format_rational(F(-1, 2)) == "-1/2"
    assert format_rational(F(0)) == "0"


def test_trace_requires_square():
    with pytest.raises(LinAlgError):
        trace(Matrix.zeros(2, 3))


@given(matrices())
def test_rank_matches_dense_oracle(m):
    assert rank(m) == (dense_rank(m.to_rows()) if m.rows else 0)


@given(matrices())
def test_rank_nullity_and_kernel(m):
    k = kernel_basis(m)
    assert rank(m) + k.dim == m.cols
    for v in k.vectors:
        assert all(x == 0 for x in m @ v)


@given(matrices())
def test_image_basis_spans_columns(m):
    img = image_basis(m)
    assert img.dim == rank(m)
    if m.cols and m.rows:
        sol = solve_many(img.as_matrix(), m)
        assert sol is not None


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_inverse_roundtrip(rows):
    m = Matrix.from_rows(rows)
    if is_invertible(m):
        assert m @ inverse(m) == Matrix.identity(m.rows)
    else:
        assert rank(m) < m.rows


@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_solve_is_exact(m, x):
    x = x[: m.cols]
    b = m @ x
    sol = solve(m, b)
    assert sol is not None and m @ sol == b
