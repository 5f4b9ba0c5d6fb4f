from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracle
from gmethod import io
from gmethod.errors import InvalidInputError
from gmethod.matrix import RMatrix, format_rational, matmul_chain, to_rational

small = st.fractions(min_value=-20, max_value=20, max_denominator=30)


@st.composite
def matrix_pairs(draw):
    m, k, n = (draw(st.integers(1, 6)) for _ in range(3))
    a = draw(st.lists(st.lists(small, min_size=k, max_size=k), min_size=m, max_size=m))
    b = draw(st.lists(st.lists(small, min_size=n, max_size=n), min_size=k, max_size=k))
    return a, b


@pytest.mark.parametrize("raw,expected", [
    (3, Fraction(3)),
    ("0.2", Fraction(1, 5)),
    (0.2, Fraction(1, 5)),
    ("-3/4", Fraction(-3, 4)),
    (" 6/8 ", Fraction(3, 4)),
    (np.int64(5), Fraction(5)),
    (Fraction(2, 3), Fraction(2, 3)),
])
def test_to_rational(raw, expected):
    assert to_rational(raw) == expected


@pytest.mark.parametrize("raw", [True, "1/0", "x", float("nan"), float("inf"), None, [1]])
def test_to_rational_rejects(raw):
    with pytest.raises(InvalidInputError):
        to_rational(raw)


def test_format_rational():
    assert format_rational(Fraction(4, 2)) == 2
    assert format_rational(Fraction(-3, 6)) == "-1/2"
    assert format_rational(Fraction(1, 3), decimal=True) == "0.333333333333"
    assert format_rational(Fraction(7), decimal=True) == 7


def test_construction_errors():
    for bad in ([], [[]], [[1, 2], [3]], [[1], "a"]):
        with pytest.raises(InvalidInputError):
            RMatrix(bad)


def test_basic_accessors():
    M = RMatrix([[1, "1/2"], [0, "-3/4"]])
    assert M.shape == (2, 2)
    assert M.entry(1, 2) == Fraction(1, 2)
    assert M.row_values(2) == [0, Fraction(-3, 4)]
    assert M.row_sums() == [Fraction(3, 2), Fraction(-3, 4)]
    assert M.T.entry(2, 1) == Fraction(1, 2)
    assert M.select(rows=[2], cols=[2]).to_fractions() == [[Fraction(-3, 4)]]
    assert not M.is_nonnegative()
    assert RMatrix.identity(3).is_square()
    assert RMatrix.constant(2, 3, "1/3").rows_identical()
    assert RMatrix.zeros(2, 2).is_zero()
    assert RMatrix.row([5, 5]).is_constant()
    assert RMatrix.column([1, 2]).shape == (2, 1)
    with pytest.raises(InvalidInputError):
        M.select(rows=[3])
    with pytest.raises(InvalidInputError):
        M.select(cols=[])


def test_shape_mismatch_products():
    with pytest.raises(InvalidInputError):
        RMatrix.identity(2) @ RMatrix.identity(3)
    with pytest.raises(InvalidInputError):
        RMatrix.identity(2) + RMatrix.identity(3)


def test_large_entries_stay_exact():
    big = 10**30
    A = RMatrix([[big, 1], [1, big]])
    P = A @ A
    assert P.entry(1, 1) == big * big + 1
    assert P.entry(1, 2) == 2 * big
    tiny = RMatrix([[Fraction(1, 3**40)]])
    assert (tiny @ tiny).entry(1, 1) == Fraction(1, 3**80)


@given(matrix_pairs())
def test_matmul_matches_oracle(pair):
    a, b = pair
    got = (RMatrix(a) @ RMatrix(b)).to_fractions()
    assert got == oracle.matmul(a, b)


@given(matrix_pairs())
def test_add_sub_neg_scale(pair):
    a, _ = pair
    A = RMatrix(a)
    assert (A + A).to_fractions() == [[2 * v for v in r] for r in a]
    assert (A - A).is_zero()
    assert (-A).to_fractions() == [[-v for v in r] for r in a]
    assert A.scale("2/3").to_fractions() == [[v * Fraction(2, 3) for v in r] for r in a]


@given(matrix_pairs())
def test_text_round_trip(pair):
    a, _ = pair
    A = RMatrix(a)
    back = io.parse_matrix(io.loads(io.dumps(A.to_json())))
    assert back == A
    assert back.to_fractions() == a


def test_matmul_chain():
    A = RMatrix([[1, 2], [3, 4]])
    assert matmul_chain([A, A, A]) == A @ A @ A
