from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sagecert.algebra import (
    ExponentMatrix,
    evaluate,
    from_dict,
    make_polynomial,
    make_signomial,
    multiply,
    power,
)
from sagecert.instances import case


def test_duplicate_columns_are_merged():
    f = make_signomial([[0], [1], [1]], [1, 2, 3])
    assert f.exponents.columns == ((Fraction(0),), (Fraction(1),))
    assert f.coeffs.tolist() == [1.0, 5.0]


def test_canonical_input_is_stored_unchanged():
    f = make_signomial([[0], [1], [2], [3], [4]], [1, -4, 7, -4, 1])
    assert [c[0] for c in f.exponents.columns] == [0, 1, 2, 3, 4]
    assert f.coeffs.tolist() == [1, -4, 7, -4, 1]


def test_zero_coefficient_is_retained():
    f = make_signomial([[0, 0], [2, 0]], [1, 0])
    assert f.m == 2 and f.coeffs.tolist() == [1.0, 0.0]


def test_decimal_exponents_are_exact():
    f = make_signomial([["0.30", "0.58"], [0.21, 0.08]], [1, 1])
    assert Fraction(3, 10) in [c[0] for c in f.exponents.columns]
    assert Fraction(21, 100) in [c[0] for c in f.exponents.columns]


@pytest.mark.parametrize(
    "cols, coeffs",
    [([[0], [1]], [1]), ([[0], [1, 2]], [1, 1]), ([[0]], [np.inf]), ([], [])],
)
def test_construction_errors(cols, coeffs):
    with pytest.raises(ValueError):
        make_signomial(cols, coeffs)


def test_exponent_matrix_rejects_duplicates():
    with pytest.raises(ValueError):
        ExponentMatrix([[1], [1]])


def test_polynomial_exponents_must_be_natural():
    with pytest.raises(ValueError):
        make_polynomial([[0], [-1]], [1, 1])
    with pytest.raises(ValueError):
        make_polynomial([[0], ["1/2"]], [1, 1])


def test_evaluate_examples():
    f = make_signomial([[0], [2], [1]], [1, 1, -2])
    assert evaluate(f, [0.0]) == 0.0
    assert evaluate(case("ex6.3"), [0.0]) == pytest.approx(1.0, abs=1e-15)
    g = make_signomial([[0], [1]], [1, 1])
    assert evaluate(g, [-10.0]) == pytest.approx(1.0000453999, rel=1e-9)


def test_evaluate_reports_overflow():
    f = make_signomial([[0], [1]], [1, 1])
    with pytest.warns(RuntimeWarning):
        assert evaluate(f, [1000.0]) == np.inf
    with pytest.warns(RuntimeWarning):
        assert evaluate(-f, [1000.0]) == -np.inf


def test_evaluate_dimension_error():
    with pytest.raises(ValueError):
        evaluate(case("ex6.1"), [0.0])


def test_multiply_examples():
    one_plus = make_signomial([[0], [1]], [1, 1])
    one_minus = make_signomial([[0], [1]], [1, -1])
    prod = multiply(one_plus, one_minus)
    assert [c[0] for c in prod.exponents.columns] == [0, 1, 2]
    assert prod.coeffs.tolist() == [1.0, 0.0, -1.0]
    assert power(one_plus, 2).coeffs.tolist() == [1.0, 2.0, 1.0]
    ones = make_signomial([[0], [1], [2]], [1, 1, 1])
    assert power(ones, 2).coeffs.tolist() == [1, 2, 3, 2, 1]
    p0 = power(one_plus, 0)
    assert p0.exponents.columns == ((0,),) and p0.coeffs.tolist() == [1.0]


def test_hierarchy_product_is_affine_in_gamma():
    f = case("ex6.3")
    lift = make_signomial([[k] for k in range(5)], [1] * 5)
    p = multiply(lift, f)
    q = multiply(lift, make_signomial([[0]], [1.0]))
    assert p.m == 9
    # direct expansion of the convolution
    expect = np.convolve([1] * 5, [1, -4, 7, -4, 1])
    assert np.array_equal(p.coeffs, expect)
    gamma = 0.37
    shifted = multiply(lift, f - gamma)
    qc = np.array([q.coefficient(col) for col in p.exponents])
    assert np.allclose(shifted.coeffs, p.coeffs - gamma * qc, atol=1e-15)


def test_json_round_trip():
    for name in ("ex6.1", "sec6.2a"):
        f = case(name)
        assert from_dict(f.to_dict()) == f
    p = make_polynomial([[0, 0], [2, 4]], [1, -1])
    assert from_dict(p.to_dict()) == p


# ---------------------------------------------------------------------------
# properties

exps = st.lists(st.integers(-3, 3), min_size=2, max_size=2)


def signomials(coeff=st.floats(-5, 5, allow_nan=False)):
    return st.lists(st.tuples(exps, coeff), min_size=1, max_size=5).map(
        lambda terms: make_signomial([t[0] for t in terms], [t[1] for t in terms])
    )


@given(signomials(), signomials(), st.lists(st.floats(-3, 3), min_size=2, max_size=2))
def test_evaluate_multiplicative(f, g, x):
    fg = multiply(f, g)
    lhs = evaluate(fg, x)
    rhs = evaluate(f, x) * evaluate(g, x)
    # cancellation error is bounded by the absolute term sizes
    size = evaluate(make_signomial(f.exponents, np.abs(f.coeffs)), x) * evaluate(
        make_signomial(g.exponents, np.abs(g.coeffs)), x
    )
    assert abs(lhs - rhs) <= 1e-10 * max(size, 1e-300) + 1e-300


@given(signomials())
def test_canonicalization_is_idempotent(f):
    g = make_signomial(list(f.exponents), f.coeffs)
    assert g == f


@given(signomials(), signomials())
def test_multiply_commutative(f, g):
    assert multiply(f, g) == multiply(g, f)


@given(
    signomials(st.integers(-9, 9)),
    signomials(st.integers(-9, 9)),
    signomials(st.integers(-9, 9)),
)
def test_multiply_associative(f, g, h):
    # small integer coefficients make every product exact
    assert multiply(multiply(f, g), h) == multiply(f, multiply(g, h))
