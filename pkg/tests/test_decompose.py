from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sagecert.algebra import make_polynomial
from sagecert.decompose import (
    cancellation_free,
    circuit_decompose,
    classify_support,
    is_cancellation_free,
    poly_age_decompose,
    transfer_pair,
    transfer_weights,
)
from sagecert.instances import binomial_square_age, motzkin
from sagecert.polyform import poly_sage_membership
from sagecert.sage import (
    AgeCertificate,
    Refusal,
    SageCertificate,
    age_membership,
    exact_kernel_point,
    sage_membership,
    validate_certificate,
)

from helpers import GRID, GRID_INTERIOR, LINE, LINE_INTERIOR, age_sum


def test_transfer_pair_example():
    w_hat, v_hat = transfer_pair([-2, 3], [1, -4], 0, 1)
    assert w_hat == [-1, 0] and v_hat == [0, -1]
    (a, b), (g, d) = transfer_weights([-2, 3], [1, -4], 0, 1)
    assert (a, b, g, d) == (Fraction(4, 5), Fraction(3, 5), Fraction(1, 5), Fraction(2, 5))


def test_transfer_pair_preconditions():
    with pytest.raises(ValueError):
        transfer_pair([-2, 3], [1, -4], 0, 0)
    with pytest.raises(ValueError):
        transfer_pair([-2, -3], [1, -4], 0, 1)
    with pytest.raises(ValueError):
        transfer_pair([-2, 5], [1, -4], 0, 1)  # w_j + v_j >= 0
    with pytest.raises(ValueError):
        transfer_pair([-2, 3], [1, -4, 0], 0, 1)


@settings(max_examples=60)
@given(st.lists(st.integers(0, 9), min_size=4, max_size=4), st.integers(1, 9), st.integers(1, 9))
def test_transfer_pair_properties(extra, a, b):
    # w negative at 0, v negative at 1, both sums negative there
    w = [-a - extra[0], extra[1], extra[2], 0]
    v = [extra[0], -b - extra[1], 0, extra[3]]
    w_hat, v_hat = transfer_pair(w, v, 0, 1)
    assert [x + y for x, y in zip(w_hat, v_hat)] == [x + y for x, y in zip(w, v)]
    assert w_hat[1] == 0 and v_hat[0] == 0
    assert all(x >= 0 for t, x in enumerate(w_hat) if t != 0)
    assert all(x >= 0 for t, x in enumerate(v_hat) if t != 1)
    (p, q), (r, s) = transfer_weights(w, v, 0, 1)
    assert min(p, q, r, s) >= 0 and p + r == 1 and q + s == 1


def test_cancellation_free_example():
    # two AGE parts on the line that each put mass on the other's negative index
    cols = [(0,), (1,), (2,), (3,)]
    p1 = age_membership(cols, 1, [1.0, -1.0, 0.3, 0.3])
    p2 = age_membership(cols, 2, [0.3, 0.4, -1.0, 1.0])
    assert not isinstance(p1, Refusal) and not isinstance(p2, Refusal)
    c = p1.cvec + p2.cvec
    cert = cancellation_free(cols, c, [p1, p2])
    assert is_cancellation_free(c, cert, tol=1e-12)
    assert sorted(p.k for p in cert.parts) == [1, 2]
    assert validate_certificate(cols, c, cert)
    # already cancellation-free input comes back unchanged
    assert cancellation_free(cols, c, cert) is cert


def test_cancellation_free_nonnegative_vector():
    given = SageCertificate([], np.array([1.0, 2.0]))
    cert = cancellation_free([(0,), (1,)], [1.0, 2.0], given)
    assert cert.parts == [] and np.allclose(cert.residual, [1.0, 2.0])
    # a bare part list must sum to c by itself
    with pytest.raises(ValueError):
        cancellation_free([(0,), (1,)], [1.0, 2.0], [])


def test_cancellation_free_rejects_bad_sums():
    cols = [(0,), (1,), (2,)]
    p = age_membership(cols, 1, [1.0, -1.0, 1.0])
    with pytest.raises(ValueError):
        cancellation_free(cols, [1.0, -1.0, 2.0], [p])


@pytest.mark.parametrize("cols,interior", [(LINE, LINE_INTERIOR), (GRID, GRID_INTERIOR)])
@settings(max_examples=5)
@given(seed=st.integers(0, 10**6))
def test_cancellation_free_random(cols, interior, seed):
    c, parts, N = age_sum(np.random.default_rng(seed), cols, interior)
    cert = cancellation_free(cols, c, parts)
    assert is_cancellation_free(c, cert, tol=1e-12)
    assert validate_certificate(cols, c, cert)
    # idempotent on its own output
    again = cancellation_free(cols, c, cert)
    assert again is cert


def test_circuit_decompose_line():
    cols = [(0,), (1,), (2,), (3,)]
    cert = age_membership(cols, 1, [1.0, -1.5, 1.0, 0.5])
    parts, remainder = circuit_decompose(cols, cert)
    assert parts and all(p.kind == "simplicial_circuit" for p in parts)
    assert remainder.min() >= -1e-9
    target = exact_kernel_point(cols, 1, cert.nu)
    total = [sum(p.theta * p.nu_exact[t] for p in parts) for t in range(len(target))]
    assert total == target
    used = sum(float(p.theta) * p.cvec for p in parts)
    assert np.allclose(used + remainder, cert.cvec, atol=1e-9)
    for p in parts:
        assert age_membership(cols, 1, np.where(np.arange(4) == 1, p.cvec[1], np.maximum(p.cvec, 0)),
                              mode="decide")


def test_circuit_decompose_motzkin():
    m = motzkin()
    cert = sage_membership(m.exponents, m.coeffs)
    (part,) = cert.parts
    parts, _ = circuit_decompose(m.exponents, part)
    assert [p.kind for p in parts] == ["simplicial_circuit"]
    assert parts[0].theta == 1


def test_circuit_decompose_rejects_invalid():
    cols = [(0,), (1,), (2,)]
    with pytest.raises(ValueError):
        circuit_decompose(cols, AgeCertificate(1, np.array([0.5, 0.5]), np.array([1.0, -3.0, 1.0])))


def test_classify_support():
    cols = [(0, 0), (2, 0), (0, 2), (1, 1), (2, 2)]
    assert classify_support(cols, [0]) == "singleton"
    assert classify_support(cols, [0, 3, 4]) == "simplicial_circuit"
    assert classify_support(cols, [1, 2, 3]) == "simplicial_circuit"
    assert classify_support(cols, [0, 1, 2]) == "other"
    assert classify_support(cols, [0, 1, 2, 3, 4]) == "other"


def _poly_parts(p):
    cert = poly_sage_membership(p)
    assert not isinstance(cert, Refusal)
    inner = cancellation_free(p.exponents, cert.chat, cert.inner)
    return poly_age_decompose(p.exponents, p.coeffs, inner)


# 1 + x^6 + y^6 + z^6 - 2xyz: odd inner term, AGE by weighted AM/GM
ODD_AGE = make_polynomial([(0, 0, 0), (6, 0, 0), (0, 6, 0), (0, 0, 6), (1, 1, 1)], [1, 1, 1, 1, -2])


# the binomial square embedded in three variables, to be added to the Motzkin form
SQUARE_3D = make_polynomial([(0, 0, 0), (2, 2, 0), (8, 0, 0), (0, 8, 0)], [1, -2, 0.5, 0.5])


@pytest.mark.parametrize("p", [motzkin(), binomial_square_age(), ODD_AGE, motzkin() + ODD_AGE,
                               motzkin() + SQUARE_3D],
                         ids=["motzkin", "square", "odd", "sum_odd", "sum_square"])
def test_poly_age_decompose(p):
    parts = _poly_parts(p)
    assert np.allclose(sum(parts), p.coeffs, atol=1e-7)
    even = p.exponents.is_even()
    for vec in parts:
        bad = [j for j in range(p.m) if vec[j] != 0 and not (vec[j] > 0 and even[j])]
        assert len(bad) <= 1
        q = make_polynomial(list(p.exponents), vec)
        assert not isinstance(poly_sage_membership(q), Refusal)
    # parts never cancel: same sign as p at every index
    for vec in parts:
        assert np.all(vec * p.coeffs >= -1e-9)


def test_poly_age_decompose_merged_support():
    p = motzkin() + SQUARE_3D
    parts = _poly_parts(p)
    inner = [vec for vec in parts if np.any(vec < 0)]
    # one part per negative term, each carrying that term's full coefficient
    assert len(inner) == 2
    neg = {int(np.flatnonzero(vec < 0)[0]): vec[vec < 0][0] for vec in inner}
    assert neg == {p.exponents.index((2, 2, 0)): -2.0, p.exponents.index((2, 2, 2)): -3.0}


def test_poly_age_decompose_requires_domination():
    p = motzkin()
    cert = poly_sage_membership(p)
    with pytest.raises(ValueError):
        poly_age_decompose(p.exponents, p.coeffs - 1.0, cert.inner)
