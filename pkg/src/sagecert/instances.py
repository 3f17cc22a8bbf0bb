"""Benchmark signomials used by the reproduction command and the test suite."""

from __future__ import annotations

from .algebra import Signomial, make_polynomial, make_signomial

__all__ = ["CASES", "EXPECTED", "case", "motzkin", "binomial_square_age"]

# exponent columns and coefficients of the benchmark instances
_DATA = {
    "ex6.1": (
        [(0, 0), (2, 0), (1, 0), (0, 2), (0, 1), (2, 2)],
        [0, 3, -4, 2, -2, 1],
    ),
    "ex6.2": (
        [(0, 0), (2, 0), (0, 2), (2, 2), (1, 2), (2, 1)],
        [0, 1, 1, 1.9, -2, -2],
    ),
    "ex6.3": (
        [(0,), (1,), (2,), (3,), (4,)],
        [1, -4, 7, -4, 1],
    ),
    "sec6.2a": (
        [(0, 0), (1, 0), (0, 1), ("0.30", "0.58"), ("0.21", "0.08"), ("0.16", "0.54")],
        [33.94, 67.29, 1, 38.28, -57.75, -40.37],
    ),
    "sec6.2b": (
        [(0, 0), (1, 0), (0, 1), (2, 2), ("0.52", "0.15"), ("1.30", "1.38")],
        [0.31, 0.85, 2.55, 0.65, -1.48, -1.73],
    ),
}

CASES = tuple(_DATA)

# reference hierarchy values: level -> (value, tolerance); None marks f_SAGE = -inf
EXPECTED = {
    "ex6.1": {0: (-1.83333, 1e-4), 1: (-1.746505595, 1e-5)},
    "ex6.2": {0: (None, 0.0), 1: (-0.122211863, 1e-5)},
    "ex6.3": {0: (-0.3333333, 1e-5), 1: (0.2857720944, 1e-6)},
    "sec6.2a": {0: (-24.054866, 1e-3), 1: (-21.31651, 1e-3)},
    "sec6.2b": {0: (0.00354263, 1e-4), 1: (0.13793126, 1e-4)},
}

# global minimum of the two-variable square example and its level-0 gap
EX61_MINIMUM = -1.746505595
EX61_GAP = 0.08682


def case(name: str) -> Signomial:
    """Signomial of a named benchmark case."""
    try:
        cols, coeffs = _DATA[name]
    except KeyError:
        raise KeyError(f"unknown case {name!r}; choose from {', '.join(CASES)}") from None
    return make_signomial(cols, coeffs)


def motzkin(negative: float = -3.0):
    """Motzkin form ``x^2 y^4 + x^4 y^2 + z^6 + negative * x^2 y^2 z^2``."""
    return make_polynomial([(2, 4, 0), (4, 2, 0), (0, 0, 6), (2, 2, 2)], [1, 1, 1, negative])


def binomial_square_age():
    """``1 - 2 x^2 y^2 + x^8/2 + y^8/2``, an AGE polynomial."""
    return make_polynomial([(0, 0), (2, 2), (8, 0), (0, 8)], [1, -2, 0.5, 0.5])
