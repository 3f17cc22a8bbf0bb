"""Signomials and sparse polynomials with exact rational exponents.

A signomial is ``x -> sum_i c_i exp(a_i . x)`` and a sparse polynomial is
``x -> sum_i c_i x^{a_i}`` with nonnegative integer exponents.  Both share
the same storage: an :class:`ExponentMatrix` holding the exponent vectors as
exact fractions in canonical (lexicographic) order, and a float coefficient
vector aligned with it.  Zero coefficients are never dropped.
"""

from __future__ import annotations

import math
import warnings
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .rational import to_fraction

__all__ = [
    "ExponentMatrix",
    "Signomial",
    "SparsePolynomial",
    "make_signomial",
    "make_polynomial",
    "evaluate",
    "multiply",
    "power",
    "align",
    "from_dict",
]


class ExponentMatrix:
    """Distinct exponent vectors stored column-wise as exact rationals.

    Parameters
    ----------
    columns : sequence of sequences
        The ``m`` exponent vectors, each of length ``n``.  Entries may be
        ints, fractions, decimal strings or floats with a short decimal form.
    """

    __slots__ = ("columns", "n", "__dict__")

    def __init__(self, columns: Iterable[Sequence]):
        cols = tuple(tuple(to_fraction(v) for v in col) for col in columns)
        if not cols:
            raise ValueError("an exponent matrix needs at least one column")
        n = len(cols[0])
        if n < 1:
            raise ValueError("exponent vectors need at least one entry")
        if any(len(col) != n for col in cols):
            raise ValueError("exponent vectors have inconsistent lengths")
        if len(set(cols)) != len(cols):
            raise ValueError("exponent vectors must be distinct")
        self.columns = cols
        self.n = n

    @property
    def m(self) -> int:
        return len(self.columns)

    def __len__(self):
        return len(self.columns)

    def __getitem__(self, i):
        return self.columns[i]

    def __iter__(self):
        return iter(self.columns)

    def __eq__(self, other):
        return isinstance(other, ExponentMatrix) and self.columns == other.columns

    def __hash__(self):
        return hash(self.columns)

    def __repr__(self):
        cols = ", ".join("(" + ",".join(str(v) for v in col) + ")" for col in self.columns)
        return f"ExponentMatrix([{cols}])"

    @cached_property
    def array(self) -> np.ndarray:
        """Float copy of shape (n, m)."""
        return np.array([[float(v) for v in col] for col in self.columns]).T.reshape(self.n, self.m)

    def index(self, col) -> int:
        return self.columns.index(tuple(to_fraction(v) for v in col))

    def is_integral(self) -> bool:
        return all(v.denominator == 1 and v >= 0 for col in self.columns for v in col)

    def is_even(self) -> np.ndarray:
        """Boolean mask of columns whose entries are all even integers."""
        return np.array(
            [all(v.denominator == 1 and v.numerator % 2 == 0 for v in col) for col in self.columns]
        )

    def zero_index(self) -> int | None:
        zero = tuple(Fraction(0) for _ in range(self.n))
        try:
            return self.columns.index(zero)
        except ValueError:
            return None

    def to_strings(self) -> list[list[str]]:
        return [[str(v) for v in col] for col in self.columns]


def _canonical(columns, coeffs):
    """Sort columns lexicographically and merge duplicates with exact rounding."""
    cols = [tuple(to_fraction(v) for v in col) for col in columns]
    coeffs = [float(c) for c in coeffs]
    if len(cols) != len(coeffs):
        raise ValueError(f"{len(cols)} exponent vectors but {len(coeffs)} coefficients")
    if not all(math.isfinite(c) for c in coeffs):
        raise ValueError("coefficients must be finite")
    groups: dict = {}
    for col, c in zip(cols, coeffs):
        groups.setdefault(col, []).append(c)
    keys = sorted(groups)
    return keys, np.array([math.fsum(groups[k]) for k in keys])


class Signomial:
    """Immutable signomial ``sum_i c_i exp(a_i . x)``.

    Use :func:`make_signomial` to build instances from raw data; the
    constructor expects an already canonical exponent matrix.
    """

    kind = "signomial"

    def __init__(self, exponents: ExponentMatrix, coeffs):
        coeffs = np.array(coeffs, dtype=float).ravel()
        if coeffs.size != exponents.m:
            raise ValueError("coefficient count must equal the number of exponent vectors")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        coeffs.setflags(write=False)
        self.exponents = exponents
        self.coeffs = coeffs

    # convenience -----------------------------------------------------------
    @property
    def A(self) -> np.ndarray:
        return self.exponents.array

    @property
    def c(self) -> np.ndarray:
        return self.coeffs

    @property
    def m(self) -> int:
        return self.exponents.m

    @property
    def n(self) -> int:
        return self.exponents.n

    def _like(self, columns, coeffs):
        return make_signomial(columns, coeffs)

    def __call__(self, x):
        return evaluate(self, x)

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.exponents == other.exponents
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((self.exponents, self.coeffs.tobytes()))

    def __repr__(self):
        terms = ", ".join(
            f"{c:g}*[{','.join(str(v) for v in col)}]"
            for c, col in zip(self.coeffs, self.exponents.columns)
        )
        return f"{type(self).__name__}({terms})"

    def __neg__(self):
        return type(self)(self.exponents, -self.coeffs)

    def __add__(self, other):
        if isinstance(other, (int, float, np.number)):
            other = self._like([[0] * self.n], [float(other)])
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return self._like(
            list(self.exponents) + list(other.exponents),
            list(self.coeffs) + list(other.coeffs),
        )

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, np.number)):
            return type(self)(self.exponents, self.coeffs * float(other))
        return multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return power(self, k)

    def coefficient(self, col) -> float:
        try:
            return float(self.coeffs[self.exponents.index(col)])
        except ValueError:
            return 0.0

    def with_zero(self):
        """Copy with the zero exponent present (coefficient 0 if it was absent)."""
        if self.exponents.zero_index() is not None:
            return self
        return self._like(list(self.exponents) + [[0] * self.n], list(self.coeffs) + [0.0])

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "exponents": self.exponents.to_strings(),
            "coeffs": [float(c) for c in self.coeffs],
        }


class SparsePolynomial(Signomial):
    """Sparse polynomial ``sum_i c_i x^{a_i}`` with nonnegative integer exponents."""

    kind = "polynomial"

    def __init__(self, exponents: ExponentMatrix, coeffs):
        if not exponents.is_integral():
            raise ValueError("polynomial exponents must be nonnegative integers")
        super().__init__(exponents, coeffs)

    def _like(self, columns, coeffs):
        return make_polynomial(columns, coeffs)

    def __call__(self, x):
        return evaluate_polynomial(self, x)

    def as_signomial(self) -> Signomial:
        return Signomial(self.exponents, self.coeffs)


def make_signomial(columns, coeffs) -> Signomial:
    """Build a canonical :class:`Signomial`.

    Duplicate exponent vectors are merged by summing their coefficients and
    the columns are sorted lexicographically.  Zero coefficients are kept.

    Examples
    --------
    >>> f = make_signomial([[0], [1], [1]], [1.0, 2.0, 3.0])
    >>> f.coeffs.tolist()
    [1.0, 5.0]
    """
    cols, c = _canonical(columns, coeffs)
    return Signomial(ExponentMatrix(cols), c)


def make_polynomial(columns, coeffs) -> SparsePolynomial:
    """Build a canonical :class:`SparsePolynomial` (see :func:`make_signomial`)."""
    cols, c = _canonical(columns, coeffs)
    return SparsePolynomial(ExponentMatrix(cols), c)


def evaluate(f: Signomial, x) -> float | np.ndarray:
    """Evaluate ``sum_i c_i exp(a_i . x)``.

    ``x`` may be a single point of length ``n`` or an array of points of
    shape (k, n).  Terms are summed after shifting by the largest exponent so
    that cancellation between huge terms is handled gracefully; a result
    that does not fit in a double is returned as ``+inf`` or ``-inf`` with a
    :class:`RuntimeWarning`.
    """
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != f.n:
        raise ValueError(f"point has dimension {X.shape[1]}, signomial has {f.n}")
    T = X @ f.A  # (k, m)
    shift = np.max(T, axis=1)
    scaled = np.exp(T - shift[:, None]) @ f.coeffs
    val = np.zeros_like(scaled)
    small = shift <= 700.0
    val[small] = scaled[small] * np.exp(shift[small])
    large = ~small & (scaled != 0)
    if np.any(large):
        logmag = np.log(np.abs(scaled[large])) + shift[large]
        with np.errstate(over="ignore"):
            val[large] = np.sign(scaled[large]) * np.exp(logmag)
        if np.any(~np.isfinite(val[large])):
            warnings.warn("signomial value overflows double precision", RuntimeWarning, stacklevel=2)
    return float(val[0]) if single else val


def evaluate_polynomial(p: SparsePolynomial, x) -> float | np.ndarray:
    """Evaluate ``sum_i c_i x^{a_i}`` at one point or an array of points."""
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != p.n:
        raise ValueError(f"point has dimension {X.shape[1]}, polynomial has {p.n}")
    E = p.A.astype(int)
    vals = np.prod(X[:, :, None] ** E[None, :, :], axis=1) @ p.coeffs
    return float(vals[0]) if single else vals


def multiply(f: Signomial, g: Signomial) -> Signomial:
    """Product of two signomials (or polynomials) on all pairwise exponent sums."""
    if f.n != g.n:
        raise ValueError("dimension mismatch")
    cols = []
    coeffs = []
    for a, ca in zip(f.exponents, f.coeffs):
        for b, cb in zip(g.exponents, g.coeffs):
            cols.append(tuple(x + y for x, y in zip(a, b)))
            coeffs.append(ca * cb)
    if isinstance(f, SparsePolynomial) and isinstance(g, SparsePolynomial):
        return make_polynomial(cols, coeffs)
    return make_signomial(cols, coeffs)


def power(f: Signomial, k: int) -> Signomial:
    """``f`` multiplied with itself ``k`` times; ``k = 0`` gives the constant 1."""
    if k < 0:
        raise ValueError("power must be nonnegative")
    out = f._like([[0] * f.n], [1.0])
    for _ in range(k):
        out = multiply(out, f)
    return out


def align(*fs: Signomial):
    """Express several signomials on the union of their exponent sets.

    Returns
    -------
    exponents : ExponentMatrix
    coeffs : list of ndarray
        One coefficient vector per input, zero-filled.
    """
    n = fs[0].n
    if any(f.n != n for f in fs):
        raise ValueError("dimension mismatch")
    cols = sorted(set().union(*(f.exponents.columns for f in fs)))
    pos = {col: i for i, col in enumerate(cols)}
    out = []
    for f in fs:
        c = np.zeros(len(cols))
        for col, v in zip(f.exponents, f.coeffs):
            c[pos[col]] = v
        out.append(c)
    return ExponentMatrix(cols), out


def from_dict(data: dict) -> Signomial:
    """Inverse of :meth:`Signomial.to_dict`."""
    kind = data.get("kind", "signomial")
    n = int(data["n"])
    cols = data["exponents"]
    if any(len(col) != n for col in cols):
        raise ValueError("exponent vectors do not match the declared dimension")
    if kind == "signomial":
        return make_signomial(cols, data["coeffs"])
    if kind == "polynomial":
        return make_polynomial(cols, data["coeffs"])
    raise ValueError(f"unknown kind {kind!r}")
