"""Exact rational linear algebra and a dense rational simplex method."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import numpy as np

__all__ = [
    "to_fraction",
    "rationalize",
    "nullspace",
    "rank",
    "solve_linear",
    "linprog_exact",
    "LPResult",
]


def to_fraction(x) -> Fraction:
    """Convert ``x`` to an exact :class:`~fractions.Fraction`.

    Strings are parsed as decimal or ``p/q`` literals.  Floats are converted
    through their shortest round-trip decimal representation, so ``0.3``
    becomes ``3/10`` rather than the nearest binary fraction.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("booleans are not exponents")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse rational {x!r}") from exc
    if isinstance(x, (float, np.floating)):
        xf = float(x)
        if not math.isfinite(xf):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(repr(xf))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def rationalize(x: float, max_denominator: int = 10**12) -> Fraction:
    """Nearest rational to a float with bounded denominator."""
    return Fraction(float(x)).limit_denominator(max_denominator)


def _integer_rows(M):
    rows = []
    for row in M:
        row = [to_fraction(v) for v in row]
        den = 1
        for v in row:
            den = den * v.denominator // math.gcd(den, v.denominator)
        rows.append([int(v * den) for v in row])
    return rows


def _primitive(row):
    g = 0
    for v in row:
        g = math.gcd(g, v)
    return [v // g for v in row] if g > 1 else row


def _echelon(M):
    """Fraction-free Gauss-Jordan elimination on integer rows.

    Returns the reduced rows (pivot entries nonzero, zero elsewhere in pivot
    columns) and the list of pivot columns.
    """
    rows = _integer_rows(M)
    if not rows:
        return [], []
    ncol = len(rows[0])
    pivots = []
    r = 0
    for col in range(ncol):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = _primitive([pr[col] * a - f * b for a, b in zip(rows[i], pr)])
        rows[r] = _primitive(pr)
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(M) -> int:
    """Exact rank of a matrix of rationals."""
    M = [list(row) for row in M]
    if not M or not M[0]:
        return 0
    return len(_echelon(M)[1])


def nullspace(M, ncols: int | None = None) -> list[list[Fraction]]:
    """Exact basis of ``{x : M x = 0}`` as a list of primitive integer vectors.

    Parameters
    ----------
    M : sequence of rows of rationals
    ncols : int, optional
        Column count, required when ``M`` has no rows.
    """
    M = [list(row) for row in M]
    if ncols is None:
        ncols = len(M[0])
    if not M:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    rows, pivots = _echelon(M)
    free = [j for j in range(ncols) if j not in set(pivots)]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for row, pc in zip(rows, pivots):
            vec[pc] = Fraction(-row[f], row[pc])
        den = 1
        for v in vec:
            den = den * v.denominator // math.gcd(den, v.denominator)
        ints = _primitive([int(v * den) for v in vec])
        basis.append([Fraction(v) for v in ints])
    return basis


def solve_linear(M, rhs) -> list[Fraction] | None:
    """One exact solution of ``M x = rhs`` or ``None`` when inconsistent."""
    M = [[to_fraction(v) for v in row] for row in M]
    aug = [row + [to_fraction(r)] for row, r in zip(M, rhs)]
    ncols = len(M[0]) if M else 0
    rows, pivots = _echelon(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, pc in zip(rows, pivots):
        x[pc] = Fraction(row[ncols], row[pc])
    return x


class LPResult:
    """Outcome of :func:`linprog_exact`."""

    __slots__ = ("status", "x", "objective")

    def __init__(self, status, x=None, objective=None):
        self.status = status
        self.x = x
        self.objective = objective

    def __repr__(self):
        return f"LPResult(status={self.status!r}, objective={self.objective})"


def linprog_exact(c, A_eq, b_eq, max_iter: int = 100000) -> LPResult:
    """Minimize ``c^T x`` subject to ``A_eq x = b_eq``, ``x >= 0`` exactly.

    Two-phase dense tableau simplex over :class:`Fraction` with Bland's rule,
    so it terminates on degenerate problems.

    Returns
    -------
    LPResult
        ``status`` is ``"optimal"``, ``"infeasible"`` or ``"unbounded"``.
    """
    c = [to_fraction(v) for v in c]
    A = [[to_fraction(v) for v in row] for row in A_eq]
    b = [to_fraction(v) for v in b_eq]
    m, n = len(A), len(c)
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    # tableau columns: n originals, m artificials, rhs
    T = [A[i] + [Fraction(int(i == k)) for k in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    width = n + m

    def pivot(r, col):
        pv = T[r][col]
        T[r] = [v / pv for v in T[r]]
        for i in range(m):
            if i != r and T[i][col] != 0:
                f = T[i][col]
                Ti, Tr = T[i], T[r]
                T[i] = [a - f * b_ for a, b_ in zip(Ti, Tr)]
        basis[r] = col

    def run(cost, allowed):
        for _ in range(max_iter):
            # reduced costs
            enter = None
            for j in range(width):
                if not allowed[j] or j in basis:
                    continue
                d = cost[j] - sum(cost[basis[i]] * T[i][j] for i in range(m))
                if d < 0:
                    enter = j
                    break
            if enter is None:
                return "optimal"
            best = None
            for i in range(m):
                if T[i][enter] > 0:
                    ratio = T[i][-1] / T[i][enter]
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return "unbounded"
            pivot(best[1], enter)
        raise RuntimeError("simplex iteration limit reached")

    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    run(phase1, [True] * width)
    if sum(T[i][-1] for i in range(m) if basis[i] >= n) > 0:
        return LPResult("infeasible")
    # drive remaining (zero level) artificials out of the basis
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if T[i][j] != 0 and j not in basis), None)
            if col is not None:
                pivot(i, col)
    allowed = [True] * n + [False] * m
    cost = c + [Fraction(0)] * m
    status = run(cost, allowed)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i][-1]
    return LPResult("optimal", x, sum(ci * xi for ci, xi in zip(c, x)))
