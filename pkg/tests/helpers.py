"""Random instance generators shared by the module and acceptance tests."""

from fractions import Fraction
from itertools import combinations

import numpy as np

from sagecert.algebra import make_signomial
from sagecert.geometry import barycentric, is_simplicial
from sagecert.rational import rank
from sagecert.sage import E, AgeCertificate, relative_entropy
from sagecert.solver import Model

SQUARE_EDGES = [(0, 0), (2, 0), (1, 0), (0, 2), (2, 2), (1, 2)]
BOTTOM, TOP = [0, 1, 2], [3, 4, 5]


def simplicial_instance(rng: np.random.Generator, n: int, m: int):
    """Signomial with simplicial hull (zero is a vertex) and negative interior terms.

    The ``m - n - 1`` interior exponents are random strict convex
    combinations of the vertices, so the function is bounded below.
    """
    while True:
        V = rng.integers(-3, 4, size=(n, n))
        if rank(V.tolist()) == n:
            break
    verts = [tuple(Fraction(0) for _ in range(n))] + [tuple(Fraction(int(v)) for v in row) for row in V]
    assert is_simplicial(verts)
    cols = list(verts)
    while len(cols) < m:
        w = rng.integers(1, 5, size=n + 1)
        lam = [Fraction(int(x), int(w.sum())) for x in w]
        pt = tuple(sum(l * v[i] for l, v in zip(lam, verts)) for i in range(n))
        if pt not in cols:
            cols.append(pt)
    coeffs = np.concatenate([
        [rng.uniform(-1.0, 2.0)],
        rng.uniform(0.5, 3.0, size=n),
        -rng.uniform(0.1, 2.0, size=m - n - 1),
    ])
    return make_signomial(cols, coeffs)


def _containing_simplices(cols, k):
    """Affinely independent subsets of the other columns with ``cols[k]`` in their relative interior."""
    n = len(cols[0])
    others = [j for j in range(len(cols)) if j != k]
    out = []
    for size in range(2, n + 2):
        for sub in combinations(others, size):
            pts = [cols[j] for j in sub]
            if not is_simplicial(pts):
                continue
            try:
                lam = barycentric(cols[k], pts)
            except ValueError:
                continue
            if all(v > 0 for v in lam):
                out.append((sub, lam))
    return out


def random_age_vector(rng, cols, k, positive_idx, slack=0.0):
    """AGE vector for index ``k`` whose entropy witness mixes random circuits.

    ``slack >= 0`` raises the entry at ``k`` above the entropy bound.
    Returns ``None`` when ``cols[k]`` is a vertex.
    """
    m = len(cols)
    simplices = _containing_simplices(cols, k)
    if not simplices:
        return None
    count = min(len(simplices), int(rng.integers(1, 4)))
    nu_full = np.zeros(m)
    for t in rng.choice(len(simplices), size=count, replace=False):
        sub, lam = simplices[t]
        w = rng.uniform(0.2, 1.5)
        for j, l in zip(sub, lam):
            nu_full[j] += w * float(l)
    cvec = np.zeros(m)
    for j in range(m):
        if j != k and (nu_full[j] > 0 or j in positive_idx):
            cvec[j] = rng.uniform(0.3, 2.0)
    nu = np.delete(nu_full, k)
    cvec[k] = relative_entropy(nu, E * np.delete(cvec, k)) + slack
    if cvec[k] >= 0:
        return None
    return AgeCertificate(k, nu, cvec)


def age_sum(rng, cols, interior):
    """Sum of random AGE vectors on ``cols`` indexed by a subset of ``interior``.

    Each part may put positive mass on the other chosen indices, so the
    input decomposition generally has cancellation.  Returns
    ``(c, parts, N)`` with ``c_i < 0`` exactly on the chosen indices ``N``.
    """
    while True:
        size = int(rng.integers(2, min(4, len(interior)) + 1))
        N = sorted(rng.choice(interior, size=size, replace=False).tolist())
        parts = []
        for k in N:
            extra = [j for j in N if j != k and rng.random() < 0.5]
            p = random_age_vector(rng, cols, k, set(extra), slack=rng.uniform(0, 0.2))
            if p is None:
                break
            parts.append(p)
        else:
            c = sum(p.cvec for p in parts)
            if np.all(c[N] < 0):
                return c, parts, N


LINE = [(Fraction(j),) for j in range(6)]
LINE_INTERIOR = [1, 2, 3, 4]
GRID = [(Fraction(i), Fraction(j)) for i in range(3) for j in range(3)]
GRID_INTERIOR = [1, 3, 4, 5, 7]  # non-corner points of the 3x3 grid


def exp_unit_program():
    """``min w`` subject to ``(1, 1, w)`` in the exponential cone; optimum ``e``."""
    m = Model()
    blk = m.add_exp(1)[0]
    rows = m.add_rows(2)
    m.add_terms(rows, blk[:2], 1.0)
    m.set_rhs(rows[0], 1.0)
    m.set_rhs(rows[1], 1.0)
    m.add_objective(blk[2], 1.0)
    return m.compile(), blk


def lp_unit_program():
    """``min x`` subject to ``x >= 1``; optimum 1."""
    m = Model()
    x, s = m.add_free(1)[0], m.add_nonneg(1)[0]
    r = m.add_rows(1)[0]
    m.add_terms(r, [x, s], [1.0, -1.0])
    m.set_rhs(r, 1.0)
    m.add_objective(x, 1.0)
    return m.compile(), x


def entropy_unit_program():
    """``min t`` subject to ``1 log(1/1) <= t``; optimum 0."""
    m = Model()
    t = m.add_free(1)[0]
    blk = m.add_exp(1)[0]
    rows = m.add_rows(3)
    m.add_terms(rows[0], [blk[0], t], [1.0, 1.0])
    m.add_terms(rows[1], blk[1], 1.0)
    m.add_terms(rows[2], blk[2], 1.0)
    m.set_rhs(rows[1], 1.0)
    m.set_rhs(rows[2], 1.0)
    m.add_objective(t, 1.0)
    return m.compile(), t
