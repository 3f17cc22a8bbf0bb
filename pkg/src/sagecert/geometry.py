"""Exact Newton polytope geometry on exponent matrices.

Every decision here (extremality, affine independence, face membership,
kernels) is made in exact rational arithmetic, so there are no tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import ExponentMatrix
from .rational import linprog_exact, nullspace, rank, solve_linear, to_fraction

__all__ = [
    "NewtonReport",
    "FacePartition",
    "MixtureDecomposition",
    "extreme_indices",
    "is_simplicial",
    "barycentric",
    "in_hull",
    "minimal_face",
    "decompose_mixture",
    "verify_face_partition",
    "find_face_partition",
    "kernel_basis",
    "dilation_margin",
]


def _cols(A) -> list[tuple[Fraction, ...]]:
    if isinstance(A, ExponentMatrix):
        return list(A.columns)
    return [tuple(to_fraction(v) for v in col) for col in A]


@dataclass
class NewtonReport:
    """Extremality data of the columns of an exponent matrix."""

    extreme_indices: list[int]
    nonextreme_indices: list[int]
    is_simplicial_hull: bool
    contains_origin: bool

    def to_dict(self):
        return {
            "extreme_indices": self.extreme_indices,
            "nonextreme_indices": self.nonextreme_indices,
            "is_simplicial_hull": self.is_simplicial_hull,
            "contains_origin": self.contains_origin,
        }


@dataclass
class FacePartition:
    """Blocks of column indices whose hulls are disjoint exposed faces.

    ``witnesses[b]`` is ``(s, r)`` with ``s . a_i = r`` on block ``b`` and
    ``s . a_j < r`` off it, or ``None`` when the partition is trivial.
    """

    blocks: list[list[int]]
    witnesses: list = field(default_factory=list)

    def to_dict(self):
        return {
            "blocks": self.blocks,
            "witnesses": [
                None if w is None else {"s": [str(v) for v in w[0]], "r": str(w[1])}
                for w in self.witnesses
            ],
        }


@dataclass
class MixtureDecomposition:
    """``lam = sum_i theta_i lam_i`` with each ``lam_i`` of affinely independent support."""

    parts: list[tuple[list[Fraction], Fraction]]

    def check(self, B, lam) -> bool:
        cols = _cols(B)
        lam = [to_fraction(v) for v in lam]
        total = [Fraction(0)] * len(lam)
        if sum(th for _, th in self.parts) != 1:
            return False
        for li, th in self.parts:
            if th <= 0 or sum(li) != 1 or any(v < 0 for v in li):
                return False
            if not is_simplicial([cols[j] for j, v in enumerate(li) if v != 0]):
                return False
            total = [t + th * v for t, v in zip(total, li)]
        return total == lam


def in_hull(point, points) -> bool:
    """Exact test of ``point`` in the convex hull of ``points``."""
    point = [to_fraction(v) for v in point]
    pts = [list(p) for p in points]
    if not pts:
        return False
    n = len(point)
    A_eq = [[p[i] for p in pts] for i in range(n)] + [[1] * len(pts)]
    b_eq = point + [1]
    return linprog_exact([0] * len(pts), A_eq, b_eq).status == "optimal"


def extreme_indices(A) -> NewtonReport:
    """Classify the columns of ``A`` as extreme points of their convex hull.

    Column ``k`` is extreme iff it is not a convex combination of the other
    columns, decided by an exact feasibility LP.
    """
    cols = _cols(A)
    m = len(cols)
    ext, non = [], []
    for k in range(m):
        others = cols[:k] + cols[k + 1 :]
        if others and in_hull(cols[k], others):
            non.append(k)
        else:
            ext.append(k)
    n = len(cols[0])
    zero = tuple(Fraction(0) for _ in range(n))
    return NewtonReport(
        extreme_indices=ext,
        nonextreme_indices=non,
        is_simplicial_hull=is_simplicial([cols[k] for k in ext]),
        contains_origin=in_hull(zero, cols),
    )


def is_simplicial(points: Sequence) -> bool:
    """True iff the points are affinely independent."""
    pts = [[to_fraction(v) for v in p] for p in points]
    if not pts:
        return True
    lifted = [[Fraction(1)] + p for p in pts]
    return rank(lifted) == len(pts)


def barycentric(point, simplex: Sequence) -> list[Fraction]:
    """Exact affine weights of ``point`` with respect to an affinely independent set.

    Raises
    ------
    ValueError
        If the simplex is degenerate or the point is outside its affine hull.
    """
    pts = [[to_fraction(v) for v in p] for p in simplex]
    point = [to_fraction(v) for v in point]
    if not is_simplicial(pts):
        raise ValueError("simplex points are affinely dependent")
    M = [[Fraction(1)] * len(pts)] + [[p[i] for p in pts] for i in range(len(point))]
    sol = solve_linear(M, [Fraction(1)] + point)
    if sol is None:
        raise ValueError("point is not in the affine hull of the simplex")
    return sol


def _face_lp_support(point, cols):
    """Indices of columns lying on the minimal face of conv(cols) containing ``point``.

    Solves ``max sum s_j`` over ``lam >= 0, sum lam_j (a_j - point) = 0,
    0 <= s_j <= min(lam_j, 1)``; at the optimum ``s_j = 1`` exactly on the
    maximal support of a conic representation, which spans that face.
    Returns ``None`` when ``point`` is outside the hull.
    """
    m, n = len(cols), len(point)
    if not in_hull(point, cols):
        return None
    # variables: lam (m), s (m), t (m: lam - s), q (m: 1 - s)
    nv = 4 * m
    A_eq, b_eq = [], []
    for i in range(n):
        row = [Fraction(0)] * nv
        for j in range(m):
            row[j] = cols[j][i] - point[i]
        A_eq.append(row)
        b_eq.append(0)
    for j in range(m):
        row = [Fraction(0)] * nv
        row[j], row[m + j], row[2 * m + j] = 1, -1, -1
        A_eq.append(row)
        b_eq.append(0)
        row = [Fraction(0)] * nv
        row[m + j], row[3 * m + j] = 1, 1
        A_eq.append(row)
        b_eq.append(1)
    cost = [0] * m + [-1] * m + [0] * (2 * m)
    res = linprog_exact(cost, A_eq, b_eq)
    return [j for j in range(m) if res.x[m + j] == 1]


def minimal_face(A, point) -> list[int] | None:
    """Column indices on the smallest face of Newt(A) containing ``point``."""
    cols = _cols(A)
    return _face_lp_support([to_fraction(v) for v in point], cols)


def decompose_mixture(B, h, lam) -> MixtureDecomposition:
    """Split a probability vector into mixtures with affinely independent supports.

    Parameters
    ----------
    B : sequence of d columns (each an n-vector)
    h : n-vector with ``sum_j lam_j B_j = h``
    lam : probability vector of length d

    Notes
    -----
    Repeatedly extracts a Caratheodory reduction ``lam1`` of the current
    vector (removing the highest-index dependent column first), stretches
    ``lam1 + t (lam - lam1)`` to the largest nonnegative ``t = T`` and
    recurses on the stretched vector with weight ``1/T``.
    """
    cols = _cols(B)
    h = [to_fraction(v) for v in h]
    lam = [to_fraction(v) for v in lam]
    if len(lam) != len(cols):
        raise ValueError("weight vector length differs from the column count")
    if any(v < 0 for v in lam) or sum(lam) != 1:
        raise ValueError("weights must form a probability vector")
    n = len(h)
    if any(sum(l * c[i] for l, c in zip(lam, cols)) != h[i] for i in range(n)):
        raise ValueError("weights do not reproduce the target point")

    parts = []
    weight = Fraction(1)
    cur = lam
    while True:
        red = _caratheodory(cols, cur)
        if red == cur:
            parts.append((cur, weight))
            break
        d = [a - b for a, b in zip(cur, red)]
        T = min(red[j] / -d[j] for j in range(len(d)) if d[j] < 0)
        stretched = [r + T * dj for r, dj in zip(red, d)]
        # tiny exact cleanup is unnecessary: arithmetic is exact
        parts.append((red, weight * (1 - 1 / T)))
        weight = weight / T
        cur = stretched
    return MixtureDecomposition(parts)


def _caratheodory(cols, lam):
    cur = list(lam)
    while True:
        supp = [j for j, v in enumerate(cur) if v != 0]
        lifted = [[Fraction(1)] + list(cols[j]) for j in supp]
        # kernel of the lifted support columns
        M = [[lifted[k][i] for k in range(len(supp))] for i in range(len(lifted[0]))]
        ker = nullspace(M, len(supp))
        if not ker:
            return cur
        # the last basis vector has its free entry at the highest dependent index
        delta = ker[-1]
        if max(delta) <= 0:
            delta = [-v for v in delta]
        ratios = [(cur[supp[k]] / delta[k], supp[k]) for k in range(len(supp)) if delta[k] > 0]
        t = min(r for r, _ in ratios)
        for k, j in enumerate(supp):
            cur[j] = cur[j] - t * delta[k]
        # force exact zero on the highest tied index (already exact)
        assert all(v >= 0 for v in cur)


def _face_witness(cols, block):
    """Exact LP for a hyperplane exposing exactly ``block``; ``None`` if impossible."""
    m, n = len(cols), len(cols[0])
    inside = set(block)
    # variables: s+ (n), s- (n), r+, r-, delta+, delta-, slack_j (off block), norm slack, cap slack
    off = [j for j in range(m) if j not in inside]
    nv = 2 * n + 4 + len(off) + 2
    iS, iR, iD = 0, 2 * n, 2 * n + 2
    iSl = 2 * n + 4
    iNorm = iSl + len(off)
    iCap = iNorm + 1
    A_eq, b_eq = [], []
    for i in block:
        row = [Fraction(0)] * nv
        for k in range(n):
            row[iS + k] = cols[i][k]
            row[iS + n + k] = -cols[i][k]
        row[iR], row[iR + 1] = -1, 1
        A_eq.append(row)
        b_eq.append(0)
    for t, j in enumerate(off):
        row = [Fraction(0)] * nv
        for k in range(n):
            row[iS + k] = cols[j][k]
            row[iS + n + k] = -cols[j][k]
        row[iR], row[iR + 1] = -1, 1
        row[iD], row[iD + 1] = 1, -1
        row[iSl + t] = 1
        A_eq.append(row)
        b_eq.append(0)
    row = [Fraction(0)] * nv
    for k in range(2 * n):
        row[iS + k] = 1
    row[iNorm] = 1
    A_eq.append(row)
    b_eq.append(1)
    row = [Fraction(0)] * nv
    row[iD], row[iD + 1], row[iCap] = 1, -1, 1
    A_eq.append(row)
    b_eq.append(1)
    cost = [Fraction(0)] * nv
    cost[iD], cost[iD + 1] = -1, 1
    res = linprog_exact(cost, A_eq, b_eq)
    if res.status != "optimal":
        return None
    delta = res.x[iD] - res.x[iD + 1]
    if delta <= 0:
        return None
    s = [res.x[iS + k] - res.x[iS + n + k] for k in range(n)]
    r = res.x[iR] - res.x[iR + 1]
    return s, r


def _check_witness(cols, block, s, r) -> bool:
    inside = set(block)
    for j, col in enumerate(cols):
        val = sum(a * b for a, b in zip(s, col))
        if (j in inside and val != r) or (j not in inside and not val < r):
            return False
    return True


def verify_face_partition(A, blocks) -> FacePartition | None:
    """Certify that ``blocks`` partition the columns into disjoint exposed faces.

    Returns the partition with exact witnesses, or ``None`` if some block is
    not exactly the set of columns on an exposed face.

    Raises
    ------
    ValueError
        If ``blocks`` is not a partition of the column indices.
    """
    cols = _cols(A)
    m = len(cols)
    flat = sorted(j for blk in blocks for j in blk)
    if flat != list(range(m)) or any(len(blk) == 0 for blk in blocks):
        raise ValueError("blocks must partition the column indices")
    blocks = [sorted(int(j) for j in blk) for blk in blocks]
    if len(blocks) == 1:
        return FacePartition(blocks, [None])
    witnesses = []
    for blk in blocks:
        w = _face_witness(cols, blk)
        if w is None or not _check_witness(cols, blk, *w):
            return None
        witnesses.append(w)
    return FacePartition(blocks, witnesses)


def find_face_partition(A) -> FacePartition:
    """Finest partition of the columns into disjoint exposed faces of Newt(A).

    Starts from singletons and closes each group under "all columns on the
    smallest face containing the group's centroid" until stable; the result
    is then certified with :func:`verify_face_partition`.
    """
    cols = _cols(A)
    m = len(cols)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    changed = True
    while changed:
        changed = False
        groups: dict[int, list[int]] = {}
        for j in range(m):
            groups.setdefault(find(j), []).append(j)
        for members in groups.values():
            centroid = [sum(cols[j][i] for j in members) / len(members) for i in range(len(cols[0]))]
            face = _face_lp_support(centroid, cols)
            root = find(members[0])
            for j in face:
                rj = find(j)
                if rj != root:
                    parent[rj] = root
                    changed = True
    groups = {}
    for j in range(m):
        groups.setdefault(find(j), []).append(j)
    blocks = sorted(groups.values())
    part = verify_face_partition(cols, blocks)
    if part is None:
        return FacePartition([list(range(m))], [None])
    return part


def kernel_basis(A, i: int) -> list[list[Fraction]]:
    """Exact basis of ``{nu : sum_{j != i} nu_j (a_j - a_i) = 0}``.

    Returns a list of basis vectors indexed by the columns other than ``i``
    (in their original order); the list is empty for a trivial kernel.
    """
    cols = _cols(A)
    m = len(cols)
    if not 0 <= i < m:
        raise IndexError("column index out of range")
    ai = cols[i]
    others = [cols[j] for j in range(m) if j != i]
    if not others:
        return []
    M = [[c[k] - ai[k] for c in others] for k in range(len(ai))]
    return nullspace(M, len(others))


def dilation_margin(A, j: int) -> Fraction:
    """Largest ``eps`` in ``[0, 1]`` with ``(1 + eps) a_j`` in Newt(A).

    Returns ``-1`` if ``a_j`` itself is outside (cannot happen for a column).
    """
    cols = _cols(A)
    m, n = len(cols), len(cols[0])
    aj = cols[j]
    # variables: lam (m), eps, cap slack
    A_eq = []
    b_eq = []
    for k in range(n):
        A_eq.append([cols[t][k] for t in range(m)] + [-aj[k], 0])
        b_eq.append(aj[k])
    A_eq.append([1] * m + [0, 0])
    b_eq.append(1)
    A_eq.append([0] * m + [1, 1])
    b_eq.append(1)
    res = linprog_exact([0] * m + [-1, 0], A_eq, b_eq)
    if res.status != "optimal":
        return Fraction(-1)
    return res.x[m]
