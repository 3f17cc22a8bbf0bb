from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.spatial import ConvexHull, QhullError

from sagecert.geometry import (
    barycentric,
    decompose_mixture,
    extreme_indices,
    find_face_partition,
    in_hull,
    is_simplicial,
    kernel_basis,
    verify_face_partition,
)
from sagecert.instances import case, motzkin

F = Fraction
SQUARE_EDGES = [(0, 0), (2, 0), (1, 0), (0, 2), (2, 2), (1, 2)]


def test_extreme_indices_line():
    rep = extreme_indices([[0], [2], [1]])
    assert rep.extreme_indices == [0, 1] and rep.nonextreme_indices == [2]
    assert rep.is_simplicial_hull and rep.contains_origin


def test_extreme_indices_square_example():
    f = case("ex6.1")
    rep = extreme_indices(f.exponents)
    ext = {f.exponents.columns[i] for i in rep.extreme_indices}
    non = {f.exponents.columns[i] for i in rep.nonextreme_indices}
    assert ext == {(0, 0), (2, 0), (0, 2), (2, 2)}
    assert non == {(1, 0), (0, 1)}
    assert not rep.is_simplicial_hull


def test_single_column():
    rep = extreme_indices([[3, 1]])
    assert rep.extreme_indices == [0] and rep.is_simplicial_hull
    assert not rep.contains_origin


def test_is_simplicial_examples():
    assert is_simplicial([(0, 0), (2, 0), (0, 2)])
    assert not is_simplicial([(0, 0), (2, 0), (0, 2), (2, 2)])
    assert is_simplicial([(0, 0), (1, 0), (0, 1)])


def test_barycentric_examples():
    assert barycentric((2, 2, 2), [(2, 4, 0), (4, 2, 0), (0, 0, 6)]) == [F(1, 3)] * 3
    assert barycentric((4, 2, 0), [(2, 4, 0), (4, 2, 0), (0, 0, 6)]) == [0, 1, 0]
    assert barycentric((1,), [(0,), (2,)]) == [F(1, 2), F(1, 2)]
    assert barycentric((3,), [(0,), (2,)]) == [F(-1, 2), F(3, 2)]
    with pytest.raises(ValueError):
        barycentric((1, 1), [(0, 0), (2, 0)])


def test_in_hull():
    assert in_hull((1, 1), [(0, 0), (2, 0), (0, 2), (2, 2)])
    assert not in_hull((3, 1), [(0, 0), (2, 0), (0, 2), (2, 2)])


def test_decompose_mixture_line():
    lam = [F(1, 4), F(1, 2), F(1, 4)]
    B = [(0,), (1,), (2,)]
    dec = decompose_mixture(B, [1], lam)
    assert dec.check(B, lam)
    assert len(dec.parts) == 2
    assert sorted(th for _, th in dec.parts) == [F(1, 2), F(1, 2)]


def test_decompose_mixture_simplicial_support_single_part():
    lam = [F(1, 3), F(2, 3), 0]
    dec = decompose_mixture([(0,), (3,), (5,)], [2], lam)
    assert dec.parts == [(lam, 1)] or (len(dec.parts) == 1 and dec.parts[0][1] == 1)
    B = [(2, 4, 0), (4, 2, 0), (0, 0, 6)]
    dec = decompose_mixture(B, [2, 2, 2], [F(1, 3)] * 3)
    assert len(dec.parts) == 1


def test_decompose_mixture_rejects_bad_input():
    with pytest.raises(ValueError):
        decompose_mixture([(0,), (1,), (2,)], [1], [F(1, 2), F(1, 2), 0])  # B lam != h
    with pytest.raises(ValueError):
        decompose_mixture([(0,), (1,), (2,)], [1], [F(1, 2), F(1, 2), F(1, 2)])


def test_face_partition_square_edges():
    part = verify_face_partition(SQUARE_EDGES, [[0, 1, 2], [3, 4, 5]])
    assert part is not None
    for blk, (s, r) in zip(part.blocks, part.witnesses):
        on = [sum(si * ai for si, ai in zip(s, SQUARE_EDGES[j])) for j in range(6)]
        assert all(on[j] == r for j in blk)
        assert all(on[j] < r for j in range(6) if j not in blk)
        # the witness is a multiple of (0, -1) or (0, 1)
        assert s[0] == 0 and s[1] != 0
    found = find_face_partition(SQUARE_EDGES)
    assert sorted(found.blocks) == [[0, 1, 2], [3, 4, 5]]


def test_face_partition_trivial_and_rejections():
    assert verify_face_partition(SQUARE_EDGES, [list(range(6))]).witnesses == [None]
    square = [(0, 0), (2, 2), (2, 0), (0, 2)]
    assert verify_face_partition(square, [[0, 1], [2, 3]]) is None
    with pytest.raises(ValueError):
        verify_face_partition(square, [[0, 1], [1, 2, 3]])
    assert find_face_partition([[0], [2], [1]]).blocks == [[0, 1, 2]]
    simplex = [(0, 0), (3, 0), (0, 3), (1, 1)]
    assert len(find_face_partition(simplex).blocks) == 1


def test_kernel_basis_examples():
    assert kernel_basis([[0], [2], [1]], 2) == [[F(1), F(1)]] or _spans(
        kernel_basis([[0], [2], [1]], 2), [1, 1]
    )
    assert kernel_basis([(0, 0), (1, 0), (0, 1)], 0) == []
    p = motzkin()
    i = p.exponents.index((2, 2, 2))
    basis = kernel_basis(p.exponents, i)
    assert len(basis) == 1 and basis[0][0] == basis[0][1] == basis[0][2] != 0


def _spans(basis, v):
    return len(basis) == 1 and basis[0][0] * v[1] == basis[0][1] * v[0]


# ---------------------------------------------------------------------------
# properties

points2d = st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=3, max_size=8, unique=True)


@given(points2d)
def test_extreme_indices_match_qhull(pts):
    P = np.array(pts, dtype=float)
    try:
        hull = ConvexHull(P)
    except QhullError:
        assume(False)
    rep = extreme_indices(pts)
    assert sorted(rep.extreme_indices) == sorted(hull.vertices.tolist())


@given(
    points2d,
    st.lists(st.integers(-3, 3), min_size=4, max_size=4),
    st.tuples(st.fractions(-2, 2, max_denominator=3), st.fractions(-2, 2, max_denominator=3)),
)
def test_extreme_indices_affine_invariant(pts, entries, shift):
    M = [[F(entries[0]), F(entries[1])], [F(entries[2]), F(entries[3])]]
    assume(M[0][0] * M[1][1] - M[0][1] * M[1][0] != 0)
    moved = [
        tuple(M[r][0] * p[0] + M[r][1] * p[1] + shift[r] for r in range(2)) for p in pts
    ]
    a, b = extreme_indices(pts), extreme_indices(moved)
    assert a.extreme_indices == b.extreme_indices
    assert a.is_simplicial_hull == b.is_simplicial_hull


@given(
    st.lists(st.integers(-5, 5), min_size=3, max_size=6, unique=True),
    st.lists(st.integers(1, 6), min_size=6, max_size=6),
)
def test_decompose_mixture_passes_checker(xs, weights):
    B = [(x,) for x in xs]
    w = [F(v) for v in weights[: len(xs)]]
    lam = [v / sum(w) for v in w]
    h = [sum(l * x for l, x in zip(lam, xs))]
    dec = decompose_mixture(B, h, lam)
    assert dec.check(B, lam)


@given(points2d)
def test_kernel_basis_exact(pts):
    for i in range(len(pts)):
        for v in kernel_basis(pts, i):
            others = [pts[j] for j in range(len(pts)) if j != i]
            for k in range(2):
                assert sum(vj * (o[k] - pts[i][k]) for vj, o in zip(v, others)) == 0


@given(points2d)
def test_found_partitions_verify_exactly(pts):
    part = find_face_partition(pts)
    assert sorted(j for blk in part.blocks for j in blk) == list(range(len(pts)))
    if len(part.blocks) > 1:
        for blk, (s, r) in zip(part.blocks, part.witnesses):
            vals = [s[0] * p[0] + s[1] * p[1] for p in pts]
            assert all(vals[j] == r for j in blk)
            assert all(vals[j] < r for j in range(len(pts)) if j not in blk)
