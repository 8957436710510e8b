from itertools import combinations, permutations

import numpy as np
import pytest

from simplectra.complexes import (
    PureComplex,
    adjacency_matrix,
    boundary,
    classify_bracelet,
    colex_rank,
    colex_sorted,
    d_forest_extract,
    degree_matrix,
    is_d_tree,
    is_strongly_connected,
    sign_adjacent,
    sign_face,
    strong_components,
    up_laplacian,
)
from simplectra.errors import ValidationError
from simplectra.lm_model import complete_spectrum_reference


@pytest.mark.parametrize(
    "tau, sigma, expected",
    [((1, 2, 3), (2, 3), 1), ((1, 2, 3), (1, 3), -1), ((1, 2, 3, 4), (1, 2, 3), -1)],
)
def test_sign_face(tau, sigma, expected):
    assert sign_face(tau, sigma) == expected


def test_sign_face_rejects_non_faces():
    with pytest.raises(ValidationError):
        sign_face((1, 2, 3), (1, 4))
    with pytest.raises(ValidationError):
        sign_face((1, 2, 3), (1,))


@pytest.mark.parametrize(
    "sigma, sigma2, expected",
    [((1,), (2,), 1), ((1, 2), (1, 3), 1), ((1, 2), (2, 3), -1)],
)
def test_sign_adjacent(sigma, sigma2, expected):
    assert sign_adjacent(sigma, sigma2) == expected
    assert sign_adjacent(sigma2, sigma) == expected


def test_sign_adjacent_rejects_far_simplices():
    with pytest.raises(ValidationError):
        sign_adjacent((1, 2), (3, 4))


def test_sign_identity_through_intersection():
    # -sgn(s u s', s) sgn(s u s', s') = sgn(s, s n s') sgn(s', s n s')
    for d in range(1, 5):
        for union in combinations(range(1, 9), d + 1):
            for sigma, sigma2 in combinations(boundary(union), 2):
                meet = tuple(sorted(set(sigma) & set(sigma2)))
                assert sign_adjacent(sigma, sigma2) == sign_face(sigma, meet) * sign_face(sigma2, meet)


def test_colex_rank_matches_sorted_position():
    simplices = colex_sorted(combinations(range(1, 8), 3))
    assert [colex_rank(s) for s in simplices] == list(range(len(simplices)))


def test_adjacency_of_triangle_graph():
    X = PureComplex([(1, 2), (1, 3), (2, 3)])
    A = adjacency_matrix(X, 0).matrix
    assert np.array_equal(A, np.ones((3, 3)) - np.eye(3))


def test_adjacency_of_single_triangle():
    X = PureComplex([(1, 2, 3)])
    M = adjacency_matrix(X, 1)
    assert M.index == [(1, 2), (1, 3), (2, 3)]
    pos = M.position()
    for a, b in combinations(M.index, 2):
        assert M.matrix[pos[a], pos[b]] == sign_adjacent(a, b)
    assert np.all(np.diag(M.matrix) == 0)


@pytest.mark.parametrize("n, d", [(3, 1), (5, 2), (8, 1), (8, 2), (8, 3), (10, 2), (7, 3)])
def test_complete_complex_spectrum(n, d):
    A = adjacency_matrix(PureComplex.complete(n, d), d - 1).matrix.astype(float)
    eigs = np.sort(np.linalg.eigvalsh(A))
    reference = complete_spectrum_reference(n, d)
    expected = np.sort(np.concatenate([np.full(m, float(v)) for v, m in reference.items()]))
    assert np.allclose(eigs, expected, atol=1e-8)


def test_adjacency_structure_on_random_complex():
    rng = np.random.default_rng(5)
    facets = [tau for tau in combinations(range(1, 8), 3) if rng.random() < 0.4]
    X = PureComplex(facets, d=2, n=7)
    M = adjacency_matrix(X, 1)
    A = M.matrix
    assert np.array_equal(A, A.T)
    assert np.all(np.diag(A) == 0)
    pos = M.position()
    for a, b in combinations(M.index, 2):
        spans = tuple(sorted(set(a) | set(b)))
        assert (A[pos[a], pos[b]] != 0) == (len(spans) == 3 and spans in X.facets)


def test_up_laplacian():
    edge = PureComplex([(1, 2)])
    assert np.array_equal(up_laplacian(edge, 0).matrix, [[1, -1], [-1, 1]])
    triangle = PureComplex([(1, 2), (1, 3), (2, 3)])
    assert np.array_equal(up_laplacian(triangle, 0).matrix, 3 * np.eye(3) - np.ones((3, 3)))
    X = PureComplex([(1, 2, 3), (2, 3, 4), (1, 4, 5)])
    total = up_laplacian(X, 1).matrix + adjacency_matrix(X, 1).matrix
    assert np.array_equal(total, degree_matrix(X, 1).matrix)


def test_matrix_dimension_checks():
    X = PureComplex([(1, 2, 3)])
    for k in (-1, 2):
        with pytest.raises(ValidationError):
            adjacency_matrix(X, k)
        with pytest.raises(ValidationError):
            up_laplacian(X, k)


def test_strong_components():
    assert len(strong_components(PureComplex([(1, 2, 3)]))) == 1
    assert len(strong_components(PureComplex([(1, 2, 3), (4, 5, 6)]))) == 2
    assert len(strong_components(PureComplex([(1, 2, 3), (3, 4, 5)]))) == 2
    parts = strong_components(PureComplex([(1, 2, 3), (2, 3, 4), (5, 6, 7)]))
    assert [p.facets for p in parts] == [frozenset([(1, 2, 3), (2, 3, 4)]), frozenset([(5, 6, 7)])]


def test_is_d_tree():
    assert is_d_tree(PureComplex([(1, 2, 3, 4)]))
    assert not is_d_tree(PureComplex([(1, 2), (2, 3), (1, 3)]))
    assert is_d_tree(PureComplex([(1, 2, 3), (1, 2, 4)]))
    assert not is_d_tree(PureComplex([(1, 2, 3), (4, 5, 6)]))


def test_face_vertex_bound_on_random_complexes():
    rng = np.random.default_rng(11)
    for _ in range(500):
        d = int(rng.integers(1, 4))
        size = int(rng.integers(d + 1, 13))
        pool = list(combinations(range(1, size + 1), d + 1))
        count = int(rng.integers(1, min(len(pool), 8) + 1))
        picks = rng.choice(len(pool), size=count, replace=False)
        X = PureComplex([pool[i] for i in picks], d=d)
        parts = strong_components(X)
        assert X.f0 <= X.fd + d * len(parts)
        vertex_disjoint = all(
            not (a.vertices & b.vertices) for a, b in combinations(parts, 2)
        )
        every_tree = all(is_d_tree(c) for c in parts)
        assert (X.f0 == X.fd + d * len(parts)) == (vertex_disjoint and every_tree)


def test_d_forest_extract():
    tree = PureComplex([(1, 2, 3), (1, 2, 4), (2, 4, 5)])
    assert d_forest_extract(tree) == tree
    cycle = PureComplex([(1, 2), (2, 3), (3, 4), (1, 4)])
    path = d_forest_extract(cycle)
    assert path.fd == 3 and path.vertices == cycle.vertices
    bracelet = PureComplex([(1, 2, 3), (1, 3, 4), (1, 2, 4)])
    forest = d_forest_extract(bracelet)
    assert forest.fd == forest.f0 - 2
    assert forest.facets <= bracelet.facets
    with pytest.raises(ValidationError):
        d_forest_extract(PureComplex([(1, 2, 3), (4, 5, 6)]))


def test_bracelet_triangle_graph():
    report = classify_bracelet(PureComplex([(1, 2), (2, 3), (1, 3)]))
    assert report.rho == ()
    assert len(report.rim) == 3
    assert report.pendants == []
    assert report.regular


def test_bracelet_rejects_trees():
    assert classify_bracelet(PureComplex([(1, 2, 3), (1, 2, 4)])) is None
    assert classify_bracelet(PureComplex([(1, 2), (2, 3)])) is None


def test_bracelet_of_length_six_with_pendants():
    rim = [2, 3, 4, 5, 6, 7]
    facets = [(1, rim[i], rim[(i + 1) % 6]) for i in range(6)]
    facets += [(1, 3, 8), (3, 8, 9), (1, 7, 10)]
    report = classify_bracelet(PureComplex(facets))
    assert report is not None and report.regular
    assert report.rho == (1,)
    assert report.rim == (2, 3, 4, 5, 6, 7)
    assert sorted(report.attachments) == [(1, 3), (1, 7)]


def test_bracelet_with_irregular_pendant():
    X = PureComplex([(1, 2, 3), (1, 3, 4), (1, 2, 4), (2, 3, 5)])
    report = classify_bracelet(X)
    assert report is not None
    assert not report.regular
    assert report.attachments == [(2, 3)]


def test_spectrum_is_invariant_under_relabeling():
    facets = [(1, 2, 3), (1, 3, 4), (2, 4, 5), (1, 5, 6), (3, 4, 6)]
    base = np.linalg.eigvalsh(adjacency_matrix(PureComplex(facets, n=6), 1).matrix.astype(float))
    for perm in list(permutations(range(1, 7)))[::97]:
        relabeled = [tuple(perm[v - 1] for v in tau) for tau in facets]
        eigs = np.linalg.eigvalsh(adjacency_matrix(PureComplex(relabeled, n=6), 1).matrix.astype(float))
        assert np.allclose(np.sort(eigs), np.sort(base), atol=1e-9)


def test_pure_complex_validation():
    with pytest.raises(ValidationError):
        PureComplex([(1, 2, 3), (1, 2)])
    with pytest.raises(ValidationError):
        PureComplex([(1, 1, 2)])
    with pytest.raises(ValidationError):
        PureComplex([(1, 2, 9)], n=5)
    assert PureComplex([], d=2, n=4).f(1) == 6
    assert is_strongly_connected(PureComplex([(1, 2, 3), (2, 3, 4)]))
