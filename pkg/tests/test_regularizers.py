import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from regfact.matrix_core import sym_eigen
from regfact.regularizers import (RegularizerError, RegularizerSpec, build_graph_laplacian,
                                  build_second_difference, path_adjacency, realize, regularizer)


def test_second_difference_n3():
    np.testing.assert_array_equal(build_second_difference(3), [[-1, 1, 0], [1, -2, 1], [0, 1, -1]])


def test_second_difference_n4():
    expected = [[-1, 1, 0, 0], [1, -2, 1, 0], [0, 1, -2, 1], [0, 0, 1, -1]]
    np.testing.assert_array_equal(build_second_difference(4), expected)


def test_second_difference_kills_constants():
    np.testing.assert_array_equal(build_second_difference(5) @ np.ones(5), np.zeros(5))


def test_second_difference_too_small():
    with pytest.raises(RegularizerError):
        build_second_difference(2)


def test_laplacian_single_edge():
    np.testing.assert_array_equal(build_graph_laplacian([[0, 1], [1, 0]]), [[1, -1], [-1, 1]])


def test_laplacian_empty_graph():
    np.testing.assert_array_equal(build_graph_laplacian(np.zeros((3, 3))), np.zeros((3, 3)))


def test_laplacian_path_graph():
    L = build_graph_laplacian(path_adjacency(4))
    np.testing.assert_array_equal(L.sum(axis=1), np.zeros(4))
    assert abs(sym_eigen(L).values[0]) <= 1e-10


@pytest.mark.parametrize("W, match", [
    ([[0, 1], [0, 0]], "symmetric"),
    ([[0, -1], [-1, 0]], "negative"),
    ([[1, 0], [0, 0]], "diagonal"),
])
def test_laplacian_rejects_bad_adjacency(W, match):
    with pytest.raises(RegularizerError, match=match):
        build_graph_laplacian(np.array(W, dtype=float))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_random_graph_laplacian_is_psd(n, seed):
    g = np.random.default_rng(seed)
    W = np.triu(g.uniform(0, 2, (n, n)) * (g.random((n, n)) < 0.5), 1)
    L = realize(RegularizerSpec("graph_laplacian", n, adjacency=W + W.T)).L
    assert np.abs(L - L.T).max() <= 1e-12
    assert sym_eigen(L).values[0] >= -1e-8 * max(np.linalg.norm(L), 1.0)


def test_realize_identity_and_none():
    np.testing.assert_array_equal(realize(RegularizerSpec("identity", 3)).L, np.eye(3))
    np.testing.assert_array_equal(realize(RegularizerSpec("none", 5)).L, np.zeros((5, 5)))


def test_realize_second_difference_matches_explicit_product():
    D = build_second_difference(4)
    expected = np.zeros((4, 4))
    for i in range(4):
        for j in range(4):
            expected[i, j] = sum(D[r, i] * D[r, j] for r in range(4))
    np.testing.assert_array_equal(realize(RegularizerSpec("second_difference", 4)).L, expected)


def test_second_difference_gram_annihilates_constants():
    L = regularizer("second_difference", 9).L
    assert np.abs(L @ np.ones(9)).max() <= 1e-12


def test_penalty_trace_identity(rng):
    n = 7
    D = build_second_difference(n)
    L = regularizer("second_difference", n).L
    P = rng.standard_normal((n, 3))
    lhs = np.sum((D @ P) ** 2)
    assert abs(lhs - np.trace(P.T @ L @ P)) <= 1e-10 * lhs


def test_realize_custom(rng):
    G = rng.standard_normal((3, 4))
    L = realize(RegularizerSpec("custom", 4, custom_L=G.T @ G)).L
    np.testing.assert_allclose(L, G.T @ G)
    with pytest.raises(RegularizerError, match="semi-definite"):
        realize(RegularizerSpec("custom", 2, custom_L=np.diag([1.0, -1.0])))


@pytest.mark.parametrize("spec", [
    RegularizerSpec("graph_laplacian", 3),
    RegularizerSpec("custom", 3),
])
def test_realize_missing_payload(spec):
    with pytest.raises(RegularizerError, match="needs"):
        realize(spec)


def test_spec_validation():
    with pytest.raises(RegularizerError, match="unknown"):
        RegularizerSpec("tv", 3)
    with pytest.raises(RegularizerError, match="size"):
        realize(RegularizerSpec("graph_laplacian", 3, adjacency=path_adjacency(4)))
