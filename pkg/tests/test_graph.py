import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from mcgc.graph import FilterParams, build_neighbors, graph_filter, normalize
from mcgc.model import View

from conftest import random_graph


def _view(adj, dim=1):
    adj = sp.csr_matrix(np.asarray(adj, dtype=float))
    return View(adj, np.zeros((adj.shape[0], dim)))


def test_normalize_two_nodes():
    nv = normalize(_view([[0, 1], [1, 0]]))
    np.testing.assert_array_equal(nv.norm_adjacency.toarray(), [[0.5, 0.5], [0.5, 0.5]])
    np.testing.assert_array_equal(nv.laplacian.toarray(), [[0.5, -0.5], [-0.5, 0.5]])
    np.testing.assert_array_equal(nv.degree, [2, 2])


def test_normalize_single_node():
    nv = normalize(_view([[0]]))
    assert nv.norm_adjacency.toarray().tolist() == [[1.0]]
    assert nv.laplacian.toarray().tolist() == [[0.0]]


def test_normalize_matches_dense_formula(rng):
    adj = random_graph(rng, 9, 0.3)
    nv = normalize(View(adj, np.zeros((9, 1))))
    a_loop = adj.toarray() + np.eye(9)
    d = a_loop.sum(1) ** -0.5
    np.testing.assert_allclose(nv.norm_adjacency.toarray(), d[:, None] * a_loop * d[None, :], atol=1e-15)
    a = nv.norm_adjacency.toarray()
    assert np.array_equal(a, a.T)
    assert np.array_equal(nv.laplacian.toarray(), np.eye(9) - a)
    assert np.all(nv.degree > 0)


def test_laplacian_spectrum_in_unit_range(rng):
    for _ in range(20):
        adj = random_graph(rng, 10, rng.uniform(0.05, 0.9))
        eig = np.linalg.eigvalsh(normalize(View(adj, np.zeros((10, 1)))).laplacian.toarray())
        assert eig.min() >= -1e-8 and eig.max() <= 2 + 1e-8


def test_filter_zero_order_is_identity(rng):
    x = rng.standard_normal((10, 4))
    nv = normalize(View(random_graph(rng, 10), x))
    assert np.array_equal(graph_filter(nv, x, FilterParams(0, 3.7)), x)


def test_filter_on_edgeless_node_is_identity():
    x = np.array([[2.5, -1.0]])
    nv = normalize(_view([[0]]))
    assert np.array_equal(graph_filter(nv, x, FilterParams(5, 0.7)), x)


def test_filter_two_node_first_order():
    nv = normalize(_view([[0, 1], [1, 0]]))
    h = graph_filter(nv, np.eye(2), FilterParams(1, 0.5))
    np.testing.assert_allclose(h, [[0.75, 0.25], [0.25, 0.75]], atol=1e-15)


def test_filter_matches_dense_matrix_power(rng):
    adj = random_graph(rng, 12)
    x = rng.standard_normal((12, 3))
    nv = normalize(View(adj, x))
    op = np.eye(12) - 0.3 * nv.laplacian.toarray()
    np.testing.assert_allclose(graph_filter(nv, x, FilterParams(4, 0.3)),
                               np.linalg.matrix_power(op, 4) @ x, rtol=1e-12, atol=1e-12)


def test_first_order_filter_approximates_exact_smoother(rng):
    adj = random_graph(rng, 12)
    x = rng.standard_normal((12, 3))
    nv = normalize(View(adj, x))
    s = 1e-3
    exact = np.linalg.solve(np.eye(12) + s * nv.laplacian.toarray(), x)
    approx = graph_filter(nv, x, FilterParams(1, s))
    # first-order Taylor error is O(s^2)
    assert np.abs(exact - approx).max() < 10 * s ** 2 * np.abs(x).max()


@settings(max_examples=30, deadline=None)
@given(a=st.integers(0, 4), b=st.integers(0, 4), s=st.floats(0.0, 1.5), seed=st.integers(0, 10_000))
def test_filter_composition(a, b, s, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((10, 3))
    nv = normalize(View(random_graph(rng, 10), x))
    two_step = graph_filter(nv, graph_filter(nv, x, FilterParams(a, s)), FilterParams(b, s))
    one_step = graph_filter(nv, x, FilterParams(a + b, s))
    scale = max(np.abs(one_step).max(), 1e-300)
    assert np.abs(two_step - one_step).max() / scale <= 1e-10


@settings(max_examples=30, deadline=None)
@given(m=st.integers(0, 5), s=st.floats(0.0, 2.0), seed=st.integers(0, 10_000))
def test_filter_is_linear(m, s, seed):
    rng = np.random.default_rng(seed)
    x1, x2 = rng.standard_normal((2, 10, 3))
    nv = normalize(View(random_graph(rng, 10), x1))
    p = FilterParams(m, s)
    lhs = graph_filter(nv, x1 + x2, p)
    rhs = graph_filter(nv, x1, p) + graph_filter(nv, x2, p)
    assert np.abs(lhs - rhs).max() <= 1e-10 * max(1.0, np.abs(lhs).max())


def _connected_graph(rng, n):
    while True:
        adj = random_graph(rng, n, 0.35)
        if sp.csgraph.connected_components(adj)[0] == 1:
            return adj


def test_smoothness_non_increasing_in_order(rng):
    for _ in range(20):
        adj = _connected_graph(rng, 10)
        x = rng.standard_normal((10, 3))
        nv = normalize(View(adj, x))
        lap = nv.laplacian.toarray()
        s = rng.uniform(0.05, 1.0)
        prev = np.trace(x.T @ lap @ x)
        for m in range(1, 6):
            h = graph_filter(nv, x, FilterParams(m, s))
            cur = np.trace(h.T @ lap @ h)
            assert cur <= prev + 1e-12
            prev = cur


def test_filter_params_validation():
    with pytest.raises(ValueError):
        FilterParams(-1, 0.5)
    with pytest.raises(ValueError):
        FilterParams(1, -0.1)


def test_knn_small_example():
    h = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 10.0]])
    nb = build_neighbors([h], 1)
    assert nb.per_view[0].tolist() == [[1], [0], [1]]


def test_knn_matches_brute_force(rng):
    h = rng.integers(0, 3, size=(15, 2)).astype(float)  # many exact ties
    k = 4
    table = build_neighbors([h], k).per_view[0]
    for i in range(15):
        cand = sorted((float(np.sum((h[i] - h[j]) ** 2)), j) for j in range(15) if j != i)
        assert table[i].tolist() == sorted(j for _, j in cand[:k])


def test_identical_views_share_everything(rng):
    h = rng.standard_normal((8, 3))
    nb = build_neighbors([h, h.copy()], 3)
    for i in range(8):
        assert nb.shared[i].tolist() == nb.per_view[0][i].tolist()


def test_k_clamped_to_other_nodes():
    nb = build_neighbors([np.array([[0.0], [1.0]])], 5)
    assert nb.per_view[0].tolist() == [[1], [0]]


def test_neighbor_index_invariants(rng):
    reps = [rng.standard_normal((12, 3)) for _ in range(3)]
    nb = build_neighbors(reps, 4)
    for table in nb.per_view:
        assert table.shape == (12, 4)
        for i, row in enumerate(table):
            assert i not in row
            assert list(row) == sorted(set(row))
    for i in range(12):
        for table in nb.per_view:
            assert set(nb.shared[i]) <= set(table[i])
    masks = [nb.view_mask(v) for v in range(3)]
    assert np.array_equal(nb.shared_mask(), masks[0] * masks[1] * masks[2])
