import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_graph_edges
from risconn.errors import ConfigurationError, DimensionError
from risconn.graph import (
    EdgeTag,
    Graph,
    build_graph,
    eig_sym,
    fiedler_pair,
    incidence_matrix,
    incidence_vector,
    is_connected,
    jacobi_eigh,
    lambda2,
    laplacian,
    read_edgelist,
    write_edgelist,
)
from risconn.scenario import RadioParams, RisGeometry, Scenario, sample_scenario


def make(n, edges):
    edges = tuple((min(a, b), max(a, b)) for a, b in edges)
    return Graph(n, edges, (EdgeTag.DIRECT,) * len(edges))


def path(n):
    return make(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return make(n, [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)])


def complete(n):
    return make(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star(n):
    return make(n, [(0, j) for j in range(1, n)])


def test_graph_rejects_bad_edges():
    with pytest.raises(ConfigurationError):
        make(3, [(1, 1)])
    with pytest.raises(ConfigurationError):
        make(3, [(0, 1), (1, 0)])
    with pytest.raises(ConfigurationError):
        make(3, [(0, 3)])
    with pytest.raises(DimensionError):
        Graph(3, ((0, 1),), ())


def test_incidence_vector():
    a = incidence_vector(1, 3, 5)
    assert a.tolist() == [0, 1, 0, -1, 0]
    assert np.allclose(np.linalg.eigvalsh(np.outer(a, a)), [0, 0, 0, 0, 2])


def test_laplacian_single_edge():
    assert laplacian(make(2, [(0, 1)])).tolist() == [[1, -1], [-1, 1]]


def test_laplacian_triangle():
    L = laplacian(complete(3))
    assert np.diag(L).tolist() == [2, 2, 2]
    assert np.all(L[~np.eye(3, dtype=bool)] == -1)


def test_laplacian_empty():
    assert not laplacian(Graph(4)).any()


def test_laplacian_equals_incidence_product(rng):
    g = make(9, random_graph_edges(rng, 9, 0.4))
    A = incidence_matrix(g)
    assert np.array_equal(laplacian(g), A @ A.T)


def test_spectrum_k3_and_p3():
    assert np.allclose(eig_sym(laplacian(complete(3))).eigenvalues, [0, 3, 3], atol=1e-12)
    assert np.allclose(eig_sym(laplacian(path(3))).eigenvalues, [0, 1, 3], atol=1e-12)


@pytest.mark.parametrize("n", range(2, 13))
def test_path_lambda2_closed_form(n):
    assert lambda2(path(n))[0] == pytest.approx(2 * (1 - math.cos(math.pi / n)), abs=1e-9)


def test_eig_sym_rejects_asymmetric():
    with pytest.raises(ValueError):
        eig_sym(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(DimensionError):
        eig_sym(np.zeros((2, 3)))


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eig_sym_contract(method, rng):
    g = make(12, random_graph_edges(rng, 12, 0.3))
    L = laplacian(g)
    res = eig_sym(L, method=method)
    w, v = res.eigenvalues, res.eigenvectors
    assert np.all(np.diff(w) >= 0)
    assert abs(w[0]) <= 1e-9
    assert np.allclose(v.T @ v, np.eye(12), atol=1e-10)
    scale = max(1.0, np.linalg.norm(L, 2))
    for i in range(12):
        assert np.linalg.norm(L @ v[:, i] - w[i] * v[:, i]) <= 1e-8 * scale
    assert math.isclose(sum(w), 2 * g.num_edges, abs_tol=1e-9)


def test_jacobi_agrees_with_lapack(rng):
    for _ in range(20):
        m = rng.normal(size=(8, 8))
        m = m + m.T
        w_j, _ = jacobi_eigh(m)
        assert np.allclose(w_j, np.linalg.eigvalsh(m), atol=1e-10)


def test_jacobi_diagonal_and_trivial():
    w, v = jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
    assert w.tolist() == [1.0, 2.0, 3.0]
    assert np.array_equal(np.abs(v), np.eye(3)[:, [1, 2, 0]])


def test_fiedler_sign_convention(rng):
    g = make(10, random_graph_edges(rng, 10, 0.5))
    _, v = lambda2(g)
    first = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
    assert first > 0
    assert abs(v.sum()) < 1e-10
    assert np.linalg.norm(v) == pytest.approx(1.0)


def test_lambda2_small_cases():
    assert lambda2(Graph(2))[0] == 0.0
    assert lambda2(complete(3))[0] == pytest.approx(3.0)
    assert lambda2(star(4))[0] == pytest.approx(1.0)
    with pytest.raises(ConfigurationError):
        lambda2(Graph(1))


def test_fiedler_vector_orthogonal_to_ones_when_disconnected():
    g = make(6, [(0, 1), (2, 3), (4, 5)])
    value, v = lambda2(g)
    assert value == 0.0
    assert abs(v.sum()) < 1e-12
    assert np.linalg.norm(laplacian(g) @ v) < 1e-12


@pytest.mark.parametrize("n", [3, 5, 8, 12])
def test_cycle_and_star_spectra(n):
    cyc = eig_sym(laplacian(cycle(n))).eigenvalues
    expected = sorted(2 - 2 * math.cos(2 * math.pi * k / n) for k in range(n))
    assert np.allclose(cyc, expected, atol=1e-9)
    st_ = eig_sym(laplacian(star(n))).eigenvalues
    assert np.allclose(st_, [0] + [1] * (n - 2) + [n], atol=1e-9)


def test_bfs_connectivity():
    assert is_connected(path(5))
    assert not is_connected(make(4, [(0, 1), (2, 3)]))
    assert is_connected(Graph(1))


@st.composite
def graphs(draw, max_nodes=12):
    n = draw(st.integers(2, max_nodes))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return make(n, [p for p, keep in zip(pairs, mask) if keep])


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_lambda2_positive_iff_connected(g):
    ref = nx.Graph()
    ref.add_nodes_from(range(g.num_nodes))
    ref.add_edges_from(g.edges)
    assert (lambda2(g)[0] > 1e-9) == nx.is_connected(ref) == is_connected(g)


@settings(max_examples=150, deadline=None)
@given(graphs(), st.data())
def test_edge_addition_bounds(g, data):
    absent = [
        (i, j) for i in range(g.num_nodes) for j in range(i + 1, g.num_nodes) if not g.has_edge(i, j)
    ]
    if not absent:
        return
    n, m = data.draw(st.sampled_from(absent))
    before = lambda2(g)[0]
    after = lambda2(g.with_edge(n, m))[0]
    assert before - 1e-12 <= after <= before + 2 + 1e-9


@settings(max_examples=100, deadline=None)
@given(graphs())
def test_lambda2_at_most_min_degree_unless_complete(g):
    degrees = np.diag(laplacian(g))
    if g.num_edges == g.num_nodes * (g.num_nodes - 1) // 2:
        assert lambda2(g)[0] == pytest.approx(g.num_nodes)
    else:
        assert lambda2(g)[0] <= degrees.min() + 1e-9


def test_build_graph_single_direct_edge(radio):
    sc = Scenario([[0, 0]], [[30, 0, 40]])  # 50 m
    g = build_graph(sc)
    assert g.edges == ((0, 1),)
    assert g.tags == (EdgeTag.DIRECT,)


def test_build_graph_out_of_range(radio):
    sc = Scenario([[0, 0]], [[0, 62.45, 50]])  # ~80 m
    g = build_graph(sc)
    assert g.num_edges == 0
    assert lambda2(g)[0] == 0.0


def test_build_graph_uav_backhaul():
    sc = Scenario([[500, 500]], [[0, 0, 50], [100, 0, 50]])
    g = build_graph(sc)
    assert g.edges == ((1, 2),)
    assert g.tags == (EdgeTag.BACKHAUL,)


def test_build_graph_has_no_ue_ue_edges(radio, ris):
    sc = sample_scenario(12, 5, (150, 150), 50, ris, radio, seed=8)
    g = build_graph(sc)
    assert all(m >= sc.num_ue for _, m in g.edges)
    for (n, m), tag in zip(g.edges, g.tags):
        assert tag is (EdgeTag.DIRECT if n < sc.num_ue else EdgeTag.BACKHAUL)


def test_edgelist_roundtrip(tmp_path, rng):
    edges = [e for e in random_graph_edges(rng, 7, 0.5) if e != (0, 6)]
    g = make(7, edges).with_edge(0, 6, EdgeTag.RIS)
    path_ = tmp_path / "g.txt"
    write_edgelist(g, path_)
    lines = path_.read_text().splitlines()
    assert lines[0] == f"7 {g.num_edges}"
    assert lines[-1] == "1 7 ris"
    assert read_edgelist(path_) == g


@pytest.mark.parametrize(
    "text",
    ["", "3\n", "3 1\n1 2\n", "3 2\n1 2 ue-uav\n", "3 1\n1 2 bogus\n", "3 1\n1 4 ue-uav\n"],
)
def test_edgelist_rejects_malformed(tmp_path, text):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    with pytest.raises(ConfigurationError):
        read_edgelist(p)


def test_fiedler_pair_matches_full_decomposition(rng):
    g = make(15, random_graph_edges(rng, 15, 0.35))
    L = laplacian(g)
    value, v = fiedler_pair(L)
    w = np.linalg.eigvalsh(L)
    assert value == pytest.approx(w[1], abs=1e-10)
    assert np.linalg.norm(L @ v - value * v) < 1e-9
