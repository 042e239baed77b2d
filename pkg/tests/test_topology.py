import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from distbb.exceptions import ConfigurationError, GenerationError
from distbb.topology import (Graph, MixingMatrix, build_mixing, complete_graph, make_graph,
                             metropolis_weights, ring_graph, second_eigenvalue,
                             sinkhorn_random_weights, uniform_weights)


def path_graph(n):
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def test_complete_graph_edges():
    assert make_graph("complete", 3).edges == {(0, 1), (0, 2), (1, 2)}


def test_ring_graph_edges():
    assert make_graph("ring", 4).edges == {(0, 1), (1, 2), (2, 3), (0, 3)}


def test_erdos_renyi_prob_one_is_complete():
    assert make_graph("erdos_renyi", 5, seed=9, prob=1.0).edges == complete_graph(5).edges


def test_erdos_renyi_is_deterministic_and_connected():
    a = make_graph("erdos_renyi", 30, seed=4, prob=0.2)
    b = make_graph("erdos_renyi", 30, seed=4, prob=0.2)
    assert a == b and a.is_connected()


def test_erdos_renyi_gives_up():
    with pytest.raises(GenerationError):
        make_graph("erdos_renyi", 40, seed=0, prob=0.001)


@pytest.mark.parametrize("kwargs", [
    dict(kind="ring", n=1), dict(kind="hexagon", n=4),
    dict(kind="erdos_renyi", n=4, prob=0.0), dict(kind="erdos_renyi", n=4),
])
def test_make_graph_rejects_bad_input(kwargs):
    with pytest.raises(ConfigurationError):
        make_graph(**kwargs)


def test_graph_rejects_self_loops():
    with pytest.raises(ConfigurationError):
        Graph(3, frozenset({(1, 1)}))


def test_metropolis_path():
    W = metropolis_weights(path_graph(3)).W
    third = 1.0 / 3.0
    assert W[0, 1] == W[1, 2] == third
    np.testing.assert_allclose(np.diag(W), [2 * third, third, 2 * third], atol=1e-15)
    assert W[0, 2] == 0.0


def test_metropolis_two_nodes():
    np.testing.assert_array_equal(metropolis_weights(complete_graph(2)).W, [[0.5, 0.5], [0.5, 0.5]])


def test_metropolis_ring_four():
    W = metropolis_weights(ring_graph(4)).W
    adj = ring_graph(4).adjacency()
    np.testing.assert_allclose(W[adj], 1 / 3)
    np.testing.assert_allclose(np.diag(W), 1 / 3)
    np.testing.assert_allclose(W.sum(axis=0), 1.0, atol=1e-15)


def test_metropolis_is_bit_deterministic():
    g = make_graph("erdos_renyi", 25, seed=3, prob=0.3)
    assert np.array_equal(metropolis_weights(g).W, metropolis_weights(g).W)


def test_sinkhorn_two_nodes_has_forced_form():
    W = sinkhorn_random_weights(complete_graph(2), seed=11).W
    a = W[0, 0]
    assert 0 < a < 1
    np.testing.assert_allclose(W, [[a, 1 - a], [1 - a, a]], atol=1e-10)


def test_sinkhorn_single_agent():
    np.testing.assert_array_equal(sinkhorn_random_weights(Graph(1), seed=0).W, [[1.0]])


def test_sinkhorn_five_nodes_is_doubly_stochastic():
    M = sinkhorn_random_weights(complete_graph(5), seed=42)
    assert M.stochasticity_error() <= 1e-10
    M.validate(complete_graph(5))


@pytest.mark.parametrize("W, expected", [
    (np.full((4, 4), 0.25), 0.0),
    (np.eye(3), 1.0),
    ([[0.5, 0.5], [0.5, 0.5]], 0.0),
])
def test_second_eigenvalue_examples(W, expected):
    assert second_eigenvalue(W) == pytest.approx(expected, abs=1e-12)


def test_second_eigenvalue_uses_modulus():
    # bipartite-like weights have eigenvalue -1/3 < 0; its modulus must count
    W = metropolis_weights(ring_graph(4)).W
    assert second_eigenvalue(W) == pytest.approx(1 / 3, abs=1e-12)


def test_validate_catches_non_edges():
    W = np.full((3, 3), 1 / 3)
    with pytest.raises(ConfigurationError):
        MixingMatrix.from_array(W).validate(path_graph(3))


def test_build_mixing_dispatch():
    g = complete_graph(4)
    assert build_mixing(g, "uniform").lambda2 == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ConfigurationError):
        build_mixing(ring_graph(4), "uniform")
    with pytest.raises(ConfigurationError):
        build_mixing(g, "magic")


graphs = st.one_of(
    st.builds(complete_graph, st.integers(2, 12)),
    st.builds(ring_graph, st.integers(3, 12)),
    st.builds(lambda n, s: make_graph("erdos_renyi", n, seed=s, prob=0.5),
              st.integers(2, 12), st.integers(0, 1000)),
)


@given(graphs, st.sampled_from(["metropolis", "sinkhorn"]), st.integers(0, 1000))
def test_generated_weights_are_valid_mixing_matrices(g, scheme, seed):
    M = build_mixing(g, scheme, seed=seed)
    M.validate(g)
    assert np.all(M.W >= 0)
    assert M.lambda2 < 1 - 1e-12


@given(graphs, st.integers(0, 1000))
def test_averaging_contracts_disagreement(g, seed):
    M = metropolis_weights(g)
    v = np.random.default_rng(seed).standard_normal(g.n)
    centered = v - v.mean()
    assert np.linalg.norm(M.W @ v - v.mean()) <= M.lambda2 * np.linalg.norm(centered) + 1e-9


def test_uniform_weights():
    assert np.array_equal(uniform_weights(3).W, np.full((3, 3), 1 / 3))
