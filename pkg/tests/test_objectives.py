import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from distbb.exceptions import ConfigurationError, NotStronglyConvexError, SingularityError
from distbb.objectives import (LeastSquaresObjective, NetworkObjective, QuadraticObjective,
                               curvature_constants, gradient, identity_network, optimal_point,
                               random_least_squares, random_network_objective)
from oracles import central_difference, extreme_eigenvalues


def test_quadratic_gradient_examples():
    assert np.array_equal(gradient(QuadraticObjective(np.eye(2), [0, 0]), [1, 2]), [1, 2])
    assert np.array_equal(gradient(QuadraticObjective(np.eye(2), [1, 1]), [0, 0]), [1, 1])


def test_least_squares_gradient_example():
    np.testing.assert_allclose(gradient(LeastSquaresObjective(np.eye(2), [0, 0]), [1, 1]), [2, 2])


def test_gradient_dimension_mismatch():
    with pytest.raises(ConfigurationError):
        gradient(QuadraticObjective(np.eye(2), [0, 0]), [1, 2, 3])


@pytest.mark.parametrize("obj, expected", [
    (QuadraticObjective(np.diag([2.0, 6.0]), [0, 0]), (2, 6)),
    (QuadraticObjective(np.eye(3), np.zeros(3)), (1, 1)),
    (LeastSquaresObjective(np.diag([1.0, 2.0]), [5.0, -1.0]), (2, 8)),
])
def test_curvature_examples(obj, expected):
    mu, L = curvature_constants(obj)
    assert mu == pytest.approx(expected[0], abs=1e-12)
    assert L == pytest.approx(expected[1], abs=1e-12)


def test_mu_is_the_smallest_eigenvalue():
    obj = QuadraticObjective([[4.0, 1.0], [1.0, 2.0]], [0.0, 0.0])
    lo, hi = extreme_eigenvalues([[4.0, 1.0], [1.0, 2.0]])
    assert obj.mu == pytest.approx(lo, abs=1e-10)
    assert obj.L == pytest.approx(hi, abs=1e-10)


def test_nonsymmetric_A_is_kept_and_hessian_symmetrized():
    A = np.array([[2.0, 3.0], [-1.0, 2.0]])
    obj = QuadraticObjective(A, [0.0, 0.0])
    assert np.array_equal(obj.A, A)
    np.testing.assert_array_equal(obj.hessian, [[2.0, 1.0], [1.0, 2.0]])
    x = np.array([0.3, -1.1])
    assert obj.value(x) == pytest.approx(0.5 * x @ A @ x)


def test_not_strongly_convex():
    with pytest.raises(NotStronglyConvexError):
        QuadraticObjective(np.diag([1.0, 0.0]), [0.0, 0.0])
    with pytest.raises(NotStronglyConvexError):
        LeastSquaresObjective(np.ones((3, 2)), np.zeros(3))


def test_optimal_point_examples():
    c = np.array([0.5, -2.0, 3.0])
    np.testing.assert_allclose(optimal_point(identity_network(4, 3, c)), -c, atol=1e-14)
    np.testing.assert_allclose(
        optimal_point(QuadraticObjective(np.diag([2.0, 4.0]), [2.0, 4.0])), [-1, -1], atol=1e-14)
    net = random_network_objective(5, 4, 20.0, seed=3)
    zero_b = NetworkObjective(QuadraticObjective(a.hessian, np.zeros(4)) for a in net.agents)
    np.testing.assert_allclose(optimal_point(zero_b), 0.0, atol=1e-15)


def test_optimal_point_of_near_singular_network():
    # each agent clears the strong-convexity floor, but the sum is too ill-conditioned
    agent = QuadraticObjective(np.diag([1e6, 2e-12]), [1.0, 1.0])
    with pytest.raises(SingularityError):
        optimal_point(NetworkObjective([agent, agent]))


def test_random_network_scalar_unit_case():
    net = random_network_objective(1, 1, 1.0, seed=5)
    np.testing.assert_array_equal(net.hessians[0], [[1.0]])


def test_random_network_shapes_and_determinism():
    a = random_network_objective(100, 10, 30.0, seed=7)
    b = random_network_objective(100, 10, 30.0, seed=7)
    assert (a.n, a.dim) == (100, 10)
    assert np.array_equal(a.hessians, b.hessians)
    assert np.array_equal(a.linear_terms, b.linear_terms)
    assert np.all(np.abs(a.linear_terms) <= 1)
    np.testing.assert_allclose(a.mu, 1.0, atol=1e-10)
    np.testing.assert_allclose(a.L, 30.0, rtol=1e-10)
    assert a.mu_bar <= a.L_bar


def test_aligned_network_shares_eigenvectors():
    net = random_network_objective(4, 5, 10.0, seed=1, aligned=True)
    H0, H1 = net.hessians[0], net.hessians[1]
    np.testing.assert_allclose(H0 @ H1, H1 @ H0, atol=1e-10)


def test_random_least_squares_conditioning():
    obj = random_least_squares(12, 6, 50.0, seed=2)
    assert obj.L / obj.mu == pytest.approx(50.0, rel=1e-9)
    with pytest.raises(ConfigurationError):
        random_least_squares(3, 6, 10.0)


def test_network_gradient_is_sum_of_local():
    net = random_network_objective(6, 4, 10.0, seed=0)
    x = np.arange(4.0)
    np.testing.assert_allclose(net.gradient(x), sum(a.gradient(x) for a in net.agents), atol=1e-12)
    np.testing.assert_allclose(net.local_gradients(np.tile(x, (6, 1))),
                               [a.gradient(x) for a in net.agents], atol=0)


objectives = st.one_of(
    st.builds(lambda s, c: random_network_objective(1, 4, c, seed=s).agents[0],
              st.integers(0, 10**6), st.floats(1.0, 100.0)),
    st.builds(lambda s, c: random_least_squares(6, 4, c, seed=s),
              st.integers(0, 10**6), st.floats(1.0, 100.0)),
)


@given(objectives, st.integers(0, 10**6))
def test_strong_convexity_and_lipschitz(obj, seed):
    rng = np.random.default_rng(seed)
    x, y = rng.uniform(-5, 5, (2, obj.dim))
    gap = obj.value(x) - obj.value(y) - obj.gradient(y) @ (x - y)
    assert gap >= 0.5 * obj.mu * np.sum((x - y) ** 2) - 1e-9 * (1 + abs(obj.value(x)))
    lhs = np.linalg.norm(obj.gradient(x) - obj.gradient(y))
    assert lhs <= obj.L * np.linalg.norm(x - y) * (1 + 1e-12) + 1e-9


@given(objectives, st.integers(0, 10**6))
def test_gradient_matches_finite_differences(obj, seed):
    x = np.random.default_rng(seed).uniform(-3, 3, obj.dim)
    fd = central_difference(obj.value, x)
    np.testing.assert_allclose(obj.gradient(x), fd, rtol=1e-6, atol=1e-6)


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10**6))
def test_optimal_point_zeroes_the_gradient(n, p, seed):
    net = random_network_objective(n, p, 25.0, seed=seed)
    x_star = optimal_point(net)
    tol = 1e-10 * (1 + np.linalg.norm(net.linear_terms.sum(axis=0)))
    assert np.linalg.norm(net.gradient(x_star)) <= tol
