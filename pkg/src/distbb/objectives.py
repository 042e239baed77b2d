"""
Strongly convex quadratic objectives.

Every objective here is a quadratic with constant Hessian ``H`` and gradient
``H x + c``; the classes differ only in how ``H`` and ``c`` are parameterized.
Curvature constants are the extreme eigenvalues of ``H``.
"""

import numpy as np

from ._validation import check_matrix, check_positive, check_vector
from .exceptions import ConfigurationError, NotStronglyConvexError
from .numerics import as_symmetric, spd_solve, sym_eig_bounds

MU_FLOOR = 1e-12


def _curvature(H):
    mu, L = sym_eig_bounds(H)
    if mu <= MU_FLOOR:
        raise NotStronglyConvexError(mu)
    return mu, L


class QuadraticObjective:
    """``f(x) = 1/2 x^T A x + b^T x`` with Hessian ``(A + A^T) / 2``.

    ``A`` is kept exactly as given (it may be nonsymmetric).
    """

    def __init__(self, A, b):
        self.A = check_matrix(A, square=True, name="A")
        self.b = check_vector(b, dim=self.A.shape[0], name="b")
        self.hessian = as_symmetric(self.A)
        self.linear_term = self.b
        self.mu, self.L = _curvature(self.hessian)

    @property
    def dim(self):
        return self.A.shape[0]

    def value(self, x):
        x = check_vector(x, dim=self.dim, name="x")
        return 0.5 * x @ self.A @ x + self.b @ x

    def gradient(self, x):
        x = check_vector(x, dim=self.dim, name="x")
        return self.hessian @ x + self.b

    def __repr__(self):
        return f"QuadraticObjective(dim={self.dim}, mu={self.mu:.4g}, L={self.L:.4g})"


class LeastSquaresObjective:
    """``f(x) = ||A x - b||^2`` with Hessian ``2 A^T A``."""

    def __init__(self, A, b):
        self.A = check_matrix(A, name="A")
        self.b = check_vector(b, dim=self.A.shape[0], name="b")
        self.hessian = as_symmetric(2.0 * self.A.T @ self.A)
        self.linear_term = -2.0 * self.A.T @ self.b
        self.mu, self.L = _curvature(self.hessian)

    @property
    def dim(self):
        return self.A.shape[1]

    def value(self, x):
        x = check_vector(x, dim=self.dim, name="x")
        r = self.A @ x - self.b
        return r @ r

    def gradient(self, x):
        x = check_vector(x, dim=self.dim, name="x")
        return self.hessian @ x + self.linear_term

    def __repr__(self):
        m, p = self.A.shape
        return f"LeastSquaresObjective(m={m}, p={p}, mu={self.mu:.4g}, L={self.L:.4g})"


class NetworkObjective:
    """Sum of per-agent objectives sharing one decision dimension.

    Per-agent Hessians and linear terms are stacked so that all local
    gradients can be evaluated in one call to :meth:`local_gradients`.
    """

    def __init__(self, agents):
        agents = list(agents)
        if not agents:
            raise ConfigurationError("a network needs at least one agent")
        dims = {a.dim for a in agents}
        if len(dims) != 1:
            raise ConfigurationError(f"agents disagree on dimension: {sorted(dims)}")
        self.agents = agents
        self.hessians = np.stack([a.hessian for a in agents])
        self.linear_terms = np.stack([a.linear_term for a in agents])
        self.mu = np.array([a.mu for a in agents])
        self.L = np.array([a.L for a in agents])

    @property
    def n(self):
        return len(self.agents)

    @property
    def dim(self):
        return self.hessians.shape[1]

    @property
    def mu_bar(self):
        return float(self.mu.mean())

    @property
    def L_bar(self):
        return float(self.L.mean())

    def value(self, x):
        return float(sum(a.value(x) for a in self.agents))

    def gradient(self, x):
        x = check_vector(x, dim=self.dim, name="x")
        return self.hessians.sum(axis=0) @ x + self.linear_terms.sum(axis=0)

    def local_gradients(self, X):
        """Row ``i`` is the gradient of agent ``i`` at its own iterate ``X[i]``."""
        X = np.asarray(X, dtype=float)
        if X.shape != (self.n, self.dim):
            raise ConfigurationError(
                f"iterate block has shape {X.shape}, expected {(self.n, self.dim)}")
        # one matvec per agent, the same arithmetic as each agent's own gradient
        return np.stack([H @ x + c for H, x, c in zip(self.hessians, X, self.linear_terms)])

    def __repr__(self):
        return f"NetworkObjective(n={self.n}, dim={self.dim})"


def gradient(obj, x):
    """Exact gradient of any objective in this module."""
    return obj.gradient(x)


def curvature_constants(obj):
    """``(mu, L)``: the extreme Hessian eigenvalues.

    For a :class:`NetworkObjective` the constants of the summed Hessian are
    returned; the per-agent values live on ``obj.mu`` and ``obj.L``.
    """
    if isinstance(obj, NetworkObjective):
        return _curvature(obj.hessians.sum(axis=0))
    return obj.mu, obj.L


def optimal_point(obj):
    """Minimizer: solves ``(sum_i H_i) x = -(sum_i c_i)``."""
    if isinstance(obj, NetworkObjective):
        H = obj.hessians.sum(axis=0)
        c = obj.linear_terms.sum(axis=0)
    else:
        H, c = obj.hessian, obj.linear_term
    return spd_solve(H, -c)


def random_orthogonal(p, rng):
    """Product of plane rotations through uniform angles, one per index pair."""
    Q = np.eye(p)
    for i in range(p - 1):
        for j in range(i + 1, p):
            t = rng.uniform(0.0, 2.0 * np.pi)
            c, s = np.cos(t), np.sin(t)
            qi, qj = Q[:, i].copy(), Q[:, j].copy()
            Q[:, i] = c * qi - s * qj
            Q[:, j] = s * qi + c * qj
    return Q


def _spectrum(p, cap, rng):
    # log-uniform interior, endpoints pinned so mu = 1 and L = cap exactly
    ev = np.exp(rng.uniform(0.0, np.log(cap), p))
    if p >= 2:
        ev[0], ev[-1] = 1.0, cap
    else:
        ev[0] = 1.0
    return ev


def random_network_objective(n, p, condition_cap, seed=0, aligned=False):
    """Seeded network of quadratic agents with Hessian spectra in ``[1, cap]``.

    Each Hessian is ``Q diag(d) Q^T`` with ``min d = 1`` and ``max d = cap``,
    so every agent has ``mu_i = 1`` and ``L_i = condition_cap`` (for ``p >= 2``).
    Linear terms are uniform on ``[-1, 1]``.

    With ``aligned=True`` all agents share one rotation ``Q`` and sort their
    spectra the same way, so they agree on which directions are stiff.
    """
    check_positive(n, "n", integer=True)
    check_positive(p, "p", integer=True)
    check_positive(condition_cap, "condition_cap")
    if condition_cap < 1:
        raise ConfigurationError(f"condition_cap must be >= 1, got {condition_cap!r}")
    rng = np.random.default_rng(seed)
    shared = random_orthogonal(p, rng) if aligned else None
    agents = []
    for _ in range(n):
        d = _spectrum(p, condition_cap, rng)
        if aligned:
            d = np.sort(d)
        Q = shared if aligned else random_orthogonal(p, rng)
        H = (Q * d) @ Q.T
        H = 0.5 * (H + H.T)
        agents.append(QuadraticObjective(H, rng.uniform(-1.0, 1.0, p)))
    return NetworkObjective(agents)


def random_least_squares(m, p, condition_cap, seed=0):
    """Seeded ``||A x - b||^2`` whose Hessian ``2 A^T A`` has spectrum ``[2/cap, 2]``.

    Square instances use a symmetric positive definite ``A``.
    """
    check_positive(m, "m", integer=True)
    check_positive(p, "p", integer=True)
    if m < p:
        raise ConfigurationError(f"need m >= p for a strongly convex fit, got m={m}, p={p}")
    if condition_cap < 1:
        raise ConfigurationError(f"condition_cap must be >= 1, got {condition_cap!r}")
    rng = np.random.default_rng(seed)
    sigma = np.sqrt(_spectrum(p, condition_cap, rng) / condition_cap)
    V = random_orthogonal(p, rng)
    if m == p:
        U = V
    else:
        U = random_orthogonal(m, rng)[:, :p]
    A = (U * sigma) @ V.T
    b = rng.uniform(-1.0, 1.0, m)
    return LeastSquaresObjective(A, b)


def identity_network(n, p, b=None):
    """``n`` copies of ``f(x) = 1/2 x^T x`` (optionally shifted by ``b``)."""
    b = np.zeros(p) if b is None else check_vector(b, dim=p, name="b")
    return NetworkObjective([QuadraticObjective(np.eye(p), b) for _ in range(n)])
