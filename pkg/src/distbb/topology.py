"""Communication graphs and doubly stochastic mixing matrices."""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_matrix
from .exceptions import ConfigurationError, GenerationError
from .numerics import as_symmetric, sym_eig_bounds

GRAPH_KINDS = ("complete", "ring", "erdos_renyi")
MAX_RESAMPLES = 100
SINKHORN_TOL = 1e-10
SINKHORN_MAX_SWEEPS = 10_000


def _edge(i, j):
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0..n-1``.

    Edges are stored as ordered pairs ``(i, j)`` with ``i < j``.
    """

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError(f"graph needs at least one node, got {self.n}")
        normalized = set()
        for i, j in self.edges:
            if i == j:
                raise ConfigurationError(f"self-loop at node {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ConfigurationError(f"edge ({i}, {j}) out of range")
            normalized.add(_edge(int(i), int(j)))
        object.__setattr__(self, "edges", frozenset(normalized))

    def neighbors(self, i):
        return sorted(b if a == i else a for a, b in self.edges if i in (a, b))

    def degrees(self):
        deg = np.zeros(self.n, dtype=int)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def adjacency(self):
        adj = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.edges:
            adj[i, j] = adj[j, i] = True
        return adj

    def is_connected(self):
        """Breadth-first reachability from node 0."""
        adj = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.n


def complete_graph(n):
    return Graph(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))


def ring_graph(n):
    return Graph(n, frozenset(_edge(i, (i + 1) % n) for i in range(n)))


def make_graph(kind, n, seed=0, prob=None):
    """Build a connected graph of the given ``kind``.

    ``erdos_renyi`` draws each edge independently with probability ``prob``
    and resamples (up to 100 times, deterministically from ``seed``) until the
    draw is connected.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 2:
        raise ConfigurationError(f"n must be an integer >= 2, got {n!r}")
    n = int(n)
    if kind == "complete":
        return complete_graph(n)
    if kind == "ring":
        return ring_graph(n)
    if kind != "erdos_renyi":
        raise ConfigurationError(f"unknown graph kind {kind!r}")
    if prob is None or not 0.0 < prob <= 1.0:
        raise ConfigurationError(f"erdos_renyi needs 0 < prob <= 1, got {prob!r}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    for _ in range(MAX_RESAMPLES):
        keep = rng.random(iu.size) < prob
        g = Graph(n, frozenset(zip(iu[keep].tolist(), ju[keep].tolist())))
        if g.is_connected():
            return g
    raise GenerationError(
        f"no connected erdos_renyi({prob}) graph on {n} nodes "
        f"after {MAX_RESAMPLES} draws")


def second_eigenvalue(W):
    """Largest eigenvalue modulus of ``W`` on the complement of the ones vector.

    For a symmetric doubly stochastic matrix this is the spectral norm of
    ``W - (1/n) 11^T``.
    """
    W = as_symmetric(W)
    n = W.shape[0]
    lo, hi = sym_eig_bounds(W - np.full((n, n), 1.0 / n))
    return max(abs(lo), abs(hi))


@dataclass(frozen=True)
class MixingMatrix:
    """Symmetric doubly stochastic weights plus their mixing rate ``lambda2``."""

    W: np.ndarray
    lambda2: float

    @classmethod
    def from_array(cls, W):
        W = np.array(as_symmetric(check_matrix(W, square=True)))
        W.flags.writeable = False
        return cls(W, second_eigenvalue(W))

    @property
    def n(self):
        return self.W.shape[0]

    def stochasticity_error(self):
        """Worst deviation of any row or column sum from one."""
        return float(max(np.abs(self.W.sum(axis=0) - 1).max(),
                         np.abs(self.W.sum(axis=1) - 1).max()))

    def validate(self, graph=None, tol=SINKHORN_TOL):
        """Raise :class:`ConfigurationError` unless ``W`` is a valid mixing matrix."""
        W = self.W
        if np.any(W < 0):
            raise ConfigurationError("mixing matrix has negative entries")
        if not np.array_equal(W, W.T):
            raise ConfigurationError("mixing matrix is not symmetric")
        if self.stochasticity_error() > tol:
            raise ConfigurationError("mixing matrix is not doubly stochastic")
        if graph is not None:
            allowed = graph.adjacency() | np.eye(graph.n, dtype=bool)
            if np.any((W > 0) & ~allowed):
                raise ConfigurationError("mixing matrix uses a non-edge")
        return self


def metropolis_weights(g):
    """Metropolis-Hastings weights ``1 / (1 + max(deg_i, deg_j))`` on edges.

    The diagonal takes whatever mass is left in each row.
    """
    if not g.is_connected():
        raise ConfigurationError("metropolis_weights needs a connected graph")
    deg = g.degrees()
    W = np.zeros((g.n, g.n))
    for i, j in sorted(g.edges):
        W[i, j] = W[j, i] = 1.0 / (1 + max(deg[i], deg[j]))
    W[np.diag_indices(g.n)] = 1.0 - W.sum(axis=1)
    return MixingMatrix.from_array(W)


def uniform_weights(n):
    """Exact averaging ``W = (1/n) 11^T`` over a complete graph."""
    return MixingMatrix.from_array(np.full((n, n), 1.0 / n))


def sinkhorn_random_weights(g, seed=0):
    """Random positive symmetric doubly stochastic weights on ``g``.

    Uniform (0, 1] draws on the edges and diagonal are balanced by alternating
    row and column normalization, re-symmetrizing after every sweep.
    """
    if not g.is_connected():
        raise ConfigurationError("sinkhorn_random_weights needs a connected graph")
    n = g.n
    support = g.adjacency() | np.eye(n, dtype=bool)
    rng = np.random.default_rng(seed)
    M = np.where(support, 1.0 - rng.random((n, n)), 0.0)
    M = 0.5 * (M + M.T)
    worst = np.inf
    for _ in range(SINKHORN_MAX_SWEEPS):
        M /= M.sum(axis=1, keepdims=True)
        M /= M.sum(axis=0, keepdims=True)
        M = 0.5 * (M + M.T)
        worst = max(np.abs(M.sum(axis=1) - 1).max(), np.abs(M.sum(axis=0) - 1).max())
        if worst <= SINKHORN_TOL:
            return MixingMatrix.from_array(M)
    raise GenerationError(
        f"Sinkhorn balancing did not converge; worst row-sum deviation {worst:.3e}")


def build_mixing(graph, weights, seed=0):
    """Dispatch on a weight-scheme name: metropolis, sinkhorn or uniform."""
    if weights == "metropolis":
        return metropolis_weights(graph)
    if weights == "sinkhorn":
        return sinkhorn_random_weights(graph, seed)
    if weights == "uniform":
        if len(graph.edges) != graph.n * (graph.n - 1) // 2:
            raise ConfigurationError("uniform weights need a complete graph")
        return uniform_weights(graph.n)
    raise ConfigurationError(f"unknown weight scheme {weights!r}")
