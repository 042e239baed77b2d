"""
Synchronous simulation of distributed BB gradient descent.

Each round every agent mixes its neighbours' iterates with the weights ``W``
and takes a local gradient step with its own step size::

    x_i(k+1) = sum_j w_ij x_j(k) - alpha_i(k) grad f_i(x_i(k))

after which it refreshes its secant pair and step size. All agents read
round-``k`` values only, so the result does not depend on update order.
"""

from dataclasses import dataclass, replace

import numpy as np

from ._validation import check_positive
from .bb_core import ClampMode, StepOutcome, StepRule, StepVariant, as_rule
from .diagnostics import consensus_bound, network_mean, record_round
from .exceptions import ConfigurationError, DivergenceError
from .objectives import optimal_point
from .topology import MixingMatrix


@dataclass(frozen=True)
class AgentState:
    """Read-only view of one agent's local variables."""

    id: int
    x: np.ndarray
    x_prev: np.ndarray
    grad: np.ndarray
    grad_prev: np.ndarray
    alpha: float

    @property
    def s(self):
        return None if self.x_prev is None else self.x - self.x_prev

    @property
    def y(self):
        return None if self.grad_prev is None else self.grad - self.grad_prev


@dataclass(frozen=True)
class NetworkState:
    """All agents' variables after ``round`` updates, one row per agent."""

    X: np.ndarray
    G: np.ndarray
    alpha: np.ndarray
    round: int = 0
    X_prev: np.ndarray = None
    G_prev: np.ndarray = None
    clamp_events: np.ndarray = None
    breach_events: np.ndarray = None

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def x_bar(self):
        return network_mean(self.X)

    @property
    def g_bar(self):
        return self.G.mean(axis=0)

    def agent(self, i):
        return AgentState(
            id=i, x=self.X[i], grad=self.G[i], alpha=float(self.alpha[i]),
            x_prev=None if self.X_prev is None else self.X_prev[i],
            grad_prev=None if self.G_prev is None else self.G_prev[i])

    @property
    def agents(self):
        return [self.agent(i) for i in range(self.n)]


def _as_block(x0, n, p):
    X = np.array(x0, dtype=float)
    if X.ndim == 1:
        X = np.tile(X, (n, 1))
    if X.shape != (n, p):
        raise ConfigurationError(f"x0 has shape {X.shape}, expected ({p},) or {(n, p)}")
    if not np.all(np.isfinite(X)):
        raise ConfigurationError("x0 contains NaN or Inf")
    return X


def _as_mixing(W):
    if isinstance(W, MixingMatrix):
        return W
    return MixingMatrix.from_array(W)


def mix(W, X):
    """``sum_j w_ij x_j`` evaluated as ``x_i + sum_{j != i} w_ij (x_j - x_i)``.

    Equal to ``W @ X`` for row-stochastic ``W``, but agents that already agree
    stay bit-for-bit identical, which ``W @ X`` does not guarantee.
    """
    off = W - np.diag(np.diag(W))
    return X + np.einsum("ij,ijp->ip", off, X[None, :, :] - X[:, None, :])


def initial_state(objective, x0, rule):
    """Round-0 state: iterates ``x0`` (shared or per agent) and warm-up steps."""
    rule = as_rule(rule)
    X = _as_block(x0, objective.n, objective.dim)
    alpha = np.array([rule.initial_step(mu, L) for mu, L in zip(objective.mu, objective.L)])
    zeros = np.zeros(objective.n, dtype=int)
    return NetworkState(X=X, G=objective.local_gradients(X), alpha=alpha,
                        clamp_events=zeros, breach_events=zeros.copy())


def local_bb_step(agent, variant, mu_i, L_i, clamp_mode=ClampMode.RAW):
    """BB step of one agent from its own secant pair, safeguarded locally.

    Returns a :class:`~distbb.bb_core.StepOutcome`; on a curvature breach the
    step is ``2 / (mu_i + L_i)`` and ``breached`` is set.
    """
    variant = StepVariant(variant)
    if not variant.is_bb:
        raise ConfigurationError(f"{variant.value} is not a BB variant")
    if agent.x_prev is None or agent.grad_prev is None:
        raise ConfigurationError("BB step needs a previous iterate (round >= 1)")
    rule = StepRule(variant, clamp_mode=clamp_mode)
    return rule.next_step(2, agent.s, agent.y, mu_i, L_i, agent.alpha)


def consensus_round(state, W, objective, rule=StepRule()):
    """One synchronous round: mix, take local gradient steps, refresh steps."""
    rule = as_rule(rule)
    W = _as_mixing(W).W
    if W.shape[0] != state.n:
        raise ConfigurationError(f"W is {W.shape[0]}x{W.shape[0]} but there are {state.n} agents")
    with np.errstate(over="ignore", invalid="ignore"):
        X_new = mix(W, state.X) - state.alpha[:, None] * state.G
        bad = np.flatnonzero(~np.all(np.isfinite(X_new), axis=1))
        if bad.size:
            raise DivergenceError(state.round + 1, agent=int(bad[0]))
        G_new = objective.local_gradients(X_new)
    update = state.round + 2
    outcomes = [
        rule.next_step(update, X_new[i] - state.X[i], G_new[i] - state.G[i],
                       objective.mu[i], objective.L[i], state.alpha[i])
        for i in range(state.n)
    ] if rule.variant.is_bb else [
        StepOutcome(rule.fixed_step(mu, L, update)) for mu, L in zip(objective.mu, objective.L)
    ]
    return NetworkState(
        X=X_new, G=G_new,
        alpha=np.array([o.alpha for o in outcomes]),
        round=state.round + 1,
        X_prev=state.X, G_prev=state.G,
        clamp_events=state.clamp_events + np.array([o.clamped for o in outcomes], dtype=int),
        breach_events=state.breach_events + np.array([o.breached for o in outcomes], dtype=int),
    )


@dataclass
class DistributedRun:
    """Outcome of :func:`simulate`."""

    records: list
    state: NetworkState
    x_star: np.ndarray
    grad_bound: float
    lam: float
    converged: bool
    #: largest Frobenius norm of the stacked local gradients over the run
    stacked_grad_bound: float = None

    @property
    def n_iter(self):
        return self.state.round


def simulate(objective, W, rule=StepRule(), x0=None, eps=1e-8, max_iter=1000, x_star=None,
             callback=None):
    """Run rounds until ``||mean_i grad f_i(x_i)|| < eps`` or ``max_iter``.

    Records are emitted for rounds ``1..K``; a run that is already converged
    at round 0 yields a single round-0 record. ``bound_consensus`` in every
    record uses ``G``, the largest single-agent gradient norm seen over the
    whole run. The returned run also carries ``stacked_grad_bound``, the
    largest norm of all local gradients taken together, which is the ``G``
    for which the deviation bound holds on every instance.

    ``callback(state)``, if given, sees the round-0 state and every later one.
    """
    rule = as_rule(rule)
    check_positive(eps, "eps")
    check_positive(max_iter, "max_iter", integer=True)
    mixing = _as_mixing(W)
    if x0 is None:
        x0 = np.zeros(objective.dim)
    if x_star is None:
        x_star = optimal_point(objective)
    state = initial_state(objective, x0, rule)
    if callback is not None:
        callback(state)
    lam = mixing.lambda2
    G_max = float(np.linalg.norm(state.G, axis=1).max())
    G_stacked = float(np.linalg.norm(state.G))
    prev_err = float(np.linalg.norm(state.x_bar - x_star))
    records = []
    converged = False
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max_iter):
            if np.linalg.norm(state.g_bar) < eps:
                converged = True
                break
            used = state.alpha
            state = consensus_round(state, mixing, objective, rule)
            if callback is not None:
                callback(state)
            G_max = max(G_max, float(np.linalg.norm(state.G, axis=1).max()))
            G_stacked = max(G_stacked, float(np.linalg.norm(state.G)))
            rec = record_round(state, objective, x_star, prev_opt_err=prev_err, alphas=used,
                               lam=lam, grad_bound=G_max,
                               clamp_events=state.clamp_events.sum(),
                               breach_events=state.breach_events.sum())
            records.append(rec)
            prev_err = rec.opt_err
        else:
            converged = bool(np.linalg.norm(state.g_bar) < eps)
    if not records:
        records.append(record_round(state, objective, x_star, alphas=state.alpha,
                                    lam=lam, grad_bound=G_max))
    mu_min = float(objective.mu.min())
    records = [replace(r, bound_consensus=consensus_bound(r.round, G_max, mu_min, lam))
               for r in records]
    return DistributedRun(records, state, x_star, G_max, lam, converged, G_stacked)


def run_distributed(objective, W, rule=StepRule(), x0=None, eps=1e-8, max_iter=1000):
    """Per-round :class:`~distbb.diagnostics.IterationRecord` list of a distributed run."""
    return simulate(objective, W, rule, x0, eps, max_iter).records
