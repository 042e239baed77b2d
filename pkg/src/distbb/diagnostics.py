"""
Per-round metrics and numerical certificates for the convergence bounds.

The quantities checked here:

* contraction constant ``sqrt(1 - c2 / (n L))`` with ``c2 = 2 mu L / (mu + L)``
  (``n = 1`` for the centralized method);
* consensus deviation ``max_i ||x_i(k) - xbar(k)|| <= G sqrt(k) / mu_min / sqrt(1 - lambda^2)``.
"""

import math
from dataclasses import dataclass, fields
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import InsufficientDataError, InvalidSpectrumError, NumericError
from .objectives import NetworkObjective

#: Errors below this are treated as exact convergence when forming ratios.
TERMINATED = 1e-14
SUPERLINEAR_THRESHOLD = 1e-3
QLINEAR_MARGIN = 1e-6


def c1_constant(mu, L):
    return 2.0 / (mu + L)


def c2_constant(mu, L):
    return 2.0 * mu * L / (mu + L)


def contraction_bound(mu, L, n=1):
    """``sqrt(1 - c2 / (n L))``, clipped to ``[0, 1]``.

    ``c2 / L`` is evaluated as ``2 mu / (mu + L)`` so that ``mu == L`` gives
    exactly zero for ``n = 1``.
    """
    q = 1.0 - (2.0 * mu / (mu + L)) / n
    return math.sqrt(min(max(q, 0.0), 1.0))


def consensus_bound(k, grad_bound, mu_min, lam):
    """Right-hand side ``G sqrt(k) / mu_min / sqrt(1 - lam^2)``; inf when ``lam >= 1``."""
    if lam >= 1.0:
        return math.inf
    return grad_bound * math.sqrt(k) / mu_min / math.sqrt(1.0 - lam * lam)


@dataclass(frozen=True)
class IterationRecord:
    """Metrics for the state reached after ``round`` updates.

    Field order is the CSV column order.
    """

    round: int
    consensus_err: float
    opt_err: float
    ratio: float
    grad_norm_avg: float
    alpha_min: float
    alpha_max: float
    clamp_events: int
    breach_events: int
    bound_consensus: float
    bound_ratio: float

    @classmethod
    def columns(cls):
        return tuple(f.name for f in fields(cls))

    def as_tuple(self):
        return tuple(getattr(self, name) for name in self.columns())


def network_mean(X):
    """Row mean computed about the first row, exact when all rows agree."""
    X = np.asarray(X, dtype=float)
    return X[0] + (X - X[0]).mean(axis=0)


def record_round(state, objective, x_star, *, prev_opt_err=None, alphas=None,
                 lam=0.0, grad_bound=None, clamp_events=0, breach_events=0):
    """Summarize one network state.

    Parameters
    ----------
    state : NetworkState
        Anything with ``X`` (agents x dim), ``G`` (local gradients) and
        ``round``.
    objective : NetworkObjective
    x_star : ndarray
        Network optimum.
    prev_opt_err : float, optional
        ``opt_err`` of the previous round; the ratio is NaN without it.
    alphas : array_like, optional
        Step sizes used on the update that produced ``state``.
    lam : float
        Mixing rate of the weight matrix.
    grad_bound : float, optional
        ``G`` in the consensus bound; defaults to the largest local gradient
        norm in ``state``.
    """
    X = np.asarray(state.X)
    G = np.asarray(state.G)
    x_bar = network_mean(X)
    dev = np.linalg.norm(X - x_bar, axis=1)
    opt_err = float(np.linalg.norm(x_bar - x_star))
    # triangle inequality ||x_i - x*|| <= ||x_i - xbar|| + ||xbar - x*||, per agent
    lhs = np.linalg.norm(X - x_star, axis=1)
    slack = dev + opt_err - lhs
    if np.all(np.isfinite(slack)) and np.any(slack < -1e-12 * (1.0 + lhs)):
        raise NumericError("triangle inequality violated", residual=float(slack.min()))
    if prev_opt_err is None or not prev_opt_err > 0:
        ratio = math.nan
    else:
        ratio = opt_err / prev_opt_err
    if grad_bound is None:
        grad_bound = float(np.linalg.norm(G, axis=1).max())
    alphas = np.atleast_1d(np.asarray(alphas if alphas is not None else np.nan, dtype=float))
    return IterationRecord(
        round=int(state.round),
        consensus_err=float(dev.max()),
        opt_err=opt_err,
        ratio=ratio,
        grad_norm_avg=float(np.linalg.norm(G.mean(axis=0))),
        alpha_min=float(alphas.min()),
        alpha_max=float(alphas.max()),
        clamp_events=int(clamp_events),
        breach_events=int(breach_events),
        bound_consensus=consensus_bound(state.round, grad_bound,
                                        float(objective.mu.min()), lam),
        bound_ratio=contraction_bound(objective.mu_bar, objective.L_bar, objective.n),
    )


class _CentralState(NamedTuple):
    X: np.ndarray
    G: np.ndarray
    round: int


def records_from_trace(trace, objective, x_star):
    """Iteration records for a centralized run, treated as a one-agent network."""
    net = NetworkObjective([objective])
    errs = [float(np.linalg.norm(x - x_star)) for x in trace.iterates]
    G = max(trace.grad_norms)
    records = []
    for k, alpha in enumerate(trace.step_sizes, start=1):
        x = trace.iterates[k]
        clamps, breaches = trace.event_counts[k - 1]
        state = _CentralState(x[None, :], objective.gradient(x)[None, :], k)
        records.append(record_round(state, net, x_star, prev_opt_err=errs[k - 1],
                                    alphas=[alpha], grad_bound=G, clamp_events=clamps,
                                    breach_events=breaches))
    if not records:
        x = trace.iterates[0]
        state = _CentralState(x[None, :], objective.gradient(x)[None, :], 0)
        records.append(record_round(state, net, x_star, grad_bound=G))
    return records


class ConsensusCheck(NamedTuple):
    passed: bool
    min_slack: float
    worst_round: Optional[int]


def check_consensus_bound(records, G, mu_min, lam, atol=1e-9):
    """Verify ``consensus_err(k) <= G sqrt(k)/mu_min/sqrt(1-lam^2) + atol`` for ``k >= 1``."""
    if not lam < 1.0:
        raise InvalidSpectrumError(f"mixing rate must be < 1, got {lam!r}")
    min_slack, worst = math.inf, None
    for rec in records:
        if rec.round < 1:
            continue
        slack = consensus_bound(rec.round, G, mu_min, lam) + atol - rec.consensus_err
        if slack < min_slack:
            min_slack, worst = slack, rec.round
    return ConsensusCheck(min_slack >= 0.0, min_slack, worst)


class ConvergenceVerdict(NamedTuple):
    classification: str
    worst_ratio: float
    rounds_to_eps: Optional[int]


def _opt_errors(records):
    if isinstance(records, np.ndarray):
        return records.astype(float).ravel()
    return np.array([getattr(r, "opt_err", r) for r in records], dtype=float)


def classify_convergence(records, window=5, eps=1e-8):
    """Three-way classification of an error sequence, plus divergence.

    ``records`` is a sequence of :class:`IterationRecord` or a 1-D array of
    ``opt_err`` values. Ratios whose denominator is below ``1e-14`` are
    dropped (the run already converged exactly). Over the last ``window``
    remaining ratios:

    * ``superlinear`` if they are non-increasing and the last is below 1e-3;
    * ``q_linear`` if their maximum is below ``1 - 1e-6``;
    * ``sublinear`` otherwise.

    ``diverged`` wins if any error is non-finite or the last error exceeds ten
    times the first.
    """
    errs = _opt_errors(records)
    if errs.size < 2:
        raise InsufficientDataError("need at least two records")
    hit = np.flatnonzero(errs < eps)
    rounds_to_eps = int(hit[0]) if hit.size else None
    if not np.all(np.isfinite(errs)) or errs[-1] > 10.0 * errs[0]:
        return ConvergenceVerdict("diverged", math.inf, rounds_to_eps)
    live = errs[:-1] >= TERMINATED
    ratios = errs[1:][live] / errs[:-1][live]
    if ratios.size == 0:
        return ConvergenceVerdict("superlinear", 0.0, rounds_to_eps)
    tail = ratios[-window:]
    worst = float(tail.max())
    if np.all(np.diff(tail) <= 0) and tail[-1] < SUPERLINEAR_THRESHOLD:
        label = "superlinear"
    elif worst < 1.0 - QLINEAR_MARGIN:
        label = "q_linear"
    else:
        label = "sublinear"
    return ConvergenceVerdict(label, worst, rounds_to_eps)
