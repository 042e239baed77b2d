"""
Barzilai-Borwein step sizes, baseline step rules and the centralized solver.

The BB steps are scalar secant approximations of the inverse Hessian built
from the displacement ``s = x(k) - x(k-1)`` and the gradient change
``y = g(k) - g(k-1)``::

    bb1 = s.s / s.y        bb2 = s.y / y.y

For a quadratic with Hessian ``H`` both are inverse Rayleigh quotients of
``H``, hence lie in ``[1/L, 1/mu]``.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from ._validation import check_curvature_pair, check_positive, check_vector
from .exceptions import ConfigurationError, DivergenceError

#: Relative threshold below which ``s.y`` counts as a curvature breach.
CURVATURE_DELTA = 1e-12


class StepVariant(str, Enum):
    BB1 = "bb1"
    BB2 = "bb2"
    CONST_INV_L = "const_inv_l"
    CONST_INV_MU = "const_inv_mu"
    CONST_HARMONIC = "const_harmonic"
    DECAY = "decay"

    @property
    def is_bb(self):
        return self in (StepVariant.BB1, StepVariant.BB2)


class ClampMode(str, Enum):
    RAW = "raw"
    BB_RANGE = "bb_range"
    LEMMA_RANGE = "lemma_range"


class CurvatureBreach(ArithmeticError):
    """``s.y`` is not safely positive, so a BB step is undefined."""


class SecantPairVanished(ArithmeticError):
    """The iterate (or gradient) did not change; the BB quotient is 0/0."""


def harmonic_step(mu, L):
    """``2 / (mu + L)``, the optimal constant step for an ``(mu, L)`` quadratic."""
    return 2.0 / (mu + L)


def bb1_step(s, y, delta=CURVATURE_DELTA):
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    if s.shape != y.shape:
        raise ConfigurationError(f"s and y differ in shape: {s.shape} vs {y.shape}")
    ss = float(s @ s)
    if ss == 0.0:
        raise SecantPairVanished("zero displacement")
    sy = float(s @ y)
    if sy <= delta * np.sqrt(ss) * np.linalg.norm(y):
        raise CurvatureBreach(f"s.y = {sy!r}")
    return ss / sy


def bb2_step(s, y, delta=CURVATURE_DELTA):
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    if s.shape != y.shape:
        raise ConfigurationError(f"s and y differ in shape: {s.shape} vs {y.shape}")
    yy = float(y @ y)
    if yy == 0.0 or not np.any(s):
        raise SecantPairVanished("zero gradient change")
    sy = float(s @ y)
    if sy <= delta * np.linalg.norm(s) * np.sqrt(yy):
        raise CurvatureBreach(f"s.y = {sy!r}")
    return sy / yy


def safeguard(alpha, mu, L, mode=ClampMode.RAW):
    """Clamp ``alpha`` into the interval selected by ``mode``.

    ``raw`` leaves it alone, ``bb_range`` uses ``[1/L, 1/mu]`` and
    ``lemma_range`` uses ``[1/L, 2/(mu+L)]``.
    """
    mode = ClampMode(mode)
    if mode is ClampMode.RAW:
        return alpha
    mu, L = check_curvature_pair(mu, L)
    upper = 1.0 / mu if mode is ClampMode.BB_RANGE else harmonic_step(mu, L)
    return min(max(alpha, 1.0 / L), upper)


class StepOutcome(NamedTuple):
    alpha: float
    clamped: bool = False
    breached: bool = False


@dataclass(frozen=True)
class StepRule:
    """Step-size policy.

    Parameters
    ----------
    variant : StepVariant or str
        ``bb1``, ``bb2``, ``const_inv_l``, ``const_inv_mu``,
        ``const_harmonic`` or ``decay`` (``1/k`` on the k-th update).
    alpha0 : float, optional
        Warm-up step for the BB variants, used on the first update when no
        secant pair exists yet. Defaults to ``1/L``.
    clamp_mode : ClampMode or str
        Safeguard applied to BB steps.
    alternate_every : int, optional
        If set, BB rules switch between ``bb1`` and ``bb2`` every
        ``alternate_every`` updates, starting with ``variant``.
    """

    variant: StepVariant = StepVariant.BB1
    alpha0: float = None
    clamp_mode: ClampMode = ClampMode.RAW
    alternate_every: int = field(default=None)

    def __post_init__(self):
        try:
            object.__setattr__(self, "variant", StepVariant(self.variant))
            object.__setattr__(self, "clamp_mode", ClampMode(self.clamp_mode))
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        if self.alpha0 is not None:
            check_positive(self.alpha0, "alpha0")
        if self.alternate_every is not None:
            check_positive(self.alternate_every, "alternate_every", integer=True)

    def variant_at(self, update):
        """Variant in force on the ``update``-th update (1-based)."""
        if self.alternate_every is None or not self.variant.is_bb:
            return self.variant
        if ((update - 1) // self.alternate_every) % 2 == 0:
            return self.variant
        return StepVariant.BB2 if self.variant is StepVariant.BB1 else StepVariant.BB1

    def fixed_step(self, mu, L, update):
        """Step for the non-BB variants on the ``update``-th update."""
        v = self.variant
        if v is StepVariant.CONST_INV_L:
            return 1.0 / L
        if v is StepVariant.CONST_INV_MU:
            return 1.0 / mu
        if v is StepVariant.CONST_HARMONIC:
            return harmonic_step(mu, L)
        if v is StepVariant.DECAY:
            return 1.0 / update
        raise ConfigurationError(f"{v.value} has no fixed step")

    def initial_step(self, mu, L):
        if self.variant.is_bb:
            return self.alpha0 if self.alpha0 is not None else 1.0 / L
        return self.fixed_step(mu, L, 1)

    def next_step(self, update, s, y, mu, L, previous):
        """Step for the ``update``-th update (``update >= 2``).

        BB variants fall back to ``2/(mu+L)`` on a curvature breach and keep
        ``previous`` when the secant pair vanished.
        """
        if not self.variant.is_bb:
            return StepOutcome(self.fixed_step(mu, L, update))
        variant = self.variant_at(update)
        formula = bb1_step if variant is StepVariant.BB1 else bb2_step
        try:
            raw = formula(s, y)
        except CurvatureBreach:
            return StepOutcome(harmonic_step(mu, L), breached=True)
        except SecantPairVanished:
            return StepOutcome(previous)
        alpha = safeguard(raw, mu, L, self.clamp_mode)
        return StepOutcome(alpha, clamped=alpha != raw)


def as_rule(rule):
    """Accept a :class:`StepRule`, a variant name, or a mapping of fields."""
    if isinstance(rule, StepRule):
        return rule
    if isinstance(rule, dict):
        return StepRule(**rule)
    return StepRule(rule)


@dataclass
class SolverTrace:
    """History of one centralized run.

    ``iterates`` and ``grad_norms`` include the starting point, so they are
    one longer than ``step_sizes``.
    """

    iterates: list = field(default_factory=list)
    step_sizes: list = field(default_factory=list)
    grad_norms: list = field(default_factory=list)
    clamp_events: int = 0
    curvature_breaches: int = 0
    converged: bool = False
    #: cumulative ``(clamp_events, curvature_breaches)`` after each update
    event_counts: list = field(default_factory=list)

    @property
    def n_iter(self):
        return len(self.step_sizes)

    @property
    def x(self):
        return self.iterates[-1]


def solve_centralized(obj, x0, rule=StepRule(), eps=1e-8, max_iter=1000):
    """Gradient descent ``x(k+1) = x(k) - alpha(k) grad f(x(k))``.

    Stops once ``||grad f(x(k))|| < eps`` or after ``max_iter`` updates.

    Parameters
    ----------
    obj : objective
        Anything exposing ``gradient``, ``mu``, ``L`` and ``dim``.
    x0 : array_like
        Starting point.
    rule : StepRule or str
        Step policy.
    eps : float
        Gradient-norm tolerance.
    max_iter : int
        Update budget.

    Returns
    -------
    SolverTrace
    """
    rule = as_rule(rule)
    check_positive(eps, "eps")
    check_positive(max_iter, "max_iter", integer=True)
    mu, L = obj.mu, obj.L
    x = check_vector(x0, dim=obj.dim, name="x0")
    g = obj.gradient(x)
    trace = SolverTrace(iterates=[x], grad_norms=[float(np.linalg.norm(g))])
    alpha = rule.initial_step(mu, L)
    x_prev = g_prev = None
    # overflow on a diverging run is reported as DivergenceError, not a warning
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(max_iter):
            if trace.grad_norms[-1] < eps:
                trace.converged = True
                break
            if k >= 1:
                out = rule.next_step(k + 1, x - x_prev, g - g_prev, mu, L, alpha)
                alpha = out.alpha
                trace.clamp_events += out.clamped
                trace.curvature_breaches += out.breached
            x_new = x - alpha * g
            if not np.all(np.isfinite(x_new)):
                raise DivergenceError(k + 1)
            x_prev, g_prev = x, g
            x, g = x_new, obj.gradient(x_new)
            trace.iterates.append(x)
            trace.step_sizes.append(alpha)
            trace.grad_norms.append(float(np.linalg.norm(g)))
            trace.event_counts.append((trace.clamp_events, trace.curvature_breaches))
        else:
            trace.converged = trace.grad_norms[-1] < eps
    return trace
