"""scikit-learn style front ends for the solvers."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .bb_core import StepRule, solve_centralized
from .diagnostics import records_from_trace
from .dist_engine import simulate
from .objectives import LeastSquaresObjective, optimal_point


class _RuleParams:
    def _rule(self):
        return StepRule(self.rule, alpha0=self.alpha0, clamp_mode=self.clamp_mode,
                        alternate_every=self.alternate_every)


class BBSolver(_RuleParams, BaseEstimator):
    """Centralized gradient descent with a BB (or baseline) step rule.

    ``fit`` takes an objective rather than data; the minimizer ends up in
    ``x_`` and the full run in ``trace_``.
    """

    def __init__(self, rule="bb1", alpha0=None, clamp_mode="raw",
                 alternate_every=None, eps=1e-8, max_iter=1000):
        self.rule = rule
        self.alpha0 = alpha0
        self.clamp_mode = clamp_mode
        self.alternate_every = alternate_every
        self.eps = eps
        self.max_iter = max_iter

    def fit(self, objective, x0=None):
        if x0 is None:
            x0 = np.zeros(objective.dim)
        self.trace_ = solve_centralized(objective, x0, self._rule(),
                                        eps=self.eps, max_iter=self.max_iter)
        self.x_ = self.trace_.x
        self.n_iter_ = self.trace_.n_iter
        self.converged_ = self.trace_.converged
        return self

    def records(self, objective):
        """Per-iteration metrics of the last fit against ``objective``'s optimum."""
        check_is_fitted(self, "trace_")
        return records_from_trace(self.trace_, objective, optimal_point(objective))


class DistributedBBSolver(_RuleParams, BaseEstimator):
    """Distributed BB gradient descent over a fixed mixing matrix."""

    def __init__(self, rule="bb1", alpha0=None, clamp_mode="raw",
                 alternate_every=None, eps=1e-8, max_iter=1000):
        self.rule = rule
        self.alpha0 = alpha0
        self.clamp_mode = clamp_mode
        self.alternate_every = alternate_every
        self.eps = eps
        self.max_iter = max_iter

    def fit(self, objective, mixing, x0=None):
        run = simulate(objective, mixing, self._rule(), x0,
                       eps=self.eps, max_iter=self.max_iter)
        self.run_ = run
        self.X_ = run.state.X
        self.x_bar_ = run.state.x_bar
        self.records_ = run.records
        self.n_iter_ = run.n_iter
        self.converged_ = run.converged
        return self


class BBLinearRegression(_RuleParams, RegressorMixin, BaseEstimator):
    """Ordinary least squares fitted by BB gradient descent.

    Minimizes ``||X w - y||^2`` (after centering when ``fit_intercept``).
    The design must have full column rank so the problem is strongly convex.

    Examples
    --------
    >>> import numpy as np
    >>> X = np.array([[0.0], [1.0], [2.0]])
    >>> reg = BBLinearRegression().fit(X, [1.0, 3.0, 5.0])
    >>> round(float(reg.coef_[0]), 6), round(float(reg.intercept_), 6)
    (2.0, 1.0)
    """

    def __init__(self, fit_intercept=True, rule="bb1", alpha0=None, clamp_mode="raw",
                 alternate_every=None, eps=1e-10, max_iter=10_000):
        self.fit_intercept = fit_intercept
        self.rule = rule
        self.alpha0 = alpha0
        self.clamp_mode = clamp_mode
        self.alternate_every = alternate_every
        self.eps = eps
        self.max_iter = max_iter

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        X = X.astype(float)
        y = y.astype(float)
        if self.fit_intercept:
            x_mean, y_mean = X.mean(axis=0), y.mean()
        else:
            x_mean, y_mean = np.zeros(X.shape[1]), 0.0
        objective = LeastSquaresObjective(X - x_mean, y - y_mean)
        trace = solve_centralized(objective, np.zeros(X.shape[1]), self._rule(),
                                  eps=self.eps, max_iter=self.max_iter)
        self.coef_ = trace.x
        self.intercept_ = float(y_mean - x_mean @ self.coef_)
        self.n_iter_ = trace.n_iter
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but the model was fitted with "
                f"{self.n_features_in_}")
        return X @ self.coef_ + self.intercept_
