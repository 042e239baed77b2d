"""
Self-certification suite behind ``distbb verify``.

Each check rebuilds its instances from one seed and returns a
:class:`CheckResult`; nothing is written to disk.
"""

import math
import time
from typing import NamedTuple

import numpy as np

from ..bb_core import StepRule, harmonic_step, solve_centralized
from ..diagnostics import check_consensus_bound, contraction_bound
from ..dist_engine import simulate
from ..objectives import (NetworkObjective, QuadraticObjective, optimal_point,
                          random_network_objective)
from ..topology import uniform_weights
from .presets import preset_configs
from .runner import execute


class CheckResult(NamedTuple):
    criterion: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.criterion}: {self.name} ({self.detail}; {self.seconds:.2f}s)"


def _rng(seed, tag):
    return np.random.default_rng(np.random.SeedSequence([seed, tag]))


def _random_quadratic(rng, p=6):
    cap = float(rng.uniform(2.0, 200.0))
    net = random_network_objective(1, p, cap, seed=int(rng.integers(2**32)))
    return net.agents[0]


def _errors(iterates, x_star):
    return np.array([np.linalg.norm(x - x_star) for x in iterates])


def check_superlinear(seed=0):
    """Criterion 1: BB on ``x.x/2`` terminates after one warm-up and one BB step."""
    central_cfg, dist_cfg = preset_configs("superlinear", ".", seed)
    central, _, _ = execute(central_cfg)
    distributed, _, _ = execute(dist_cfg)
    at2 = {r.round: r.opt_err for r in central}.get(2, math.inf)
    dist_best = min((r.opt_err for r in distributed if r.round <= 5), default=math.inf)
    ok = at2 < 1e-12 and dist_best < 1e-10
    return ok, f"centralized err at k=2 {at2:.1e}, distributed err within 5 rounds {dist_best:.1e}"


def check_step_sandwich(seed=0):
    """Criterion 4: ``1/L <= 2/(mu+L) <= 1/mu`` and raw BB steps inside ``[1/L, 1/mu]``."""
    rng = _rng(seed, 4)
    mu = np.exp(rng.uniform(-6.0, 6.0, 1000))
    L = mu * np.exp(rng.uniform(0.0, 8.0, 1000))
    L[:50] = mu[:50]
    c1 = np.array([harmonic_step(a, b) for a, b in zip(mu, L)])
    slack = float(min((c1 - 1.0 / L).min(), (1.0 / mu - c1).min()))
    worst = math.inf
    for _ in range(20):
        f = _random_quadratic(rng)
        x0 = rng.standard_normal(f.dim)
        for variant in ("bb1", "bb2"):
            trace = solve_centralized(f, x0, StepRule(variant), eps=1e-10, max_iter=200)
            steps = np.array(trace.step_sizes[1:])
            if steps.size:
                worst = min(worst, float((steps - 1.0 / f.L).min()),
                            float((1.0 / f.mu - steps).min()))
    ok = slack >= -1e-15 and worst >= -1e-10
    return ok, f"min sandwich slack {slack:.1e}, min BB range slack {worst:.1e}"


def check_qlinear(seed=0):
    """Criterion 5: error ratios under ``lemma_range`` respect ``sqrt(1 - c2/L)``."""
    rng = _rng(seed, 5)
    margin = math.inf
    for _ in range(20):
        f = _random_quadratic(rng)
        x_star = optimal_point(f)
        bound = contraction_bound(f.mu, f.L)
        x0 = rng.standard_normal(f.dim) * 10
        for variant in ("bb1", "bb2"):
            trace = solve_centralized(f, x0, StepRule(variant, clamp_mode="lemma_range"),
                                      eps=1e-8, max_iter=2000)
            err = _errors(trace.iterates, x_star)
            live = err[:-1] >= 1e-14
            if live.any():
                ratios = err[1:][live] / err[:-1][live]
                margin = min(margin, bound + 1e-9 - float(ratios.max()))
    f = QuadraticObjective(3.0 * np.eye(5), rng.standard_normal(5))
    equal_bound = contraction_bound(f.mu, f.L)
    trace = solve_centralized(f, rng.standard_normal(5), StepRule("bb1", clamp_mode="lemma_range"))
    final = float(np.linalg.norm(trace.x - optimal_point(f)))
    ok = margin >= 0 and equal_bound == 0.0 and trace.converged and final < 1e-12
    return ok, (f"min ratio margin {margin:.1e}; mu=L bound {equal_bound}, "
                f"terminated after {trace.n_iter} step(s)")


def check_consensus(seed=0):
    """Criterion 6: consensus deviation bound on every rule of the 100-node preset."""
    worst = math.inf
    for cfg in preset_configs("fig2_distributed", ".", seed):
        records, run, problem = execute(cfg)
        res = check_consensus_bound(records, run.grad_bound,
                                    float(problem.objective.mu.min()), run.lam)
        worst = min(worst, res.min_slack)
    return worst >= 0, f"min slack over 4 rules x 50 rounds {worst:.3g}"


def check_reduction(seed=0):
    """Criterion 7: one-agent and identical-agent runs replay the centralized trajectory."""
    rng = _rng(seed, 7)
    worst = 0.0
    for _ in range(5):
        f = _random_quadratic(rng)
        x0 = rng.standard_normal(f.dim) * 10
        for variant in ("bb1", "bb2"):
            rule = StepRule(variant)
            trace = solve_centralized(f, x0, rule, eps=1e-8, max_iter=500)
            for n in (1, 10):
                seen = []
                W = np.eye(1) if n == 1 else uniform_weights(n)
                simulate(NetworkObjective([f] * n), W, rule, x0, eps=1e-8, max_iter=500,
                         callback=lambda s: seen.append(s.x_bar))
                if len(seen) != len(trace.iterates):
                    worst = math.inf
                    continue
                worst = max(worst, max(float(np.linalg.norm(a - b))
                                       for a, b in zip(seen, trace.iterates)))
    return worst <= 1e-12, f"max per-iterate deviation {worst:.1e}"


CHECKS = (
    (1, "superlinear exact case", check_superlinear),
    (4, "step-size sandwich", check_step_sandwich),
    (5, "centralized Q-linear certificate", check_qlinear),
    (6, "consensus-deviation bound", check_consensus),
    (7, "reduction oracle", check_reduction),
)


def run_checks(seed=0):
    results = []
    for criterion, name, fn in CHECKS:
        start = time.perf_counter()
        passed, detail = fn(seed)
        results.append(CheckResult(criterion, name, bool(passed), detail,
                                   time.perf_counter() - start))
    return results

