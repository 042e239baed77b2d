"""
Named experiments that regenerate the reference figures.

``fig1_centralized``
    BB1 against the 1/k decaying step on a 10x10 least-squares problem.
``fig2_distributed``
    100 agents in dimension 10 comparing the constant steps 1/L_i, 1/mu_i,
    2/(mu_i + L_i) with BB1.
``superlinear``
    ``f(x) = x.x / 2``, centralized and over 10 identical agents; checks that
    the BB step lands exactly on the minimizer.

Every rule runs for the full 50 rounds: the gradient tolerance is set far
below anything reachable so that curves have equal length.
"""

from pathlib import Path

from ..exceptions import UsageError, VerificationError
from .config import build_config
from .runner import run_experiment

ROUNDS = 50
# never reached, so every run records all ROUNDS rounds
FULL_RUN_EPS = 1e-300

FIG1_RULES = ("bb1", "decay")
FIG2_RULES = ("const_inv_l", "const_inv_mu", "const_harmonic", "bb1")

_FIG1 = dict(mode="centralized", objective="least_squares", p=10, m=10,
             condition_cap=30, max_iter=ROUNDS, eps=FULL_RUN_EPS)
_FIG2 = dict(mode="distributed", objective="quadratic_network", n=100, p=10,
             condition_cap=30, aligned=True, topology="complete", weights="sinkhorn",
             max_iter=ROUNDS, eps=FULL_RUN_EPS)
_SUPERLINEAR = dict(objective="identity", p=10, rule="bb1", alpha0=0.5,
                    max_iter=ROUNDS, eps=1e-8)

PRESETS = ("fig1_centralized", "fig2_distributed", "superlinear")


def preset_configs(name, out_dir, seed=0):
    """Configs (one per CSV) that make up preset ``name``."""
    out = Path(out_dir)
    if name == "fig1_centralized":
        return [build_config({**_FIG1, "rule": r, "seed": seed,
                              "output_path": str(out / f"{name}_{r}.csv")})
                for r in FIG1_RULES]
    if name == "fig2_distributed":
        return [build_config({**_FIG2, "rule": r, "seed": seed,
                              "output_path": str(out / f"{name}_{r}.csv")})
                for r in FIG2_RULES]
    if name == "superlinear":
        return [
            build_config({**_SUPERLINEAR, "mode": "centralized", "seed": seed,
                          "output_path": str(out / f"{name}_centralized.csv")}),
            build_config({**_SUPERLINEAR, "mode": "distributed", "n": 10,
                          "weights": "uniform", "seed": seed,
                          "output_path": str(out / f"{name}_distributed.csv")}),
        ]
    raise UsageError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


def _check_superlinear(central, distributed):
    by_round = {r.round: r.opt_err for r in central.records}
    if not by_round.get(2, float("inf")) < 1e-12:
        raise VerificationError(
            f"centralized run did not terminate at round 2 (records: {by_round})")
    early = [r.opt_err for r in distributed.records if r.round <= 5]
    if not early or not min(early) < 1e-10:
        raise VerificationError("distributed average did not reach 1e-10 within 5 rounds")


def run_preset(name, out_dir, seed=0):
    """Run preset ``name``, writing one CSV (plus sidecar) per rule into ``out_dir``."""
    results = [run_experiment(c) for c in preset_configs(name, out_dir, seed)]
    if name == "superlinear":
        _check_superlinear(*results)
    return results
