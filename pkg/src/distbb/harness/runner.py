"""Build a seeded problem instance from a config and run it."""

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..bb_core import solve_centralized
from ..diagnostics import IterationRecord, records_from_trace
from ..dist_engine import simulate
from ..objectives import (NetworkObjective, identity_network, optimal_point,
                          random_least_squares, random_network_objective)
from ..topology import build_mixing, make_graph
from .csvio import emit_csv

X0_NORM = 10.0


@dataclass
class Problem:
    objective: NetworkObjective
    x0: np.ndarray
    graph: object = None
    mixing: object = None


@dataclass
class RunResult:
    config: object
    records: list
    problem: Problem
    outcome: object
    csv_path: Path = None
    meta_path: Path = None

    @property
    def final(self):
        return self.records[-1]


def seed_streams(seed):
    """Independent streams for graph, weights, objective and x0."""
    graph, weights, objective, x0 = np.random.SeedSequence(seed).spawn(4)
    return {"graph": graph, "weights": weights, "objective": objective, "x0": x0}


def initial_point(p, stream):
    """Standard-normal draw rescaled to norm 10."""
    z = np.random.default_rng(stream).standard_normal(p)
    return X0_NORM * z / np.linalg.norm(z)


def build_problem(config):
    streams = seed_streams(config.seed)
    n, p = config.n, config.p
    if config.objective == "quadratic_network":
        objective = random_network_objective(n, p, config.condition_cap,
                                             seed=streams["objective"], aligned=config.aligned)
    elif config.objective == "least_squares":
        objective = NetworkObjective(
            random_least_squares(config.m, p, config.condition_cap, seed=s)
            for s in streams["objective"].spawn(n))
    else:
        objective = identity_network(n, p)
    x0 = initial_point(p, streams["x0"])
    if config.mode == "centralized":
        return Problem(objective, x0)
    graph = make_graph(config.topology, n, seed=streams["graph"], prob=config.er_prob)
    mixing = build_mixing(graph, config.weights, seed=streams["weights"])
    return Problem(objective, x0, graph, mixing)


def execute(config, problem=None):
    """Run ``config`` and return ``(records, outcome, problem)`` without writing files."""
    problem = problem or build_problem(config)
    rule = config.step_rule
    if config.mode == "centralized":
        f = problem.objective.agents[0]
        trace = solve_centralized(f, problem.x0, rule, eps=config.eps, max_iter=config.max_iter)
        return records_from_trace(trace, f, optimal_point(f)), trace, problem
    run = simulate(problem.objective, problem.mixing, rule, problem.x0,
                   eps=config.eps, max_iter=config.max_iter)
    return run.records, run, problem


def metadata(config, outcome):
    return {
        "config": asdict(config),
        "seed": config.seed,
        "columns": list(IterationRecord.columns()),
        "converged": bool(outcome.converged),
        "rounds": int(outcome.n_iter),
    }


def run_experiment(config, write=True):
    """Run ``config``; with ``write`` also emit the CSV and a ``.json`` sidecar."""
    records, outcome, problem = execute(config)
    result = RunResult(config, records, problem, outcome)
    if write:
        csv_path = Path(config.output_path)
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        emit_csv(records, csv_path)
        meta_path = csv_path.with_suffix(".json")
        meta_path.write_text(json.dumps(metadata(config, outcome), indent=2) + "\n",
                             encoding="utf-8")
        result.csv_path, result.meta_path = csv_path, meta_path
    return result
