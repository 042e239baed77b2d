"""Centralized and distributed Barzilai-Borwein gradient descent with bound diagnostics."""

from .bb_core import (ClampMode, SolverTrace, StepRule, StepVariant, bb1_step, bb2_step,
                      harmonic_step, safeguard, solve_centralized)
from .diagnostics import (IterationRecord, check_consensus_bound, classify_convergence,
                          consensus_bound, contraction_bound, record_round)
from .dist_engine import consensus_round, local_bb_step, run_distributed, simulate
from .estimators import BBLinearRegression, BBSolver, DistributedBBSolver
from .objectives import (LeastSquaresObjective, NetworkObjective, QuadraticObjective,
                         curvature_constants, optimal_point)
from .topology import Graph, MixingMatrix, build_mixing, make_graph

__version__ = "0.1.0"

__all__ = [
    "BBLinearRegression", "BBSolver", "ClampMode", "DistributedBBSolver", "Graph",
    "IterationRecord", "LeastSquaresObjective", "MixingMatrix", "NetworkObjective",
    "QuadraticObjective", "SolverTrace", "StepRule", "StepVariant", "bb1_step", "bb2_step",
    "build_mixing", "check_consensus_bound", "classify_convergence", "consensus_bound",
    "consensus_round", "contraction_bound", "curvature_constants", "harmonic_step",
    "local_bb_step", "make_graph", "optimal_point", "record_round", "run_distributed",
    "safeguard", "simulate", "solve_centralized",
]
