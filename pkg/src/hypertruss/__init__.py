"""Equilibrium-path analysis of space trusses with gradient-free optimizers."""
from .analysis import DBSCAN, convergence_profile, dbscan, path_points, success_rate
from .benchmarks import BENCHMARK_IDS, build_benchmark, get_benchmark, von_mises_load_factor
from .domain import ArcStep, DecompositionPlan, SearchDomain, informed_decomposition
from .hypersphere import HypersphereTracer, SphereSchedule, trace_path
from .io import dump_model, load_model
from .model import (Candidate, ControlPoint, DegenerateMemberError, InvalidModelError,
                    MemberSpec, NodeSpec, TrussModel, build_model, objective, objective_batch)
from .optimizers import OptimizerConfig, RunRecord, optimize

__version__ = "0.1.0"

__all__ = [
    "ArcStep", "BENCHMARK_IDS", "Candidate", "ControlPoint", "DBSCAN", "DecompositionPlan",
    "DegenerateMemberError", "HypersphereTracer", "InvalidModelError", "MemberSpec", "NodeSpec",
    "OptimizerConfig", "RunRecord", "SearchDomain", "SphereSchedule", "TrussModel",
    "build_benchmark", "build_model", "convergence_profile", "dbscan", "dump_model",
    "get_benchmark", "informed_decomposition", "load_model", "objective", "objective_batch",
    "optimize", "path_points", "success_rate", "trace_path", "von_mises_load_factor",
]
