"""Gradient-free optimizers sharing one bounded-minimization contract.

Algorithm ids accepted by :class:`OptimizerConfig`: ``de-rand-1-bin``,
``de-best-2-bin``, ``pso-std``, ``pso-const`` and ``sa``.
"""
from __future__ import annotations

import numpy as np

from .base import (BaseOptimizer, InvalidConfigError, OptimizeResult, OptimizerConfig,
                   RunRecord, derive_seed, mean_pairwise_distance, run_timed)
from .de import DifferentialEvolution, de_crossover_binomial, de_mutate
from .pso import ParticleSwarm, constriction_factor, pso_step
from .sa import SimulatedAnnealing, metropolis_accept, sa_step

ALGORITHMS = {
    "de-rand-1-bin": (DifferentialEvolution, {"variant": "rand-1"}),
    "de-best-2-bin": (DifferentialEvolution, {"variant": "best-2"}),
    "pso-std": (ParticleSwarm, {"variant": "standard"}),
    "pso-const": (ParticleSwarm, {"variant": "constriction"}),
    "sa": (SimulatedAnnealing, {}),
}


def optimize(model, domain, config: OptimizerConfig, filter=None) -> RunRecord:
    """Minimize the equilibrium objective of ``model`` inside ``domain``.

    ``filter`` is an optional :class:`~hypertruss.domain.ArcStep`; when given,
    the record's ``feasible`` flag tells whether the best point satisfies the
    step-size band and the no-backtracking rule.
    """
    from ..domain import arc_feasible
    from ..model import Candidate, control_batch, objective_batch

    domain.check(model)
    opt = config.build()
    result, elapsed = run_timed(
        lambda: opt.minimize(lambda X: objective_batch(model, X), domain.lower, domain.upper))
    best = Candidate.from_vector(result.x, result.fun)
    feasible = None
    if filter is not None:
        feasible = arc_feasible((control_batch(model, best.u), best.lam), filter)
    return RunRecord(
        config=config.to_dict(),
        best=best,
        generations_used=result.nit,
        history=result.history,
        converged=bool(result.nit and result.history[-1] <= config.target_objective),
        wall_time=elapsed,
        diversity=result.diversity,
        seed=config.seed,
        feasible=feasible,
    )


__all__ = [
    "ALGORITHMS", "BaseOptimizer", "DifferentialEvolution", "InvalidConfigError",
    "OptimizeResult", "OptimizerConfig", "ParticleSwarm", "RunRecord", "SimulatedAnnealing",
    "constriction_factor", "de_crossover_binomial", "de_mutate", "derive_seed",
    "mean_pairwise_distance", "metropolis_accept", "optimize", "pso_step", "sa_step",
]
