"""Shared optimizer contract: configuration, run records and the base class."""
from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.spatial.distance import pdist
from sklearn.base import BaseEstimator

from ..model import Candidate


class InvalidConfigError(ValueError):
    pass


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministic 63-bit child seed for a sub-run identified by ``keys``."""
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), *[int(k) for k in keys]])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


@dataclass
class OptimizerConfig:
    """Algorithm id, budget, stopping target, seed and algorithm parameters."""

    algorithm: str = "de-rand-1-bin"
    population_size: int = 50
    max_generations: int = 1000
    target_objective: float = 1e-5
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        from . import ALGORITHMS

        if self.algorithm not in ALGORITHMS:
            raise InvalidConfigError(
                f"unknown algorithm {self.algorithm!r}; choose from {sorted(ALGORITHMS)}")
        if self.max_generations < 1:
            raise InvalidConfigError("max_generations must be at least 1")
        if not self.target_objective > 0:
            raise InvalidConfigError("target_objective must be positive")
        if self.algorithm.startswith("de") and self.population_size < 4:
            raise InvalidConfigError("differential evolution needs population_size >= 4")
        if self.population_size < 1:
            raise InvalidConfigError("population_size must be positive")
        self.params = dict(self.params)

    def replace(self, **changes) -> "OptimizerConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def build(self) -> "BaseOptimizer":
        from . import ALGORITHMS

        cls, preset = ALGORITHMS[self.algorithm]
        kwargs = dict(preset)
        kwargs.update(self.params)
        try:
            return cls(population_size=self.population_size,
                       max_generations=self.max_generations,
                       target_objective=self.target_objective,
                       random_state=self.seed, **kwargs)
        except TypeError as exc:
            raise InvalidConfigError(str(exc)) from exc


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    nit: int
    history: np.ndarray
    diversity: np.ndarray
    nfev: int


@dataclass
class RunRecord:
    """Trace of one optimizer run."""

    config: dict
    best: Optional[Candidate]
    generations_used: int
    history: np.ndarray
    converged: bool
    wall_time: float
    diversity: np.ndarray = field(default_factory=lambda: np.zeros(0))
    seed: int = 0
    feasible: Optional[bool] = None
    error: Optional[str] = None
    cell: Optional[int] = None
    interval: Optional[tuple] = None
    stage: Optional[int] = None

    @property
    def final_objective(self) -> float:
        return float(self.history[-1]) if len(self.history) else np.inf


class BaseOptimizer(BaseEstimator):
    """Bounded minimizer of a population-vectorized objective.

    Subclasses implement :meth:`_run`. ``func`` maps an ``(n, dim)`` array to
    ``n`` objective values; non-finite values count as rejected candidates.
    """

    def minimize(self, func: Callable, lower, upper) -> OptimizeResult:
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if lower.shape != upper.shape or np.any(lower > upper):
            raise InvalidConfigError("invalid bounds")
        self._validate_params()
        rng = np.random.default_rng(self.random_state)
        counter = _CountingObjective(func)
        x, fun, history, diversity = self._run(counter, lower, upper, rng)
        history = np.asarray(history, dtype=float)
        return OptimizeResult(np.asarray(x, dtype=float), float(fun), len(history), history,
                              np.asarray(diversity, dtype=float), counter.nfev)

    def _validate_params(self):
        pass

    def _run(self, func, lower, upper, rng):
        raise NotImplementedError

    def _done(self, best: float) -> bool:
        return best <= self.target_objective


class _CountingObjective:
    def __init__(self, func):
        self.func = func
        self.nfev = 0

    def __call__(self, X):
        X = np.atleast_2d(X)
        self.nfev += X.shape[0]
        f = np.asarray(self.func(X), dtype=float).reshape(X.shape[0])
        return np.where(np.isfinite(f), f, np.inf)


def mean_pairwise_distance(pop) -> float:
    if len(pop) < 2:
        return 0.0
    return float(pdist(pop).mean())


def run_timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0
