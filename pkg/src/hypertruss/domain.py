"""Search domains, arc-length step constraints and informed decomposition."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .model import Candidate, TrussModel, control_batch

log = logging.getLogger(__name__)


@dataclass
class SearchDomain:
    """Axis-aligned box over ``[u_1 .. u_n, lam]``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float).ravel()
        self.upper = np.asarray(self.upper, dtype=float).ravel()
        if self.lower.shape != self.upper.shape:
            raise ValueError("lower and upper bounds differ in length")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x, atol=0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol))

    def intersect(self, other: "SearchDomain") -> "SearchDomain":
        lo = np.maximum(self.lower, other.lower)
        hi = np.minimum(self.upper, other.upper)
        if np.any(lo > hi):
            raise ValueError("domains do not intersect")
        return SearchDomain(lo, hi)

    def check(self, model: TrussModel):
        if self.dim != model.n_variables:
            raise ValueError(
                f"domain has {self.dim} variables, model needs {model.n_variables}")

    @classmethod
    def uniform(cls, model: TrussModel, displacement, lam) -> "SearchDomain":
        """Same ``(lo, hi)`` for every displacement, plus a ``lam`` range."""
        n = model.n_free
        lo = np.append(np.full(n, displacement[0], dtype=float), lam[0])
        hi = np.append(np.full(n, displacement[1], dtype=float), lam[1])
        return cls(lo, hi)

    @classmethod
    def along_control(cls, model: TrussModel, displacement, lam) -> "SearchDomain":
        """Like :meth:`uniform`, but the control DoF range is read as a range of ``d``.

        For a control point with ``sign = -1`` (e.g. downward apex travel) the
        control variable bounds become ``(-hi, -lo)`` so that ``d`` spans the
        requested interval.
        """
        dom = cls.uniform(model, displacement, lam)
        return with_control_interval(model, dom, displacement)


def with_control_interval(model: TrussModel, domain: SearchDomain, interval) -> SearchDomain:
    """Restrict the control DoF so that ``d`` lies in ``interval``."""
    c = model.control
    if c.mode != "node-axis":
        raise ValueError("control interval restriction needs a node-axis control point")
    j = model.free_dof_index(c.node, c.axis)
    lo, hi = sorted((c.sign * interval[0], c.sign * interval[1]))
    lower, upper = domain.lower.copy(), domain.upper.copy()
    lower[j], upper[j] = lo, hi
    return SearchDomain(lower, upper)


def clamp(candidate, domain: SearchDomain):
    """Componentwise projection into the box.

    Works on a :class:`Candidate` or on a raw ``[u, lam]`` array.
    """
    if isinstance(candidate, Candidate):
        x = candidate.to_vector()
        if x.size != domain.dim:
            raise ValueError("candidate and domain dimensions differ")
        y = np.clip(x, domain.lower, domain.upper)
        same = np.array_equal(x, y)
        return Candidate.from_vector(y, candidate.objective if same else None)
    x = np.asarray(candidate, dtype=float)
    if x.shape[-1] != domain.dim:
        raise ValueError("candidate and domain dimensions differ")
    return np.clip(x, domain.lower, domain.upper)


# -- arc-length step constraints ---------------------------------------------

@dataclass
class ArcStep:
    """Current equilibrated point, optional previous point and step size."""

    d_i: float
    lambda_i: float
    delta: float
    d_prev: Optional[float] = None
    lambda_prev: Optional[float] = None
    scale: tuple = (1.0, 1.0)
    tol: Optional[float] = None

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("arc step size must be positive")
        if (self.d_prev is None) != (self.lambda_prev is None):
            raise ValueError("previous point needs both d and lambda")

    @property
    def tolerance(self) -> float:
        return 0.05 * self.delta if self.tol is None else self.tol


def arc_equality_residual(trial, step: ArcStep) -> float:
    """Distance of ``(d_T, lam_T)`` from the current point minus the step size."""
    d_t, lam_t = trial
    sd, sl = step.scale
    return float(np.hypot(sd * (d_t - step.d_i), sl * (lam_t - step.lambda_i)) - step.delta)


def arc_direction_ok(trial, step: ArcStep) -> bool:
    """No-backtracking test; always true for the first step."""
    if step.d_prev is None:
        return True
    d_t, lam_t = trial
    sd, sl = step.scale
    proj = (sd * sd * (d_t - step.d_i) * (step.d_prev - step.d_i)
            + sl * sl * (lam_t - step.lambda_i) * (step.lambda_prev - step.lambda_i))
    return bool(proj <= 0.0)


def arc_feasible(trial, step: ArcStep) -> bool:
    return abs(arc_equality_residual(trial, step)) <= step.tolerance and arc_direction_ok(trial, step)


# -- informed decomposition ------------------------------------------------------

@dataclass
class DecompositionPlan:
    """Control-point cells, optional staged bounds for the other displacements.

    Each entry of ``variable_stages`` is a ``(lo, hi)`` pair applied to every
    non-control displacement, or a pair of per-variable arrays.
    """

    control_intervals: Sequence
    variable_stages: Sequence = field(default_factory=list)
    trials_per_cell: int = 1

    def __post_init__(self):
        self.control_intervals = [tuple(map(float, iv)) for iv in self.control_intervals]
        if not self.control_intervals:
            raise ValueError("plan needs at least one control interval")
        if self.trials_per_cell < 1:
            raise ValueError("trials_per_cell must be at least 1")
        prev_hi = -np.inf
        for lo, hi in self.control_intervals:
            if lo > hi:
                raise ValueError(f"interval [{lo}, {hi}] is reversed")
            if lo < prev_hi:
                raise ValueError("control intervals overlap or are out of order")
            prev_hi = hi

    @classmethod
    def even(cls, lo, hi, n_cells, trials_per_cell=1, variable_stages=()):
        edges = np.linspace(lo, hi, n_cells + 1)
        return cls(list(zip(edges[:-1], edges[1:])), list(variable_stages), trials_per_cell)

    def cells(self, model: TrussModel, base: SearchDomain):
        """Yield ``(interval, stage_index, domain)`` for every cell."""
        stages = self.variable_stages or [None]
        j = model.free_dof_index(model.control.node, model.control.axis)
        for interval, (s, stage) in itertools.product(self.control_intervals, enumerate(stages)):
            dom = base
            if stage is not None:
                lo, hi = stage
                lower, upper = base.lower.copy(), base.upper.copy()
                others = np.ones(model.n_free, dtype=bool)
                others[j] = False
                lower[:-1][others] = np.broadcast_to(np.asarray(lo, dtype=float), (others.sum(),))
                upper[:-1][others] = np.broadcast_to(np.asarray(hi, dtype=float), (others.sum(),))
                dom = SearchDomain(lower, upper)
            yield interval, (s if stage is not None else None), with_control_interval(model, dom, interval)


def informed_decomposition(model: TrussModel, base_domain: SearchDomain,
                           plan: DecompositionPlan, optimizer) -> list:
    """Run ``trials_per_cell`` optimizations in every cell of the plan.

    ``optimizer`` is an :class:`~hypertruss.optimizers.OptimizerConfig`; each
    run gets a seed derived from the config seed, the cell and the trial.
    Failed runs are kept in the output with their ``error`` set.
    """
    from .optimizers import optimize, derive_seed

    base_domain.check(model)
    records = []
    for c, (interval, stage, dom) in enumerate(plan.cells(model, base_domain)):
        for t in range(plan.trials_per_cell):
            cfg = optimizer.replace(seed=derive_seed(optimizer.seed, c, t))
            rec = optimize(model, dom, cfg)
            rec.cell = c
            rec.interval = interval
            rec.stage = stage
            records.append(rec)
        log.debug("cell %d %s done", c, interval)
    return records


def variable_range_report(records, tol: float) -> dict:
    """Componentwise min/max of optimal records' ``[u, lam]`` vectors.

    Returns ``{}`` when no record reaches ``tol``; otherwise a dict with
    ``lower``, ``upper`` and ``count``.
    """
    xs = [r.best.to_vector() for r in records
          if r.best is not None and r.best.objective is not None and r.best.objective <= tol]
    if not xs:
        return {}
    xs = np.vstack(xs)
    return {"lower": xs.min(axis=0), "upper": xs.max(axis=0), "count": len(xs)}


def control_values(model: TrussModel, X) -> np.ndarray:
    """``d`` for stacked ``[u, lam]`` rows."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.asarray(control_batch(model, X[:, :-1]))
