"""Adaptive search-space decomposition along the equilibrium path.

Each sphere is a box of half-width ``r`` on every displacement (and
``r * lambda_ratio`` on the load multiplier) around the latest equilibrated
center. A batch of optimizer trials runs inside the box; the next center is
the optimal trial farthest from the current one in the ``(d, lam)`` plane
that does not point back toward the previous center.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator

from .domain import SearchDomain
from .model import Candidate, TrussModel, control_batch, objective_batch
from .optimizers import OptimizerConfig, derive_seed, optimize

log = logging.getLogger(__name__)

STALL = "buckling-point stall"
REACHED = "d-max reached"
EXHAUSTED = "max-spheres reached"


class SeedSphereError(RuntimeError):
    """No equilibrated trial could be found in the seed sphere."""


class NoOptimalTrialError(RuntimeError):
    pass


class NoForwardTrialError(RuntimeError):
    pass


class RadiusExhausted(RuntimeError):
    pass


@dataclass
class Hypersphere:
    center: Candidate
    radius: float
    index: int = 0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("sphere radius must be positive")


@dataclass
class SphereSchedule:
    """Radius policy applied when a sphere fails to advance."""

    mode: str = "fixed"
    r0: float = 5.0
    additive_increment: float = 5.0
    min_radius: float = 0.1

    def __post_init__(self):
        if self.mode not in ("fixed", "halving", "additive"):
            raise ValueError(f"unknown schedule {self.mode!r}")
        if not (self.r0 > 0 and self.min_radius > 0):
            raise ValueError("r0 and min_radius must be positive")


def adapt_radius(r_prev: float, schedule: SphereSchedule) -> float:
    """Next radius after a failed sphere; raises :class:`RadiusExhausted` below the floor."""
    if not r_prev > 0:
        raise ValueError("radius must be positive")
    if schedule.mode == "halving":
        r = r_prev * 0.5
    elif schedule.mode == "additive":
        r = r_prev + schedule.additive_increment
    else:
        r = r_prev
    if r < schedule.min_radius:
        raise RadiusExhausted(f"radius {r:g} below minimum {schedule.min_radius:g}")
    return r


def sphere_domain(sphere: Hypersphere, base: SearchDomain, lambda_ratio: float = 0.04,
                  lambda_halfwidth: Optional[float] = None) -> SearchDomain:
    """Box around the sphere center, clipped to ``base``.

    Displacements get ``center +/- r``; the multiplier gets ``center +/-
    lambda_halfwidth`` (default ``r * lambda_ratio``).
    """
    c = sphere.center.to_vector()
    half = np.full(c.size, float(sphere.radius))
    half[-1] = sphere.radius * lambda_ratio if lambda_halfwidth is None else lambda_halfwidth
    box = SearchDomain(c - half, c + half)
    try:
        return box.intersect(base)
    except ValueError:
        raise ValueError("sphere center lies outside the base domain") from None


def _plane(points, lambda_scale):
    p = np.atleast_2d(np.asarray(points, dtype=float)).copy()
    p[:, 1] *= lambda_scale
    return p


def select_center_initial(points, objectives, prev_center, tol_opt=1e-5, lambda_scale=1.0) -> int:
    """Index of the optimal point farthest from ``prev_center`` in the (d, lam) plane.

    Only points ahead of ``prev_center`` (larger ``d``) compete when there are
    any, so the trace starts along the loading direction. Ties go to the
    larger ``d``, then to the lower objective.
    """
    pts = _plane(points, lambda_scale)
    obj = np.asarray(objectives, dtype=float)
    ok = np.flatnonzero(obj <= tol_opt)
    if ok.size == 0:
        raise NoOptimalTrialError("no trial reached the optimality tolerance")
    ref = _plane([prev_center], lambda_scale)[0]
    ahead = ok[pts[ok, 0] > ref[0]]
    if ahead.size:
        ok = ahead
    dist = np.linalg.norm(pts[ok] - ref, axis=1)
    order = np.lexsort((obj[ok], -pts[ok, 0], -dist))
    return int(ok[order[0]])


def select_center_directional(points, objectives, c_prev, c_prev2, tol_opt=1e-5,
                              lambda_scale=1.0) -> int:
    """Index of the farthest optimal point with ``b . a < 0``.

    ``a = c_prev2 - c_prev`` points back along the path and ``b = p - c_prev``.
    """
    pts = _plane(points, lambda_scale)
    obj = np.asarray(objectives, dtype=float)
    ok = np.flatnonzero(obj <= tol_opt)
    if ok.size == 0:
        raise NoOptimalTrialError("no trial reached the optimality tolerance")
    cp = _plane([c_prev], lambda_scale)[0]
    a = _plane([c_prev2], lambda_scale)[0] - cp
    b = pts[ok] - cp
    fwd = b @ a < 0
    if not fwd.any():
        raise NoForwardTrialError("every optimal trial points back along the path")
    cand = ok[fwd]
    norms = np.linalg.norm(b[fwd], axis=1)
    order = np.lexsort((obj[cand], -norms))
    return int(cand[order[0]])


@dataclass
class TraceResult:
    centers: list = field(default_factory=list)
    center_spheres: list = field(default_factory=list)
    all_optimal: list = field(default_factory=list)
    optimal_spheres: list = field(default_factory=list)
    efforts: list = field(default_factory=list)
    radii: list = field(default_factory=list)
    termination: str = ""
    records: list = field(default_factory=list)

    @property
    def total_generations(self) -> int:
        return int(sum(self.efforts))

    def path(self, model: TrussModel) -> np.ndarray:
        """(n_centers, 2) array of ``(d, lam)`` for the centers."""
        if not self.centers:
            return np.zeros((0, 2))
        X = np.vstack([c.to_vector() for c in self.centers])
        return np.column_stack([control_batch(model, X[:, :-1]), X[:, -1]])


class HypersphereTracer(BaseEstimator):
    """Trace an equilibrium path with a sequence of bounded optimizer batches.

    Parameters
    ----------
    optimizer : OptimizerConfig
        Configuration for every trial; seeds are derived per trial from
        ``optimizer.seed``.
    schedule : SphereSchedule
        Initial radius and the policy applied when a sphere fails.
    trials_per_sphere : int
        Optimizer runs per sphere; a failing sphere is retried once with
        twice as many before the radius is adapted.
    d_max, max_spheres : float, int
        Stopping rules.
    seed_box : (float, float)
        Half-widths (displacement, multiplier) of the first sphere.
    lambda_ratio : float
        Multiplier half-width per unit radius for later spheres.
    lambda_weight : float
        Factor on ``lam`` in the ``(d, lam)`` plane used for center selection
        and the direction test. With the default 1 a fold in ``d`` leaves no
        forward trial, so the trace stops there; ``1 / lambda_ratio`` makes
        the plane isotropic and lets the trace turn back in ``d``.
    max_stalls : int
        Consecutive failed spheres tolerated before the trace stops with a
        stall; only the fixed schedule needs this to terminate.
    """

    def __init__(self, optimizer=None, schedule=None, trials_per_sphere=5, d_max=np.inf,
                 max_spheres=1000, seed_box=(10.0, 0.2), lambda_ratio=0.04, tol_opt=1e-5,
                 max_stalls=2, base_domain=None, lambda_weight=1.0):
        self.optimizer = optimizer
        self.schedule = schedule
        self.trials_per_sphere = trials_per_sphere
        self.d_max = d_max
        self.max_spheres = max_spheres
        self.seed_box = seed_box
        self.lambda_ratio = lambda_ratio
        self.lambda_weight = lambda_weight
        self.tol_opt = tol_opt
        self.max_stalls = max_stalls
        self.base_domain = base_domain

    def fit(self, model: TrussModel, start=None):
        """Run the trace. ``start`` is a list of one or two equilibrated
        candidates to resume from (oldest first); default is the unloaded
        origin or, with permanent loads, the best seed-sphere trial."""
        if self.trials_per_sphere < 1:
            raise ValueError("trials_per_sphere must be at least 1")
        self.model_ = model
        opt = self.optimizer or OptimizerConfig(max_generations=5000)
        schedule = self.schedule or SphereSchedule()
        base = self.base_domain or SearchDomain(np.full(model.n_variables, -np.inf),
                                                np.full(model.n_variables, np.inf))
        base.check(model)
        self._opt, self._base, self._model = opt, base, model
        res = TraceResult()
        self.result_ = res

        centers = self._initial_centers(model, start, res)
        res.centers.extend(centers)
        res.center_spheres.extend([0] * len(centers))

        radius = schedule.r0
        stalls = 0
        while True:
            d_last = self._d(res.centers[-1])
            if d_last >= self.d_max:
                res.termination = REACHED
                break
            if len(res.efforts) >= self.max_spheres:
                res.termination = EXHAUSTED
                break
            seeding = not start and len(res.centers) == 1
            try:
                center = self._advance(res, radius, seeding)
            except (NoOptimalTrialError, NoForwardTrialError) as exc:
                stalls += 1
                log.info("sphere %d (r=%g) failed at d=%.3f: %s", len(res.efforts) - 1, radius,
                         d_last, exc)
                if seeding and isinstance(exc, NoOptimalTrialError):
                    raise SeedSphereError(f"seed sphere around d={d_last:.3f}: {exc}") from exc
                try:
                    radius = adapt_radius(radius, schedule)
                except RadiusExhausted:
                    res.termination = STALL
                    break
                if schedule.mode == "fixed" and stalls >= self.max_stalls:
                    res.termination = STALL
                    break
                continue
            stalls = 0
            res.centers.append(center)
            res.center_spheres.append(len(res.efforts) - 1)
            log.debug("center %d: d=%.4f lam=%.5f effort=%d", len(res.centers) - 1,
                      self._d(center), center.lam, res.efforts[-1])
        self.centers_ = res.centers
        self.efforts_ = np.asarray(res.efforts, dtype=float)
        self.termination_ = res.termination
        return self

    # -- internals --------------------------------------------------------------

    def _d(self, c: Candidate) -> float:
        return float(control_batch(self._model, c.u))

    def _initial_centers(self, model, start, res):
        if start:
            out = []
            for c in start:
                c = (Candidate(c.u.copy(), c.lam) if isinstance(c, Candidate)
                     else Candidate.from_vector(c))
                c.objective = float(objective_batch(model, c.to_vector()))
                out.append(c)
            return out[-2:]
        origin = Candidate(np.zeros(model.n_free), 0.0)
        origin.objective = float(objective_batch(model, origin.to_vector()))
        if origin.objective <= self.tol_opt:
            res.efforts.append(0.0)
            res.radii.append(0.0)
            return [origin]
        # permanent loads: equilibrate inside the seed box first
        dom = self._seed_domain(origin)
        trials, effort = self._run_sphere(dom, self.trials_per_sphere, len(res.efforts))
        res.efforts.append(effort)
        res.radii.append(float(self.seed_box[0]))
        opt = [t for t in trials if t.objective <= self.tol_opt]
        if not opt:
            raise SeedSphereError(
                f"no trial in the seed sphere reached {self.tol_opt:g}; best objective "
                f"{min(t.objective for t in trials):.3e}")
        self._collect(res, opt, len(res.efforts) - 1)
        return [min(opt, key=lambda t: (abs(self._d(t)), t.objective))]

    def _seed_domain(self, center):
        disp, lam = self.seed_box
        return sphere_domain(Hypersphere(center, disp), self._base, lambda_halfwidth=lam)

    def _run_sphere(self, domain, n_trials, sphere, offset=0):
        trials, effort = [], 0
        for t in range(offset, offset + n_trials):
            cfg = self._opt.replace(seed=derive_seed(self._opt.seed, sphere, t))
            rec = optimize(self._model, domain, cfg)
            rec.cell = sphere
            effort += rec.generations_used
            trials.append(rec.best)
            self.result_.records.append(rec)
        return trials, effort

    def _collect(self, res, optimal, sphere_idx):
        res.all_optimal.extend(optimal)
        res.optimal_spheres.extend([sphere_idx] * len(optimal))

    def _advance(self, res, radius, seeding):
        """Search one sphere around the last center; return the new center."""
        c_prev = res.centers[-1]
        if seeding:
            domain = self._seed_domain(c_prev)
        else:
            domain = sphere_domain(Hypersphere(c_prev, radius), self._base, self.lambda_ratio)
        sphere_idx = len(res.efforts)
        trials, effort = [], 0
        n = self.trials_per_sphere
        try:
            for attempt in range(2):
                new, e = self._run_sphere(domain, n, sphere_idx, offset=len(trials))
                trials += new
                effort += e
                try:
                    return self._select(trials, res, seeding)
                except (NoOptimalTrialError, NoForwardTrialError):
                    if attempt == 1:
                        raise
                    n *= 2
        finally:
            res.efforts.append(float(effort))
            res.radii.append(float(self.seed_box[0] if seeding else radius))
            self._collect(res, [t for t in trials if t.objective <= self.tol_opt], sphere_idx)

    def _select(self, trials, res, seeding):
        X = np.vstack([t.to_vector() for t in trials])
        pts = np.column_stack([control_batch(self._model, X[:, :-1]), X[:, -1]])
        obj = np.array([t.objective for t in trials])
        scale = self.lambda_weight
        c1 = res.centers[-1]
        p1 = (self._d(c1), c1.lam)
        if len(res.centers) < 2:
            i = select_center_initial(pts, obj, p1, self.tol_opt, scale)
        else:
            c2 = res.centers[-2]
            i = select_center_directional(pts, obj, p1, (self._d(c2), c2.lam), self.tol_opt, scale)
        return trials[i]


def trace_path(model, base, schedule, opt, trials_per_sphere=5, d_max=np.inf, max_spheres=1000,
               **kwargs) -> TraceResult:
    """Functional wrapper around :class:`HypersphereTracer`."""
    tracer = HypersphereTracer(optimizer=opt, schedule=schedule,
                               trials_per_sphere=trials_per_sphere, d_max=d_max,
                               max_spheres=max_spheres, base_domain=base, **kwargs)
    return tracer.fit(model).result_
