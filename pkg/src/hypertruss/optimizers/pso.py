"""Particle swarm optimization with inertia weight or constriction factor."""
from __future__ import annotations

import math

import numpy as np

from .base import BaseOptimizer, InvalidConfigError, mean_pairwise_distance


def constriction_factor(phi: float) -> float:
    """Clerc-Kennedy constriction ``2 / (phi - 2 + sqrt(phi^2 - 4 phi))``; needs ``phi > 4``."""
    if not phi > 4:
        raise InvalidConfigError(f"constriction needs phi > 4, got {phi}")
    return 2.0 / (phi - 2.0 + math.sqrt(phi * phi - 4.0 * phi))


def pso_step(x, v, personal_best, global_best, w, c_personal, c_global, rng,
             lower=None, upper=None):
    """One velocity/position update; returns ``(x_new, v_new)``.

    ``v <- w v + c_p r1 (p - x) + c_g r2 (g - x)``, ``x <- x + v``. With bounds
    given, positions are clamped and velocity is zeroed on clamped axes.
    """
    x = np.asarray(x, dtype=float)
    r1 = rng.random(x.shape)
    r2 = rng.random(x.shape)
    v = w * v + c_personal * r1 * (personal_best - x) + c_global * r2 * (global_best - x)
    x_new = x + v
    if lower is not None:
        clipped = np.clip(x_new, lower, upper)
        v = np.where(clipped != x_new, 0.0, v)
        x_new = clipped
    return x_new, v


class ParticleSwarm(BaseOptimizer):
    """Global-best PSO.

    ``variant="standard"`` uses ``inertia``, ``inertia_damping``,
    ``c_personal`` and ``c_global`` as given. ``variant="constriction"``
    ignores them and uses ``w = chi(phi)``, ``c_p = c_g = chi * phi / 2`` with
    no damping.
    """

    def __init__(self, variant="standard", population_size=50, max_generations=1000,
                 target_objective=1e-5, inertia=1.0, inertia_damping=0.99, c_personal=1.5,
                 c_global=2.0, phi=4.1, track_diversity=True, random_state=None):
        self.variant = variant
        self.population_size = population_size
        self.max_generations = max_generations
        self.target_objective = target_objective
        self.inertia = inertia
        self.inertia_damping = inertia_damping
        self.c_personal = c_personal
        self.c_global = c_global
        self.phi = phi
        self.track_diversity = track_diversity
        self.random_state = random_state

    def coefficients(self):
        """``(w0, damping, c_personal, c_global)`` actually used."""
        if self.variant == "constriction":
            chi = constriction_factor(self.phi)
            return chi, 1.0, chi * self.phi / 2.0, chi * self.phi / 2.0
        return self.inertia, self.inertia_damping, self.c_personal, self.c_global

    def _validate_params(self):
        if self.variant not in ("standard", "constriction"):
            raise InvalidConfigError(f"unknown PSO variant {self.variant!r}")
        if self.variant == "standard" and not self.inertia > 0:
            raise InvalidConfigError("inertia must be positive")
        self.coefficients()

    def _run(self, func, lower, upper, rng):
        n, dim = self.population_size, lower.size
        w, damping, cp, cg = self.coefficients()
        x = lower + rng.random((n, dim)) * (upper - lower)
        v = np.zeros_like(x)
        fx = func(x)
        pbest, fp = x.copy(), fx.copy()
        g = np.argmin(fp)
        gbest, fg = pbest[g].copy(), fp[g]
        history, diversity = [], []
        for _ in range(self.max_generations):
            x, v = pso_step(x, v, pbest, gbest, w, cp, cg, rng, lower, upper)
            fx = func(x)
            improved = fx < fp
            pbest[improved] = x[improved]
            fp[improved] = fx[improved]
            g = np.argmin(fp)
            if fp[g] < fg:
                gbest, fg = pbest[g].copy(), fp[g]
            w *= damping
            history.append(fg)
            if self.track_diversity:
                diversity.append(mean_pairwise_distance(x))
            if self._done(fg):
                break
        return gbest, fg, history, diversity
