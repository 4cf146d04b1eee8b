"""Simulated annealing over a bounded box."""
from __future__ import annotations

import math

import numpy as np

from .base import BaseOptimizer, InvalidConfigError


def metropolis_accept(delta_f: float, temperature: float, rng) -> bool:
    """Accept improvements always, worse moves with ``exp(-delta_f / T)``."""
    if delta_f <= 0:
        return True
    if not math.isfinite(delta_f):
        return False
    return bool(rng.random() < math.exp(-delta_f / temperature))


def sa_step(current, f_current, temperature, t0, func, rng, lower, upper):
    """Gaussian proposal around ``current`` then a Metropolis decision.

    The per-axis standard deviation is ``0.1 * (upper - lower) * T / T0``.
    Returns ``(x, f, accepted)``.
    """
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    sigma = 0.1 * (upper - lower) * (temperature / t0)
    proposal = np.clip(current + sigma * rng.standard_normal(current.shape), lower, upper)
    f_prop = float(func(proposal[None])[0])
    if metropolis_accept(f_prop - f_current, temperature, rng):
        return proposal, f_prop, True
    return current, f_current, False


class SimulatedAnnealing(BaseOptimizer):
    """Single-solution annealing with geometric cooling.

    One generation is one temperature level made of ``moves_per_temperature``
    Metropolis moves; the temperature is multiplied by ``cooling_rate`` after
    each level. ``population_size`` is accepted for interface parity and
    ignored.
    """

    def __init__(self, population_size=1, max_generations=1000, target_objective=1e-5,
                 initial_temperature=0.1, cooling_rate=0.99, moves_per_temperature=50,
                 random_state=None):
        self.population_size = population_size
        self.max_generations = max_generations
        self.target_objective = target_objective
        self.initial_temperature = initial_temperature
        self.cooling_rate = cooling_rate
        self.moves_per_temperature = moves_per_temperature
        self.random_state = random_state

    def _validate_params(self):
        if not 0 < self.cooling_rate < 1:
            raise InvalidConfigError("cooling rate must lie in (0, 1)")
        if not self.initial_temperature > 0:
            raise InvalidConfigError("initial temperature must be positive")
        if self.moves_per_temperature < 1:
            raise InvalidConfigError("moves_per_temperature must be at least 1")

    def _run(self, func, lower, upper, rng):
        t0 = self.initial_temperature
        T = t0
        x = lower + rng.random(lower.size) * (upper - lower)
        fx = float(func(x[None])[0])
        best, fbest = x.copy(), fx
        history = []
        for _ in range(self.max_generations):
            for _ in range(self.moves_per_temperature):
                x, fx, _ = sa_step(x, fx, T, t0, func, rng, lower, upper)
                if fx < fbest:
                    best, fbest = x.copy(), fx
            T *= self.cooling_rate
            history.append(fbest)
            if self._done(fbest):
                break
        return best, fbest, history, []
