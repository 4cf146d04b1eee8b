"""Differential evolution, DE/rand/1/bin and DE/best/2/bin."""
from __future__ import annotations

import numpy as np

from .base import BaseOptimizer, InvalidConfigError, mean_pairwise_distance

_PARTNERS = {"rand-1": 3, "best-2": 4}


def de_mutate(population, best, indices, F, variant):
    """Donor vector(s) from partner ``indices``.

    ``indices`` has shape ``(k,)`` for one donor or ``(n, k)`` for a batch;
    ``best`` is the best vector of the population (used by ``best-2``).
    """
    pop = np.asarray(population, dtype=float)
    idx = np.asarray(indices)
    need = _PARTNERS[variant]
    if len(pop) < need or idx.shape[-1] < need:
        raise InvalidConfigError(f"{variant} mutation needs {need} distinct partners")
    if variant == "rand-1":
        return pop[idx[..., 0]] + F * (pop[idx[..., 1]] - pop[idx[..., 2]])
    return (np.asarray(best, dtype=float)
            + F * (pop[idx[..., 0]] - pop[idx[..., 1]])
            + F * (pop[idx[..., 2]] - pop[idx[..., 3]]))


def de_crossover_binomial(target, donor, CR, rng):
    """Binomial crossover with one forced donor component per row."""
    target = np.asarray(target, dtype=float)
    donor = np.asarray(donor, dtype=float)
    t2 = np.atleast_2d(target)
    n, dim = t2.shape
    take = rng.random((n, dim)) < CR
    take[np.arange(n), rng.integers(dim, size=n)] = True
    trial = np.where(take, np.atleast_2d(donor), t2)
    return trial.reshape(target.shape)


def _partner_indices(rng, n, k):
    """``k`` distinct indices per row, each row excluding its own index."""
    keys = rng.random((n, n))
    np.fill_diagonal(keys, np.inf)
    return np.argsort(keys, axis=1)[:, :k]


class DifferentialEvolution(BaseOptimizer):
    """Differential evolution with per-generation dithered scale factor.

    Parameters
    ----------
    variant : {"rand-1", "best-2"}
        Base vector and number of difference vectors.
    scale_factor_bounds : (float, float)
        ``F`` is drawn uniformly from this range once per generation.
    crossover_rate : float
        Binomial crossover probability ``CR``.
    """

    def __init__(self, variant="rand-1", population_size=50, max_generations=1000,
                 target_objective=1e-5, scale_factor_bounds=(0.2, 0.9), crossover_rate=0.9,
                 track_diversity=True, random_state=None):
        self.variant = variant
        self.population_size = population_size
        self.max_generations = max_generations
        self.target_objective = target_objective
        self.scale_factor_bounds = scale_factor_bounds
        self.crossover_rate = crossover_rate
        self.track_diversity = track_diversity
        self.random_state = random_state

    def _validate_params(self):
        if self.variant not in _PARTNERS:
            raise InvalidConfigError(f"unknown DE variant {self.variant!r}")
        lo, hi = self.scale_factor_bounds
        if not 0 < lo <= hi:
            raise InvalidConfigError("scale factor bounds must satisfy 0 < lo <= hi")
        if not 0 <= self.crossover_rate <= 1:
            raise InvalidConfigError("crossover rate must lie in [0, 1]")
        if self.population_size < _PARTNERS[self.variant] + 1:
            raise InvalidConfigError("population too small for the mutation variant")

    def _run(self, func, lower, upper, rng):
        n, dim = self.population_size, lower.size
        k = _PARTNERS[self.variant]
        pop = lower + rng.random((n, dim)) * (upper - lower)
        fit = func(pop)
        history, diversity = [], []
        for _ in range(self.max_generations):
            F = rng.uniform(*self.scale_factor_bounds)
            best = pop[np.argmin(fit)]
            idx = _partner_indices(rng, n, k)
            donor = de_mutate(pop, best, idx, F, self.variant)
            trial = np.clip(de_crossover_binomial(pop, donor, self.crossover_rate, rng), lower, upper)
            f_trial = func(trial)
            better = f_trial <= fit
            pop[better] = trial[better]
            fit[better] = f_trial[better]
            history.append(fit.min())
            if self.track_diversity:
                diversity.append(mean_pairwise_distance(pop))
            if self._done(history[-1]):
                break
        i = np.argmin(fit)
        return pop[i].copy(), fit[i], history, diversity
