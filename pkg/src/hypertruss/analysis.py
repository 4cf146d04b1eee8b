"""Post-processing of solution clouds: clustering and convergence statistics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.sparse import csr_matrix
from scipy.spatial import cKDTree
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_array

NOISE = -1


@dataclass
class PathPoint:
    d: float
    lam: float
    objective: float = 0.0
    run_id: Optional[int] = None


def _as_plane(points, lambda_scale) -> np.ndarray:
    if len(points) and isinstance(points[0], PathPoint):
        X = np.array([[p.d, p.lam] for p in points], dtype=float)
    else:
        X = check_array(points, dtype=float, ensure_min_samples=0).copy()
    if X.shape[0]:
        X[:, -1] *= lambda_scale
    return X


def dbscan(points, eps: float, min_pts: int, lambda_scale: float = 100.0) -> np.ndarray:
    """Density-based labels for ``(d, lam)`` points; ``-1`` marks noise.

    A point is core when at least ``min_pts`` points (itself included) lie
    within ``eps``. Core points within ``eps`` of each other share a cluster.
    A border point joins the cluster of its nearest core point, ties going
    to the lower label. Labels are numbered by the first core point of each
    cluster, so they are contiguous from 0.
    """
    if not eps > 0 or min_pts < 1:
        raise ValueError("eps must be positive and min_pts at least 1")
    X = _as_plane(points, lambda_scale)
    n = X.shape[0]
    labels = np.full(n, NOISE, dtype=int)
    if n == 0:
        return labels
    tree = cKDTree(X)
    hood = tree.query_ball_point(X, eps)
    core = np.array([len(h) >= min_pts for h in hood])
    core_idx = np.flatnonzero(core)
    if core_idx.size == 0:
        return labels

    rows, cols = [], []
    for i in core_idx:
        for j in hood[i]:
            if core[j]:
                rows.append(i)
                cols.append(j)
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, comp = connected_components(graph, directed=False)

    # renumber components by their lowest core index
    relabel = {}
    for i in core_idx:
        relabel.setdefault(comp[i], len(relabel))
    labels[core_idx] = [relabel[comp[i]] for i in core_idx]

    for i in np.flatnonzero(~core):
        near = [j for j in hood[i] if core[j]]
        if near:
            dist = np.linalg.norm(X[near] - X[i], axis=1)
            best = min(zip(dist, labels[near]))
            labels[i] = best[1]
    return labels


class DBSCAN(ClusterMixin, BaseEstimator):
    """Estimator wrapper around :func:`dbscan`.

    ``fit(X)`` expects rows of ``(d, lam)``; ``labels_`` holds the result.
    """

    def __init__(self, eps=10.0, min_pts=3, lambda_scale=100.0):
        self.eps = eps
        self.min_pts = min_pts
        self.lambda_scale = lambda_scale

    def fit(self, X, y=None):
        self.labels_ = dbscan(X, self.eps, self.min_pts, self.lambda_scale)
        self.n_clusters_ = int(self.labels_.max() + 1) if self.labels_.size else 0
        return self


def canonical_labels(labels) -> np.ndarray:
    """Relabel clusters by order of first appearance; noise stays ``-1``."""
    labels = np.asarray(labels)
    out = np.full(labels.shape, NOISE, dtype=int)
    seen = {}
    for i, lab in enumerate(labels):
        if lab != NOISE:
            out[i] = seen.setdefault(lab, len(seen))
    return out


@dataclass
class ConvergenceProfile:
    mean: np.ndarray
    std: np.ndarray
    count: np.ndarray

    def rows(self):
        for g, (m, s, c) in enumerate(zip(self.mean, self.std, self.count), start=1):
            yield g, float(m), float(s), int(c)


def _history(r):
    return np.asarray(r.history if hasattr(r, "history") else r, dtype=float)


def convergence_profile(records, max_final: Optional[float] = None) -> ConvergenceProfile:
    """Per-generation mean and standard deviation of best objective.

    Shorter histories are padded with their last value; ``count`` is the
    number of runs still active at each generation. ``max_final`` drops runs
    whose final objective exceeds it.
    """
    hists = [_history(r) for r in records]
    hists = [h for h in hists if h.size]
    if max_final is not None:
        hists = [h for h in hists if h[-1] <= max_final]
    if not hists:
        raise ValueError("no histories to profile")
    n = max(h.size for h in hists)
    grid = np.vstack([np.pad(h, (0, n - h.size), mode="edge") for h in hists])
    count = np.array([sum(h.size > g for h in hists) for g in range(n)])
    return ConvergenceProfile(grid.mean(axis=0), grid.std(axis=0), count)


def success_rate(records, tol: float):
    """``(fraction, successes, total)`` of runs whose final objective is below ``tol``."""
    finals = [float(_history(r)[-1]) if _history(r).size else np.inf for r in records]
    total = len(finals)
    hits = sum(f < tol for f in finals)
    return (hits / total if total else 0.0), hits, total


def path_points(model, candidates, run_ids=None) -> list:
    from .model import control_point

    run_ids = run_ids if run_ids is not None else [None] * len(candidates)
    return [PathPoint(float(control_point(model, c)), c.lam,
                      np.nan if c.objective is None else c.objective, rid)
            for c, rid in zip(candidates, run_ids)]
