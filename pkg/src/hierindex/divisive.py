"""Flat clustering by quality-pruned binary splitting.

A cluster is split in two with 2-means started from centroids placed
along its first principal direction. The split is kept and recursed into
unless the stop rule ``Q_parent <= beta * mean(Q_children)`` holds, where
Q is the reciprocal mean Mahalanobis distance from ``gaussmodel``. The
leaves of the resulting binary tree are the flat clusters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .gaussmodel import GaussianModel, _identical, cluster_quality, fit_gaussian

MAX_LLOYD_ITER = 100


@dataclass
class SplitCandidate:
    parent: np.ndarray          # indices into the caller's point array
    children: tuple[np.ndarray, np.ndarray]
    parent_quality: float
    child_qualities: tuple[float, float]
    child_models: tuple[GaussianModel, GaussianModel] | None = None
    wcss_history: list[float] = field(default_factory=list)
    iterations: int = 0


@dataclass
class FlatClustering:
    clusters: list[np.ndarray]
    assignments: np.ndarray
    cost: float | None = None           # objective of the baselines
    history: list[float] | None = None
    centers: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.clusters)


def principal_direction(points: np.ndarray, seed: int = 42, tol: float = 1e-9,
                        max_iter: int = 1000) -> np.ndarray:
    """Unit leading eigenvector of the population covariance, by power iteration.

    The sign is fixed so the largest-magnitude component is positive.
    """
    x = np.asarray(points, dtype=float)
    d = x - x.mean(axis=0)
    cov = d.T @ d / len(x)
    v = np.random.default_rng(seed).standard_normal(cov.shape[0])
    v /= np.linalg.norm(v)
    for _ in range(max_iter):
        w = cov @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            break
        w /= norm
        done = np.linalg.norm(w - v) < tol
        v = w
        if done:
            break
    i = np.abs(v).argmax()
    return -v if v[i] < 0 else v


def pddp_init(points, seed: int = 42, literal: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Two starting centroids straddling the mean along the principal direction.

    The offset is the mean absolute projection of the centered points. With
    ``literal=True`` it is the mean projection of the raw points instead,
    which is the formula as printed in the original method description.
    """
    x = np.asarray(points, dtype=float)
    if len(x) < 2 or _identical(x):
        raise ValueError("principal-direction init needs at least two distinct points")
    mu = x.mean(axis=0)
    v = principal_direction(x, seed=seed)
    if literal:
        offset = float(np.mean(x @ v))
    else:
        offset = float(np.mean(np.abs((x - mu) @ v)))
    return mu + offset * v, mu - offset * v


def _assign(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    return cdist(x, c, "sqeuclidean").argmin(axis=1)  # ties go to the lower index


def _wcss(x: np.ndarray, labels: np.ndarray, c: np.ndarray) -> float:
    return float(((x - c[labels]) ** 2).sum())


def lloyd(x: np.ndarray, centroids: np.ndarray, max_iter: int = MAX_LLOYD_ITER):
    """Lloyd iterations from fixed centroids until the assignment stops changing.

    Returns (labels, centroids, wcss_history, iterations). An emptied
    centroid keeps its previous position.
    """
    c = np.array(centroids, dtype=float)
    labels = _assign(x, c)
    history = [_wcss(x, labels, c)]
    it = 0
    for it in range(1, max_iter + 1):
        for j in range(len(c)):
            members = labels == j
            if members.any():
                c[j] = x[members].mean(axis=0)
        history.append(_wcss(x, labels, c))
        new = _assign(x, c)
        history.append(_wcss(x, new, c))
        if np.array_equal(new, labels):
            break
        labels = new
    return labels, c, history, it


def binary_split(points, init: tuple[np.ndarray, np.ndarray],
                 max_iter: int = MAX_LLOYD_ITER) -> SplitCandidate:
    x = np.asarray(points, dtype=float)
    if len(x) < 2:
        raise ValueError("binary_split needs at least two points")
    labels, c, history, it = lloyd(x, np.vstack(init), max_iter)
    for side in (0, 1):
        if not (labels == side).any():
            # move the point farthest from the surviving centroid across
            other = 1 - side
            far = int(np.argmax(((x - c[other]) ** 2).sum(axis=1)))
            labels[far] = side
    idx = np.arange(len(x))
    left, right = idx[labels == 0], idx[labels == 1]
    parent_model = fit_gaussian(x)
    models = (fit_gaussian(x[left]), fit_gaussian(x[right]))
    return SplitCandidate(
        parent=idx,
        children=(left, right),
        parent_quality=cluster_quality(parent_model, x),
        child_qualities=(cluster_quality(models[0], x[left]),
                         cluster_quality(models[1], x[right])),
        child_models=models,
        wcss_history=history,
        iterations=it,
    )


def should_stop(candidate: SplitCandidate, beta: float) -> bool:
    """True when the parent should stay whole: Q_parent <= beta * mean(Q_children).

    Infinite child qualities are left out of the mean; if both are infinite
    the parent stays whole.
    """
    q = candidate.parent_quality
    if math.isinf(q):
        return True
    finite = [c for c in candidate.child_qualities if not math.isinf(c)]
    if not finite:
        return True
    return q <= beta * (sum(finite) / len(finite))


def flat_cluster(points, beta: float = 0.5, min_split_size: int = 4, seed: int = 42,
                 literal_offset: bool = False) -> FlatClustering:
    """Leaves of the quality-pruned binary splitting tree over ``points``.

    Clusters come out in depth-first order, first child before second.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    x = np.atleast_2d(np.asarray(points, dtype=float))
    n = len(x)
    if n == 0:
        raise ValueError("flat_cluster needs at least one point")
    leaves = []
    stack = [np.arange(n)]
    while stack:
        idx = stack.pop()
        sub = x[idx]
        if len(idx) < min_split_size or len(idx) < 2 or _identical(sub):
            leaves.append(idx)
            continue
        cand = binary_split(sub, pddp_init(sub, seed=seed, literal=literal_offset))
        if should_stop(cand, beta):
            leaves.append(idx)
            continue
        left, right = cand.children
        stack.append(idx[right])
        stack.append(idx[left])
    assignments = np.empty(n, dtype=np.int64)
    for j, members in enumerate(leaves):
        assignments[members] = j
    return FlatClustering(clusters=leaves, assignments=assignments)
