"""Gaussian cluster model, Mahalanobis distance and cluster quality."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

RIDGE_LADDER = (0.0, 1e-8, 1e-6, 1e-4, 1e-2)
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class GaussianModel:
    centroid: np.ndarray
    covariance: np.ndarray
    precision: np.ndarray
    ridge: float
    n: int

    @property
    def dim(self) -> int:
        return self.centroid.shape[0]


def _identical(points: np.ndarray) -> bool:
    return bool(np.all(points == points[0]))


def _exact_residual(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """I - a @ x with the cancellation handled in compensated arithmetic.

    Each product is split into an exact high/low pair (Dekker) and the terms
    are accumulated with Neumaier summation, so the result is accurate to a
    few ulps of the residual itself rather than of ``|a| @ |x|``.
    """
    def split(v):
        c = 134217729.0 * v  # 2**27 + 1
        hi = c - (c - v)
        return hi, v - hi

    aa, xx = a[:, :, None], x[None, :, :]
    p = aa * xx
    (ah, al), (xh, xl) = split(aa), split(xx)
    e = ((ah * xh - p) + ah * xl + al * xh) + al * xl
    total = np.eye(len(a))
    comp = np.zeros_like(total)
    for term in (*np.moveaxis(-p, 1, 0), *np.moveaxis(-e, 1, 0)):
        t = total + term
        big = np.abs(total) >= np.abs(term)
        comp += np.where(big, (total - t) + term, (term - t) + total)
        total = t
    return total + comp


def _inverse(a: np.ndarray, cond: float) -> np.ndarray:
    """Symmetric inverse of an SPD matrix.

    Ill-conditioned inputs get two Newton steps driven by an exactly rounded
    residual, which brings the result close to the correctly rounded inverse.
    """
    x = np.linalg.inv(a)
    if cond > 1e6:
        for _ in range(2):
            x = x + x @ _exact_residual(a, x)
    return (x + x.T) / 2


def regularized_precision(cov: np.ndarray) -> tuple[np.ndarray, float]:
    """Inverse of ``cov + ridge*I`` for the first ridge on the ladder that
    brings the condition number under 1e12.

    Ridge steps are multiples of trace(cov)/k. A zero covariance uses a unit
    scale instead so single-point clusters still get a usable metric.
    """
    k = cov.shape[0]
    scale = np.trace(cov) / k
    if scale <= 0:
        return np.eye(k) / RIDGE_LADDER[-1], RIDGE_LADDER[-1]
    eye = np.eye(k)
    for step in RIDGE_LADDER:
        ridge = step * scale
        reg = cov + ridge * eye
        w = np.linalg.eigvalsh(reg)
        if w[0] > 0 and w[-1] / w[0] < MAX_CONDITION:
            return _inverse(reg, w[-1] / w[0]), ridge
    raise np.linalg.LinAlgError("ridge ladder exhausted")  # unreachable for k >= 1


def fit_gaussian(points) -> GaussianModel:
    """Population-covariance Gaussian over the rows of ``points``."""
    x = np.atleast_2d(np.asarray(points, dtype=float))
    n, k = x.shape
    if n == 0:
        raise ValueError("cannot fit a Gaussian to zero points")
    if _identical(x):
        mu = x[0].copy()
        cov = np.zeros((k, k))
    else:
        mu = x.mean(axis=0)
        d = x - mu
        cov = d.T @ d / n
        cov = (cov + cov.T) / 2
    prec, ridge = regularized_precision(cov)
    return GaussianModel(centroid=mu, covariance=cov, precision=prec, ridge=ridge, n=n)


def mahalanobis(model: GaussianModel, x) -> float | np.ndarray:
    """sqrt((x - mu)^T P (x - mu)) with the model's stored precision P.

    ``x`` may be a single vector or a stack of row vectors.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != model.dim:
        raise ValueError(f"dimension mismatch: point has {x.shape[-1]}, model has {model.dim}")
    d = x - model.centroid
    q = np.einsum("...i,ij,...j->...", d, model.precision, d)
    out = np.sqrt(np.maximum(q, 0.0))
    return float(out) if out.ndim == 0 else out


def cluster_quality(model: GaussianModel, points) -> float:
    """Reciprocal of the mean Mahalanobis distance of the members.

    Returns ``math.inf`` when every member coincides, so such a cluster is
    never considered for splitting.
    """
    x = np.atleast_2d(np.asarray(points, dtype=float))
    if _identical(x):
        return math.inf
    mean = float(np.mean(mahalanobis(model, x)))
    return math.inf if mean == 0.0 else 1.0 / mean
