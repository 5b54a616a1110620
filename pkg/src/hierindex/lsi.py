"""Latent semantic indexing via randomized subspace iteration."""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .corpus import TfIdfMatrix

CONVENTION = "U_k^T x"


class EmptyQueryWarning(UserWarning):
    """A query had no weight on the model's vocabulary."""


class RankWarning(UserWarning):
    pass


@dataclass(frozen=True)
class LsiModel:
    k: int
    term_factors: np.ndarray
    singular_values: np.ndarray
    vocabulary_fingerprint: str = ""
    seed: int = 42
    normalize: bool = False
    iterations: int = 0
    convention: str = CONVENTION

    @property
    def num_terms(self) -> int:
        return self.term_factors.shape[0]

    def project(self, columns) -> np.ndarray:
        """Project term-space columns (terms x n) to rows of semantic vectors."""
        out = np.asarray((self.term_factors.T @ columns)).T
        if self.normalize:
            out = _unit_rows(out)
        return out


def vocabulary_fingerprint(terms) -> str:
    return hashlib.sha256("\n".join(terms).encode()).hexdigest()[:16]


def _unit_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=-1, keepdims=True)
    return np.divide(x, norms, out=np.zeros_like(x), where=norms > 0)


def truncated_svd(a, k: int, seed: int = 42, oversample: int = 8, tol: float = 1e-6,
                  max_iter: int = 100) -> tuple[np.ndarray, np.ndarray, int]:
    """Top-k left singular vectors and values of ``a``.

    Block power iteration on a random starting block of k + oversample
    columns, re-orthonormalized every half step. Stops once every one of
    the top-k Ritz values moves by less than ``tol`` relative, or after
    ``max_iter`` rounds. Returns (U, s, rounds).
    """
    m, n = a.shape
    width = min(k + oversample, m, n)
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(a @ rng.standard_normal((n, width)))
    prev = None
    rounds = 0
    for rounds in range(1, max_iter + 1):
        z, _ = np.linalg.qr(np.asarray(a.T @ q))
        q, _ = np.linalg.qr(np.asarray(a @ z))
        s = np.linalg.svd(np.asarray(a.T @ q).T, compute_uv=False)[:k]
        if prev is not None and np.all(np.abs(s - prev) <= tol * s):
            break
        prev = s
    ub, s, _ = np.linalg.svd(np.asarray(a.T @ q).T, full_matrices=False)
    return q @ ub[:, :k], s[:k], rounds


def fit_lsi(matrix: TfIdfMatrix | np.ndarray | sp.spmatrix, k: int = 20, seed: int = 42,
            normalize: bool = False, terms=None, tol: float = 1e-6,
            max_iter: int = 100) -> tuple[LsiModel, np.ndarray]:
    """Fit a rank-k model and return it with the document vectors (n_docs x k).

    Document vectors are ``U_k^T x_d``, the same map applied to queries.
    When the matrix has fewer than k nonzero singular values the model is
    built with the effective rank instead, with a ``RankWarning``.
    """
    if k <= 0:
        raise ValueError(f"number of topics must be positive, got {k}")
    a = matrix.weights if isinstance(matrix, TfIdfMatrix) else matrix
    if sp.issparse(a):
        a = sp.csr_matrix(a, dtype=float)
    else:
        a = np.asarray(a, dtype=float)
    if k > min(a.shape):
        warnings.warn(f"k={k} exceeds matrix rank bound {min(a.shape)}", RankWarning)
        k = min(a.shape)

    u, s, rounds = truncated_svd(a, k, seed=seed, tol=tol, max_iter=max_iter)
    cutoff = s[0] * max(a.shape) * np.finfo(float).eps if s.size and s[0] > 0 else 0.0
    rank = int(np.sum(s > cutoff))
    if rank == 0:
        raise ValueError("matrix has no nonzero singular values")
    if rank < k:
        warnings.warn(f"effective rank {rank} < k={k}; using k={rank}", RankWarning)
        u, s, k = u[:, :rank], s[:rank], rank

    # deterministic signs: largest-magnitude entry of each column positive
    pivot = np.abs(u).argmax(axis=0)
    u = u * np.where(u[pivot, np.arange(k)] < 0, -1.0, 1.0)

    model = LsiModel(k=k, term_factors=u, singular_values=s,
                     vocabulary_fingerprint=vocabulary_fingerprint(terms) if terms is not None else "",
                     seed=seed, normalize=normalize, iterations=rounds)
    return model, model.project(a)


def project_query(model: LsiModel, query_weights) -> np.ndarray:
    """Fold a term-weight vector into semantic space."""
    if sp.issparse(query_weights):
        q = np.asarray(query_weights.todense()).ravel()
    else:
        q = np.asarray(query_weights, dtype=float).ravel()
    if q.shape[0] != model.num_terms:
        raise ValueError(f"query has {q.shape[0]} terms, model vocabulary has {model.num_terms}")
    if not q.any():
        warnings.warn("query has no known terms; projecting to the zero vector", EmptyQueryWarning)
    return model.project(q[:, None])[0]
