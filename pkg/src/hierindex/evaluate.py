"""Clustering quality, baselines, categorization accuracy and parameter sweeps."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist

from .categorize import categorize
from .corpus import PreprocessConfig, RawDocument, build_matrix, preprocess, query_weights
from .divisive import FlatClustering, lloyd
from .hierarchy import ClusterTree, build_tree
from .lsi import fit_lsi

log = logging.getLogger(__name__)

SWEEP_FIELDS = ("topics", "beta", "num_clusters", "leaf_clusters", "levels", "height",
                "level_counts", "f_measure", "accuracy", "status")


@dataclass
class ContingencyTable:
    counts: np.ndarray          # classes x clusters
    classes: list
    clusters: list

    @property
    def class_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def cluster_totals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def contingency(labels: Sequence, assignments: Sequence) -> ContingencyTable:
    """Class x cluster counts, skipping documents without a label."""
    pairs = [(l, a) for l, a in zip(labels, assignments) if l is not None]
    classes = sorted({l for l, _ in pairs})
    clusters = sorted({a for _, a in pairs})
    ci = {c: i for i, c in enumerate(classes)}
    ki = {c: i for i, c in enumerate(clusters)}
    counts = np.zeros((len(classes), len(clusters)), dtype=np.int64)
    for l, a in pairs:
        counts[ci[l], ki[a]] += 1
    return ContingencyTable(counts, classes, clusters)


def _pair_f(n_ij, n_i, n_j):
    with np.errstate(divide="ignore", invalid="ignore"):
        p = n_ij / n_j
        r = n_ij / n_i
        f = 2 * p * r / (p + r)
    return np.where(n_ij > 0, f, 0.0)


def f_measure(table: ContingencyTable) -> float:
    """Class-size weighted best-match F over clusters.

    For class i and cluster j, P = n_ij/n_j, R = n_ij/n_i and
    F(i, j) = 2PR/(P+R); the overall score is sum_i (n_i/N) max_j F(i, j).
    Empty cluster columns are ignored.
    """
    n = table.counts.astype(float)
    if n.sum() == 0:
        raise ValueError("empty contingency table")
    n_i = n.sum(axis=1, keepdims=True)
    n_j = n.sum(axis=0, keepdims=True)
    keep = n_j[0] > 0
    f = _pair_f(n[:, keep], n_i, n_j[:, keep])
    best = f.max(axis=1) if f.size else np.zeros(len(n))
    return float((n_i[:, 0] / n.sum()) @ best)


def hierarchical_f_measure(tree: ClusterTree, labels: Sequence) -> float:
    """F-measure where every tree node competes as a candidate cluster."""
    lab = np.array([l if l is not None else "" for l in labels], dtype=object)
    mask = np.array([l is not None for l in labels])
    classes = sorted({l for l in labels if l is not None})
    rows = []
    for nid in sorted(tree.nodes):
        members = tree.document_indices(nid)
        members = members[mask[members]]
        vals = lab[members]
        rows.append([np.sum(vals == c) for c in classes])
    n_ij = np.array(rows, dtype=float).T              # classes x nodes
    n_i = np.array([np.sum(lab[mask] == c) for c in classes], dtype=float)[:, None]
    n_j = n_ij.sum(axis=0, keepdims=True)
    keep = n_j[0] > 0
    best = _pair_f(n_ij[:, keep], n_i, n_j[:, keep]).max(axis=1)
    return float((n_i[:, 0] / n_i.sum()) @ best)


def level_partition(tree: ClusterTree, level: int) -> np.ndarray:
    """Flat assignment obtained by cutting the tree at ``level``.

    Each document goes to its highest ancestor whose level is <= ``level``
    (the leaf itself if even that is above the cut).
    """
    parents = tree.parent_map()
    out = np.empty(len(tree.doc_ids), dtype=np.int64)
    for leaf in tree.leaves():
        node = leaf
        while node in parents and tree.nodes[parents[node]].level <= level:
            node = parents[node]
        out[tree.nodes[leaf].doc_indices] = node
    return out


def _relabel(labels: np.ndarray) -> list[np.ndarray]:
    return [np.flatnonzero(labels == j) for j in np.unique(labels)]


def _d2_seeds(x: np.ndarray, k: int, rng: np.random.Generator) -> list[int]:
    """k distinct row indices, each drawn with probability proportional to
    the squared distance from the rows already chosen."""
    n = len(x)
    centers = [int(rng.integers(n))]
    d2 = ((x - x[centers[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            j = int(rng.choice(n, p=d2 / total))
        else:
            j = int(np.flatnonzero(~np.isin(np.arange(n), centers))[0])
        centers.append(j)
        d2 = np.minimum(d2, ((x - x[j]) ** 2).sum(axis=1))
    return centers


def kmeans_baseline(points, k: int, seed: int = 42, restarts: int = 10,
                    max_iter: int = 100) -> FlatClustering:
    """Lloyd's k-means with D^2-weighted seeding, best of ``restarts`` runs."""
    x = np.asarray(points, dtype=float)
    n = len(x)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    best = None
    for r in range(restarts):
        centers = _d2_seeds(x, k, np.random.default_rng([seed, r]))
        labels, c, history, _ = lloyd(x, x[centers], max_iter)
        cost = history[-1]
        if best is None or cost < best.cost:
            clusters = _relabel(labels)
            assign = np.empty(n, dtype=np.int64)
            for j, m in enumerate(clusters):
                assign[m] = j
            best = FlatClustering(clusters, assign, cost=cost, history=history, centers=c)
    return best


def _pam_build(d: np.ndarray, k: int) -> np.ndarray:
    """Greedy BUILD: start at the most central point, then add the point
    that lowers the total distance the most."""
    medoids = [int(d.sum(axis=0).argmin())]
    near = d[:, medoids[0]].copy()
    is_med = np.zeros(len(d), dtype=bool)
    is_med[medoids[0]] = True
    for _ in range(1, k):
        gain = np.maximum(near[:, None] - d, 0.0).sum(axis=0)
        gain[is_med] = -np.inf
        j = int(gain.argmax())
        medoids.append(j)
        is_med[j] = True
        near = np.minimum(near, d[:, j])
    return np.array(medoids)


def _nearest_two(dm: np.ndarray):
    """Slot of the nearest column per row (lowest slot on ties), its distance
    and the second-smallest distance (inf with a single column)."""
    n, k = dm.shape
    rows = np.arange(n)
    if k == 1:
        return np.zeros(n, dtype=np.int64), dm[:, 0].copy(), np.full(n, np.inf)
    nearest = dm.argmin(axis=1)
    dn = dm[rows, nearest]
    if k == 2:
        return nearest, dn, dm[rows, 1 - nearest]
    ds = np.partition(dm, 1, axis=1)[:, 1]
    return nearest, dn, ds


def _pam_swap(d: np.ndarray, medoids: np.ndarray, max_swaps: int) -> tuple[np.ndarray, float]:
    """Best-improvement swaps until none lowers the cost.

    Each round scores every (medoid, candidate) pair at once, in the manner
    of FastPAM1. With e = d(o, c) - d(o, nearest medoid), a point o moves to
    candidate c if e < 0 whichever medoid leaves; otherwise it only pays when
    its own medoid leaves, by clip(e, 0, second-nearest gap).
    """
    n, k = len(d), len(medoids)
    medoids = medoids.copy()
    rows = np.arange(n)
    e = np.empty_like(d)
    own = np.empty_like(d)
    swaps = 0
    while True:
        nearest, dn, ds = _nearest_two(d[:, medoids])
        if swaps >= max_swaps or k == n:
            break
        np.subtract(d, dn[:, None], out=e)
        np.maximum(e, 0.0, out=own)
        np.minimum(own, (ds - dn)[:, None], out=own)
        np.minimum(e, 0.0, out=e)
        shared = e.sum(axis=0)
        onehot = sp.csr_matrix((np.ones(n), (nearest, rows)), shape=(k, n))
        delta = shared[None, :] + onehot @ own
        delta[:, medoids] = np.inf
        i, j = np.unravel_index(int(delta.argmin()), delta.shape)
        if not delta[i, j] < -1e-12 * max(float(dn.sum()), 1.0):
            break
        medoids[i] = j
        swaps += 1
    return medoids, float(dn.sum())


def kmedoids_baseline(points, k: int, seed: int = 42, restarts: int = 10,
                      max_swaps: int = 200) -> FlatClustering:
    """PAM over Euclidean distances, best of several starts.

    The first start is the greedy BUILD; the others are ``k`` distinct points
    drawn uniformly with ``seed``. Each start is improved by swaps until no swap helps
    or ``max_swaps`` is reached. Ties in cost keep the earlier start.
    """
    x = np.asarray(points, dtype=float)
    n = len(x)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    d = cdist(x, x)
    best, best_cost = None, np.inf
    for r in range(max(restarts, 1)):
        if r == 0:
            start = _pam_build(d, k)
        else:
            start = np.random.default_rng([seed, r]).choice(n, size=k, replace=False)
        medoids, cost = _pam_swap(d, start, max_swaps)
        if cost < best_cost:
            best, best_cost = medoids, cost
    labels = d[:, best].argmin(axis=1)
    clusters = [np.flatnonzero(labels == j) for j in range(k)]
    return FlatClustering(clusters, labels.astype(np.int64), cost=best_cost, centers=best)


def medoid_cost(points, medoids) -> float:
    x = np.asarray(points, dtype=float)
    return float(cdist(x, x[list(medoids)]).min(axis=1).sum())


def nearest_by_cosine(train: np.ndarray, test: np.ndarray) -> np.ndarray:
    """Index of the most cosine-similar training row for every test row.

    Ties go to the lowest index; zero rows have similarity 0 to everything.
    """
    def unit(a):
        nrm = np.linalg.norm(a, axis=1, keepdims=True)
        return np.divide(a, nrm, out=np.zeros_like(a), where=nrm > 0)
    return (unit(np.atleast_2d(test)) @ unit(np.atleast_2d(train)).T).argmax(axis=1)


def accuracy_protocol(tree: ClusterTree, train_vectors, test_vectors) -> float:
    """Percentage of test vectors whose categorized node contains their
    most cosine-similar training document."""
    train = np.asarray(train_vectors, dtype=float)
    test = np.atleast_2d(np.asarray(test_vectors, dtype=float))
    if len(test) == 0:
        raise ValueError("empty test set")
    nn = nearest_by_cosine(train, test)
    hits = 0
    for q, target in zip(test, nn):
        members = tree.document_indices(categorize(tree, q).node)
        i = np.searchsorted(members, target)
        hits += bool(i < len(members) and members[i] == target)
    return 100.0 * hits / len(test)


def text_vectors(tree: ClusterTree, docs: Sequence[RawDocument]) -> np.ndarray:
    """Fold raw documents into the tree's semantic space."""
    if not docs:
        return np.zeros((0, tree.lsi.k))
    q = np.column_stack([query_weights(preprocess(d, tree.preprocess), tree.vocabulary)
                         for d in docs])
    return tree.lsi.project(q)


def compare_baselines(tree: ClusterTree, ks: Sequence[int] | None = None, seed: int = 42) -> list[dict]:
    """F-measure of every level cut of the tree, and of both baselines at the
    Level-1 cluster count plus any extra ``ks``.

    Rows are ordered by k; ``method`` is one of hierarchy/kmeans/kmedoids.
    """
    labels = tree.labels
    if labels is None or all(l is None for l in labels):
        raise ValueError("tree has no class labels")
    x = tree.doc_vectors
    rows, seen = [], set()
    for level in range(1, max(n.level for n in tree.nodes.values()) + 1):
        assign = level_partition(tree, level)
        k = len(np.unique(assign))
        if k in seen:
            continue
        seen.add(k)
        rows.append({"method": "hierarchy", "k": k, "level": level,
                     "f_measure": f_measure(contingency(labels, assign))})
    for k in sorted({tree.level_counts[0]} | set(ks or ())):
        if not 1 <= k <= len(x):
            continue
        km = kmeans_baseline(x, k, seed=seed)
        rows.append({"method": "kmeans", "k": k, "level": None,
                     "f_measure": f_measure(contingency(labels, km.assignments))})
        kd = kmedoids_baseline(x, k, seed=seed)
        rows.append({"method": "kmedoids", "k": k, "level": None,
                     "f_measure": f_measure(contingency(labels, kd.assignments))})
    return sorted(rows, key=lambda r: (r["k"], r["method"]))


def sweep(docs: Sequence[RawDocument], topic_values: Sequence[int], beta_values: Sequence[float],
          seed: int = 42, config: PreprocessConfig | None = None, min_split_size: int = 4,
          literal_offset: bool = False, normalize: bool = False,
          test_docs: Sequence[RawDocument] | None = None) -> list[dict]:
    """One tree per (topics, beta) pair; returns one metrics row per pair.

    The TF-IDF matrix is built once and the LSI model once per topic count.
    A failing cell is reported in its ``status`` column and the sweep goes on.
    """
    config = config or PreprocessConfig()
    vocab, matrix = build_matrix(docs, config)
    labels = [d.label for d in docs]
    rows = []
    for topics in topic_values:
        try:
            model, vectors = fit_lsi(matrix, topics, seed=seed, normalize=normalize,
                                     terms=vocab.terms)
        except Exception as e:  # noqa: BLE001 - a bad cell must not end the sweep
            rows.extend(_failed(topics, b, e) for b in beta_values)
            continue
        test_vecs = None
        if test_docs:
            q = np.column_stack([query_weights(preprocess(d, config), vocab) for d in test_docs])
            test_vecs = model.project(q)
        for beta in beta_values:
            try:
                tree = build_tree(vectors, beta=beta, min_split_size=min_split_size, seed=seed,
                                  literal_offset=literal_offset, doc_ids=[d.id for d in docs],
                                  labels=labels)
                fm = ""
                if any(l is not None for l in labels):
                    fm = f_measure(contingency(labels, level_partition(tree, 1)))
                acc = accuracy_protocol(tree, vectors, test_vecs) if test_vecs is not None else ""
                rows.append({"topics": topics, "beta": beta, "num_clusters": len(tree),
                             "leaf_clusters": tree.level_counts[0],
                             "levels": len(tree.level_counts), "height": tree.height(),
                             "level_counts": "-".join(map(str, reversed(tree.level_counts))),
                             "f_measure": fm, "accuracy": acc, "status": "ok"})
                log.info("sweep topics=%s beta=%s -> %d clusters", topics, beta, len(tree))
            except Exception as e:  # noqa: BLE001
                rows.append(_failed(topics, beta, e))
    return rows


def _failed(topics, beta, err) -> dict:
    log.warning("sweep cell topics=%s beta=%s failed: %s", topics, beta, err)
    row = {f: "" for f in SWEEP_FIELDS}
    row.update(topics=topics, beta=beta, status=f"failed: {err}")
    return row
