"""Route queries down the cluster tree by Mahalanobis distance."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .corpus import is_known, preprocess, query_weights
from .gaussmodel import mahalanobis
from .hierarchy import ClusterTree
from .lsi import EmptyQueryWarning, project_query


@dataclass
class CategorizationResult:
    node: int
    path: list[int]
    distances: list[float]              # distance to each node on the path
    child_distances: list[float] = field(default_factory=list)  # best child at each step
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"node": self.node, "path": self.path, "distances": self.distances,
                "child_distances": self.child_distances, "warnings": self.warnings}


def categorize(tree: ClusterTree, query) -> CategorizationResult:
    """Descend from the root while the closest child is strictly closer than
    the current node; stop at a leaf or when no child improves.

    Ties between children go to the lowest node id.
    """
    q = np.asarray(query, dtype=float).ravel()
    root = tree.nodes[tree.root]
    if q.shape[0] != root.gaussian.dim:
        raise ValueError(f"query has dimension {q.shape[0]}, tree expects {root.gaussian.dim}")
    node = root
    here = mahalanobis(node.gaussian, q)
    res = CategorizationResult(node=node.id, path=[node.id], distances=[here])
    while not node.is_leaf:
        best_d, best = min((mahalanobis(tree.nodes[c].gaussian, q), c)
                           for c in sorted(node.children))
        res.child_distances.append(best_d)
        if not best_d < here:
            break
        node, here = tree.nodes[best], best_d
        res.path.append(node.id)
        res.distances.append(here)
    res.node = node.id
    return res


def categorize_text(tree: ClusterTree, raw_text: str) -> CategorizationResult:
    """Preprocess, weight and fold in ``raw_text``, then categorize it.

    Text without any vocabulary term is placed at the root with a warning.
    """
    if tree.lsi is None or tree.vocabulary is None:
        raise ValueError("tree carries no text model; build it from a corpus")
    tokens = preprocess(raw_text, tree.preprocess)
    if not is_known(tokens, tree.vocabulary):
        root = tree.nodes[tree.root]
        d = mahalanobis(root.gaussian, np.zeros(root.gaussian.dim))
        return CategorizationResult(node=tree.root, path=[tree.root], distances=[d],
                                    warnings=["no-known-terms"])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", EmptyQueryWarning)
        vec = project_query(tree.lsi, query_weights(tokens, tree.vocabulary))
    res = categorize(tree, vec)
    if any(issubclass(w.category, EmptyQueryWarning) for w in caught):
        res.warnings.append("zero-query-vector")
    return res
