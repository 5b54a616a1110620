"""Bottom-up cluster tree built from repeated flat clustering."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .divisive import flat_cluster
from .gaussmodel import GaussianModel, fit_gaussian

MAX_LEVELS = 32


class HierarchyError(RuntimeError):
    pass


@dataclass
class ClusterNode:
    id: int
    level: int
    children: tuple[int, ...]
    gaussian: GaussianModel
    doc_indices: np.ndarray | None = None   # direct members, leaves only
    top_terms: list[tuple[str, float]] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def representative(self) -> np.ndarray:
        return self.gaussian.centroid


@dataclass
class ClusterTree:
    root: int
    nodes: dict[int, ClusterNode]
    doc_ids: list[str]
    doc_vectors: np.ndarray
    level_counts: list[int]
    build_params: dict = field(default_factory=dict)
    labels: list[str | None] | None = None
    lsi: object = None          # LsiModel, when built from text
    vocabulary: object = None   # corpus.Vocabulary
    preprocess: object = None   # corpus.PreprocessConfig

    def __post_init__(self):
        self._docsets: dict[int, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.nodes)

    def document_indices(self, node_id: int) -> np.ndarray:
        """Sorted document indices under ``node_id`` (the node's Document-Set)."""
        if node_id not in self.nodes:
            raise KeyError(f"unknown node id {node_id}")
        hit = self._docsets.get(node_id)
        if hit is not None:
            return hit
        node = self.nodes[node_id]
        if node.is_leaf:
            out = np.sort(node.doc_indices)
        else:
            out = np.sort(np.concatenate([self.document_indices(c) for c in node.children]))
        self._docsets[node_id] = out
        return out

    def leaves(self) -> list[int]:
        return [i for i, n in self.nodes.items() if n.is_leaf]

    def parent_map(self) -> dict[int, int]:
        return {c: i for i, n in self.nodes.items() for c in n.children}

    def height(self) -> int:
        """Number of node levels on the longest root-to-leaf path."""
        def depth(i):
            n = self.nodes[i]
            return 1 + max((depth(c) for c in n.children), default=0)
        return depth(self.root)

    def canonical(self):
        """Nested tuple form for isomorphism checks."""
        def walk(i):
            n = self.nodes[i]
            if n.is_leaf:
                return ("leaf", tuple(self.doc_ids[j] for j in self.document_indices(i)))
            return ("node", tuple(sorted(walk(c) for c in n.children)))
        return walk(self.root)


def document_set(tree: ClusterTree, node_id: int) -> frozenset[str]:
    return frozenset(tree.doc_ids[i] for i in tree.document_indices(node_id))


def build_tree(doc_vectors, beta: float = 0.5, min_split_size: int = 4, seed: int = 42,
               literal_offset: bool = False, doc_ids=None, labels=None) -> ClusterTree:
    """Cluster the documents, then cluster cluster centroids level by level
    until one cluster remains. Single-child nodes are collapsed afterwards.
    """
    x = np.atleast_2d(np.asarray(doc_vectors, dtype=float))
    n = len(x)
    if n == 0:
        raise ValueError("build_tree needs at least one document vector")
    doc_ids = list(doc_ids) if doc_ids is not None else [str(i) for i in range(n)]
    opts = dict(beta=beta, min_split_size=min_split_size, seed=seed, literal_offset=literal_offset)

    nodes: dict[int, ClusterNode] = {}
    docsets: dict[int, np.ndarray] = {}

    def add(level, children, members):
        nid = len(nodes)
        nodes[nid] = ClusterNode(id=nid, level=level, children=tuple(children),
                                 gaussian=fit_gaussian(x[members]),
                                 doc_indices=members if not children else None)
        docsets[nid] = members
        return nid

    flat = flat_cluster(x, **opts)
    current = [add(1, (), np.sort(c)) for c in flat.clusters]
    level_counts = [len(current)]
    level = 1
    while len(current) > 1:
        if level >= MAX_LEVELS:
            raise HierarchyError(f"no root after {MAX_LEVELS} levels")
        reps = np.vstack([nodes[i].representative for i in current])
        flat = flat_cluster(reps, **opts)
        level += 1
        groups = [[current[j] for j in c] for c in flat.clusters]
        current = [add(level, g, np.sort(np.concatenate([docsets[i] for i in g])))
                   for g in groups]
        level_counts.append(len(current))

    tree = ClusterTree(root=current[0], nodes=nodes, doc_ids=doc_ids, doc_vectors=x,
                       level_counts=level_counts, labels=list(labels) if labels is not None else None,
                       build_params=dict(opts))
    return collapse_single_children(tree)


def collapse_single_children(tree: ClusterTree) -> ClusterTree:
    """Replace every internal node that has one child by that child.

    Surviving nodes are renumbered densely in their original id order.
    """
    def through(i):
        while len(tree.nodes[i].children) == 1:
            i = tree.nodes[i].children[0]
        return i

    keep, stack = [], [through(tree.root)]
    while stack:
        i = stack.pop()
        keep.append(i)
        stack.extend(through(c) for c in tree.nodes[i].children)
    keep.sort()
    new_id = {old: new for new, old in enumerate(keep)}
    nodes = {}
    for old in keep:
        n = tree.nodes[old]
        nodes[new_id[old]] = replace(n, id=new_id[old],
                                     children=tuple(new_id[through(c)] for c in n.children))
    return replace(tree, root=new_id[through(tree.root)], nodes=nodes)


def node_top_terms(tree: ClusterTree, node_id: int, matrix, vocabulary,
                   m: int = 10) -> list[tuple[str, float]]:
    """Top-m terms by TF-IDF weight summed over the node's documents."""
    weights = matrix.weights if hasattr(matrix, "weights") else matrix
    cols = tree.document_indices(node_id)
    total = np.asarray(weights[:, cols].sum(axis=1)).ravel()
    order = sorted((i for i in np.flatnonzero(total > 0)), key=lambda i: (-total[i], i))
    return [(vocabulary.terms[i], float(total[i])) for i in order[:m]]
