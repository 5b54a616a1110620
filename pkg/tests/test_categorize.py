import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hierindex.categorize import categorize, categorize_text
from hierindex.gaussmodel import fit_gaussian, mahalanobis
from hierindex.hierarchy import ClusterNode, ClusterTree, build_tree, document_set
from hierindex.pipeline import BuildParams, build_index

pytestmark = pytest.mark.property

CROSS = np.array([[3.0, 0.0], [-3.0, 0.0], [0.0, 3.0], [0.0, -3.0]])


def point_tree(groups, order):
    """Root over leaves whose members are the given point groups.

    ``order`` gives the node id of each group; the root takes id 0.
    """
    x = np.vstack(groups)
    bounds = np.cumsum([0] + [len(g) for g in groups])
    nodes = {}
    for g, nid in enumerate(order):
        idx = np.arange(bounds[g], bounds[g + 1])
        nodes[nid] = ClusterNode(id=nid, level=1, children=(), gaussian=fit_gaussian(x[idx]),
                                 doc_indices=idx)
    nodes[0] = ClusterNode(id=0, level=2, children=tuple(sorted(order)),
                           gaussian=fit_gaussian(x))
    return ClusterTree(root=0, nodes=nodes, doc_ids=[str(i) for i in range(len(x))],
                       doc_vectors=x, level_counts=[len(groups), 1])


@pytest.mark.parametrize("order", [(1, 2, 3), (2, 1, 3)])
def test_equidistant_children_lower_id_wins(order):
    a, b, c = CROSS + [1.0, 0.0], CROSS + [-1.0, 0.0], CROSS + [0.0, 10.0]
    tree = point_tree([a, b, c], order)
    res = categorize(tree, [0.0, 0.0])
    d1 = mahalanobis(tree.nodes[1].gaussian, [0.0, 0.0])
    assert d1 == mahalanobis(tree.nodes[2].gaussian, [0.0, 0.0])
    assert res.node == 1
    assert res.path == [0, 1]
    assert res.child_distances == [d1] and d1 < res.distances[0]


def test_single_node_tree():
    tree = build_tree([[1.0, 1.0]])
    res = categorize(tree, [5.0, 5.0])
    assert res.node == tree.root and res.path == [tree.root]


def test_dimension_mismatch(blob_data):
    tree = build_tree(blob_data[0][:20], beta=1.0)
    with pytest.raises(ValueError):
        categorize(tree, np.zeros(3))


@pytest.fixture(scope="module")
def blob_tree(blob_data):
    return build_tree(blob_data[0], beta=1.0)


def test_blob_means_reach_their_leaves(blob_tree, blob_data):
    _, labels, means = blob_data
    for b, mean in enumerate(means):
        res = categorize(blob_tree, mean)
        node = blob_tree.nodes[res.node]
        assert node.is_leaf
        assert set(labels[blob_tree.document_indices(res.node)].tolist()) == {b}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_descent_invariants(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(60, 4)) * rng.uniform(0.5, 5, size=4)
    tree = build_tree(x, beta=0.5, seed=1)
    q = rng.normal(size=4) * 4
    res = categorize(tree, q)
    assert res.path[0] == tree.root and res.path[-1] == res.node
    for parent, child in zip(res.path, res.path[1:]):
        assert child in tree.nodes[parent].children
    assert all(b < a for a, b in zip(res.distances, res.distances[1:]))
    assert len(res.path) <= tree.height()
    assert categorize(tree, q).to_dict() == res.to_dict()


@pytest.fixture(scope="module")
def text_tree(text_docs):
    return build_index(text_docs, BuildParams())[0]


def test_training_text_self_categorizes(text_tree, text_docs):
    hits = 0
    for j, doc in enumerate(text_docs):
        res = categorize_text(text_tree, doc.text)
        hits += j in text_tree.document_indices(res.node)
    assert hits / len(text_docs) >= 0.95


def test_empty_text_lands_at_root(text_tree):
    for text in ("", "the and of", "zzzz qqqq"):
        res = categorize_text(text_tree, text)
        assert res.node == text_tree.root
        assert res.warnings == ["no-known-terms"]


def test_concatenation_of_leaf_mates(text_tree, text_docs):
    checked = 0
    for leaf in text_tree.leaves():
        members = text_tree.document_indices(leaf)
        if len(members) < 2:
            continue
        a, b = members[:2]
        res = categorize_text(text_tree, text_docs[a].text + "\n" + text_docs[b].text)
        assert document_set(text_tree, leaf) <= document_set(text_tree, res.node)
        checked += 1
    assert checked > 0
