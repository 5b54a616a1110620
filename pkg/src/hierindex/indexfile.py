"""JSON serialization of a built index (format tag ``hierindex/1``).

Layout::

    {"format": "hierindex/1",
     "build_params": {...}, "preprocess": {...},
     "vocabulary": {"terms": [...], "doc_freq": [...], "n_docs": N},
     "lsi": {"k", "seed", "normalize", "convention", "iterations",
             "vocabulary_fingerprint", "singular_values": [k],
             "term_factors": [[k floats] per term]},
     "documents": {"ids": [...], "labels": [...], "vectors": [[k] per doc]},
     "level_counts": [...], "root": id,
     "nodes": [{"id", "level", "children", "member_doc_ids" (leaves only),
                "n", "centroid", "covariance", "ridge", "top_terms"}]}

Floats are written with full repr precision so a reloaded index routes
queries exactly like the one that was saved.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .corpus import PreprocessConfig, Vocabulary
from .gaussmodel import GaussianModel, regularized_precision
from .hierarchy import ClusterNode, ClusterTree
from .lsi import LsiModel

FORMAT = "hierindex/1"


class IndexFormatError(ValueError):
    pass


def tree_to_dict(tree: ClusterTree) -> dict:
    out = {"format": FORMAT, "build_params": tree.build_params}
    if tree.preprocess is not None:
        out["preprocess"] = tree.preprocess.to_dict()
    if tree.vocabulary is not None:
        v = tree.vocabulary
        out["vocabulary"] = {"terms": v.terms, "doc_freq": v.doc_freq.tolist(), "n_docs": v.n_docs}
    if tree.lsi is not None:
        m = tree.lsi
        out["lsi"] = {
            "k": m.k, "seed": m.seed, "normalize": m.normalize, "convention": m.convention,
            "iterations": m.iterations, "vocabulary_fingerprint": m.vocabulary_fingerprint,
            "singular_values": m.singular_values.tolist(),
            "term_factors": m.term_factors.tolist(),
        }
    out["documents"] = {"ids": tree.doc_ids, "labels": tree.labels,
                        "vectors": tree.doc_vectors.tolist()}
    out["level_counts"] = tree.level_counts
    out["root"] = tree.root
    nodes = []
    for nid in sorted(tree.nodes):
        n = tree.nodes[nid]
        rec = {"id": n.id, "level": n.level, "children": list(n.children)}
        if n.is_leaf:
            rec["member_doc_ids"] = [tree.doc_ids[i] for i in n.doc_indices]
        g = n.gaussian
        rec.update(n=g.n, centroid=g.centroid.tolist(), covariance=g.covariance.tolist(),
                   ridge=g.ridge, top_terms=[[t, w] for t, w in n.top_terms])
        nodes.append(rec)
    out["nodes"] = nodes
    return out


def tree_from_dict(d: dict) -> ClusterTree:
    if d.get("format") != FORMAT:
        raise IndexFormatError(f"unsupported index format {d.get('format')!r}")
    docs = d["documents"]
    pos = {doc_id: i for i, doc_id in enumerate(docs["ids"])}
    nodes = {}
    for rec in d["nodes"]:
        cov = np.array(rec["covariance"], dtype=float)
        centroid = np.array(rec["centroid"], dtype=float)
        prec, ridge = regularized_precision(cov)
        if ridge != rec["ridge"]:
            raise IndexFormatError(f"node {rec['id']}: stored ridge does not match covariance")
        g = GaussianModel(centroid=centroid, covariance=cov, precision=prec, ridge=ridge, n=rec["n"])
        members = rec.get("member_doc_ids")
        nodes[rec["id"]] = ClusterNode(
            id=rec["id"], level=rec["level"], children=tuple(rec["children"]), gaussian=g,
            doc_indices=np.array([pos[m] for m in members], dtype=np.int64) if members is not None else None,
            top_terms=[(t, w) for t, w in rec["top_terms"]])
    tree = ClusterTree(root=d["root"], nodes=nodes, doc_ids=list(docs["ids"]),
                       doc_vectors=np.array(docs["vectors"], dtype=float).reshape(len(docs["ids"]), -1),
                       level_counts=list(d["level_counts"]), build_params=d["build_params"],
                       labels=docs.get("labels"))
    if "vocabulary" in d:
        v = d["vocabulary"]
        tree.vocabulary = Vocabulary(list(v["terms"]), np.array(v["doc_freq"], dtype=np.int64), v["n_docs"])
    if "preprocess" in d:
        tree.preprocess = PreprocessConfig.from_dict(d["preprocess"])
    if "lsi" in d:
        m = d["lsi"]
        tree.lsi = LsiModel(k=m["k"], term_factors=np.array(m["term_factors"], dtype=float).reshape(-1, m["k"]),
                            singular_values=np.array(m["singular_values"], dtype=float),
                            vocabulary_fingerprint=m["vocabulary_fingerprint"], seed=m["seed"],
                            normalize=m["normalize"], iterations=m["iterations"],
                            convention=m["convention"])
    return tree


def save_index(tree: ClusterTree, path: str | Path) -> None:
    Path(path).write_text(json.dumps(tree_to_dict(tree), separators=(",", ":")))


def load_index(path: str | Path) -> ClusterTree:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise IndexFormatError(f"{path}: not a JSON index ({e})") from e
    return tree_from_dict(d)
