"""End-to-end index construction from raw documents."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Sequence

from .corpus import IngestReport, PreprocessConfig, RawDocument, build_matrix
from .hierarchy import ClusterTree, build_tree, node_top_terms
from .lsi import fit_lsi

log = logging.getLogger(__name__)


@dataclass
class BuildParams:
    topics: int = 20
    beta: float = 0.5
    seed: int = 42
    min_split_size: int = 4
    literal_offset: bool = False
    normalize: bool = False
    top_terms: int = 10

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pddp_offset"] = "mean |(x - mu).v|" if not self.literal_offset else "mean x.v (literal)"
        d["covariance"] = "population (1/n)"
        d["doc_vector"] = "U_k^T x"
        return d


def build_index(docs: Sequence[RawDocument], params: BuildParams | None = None,
                config: PreprocessConfig | None = None,
                report: IngestReport | None = None) -> tuple[ClusterTree, object]:
    """Vectorize, fit LSI and build the cluster tree.

    Returns the tree (with LSI model, vocabulary and top terms attached)
    and the TF-IDF matrix it was built from.
    """
    params = params or BuildParams()
    config = config or PreprocessConfig()
    vocab, matrix = build_matrix(docs, config, report)
    log.info("matrix %d terms x %d docs", *matrix.shape)
    model, vectors = fit_lsi(matrix, params.topics, seed=params.seed,
                             normalize=params.normalize, terms=vocab.terms)
    log.info("lsi k=%d after %d rounds", model.k, model.iterations)
    tree = build_tree(vectors, beta=params.beta, min_split_size=params.min_split_size,
                      seed=params.seed, literal_offset=params.literal_offset,
                      doc_ids=[d.id for d in docs], labels=[d.label for d in docs])
    tree.lsi = model
    tree.vocabulary = vocab
    tree.preprocess = config
    tree.build_params = params.to_dict() | {"topics_effective": model.k}
    for nid in tree.nodes:
        tree.nodes[nid].top_terms = node_top_terms(tree, nid, matrix, vocab, params.top_terms)
    log.info("tree: %d nodes, level counts %s", len(tree), tree.level_counts)
    return tree, matrix
