"""Hierarchical document index: LSI semantic space, quality-pruned divisive
clustering stacked level by level, and Mahalanobis tree search for queries."""

from .categorize import CategorizationResult, categorize, categorize_text
from .corpus import PreprocessConfig, RawDocument, build_matrix, load_corpus, preprocess
from .divisive import flat_cluster
from .gaussmodel import GaussianModel, cluster_quality, fit_gaussian, mahalanobis
from .hierarchy import ClusterNode, ClusterTree, build_tree, document_set
from .indexfile import load_index, save_index
from .lsi import LsiModel, fit_lsi, project_query
from .pipeline import BuildParams, build_index

__version__ = "0.1.0"
