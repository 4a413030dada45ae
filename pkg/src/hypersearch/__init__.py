"""Search-based hyperedge prediction with relaxed overlap scores and
anti-monotonic pruning bounds."""

from .bounds import BoundParams, bound_fn, bound_ft, bound_ft_safe
from .estimator import HyperSearch
from .hypergraph import Hyperedge, Hypergraph, build_incidence, missing_count, overlap_ratio
from .ingest import DatasetSplit, PathBundle, parse_dataset, preprocess, split
from .metrics import avg_f1, recall_at_k
from .scoring import ScoreParams, feature_similarity, score_f1, score_f2, score_final
from .search import PredictionReport, TopKBuffer, predict, size_targets
from .support import RelaxationParams, SupportSet, candidate_pool, max_support

__version__ = "0.1.0"

__all__ = [
    "BoundParams",
    "DatasetSplit",
    "Hyperedge",
    "HyperSearch",
    "Hypergraph",
    "PathBundle",
    "PredictionReport",
    "RelaxationParams",
    "ScoreParams",
    "SupportSet",
    "TopKBuffer",
    "avg_f1",
    "bound_fn",
    "bound_ft",
    "bound_ft_safe",
    "build_incidence",
    "candidate_pool",
    "feature_similarity",
    "max_support",
    "missing_count",
    "overlap_ratio",
    "parse_dataset",
    "predict",
    "preprocess",
    "recall_at_k",
    "score_f1",
    "score_f2",
    "score_final",
    "size_targets",
    "split",
]
