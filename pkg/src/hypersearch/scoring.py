"""Candidate scores: overlap-weighted support, time weighting, feature weighting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Optional

from .exceptions import MissingFeatures, SizeTooSmall
from .hypergraph import Hypergraph
from .support import RelaxationParams, SupportSet, max_support

__all__ = [
    "ScoreParams",
    "time_weights",
    "jaccard",
    "feature_similarity",
    "score_f1",
    "score_f2",
    "score_final",
    "Scorer",
]


@dataclass(frozen=True)
class ScoreParams:
    relax: RelaxationParams = field(default_factory=RelaxationParams)
    tau: float = 0.0
    alpha: float = 0.0
    use_time: bool = False
    use_features: bool = False

    def __post_init__(self):
        if self.tau < 0 or self.alpha < 0:
            raise ValueError("tau and alpha must be non-negative")

    def resolve(self, h: Hypergraph) -> "ScoreParams":
        """Validate the flags against what ``h`` carries."""
        if self.use_time:
            h.require_timestamps()
        if self.use_features:
            h.require_features()
        return self

    def to_dict(self) -> dict:
        return {
            "eps_v": str(self.relax.eps_v),
            "eps_e": str(self.relax.eps_e),
            "eps_t": str(self.relax.eps_t),
            "tau": self.tau,
            "alpha": self.alpha,
            "use_time": self.use_time,
            "use_features": self.use_features,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScoreParams":
        return cls(
            RelaxationParams(d.get("eps_v", 0), d.get("eps_e", 0), d.get("eps_t", 0)),
            tau=float(d.get("tau", 0.0)),
            alpha=float(d.get("alpha", 0.0)),
            use_time=bool(d.get("use_time", False)),
            use_features=bool(d.get("use_features", False)),
        )

    def with_relax(self, relax: RelaxationParams) -> "ScoreParams":
        return replace(self, relax=relax)


def time_weights(h: Hypergraph, tau: float) -> list:
    """``exp(tau * t_e)`` for every edge of ``h``."""
    h.require_timestamps()
    return [math.exp(tau * t) for t in h.timestamps]


def jaccard(a: frozenset, b: frozenset) -> float:
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a & b) / union


def feature_similarity(h: Hypergraph, candidate) -> float:
    """Mean pairwise Jaccard index of the members' feature sets."""
    if h.features is None:
        raise MissingFeatures("hypergraph has no node features")
    nodes = sorted(set(candidate))
    if len(nodes) < 2:
        raise SizeTooSmall("feature similarity needs at least two nodes")
    feats = h.features
    pairs = list(combinations(nodes, 2))
    return sum(jaccard(feats[u], feats[v]) for u, v in pairs) / len(pairs)


def _feature_factor(h: Hypergraph, candidate, alpha: float) -> float:
    if len(set(candidate)) < 2:
        return 1.0
    return feature_similarity(h, candidate) ** alpha


def score_f1(h: Hypergraph, candidate, relax: RelaxationParams) -> float:
    """Sum of overlap ratios over the maximum support set."""
    return math.fsum(max_support(h, candidate, relax).overlap_ratios)


def score_f2(h: Hypergraph, candidate, relax: RelaxationParams, tau: float) -> float:
    """Sum of overlap ratios over the support set, each times ``exp(tau * t_e)``."""
    w = time_weights(h, tau)
    sup = max_support(h, candidate, relax, edge_weights=w)
    return math.fsum(r * w[j] for j, r in zip(sup.edge_indexes, sup.overlap_ratios))


def score_final(h: Hypergraph, candidate, params: ScoreParams) -> float:
    """Time-weighted score when ``use_time``, scaled by feature similarity when
    ``use_features``. Singletons get feature factor 1."""
    params.resolve(h)
    if params.use_time:
        base = score_f2(h, candidate, params.relax, params.tau)
    else:
        base = score_f1(h, candidate, params.relax)
    if params.use_features:
        return _feature_factor(h, candidate, params.alpha) * base
    return base


class Scorer:
    """Cached scorer bound to one hypergraph and one parameter setting.

    Time weights are computed once; scores are memoized per candidate.
    """

    def __init__(self, h: Hypergraph, params: ScoreParams):
        self.h = h
        self.params = params.resolve(h)
        self.weights: Optional[list] = (
            time_weights(h, params.tau) if params.use_time else None
        )
        self._cache: dict = {}

    def support(self, candidate: tuple) -> SupportSet:
        return max_support(self.h, candidate, self.params.relax, edge_weights=self.weights)

    def feature_factor(self, candidate: tuple) -> float:
        if not self.params.use_features:
            return 1.0
        return _feature_factor(self.h, candidate, self.params.alpha)

    def base_score(self, candidate: tuple) -> float:
        sup = self.support(candidate)
        if self.weights is None:
            return math.fsum(sup.overlap_ratios)
        w = self.weights
        return math.fsum(r * w[j] for j, r in zip(sup.edge_indexes, sup.overlap_ratios))

    def __call__(self, candidate: tuple) -> float:
        s = self._cache.get(candidate)
        if s is None:
            s = self.base_score(candidate)
            if self.params.use_features and s > 0:
                s *= self.feature_factor(candidate)
            self._cache[candidate] = s
        return s
