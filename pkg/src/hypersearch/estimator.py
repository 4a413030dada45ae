"""scikit-learn style estimator wrapping the search."""

from __future__ import annotations

import math

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .metrics import recall_at_k
from .scoring import ScoreParams, Scorer
from .search import PRUNE_MODES, predict, size_targets
from .support import RelaxationParams
from .validation import check_hypergraph, check_k, check_node_sets, check_non_negative, check_ratio


class HyperSearch(BaseEstimator):
    """Predict new hyperedges by searching for the best-supported node sets.

    Parameters
    ----------
    eps_v, eps_e, eps_t : str, int, float or Fraction, default "0"
        Node, edge and total relaxation ratios (``"1/3"`` style strings are
        kept exact).
    tau : float, default 0.0
        Time coefficient; observed edge ``e`` is weighted ``exp(tau * t_e)``.
    alpha : float, default 0.0
        Exponent on the mean pairwise feature Jaccard of a candidate.
    use_time, use_features : {"auto", True, False}, default "auto"
        ``"auto"`` enables the term when the fitted hypergraph carries
        timestamps / features.
    prune_mode : {"paper", "strict", "off"}, default "paper"
    workers : int, default 1
        Search processes; ``None`` or ``0`` means one per CPU.
    enumeration : {"auto", "connected", "all"}, default "auto"

    Attributes
    ----------
    hypergraph_ : Hypergraph
        The observed hypergraph given to :meth:`fit`.
    score_params_ : ScoreParams
        Resolved scoring configuration.
    report_ : PredictionReport
        Report of the last :meth:`predict` call.

    Examples
    --------
    >>> est = HyperSearch(eps_v="1/3", eps_e="1/3", eps_t="1/3")
    >>> est.fit([[0, 1, 2], [0, 1, 3], [0, 1], [2, 3, 4]]).predict(2)
    [(0, 2, 3), (1, 2, 3)]
    """

    def __init__(
        self,
        eps_v="0",
        eps_e="0",
        eps_t="0",
        tau=0.0,
        alpha=0.0,
        use_time="auto",
        use_features="auto",
        prune_mode="paper",
        workers=1,
        enumeration="auto",
    ):
        self.eps_v = eps_v
        self.eps_e = eps_e
        self.eps_t = eps_t
        self.tau = tau
        self.alpha = alpha
        self.use_time = use_time
        self.use_features = use_features
        self.prune_mode = prune_mode
        self.workers = workers
        self.enumeration = enumeration

    def _score_params(self, h) -> ScoreParams:
        relax = RelaxationParams(
            check_ratio(self.eps_v, "eps_v"),
            check_ratio(self.eps_e, "eps_e"),
            check_ratio(self.eps_t, "eps_t"),
        )
        use_time = h.has_timestamps if self.use_time == "auto" else bool(self.use_time)
        use_features = h.has_features if self.use_features == "auto" else bool(self.use_features)
        return ScoreParams(
            relax,
            tau=check_non_negative(self.tau, "tau"),
            alpha=check_non_negative(self.alpha, "alpha"),
            use_time=use_time,
            use_features=use_features,
        ).resolve(h)

    def fit(self, X, y=None):
        """Store the observed hypergraph ``X`` (a Hypergraph or list of edges)."""
        if self.prune_mode not in PRUNE_MODES:
            raise ValueError(f"prune_mode must be one of {PRUNE_MODES}, got {self.prune_mode!r}")
        h = check_hypergraph(X)
        self.score_params_ = self._score_params(h)
        self.hypergraph_ = h
        self.n_edges_in_ = h.num_edges
        return self

    def size_targets(self, k) -> dict:
        check_is_fitted(self, "hypergraph_")
        return size_targets(self.hypergraph_, check_k(k))

    def predict_report(self, k):
        """Run the search for ``k`` predictions and return the full report."""
        check_is_fitted(self, "hypergraph_")
        self.report_ = predict(
            self.hypergraph_,
            check_k(k),
            self.score_params_,
            self.prune_mode,
            workers=self.workers,
            enumeration=self.enumeration,
        )
        return self.report_

    def predict(self, k):
        """The predicted node sets, ordered by size then descending score."""
        return self.predict_report(k).edges()

    def decision_function(self, X):
        """Score of each node set in ``X`` under the fitted configuration."""
        check_is_fitted(self, "hypergraph_")
        scorer = Scorer(self.hypergraph_, self.score_params_)
        return [scorer(e) for e in check_node_sets(X)]

    def score(self, X, y=None, multiplier=1.0):
        """Recall of held-out edges ``X`` when ``round(multiplier * |X|)`` are predicted."""
        truth = sorted(set(check_node_sets(X)))
        k = max(1, math.floor(multiplier * len(truth) + 0.5))
        return recall_at_k(self.predict(k), truth, multiplier)
