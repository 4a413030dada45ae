"""Structural observations: overlap with observed edges, temporal decay of
overlap, feature similarity inside edges, each against a Chung-Lu null."""

from __future__ import annotations

import csv
import io
import math
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.special import kolmogorov

from .exceptions import DegenerateDegrees, MissingFeatures, MissingTimestamps
from .hypergraph import Hypergraph
from .scoring import feature_similarity

__all__ = [
    "DEFAULT_THRESHOLDS",
    "chung_lu_null",
    "ks_2samp",
    "overlap_proportions",
    "overlap_observation",
    "temporal_observation",
    "feature_observation",
    "rows_to_csv",
]

# (label, ratio, comparison)
DEFAULT_THRESHOLDS = (
    (">0", Fraction(0), "gt"),
    (">=2/3", Fraction(2, 3), "ge"),
    (">=3/4", Fraction(3, 4), "ge"),
    ("=1", Fraction(1), "eq"),
)

MAX_RETRIES = 1000


def chung_lu_null(test, train: Hypergraph, seed: int = 0) -> list:
    """Random edges with the sizes of ``test`` and degree-proportional nodes.

    Each edge is drawn i.i.d. with node probability proportional to its
    degree in ``train`` and redrawn until its nodes are distinct; after
    ``MAX_RETRIES`` failures it is drawn without replacement instead.
    """
    deg = np.asarray(train.degrees, dtype=float)
    if deg.sum() <= 0:
        raise DegenerateDegrees("every node has degree 0")
    p = deg / deg.sum()
    support = int((deg > 0).sum())
    rng = np.random.default_rng(seed)
    out = []
    for e in test:
        s = len(set(e))
        if s > support:
            raise DegenerateDegrees(f"cannot draw {s} distinct nodes from {support} with positive degree")
        for _ in range(MAX_RETRIES):
            draw = rng.choice(train.num_nodes, size=s, p=p)
            if len(set(draw.tolist())) == s:
                break
        else:
            draw = rng.choice(train.num_nodes, size=s, replace=False, p=p)
        out.append(tuple(sorted(int(v) for v in draw)))
    return out


def ks_2samp(a: Sequence[float], b: Sequence[float]) -> tuple:
    """Two-sample Kolmogorov-Smirnov distance and asymptotic p-value.

    The p-value is ``Q(sqrt(nm/(n+m)) * D)`` with the Kolmogorov survival
    function ``Q``.
    """
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("both samples must be non-empty")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / len(a)
    cdf_b = np.searchsorted(b, grid, side="right") / len(b)
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    n, m = len(a), len(b)
    lam = math.sqrt(n * m / (n + m)) * d
    return d, float(kolmogorov(lam))


def _meets(inter: int, size: int, ratio: Fraction, op: str) -> bool:
    lhs, rhs = inter * ratio.denominator, ratio.numerator * size
    if op == "gt":
        return lhs > rhs
    if op == "ge":
        return lhs >= rhs
    return lhs == rhs


def overlap_proportions(train: Hypergraph, edge, thresholds=DEFAULT_THRESHOLDS) -> list:
    """For one edge, the share of ``train`` edges meeting each threshold on
    ``|edge & e| / |e|``."""
    if train.num_edges == 0:
        return [0.0] * len(thresholds)
    inter: dict = {}
    for v in set(edge):
        if 0 <= v < train.num_nodes:
            for j in train.incidence[v]:
                inter[j] = inter.get(j, 0) + 1
    out = []
    for _, ratio, op in thresholds:
        if op == "gt" and ratio == 0:
            hits = len(inter)
        else:
            hits = sum(1 for j, c in inter.items() if _meets(c, len(train.edges[j]), ratio, op))
        out.append(hits / train.num_edges)
    return out


def overlap_observation(
    train: Hypergraph,
    test,
    thresholds=DEFAULT_THRESHOLDS,
    *,
    null=None,
    seed: int = 0,
    ks_threshold: str = ">=2/3",
) -> dict:
    """Mean overlap proportions for ground-truth edges and a Chung-Lu sample.

    Returns a dict with ``rows`` (one per threshold: ground truth mean, null
    mean) and ``ks`` (distance and p-value between the per-edge proportion
    distributions at ``ks_threshold``).
    """
    test = list(test)
    if null is None:
        null = chung_lu_null(test, train, seed)
    gt = np.array([overlap_proportions(train, e, thresholds) for e in test]) if test else np.zeros((0, len(thresholds)))
    nl = np.array([overlap_proportions(train, e, thresholds) for e in null]) if null else np.zeros((0, len(thresholds)))
    rows = []
    for col, (label, _, _) in enumerate(thresholds):
        rows.append(
            {
                "threshold": label,
                "ground_truth": float(gt[:, col].mean()) if len(gt) else 0.0,
                "null": float(nl[:, col].mean()) if len(nl) else 0.0,
            }
        )
    labels = [t[0] for t in thresholds]
    ks = None
    if ks_threshold in labels and len(gt) and len(nl):
        col = labels.index(ks_threshold)
        d, p = ks_2samp(gt[:, col], nl[:, col])
        ks = {"threshold": ks_threshold, "statistic": d, "p_value": p}
    return {"rows": rows, "ks": ks, "num_test": len(test)}


def temporal_observation(h: Hypergraph, num_groups: int = 5) -> list:
    """Mean overlap ratio between later and earlier edges, by group gap.

    Edges are ordered by raw timestamp (ties by input order) and cut into
    ``num_groups`` near-equal groups. For groups ``i < j`` the mean of
    ``|e' & e| / |e|`` over ``e'`` in group ``j`` and ``e`` in group ``i`` is
    taken, then averaged over all pairs with the same gap ``j - i``.
    """
    if h.raw_timestamps is None:
        raise MissingTimestamps("temporal observation needs edge timestamps")
    order = sorted(range(h.num_edges), key=lambda j: (h.raw_timestamps[j], j))
    groups = [list(g) for g in np.array_split(np.array(order, dtype=int), num_groups)]
    # node occurrence counts per group
    counts = []
    for g in groups:
        c = np.zeros(h.num_nodes)
        for j in g:
            c[list(h.edges[j])] += 1
        counts.append(c)
    by_gap: dict = {}
    for i in range(num_groups):
        for j in range(i + 1, num_groups):
            if not groups[i] or not groups[j]:
                continue
            total = sum(counts[j][list(h.edges[e])].sum() / len(h.edges[e]) for e in groups[i])
            mean = total / (len(groups[i]) * len(groups[j]))
            by_gap.setdefault(j - i, []).append(mean)
    return [{"gap": g, "overlap": float(np.mean(v)), "pairs": len(v)} for g, v in sorted(by_gap.items())]


def _mean_similarity(h: Hypergraph, edges) -> float:
    vals = [feature_similarity(h, e) for e in edges if len(set(e)) >= 2]
    return float(np.mean(vals)) if vals else 0.0


def feature_observation(h: Hypergraph, test, seed: int = 0, *, train: Optional[Hypergraph] = None) -> list:
    """Mean within-edge feature similarity for ``test`` and a Chung-Lu sample.

    ``train`` supplies the degrees for the null model (default ``h``).
    """
    if h.features is None:
        raise MissingFeatures("feature observation needs node features")
    test = list(test)
    null = chung_lu_null(test, train if train is not None else h, seed)
    return [
        {"sample": "ground_truth", "mean_jaccard": _mean_similarity(h, test)},
        {"sample": "null", "mean_jaccard": _mean_similarity(h, null)},
    ]


def rows_to_csv(rows: list) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
