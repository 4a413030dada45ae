"""Upper bounds on the candidate score used for subtree pruning.

``bound_fn`` keeps only the node budget (edge and total budgets fully
relaxed) and scores every support edge as if it were fully covered. It
never increases when the candidate grows, but computing it is as hard as
the support problem itself, so the search uses ``bound_ft`` instead: the
node budget is swapped for a total budget with the same ratio, which a
greedy scan over edges sorted by miss count solves exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .hypergraph import Hypergraph
from .scoring import ScoreParams, _feature_factor, time_weights
from .support import (
    RelaxationParams,
    _check_candidate,
    as_ratio,
    greedy_prefix_length,
    hit_masks,
    max_support,
)

__all__ = [
    "BoundParams",
    "bound_fn",
    "bound_ft",
    "bound_ft_safe",
    "total_relaxed_support",
]


@dataclass(frozen=True)
class BoundParams:
    eps_v: Fraction = Fraction(0)
    tau: float = 0.0
    use_time: bool = False
    alpha: float = 0.0
    use_features: bool = False

    def __post_init__(self):
        object.__setattr__(self, "eps_v", as_ratio(self.eps_v))

    @classmethod
    def from_score_params(cls, p: ScoreParams) -> "BoundParams":
        return cls(p.relax.eps_v, p.tau, p.use_time, p.alpha, p.use_features)


def _weights(h: Hypergraph, p: BoundParams, weights: Optional[Sequence[float]]):
    if not p.use_time:
        return None
    return weights if weights is not None else time_weights(h, p.tau)


def bound_fn(
    h: Hypergraph, candidate, p: BoundParams, *, weights: Optional[Sequence[float]] = None
) -> float:
    """Time-weight sum (or count) over the support set under ``(eps_v, 1, 1)``.

    Exact and exponential in the worst case; meant for verification.
    """
    w = _weights(h, p, weights)
    sup = max_support(h, candidate, RelaxationParams(p.eps_v, 1, 1), edge_weights=w)
    if w is None:
        return float(sup.size)
    return math.fsum(w[j] for j in sup.edge_indexes)


def total_relaxed_support(h: Hypergraph, candidate, eps) -> tuple:
    """Edges of the greedy support set under the total budget ``eps`` alone.

    Edges are taken in ascending miss count (ties by edge index) and the
    longest feasible prefix is kept. Edges disjoint from the candidate miss
    every node, so they sort last and are only reached when the budget has
    slack left after all intersecting edges.

    Returns
    -------
    (edges, prefix_misses)
        Edge indexes in greedy order, and their miss counts.
    """
    cand = _check_candidate(h, candidate)
    eps = as_ratio(eps)
    n = len(cand)
    hits = hit_masks(h, cand)
    order = sorted((n - mask.bit_count(), j) for j, mask in hits.items())
    misses = [c for c, _ in order]
    m = greedy_prefix_length(misses, eps, n)
    edges = [j for _, j in order[:m]]
    if m == len(order) and len(hits) < h.num_edges:
        extra = _disjoint_allowance(sum(misses), m, n, eps, h.num_edges - len(hits))
        if extra:
            disjoint = (j for j in range(h.num_edges) if j not in hits)
            for j in disjoint:
                edges.append(j)
                if len(edges) == m + extra:
                    break
            misses = misses + [n] * extra
    return edges, misses[: len(edges)]


def _disjoint_allowance(total: int, m: int, n: int, eps: Fraction, available: int) -> int:
    # largest j <= available with total + j*n <= eps*n*(m + j)
    num, den = eps.numerator, eps.denominator
    if num >= den:
        return available
    slack = num * n * m - den * total
    if slack < 0:
        return 0
    return min(available, slack // (n * (den - num)))


def bound_ft(
    h: Hypergraph, candidate, p: BoundParams, *, weights: Optional[Sequence[float]] = None
) -> float:
    """Greedy total-budget bound, optionally scaled by feature similarity.

    The feature-scaled variant is what the search prunes with by default; it
    is not a guaranteed bound because feature similarity is not
    anti-monotonic.
    """
    edges, _ = total_relaxed_support(h, candidate, p.eps_v)
    w = _weights(h, p, weights)
    value = float(len(edges)) if w is None else math.fsum(w[j] for j in edges)
    if p.use_features and value > 0:
        value *= _feature_factor(h, candidate, p.alpha)
    return value


def bound_ft_safe(
    h: Hypergraph, candidate, p: BoundParams, *, weights: Optional[Sequence[float]] = None
) -> float:
    """Guaranteed upper bound on the (time-weighted, unscaled) score of the
    candidate and of every superset.

    Any support set satisfying the node budget also satisfies the total
    budget, so its size is at most the greedy prefix length ``M``, and each
    of its edges has a miss count no larger than ``eps*n - D`` where ``D`` is
    the sum of all negative slacks. The bound is the sum of the ``M``
    largest time weights among such edges. Untimed it equals ``M``.
    Feature similarity is ignored since it is at most 1.
    """
    cand = _check_candidate(h, candidate)
    n = len(cand)
    eps = p.eps_v
    edges, _ = total_relaxed_support(h, cand, eps)
    m = len(edges)
    w = _weights(h, p, weights)
    if w is None or m == 0:
        return float(m)
    num, den = eps.numerator, eps.denominator
    hits = hit_masks(h, cand)
    # slack of an edge with c misses, scaled by den: den*c - num*n
    neg = sum(min(den * (n - mask.bit_count()) - num * n, 0) for mask in hits.values())
    limit = -neg  # eligible iff den*c - num*n <= limit
    eligible = [w[j] for j, mask in hits.items() if den * (n - mask.bit_count()) - num * n <= limit]
    if den * n - num * n <= limit and len(hits) < h.num_edges:
        eligible.extend(w[j] for j in range(h.num_edges) if j not in hits)
    eligible.sort(reverse=True)
    return math.fsum(eligible[:m])
