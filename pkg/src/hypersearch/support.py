"""Maximum relaxed support sets.

For a candidate node set ``c`` and relaxation ratios ``(eps_v, eps_e, eps_t)``
the support set is the largest collection ``S`` of observed edges with

* node budget:  every node of ``c`` is missing from at most ``eps_v * |S|``
  edges of ``S``;
* edge budget:  every edge of ``S`` misses at most ``eps_e * |c|`` nodes of ``c``;
* total budget: the misses summed over ``S`` are at most ``eps_t * |c| * |S|``.

The problem is solved exactly. Edges are grouped by their miss pattern
relative to ``c`` (a bitmask over the positions of ``c``), since edges
sharing a pattern are interchangeable for feasibility. The target size
``m`` is scanned downward from a greedy upper bound and each ``m`` is
decided by a memoized branch-and-bound over pattern counts.

All budget comparisons are exact integer arithmetic on rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exceptions import EmptyEdge, NodeOutOfRange
from .hypergraph import Hypergraph

__all__ = [
    "RelaxationParams",
    "SupportSet",
    "as_ratio",
    "candidate_pool",
    "hit_masks",
    "max_support",
    "greedy_prefix_length",
]


def as_ratio(value) -> Fraction:
    """Convert ``value`` (``"p/q"``, int, float, Fraction) to a Fraction in [0, 1]."""
    if isinstance(value, Fraction):
        r = value
    elif isinstance(value, float):
        r = Fraction(value).limit_denominator(10_000)
    else:
        r = Fraction(str(value).strip())
    if not 0 <= r <= 1:
        raise ValueError(f"relaxation ratio {value!r} outside [0, 1]")
    return r


def floor_budget(ratio: Fraction, scale: int) -> int:
    """Exact ``floor(ratio * scale)`` for non-negative ``scale``."""
    return (ratio.numerator * scale) // ratio.denominator


@dataclass(frozen=True)
class RelaxationParams:
    eps_v: Fraction = Fraction(0)
    eps_e: Fraction = Fraction(0)
    eps_t: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("eps_v", "eps_e", "eps_t"):
            object.__setattr__(self, name, as_ratio(getattr(self, name)))

    @classmethod
    def uniform(cls, eps) -> "RelaxationParams":
        return cls(eps, eps, eps)

    def as_tuple(self) -> tuple:
        return (self.eps_v, self.eps_e, self.eps_t)

    def __str__(self) -> str:
        return "({}, {}, {})".format(*self.as_tuple())


@dataclass(frozen=True)
class SupportSet:
    edge_indexes: tuple
    overlap_ratios: tuple

    @property
    def size(self) -> int:
        return len(self.edge_indexes)

    def __len__(self) -> int:
        return len(self.edge_indexes)


EMPTY_SUPPORT = SupportSet((), ())


def _check_candidate(h: Hypergraph, candidate) -> tuple:
    cand = tuple(sorted(set(candidate)))
    if not cand:
        raise EmptyEdge("candidate must be non-empty")
    if cand[0] < 0 or cand[-1] >= h.num_nodes:
        raise NodeOutOfRange(f"candidate {cand} has nodes outside 0..{h.num_nodes - 1}")
    return cand


def hit_masks(h: Hypergraph, candidate: Sequence[int]) -> dict:
    """Map each edge meeting ``candidate`` to the bitmask of covered positions.

    Bit ``p`` is set when ``candidate[p]`` belongs to the edge. Edges absent
    from the result do not intersect the candidate.
    """
    hits: dict = {}
    incidence = h.incidence
    for p, v in enumerate(candidate):
        bit = 1 << p
        for j in incidence[v]:
            hits[j] = hits.get(j, 0) | bit
    return hits


def candidate_pool(h: Hypergraph, candidate, relax: RelaxationParams) -> list:
    """Edges meeting ``candidate`` whose miss count fits the edge budget."""
    cand = _check_candidate(h, candidate)
    n = len(cand)
    limit = floor_budget(relax.eps_e, n)
    return sorted(j for j, mask in hit_masks(h, cand).items() if n - mask.bit_count() <= limit)


def greedy_prefix_length(sorted_misses: Sequence[int], ratio: Fraction, n: int) -> int:
    """Largest ``m`` with ``sum(sorted_misses[:m]) <= ratio * n * m``.

    ``sorted_misses`` must be ascending. The slack ``ratio * n - miss`` is
    non-increasing along the sequence, so the feasible lengths form an
    interval starting at 0 and one scan finds its end.
    """
    num, den = ratio.numerator * n, ratio.denominator
    best = 0
    total = 0
    for m, c in enumerate(sorted_misses, start=1):
        total += c
        if total * den <= num * m:
            best = m
        elif c * den > num:
            # every later step adds a positive excess; never feasible again
            break
    return best


class _PatternSearch:
    """Branch-and-bound for a fixed target size over miss-pattern groups."""

    def __init__(self, patterns, counts, n):
        self.patterns = patterns  # ascending by popcount
        self.pops = [p.bit_count() for p in patterns]
        self.bits = [[q for q in range(n) if p >> q & 1] for p in patterns]
        self.counts = counts
        self.n = n
        suffix = [0] * (len(patterns) + 1)
        for g in range(len(patterns) - 1, -1, -1):
            suffix[g] = suffix[g + 1] + counts[g]
        self.suffix = suffix

    def _min_total(self, g: int, r: int) -> int:
        # smallest possible miss total for r more edges drawn from groups g..
        total = 0
        for i in range(g, len(self.patterns)):
            take = min(r, self.counts[i])
            total += take * self.pops[i]
            r -= take
            if r == 0:
                break
        return total

    def solve(self, r: int, node_budget: int, total_budget: int) -> Optional[list]:
        if r > self.suffix[0]:
            return None
        if r > self.n * node_budget:
            return None
        self.failed: set = set()
        chosen = [0] * len(self.patterns)
        resid = [node_budget] * self.n
        if self._dfs(0, r, resid, total_budget, chosen):
            return chosen
        return None

    def _dfs(self, g, r, resid, tres, chosen) -> bool:
        if r == 0:
            return True
        if g == len(self.patterns) or self.suffix[g] < r:
            return False
        if r > sum(resid) or self._min_total(g, r) > tres:
            return False
        key = (g, r, tres, tuple(resid))
        if key in self.failed:
            return False
        pop = self.pops[g]
        bits = self.bits[g]
        hi = min(self.counts[g], r, tres // pop)
        for q in bits:
            if resid[q] < hi:
                hi = resid[q]
        for x in range(hi, -1, -1):
            if x:
                for q in bits:
                    resid[q] -= x
            chosen[g] = x
            ok = self._dfs(g + 1, r - x, resid, tres - x * pop, chosen)
            if x:
                for q in bits:
                    resid[q] += x
            if ok:
                return True
        chosen[g] = 0
        self.failed.add(key)
        return False


def max_support(
    h: Hypergraph,
    candidate,
    relax: RelaxationParams,
    *,
    edge_weights: Optional[Sequence[float]] = None,
) -> SupportSet:
    """Maximum-cardinality support set of ``candidate`` under ``relax``.

    Parameters
    ----------
    h : Hypergraph
        Observed hypergraph.
    candidate : iterable of int
        Non-empty node set.
    relax : RelaxationParams
        Relaxation ratios.
    edge_weights : sequence of float, optional
        Per-edge multiplicative weights (e.g. time weights). Only used to
        decide which edges to take among edges with an identical miss
        pattern: higher ``|c & e| / |e| * weight`` first, then lower index.

    Returns
    -------
    SupportSet
        One maximizer, chosen deterministically. Among patterns, the search
        prefers taking as many low-miss edges as possible.
    """
    cand = _check_candidate(h, candidate)
    n = len(cand)
    full = (1 << n) - 1
    edge_limit = floor_budget(relax.eps_e, n)

    groups: dict = {}
    hits = hit_masks(h, cand)
    for j, mask in hits.items():
        if n - mask.bit_count() <= edge_limit:
            groups.setdefault(full ^ mask, []).append(j)
    if edge_limit >= n:
        # edges disjoint from the candidate are admissible only when eps_e = 1
        disjoint = [j for j in range(h.num_edges) if j not in hits]
        if disjoint:
            groups.setdefault(full, []).extend(disjoint)
    if not groups:
        return EMPTY_SUPPORT

    def preference(j: int) -> tuple:
        w = 1.0 if edge_weights is None else edge_weights[j]
        return (-w / len(h.edges[j]), j)

    for js in groups.values():
        js.sort(key=preference)

    zero = groups.pop(0, [])
    z = len(zero)
    patterns = sorted(groups, key=lambda p: (p.bit_count(), p))
    counts = [len(groups[p]) for p in patterns]

    misses = sorted(p.bit_count() for p in patterns for _ in range(len(groups[p])))
    misses = [0] * z + misses
    m_hi = min(
        greedy_prefix_length(misses, relax.eps_t, n),
        greedy_prefix_length(misses, relax.eps_v, n),
    )

    chosen = None
    if m_hi > z:
        search = _PatternSearch(patterns, counts, n)
        for m in range(m_hi, z, -1):
            chosen = search.solve(
                m - z,
                floor_budget(relax.eps_v, m),
                floor_budget(relax.eps_t, n * m),
            )
            if chosen is not None:
                break

    picked = list(zero)
    if chosen is not None:
        for p, x in zip(patterns, chosen):
            picked.extend(groups[p][:x])
    picked.sort()
    cand_set = set(cand)
    ratios = tuple(
        sum(1 for v in h.edges[j] if v in cand_set) / len(h.edges[j]) for j in picked
    )
    return SupportSet(tuple(picked), ratios)
