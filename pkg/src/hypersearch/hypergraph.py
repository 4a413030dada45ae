"""In-memory hypergraph with a node -> edge incidence index."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Optional, Sequence

from .exceptions import EmptyEdge, MissingFeatures, MissingTimestamps, NodeOutOfRange

NodeSet = tuple  # canonical form: strictly ascending tuple of ints


class Hyperedge(NamedTuple):
    nodes: tuple
    timestamp: Optional[float] = None
    raw_timestamp: Optional[int] = None


def canonical_edge(nodes: Iterable[int]) -> tuple:
    """Return the sorted, duplicate-free tuple form of ``nodes``.

    Raises
    ------
    EmptyEdge
        If ``nodes`` is empty.
    """
    out = tuple(sorted(set(int(v) for v in nodes)))
    if not out:
        raise EmptyEdge("hyperedge must contain at least one node")
    return out


def overlap_ratio(candidate, observed) -> float:
    """Fraction of ``observed`` covered by ``candidate``: |c & e| / |e|."""
    observed = set(observed)
    return len(observed.intersection(candidate)) / len(observed)


def missing_count(candidate, observed) -> int:
    """Number of candidate nodes absent from ``observed``."""
    observed = set(observed)
    return sum(1 for v in set(candidate) if v not in observed)


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """Immutable hypergraph over dense node ids ``0..num_nodes-1``.

    Edges are kept in input order as canonical tuples; repeated edges are
    kept as distinct entries. ``timestamps`` are normalized to [0, 1] and
    ``raw_timestamps`` keep the original integer units.
    """

    num_nodes: int
    edges: tuple
    incidence: tuple
    timestamps: Optional[tuple] = None
    raw_timestamps: Optional[tuple] = None
    features: Optional[tuple] = None
    node_labels: Optional[tuple] = field(default=None, repr=False)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def max_size(self) -> int:
        return max((len(e) for e in self.edges), default=0)

    @property
    def has_timestamps(self) -> bool:
        return self.timestamps is not None

    @property
    def has_features(self) -> bool:
        return self.features is not None

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @cached_property
    def degrees(self) -> tuple:
        return tuple(len(inc) for inc in self.incidence)

    @cached_property
    def neighbors(self) -> tuple:
        """Per node, the other nodes sharing at least one edge with it."""
        out = [set() for _ in range(self.num_nodes)]
        for e in self.edges:
            for v in e:
                out[v].update(e)
        for v, nb in enumerate(out):
            nb.discard(v)
        return tuple(frozenset(nb) for nb in out)

    @cached_property
    def size_counts(self) -> dict:
        counts: dict = {}
        for e in self.edges:
            counts[len(e)] = counts.get(len(e), 0) + 1
        return dict(sorted(counts.items()))

    def edge(self, j: int) -> Hyperedge:
        ts = self.timestamps[j] if self.timestamps is not None else None
        raw = self.raw_timestamps[j] if self.raw_timestamps is not None else None
        return Hyperedge(self.edges[j], ts, raw)

    def __len__(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return (
            f"Hypergraph(num_nodes={self.num_nodes}, num_edges={self.num_edges}, "
            f"max_size={self.max_size}, timestamps={self.has_timestamps}, "
            f"features={self.has_features})"
        )

    def require_timestamps(self) -> None:
        if self.timestamps is None:
            raise MissingTimestamps("hypergraph has no edge timestamps")

    def require_features(self) -> None:
        if self.features is None:
            raise MissingFeatures("hypergraph has no node features")

    def subgraph(self, edge_indexes: Sequence[int]) -> "Hypergraph":
        """Hypergraph over the same node universe keeping only ``edge_indexes``.

        Timestamps are carried over unchanged (no re-normalization).
        """
        idx = list(edge_indexes)
        return build_incidence(
            [self.edges[j] for j in idx],
            self.num_nodes,
            timestamps=None if self.timestamps is None else [self.timestamps[j] for j in idx],
            raw_timestamps=None
            if self.raw_timestamps is None
            else [self.raw_timestamps[j] for j in idx],
            features=self.features,
            node_labels=self.node_labels,
        )

    def with_timestamps(self, timestamps: Optional[Sequence[float]]) -> "Hypergraph":
        return Hypergraph(
            self.num_nodes,
            self.edges,
            self.incidence,
            None if timestamps is None else tuple(float(t) for t in timestamps),
            self.raw_timestamps,
            self.features,
            self.node_labels,
        )

    def label(self, v: int):
        """Original (pre-remapping) label of node ``v``."""
        return v if self.node_labels is None else self.node_labels[v]


def build_incidence(
    edges: Iterable[Iterable[int]],
    num_nodes: int,
    *,
    timestamps: Optional[Sequence[float]] = None,
    raw_timestamps: Optional[Sequence[int]] = None,
    features: Optional[Sequence[Iterable[int]]] = None,
    node_labels: Optional[Sequence] = None,
) -> Hypergraph:
    """Build a :class:`Hypergraph` and its incidence index.

    Parameters
    ----------
    edges : iterable of iterables of int
        Node sets; each is canonicalized (sorted, deduplicated).
    num_nodes : int
        Size of the node universe. Every id must be below it.
    timestamps : sequence of float, optional
        Normalized timestamps in [0, 1], one per edge.
    raw_timestamps : sequence of int, optional
        Original timestamps, one per edge.
    features : sequence of iterables of int, optional
        One token-id set per node.

    Raises
    ------
    EmptyEdge
        If an edge is empty.
    NodeOutOfRange
        If a node id is negative or ``>= num_nodes``.
    """
    canon = []
    incidence: list = [[] for _ in range(num_nodes)]
    for j, e in enumerate(edges):
        try:
            c = canonical_edge(e)
        except EmptyEdge:
            raise EmptyEdge(f"edge {j} is empty") from None
        if c[0] < 0 or c[-1] >= num_nodes:
            bad = c[0] if c[0] < 0 else c[-1]
            raise NodeOutOfRange(f"edge {j} has node {bad} outside 0..{num_nodes - 1}")
        canon.append(c)
        for v in c:
            incidence[v].append(j)

    n_edges = len(canon)
    if timestamps is not None:
        timestamps = tuple(float(t) for t in timestamps)
        if len(timestamps) != n_edges:
            raise ValueError("timestamps length does not match number of edges")
        if any(not 0.0 <= t <= 1.0 for t in timestamps):
            raise ValueError("normalized timestamps must lie in [0, 1]")
    if raw_timestamps is not None:
        raw_timestamps = tuple(int(t) for t in raw_timestamps)
        if len(raw_timestamps) != n_edges:
            raise ValueError("raw_timestamps length does not match number of edges")
    if features is not None:
        features = tuple(frozenset(int(x) for x in f) for f in features)
        if len(features) != num_nodes:
            raise ValueError("features must have one entry per node")
    if node_labels is not None:
        node_labels = tuple(node_labels)
        if len(node_labels) != num_nodes:
            raise ValueError("node_labels must have one entry per node")

    return Hypergraph(
        num_nodes=num_nodes,
        edges=tuple(canon),
        incidence=tuple(tuple(inc) for inc in incidence),
        timestamps=timestamps,
        raw_timestamps=raw_timestamps,
        features=features,
        node_labels=node_labels,
    )


def relabel(h: Hypergraph) -> Hypergraph:
    """Drop nodes that occur in no edge and re-densify ids, keeping order."""
    used = sorted({v for e in h.edges for v in e})
    remap = {v: i for i, v in enumerate(used)}
    labels = [h.label(v) for v in used]
    features = None if h.features is None else [h.features[v] for v in used]
    return build_incidence(
        [[remap[v] for v in e] for e in h.edges],
        len(used),
        timestamps=h.timestamps,
        raw_timestamps=h.raw_timestamps,
        features=features,
        node_labels=labels,
    )
