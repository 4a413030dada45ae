"""Input validation helpers shared by the estimator and the CLI."""

from __future__ import annotations

import numbers

from .exceptions import EmptyInput
from .hypergraph import Hypergraph, build_incidence, canonical_edge
from .support import as_ratio


def check_hypergraph(X, num_nodes=None) -> Hypergraph:
    """Return ``X`` as a :class:`Hypergraph`.

    Accepts a Hypergraph (returned as is) or an iterable of node iterables,
    in which case node ids must already be dense non-negative integers.
    """
    if isinstance(X, Hypergraph):
        return X
    edges = [canonical_edge(e) for e in X]
    if not edges:
        raise EmptyInput("no hyperedges given")
    if num_nodes is None:
        num_nodes = max(e[-1] for e in edges) + 1
    return build_incidence(edges, num_nodes)


def check_node_sets(X) -> list:
    """Canonical tuples for an iterable of node sets."""
    return [canonical_edge(e) for e in X]


def check_k(k) -> int:
    if isinstance(k, bool) or not isinstance(k, numbers.Integral) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    return int(k)


def check_ratio(value, name: str):
    try:
        return as_ratio(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"{name}: {exc}") from None


def check_non_negative(value, name: str) -> float:
    value = float(value)
    if value < 0 or value != value:
        raise ValueError(f"{name} must be a non-negative number, got {value!r}")
    return value
