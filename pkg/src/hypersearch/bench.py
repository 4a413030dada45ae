"""Runtime scaling on replicated hypergraphs."""

from __future__ import annotations

import time

import numpy as np

from .hypergraph import Hypergraph, build_incidence
from .scoring import ScoreParams
from .search import predict


def replicate(h: Hypergraph, copies: int) -> Hypergraph:
    """Disjoint union of ``copies`` relabeled copies of ``h``."""
    if copies < 1:
        raise ValueError("copies must be at least 1")
    n = h.num_nodes
    edges = [[v + c * n for v in e] for c in range(copies) for e in h.edges]

    def tile(xs):
        return None if xs is None else list(xs) * copies

    return build_incidence(
        edges,
        n * copies,
        timestamps=tile(h.timestamps),
        raw_timestamps=tile(h.raw_timestamps),
        features=tile(h.features),
    )


def scaling_run(
    h: Hypergraph,
    factors=(1, 2, 3, 4, 5),
    *,
    k_fraction: float = 0.2,
    params: ScoreParams = None,
    prune_mode: str = "paper",
    repeats: int = 1,
) -> dict:
    """Time :func:`predict` on ``replicate(h, f)`` for each factor ``f``.

    ``k`` is ``k_fraction`` of the replicated edge count. Returns per-factor
    rows and the least-squares slope of log(seconds) against log(|E|).
    """
    rows = []
    for f in factors:
        g = replicate(h, f)
        k = max(1, round(k_fraction * g.num_edges))
        best = None
        for _ in range(repeats):
            start = time.perf_counter()
            report = predict(g, k, params, prune_mode)
            elapsed = time.perf_counter() - start
            best = elapsed if best is None else min(best, elapsed)
        rows.append(
            {
                "copies": f,
                "num_edges": g.num_edges,
                "k": k,
                "seconds": best,
                "visited": report.stats.visited,
                "pruned": report.stats.pruned,
            }
        )
    x = np.log([r["num_edges"] for r in rows])
    y = np.log([r["seconds"] for r in rows])
    slope = float(np.polyfit(x, y, 1)[0]) if len(rows) > 1 else float("nan")
    return {"rows": rows, "slope": slope}
