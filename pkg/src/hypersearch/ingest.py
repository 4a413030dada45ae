"""Dataset readers, preprocessing and train/validation/test splits.

Supported inputs:

* three-file bundles ``<prefix>-nverts.txt``, ``<prefix>-simplices.txt`` and
  (optionally) ``<prefix>-times.txt``: per-edge vertex counts, the
  flattened vertex stream, per-edge integer timestamps;
* edge lists with one edge per line, whitespace-separated node labels and
  an optional trailing ``t=<int>`` token;
* a node-feature sidecar with one line per node label (line ``i`` holds the
  token ids of node ``i``).
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .exceptions import EmptyResult, InconsistentCounts, MissingTimestamps, ParseError
from .hypergraph import Hypergraph, build_incidence, relabel

logger = logging.getLogger(__name__)

FORMATS = ("benson-3file", "edge-list")
SPLIT_MODES = ("chronological", "random")

__all__ = [
    "FORMATS",
    "SPLIT_MODES",
    "PathBundle",
    "DatasetSplit",
    "parse_dataset",
    "parse_edge_list",
    "read_features",
    "preprocess",
    "normalize_timestamps",
    "split",
    "split_from_manifest",
]


@dataclass(frozen=True)
class PathBundle:
    """File locations of one dataset.

    For the three-file format give ``prefix`` (``.../email-Enron``) or the
    three paths; for edge lists give ``edges``.
    """

    edges: Optional[str] = None
    nverts: Optional[str] = None
    simplices: Optional[str] = None
    times: Optional[str] = None
    features: Optional[str] = None

    @classmethod
    def from_prefix(cls, prefix, features: Optional[str] = None) -> "PathBundle":
        prefix = str(prefix)
        if os.path.isdir(prefix):
            prefix = os.path.join(prefix, os.path.basename(os.path.normpath(prefix)))
        times = f"{prefix}-times.txt"
        return cls(
            nverts=f"{prefix}-nverts.txt",
            simplices=f"{prefix}-simplices.txt",
            times=times if os.path.exists(times) else None,
            features=features,
        )

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


def _read_ints(path) -> list:
    out = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(int(line))
            except ValueError:
                raise ParseError(f"expected an integer, got {line!r}", path, lineno) from None
    return out


def _densify(raw_edges: list, timestamps, features_by_label) -> Hypergraph:
    labels = sorted({v for e in raw_edges for v in e})
    remap = {v: i for i, v in enumerate(labels)}
    features = None
    if features_by_label is not None:
        features = []
        for v in labels:
            if v not in features_by_label:
                raise ParseError(f"no feature line for node {v}")
            features.append(features_by_label[v])
    return build_incidence(
        [[remap[v] for v in e] for e in raw_edges],
        len(labels),
        raw_timestamps=timestamps,
        features=features,
        node_labels=labels,
    )


def parse_edge_list(text: str, path: str = "<string>") -> tuple:
    """Parse edge-list text into ``(edges, raw_timestamps or None)``."""
    edges, times = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        t = None
        if tokens[-1].startswith("t="):
            try:
                t = int(tokens.pop()[2:])
            except ValueError:
                raise ParseError("bad timestamp token", path, lineno) from None
        try:
            nodes = [int(tok) for tok in tokens]
        except ValueError:
            raise ParseError(f"non-integer node label in {line!r}", path, lineno) from None
        if not nodes:
            raise ParseError("edge has no nodes", path, lineno)
        if len(set(nodes)) != len(nodes):
            logger.debug("%s:%d: repeated node collapsed", path, lineno)
        edges.append(nodes)
        times.append(t)
    stamped = sum(t is not None for t in times)
    if stamped and stamped != len(times):
        raise ParseError("either every edge or no edge must carry t=<int>", path)
    return edges, (times if stamped else None)


def read_features(path) -> dict:
    """Feature sidecar: line ``i`` lists the token ids of node label ``i``."""
    feats = {}
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            try:
                feats[lineno - 1] = frozenset(int(tok) for tok in line.split())
            except ValueError:
                raise ParseError("non-integer feature token", path, lineno) from None
    return feats


def parse_dataset(bundle, format: str = "benson-3file") -> Hypergraph:
    """Read a dataset into a :class:`Hypergraph` with dense node ids.

    Node labels are remapped to ``0..|V|-1`` in ascending label order; the
    original labels are kept in ``node_labels``. Repeated nodes inside one
    edge are collapsed.

    Raises
    ------
    ParseError
        Malformed line (with file and line number).
    InconsistentCounts
        The vertex counts do not add up to the length of the simplex stream,
        or the number of timestamps differs from the number of edges.
    """
    if isinstance(bundle, (str, os.PathLike)):
        bundle = (
            PathBundle.from_prefix(bundle) if format == "benson-3file" else PathBundle(edges=str(bundle))
        )
    features = read_features(bundle.features) if bundle.features else None

    if format == "edge-list":
        if bundle.edges is None:
            raise ValueError("edge-list format needs PathBundle.edges")
        text = Path(bundle.edges).read_text()
        edges, times = parse_edge_list(text, str(bundle.edges))
    elif format == "benson-3file":
        nverts = _read_ints(bundle.nverts)
        stream = _read_ints(bundle.simplices)
        if sum(nverts) != len(stream):
            raise InconsistentCounts(
                f"nverts sum to {sum(nverts)} but the simplices file has {len(stream)} entries"
            )
        edges, pos = [], 0
        for j, c in enumerate(nverts):
            if c <= 0:
                raise ParseError(f"edge {j} has non-positive vertex count {c}", bundle.nverts, j + 1)
            edges.append(stream[pos : pos + c])
            pos += c
        times = None
        if bundle.times:
            times = _read_ints(bundle.times)
            if len(times) != len(edges):
                raise InconsistentCounts(
                    f"{len(times)} timestamps for {len(edges)} edges"
                )
    else:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    if not edges:
        raise EmptyResult("dataset contains no edges")
    return _densify(edges, times, features)


def preprocess(
    h: Hypergraph, max_edge_size: int = 10, rare_size_threshold: float = 0.01
) -> Hypergraph:
    """Drop edges larger than ``max_edge_size``, then every size whose share
    of the remaining edges is below ``rare_size_threshold``; re-densify ids."""
    keep = [j for j, e in enumerate(h.edges) if len(e) <= max_edge_size]
    counts: dict = {}
    for j in keep:
        counts[len(h.edges[j])] = counts.get(len(h.edges[j]), 0) + 1
    total = len(keep)
    rare = {s for s, c in counts.items() if c < rare_size_threshold * total}
    keep = [j for j in keep if len(h.edges[j]) not in rare]
    if not keep:
        raise EmptyResult("no edges survive preprocessing")
    dropped = h.num_edges - len(keep)
    if dropped:
        logger.info("preprocess: dropped %d of %d edges (sizes removed: %s)", dropped, h.num_edges, sorted(rare))
    return relabel(h.subgraph(keep))


def normalize_timestamps(h: Hypergraph, baseline: Optional[tuple] = None) -> Hypergraph:
    """Min-max scale raw timestamps into [0, 1].

    ``baseline`` is ``(min_raw, max_raw)``; by default the range of ``h``
    itself. A degenerate range maps every edge to 1. Values outside the
    baseline are clipped.
    """
    if h.raw_timestamps is None:
        raise MissingTimestamps("hypergraph has no raw timestamps")
    raws = h.raw_timestamps
    if not raws:
        return h.with_timestamps(())
    lo, hi = baseline if baseline is not None else (min(raws), max(raws))
    if hi == lo:
        return h.with_timestamps([1.0] * len(raws))
    span = hi - lo
    return h.with_timestamps([min(max((t - lo) / span, 0.0), 1.0) for t in raws])


def _round_half_up(x_num: int, x_den: int) -> int:
    return (2 * x_num + x_den) // (2 * x_den)


@dataclass
class DatasetSplit:
    """Train / validation / test partition of one hypergraph.

    ``train`` holds the observed edges minus validation; ``observed`` holds
    all observed edges (train plus validation) and is what the final model
    is fitted on. Edge lists are canonical node tuples in the node id space
    of ``source``.
    """

    source: Hypergraph
    mode: str
    seed: Optional[int]
    train_idx: list
    validation_idx: list
    test_idx: list
    discarded: list = field(default_factory=list)

    @property
    def train(self) -> Hypergraph:
        return self._graph("_train", self.train_idx)

    @property
    def observed(self) -> Hypergraph:
        observed = sorted(self.train_idx + self.validation_idx + self._discarded_from("validation"))
        return self._graph("_observed", observed)

    @property
    def validation(self) -> list:
        return [self.source.edges[j] for j in self.validation_idx]

    @property
    def test(self) -> list:
        return [self.source.edges[j] for j in self.test_idx]

    def _discarded_from(self, part: str) -> list:
        return [d["index"] for d in self.discarded if d["from"] == part]

    def _graph(self, attr: str, idx: list) -> Hypergraph:
        cached = self.__dict__.get(attr)
        if cached is None:
            cached = self.source.subgraph(idx)
            if cached.raw_timestamps is not None:
                cached = normalize_timestamps(cached)
            self.__dict__[attr] = cached
        return cached

    def manifest(self) -> dict:
        return {
            "mode": self.mode,
            "seed": self.seed,
            "num_edges": self.source.num_edges,
            "num_nodes": self.source.num_nodes,
            "train": self.train_idx,
            "validation": self.validation_idx,
            "test": self.test_idx,
            "discarded": self.discarded,
        }

    def summary(self) -> dict:
        reasons: dict = {}
        for d in self.discarded:
            key = f"{d['from']}:{d['reason']}"
            reasons[key] = reasons.get(key, 0) + 1
        return {
            "train": len(self.train_idx),
            "validation": len(self.validation_idx),
            "test": len(self.test_idx),
            "discarded": reasons,
        }

    def to_json(self) -> str:
        return json.dumps(self.manifest(), indent=1) + "\n"


def _filter(source: Hypergraph, idx: Sequence[int], ref_idx: Sequence[int], part: str, discarded: list) -> list:
    ref_edges = {source.edges[j] for j in ref_idx}
    ref_nodes = {v for j in ref_idx for v in source.edges[j]}
    kept = []
    for j in idx:
        e = source.edges[j]
        if e in ref_edges:
            discarded.append({"index": j, "from": part, "reason": "duplicate"})
        elif any(v not in ref_nodes for v in e):
            discarded.append({"index": j, "from": part, "reason": "unseen_node"})
        else:
            kept.append(j)
    return kept


def split(
    h: Hypergraph,
    mode: str = "random",
    seed: Optional[int] = 0,
    *,
    test_fraction: float = 0.2,
    validation_fraction: float = 0.2,
) -> DatasetSplit:
    """Split edges into train, validation and test.

    ``chronological`` orders edges by raw timestamp (ties by input order)
    and holds out the latest ``test_fraction``; validation is the latest
    ``validation_fraction`` of the remaining observed edges. ``random``
    permutes edges with ``seed`` for both cuts.

    Test edges equal to an observed edge, or containing a node absent from
    the training edges, are discarded. Validation edges are screened the
    same way against the training edges. Every discard is recorded.
    """
    if mode not in SPLIT_MODES:
        raise ValueError(f"mode must be one of {SPLIT_MODES}, got {mode!r}")
    n = h.num_edges
    if mode == "chronological":
        if h.raw_timestamps is None:
            raise MissingTimestamps("chronological split needs edge timestamps")
        order = sorted(range(n), key=lambda j: (h.raw_timestamps[j], j))
        rng = None
    else:
        rng = np.random.default_rng(seed)
        order = [int(j) for j in rng.permutation(n)]

    # exact round-half-up on the fractions as rationals of 1000
    q_test = round(test_fraction * 1000)
    n_obs = _round_half_up(n * (1000 - q_test), 1000)
    observed, test = order[:n_obs], order[n_obs:]
    q_val = round(validation_fraction * 1000)
    n_val = _round_half_up(n_obs * q_val, 1000)
    if mode == "chronological":
        train, validation = observed[: n_obs - n_val], observed[n_obs - n_val :]
    else:
        picked = set(int(j) for j in rng.choice(n_obs, size=n_val, replace=False)) if n_val else set()
        train = [j for p, j in enumerate(observed) if p not in picked]
        validation = [j for p, j in enumerate(observed) if p in picked]

    discarded: list = []
    test = _filter(h, test, observed, "test", discarded)
    # node check for test is against train only (stricter than observed)
    train_nodes = {v for j in train for v in h.edges[j]}
    still = []
    for j in test:
        if any(v not in train_nodes for v in h.edges[j]):
            discarded.append({"index": j, "from": "test", "reason": "unseen_node"})
        else:
            still.append(j)
    test = still
    validation = _filter(h, validation, train, "validation", discarded)
    if discarded:
        logger.info("split: discarded %d held-out edges", len(discarded))
    return DatasetSplit(
        source=h,
        mode=mode,
        seed=seed if mode == "random" else None,
        train_idx=sorted(train),
        validation_idx=sorted(validation),
        test_idx=sorted(test),
        discarded=sorted(discarded, key=lambda d: d["index"]),
    )


def split_from_manifest(h: Hypergraph, manifest: dict) -> DatasetSplit:
    """Rebuild a :class:`DatasetSplit` from :meth:`DatasetSplit.manifest`."""
    if manifest.get("num_edges") not in (None, h.num_edges):
        raise InconsistentCounts(
            f"manifest is for {manifest['num_edges']} edges, dataset has {h.num_edges}"
        )
    return DatasetSplit(
        source=h,
        mode=manifest["mode"],
        seed=manifest.get("seed"),
        train_idx=list(manifest["train"]),
        validation_idx=list(manifest["validation"]),
        test_idx=list(manifest["test"]),
        discarded=list(manifest.get("discarded", [])),
    )
