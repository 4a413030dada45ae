"""Evaluation metrics for predicted hyperedges."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .exceptions import EmptyInput, EmptyTestSet

__all__ = ["EvalReport", "recall_at_k", "avg_f1", "f1_overlap", "evaluate"]


def _canon(edges) -> list:
    return [tuple(sorted(set(e))) for e in edges]


def _unique(edges) -> list:
    seen, out = set(), []
    for e in _canon(edges):
        if e not in seen:
            seen.add(e)
            out.append(e)
    return out


def recall_at_k(predictions, test, multiplier: float = 1.0) -> float:
    """Share of distinct test edges found among the first ``K`` predictions.

    ``K = round(multiplier * |distinct test edges|)``, rounding half up.
    Matching is exact node-set equality.
    """
    if multiplier <= 0:
        raise ValueError("multiplier must be positive")
    truth = _unique(test)
    if not truth:
        raise EmptyTestSet("test set is empty")
    k = math.floor(multiplier * len(truth) + 0.5)
    top = set(_canon(predictions[:k]))
    return sum(1 for t in truth if t in top) / len(truth)


def f1_overlap(a, b) -> float:
    a, b = set(a), set(b)
    return 2 * len(a & b) / (len(a) + len(b))


def avg_f1(predictions, test) -> float:
    """Symmetric best-match F1 between two collections of node sets.

    Mean over test edges of the best F1 against any prediction, averaged
    with the mean over predictions of the best F1 against any test edge.
    """
    preds = _canon(predictions)
    truth = _canon(test)
    if not preds or not truth:
        raise EmptyInput("avg_f1 needs non-empty predictions and test sets")

    def best_mean(xs, ys):
        return sum(max(f1_overlap(x, y) for y in ys) for x in xs) / len(xs)

    return 0.5 * (best_mean(truth, preds) + best_mean(preds, truth))


@dataclass
class EvalReport:
    recall_at: dict = field(default_factory=dict)
    avg_f1: float = 0.0
    num_predictions: int = 0
    num_test: int = 0

    def to_dict(self) -> dict:
        return {
            "recall_at": {f"{m:g}x": r for m, r in self.recall_at.items()},
            "avg_f1": self.avg_f1,
            "num_predictions": self.num_predictions,
            "num_test": self.num_test,
        }

    def to_rows(self) -> list:
        rows = [{"metric": f"recall@{m:g}x", "value": r} for m, r in self.recall_at.items()]
        rows.append({"metric": "avg_f1", "value": self.avg_f1})
        return rows


def evaluate(predictions_by_multiplier: dict, test) -> EvalReport:
    """Evaluate one prediction list per multiplier.

    ``predictions_by_multiplier`` maps a multiplier to the ranked
    predictions made for it (normally ``round(m * |test|)`` of them).
    Average F1 uses the 1x list when present, else the smallest multiplier.
    """
    report = EvalReport(num_test=len(_unique(test)))
    for m in sorted(predictions_by_multiplier):
        report.recall_at[m] = recall_at_k(predictions_by_multiplier[m], test, m)
    base = min(predictions_by_multiplier, key=lambda m: (m != 1, m))
    preds = predictions_by_multiplier[base]
    report.num_predictions = len(preds)
    report.avg_f1 = avg_f1(preds, test) if preds else 0.0
    return report
