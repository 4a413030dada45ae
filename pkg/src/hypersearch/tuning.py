"""Hyperparameter grid search against the validation edges."""

from __future__ import annotations

import logging
from fractions import Fraction

from sklearn.base import clone
from sklearn.model_selection import ParameterGrid

from .estimator import HyperSearch
from .exceptions import EmptyTestSet
from .ingest import DatasetSplit
from .support import as_ratio

logger = logging.getLogger(__name__)

RATIOS = ("1/3", "1/4", "1/5")
COEFFICIENTS = (0.0, 0.1, 1.0, 10.0)


def default_grid(timed: bool, featured: bool) -> list:
    """27 relaxation triples from ``RATIOS`` plus the all-zero triple, crossed
    with ``tau`` (timed data only) and ``alpha`` (featured data only)."""
    taus = list(COEFFICIENTS) if timed else [0.0]
    alphas = list(COEFFICIENTS) if featured else [0.0]
    common = {"tau": taus, "alpha": alphas}
    return [
        {"eps_v": list(RATIOS), "eps_e": list(RATIOS), "eps_t": list(RATIOS), **common},
        {"eps_v": ["0"], "eps_e": ["0"], "eps_t": ["0"], **common},
    ]


def _tie_key(params: dict) -> tuple:
    return (
        as_ratio(params.get("eps_v", "0")),
        as_ratio(params.get("eps_e", "0")),
        as_ratio(params.get("eps_t", "0")),
        float(params.get("tau", 0.0)),
        float(params.get("alpha", 0.0)),
    )


def grid_search(split: DatasetSplit, grid=None, estimator=None, multiplier: float = 1.0):
    """Pick the parameters with the best validation recall.

    Parameters
    ----------
    split : DatasetSplit
        Fitting uses ``split.train``; recall is measured on ``split.validation``.
    grid : dict or list of dicts, optional
        ``ParameterGrid`` specification over :class:`HyperSearch` parameters.
        Defaults to :func:`default_grid`; on untimed data any ``tau`` axis is
        collapsed to 0, and likewise ``alpha`` without features.
    estimator : HyperSearch, optional
        Template for the remaining parameters (prune mode, workers, ...).

    Returns
    -------
    best_params : dict
    results : list of dict
        One row per lattice point with its validation recall.

    Ties go to smaller ``eps_v``, ``eps_e``, ``eps_t``, then smaller ``tau``,
    then smaller ``alpha``.
    """
    train = split.train
    validation = split.validation
    if not validation:
        raise EmptyTestSet("validation set is empty")
    if grid is None:
        grid = default_grid(train.has_timestamps, train.has_features)
    estimator = estimator if estimator is not None else HyperSearch()

    seen, results = set(), []
    for params in ParameterGrid(grid):
        params = dict(params)
        if not train.has_timestamps:
            params["tau"] = 0.0
        if not train.has_features:
            params["alpha"] = 0.0
        key = _tie_key(params)
        if key in seen:
            continue
        seen.add(key)
        est = clone(estimator).set_params(**params).fit(train)
        recall = est.score(validation, multiplier=multiplier)
        row = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in params.items()}
        row["recall"] = recall
        results.append(row)
        logger.info("grid point %s -> recall %.4f", row, recall)

    best = min(results, key=lambda r: (-r["recall"], _tie_key(r)))
    best_params = {k: v for k, v in best.items() if k != "recall"}
    return best_params, results
