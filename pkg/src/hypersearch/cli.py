"""Command line interface.

Exit status: 0 on success, 2 on precondition or configuration errors,
1 on anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import (
    feature_observation,
    overlap_observation,
    rows_to_csv,
    temporal_observation,
)
from .bench import scaling_run
from .estimator import HyperSearch
from .exceptions import HyperSearchError
from .ingest import FORMATS, SPLIT_MODES, PathBundle, parse_dataset, preprocess, split, split_from_manifest
from .metrics import evaluate
from .search import PRUNE_MODES
from .tuning import grid_search

logger = logging.getLogger("hypersearch")

DEFAULTS = {
    "format": "benson-3file",
    "features": None,
    "mode": "random",
    "seed": 0,
    "max_edge_size": 10,
    "rare_size_threshold": 0.01,
    "no_preprocess": False,
    "manifest": None,
    "k_multiplier": [1.0, 2.0, 5.0],
    "k": None,
    "eps_v": "0",
    "eps_e": "0",
    "eps_t": "0",
    "tau": 0.0,
    "alpha": 0.0,
    "use_time": "auto",
    "use_features": "auto",
    "params": None,
    "tune": False,
    "grid": None,
    "prune_mode": "paper",
    "workers": 1,
    "obs": ["all"],
    "thresholds": None,
    "copies": 5,
    "out": "out",
}

ESTIMATOR_KEYS = ("eps_v", "eps_e", "eps_t", "tau", "alpha", "use_time", "use_features")


class ConfigError(HyperSearchError):
    pass


def _add_common(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("dataset", help="dataset prefix (three-file format) or edge-list path")
    p.add_argument("--config", default=None, help="JSON config; command-line flags take precedence")
    p.add_argument("--format", choices=FORMATS, default=S)
    p.add_argument("--features", default=S, help="node-feature sidecar file")
    p.add_argument("--max-edge-size", type=int, default=S)
    p.add_argument("--rare-size-threshold", type=float, default=S)
    p.add_argument("--no-preprocess", action="store_true", default=S)
    p.add_argument("--out", default=S, help="output directory")
    p.add_argument("-v", "--verbose", action="store_true", default=False)


def _add_split(p) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--mode", choices=SPLIT_MODES, default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--manifest", default=S, help="split manifest (default: <out>/manifest.json)")


def _add_model(p) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--eps-v", default=S, help="node relaxation ratio, e.g. 1/3")
    p.add_argument("--eps-e", default=S, help="edge relaxation ratio")
    p.add_argument("--eps-t", default=S, help="total relaxation ratio")
    p.add_argument("--tau", type=float, default=S)
    p.add_argument("--alpha", type=float, default=S)
    p.add_argument("--prune-mode", choices=PRUNE_MODES, default=S)
    p.add_argument("--workers", type=int, default=S, help="0 = one per CPU")
    p.add_argument("--k-multiplier", type=float, nargs="+", default=S)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypersearch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="split a dataset and write the manifest")
    _add_common(p)
    _add_split(p)

    p = sub.add_parser("observe", help="overlap / temporal / feature observations")
    _add_common(p)
    _add_split(p)
    p.add_argument("--obs", nargs="+", choices=["overlap", "temporal", "feature", "all"], default=argparse.SUPPRESS)

    p = sub.add_parser("tune", help="grid search on the validation split")
    _add_common(p)
    _add_split(p)
    _add_model(p)
    p.add_argument("--grid", default=argparse.SUPPRESS, help="JSON file with a parameter grid")

    p = sub.add_parser("predict", help="predict new hyperedges")
    _add_common(p)
    _add_split(p)
    _add_model(p)
    p.add_argument("--k", type=int, default=argparse.SUPPRESS, help="absolute number of predictions")
    p.add_argument("--params", default=argparse.SUPPRESS, help="best-params JSON from `tune`")
    p.add_argument("--tune", action="store_true", default=argparse.SUPPRESS)
    p.add_argument("--grid", default=argparse.SUPPRESS)

    p = sub.add_parser("evaluate", help="score prediction files against the test split")
    _add_common(p)
    _add_split(p)
    p.add_argument("--k-multiplier", type=float, nargs="+", default=argparse.SUPPRESS)

    p = sub.add_parser("bench", help="runtime on 1x..Nx replicated copies")
    _add_common(p)
    _add_model(p)
    p.add_argument("--copies", type=int, default=argparse.SUPPRESS)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """defaults < config file < command-line flags."""
    config = dict(DEFAULTS)
    cli = vars(args).copy()
    path = cli.pop("config", None)
    if path:
        try:
            config.update(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    config.update({k: v for k, v in cli.items() if k != "verbose"})
    return config


def _mult_label(m: float) -> str:
    return f"{m:g}x"


def _write(out: Path, name: str, text: str) -> Path:
    path = out / name
    path.write_text(text)
    logger.info("wrote %s", path)
    return path


def _write_json(out: Path, name: str, obj) -> Path:
    return _write(out, name, json.dumps(obj, indent=1, sort_keys=True) + "\n")


def load_hypergraph(config: dict):
    if config["format"] == "edge-list":
        bundle = PathBundle(edges=config["dataset"], features=config.get("features"))
    else:
        bundle = PathBundle.from_prefix(config["dataset"], features=config.get("features"))
    h = parse_dataset(bundle, config["format"])
    if not config.get("no_preprocess"):
        h = preprocess(h, config["max_edge_size"], config["rare_size_threshold"])
    return h


def load_split(h, config: dict, out: Path):
    path = config.get("manifest") or (out / "manifest.json")
    if not Path(path).exists():
        raise ConfigError(f"manifest {path} not found; run `hypersearch split` first")
    return split_from_manifest(h, json.loads(Path(path).read_text()))


def _estimator(config: dict) -> HyperSearch:
    params = {k: config[k] for k in ESTIMATOR_KEYS}
    if config.get("params"):
        try:
            params.update(json.loads(Path(config["params"]).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read params {config['params']}: {exc}") from None
    workers = config["workers"] or os.cpu_count() or 1
    return HyperSearch(prune_mode=config["prune_mode"], workers=workers, **params)


def _grid(config: dict):
    if not config.get("grid"):
        return None
    try:
        return json.loads(Path(config["grid"]).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read grid {config['grid']}: {exc}") from None


def cmd_split(config: dict, out: Path) -> None:
    h = load_hypergraph(config)
    s = split(h, config["mode"], config["seed"])
    _write(out, "manifest.json", s.to_json())
    summary = {"num_nodes": h.num_nodes, "num_edges": h.num_edges, **s.summary()}
    _write_json(out, "split-summary.json", summary)


def cmd_observe(config: dict, out: Path) -> None:
    h = load_hypergraph(config)
    s = load_split(h, config, out)
    wanted = set(config["obs"])
    every = "all" in wanted
    observed = s.observed
    if every or "overlap" in wanted:
        res = overlap_observation(observed, s.test, seed=config["seed"])
        _write(out, "observe-overlap.csv", rows_to_csv(res["rows"]))
        _write_json(out, "observe-overlap.json", res)
    if every or "temporal" in wanted:
        if h.raw_timestamps is None and every:
            logger.info("skipping temporal observation: no timestamps")
        else:
            rows = temporal_observation(h)
            _write(out, "observe-temporal.csv", rows_to_csv(rows))
            _write_json(out, "observe-temporal.json", rows)
    if every or "feature" in wanted:
        if h.features is None and every:
            logger.info("skipping feature observation: no features")
        else:
            rows = feature_observation(h, s.test, seed=config["seed"], train=observed)
            _write(out, "observe-feature.csv", rows_to_csv(rows))
            _write_json(out, "observe-feature.json", rows)


def cmd_tune(config: dict, out: Path) -> dict:
    h = load_hypergraph(config)
    s = load_split(h, config, out)
    best, results = grid_search(s, _grid(config), estimator=_estimator(config))
    _write_json(out, "best-params.json", best)
    _write(out, "tune-results.csv", rows_to_csv(results))
    logger.info("best parameters: %s", best)
    return best


def cmd_predict(config: dict, out: Path) -> None:
    h = load_hypergraph(config)
    manifest = config.get("manifest") or (out / "manifest.json")
    est = _estimator(config)
    if config.get("tune"):
        best = cmd_tune(config, out)
        est.set_params(**best)
    if config.get("k") is not None and not Path(manifest).exists():
        jobs = {"": config["k"]}
        observed = h
    else:
        s = load_split(h, config, out)
        observed = s.observed
        n_test = len(set(s.test))
        if config.get("k") is not None:
            jobs = {"": config["k"]}
        else:
            jobs = {
                "-" + _mult_label(m): max(1, math.floor(m * n_test + 0.5))
                for m in config["k_multiplier"]
            }
    est.fit(observed)
    for suffix, k in jobs.items():
        report = est.predict_report(k)
        lines = []
        for p in report.predictions:
            rec = p.to_dict()
            if h.node_labels is not None:
                rec["labels"] = [h.label(v) for v in p.nodes]
            lines.append(json.dumps(rec) + "\n")
        _write(out, f"predictions{suffix}.jsonl", "".join(lines))
        meta = report.metadata()
        meta["k"] = k
        _write_json(out, f"predictions{suffix}.meta.json", meta)


def _read_predictions(path: Path) -> list:
    out = []
    with open(path) as f:
        for line in f:
            if line.strip():
                out.append(tuple(json.loads(line)["nodes"]))
    return out


def cmd_evaluate(config: dict, out: Path) -> None:
    h = load_hypergraph(config)
    s = load_split(h, config, out)
    preds = {}
    for m in config["k_multiplier"]:
        path = out / f"predictions-{_mult_label(m)}.jsonl"
        if not path.exists():
            raise ConfigError(f"missing {path}; run `hypersearch predict` first")
        preds[m] = _read_predictions(path)
    report = evaluate(preds, s.test)
    _write(out, "eval.csv", rows_to_csv(report.to_rows()))
    _write_json(out, "eval.json", report.to_dict())


def cmd_bench(config: dict, out: Path) -> None:
    h = load_hypergraph(config)
    est = _estimator(config).fit(h)
    res = scaling_run(
        h,
        tuple(range(1, config["copies"] + 1)),
        params=est.score_params_,
        prune_mode=config["prune_mode"],
    )
    _write(out, "bench.csv", rows_to_csv(res["rows"]))
    _write_json(out, "bench.json", res)
    logger.info("log-log slope of runtime vs |E|: %.3f", res["slope"])


COMMANDS = {
    "split": cmd_split,
    "observe": cmd_observe,
    "tune": cmd_tune,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    command = args.command
    try:
        config = resolve_config(args)
        out = Path(config["out"])
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out, f"{command}-config.json", config)
        COMMANDS[command](config, out)
    except (HyperSearchError, ValueError, FileNotFoundError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return 2
    except Exception:
        logger.exception("internal error")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
