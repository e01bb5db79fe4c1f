"""Command-line interface.

Subcommands:

    match      run the combination-clustering pipeline and report P/R/F1
    baseline   run a pairwise similarity baseline (single tau or a sweep)
    eval       re-score an existing cluster assignment file
    inspect    dump dataset, lexicon and scoring statistics

Parameter precedence is defaults < config file < flags: `--config file.json`
presets any of the parameter flags (alpha, b, k, tau, variant, distance,
verify_metric, threads, format, units, no_verify, seedless) and an explicit
flag on the command line wins over the file.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .baseline import METRICS
from .evaluation import prf1, run_report
from .index import DISTANCE_MODES, build_index
from .ingest import FORMATS, FeedFormatError, load_ground_truth, load_products, load_truth_file
from .pipeline import (
    pairs_from_assignment,
    read_clusters,
    run_baseline,
    run_match,
    write_clusters,
)
from .scoring import ScoringConfig
from .textprep import UnitLexicon
from .verify import VERIFY_METRICS


def _wide_formatter(prog: str) -> argparse.HelpFormatter:
    # fixed width keeps --help output independent of the terminal
    return argparse.HelpFormatter(prog, width=96)


def _parse_k(value: str) -> Optional[int]:
    if value == "auto":
        return None
    try:
        k = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or an integer, got {value!r}")
    if k < 2:
        raise argparse.ArgumentTypeError(f"K must be >= 2, got {k}")
    return k


def _parse_sweep(value: str) -> List[float]:
    try:
        start, stop, step = (float(x) for x in value.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {value!r}")
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"bad sweep range {value!r}")
    taus: List[float] = []
    i = 0
    while True:
        tau = round(start + i * step, 10)
        if tau > stop + 1e-9:
            break
        taus.append(tau)
        i += 1
    return taus


# sentinel distinguishing "flag not given" from a real value, so a config
# file can sit between the defaults and explicit flags
_UNSET = object()

# real default per configurable parameter, shared by match and baseline
_PARAM_DEFAULTS = {
    "format": "simple",
    "units": None,
    "alpha": 1.0,
    "b": 1.0,
    "k": None,  # auto
    "variant": "upm",
    "tau": 0.4,
    "verify_metric": "cs",
    "distance": "squared",
    "threads": 1,
    "no_verify": False,
    "seedless": False,
}

_CHOICE_KEYS = {
    "format": FORMATS,
    "variant": ("upm", "upm+"),
    "verify_metric": VERIFY_METRICS,
    "distance": DISTANCE_MODES,
}


def _apply_config(args) -> None:
    """Fill unset parameters from the config file, then from the defaults."""
    data = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise FileNotFoundError(f"config file not found: {path}")
        data = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ValueError(f"config file must hold a JSON object: {path}")
        unknown = set(data) - set(_PARAM_DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key, default in _PARAM_DEFAULTS.items():
        if not hasattr(args, key):
            continue
        current = getattr(args, key)
        if current is _UNSET or (key in ("no_verify", "seedless") and current is False):
            if key in data:
                value = data[key]
                if key == "k":
                    value = _parse_k(str(value))
                elif key in _CHOICE_KEYS and value not in _CHOICE_KEYS[key]:
                    raise ValueError(
                        f"config key {key!r} must be one of {_CHOICE_KEYS[key]}, got {value!r}"
                    )
                elif key in ("alpha", "b", "tau"):
                    value = float(value)
                elif key == "threads":
                    value = int(value)
                elif key in ("no_verify", "seedless"):
                    value = bool(value)
                setattr(args, key, value)
            else:
                setattr(args, key, default)


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="feed CSV file")
    p.add_argument(
        "--format", choices=FORMATS, default=_UNSET, help="feed layout (default: simple)"
    )
    p.add_argument(
        "--truth",
        default=None,
        help="truth CSV (product_id,cluster_id); optional when format=published",
    )
    p.add_argument("--units", default=_UNSET, help="measurement-unit lexicon file")
    p.add_argument(
        "--config",
        default=None,
        help="JSON file presetting parameter flags (flags still win)",
    )


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--report", default=None, help="write a JSON-lines report here")
    p.add_argument("--summary", default=None, help="write a CSV summary here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="titlematch",
        description="Cluster product titles from multi-vendor feeds without supervision.",
        formatter_class=_wide_formatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_match = sub.add_parser(
        "match", help="run the combination-clustering pipeline", formatter_class=_wide_formatter
    )
    _add_input_args(p_match)
    p_match.add_argument(
        "--alpha", type=float, default=_UNSET, help="proximity constant (default: 1)"
    )
    p_match.add_argument(
        "--b", type=float, default=_UNSET, help="length normalization in [0,1] (default: 1)"
    )
    p_match.add_argument(
        "--k",
        type=_parse_k,
        default=_UNSET,
        metavar="auto|INT",
        help="max combination size; auto = half the average title length",
    )
    p_match.add_argument(
        "--variant", choices=("upm", "upm+"), default=_UNSET, help="title pruning variant"
    )
    p_match.add_argument(
        "--tau", type=float, default=_UNSET, help="verification similarity threshold (default: 0.4)"
    )
    p_match.add_argument("--no-verify", action="store_true", help="skip the verification stage")
    p_match.add_argument(
        "--verify-metric",
        choices=VERIFY_METRICS,
        default=_UNSET,
        help="similarity used during verification",
    )
    p_match.add_argument(
        "--distance",
        choices=DISTANCE_MODES,
        default=_UNSET,
        help="positional distance accumulation",
    )
    p_match.add_argument("--clusters", default=None, help="write product_id,cluster_id CSV here")
    p_match.add_argument("--threads", type=int, default=_UNSET, help="scoring worker threads")
    p_match.add_argument(
        "--seedless",
        action="store_true",
        help="assert the run uses fixed hashes and no randomness (always true)",
    )
    _add_output_args(p_match)
    p_match.set_defaults(func=cmd_match)

    p_base = sub.add_parser(
        "baseline", help="run a pairwise similarity baseline", formatter_class=_wide_formatter
    )
    _add_input_args(p_base)
    p_base.add_argument("--baseline", choices=METRICS, required=True, help="similarity metric")
    p_base.add_argument(
        "--tau", type=float, default=_UNSET, help="match threshold, strict > (default: 0.4)"
    )
    p_base.add_argument(
        "--sweep",
        type=_parse_sweep,
        default=None,
        metavar="START:STOP:STEP",
        help="evaluate a whole threshold range, e.g. 0.1:0.9:0.1",
    )
    p_base.add_argument(
        "--threads", type=int, default=_UNSET, help="pair evaluation worker threads"
    )
    p_base.add_argument("--seedless", action="store_true", help="assert deterministic execution")
    _add_output_args(p_base)
    p_base.set_defaults(func=cmd_baseline)

    p_eval = sub.add_parser(
        "eval", help="score an existing cluster assignment", formatter_class=_wide_formatter
    )
    _add_input_args(p_eval)
    p_eval.add_argument("--clusters", required=True, help="product_id,cluster_id CSV to score")
    _add_output_args(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_ins = sub.add_parser(
        "inspect", help="dump dataset and index statistics", formatter_class=_wide_formatter
    )
    _add_input_args(p_ins)
    p_ins.add_argument("--k", type=_parse_k, default=_UNSET, metavar="auto|INT")
    p_ins.add_argument("--variant", choices=("upm", "upm+"), default=_UNSET)
    p_ins.add_argument("--distance", choices=DISTANCE_MODES, default=_UNSET)
    p_ins.add_argument("--top", type=int, default=10, help="how many frequent tokens to list")
    p_ins.set_defaults(func=cmd_inspect)

    return parser


def _load_dataset(args):
    dataset = load_products(args.input, args.format)
    if args.truth:
        dataset = load_truth_file(args.truth, dataset)
    return dataset


def _load_units(args) -> Optional[UnitLexicon]:
    return UnitLexicon.from_file(args.units) if args.units else None


def cmd_match(args) -> int:
    _apply_config(args)
    dataset = _load_dataset(args)
    config = ScoringConfig(
        alpha=args.alpha,
        b=args.b,
        k=args.k,
        tau=args.tau,
        variant=args.variant,
        distance_mode=args.distance,
        verify_metric=args.verify_metric,
        threads=args.threads,
    )
    result = run_match(
        dataset,
        config,
        units=_load_units(args),
        verify=not args.no_verify,
        dataset_path=str(args.input),
    )
    if args.clusters:
        write_clusters(args.clusters, result)
    run_report([result.report], args.report, args.summary)
    r = result.report
    line = f"titles={r['dataset']['titles']} clusters={r['clusters']} k={r['k']}"
    if r["f1"] is not None:
        line += f" precision={r['precision']:.4f} recall={r['recall']:.4f} f1={r['f1']:.4f}"
    print(line)
    return 0


def cmd_baseline(args) -> int:
    _apply_config(args)
    dataset = _load_dataset(args)
    taus = args.sweep if args.sweep else [args.tau]
    rows, _ = run_baseline(
        dataset,
        args.baseline,
        taus,
        threads=args.threads,
        units=_load_units(args),
        dataset_path=str(args.input),
    )
    run_report(rows, args.report, args.summary)
    for row in rows:
        line = f"metric={row['method']} tau={row['params']['tau']:.2f} pairs={row['predicted_pairs']}"
        if row["f1"] is not None:
            line += f" precision={row['precision']:.4f} recall={row['recall']:.4f} f1={row['f1']:.4f}"
        print(line)
    return 0


def cmd_eval(args) -> int:
    _apply_config(args)
    dataset = _load_dataset(args)
    assignment = read_clusters(args.clusters)
    predicted = pairs_from_assignment(assignment)
    truth = load_ground_truth(dataset)
    scores = prf1(predicted, truth)
    row = {
        "command": "eval",
        "dataset": {"path": str(args.input), "titles": dataset.title_count},
        "method": "eval",
        "params": {"clusters": str(args.clusters)},
        "k": None,
        "clusters": len(set(assignment.values())),
        "precision": scores["precision"],
        "recall": scores["recall"],
        "f1": scores["f1"],
        "predicted_pairs": len(predicted),
        "truth_pairs": len(truth),
        "timings_ms": {},
    }
    run_report([row], args.report, args.summary)
    print(
        f"clusters={row['clusters']} precision={scores['precision']:.4f} "
        f"recall={scores['recall']:.4f} f1={scores['f1']:.4f}"
    )
    return 0


def cmd_inspect(args) -> int:
    _apply_config(args)
    dataset = _load_dataset(args)
    index = build_index(
        dataset, k=args.k, variant=args.variant, distance_mode=args.distance, units=_load_units(args)
    )
    s = index.stats
    print(f"titles={s.title_count} vendors={dataset.vendor_count}")
    print(f"k={index.k} variant={index.variant} distance={index.distance_mode}")
    print(f"distinct_tokens={s.distinct_tokens} avg_title_len={s.avg_title_len:.3f}")
    print(
        f"combinations={s.distinct_combinations} instances={s.combination_instances} "
        f"avg_combination_len={s.avg_combination_len:.3f} collisions={s.collisions_resolved}"
    )
    top = sorted(index.tokens.records, key=lambda r: (-r.f_w, r.token_id))[: args.top]
    for rec in top:
        print(f"token id={rec.token_id} f={rec.f_w} sem={int(rec.s_w)} {rec.surface}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (FeedFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
