"""Command line entry point: ``clustermatch synth|match|eval|bench``.

Exit status is 0 on success, 2 on usage errors and 3 on data errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import io as msmf
from .bench import AXES, SweepSpec, evaluate, reports_to_csv, run_sweep
from .costmodel import DEFAULT_SIGMA_SQ
from .data import DataError, pad_sets
from .matchers import METHODS, MatchError, MatchOptions, MatchResult, run_method
from .synthgen import SyntheticSpec, generate

EXIT_USAGE = 2
EXIT_DATA = 3

log = logging.getLogger("clustermatch")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _method_list(text: str) -> list[str]:
    if text == "all":
        return list(METHODS)
    methods = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown method(s) {bad}; choose from {', '.join(METHODS)}")
    return methods


def _add_match_options(p: argparse.ArgumentParser):
    p.add_argument("--sigma-sq", type=float, default=DEFAULT_SIGMA_SQ, help="cost scale (default %(default)s)")
    p.add_argument("--max-iters", type=int, default=10, help="outer sweeps for cluster matchers (default %(default)s)")
    p.add_argument("--accuracy", choices=("pairwise", "star"), default="pairwise")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clustermatch", description="Match a collection of feature sets.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic MSMF dataset")
    p.add_argument("--sets", type=int, required=True)
    p.add_argument("--inliers", type=int, required=True)
    p.add_argument("--outliers", type=int, default=0)
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("match", help="run one matcher on a dataset")
    p.add_argument("dataset")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pad", action="store_true", help="pad ragged sets with dummy nodes")
    p.add_argument("-o", "--output", help="write the matching result (JSON) here")
    _add_match_options(p)

    p = sub.add_parser("eval", help="score a stored result against the dataset's ground truth")
    p.add_argument("dataset")
    p.add_argument("result")
    p.add_argument("--pad", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--accuracy", choices=("pairwise", "star"), default="pairwise")

    p = sub.add_parser("bench", help="parameter sweep over synthetic trials, CSV output")
    p.add_argument("--axis", choices=AXES, required=True)
    p.add_argument("--values", type=_float_list, required=True, help="comma-separated axis values")
    p.add_argument("--sets", type=int, default=30)
    p.add_argument("--inliers", type=int, default=20)
    p.add_argument("--outliers", type=int, default=0)
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0, help="base seed; trial t uses seed+t")
    p.add_argument("--methods", type=_method_list, default=list(METHODS), help="comma list or 'all'")
    p.add_argument("-o", "--output", help="CSV path (default stdout)")
    _add_match_options(p)
    return parser


def _load(path: str, pad: bool):
    dataset = msmf.read_dataset(path)
    if dataset.is_ragged:
        if not pad:
            raise DataError(f"sets have different sizes {dataset.sizes}; rerun with --pad")
        dataset = pad_sets(dataset)
    return dataset


def _report_json(report) -> str:
    fields = {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in report.as_dict().items()}
    return json.dumps(fields)


def _cmd_synth(args) -> int:
    spec = SyntheticSpec(args.sets, args.inliers, args.outliers, args.dim, args.eps, args.seed)
    msmf.write_dataset(generate(spec), args.output)
    log.info("wrote %s", args.output)
    return 0


def _cmd_match(args) -> int:
    dataset = _load(args.dataset, args.pad)
    opts = MatchOptions(args.max_iters, args.seed, args.sigma_sq)
    t0 = time.perf_counter()
    result = run_method(args.method, dataset.sets, opts)
    runtime_ms = (time.perf_counter() - t0) * 1e3
    if args.output:
        msmf.write_result(args.output, args.method, result.config, result.star, result.trace)
    report = evaluate(args.method, dataset, result, runtime_ms, args.seed, args.accuracy)
    print(_report_json(report))
    return 0


def _cmd_eval(args) -> int:
    dataset = _load(args.dataset, args.pad)
    method, config, star = msmf.read_result(args.result)
    if config.n_sets != dataset.n_sets or config.n != max(dataset.sizes):
        raise DataError("result does not fit the dataset")
    report = evaluate(method, dataset, MatchResult(method, config, star), float("nan"), args.seed, args.accuracy)
    print(_report_json(report))
    return 0


def _cmd_bench(args) -> int:
    spec = SweepSpec(
        axis=args.axis,
        values=tuple(args.values),
        n_sets=args.sets,
        n_inliers=args.inliers,
        n_outliers=args.outliers,
        dim=args.dim,
        epsilon=args.eps,
        trials=args.trials,
        base_seed=args.seed,
        methods=tuple(args.methods),
        max_outer_iters=args.max_iters,
        sigma_sq=args.sigma_sq,
        accuracy_mode=args.accuracy,
    )
    text = reports_to_csv(run_sweep(spec))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {"synth": _cmd_synth, "match": _cmd_match, "eval": _cmd_eval, "bench": _cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (DataError, MatchError) as exc:
        print(f"clustermatch: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"clustermatch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
