"""``mcgc`` command line: run, ablate, sweep, generate, eval.

Exit codes: 0 ok, 1 usage, 2 data error, 3 numerical divergence.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import ConfigError, DataError, MCGCError
from .io import SbmConfig, generate_sbm, load_dataset, read_labels, save_dataset
from .metrics import evaluate
from .pipeline import error_report, exit_code_for, run_pipeline, trace_rows
from .solver import SolverConfig

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
METRIC_KEYS = ("acc", "nmi", "ari", "f1")

log = logging.getLogger("mcgc")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


_handler = None


def _configure_logging():
    global _handler
    level = os.environ.get("MCGC_LOG", "error").lower()
    log.setLevel({"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(level, logging.ERROR))
    if _handler is not None:
        log.removeHandler(_handler)
    _handler = logging.StreamHandler(sys.stderr)
    _handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.addHandler(_handler)


def _list(conv):
    def parse(text):
        items = [t.strip() for t in text.split(",") if t.strip()]
        if not items:
            raise argparse.ArgumentTypeError("empty list")
        try:
            return [conv(t) for t in items]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def _solver_flags(p, grid=False):
    many = (lambda conv: _list(conv)) if grid else (lambda conv: conv)
    p.add_argument("--data", required=True, help="dataset directory or manifest.json")
    p.add_argument("--alpha", type=many(float), required=True)
    p.add_argument("--m", type=many(int), default=[2] if grid else 2, help="filter order")
    p.add_argument("--s", type=many(float), default=[0.5] if grid else 0.5, help="filter strength")
    p.add_argument("--k", type=many(int), default=[10] if grid else 10, help="neighbors per node")
    p.add_argument("--gamma", type=float, default=-4.0)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--max-epochs", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--inner-steps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mcgc", description="Multi-view contrastive graph clustering")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="cluster one dataset with one configuration")
    _solver_flags(p)
    p.add_argument("--variant", default="full")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--trace", help="optional CSV objective/weight trace")

    p = sub.add_parser("ablate", help="run every solver variant with a shared seed")
    _solver_flags(p)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("sweep", help="grid over --alpha/--m/--s/--k comma lists")
    _solver_flags(p, grid=True)
    p.add_argument("--variant", default="full")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("generate", help="write a synthetic multi-view SBM dataset")
    p.add_argument("--blocks", type=_list(int), default=[20, 20, 20])
    p.add_argument("--views", type=int, default=2)
    p.add_argument("--p-in", type=_list(float), default=[0.5], help="one value or one per view")
    p.add_argument("--p-out", type=_list(float), default=[0.02], help="one value or one per view")
    p.add_argument("--feature-dim", type=_list(int), default=[60], help="one value or one per view")
    p.add_argument("--separation", type=float, default=3.0)
    p.add_argument("--noise-std", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default="sbm")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("eval", help="score predicted labels against ground truth")
    p.add_argument("--true", required=True, help="label file, one integer per line")
    p.add_argument("--pred", required=True, help="label file or run report JSON")
    p.add_argument("--out", help="write metrics JSON here instead of stdout")
    return parser


def _make_config(args, variant, alpha=None, m=None, s=None, k=None) -> SolverConfig:
    return SolverConfig(
        alpha=args.alpha if alpha is None else alpha,
        gamma=args.gamma,
        learning_rate=args.lr,
        max_epochs=args.max_epochs,
        tol=args.tol,
        inner_steps=args.inner_steps,
        seed=args.seed,
        variant=variant,
        order=args.m if m is None else m,
        strength=args.s if s is None else s,
        k=args.k if k is None else k,
    )


def _write_json(path, doc):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")


def _write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def run_cell(data: str, config: SolverConfig):
    """Load and run one configuration; never raises, returns ``(report, exit_code)``."""
    timings = {}
    t0 = time.perf_counter()
    try:
        dataset = load_dataset(data)
    except (MCGCError, OSError) as exc:
        log.error("loading %s failed: %s", data, exc)
        return error_report(config, exc, {"load": time.perf_counter() - t0}), EXIT_DATA
    timings["load"] = time.perf_counter() - t0
    try:
        report, _, _ = run_pipeline(dataset, config, timings)
    except MCGCError as exc:
        log.error("%s failed: %s", config.variant, exc)
        return error_report(config, exc, timings), exit_code_for(exc)
    return report, EXIT_OK


def _run_many(data, configs, jobs):
    if jobs <= 1 or len(configs) <= 1:
        return [run_cell(data, c) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_cell, [data] * len(configs), configs))


def cmd_run(args) -> int:
    config = _make_config(args, args.variant)
    report, code = run_cell(args.data, config)
    _write_json(args.out, report)
    if args.trace and report["status"] == "ok":
        _write_csv(args.trace, trace_rows(report))
    return code


def _summary_row(report, keys):
    metrics = report.get("metrics", {})
    trace = report.get("objective_trace") or [None]
    return keys + [report["status"]] + [metrics.get(k) for k in METRIC_KEYS] + [
        trace[-1], report.get("epochs"), (report.get("error") or {}).get("message", "")]


def cmd_ablate(args) -> int:
    try:
        num_views = load_dataset(args.data).num_views
    except (MCGCError, OSError) as exc:
        _write_json(Path(args.out) / "ablation.json", {"rows": [], "error": str(exc)})
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    variants = ["full", "shared_neighbors", "no_contrastive", "no_filter"]
    variants += [f"single_view({v})" for v in range(num_views)]
    configs = [_make_config(args, v) for v in variants]
    results = _run_many(args.data, configs, args.jobs)
    out = Path(args.out)
    _write_json(out / "ablation.json", {"rows": [r for r, _ in results]})
    header = ["variant", "status", *METRIC_KEYS, "final_objective", "epochs", "error"]
    _write_csv(out / "ablation.csv", [header] + [_summary_row(r, [v]) for v, (r, _) in zip(variants, results)])
    print(out / "ablation.json")
    return max(code for _, code in results)


def cmd_sweep(args) -> int:
    grid = list(itertools.product(args.alpha, args.m, args.s, args.k))
    configs = [_make_config(args, args.variant, a, m, s, k) for a, m, s, k in grid]
    results = _run_many(args.data, configs, args.jobs)
    out = Path(args.out)
    rows = [["alpha", "m", "s", "k", "status", *METRIC_KEYS, "final_objective", "epochs", "error"]]
    for (a, m, s, k), (report, _) in zip(grid, results):
        _write_json(out / "cells" / f"alpha={a!r}_m={m}_s={s!r}_k={k}.json", report)
        rows.append(_summary_row(report, [a, m, s, k]))
    _write_csv(out / "summary.csv", rows)
    print(out / "summary.csv")
    return max(code for _, code in results)


def _per_view(values, views, flag):
    if len(values) == 1:
        return values * views
    if len(values) != views:
        raise UsageError(f"{flag} needs 1 or {views} values, got {len(values)}")
    return values


def cmd_generate(args) -> int:
    if args.views < 1:
        raise UsageError("--views must be >= 1")
    p_in = _per_view(args.p_in, args.views, "--p-in")
    p_out = _per_view(args.p_out, args.views, "--p-out")
    dims = _per_view(args.feature_dim, args.views, "--feature-dim")
    try:
        config = SbmConfig(tuple(args.blocks), tuple(zip(p_in, p_out)), tuple(dims),
                           args.separation, args.noise_std, args.seed, args.name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        path = save_dataset(generate_sbm(config), args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(path)
    return EXIT_OK


def _read_pred(path):
    path = Path(path)
    if path.suffix == ".json":
        doc = json.loads(path.read_text())
        if "labels" not in doc:
            raise DataError(f"{path} has no 'labels' entry")
        return doc["labels"]
    return read_labels(path)


def cmd_eval(args) -> int:
    try:
        metrics = evaluate(read_labels(args.true), _read_pred(args.pred))
    except (MCGCError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if args.out:
        _write_json(args.out, metrics)
    else:
        print(json.dumps(metrics, indent=2))
    return EXIT_OK


COMMANDS = {"run": cmd_run, "ablate": cmd_ablate, "sweep": cmd_sweep,
            "generate": cmd_generate, "eval": cmd_eval}


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"mcgc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
