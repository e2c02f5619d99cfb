"""End-to-end run: solve, symmetrize, cluster, score, and build a report."""
from __future__ import annotations

import dataclasses
import time
from typing import Optional

import numpy as np

from .errors import DataError, NumericalError
from .metrics import evaluate
from .model import MultiViewDataset, validate_dataset
from .solver import SolverConfig, solve
from .spectral import cluster_graph

REPORT_VERSION = 1
TIMING_KEY = "timings"


def config_dict(config: SolverConfig) -> dict:
    return dataclasses.asdict(config)


def dataset_summary(dataset: MultiViewDataset) -> dict:
    return {
        "name": dataset.name,
        "num_nodes": int(dataset.num_nodes),
        "num_views": int(dataset.num_views),
        "num_clusters": int(dataset.num_clusters),
        "has_labels": dataset.labels is not None,
    }


def error_report(config: Optional[SolverConfig], exc: BaseException, timings=None, variant=None) -> dict:
    return {
        "schema_version": REPORT_VERSION,
        "status": "error",
        "variant": config.variant if config is not None else variant,
        "config": config_dict(config) if config is not None else None,
        "error": {"type": type(exc).__name__, "message": str(exc)},
        TIMING_KEY: timings or {},
    }


def run_pipeline(dataset: MultiViewDataset, config: SolverConfig, timings: Optional[dict] = None):
    """Return ``(report, state, cluster_result)`` for one configuration.

    Raises DataError for invalid datasets and NumericalError subclasses when
    the optimization diverges.
    """
    timings = dict(timings or {})
    problems = validate_dataset(dataset)
    if problems:
        raise DataError("; ".join(str(p) for p in problems))

    t0 = time.perf_counter()
    state = solve(dataset, config)
    timings["solve"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    result = cluster_graph(state.s_matrix, dataset.num_clusters, seed=config.seed)
    timings["cluster"] = time.perf_counter() - t0

    report = {
        "schema_version": REPORT_VERSION,
        "status": "ok",
        "variant": config.variant,
        "config": config_dict(config),
        "dataset": dataset_summary(dataset),
        "initial_objective": float(state.initial_objective),
        "objective_trace": [float(v) for v in state.objective_trace],
        "weight_trace": [[float(w) for w in ws] for ws in state.weight_trace],
        "weights": [float(w) for w in state.weights],
        "epochs": state.epochs,
        "converged": bool(state.converged),
        "labels": [int(v) for v in result.labels],
    }
    if dataset.labels is not None:
        t0 = time.perf_counter()
        report["metrics"] = evaluate(dataset.labels, result.labels)
        timings["metrics"] = time.perf_counter() - t0
    report[TIMING_KEY] = timings
    return report, state, result


def trace_rows(report: dict):
    """Rows of ``epoch, objective, lambda_1..lambda_V``; epoch 0 is the initializer."""
    n_w = len(report["weights"])
    yield ["epoch", "objective"] + [f"lambda_{i + 1}" for i in range(n_w)]
    yield [0, report["initial_objective"]] + [1.0] * n_w
    for epoch, (obj, ws) in enumerate(zip(report["objective_trace"], report["weight_trace"]), 1):
        yield [epoch, obj] + list(ws)


def strip_timings(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != TIMING_KEY}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, NumericalError):
        return 3
    return 2
