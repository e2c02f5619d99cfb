"""External clustering indices: ACC, NMI, ARI and macro F1.

All indices are computed from the contingency table of (true, predicted)
labels, so label values themselves carry no meaning.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import comb

from .errors import LengthMismatch


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray

    @property
    def row_sums(self):
        return self.counts.sum(axis=1)

    @property
    def col_sums(self):
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def _first_seen_codes(y):
    # codes by order of first appearance, so relabeling leaves the table unchanged
    _, first, inv = np.unique(y, return_index=True, return_inverse=True)
    rank = np.argsort(np.argsort(first))
    return rank[inv]


def contingency(y_true, y_pred) -> ContingencyTable:
    y_true = np.asarray(y_true).ravel()
    y_pred = np.asarray(y_pred).ravel()
    if y_true.shape != y_pred.shape:
        raise LengthMismatch(f"{y_true.size} true labels vs {y_pred.size} predicted")
    ti, pi = _first_seen_codes(y_true), _first_seen_codes(y_pred)
    counts = np.zeros((ti.max(initial=-1) + 1, pi.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(counts, (ti, pi), 1)
    return ContingencyTable(counts)


def _matching(table: ContingencyTable):
    return linear_sum_assignment(-table.counts)


def accuracy(y_true, y_pred) -> float:
    table = contingency(y_true, y_pred)
    if table.total == 0:
        return 0.0
    rows, cols = _matching(table)
    return float(table.counts[rows, cols].sum() / table.total)


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(y_true, y_pred) -> float:
    """Mutual information over the arithmetic mean of the two entropies."""
    table = contingency(y_true, y_pred)
    n = table.total
    h_true, h_pred = _entropy(table.row_sums), _entropy(table.col_sums)
    if h_true == 0 or h_pred == 0:
        return 1.0 if h_true == h_pred else 0.0
    nz = table.counts > 0
    nij = table.counts[nz].astype(np.float64)
    outer = np.outer(table.row_sums, table.col_sums)[nz].astype(np.float64)
    mi = float(np.sum(nij / n * (np.log(nij * n) - np.log(outer))))
    return max(0.0, min(1.0, mi / ((h_true + h_pred) / 2)))


def ari(y_true, y_pred) -> float:
    table = contingency(y_true, y_pred)
    index = comb(table.counts, 2).sum()
    sum_a = comb(table.row_sums, 2).sum()
    sum_b = comb(table.col_sums, 2).sum()
    expected = sum_a * sum_b / comb(table.total, 2) if table.total > 1 else 0.0
    max_index = (sum_a + sum_b) / 2
    if max_index == expected:
        # both partitions trivial (one cluster, or all singletons)
        return 1.0
    return float((index - expected) / (max_index - expected))


def f1(y_true, y_pred) -> float:
    """Macro F1 over true classes after Hungarian alignment of clusters."""
    table = contingency(y_true, y_pred)
    rows, cols = _matching(table)
    matched = dict(zip(rows, cols))
    scores = []
    for i in range(table.counts.shape[0]):
        if i not in matched:
            scores.append(0.0)
            continue
        tp = table.counts[i, matched[i]]
        if tp == 0:
            scores.append(0.0)
            continue
        precision = tp / table.col_sums[matched[i]]
        recall = tp / table.row_sums[i]
        scores.append(2 * precision * recall / (precision + recall))
    return float(np.mean(scores))


def evaluate(y_true, y_pred) -> dict:
    return {
        "acc": accuracy(y_true, y_pred),
        "nmi": nmi(y_true, y_pred),
        "ari": ari(y_true, y_pred),
        "f1": f1(y_true, y_pred),
    }
