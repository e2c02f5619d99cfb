"""Shared data model: views, multi-view datasets and their validation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, eq=False)
class View:
    """One (graph, features) pair.

    ``adjacency`` is stored without self-loops; the ``+ I`` is applied during
    normalization. Two views may hold the very same adjacency or feature
    object, which ``save_dataset`` preserves as a shared file.
    """

    adjacency: sp.csr_matrix
    features: np.ndarray

    @property
    def feature_dim(self) -> int:
        return int(self.features.shape[1])


@dataclass(frozen=True, eq=False)
class MultiViewDataset:
    num_nodes: int
    views: Sequence[View]
    num_clusters: int
    labels: Optional[np.ndarray] = None
    name: str = "dataset"

    @property
    def num_views(self) -> int:
        return len(self.views)


@dataclass(frozen=True, eq=False)
class NormalizedView:
    norm_adjacency: sp.csr_matrix
    laplacian: sp.csr_matrix
    degree: np.ndarray


@dataclass(frozen=True)
class Violation:
    view: Optional[int]
    reason: str

    def __str__(self):
        where = "dataset" if self.view is None else f"view {self.view}"
        return f"{where}: {self.reason}"


def make_view(adjacency, features) -> View:
    """Build a :class:`View` coercing inputs to CSR float64 / dense float64."""
    adj = sp.csr_matrix(adjacency, dtype=np.float64)
    x = np.asarray(features, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    return View(adj, x)


def validate_dataset(dataset: MultiViewDataset) -> List[Violation]:
    """Collect every invariant violation; an empty list means valid."""
    out: List[Violation] = []
    n = dataset.num_nodes
    c = dataset.num_clusters
    if len(dataset.views) < 1:
        out.append(Violation(None, "dataset has no views"))
    if c < 2:
        out.append(Violation(None, f"num_clusters must be >= 2, got {c}"))
    if n < c:
        out.append(Violation(None, f"num_nodes {n} smaller than num_clusters {c}"))

    for v, view in enumerate(dataset.views):
        adj = view.adjacency
        if adj.shape != (n, n):
            out.append(Violation(v, f"adjacency shape {adj.shape} != ({n}, {n})"))
        else:
            a = sp.csr_matrix(adj)
            if a.nnz and not np.all(np.isfinite(a.data)):
                out.append(Violation(v, "non-finite adjacency entries"))
            if a.nnz and a.data.min() < 0:
                out.append(Violation(v, "negative adjacency entries"))
            if a.nnz and abs(a - a.T).max() != 0:
                out.append(Violation(v, "asymmetric adjacency"))
            if np.any(a.diagonal() != 0):
                out.append(Violation(v, "nonzero adjacency diagonal"))
        x = view.features
        if x.ndim != 2 or x.shape[0] != n:
            out.append(Violation(v, f"features shape {x.shape} does not have {n} rows"))
        elif x.shape[1] < 1:
            out.append(Violation(v, "features have zero columns"))
        if not np.all(np.isfinite(x)):
            out.append(Violation(v, "non-finite features"))

    y = dataset.labels
    if y is not None:
        y = np.asarray(y)
        if y.shape != (n,):
            out.append(Violation(None, f"labels shape {y.shape} != ({n},)"))
        elif not np.issubdtype(y.dtype, np.integer):
            out.append(Violation(None, "labels are not integers"))
        elif n and (y.min() < 0 or y.max() >= c):
            out.append(Violation(None, "label out of range"))
    return out
