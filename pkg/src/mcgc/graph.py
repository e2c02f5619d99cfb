"""Adjacency normalization, low-pass graph filtering and kNN neighbor sets."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist

from .errors import IsolatedNodeError, ShapeError
from .model import NormalizedView, View


@dataclass(frozen=True)
class FilterParams:
    order: int = 2
    strength: float = 0.5

    def __post_init__(self):
        if self.order < 0 or int(self.order) != self.order:
            raise ValueError(f"filter order must be a non-negative integer, got {self.order}")
        if self.strength < 0:
            raise ValueError(f"filter strength must be >= 0, got {self.strength}")


@dataclass(frozen=True, eq=False)
class SmoothedViews:
    representations: List[np.ndarray]

    def __len__(self):
        return len(self.representations)

    def __getitem__(self, v):
        return self.representations[v]


@dataclass(frozen=True, eq=False)
class NeighborIndex:
    """Per-view kNN tables plus their per-node intersection.

    ``per_view[v]`` is an ``(N, k')`` int array with sorted rows, where
    ``k' = min(k, N - 1)``. ``shared[i]`` is a sorted 1-D array.
    """

    per_view: List[np.ndarray]
    shared: List[np.ndarray]
    k: int

    @property
    def num_nodes(self) -> int:
        return self.per_view[0].shape[0]

    def view_mask(self, v: int) -> np.ndarray:
        """Dense 0/1 indicator matrix of view ``v``'s neighbor sets."""
        n, kk = self.per_view[v].shape
        mask = np.zeros((n, n))
        mask[np.repeat(np.arange(n), kk), self.per_view[v].ravel()] = 1.0
        return mask

    def shared_mask(self) -> np.ndarray:
        n = self.num_nodes
        mask = np.zeros((n, n))
        for i, row in enumerate(self.shared):
            mask[i, row] = 1.0
        return mask


def normalize(view: View) -> NormalizedView:
    """Symmetric normalization of the self-looped adjacency.

    Degrees are taken from ``adjacency + I``, so every node has degree >= 1.
    """
    n = view.adjacency.shape[0]
    a_loop = sp.csr_matrix(view.adjacency, dtype=np.float64) + sp.identity(n, format="csr")
    degree = np.asarray(a_loop.sum(axis=1)).ravel()
    if np.any(degree <= 0):
        raise IsolatedNodeError("zero degree after self-loop augmentation")
    coo = a_loop.tocoo()
    # a_ij / sqrt(d_i d_j) is symmetric bit-for-bit since the product commutes
    vals = coo.data / np.sqrt(degree[coo.row] * degree[coo.col])
    a_norm = sp.csr_matrix((vals, (coo.row, coo.col)), shape=(n, n))
    lap = sp.csr_matrix(sp.identity(n, format="csr") - a_norm)
    return NormalizedView(a_norm, lap, degree)


def graph_filter(norm: NormalizedView, features: np.ndarray, params: FilterParams) -> np.ndarray:
    """Apply ``(I - sL)^m`` to ``features`` by ``m`` repeated products."""
    x = np.asarray(features, dtype=np.float64)
    lap = norm.laplacian
    if lap.shape[1] != x.shape[0]:
        raise ShapeError(f"laplacian is {lap.shape}, features have {x.shape[0]} rows")
    h = x.copy()
    for _ in range(params.order):
        h = h - params.strength * (lap @ h)
    return np.asarray(h)


def smooth_views(views: Sequence[View], params: FilterParams) -> SmoothedViews:
    return SmoothedViews([graph_filter(normalize(v), v.features, params) for v in views])


def knn_table(h: np.ndarray, k: int, block: int = 1024) -> np.ndarray:
    """Sorted indices of the ``k`` Euclidean nearest rows, self excluded.

    Ties are resolved in favour of the smaller node index. Squared distances
    are formed per pair (not via the Gram expansion) so that equal distances
    compare equal.
    """
    h = np.asarray(h, dtype=np.float64)
    n = h.shape[0]
    kk = min(k, n - 1)
    out = np.empty((n, kk), dtype=np.int64)
    for start in range(0, n, block):
        stop = min(start + block, n)
        dist = cdist(h[start:stop], h, "sqeuclidean")
        dist[np.arange(stop - start), np.arange(start, stop)] = np.inf
        order = np.argsort(dist, axis=1, kind="stable")[:, :kk]
        out[start:stop] = np.sort(order, axis=1)
    return out


def build_neighbors(smoothed: SmoothedViews | Sequence[np.ndarray], k: int) -> NeighborIndex:
    reps = list(smoothed.representations if isinstance(smoothed, SmoothedViews) else smoothed)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = reps[0].shape[0]
    if n < 2:
        raise ValueError("need at least two nodes to build neighbor sets")
    per_view = [knn_table(h, k) for h in reps]
    shared = []
    for i in range(n):
        common = per_view[0][i]
        for table in per_view[1:]:
            common = np.intersect1d(common, table[i], assume_unique=True)
        shared.append(common)
    return NeighborIndex(per_view, shared, k)
