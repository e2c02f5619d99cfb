"""Affinity symmetrization and normalized spectral clustering."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from sklearn.cluster import KMeans

from .errors import EigenError


@dataclass(frozen=True, eq=False)
class ClusterResult:
    affinity: np.ndarray
    embedding: np.ndarray
    labels: np.ndarray


def symmetrize(s: np.ndarray) -> np.ndarray:
    a = np.abs(np.asarray(s, dtype=np.float64))
    return (a + a.T) / 2


def spectral_embedding(c: np.ndarray, n_clusters: int) -> np.ndarray:
    """Row-normalized eigenvectors of the ``n_clusters`` smallest eigenvalues
    of ``I - D^-1/2 C D^-1/2``."""
    c = np.asarray(c, dtype=np.float64)
    raw_deg = c.sum(axis=1)
    d = 1.0 / np.sqrt(np.maximum(raw_deg, 1e-12))
    lap = np.eye(c.shape[0]) - d[:, None] * c * d[None, :]
    lap = (lap + lap.T) / 2
    try:
        _, vecs = scipy.linalg.eigh(lap, subset_by_index=[0, n_clusters - 1])
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenError(f"eigensolver failed: {exc}") from exc
    vecs[raw_deg <= 0] = 0.0
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    return np.divide(vecs, norms, out=np.zeros_like(vecs), where=norms > 0)


def spectral_cluster(c: np.ndarray, n_clusters: int, seed: int = 0, n_init: int = 20,
                     max_iter: int = 300, return_result: bool = False):
    if n_clusters < 2:
        raise ValueError("n_clusters must be >= 2")
    emb = spectral_embedding(c, n_clusters)
    km = KMeans(n_clusters=n_clusters, init="k-means++", n_init=n_init,
                max_iter=max_iter, random_state=seed)
    labels = km.fit_predict(emb).astype(np.int64)
    if return_result:
        return ClusterResult(np.asarray(c), emb, labels)
    return labels


def cluster_graph(s: np.ndarray, n_clusters: int, seed: int = 0, **kwargs) -> ClusterResult:
    """Symmetrize a learned graph and cluster it."""
    return spectral_cluster(symmetrize(s), n_clusters, seed, return_result=True, **kwargs)
