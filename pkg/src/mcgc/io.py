"""On-disk dataset format and the synthetic attributed SBM generator.

A dataset directory holds ``manifest.json``::

    {"name": "acm", "num_clusters": 3,
     "views": [{"graph": "g1.mtx", "features": "x.mtx"},
               {"graph": "g2.mtx", "features": "x.mtx"}],
     "labels": "labels.txt"}

Graphs are MatrixMarket ``coordinate`` files (``symmetric``, 1-based,
``pattern`` or ``real``). Features are MatrixMarket ``array`` files or
headerless CSV. Labels are one integer per line. Paths are relative to the
manifest.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import DataError, ManifestError, ParseError, ShapeError
from .model import MultiViewDataset, View, validate_dataset

MANIFEST_KEYS = {"name", "num_clusters", "views", "labels"}
VIEW_KEYS = {"graph", "features"}


# -- MatrixMarket -----------------------------------------------------------

def _mm_lines(path: Path):
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, 1):
            yield lineno, raw.rstrip("\n")


def _read_header(path: Path, lines):
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError(path, 1, "empty file") from None
    tokens = header.lower().split()
    if len(tokens) != 5 or tokens[0] != "%%matrixmarket" or tokens[1] != "matrix":
        raise ParseError(path, lineno, f"bad MatrixMarket banner {header!r}")
    fmt, field, symmetry = tokens[2:]
    for lineno, raw in lines:
        if raw.strip() and not raw.lstrip().startswith("%"):
            return fmt, field, symmetry, lineno, raw.split()
    raise ParseError(path, lineno, "missing size line")


def read_mm_coordinate(path) -> sp.csr_matrix:
    """Read a coordinate MatrixMarket file, expanding the symmetric half."""
    path = Path(path)
    lines = _mm_lines(path)
    fmt, field, symmetry, lineno, size = _read_header(path, lines)
    if fmt != "coordinate":
        raise ParseError(path, 1, f"expected coordinate format, got {fmt}")
    if field not in ("pattern", "real", "integer"):
        raise ParseError(path, 1, f"unsupported field {field}")
    if symmetry not in ("symmetric", "general"):
        raise ParseError(path, 1, f"unsupported symmetry {symmetry}")
    try:
        nrows, ncols, nnz = (int(t) for t in size)
    except ValueError:
        raise ParseError(path, lineno, f"bad size line {' '.join(size)!r}") from None
    rows, cols, vals = [], [], []
    for lineno, raw in lines:
        if not raw.strip() or raw.lstrip().startswith("%"):
            continue
        tok = raw.split()
        want = 2 if field == "pattern" else 3
        if len(tok) != want:
            raise ParseError(path, lineno, f"expected {want} fields, got {len(tok)}")
        try:
            i, j = int(tok[0]), int(tok[1])
            val = 1.0 if field == "pattern" else float(tok[2])
        except ValueError:
            raise ParseError(path, lineno, f"unparsable entry {raw!r}") from None
        if not (1 <= i <= nrows and 1 <= j <= ncols):
            raise ParseError(path, lineno, f"index ({i}, {j}) outside {nrows}x{ncols}")
        rows.append(i - 1)
        cols.append(j - 1)
        vals.append(val)
    if len(vals) != nnz:
        raise ParseError(path, lineno, f"declared {nnz} entries, found {len(vals)}")
    rows, cols, vals = np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64), np.array(vals)
    if symmetry == "symmetric":
        off = rows != cols
        rows, cols, vals = (np.concatenate([rows, cols[off]]), np.concatenate([cols, rows[off]]),
                            np.concatenate([vals, vals[off]]))
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(nrows, ncols)).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat


def read_mm_array(path) -> np.ndarray:
    path = Path(path)
    lines = _mm_lines(path)
    fmt, field, symmetry, lineno, size = _read_header(path, lines)
    if fmt != "array" or symmetry != "general" or field not in ("real", "integer"):
        raise ParseError(path, 1, "expected 'array real general' MatrixMarket file")
    try:
        nrows, ncols = (int(t) for t in size)
    except ValueError:
        raise ParseError(path, lineno, f"bad size line {' '.join(size)!r}") from None
    vals = []
    for lineno, raw in lines:
        if not raw.strip() or raw.lstrip().startswith("%"):
            continue
        try:
            vals.append(float(raw))
        except ValueError:
            raise ParseError(path, lineno, f"unparsable value {raw!r}") from None
    if len(vals) != nrows * ncols:
        raise ParseError(path, lineno, f"declared {nrows * ncols} values, found {len(vals)}")
    return np.array(vals, dtype=np.float64).reshape((ncols, nrows)).T.copy()


def write_mm_coordinate(path, adjacency) -> None:
    """Write the upper triangle of a symmetric matrix (pattern if all ones)."""
    upper = sp.triu(sp.csr_matrix(adjacency)).tocoo()
    order = np.lexsort((upper.row, upper.col))
    rows, cols, vals = upper.row[order], upper.col[order], upper.data[order]
    pattern = bool(np.all(vals == 1.0))
    n, m = adjacency.shape
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate {'pattern' if pattern else 'real'} symmetric\n")
        fh.write(f"{n} {m} {len(vals)}\n")
        for i, j, v in zip(rows, cols, vals):
            # symmetric storage lists the lower triangle: row >= col
            if pattern:
                fh.write(f"{j + 1} {i + 1}\n")
            else:
                fh.write(f"{j + 1} {i + 1} {float(v)!r}\n")


def write_mm_array(path, features) -> None:
    x = np.asarray(features, dtype=np.float64)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("%%MatrixMarket matrix array real general\n")
        fh.write(f"{x.shape[0]} {x.shape[1]}\n")
        for v in x.T.ravel():
            fh.write(f"{float(v)!r}\n")


def read_features(path) -> np.ndarray:
    path = Path(path)
    with open(path, "r", encoding="ascii") as fh:
        first = fh.readline()
    if first.lower().startswith("%%matrixmarket"):
        return read_mm_array(path)
    rows = []
    with open(path, newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), 1):
            if not rec:
                continue
            try:
                rows.append([float(t) for t in rec])
            except ValueError:
                raise ParseError(path, lineno, "non-numeric CSV field") from None
            if len(rows[-1]) != len(rows[0]):
                raise ParseError(path, lineno, f"expected {len(rows[0])} columns, got {len(rows[-1])}")
    if not rows:
        raise ParseError(path, 1, "empty feature file")
    return np.array(rows, dtype=np.float64)


def read_labels(path) -> np.ndarray:
    """Read raw integer labels and remap them to 0..c-1 in sorted order."""
    path = Path(path)
    raw = []
    for lineno, line in _mm_lines(path):
        if not line.strip():
            continue
        try:
            raw.append(int(line.strip()))
        except ValueError:
            raise ParseError(path, lineno, f"not an integer label: {line!r}") from None
    _, labels = np.unique(np.array(raw, dtype=np.int64), return_inverse=True)
    return labels.astype(np.int64)


# -- manifest ---------------------------------------------------------------

def _manifest(path: Path) -> dict:
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise ManifestError(f"manifest not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ManifestError(f"{path}: manifest must be a JSON object")
    extra = set(doc) - MANIFEST_KEYS
    if extra:
        raise ManifestError(f"{path}: unknown keys {sorted(extra)}")
    for key in ("name", "num_clusters", "views"):
        if key not in doc:
            raise ManifestError(f"{path}: missing key {key!r}")
    if not isinstance(doc["views"], list) or not doc["views"]:
        raise ManifestError(f"{path}: 'views' must be a non-empty list")
    for i, entry in enumerate(doc["views"]):
        if not isinstance(entry, dict) or set(entry) != VIEW_KEYS:
            raise ManifestError(f"{path}: view {i} must have exactly keys {sorted(VIEW_KEYS)}")
    if not isinstance(doc["num_clusters"], int):
        raise ManifestError(f"{path}: num_clusters must be an integer")
    return doc


def load_dataset(manifest_path) -> MultiViewDataset:
    manifest_path = Path(manifest_path)
    if manifest_path.is_dir():
        manifest_path = manifest_path / "manifest.json"
    doc = _manifest(manifest_path)
    root = manifest_path.parent

    def resolve(rel):
        p = root / rel
        if not p.exists():
            raise ManifestError(f"{manifest_path}: referenced file does not exist: {rel}")
        return p

    graphs, feats = {}, {}
    views = []
    n = None
    for i, entry in enumerate(doc["views"]):
        gkey, fkey = entry["graph"], entry["features"]
        if gkey not in graphs:
            graphs[gkey] = read_mm_coordinate(resolve(gkey))
        if fkey not in feats:
            feats[fkey] = read_features(resolve(fkey))
        adj, x = graphs[gkey], feats[fkey]
        if adj.shape[0] != adj.shape[1]:
            raise ShapeError(f"view {i}: graph {gkey} is {adj.shape[0]}x{adj.shape[1]}, not square")
        if n is None:
            n = adj.shape[0]
        if adj.shape[0] != n:
            raise ShapeError(f"view {i}: graph {gkey} has {adj.shape[0]} nodes, expected {n}")
        if x.shape[0] != n:
            raise ShapeError(f"view {i}: features {fkey} have {x.shape[0]} rows but graph {gkey} has {n} nodes")
        views.append(View(adj, x))

    labels = None
    if doc.get("labels") is not None:
        labels = read_labels(resolve(doc["labels"]))
        if labels.shape[0] != n:
            raise ShapeError(f"labels file has {labels.shape[0]} entries, expected {n}")
    dataset = MultiViewDataset(n, views, doc["num_clusters"], labels, name=str(doc["name"]))
    problems = validate_dataset(dataset)
    if problems:
        raise DataError("; ".join(str(p) for p in problems))
    return dataset


def save_dataset(dataset: MultiViewDataset, directory) -> Path:
    """Write ``dataset`` to ``directory`` and return the manifest path.

    Views sharing an adjacency or feature object share one file.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    graph_files: List[Tuple[object, str]] = []
    feature_files: List[Tuple[object, str]] = []

    def file_for(obj, registry, stem, writer):
        for seen, name in registry:
            if seen is obj:
                return name
        name = f"{stem}_{len(registry)}.mtx"
        writer(directory / name, obj)
        registry.append((obj, name))
        return name

    entries = []
    for view in dataset.views:
        entries.append({
            "graph": file_for(view.adjacency, graph_files, "graph", write_mm_coordinate),
            "features": file_for(view.features, feature_files, "features", write_mm_array),
        })
    doc = {"name": dataset.name, "num_clusters": int(dataset.num_clusters), "views": entries}
    if dataset.labels is not None:
        (directory / "labels.txt").write_text("".join(f"{int(v)}\n" for v in dataset.labels))
        doc["labels"] = "labels.txt"
    path = directory / "manifest.json"
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


# -- synthetic data ---------------------------------------------------------

@dataclass(frozen=True)
class SbmConfig:
    """Planted-partition multi-view attributed graph.

    ``edge_probs`` holds one ``(p_in, p_out)`` pair per view and
    ``feature_dims`` one dimension per view.
    """

    blocks: Sequence[int] = (20, 20, 20)
    edge_probs: Sequence[Tuple[float, float]] = ((0.5, 0.02), (0.5, 0.02))
    feature_dims: Sequence[int] = (60, 60)
    separation: float = 3.0
    noise_std: float = 1.0
    seed: int = 0
    name: str = "sbm"

    def __post_init__(self):
        if not self.blocks or any(b < 1 for b in self.blocks):
            raise ValueError("block sizes must be >= 1")
        if len(self.edge_probs) != len(self.feature_dims) or not self.edge_probs:
            raise ValueError("need one (p_in, p_out) pair and one feature_dim per view")
        for p_in, p_out in self.edge_probs:
            if not 0 <= p_out <= p_in <= 1:
                raise ValueError(f"need 0 <= p_out <= p_in <= 1, got p_in={p_in}, p_out={p_out}")
        if any(d < 1 for d in self.feature_dims):
            raise ValueError("feature dims must be >= 1")
        if self.separation < 0 or self.noise_std < 0:
            raise ValueError("separation and noise_std must be non-negative")

    @property
    def num_views(self) -> int:
        return len(self.edge_probs)


def _block_means(rng, n_blocks, dim, separation):
    # orthonormal directions put every pair of means exactly `separation` apart
    if dim >= n_blocks:
        q, _ = np.linalg.qr(rng.standard_normal((dim, n_blocks)))
        return (separation / np.sqrt(2.0)) * q.T
    dirs = rng.standard_normal((n_blocks, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return (separation / 2.0) * dirs


def generate_sbm(config: SbmConfig) -> MultiViewDataset:
    rng = np.random.default_rng(config.seed)
    labels = np.repeat(np.arange(len(config.blocks)), config.blocks).astype(np.int64)
    n = labels.size
    same = labels[:, None] == labels[None, :]
    iu = np.triu_indices(n, k=1)
    views = []
    for (p_in, p_out), dim in zip(config.edge_probs, config.feature_dims):
        prob = np.where(same, p_in, p_out)[iu]
        hit = rng.random(prob.size) < prob
        upper = sp.coo_matrix((np.ones(hit.sum()), (iu[0][hit], iu[1][hit])), shape=(n, n))
        adj = (upper + upper.T).tocsr()
        means = _block_means(rng, len(config.blocks), dim, config.separation)
        x = means[labels] + config.noise_std * rng.standard_normal((n, dim))
        views.append(View(adj, x))
    return MultiViewDataset(n, views, len(config.blocks), labels, name=config.name)
