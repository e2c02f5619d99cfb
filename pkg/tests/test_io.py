import json

import numpy as np
import pytest
import scipy.sparse as sp

from mcgc.errors import DataError, ManifestError, ParseError, ShapeError
from mcgc.io import (SbmConfig, generate_sbm, load_dataset, read_features, read_labels,
                     read_mm_coordinate, save_dataset)
from mcgc.model import MultiViewDataset, View, validate_dataset

GRAPH_A = """%%MatrixMarket matrix coordinate pattern symmetric
% path 1-2-3
3 3 2
2 1
3 2
"""
GRAPH_B = """%%MatrixMarket matrix coordinate real symmetric
3 3 1
3 1 2.5
"""
FEATURES = """%%MatrixMarket matrix array real general
3 2
1.0
2.0
3.0
-1.5
0.25
1e-3
"""


def write_fixture(root, labels="7\n7\n9\n", features=FEATURES, extra=None):
    (root / "a.mtx").write_text(GRAPH_A)
    (root / "b.mtx").write_text(GRAPH_B)
    (root / "x.mtx").write_text(features)
    doc = {"name": "tiny", "num_clusters": 2,
           "views": [{"graph": "a.mtx", "features": "x.mtx"}, {"graph": "b.mtx", "features": "x.mtx"}]}
    if labels is not None:
        (root / "y.txt").write_text(labels)
        doc["labels"] = "y.txt"
    doc.update(extra or {})
    (root / "manifest.json").write_text(json.dumps(doc))
    return root / "manifest.json"


def test_load_fixture(tmp_path):
    ds = load_dataset(write_fixture(tmp_path))
    assert ds.num_nodes == 3 and ds.num_views == 2 and ds.name == "tiny"
    np.testing.assert_array_equal(ds.views[0].adjacency.toarray(), [[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    np.testing.assert_array_equal(ds.views[1].adjacency.toarray(), [[0, 0, 2.5], [0, 0, 0], [2.5, 0, 0]])
    np.testing.assert_array_equal(ds.views[0].features, [[1.0, -1.5], [2.0, 0.25], [3.0, 1e-3]])
    assert ds.views[0].features is ds.views[1].features
    assert ds.labels.tolist() == [0, 0, 1]
    assert validate_dataset(ds) == []


def test_load_directory_path(tmp_path):
    write_fixture(tmp_path)
    assert load_dataset(tmp_path).num_nodes == 3


def test_feature_rows_mismatch_names_both_dimensions(tmp_path):
    four_rows = "%%MatrixMarket matrix array real general\n4 1\n1\n2\n3\n4\n"
    with pytest.raises(ShapeError, match=r"4 rows.*3 nodes"):
        load_dataset(write_fixture(tmp_path, features=four_rows))


def test_label_remap(tmp_path):
    p = tmp_path / "y.txt"
    p.write_text("5\n2\n9\n2\n")
    assert read_labels(p).tolist() == [1, 0, 2, 0]


def test_csv_features(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("1,2\n3,4.5\n")
    np.testing.assert_array_equal(read_features(p), [[1, 2], [3, 4.5]])


def test_parse_error_reports_line(tmp_path):
    p = tmp_path / "g.mtx"
    p.write_text("%%MatrixMarket matrix coordinate pattern symmetric\n3 3 2\n2 1\n4 1\n")
    with pytest.raises(ParseError) as info:
        read_mm_coordinate(p)
    assert info.value.line == 4


def test_unknown_manifest_key(tmp_path):
    with pytest.raises(ManifestError, match="unknown keys"):
        load_dataset(write_fixture(tmp_path, extra={"lables": "y.txt"}))


def test_missing_referenced_file(tmp_path):
    path = write_fixture(tmp_path)
    (tmp_path / "b.mtx").unlink()
    with pytest.raises(ManifestError, match="b.mtx"):
        load_dataset(path)


def test_invalid_graph_rejected(tmp_path):
    bad = "%%MatrixMarket matrix coordinate pattern general\n3 3 1\n2 1\n"
    (tmp_path / "a.mtx").write_text(bad)
    path = write_fixture(tmp_path)
    (tmp_path / "a.mtx").write_text(bad)
    with pytest.raises(DataError, match="asymmetric"):
        load_dataset(path)


def _assert_same(a, b):
    assert a.num_nodes == b.num_nodes and a.num_clusters == b.num_clusters and a.name == b.name
    for va, vb in zip(a.views, b.views):
        assert (va.adjacency != vb.adjacency).nnz == 0
        np.testing.assert_allclose(va.features, vb.features, rtol=0, atol=1e-12)
    if a.labels is None:
        assert b.labels is None
    else:
        assert np.array_equal(a.labels, b.labels)


def test_round_trip_sbm(tmp_path):
    ds = generate_sbm(SbmConfig(seed=3, feature_dims=(4, 7)))
    _assert_same(ds, load_dataset(save_dataset(ds, tmp_path)))


def test_round_trip_weighted_and_shared(tmp_path, rng):
    upper = sp.triu(sp.random(6, 6, density=0.5, random_state=1), k=1)
    g = sp.csr_matrix(upper + upper.T)
    x = rng.standard_normal((6, 3)) * 1e-7
    ds = MultiViewDataset(6, [View(g, x), View(g, rng.standard_normal((6, 2)))], 2, name="w")
    path = save_dataset(ds, tmp_path)
    doc = json.loads(path.read_text())
    assert doc["views"][0]["graph"] == doc["views"][1]["graph"]
    assert doc["views"][0]["features"] != doc["views"][1]["features"]
    assert "labels" not in doc
    back = load_dataset(path)
    _assert_same(ds, back)
    np.testing.assert_array_equal(back.views[0].features, x)  # repr() keeps every bit


def test_sbm_two_cliques():
    ds = generate_sbm(SbmConfig(blocks=(3, 4), edge_probs=((1.0, 0.0),), feature_dims=(2,)))
    a = ds.views[0].adjacency.toarray()
    same = ds.labels[:, None] == ds.labels[None, :]
    assert np.array_equal(a, (same & ~np.eye(7, dtype=bool)).astype(float))


def test_sbm_deterministic_and_valid():
    cfg = SbmConfig(seed=11)
    a, b = generate_sbm(cfg), generate_sbm(cfg)
    _assert_same(a, b)
    assert validate_dataset(a) == []
    for v in a.views:
        adj = v.adjacency
        assert (adj != adj.T).nnz == 0 and adj.diagonal().sum() == 0


def test_sbm_block_means_are_separated():
    ds = generate_sbm(SbmConfig(seed=0, noise_std=0.0, separation=3.0, feature_dims=(5, 5)))
    x, y = ds.views[0].features, ds.labels
    means = np.array([x[y == b][0] for b in range(3)])
    d = np.linalg.norm(means[:, None] - means[None], axis=-1)
    np.testing.assert_allclose(d[~np.eye(3, dtype=bool)], 3.0, rtol=1e-12)


def test_sbm_without_separation_has_no_feature_signal():
    ds = generate_sbm(SbmConfig(seed=0, separation=0.0))
    x, y = ds.views[0].features, ds.labels
    assert np.abs(np.array([x[y == b].mean(0) for b in range(3)])).max() < 1.0


def test_sbm_config_validation():
    with pytest.raises(ValueError):
        SbmConfig(edge_probs=((0.1, 0.9),), feature_dims=(2,))
    with pytest.raises(ValueError):
        SbmConfig(blocks=(0, 3))
