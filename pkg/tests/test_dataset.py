import collections
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavids import dataset as ds
from uavids.errors import (
    AllNullColumnError,
    DataError,
    MissingFileError,
    MissingLabelColumnError,
    RaggedRowError,
    UnknownLabelError,
)


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_csv_basic(tmp_path):
    t = ds.load_csv(write(tmp_path, "a,b,label\n1,2,Benign\n3,,Replay\n"), "label")
    assert t.column_names == ["a", "b", "label"]
    assert t.n_rows == 2
    assert t.rows[1][1] is None


def test_load_csv_errors(tmp_path):
    with pytest.raises(MissingFileError):
        ds.load_csv(tmp_path / "nope.csv")
    with pytest.raises(RaggedRowError) as err:
        ds.load_csv(write(tmp_path, "a,Label\n1,Benign\n1,2,Benign\n"))
    assert err.value.line == 3
    assert "line 3" in str(err.value)
    with pytest.raises(MissingLabelColumnError):
        ds.load_csv(write(tmp_path, "a,b\n1,2\n"))


def test_drop_columns(tmp_path):
    cols = ["frame.number", "wlan.bssid", "timestamp_c"] + [f"f{i}" for i in range(54)] + ["Label"]
    t = ds.RawTable(cols, [["0"] * 57 + ["Benign"]])
    out = ds.drop_columns(t, ds.DEFAULT_DROP)
    assert len(out.column_names) - 1 == 54
    assert out.n_rows == 1
    assert ds.drop_columns(t, []) == t
    with pytest.warns(UserWarning, match="not present"):
        same = ds.drop_columns(t, ["missing"])
    assert same.column_names == cols


def test_impute_median():
    t = ds.RawTable(["x", "y", "Label"], [["1", "5", "Benign"], [None, None, "Benign"], ["3", None, "Benign"], ["2", "5", "Benign"]])
    X, params = ds.impute_fit_apply(t)
    # column x: median of {1, 3, 2} = 2; column y: constant 5
    assert X[:, 0].tolist() == [1, 2, 3, 2]
    assert X[:, 1].tolist() == [5, 5, 5, 5]
    assert params.fill.tolist() == [2, 5]
    assert params.null_counts.tolist() == [1, 2]


def test_impute_spec_example():
    X, params = ds.impute_fit_apply(np.array([[1.0], [np.nan], [3.0]]))
    assert X.ravel().tolist() == [1, 2, 3] and params.fill[0] == 2


def test_impute_no_nulls_is_identity():
    X = np.arange(6.0).reshape(3, 2)
    out, params = ds.impute_fit_apply(X)
    np.testing.assert_array_equal(out, X)
    assert params.null_counts.tolist() == [0, 0]


def test_impute_all_null_column():
    with pytest.raises(AllNullColumnError, match="'b'"):
        ds.impute_fit_apply(np.array([[1.0, np.nan], [2.0, np.nan]]), ["a", "b"])


def test_categorical_coding_first_appearance():
    t = ds.RawTable(["p", "Label"], [["udp", "Benign"], ["tcp", "Benign"], ["udp", "Benign"], [None, "Benign"]])
    X, names, maps = ds.code_features(t)
    assert maps == {"p": {"udp": 0, "tcp": 1}}
    assert X[:3, 0].tolist() == [0, 1, 0] and np.isnan(X[3, 0])


def test_encode_labels():
    ids, names = ds.encode_labels(["Benign", "Replay"], "binary")
    assert ids.tolist() == [0, 1] and names == ["Benign", "Attack"]
    ids, names = ds.encode_labels(["Replay", "FDI", "Benign", "Evil Twin", "De-Authentication"], "multiclass")
    assert sorted(ids.tolist()) == [0, 1, 2, 3, 4]
    assert names == ["Benign", "De-Authentication", "Evil Twin", "FDI", "Replay"]
    assert ds.encode_labels(["benign"], "binary")[0].tolist() == [0]


@pytest.mark.parametrize(
    "raw,canon",
    [
        ("DoS", "De-Authentication"),
        ("de-authentication", "De-Authentication"),
        ("False Data Injection", "FDI"),
        ("evil_twin", "Evil Twin"),
        ("REPLAY attack", "Replay"),
        (" Benign ", "Benign"),
    ],
)
def test_canonical_aliases(raw, canon):
    assert ds.canonical_label(raw) == canon


def test_unknown_label():
    with pytest.raises(UnknownLabelError, match="'Botnet'"):
        ds.encode_labels(["Benign", "Botnet"])


def test_scaler():
    train = ds.FeatureTable(np.array([[2.0, 7.0], [4.0, 7.0], [6.0, 7.0]]), ["a", "b"], [0, 0, 0], ["Benign"])
    params = ds.fit_scaler(train)
    out = ds.apply_scaler(params, train).features
    assert out[:, 0].tolist() == [0.0, 0.5, 1.0]
    assert out[:, 1].tolist() == [0.0, 0.0, 0.0]
    test = ds.FeatureTable(np.array([[10.0, 8.0], [-3.0, 1.0]]), ["a", "b"], [0, 0], ["Benign"])
    assert ds.apply_scaler(params, test).features.tolist() == [[1.0, 0.0], [0.0, 0.0]]


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 30), st.integers(1, 5), st.integers(0, 10**6))
def test_scaled_training_data_in_unit_interval(n, d, seed):
    X = np.random.default_rng(seed).normal(scale=100, size=(n, d))
    t = ds.FeatureTable(X, [str(j) for j in range(d)], np.zeros(n), ["Benign"])
    out = ds.apply_scaler(ds.fit_scaler(t), t).features
    assert out.min() >= 0.0 and out.max() <= 1.0


def test_split_balanced():
    labels = np.repeat([0, 1], 50)
    t = ds.FeatureTable(np.arange(100.0)[:, None], ["x"], labels, ["Benign", "Attack"])
    s = ds.stratified_split(t, 0.8, 9)
    assert s.train.n_rows == 80 and s.test.n_rows == 20
    assert collections.Counter(s.train.labels.tolist()) == {0: 40, 1: 40}
    s2 = ds.stratified_split(t, 0.8, 9)
    np.testing.assert_array_equal(s.train_idx, s2.train_idx)


def test_split_needs_two_per_class():
    t = ds.FeatureTable(np.zeros((3, 1)), ["x"], [0, 0, 1], ["a", "b"])
    with pytest.raises(DataError):
        ds.stratified_split(t, 0.5, 1)


def test_split_at_dataset_scale():
    labels = np.random.default_rng(0).choice(5, 42_000, p=[0.4, 0.15, 0.15, 0.15, 0.15])
    tr, te = ds.split_indices(labels, 0.8, 1337)
    assert abs(tr.size - 33_600) <= 5
    assert tr.size + te.size == 42_000


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=2, max_size=80), st.floats(0.05, 0.95), st.integers(0, 2**32))
def test_split_partition_properties(labels, ratio, seed):
    labels = np.array(labels)
    counts = collections.Counter(labels.tolist())
    if min(counts.values()) < 2:
        return
    tr, te = ds.split_indices(labels, ratio, seed)
    assert np.intersect1d(tr, te).size == 0
    assert sorted(np.concatenate([tr, te]).tolist()) == list(range(labels.size))
    for c, total in counts.items():
        assert abs(np.sum(labels[tr] == c) - ratio * total) <= 1


def test_class_proportions():
    assert ds.class_proportions([0, 0, 1, 1]) == {0: 0.5, 1: 0.5}
    assert ds.class_proportions([3]) == {3: 1.0}
    labels = np.random.default_rng(5).integers(0, 5, 1000)
    props = ds.class_proportions(labels)
    for c in range(5):
        assert props[c] == sum(1 for v in labels if v == c) / 1000
    assert abs(sum(props.values()) - 1.0) <= 1e-12


def _raw_csv(tmp_path):
    rows = ["frame.number,wlan.bssid,timestamp_c,len,proto,rate,Label"]
    names = ["Benign", "DoS", "Replay", "evil_twin", "FDI"]
    r = np.random.default_rng(0)
    for i in range(50):
        rate = "" if i % 7 == 0 else f"{r.normal():.4f}"
        rows.append(f"{i},aa:bb,{i * 0.1:.1f},{r.integers(40, 1500)},{'tcp' if i % 3 else 'udp'},{rate},{names[i % 5]}")
    return write(tmp_path, "\n".join(rows) + "\n")


def test_preprocess_end_to_end(tmp_path):
    raw = ds.load_csv(_raw_csv(tmp_path))
    pre = ds.preprocess(raw, ratio=0.8, seed=3)
    assert pre.split.train.feature_names == ["len", "proto", "rate"]
    assert pre.dropped == list(ds.DEFAULT_DROP)
    assert pre.split.train.n_rows + pre.split.test.n_rows == 50
    assert np.all((pre.split.train.features >= 0) & (pre.split.train.features <= 1))
    assert not np.isnan(pre.split.test.features).any()
    # medians come from training rows only
    coded, _, _ = ds.code_features(ds.drop_columns(raw, ds.DEFAULT_DROP))
    expected = np.nanmedian(coded[pre.split.train_idx, 2])
    assert pre.impute.fill[2] == expected

    again = ds.preprocess(ds.load_csv(_raw_csv(tmp_path)), ratio=0.8, seed=3)
    assert again.split.train.features.tobytes() == pre.split.train.features.tobytes()
    assert again.split.test.features.tobytes() == pre.split.test.features.tobytes()


def test_feature_csv_and_sidecar_roundtrip(tmp_path):
    raw = ds.load_csv(_raw_csv(tmp_path))
    pre = ds.preprocess(raw, seed=11)
    ds.write_feature_csv(tmp_path / "train.csv", pre.split.train)
    ds.write_sidecar(tmp_path / "params.json", pre)
    side = json.loads((tmp_path / "params.json").read_text())
    back = ds.read_feature_csv(tmp_path / "train.csv", side["class_names"])
    assert back.features.tobytes() == pre.split.train.features.tobytes()
    assert back.labels.tolist() == pre.split.train.labels.tolist()
    # sidecar replays the exact transform on the raw rows
    replayed = ds.replay(raw, side)
    np.testing.assert_array_equal(replayed.features[pre.split.train_idx], pre.split.train.features)
    np.testing.assert_array_equal(replayed.features[pre.split.test_idx], pre.split.test.features)
