import os
import textwrap

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dctnet.errors import ArgumentError, DataError
from dctnet.features import FeatureCache, FeatureSpec, cache_key
from dctnet.harness import ExperimentConfig, load_config, run_experiment, stratified_split
from dctnet.plotting import emit_plot, feature_to_gray, read_pgm
from dctnet.signal_io import FeatureMatrix, load_manifest, parse_manifest


@given(counts=st.lists(st.integers(2, 30), min_size=2, max_size=5),
       frac=st.floats(0.1, 0.5), seed=st.integers(0, 1000))
@settings(max_examples=100, deadline=None)
def test_split_stratified_partition(counts, frac, seed):
    labels = np.repeat(np.arange(len(counts)), counts)
    train, test = stratified_split(labels, frac, seed)
    assert np.intersect1d(train, test).size == 0
    assert np.array_equal(np.union1d(train, test), np.arange(labels.size))
    for c, n_c in enumerate(counts):
        n_test = np.sum(labels[test] == c)
        assert abs(n_test - frac * n_c) <= 1
        assert 1 <= n_test < n_c


def test_split_needs_two_tracks_per_class():
    with pytest.raises(DataError):
        stratified_split(np.array([0, 0, 1]), 0.2, 0)


def test_split_depends_on_seed():
    labels = np.repeat([0, 1], 20)
    assert not np.array_equal(stratified_split(labels, 0.2, 0)[1],
                              stratified_split(labels, 0.2, 1)[1])


def mfsc_config(**kw):
    base = dict(feature=FeatureSpec("mfsc"), chunk_len=40, overlap=20, n_repeats=2)
    base.update(kw)
    return ExperimentConfig(**base)


def test_single_repeat_std_zero(small_corpus):
    report = run_experiment(mfsc_config(n_repeats=1), load_manifest(small_corpus))
    assert report.std == 0.0
    assert "std_track_acc\t0.000000" in report.to_text()


def test_report_deterministic(small_corpus):
    manifest = load_manifest(small_corpus)
    a = run_experiment(mfsc_config(), manifest).to_text()
    b = run_experiment(mfsc_config(), manifest, FeatureCache()).to_text()
    assert a == b
    assert "repeated stratified random track splits" in a


def test_report_layout(small_corpus):
    report = run_experiment(mfsc_config(), load_manifest(small_corpus))
    lines = report.to_text().splitlines()
    header = lines.index("repeat\tsplit_seed\tn_train\tn_test\ttrack_acc\ttrack_acc_vote\tchunk_acc")
    assert [ln.split("\t")[1] for ln in lines[header + 1:header + 3]] == ["0", "1"]
    assert all(r.n_test == 4 and r.n_train == 8 for r in report.repeats)
    assert report.confusion.sum() == 8


def test_extraction_failure_names_file(tmp_path, small_corpus):
    bad = tmp_path / "broken.wav"
    bad.write_bytes(b"RIFF\x00\x00\x00\x00WAVEjunk")
    with pytest.raises(DataError, match="broken.wav"):
        FeatureCache().get(str(bad), FeatureSpec("mfsc"))


def test_disk_cache_round_trip(tmp_path, small_corpus):
    manifest = load_manifest(small_corpus)
    path = manifest.resolve(manifest.entries[0][0])
    spec = FeatureSpec("erb")
    first = FeatureCache(str(tmp_path)).get(path, spec)
    assert len(os.listdir(tmp_path)) == 1
    assert FeatureCache(str(tmp_path)).get(path, spec) == first
    with open(path, "rb") as fh:
        audio = fh.read()
    assert cache_key(audio, spec) != cache_key(audio, FeatureSpec("mfsc"))


def test_config_from_toml(tmp_path):
    path = tmp_path / "exp.toml"
    path.write_text(textwrap.dedent("""
        [feature]
        kind = "lfsc"
        nfilters = 20

        [classifier]
        kind = "rnn"
        lambda = 0.5
        hidden = 16

        [experiment]
        n_repeats = 3
        agg = "vote"
    """))
    cfg = load_config(path)
    assert cfg.feature.kind == "lfsc" and cfg.feature.nfilters == 20
    assert cfg.classifier == "rnn" and cfg.params.lam == 0.5 and cfg.params.hidden == 16
    assert cfg.n_repeats == 3 and cfg.agg == "chunk_vote"


@pytest.mark.parametrize("body", ['[feature]\nbogus = 1\n', '[experiment]\nrepeats = 2\n',
                                  '[classifier]\nkind = "tree"\n', 'not toml ==='])
def test_config_errors(tmp_path, body):
    path = tmp_path / "bad.toml"
    path.write_text(body)
    with pytest.raises(ArgumentError):
        load_config(path)


def test_manifest_one_class_is_error(tmp_path):
    with pytest.raises(DataError):
        parse_manifest(["a.wav\tx", "b.wav\tx"], str(tmp_path))


def test_pgm_constant_is_128(tmp_path):
    emit_plot(FeatureMatrix(np.array([[3.5]])), tmp_path / "one.pgm")
    assert read_pgm(tmp_path / "one.pgm").tolist() == [[128]]


def test_pgm_linear_map(tmp_path):
    emit_plot(FeatureMatrix(np.array([[0.0, 1.0], [2.0, 3.0]])), tmp_path / "two.pgm")
    img = read_pgm(tmp_path / "two.pgm")
    assert sorted(img.ravel().tolist()) == [0, 85, 170, 255]
    assert (tmp_path / "two.pgm").read_bytes().startswith(b"P5\n2 2\n255\n")


def test_pgm_low_channels_at_bottom():
    img = feature_to_gray(np.array([[0.0, 10.0]]))
    assert img[:, 0].tolist() == [255, 0]


def test_chirp_ridge_monotone():
    from dctnet.adaptive import adctnet_two_layer, default_layers
    from dctnet.signal_io import Signal
    from dctnet.stdct import log_compress
    fs = 44100.0
    t = np.arange(int(2.5 * fs)) / fs
    f = 300 * (4000 / 300) ** (t / t[-1])
    x = np.sin(2 * np.pi * np.cumsum(f) / fs)
    l1, l2 = default_layers(fs)
    img = feature_to_gray(log_compress(adctnet_two_layer(Signal(x, fs), l1, l2)).data)
    ridge = img.shape[0] - 1 - np.argmax(img, axis=0)
    assert np.all(np.diff(ridge) >= 0) and ridge[-1] > ridge[0]


def test_epoch_default_per_classifier():
    assert ExperimentConfig(classifier="svm").params.epochs == 10
    assert ExperimentConfig(classifier="rnn").params.epochs == 100
