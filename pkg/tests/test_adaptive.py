import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dctnet.adaptive import (
    AdctConfig,
    adaptive_filterbank,
    adaptive_stdct,
    adctnet_forward,
    adctnet_two_layer,
    default_layers,
    min_signal_length,
)
from dctnet.baselines import filterbank_feature
from dctnet.errors import ArgumentError, TooShortError
from dctnet.filterbanks import make_window
from dctnet.selftest import linear_grid_config
from dctnet.signal_io import Signal
from dctnet.stdct import StdctConfig, log_compress, short_time_dct

FS = 44100.0


@pytest.fixture(scope="module")
def band_cfg():
    return AdctConfig.from_band(40, 5500, 12, FS, hop=256)


def test_zero_input(band_cfg):
    out = adaptive_stdct(np.zeros(band_cfg.span + 1000), band_cfg)
    assert not out.data.any()


def test_85_columns(band_cfg):
    out = adaptive_stdct(np.zeros(5000), band_cfg)
    assert out.data.shape[1] == 85
    np.testing.assert_array_equal(out.channel_freqs, band_cfg.grid.freqs)


def test_tone_tracking_interior(band_cfg):
    freqs = band_cfg.grid.freqs
    n = np.arange(band_cfg.span + 4 * 256)
    hits = 0
    interior = range(1, len(freqs) - 1)
    for j in interior:
        x = np.cos(2 * np.pi * freqs[j] * n / FS)
        energy = np.square(adaptive_stdct(x, band_cfg).data).sum(axis=0)
        hits += int(np.argmax(energy)) == j
    assert hits / len(interior) >= 0.95


def test_brute_force_single_channel(rng):
    cfg = AdctConfig.from_band(300, 3000, 4, 8000.0, hop=7, min_len=8, max_len=64)
    x = rng.standard_normal(400)
    bank = adaptive_filterbank(cfg)
    span = cfg.span
    out = adaptive_stdct(x, cfg, method="direct").data
    for k, h in enumerate(bank.filters):
        off = (span - h.shape[0]) // 2
        for m in (0, 5, out.shape[0] - 1):
            ref = sum(x[m * 7 + off + i] * h[i] for i in range(h.shape[0]))
            assert out[m, k] == pytest.approx(ref, abs=1e-12)


def test_normalized_window_sums_equal():
    cfg = AdctConfig.from_band(40, 5500, 12, FS)
    raw = adaptive_filterbank(AdctConfig.from_band(40, 5500, 12, FS, normalize=False))
    norm = adaptive_filterbank(cfg)
    assert cfg.lengths[0] == 4096 and cfg.lengths[-1] < cfg.lengths[0]
    sums = []
    for k, n in enumerate(cfg.lengths):
        scale = np.dot(norm.filters[k], raw.filters[k]) / np.dot(raw.filters[k], raw.filters[k])
        sums.append(scale * make_window("hamming", n).sum())
    assert np.ptp(sums) / sums[-1] < 1e-12


def test_too_short_names_length(band_cfg):
    with pytest.raises(TooShortError, match=str(band_cfg.span)):
        adaptive_stdct(np.zeros(100), band_cfg)


@given(seed=st.integers(0, 2 ** 31), a=st.floats(-3, 3), b=st.floats(-3, 3))
@settings(max_examples=25, deadline=None)
def test_linear_in_input(seed, a, b):
    cfg = AdctConfig.from_band(200, 3000, 6, 8000.0, hop=16, max_len=128)
    x, y = np.random.default_rng(seed).standard_normal((2, 600))
    lhs = adaptive_stdct(a * x + b * y, cfg).data
    rhs = a * adaptive_stdct(x, cfg).data + b * adaptive_stdct(y, cfg).data
    assert np.max(np.abs(lhs - rhs)) < 1e-10


@pytest.mark.parametrize("n,hop,window", [(64, 16, "hamming"), (32, 32, "rectangular"),
                                          (48, 5, "hann")])
def test_reduction_to_linear(rng, n, hop, window):
    x = rng.standard_normal(1500)
    lin = short_time_dct(x, StdctConfig(n, hop, window), method="direct").data
    ada = adaptive_stdct(x, linear_grid_config(n, 8000.0, hop, window), method="direct").data
    assert np.max(np.abs(lin - ada)) / max(1.0, np.max(np.abs(lin))) < 1e-12


def small_layers():
    l1 = AdctConfig.from_band(200, 3000, 4, 8000.0, hop=1, max_len=64)
    l2 = AdctConfig.from_band(200, 3000, 3, 8000.0, hop=40, max_len=64)
    return l1, l2


def test_two_layer_zero_and_nonnegative(rng):
    l1, l2 = small_layers()
    assert not adctnet_two_layer(np.zeros(600), l1, l2).data.any()
    out = adctnet_two_layer(rng.standard_normal(600), l1, l2).data
    assert out.shape[1] == l2.grid.K and np.all(out >= 0)


def test_two_layer_composition(rng):
    l1, l2 = small_layers()
    x = rng.standard_normal(700)
    t = adctnet_forward(x, l1, l2).data
    first = adaptive_stdct(x, l1, method="direct").data
    for k1 in range(first.shape[1]):
        row = adaptive_stdct(first[:, k1], l2, method="direct").data
        assert np.max(np.abs(t[:, k1, :] - row)) <= 1e-12 * max(1.0, np.max(np.abs(row)))


def test_layer_two_nyquist_error():
    l1 = AdctConfig.from_band(40, 5500, 12, FS, hop=128)
    l2 = AdctConfig.from_band(40, 5500, 6, FS, hop=16)
    with pytest.raises(ArgumentError, match="lower the layer-2 f_max or the layer-1 hop"):
        adctnet_two_layer(np.zeros(100000), l1, l2)


def test_layer_two_rate_mismatch():
    l1 = AdctConfig.from_band(200, 3000, 4, 8000.0, hop=2)
    l2 = AdctConfig.from_band(100, 1500, 3, 8000.0, hop=4)
    with pytest.raises(ArgumentError, match="row rate"):
        adctnet_two_layer(np.zeros(5000), l1, l2)


def test_default_layers_geometry():
    l1, l2 = default_layers(FS)
    assert (l1.grid.K, l2.grid.K) == (85, 42)
    assert min_signal_length(l1, l2) == (l2.span - 1) * l1.hop + l1.span
    with pytest.raises(TooShortError):
        adctnet_two_layer(np.zeros(min_signal_length(l1, l2) - 1), l1, l2)


def bass_heavy_excerpt(fs=FS, seconds=1.5, seed=5):
    """Arpeggio of low notes under a quieter upper line, like a keyboard bass."""
    rng = np.random.default_rng(seed)
    t = np.arange(int(fs * seconds)) / fs
    x = np.zeros_like(t)
    notes = [65.41, 82.41, 98.0, 130.81, 110.0, 87.31]
    step = t.shape[0] // len(notes)
    for i, f in enumerate(notes):
        seg = slice(i * step, (i + 1) * step)
        env = np.exp(-3 * (t[seg] - t[seg][0]))
        for h in (1, 2, 3):
            x[seg] += env * np.sin(2 * np.pi * h * f * t[seg]) / h
        x[seg] += 0.2 * env * np.sin(2 * np.pi * 8 * f * t[seg])
    return x + 1e-3 * rng.standard_normal(t.shape[0])


def low_mass(image):
    """Share of (shifted-positive) log energy in channels below the median channel."""
    img = image - image.min()
    half = img.shape[1] // 2
    return img[:, :half].sum() / img.sum()


def test_low_frequency_mass_exceeds_mfsc():
    x = Signal(bass_heavy_excerpt(), FS)
    l1, l2 = default_layers(FS)
    ada = log_compress(adctnet_two_layer(x, l1, l2)).data
    mel = filterbank_feature(x, "mel", 40, 0.0, 5500.0).data
    assert low_mass(ada) > low_mass(mel)
