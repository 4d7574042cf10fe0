"""Adaptive (constant-Q) short-time DCT and the two-layer A-DCTNet feature.

Channel k is the windowed cosine h_k(n) cos(2 pi f_k (n + 1/2) / fs) with a
window of N_k = round(Q fs / f_k) samples. All filters of a bank share one
analysis span (the longest filter) and are centered inside it, so every
channel of frame m describes the same instant.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, TooShortError
from .filterbanks import (
    FilterBank,
    WINDOW_KINDS,
    cq_frequency_grid,
    cq_window_lengths,
    make_window,
)
from .signal_io import FeatureMatrix, Signal
from .stdct import LayeredTensor, apply_kernels, apply_kernels_rows, pool_energy


@dataclass(frozen=True)
class AdctConfig:
    grid: object
    fs: float
    hop: int = 128
    window: str = "hamming"
    min_len: int = 16
    max_len: int = 4096
    normalize: bool = True

    def __post_init__(self):
        if self.hop < 1:
            raise ArgumentError(f"hop must be >= 1, got {self.hop}")
        if self.window not in WINDOW_KINDS:
            raise ArgumentError(f"unknown window kind {self.window!r}")
        if np.any(self.grid.freqs >= self.fs / 2.0):
            raise ArgumentError(
                f"grid reaches {self.grid.freqs.max():.1f} Hz, at or above "
                f"Nyquist {self.fs / 2.0:.1f} Hz")

    @classmethod
    def from_band(cls, f0, f_max, b, fs, **kwargs):
        return cls(cq_frequency_grid(f0, f_max, b, fs), fs, **kwargs)

    @property
    def lengths(self):
        return cq_window_lengths(self.grid, self.fs, self.min_len, self.max_len)

    @property
    def span(self):
        return int(self.lengths.max())


def adaptive_filterbank(cfg):
    """Windowed cosines at the grid frequencies, one window length per bin.

    With ``cfg.normalize`` every window is rescaled to the coefficient sum of
    the shortest one, so long low-frequency filters do not win on length.
    """
    lengths = cfg.lengths
    windows = [make_window(cfg.window, n) for n in lengths]
    if cfg.normalize:
        ref = windows[int(np.argmin(lengths))].sum()
        windows = [w * (ref / w.sum()) for w in windows]
    filters = []
    for f, w in zip(cfg.grid.freqs, windows):
        n = np.arange(w.shape[0])
        filters.append(w * np.cos(2.0 * np.pi * f * (n + 0.5) / cfg.fs))
    return FilterBank(tuple(filters), cfg.grid.freqs.copy(), lengths,
                      cfg.grid.q_factor)


def _samples(x):
    if isinstance(x, Signal):
        return x.samples
    return np.asarray(x, dtype=np.float64)


def adaptive_stdct(x, cfg, method="auto"):
    """Constant-Q short-time DCT, one column per grid frequency."""
    samples = _samples(x)
    kernels = adaptive_filterbank(cfg).as_matrix(cfg.span)
    if samples.shape[0] < cfg.span:
        raise TooShortError(
            f"adaptive STDCT needs at least {cfg.span} samples, got {samples.shape[0]}",
            required=cfg.span, actual=samples.shape[0])
    out = apply_kernels(samples, kernels, cfg.hop, "valid", method)
    return FeatureMatrix(out, cfg.hop, cfg.grid.freqs)


def _check_layers(layer1, layer2):
    row_rate = layer1.fs / layer1.hop
    if np.any(layer2.grid.freqs >= row_rate / 2.0):
        raise ArgumentError(
            f"layer-2 grid reaches {layer2.grid.freqs.max():.1f} Hz but first-layer rows "
            f"are sampled at {row_rate:.1f} Hz (Nyquist {row_rate / 2.0:.1f} Hz); "
            "lower the layer-2 f_max or the layer-1 hop")
    if not np.isclose(layer2.fs, row_rate, rtol=1e-12, atol=0.0):
        raise ArgumentError(
            f"layer-2 fs={layer2.fs} must equal the first-layer row rate "
            f"fs/hop1={row_rate}")


def adctnet_forward(x, layer1, layer2, method="auto"):
    """Second-layer tensor X(m, k1, k2) before pooling."""
    _check_layers(layer1, layer2)
    samples = _samples(x)
    try:
        first = adaptive_stdct(samples, layer1, method).data
    except TooShortError as exc:
        raise TooShortError(f"layer 1: {exc}", exc.required, exc.actual) from None
    if first.shape[0] < layer2.span:
        needed = (layer2.span - 1) * layer1.hop + layer1.span
        raise TooShortError(
            f"layer 2: {first.shape[0]} first-layer frames, needs {layer2.span}; "
            f"signal must have at least {needed} samples",
            required=needed, actual=samples.shape[0])
    kernels = adaptive_filterbank(layer2).as_matrix(layer2.span)
    second = apply_kernels_rows(first, kernels, layer2.hop, "valid", method)
    return LayeredTensor(second, layer1.hop * layer2.hop,
                         layer1.grid.freqs, layer2.grid.freqs)


def adctnet_two_layer(x, layer1, layer2, method="auto"):
    """Pooled A-DCTNet feature F(m, k2); columns carry layer-2 frequencies."""
    return pool_energy(adctnet_forward(x, layer1, layer2, method))


def min_signal_length(layer1, layer2):
    return (layer2.span - 1) * layer1.hop + layer1.span


def default_layers(fs, f0=40.0, f_max=5500.0, b1=12, b2=6, hop1=1, hop2=1024,
                 window="hamming", min_len=16, max_len=4096, max_len2=None):
    """Both layer configs over the same band, f_max clamped to 0.45 * row rate."""
    f_max1 = min(f_max, 0.45 * fs)
    layer1 = AdctConfig.from_band(f0, f_max1, b1, fs, hop=hop1, window=window,
                                  min_len=min_len, max_len=max_len)
    row_rate = fs / hop1
    f_max2 = min(f_max, 0.45 * row_rate)
    layer2 = AdctConfig.from_band(f0, f_max2, b2, row_rate, hop=hop2, window=window,
                                  min_len=min_len,
                                  max_len=max_len if max_len2 is None else max_len2)
    return layer1, layer2
