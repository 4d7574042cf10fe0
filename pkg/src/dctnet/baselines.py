"""Spectrogram and triangular-filterbank baselines: MFSC, LFSC and ERB-rate.

Protocol: Hamming window of 256 samples, hop 128, 40 triangular filters,
log energies stacked frame by frame.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ArgumentError, TooShortError
from .filterbanks import make_window
from .signal_io import FeatureMatrix, Signal

SCALES = ("mel", "linear", "erb")
LOG_FLOOR = 1e-10


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def hz_to_erb(f):
    """Glasberg-Moore ERB-rate (ERB number) of a frequency in Hz."""
    return 21.4 * np.log10(1.0 + 0.00437 * np.asarray(f, dtype=np.float64))


def erb_to_hz(e):
    return (10.0 ** (np.asarray(e, dtype=np.float64) / 21.4) - 1.0) / 0.00437


_WARPS = {
    "mel": (hz_to_mel, mel_to_hz),
    "linear": (lambda f: np.asarray(f, dtype=np.float64),
               lambda f: np.asarray(f, dtype=np.float64)),
    "erb": (hz_to_erb, erb_to_hz),
}


def warp(scale, f):
    return _WARPS[scale][0](f)


def unwarp(scale, v):
    return _WARPS[scale][1](v)


def power_spectrogram(x, win_len=256, hop=128, window="hamming"):
    """|rfft(h * frame)|**2, one row per frame, win_len // 2 + 1 columns."""
    if isinstance(x, Signal):
        samples, fs = x.samples, x.sample_rate
    else:
        samples, fs = np.asarray(x, dtype=np.float64), None
    if samples.shape[0] < win_len:
        raise TooShortError(
            f"spectrogram needs {win_len} samples, got {samples.shape[0]}",
            required=win_len, actual=samples.shape[0])
    h = make_window(window, win_len)
    frames = sliding_window_view(samples, win_len)[::hop] * h
    spec = np.abs(np.fft.rfft(frames, axis=1)) ** 2
    freqs = None if fs is None else np.arange(spec.shape[1]) * fs / win_len
    return FeatureMatrix(spec, hop, freqs)


@dataclass(frozen=True)
class TriFilterBank:
    weights: np.ndarray
    scale: str
    centers: np.ndarray
    band: tuple

    @property
    def n_filters(self):
        return self.weights.shape[0]

    @property
    def n_bins(self):
        return self.weights.shape[1]


def make_tri_filterbank(scale, n_filters=40, f_min=0.0, f_max=None, fs=44100, n_bins=129):
    """Peak-1 triangles with centers equally spaced on the warped axis.

    Each triangle rises from the previous center and falls to the next one.
    A triangle too narrow to cover any bin center keeps weight 1.0 on the
    bin nearest its center.
    """
    if scale not in SCALES:
        raise ArgumentError(f"scale must be one of {SCALES}, got {scale!r}")
    f_max = fs / 2.0 if f_max is None else float(f_max)
    if not 0.0 <= f_min < f_max <= fs / 2.0:
        raise ArgumentError(f"need 0 <= f_min < f_max <= fs/2, got {f_min}, {f_max}")
    if n_filters < 1 or n_bins < 2:
        raise ArgumentError("need at least one filter and two bins")
    edges = unwarp(scale, np.linspace(warp(scale, f_min), warp(scale, f_max),
                                      n_filters + 2))
    if not np.all(np.diff(edges) > 0):
        raise ArgumentError(
            f"{n_filters + 2} band edges are not distinct in [{f_min}, {f_max}] Hz")
    n_fft = 2 * (n_bins - 1)
    bin_freqs = np.arange(n_bins) * fs / n_fft
    lo, mid, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (bin_freqs[None, :] - lo) / (mid - lo)
    falling = (hi - bin_freqs[None, :]) / (hi - mid)
    weights = np.maximum(0.0, np.minimum(rising, falling))
    for i in np.flatnonzero(weights.max(axis=1) <= 0.0):
        weights[i, int(np.argmin(np.abs(bin_freqs - edges[i + 1])))] = 1.0
    return TriFilterBank(weights, scale, edges[1:-1].copy(), (f_min, f_max))


def apply_filterbank(spec, fb, eps=LOG_FLOOR):
    """log(spec @ weights.T + eps): log filterbank energies per frame."""
    data = spec.data if isinstance(spec, FeatureMatrix) else np.asarray(spec)
    if data.shape[1] != fb.n_bins:
        raise ArgumentError(
            f"spectrogram has {data.shape[1]} bins, filterbank expects {fb.n_bins}")
    hop = spec.frame_hop if isinstance(spec, FeatureMatrix) else 1
    energies = data @ fb.weights.T
    return FeatureMatrix(np.log(energies + eps), hop, fb.centers)


def filterbank_feature(x, scale, n_filters=40, f_min=0.0, f_max=None,
                       win_len=256, hop=128):
    """MFSC / LFSC / ERB feature of a :class:`Signal`."""
    spec = power_spectrogram(x, win_len, hop)
    fb = make_tri_filterbank(scale, n_filters, f_min, f_max, x.sample_rate,
                             spec.n_channels)
    return apply_filterbank(spec, fb)
