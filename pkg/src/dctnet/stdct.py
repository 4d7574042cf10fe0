"""Short-time DCT, the two-layer DCTNet, energy pooling and its checks.

The pooled two-layer output F(m, k2) = sum_k1 X(m, k1, k2)**2 is a quadratic
form in the input signal. :func:`gram_oracle_deviation` and
:func:`shift_covariance_deviation` verify the two properties that make it a
(discrete) member of Cohen's class: it is x^T G x for a fixed Gram matrix G
per output cell, and it commutes with circular shifts.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ArgumentError, TooShortError
from .filterbanks import dct2_basis, make_window
from .signal_io import FeatureMatrix, Signal

CONV_MODES = ("valid", "circular")
METHODS = ("auto", "direct", "fft")


@dataclass(frozen=True)
class StdctConfig:
    n: int = 256
    hop: int = 128
    window: str = "hamming"
    channels: Optional[int] = None
    conv_mode: str = "valid"
    orthonormal: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ArgumentError(f"window length must be >= 1, got {self.n}")
        if not 1 <= self.hop <= self.n:
            raise ArgumentError(f"hop must be in [1, {self.n}], got {self.hop}")
        if self.channels is not None and not 1 <= self.channels <= self.n:
            raise ArgumentError(f"channels must be in [1, {self.n}], got {self.channels}")
        if self.conv_mode not in CONV_MODES:
            raise ArgumentError(f"conv_mode must be one of {CONV_MODES}")

    @property
    def n_channels(self):
        return self.n if self.channels is None else self.channels

    def kernels(self):
        """(channels, n) matrix of windowed DCT-II filters."""
        basis = dct2_basis(self.n, orthonormal=self.orthonormal)[:self.n_channels]
        return basis * make_window(self.window, self.n)[None, :]


@dataclass
class LayeredTensor:
    """Two-layer output indexed (frame m, first-layer channel k1, second-layer k2)."""

    data: np.ndarray
    hop: int
    freqs1: Optional[np.ndarray] = None
    freqs2: Optional[np.ndarray] = None

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 3:
            raise ArgumentError(f"layered tensor must be 3-D, got {self.data.shape}")


# ------------------------------------------------------------------ engine

def n_frames(length, span, hop, conv_mode="valid"):
    if conv_mode == "circular":
        return -(-length // hop)
    if length < span:
        return 0
    return (length - span) // hop + 1


def _fft_correlate(x, kernels, hop, n_out, block=16):
    # y[m, c] = sum_n x[m*hop + n] * kernels[c, n], via FFT convolution with
    # the reversed kernels; channels are processed in blocks to bound memory
    length = x.shape[0]
    span = kernels.shape[1]
    nfft = 1 << int(math.ceil(math.log2(length + span - 1)))
    X = np.fft.rfft(x, nfft)
    out = np.empty((n_out, kernels.shape[0]))
    taps = (span - 1) + hop * np.arange(n_out)
    for start in range(0, kernels.shape[0], block):
        K = np.fft.rfft(kernels[start:start + block, ::-1], nfft, axis=1)
        y = np.fft.irfft(X[None, :] * K, nfft, axis=1)
        out[:, start:start + block] = y[:, taps].T
    return out


def _pick_method(method, length, span, hop, n_kernels, conv_mode):
    if method not in METHODS:
        raise ArgumentError(f"method must be one of {METHODS}, got {method!r}")
    if method != "auto":
        if method == "fft" and conv_mode != "valid":
            raise ArgumentError("fft method supports valid mode only")
        return method
    if conv_mode != "valid":
        return "direct"
    direct_cost = n_frames(length, span, hop) * span * n_kernels
    nfft = 1 << int(math.ceil(math.log2(length + span - 1)))
    fft_cost = 6 * n_kernels * nfft * math.log2(nfft)
    return "fft" if direct_cost > fft_cost else "direct"


def apply_kernels(x, kernels, hop, conv_mode="valid", method="auto"):
    """Frame-wise inner products of a 1-D series with each kernel row.

    Returns an (n_frames, n_kernels) array whose entry (m, c) is
    ``sum_n x[m*hop + n] * kernels[c, n]``. In circular mode indices wrap
    modulo ``len(x)`` and there are ceil(len/hop) frames.
    """
    x = np.asarray(x, dtype=np.float64)
    kernels = np.atleast_2d(np.asarray(kernels, dtype=np.float64))
    length = x.shape[0]
    span = kernels.shape[1]
    m = n_frames(length, span, hop, conv_mode)
    if conv_mode == "valid" and m == 0:
        raise TooShortError(
            f"input of length {length} is shorter than the {span}-sample analysis span",
            required=span, actual=length)
    if length == 0:
        raise TooShortError("empty input", required=1, actual=0)
    method = _pick_method(method, length, span, hop, kernels.shape[0], conv_mode)
    if method == "fft":
        return _fft_correlate(x, kernels, hop, m)
    if conv_mode == "valid":
        frames = sliding_window_view(x, span)[::hop]
    else:
        idx = (hop * np.arange(m)[:, None] + np.arange(span)[None, :]) % length
        frames = x[idx]
    return frames @ kernels.T


def apply_kernels_rows(series, kernels, hop, conv_mode="valid", method="auto"):
    """:func:`apply_kernels` on every column of a (length, rows) array.

    Output is (n_frames, rows, n_kernels).
    """
    series = np.asarray(series, dtype=np.float64)
    kernels = np.atleast_2d(np.asarray(kernels, dtype=np.float64))
    length, rows = series.shape
    span = kernels.shape[1]
    m = n_frames(length, span, hop, conv_mode)
    if conv_mode == "valid" and m == 0:
        raise TooShortError(
            f"series of length {length} is shorter than the {span}-sample analysis span",
            required=span, actual=length)
    if conv_mode == "valid" and method in ("auto", "direct"):
        # one contiguous (span, rows) block per frame keeps the product in BLAS
        out = np.empty((m, rows, kernels.shape[0]))
        kt = np.ascontiguousarray(kernels.T)
        for i in range(m):
            out[i] = series[i * hop:i * hop + span].T @ kt
        return out
    outs = [apply_kernels(series[:, r], kernels, hop, conv_mode, method)
            for r in range(rows)]
    return np.stack(outs, axis=1)


# -------------------------------------------------------------- operations

def _samples(x):
    if isinstance(x, Signal):
        return x.samples, x.sample_rate
    return np.asarray(x, dtype=np.float64), None


def short_time_dct(x, cfg, method="auto"):
    """X(m, k) = sum_n x(n + m*hop) h(n) cos(pi (n + 1/2) k / N)."""
    samples, fs = _samples(x)
    out = apply_kernels(samples, cfg.kernels(), cfg.hop, cfg.conv_mode, method)
    freqs = None
    if fs is not None:
        freqs = np.arange(cfg.n_channels) * fs / (2.0 * cfg.n)
    return FeatureMatrix(out, cfg.hop, freqs)


def dctnet_forward(x, layer1, layer2, method="auto"):
    """Short-time DCT of every first-layer channel row.

    No nonlinearity is applied between the layers, so the map from x to the
    returned tensor is linear.
    """
    samples, fs = _samples(x)
    try:
        first = apply_kernels(samples, layer1.kernels(), layer1.hop,
                              layer1.conv_mode, method)
    except TooShortError as exc:
        raise TooShortError(f"layer 1: {exc}", exc.required, exc.actual) from None
    try:
        second = apply_kernels_rows(first, layer2.kernels(), layer2.hop,
                                    layer2.conv_mode, method)
    except TooShortError as exc:
        raise TooShortError(f"layer 2: {exc}", exc.required, exc.actual) from None
    freqs1 = freqs2 = None
    if fs is not None:
        freqs1 = np.arange(layer1.n_channels) * fs / (2.0 * layer1.n)
        freqs2 = np.arange(layer2.n_channels) * (fs / layer1.hop) / (2.0 * layer2.n)
    return LayeredTensor(second, layer1.hop * layer2.hop, freqs1, freqs2)


def pool_energy(t):
    """F(m, k2) = sum over k1 of X(m, k1, k2)**2."""
    data = t.data if isinstance(t, LayeredTensor) else np.asarray(t, dtype=np.float64)
    pooled = np.square(data).sum(axis=1)
    freqs = t.freqs2 if isinstance(t, LayeredTensor) else None
    hop = t.hop if isinstance(t, LayeredTensor) else 1
    return FeatureMatrix(pooled, hop, freqs)


def log_compress(fm, eps=1e-10):
    if eps <= 0:
        raise ArgumentError(f"eps must be positive, got {eps}")
    if np.any(fm.data < 0):
        raise ArgumentError("log_compress needs non-negative entries")
    return FeatureMatrix(np.log(fm.data + eps), fm.frame_hop, fm.channel_freqs)


def dctnet_feature(x, layer1, layer2, method="auto"):
    return pool_energy(dctnet_forward(x, layer1, layer2, method))


# ------------------------------------------------------------ verification

def linear_functionals(length, layer1, layer2):
    """Responses to each unit impulse: array (length, m, k1, k2).

    Entry [i] is dctnet_forward(e_i), i.e. the coefficient of x(i) in every
    pre-pooling output.
    """
    responses = []
    for i in range(length):
        e = np.zeros(length)
        e[i] = 1.0
        responses.append(dctnet_forward(e, layer1, layer2, method="direct").data)
    return np.stack(responses)


def gram_oracle_deviation(length, layer1, layer2, trials=10, seed=0, signals=None):
    """Max relative gap between pooled F and x^T G x over random signals.

    G for cell (m, k2) is sum over k1 of a a^T, where a collects the impulse
    responses of X(m, k1, k2). ``signals`` overrides the random draws.
    """
    if length > 512:
        raise ArgumentError("Gram oracle is limited to signals of length <= 512")
    A = linear_functionals(length, layer1, layer2)
    if signals is None:
        rng = np.random.default_rng(seed)
        signals = rng.standard_normal((trials, length))
    signals = np.atleast_2d(np.asarray(signals, dtype=np.float64))
    F = np.stack([dctnet_feature(x, layer1, layer2, method="direct").data
                  for x in signals])
    worst = 0.0
    for m in range(A.shape[1]):
        for k2 in range(A.shape[3]):
            a = A[:, m, :, k2]
            gram = a @ a.T
            quad = np.einsum("ti,ij,tj->t", signals, gram, signals)
            f = F[:, m, k2]
            dev = np.abs(f - quad) / (np.abs(f) + 1e-30)
            worst = max(worst, float(dev.max()))
    return worst


def shift_covariance_deviation(x, layer1, layer2, shift):
    """Max |F(shifted x) - F(x) rolled by shift/(hop1*hop2) frames|.

    Both layers must run in circular mode, and the signal length must be a
    multiple of the composed hop so every frame grid wraps exactly.
    """
    samples, _ = _samples(x)
    if layer1.conv_mode != "circular" or layer2.conv_mode != "circular":
        raise ArgumentError("shift covariance needs circular mode in both layers")
    hop = layer1.hop * layer2.hop
    if shift % hop:
        raise ArgumentError(f"shift {shift} is not a multiple of the composed hop {hop}")
    if samples.shape[0] % hop:
        raise ArgumentError(
            f"signal length {samples.shape[0]} is not a multiple of the composed hop {hop}")
    base = dctnet_feature(samples, layer1, layer2, method="direct").data
    moved = dctnet_feature(np.roll(samples, shift), layer1, layer2, method="direct").data
    expected = np.roll(base, shift // hop, axis=0)
    return float(np.max(np.abs(moved - expected))) if base.size else 0.0
