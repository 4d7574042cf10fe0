"""Windows, DCT-II bases, windowed-cosine filters and constant-Q grids."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ArgumentError

WINDOW_KINDS = ("hamming", "hann", "rectangular")


def make_window(kind, length):
    """Symmetric window of ``length`` samples.

    Only the first half is evaluated; the second half is its mirror image so
    the result is exactly symmetric.
    """
    length = int(length)
    if length < 1:
        raise ArgumentError(f"window length must be >= 1, got {length}")
    if kind not in WINDOW_KINDS:
        raise ArgumentError(f"unknown window kind {kind!r}; choose from {WINDOW_KINDS}")
    if kind == "rectangular" or length == 1:
        return np.ones(length)
    half = (length + 1) // 2
    phase = 2.0 * np.pi * np.arange(half) / (length - 1)
    if kind == "hamming":
        head = 0.54 - 0.46 * np.cos(phase)
    else:
        head = 0.5 - 0.5 * np.cos(phase)
    out = np.empty(length)
    out[:half] = head
    out[length - half:] = head[::-1]
    return out


def dct2_basis(n, orthonormal=False):
    """DCT-II matrix with entry (k, i) = s_k * cos(pi * (i + 1/2) * k / n)."""
    n = int(n)
    if n < 1:
        raise ArgumentError(f"DCT size must be >= 1, got {n}")
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    basis = np.cos(np.pi * (i + 0.5) * k / n)
    if orthonormal:
        scale = np.full(n, math.sqrt(2.0 / n))
        scale[0] = math.sqrt(1.0 / n)
        basis *= scale[:, None]
    return basis


@dataclass(frozen=True)
class FilterBank:
    """Bank of real FIR filters.

    ``center_freqs`` are in Hz when the bank was built for a known sample
    rate, otherwise in cycles per sample. ``q_factor`` is None for linear
    (equal-length) banks.
    """

    filters: tuple
    center_freqs: np.ndarray
    lengths: np.ndarray
    q_factor: Optional[float] = None

    def __len__(self):
        return len(self.filters)

    def as_matrix(self, span=None, align="center"):
        """Stack filters into a (n_filters, span) matrix, zero-padded.

        ``align="center"`` places each filter in the middle of the span,
        shifted left by half a sample when the padding is odd.
        """
        span = int(max(self.lengths)) if span is None else int(span)
        out = np.zeros((len(self.filters), span))
        for row, h in enumerate(self.filters):
            n = h.shape[0]
            if n > span:
                raise ArgumentError(f"filter of length {n} exceeds span {span}")
            off = (span - n) // 2 if align == "center" else 0
            out[row, off:off + n] = h
        return out


def linear_dct_filterbank(window, n, channels, fs=None):
    """Filters h(i) * cos(pi * (i + 1/2) * k / n) for each channel k."""
    window = np.asarray(window, dtype=np.float64)
    n = int(n)
    if window.shape != (n,):
        raise ArgumentError(f"window length {window.shape[0]} != N={n}")
    channels = [int(k) for k in channels]
    for k in channels:
        if not 0 <= k < n:
            raise ArgumentError(f"channel {k} outside [0, {n - 1}]")
    i = np.arange(n)
    filters = tuple(window * np.cos(np.pi * (i + 0.5) * k / n) for k in channels)
    centers = np.asarray(channels, dtype=np.float64) / (2.0 * n)
    if fs is not None:
        centers = centers * fs
    return FilterBank(filters, centers, np.full(len(channels), n), None)


@dataclass(frozen=True)
class FrequencyGrid:
    """Geometric center frequencies f0 * 2**(k/b) for k = 1..K."""

    f0: float
    b: int
    freqs: np.ndarray

    @property
    def K(self):
        return self.freqs.shape[0]

    @property
    def q_factor(self):
        return constant_q(self.b)


def constant_q(b):
    """Q such that adjacent bands at b per octave meet: 1 / (2**(1/b) - 1)."""
    return 1.0 / (2.0 ** (1.0 / b) - 1.0)


def cq_frequency_grid(f0, f_max, b, fs):
    f0, f_max, fs = float(f0), float(f_max), float(fs)
    b = int(b)
    if b < 1:
        raise ArgumentError(f"bins per octave must be >= 1, got {b}")
    if not 0.0 < f0 < f_max:
        raise ArgumentError(f"need 0 < f0 < f_max, got f0={f0}, f_max={f_max}")
    if f_max > 0.45 * fs:
        raise ArgumentError(f"f_max={f_max} Hz exceeds 0.45*fs={0.45 * fs} Hz")
    # the epsilon keeps exact octave ratios (e.g. 80/40) from flooring down
    K = int(math.floor(b * math.log2(f_max / f0) + 1e-9))
    if K < 1:
        raise ArgumentError(f"band [{f0}, {f_max}] Hz holds no bin at b={b}")
    k = np.arange(1, K + 1)
    freqs = f0 * np.exp2(k / b)
    return FrequencyGrid(f0, b, freqs)


def cq_window_lengths(grid, fs, min_len, max_len):
    """Per-bin window lengths round(Q * fs / f_k), clamped to [min_len, max_len]."""
    min_len, max_len = int(min_len), int(max_len)
    if not 1 <= min_len <= max_len:
        raise ArgumentError(f"need 1 <= min_len <= max_len, got {min_len}, {max_len}")
    freqs = np.asarray(grid.freqs, dtype=np.float64)
    raw = np.full(freqs.shape, max_len, dtype=np.int64)
    # a 0 Hz bin (degenerate linear grids) takes the longest window
    pos = freqs > 0
    raw[pos] = np.floor(grid.q_factor * fs / freqs[pos] + 0.5).astype(np.int64)
    return np.clip(raw, min_len, max_len)
