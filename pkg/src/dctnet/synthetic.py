"""Synthetic four-class audio corpus used for end-to-end checks.

Classes: steady tones, rising log-chirps, falling log-chirps and
amplitude-modulated noise. Clips last 2-3 s; every draw comes from one
seeded generator so the corpus is reproducible byte for byte.
"""

import os

import numpy as np

from .signal_io import write_wav

CLASSES = ("am_noise", "chirp_down", "chirp_up", "tone")


def _tone(rng, n, fs):
    f = rng.uniform(500.0, 1000.0)
    t = np.arange(n) / fs
    phase = rng.uniform(0, 2 * np.pi)
    x = np.sin(2 * np.pi * f * t + phase)
    # a weak second harmonic keeps the class from being a single bin
    x += 0.3 * np.sin(4 * np.pi * f * t + 2 * phase)
    return x


def _log_chirp(rng, n, fs, rising):
    lo = rng.uniform(150.0, 400.0)
    hi = rng.uniform(2500.0, 5000.0)
    f_start, f_end = (lo, hi) if rising else (hi, lo)
    t = np.arange(n) / fs
    dur = n / fs
    k = np.log(f_end / f_start) / dur
    phase = 2 * np.pi * f_start * (np.exp(k * t) - 1.0) / k
    return np.sin(phase + rng.uniform(0, 2 * np.pi))


def _am_noise(rng, n, fs):
    rate = rng.uniform(2.0, 8.0)
    t = np.arange(n) / fs
    envelope = 0.5 * (1.0 + np.sin(2 * np.pi * rate * t + rng.uniform(0, 2 * np.pi)))
    return envelope * rng.standard_normal(n) * 0.5


def synth_clip(label, rng, fs=44100, duration=None):
    duration = rng.uniform(2.0, 3.0) if duration is None else duration
    n = int(round(duration * fs))
    if label == "tone":
        x = _tone(rng, n, fs)
    elif label == "chirp_up":
        x = _log_chirp(rng, n, fs, rising=True)
    elif label == "chirp_down":
        x = _log_chirp(rng, n, fs, rising=False)
    elif label == "am_noise":
        x = _am_noise(rng, n, fs)
    else:
        raise ValueError(f"unknown synthetic class {label!r}")
    x = x + 0.01 * rng.standard_normal(n)
    gain = rng.uniform(0.2, 0.6)
    return gain * x / np.max(np.abs(x))


def make_synthetic_dataset(out_dir, n_per_class=50, fs=44100, seed=0):
    """Write ``n_per_class`` PCM16 clips per class plus ``manifest.tsv``.

    Returns the manifest path.
    """
    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.default_rng(seed)
    lines = ["# synthetic corpus: path<TAB>label\n"]
    for i in range(n_per_class):
        for label in CLASSES:
            name = f"{label}_{i:03d}.wav"
            write_wav(os.path.join(out_dir, name), synth_clip(label, rng, fs), fs)
            lines.append(f"{name}\t{label}\n")
    path = os.path.join(out_dir, "manifest.tsv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(lines)
    return path
