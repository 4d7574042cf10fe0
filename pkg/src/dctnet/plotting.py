"""Feature images and experiment figures.

:func:`emit_plot` writes a dependency-free grayscale PGM. The ``*_png``
helpers render with matplotlib (Agg backend) for reports.
"""

import numpy as np

from .errors import ArgumentError

FIGSIZE = (6.4, 3.6)
RC = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "image.cmap": "magma",
    "savefig.dpi": 120,
}


def feature_to_gray(data):
    """Map a (frames, channels) matrix to 8-bit pixels, channels bottom-up."""
    data = np.asarray(data, dtype=np.float64)
    if not np.all(np.isfinite(data)):
        raise ArgumentError("cannot plot non-finite features")
    img = data.T[::-1]
    lo, hi = (float(img.min()), float(img.max())) if img.size else (0.0, 0.0)
    if hi == lo:
        return np.full(img.shape, 128, dtype=np.uint8)
    return np.floor((img - lo) / (hi - lo) * 255.0 + 0.5).astype(np.uint8)


def emit_plot(fm, path):
    """Binary PGM (P5): one row per channel, low frequencies at the bottom."""
    data = fm.data if hasattr(fm, "data") else fm
    pixels = feature_to_gray(data)
    height, width = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(pixels).tobytes())


def read_pgm(path):
    with open(path, "rb") as fh:
        buf = fh.read()
    parts = buf.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ArgumentError(f"{path}: not a binary PGM")
    width, height = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4][:width * height], dtype=np.uint8).reshape(height, width)


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def feature_png(fm, path, title=None, frame_rate=None):
    plt = _pyplot()
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        data = fm.data.T
        extent = None
        xlabel = "frame"
        if frame_rate:
            extent = (0, data.shape[1] / frame_rate, 0, data.shape[0])
            xlabel = "time (s)"
        im = ax.imshow(data, origin="lower", aspect="auto", extent=extent,
                       interpolation="nearest")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("channel")
        freqs = getattr(fm, "channel_freqs", None)
        if freqs is not None and freqs.shape[0] > 1:
            ticks = np.linspace(0, freqs.shape[0] - 1, 5).round().astype(int)
            ax.set_yticks(ticks + 0.5)
            ax.set_yticklabels([f"{freqs[t]:.0f}" for t in ticks])
            ax.set_ylabel("center frequency (Hz)")
        if title:
            ax.set_title(title)
        fig.colorbar(im, ax=ax, pad=0.02)
        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)


def accuracy_png(report, path):
    """Per-repeat track accuracy with the mean +- std band."""
    plt = _pyplot()
    acc = 100.0 * report.accuracies
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        x = np.arange(acc.shape[0])
        ax.axhspan(100 * (report.mean - report.std), 100 * (report.mean + report.std),
                   color="0.85", lw=0)
        ax.axhline(100 * report.mean, color="0.3", lw=1)
        ax.plot(x, acc, "o", color="C0")
        ax.set_xlabel("repeat")
        ax.set_ylabel("track accuracy (%)")
        ax.set_ylim(min(acc.min() - 5, 100 * report.mean - 10), 101)
        cfg = report.config
        ax.set_title(f"{cfg.feature.kind} + {cfg.classifier}: "
                     f"{100 * report.mean:.2f} +- {100 * report.std:.2f} %")
        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)


def confusion_png(report, path):
    plt = _pyplot()
    cm = report.confusion
    names = report.class_names
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.2, 3.8))
        ax.imshow(cm, cmap="Blues")
        for (i, j), v in np.ndenumerate(cm):
            ax.text(j, i, str(int(v)), ha="center", va="center",
                    color="white" if v > cm.max() / 2 else "black")
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names, rotation=45, ha="right")
        ax.set_yticks(range(len(names)))
        ax.set_yticklabels(names)
        ax.set_xlabel("predicted")
        ax.set_ylabel("true")
        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)


def loss_png(report, path):
    plt = _pyplot()
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        for i, curve in enumerate(report.losses):
            ax.plot(curve, lw=1, label=f"repeat {i}" if i < 3 else None)
        ax.set_xlabel("epoch")
        ax.set_ylabel("training objective" if report.config.classifier == "svm"
                      else "mean cross-entropy")
        ax.set_yscale("log")
        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)
