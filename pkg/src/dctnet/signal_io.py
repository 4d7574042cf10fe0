"""Audio input, dataset manifests and the ADF1 feature container.

WAV decoding is a small RIFF walker rather than :mod:`wave` because the
stdlib reader rejects IEEE float payloads.
"""

import os
import struct
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import (
    DataError,
    DuplicateError,
    EmptyManifestError,
    EmptySignalError,
    FormatError,
    LengthError,
    ParseError,
    UnsupportedFormatError,
)

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

ADF_MAGIC = b"ADF1"
_ADF_HEADER = struct.Struct("<4sIIIB")


@dataclass(frozen=True)
class Signal:
    """Mono sample vector with its sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise DataError("signal samples must be one-dimensional")
        if int(self.sample_rate) <= 0:
            raise DataError(f"sample rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self):
        return len(self) / self.sample_rate


@dataclass
class FeatureMatrix:
    """Real matrix indexed by (frame, channel).

    ``channel_freqs`` holds per-channel center frequencies in Hz when the
    channels have a natural frequency axis.
    """

    data: np.ndarray
    frame_hop: int = 1
    channel_freqs: Optional[np.ndarray] = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise DataError(f"feature data must be 2-D, got shape {data.shape}")
        if data.shape[1] == 0:
            raise DataError("feature matrix needs at least one channel")
        if not np.all(np.isfinite(data)):
            raise DataError("feature matrix contains non-finite values")
        self.data = data
        self.frame_hop = int(self.frame_hop)
        if self.channel_freqs is not None:
            freqs = np.asarray(self.channel_freqs, dtype=np.float64)
            if freqs.shape != (data.shape[1],):
                raise DataError(
                    f"expected {data.shape[1]} channel frequencies, got {freqs.shape}")
            self.channel_freqs = freqs

    @property
    def n_frames(self):
        return self.data.shape[0]

    @property
    def n_channels(self):
        return self.data.shape[1]

    def __eq__(self, other):
        if not isinstance(other, FeatureMatrix):
            return NotImplemented
        if self.frame_hop != other.frame_hop or self.data.shape != other.data.shape:
            return False
        if (self.channel_freqs is None) != (other.channel_freqs is None):
            return False
        if self.channel_freqs is not None and (
                self.channel_freqs.tobytes() != other.channel_freqs.tobytes()):
            return False
        return self.data.tobytes() == other.data.tobytes()


# --------------------------------------------------------------------- WAV

def _iter_chunks(buf):
    pos = 12
    while pos + 8 <= len(buf):
        cid, size = struct.unpack_from("<4sI", buf, pos)
        body = buf[pos + 8:pos + 8 + size]
        yield cid, body, size
        pos += 8 + size + (size & 1)


def load_wav(path):
    """Decode a PCM16 or float32 WAV file into a mono :class:`Signal`.

    Stereo frames are averaged. 16-bit samples are scaled by 1/32768.
    """
    with open(path, "rb") as fh:
        buf = fh.read()
    if len(buf) < 12 or buf[:4] != b"RIFF" or buf[8:12] != b"WAVE":
        raise FormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    for cid, body, size in _iter_chunks(buf):
        if cid == b"fmt ":
            if len(body) < 16:
                raise FormatError(f"{path}: truncated fmt chunk")
            fmt = body
        elif cid == b"data":
            if len(body) < size:
                raise FormatError(f"{path}: data chunk truncated "
                                  f"({len(body)} of {size} bytes)")
            data = body
    if fmt is None or data is None:
        raise FormatError(f"{path}: missing fmt or data chunk")

    tag, channels, rate, _, block_align, bits = struct.unpack_from("<HHIIHH", fmt)
    if tag == WAVE_FORMAT_EXTENSIBLE:
        if len(fmt) < 26:
            raise FormatError(f"{path}: truncated WAVE_FORMAT_EXTENSIBLE header")
        # first two bytes of the sub-format GUID carry the real format tag
        tag = struct.unpack_from("<H", fmt, 24)[0]
    if channels not in (1, 2):
        raise UnsupportedFormatError(f"{path}: {channels} channels not supported")
    if rate <= 0:
        raise FormatError(f"{path}: sample rate {rate}")
    if tag == WAVE_FORMAT_PCM and bits == 16:
        dtype, scale = np.dtype("<i2"), 1.0 / 32768.0
    elif tag == WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        dtype, scale = np.dtype("<f4"), 1.0
    else:
        raise UnsupportedFormatError(
            f"{path}: format tag {tag:#06x} with {bits} bits per sample")
    if block_align != channels * dtype.itemsize:
        raise FormatError(f"{path}: block align {block_align} inconsistent")

    n_frames = len(data) // block_align
    if n_frames == 0:
        raise EmptySignalError(f"{path}: zero-length data chunk")
    raw = np.frombuffer(data, dtype=dtype, count=n_frames * channels)
    samples = raw.astype(np.float64).reshape(n_frames, channels) * scale
    if channels == 2:
        samples = samples.mean(axis=1)
    else:
        samples = samples[:, 0]
    return Signal(samples, rate)


def write_wav(path, samples, sample_rate, float32=False):
    """Write mono or stereo (frames x 2) audio as PCM16 or float32 WAV.

    PCM16 input may be given as integers (written verbatim) or floats in
    [-1, 1) (scaled by 32768 and clipped).
    """
    arr = np.asarray(samples)
    channels = 1 if arr.ndim == 1 else arr.shape[1]
    if float32:
        payload = arr.astype("<f4").tobytes()
        tag, bits = WAVE_FORMAT_IEEE_FLOAT, 32
    else:
        if np.issubdtype(arr.dtype, np.integer):
            ints = arr.astype("<i2")
        else:
            ints = np.clip(np.round(arr * 32768.0), -32768, 32767).astype("<i2")
        payload = ints.tobytes()
        tag, bits = WAVE_FORMAT_PCM, 16
    block_align = channels * bits // 8
    fmt = struct.pack("<HHIIHH", tag, channels, int(sample_rate),
                      int(sample_rate) * block_align, block_align, bits)
    body = (b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt
            + b"data" + struct.pack("<I", len(payload)) + payload)
    if len(payload) & 1:
        body += b"\x00"
    with open(path, "wb") as fh:
        fh.write(b"RIFF" + struct.pack("<I", len(body)) + body)


# ----------------------------------------------------------------- features

def write_features(path, fm):
    data = fm.data
    rows, cols = data.shape
    has_freqs = fm.channel_freqs is not None
    with open(path, "wb") as fh:
        fh.write(_ADF_HEADER.pack(ADF_MAGIC, rows, cols, fm.frame_hop, int(has_freqs)))
        if has_freqs:
            fh.write(np.ascontiguousarray(fm.channel_freqs, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(data, dtype="<f8").tobytes())


def read_features(path):
    with open(path, "rb") as fh:
        buf = fh.read()
    if len(buf) < 4 or buf[:4] != ADF_MAGIC:
        raise FormatError(f"{path}: bad magic, expected ADF1")
    if len(buf) < _ADF_HEADER.size:
        raise LengthError(f"{path}: truncated header")
    _, rows, cols, hop, has_freqs = _ADF_HEADER.unpack_from(buf)
    if has_freqs not in (0, 1):
        raise FormatError(f"{path}: invalid has_freqs flag {has_freqs}")
    pos = _ADF_HEADER.size
    need = pos + 8 * (cols * has_freqs + rows * cols)
    if len(buf) < need:
        raise LengthError(f"{path}: payload has {len(buf) - pos} bytes, "
                          f"header implies {need - pos}")
    freqs = None
    if has_freqs:
        freqs = np.frombuffer(buf, dtype="<f8", count=cols, offset=pos).astype(np.float64)
        pos += 8 * cols
    data = np.frombuffer(buf, dtype="<f8", count=rows * cols, offset=pos)
    data = data.astype(np.float64).reshape(rows, cols)
    return FeatureMatrix(data, hop, freqs)


# ---------------------------------------------------------------- manifests

@dataclass
class DatasetManifest:
    entries: List[Tuple[str, str]]
    class_names: List[str]
    root: str = "."

    def resolve(self, rel_path):
        return os.path.join(self.root, rel_path)

    @property
    def labels(self):
        return [label for _, label in self.entries]

    def label_indices(self):
        index = {name: i for i, name in enumerate(self.class_names)}
        return np.array([index[label] for _, label in self.entries], dtype=np.int64)


def parse_manifest(lines, root="."):
    entries = []
    seen = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            raise ParseError("expected '<path>\\t<label>'", line=lineno)
        path, label = line.split("\t", 1)
        path, label = path.strip(), label.strip()
        if not path or not label:
            raise ParseError("empty path or label", line=lineno)
        if path in seen:
            raise DuplicateError(f"line {lineno}: duplicate path {path!r}")
        seen.add(path)
        entries.append((path, label))
    if not entries:
        raise EmptyManifestError("manifest has no entries")
    class_names = sorted({label for _, label in entries})
    if len(class_names) < 2:
        raise DataError(f"manifest needs at least 2 classes, found {class_names}")
    return DatasetManifest(entries, class_names, root)


def load_manifest(path):
    """Read a ``relative_path<TAB>label`` manifest; paths resolve against its folder."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    return parse_manifest(lines, root=os.path.dirname(os.path.abspath(path)))
