"""Split per-track feature sequences into fixed-length overlapping chunks."""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from ..errors import ArgumentError, DataError
from ..signal_io import FeatureMatrix


def chunk_starts(n_frames, chunk_len, overlap):
    """Start frames of the chunks kept for a sequence of ``n_frames``.

    Chunks advance by ``chunk_len - overlap`` until one reaches the end of
    the sequence. That last chunk is zero-padded when it holds at least half
    a chunk of real frames and dropped otherwise, unless it is the only chunk.
    """
    if not 0 <= overlap < chunk_len:
        raise ArgumentError(f"need 0 <= overlap < chunk_len, got {overlap}, {chunk_len}")
    if n_frames <= 0:
        raise DataError("cannot chunk an empty feature matrix")
    step = chunk_len - overlap
    starts = []
    start = 0
    while True:
        real = min(chunk_len, n_frames - start)
        last = start + chunk_len >= n_frames
        if not last or real == chunk_len or 2 * real >= chunk_len or not starts:
            starts.append(start)
        if last:
            return starts
        start += step


def chunk_sequence(fm, chunk_len, overlap):
    """List of (chunk_len, dim) arrays cut from a feature matrix."""
    data = fm.data if isinstance(fm, FeatureMatrix) else np.asarray(fm, dtype=np.float64)
    n, dim = data.shape
    chunks = []
    for start in chunk_starts(n, chunk_len, overlap):
        piece = data[start:start + chunk_len]
        if piece.shape[0] < chunk_len:
            padded = np.zeros((chunk_len, dim))
            padded[:piece.shape[0]] = piece
            piece = padded
        chunks.append(np.array(piece))
    return chunks


@dataclass
class ChunkSet:
    """Chunks of several tracks, with the owning track of every chunk."""

    chunks: np.ndarray  # (n_chunks, chunk_len, dim)
    track_ids: np.ndarray
    track_labels: np.ndarray
    chunk_len: int
    overlap: int
    track_names: List[str] = field(default_factory=list)

    @property
    def labels(self):
        """Per-chunk labels inherited from the parent track."""
        return self.track_labels[self.track_ids]

    @property
    def n_tracks(self):
        return self.track_labels.shape[0]

    def flat(self):
        return self.chunks.reshape(self.chunks.shape[0], -1)


def build_chunkset(features, labels, chunk_len, overlap, names=None):
    """Chunk every track; ``features`` is a list of FeatureMatrix or arrays."""
    all_chunks, owners = [], []
    for tid, fm in enumerate(features):
        pieces = chunk_sequence(fm, chunk_len, overlap)
        all_chunks.extend(pieces)
        owners.extend([tid] * len(pieces))
    return ChunkSet(np.stack(all_chunks), np.asarray(owners, dtype=np.int64),
                    np.asarray(labels, dtype=np.int64), chunk_len, overlap,
                    list(names) if names is not None else [])
