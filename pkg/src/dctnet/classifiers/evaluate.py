"""Track-level aggregation of chunk predictions."""

from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError, DataError
from .rnn import RnnModel, rnn_predict_proba
from .svm import LinearModel, svm_scores

AGGREGATIONS = ("prob_mean", "chunk_vote")


def chunk_scores(model, chunks):
    """Per-chunk class scores: probabilities for the RNN, margins for the SVM."""
    chunks = np.asarray(chunks, dtype=np.float64)
    if isinstance(model, RnnModel):
        return rnn_predict_proba(model, chunks)
    if isinstance(model, LinearModel):
        return svm_scores(model, chunks.reshape(chunks.shape[0], -1))
    raise ArgumentError(f"unsupported model type {type(model).__name__}")


def aggregate(scores, track_ids, n_tracks, mode="prob_mean"):
    """Per-track labels from chunk scores.

    ``prob_mean`` takes the argmax of the mean score; ``chunk_vote`` takes
    the majority of chunk argmaxes. Ties go to the lowest class index.
    """
    if mode not in AGGREGATIONS:
        raise ArgumentError(f"mode must be one of {AGGREGATIONS}, got {mode!r}")
    scores = np.asarray(scores, dtype=np.float64)
    track_ids = np.asarray(track_ids)
    n_classes = scores.shape[1]
    out = np.empty(n_tracks, dtype=np.int64)
    for tid in range(n_tracks):
        rows = scores[track_ids == tid]
        if rows.shape[0] == 0:
            raise DataError(f"track {tid} has no chunks")
        if mode == "prob_mean":
            out[tid] = int(np.argmax(rows.mean(axis=0)))
        else:
            votes = np.bincount(np.argmax(rows, axis=1), minlength=n_classes)
            out[tid] = int(np.argmax(votes))
    return out


@dataclass
class EvalResult:
    track_accuracy: float
    chunk_accuracy: float
    confusion: np.ndarray  # rows: true class, columns: predicted class
    predictions: np.ndarray


def confusion_matrix(truth, pred, n_classes):
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (np.asarray(truth), np.asarray(pred)), 1)
    return cm


def evaluate(model, chunkset, mode="prob_mean"):
    scores = chunk_scores(model, chunkset.chunks)
    n_classes = scores.shape[1]
    pred = aggregate(scores, chunkset.track_ids, chunkset.n_tracks, mode)
    truth = chunkset.track_labels
    chunk_pred = np.argmax(scores, axis=1)
    return EvalResult(
        track_accuracy=float(np.mean(pred == truth)),
        chunk_accuracy=float(np.mean(chunk_pred == chunkset.labels)),
        confusion=confusion_matrix(truth, pred, n_classes),
        predictions=pred,
    )
