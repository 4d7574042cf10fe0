"""One-vs-rest linear SVM trained with the Pegasos subgradient schedule."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..errors import ArgumentError, DataError


@dataclass
class LinearModel:
    """Per-class weight rows plus the training-set standardization."""

    W: np.ndarray
    b: np.ndarray
    mean: np.ndarray
    scale: np.ndarray
    class_names: Optional[List[str]] = None
    objective: List[float] = field(default_factory=list)

    @property
    def n_classes(self):
        return self.W.shape[0]

    @property
    def dim(self):
        return self.W.shape[1]


def standardization(X):
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0.0] = 1.0
    return mean, scale


def _objective(W, Xa, Y, lam):
    margins = Y * (Xa @ W.T)
    hinge = np.maximum(0.0, 1.0 - margins).sum(axis=1).mean()
    return 0.5 * lam * float(np.sum(W * W)) + float(hinge)


def svm_train(X, y, lam=0.1, epochs=10, seed=0, n_classes=None, class_names=None,
              project=True):
    """Train one binary hinge-loss classifier per class.

    Every class sees the same seeded sample order. Step t uses the rate
    1 / (lam * t); the bias is an extra constant input, regularized like the
    other weights. ``model.objective`` holds the summed one-vs-rest objective
    at initialization and after every epoch.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ArgumentError(f"X must be (n, dim) matching y, got {X.shape} and {y.shape}")
    if not np.all(np.isfinite(X)):
        raise DataError("training features contain NaN or infinite values")
    if lam <= 0:
        raise ArgumentError(f"lambda must be positive, got {lam}")
    n_classes = int(y.max()) + 1 if n_classes is None else int(n_classes)
    if np.unique(y).shape[0] < 2:
        raise ArgumentError("SVM training needs at least two classes")

    mean, scale = standardization(X)
    Xa = np.hstack([(X - mean) / scale, np.ones((X.shape[0], 1))])
    Y = np.where(np.arange(n_classes)[None, :] == y[:, None], 1.0, -1.0)

    rng = np.random.default_rng(seed)
    W = np.zeros((n_classes, Xa.shape[1]))
    radius = 1.0 / np.sqrt(lam)
    history = [_objective(W, Xa, Y, lam)]
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(X.shape[0]):
            t += 1
            eta = 1.0 / (lam * t)
            x, yi = Xa[i], Y[i]
            violated = yi * (W @ x) < 1.0
            W *= 1.0 - eta * lam
            if violated.any():
                W[violated] += eta * yi[violated, None] * x[None, :]
            if project:
                norms = np.sqrt(np.sum(W * W, axis=1))
                over = norms > radius
                if over.any():
                    W[over] *= (radius / norms[over])[:, None]
        history.append(_objective(W, Xa, Y, lam))
    return LinearModel(W[:, :-1].copy(), W[:, -1].copy(), mean, scale,
                       list(class_names) if class_names is not None else None, history)


def svm_scores(model, X):
    """Class scores for a batch (n, dim) or a single vector."""
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    X2 = np.atleast_2d(X)
    if X2.shape[1] != model.dim:
        raise ArgumentError(f"expected {model.dim} features, got {X2.shape[1]}")
    scores = ((X2 - model.mean) / model.scale) @ model.W.T + model.b
    return scores[0] if single else scores


def svm_predict(model, x):
    """(label index, scores); ties go to the lowest class index."""
    scores = svm_scores(model, x)
    return int(np.argmax(scores)), scores
