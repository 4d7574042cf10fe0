"""Single-hidden-layer tanh RNN with a softmax readout of the last state.

h_t = tanh(W_in x_t + W_rec h_{t-1} + b_h), h_0 = 0
p   = softmax(V h_T + b_y)

Training is plain SGD, one chunk per step, with exact backpropagation
through time and global gradient-norm clipping.
"""

from dataclasses import dataclass, field, replace
from typing import List

import numpy as np

from ..errors import ArgumentError, NumericError

PARAMS = ("W_in", "W_rec", "b_h", "V", "b_y")


@dataclass
class RnnModel:
    W_in: np.ndarray
    W_rec: np.ndarray
    b_h: np.ndarray
    V: np.ndarray
    b_y: np.ndarray
    in_mean: np.ndarray = None
    in_scale: np.ndarray = None
    activation: str = "tanh"

    def __post_init__(self):
        dim = self.W_in.shape[1]
        if self.in_mean is None:
            self.in_mean = np.zeros(dim)
        if self.in_scale is None:
            self.in_scale = np.ones(dim)

    @property
    def input_dim(self):
        return self.W_in.shape[1]

    @property
    def hidden_dim(self):
        return self.W_rec.shape[0]

    @property
    def n_classes(self):
        return self.V.shape[0]

    def params(self):
        return {name: getattr(self, name) for name in PARAMS}

    def copy(self):
        return replace(self, **{name: getattr(self, name).copy()
                                for name in PARAMS + ("in_mean", "in_scale")})


@dataclass
class TrainHistory:
    """Mean cross-entropy over the training chunks, at init then per epoch."""

    losses: List[float] = field(default_factory=list)


def orthogonal(n, rng):
    """Orthogonal factor of a Gaussian matrix, sign-fixed so it is Haar-distributed."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))[None, :]


def rnn_init(input_dim, hidden_dim, n_classes, seed=0):
    """Orthogonal recurrent matrix; other weights uniform in [-0.01, 0.01]."""
    if min(input_dim, hidden_dim, n_classes) < 1:
        raise ArgumentError("RNN dimensions must all be >= 1")
    rng = np.random.default_rng(seed)
    W_rec = orthogonal(hidden_dim, rng)
    W_in = rng.uniform(-0.01, 0.01, (hidden_dim, input_dim))
    V = rng.uniform(-0.01, 0.01, (n_classes, hidden_dim))
    return RnnModel(W_in, W_rec, np.zeros(hidden_dim), V, np.zeros(n_classes))


def softmax(z):
    z = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _inputs(model, seq):
    seq = np.asarray(seq, dtype=np.float64)
    if seq.ndim != 2 or seq.shape[0] == 0:
        raise ArgumentError(f"sequence must be non-empty (frames, dim), got {seq.shape}")
    if seq.shape[1] != model.input_dim:
        raise ArgumentError(f"expected input dim {model.input_dim}, got {seq.shape[1]}")
    return (seq - model.in_mean) / model.in_scale


def _hidden_states(model, xs):
    T = xs.shape[0]
    drive = xs @ model.W_in.T + model.b_h
    hs = np.zeros((T + 1, model.hidden_dim))
    for t in range(T):
        hs[t + 1] = np.tanh(drive[t] + model.W_rec @ hs[t])
    return hs


def rnn_forward(model, seq):
    """Class probabilities for one sequence of frames."""
    hs = _hidden_states(model, _inputs(model, seq))
    return softmax(model.V @ hs[-1] + model.b_y)


def _cross_entropy(z, label):
    """-log softmax(z)[label], evaluated as logsumexp(z) - z[label]."""
    top = np.max(z)
    return top + np.log(np.sum(np.exp(z - top))) - z[label]


def loss_and_grads(model, seq, label):
    """Cross-entropy of ``label`` and its gradient for every parameter."""
    xs = _inputs(model, seq)
    hs = _hidden_states(model, xs)
    z = model.V @ hs[-1] + model.b_y
    p = softmax(z)
    loss = _cross_entropy(z, label)

    dz = p.copy()
    dz[label] -= 1.0
    dV = np.outer(dz, hs[-1])
    dh = model.V.T @ dz
    T = xs.shape[0]
    da = np.empty((T, model.hidden_dim))
    for t in range(T, 0, -1):
        da[t - 1] = dh * (1.0 - hs[t] * hs[t])
        dh = model.W_rec.T @ da[t - 1]
    grads = {
        "W_in": da.T @ xs,
        "W_rec": da.T @ hs[:-1],
        "b_h": da.sum(axis=0),
        "V": dV,
        "b_y": dz,
    }
    return float(loss), grads


def mean_loss(model, chunks, labels):
    total = 0.0
    for seq, label in zip(chunks, labels):
        hs = _hidden_states(model, _inputs(model, seq))
        total += _cross_entropy(model.V @ hs[-1] + model.b_y, label)
    return total / len(labels)


def rnn_train(model, chunks, labels, lr=0.01, epochs=100, clip=5.0, seed=0,
              standardize=True):
    """SGD over chunks in a seeded random order each epoch.

    Returns the trained copy and a :class:`TrainHistory`. With
    ``standardize`` the per-dimension input mean and scale of the training
    frames are stored in the model first.
    """
    chunks = np.asarray(chunks, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if chunks.shape[0] == 0:
        raise ArgumentError("no training chunks")
    model = model.copy()
    if standardize:
        frames = chunks.reshape(-1, chunks.shape[-1])
        model.in_mean = frames.mean(axis=0)
        scale = frames.std(axis=0)
        scale[scale == 0.0] = 1.0
        model.in_scale = scale
    rng = np.random.default_rng(seed)
    history = TrainHistory([mean_loss(model, chunks, labels)])
    # overflow is detected explicitly below and reported as a NumericError
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, epochs + 1):
            for i in rng.permutation(chunks.shape[0]):
                loss, grads = loss_and_grads(model, chunks[i], labels[i])
                if not np.isfinite(loss):
                    raise NumericError(f"non-finite loss at epoch {epoch}, chunk {i}")
                norm = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
                if not np.isfinite(norm):
                    raise NumericError(f"non-finite gradient at epoch {epoch}, chunk {i}")
                step = lr * (clip / norm if clip and norm > clip else 1.0)
                for name, g in grads.items():
                    getattr(model, name)[...] -= step * g
                if not all(np.all(np.isfinite(getattr(model, n))) for n in PARAMS):
                    raise NumericError(f"parameters overflowed at epoch {epoch}, chunk {i}")
            history.losses.append(mean_loss(model, chunks, labels))
    return model, history


def rnn_predict_proba(model, chunks):
    return np.stack([rnn_forward(model, seq) for seq in chunks])


def numerical_grads(model, seq, label, step=1e-5):
    """Central finite-difference gradient of the loss for every parameter."""
    probe = model.copy()
    out = {}
    for name in PARAMS:
        arr = getattr(probe, name)
        g = np.zeros_like(arr)
        for idx in np.ndindex(arr.shape):
            orig = arr[idx]
            arr[idx] = orig + step
            up = loss_and_grads(probe, seq, label)[0]
            arr[idx] = orig - step
            down = loss_and_grads(probe, seq, label)[0]
            arr[idx] = orig
            g[idx] = (up - down) / (2.0 * step)
        out[name] = g
    return out


def rnn_gradient_check(model, chunk, label, step=1e-5):
    """max |g_a - g_n| / max(|g_a|, |g_n|, 1e-8) over all parameters."""
    if max(model.input_dim, model.hidden_dim, model.n_classes) > 16:
        raise ArgumentError("gradient check is meant for dims <= 16")
    _, analytic = loss_and_grads(model, chunk, label)
    numeric = numerical_grads(model, chunk, label, step)
    worst = 0.0
    for name in PARAMS:
        a, n = analytic[name], numeric[name]
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-8)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
