"""ADM1 model container.

Layout: magic ``ADM1``, one kind byte (0 linear, 1 rnn), the dimensions as
little-endian u32, then every parameter block as little-endian f64 in field
order.

linear: dims (n_classes, dim); blocks W, b, mean, scale
rnn:    dims (input_dim, hidden_dim, n_classes);
        blocks W_in, W_rec, b_h, V, b_y, in_mean, in_scale
"""

import struct

import numpy as np

from ..errors import ArgumentError, FormatError, LengthError
from .rnn import RnnModel
from .svm import LinearModel

MAGIC = b"ADM1"
KIND_LINEAR = 0
KIND_RNN = 1


def _layout(kind, dims):
    if kind == KIND_LINEAR:
        c, d = dims
        return [("W", (c, d)), ("b", (c,)), ("mean", (d,)), ("scale", (d,))]
    i, h, c = dims
    return [("W_in", (h, i)), ("W_rec", (h, h)), ("b_h", (h,)), ("V", (c, h)),
            ("b_y", (c,)), ("in_mean", (i,)), ("in_scale", (i,))]


def model_bytes(model):
    if isinstance(model, LinearModel):
        kind, dims = KIND_LINEAR, (model.n_classes, model.dim)
    elif isinstance(model, RnnModel):
        kind, dims = KIND_RNN, (model.input_dim, model.hidden_dim, model.n_classes)
    else:
        raise ArgumentError(f"cannot serialize {type(model).__name__}")
    parts = [MAGIC, struct.pack("<B", kind), struct.pack(f"<{len(dims)}I", *dims)]
    for name, shape in _layout(kind, dims):
        block = np.asarray(getattr(model, name), dtype="<f8")
        if block.shape != shape:
            raise ArgumentError(f"{name} has shape {block.shape}, expected {shape}")
        parts.append(np.ascontiguousarray(block).tobytes())
    return b"".join(parts)


def model_from_bytes(buf):
    if buf[:4] != MAGIC:
        raise FormatError("bad magic, expected ADM1")
    if len(buf) < 5:
        raise LengthError("truncated model header")
    kind = buf[4]
    if kind not in (KIND_LINEAR, KIND_RNN):
        raise FormatError(f"unknown model kind {kind}")
    n_dims = 2 if kind == KIND_LINEAR else 3
    if len(buf) < 5 + 4 * n_dims:
        raise LengthError("truncated model dimensions")
    dims = struct.unpack_from(f"<{n_dims}I", buf, 5)
    pos = 5 + 4 * n_dims
    blocks = {}
    for name, shape in _layout(kind, dims):
        count = int(np.prod(shape))
        if len(buf) < pos + 8 * count:
            raise LengthError(f"model payload truncated in block {name}")
        blocks[name] = np.frombuffer(buf, "<f8", count, pos).astype(np.float64).reshape(shape)
        pos += 8 * count
    if pos != len(buf):
        raise LengthError(f"{len(buf) - pos} trailing bytes after the last block")
    if kind == KIND_LINEAR:
        return LinearModel(**blocks)
    return RnnModel(**blocks)


def save_model(path, model):
    with open(path, "wb") as fh:
        fh.write(model_bytes(model))


def load_model(path):
    with open(path, "rb") as fh:
        return model_from_bytes(fh.read())
