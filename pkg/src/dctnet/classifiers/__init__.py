from .chunking import ChunkSet, build_chunkset, chunk_sequence, chunk_starts
from .evaluate import EvalResult, aggregate, chunk_scores, evaluate
from .rnn import (
    RnnModel,
    loss_and_grads,
    rnn_forward,
    rnn_gradient_check,
    rnn_init,
    rnn_train,
)
from .serialize import load_model, save_model
from .svm import LinearModel, svm_predict, svm_scores, svm_train

__all__ = [
    "ChunkSet", "EvalResult", "LinearModel", "RnnModel", "aggregate",
    "build_chunkset", "chunk_scores", "chunk_sequence", "chunk_starts", "evaluate",
    "load_model", "loss_and_grads", "rnn_forward", "rnn_gradient_check", "rnn_init",
    "rnn_train", "save_model", "svm_predict", "svm_scores", "svm_train",
]
