"""Experiment orchestration: stratified repeated splits, training, reporting."""

import logging
from dataclasses import dataclass, field, fields, replace
from typing import List, Optional

import numpy as np

from .classifiers import build_chunkset, evaluate, rnn_init, rnn_train, svm_train
from .errors import ArgumentError, DataError
from .features import FeatureCache, FeatureSpec

log = logging.getLogger(__name__)

CLASSIFIERS = ("svm", "rnn")
DEFAULT_EPOCHS = {"svm": 10, "rnn": 100}
AGG_ALIASES = {"mean": "prob_mean", "vote": "chunk_vote",
               "prob_mean": "prob_mean", "chunk_vote": "chunk_vote"}
PROTOCOL = ("repeated stratified random track splits; repeat r uses seed split_seed+r; "
            "mean and sample standard deviation (ddof=1) over repeats")


@dataclass(frozen=True)
class ClassifierParams:
    lam: float = 0.1
    # None picks the classifier's own default (see DEFAULT_EPOCHS)
    epochs: Optional[int] = None
    lr: float = 0.01
    hidden: int = 64
    clip: float = 5.0
    seed: int = 0


@dataclass(frozen=True)
class ExperimentConfig:
    feature: FeatureSpec = field(default_factory=FeatureSpec)
    classifier: str = "svm"
    params: ClassifierParams = field(default_factory=ClassifierParams)
    chunk_len: int = 40
    overlap: int = 20
    n_repeats: int = 10
    split_seed: int = 0
    test_fraction: float = 0.2
    agg: str = "prob_mean"

    def __post_init__(self):
        if self.classifier not in CLASSIFIERS:
            raise ArgumentError(f"classifier must be one of {CLASSIFIERS}")
        if not 0.0 < self.test_fraction < 1.0:
            raise ArgumentError(f"test_fraction must be in (0, 1), got {self.test_fraction}")
        if self.n_repeats < 1:
            raise ArgumentError("n_repeats must be >= 1")
        if self.agg not in AGG_ALIASES:
            raise ArgumentError(f"agg must be one of {sorted(AGG_ALIASES)}")
        object.__setattr__(self, "agg", AGG_ALIASES[self.agg])
        if self.params.epochs is None:
            object.__setattr__(self, "params",
                               replace(self.params, epochs=DEFAULT_EPOCHS[self.classifier]))

    @classmethod
    def from_mapping(cls, data):
        """Build from a nested mapping with optional ``feature``, ``classifier``
        and ``experiment`` sections (the TOML layout)."""
        data = dict(data)
        known = {f.name for f in fields(FeatureSpec)}
        feat = dict(data.pop("feature", {}))
        _reject_unknown("feature", feat, known)
        clf = dict(data.pop("classifier", {}))
        kind = clf.pop("kind", clf.pop("name", "svm"))
        if "lambda" in clf:
            clf["lam"] = clf.pop("lambda")
        _reject_unknown("classifier", clf, {f.name for f in fields(ClassifierParams)})
        exp = dict(data.pop("experiment", {}))
        exp.update({k: v for k, v in data.items() if not isinstance(v, dict)})
        _reject_unknown("experiment", exp, {"chunk_len", "overlap", "n_repeats",
                                             "split_seed", "test_fraction", "agg"})
        return cls(FeatureSpec(**feat), kind, ClassifierParams(**clf), **exp)


def _reject_unknown(section, given, allowed):
    extra = sorted(set(given) - set(allowed))
    if extra:
        raise ArgumentError(f"unknown key(s) in [{section}]: {', '.join(extra)}")


def load_config(path):
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ArgumentError(f"{path}: {exc}") from None
    return ExperimentConfig.from_mapping(data)


def stratified_split(labels, test_fraction, seed):
    """(train_idx, test_idx) with round(test_fraction * n_c) test tracks per class."""
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if idx.shape[0] < 2:
            raise DataError(f"class {c} has {idx.shape[0]} track(s); cannot stratify")
        idx = rng.permutation(idx)
        n_test = int(np.clip(np.floor(test_fraction * idx.shape[0] + 0.5), 1,
                             idx.shape[0] - 1))
        test.extend(idx[:n_test].tolist())
        train.extend(idx[n_test:].tolist())
    return np.sort(np.array(train)), np.sort(np.array(test))


@dataclass
class RepeatResult:
    seed: int
    n_train: int
    n_test: int
    track_accuracy: float
    track_accuracy_vote: float
    chunk_accuracy: float
    confusion: np.ndarray


@dataclass
class Report:
    config: ExperimentConfig
    class_names: List[str]
    repeats: List[RepeatResult]
    losses: List[List[float]] = field(default_factory=list)

    @property
    def accuracies(self):
        return np.array([r.track_accuracy for r in self.repeats])

    @property
    def mean(self):
        return float(self.accuracies.mean())

    @property
    def std(self):
        acc = self.accuracies
        return float(acc.std(ddof=1)) if acc.shape[0] > 1 else 0.0

    @property
    def confusion(self):
        return sum(r.confusion for r in self.repeats)

    def to_text(self):
        cfg = self.config
        lines = ["# dctnet experiment report",
                 f"# protocol: {PROTOCOL}",
                 f"# test_fraction={cfg.test_fraction:g} n_repeats={cfg.n_repeats}",
                 f"feature\t{cfg.feature.kind}",
                 f"feature_spec\t{cfg.feature.key()}",
                 f"classifier\t{cfg.classifier}",
                 "classifier_params\t" + ",".join(
                     f"{f.name}={getattr(cfg.params, f.name)!r}" for f in fields(cfg.params)),
                 f"chunking\tlen={cfg.chunk_len},overlap={cfg.overlap}",
                 f"aggregation\t{cfg.agg}",
                 f"classes\t{','.join(self.class_names)}",
                 "",
                 "repeat\tsplit_seed\tn_train\tn_test\ttrack_acc\ttrack_acc_vote\tchunk_acc"]
        for i, r in enumerate(self.repeats):
            lines.append(f"{i}\t{r.seed}\t{r.n_train}\t{r.n_test}\t{r.track_accuracy:.6f}\t"
                         f"{r.track_accuracy_vote:.6f}\t{r.chunk_accuracy:.6f}")
        lines += ["",
                  f"mean_track_acc\t{self.mean:.6f}",
                  f"std_track_acc\t{self.std:.6f}",
                  f"accuracy_percent\t{100 * self.mean:.2f} +- {100 * self.std:.2f}",
                  "",
                  "# confusion summed over repeats: rows true class, columns predicted",
                  "true\\pred\t" + "\t".join(self.class_names)]
        for name, row in zip(self.class_names, self.confusion):
            lines.append(name + "\t" + "\t".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"


def _train(cfg, chunkset, n_classes):
    p = cfg.params
    if cfg.classifier == "svm":
        model = svm_train(chunkset.flat(), chunkset.labels, lam=p.lam, epochs=p.epochs,
                          seed=p.seed, n_classes=n_classes)
        return model, model.objective
    init = rnn_init(chunkset.chunks.shape[2], p.hidden, n_classes, seed=p.seed)
    model, history = rnn_train(init, chunkset.chunks, chunkset.labels, lr=p.lr,
                               epochs=p.epochs, clip=p.clip, seed=p.seed)
    return model, history.losses


def run_experiment(cfg, manifest, cache=None):
    """Train and evaluate ``cfg.n_repeats`` times on fresh stratified splits.

    Features are extracted once per track through ``cache``.
    """
    cache = cache if cache is not None else FeatureCache()
    labels = manifest.label_indices()
    n_classes = len(manifest.class_names)
    feats = [cache.get(manifest.resolve(path), cfg.feature) for path, _ in manifest.entries]
    report = Report(cfg, list(manifest.class_names), [])
    for r in range(cfg.n_repeats):
        seed = cfg.split_seed + r
        train, test = stratified_split(labels, cfg.test_fraction, seed)
        if np.intersect1d(train, test).size or train.size + test.size != labels.size:
            raise AssertionError("train/test split does not partition the tracks")
        tr = build_chunkset([feats[i] for i in train], labels[train],
                            cfg.chunk_len, cfg.overlap)
        te = build_chunkset([feats[i] for i in test], labels[test],
                            cfg.chunk_len, cfg.overlap)
        model, losses = _train(cfg, tr, n_classes)
        res = evaluate(model, te, cfg.agg)
        vote = evaluate(model, te, "chunk_vote")
        report.repeats.append(RepeatResult(seed, int(train.size), int(test.size),
                                           res.track_accuracy, vote.track_accuracy,
                                           res.chunk_accuracy, res.confusion))
        report.losses.append([float(v) for v in losses])
        log.info("repeat %d: track accuracy %.4f", r, res.track_accuracy)
    return report
