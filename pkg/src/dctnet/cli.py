"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, replace

import numpy as np

from . import plotting
from .classifiers import build_chunkset, evaluate, load_model, rnn_init, rnn_train, save_model, svm_train
from .errors import ArgumentError, DataError, NumericError
from .features import FEATURES, FeatureCache, FeatureSpec
from .harness import AGG_ALIASES, DEFAULT_EPOCHS, load_config, run_experiment
from .signal_io import load_manifest, read_features, write_features

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("dctnet")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _feature_spec(args):
    overrides = {}
    for name in ("fmin", "fmax", "b1", "b2", "hop1", "hop2", "win", "hop", "nfilters",
                 "max_len"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if args.baseline_band:
        overrides["baseline_band"] = True
    return FeatureSpec(kind=args.feature, **overrides)


def cmd_extract(args):
    manifest = load_manifest(args.manifest)
    spec = _feature_spec(args)
    os.makedirs(args.out, exist_ok=True)
    cache = FeatureCache(args.cache)
    rows = []
    for i, (path, label) in enumerate(manifest.entries):
        fm = cache.get(manifest.resolve(path), spec)
        name = f"{i:05d}.adf"
        write_features(os.path.join(args.out, name), fm)
        rows.append(f"{name}\t{path}\t{label}\n")
        log.info("%s -> %s %s", path, name, fm.data.shape)
    with open(os.path.join(args.out, "labels.tsv"), "w", encoding="utf-8") as fh:
        fh.writelines(rows)
    meta = {"feature": asdict(spec), "class_names": manifest.class_names,
            "chunk_len": args.chunk_len, "overlap": args.overlap}
    with open(os.path.join(args.out, "features.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
    print(f"wrote {len(rows)} feature files to {args.out}")
    return EXIT_OK


def _load_feature_dir(directory):
    try:
        with open(os.path.join(directory, "features.json"), encoding="utf-8") as fh:
            meta = json.load(fh)
        with open(os.path.join(directory, "labels.tsv"), encoding="utf-8") as fh:
            rows = [line.rstrip("\n").split("\t") for line in fh if line.strip()]
    except (OSError, ValueError) as exc:
        raise DataError(f"{directory}: not a feature directory ({exc})") from None
    index = {name: i for i, name in enumerate(meta["class_names"])}
    feats = [read_features(os.path.join(directory, name)) for name, _, _ in rows]
    labels = np.array([index[label] for _, _, label in rows], dtype=np.int64)
    chunks = build_chunkset(feats, labels, meta["chunk_len"], meta["overlap"],
                            [path for _, path, _ in rows])
    return meta, chunks


def cmd_train(args):
    meta, chunks = _load_feature_dir(args.features)
    n_classes = len(meta["class_names"])
    if args.classifier == "svm":
        model = svm_train(chunks.flat(), chunks.labels, lam=args.lam, epochs=args.epochs,
                          seed=args.seed, n_classes=n_classes)
        print(f"svm objective {model.objective[0]:.4f} -> {model.objective[-1]:.4f}")
    else:
        init = rnn_init(chunks.chunks.shape[2], args.hidden, n_classes, seed=args.seed)
        model, history = rnn_train(init, chunks.chunks, chunks.labels, lr=args.lr,
                                   epochs=args.epochs, clip=args.clip, seed=args.seed)
        print(f"rnn loss {history.losses[0]:.4f} -> {history.losses[-1]:.4f}")
    save_model(args.model, model)
    return EXIT_OK


def cmd_eval(args):
    meta, chunks = _load_feature_dir(args.features)
    model = load_model(args.model)
    res = evaluate(model, chunks, AGG_ALIASES[args.agg])
    names = meta["class_names"]
    print(f"track_accuracy\t{res.track_accuracy:.6f}")
    print(f"chunk_accuracy\t{res.chunk_accuracy:.6f}")
    print("true\\pred\t" + "\t".join(names))
    for name, row in zip(names, res.confusion):
        print(name + "\t" + "\t".join(str(int(v)) for v in row))
    return EXIT_OK


def cmd_experiment(args):
    cfg = load_config(args.config)
    if args.repeats is not None:
        cfg = replace(cfg, n_repeats=args.repeats)
    manifest = load_manifest(args.manifest)
    report = run_experiment(cfg, manifest, FeatureCache(args.cache))
    text = report.to_text()
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    sys.stdout.write(text)
    if not args.no_figures:
        stem = os.path.splitext(args.out)[0]
        plotting.accuracy_png(report, stem + "_accuracy.png")
        plotting.confusion_png(report, stem + "_confusion.png")
        plotting.loss_png(report, stem + "_training.png")
        first = FeatureCache(args.cache).get(manifest.resolve(manifest.entries[0][0]),
                                             cfg.feature)
        plotting.feature_png(first, stem + "_feature.png",
                             f"{cfg.feature.kind}: {manifest.entries[0][0]}")
    return EXIT_OK


def cmd_plot(args):
    fm = read_features(args.feature_file)
    plotting.emit_plot(fm, args.out)
    if args.png:
        plotting.feature_png(fm, args.png, os.path.basename(args.feature_file))
    return EXIT_OK


def cmd_selftest(args):
    from .selftest import run_selftest
    ok = run_selftest()
    print("selftest " + ("passed" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_synth(args):
    from .synthetic import make_synthetic_dataset
    path = make_synthetic_dataset(args.out, args.per_class, seed=args.seed)
    print(path)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="dctnet", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("extract", help="compute features for every manifest entry")
    e.add_argument("--manifest", required=True)
    e.add_argument("--feature", required=True, choices=FEATURES)
    e.add_argument("--fmin", type=float)
    e.add_argument("--fmax", type=float)
    e.add_argument("--b1", type=int)
    e.add_argument("--b2", type=int)
    e.add_argument("--hop1", type=int, help="first-layer hop (two-layer features)")
    e.add_argument("--hop2", type=int, help="second-layer hop (two-layer features)")
    e.add_argument("--max-len", dest="max_len", type=int)
    e.add_argument("--win", type=int, help="spectrogram window (baselines)")
    e.add_argument("--hop", type=int, help="spectrogram hop (baselines)")
    e.add_argument("--nfilters", type=int)
    e.add_argument("--baseline-band", action="store_true",
                   help="restrict baseline filterbanks to [fmin, fmax]")
    e.add_argument("--chunk-len", dest="chunk_len", type=int, default=40)
    e.add_argument("--overlap", type=int, default=20)
    e.add_argument("--cache")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_extract)

    t = sub.add_parser("train", help="train a classifier on a feature directory")
    t.add_argument("--features", required=True)
    t.add_argument("--classifier", required=True, choices=("svm", "rnn"))
    t.add_argument("--lr", type=float, default=0.01)
    t.add_argument("--epochs", type=int, default=None)
    t.add_argument("--hidden", type=int, default=64)
    t.add_argument("--lambda", dest="lam", type=float, default=0.1)
    t.add_argument("--clip", type=float, default=5.0)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--model", required=True)
    t.set_defaults(func=cmd_train)

    v = sub.add_parser("eval", help="evaluate a saved model on a feature directory")
    v.add_argument("--features", required=True)
    v.add_argument("--model", required=True)
    v.add_argument("--agg", choices=("vote", "mean"), default="mean")
    v.set_defaults(func=cmd_eval)

    x = sub.add_parser("experiment", help="repeated stratified split experiment")
    x.add_argument("--config", required=True)
    x.add_argument("--manifest", required=True)
    x.add_argument("--out", required=True)
    x.add_argument("--repeats", type=int)
    x.add_argument("--cache")
    x.add_argument("--no-figures", action="store_true")
    x.set_defaults(func=cmd_experiment)

    g = sub.add_parser("plot", help="render an ADF1 feature file as a PGM image")
    g.add_argument("--feature-file", required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--png", help="also render a matplotlib PNG")
    g.set_defaults(func=cmd_plot)

    s = sub.add_parser("selftest", help="run the numerical self-checks")
    s.set_defaults(func=cmd_selftest)

    y = sub.add_parser("synth", help="write the synthetic four-class corpus")
    y.add_argument("--out", required=True)
    y.add_argument("--per-class", type=int, default=50)
    y.add_argument("--seed", type=int, default=0)
    y.set_defaults(func=cmd_synth)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "epochs", "unset") is None:
        args.epochs = DEFAULT_EPOCHS[args.classifier]
    try:
        return args.func(args)
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
