"""Feature recipes by name, plus a content-addressed feature cache."""

import hashlib
import json
import os
from dataclasses import asdict, dataclass
from typing import Optional

from .adaptive import adctnet_two_layer, default_layers
from .baselines import filterbank_feature
from .errors import ArgumentError, DataError, DctnetError
from .signal_io import load_wav, read_features, write_features
from .stdct import StdctConfig, dctnet_feature, log_compress

FEATURES = ("adctnet", "dctnet", "mfsc", "lfsc", "erb")
_SCALE = {"mfsc": "mel", "lfsc": "linear", "erb": "erb"}


@dataclass(frozen=True)
class FeatureSpec:
    kind: str = "adctnet"
    fmin: float = 40.0
    fmax: float = 5500.0
    b1: int = 12
    b2: int = 6
    hop1: int = 1
    hop2: int = 1024
    max_len: int = 4096
    n1: int = 256
    n2: int = 1024
    channels1: int = 64
    channels2: int = 256
    win: int = 256
    hop: int = 128
    nfilters: int = 40
    # baselines use the full 0..fs/2 band unless asked to match fmin/fmax
    baseline_band: bool = False
    log_eps: float = 1e-10

    def __post_init__(self):
        if self.kind not in FEATURES:
            raise ArgumentError(f"feature must be one of {FEATURES}, got {self.kind!r}")

    def key(self):
        return json.dumps(asdict(self), sort_keys=True)


def extract(signal, spec):
    """FeatureMatrix for one signal; two-layer features are log-compressed."""
    if spec.kind == "adctnet":
        layer1, layer2 = default_layers(signal.sample_rate, spec.fmin, spec.fmax,
                                        spec.b1, spec.b2, spec.hop1, spec.hop2,
                                        max_len=spec.max_len)
        return log_compress(adctnet_two_layer(signal, layer1, layer2), spec.log_eps)
    if spec.kind == "dctnet":
        layer1 = StdctConfig(spec.n1, spec.hop1, "hamming", spec.channels1)
        layer2 = StdctConfig(spec.n2, spec.hop2, "hamming", spec.channels2)
        return log_compress(dctnet_feature(signal, layer1, layer2), spec.log_eps)
    f_min, f_max = (spec.fmin, spec.fmax) if spec.baseline_band else (0.0, None)
    return filterbank_feature(signal, _SCALE[spec.kind], spec.nfilters, f_min, f_max,
                              spec.win, spec.hop)


def cache_key(audio_bytes, spec):
    h = hashlib.sha256()
    h.update(audio_bytes)
    h.update(spec.key().encode("utf-8"))
    return h.hexdigest()


class FeatureCache:
    """Features keyed by SHA-256 of (audio bytes, feature spec).

    Entries live in memory and, when ``directory`` is given, as ADF1 files.
    """

    def __init__(self, directory: Optional[str] = None):
        self.directory = directory
        self._mem = {}
        if directory:
            os.makedirs(directory, exist_ok=True)

    def get(self, path, spec):
        with open(path, "rb") as fh:
            audio = fh.read()
        key = cache_key(audio, spec)
        if key in self._mem:
            return self._mem[key]
        disk = os.path.join(self.directory, key + ".adf") if self.directory else None
        if disk and os.path.exists(disk):
            fm = read_features(disk)
        else:
            try:
                fm = extract(load_wav(path), spec)
            except DctnetError as exc:
                raise DataError(f"feature extraction failed for {path}: {exc}") from exc
            if disk:
                write_features(disk, fm)
        self._mem[key] = fm
        return fm
