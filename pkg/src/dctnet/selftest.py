"""Fast numerical self-checks behind ``dctnet selftest``."""

from dataclasses import dataclass

import numpy as np

from .adaptive import AdctConfig, adaptive_stdct
from .classifiers.rnn import RnnModel, rnn_gradient_check
from .filterbanks import FrequencyGrid
from .stdct import StdctConfig, gram_oracle_deviation, shift_covariance_deviation, short_time_dct

GRAM_CONFIGS = [
    # (length, layer1, layer2)
    (64, StdctConfig(8, 4), StdctConfig(4, 2)),
    (96, StdctConfig(16, 8, "hann"), StdctConfig(8, 4)),
    (128, StdctConfig(16, 4), StdctConfig(16, 4, "rectangular")),
    (128, StdctConfig(32, 16, channels=12), StdctConfig(4, 1)),
    (256, StdctConfig(32, 16), StdctConfig(8, 4, channels=6)),
]


@dataclass
class Check:
    name: str
    value: float
    threshold: float

    @property
    def passed(self):
        return bool(self.value < self.threshold)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.value:.3e} (< {self.threshold:.0e})"


def linear_grid_config(n, fs, hop, window="hamming"):
    """Adaptive config whose grid is the linear DCT grid k * fs / (2n), fixed length n."""
    freqs = np.arange(n) * fs / (2.0 * n)
    grid = FrequencyGrid(f0=0.0, b=1, freqs=freqs)
    return AdctConfig(grid, fs, hop=hop, window=window, min_len=n, max_len=n)


def random_rnn(input_dim, hidden_dim, n_classes, seed, scale=0.5):
    """Model with O(1) weights so every gradient entry is well above round-off."""
    rng = np.random.default_rng(seed)
    return RnnModel(
        rng.uniform(-scale, scale, (hidden_dim, input_dim)),
        rng.uniform(-scale, scale, (hidden_dim, hidden_dim)),
        rng.uniform(-scale, scale, hidden_dim),
        rng.uniform(-scale, scale, (n_classes, hidden_dim)),
        rng.uniform(-scale, scale, n_classes),
    )


def gram_checks():
    return [Check(f"gram oracle len={L} N1={a.n} N2={b.n}",
                  gram_oracle_deviation(L, a, b, trials=5, seed=i), 1e-9)
            for i, (L, a, b) in enumerate(GRAM_CONFIGS)]


def shift_checks(n_signals=5):
    rng = np.random.default_rng(7)
    l1 = StdctConfig(16, 1, conv_mode="circular")
    l2 = StdctConfig(8, 1, conv_mode="circular")
    worst = max(shift_covariance_deviation(rng.standard_normal(256), l1, l2,
                                           int(rng.integers(1, 256)))
                for _ in range(n_signals))
    return [Check("circular shift covariance", worst, 1e-9)]


def reduction_checks():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(2048)
    n, fs = 64, 8000.0
    lin = short_time_dct(x, StdctConfig(n, 16), method="direct").data
    ada = adaptive_stdct(x, linear_grid_config(n, fs, 16), method="direct").data
    dev = float(np.max(np.abs(lin - ada)) / max(1.0, np.max(np.abs(lin))))
    return [Check("adaptive -> linear reduction", dev, 1e-12)]


def gradient_checks(n_models=3):
    out = []
    for seed in range(n_models):
        model = random_rnn(5, 6, 3, seed)
        chunk = np.random.default_rng(100 + seed).standard_normal((7, 5))
        out.append(Check(f"rnn gradient check seed={seed}",
                         rnn_gradient_check(model, chunk, seed % 3), 1e-4))
    return out


def run_selftest(write=print):
    checks = gram_checks() + shift_checks() + reduction_checks() + gradient_checks()
    for c in checks:
        write(c.line())
    return all(c.passed for c in checks)
