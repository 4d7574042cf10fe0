"""DCTNet and adaptive (constant-Q) DCTNet audio features with baselines and classifiers."""

from .adaptive import AdctConfig, adaptive_stdct, adctnet_forward, adctnet_two_layer, default_layers
from .baselines import apply_filterbank, make_tri_filterbank, power_spectrogram
from .filterbanks import (
    cq_frequency_grid,
    cq_window_lengths,
    dct2_basis,
    linear_dct_filterbank,
    make_window,
)
from .signal_io import (
    DatasetManifest,
    FeatureMatrix,
    Signal,
    load_manifest,
    load_wav,
    read_features,
    write_features,
)
from .stdct import (
    LayeredTensor,
    StdctConfig,
    dctnet_forward,
    gram_oracle_deviation,
    log_compress,
    pool_energy,
    shift_covariance_deviation,
    short_time_dct,
)

__version__ = "0.1.0"
