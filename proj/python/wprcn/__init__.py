"""Wavelet probabilistic recurrent convolutional network toolkit.

The heavy lifting lives in the compiled `_wprcn` extension; this package
re-exports its surface and adds a couple of numpy-friendly helpers.
"""

try:  # installed wheel layout: the extension sits inside the package
    from . import _wprcn as _core
except ImportError:  # development layout: the extension is on sys.path
    import _wprcn as _core

AwpgModel = _core.AwpgModel
DensityState = _core.DensityState
GedConfig = _core.GedConfig
TsDataset = _core.TsDataset
batch_estimate = _core.batch_estimate
bspline_phi = _core.bspline_phi
evaluate_table = _core.evaluate_table
f1_threshold_sweep = _core.f1_threshold_sweep
feature_channel_layout = _core.feature_channel_layout
normalize_and_pad = _core.normalize_and_pad
parse_ts = _core.parse_ts
parse_ts_text = _core.parse_ts_text
radial_phi = _core.radial_phi
run_experiment = _core.run_experiment
synthesize = _core.synthesize
train_awpg = _core.train_awpg
write_ts = _core.write_ts

__all__ = [
    "AwpgModel",
    "DensityState",
    "GedConfig",
    "TsDataset",
    "batch_estimate",
    "bspline_phi",
    "evaluate_table",
    "f1_threshold_sweep",
    "feature_channel_layout",
    "normalize_and_pad",
    "parse_ts",
    "parse_ts_text",
    "radial_phi",
    "run_experiment",
    "synthesize",
    "train_awpg",
    "write_ts",
    "dataset_arrays",
]

__version__ = "0.1.0"


def dataset_arrays(dataset):
    """Return (samples, labels) as numpy arrays for an equal-length dataset."""
    import numpy as np

    samples = np.stack([dataset.sample(i) for i in range(len(dataset))])
    labels = np.asarray(dataset.labels, dtype=np.int64)
    return samples, labels
