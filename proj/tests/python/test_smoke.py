"""Smoke tests for the python bindings against the compiled extension."""

import math

import numpy as np
import pytest

import wprcn


def test_bspline_values():
    assert wprcn.bspline_phi(1.0, 2) == pytest.approx(1.0)
    assert wprcn.bspline_phi(1.5, 3) == pytest.approx(0.75)
    assert wprcn.bspline_phi(2.0, 4) == pytest.approx(2.0 / 3.0)
    assert wprcn.bspline_phi(-0.5, 2) == 0.0
    assert wprcn.radial_phi([0.0], 0, [0.0], 2) == pytest.approx(1.0)


def test_density_streaming_matches_batch():
    rng = np.random.default_rng(7)
    samples = [[float(v)] for v in rng.uniform(0.0, 1.0, size=400)]
    stream = wprcn.DensityState(2, 3, 1, alphas=[1.0], harmonic=True)
    for x in samples:
        stream.update(x)
    batch = wprcn.batch_estimate(samples, 2, 3)
    assert stream.update_count == 400
    np.testing.assert_allclose(stream.weights(), batch.weights(), atol=1e-12)


def test_density_ensemble_nonnegative():
    state = wprcn.DensityState(3, 2, 2)
    assert len(state.alphas) == 5
    rng = np.random.default_rng(3)
    for _ in range(200):
        state.update(list(rng.uniform(0.0, 1.0, size=2)))
    dens = state.density([0.4, 0.6])
    assert len(dens) == 5
    assert all(v >= 0.0 for v in dens)


def test_synthesize_and_io(tmp_path):
    ds = wprcn.synthesize(kind="sinusoid", classes=3, dims=2, length=32, per_class=4, seed=5)
    assert len(ds) == 12
    samples, labels = wprcn.dataset_arrays(ds)
    assert samples.shape == (12, 2, 32)
    assert sorted(set(labels.tolist())) == [0, 1, 2]

    path = str(tmp_path / "toy.ts")
    wprcn.write_ts(ds, path)
    back = wprcn.parse_ts(path)
    np.testing.assert_array_equal(wprcn.dataset_arrays(back)[0], samples)


def test_parse_error_carries_line():
    with pytest.raises(RuntimeError, match="line"):
        wprcn.parse_ts_text("@classLabel true a\n@data\n1,oops:a\n")


def test_normalize_unit_interval():
    ds = wprcn.synthesize(kind="ar", classes=2, dims=2, length=24, per_class=4, seed=9)
    wprcn.normalize_and_pad(ds)
    samples, _ = wprcn.dataset_arrays(ds)
    assert samples.min() >= 0.0
    assert samples.max() <= 1.0


def test_awpg_features():
    ds = wprcn.synthesize(classes=2, dims=2, length=16, per_class=5, seed=11)
    wprcn.normalize_and_pad(ds)
    cfg = wprcn.GedConfig()
    cfg.encoder_hidden = 4
    cfg.epochs = 2
    cfg.seed = 1
    model = wprcn.train_awpg(ds, 0, cfg)
    feats = model.generate_features(ds.sample(0))
    assert feats.shape == (15, 16)
    assert feats.min() >= 0.0
    assert len(wprcn.feature_channel_layout()) == 15

    y_e, h_l = model.encode(ds.sample(1))
    assert y_e.shape == (16, 2)
    assert h_l.shape == (2,)
    assert 0.0 <= y_e.min() and y_e.max() <= 1.0


def test_metrics_table():
    out = wprcn.evaluate_table(["d1"], ["a", "b"], [[0.5, 0.5]])
    assert out["avg_rank"] == [1.5, 1.5]
    assert out["win_tie"] == [1, 1]


def test_f1_sweep_separable():
    beta, f1 = wprcn.f1_threshold_sweep([1.0, 1.0, 0.0], [False, False, True])
    assert f1 == pytest.approx(1.0)
    assert 0.0 < beta <= 1.0
