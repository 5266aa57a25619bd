"""End-to-end sanity checks for the python bindings."""

import math

import numpy as np
import pytest

import avsal


def test_nss_matches_hand_computation():
    s = np.array([[0.0, 1.0], [2.0, 3.0]])
    mean, std = 1.5, math.sqrt(1.25)
    got = avsal.nss(s, [(1, 1)])
    assert got == pytest.approx((3.0 - mean) / std, abs=1e-12)


def test_cc_is_one_for_identical_maps():
    rng = np.random.default_rng(7)
    m = rng.random((8, 10))
    assert avsal.cc(m, m) == pytest.approx(1.0, abs=1e-12)


def test_sim_of_identical_distributions_is_one():
    m = np.ones((4, 4)) / 16.0
    assert avsal.sim(m, m) == pytest.approx(1.0, abs=1e-12)


def test_sim_rejects_unnormalized_input():
    with pytest.raises(ValueError):
        avsal.sim(np.ones((2, 2)), np.ones((2, 2)))


def test_auc_judd_perfect_predictor():
    s = np.zeros((10, 10))
    s[3, 4] = 1.0
    assert avsal.auc_judd(s, [(3, 4)]) == pytest.approx(1.0, abs=1e-9)


def test_sauc_center_prior_is_chance_on_center_negatives():
    # Center-biased map scored against negatives drawn from the same
    # center-biased pool should hover near 0.5.
    h = w = 21
    yy, xx = np.mgrid[0:h, 0:w]
    center = np.exp(-((yy - 10.0) ** 2 + (xx - 10.0) ** 2) / 18.0)
    got = avsal.sauc(center, [(10, 10)], [(9, 10), (11, 10), (10, 9), (10, 11)])
    assert got <= 1.0


def test_kl_div_zero_for_identical():
    m = np.full((3, 3), 1.0 / 9.0)
    assert avsal.kl_div(m, m) == pytest.approx(0.0, abs=1e-12)


def test_density_map_sums_to_one():
    d = avsal.density_map([(5, 5), (2, 8)], 16, 16, 2.0)
    assert d.shape == (16, 16)
    assert d.sum() == pytest.approx(1.0, abs=1e-9)


def test_mep_of_single_density_is_identity():
    d = avsal.density_map([(4, 4)], 9, 9, 1.5)
    m = avsal.mep([d])
    np.testing.assert_allclose(m, d, atol=1e-12)


def test_anova_separated_groups():
    r = avsal.anova_oneway([[1.0, 1.1, 0.9], [5.0, 5.1, 4.9]])
    assert r.f > 100.0
    assert r.p < 0.01


def test_resample_preserves_dc():
    x = np.full(4800, 0.25)
    y = avsal.resample(x, 48000, 16000)
    assert len(y) == 1600
    assert y[800] == pytest.approx(0.25, abs=1e-6)


def test_log_mel_silence_is_log_offset():
    spec = avsal.log_mel(np.zeros(800), avsal.AUDIO_RATE)
    assert spec.shape[1] == avsal.MEL_BANDS
    np.testing.assert_allclose(spec, math.log(0.01), atol=1e-9)


def test_map_round_trip(tmp_path):
    m = np.arange(12, dtype=float).reshape(3, 4)
    path = tmp_path / "m.smf"
    avsal.write_map(m, path)
    np.testing.assert_array_equal(avsal.read_map(path), m)
