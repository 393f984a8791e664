import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rsrde.channels import (
    AwgnBpskChannel,
    MscChannel,
    ReliabilityMatrix,
    bpsk_modulate,
    build_error_model,
    error_pattern,
    reliability_from_awgn,
    reliability_from_msc,
    symbol_bits,
    transmit_awgn_bpsk,
    transmit_msc,
)


def test_msc_validation():
    with pytest.raises(ValueError):
        MscChannel(0.0, 32)
    with pytest.raises(ValueError):
        MscChannel(0.02, 32)  # 0.02 < 0.98 / 31
    assert MscChannel(0.9, 32).cross_prob == pytest.approx(0.1 / 31)


def test_msc_noiseless():
    rng = np.random.default_rng(0)
    cw = rng.integers(0, 32, 31)
    np.testing.assert_array_equal(transmit_msc(cw, MscChannel(1.0, 32), rng), cw)


def test_msc_error_rate_and_uniform_substitution():
    rng = np.random.default_rng(1)
    ch = MscChannel(0.9, 32)
    n = 10**6
    r = transmit_msc(np.zeros(n, dtype=int), ch, rng)
    assert abs(np.mean(r != 0) - 0.1) < 0.001
    counts = np.bincount(r[r != 0], minlength=32)[1:]
    # each wrong symbol has probability 0.1 / 31
    expected = n * 0.1 / 31
    assert np.all(np.abs(counts - expected) < 5 * np.sqrt(expected))


def test_awgn_noise_variance():
    ch = AwgnBpskChannel(3.0, 8, 239 / 255)
    assert ch.noise_variance == pytest.approx(1 / (2 * (239 / 255) * 10 ** 0.3))
    rng = np.random.default_rng(2)
    cw = np.zeros(125000, dtype=int)
    y = transmit_awgn_bpsk(cw, ch, rng)
    assert y.shape == (10**6,)
    assert abs(np.var(y - 1.0) / ch.noise_variance - 1) < 0.01


def test_bpsk_mapping_convention():
    np.testing.assert_array_equal(bpsk_modulate([0], 3), [1, 1, 1])
    # symbol 6 = 0b110, little-endian bits (0, 1, 1)
    np.testing.assert_array_equal(bpsk_modulate([6], 3), [1, -1, -1])
    np.testing.assert_array_equal(symbol_bits(4, 2), [[0, 0], [1, 0], [0, 1], [1, 1]])


def test_awgn_infinite_snr_reproduces_bits():
    ch = AwgnBpskChannel(float("inf"), 5, 25 / 31)
    rng = np.random.default_rng(3)
    cw = rng.integers(0, 32, 31)
    y = transmit_awgn_bpsk(cw, ch, rng)
    np.testing.assert_array_equal(y, bpsk_modulate(cw, 5))
    rel = reliability_from_awgn(y, ch)
    np.testing.assert_array_equal(rel.hard_decision(), cw)
    np.testing.assert_allclose(rel.pi[np.arange(31), cw], 1.0)


def test_awgn_zero_observation_gives_uniform_row():
    ch = AwgnBpskChannel(2.0, 4, 0.6)
    rel = reliability_from_awgn(np.zeros(8), ch)
    np.testing.assert_allclose(rel.pi, 1 / 16)


def test_awgn_posterior_matches_brute_force_bayes():
    ch = AwgnBpskChannel(1.0, 4, 9 / 15)
    rng = np.random.default_rng(4)
    y = rng.normal(0, 1.5, 4 * 15)
    rel = reliability_from_awgn(y, ch)
    var = ch.noise_variance
    for i in range(15):
        yi = y[4 * i: 4 * i + 4]
        lik = np.array([np.exp(-np.sum((yi - bpsk_modulate([a], 4)) ** 2) / (2 * var))
                        for a in range(16)])
        np.testing.assert_allclose(rel.pi[i], lik / lik.sum(), atol=1e-12)


def test_awgn_rejects_bad_length():
    with pytest.raises(ValueError):
        reliability_from_awgn(np.zeros(7), AwgnBpskChannel(1.0, 4))


def test_msc_reliability_rows():
    ch = MscChannel(0.9, 256)
    r = np.array([3, 0, 255])
    rel = reliability_from_msc(r, ch)
    np.testing.assert_allclose(rel.pi.sum(axis=1), 1.0, atol=1e-15)
    np.testing.assert_allclose(rel.pi[0, 3], 0.9)
    np.testing.assert_allclose(np.delete(rel.pi[0], 3), 0.1 / 255)
    np.testing.assert_array_equal(rel.hard_decision(), r)


def test_error_model_msc_rows():
    ch = MscChannel(0.9, 32)
    rel = reliability_from_msc(np.arange(31) % 32, ch)
    model = build_error_model(rel, 1)
    np.testing.assert_allclose(model.P, np.tile([0.1, 0.9], (31, 1)), atol=1e-15)
    # identical rows: ties broken by position index
    np.testing.assert_array_equal(model.position_order, np.arange(31))


def test_error_model_uniform_row():
    rel = ReliabilityMatrix.from_posteriors(np.full((1, 4), 0.25))
    model = build_error_model(rel, 2)
    np.testing.assert_allclose(model.P, [[0.5, 0.25, 0.25]])
    with pytest.raises(ValueError):
        build_error_model(rel, 4)


@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_error_model_invariants(seed, ell):
    rng = np.random.default_rng(seed)
    ch = AwgnBpskChannel(rng.uniform(-2, 6), 3, 0.7)
    y = transmit_awgn_bpsk(rng.integers(0, 8, 7), ch, rng)
    rel = reliability_from_awgn(y, ch)
    assert np.all(rel.pi >= 0)
    np.testing.assert_allclose(rel.pi.sum(axis=1), 1.0, atol=1e-9)
    for i in range(rel.n):
        assert sorted(rel.ranking[i]) == list(range(8))
        assert np.all(np.diff(rel.pi[i, rel.ranking[i]]) <= 0)
    model = build_error_model(rel, ell)
    np.testing.assert_allclose(model.P.sum(axis=1), 1.0, atol=1e-9)
    np.testing.assert_allclose(model.P[:, 1:], -np.sort(-rel.pi, axis=1)[:, :ell])
    assert np.all(np.diff(model.P[model.position_order, 1]) >= 0)
    # relabelling the symbols leaves P untouched
    perm = rng.permutation(8)
    relabelled = ReliabilityMatrix.from_posteriors(rel.pi[:, perm])
    np.testing.assert_allclose(build_error_model(relabelled, ell).P, model.P)


def test_error_pattern_letters():
    pi = np.array([[0.7, 0.2, 0.1, 0.0], [0.1, 0.6, 0.3, 0.0], [0.25, 0.25, 0.25, 0.25]])
    model = build_error_model(ReliabilityMatrix.from_posteriors(pi), 2)
    np.testing.assert_array_equal(error_pattern([0, 2, 3], model), [1, 2, 0])


def test_empirical_top_symbol_probability_msc():
    rng = np.random.default_rng(5)
    ch = MscChannel(0.9, 32)
    hits = []
    for _ in range(400):
        cw = rng.integers(0, 32, 31)
        model = build_error_model(reliability_from_msc(transmit_msc(cw, ch, rng), ch), 1)
        hits.append(error_pattern(cw, model) == 1)
    hits = np.concatenate(hits)
    se = np.sqrt(0.9 * 0.1 / hits.size)
    assert abs(hits.mean() - 0.9) < 3 * se
