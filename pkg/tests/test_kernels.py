"""Batched rate kernels: numpy backend, compiled backend, and the registry."""

import numpy as np
import pytest

from beamswarm import kernels
from beamswarm.link import mmse_decoders, weighted_sum_rate
from beamswarm.numerics import NumericalFailure
from util import crandn, random_channels, random_precoders, small_config

BACKENDS = kernels.available_backends()
HAS_COMPILED = "compiled" in BACKENDS


@pytest.fixture(autouse=True)
def _restore_backend():
    yield
    kernels.use_backend("auto")


def _batch(rng, cfg, size):
    h = random_channels(rng, cfg)
    fs = np.stack(
        [random_precoders(rng, cfg, power=cfg.max_power) for _ in range(size)]
    )
    return h, fs


@pytest.mark.parametrize("backend", BACKENDS)
def test_batch_wsr_matches_general_evaluator(backend):
    kernels.use_backend(backend)
    rng = np.random.default_rng(0)
    for streams in (1, 2):
        cfg = small_config(streams=streams, weights=(0.1, 0.2, 0.7))
        h, fs = _batch(rng, cfg, 8)
        got = kernels.batch_wsr(h, fs, cfg.noise_power, cfg.weight_vector)
        assert got.shape == (8,)
        for s in range(8):
            w = mmse_decoders(cfg, h, fs[s])
            expected = weighted_sum_rate(cfg, h, fs[s], w)
            assert abs(got[s] - expected) <= 1e-9 * max(1.0, expected)


@pytest.mark.parametrize("backend", BACKENDS)
def test_wsr_and_decoders_matches_mmse(backend):
    kernels.use_backend(backend)
    rng = np.random.default_rng(1)
    cfg = small_config(streams=2)
    h = random_channels(rng, cfg)
    f = random_precoders(rng, cfg, power=cfg.max_power)
    value, decoders = kernels.wsr_and_decoders(
        h, f, cfg.noise_power, cfg.weight_vector
    )
    reference = mmse_decoders(cfg, h, f)
    assert decoders.shape == reference.shape
    assert np.max(np.abs(decoders - reference)) <= 1e-10
    expected = weighted_sum_rate(cfg, h, f, reference)
    assert abs(value - expected) <= 1e-9 * max(1.0, expected)


@pytest.mark.skipif(not HAS_COMPILED, reason="compiled backend not built")
def test_backends_agree():
    rng = np.random.default_rng(2)
    for streams in (1, 2):
        cfg = small_config(streams=streams, weights=(0.2, 0.3, 0.5))
        h, fs = _batch(rng, cfg, 16)
        kernels.use_backend("numpy")
        a = kernels.batch_wsr(h, fs, cfg.noise_power, cfg.weight_vector)
        kernels.use_backend("compiled")
        b = kernels.batch_wsr(h, fs, cfg.noise_power, cfg.weight_vector)
        assert np.max(np.abs(a - b)) <= 1e-10 * max(1.0, float(np.max(a)))


@pytest.mark.skipif(not HAS_COMPILED, reason="compiled backend not built")
def test_backend_decoders_agree():
    rng = np.random.default_rng(3)
    cfg = small_config(streams=2)
    h = random_channels(rng, cfg)
    f = random_precoders(rng, cfg, power=cfg.max_power)
    kernels.use_backend("numpy")
    va, wa = kernels.wsr_and_decoders(h, f, cfg.noise_power, cfg.weight_vector)
    kernels.use_backend("compiled")
    vb, wb = kernels.wsr_and_decoders(h, f, cfg.noise_power, cfg.weight_vector)
    assert abs(va - vb) <= 1e-10 * max(1.0, va)
    assert np.max(np.abs(wa - wb)) <= 1e-10


@pytest.mark.parametrize("backend", BACKENDS)
def test_zero_precoders_zero_rate(backend):
    kernels.use_backend(backend)
    cfg = small_config()
    h = random_channels(np.random.default_rng(4), cfg)
    fs = np.zeros((3, 3, 6, 1), dtype=complex)
    got = kernels.batch_wsr(h, fs, cfg.noise_power, cfg.weight_vector)
    assert np.all(got == 0.0)


@pytest.mark.parametrize("backend", BACKENDS)
def test_empty_batch(backend):
    kernels.use_backend(backend)
    cfg = small_config()
    h = random_channels(np.random.default_rng(5), cfg)
    fs = np.zeros((0, 3, 6, 1), dtype=complex)
    got = kernels.batch_wsr(h, fs, cfg.noise_power, cfg.weight_vector)
    assert got.shape == (0,)


@pytest.mark.parametrize("backend", BACKENDS)
def test_singular_covariance_raises(backend):
    # Zero noise with rank-deficient signals leaves nothing invertible;
    # both backends must fail loudly with the package error type.
    kernels.use_backend(backend)
    cfg = small_config()
    h = random_channels(np.random.default_rng(6), cfg)
    fs = np.zeros((1, 3, 6, 1), dtype=complex)
    with pytest.raises(NumericalFailure):
        kernels.batch_wsr(h, fs, 0.0, cfg.weight_vector)


def test_backend_selection_roundtrip():
    default = kernels.active_backend()
    kernels.use_backend("numpy")
    assert kernels.active_backend() == "numpy"
    kernels.use_backend("auto")
    assert kernels.active_backend() == default
    with pytest.raises(ValueError):
        kernels.use_backend("cuda")


def test_available_backends_contains_numpy():
    assert "numpy" in BACKENDS
