"""Seeded random streams and channel statistics."""

import numpy as np
import pytest
from scipy import stats

from beamswarm.channel import RngStream, gen_channels, uniform01
from beamswarm.system import SystemConfig
from util import small_config


def _cfg(users, rx_antennas, tx_antennas):
    return SystemConfig(
        users=users, tx_antennas=tx_antennas, rx_antennas=rx_antennas, streams=1
    )


def test_same_stream_same_draw():
    cfg = small_config()
    a = gen_channels(cfg, RngStream(42, (0, 3)))
    b = gen_channels(cfg, RngStream(42, (0, 3)))
    assert np.array_equal(a, b)


def test_distinct_stream_ids_differ():
    cfg = _cfg(2, 2, 4)
    root = RngStream(42)
    a = gen_channels(cfg, root.child(0, 0))
    b = gen_channels(cfg, root.child(0, 1))
    c = gen_channels(cfg, root.child(1, 0))
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(b, c)


def test_distinct_seeds_differ():
    cfg = _cfg(2, 2, 4)
    a = gen_channels(cfg, RngStream(0))
    b = gen_channels(cfg, RngStream(1))
    assert not np.array_equal(a, b)


def test_child_extends_stream_id():
    assert RngStream(7).child(2, 5).stream_id == (2, 5)
    assert RngStream(7, (1,)).child(4).stream_id == (1, 4)


def test_stream_validation():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(0, (-2,))


def test_channel_shape_and_dtype():
    h = gen_channels(_cfg(4, 3, 5), RngStream(9))
    assert h.shape == (4, 3, 5)
    assert h.dtype == np.complex128


def test_channel_moments():
    # Unit-variance entries: zero mean, variance split evenly between the
    # real and imaginary parts.
    h = gen_channels(_cfg(50, 40, 60), RngStream(11))
    flat = h.ravel()
    assert flat.size >= 100_000
    assert abs(flat.mean()) <= 0.02
    assert abs(np.mean(np.abs(flat) ** 2) - 1.0) <= 0.03
    assert abs(np.var(flat.real) - 0.5) <= 0.02
    assert abs(np.var(flat.imag) - 0.5) <= 0.02


def test_channel_magnitude_is_rayleigh():
    h = gen_channels(_cfg(40, 50, 50), RngStream(13))
    sample = np.abs(h.ravel())
    result = stats.kstest(sample, stats.rayleigh(scale=1.0 / np.sqrt(2.0)).cdf)
    assert result.statistic <= 0.01


def test_uniform01_deterministic_and_bounded():
    a = uniform01(RngStream(5, (2,)), (1000,))
    b = uniform01(RngStream(5, (2,)), (1000,))
    assert np.array_equal(a, b)
    assert a.min() >= 0.0
    assert a.max() < 1.0
    assert abs(a.mean() - 0.5) <= 0.05
