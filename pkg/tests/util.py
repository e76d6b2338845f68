"""Shared helpers for the test suite."""

import numpy as np

from beamswarm import SystemConfig


def crandn(rng, *shape):
    """Circularly symmetric complex normal draws, unit variance."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_unitary(rng, n):
    q, r = np.linalg.qr(crandn(rng, n, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channels(rng, cfg):
    return crandn(rng, cfg.users, cfg.rx_antennas, cfg.tx_antennas)


def random_precoders(rng, cfg, power=None):
    """Random precoder set, optionally scaled to an exact total power."""
    f = crandn(rng, cfg.users, cfg.tx_antennas, cfg.streams)
    if power is not None:
        current = float(np.vdot(f, f).real)
        f = f * np.sqrt(power / current)
    return f


def random_hpd(rng, n, jitter=0.5):
    a = crandn(rng, n, n)
    return a @ a.conj().T + jitter * np.eye(n)


def small_config(**overrides):
    base = dict(
        users=3, tx_antennas=6, rx_antennas=2, streams=1, max_power=10.0
    )
    base.update(overrides)
    return SystemConfig(**base)
