"""Reproducible random streams and Rayleigh-fading channel generation.

Reproducibility contract: every random draw in the package comes from an
:class:`RngStream`, which is a master seed plus a tuple of non-negative
integers naming the consumer. Streams with different id tuples are
statistically independent and their draws do not interact, so adding or
reordering consumers (more particles, more workers) never changes what any
existing stream produces.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["RngStream", "gen_channels", "uniform01"]


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible random stream.

    ``generator()`` builds a fresh ``numpy.random.Generator`` seeded from
    ``(master_seed, stream_id)`` only; calling it twice gives two
    generators that produce identical sequences.
    """

    master_seed: int
    stream_id: tuple = ()

    def __post_init__(self):
        seed = self.master_seed
        if (not isinstance(seed, (int, np.integer))) or seed < 0:
            raise ValueError("master_seed must be a non-negative integer, got %r" % (seed,))
        if any((not isinstance(i, (int, np.integer))) or i < 0 for i in self.stream_id):
            raise ValueError(
                "stream_id must contain non-negative integers, got %r"
                % (self.stream_id,)
            )
        object.__setattr__(self, "stream_id", tuple(int(i) for i in self.stream_id))

    def child(self, *indices):
        """Derive a sub-stream by appending indices to the id tuple."""
        return RngStream(self.master_seed, self.stream_id + indices)

    def generator(self):
        seq = np.random.SeedSequence(
            entropy=int(self.master_seed) & 0xFFFFFFFFFFFFFFFF,
            spawn_key=self.stream_id,
        )
        return np.random.default_rng(seq)


def gen_channels(cfg, stream):
    """Draw one i.i.d. Rayleigh channel realization.

    Entries are circularly symmetric complex Gaussian with unit variance
    (real and imaginary parts N(0, 1/2) each).

    Parameters
    ----------
    cfg : SystemConfig
    stream : RngStream
        Stream identifying this realization.

    Returns
    -------
    ndarray, shape (users, rx_antennas, tx_antennas), complex128
    """
    shape = (cfg.users, cfg.rx_antennas, cfg.tx_antennas)
    g = stream.generator()
    re = g.standard_normal(shape)
    im = g.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def uniform01(stream, size=None):
    """Uniform draws on [0, 1) from the given stream."""
    return stream.generator().uniform(size=size)
