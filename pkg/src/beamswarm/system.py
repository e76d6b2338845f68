"""Scenario description for the multiuser MIMO downlink.

One base station with ``tx_antennas`` transmit antennas serves ``users``
terminals, each with ``rx_antennas`` receive antennas and ``streams`` data
streams. Design variables are per-user precoders (tx_antennas x streams)
and receive filters (rx_antennas x streams); the sum of precoder powers is
capped by ``max_power``.

Array conventions used throughout the package (all complex128):

    channels   (users, rx_antennas, tx_antennas)
    precoders  (users, tx_antennas, streams)
    decoders   (users, rx_antennas, streams)
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SystemConfig",
    "ValidationReport",
    "validate",
    "total_power",
    "channel_shape",
    "precoder_shape",
    "decoder_shape",
]


@dataclass(frozen=True)
class SystemConfig:
    users: int  # number of served terminals, K >= 1
    tx_antennas: int  # antennas at the base station
    rx_antennas: int  # antennas per terminal
    streams: int  # data streams per terminal, <= rx_antennas
    noise_power: float = 1.0  # receiver noise variance per antenna
    max_power: float = 1.0  # total transmit power budget
    weights: tuple = None  # per-user rate weights; None means all ones

    def __post_init__(self):
        if self.weights is None:
            object.__setattr__(self, "weights", (1.0,) * int(self.users))
        else:
            object.__setattr__(
                self, "weights", tuple(float(w) for w in self.weights)
            )

    @property
    def weight_vector(self):
        """Rate weights as a float array of length ``users``."""
        return np.asarray(self.weights, dtype=np.float64)

    @property
    def snr_db(self):
        """Transmit SNR in dB implied by the power budget and noise power."""
        return 10.0 * np.log10(self.max_power / self.noise_power)

    @property
    def can_null_all_interference(self):
        """True when zero-forcing across users can carry all streams.

        Each user must find ``streams`` directions in the null space of the
        other users' stacked channels, which needs
        ``tx_antennas - (users - 1) * rx_antennas >= streams``.
        """
        spare = self.tx_antennas - (self.users - 1) * self.rx_antennas
        return spare >= self.streams


@dataclass
class ValidationReport:
    """Outcome of :func:`validate`: hard errors plus advisory notes."""

    errors: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.errors


def validate(cfg):
    """Check a :class:`SystemConfig` for consistency.

    Returns a :class:`ValidationReport`; ``errors`` are violations that
    make the scenario meaningless, ``notes`` flag legal but noteworthy
    setups (e.g. interference nulling being impossible).
    """
    report = ValidationReport()
    err = report.errors.append

    for name in ("users", "tx_antennas", "rx_antennas", "streams"):
        value = getattr(cfg, name)
        if not isinstance(value, (int, np.integer)) or value < 1:
            err("%s must be a positive integer, got %r" % (name, value))
    if report.errors:
        return report

    if cfg.streams > cfg.rx_antennas:
        err(
            "streams=%d exceeds rx_antennas=%d; each terminal can resolve "
            "at most one stream per receive antenna" % (cfg.streams, cfg.rx_antennas)
        )
    for name in ("noise_power", "max_power"):
        value = getattr(cfg, name)
        if not np.isfinite(value) or value <= 0:
            err("%s must be positive and finite, got %r" % (name, value))
    if len(cfg.weights) != cfg.users:
        err(
            "weights has %d entries but there are %d users"
            % (len(cfg.weights), cfg.users)
        )
    else:
        if any(not np.isfinite(w) or w < 0 for w in cfg.weights):
            err("weights must be finite and non-negative, got %r" % (cfg.weights,))
        elif not any(w > 0 for w in cfg.weights):
            err("at least one weight must be positive")

    if report.ok and not cfg.can_null_all_interference:
        report.notes.append(
            "tx_antennas - (users-1)*rx_antennas = %d < streams=%d: "
            "inter-user interference cannot be fully nulled; the "
            "zero-forcing baseline degrades to a minimum-leakage design"
            % (cfg.tx_antennas - (cfg.users - 1) * cfg.rx_antennas, cfg.streams)
        )
    return report


def total_power(precoders):
    """Total transmit power of a precoder set: sum of squared entries."""
    precoders = np.asarray(precoders)
    return float(np.vdot(precoders, precoders).real)


def channel_shape(cfg):
    return (cfg.users, cfg.rx_antennas, cfg.tx_antennas)


def precoder_shape(cfg):
    return (cfg.users, cfg.tx_antennas, cfg.streams)


def decoder_shape(cfg):
    return (cfg.users, cfg.rx_antennas, cfg.streams)
