"""Backend selection for the fused sum-rate kernels.

Two interchangeable backends implement the hot path of the swarm search
(weighted sum rate with MMSE filters folded in, evaluated over a batch of
candidate precoder sets): the compiled extension ``_core`` and the numpy
reference ``_kernels_np``. The compiled one is preferred when it imported
cleanly; :func:`use_backend` overrides the choice, e.g. to benchmark or
to force the reference implementation.
"""

import numpy as np

from . import _kernels_np
from .numerics import NumericalFailure

try:
    from . import _core
except ImportError:
    _core = None

__all__ = [
    "available_backends",
    "active_backend",
    "use_backend",
    "batch_wsr",
    "wsr_and_decoders",
]

_BACKENDS = {"numpy": _kernels_np}
if _core is not None:
    _BACKENDS["compiled"] = _core

_active = "compiled" if _core is not None else "numpy"


def available_backends():
    """Names of the importable backends, sorted."""
    return tuple(sorted(_BACKENDS))


def active_backend():
    """Name of the backend currently in use."""
    return _active


def use_backend(name):
    """Select a backend by name; ``auto`` restores the default preference.

    Raises ``ValueError`` for unknown or unavailable names. Returns the
    name actually selected.
    """
    global _active
    if name in (None, "auto"):
        _active = "compiled" if _core is not None else "numpy"
        return _active
    if name not in _BACKENDS:
        raise ValueError(
            "unknown kernel backend %r (available: %s)"
            % (name, ", ".join(available_backends()))
        )
    _active = name
    return _active


def _as_inputs(channels, precoders, weights):
    return (
        np.ascontiguousarray(channels, dtype=np.complex128),
        np.ascontiguousarray(precoders, dtype=np.complex128),
        np.ascontiguousarray(weights, dtype=np.float64),
    )


def batch_wsr(channels, f_batch, noise_power, weights):
    """Weighted sum rate of each precoder set in a batch, in bits.

    Parameters
    ----------
    channels : array_like (users, rx_antennas, tx_antennas)
    f_batch : array_like (batch, users, tx_antennas, streams)
    noise_power : float, > 0
    weights : array_like (users,)

    Raises
    ------
    NumericalFailure
        If any evaluation hits a non-positive-definite covariance (only
        possible with non-positive noise power or non-finite input).
    """
    channels, f_batch, weights = _as_inputs(channels, f_batch, weights)
    try:
        return _BACKENDS[_active].batch_wsr(
            channels, f_batch, float(noise_power), weights
        )
    except ArithmeticError as exc:
        raise NumericalFailure(str(exc)) from exc


def wsr_and_decoders(channels, precoders, noise_power, weights):
    """Weighted sum rate and MMSE receive filters for one precoder set."""
    channels, precoders, weights = _as_inputs(channels, precoders, weights)
    try:
        value, filt = _BACKENDS[_active].wsr_and_decoders(
            channels, precoders, float(noise_power), weights
        )
    except ArithmeticError as exc:
        raise NumericalFailure(str(exc)) from exc
    return float(value), filt
