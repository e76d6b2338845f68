"""Receive filtering and rate evaluation for arbitrary precoder sets.

This is the general scoring route: it builds explicit interference-plus-
noise covariances and evaluates each user's rate as a difference of
log-determinants, so it stays valid when residual inter-user interference
is present. The fused kernels used inside the swarm search are checked
against this module, never the other way around.
"""

import numpy as np

from .numerics import NumericalFailure, SingularMatrixError, hpd_solve, logdet_hpd

__all__ = [
    "DegenerateDecoderError",
    "mmse_decoders",
    "interference_covariance",
    "user_rate",
    "weighted_sum_rate",
]

_LN2 = float(np.log(2.0))


class DegenerateDecoderError(NumericalFailure):
    """A receive filter produced a singular interference-plus-noise
    covariance while its signal term was nonzero."""


def _received_grams(cfg, channels, precoders, k):
    """H_k F_l for all l, shape (users, rx_antennas, streams)."""
    return channels[k] @ precoders


def mmse_decoders(cfg, channels, precoders):
    """Linear MMSE receive filters for every user.

    For user k the filter is ``(sum_l H_k F_l F_l^H H_k^H + noise I)^-1
    H_k F_k``; with positive noise power the inverse always exists.

    Returns
    -------
    ndarray, shape (users, rx_antennas, streams), complex128
    """
    channels = np.asarray(channels, dtype=np.complex128)
    precoders = np.asarray(precoders, dtype=np.complex128)
    nr = cfg.rx_antennas
    out = np.empty((cfg.users, nr, cfg.streams), dtype=np.complex128)
    eye = np.eye(nr)
    for k in range(cfg.users):
        recv = _received_grams(cfg, channels, precoders, k)
        cov = cfg.noise_power * eye
        for g in recv:
            cov = cov + g @ g.conj().T
        out[k] = hpd_solve(cov, recv[k])
    return out


def interference_covariance(cfg, channels, precoders, decoders, k):
    """Filtered interference-plus-noise covariance of user ``k``.

    ``W_k^H (sum_{l != k} H_k F_l F_l^H H_k^H + noise I) W_k``, Hermitian
    positive semidefinite of shape (streams, streams). It is singular
    exactly when the receive filter loses rank.
    """
    wk = np.asarray(decoders[k], dtype=np.complex128)
    cov = cfg.noise_power * np.eye(cfg.rx_antennas)
    for l in range(cfg.users):
        if l == k:
            continue
        g = channels[k] @ precoders[l]
        cov = cov + g @ g.conj().T
    return wk.conj().T @ cov @ wk


def user_rate(cfg, channels, precoders, decoders, k):
    """Achievable rate of user ``k`` in bits, given fixed linear filters.

    ``log2 det(R_z + S) - log2 det(R_z)`` where ``R_z`` is the filtered
    interference-plus-noise covariance and ``S`` the filtered signal
    gram. By convention the rate is zero when the user's precoder or
    receive filter is all zero (nothing is transmitted or detected).

    Raises
    ------
    DegenerateDecoderError
        If ``R_z`` is singular while the signal term is nonzero: the
        filter dropped into a subspace where the rate is ill-defined.
    """
    wk = np.asarray(decoders[k], dtype=np.complex128)
    fk = np.asarray(precoders[k], dtype=np.complex128)
    if not wk.any() or not fk.any():
        return 0.0
    rz = interference_covariance(cfg, channels, precoders, decoders, k)
    half = wk.conj().T @ channels[k] @ fk
    sig = half @ half.conj().T
    if not sig.any():
        return 0.0
    try:
        return (logdet_hpd(rz + sig) - logdet_hpd(rz)) / _LN2
    except SingularMatrixError as exc:
        raise DegenerateDecoderError(
            "interference-plus-noise covariance is singular for user %d "
            "with a nonzero signal term" % k
        ) from exc


def weighted_sum_rate(cfg, channels, precoders, decoders):
    """Weighted sum of the per-user rates, in bits."""
    total = 0.0
    for k, w in enumerate(cfg.weights):
        total += w * user_rate(cfg, channels, precoders, decoders, k)
    return float(total)
