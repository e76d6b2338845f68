"""Numpy reference backend for the fused sum-rate kernels.

Evaluates the weighted sum rate (with MMSE receive filters folded in
analytically) for a whole batch of candidate precoder sets at once. This
is the import-time fallback when the compiled extension is unavailable
and the comparison baseline for the kernel benchmark.

For user k with received precoder images G_l = H_k @ F_l and whitening
A = noise*I + sum_l G_l G_l^H, the MMSE filter is W_k = A^-1 G_k and the
rate collapses to -log2 det(I - G_k^H A^-1 G_k), which is what both
backends compute.
"""

import numpy as np

_LN2 = float(np.log(2.0))


def _eval(channels, f_batch, noise_power):
    """Per-user rates and MMSE filters for a batch of precoder sets.

    Returns (rates, filters): rates (batch, users) in bits, filters
    (batch, users, rx_antennas, streams).
    """
    users, nr, _ = channels.shape
    d = f_batch.shape[3]
    # recv[s, k, l] = H_k @ F_l for batch element s
    recv = np.einsum("krt,sltd->sklrd", channels, f_batch)
    cov = np.einsum("sklrd,sklqd->skrq", recv, recv.conj())
    rx_idx = np.arange(nr)
    cov[..., rx_idx, rx_idx] += noise_power
    user_idx = np.arange(users)
    own = recv[:, user_idx, user_idx]  # (batch, users, nr, d)
    try:
        filt = np.linalg.solve(cov, own)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(
            "interference-plus-noise covariance is singular (noise power "
            "must be positive)"
        ) from exc
    m = np.einsum("skrd,skre->skde", own.conj(), filt)
    m = 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))
    err = np.eye(d) - m
    sign, logdet = np.linalg.slogdet(err)
    if not np.all(np.real(sign) > 0):
        bad = np.argwhere(~(np.real(sign) > 0))[0]
        raise ArithmeticError(
            "rate evaluation failed for batch element %d, user %d: error "
            "matrix not positive definite" % (bad[0], bad[1])
        )
    rates = -logdet / _LN2
    return rates, filt


def batch_wsr(channels, f_batch, noise_power, weights):
    """Weighted sum rate for each precoder set in a batch.

    Parameters
    ----------
    channels : ndarray (users, rx_antennas, tx_antennas), complex128
    f_batch : ndarray (batch, users, tx_antennas, streams), complex128
    noise_power : float, > 0
    weights : ndarray (users,), float64

    Returns
    -------
    ndarray (batch,) of weighted sum rates in bits.
    """
    if f_batch.shape[0] == 0:
        return np.zeros(0)
    rates, _ = _eval(channels, f_batch, noise_power)
    return rates @ weights


def wsr_and_decoders(channels, f, noise_power, weights):
    """Weighted sum rate and MMSE filters for one precoder set.

    Returns (value, filters) with filters shaped (users, rx_antennas,
    streams).
    """
    rates, filt = _eval(channels, f[None], noise_power)
    return float(rates[0] @ weights), np.ascontiguousarray(filt[0])
