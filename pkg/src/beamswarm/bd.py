"""Block-diagonalization baseline with water-filled power loading.

Each user's precoder is restricted to directions that (as far as the
antenna budget allows) null the channels of all other users: the transmit
basis comes from the trailing right-singular vectors of the stacked
interfering channels, the per-user link is then diagonalized by an SVD of
the effective channel, and power is poured over the resulting scalar
subchannels by a dual-variable water-filling.

When the antenna counts cannot support full nulling the same construction
yields the minimum-leakage basis; the closed-form rate is then a fiction
and callers are pointed at the general evaluator in :mod:`.link`.
"""

from dataclasses import dataclass

import numpy as np

from .numerics import NumericalFailure, svd
from .system import total_power

__all__ = [
    "BdInfeasibleError",
    "BdDecomposition",
    "PowerAllocation",
    "BdDesign",
    "interference_matrix",
    "null_space_basis",
    "effective_svd",
    "water_fill",
    "bd_design",
    "bd_rate_closed_form",
]

_LN2 = float(np.log(2.0))

# Dual-variable bisection: stop when the power residual is below this times
# the budget, or after the iteration cap.
_BISECT_RTOL = 1e-10
_BISECT_MAX_ITERS = 200


class BdInfeasibleError(NumericalFailure):
    """The closed-form rate was requested for a design whose interference
    leakage is not negligible; score it with link.weighted_sum_rate."""


@dataclass(frozen=True)
class BdDecomposition:
    """Per-user factors of the block-diagonalizing construction.

    Attributes
    ----------
    tx_basis : ndarray, shape (users, tx_antennas, streams)
        Orthonormal columns spanning each user's transmit subspace (the
        trailing right-singular directions of the stacked interferers).
    mix : ndarray, shape (users, streams, streams)
        Unitary mixing that diagonalizes the effective channel inside the
        transmit subspace.
    gains : ndarray, shape (users, streams)
        Singular values of each effective channel, non-increasing.
    rx_basis : ndarray, shape (users, rx_antennas, streams)
        Matched receive filters (left singular vectors).
    leakage : ndarray, shape (users,)
        Frobenius norm of (stacked interferers) @ tx_basis per user; zero
        when nulling is exact.
    interferer_norms : ndarray, shape (users,)
        Frobenius norm of each user's stacked interferer matrix, the
        reference scale for ``leakage``.
    """

    tx_basis: np.ndarray
    mix: np.ndarray
    gains: np.ndarray
    rx_basis: np.ndarray
    leakage: np.ndarray
    interferer_norms: np.ndarray


@dataclass(frozen=True)
class PowerAllocation:
    """Water-filling output: per-subchannel powers and the dual variable.

    ``powers`` has shape (users, streams); ``dual`` is the water-level
    multiplier (0 in the degenerate all-gains-zero case, where
    ``degenerate`` is set and all powers are zero).
    """

    powers: np.ndarray
    dual: float
    degenerate: bool = False

    @property
    def total(self):
        return float(np.sum(self.powers))


@dataclass(frozen=True)
class BdDesign:
    """A complete baseline design: decomposition plus power loading."""

    decomposition: BdDecomposition
    allocation: PowerAllocation


def interference_matrix(channels, k):
    """Stack the channels of every user except ``k`` (ascending order).

    Returns a ((users-1)*rx_antennas, tx_antennas) matrix; for a single
    user the stack is empty (0 rows), which :func:`null_space_basis`
    treats as "no interference to avoid".
    """
    channels = np.asarray(channels, dtype=np.complex128)
    users, _, nt = channels.shape
    if not 0 <= k < users:
        raise ValueError("user index %d out of range for %d users" % (k, users))
    others = [channels[l] for l in range(users) if l != k]
    if not others:
        return np.zeros((0, nt), dtype=np.complex128)
    return np.concatenate(others, axis=0)


def null_space_basis(h_int, d, align_to=None):
    """Orthonormal basis of ``d`` transmit directions that avoid ``h_int``.

    The basis comes from the trailing right-singular vectors of
    ``h_int``: the directions with the smallest leakage into the stacked
    interferers. When the null space is exactly ``d``-dimensional (or
    smaller), the last ``d`` right-singular vectors are returned as is.
    When it is wider and ``align_to`` (the served user's own channel) is
    given, the ``d`` directions inside the null space that carry the most
    energy toward that user are selected; leakage is still exactly zero,
    only the rotation inside the null space changes. An empty stack (0
    rows) leaves the whole transmit space available.
    """
    h_int = np.asarray(h_int, dtype=np.complex128)
    nt = h_int.shape[1]
    if d > nt:
        raise ValueError("requested %d basis columns from a %d-dim space" % (d, nt))
    if h_int.shape[0] == 0:
        null = np.eye(nt, dtype=np.complex128)
    else:
        factors = svd(h_int)
        sigma = factors.sigma
        tol = 1e-10 * max(1.0, float(sigma[0]) if sigma.size else 0.0)
        rank = int(np.sum(sigma > tol))
        null = factors.v[:, rank:]
    if null.shape[1] < d:
        # Not enough null directions: fall back to the d least-leaking ones.
        return factors.v[:, nt - d :]
    if null.shape[1] == d or align_to is None:
        return null[:, null.shape[1] - d :]
    align_to = np.asarray(align_to, dtype=np.complex128)
    rotation = svd(align_to @ null).v[:, :d]
    return null @ rotation


def effective_svd(h_k, b_k):
    """Diagonalize one user's channel restricted to its transmit basis.

    Parameters
    ----------
    h_k : ndarray, shape (rx_antennas, tx_antennas)
    b_k : ndarray, shape (tx_antennas, streams)

    Returns
    -------
    mix : ndarray, shape (streams, streams)
        Right singular vectors of ``h_k @ b_k`` (input mixing).
    gains : ndarray, shape (streams,)
        Leading singular values, non-increasing.
    rx : ndarray, shape (rx_antennas, streams)
        Leading left singular vectors (matched receive filters).
    """
    h_k = np.asarray(h_k, dtype=np.complex128)
    b_k = np.asarray(b_k, dtype=np.complex128)
    d = b_k.shape[1]
    factors = svd(h_k @ b_k)
    gains = np.zeros(d)
    m = min(d, factors.sigma.shape[0])
    gains[:m] = factors.sigma[:m]
    return factors.v[:, :d], gains, factors.u[:, :d]


def water_fill(cfg, gains):
    """Split the power budget over parallel scalar subchannels.

    Maximizes ``sum_k w_k * sum_i log2(1 + gains[k,i]^2 p[k,i] / noise)``
    subject to ``sum p = max_power`` and ``p >= 0``. The optimality
    condition gives ``p[k,i] = max(0, w_k/(dual*ln2) - noise/gains^2)``;
    the dual variable is found by bisection on the monotone total-power
    map, then tightened by re-solving the water level in closed form on
    the active set so the budget is met to near machine precision.

    Parameters
    ----------
    cfg : SystemConfig
    gains : array_like, shape (users, streams)
        Effective amplitude gains, non-negative.

    Returns
    -------
    PowerAllocation
        All-zero with ``degenerate=True`` when no positively weighted
        subchannel has a positive gain.
    """
    gains = np.asarray(gains, dtype=np.float64)
    if gains.shape != (cfg.users, cfg.streams):
        raise ValueError(
            "gains shape %r does not match (users, streams)=(%d, %d)"
            % (gains.shape, cfg.users, cfg.streams)
        )
    if np.any(gains < 0) or not np.all(np.isfinite(gains)):
        raise ValueError("gains must be finite and non-negative")

    weights = cfg.weight_vector[:, None]  # (users, 1)
    usable = (gains > 0) & (weights > 0)
    if not usable.any():
        return PowerAllocation(
            powers=np.zeros_like(gains), dual=0.0, degenerate=True
        )

    budget = cfg.max_power
    # p(dual) = max(0, slope/dual - floor) on usable subchannels.
    slope = np.where(usable, weights / _LN2, 0.0)
    with np.errstate(divide="ignore"):
        floor = np.where(usable, cfg.noise_power / np.square(gains), np.inf)

    def powers_at(dual):
        p = slope / dual - floor
        return np.where(usable & (p > 0), p, 0.0)

    dual_hi = float(np.max(np.where(usable, slope / floor, 0.0)))
    dual_lo = dual_hi
    for _ in range(_BISECT_MAX_ITERS):
        if float(np.sum(powers_at(dual_lo))) >= budget:
            break
        dual_lo /= 2.0
    dual = dual_hi
    for _ in range(_BISECT_MAX_ITERS):
        dual = 0.5 * (dual_lo + dual_hi)
        excess = float(np.sum(powers_at(dual))) - budget
        if abs(excess) <= _BISECT_RTOL * budget:
            break
        if excess > 0:
            dual_lo = dual
        else:
            dual_hi = dual
    powers = powers_at(dual)

    # Freeze the active set and recompute the water level exactly; keep it
    # only if it reproduces the same active set (it always should, the
    # bisection has already localized the breakpoints).
    active = powers > 0
    if active.any():
        exact = float(np.sum(slope[active])) / (
            budget + float(np.sum(floor[active]))
        )
        refined = powers_at(exact)
        if np.array_equal(refined > 0, active):
            return PowerAllocation(powers=refined, dual=exact)
    return PowerAllocation(powers=powers, dual=float(dual))


def decompose(cfg, channels):
    """Compute the transmit/receive factors for every user."""
    channels = np.asarray(channels, dtype=np.complex128)
    users, nr, nt = channels.shape
    d = cfg.streams
    tx_basis = np.empty((users, nt, d), dtype=np.complex128)
    mix = np.empty((users, d, d), dtype=np.complex128)
    gains = np.empty((users, d))
    rx_basis = np.empty((users, nr, d), dtype=np.complex128)
    leakage = np.empty(users)
    interferer_norms = np.empty(users)
    for k in range(users):
        h_int = interference_matrix(channels, k)
        basis = null_space_basis(h_int, d, align_to=channels[k])
        tx_basis[k] = basis
        leakage[k] = np.linalg.norm(h_int @ basis)
        interferer_norms[k] = np.linalg.norm(h_int)
        mix[k], gains[k], rx_basis[k] = effective_svd(channels[k], basis)
    return BdDecomposition(
        tx_basis=tx_basis,
        mix=mix,
        gains=gains,
        rx_basis=rx_basis,
        leakage=leakage,
        interferer_norms=interferer_norms,
    )


def bd_design(cfg, channels):
    """Full baseline design for one channel realization.

    Returns
    -------
    design : BdDesign
    precoders : ndarray, shape (users, tx_antennas, streams)
        ``tx_basis @ mix @ diag(sqrt(p))`` per user.
    decoders : ndarray, shape (users, rx_antennas, streams)
        The matched receive filters from the decomposition.
    """
    decomp = decompose(cfg, channels)
    allocation = water_fill(cfg, decomp.gains)
    scale = np.sqrt(allocation.powers)  # (users, streams)
    precoders = decomp.tx_basis @ decomp.mix * scale[:, None, :]
    design = BdDesign(decomposition=decomp, allocation=allocation)
    used = total_power(precoders)
    if used > cfg.max_power + 1e-8:
        raise NumericalFailure(
            "baseline design exceeds the power budget: %.3e > %.3e"
            % (used, cfg.max_power)
        )
    return design, precoders, decomp.rx_basis.copy()


def bd_rate_closed_form(cfg, design):
    """Weighted sum rate of a leakage-free baseline design, in bits.

    ``sum_k w_k sum_i log2(1 + gains[k,i]^2 p[k,i] / noise)``. Valid only
    when the design actually nulls inter-user interference; otherwise the
    formula overstates the rate and an error points the caller to the
    general evaluator.
    """
    decomp = design.decomposition
    threshold = 1e-6 * decomp.interferer_norms
    if np.any(decomp.leakage > threshold):
        worst = int(np.argmax(decomp.leakage - threshold))
        raise BdInfeasibleError(
            "interference leakage %.3e for user %d is not negligible; "
            "score this design with link.weighted_sum_rate instead"
            % (decomp.leakage[worst], worst)
        )
    snr_terms = (
        np.square(decomp.gains) * design.allocation.powers / cfg.noise_power
    )
    per_user = np.sum(np.log1p(snr_terms), axis=1) / _LN2
    return float(np.dot(cfg.weight_vector, per_user))
