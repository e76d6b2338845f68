"""Constrained particle swarm search over precoder sets.

A swarm of candidate precoder sets explores the total-power ball. The
first particle is seeded with the block-diagonalization solution, the
rest start as random full-power sets; velocities follow the classic
inertia/cognitive/social rule, positions that leave the power ball are
radially projected back onto it, and the global best can only improve,
so the search never falls below its seed.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .bd import bd_design
from .numerics import NumericalFailure
from .system import precoder_shape, total_power

__all__ = [
    "R_MODES",
    "PsoParams",
    "SwarmState",
    "PsoResult",
    "project_to_power_ball",
    "update_velocity",
    "update_position",
    "attraction_randoms",
    "evaluate",
    "optimize",
]

# How the attraction randoms r1, r2 are drawn each iteration: one scalar
# per particle (default, the classic rule) or one draw per matrix entry.
R_MODES = ("scalar-per-particle", "per-entry")

# Slack allowed on the power constraint when verifying feasibility.
_FEAS_ATOL = 1e-9


@dataclass(frozen=True)
class PsoParams:
    """Search hyperparameters.

    Defaults follow common practice for constriction-free swarms:
    inertia 0.7 with cognitive and social factors 1.494.
    """

    swarm_size: int = 100
    max_iters: int = 300
    inertia: float = 0.7  # weight on the previous velocity
    cognitive: float = 1.494  # pull toward the particle's own best
    social: float = 1.494  # pull toward the swarm's best
    r_mode: str = "scalar-per-particle"
    plateau_stop: bool = False  # stop early when the best stops moving
    plateau_window: int = 100
    plateau_tol: float = 1e-9

    def __post_init__(self):
        if self.swarm_size < 1:
            raise ValueError("swarm_size must be >= 1, got %d" % self.swarm_size)
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1, got %d" % self.max_iters)
        for name in ("inertia", "cognitive", "social"):
            if getattr(self, name) < 0:
                raise ValueError("%s must be >= 0" % name)
        if self.r_mode not in R_MODES:
            raise ValueError(
                "r_mode must be one of %s, got %r" % (", ".join(R_MODES), self.r_mode)
            )
        if self.plateau_window < 1:
            raise ValueError("plateau_window must be >= 1")


@dataclass
class SwarmState:
    """Mutable state of the swarm at the end of an iteration.

    Positions, velocities and personal bests are stacked along the first
    axis: shape (swarm_size, users, tx_antennas, streams).
    """

    positions: np.ndarray
    velocities: np.ndarray
    pbest_positions: np.ndarray
    pbest_values: np.ndarray
    gbest_position: np.ndarray
    gbest_value: float
    iteration: int = 0


@dataclass(frozen=True)
class PsoResult:
    """Outcome of :func:`optimize`."""

    precoders: np.ndarray  # best precoder set found
    value: float  # its weighted sum rate, bits
    decoders: np.ndarray  # MMSE receive filters for the best set
    trace: list  # (iteration, best value) pairs, non-decreasing
    state: SwarmState = field(repr=False, default=None)


def project_to_power_ball(precoders, max_power):
    """Map a precoder set onto the total-power ball.

    Feasible sets are returned unchanged (same object); infeasible ones
    are scaled radially so the total power equals ``max_power``, which is
    the Euclidean projection for a point outside the ball. The feasibility
    test carries a tiny relative slack so that a point the projection
    itself just placed on the boundary is recognized as feasible instead
    of being rescaled again.
    """
    power = total_power(precoders)
    if power <= max_power * (1.0 + 1e-12):
        return precoders
    return precoders * math.sqrt(max_power / power)


def update_velocity(velocities, positions, pbest_positions, gbest_position, params, r1, r2):
    """Inertia plus randomized attraction toward personal and global bests.

    ``r1`` and ``r2`` are uniform draws from :func:`attraction_randoms`
    (or fixed values in tests); they multiply entrywise after
    broadcasting, so the same code serves one particle or a whole stack.
    """
    return (
        params.inertia * velocities
        + params.cognitive * r1 * (pbest_positions - positions)
        + params.social * r2 * (gbest_position - positions)
    )


def update_position(positions, velocities):
    """Free move: position plus velocity, entrywise."""
    return positions + velocities


def attraction_randoms(stream, params, swarm_shape):
    """Per-iteration uniform draws for the two attraction terms.

    Returns ``(r1, r2)`` shaped to broadcast against a particle stack of
    ``swarm_shape``: scalars per particle in the default mode (column i
    of the draw belongs to particle i), or full per-entry arrays.
    """
    g = stream.generator()
    swarm_size = swarm_shape[0]
    if params.r_mode == "scalar-per-particle":
        u = g.uniform(size=(2, swarm_size))
        trail = (1,) * (len(swarm_shape) - 1)
        u = u.reshape((2, swarm_size) + trail)
    else:
        u = g.uniform(size=(2,) + tuple(swarm_shape))
    return u[0], u[1]


def evaluate(cfg, channels, precoders):
    """Weighted sum rate of one precoder set with MMSE receive filters.

    Returns ``(value, decoders)``; this is the same quantity as
    ``link.weighted_sum_rate`` with ``link.mmse_decoders``, computed by
    the fused kernel backend.
    """
    return kernels.wsr_and_decoders(
        channels, precoders, cfg.noise_power, cfg.weight_vector
    )


def _random_full_power_set(cfg, stream):
    g = stream.generator()
    shape = precoder_shape(cfg)
    raw = (g.standard_normal(shape) + 1j * g.standard_normal(shape)) / np.sqrt(2.0)
    power = total_power(raw)
    if power == 0.0:
        return raw
    return raw * math.sqrt(cfg.max_power / power)


def _batch_values(cfg, channels, positions, context):
    try:
        return kernels.batch_wsr(
            channels, positions, cfg.noise_power, cfg.weight_vector
        )
    except NumericalFailure as exc:
        raise NumericalFailure("%s (%s)" % (exc, context)) from exc


def optimize(cfg, channels, params, stream, seed_precoders=None):
    """Run the swarm search on one channel realization.

    Parameters
    ----------
    cfg : SystemConfig
    channels : ndarray (users, rx_antennas, tx_antennas)
    params : PsoParams
    stream : RngStream
        Root stream for this run; initialization and per-iteration draws
        use fixed child ids, so results are reproducible and independent
        of scheduling.
    seed_precoders : ndarray, optional
        First particle's position. Defaults to the block-diagonalization
        design, making the baseline value a floor for the result.

    Returns
    -------
    PsoResult
        The trace holds (iteration, best value) for iteration 0 through
        the last one executed and is non-decreasing by construction.
    """
    channels = np.asarray(channels, dtype=np.complex128)
    if seed_precoders is None:
        _, seed_precoders, _ = bd_design(cfg, channels)
    else:
        seed_precoders = np.asarray(seed_precoders, dtype=np.complex128)
        if seed_precoders.shape != precoder_shape(cfg):
            raise ValueError(
                "seed precoders have shape %r, expected %r"
                % (seed_precoders.shape, precoder_shape(cfg))
            )
        if total_power(seed_precoders) > cfg.max_power + _FEAS_ATOL:
            raise ValueError("seed precoders exceed the power budget")

    swarm = params.swarm_size
    positions = np.empty((swarm,) + precoder_shape(cfg), dtype=np.complex128)
    positions[0] = seed_precoders
    for i in range(1, swarm):
        positions[i] = _random_full_power_set(cfg, stream.child(0, i))
    velocities = np.zeros_like(positions)

    values = _batch_values(cfg, channels, positions, "initial evaluation")
    pbest_positions = positions.copy()
    pbest_values = values.copy()
    best = int(np.argmax(pbest_values))
    gbest_value = float(pbest_values[best])
    gbest_position = pbest_positions[best].copy()
    trace = [(0, gbest_value)]
    trace_values = [gbest_value]

    last_iter = 0
    for it in range(1, params.max_iters + 1):
        r1, r2 = attraction_randoms(stream.child(1, it), params, positions.shape)
        velocities = update_velocity(
            velocities, positions, pbest_positions, gbest_position, params, r1, r2
        )
        positions = update_position(positions, velocities)

        powers = np.einsum("sktd,sktd->s", positions.conj(), positions).real
        over = powers > cfg.max_power
        if over.any():
            positions[over] *= np.sqrt(cfg.max_power / powers[over])[:, None, None, None]
            powers = np.einsum(
                "sktd,sktd->s", positions.conj(), positions
            ).real
        if np.any(powers > cfg.max_power + _FEAS_ATOL):
            raise NumericalFailure(
                "particle %d infeasible after projection at iteration %d"
                % (int(np.argmax(powers)), it)
            )

        values = _batch_values(cfg, channels, positions, "iteration %d" % it)
        improved = values > pbest_values
        if improved.any():
            pbest_positions[improved] = positions[improved]
            pbest_values[improved] = values[improved]
            best = int(np.argmax(pbest_values))
            if pbest_values[best] > gbest_value:
                gbest_value = float(pbest_values[best])
                gbest_position = pbest_positions[best].copy()
        trace.append((it, gbest_value))
        trace_values.append(gbest_value)
        last_iter = it

        if (
            params.plateau_stop
            and it >= params.plateau_window
            and trace_values[-1] - trace_values[-1 - params.plateau_window]
            <= params.plateau_tol
        ):
            break

    _, decoders = evaluate(cfg, channels, gbest_position)
    state = SwarmState(
        positions=positions,
        velocities=velocities,
        pbest_positions=pbest_positions,
        pbest_values=pbest_values,
        gbest_position=gbest_position,
        gbest_value=gbest_value,
        iteration=last_iter,
    )
    return PsoResult(
        precoders=gbest_position,
        value=gbest_value,
        decoders=decoders,
        trace=trace,
        state=state,
    )
