"""Linear transceiver design for the multiuser MIMO downlink.

A base station with multiple transmit antennas serves several multi-
antenna users at once. This package provides the two designs compared by
the simulator: a block-diagonalization baseline (interference nulling
plus water-filled power loading) and a constrained particle swarm search
that maximizes the weighted sum rate directly under the total-power
constraint, seeded with the baseline so it can only improve on it.

Entry points: the :mod:`beamswarm.cli` command line (``beamswarm``), the
experiment drivers in :mod:`beamswarm.experiments`, and the library
surface re-exported here.
"""

from .bd import (
    BdDecomposition,
    BdDesign,
    BdInfeasibleError,
    PowerAllocation,
    bd_design,
    bd_rate_closed_form,
    water_fill,
)
from .channel import RngStream, gen_channels, uniform01
from .experiments import ExperimentSpec, SweepRow, run_convergence, run_sweep
from .kernels import active_backend, available_backends, use_backend
from .link import (
    DegenerateDecoderError,
    mmse_decoders,
    user_rate,
    weighted_sum_rate,
)
from .numerics import (
    NumericalFailure,
    SingularMatrixError,
    SvdFactors,
    hpd_solve,
    logdet_hpd,
    svd,
)
from .pso import (
    PsoParams,
    PsoResult,
    evaluate,
    optimize,
    project_to_power_ball,
)
from .system import SystemConfig, total_power, validate

__version__ = "0.1.0"

__all__ = [
    "BdDecomposition",
    "BdDesign",
    "BdInfeasibleError",
    "DegenerateDecoderError",
    "ExperimentSpec",
    "NumericalFailure",
    "PowerAllocation",
    "PsoParams",
    "PsoResult",
    "RngStream",
    "SingularMatrixError",
    "SvdFactors",
    "SweepRow",
    "SystemConfig",
    "active_backend",
    "available_backends",
    "bd_design",
    "bd_rate_closed_form",
    "evaluate",
    "gen_channels",
    "hpd_solve",
    "logdet_hpd",
    "mmse_decoders",
    "optimize",
    "project_to_power_ball",
    "run_convergence",
    "run_sweep",
    "svd",
    "total_power",
    "uniform01",
    "use_backend",
    "user_rate",
    "validate",
    "water_fill",
    "weighted_sum_rate",
]
