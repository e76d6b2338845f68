"""Experiment drivers: convergence traces and Monte-Carlo SNR sweeps.

Both modes write plain CSV with fixed headers and 12-significant-digit
floats, so identical specs produce byte-identical files. Progress and the
random stream ids in use go to stderr; data only to the CSV.

Stream layout per realization index r (master seed m): channels come from
stream (m; 0, r) and the swarm search from (m; 1, r), so channel draws
never depend on swarm size, iteration count, or worker count.
"""

import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .bd import bd_design
from .channel import RngStream, gen_channels
from .link import weighted_sum_rate
from .numerics import NumericalFailure
from .pso import R_MODES, PsoParams, optimize
from .system import SystemConfig, validate

__all__ = [
    "CONVERGENCE_HEADER",
    "SWEEP_HEADER",
    "ExperimentSpec",
    "SweepRow",
    "system_config",
    "pso_params",
    "run_convergence",
    "run_sweep",
]

CONVERGENCE_HEADER = "iteration,gbest_wsr_bits"
SWEEP_HEADER = "snr_db,method,mean_wsr_bits,std_wsr_bits,n"

# Default SNR grids per mode, in dB.
DEFAULT_SWEEP_SNRS = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0)
DEFAULT_CONVERGENCE_SNR = (10.0,)

# Per-realization floor: the swarm is seeded with the baseline, so its
# result may not fall below the baseline score beyond numerical fuzz.
_DOMINANCE_SLACK = 1e-9


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything one experiment run depends on."""

    mode: str  # "convergence" or "sweep"
    out_path: str
    users: int = 3
    tx_antennas: int = 6
    rx_antennas: int = 2
    streams: int = 1
    weights: tuple = None  # None means all ones
    noise_power: float = 1.0
    snr_db: tuple = None  # None picks the mode default
    realizations: int = 20
    swarm_size: int = 100
    iters: int = 300
    r_mode: str = R_MODES[0]
    plateau_stop: bool = False
    master_seed: int = 0
    workers: int = 1
    backend: str = "auto"

    def __post_init__(self):
        if self.snr_db is None:
            default = (
                DEFAULT_SWEEP_SNRS
                if self.mode == "sweep"
                else DEFAULT_CONVERGENCE_SNR
            )
            object.__setattr__(self, "snr_db", default)
        else:
            object.__setattr__(
                self, "snr_db", tuple(float(s) for s in self.snr_db)
            )
        if self.weights is not None:
            object.__setattr__(
                self, "weights", tuple(float(w) for w in self.weights)
            )


@dataclass(frozen=True)
class SweepRow:
    """One aggregated line of a sweep CSV."""

    snr_db: float
    method: str  # "bd" or "pso"
    mean_wsr: float
    std_wsr: float
    n: int


def system_config(spec, snr_db):
    """Scenario for one SNR point: power budget = noise * 10^(snr/10)."""
    return SystemConfig(
        users=spec.users,
        tx_antennas=spec.tx_antennas,
        rx_antennas=spec.rx_antennas,
        streams=spec.streams,
        noise_power=spec.noise_power,
        max_power=spec.noise_power * 10.0 ** (snr_db / 10.0),
        weights=spec.weights,
    )


def pso_params(spec):
    return PsoParams(
        swarm_size=spec.swarm_size,
        max_iters=spec.iters,
        r_mode=spec.r_mode,
        plateau_stop=spec.plateau_stop,
    )


def _check_spec(spec, mode):
    if spec.mode != mode:
        raise ValueError(
            "this driver runs mode=%s, the spec says mode=%r" % (mode, spec.mode)
        )
    if not spec.snr_db:
        raise ValueError("snr_db list must not be empty")
    if spec.realizations < 1:
        raise ValueError("realizations must be >= 1, got %d" % spec.realizations)
    if spec.workers < 1:
        raise ValueError("workers must be >= 1, got %d" % spec.workers)
    report = validate(system_config(spec, spec.snr_db[0]))
    if not report.ok:
        raise ValueError("; ".join(report.errors))
    pso_params(spec)  # raises on bad swarm parameters


def _fmt(x):
    return format(float(x), ".12g")


def _write_csv(path, header, rows):
    text = "\n".join([header] + rows) + "\n"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _log(msg):
    print(msg, file=sys.stderr, flush=True)


def run_convergence(spec):
    """Trace the best objective value over iterations, one realization.

    Writes rows ``iteration,gbest_wsr_bits`` for iterations 0..iters and
    returns the trace as a list of (iteration, value) pairs.
    """
    _check_spec(spec, "convergence")
    kernels.use_backend(spec.backend)
    cfg = system_config(spec, spec.snr_db[0])
    root = RngStream(spec.master_seed)
    _log(
        "convergence: %d users, snr %g dB, channel stream (0, 0), "
        "search stream (1, 0)" % (spec.users, spec.snr_db[0])
    )
    channels = gen_channels(cfg, root.child(0, 0))
    result = optimize(cfg, channels, pso_params(spec), root.child(1, 0))
    values = [v for _, v in result.trace]
    if any(b < a for a, b in zip(values, values[1:])):
        raise NumericalFailure("best-value trace decreased; bookkeeping bug")
    rows = ["%d,%s" % (it, _fmt(v)) for it, v in result.trace]
    _write_csv(spec.out_path, CONVERGENCE_HEADER, rows)
    _log("convergence: wrote %d rows to %s" % (len(rows), spec.out_path))
    return result.trace


def _sweep_one_realization(spec, r):
    """Baseline and swarm scores for every SNR at realization r.

    Returns a list of (snr_db, bd_wsr, pso_wsr) triples in snr order.
    """
    kernels.use_backend(spec.backend)
    cfg0 = system_config(spec, spec.snr_db[0])
    root = RngStream(spec.master_seed)
    channels = gen_channels(cfg0, root.child(0, r))
    search_stream = root.child(1, r)
    params = pso_params(spec)
    out = []
    for snr in spec.snr_db:
        cfg = system_config(spec, snr)
        _, bd_precoders, bd_decoders = bd_design(cfg, channels)
        bd_wsr = weighted_sum_rate(cfg, channels, bd_precoders, bd_decoders)
        result = optimize(
            cfg, channels, params, search_stream, seed_precoders=bd_precoders
        )
        if result.value < bd_wsr - _DOMINANCE_SLACK:
            raise NumericalFailure(
                "swarm result %.12g fell below the baseline %.12g at "
                "snr %g dB, realization %d" % (result.value, bd_wsr, snr, r)
            )
        out.append((snr, bd_wsr, result.value))
    return out


def run_sweep(spec):
    """Monte-Carlo mean/std of baseline and swarm scores per SNR.

    Writes one ``bd`` and one ``pso`` row per SNR and returns the rows.
    Realizations may evaluate on parallel workers; results are gathered
    in realization order, so the file does not depend on scheduling.
    """
    _check_spec(spec, "sweep")
    kernels.use_backend(spec.backend)
    per_real = {}
    if spec.workers == 1:
        for r in range(spec.realizations):
            _log(
                "sweep: realization %d/%d, channel stream (0, %d), "
                "search stream (1, %d)" % (r + 1, spec.realizations, r, r)
            )
            per_real[r] = _sweep_one_realization(spec, r)
    else:
        _log(
            "sweep: %d realizations on %d workers, channel streams "
            "(0, 0..%d), search streams (1, 0..%d)"
            % (
                spec.realizations,
                spec.workers,
                spec.realizations - 1,
                spec.realizations - 1,
            )
        )
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            futures = {
                r: pool.submit(_sweep_one_realization, spec, r)
                for r in range(spec.realizations)
            }
            for r in range(spec.realizations):
                per_real[r] = futures[r].result()
                _log("sweep: realization %d/%d done" % (r + 1, spec.realizations))

    rows = []
    out_rows = []
    for i, snr in enumerate(spec.snr_db):
        bd_vals = np.array([per_real[r][i][1] for r in range(spec.realizations)])
        pso_vals = np.array([per_real[r][i][2] for r in range(spec.realizations)])
        for method, vals in (("bd", bd_vals), ("pso", pso_vals)):
            std = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
            row = SweepRow(
                snr_db=snr,
                method=method,
                mean_wsr=float(np.mean(vals)),
                std_wsr=std,
                n=spec.realizations,
            )
            rows.append(row)
            out_rows.append(
                "%s,%s,%s,%s,%d"
                % (_fmt(snr), method, _fmt(row.mean_wsr), _fmt(row.std_wsr), row.n)
            )
    _write_csv(spec.out_path, SWEEP_HEADER, out_rows)
    _log("sweep: wrote %d rows to %s" % (len(out_rows), spec.out_path))
    return rows


def run(spec):
    """Dispatch on spec.mode."""
    if spec.mode == "convergence":
        return run_convergence(spec)
    if spec.mode == "sweep":
        return run_sweep(spec)
    raise ValueError("unknown mode %r" % (spec.mode,))
