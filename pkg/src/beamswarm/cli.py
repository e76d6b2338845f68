"""Command-line front end.

Configuration comes from a flat key=value file (--config) merged with
command-line flags; flags win. No environment variables are consulted.
Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 I/O
failure.
"""

import argparse
import sys

from . import kernels
from .experiments import ExperimentSpec, run, system_config
from .numerics import NumericalFailure
from .pso import R_MODES
from .system import validate

__all__ = ["SpecError", "build_parser", "parse_spec", "main"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

_MODES = ("convergence", "sweep")


class SpecError(ValueError):
    """Invalid configuration; the message carries per-field lines."""


class _Parser(argparse.ArgumentParser):
    """Argparse that reports errors instead of exiting the process."""

    def error(self, message):
        raise SpecError(message)


def _int(text):
    return int(str(text).strip(), 10)


def _float_list(text):
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if not parts:
        raise ValueError("empty list")
    return tuple(float(p) for p in parts)


def _bool(text):
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean, got %r" % text)


# Canonical option name -> (ExperimentSpec field, converter). Config-file
# keys are the option names with dashes removed (underscores tolerated).
_OPTIONS = {
    "mode": ("mode", str),
    "users": ("users", _int),
    "nt": ("tx_antennas", _int),
    "nr": ("rx_antennas", _int),
    "streams": ("streams", _int),
    "weights": ("weights", _float_list),
    "snr-db": ("snr_db", _float_list),
    "realizations": ("realizations", _int),
    "swarm-size": ("swarm_size", _int),
    "iters": ("iters", _int),
    "seed": ("master_seed", _int),
    "out": ("out_path", str),
    "r-mode": ("r_mode", str),
    "plateau-stop": ("plateau_stop", _bool),
    "workers": ("workers", _int),
    "backend": ("backend", str),
}


def _normalize(key):
    return key.strip().lower().replace("-", "").replace("_", "")


_BY_NORMALIZED = {_normalize(name): name for name in _OPTIONS}


def build_parser():
    parser = _Parser(
        prog="beamswarm",
        description=(
            "Multiuser MIMO downlink transceiver design: block-"
            "diagonalization baseline and particle swarm search, "
            "emitting convergence traces or SNR sweeps as CSV."
        ),
    )
    parser.add_argument("--mode", choices=_MODES, help="experiment to run")
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--users", help="number of users (default 3)")
    parser.add_argument("--nt", help="transmit antennas (default 6)")
    parser.add_argument("--nr", help="receive antennas per user (default 2)")
    parser.add_argument("--streams", help="streams per user (default 1)")
    parser.add_argument(
        "--weights", help="comma list of per-user rate weights (default all 1)"
    )
    parser.add_argument(
        "--snr-db",
        help="comma list of SNRs in dB (default 10 for convergence, "
        "0,5,10,15,20,25 for sweep)",
    )
    parser.add_argument(
        "--realizations", help="Monte-Carlo channel draws (default 20)"
    )
    parser.add_argument("--swarm-size", help="particles in the swarm (default 100)")
    parser.add_argument("--iters", help="search iterations (default 300)")
    parser.add_argument("--seed", help="master random seed (default 0)")
    parser.add_argument("--out", help="output CSV path (required)")
    parser.add_argument(
        "--r-mode",
        choices=R_MODES,
        help="attraction randomness granularity (default %s)" % R_MODES[0],
    )
    parser.add_argument(
        "--plateau-stop",
        action="store_const",
        const="true",
        help="stop early when the best value stalls for 100 iterations",
    )
    parser.add_argument(
        "--workers", help="parallel workers for sweep realizations (default 1)"
    )
    parser.add_argument(
        "--backend",
        choices=("auto",) + kernels.available_backends(),
        help="evaluation kernel backend (default auto)",
    )
    return parser


def _read_config(path):
    """Parse a flat key=value file into spec-field assignments."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise SpecError("cannot read config file %s: %s" % (path, exc)) from exc
    assignments = {}
    problems = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            problems.append("%s:%d: expected key=value" % (path, lineno))
            continue
        key, value = stripped.split("=", 1)
        name = _BY_NORMALIZED.get(_normalize(key))
        if name is None:
            problems.append(
                "%s:%d: unknown key %r" % (path, lineno, key.strip())
            )
            continue
        field, convert = _OPTIONS[name]
        try:
            assignments[field] = convert(value.strip())
        except ValueError as exc:
            problems.append("%s:%d: bad value for %s: %s" % (path, lineno, name, exc))
    if problems:
        raise SpecError("\n".join(problems))
    return assignments


def parse_spec(argv):
    """Merge CLI flags over the config file into an ExperimentSpec.

    Raises SpecError with per-field messages on any problem.
    """
    ns = build_parser().parse_args(argv)
    assignments = {}
    if ns.config is not None:
        assignments.update(_read_config(ns.config))
    problems = []
    for name, (field, convert) in _OPTIONS.items():
        raw = getattr(ns, name.replace("-", "_"))
        if raw is None:
            continue
        try:
            assignments[field] = convert(raw)
        except ValueError as exc:
            problems.append("--%s: %s" % (name, exc))
    if problems:
        raise SpecError("\n".join(problems))

    if assignments.get("mode") is None:
        raise SpecError("--mode is required (convergence or sweep)")
    if assignments["mode"] not in _MODES:
        raise SpecError(
            "mode must be one of %s, got %r" % (", ".join(_MODES), assignments["mode"])
        )
    if not assignments.get("out_path"):
        raise SpecError("--out is required")

    spec = ExperimentSpec(**assignments)

    problems = []
    for field in ("users", "tx_antennas", "rx_antennas", "streams"):
        if getattr(spec, field) < 1:
            problems.append("%s must be >= 1" % field)
    if spec.realizations < 1:
        problems.append("realizations must be >= 1, got %d" % spec.realizations)
    if spec.swarm_size < 1:
        problems.append("swarm-size must be >= 1, got %d" % spec.swarm_size)
    if spec.iters < 1:
        problems.append("iters must be >= 1, got %d" % spec.iters)
    if spec.workers < 1:
        problems.append("workers must be >= 1, got %d" % spec.workers)
    if not spec.snr_db:
        problems.append("snr-db list must not be empty")
    if spec.r_mode not in R_MODES:
        problems.append(
            "r-mode must be one of %s, got %r" % (", ".join(R_MODES), spec.r_mode)
        )
    if spec.backend not in ("auto",) + kernels.available_backends():
        problems.append(
            "backend must be one of auto, %s; got %r"
            % (", ".join(kernels.available_backends()), spec.backend)
        )
    if not problems:
        report = validate(system_config(spec, spec.snr_db[0]))
        problems.extend(report.errors)
        for note in report.notes:
            print("note: %s" % note, file=sys.stderr)
    if problems:
        raise SpecError("\n".join(problems))
    return spec


def main(argv=None):
    """Entry point; returns the process exit code."""
    if argv is None:
        argv = sys.argv[1:]
    try:
        spec = parse_spec(argv)
    except SpecError as exc:
        for line in str(exc).splitlines():
            print("error: %s" % line, file=sys.stderr)
        return EXIT_VALIDATION
    try:
        run(spec)
    except NumericalFailure as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print("i/o failure: %s" % exc, file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
