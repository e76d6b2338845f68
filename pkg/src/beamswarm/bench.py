"""Micro-benchmark for the evaluation kernel backends.

Times ``batch_wsr`` (the hot path of the swarm search) on a few scenario
shapes for every importable backend, checks that the backends agree, and
prints a small table. Run as ``python -m beamswarm.bench``.
"""

import argparse
import sys
import timeit

import numpy as np

from . import kernels
from .channel import RngStream, gen_channels
from .pso import PsoParams, optimize
from .system import SystemConfig

# (users, tx_antennas, rx_antennas, streams) shapes worth timing.
_SCENARIOS = (
    (3, 6, 2, 1),
    (3, 6, 2, 2),
    (3, 4, 2, 2),
)


def _instance(users, nt, nr, d, swarm, seed=7):
    cfg = SystemConfig(
        users=users, tx_antennas=nt, rx_antennas=nr, streams=d, max_power=10.0
    )
    root = RngStream(seed)
    channels = gen_channels(cfg, root.child(0, 0))
    g = root.child(2, 0).generator()
    shape = (swarm, users, nt, d)
    batch = (g.standard_normal(shape) + 1j * g.standard_normal(shape)) / np.sqrt(2)
    return cfg, channels, np.ascontiguousarray(batch)


def _time_batch(backend, cfg, channels, batch, repeat):
    kernels.use_backend(backend)
    call = lambda: kernels.batch_wsr(
        channels, batch, cfg.noise_power, cfg.weight_vector
    )
    call()  # warm up
    best = min(timeit.repeat(call, number=1, repeat=repeat))
    return best, call()


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="python -m beamswarm.bench",
        description="Compare the evaluation kernel backends.",
    )
    parser.add_argument(
        "--swarm-size", type=int, default=100, help="batch size (default 100)"
    )
    parser.add_argument(
        "--repeat", type=int, default=30, help="timing repeats (default 30)"
    )
    parser.add_argument(
        "--optimize",
        action="store_true",
        help="also time a short end-to-end search per backend",
    )
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    print("backends:", ", ".join(backends))
    if "compiled" not in backends:
        print("note: compiled extension not importable; numpy only")
    print()
    header = "%-14s %8s" + " %14s" * len(backends) + "  %s"
    row = "%-14s %8d" + " %11.1f us" * len(backends) + "  %.3g"
    print(header % (("system", "batch") + backends + ("max |diff| bits",)))
    for users, nt, nr, d in _SCENARIOS:
        cfg, channels, batch = _instance(users, nt, nr, d, args.swarm_size)
        times = []
        values = []
        for backend in backends:
            best, vals = _time_batch(backend, cfg, channels, batch, args.repeat)
            times.append(best * 1e6)
            values.append(vals)
        diff = 0.0
        for vals in values[1:]:
            diff = max(diff, float(np.max(np.abs(vals - values[0]))))
        label = "(%dx%d,%d)^%d" % (nt, nr, d, users)
        print(row % ((label, len(batch)) + tuple(times) + (diff,)))

    if args.optimize:
        print()
        params = PsoParams(swarm_size=40, max_iters=50)
        for users, nt, nr, d in _SCENARIOS:
            cfg, channels, _ = _instance(users, nt, nr, d, 1)
            line = ["optimize (%dx%d,%d)^%d:" % (nt, nr, d, users)]
            for backend in backends:
                kernels.use_backend(backend)
                start = timeit.default_timer()
                result = optimize(
                    cfg, channels, params, RngStream(11).child(1, 0)
                )
                elapsed = timeit.default_timer() - start
                line.append(
                    "%s %.3f s (wsr %.4f)" % (backend, elapsed, result.value)
                )
            print("  ".join(line))

    kernels.use_backend("auto")
    return 0


if __name__ == "__main__":
    sys.exit(main())
