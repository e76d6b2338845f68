"""Experiment drivers: CSV output, determinism, and stream layout."""

import numpy as np
import pytest

from beamswarm.experiments import (
    CONVERGENCE_HEADER,
    DEFAULT_CONVERGENCE_SNR,
    DEFAULT_SWEEP_SNRS,
    SWEEP_HEADER,
    ExperimentSpec,
    run,
    run_convergence,
    run_sweep,
    system_config,
)


def _spec(tmp_path, name, **overrides):
    base = dict(
        mode="convergence",
        out_path=str(tmp_path / name),
        swarm_size=8,
        iters=5,
        realizations=2,
        snr_db=(10.0,),
    )
    base.update(overrides)
    return ExperimentSpec(**base)


def test_defaults_fill_in():
    spec = ExperimentSpec(mode="sweep", out_path="x.csv")
    assert spec.snr_db == DEFAULT_SWEEP_SNRS
    conv = ExperimentSpec(mode="convergence", out_path="x.csv")
    assert conv.snr_db == DEFAULT_CONVERGENCE_SNR
    assert spec.realizations == 20
    assert spec.swarm_size == 100
    assert spec.iters == 300


def test_system_config_power_budget():
    spec = ExperimentSpec(mode="sweep", out_path="x.csv", noise_power=2.0)
    cfg = system_config(spec, 20.0)
    assert abs(cfg.max_power - 200.0) <= 1e-9
    assert cfg.noise_power == 2.0
    assert abs(cfg.snr_db - 20.0) <= 1e-12


def test_convergence_row_count_and_shape(tmp_path):
    spec = _spec(tmp_path, "conv.csv", iters=4)
    trace = run_convergence(spec)
    lines = (tmp_path / "conv.csv").read_text().splitlines()
    assert lines[0] == CONVERGENCE_HEADER
    assert len(lines) == 1 + 5  # header + iterations 0..4
    values = []
    for i, line in enumerate(lines[1:]):
        it, val = line.split(",")
        assert int(it) == i
        values.append(float(val))
    assert values == sorted(values)
    # File rows carry 12 significant digits of the returned trace.
    assert np.allclose([v for _, v in trace], values, rtol=1e-11, atol=0.0)


def test_convergence_reruns_byte_identical(tmp_path):
    a = _spec(tmp_path, "a.csv")
    b = _spec(tmp_path, "b.csv")
    run_convergence(a)
    run_convergence(b)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_convergence_seed_changes_output(tmp_path):
    run_convergence(_spec(tmp_path, "a.csv"))
    run_convergence(_spec(tmp_path, "b.csv", master_seed=1))
    assert (tmp_path / "a.csv").read_text() != (tmp_path / "b.csv").read_text()


def test_sweep_rows_and_dominance(tmp_path):
    spec = _spec(tmp_path, "sweep.csv", mode="sweep", snr_db=(0.0, 10.0))
    rows = run_sweep(spec)
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == SWEEP_HEADER
    assert len(lines) == 1 + 4  # (bd, pso) per SNR point
    assert [r.method for r in rows] == ["bd", "pso", "bd", "pso"]
    assert [r.n for r in rows] == [2, 2, 2, 2]
    by_snr = {}
    for r in rows:
        by_snr.setdefault(r.snr_db, {})[r.method] = r.mean_wsr
    for snr, methods in by_snr.items():
        assert methods["pso"] >= methods["bd"] - 1e-9
    # File mirrors the returned rows.
    first = lines[1].split(",")
    assert first[0] == "0"
    assert first[1] == "bd"
    assert abs(float(first[2]) - rows[0].mean_wsr) <= 1e-11 * max(
        1.0, rows[0].mean_wsr
    )


def test_sweep_single_realization_std_zero(tmp_path):
    spec = _spec(tmp_path, "one.csv", mode="sweep", realizations=1)
    rows = run_sweep(spec)
    assert all(r.std_wsr == 0.0 for r in rows)
    assert all(r.n == 1 for r in rows)


def test_sweep_reruns_byte_identical(tmp_path):
    a = _spec(tmp_path, "a.csv", mode="sweep")
    b = _spec(tmp_path, "b.csv", mode="sweep")
    run_sweep(a)
    run_sweep(b)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_sweep_worker_count_does_not_change_output(tmp_path):
    serial = _spec(tmp_path, "serial.csv", mode="sweep", realizations=3)
    parallel = _spec(
        tmp_path, "parallel.csv", mode="sweep", realizations=3, workers=2
    )
    run_sweep(serial)
    run_sweep(parallel)
    assert (tmp_path / "serial.csv").read_bytes() == (
        tmp_path / "parallel.csv"
    ).read_bytes()


def test_sweep_baseline_rows_independent_of_swarm(tmp_path):
    # The channel streams are disjoint from the search streams, so
    # changing the swarm cannot move the baseline scores.
    small = _spec(tmp_path, "small.csv", mode="sweep")
    big = _spec(tmp_path, "big.csv", mode="sweep", swarm_size=13)
    run_sweep(small)
    run_sweep(big)
    rows_small = (tmp_path / "small.csv").read_text().splitlines()
    rows_big = (tmp_path / "big.csv").read_text().splitlines()
    bd_small = [l for l in rows_small if ",bd," in l]
    bd_big = [l for l in rows_big if ",bd," in l]
    pso_small = [l for l in rows_small if ",pso," in l]
    pso_big = [l for l in rows_big if ",pso," in l]
    assert bd_small == bd_big
    assert pso_small != pso_big


def test_run_dispatch(tmp_path):
    run(_spec(tmp_path, "conv.csv"))
    assert (tmp_path / "conv.csv").exists()
    with pytest.raises(ValueError):
        run(_spec(tmp_path, "bad.csv", mode="warmup"))


def test_mode_mismatch_rejected(tmp_path):
    with pytest.raises(ValueError):
        run_convergence(_spec(tmp_path, "x.csv", mode="sweep"))
    with pytest.raises(ValueError):
        run_sweep(_spec(tmp_path, "x.csv", mode="convergence"))


def test_bad_spec_rejected(tmp_path):
    with pytest.raises(ValueError):
        run_convergence(_spec(tmp_path, "x.csv", realizations=0, mode="convergence"))
    with pytest.raises(ValueError):
        run_sweep(_spec(tmp_path, "x.csv", mode="sweep", workers=0))
    with pytest.raises(ValueError):
        run_convergence(_spec(tmp_path, "x.csv", streams=5))


def test_float_format_has_no_padding(tmp_path):
    spec = _spec(tmp_path, "fmt.csv", mode="sweep", realizations=1)
    run_sweep(spec)
    for line in (tmp_path / "fmt.csv").read_text().splitlines()[1:]:
        snr, _, mean, std, _ = line.split(",")
        assert snr == "0" or "." in snr or "e" in snr or snr.isdigit()
        # 12 significant digits maximum, no trailing zeros from padding.
        for token in (mean, std):
            if "." in token:
                digits = token.replace("-", "").replace(".", "").lstrip("0")
                assert len(digits.split("e")[0]) <= 12
