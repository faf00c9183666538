"""Harness tests: trial scoring, paired sweeps, byte-level determinism
across worker counts, report round trips."""

import os

import numpy as np
import pytest

from ntk.errors import ContractViolationError
from ntk.harness import (CSV_HEADER, default_criterion, load_report,
                         render_report, render_svg, run_trial, runtime_sweep,
                         success_sweep, trial_seed, worker_count)
from ntk.model import ProblemInstance, SensingMatrix, gen_instance
from ntk.solvers import AlphaPolicy, SolverConfig


def small_cfg(**kwargs):
    defaults = dict(stagnation_enabled=False)
    defaults.update(kwargs)
    return SolverConfig(**defaults)


class TestTrialSeed:
    def test_deterministic(self):
        assert trial_seed(7, 10, 3) == trial_seed(7, 10, 3)

    def test_distinct_across_grid(self):
        seeds = {trial_seed(7, k, t) for k in range(1, 40) for t in range(200)}
        assert len(seeds) == 39 * 200


class TestRunTrial:
    def test_identity_sensing_immediate_success(self):
        inst = gen_instance(30, 60, 3, 0.0, 5)
        rec = run_trial("ntp", inst, small_cfg(), 1e-5)
        assert rec.success
        assert rec.iterations >= 1
        assert rec.relative_error <= 1e-5
        assert rec.wall_time_ms > 0.0

    def test_unknown_algorithm(self):
        inst = gen_instance(10, 20, 2, 0.0, 1)
        with pytest.raises(ContractViolationError):
            run_trial("nope", inst, small_cfg(), 1e-5)

    def test_requires_truth(self):
        sensing = SensingMatrix(matrix=np.eye(4), normalized=True, seed=0)
        inst = ProblemInstance(sensing=sensing, y=np.ones(4), k=1)
        with pytest.raises(ContractViolationError):
            run_trial("iht", inst, small_cfg(), 1e-5)

    def test_noisy_criterion(self):
        assert default_criterion(0.0) == 1e-5
        assert default_criterion(0.01) == 1e-3
        inst = gen_instance(60, 180, 3, 0.001, 7)
        rec = run_trial("ntp", inst, small_cfg(max_outer_iterations=60), 1e-3)
        assert rec.success

    def test_iterations_is_first_hit(self):
        inst = gen_instance(40, 80, 2, 0.0, 11)
        rec = run_trial("omp", inst, small_cfg(), 1e-5)
        assert rec.success
        assert rec.iterations <= 2


class TestSuccessSweep:
    def test_pairing_and_shape(self):
        sweep = success_sweep(["ntp", "htp"], 30, 120, 2, 6, 2, 4, 0.0, 9,
                              small_cfg())
        assert len(sweep.rows) == 2 * 3
        ks = [row.k for row in sweep.rows if row.algorithm == "ntp"]
        assert ks == [2, 4, 6]
        for row in sweep.rows:
            assert row.trials == 4
            assert 0.0 <= row.success_rate <= 1.0
            assert row.mean_time_ms == 0.0  # timing zeroed by default

    def test_easy_regime_omp(self):
        sweep = success_sweep(["omp"], 30, 60, 1, 1, 1, 1, 0.0, 3, small_cfg())
        assert sweep.rows[0].success_rate == 1.0

    def test_rate_trend_roughly_monotone(self):
        sweep = success_sweep(["ntp"], 50, 200, 4, 28, 4, 10, 0.0, 13,
                              small_cfg())
        rates = {row.k: row.success_rate for row in sweep.rows}
        ks = sorted(rates)
        for k in ks:
            if k + 8 in rates:
                assert rates[k] >= rates[k + 8] - 0.1

    def test_determinism_same_seed(self, tmp_path):
        args = (["ntp", "iht"], 30, 120, 2, 8, 3, 5, 0.0, 21, small_cfg())
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        render_report(success_sweep(*args), first)
        render_report(success_sweep(*args), second)
        assert first.read_bytes() == second.read_bytes()

    def test_thread_count_does_not_change_bytes(self, tmp_path, monkeypatch):
        args = (["ntp", "htp"], 30, 120, 2, 8, 3, 5, 0.0, 33, small_cfg())
        outputs = []
        for threads in ("1", "4"):
            monkeypatch.setenv("NTK_THREADS", threads)
            path = tmp_path / f"t{threads}.csv"
            render_report(success_sweep(*args), path)
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1]

    def test_validation(self):
        with pytest.raises(ContractViolationError):
            success_sweep(["nope"], 10, 20, 1, 2, 1, 1, 0.0, 1, small_cfg())
        with pytest.raises(ContractViolationError):
            success_sweep(["ntp"], 10, 20, 3, 2, 1, 1, 0.0, 1, small_cfg())
        with pytest.raises(ContractViolationError):
            success_sweep(["ntp"], 10, 20, 1, 2, 1, 0, 0.0, 1, small_cfg())


class TestWorkerCount:
    def test_default_is_one(self, monkeypatch):
        monkeypatch.delenv("NTK_THREADS", raising=False)
        assert worker_count() == 1

    def test_env_parsing(self, monkeypatch):
        monkeypatch.setenv("NTK_THREADS", "4")
        assert worker_count() == 4
        monkeypatch.setenv("NTK_THREADS", "zero")
        with pytest.raises(ContractViolationError):
            worker_count()
        monkeypatch.setenv("NTK_THREADS", "0")
        with pytest.raises(ContractViolationError):
            worker_count()


class TestRuntimeSweep:
    def test_times_are_positive_and_projection_costs_more(self):
        # Unit step keeps both variants running the full fixed budget so
        # the comparison is per-iteration work, not iteration counts; the
        # first sweep warms numpy/BLAS and is discarded.
        cfg = small_cfg(step_length=1.0, residual_tolerance=0.0,
                        max_outer_iterations=30)
        runtime_sweep(["nt", "ntp"], 60, [240], [0.1], 2, 3, cfg)
        sweep = runtime_sweep(["nt", "ntp"], 60, [240], [0.1], 12, 3, cfg)
        times = {row.algorithm: row.mean_time_ms for row in sweep.rows}
        assert times["nt"] > 0.0
        assert times["ntp"] > 0.0
        assert times["ntp"] >= times["nt"]

    def test_beta_validation(self):
        with pytest.raises(ContractViolationError):
            runtime_sweep(["nt"], 40, [160], [0.8], 2, 3, small_cfg())


class TestReports:
    def test_empty_sweep_refused(self, tmp_path):
        from ntk.harness import SweepResult
        with pytest.raises(ContractViolationError):
            render_report(SweepResult(rows=()), tmp_path / "x.csv")

    def test_csv_round_trip_exact(self, tmp_path):
        sweep = success_sweep(["ntp", "omp"], 20, 60, 1, 5, 2, 3, 0.001, 17,
                              small_cfg(max_outer_iterations=40))
        path = tmp_path / "r.csv"
        render_report(sweep, path)
        assert path.read_text().splitlines()[0] == CSV_HEADER
        back = load_report(path)
        assert back == sweep

    def test_svg_structure(self, tmp_path):
        sweep = success_sweep(["ntp", "htp", "omp"], 20, 60, 1, 5, 2, 2, 0.0,
                              19, small_cfg())
        path = tmp_path / "r.svg"
        render_svg(sweep, path)
        text = path.read_text()
        assert text.count("<polyline") == 3
        assert 'viewBox="0 0 800 600"' in text
        for token in ("ntp", "htp", "omp"):
            assert f">{token}</text>" in text

    def test_unwritable_path_raises_oserror(self, tmp_path):
        sweep = success_sweep(["omp"], 20, 60, 1, 1, 1, 1, 0.0, 23,
                              small_cfg())
        missing = tmp_path / "no" / "such" / "dir" / "r.csv"
        with pytest.raises(OSError):
            render_report(sweep, missing)

    def test_load_checks_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("nope\n1\n")
        with pytest.raises(ContractViolationError):
            load_report(path)
