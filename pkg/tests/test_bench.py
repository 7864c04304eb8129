"""Benchmark harness: metrics, method mapping, sweeps, selection stats."""

from __future__ import annotations

import numpy as np
import pytest

from dcen.bench import (
    DEFAULT_SELECT_TOL,
    METHODS,
    MatrixKind,
    SUCCESS_THRESHOLD,
    _float_key,
    _method_params,
    relative_error,
    reconstruction_snr,
    run_noise_sweep,
    run_success_sweep,
    run_variable_selection,
    solve_with_method,
)
from dcen.core import DcenParams, Problem


class TestMetrics:
    def test_relative_error_hand_value(self):
        assert relative_error(np.array([1.0, 1.0]), np.array([1.0, 0.0])) == 1.0
        assert relative_error(np.array([0.0, 0.0]), np.array([3.0, 4.0])) == 1.0

    def test_relative_error_zero_truth_raises(self):
        with pytest.raises(ValueError):
            relative_error(np.ones(2), np.zeros(2))

    def test_reconstruction_snr_hand_value(self):
        truth = np.array([10.0, 0.0])
        x = np.array([10.0, 0.1])
        assert reconstruction_snr(x, truth) == pytest.approx(40.0, abs=1e-10)

    def test_reconstruction_snr_exact_raises(self):
        with pytest.raises(ValueError):
            reconstruction_snr(np.ones(3), np.ones(3))

    def test_float_key_is_stable_and_injective_on_distinct_floats(self):
        assert _float_key(0.1) == _float_key(0.1)
        assert _float_key(0.1) != _float_key(0.2)
        assert _float_key(0.0) != _float_key(-0.0)
        assert isinstance(_float_key(3.5), int)


class TestMethodParams:
    base = DcenParams(lam=0.5, gamma=0.8, alpha=0.7, rho=2.0)

    def test_dca_passes_through(self):
        assert _method_params("dca", self.base, 10, None) is self.base

    def test_admm_gets_sweep_budget(self):
        p = _method_params("admm", self.base, 10, None)
        assert p.max_outer == 50  # 5n default sweep budget
        assert (p.gamma, p.alpha) == (0.8, 0.7)
        assert _method_params("admm", self.base, 10, 7).max_outer == 7

    def test_convex_degenerations(self):
        lasso = _method_params("lasso", self.base, 10, 20)
        assert (lasso.gamma, lasso.alpha) == (1.0, 0.0)
        en = _method_params("en", self.base, 10, 20)
        assert (en.gamma, en.alpha) == (0.8, 0.0)
        l1ml2 = _method_params("l1ml2", self.base, 10, 20)
        assert (l1ml2.gamma, l1ml2.alpha) == (1.0, 0.7)
        for p in (lasso, en, l1ml2):
            assert p.lam == 0.5 and p.rho == 2.0 and p.max_outer == 20

    def test_unknown_method_raises(self):
        with pytest.raises(ValueError, match="unknown method"):
            _method_params("newton", self.base, 10, None)

    def test_methods_tuple_contents(self):
        assert set(METHODS) == {"dca", "admm", "lasso", "en", "l1ml2"}


class TestSolveWithMethod:
    def test_all_methods_run_on_identity(self):
        problem = Problem(a=np.eye(6), b=np.array([5.0, 0, 0, 0, 0, 0]))
        params = DcenParams(lam=0.1, gamma=0.9, alpha=0.5, rho=1.0, max_outer=100)
        for method in METHODS:
            x = solve_with_method(method, problem, params, warm=False)
            assert x.shape == (6,)
            assert abs(x[0] - 5.0) < 0.5
            assert np.all(np.abs(x[1:]) < 1e-3)


def tiny_sweep(**overrides):
    kwargs = dict(
        matrix_kind=MatrixKind.DCT_OVERSAMPLED,
        grid=[1, 2],
        trials=3,
        method="dca",
        params=DcenParams(lam=1e-6, gamma=0.95, alpha=0.9, rho=1e-4, max_outer=20),
        seed=7,
        m=20,
        n=60,
        f_factor=4.0,
        warm=True,
    )
    kwargs.update(overrides)
    return run_success_sweep(**kwargs)


class TestSuccessSweep:
    def test_row_structure(self):
        rows = tiny_sweep()
        assert [r["s"] for r in rows] == [1, 2]
        for row in rows:
            assert row["method"] == "dca" and row["trials"] == 3
            assert 0.0 <= row["success_rate"] <= 1.0
            assert row["q25_rel_err"] <= row["median_rel_err"] <= row["q75_rel_err"]
            assert np.isfinite(row["mean_rel_err"])

    def test_determinism_and_string_kind_coercion(self):
        rows1 = tiny_sweep()
        rows2 = tiny_sweep(matrix_kind="dct")
        assert rows1 == rows2

    def test_parallel_matches_inline(self):
        rows1 = tiny_sweep(jobs=1)
        rows2 = tiny_sweep(jobs=2)
        assert rows1 == rows2

    def test_seed_changes_results(self):
        assert tiny_sweep() != tiny_sweep(seed=8)

    def test_gaussian_kind_and_noise_path(self):
        rows = tiny_sweep(matrix_kind="gaussian", m=30, snr_db=20.0, grid=[2])
        assert len(rows) == 1 and np.isfinite(rows[0]["mean_rel_err"])

    def test_empty_grid_raises_and_zero_trials_empty(self):
        with pytest.raises(ValueError):
            tiny_sweep(grid=[])
        assert tiny_sweep(trials=0) == []


class TestNoiseSweep:
    def test_structure_and_best_lam_in_grid(self):
        grid = [1e-2, 1e-1]
        rows = run_noise_sweep(
            snr_levels=[20.0],
            trials=2,
            methods=["lasso", "en"],
            params=DcenParams(lam=1e-2, gamma=0.9, alpha=0.5, rho=1.0),
            lam_grid=grid,
            seed=5,
            m=20,
            n=50,
            f_factor=5.0,
            s=2,
        )
        assert len(rows) == 2
        for row in rows:
            assert row["snr_db"] == 20.0
            assert row["best_lam"] in grid
            assert np.isfinite(row["mean_recon_snr_db"])
        assert {row["method"] for row in rows} == {"lasso", "en"}

    def test_validation(self):
        params = DcenParams(lam=1e-2)
        with pytest.raises(ValueError):
            run_noise_sweep([], 1, ["lasso"], params, [1e-2], 0)
        with pytest.raises(ValueError):
            run_noise_sweep([20.0], 1, ["lasso"], params, [], 0)


class TestVariableSelection:
    def test_summary_fields(self):
        params = DcenParams(lam=100.0, gamma=1.0, alpha=0.0, rho=10.0)
        out = run_variable_selection(
            trials=3,
            methods=["lasso"],
            select_tol=DEFAULT_SELECT_TOL,
            seed=11,
            method_params={"lasso": params},
        )
        summary = out["lasso"]
        assert len(summary.per_true_var_prob) == 3
        assert all(0.0 <= p <= 1.0 for p in summary.per_true_var_prob)
        assert summary.avg_total >= summary.avg_false
        assert summary.noise_sel_rate == pytest.approx(summary.avg_false / 97.0)

    def test_determinism(self):
        params = DcenParams(lam=100.0, gamma=1.0, alpha=0.0, rho=10.0)
        args = dict(trials=2, methods=["lasso"], select_tol=1e-4, seed=3,
                    method_params={"lasso": params})
        assert run_variable_selection(**args) == run_variable_selection(**args)

    def test_select_tol_validation(self):
        with pytest.raises(ValueError):
            run_variable_selection(1, ["lasso"], 0.0, 0,
                                   {"lasso": DcenParams(lam=1.0)})

    def test_success_threshold_constant(self):
        assert SUCCESS_THRESHOLD == 1e-3
