"""Command-line front end.

Subcommands: solve, bench, mri, gen, prox-check, report-conditions.

Config precedence is flags > config file > built-in defaults; the fully
resolved config is echoed into every run's manifest.json, and --config also
accepts a previous manifest (its "config" block is reused), so any recorded
run can be replayed verbatim.  Exit codes: 0 on success/convergence, 2 when a
solver stops on its iteration cap, 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from .admm import solve_admm
from .bench import (
    MatrixKind,
    relative_error,
    run_noise_sweep,
    run_success_sweep,
    run_variable_selection,
)
from .core import DcenParams, Problem, Termination, eval_objective
from .datagen import (
    SparseSignalSpec,
    ValueDist,
    gen_correlated_design,
    gen_dct_matrix,
    gen_gaussian_matrix,
    gen_sparse_signal,
    radial_mask,
    shepp_logan,
    warm_start,
)
from .dca import solve_dca
from .io import (
    build_manifest,
    load_bin,
    load_csv,
    load_json,
    save_bin,
    save_csv,
    save_json,
    save_pgm,
)
from .prox import prox_dcen, prox_objective
from .theory import condition_report
from .tv import make_kspace, reconstruct_dcen_tv

__all__ = ["main"]

_PARAM_KEYS = (
    "lam", "gamma", "alpha", "rho",
    "eps_abs", "eps_rel", "eps_machine", "dca_eps",
    "max_outer", "max_inner",
)

_SOLVE_DEFAULTS = {
    "method": "dca", "a": None, "b": None, "truth": None, "warm": False,
    "out_dir": ".",
    "lam": 1e-3, "gamma": 0.8, "alpha": 0.7, "rho": 1.0,
    "eps_abs": 1e-6, "eps_rel": 1e-6, "eps_machine": 1e-6, "dca_eps": 1e-6,
    "max_outer": 50, "max_inner": None,
}

_BENCH_DEFAULTS = {
    "experiment": "success", "trials": 20, "seed": 0, "jobs": None,
    "out_dir": ".", "format": "csv", "warm": True, "admm_sweeps": None,
    "matrix": "dct", "m": 64, "n": 1024, "f_factor": 20.0, "corr_r": 0.5,
    "s_grid": [2, 4, 6], "min_sep": None, "method": "dca", "snr_db": None,
    "s": 10,
    "snr_levels": [10.0, 20.0, 30.0, 40.0, 50.0],
    "methods": ["dca", "lasso"],
    "selection_methods": ["admm", "lasso", "en"],
    "lam_grid": [1e-3, 3e-3, 1e-2, 3e-2, 1e-1],
    "select_tol": 1e-4,
    "lam": 1e-7, "gamma": 0.95, "alpha": 0.9, "rho": 1e-5,
    "eps_abs": 1e-6, "eps_rel": 1e-6, "eps_machine": 1e-6, "dca_eps": 1e-6,
    "max_outer": 50, "max_inner": None,
    "method_overrides": {
        "admm":  {"lam": 30.0, "gamma": 0.8, "alpha": 0.7, "rho": 10.0},
        "lasso": {"lam": 100.0, "gamma": 1.0, "alpha": 0.0, "rho": 10.0},
        "en":    {"lam": 30.0, "gamma": 0.8, "alpha": 0.0, "rho": 10.0},
    },
}

_MRI_DEFAULTS = {
    "size": 128, "lines": 16, "out_dir": ".",
    "gamma": 0.999, "alpha": 0.3, "mu": 80.0, "beta": 2.0,
    "tv_outer": 8, "tv_inner": 50,
}

_GEN_DEFAULTS = {
    "kind": "dct", "seed": 0, "out_dir": ".", "format": "csv",
    "m": 64, "n": 1024, "f_factor": 20.0, "corr_r": 0.5,
    "s": 4, "min_sep": 1, "value_dist": "standard_normal",
    "size": 128, "lines": 16,
}

_PROX_CHECK_DEFAULTS = {
    "draws": 1000, "n": 3, "seed": 0, "step": 1.0,
    "gamma": 0.8, "alpha": 0.7, "perturbations": 200, "scale": 3.0,
}

_CONDITIONS_DEFAULTS = {
    "s": 10, "gamma": 0.8, "alpha": 0.7, "p": 0.0, "big_m": 1.0,
    "delta_3s": 0.1, "delta_4s": 0.1, "r": 0.0,
    "a": None, "b": None, "lam": 1e-3, "out_dir": None,
}


def _float_or_none(text: str):
    return None if text.lower() == "none" else float(text)


def _int_or_none(text: str):
    return None if text.lower() == "none" else int(text)


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


def _str_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _add_param_flags(sub: argparse.ArgumentParser, lam_default_doc: str) -> None:
    sub.add_argument("--lambda", dest="lam", type=float,
                     help=f"regularization weight (default {lam_default_doc})")
    sub.add_argument("--gamma", type=float, help="mixing weight in (0, 1)")
    sub.add_argument("--alpha", type=float, help="difference strength in [0, 1)")
    sub.add_argument("--rho", type=float, help="ADMM penalty")
    sub.add_argument("--eps-abs", type=float)
    sub.add_argument("--eps-rel", type=float)
    sub.add_argument("--eps-machine", type=float)
    sub.add_argument("--dca-eps", type=float)
    sub.add_argument("--max-outer", type=int)
    sub.add_argument("--max-inner", type=_int_or_none)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcen",
        description="Sparse recovery with the DCEN regularizer: solvers, "
                    "benchmarks, TV reconstruction, and recovery-condition reports.",
        argument_default=argparse.SUPPRESS,
    )
    subs = parser.add_subparsers(dest="command", required=True)

    solve = subs.add_parser("solve", argument_default=argparse.SUPPRESS,
                            help="solve one instance from CSV/DCEN1 inputs")
    solve.add_argument("--method", choices=["dca", "admm"])
    solve.add_argument("--a", help="sensing-matrix file (.csv or .bin)")
    solve.add_argument("--b", help="observation-vector file")
    solve.add_argument("--truth", help="optional ground-truth vector file")
    solve.add_argument("--warm", action="store_true",
                       help="initialize from the LASSO solution")
    solve.add_argument("--out-dir")
    solve.add_argument("--config", dest="config_path")
    _add_param_flags(solve, "1e-3")

    bench = subs.add_parser("bench", argument_default=argparse.SUPPRESS,
                            help="run an experiment sweep")
    bench.add_argument("--experiment", choices=["success", "noise", "selection"])
    bench.add_argument("--trials", type=int)
    bench.add_argument("--seed", type=int)
    bench.add_argument("--jobs", type=int,
                       help="worker processes (default: logical cores; 1 = inline)")
    bench.add_argument("--out-dir")
    bench.add_argument("--format", choices=["csv", "json"])
    bench.add_argument("--warm", action="store_true")
    bench.add_argument("--no-warm", dest="warm", action="store_false")
    bench.add_argument("--admm-sweeps", type=_int_or_none)
    bench.add_argument("--matrix", choices=["dct", "gaussian"])
    bench.add_argument("--m", type=int)
    bench.add_argument("--n", type=int)
    bench.add_argument("--f-factor", type=float)
    bench.add_argument("--corr-r", type=float)
    bench.add_argument("--s-grid", type=_int_list, help="comma-separated sparsities")
    bench.add_argument("--s", type=int, help="sparsity for the noise sweep")
    bench.add_argument("--min-sep", type=_int_or_none)
    bench.add_argument("--method", choices=["dca", "admm", "lasso", "en", "l1ml2"])
    bench.add_argument("--snr-db", type=_float_or_none)
    bench.add_argument("--snr-levels", type=_float_list)
    bench.add_argument("--methods", type=_str_list)
    bench.add_argument("--selection-methods", dest="selection_methods", type=_str_list)
    bench.add_argument("--lambda-grid", dest="lam_grid", type=_float_list)
    bench.add_argument("--select-tol", type=float)
    bench.add_argument("--config", dest="config_path")
    _add_param_flags(bench, "1e-7")

    mri = subs.add_parser("mri", argument_default=argparse.SUPPRESS,
                          help="phantom reconstruction from radial k-space data")
    mri.add_argument("--size", type=int)
    mri.add_argument("--lines", type=int)
    mri.add_argument("--gamma", type=float)
    mri.add_argument("--alpha", type=float)
    mri.add_argument("--mu", type=_float_or_none)
    mri.add_argument("--beta", type=float)
    mri.add_argument("--tv-outer", type=int)
    mri.add_argument("--tv-inner", type=int)
    mri.add_argument("--out-dir")
    mri.add_argument("--config", dest="config_path")

    gen = subs.add_parser("gen", argument_default=argparse.SUPPRESS,
                          help="write seeded experiment inputs to disk")
    gen.add_argument("--kind", choices=["dct", "gaussian", "sparse", "phantom",
                                        "mask", "correlated"])
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out-dir")
    gen.add_argument("--format", choices=["csv", "bin"])
    gen.add_argument("--m", type=int)
    gen.add_argument("--n", type=int)
    gen.add_argument("--f-factor", type=float)
    gen.add_argument("--corr-r", type=float)
    gen.add_argument("--s", type=int)
    gen.add_argument("--min-sep", type=int)
    gen.add_argument("--value-dist", choices=["standard_normal", "rademacher_scaled"])
    gen.add_argument("--size", type=int)
    gen.add_argument("--lines", type=int)
    gen.add_argument("--config", dest="config_path")

    prox_check = subs.add_parser("prox-check", argument_default=argparse.SUPPRESS,
                                 help="randomized optimality audit of the "
                                      "closed-form proximal operator")
    prox_check.add_argument("--draws", type=int)
    prox_check.add_argument("--n", type=int)
    prox_check.add_argument("--seed", type=int)
    prox_check.add_argument("--step", type=float)
    prox_check.add_argument("--gamma", type=float)
    prox_check.add_argument("--alpha", type=float)
    prox_check.add_argument("--perturbations", type=int)
    prox_check.add_argument("--scale", type=float)
    prox_check.add_argument("--config", dest="config_path")

    conditions = subs.add_parser("report-conditions", argument_default=argparse.SUPPRESS,
                                 help="recovery-condition constants as JSON")
    conditions.add_argument("--s", type=int)
    conditions.add_argument("--gamma", type=float)
    conditions.add_argument("--alpha", type=float)
    conditions.add_argument("--p", type=float)
    conditions.add_argument("--big-m", type=float)
    conditions.add_argument("--delta-3s", dest="delta_3s", type=float)
    conditions.add_argument("--delta-4s", dest="delta_4s", type=float)
    conditions.add_argument("--r", type=float)
    conditions.add_argument("--a", help="optional matrix file for mu_g/stationarity")
    conditions.add_argument("--b", help="observation file (with --a)")
    conditions.add_argument("--lambda", dest="lam", type=float)
    conditions.add_argument("--out-dir")
    conditions.add_argument("--config", dest="config_path")

    return parser


def _resolve_config(args: argparse.Namespace, defaults: dict, command: str) -> dict:
    cli = {k: v for k, v in vars(args).items() if k not in ("command", "config_path")}
    config = dict(defaults)
    path = getattr(args, "config_path", None)
    if path is not None:
        loaded = load_json(path)
        if not isinstance(loaded, dict):
            raise ValueError(f"config file {path} must hold a JSON object")
        if "config" in loaded and "command" in loaded:  # a manifest: replay it
            if loaded["command"] != command:
                raise ValueError(
                    f"manifest {path} records command {loaded['command']!r}, "
                    f"not {command!r}"
                )
            loaded = loaded["config"]
        unknown = sorted(set(loaded) - set(defaults))
        if unknown:
            raise ValueError(f"unknown config keys for {command}: {unknown}")
        config.update(loaded)
    config.update(cli)
    return config


def _cli_params(config: dict) -> DcenParams:
    gamma = config["gamma"]
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"--gamma must lie strictly inside (0, 1), got {gamma}")
    kwargs = {k: config[k] for k in _PARAM_KEYS if k in config}
    return DcenParams(**kwargs)


def _load_array(path: str, ndmin: int) -> np.ndarray:
    if str(path).endswith(".bin"):
        return load_bin(path)
    return load_csv(path, ndmin=ndmin)


def _out_dir(config: dict) -> Path:
    out = Path(config["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_solve(config: dict) -> int:
    if not config.get("a") or not config.get("b"):
        raise ValueError("solve needs --a and --b input files")
    params = _cli_params(config)
    a = _load_array(config["a"], ndmin=2)
    b = _load_array(config["b"], ndmin=1)
    truth = _load_array(config["truth"], ndmin=1) if config.get("truth") else None
    problem = Problem(a=a, b=b, truth=truth)

    tic = time.perf_counter()
    x0 = warm_start(problem, params) if config["warm"] else None
    if config["method"] == "dca":
        report = solve_dca(problem, params, x0)
    else:
        report = solve_admm(problem, params, x0)
    wall_ms = (time.perf_counter() - tic) * 1e3

    out = _out_dir(config)
    solution_path = out / "solution.csv"
    save_csv(solution_path, report.x)

    detail = report.to_dict()
    detail["final_objective"] = eval_objective(report.x, problem, params)
    if truth is not None:

        detail["rel_err"] = relative_error(report.x, truth)
    report_path = out / "report.json"
    save_json(report_path, detail)

    manifest = build_manifest("solve", config, [solution_path, report_path], wall_ms)
    save_json(out / "manifest.json", manifest)
    return 0 if report.termination is Termination.Converged else 2


_SUCCESS_COLUMNS = ("s", "method", "trials", "success_rate", "mean_rel_err",
                    "median_rel_err", "q25_rel_err", "q75_rel_err")
_NOISE_COLUMNS = ("snr_db", "method", "trials", "best_lam", "mean_recon_snr_db")
_SELECTION_COLUMNS = ("method", "var1_prob", "var2_prob", "var3_prob",
                      "avg_total", "avg_false", "noise_sel_rate")


def _write_rows(path: Path, rows: list[dict], columns: tuple, fmt: str) -> None:
    if fmt == "json":
        save_json(path, rows)
        return
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for col in columns:
            v = row[col]
            cells.append(f"{v:.17g}" if isinstance(v, float) else str(v))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def _selection_params(config: dict) -> dict[str, DcenParams]:
    base = _cli_params(config)
    overrides = config.get("method_overrides") or {}
    out = {}
    for method in config["selection_methods"]:
        fields = overrides.get(method, {})
        out[method] = replace(base, **fields) if fields else base
    return out


def cmd_bench(config: dict) -> int:
    experiment = config["experiment"]
    out = _out_dir(config)
    ext = "json" if config["format"] == "json" else "csv"
    results_path = out / f"results.{ext}"
    jobs = config["jobs"] or os.cpu_count() or 1
    tic = time.perf_counter()

    if experiment == "success":
        if not config["s_grid"]:
            raise ValueError("s_grid must be nonempty")
        kind = MatrixKind.DCT_OVERSAMPLED if config["matrix"] == "dct" \
            else MatrixKind.GAUSSIAN_CORRELATED
        rows = run_success_sweep(
            kind, config["s_grid"], config["trials"], config["method"],
            _cli_params(config), config["seed"],
            m=config["m"], n=config["n"], f_factor=config["f_factor"],
            corr_r=config["corr_r"], min_sep=config["min_sep"],
            warm=config["warm"], snr_db=config["snr_db"],
            admm_sweeps=config["admm_sweeps"], jobs=jobs,
        )
        _write_rows(results_path, rows, _SUCCESS_COLUMNS, config["format"])
    elif experiment == "noise":
        if not config["snr_levels"] or not config["lam_grid"]:
            raise ValueError("snr_levels and lam_grid must be nonempty")
        rows = run_noise_sweep(
            config["snr_levels"], config["trials"], config["methods"],
            _cli_params(config), config["lam_grid"], config["seed"],
            m=config["m"], n=config["n"], f_factor=config["f_factor"],
            s=config["s"], min_sep=config["min_sep"],
            warm=config["warm"], admm_sweeps=config["admm_sweeps"],
            jobs=jobs,
        )
        _write_rows(results_path, rows, _NOISE_COLUMNS, config["format"])
    elif experiment == "selection":
        if not config["selection_methods"]:
            raise ValueError("selection_methods must be nonempty")
        summaries = run_variable_selection(
            config["trials"], config["selection_methods"], config["select_tol"],
            config["seed"], _selection_params(config), warm=config["warm"],
            admm_sweeps=config["admm_sweeps"], jobs=jobs,
        )
        rows = []
        for method, summary in summaries.items():
            p1, p2, p3 = summary.per_true_var_prob
            rows.append({
                "method": method, "var1_prob": p1, "var2_prob": p2,
                "var3_prob": p3, "avg_total": summary.avg_total,
                "avg_false": summary.avg_false,
                "noise_sel_rate": summary.noise_sel_rate,
            })
        _write_rows(results_path, rows, _SELECTION_COLUMNS, config["format"])
    else:
        raise ValueError(f"unknown experiment {experiment!r}")

    wall_ms = (time.perf_counter() - tic) * 1e3
    manifest = build_manifest("bench", config, [results_path], wall_ms)
    save_json(out / "manifest.json", manifest)
    return 0


def cmd_mri(config: dict) -> int:
    if config["lines"] < 1:
        raise ValueError(f"--lines must be >= 1, got {config['lines']}")
    if config["size"] < 16:
        raise ValueError(f"--size must be >= 16, got {config['size']}")
    gamma, alpha = config["gamma"], config["alpha"]
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"--gamma must lie strictly inside (0, 1), got {gamma}")
    params = DcenParams(lam=1.0, gamma=gamma, alpha=alpha)

    tic = time.perf_counter()
    phantom = shepp_logan(config["size"])
    mask = radial_mask(config["size"], config["lines"])
    kspace = make_kspace(phantom, mask)
    recon = reconstruct_dcen_tv(
        kspace, params, mu=config["mu"], beta=config["beta"],
        max_outer=config["tv_outer"], max_inner=config["tv_inner"],
    )
    wall_ms = (time.perf_counter() - tic) * 1e3

    rel = relative_error(recon.data.ravel(), phantom.data.ravel())
    out = _out_dir(config)
    paths = {
        "phantom.csv": phantom.data,
        "mask.csv": mask.astype(float),
        "recon.csv": recon.data,
    }
    for name, arr in paths.items():
        save_csv(out / name, arr)
    save_pgm(out / "recon.pgm", recon.data)

    manifest = build_manifest(
        "mri", config,
        [out / name for name in paths] + [out / "recon.pgm"], wall_ms,
    )
    manifest["rel_err"] = rel
    manifest["mask_fraction"] = float(mask.mean())
    save_json(out / "manifest.json", manifest)
    print(f"rel_err={rel:.6e} mask_fraction={mask.mean():.4f}")
    return 0


def cmd_gen(config: dict) -> int:
    out = _out_dir(config)
    seed = config["seed"]
    save = save_csv if config["format"] == "csv" else save_bin
    ext = config["format"] if config["format"] == "csv" else "bin"
    tic = time.perf_counter()
    kind = config["kind"]
    outputs = []

    def emit(name: str, arr: np.ndarray):
        path = out / f"{name}.{ext}"
        save(path, arr)
        outputs.append(path)

    if kind == "dct":
        emit("a", gen_dct_matrix(config["m"], config["n"], config["f_factor"], seed))
    elif kind == "gaussian":
        emit("a", gen_gaussian_matrix(config["m"], config["n"], config["corr_r"], seed))
    elif kind == "sparse":
        spec = SparseSignalSpec(n=config["n"], s=config["s"],
                                min_sep=config["min_sep"],
                                value_dist=ValueDist(config["value_dist"]))
        emit("x", gen_sparse_signal(spec, seed))
    elif kind == "phantom":
        emit("phantom", shepp_logan(config["size"]).data)
    elif kind == "mask":
        emit("mask", radial_mask(config["size"], config["lines"]).astype(float))
    elif kind == "correlated":
        x_mat, y, beta = gen_correlated_design(seed)
        emit("x", x_mat)
        emit("y", y)
        emit("beta", beta)
    else:
        raise ValueError(f"unknown kind {kind!r}")

    wall_ms = (time.perf_counter() - tic) * 1e3
    manifest = build_manifest("gen", config, outputs, wall_ms)
    save_json(out / "manifest.json", manifest)
    return 0


def cmd_prox_check(config: dict) -> int:
    """Check prox optimality on random draws against random perturbations."""
    params = DcenParams(lam=1.0, gamma=config["gamma"], alpha=config["alpha"])
    if not 0.0 < config["gamma"] < 1.0:
        raise ValueError("--gamma must lie strictly inside (0, 1)")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(config["seed"])))
    step = config["step"]
    failures = 0
    worst = 0.0
    for _ in range(config["draws"]):
        y = config["scale"] * rng.standard_normal(config["n"])
        x_star, _ = prox_dcen(y, step, params)
        base = prox_objective(x_star, y, step, params)
        radii = 10.0 ** rng.uniform(-6, 0, size=config["perturbations"])
        for radius in radii:
            trial = x_star + radius * rng.standard_normal(config["n"])
            gap = base - prox_objective(trial, y, step, params)
            worst = max(worst, gap)
            if gap > 1e-10:
                failures += 1
                break
    verdict = {
        "draws": config["draws"],
        "failures": failures,
        "max_objective_excess": worst,
        "params": {"gamma": config["gamma"], "alpha": config["alpha"],
                   "step": step, "n": config["n"], "seed": config["seed"]},
    }
    print(json.dumps(verdict, indent=2, sort_keys=True))
    return 0 if failures == 0 else 1


def cmd_report_conditions(config: dict) -> int:
    problem = params = None
    if config.get("a") and config.get("b"):
        problem = Problem(a=_load_array(config["a"], 2), b=_load_array(config["b"], 1))
        params = DcenParams(lam=config["lam"], gamma=config["gamma"],
                            alpha=config["alpha"])
    report = condition_report(
        config["s"], config["gamma"], config["alpha"], config["p"],
        config["big_m"], config["delta_3s"], config["delta_4s"],
        r=config["r"], problem=problem, params=params,
    )
    print(json.dumps(report, indent=2, sort_keys=True))
    if config.get("out_dir"):
        out = _out_dir(config)
        save_json(out / "conditions.json", report)
    return 0


_COMMANDS = {
    "solve": (cmd_solve, _SOLVE_DEFAULTS),
    "bench": (cmd_bench, _BENCH_DEFAULTS),
    "mri": (cmd_mri, _MRI_DEFAULTS),
    "gen": (cmd_gen, _GEN_DEFAULTS),
    "prox-check": (cmd_prox_check, _PROX_CHECK_DEFAULTS),
    "report-conditions": (cmd_report_conditions, _CONDITIONS_DEFAULTS),
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    runner, defaults = _COMMANDS[args.command]
    try:
        config = _resolve_config(args, defaults, args.command)
        return runner(config)
    except Exception as exc:  # noqa: BLE001 - exit-code contract
        print(f"dcen {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
