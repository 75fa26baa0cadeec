"""Experiment harness: TOML-configured Monte-Carlo sweeps over corruption
levels, batch sizes and adversaries, with deterministic seeding, CSV/JSON
outputs and self-contained SVG plots.

Exit codes: 0 success, 1 bad configuration, 2 failed acceptance checks.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
import time
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import datagen, svgplot
from .blind_deconv import BD_M1_CONSTANT, BD_M2_CONSTANT, BD_TAU_CONSTANT, BdInitConfig
from .domain import (
    ConfigurationError,
    CorruptionPlan,
    DirectionPlant,
    GDConfig,
    LargeOutlier,
    MeanShift,
    NoCorruption,
    NoiseModel,
    Signal,
    SignAlignedResponse,
)
from .pipeline import naive_solve_pr, solve_bd, solve_pr
from .seeds import derive_seed
from .spectral_init import M1_CONSTANT, M2_CONSTANT, TAU_CONSTANT, InitConfig

CSV_COLUMNS = ["model", "n", "m1", "m2", "P", "m_tilde", "eps", "sigma", "adversary",
               "trial", "seed", "dist_final", "dist_init", "norm_err", "runtime_ms"]


def _require(cond, msg):
    if not cond:
        raise ConfigurationError(msg)


def load_config(path) -> dict:
    """Read and validate an experiment TOML file."""
    p = Path(path)
    _require(p.exists(), f"config file not found: {path}")
    with open(p, "rb") as fh:
        raw = tomllib.load(fh)
    exp = raw.get("experiment", {})
    cfg = {
        "name": exp.get("name", p.stem),
        "model": exp.get("model", "pr"),
        "trials": int(exp.get("trials", 10)),
        "master_seed": int(exp.get("master_seed", 0)),
        "n": int(raw.get("signal", {}).get("n", 10)),
        "norm": float(raw.get("signal", {}).get("norm", 1.0)),
        "noise_kind": raw.get("noise", {}).get("kind", "student_t"),
        "sigma_over_norm2": float(raw.get("noise", {}).get("sigma_over_norm2", 0.5)),
        "dof": float(raw.get("noise", {}).get("dof", 4.5)),
        "mu": float(raw.get("noise", {}).get("mu", 0.0)),
        "epsilon": raw.get("corruption", {}).get("epsilon", [0.0]),
        "adversary": raw.get("corruption", {}).get("adversary", "none"),
        "adv_scale": float(raw.get("corruption", {}).get("scale", 100.0)),
        "adv_magnitude": float(raw.get("corruption", {}).get("magnitude", 20.0)),
        "adv_shift": raw.get("corruption", {}).get("shift", None),
        "adv_level_scale": float(raw.get("corruption", {}).get("level_scale", 1.0)),
        "r_up": float(raw.get("init", {}).get("r_up", 1.0)),
        "delta": float(raw.get("init", {}).get("delta", 0.1)),
        "m1_constant": float(raw.get("init", {}).get("m1_constant", M1_CONSTANT)),
        "m2_constant": float(raw.get("init", {}).get("m2_constant", M2_CONSTANT)),
        "tau_constant": raw.get("init", {}).get("tau_constant", None),
        "rounds": int(raw.get("gd", {}).get("rounds", 12)),
        "batch": raw.get("gd", {}).get("batch", 10000),
        "fresh": bool(raw.get("gd", {}).get("fresh", True)),
        "plots": bool(raw.get("output", {}).get("plots", True)),
    }
    _require(cfg["model"] in ("pr", "bd", "pr-vs-naive"),
             f"experiment.model must be pr|bd|pr-vs-naive, got {cfg['model']!r}")
    _require(cfg["noise_kind"] in ("gaussian", "student_t", "rademacher_mixture"),
             f"unknown noise.kind {cfg['noise_kind']!r}")
    _require(cfg["adversary"] in ("none", "large_outlier", "direction_plant",
                                  "sign_aligned", "mean_shift"),
             f"unknown corruption.adversary {cfg['adversary']!r}")
    if not isinstance(cfg["epsilon"], list):
        cfg["epsilon"] = [cfg["epsilon"]]
    cfg["epsilon"] = [float(e) for e in cfg["epsilon"]]
    if not isinstance(cfg["batch"], list):
        cfg["batch"] = [int(cfg["batch"])]
    cfg["batch"] = [int(b) for b in cfg["batch"]]
    _require(cfg["trials"] >= 1, "experiment.trials must be >= 1")
    return cfg


def _make_noise(cfg) -> NoiseModel:
    sigma = cfg["sigma_over_norm2"] * cfg["norm"] ** 2
    if cfg["noise_kind"] == "gaussian":
        return NoiseModel.gaussian(sigma, cfg["mu"])
    if cfg["noise_kind"] == "rademacher_mixture":
        return NoiseModel.rademacher_mixture(sigma, cfg["mu"])
    return NoiseModel.student_t(sigma, cfg["dof"], cfg["mu"])


def _make_strategy(cfg, signal: Signal, seed: int):
    kind = cfg["adversary"]
    if kind == "none":
        return NoCorruption()
    if kind == "large_outlier":
        return LargeOutlier(cfg["adv_scale"])
    if kind == "mean_shift":
        return MeanShift(float(cfg["adv_shift"] if cfg["adv_shift"] is not None else 1.0))
    if kind == "sign_aligned":
        shift = cfg["adv_shift"]
        return SignAlignedResponse(None if shift is None else float(shift),
                                   cfg["adv_level_scale"])
    rng = np.random.default_rng(derive_seed(seed, 97))
    v = rng.standard_normal(signal.n)
    v -= (v @ signal.x_star) * signal.x_star / signal.norm**2
    v /= np.linalg.norm(v)
    return DirectionPlant(v, cfg["adv_magnitude"] * signal.norm)


def run_cell(cfg: dict, eps: float, m_tilde: int, trial: int) -> list[dict]:
    """One Monte-Carlo cell; returns one row per pipeline variant."""
    seed = derive_seed(cfg["master_seed"], cfg["epsilon"].index(eps),
                       cfg["batch"].index(m_tilde), trial)
    signal = Signal.random_direction(cfg["n"], cfg["norm"], derive_seed(seed, 1))
    noise = _make_noise(cfg)
    strategy = _make_strategy(cfg, signal, seed)
    sigma = cfg["sigma_over_norm2"] * cfg["norm"] ** 2
    double = 2 if cfg["model"] == "bd" else 1

    if cfg["model"] == "bd":
        init_cfg = BdInitConfig.from_rates(cfg["n"], eps, cfg["delta"], cfg["r_up"],
                                           cfg["m1_constant"], cfg["m2_constant"],
                                           cfg["tau_constant"] or BD_TAU_CONSTANT)
    else:
        init_cfg = InitConfig.from_rates(cfg["n"], eps, cfg["delta"], cfg["r_up"],
                                         cfg["m1_constant"], cfg["m2_constant"],
                                         cfg["tau_constant"] or TAU_CONSTANT)
    gd_cfg = GDConfig(cfg["rounds"], m_tilde, None, cfg["delta"])

    def draw(k: int, m: int):
        data = datagen.generate_clean(signal, noise, m, derive_seed(seed, 2, k))
        if eps > 0 and not isinstance(strategy, NoCorruption):
            data = datagen.corrupt(data, CorruptionPlan(eps, strategy, derive_seed(seed, 3, k)))
        return data

    if cfg["fresh"]:
        d1 = draw(0, double * init_cfg.m1)
        d2 = draw(1, double * init_cfg.m2)
        batches = [draw(2 + r, double * m_tilde) for r in range(cfg["rounds"])]
    else:
        total = draw(0, double * (init_cfg.m1 + init_cfg.m2 + cfg["rounds"] * m_tilde))
        parts = datagen.split_batches(total, cfg["rounds"] + 2, derive_seed(seed, 4)).batches
        d1, d2, batches = parts[0], parts[1], list(parts[2:])

    rows = []
    variants = [("pr", solve_pr), ("pr-naive", None)] if cfg["model"] == "pr-vs-naive" \
        else [(cfg["model"], solve_bd if cfg["model"] == "bd" else solve_pr)]
    for label, solver in variants:
        t0 = time.perf_counter()
        if label == "pr-naive":
            _, _, rep = naive_solve_pr(d1, d2, batches, gd_cfg, signal=signal)
        else:
            _, _, rep = solver(d1, d2, batches, init_cfg, gd_cfg, signal=signal)
        ms = int((time.perf_counter() - t0) * 1000)
        rows.append({
            "model": label, "n": cfg["n"], "m1": init_cfg.m1, "m2": init_cfg.m2,
            "P": cfg["rounds"], "m_tilde": m_tilde, "eps": eps, "sigma": sigma,
            "adversary": cfg["adversary"], "trial": trial, "seed": seed,
            "dist_final": rep.dist_final, "dist_init": rep.dist_init,
            "norm_err": rep.norm_err, "runtime_ms": ms,
        })
    return rows


def _format_row(row: dict) -> str:
    out = []
    for col in CSV_COLUMNS:
        v = row[col]
        if isinstance(v, float):
            out.append("%.17g" % v)
        else:
            out.append(str(v))
    return ",".join(out)


def write_results(rows: list[dict], out_dir: Path, cfg: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "results.csv", "w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(_format_row(row) + "\n")

    summary = {"name": cfg["name"], "model": cfg["model"], "cells": {}}
    by_key = {}
    for row in rows:
        by_key.setdefault((row["model"], row["eps"], row["m_tilde"]), []).append(row["dist_final"])
    for (model, eps, m_tilde), vals in sorted(by_key.items()):
        summary["cells"][f"{model}|eps={eps:g}|m={m_tilde}"] = {
            "median_dist": float(np.median(vals)),
            "q90_dist": float(np.quantile(vals, 0.9)),
            "trials": len(vals),
        }
    eps_list = sorted({row["eps"] for row in rows if row["model"] != "pr-naive"})
    if len(eps_list) >= 2 and all(e > 0 for e in eps_list):
        meds = [float(np.median([r["dist_final"] for r in rows
                                 if r["eps"] == e and r["model"] != "pr-naive"]))
                for e in eps_list]
        slope, inter = np.polyfit(np.log(eps_list), np.log(np.maximum(meds, 1e-300)), 1)
        summary["eps_fit"] = {"exponent": float(slope), "constant": float(np.exp(inter))}
        if cfg["plots"]:
            svgplot.loglog_fit_plot(out_dir / "err_vs_eps.svg", eps_list, meds,
                                    title=f"{cfg['name']}: median error vs corruption",
                                    xlabel="epsilon", ylabel="median dist")
    m_list = sorted({row["m_tilde"] for row in rows})
    if len(m_list) >= 2 and cfg["plots"]:
        meds = [float(np.median([r["dist_final"] for r in rows if r["m_tilde"] == m]))
                for m in m_list]
        svgplot.loglog_fit_plot(out_dir / "err_vs_m.svg", m_list, meds,
                                title=f"{cfg['name']}: median error vs batch size",
                                xlabel="m_tilde", ylabel="median dist")
    if cfg["model"] == "pr-vs-naive" and cfg["plots"]:
        labels, values = [], []
        for model in ("pr", "pr-naive"):
            for eps in eps_list:
                vals = [r["dist_final"] for r in rows if r["model"] == model and r["eps"] == eps]
                labels.append(f"{model}@{eps:g}")
                values.append(float(np.median(vals)))
        svgplot.bar_plot(out_dir / "breakdown.svg", labels, values,
                         title=f"{cfg['name']}: robust vs naive median error",
                         ylabel="median dist",
                         colors=["#1f6fb2"] * len(eps_list) + ["#b22222"] * len(eps_list))
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)


def run_experiment(config_path, out_dir, workers: int = 1, master_seed=None) -> list[dict]:
    cfg = load_config(config_path)
    if master_seed is not None:
        cfg["master_seed"] = int(master_seed)
    cells = [(eps, m, t) for eps in cfg["epsilon"] for m in cfg["batch"]
             for t in range(cfg["trials"])]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_cell, cfg, *cell) for cell in cells]
            results = [f.result() for f in futures]
    else:
        results = [run_cell(cfg, *cell) for cell in cells]
    rows = [row for group in results for row in group]
    write_results(rows, Path(out_dir), cfg)
    return rows


def _cmd_run(args) -> int:
    try:
        run_experiment(args.config, args.out, args.workers, args.seed)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    print(f"results written to {args.out}")
    if args.check:
        from .acceptance import run_suite
        ok = run_suite(args.only.split(",") if args.only else None)
        return 0 if ok else 2
    return 0


def _cmd_check(args) -> int:
    from .acceptance import run_suite

    if args.suite != "acceptance":
        print(f"unknown suite {args.suite!r}", file=sys.stderr)
        return 1
    ok = run_suite(args.only.split(",") if args.only else None)
    return 0 if ok else 2


def _cmd_q1(args) -> int:
    from .stability import question1_sweep

    n_grid = [int(v) for v in args.n.split(",")]
    mults = [float(v) for v in args.mult.split(",")]
    cfg = InitConfig(r_up=args.r_up, epsilon=args.eps, delta=0.1, m1=8, m2=8)
    rows = question1_sweep(n_grid, mults, args.trials, cfg, sigma=args.sigma, seed=args.seed)
    cols = ["n", "multiplier", "m", "trials", "gamma_q25", "gamma_median", "gamma_q75", "gamma_max"]
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join("%.17g" % row[c] if isinstance(row[c], float) else str(row[c])
                              for c in cols))
    table = "\n".join(lines)
    print(table)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "q1_gamma.csv").write_text(table + "\n")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="robust-phase",
                                     description="robust phase retrieval experiment harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured experiment sweep")
    p_run.add_argument("config")
    p_run.add_argument("--out", default="results")
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--seed", type=int, default=None, help="override master seed")
    p_run.add_argument("--check", action="store_true",
                       help="run the acceptance suite after the sweep")
    p_run.add_argument("--only", default=None, help="comma-separated acceptance criteria")
    p_run.set_defaults(fn=_cmd_run)

    p_check = sub.add_parser("check", help="run a verification suite")
    p_check.add_argument("--suite", default="acceptance")
    p_check.add_argument("--only", default=None, help="comma-separated criterion names")
    p_check.set_defaults(fn=_cmd_check)

    p_q1 = sub.add_parser("q1", help="stability sweep for the open sample-size question")
    p_q1.add_argument("--n", default="4")
    p_q1.add_argument("--mult", default="10,100")
    p_q1.add_argument("--trials", type=int, default=5)
    p_q1.add_argument("--eps", type=float, default=0.02)
    p_q1.add_argument("--sigma", type=float, default=0.0)
    p_q1.add_argument("--r-up", type=float, default=1.0)
    p_q1.add_argument("--seed", type=int, default=0)
    p_q1.add_argument("--out", default="results")
    p_q1.set_defaults(fn=_cmd_q1)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
