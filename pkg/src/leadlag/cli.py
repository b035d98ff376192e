"""Command-line front end: simulate, sample, estimate, diagnose, experiment.

Every subcommand reads plain files (JSON configs, CSV data), writes its
outputs atomically, and reports failures through exit codes: 0 success, 1
for a violated domain or structural invariant (message on stderr names it),
2 for usage errors.  The only environment variable honored is
``LEADLAG_VERBOSITY``: 0 silences informational notes, 1 (default) prints
them to stderr; data outputs are unaffected.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .errors import DomainError, LeadLagError, StructuralError
from .estimator import contrast_curve, estimate_leadlag
from .experiment import ExperimentConfig, run_experiment
from .fbm import CorrelatedFbmSpec, DriverGrid
from .io import (
    atomic_write_text,
    format_float,
    grid_from_dict,
    load_json,
    read_latent_csv,
    read_observation_csv,
    write_curve_csv,
    write_estimate_json,
    write_latent_csv,
    write_observation_csv,
    write_report_csv,
    write_report_manifest,
    write_report_summary_csv,
)
from .model import DriftSpec, LeadLagModel, simulate_latent_pair
from .rng import seed_sequence
from .sampling import ObservationSet, SamplingScheme, diagnostics, generate_times

__all__ = ["main"]


def _verbosity() -> int:
    raw = os.environ.get("LEADLAG_VERBOSITY", "1")
    try:
        return int(raw)
    except ValueError:
        return 1


def _info(message: str) -> None:
    if _verbosity() >= 1:
        print(message, file=sys.stderr)


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise StructuralError(f"config is missing required field {key!r}")
    return cfg[key]


def _drift_from_dict(spec) -> DriftSpec:
    if spec is None:
        return DriftSpec.none()
    if not isinstance(spec, dict):
        raise StructuralError("drift config must be a mapping with a 'kind' field")
    kind = _require(spec, "kind")
    if kind == "none":
        return DriftSpec.none()
    if kind == "linear":
        return DriftSpec.linear(float(_require(spec, "mu")))
    if kind == "wick":
        return DriftSpec.wick(
            float(_require(spec, "mu")), float(_require(spec, "sigma")), _require(spec, "h")
        )
    if kind == "callback":
        raise DomainError("drift kind 'callback' cannot be loaded from a config file")
    raise DomainError(f"unknown drift kind {kind!r}; use none, linear or wick")


def _scheme_from_dict(spec, horizon: float) -> SamplingScheme:
    if not isinstance(spec, dict):
        raise StructuralError("sampling scheme config must be a mapping with a 'kind' field")
    kind = _require(spec, "kind")
    if kind == "equidistant":
        return SamplingScheme.equidistant(int(_require(spec, "n")), horizon)
    if kind == "poisson":
        return SamplingScheme.poisson(float(_require(spec, "intensity")), horizon)
    if kind == "explicit":
        return SamplingScheme.explicit(np.asarray(_require(spec, "times"), float), horizon)
    raise DomainError(f"unknown sampling kind {kind!r}; use equidistant, poisson or explicit")


def _cmd_simulate(args) -> int:
    cfg = load_json(args.config)
    seed = args.seed if args.seed is not None else cfg.get("seed")
    if seed is None:
        raise DomainError("simulate needs a seed: pass --seed or set 'seed' in the config")
    seed = int(seed)
    T = float(_require(cfg, "T"))
    delta = float(_require(cfg, "delta"))
    fbm_horizon = T + 2.0 * delta
    fbm = CorrelatedFbmSpec(
        h1=_require(cfg, "h1"), h2=_require(cfg, "h2"), rho=float(_require(cfg, "rho")),
        horizon=fbm_horizon,
    )
    raw_m = cfg.get("driver_m")
    driver = (
        DriverGrid(m=int(raw_m), horizon=fbm_horizon)
        if raw_m is not None
        else DriverGrid.default(fbm_horizon)
    )
    model = LeadLagModel(
        theta=float(_require(cfg, "theta")),
        delta=delta,
        sigma1=float(cfg.get("sigma1", 1.0)),
        sigma2=float(cfg.get("sigma2", 1.0)),
        drift1=_drift_from_dict(cfg.get("drift1")),
        drift2=_drift_from_dict(cfg.get("drift2")),
        x0_1=float(cfg.get("x0_1", 0.0)),
        x0_2=float(cfg.get("x0_2", 0.0)),
        fbm=fbm,
        horizon_T=T,
    )
    horizon = T + delta
    times1 = generate_times(_scheme_from_dict(_require(cfg, "times1"), horizon), seed_sequence(seed, 0))
    times2 = generate_times(_scheme_from_dict(_require(cfg, "times2"), horizon), seed_sequence(seed, 1))
    latent = simulate_latent_pair(model, times1, times2, seed_sequence(seed, 2), driver=driver)

    out = Path(args.out)
    write_latent_csv(out / "latent.csv", latent.times1, latent.values1, latent.times2, latent.values2)
    manifest = {
        "config": cfg,
        "seed": seed,
        "driver_m": driver.m,
        "fbm_horizon": fbm_horizon,
        "seed_convention": (
            "streams are SeedSequence(entropy=seed, spawn_key=(stream,)) with stream "
            "0 drawing component-1 times, 1 component-2 times, 2 the fractional driver"
        ),
    }
    atomic_write_text(out / "simulate_manifest.json", json.dumps(manifest, indent=2) + "\n")
    _info(f"wrote {out / 'latent.csv'} and {out / 'simulate_manifest.json'}")
    return 0


def _thin(times, values, every: int):
    every = int(every)
    if every < 1:
        raise DomainError(f"keep_every must be a positive integer, got {every}")
    idx = np.arange(0, times.size, every)
    if idx[-1] != times.size - 1:  # never drop the closing endpoint
        idx = np.append(idx, times.size - 1)
    return times[idx], values[idx]


def _cmd_sample(args) -> int:
    cfg = load_json(args.config)
    T = float(_require(cfg, "T"))
    delta = float(_require(cfg, "delta"))
    times1, values1, times2, values2 = read_latent_csv(args.path_in)
    times1, values1 = _thin(times1, values1, cfg.get("keep_every_1", 1))
    times2, values2 = _thin(times2, values2, cfg.get("keep_every_2", 1))
    obs = ObservationSet(
        times1=times1, values1=values1, times2=times2, values2=values2, T=T, delta=delta
    )
    out = Path(args.out)
    write_observation_csv(out / "obs1.csv", obs.times1, obs.values1)
    write_observation_csv(out / "obs2.csv", obs.times2, obs.values2)
    _info(f"wrote {out / 'obs1.csv'} and {out / 'obs2.csv'}")
    return 0


def _cmd_estimate(args) -> int:
    times1, values1 = read_observation_csv(args.obs1)
    times2, values2 = read_observation_csv(args.obs2)
    obs = ObservationSet(
        times1=times1, values1=values1, times2=times2, values2=values2, T=args.T, delta=args.delta
    )
    grid = grid_from_dict(load_json(args.grid), delta=args.delta)
    curve = contrast_curve(obs, grid)
    result = estimate_leadlag(obs, grid)
    out = Path(args.out)
    write_curve_csv(out / "curve.csv", curve)
    write_estimate_json(out / "estimate.json", result)
    _info(f"wrote {out / 'curve.csv'} and {out / 'estimate.json'}")
    print(f"theta_hat={format_float(result.theta_hat)}")
    return 0


def _cmd_diagnose(args) -> int:
    times1, _ = read_observation_csv(args.obs1)
    times2, _ = read_observation_csv(args.obs2)
    report = diagnostics(
        times1,
        times2,
        args.h1,
        args.h2,
        args.T,
        epsilon=args.epsilon,
        mu=args.mu,
        v_n=args.vn,
    )
    for name in ("b2_ratio_1", "b2_ratio_2", "b3_ratio_1", "b3_ratio_2", "b4_value", "r_n"):
        print(f"{name}={format_float(getattr(report, name))}")
    return 0


def _cmd_experiment(args) -> int:
    cfg = load_json(args.config)
    delta = float(_require(cfg, "delta"))
    config = ExperimentConfig(
        h1=_require(cfg, "h1"),
        h2=_require(cfg, "h2"),
        rhos=_require(cfg, "rhos"),
        intensities=_require(cfg, "intensities"),
        theta=float(_require(cfg, "theta")),
        delta=delta,
        T=float(_require(cfg, "T")),
        grid=grid_from_dict(_require(cfg, "grid"), delta=delta),
        replications=_require(cfg, "replications"),
        base_seed=_require(cfg, "base_seed"),
        driver_m=cfg.get("driver_m"),
    )
    report = run_experiment(config, jobs=args.jobs)
    out = Path(args.out)
    write_report_csv(out / "estimates.csv", report)
    write_report_summary_csv(out / "summary.csv", report)
    write_report_manifest(out / "manifest.json", report)
    _info(
        f"wrote {out / 'estimates.csv'}, {out / 'summary.csv'} and {out / 'manifest.json'} "
        f"in {report.wall_time_seconds:.1f} s"
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leadlag",
        description="Simulate, sample and estimate lead-lag models of fractional processes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a latent lead-lag pair from a JSON config")
    p.add_argument("--config", required=True, help="JSON model + sampling config")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("sample", help="package a latent CSV into observation files")
    p.add_argument("--config", required=True, help="JSON with T, delta and thinning")
    p.add_argument("--path-in", required=True, help="latent CSV (component,time,value)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser("estimate", help="estimate the lead-lag shift from two observation CSVs")
    p.add_argument("--obs1", required=True, help="component-1 observations (time,value)")
    p.add_argument("--obs2", required=True, help="component-2 observations (time,value)")
    p.add_argument("--grid", required=True, help="JSON grid config")
    p.add_argument("--T", type=float, required=True, help="analysis horizon")
    p.add_argument("--delta", type=float, required=True, help="shift window half-width")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(handler=_cmd_estimate)

    p = sub.add_parser("diagnose", help="print sampling-scheme diagnostics")
    p.add_argument("--obs1", required=True)
    p.add_argument("--obs2", required=True)
    p.add_argument("--h1", type=float, required=True)
    p.add_argument("--h2", type=float, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--mu", type=float, default=0.05)
    p.add_argument("--vn", type=float, default=None)
    p.set_defaults(handler=_cmd_diagnose)

    p = sub.add_parser("experiment", help="run a Monte Carlo study from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1, help="worker threads (results identical)")
    p.set_defaults(handler=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return 0 if exc.code in (0, None) else int(exc.code)
    try:
        return args.handler(args)
    except LeadLagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
