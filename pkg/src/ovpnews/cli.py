"""Run newsvendor policy experiments, radius calibration and figure sweeps.

Exit status is 0 on success, 2 for configuration problems and 1 when a solver
fails mid-sweep.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .benchmarks import PolicyKind, PolicySpec
from .config import RunConfig, config_digest, load_config
from .crossval import pick_radius, radius_gap_curve
from .errors import ConfigError, PolicyError
from .evaluation import ExperimentConfig, GammaTruth, EvaluationRow, run_experiment

log = logging.getLogger("ovpnews")

RESULTS_HEADER = "theta,policy,avg_profit,std_err,pct_regret,n_replicates"
CURVE_HEADER = "radius,avg_pct_gap"


def fmt(x: float) -> str:
    return f"{x:.10g}"


def write_rows_csv(path: Path, rows: list[EvaluationRow]):
    lines = [RESULTS_HEADER]
    lines += [f"{fmt(r.theta_true)},{r.policy},{fmt(r.avg_profit)},{fmt(r.std_err)},"
              f"{fmt(r.pct_regret)},{r.n_replicates}" for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="ascii", newline="")


def write_curve_csv(path: Path, grid, gaps):
    lines = [CURVE_HEADER] + [f"{fmt(r)},{fmt(g)}" for r, g in zip(grid, gaps)]
    path.write_text("\n".join(lines) + "\n", encoding="ascii", newline="")


@dataclass
class RunManifest:
    config_digest: str
    tool_version: str
    master_seed: int
    started_at: str
    output_paths: list[str] = field(default_factory=list)
    command: str = ""
    calibrated_radii: dict = field(default_factory=dict)

    def write(self, out: Path):
        (out / "manifest.json").write_text(json.dumps(self.__dict__, indent=2, sort_keys=True) + "\n")


def calibrate_missing_radii(rc: RunConfig, experiment: ExperimentConfig, threads: int,
                            record: dict, tag: str = "") -> ExperimentConfig:
    """Fill in radius-less DRO policies by grid search against this experiment's setup."""
    policies = []
    for pol in experiment.policies:
        if pol.kind.needs_radius and pol.radius is None:
            cv = replace(rc.crossval, localization=experiment.localization, truth=experiment.truth,
                         seed=experiment.master_seed)
            gaps = radius_gap_curve(pol.kind, cv, experiment.prices, experiment.n, threads)
            radius = pick_radius(cv.grid, gaps)
            log.info("calibrated %s radius %s%s", pol.name, fmt(radius), f" ({tag})" if tag else "")
            record[f"{tag}:{pol.name}" if tag else pol.name] = radius
            pol = replace(pol, radius=radius)
        policies.append(pol)
    return replace(experiment, policies=tuple(policies))


def _run_one(rc: RunConfig, experiment: ExperimentConfig, path: Path, threads: int,
             manifest: RunManifest, tag: str = ""):
    experiment = calibrate_missing_radii(rc, experiment, threads, manifest.calibrated_radii, tag)
    rows = run_experiment(experiment, threads)
    write_rows_csv(path, rows)
    manifest.output_paths.append(path.name)
    log.info("wrote %s (%d rows)", path, len(rows))


def _start(rc: RunConfig, command: str, out: Path) -> RunManifest:
    out.mkdir(parents=True, exist_ok=True)
    return RunManifest(config_digest(rc), __version__, rc.experiment.master_seed,
                       datetime.now(timezone.utc).isoformat(timespec="seconds"), command=command)


def cmd_run(rc: RunConfig, out: Path, threads: int) -> int:
    manifest = _start(rc, "run", out)
    _run_one(rc, rc.experiment, out / "results.csv", threads, manifest)
    manifest.write(out)
    return 0


def cmd_calibrate(rc: RunConfig, out: Path, threads: int) -> int:
    manifest = _start(rc, "calibrate", out)
    exp = rc.experiment
    gaps = radius_gap_curve(rc.cv_kind, rc.crossval, exp.prices, exp.n, threads)
    radius = pick_radius(rc.crossval.grid, gaps)
    write_curve_csv(out / "cv_curve.csv", rc.crossval.grid, gaps)
    (out / "chosen_radius.txt").write_text(fmt(radius) + "\n", encoding="ascii")
    manifest.output_paths += ["cv_curve.csv", "chosen_radius.txt"]
    manifest.calibrated_radii[rc.cv_kind.value] = radius
    manifest.write(out)
    log.info("%s radius %s", rc.cv_kind.value, fmt(radius))
    return 0


def figure_experiments(rc: RunConfig) -> list[tuple[str, ExperimentConfig]]:
    """(file name, experiment) for every requested figure sweep."""
    base, fig = rc.experiment, rc.figures
    jobs = []
    if "os_vs_oqd" in fig.names:
        jobs.append(("fig_os_vs_oqd.csv", replace(
            base, n=fig.oqd_n, localization=fig.oqd_localization or base.localization,
            policies=(PolicySpec(PolicyKind.OS), PolicySpec(PolicyKind.OQD)))))
    if "localizations" in fig.names:
        for u in fig.localizations:
            jobs.append((f"fig_localization_{u.label}.csv", replace(base, localization=u)))
    if "misspecification" in fig.names:
        for shape in fig.gamma_shapes:
            jobs.append((f"fig_misspec_gamma_{shape:g}.csv", replace(base, truth=GammaTruth(shape))))
    return jobs


def cmd_figures(rc: RunConfig, out: Path, threads: int) -> int:
    manifest = _start(rc, "figures", out)
    for name, experiment in figure_experiments(rc):
        _run_one(rc, experiment, out / name, threads, manifest, tag=name.removesuffix(".csv"))
    manifest.write(out)
    return 0


COMMANDS = {"run": cmd_run, "calibrate": cmd_calibrate, "figures": cmd_figures}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ovpnews", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [("run", "evaluate all configured policies"),
                        ("calibrate", "grid-search a DRO radius"),
                        ("figures", "emit the per-figure sweeps")]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, type=Path, help="TOML experiment file")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: ./out)")
        p.add_argument("--seed", type=int, help="override master_seed")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                       help="worker processes (results do not depend on it)")
        if name == "calibrate":
            p.add_argument("--kind", choices=["DRO_WASSERSTEIN", "DRO_KL"], help="override crossval.kind")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        rc = load_config(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 1 << 64:
                raise ConfigError("must be an unsigned 64-bit integer", "--seed")
            rc = rc.with_seed(args.seed)
        if getattr(args, "kind", None):
            rc = replace(rc, cv_kind=PolicyKind(args.kind))
        if args.threads < 1:
            raise ConfigError("must be at least 1", "--threads")
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](rc, args.out, args.threads)
    except PolicyError as exc:
        print(f"error: solver failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
