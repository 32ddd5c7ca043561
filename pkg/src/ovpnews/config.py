"""TOML experiment configuration.

Only ``localization`` and ``policies`` are required; everything else falls
back to the base simulation settings (p=2, c=1, N=10, M=50, 200 replicates).
See README.md for the full schema.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .benchmarks import PolicyKind, PolicySpec
from .crossval import CvConfig, default_grid
from .errors import ConfigError, ParameterDomainError
from .evaluation import Exponential, ExperimentConfig, GammaTruth
from .hypothesis import Prices
from .localization import Normal, Uniform, localization_from_dict, localization_to_dict
from .ovp import OvpConfig

FIGURES = ("os_vs_oqd", "localizations", "misspecification")


@dataclass(frozen=True)
class FiguresConfig:
    names: tuple[str, ...] = FIGURES
    oqd_n: int = 5
    oqd_localization: object = None
    localizations: tuple = (Normal(20.0, 1.0), Normal(20.0, 2.0), Uniform(18.0, 22.0))
    gamma_shapes: tuple[float, ...] = (1.15, 0.85)


@dataclass(frozen=True)
class RunConfig:
    experiment: ExperimentConfig
    crossval: CvConfig
    cv_kind: PolicyKind = PolicyKind.DRO_WASSERSTEIN
    figures: FiguresConfig = field(default_factory=FiguresConfig)

    def with_seed(self, seed: int) -> RunConfig:
        return replace(self, experiment=replace(self.experiment, master_seed=seed),
                       crossval=replace(self.crossval, seed=seed))


_TOP = {"master_seed", "n", "m", "n_bar", "prices", "localization", "truth", "policies", "ovp", "crossval", "figures"}


def _table(raw, name: str) -> dict:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError("expected a table", name)
    return raw


def _reject_unknown(table: dict, allowed: set, name: str):
    extra = sorted(set(table) - allowed)
    if extra:
        raise ConfigError(f"unknown key(s) {extra}; allowed: {sorted(allowed)}", name)


def _int(raw, name: str, lo: int = 1) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int) or raw < lo:
        raise ConfigError(f"expected an integer >= {lo}, got {raw!r}", name)
    return raw


def _num(raw, name: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"expected a number, got {raw!r}", name)
    return float(raw)


def _localization(raw, name: str):
    table = _table(raw, name)
    try:
        return localization_from_dict(table)
    except ParameterDomainError as exc:
        raise ConfigError(str(exc), name) from exc


def _truth(raw):
    table = _table(raw, "truth")
    kind = str(table.get("kind", "exponential")).lower()
    if kind == "exponential":
        _reject_unknown(table, {"kind"}, "truth")
        return Exponential()
    if kind == "gamma":
        _reject_unknown(table, {"kind", "shape"}, "truth")
        if "shape" not in table:
            raise ConfigError("gamma truth needs a shape", "truth.shape")
        try:
            return GammaTruth(_num(table["shape"], "truth.shape"))
        except ParameterDomainError as exc:
            raise ConfigError(str(exc), "truth.shape") from exc
    raise ConfigError(f"unknown truth kind {kind!r}; expected exponential or gamma", "truth.kind")


def _policy(raw, i: int) -> PolicySpec:
    name = f"policies[{i}]"
    if isinstance(raw, str):
        raw = {"kind": raw}
    table = _table(raw, name)
    _reject_unknown(table, {"kind", "radius", "shrink", "localization", "label"}, name)
    try:
        kind = PolicyKind(str(table.get("kind", "")).upper())
    except ValueError:
        raise ConfigError(f"unknown policy kind {table.get('kind')!r}; expected one of "
                          f"{[k.value for k in PolicyKind]}", f"{name}.kind") from None
    kwargs = {"kind": kind}
    if "radius" in table:
        kwargs["radius"] = _num(table["radius"], f"{name}.radius")
    if "shrink" in table:
        kwargs["shrink"] = _num(table["shrink"], f"{name}.shrink")
    if "localization" in table:
        kwargs["localization"] = _localization(table["localization"], f"{name}.localization")
    if "label" in table:
        kwargs["label"] = str(table["label"])
    try:
        return PolicySpec(**kwargs)
    except ParameterDomainError as exc:
        raise ConfigError(str(exc), name) from exc


def _crossval(raw, localization, seed: int, truth) -> tuple[CvConfig, PolicyKind]:
    table = _table(raw, "crossval")
    _reject_unknown(table, {"kind", "grid", "grid_min", "grid_max", "grid_points", "n_thetas",
                            "datasets_per_theta"}, "crossval")
    try:
        kind = PolicyKind(str(table.get("kind", "DRO_WASSERSTEIN")).upper())
    except ValueError:
        kind = None
    if kind is None or not kind.needs_radius:
        raise ConfigError("must be DRO_WASSERSTEIN or DRO_KL", "crossval.kind")
    if "grid" in table:
        if not isinstance(table["grid"], list):
            raise ConfigError("expected a list of radii", "crossval.grid")
        grid = tuple(_num(r, "crossval.grid") for r in table["grid"])
    else:
        grid = default_grid(_int(table.get("grid_points", 60), "crossval.grid_points"),
                            _num(table.get("grid_min", 1e-4), "crossval.grid_min"),
                            _num(table.get("grid_max", 5.0), "crossval.grid_max"))
    try:
        cv = CvConfig(grid=grid, n_thetas=_int(table.get("n_thetas", 20), "crossval.n_thetas"),
                      datasets_per_theta=_int(table.get("datasets_per_theta", 1), "crossval.datasets_per_theta"),
                      localization=localization, seed=seed, truth=truth)
    except ParameterDomainError as exc:
        raise ConfigError(str(exc), "crossval.grid") from exc
    return cv, kind


def _figures(raw) -> FiguresConfig:
    table = _table(raw, "figures")
    _reject_unknown(table, {"names", "oqd_n", "oqd_localization", "localizations", "gamma_shapes"}, "figures")
    fig = FiguresConfig()
    kw = {}
    if "names" in table:
        names = tuple(str(x) for x in table["names"])
        bad = [x for x in names if x not in FIGURES]
        if bad:
            raise ConfigError(f"unknown figure(s) {bad}; expected a subset of {list(FIGURES)}", "figures.names")
        kw["names"] = names
    if "oqd_n" in table:
        kw["oqd_n"] = _int(table["oqd_n"], "figures.oqd_n")
    if "oqd_localization" in table:
        kw["oqd_localization"] = _localization(table["oqd_localization"], "figures.oqd_localization")
    if "localizations" in table:
        kw["localizations"] = tuple(_localization(x, f"figures.localizations[{i}]")
                                    for i, x in enumerate(table["localizations"]))
    if "gamma_shapes" in table:
        shapes = tuple(_num(x, "figures.gamma_shapes") for x in table["gamma_shapes"])
        if any(s <= 0 for s in shapes):
            raise ConfigError("shapes must be positive", "figures.gamma_shapes")
        kw["gamma_shapes"] = shapes
    return replace(fig, **kw)


def parse_config(raw: dict) -> RunConfig:
    _reject_unknown(raw, _TOP, "config")
    for key in ("localization", "policies"):
        if key not in raw:
            raise ConfigError("required", key)
    seed = _int(raw.get("master_seed", 0), "master_seed", lo=0)
    if seed >= 1 << 64:
        raise ConfigError("must fit in 64 bits", "master_seed")
    prices_t = _table(raw.get("prices"), "prices")
    _reject_unknown(prices_t, {"p", "c"}, "prices")
    try:
        prices = Prices(_num(prices_t.get("p", 2.0), "prices.p"), _num(prices_t.get("c", 1.0), "prices.c"))
    except ParameterDomainError as exc:
        raise ConfigError(str(exc), "prices") from exc
    localization = _localization(raw["localization"], "localization")
    truth = _truth(raw.get("truth"))
    if not isinstance(raw["policies"], list) or not raw["policies"]:
        raise ConfigError("expected a nonempty list", "policies")
    policies = tuple(_policy(p, i) for i, p in enumerate(raw["policies"]))
    names = [p.name for p in policies]
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate policy names {names}; set a label", "policies")
    ovp_t = _table(raw.get("ovp"), "ovp")
    _reject_unknown(ovp_t, {"tol", "max_expand", "b_init_factor", "literal_scaling"}, "ovp")
    try:
        ovp = OvpConfig(tol=_num(ovp_t.get("tol", 1e-8), "ovp.tol"),
                        max_expand=_int(ovp_t.get("max_expand", 60), "ovp.max_expand", lo=0),
                        b_init_factor=_num(ovp_t.get("b_init_factor", 2.0), "ovp.b_init_factor"),
                        literal_scaling=bool(ovp_t.get("literal_scaling", False)))
    except ParameterDomainError as exc:
        raise ConfigError(str(exc), "ovp") from exc
    experiment = ExperimentConfig(
        prices=prices,
        n=_int(raw.get("n", 10), "n"),
        m=_int(raw.get("m", 50), "m"),
        n_bar=_int(raw.get("n_bar", 200), "n_bar"),
        localization=localization,
        truth=truth,
        policies=policies,
        master_seed=seed,
        ovp=ovp,
    )
    cv, cv_kind = _crossval(raw.get("crossval"), localization, seed, truth)
    return RunConfig(experiment, cv, cv_kind, _figures(raw.get("figures")))


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc.strerror}", str(path)) from exc
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"TOML syntax error: {exc}", str(path)) from exc
    return parse_config(raw)


def _truth_dict(truth) -> dict:
    return {"kind": "gamma", "shape": truth.shape} if isinstance(truth, GammaTruth) else {"kind": "exponential"}


def _policy_dict(p: PolicySpec) -> dict:
    return {"kind": p.kind.value, "radius": p.radius, "shrink": p.shrink, "label": p.name,
            "localization": None if p.localization is None else localization_to_dict(p.localization)}


def config_to_dict(rc: RunConfig) -> dict:
    """Fully resolved configuration, defaults included."""
    e, cv, fig = rc.experiment, rc.crossval, rc.figures
    return {
        "master_seed": e.master_seed,
        "prices": {"p": e.prices.p, "c": e.prices.c},
        "n": e.n, "m": e.m, "n_bar": e.n_bar,
        "localization": localization_to_dict(e.localization),
        "truth": _truth_dict(e.truth),
        "policies": [_policy_dict(p) for p in e.policies],
        "ovp": {"tol": e.ovp.tol, "max_expand": e.ovp.max_expand, "b_init_factor": e.ovp.b_init_factor,
                "literal_scaling": e.ovp.literal_scaling},
        "crossval": {"kind": rc.cv_kind.value, "grid": list(cv.grid), "n_thetas": cv.n_thetas,
                     "datasets_per_theta": cv.datasets_per_theta},
        "figures": {"names": list(fig.names), "oqd_n": fig.oqd_n,
                    "oqd_localization": None if fig.oqd_localization is None
                    else localization_to_dict(fig.oqd_localization),
                    "localizations": [localization_to_dict(u) for u in fig.localizations],
                    "gamma_shapes": list(fig.gamma_shapes)},
    }


def config_digest(rc: RunConfig) -> str:
    blob = json.dumps(config_to_dict(rc), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
