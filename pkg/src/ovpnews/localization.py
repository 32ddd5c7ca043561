"""Localizations: the density over theta that OVP averages its performance over."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import _gen, sample_normal, sample_uniform
from .errors import ParameterDomainError


@dataclass(frozen=True)
class Normal:
    mu: float
    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0 and self.mu > 0):
            raise ParameterDomainError(f"normal localization needs mu > 0 and sigma > 0, got {self}")

    @property
    def label(self) -> str:
        return f"normal_{self.mu:g}_{self.sigma:g}"


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float

    def __post_init__(self):
        if not (0 < self.a < self.b):
            raise ParameterDomainError(f"uniform localization needs 0 < a < b, got {self}")

    @property
    def label(self) -> str:
        return f"uniform_{self.a:g}_{self.b:g}"


@dataclass(frozen=True)
class Dirac:
    theta_bar: float

    def __post_init__(self):
        if not self.theta_bar > 0:
            raise ParameterDomainError(f"dirac localization needs theta_bar > 0, got {self}")

    @property
    def label(self) -> str:
        return f"dirac_{self.theta_bar:g}"


Localization = Normal | Uniform | Dirac


def localization_from_dict(spec: dict) -> Localization:
    """Build from a mapping such as ``{"kind": "normal", "mu": 20, "sigma": 1}``."""
    spec = dict(spec)
    kind = str(spec.pop("kind", "")).lower()
    cls = {"normal": Normal, "uniform": Uniform, "dirac": Dirac}.get(kind)
    if cls is None:
        raise ParameterDomainError(f"unknown localization kind {kind!r}; expected normal, uniform or dirac")
    try:
        return cls(**{k: float(v) for k, v in spec.items()})
    except TypeError as exc:
        raise ParameterDomainError(f"bad {kind} localization parameters {sorted(spec)}") from exc


def localization_to_dict(u: Localization) -> dict:
    if isinstance(u, Normal):
        return {"kind": "normal", "mu": u.mu, "sigma": u.sigma}
    if isinstance(u, Uniform):
        return {"kind": "uniform", "a": u.a, "b": u.b}
    return {"kind": "dirac", "theta_bar": u.theta_bar}


def sample_localization(u: Localization, m: int, rng) -> np.ndarray:
    """Draw m thetas from u; nonpositive Normal draws are redrawn."""
    if m < 1:
        raise ParameterDomainError("localization sample size must be at least 1")
    if isinstance(u, Dirac):
        return np.full(m, u.theta_bar)
    gen = _gen(rng)
    if isinstance(u, Uniform):
        return sample_uniform(u.a, u.b, gen, m)
    out = sample_normal(u.mu, u.sigma, gen, m)
    bad = out <= 0
    while bad.any():
        out[bad] = sample_normal(u.mu, u.sigma, gen, int(bad.sum()))
        bad = out <= 0
    return out
