"""Benchmark ordering policies for the newsvendor.

Every solver accepts either one dataset (1-D) or a stack of datasets (2-D,
one per row) and returns a float or an array of order quantities to match.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateDataError, ParameterDomainError
from .hypothesis import Prices
from .localization import Localization
from .search import golden_minimize


class PolicyKind(str, Enum):
    OVP = "OVP"
    PTO = "PTO"
    SAA = "SAA"
    OS = "OS"
    OQD = "OQD"
    RO = "RO"
    DRO_MOMENTS = "DRO_MOMENTS"
    DRO_WASSERSTEIN = "DRO_WASSERSTEIN"
    DRO_KL = "DRO_KL"

    @property
    def needs_radius(self) -> bool:
        return self in (PolicyKind.DRO_WASSERSTEIN, PolicyKind.DRO_KL)


@dataclass(frozen=True)
class PolicySpec:
    kind: PolicyKind
    radius: float | None = None
    shrink: float = 0.95
    # OVP only: solve against this localization instead of the experiment's
    localization: Localization | None = None
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        if self.radius is not None:
            if not self.kind.needs_radius:
                raise ParameterDomainError(f"radius only applies to DRO_WASSERSTEIN/DRO_KL, not {self.kind.value}")
            if not self.radius >= 0:
                raise ParameterDomainError(f"radius must be nonnegative, got {self.radius}")
        if not 0 < self.shrink <= 1:
            raise ParameterDomainError(f"shrink must lie in (0, 1], got {self.shrink}")
        if self.localization is not None and self.kind is not PolicyKind.OVP:
            raise ParameterDomainError("a solver localization only applies to OVP")

    @property
    def name(self) -> str:
        return self.label or self.kind.value


def _stack(data) -> tuple[np.ndarray, bool]:
    arr = np.asarray(data, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.ndim != 2 or arr.shape[1] == 0 or arr.shape[0] == 0:
        raise DegenerateDataError("dataset must be nonempty")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DegenerateDataError("demands must be finite and nonnegative")
    return arr, single


def _out(q: np.ndarray, single: bool):
    return float(q[0]) if single else q


def os_coefficient(n: int, prices: Prices) -> float:
    """alpha = n * ((p/c)**(1/(n+1)) - 1)."""
    if n < 1:
        raise ParameterDomainError("n must be at least 1")
    return n * math.expm1(prices.log_ratio / (n + 1))


def solve_pto(theta_hat, prices: Prices):
    return np.multiply(theta_hat, prices.log_ratio)


def solve_saa(data, prices: Prices):
    """Smallest minimizer of the empirical cost: the ceil(N*(p-c)/p)-th order statistic."""
    arr, single = _stack(data)
    n = arr.shape[1]
    k = max(1, math.ceil(n * prices.fractile - 1e-12))
    return _out(np.sort(arr, axis=1)[:, k - 1], single)


def solve_os(theta_hat, n: int, prices: Prices):
    return os_coefficient(n, prices) * np.asarray(theta_hat, dtype=float)


def solve_oqd(theta_hat, n: int, prices: Prices):
    th = np.asarray(theta_hat, dtype=float)
    return np.maximum(0.0, os_coefficient(n, prices) * th - th**2 / (2.0 * n**3))


def solve_ro(theta_hat, prices: Prices, shrink: float = 0.95):
    """Worst case over theta in [shrink*theta_hat, (2-shrink)*theta_hat] is the lower end."""
    if not 0 < shrink <= 1:
        raise ParameterDomainError(f"shrink must lie in (0, 1], got {shrink}")
    return shrink * np.asarray(theta_hat, dtype=float) * prices.log_ratio


def solve_dro_moments(d_hat, sigma2_hat, prices: Prices):
    """Scarf's minimax order quantity for a known mean and variance bound.

    Orders nothing when (p-c)/p < sigma2/(sigma2 + d_hat**2); on equality it orders.
    """
    d = np.asarray(d_hat, dtype=float)
    s2 = np.asarray(sigma2_hat, dtype=float)
    if np.any(d <= 0) or np.any(s2 < 0):
        raise ParameterDomainError("need d_hat > 0 and sigma2_hat >= 0")
    p, c = prices.p, prices.c
    q = d + 0.5 * np.sqrt(s2) * (math.sqrt((p - c) / c) - math.sqrt(c / (p - c)))
    # cross-multiplied form of the zero-order test avoids rounding at the boundary
    zero = (p - c) * d**2 < c * s2
    return np.where(zero, 0.0, np.maximum(q, 0.0))


def sample_variance(data) -> np.ndarray:
    """Unbiased sample variance per row; 0 for single-point datasets."""
    arr, single = _stack(data)
    if arr.shape[1] < 2:
        v = np.zeros(arr.shape[0])
    else:
        v = arr.var(axis=1, ddof=1)
    return _out(v, single)


def _wasserstein_mass_moved(sorted_data: np.ndarray, radius: float) -> np.ndarray:
    """Fraction of each (ascending) atom the L1 adversary moves to zero.

    Moving atom i to 0 spends d_i/N of transport per unit mass and gains
    p*min(d_i, q)/N; the gain per unit transport is largest for the smallest
    atoms whatever q is, so the budget is spent on them in ascending order.
    """
    n = sorted_data.shape[1]
    budget = radius * n
    spent_before = np.concatenate([np.zeros((sorted_data.shape[0], 1)), np.cumsum(sorted_data, axis=1)[:, :-1]], axis=1)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        frac = np.where(sorted_data > 0, (budget - spent_before) / sorted_data, 1.0)
    return np.clip(frac, 0.0, 1.0)


def wasserstein_worst_case_cost(q, data, radius: float, prices: Prices):
    """Dual value W(q) = min_{lam >= 0} lam*r + mean_i beta_i(q, lam).

    beta_i is the max of c*q - p*min(d, q) - lam*|d - d_i| over the kinks
    d in {0, d_i, q}, plus the d -> inf limit c*q - p*q when lam = 0.  W is
    piecewise linear in lam with breakpoints {0, p} and p*min(d_i, q)/d_i, so
    the minimum over lam is attained at one of them.
    """
    arr, single = _stack(data)
    q = np.broadcast_to(np.asarray(q, dtype=float), (arr.shape[0],))[:, None]
    p, c = prices.p, prices.c
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(arr > 0, p * np.minimum(arr, q) / arr, 0.0)
    lams = np.concatenate([np.zeros_like(q), np.full_like(q, p), ratios], axis=1)[:, :, None]
    d = arr[:, None, :]
    qq = q[:, :, None]
    cand = np.stack([
        c * qq - lams * d,
        np.broadcast_to(c * qq - p * np.minimum(d, qq), lams.shape[:2] + d.shape[2:]),
        c * qq - p * qq - lams * np.abs(qq - d),
    ])
    beta = cand.max(axis=0)
    beta = np.where(lams == 0, np.maximum(beta, c * qq - p * qq), beta)
    w = (lams[:, :, 0] * radius + beta.mean(axis=2)).min(axis=1)
    return _out(w, single)


def solve_dro_wasserstein(data, radius: float, prices: Prices):
    """Order quantity minimizing the worst-case expected cost over an L1-Wasserstein ball.

    The worst-case distribution does not depend on q (see
    :func:`_wasserstein_mass_moved`), so the minimax order is the smallest
    critical-fractile quantile of that distribution.  Radius 0 gives SAA.
    """
    if not radius >= 0:
        raise ParameterDomainError(f"radius must be nonnegative, got {radius}")
    arr, single = _stack(data)
    n = arr.shape[1]
    srt = np.sort(arr, axis=1)
    moved = _wasserstein_mass_moved(srt, radius)
    # atoms at zero already sit where the adversary would send them
    at_zero = np.where(srt > 0, moved, 1.0).sum(axis=1) / n
    cdf = at_zero[:, None] + np.cumsum(np.where(srt > 0, 1.0 - moved, 0.0), axis=1) / n
    target = prices.fractile - 1e-12
    k = np.argmax(cdf >= target, axis=1)
    q = np.where(at_zero >= target, 0.0, srt[np.arange(arr.shape[0]), k])
    return _out(q, single)


def _losses(q: np.ndarray, arr: np.ndarray, prices: Prices) -> np.ndarray:
    return prices.c * q[:, None] - prices.p * np.minimum(arr, q[:, None])


def _kl_dual(lam: np.ndarray, losses: np.ndarray, radius: float) -> np.ndarray:
    top = losses.max(axis=1)
    z = (losses - top[:, None]) / lam[:, None]
    return lam * radius + top + lam * np.log(np.mean(np.exp(z), axis=1))


KL_LAMBDA_TOL = 1e-8
Q_TOL = 1e-6


def _kl_inner(losses: np.ndarray, radius: float, scale: np.ndarray) -> np.ndarray:
    lo = np.log(1e-8 * scale)
    hi = np.log(1e6 * scale)
    best = golden_minimize(lambda t: _kl_dual(np.exp(t), losses, radius), lo, hi, KL_LAMBDA_TOL)
    val = _kl_dual(np.exp(best), losses, radius)
    # lam -> 0+ limit of the dual is the largest loss
    return np.minimum(val, losses.max(axis=1))


def _kl_scale(arr: np.ndarray, prices: Prices) -> np.ndarray:
    s = prices.p * arr.max(axis=1)
    return np.where(s > 0, s, 1.0)


def kl_worst_case_cost(q, data, radius: float, prices: Prices):
    """K(q) = min_{lam > 0} lam*r + lam*log(mean_i exp(l_i(q)/lam)), l_i = c*q - p*min(d_i, q).

    Extended at lam -> 0+ by max_i l_i(q).
    """
    arr, single = _stack(data)
    q = np.broadcast_to(np.asarray(q, dtype=float), (arr.shape[0],)).copy()
    losses = _losses(q, arr, prices)
    if radius == 0:
        return _out(losses.mean(axis=1), single)
    return _out(_kl_inner(losses, radius, _kl_scale(arr, prices)), single)


def solve_dro_kl(data, radius: float, prices: Prices):
    """Order quantity minimizing the worst case over a KL ball around the empirical distribution.

    Nested golden-section searches: outer over q in [0, max demand], inner
    over log(lam).  Radius 0 returns the SAA quantity.
    """
    if not radius >= 0:
        raise ParameterDomainError(f"radius must be nonnegative, got {radius}")
    arr, single = _stack(data)
    if radius == 0:
        return solve_saa(arr[0] if single else arr, prices)
    scale = _kl_scale(arr, prices)

    def outer(q):
        return _kl_inner(_losses(q, arr, prices), radius, scale)

    q = golden_minimize(outer, np.zeros(arr.shape[0]), arr.max(axis=1), Q_TOL)
    return _out(q, single)
