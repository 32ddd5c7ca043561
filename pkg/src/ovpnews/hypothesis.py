"""Exponential demand family and the newsvendor closed forms built on it.

Demand is mean-parameterized, f(d; theta) = exp(-d / theta) / theta, and
profit is p * min(d, q) - c * q.  The Gamma(shape, scale) helpers exist for
misspecification runs, where data come from a Gamma while the policies still
assume an exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import reg_lower_gamma_array
from .errors import DegenerateDataError, ParameterDomainError


@dataclass(frozen=True)
class Prices:
    p: float
    c: float

    def __post_init__(self):
        if not (self.p > self.c > 0):
            raise ParameterDomainError(f"prices must satisfy p > c > 0, got p={self.p}, c={self.c}")

    @property
    def log_ratio(self) -> float:
        return math.log(self.p / self.c)

    @property
    def fractile(self) -> float:
        """Critical fractile (p - c) / p."""
        return (self.p - self.c) / self.p


@dataclass(frozen=True)
class SufficientStat:
    theta_hat: float
    n: int


def as_dataset(data) -> np.ndarray:
    """Validate a demand sample and return it as a float array."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DegenerateDataError("dataset must be a nonempty 1-D sequence")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DegenerateDataError("demands must be finite and nonnegative")
    return arr


def mle(data) -> SufficientStat:
    """Sample mean, the MLE of the exponential mean."""
    arr = as_dataset(data)
    theta_hat = float(arr.mean())
    if theta_hat == 0:
        raise DegenerateDataError("all-zero demands: MLE of the exponential mean is 0")
    return SufficientStat(theta_hat, arr.size)


def _check_q(q):
    if np.any(np.asarray(q) < 0):
        raise ParameterDomainError("order quantity must be nonnegative")


def expected_profit_exp(q, theta, prices: Prices):
    """Expected profit p*theta*(1 - exp(-q/theta)) - c*q under Exp(theta) demand."""
    _check_q(q)
    return prices.p * theta * -np.expm1(-np.divide(q, theta)) - prices.c * np.asarray(q)


def expected_cost_exp(q, theta, prices: Prices):
    """phi(q, theta), the negated expected profit."""
    return -expected_profit_exp(q, theta, prices)


def dphi_dq(q, theta, prices: Prices):
    return prices.c - prices.p * np.exp(-np.divide(q, theta))


def oracle_quantity(theta, prices: Prices):
    """Full-information optimum theta * ln(p / c)."""
    return np.multiply(theta, prices.log_ratio)


def oracle_profit_exp(theta, prices: Prices):
    return expected_profit_exp(oracle_quantity(theta, prices), theta, prices)


def log_g1_weight(theta_hat, theta, n: int):
    """Log of the data-dependent factor of the exponential likelihood.

    The joint density of n draws factors as g0(y) * g1(theta_hat, theta) with
    g1 = theta**-n * exp(-n * theta_hat / theta).
    """
    if n < 0:
        raise ParameterDomainError("sample size must be nonnegative")
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0) or np.any(np.asarray(theta_hat) <= 0):
        raise ParameterDomainError("theta and theta_hat must be positive")
    return -n * np.log(theta) - n * np.divide(theta_hat, theta)


def expected_profit_gamma(q, shape: float, scale: float, prices: Prices):
    """Expected profit under Gamma(shape, scale) demand.

    Uses E[min(d, q)] = k*s*P(k+1, q/s) + q*(1 - P(k, q/s)).
    """
    if not (shape > 0 and scale > 0):
        raise ParameterDomainError("gamma parameters must be positive")
    _check_q(q)
    q = np.asarray(q, dtype=float)
    x = q / scale
    sales = shape * scale * reg_lower_gamma_array(shape + 1.0, x) + q * (1.0 - reg_lower_gamma_array(shape, x))
    out = prices.p * sales - prices.c * q
    return float(out) if out.ndim == 0 else out
