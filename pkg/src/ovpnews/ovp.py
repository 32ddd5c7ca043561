"""Optimize-via-predict solver for the exponential newsvendor.

For a sufficient statistic theta_hat the OVP order quantity is the root in q of

    sum_m dphi/dq(q, theta_m) * g1(theta_hat, theta_m)

over a sample theta_1..theta_M of the localization.  Each summand is
increasing in q with a positive weight, so bisection finds the unique root.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, NoRootError, ParameterDomainError
from .hypothesis import Prices, as_dataset, log_g1_weight
from .search import bisect_increasing, golden_minimize_scalar


@dataclass(frozen=True)
class OvpConfig:
    tol: float = 1e-8
    max_expand: int = 60
    b_init_factor: float = 2.0
    max_iter: int = 200
    # scale by min(theta)^n * exp(n*theta_hat/max(theta)) instead of max-log-weight normalization
    literal_scaling: bool = False

    def __post_init__(self):
        if not (self.tol > 0 and self.b_init_factor > 1):
            raise ParameterDomainError("OvpConfig requires tol > 0 and b_init_factor > 1")


def _loc_array(loc_sample) -> np.ndarray:
    thetas = np.asarray(loc_sample, dtype=float).ravel()
    if thetas.size == 0:
        raise ParameterDomainError("localization sample is empty")
    if np.any(thetas <= 0):
        raise ParameterDomainError("localization sample must be positive")
    return thetas


def ovp_weights(theta_hat, n: int, thetas: np.ndarray, literal_scaling: bool = False) -> np.ndarray:
    """Relative g1 weights, shape (len(theta_hat), M)."""
    th = np.atleast_1d(np.asarray(theta_hat, dtype=float))[:, None]
    if literal_scaling:
        scale = thetas.min() ** n * np.exp(n * th / thetas.max())
        return scale * thetas[None, :] ** -n * np.exp(-n * th / thetas[None, :])
    logw = log_g1_weight(th, thetas[None, :], n)
    return np.exp(logw - logw.max(axis=1, keepdims=True))


def _objective(q, weights, thetas, prices: Prices) -> np.ndarray:
    q = np.asarray(q, dtype=float)[:, None]
    return np.sum((prices.c - prices.p * np.exp(-q / thetas[None, :])) * weights, axis=1)


def search_objective(q, theta_hat, n: int, loc_sample, prices: Prices, literal_scaling: bool = False):
    """Weighted sampled first-order condition; increasing in q.

    Broadcasts over q and theta_hat; returns a float for scalar inputs.
    """
    thetas = _loc_array(loc_sample)
    if np.any(np.asarray(q) < 0):
        raise ParameterDomainError("q must be nonnegative")
    q_arr, th_arr = np.broadcast_arrays(np.atleast_1d(np.asarray(q, dtype=float)),
                                        np.atleast_1d(np.asarray(theta_hat, dtype=float)))
    w = ovp_weights(th_arr, n, thetas, literal_scaling)
    out = _objective(q_arr, w, thetas, prices)
    return float(out[0]) if np.ndim(q) == 0 and np.ndim(theta_hat) == 0 else out


def solve_ovp_batch(theta_hat, n: int, loc_sample, prices: Prices, cfg: OvpConfig = OvpConfig(),
                    return_iterations: bool = False):
    """OVP order quantities for a vector of sufficient statistics."""
    thetas = _loc_array(loc_sample)
    th = np.atleast_1d(np.asarray(theta_hat, dtype=float))
    if np.any(th <= 0):
        raise ParameterDomainError("theta_hat must be positive")
    w = ovp_weights(th, n, thetas, cfg.literal_scaling)

    def f(q):
        return _objective(q, w, thetas, prices)

    hi = cfg.b_init_factor * th
    f_hi = f(hi)
    for _ in range(cfg.max_expand):
        # an exact zero at the upper end is already the root
        short = f_hi < 0
        if not short.any():
            break
        hi = np.where(short, 2.0 * hi, hi)
        f_hi = np.where(short, f(hi), f_hi)
    failed = f_hi < 0
    if failed.any():
        i = int(np.argmax(failed))
        raise NoRootError(f"no sign change in [0, {hi[i]:g}] after {cfg.max_expand} doublings", index=i)
    root, iterations = bisect_increasing(f, np.zeros_like(hi), hi, cfg.tol, cfg.max_iter)
    root = np.where(f_hi == 0, hi, root)
    return (root, iterations) if return_iterations else root


def solve_ovp(theta_hat: float, n: int, loc_sample, prices: Prices, cfg: OvpConfig = OvpConfig()) -> float:
    return float(solve_ovp_batch([theta_hat], n, loc_sample, prices, cfg)[0])


def solve_ovp_saa(theta_hat: float, n: int, loc_sample, demand_samples_per_theta, prices: Prices,
                  tol: float = 1e-6) -> float:
    """OVP through a doubly sampled cost instead of the analytic derivative.

    Minimizes sum_m sum_l C(q, d_ml) * g1(theta_hat, theta_m) with
    C(q, d) = c*q - p*min(d, q), by golden-section search; the objective is
    convex and piecewise linear in q.
    """
    thetas = _loc_array(loc_sample)
    if len(demand_samples_per_theta) == 0:
        raise DegenerateDataError("empty family of demand samples")
    if len(demand_samples_per_theta) != thetas.size:
        raise ParameterDomainError("need exactly one demand sample per localization point")
    w = ovp_weights([theta_hat], n, thetas)[0]
    demands = [as_dataset(d) for d in demand_samples_per_theta]
    d_all = np.concatenate(demands)
    w_all = np.concatenate([np.full(d.size, wm) for d, wm in zip(demands, w)])
    w_total = w_all.sum()

    def cost(q: float) -> float:
        return prices.c * q * w_total - prices.p * float(np.dot(w_all, np.minimum(d_all, q)))

    hi = 3.0 * float(d_all.max())
    if hi == 0:
        return 0.0
    return golden_minimize_scalar(cost, 0.0, hi, tol)
