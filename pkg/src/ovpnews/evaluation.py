"""Out-of-sample evaluation of ordering policies.

For each true theta drawn from the evaluation localization, ``n_bar``
datasets of size ``n`` are simulated, every policy turns each dataset into an
order quantity, and the exact expected profit of that quantity under the true
demand law is averaged.  All policies see the same datasets: the dataset for
(theta index j, replicate i) comes from stream ``j * 2**32 + i`` regardless of
policy or worker.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import benchmarks as bm
from .distributions import (
    PURPOSE_EVAL_LOC,
    PURPOSE_SOLVER_LOC,
    RngStream,
    sample_exponential,
    sample_gamma,
    stream_id,
)
from .errors import NoRootError, ParameterDomainError, PolicyError
from .hypothesis import Prices, expected_profit_exp, expected_profit_gamma, oracle_profit_exp, oracle_quantity
from .localization import Localization, Normal, sample_localization
from .ovp import OvpConfig, solve_ovp_batch
from .search import golden_minimize_scalar


@dataclass(frozen=True)
class Exponential:
    """Exponential demand with mean theta (the assumed family)."""

    def sample(self, theta: float, gen: np.random.Generator, n: int) -> np.ndarray:
        return sample_exponential(theta, gen, n)

    def expected_profit(self, q, theta: float, prices: Prices):
        return expected_profit_exp(q, theta, prices)

    def oracle_quantity(self, theta: float, prices: Prices) -> float:
        return float(oracle_quantity(theta, prices))

    def oracle_profit(self, theta: float, prices: Prices) -> float:
        return float(oracle_profit_exp(theta, prices))

    @property
    def label(self) -> str:
        return "exponential"


@dataclass(frozen=True)
class GammaTruth:
    """Gamma(shape, theta) demand in shape-scale form; the mean is shape * theta."""

    shape: float

    def __post_init__(self):
        if not self.shape > 0:
            raise ParameterDomainError(f"gamma shape must be positive, got {self.shape}")

    def sample(self, theta: float, gen: np.random.Generator, n: int) -> np.ndarray:
        return sample_gamma(self.shape, theta, gen, n)

    def expected_profit(self, q, theta: float, prices: Prices):
        return expected_profit_gamma(q, self.shape, theta, prices)

    def oracle_quantity(self, theta: float, prices: Prices) -> float:
        return golden_minimize_scalar(lambda q: -self.expected_profit(q, theta, prices),
                                      0.0, self.shape * theta * 20.0, 1e-8)

    def oracle_profit(self, theta: float, prices: Prices) -> float:
        return float(self.expected_profit(self.oracle_quantity(theta, prices), theta, prices))

    @property
    def label(self) -> str:
        return f"gamma_{self.shape:g}"


Truth = Exponential | GammaTruth


def default_policies() -> tuple[bm.PolicySpec, ...]:
    return tuple(bm.PolicySpec(k) for k in bm.PolicyKind if k is not bm.PolicyKind.OQD)


@dataclass(frozen=True)
class ExperimentConfig:
    prices: Prices = Prices(2.0, 1.0)
    n: int = 10
    m: int = 50
    n_bar: int = 200
    localization: Localization = Normal(20.0, 1.0)
    truth: Truth = Exponential()
    policies: tuple[bm.PolicySpec, ...] = field(default_factory=default_policies)
    master_seed: int = 0
    ovp: OvpConfig = OvpConfig()

    def __post_init__(self):
        if min(self.n, self.m, self.n_bar) < 1:
            raise ParameterDomainError("n, m and n_bar must all be at least 1")
        object.__setattr__(self, "policies", tuple(self.policies))


@dataclass(frozen=True)
class EvaluationRow:
    theta_true: float
    policy: str
    avg_profit: float
    std_err: float
    pct_regret: float
    n_replicates: int
    oracle_profit: float

    def __post_init__(self):
        if not self.oracle_profit > 0:
            raise ParameterDomainError(f"oracle profit must be positive, got {self.oracle_profit}")


def solver_sample(cfg: ExperimentConfig, localization: Localization | None = None) -> np.ndarray:
    """Localization sample OVP solves against; disjoint from the evaluation thetas."""
    u = localization or cfg.localization
    return sample_localization(u, cfg.m, RngStream(cfg.master_seed, stream_id(0, 0, PURPOSE_SOLVER_LOC)))


def evaluation_thetas(cfg: ExperimentConfig) -> np.ndarray:
    return sample_localization(cfg.localization, cfg.m, RngStream(cfg.master_seed, stream_id(0, 0, PURPOSE_EVAL_LOC)))


def draw_datasets(theta: float, theta_index: int, cfg: ExperimentConfig) -> np.ndarray:
    """The (n_bar, n) block of datasets shared by every policy at this theta."""
    rows = [cfg.truth.sample(theta, RngStream(cfg.master_seed, stream_id(theta_index, i)).generator(), cfg.n)
            for i in range(cfg.n_bar)]
    return np.vstack(rows)


def policy_quantities(policy: bm.PolicySpec, datasets: np.ndarray, cfg: ExperimentConfig,
                      solver_loc_sample: np.ndarray) -> np.ndarray:
    """Order quantity for each dataset row."""
    kind = policy.kind
    n = datasets.shape[1]
    theta_hat = datasets.mean(axis=1)
    if kind in (bm.PolicyKind.OVP, bm.PolicyKind.PTO, bm.PolicyKind.OS, bm.PolicyKind.OQD,
                bm.PolicyKind.RO, bm.PolicyKind.DRO_MOMENTS) and np.any(theta_hat <= 0):
        i = int(np.argmax(theta_hat <= 0))
        raise NoRootError("all-zero dataset: sample mean is 0", index=i)
    prices = cfg.prices
    if kind is bm.PolicyKind.OVP:
        sample = solver_loc_sample if policy.localization is None else solver_sample(cfg, policy.localization)
        return solve_ovp_batch(theta_hat, n, sample, prices, cfg.ovp)
    if kind is bm.PolicyKind.PTO:
        return bm.solve_pto(theta_hat, prices)
    if kind is bm.PolicyKind.SAA:
        return bm.solve_saa(datasets, prices)
    if kind is bm.PolicyKind.OS:
        return bm.solve_os(theta_hat, n, prices)
    if kind is bm.PolicyKind.OQD:
        return bm.solve_oqd(theta_hat, n, prices)
    if kind is bm.PolicyKind.RO:
        return bm.solve_ro(theta_hat, prices, policy.shrink)
    if kind is bm.PolicyKind.DRO_MOMENTS:
        return bm.solve_dro_moments(theta_hat, bm.sample_variance(datasets), prices)
    if policy.radius is None:
        raise ParameterDomainError(f"{kind.value} needs a radius; calibrate one first")
    if kind is bm.PolicyKind.DRO_WASSERSTEIN:
        return bm.solve_dro_wasserstein(datasets, policy.radius, prices)
    return bm.solve_dro_kl(datasets, policy.radius, prices)


def evaluate_policy(policy: bm.PolicySpec, theta_true: float, cfg: ExperimentConfig,
                    solver_loc_sample: np.ndarray, *, theta_index: int = 0,
                    datasets: np.ndarray | None = None, oracle_profit: float | None = None) -> EvaluationRow:
    if not theta_true > 0:
        raise ParameterDomainError(f"theta_true must be positive, got {theta_true}")
    if datasets is None:
        datasets = draw_datasets(theta_true, theta_index, cfg)
    try:
        q = policy_quantities(policy, datasets, cfg, solver_loc_sample)
    except NoRootError as exc:
        raise PolicyError(str(exc), theta_true, policy.name, exc.index) from exc
    except (ValueError, ArithmeticError) as exc:
        raise PolicyError(str(exc), theta_true, policy.name, None) from exc
    profits = np.asarray(cfg.truth.expected_profit(q, theta_true, cfg.prices), dtype=float)
    k = profits.size
    avg = float(profits.mean())
    se = float(profits.std(ddof=1) / math.sqrt(k)) if k > 1 else 0.0
    if oracle_profit is None:
        oracle_profit = cfg.truth.oracle_profit(theta_true, cfg.prices)
    regret = 100.0 * (oracle_profit - avg) / abs(oracle_profit)
    return EvaluationRow(float(theta_true), policy.name, avg, se, regret, k, oracle_profit)


def _evaluate_theta(args) -> list[EvaluationRow]:
    cfg, theta_index, theta, sample = args
    datasets = draw_datasets(theta, theta_index, cfg)
    oracle = cfg.truth.oracle_profit(theta, cfg.prices)
    return [evaluate_policy(pol, theta, cfg, sample, theta_index=theta_index, datasets=datasets,
                            oracle_profit=oracle) for pol in cfg.policies]


def parallel_map(fn, items: list, threads: int = 1) -> list:
    """Ordered map; worker count never changes the result."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> list[EvaluationRow]:
    """One row per (evaluation theta, policy), sorted by theta then policy order."""
    thetas = evaluation_thetas(cfg)
    sample = solver_sample(cfg)
    tasks = [(cfg, j, float(t), sample) for j, t in enumerate(thetas)]
    per_theta = parallel_map(_evaluate_theta, tasks, threads)
    order = {pol.name: i for i, pol in enumerate(cfg.policies)}
    rows = [row for block in per_theta for row in block]
    return sorted(rows, key=lambda r: (r.theta_true, order[r.policy]))
