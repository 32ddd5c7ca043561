"""Grid-search calibration of the Wasserstein and KL radii.

Thetas are drawn from the localization, one (or more) dataset per theta, and
each grid radius is scored by the average percentage gap of true expected
profit against the full-information oracle.  The same thetas and datasets are
reused for every radius.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import benchmarks as bm
from .distributions import PURPOSE_CV_DATA, PURPOSE_CV_THETA, RngStream, stream_id
from .errors import ParameterDomainError
from .evaluation import Exponential, Truth, parallel_map
from .hypothesis import Prices
from .localization import Localization, Normal, sample_localization


def default_grid(points: int = 60, lo: float = 1e-4, hi: float = 5.0) -> tuple[float, ...]:
    grid = np.geomspace(lo, hi, points)
    grid[0], grid[-1] = lo, hi
    return tuple(float(r) for r in grid)


@dataclass(frozen=True)
class CvConfig:
    grid: tuple[float, ...] = field(default_factory=default_grid)
    n_thetas: int = 20
    datasets_per_theta: int = 1
    localization: Localization = Normal(20.0, 1.0)
    seed: int = 0
    truth: Truth = Exponential()

    def __post_init__(self):
        grid = tuple(float(r) for r in self.grid)
        object.__setattr__(self, "grid", grid)
        if not grid:
            raise ParameterDomainError("radius grid is empty")
        if any(r < 0 for r in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ParameterDomainError("radius grid must be nonnegative and strictly increasing")
        if self.n_thetas < 1 or self.datasets_per_theta < 1:
            raise ParameterDomainError("n_thetas and datasets_per_theta must be at least 1")


_SOLVERS = {
    bm.PolicyKind.DRO_WASSERSTEIN: bm.solve_dro_wasserstein,
    bm.PolicyKind.DRO_KL: bm.solve_dro_kl,
}


def _check_kind(kind) -> bm.PolicyKind:
    try:
        kind = bm.PolicyKind(kind)
    except ValueError:
        kind = None
    if kind not in _SOLVERS:
        raise ParameterDomainError("radius calibration applies to DRO_WASSERSTEIN or DRO_KL only")
    return kind


def cv_sample(cfg: CvConfig, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(theta per dataset row, datasets) shared across the whole grid."""
    thetas = sample_localization(cfg.localization, cfg.n_thetas,
                                 RngStream(cfg.seed, stream_id(0, 0, PURPOSE_CV_THETA)))
    rows, row_theta = [], []
    for j, theta in enumerate(thetas):
        for k in range(cfg.datasets_per_theta):
            gen = RngStream(cfg.seed, stream_id(j, k, PURPOSE_CV_DATA)).generator()
            rows.append(cfg.truth.sample(float(theta), gen, n))
            row_theta.append(float(theta))
    return np.array(row_theta), np.vstack(rows)


def _gap_at(args) -> float:
    kind, radius, thetas, datasets, oracle, truth, prices = args
    q = _SOLVERS[kind](datasets, radius, prices)
    profit = np.array([truth.expected_profit(float(qi), float(t), prices) for qi, t in zip(q, thetas)])
    return float(np.mean(100.0 * (oracle - profit) / np.abs(oracle)))


def radius_gap_curve(kind, cfg: CvConfig, prices: Prices, n: int, threads: int = 1) -> np.ndarray:
    """Average percentage gap to the oracle for every radius in the grid."""
    kind = _check_kind(kind)
    thetas, datasets = cv_sample(cfg, n)
    oracle = np.array([cfg.truth.oracle_profit(float(t), prices) for t in thetas])
    tasks = [(kind, r, thetas, datasets, oracle, cfg.truth, prices) for r in cfg.grid]
    return np.array(parallel_map(_gap_at, tasks, threads))


def pick_radius(grid, gaps) -> float:
    """First grid radius attaining the smallest gap."""
    return float(grid[int(np.argmin(gaps))])


def calibrate_radius(kind, cfg: CvConfig, prices: Prices, n: int, threads: int = 1) -> float:
    return pick_radius(cfg.grid, radius_gap_curve(kind, cfg, prices, n, threads))
