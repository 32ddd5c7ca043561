import math
from dataclasses import replace

import numpy as np
import pytest

from ovpnews import crossval
from ovpnews.benchmarks import PolicyKind, solve_dro_wasserstein
from ovpnews.crossval import CvConfig, calibrate_radius, default_grid, pick_radius, radius_gap_curve
from ovpnews.errors import ParameterDomainError
from ovpnews.hypothesis import Prices, expected_profit_exp, oracle_profit_exp
from ovpnews.localization import Dirac

P = Prices(2.0, 1.0)
FAST = CvConfig(grid=default_grid(12), n_thetas=6, seed=3)


def test_default_grid():
    g = default_grid()
    assert len(g) == 60 and g[0] == 1e-4 and g[-1] == 5.0
    assert all(b > a for a, b in zip(g, g[1:]))


def test_singleton_grid():
    cfg = replace(FAST, grid=(0.5,))
    assert calibrate_radius(PolicyKind.DRO_WASSERSTEIN, cfg, P, 10) == 0.5


def test_constant_data_exhaustive(monkeypatch):
    cfg = CvConfig(grid=(0.5, 5.0, 9.0, 11.0, 20.0), n_thetas=3, localization=Dirac(20.0))
    monkeypatch.setattr(crossval, "cv_sample", lambda c, n: (np.full(3, 20.0), np.full((3, n), 20.0)))
    target = 20.0 * math.log(2.0)
    qs = [float(solve_dro_wasserstein(np.full(10, 20.0), r, P)) for r in cfg.grid]
    dist = [abs(q - target) for q in qs]
    expected = cfg.grid[dist.index(min(dist))]
    assert calibrate_radius(PolicyKind.DRO_WASSERSTEIN, cfg, P, 10) == expected == 0.5


def test_argmin_of_own_curve():
    for kind in (PolicyKind.DRO_WASSERSTEIN, PolicyKind.DRO_KL):
        gaps = radius_gap_curve(kind, FAST, P, 10)
        assert calibrate_radius(kind, FAST, P, 10) == FAST.grid[int(np.argmin(gaps))]
        assert np.array_equal(gaps, radius_gap_curve(kind, FAST, P, 10, threads=2))


def test_gap_curve_recomputed():
    thetas, data = crossval.cv_sample(FAST, 10)
    gaps = radius_gap_curve(PolicyKind.DRO_WASSERSTEIN, FAST, P, 10)
    for r, g in zip(FAST.grid, gaps):
        vals = [100 * (oracle_profit_exp(t, P) - expected_profit_exp(float(solve_dro_wasserstein(d, r, P)), t, P))
                / oracle_profit_exp(t, P) for t, d in zip(thetas, data)]
        assert g == pytest.approx(np.mean(vals), abs=1e-12)


def test_seed_changes_sample():
    a = crossval.cv_sample(FAST, 10)[1]
    assert np.array_equal(a, crossval.cv_sample(FAST, 10)[1])
    assert not np.array_equal(a, crossval.cv_sample(replace(FAST, seed=4), 10)[1])


def test_pick_radius_first_minimum():
    assert pick_radius((0.1, 0.2, 0.3), np.array([2.0, 1.0, 1.0])) == 0.2


def test_validation():
    with pytest.raises(ParameterDomainError):
        CvConfig(grid=())
    with pytest.raises(ParameterDomainError):
        CvConfig(grid=(0.2, 0.1))
    with pytest.raises(ParameterDomainError):
        radius_gap_curve(PolicyKind.SAA, FAST, P, 10)
