import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import special

from ovpnews import evaluation as ev
from ovpnews.benchmarks import PolicyKind, PolicySpec
from ovpnews.errors import ParameterDomainError, PolicyError
from ovpnews.evaluation import (EvaluationRow, ExperimentConfig, Exponential, GammaTruth, draw_datasets,
                                evaluate_policy, evaluation_thetas, run_experiment, solver_sample)
from ovpnews.hypothesis import Prices, oracle_profit_exp
from ovpnews.localization import Dirac, Normal
from ovpnews.ovp import OvpConfig

P = Prices(2.0, 1.0)
SMALL = ExperimentConfig(m=4, n_bar=30, master_seed=5,
                         policies=(PolicySpec(PolicyKind.OVP), PolicySpec(PolicyKind.PTO), PolicySpec(PolicyKind.SAA),
                                   PolicySpec(PolicyKind.DRO_WASSERSTEIN, radius=0.5)))


def test_pto_below_oracle():
    cfg = ExperimentConfig(master_seed=1)
    row = evaluate_policy(PolicySpec(PolicyKind.PTO), 20.0, cfg, solver_sample(cfg))
    assert row.avg_profit < oracle_profit_exp(20.0, P)
    assert row.n_replicates == 200
    assert row.pct_regret == pytest.approx(100 * (row.oracle_profit - row.avg_profit) / row.oracle_profit)


def test_dataset_at_mean_gives_oracle():
    cfg = ExperimentConfig(n_bar=1)
    row = evaluate_policy(PolicySpec(PolicyKind.PTO), 20.0, cfg, solver_sample(cfg), datasets=np.full((1, 10), 20.0))
    assert row.avg_profit == pytest.approx(oracle_profit_exp(20.0, P), abs=1e-12)
    assert row.std_err == 0.0


def test_dirac_ovp_is_constant():
    cfg = ExperimentConfig(localization=Dirac(20.0), n_bar=50)
    q = ev.policy_quantities(PolicySpec(PolicyKind.OVP), draw_datasets(20.0, 0, cfg), cfg, solver_sample(cfg))
    assert np.allclose(q, 20.0 * math.log(2.0), atol=1e-6)
    row = evaluate_policy(PolicySpec(PolicyKind.OVP), 20.0, cfg, solver_sample(cfg))
    assert row.std_err < 1e-6


def test_gamma_one_matches_exponential():
    a = run_experiment(SMALL)
    b = run_experiment(replace(SMALL, truth=GammaTruth(1.0)))
    for x, y in zip(a, b):
        assert x.policy == y.policy
        assert x.avg_profit == pytest.approx(y.avg_profit, abs=1e-10)


def test_gamma_oracle_quantity():
    truth = GammaTruth(1.15)
    q = truth.oracle_quantity(20.0, P)
    assert q == pytest.approx(20.0 * special.gammaincinv(1.15, 0.5), abs=1e-6)
    assert truth.label == "gamma_1.15"


def test_rows_shape_and_order():
    rows = run_experiment(SMALL)
    assert len(rows) == 4 * 4
    thetas = [r.theta_true for r in rows]
    assert thetas == sorted(thetas)
    assert [r.policy for r in rows[:4]] == ["OVP", "PTO", "SAA", "DRO_WASSERSTEIN"]
    for r in rows:
        assert r.avg_profit <= r.oracle_profit + 3 * r.std_err + 1e-12


def test_deterministic_and_worker_invariant():
    assert run_experiment(SMALL) == run_experiment(SMALL)
    assert run_experiment(SMALL, threads=3) == run_experiment(SMALL)
    assert run_experiment(replace(SMALL, master_seed=6)) != run_experiment(SMALL)


def test_common_random_numbers(monkeypatch):
    seen = []
    original = ev.policy_quantities

    def spy(policy, datasets, cfg, sample):
        seen.append((policy.name, float(datasets[0, 0]), datasets.copy()))
        return original(policy, datasets, cfg, sample)

    monkeypatch.setattr(ev, "policy_quantities", spy)
    run_experiment(SMALL)
    per_theta = {}
    for name, key, data in seen:
        per_theta.setdefault(key, []).append((name, data))
    assert len(per_theta) == SMALL.m
    for entries in per_theta.values():
        assert [e[0] for e in entries] == ["OVP", "PTO", "SAA", "DRO_WASSERSTEIN"]
        assert all(np.array_equal(entries[0][1], e[1]) for e in entries)


def test_solver_and_evaluation_thetas_disjoint_streams():
    cfg = ExperimentConfig(m=20)
    assert not np.array_equal(solver_sample(cfg), evaluation_thetas(cfg))
    assert np.array_equal(solver_sample(cfg, Normal(20.0, 2.0)),
                          solver_sample(replace(cfg, localization=Normal(20.0, 2.0))))


def test_policy_error_context():
    cfg = replace(SMALL, ovp=OvpConfig(max_expand=0, b_init_factor=1.01),
                  policies=(PolicySpec(PolicyKind.OVP, localization=Dirac(1000.0)),))
    with pytest.raises(PolicyError) as info:
        run_experiment(cfg)
    err = info.value
    assert err.policy == "OVP" and err.replicate == 0 and err.theta > 0


def test_missing_radius():
    cfg = replace(SMALL, policies=(PolicySpec(PolicyKind.DRO_KL),))
    with pytest.raises(PolicyError, match="radius"):
        run_experiment(cfg)


def test_row_validation():
    with pytest.raises(ParameterDomainError):
        EvaluationRow(20.0, "PTO", 1.0, 0.0, 0.0, 1, 0.0)
    with pytest.raises(ParameterDomainError):
        ExperimentConfig(n=0)
    with pytest.raises(ParameterDomainError):
        evaluate_policy(PolicySpec(PolicyKind.PTO), -1.0, SMALL, np.array([20.0]))


def test_truths_agree_on_oracle_profit():
    assert Exponential().oracle_profit(20.0, P) == pytest.approx(GammaTruth(1.0).oracle_profit(20.0, P), abs=1e-7)
