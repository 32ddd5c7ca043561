import numpy as np
import pytest

from ovpnews.distributions import RngStream
from ovpnews.errors import ParameterDomainError
from ovpnews.localization import (Dirac, Normal, Uniform, localization_from_dict, localization_to_dict,
                                  sample_localization)


def test_dirac_sample():
    assert np.array_equal(sample_localization(Dirac(20.0), 3, RngStream(0, 0)), [20.0, 20.0, 20.0])


def test_uniform_and_normal_samples():
    u = sample_localization(Uniform(18.0, 22.0), 100_000, RngStream(1, 0))
    assert u.min() >= 18.0 and u.max() <= 22.0
    x = sample_localization(Normal(20.0, 1.0), 100_000, RngStream(1, 1))
    assert abs(x.mean() - 20.0) < 0.02


def test_normal_draws_stay_positive():
    x = sample_localization(Normal(0.5, 1.0), 10_000, RngStream(2, 0))
    assert x.size == 10_000 and x.min() > 0


def test_deterministic():
    a = sample_localization(Normal(20.0, 2.0), 50, RngStream(9, 3))
    assert np.array_equal(a, sample_localization(Normal(20.0, 2.0), 50, RngStream(9, 3)))


def test_labels_and_round_trip():
    for u in (Normal(20.0, 1.0), Uniform(18.0, 22.0), Dirac(20.0)):
        assert localization_from_dict(localization_to_dict(u)) == u
    assert Normal(20.0, 1.0).label == "normal_20_1"
    assert Uniform(18.0, 22.0).label == "uniform_18_22"


@pytest.mark.parametrize("make", [lambda: Normal(20.0, 0.0), lambda: Uniform(0.0, 5.0),
                                  lambda: Uniform(5.0, 5.0), lambda: Dirac(0.0)])
def test_invalid(make):
    with pytest.raises(ParameterDomainError):
        make()


def test_bad_dict():
    with pytest.raises(ParameterDomainError):
        localization_from_dict({"kind": "beta"})
    with pytest.raises(ParameterDomainError):
        sample_localization(Dirac(1.0), 0, RngStream(0, 0))
