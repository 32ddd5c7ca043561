import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from ovpnews.distributions import (RngStream, exponential_from_uniform, reg_lower_gamma, reg_lower_gamma_array,
                                   sample_exponential, sample_gamma, sample_normal, sample_uniform, stream_id)
from ovpnews.errors import ParameterDomainError


def test_inverse_cdf_examples():
    assert exponential_from_uniform(20.0, math.exp(-1.0)) == pytest.approx(20.0, abs=1e-12)
    assert exponential_from_uniform(1.0, 0.5) == pytest.approx(math.log(2.0), abs=1e-12)
    assert exponential_from_uniform(3.0, 1.0) == 0.0


def test_stream_identity():
    a = sample_exponential(20.0, RngStream(7, stream_id(3, 11)), 100)
    b = sample_exponential(20.0, RngStream(7, stream_id(3, 11)), 100)
    c = sample_exponential(20.0, RngStream(7, stream_id(3, 12)), 100)
    d = sample_exponential(20.0, RngStream(8, stream_id(3, 11)), 100)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_stream_id_packing():
    assert stream_id(0, 0) == 0
    assert stream_id(1, 0) == 1 << 32
    assert stream_id(2, 5) == (2 << 32) + 5
    assert stream_id(0, 0, purpose=1) != stream_id(0, 0)
    with pytest.raises(ParameterDomainError):
        stream_id(-1, 0)


def test_exponential_moments():
    x = sample_exponential(20.0, RngStream(1, 0), 1_000_000)
    assert x.min() >= 0
    assert abs(x.mean() - 20.0) < 0.1
    assert abs(x.var() - 400.0) < 5.0


def test_gamma_shape_one_is_exponential():
    e = sample_exponential(20.0, RngStream(3, 9), 100_000)
    g = sample_gamma(1.0, 20.0, RngStream(3, 9), 100_000)
    assert np.array_equal(e, g)
    assert stats.ks_2samp(e, g).pvalue > 0.01


@pytest.mark.parametrize("shape", [0.85, 1.15, 2.0, 5.0])
def test_gamma_matches_reference_cdf(shape):
    x = sample_gamma(shape, 20.0, RngStream(5, 0), 100_000)
    assert stats.kstest(x, stats.gamma(shape, scale=20.0).cdf).pvalue > 0.01
    assert abs(x.mean() - 20.0 * shape) < 0.02 * 20.0 * shape


def test_normal_and_uniform():
    x = sample_normal(20.0, 1.0, RngStream(4, 0), 200_000)
    assert abs(x.mean() - 20.0) < 0.01 and abs(x.var() - 1.0) < 0.02
    u = sample_uniform(18.0, 22.0, RngStream(4, 1), 100_000)
    assert u.min() >= 18.0 and u.max() <= 22.0
    assert abs(u.mean() - 20.0) < 0.02


def test_generator_and_stream_agree():
    s = RngStream(11, 4)
    assert np.array_equal(sample_exponential(2.0, s, 10), sample_exponential(2.0, s.generator(), 10))


@pytest.mark.parametrize("call", [
    lambda r: sample_exponential(0.0, r, 3),
    lambda r: sample_gamma(-1.0, 1.0, r, 3),
    lambda r: sample_gamma(1.0, 0.0, r, 3),
    lambda r: sample_normal(1.0, 0.0, r, 3),
    lambda r: sample_uniform(2.0, 2.0, r, 3),
])
def test_sampler_domain_errors(call):
    with pytest.raises(ParameterDomainError):
        call(RngStream(0, 0))


def test_reg_lower_gamma_examples():
    assert reg_lower_gamma(1.0, 0.0) == 0.0
    assert reg_lower_gamma(2.0, 2.0) == pytest.approx(1 - 3 * math.exp(-2.0), abs=1e-12)
    for t in (0.01, 0.5, 3.0, 40.0):
        assert reg_lower_gamma(1.0, t) == pytest.approx(-math.expm1(-t), abs=1e-14)
    assert reg_lower_gamma(3.0, 1e4) == 1.0
    with pytest.raises(ParameterDomainError):
        reg_lower_gamma(0.0, 1.0)
    with pytest.raises(ParameterDomainError):
        reg_lower_gamma(1.0, -1.0)


def test_reg_lower_gamma_against_reference():
    a = np.array([0.3, 0.85, 1.0, 1.15, 2.0, 5.0, 12.5, 40.0])[:, None]
    x = np.array([1e-3, 0.1, 1.0, 2.5, 5.0, 12.0, 20.0, 45.0, 60.0, 150.0])[None, :]
    got = reg_lower_gamma_array(a, x)
    assert np.max(np.abs(got - special.gammainc(a, x))) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 30.0), st.floats(0.0, 80.0), st.floats(1e-6, 10.0))
def test_reg_lower_gamma_increasing_in_x(a, x, dx):
    lo, hi = reg_lower_gamma(a, x), reg_lower_gamma(a, x + dx)
    assert 0.0 <= lo <= hi <= 1.0
