import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from selfnorm.bounds import BoundEvaluation, berry_esseen_core, fit_rate, ratio_series
from selfnorm.distributions import BaseDistribution
from selfnorm.empirics import NnEstimate, estimate_Nn
from selfnorm.models import Family, Method, ModelSpec


def test_core_examples():
    assert berry_esseen_core(1.0, 1.7) == 1.0
    assert berry_esseen_core(0.0, 2.0) == 0.0
    assert berry_esseen_core(0.25, 2.0) == pytest.approx(0.757858283, rel=1e-9)


@given(a=st.floats(0, 1e6), b=st.floats(0, 1e6), p=st.floats(1.001, 20))
def test_core_monotone(a, b, p):
    lo, hi = sorted((a, b))
    assert berry_esseen_core(lo, p) <= berry_esseen_core(hi, p)


def test_core_continuous_at_zero():
    assert berry_esseen_core(1e-300, 1.5) < 1e-70


def test_core_rejects_bad_p():
    with pytest.raises(ValueError):
        berry_esseen_core(0.5, 1.0)


def _ev(n, delta_hat, nn_total=1.0, p=1.5, band=0.0, kind="self_normalized"):
    return BoundEvaluation(n, p, delta_hat, band, NnEstimate(nn_total, 0.0, nn_total, p, Method.EXACT), kind)


def test_ratio_series_examples():
    r = ratio_series([_ev(1, 0.3), _ev(2, 0.3), _ev(3, 0.3)])
    assert r.spread == 1.0 and r.band_spread == 1.0
    r = ratio_series([_ev(1, 0.2), _ev(2, 0.1)])
    assert r.spread == 2.0 and r.max_ratio == 0.2 and r.min_ratio == 0.1


def test_ratio_series_bands():
    r = ratio_series([_ev(1, 0.3, band=0.05), _ev(2, 0.1, band=0.05)])
    assert r.band_spread == pytest.approx(0.25 / 0.15)
    assert r.growth_excess == pytest.approx(0.1 - 0.3 - 0.1)


def test_ratio_series_contract():
    with pytest.raises(ValueError):
        ratio_series([_ev(1, 0.1)])
    with pytest.raises(ValueError):
        ratio_series([_ev(1, 0.1, p=1.5), _ev(2, 0.1, p=2.0)])
    with pytest.raises(ValueError):
        ratio_series([_ev(1, 0.1), _ev(2, 0.1, kind="student_t")])


def test_bound_evaluation_fields():
    e = _ev(64, 0.05, nn_total=0.25, p=2.0, band=0.01)
    assert e.bound_core == pytest.approx(0.25**0.2)
    assert e.ratio == pytest.approx(0.05 / 0.25**0.2)
    assert e.ratio_interval == pytest.approx((0.04 / 0.25**0.2, 0.06 / 0.25**0.2))


def test_fit_rate_examples():
    f = fit_rate([10, 100, 1000], [10**-0.5, 100**-0.5, 1000**-0.5])
    assert f.slope == pytest.approx(-0.5, abs=1e-12) and f.residual_max <= 1e-12
    ns = np.array([8, 32, 128, 512])
    f = fit_rate(ns, 3 * ns**-0.125)
    assert f.slope == pytest.approx(-0.125, abs=1e-12)
    assert f.intercept == pytest.approx(math.log(3), abs=1e-12)


@given(slope=st.floats(-3, 3), c=st.floats(0.01, 100))
def test_fit_rate_recovers_power_laws(slope, c):
    ns = np.array([3, 17, 90, 1000, 20000])
    f = fit_rate(ns, c * ns.astype(float) ** slope)
    assert abs(f.slope - slope) <= 1e-12 and f.residual_max <= 1e-12


def test_fit_rate_contract():
    with pytest.raises(ValueError):
        fit_rate([1, 2], [1.0, 2.0])
    with pytest.raises(ValueError):
        fit_rate([1, 2, 3], [1.0, 0.0, 2.0])
    with pytest.raises(ValueError):
        fit_rate([1, 2, 3], [1.0, 2.0])


@pytest.mark.parametrize("p", [1.25, 1.5, 2.0, 3.0])
@pytest.mark.parametrize("kind", ["rademacher", "normal"])
def test_iid_bound_slope(p, kind):
    ns = [16, 64, 256, 1024, 4096]
    cores = [berry_esseen_core(estimate_Nn(ModelSpec(Family.IID_SCALED, n, BaseDistribution(kind)), n, p, 1, 0).total, p)
             for n in ns]
    assert fit_rate(ns, cores).slope == pytest.approx((1 - p) / (2 * p + 1), abs=1e-10)
