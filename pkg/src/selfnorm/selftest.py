"""Fast invariant checks runnable without pytest (``selfnorm selftest``)."""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from . import rng
from .applications import ar1_embedded_statistic, ar1_self_normalized, ar1_simulate, student_t, t_identity_check
from .bounds import berry_esseen_core, fit_rate
from .distributions import BaseDistribution
from .empirics import dkw_band, kolmogorov_distance, sharpness_tail_constant, sharpness_tail_integral, std_normal_cdf
from .models import Family, ModelSpec, closed_form_moments, make_model
from .paths import Statistic, accumulate, replicate_statistic, self_normalized, simulate_path
from .sample import EmpiricalSample


def _checks():
    yield "Phi symmetry", abs(std_normal_cdf(0.7) + std_normal_cdf(-0.7) - 1.0) < 1e-15

    m = 1000
    q = EmpiricalSample(special.ndtri((np.arange(1, m + 1) - 0.5) / m))
    yield "KS distance of exact quantiles is 1/(2m)", abs(kolmogorov_distance(q) - 0.5 / m) < 1e-12

    yield "DKW band m=800", abs(dkw_band(800, 0.01) - math.sqrt(math.log(200) / 1600)) < 1e-15

    fit = fit_rate([10, 100, 1000], [10**-0.5, 100**-0.5, 1000**-0.5])
    yield "fit_rate exact power law", abs(fit.slope + 0.5) < 1e-12 and fit.residual_max < 1e-12

    yield "bound core 0.25^(1/5)", abs(berry_esseen_core(0.25, 2.0) - 0.25**0.2) < 1e-15

    spec = ModelSpec(Family.IID_SCALED, 4, BaseDistribution("rademacher"))
    yield "Rademacher n=4, p=2 moments", closed_form_moments(spec, 2.0)[:2] == (0.25, 0.0)

    ratios = [sharpness_tail_integral(a, 1.5) / a**2 for a in (1e-4, 1e-6, 1e-8)]
    yield "J(alpha,p)/alpha^(p+1/2) flat", (max(ratios) - min(ratios)) / min(ratios) < 0.02 and \
        abs(ratios[-1] / sharpness_tail_constant(1.5) - 1) < 0.01

    model = make_model(ModelSpec(Family.SHARPNESS, 50, alpha=0.01))
    path = simulate_path(model, 50, rng.Substream(7, 3))
    acc = accumulate(model, 7, np.array([3]))
    yield "single path equals batch replication", acc["S"][0] == path.partial_sums[-1] and acc["Q"][0] == path.quadratic_variation[-1]
    yield "sharpness <S>_{n-1} = 1", abs(path.predictable_variation[-2] - 1.0) < 1e-13

    gauss = make_model(ModelSpec(Family.IID_SCALED, 16, BaseDistribution("normal")))
    a = replicate_statistic(gauss, 16, Statistic.SELF_NORMALIZED, 20_000, 1, workers=1)
    b = replicate_statistic(gauss, 16, Statistic.SELF_NORMALIZED, 20_000, 1, workers=4)
    yield "worker-count independence", np.array_equal(a.values, b.values)
    yield "|W| <= sqrt(n)", float(np.max(np.abs(a.values))) <= 4.0 * (1 + 1e-12)
    yield "W close to normal", kolmogorov_distance(a) < 0.03

    x = BaseDistribution("normal").quantile(rng.uniforms(rng.replication_keys(5, np.arange(7)), 1))
    yield "t identity", all(t_identity_check(x, v) for v in (0.0, 0.5, 1.0, 2.0)) and math.isfinite(student_t(x))

    ar = ar1_simulate(0.5, 1.0, BaseDistribution("normal"), 200, rng.Substream(11, 0))
    lhs, rhs = ar1_self_normalized(ar), ar1_embedded_statistic(ar)
    yield "AR(1) embedded martingale identity", abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def run_selftest(verbose: bool = True) -> bool:
    ok = True
    for name, passed in _checks():
        passed = bool(passed)
        ok &= passed
        if verbose:
            print(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
