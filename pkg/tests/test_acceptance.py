"""Acceptance criteria AC-1 .. AC-8 at their stated tolerances.

Every criterion prints one ``AC-k: PASS|FAIL`` line (also collected in the
terminal summary).  Monte Carlo cells use the default master seed.
"""
import math

import mpmath as mp
import numpy as np
import pytest

from selfnorm import rng
from selfnorm.applications import (
    ar1_embedded_statistic,
    ar1_second_moment,
    ar1_self_normalized,
    ar1_simulate,
    student_t,
    t_from_w,
    t_identity_check,
)
from selfnorm.bounds import ratio_series
from selfnorm.distributions import BaseDistribution
from selfnorm.empirics import (
    dkw_band,
    kolmogorov_distance,
    sharpness_tail_integral,
    std_normal_cdf,
)
from selfnorm.errors import DegenerateError
from selfnorm.harness import DEFAULT_SEED, ExperimentConfig, evaluate_cell, report_csv, run_experiment
from selfnorm.models import Family, ModelSpec, make_model
from selfnorm.paths import Statistic, replicate_statistic
from selfnorm.sample import EmpiricalSample

NORMAL = BaseDistribution("normal")
RADEMACHER = BaseDistribution("rademacher")
N_GRID = (16, 64, 256, 1024)


def _ratio_experiment(family, statistic, p, m=200_000):
    cfg = ExperimentConfig(
        experiment_id=f"{family.value}-{p}", model=ModelSpec(family, N_GRID[0], RADEMACHER),
        statistic=statistic, n_grid=N_GRID, p=p, m=m,
    )
    rows = run_experiment(cfg).rows
    return rows, ratio_series(rows)


def _ratio_detail(rows, rep):
    ratios = " ".join(f"{r.ratio:.4f}" for r in rows)
    return (f"ratios[{ratios}] band_spread={rep.band_spread:.3f} (<=3) "
            f"growth_excess={rep.growth_excess:+.4f} (<=0)")


# -- AC-1 / AC-2 ----------------------------------------------------------------


@pytest.mark.parametrize("p", [1.5, 2.0])
def test_ac1_iid_ratio_stability(p, verdict):
    rows, rep = _ratio_experiment(Family.IID_SCALED, Statistic.SELF_NORMALIZED, p)
    verdict(f"AC-1 (iid Rademacher, W, p={p})", rep.band_spread <= 3.0 and rep.growth_excess <= 0.0,
            _ratio_detail(rows, rep))


@pytest.mark.parametrize("p", [1.5, 2.0])
def test_ac2_multiplicative_ratio_stability(p, verdict):
    rows, rep = _ratio_experiment(Family.MULTIPLICATIVE, Statistic.VARIANCE_NORMALIZED, p)
    verdict(f"AC-2 (multiplicative Rademacher, V, p={p})", rep.band_spread <= 3.0 and rep.growth_excess <= 0.0,
            _ratio_detail(rows, rep))


# -- AC-3 / AC-4 -----------------------------------------------------------------


def _zero_mass_oracle(alpha):
    mp.mp.dps = 30
    r = mp.sqrt(alpha)
    return float(mp.mpf("0.5") + (mp.ncdf(r) - mp.ncdf(r / 2)) / 2)


@pytest.fixture(scope="module")
def sharpness_rows():
    cfg = ExperimentConfig(
        experiment_id="sharpness", model=ModelSpec(Family.SHARPNESS, 200, alpha=0.01),
        statistic=Statistic.SELF_NORMALIZED, n_grid=(200,), p=1.5, m=1_000_000,
        plug_in_replications=1000, alphas=(0.01,),
    )
    return {a: evaluate_cell(cfg, 200, a) for a in (0.04, 0.01)}


def test_ac3_zero_mass(sharpness_rows, verdict):
    target = 0.5099446
    assert abs(_zero_mass_oracle(0.01) - target) < 1e-7
    p_hat = 0.5 + sharpness_rows[0.01].shift_at_zero
    tol = 4 * math.sqrt(0.25 / 1e6)
    verdict("AC-3a (sharpness P(W<=0), alpha=0.01)", abs(p_hat - target) <= tol,
            f"P_hat={p_hat:.6f} target={target} |diff|={abs(p_hat - target):.6f} (<= {tol:.4f})")


@pytest.mark.parametrize("alpha", [0.04, 0.01])
def test_ac3_sqrt_alpha_scaling(sharpness_rows, alpha, verdict):
    lead = 1.0 / (4.0 * math.sqrt(2.0 * math.pi))
    assert lead == pytest.approx(0.0997356, abs=5e-8)
    scaled = sharpness_rows[alpha].shift_at_zero / math.sqrt(alpha)
    rel = abs(scaled - lead) / lead
    verdict(f"AC-3b (sharpness shift/sqrt(alpha), alpha={alpha})", rel <= 0.10,
            f"scaled={scaled:.5f} leading={lead:.7f} rel_err={rel:.3%} (<= 10%)")


@pytest.mark.parametrize("p", [1.25, 1.5, 2.0])
def test_ac4_tail_integral_order(p, verdict):
    vals = [sharpness_tail_integral(a, p) / a ** (p + 0.5) for a in (1e-4, 1e-6, 1e-8)]
    spread = max(vals) / min(vals) - 1.0
    verdict(f"AC-4 (J(alpha,p)/alpha^(p+1/2), p={p})", spread < 0.02,
            "values[" + " ".join(f"{v:.6g}" for v in vals) + f"] variation={spread:.3%} (< 2%)")


# -- AC-5 ------------------------------------------------------------------------


def test_ac5_t_identity(verdict):
    samples, xs = 10_000, (0.0, 0.5, 1.0, 2.0)
    failures = checks = degenerate = 0
    worst = 0.0
    for n in (5, 30):
        keys = rng.replication_keys(DEFAULT_SEED, np.arange(samples))
        obs = np.stack([NORMAL.quantile(rng.uniforms(keys, k)) for k in range(n)], axis=1)
        for row in obs:
            try:
                t = student_t(row)
            except DegenerateError:
                degenerate += 1
                continue
            w = float(np.sum(row)) / math.sqrt(float(np.sum(row * row)))
            worst = max(worst, abs(t - t_from_w(w, n)) / max(1.0, abs(t)))
            for x in xs:
                checks += 1
                failures += not t_identity_check(row, x)
    verdict("AC-5 (t-statistic identity)", failures == 0 and worst <= 1e-12,
            f"{checks} checks, {failures} failures, {degenerate} degenerate, max rel T-W error={worst:.2e} (<= 1e-12)")


# -- AC-6 ------------------------------------------------------------------------


@pytest.mark.parametrize("theta", [0.0, 0.5, -0.8])
def test_ac6a_ar1_second_moment(theta, verdict):
    m, n = 100_000, 50
    keys = rng.replication_keys(DEFAULT_SEED, np.arange(m))
    y = np.zeros(m)
    for k in range(n):
        y = theta * y + NORMAL.quantile(rng.uniforms(keys, k))
    sq = y * y
    se = sq.std(ddof=1) / math.sqrt(m)
    exact = ar1_second_moment(theta, 1.0, n)
    verdict(f"AC-6a (AR(1) E Y_n^2, theta={theta})", abs(sq.mean() - exact) <= 4 * se,
            f"mc={sq.mean():.5f} exact={exact:.5f} |diff|/se={abs(sq.mean() - exact) / se:.2f} (<= 4)")


def test_ac6b_embedded_identity(verdict):
    worst = 0.0
    for r in range(10_000):
        path = ar1_simulate(0.5, 1.0, NORMAL, 50, rng.Substream(DEFAULT_SEED, r))
        a, b = ar1_self_normalized(path), ar1_embedded_statistic(path)
        worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    verdict("AC-6b (AR(1) embedded-martingale identity)", worst <= 1e-12,
            f"10000 paths, max rel diff={worst:.2e} (<= 1e-12)")


def test_ac6c_ar1_normal_approximation(verdict):
    m = 100_000
    deltas = {}
    for n in (100, 400, 1600):
        model = make_model(ModelSpec(Family.AR1_NOISE, n, NORMAL, theta=0.5))
        deltas[n] = kolmogorov_distance(replicate_statistic(model, n, Statistic.AR1_SELF_NORMALIZED, m, DEFAULT_SEED))
    band = dkw_band(m, 0.01)
    ok = deltas[1600] < deltas[100] - 2 * band and deltas[1600] <= 0.05
    verdict("AC-6c (AR(1) normal approximation improves)", ok,
            " ".join(f"D({n})={d:.5f}" for n, d in deltas.items()) + f" band={band:.5f}")


# -- AC-7 / AC-8 -----------------------------------------------------------------


def test_ac7_numeric_kernels(phi_fixture, verdict):
    xs = np.array([x for x, _ in phi_fixture])
    ref = np.array([v for _, v in phi_fixture])
    phi_err = float(np.max(np.abs(std_normal_cdf(xs) - ref)))
    ks_err = 0.0
    for m in (1, 10, 1000):
        quantiles = np.array([float(mp.sqrt(2) * mp.erfinv(2 * mp.mpf(i - 0.5) / m - 1)) for i in range(1, m + 1)])
        ks_err = max(ks_err, abs(kolmogorov_distance(EmpiricalSample(quantiles)) - 0.5 / m))
    verdict("AC-7 (Phi fixture and Kolmogorov quantile construction)",
            len(phi_fixture) == 200 and phi_err <= 1e-12 and ks_err <= 1e-15,
            f"max|Phi-fixture|={phi_err:.2e} (<= 1e-12), max|D-1/(2m)|={ks_err:.2e} (<= 1e-15)")


def test_ac8_determinism(monkeypatch, verdict):
    cfg = ExperimentConfig(
        experiment_id="determinism", model=ModelSpec(Family.AR1_NOISE, 20, NORMAL, theta=0.5),
        statistic=Statistic.AR1_SELF_NORMALIZED, n_grid=(20, 80), p=2.0, m=20_000, plug_in_replications=2000,
    )
    outputs = []
    for workers in ("1", "4", "8", "1"):
        monkeypatch.setenv("WORKERS", workers)
        outputs.append(report_csv(run_experiment(cfg)).encode())
    verdict("AC-8 (byte-identical CSV across WORKERS 1/4/8 and rerun)", len(set(outputs)) == 1,
            f"{len(set(outputs))} distinct outputs over 4 runs, {len(outputs[0])} bytes")
