"""Numeric kernels: Phi, Kolmogorov distance, DKW bands, moments and N_n."""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np
from scipy import special

from .models import Method, ModelSpec, closed_form_moments, make_model
from .paths import accumulate, map_chunks
from .quadrature import sharpness_tail_constant, sharpness_tail_integral  # noqa: F401  (re-export)
from .sample import EmpiricalSample, Provenance  # noqa: F401  (re-export)


def std_normal_cdf(x):
    """Standard normal CDF, elementwise.  Absolute error well under 1e-12."""
    return special.ndtr(x)


def kolmogorov_distance(sample: EmpiricalSample, cdf: Callable = std_normal_cdf,
                        cdf_left: Callable | None = None) -> float:
    """sup_x |F_hat_m(x) - cdf(x)|, evaluated exactly from the order statistics.

    For distinct values this is max_i max(|i/m - cdf(w_i)|, |(i-1)/m - cdf(w_i)|).
    Ties are collapsed to their right limit F_hat(w) and left limit F_hat(w-),
    so lattice samples are handled too.  ``cdf_left`` gives the reference
    CDF's left limits; omit it for continuous references.
    """
    if not isinstance(sample, EmpiricalSample):
        sample = EmpiricalSample(np.asarray(sample, dtype=np.float64))
    m = sample.m
    w = sample.values
    right = np.searchsorted(w, w, side="right") / m
    left = np.searchsorted(w, w, side="left") / m
    f = np.asarray(cdf(w), dtype=np.float64)
    f_left = f if cdf_left is None else np.asarray(cdf_left(w), dtype=np.float64)
    return float(max(np.max(np.abs(right - f)), np.max(np.abs(left - f_left))))


def dkw_band(m: int, delta: float = 0.01) -> float:
    """sqrt(ln(2/delta) / (2m)): uniform CDF error radius at confidence 1 - delta."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * m))


def moment_abs(sample, r: float) -> float:
    v = sample.values if isinstance(sample, EmpiricalSample) else np.asarray(sample, dtype=np.float64)
    if v.size < 1:
        raise ValueError("empty sample")
    return float(np.mean(np.abs(v) ** r))


class NnEstimate(NamedTuple):
    sum_abs_2p: float
    pred_var_term: float
    total: float
    p: float
    method: Method
    mc_std_error: float = 0.0


def monte_carlo_Nn(spec: ModelSpec, p: float, m_plug: int, master_seed: int,
                   workers: int | None = None) -> NnEstimate:
    """Plug-in N_n: averages of sum |X_i|^{2p} and |<S>_n - 1|^p over simulated paths."""
    model = make_model(spec)

    def run(reps):
        acc = accumulate(model, master_seed, reps, p=p)
        return acc["A"], np.abs(acc["P"] - 1.0) ** p

    parts = map_chunks(run, m_plug, workers)
    a = np.concatenate([x[0] for x in parts])
    b = np.concatenate([x[1] for x in parts])
    tot = a + b
    se = float(np.std(tot, ddof=1) / math.sqrt(m_plug)) if m_plug > 1 else math.inf
    return NnEstimate(float(np.mean(a)), float(np.mean(b)), float(np.mean(tot)), p, Method.MONTE_CARLO, se)


def estimate_Nn(spec: ModelSpec, n: int, p: float, m_plug: int, master_seed: int,
                workers: int | None = None) -> NnEstimate:
    """N_n = sum_i E|X_i|^{2p} + E|<S>_n - 1|^p.

    Closed form or quadrature when the model allows it, otherwise Monte Carlo
    plug-in with a standard error.
    """
    spec = spec.with_horizon(n)
    rep = closed_form_moments(spec, p)
    if rep.method in (Method.EXACT, Method.QUADRATURE):
        return NnEstimate(rep.sum_abs_2p, rep.pred_var_term, rep.sum_abs_2p + rep.pred_var_term, p, rep.method)
    return monte_carlo_Nn(spec, p, m_plug, master_seed, workers)


def sharpness_zero_mass(alpha: float) -> float:
    """Exact P(S_n/sqrt([S]_n) <= 0) for the sharpness model, any n >= 2.

    S_{n-1} is exactly N(0, 1); the final step only moves paths with
    sqrt(alpha)/2 <= S_{n-1} <= sqrt(alpha) below zero, each with probability 1/2.
    """
    r = math.sqrt(alpha)
    return 0.5 + 0.5 * (float(std_normal_cdf(r)) - float(std_normal_cdf(0.5 * r)))


def sharpness_prediction(alpha: float) -> float:
    """Leading-order shift sqrt(alpha) / (4 sqrt(2 pi)) of P(W <= 0) above 1/2."""
    return math.sqrt(alpha) / (4.0 * math.sqrt(2.0 * math.pi))
