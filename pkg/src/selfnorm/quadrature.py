"""Quadrature for the final-step moment of the sharpness construction."""

from __future__ import annotations

import math

from scipy import integrate

from .errors import NumericError

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def sharpness_tail_integral(alpha: float, p: float, rtol: float = 1e-8) -> float:
    """J(alpha, p) = (2 pi)^{-1/2} int_{sqrt(alpha)/2}^inf (alpha/x)^{2p} exp(-x^2/2) dx.

    This is both E|X_n|^{2p} and E|<S>_n - 1|^p for the sharpness model.

    The integrand behaves like x^{-2p} over many decades when alpha is small,
    so the integral is taken in t = ln(x / x0), where it is smooth and decays
    double-exponentially.  The finite range ends at max(10, x0 + 10); the
    neglected tail is bounded by U^{-2p-1} exp(-U^2/2) and counted in the
    error budget.
    """
    if not alpha > 0.0:
        raise ValueError("alpha must be positive")
    if not p > 0.0:
        raise ValueError("p must be positive")
    x0 = 0.5 * math.sqrt(alpha)
    upper = max(10.0, x0 + 10.0)
    k = 1.0 - 2.0 * p
    half_x0_sq = 0.5 * x0 * x0

    def integrand(t: float) -> float:
        return math.exp(k * t - half_x0_sq * math.exp(2.0 * t))

    t_max = math.log(upper / x0)
    value, abserr = integrate.quad(integrand, 0.0, t_max, epsabs=0.0, epsrel=rtol / 10, limit=500)
    # back in x units the tail is U^{-2p-1} e^{-U^2/2}; in t units divide by x0^{1-2p}
    tail = math.exp((-2.0 * p - 1.0) * math.log(upper) - 0.5 * upper * upper - k * math.log(x0))
    achieved = (abserr + tail) / value
    if not achieved <= rtol:
        raise NumericError(f"quadrature for J(alpha={alpha}, p={p}) did not converge", achieved)
    log_prefactor = 2.0 * p * math.log(alpha) + k * math.log(x0)
    return math.exp(log_prefactor) * value / _SQRT_2PI


def sharpness_tail_constant(p: float) -> float:
    """lim_{alpha -> 0} J(alpha, p) / alpha^{p + 1/2} = 2^{2p-1} / ((2p - 1) sqrt(2 pi))."""
    return 2.0 ** (2.0 * p - 1.0) / ((2.0 * p - 1.0) * _SQRT_2PI)
