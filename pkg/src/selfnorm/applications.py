"""Student's t-statistic and the AR(1) least-squares estimator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import BaseDistribution
from .errors import DegenerateError
from .rng import Substream

# ---------------------------------------------------------------------------
# Student's t


def student_t(observations: Sequence[float]) -> float:
    """T_n = sqrt(n) * mean / sd, with the (n - 1)-denominator sample variance."""
    x = np.asarray(observations, dtype=np.float64)
    n = x.size
    if n < 2:
        raise ValueError("student_t needs at least two observations")
    mean = float(np.mean(x))
    ss = float(np.sum((x - mean) ** 2))
    if ss == 0.0:
        raise DegenerateError("all observations equal: sample variance is zero")
    return math.sqrt(n) * mean / math.sqrt(ss / (n - 1))


def self_normalized_sum(observations: Sequence[float]) -> float:
    """W = S_n / sqrt([S]_n) for a plain sequence of observations."""
    x = np.asarray(observations, dtype=np.float64)
    q = float(np.sum(x * x))
    if q == 0.0:
        raise DegenerateError("zero quadratic variation")
    return float(np.sum(x)) / math.sqrt(q)


def t_from_w(w, n: int):
    """T as a function of W: T = W sqrt((n - 1) / (n - W^2))."""
    return w * np.sqrt((n - 1) / (n - w * w))


def t_threshold(x: float, n: int) -> float:
    """x (n / (n + x^2 - 1))^{1/2}: the W-level matching T > x."""
    return x * math.sqrt(n / (n + x * x - 1.0))


def t_identity_check(observations: Sequence[float], x: float) -> bool:
    """Whether 1{T_n > x} and 1{W > x (n/(n + x^2 - 1))^{1/2}} agree.

    Only x >= 0 is accepted.  For x < 0 the analogous statement follows by
    applying this one to the negated sample.
    """
    if x < 0:
        raise ValueError("t_identity_check is defined for x >= 0")
    n = len(observations)
    t = student_t(observations)
    w = self_normalized_sum(observations)
    return (t > x) == (w > t_threshold(x, n))


# ---------------------------------------------------------------------------
# AR(1)


def ar1_second_moment(theta: float, sigma: float, n: int) -> float:
    """E Y_n^2 for Y_0 = 0, i.e. sigma^2 sum_{i=1}^n theta^{2(n-i)}."""
    if abs(theta) < 1.0:
        return sigma * sigma * (1.0 - theta ** (2 * n)) / (1.0 - theta * theta)
    return sigma * sigma * math.fsum(theta ** (2 * (n - i)) for i in range(1, n + 1))


def ar1_cumulative_second_moment(theta: float, sigma: float, n: int) -> float:
    """sum_{i=1}^n E Y_i^2."""
    return math.fsum(ar1_second_moment(theta, sigma, i) for i in range(1, n + 1))


@dataclass(frozen=True)
class Ar1Path:
    """Y_0 = 0, Y_1, ..., Y_{n+1} and the noise eps_1, ..., eps_{n+1}.

    The least-squares estimator over n terms uses Y_1..Y_{n+1}, so a path of
    horizon n carries one observation past Y_n.
    """

    observations: np.ndarray
    noise: np.ndarray
    theta: float
    sigma: float

    @property
    def n(self) -> int:
        return self.observations.size - 2


def ar1_simulate(theta: float, sigma: float, noise: BaseDistribution, n: int, stream: Substream) -> Ar1Path:
    """Run Y_{k+1} = theta Y_k + eps_{k+1} from Y_0 = 0.

    eps_k = sigma * noise(u) with u taken from ``stream`` at step k - 1, lane 0;
    this is the same draw layout the AR(1) martingale model uses.
    """
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    u = stream.block(np.arange(n + 1))
    eps = sigma * noise.quantile(u)
    y = np.zeros(n + 2)
    for k in range(n + 1):
        y[k + 1] = theta * y[k] + eps[k]
    return Ar1Path(y, eps, theta, sigma)


def ar1_path_from_noise(theta: float, sigma: float, eps: Sequence[float]) -> Ar1Path:
    eps = np.asarray(eps, dtype=np.float64)
    y = np.zeros(eps.size + 1)
    for k in range(eps.size):
        y[k + 1] = theta * y[k] + eps[k]
    return Ar1Path(y, eps, theta, sigma)


def _sum_y_sq(path: Ar1Path) -> float:
    y = path.observations
    s = float(np.sum(y[1:-1] ** 2))
    if s == 0.0:
        raise DegenerateError("all observations Y_1..Y_n are zero")
    return s


def ls_estimator(path: Ar1Path) -> float:
    """theta_hat = sum_{i=1}^n Y_i Y_{i+1} / sum_{i=1}^n Y_i^2."""
    y = path.observations
    return float(np.sum(y[1:-1] * y[2:])) / _sum_y_sq(path)


def ar1_self_normalized(path: Ar1Path) -> float:
    """(theta_hat - theta) sqrt(sum Y_i^2) / sigma, using the configured theta."""
    s = _sum_y_sq(path)
    return (ls_estimator(path) - path.theta) * math.sqrt(s) / path.sigma


def ar1_embedded_statistic(path: Ar1Path) -> float:
    """S_n / sqrt(<S>_n) of the martingale X_i = Y_i eps_{i+1} / (sigma B), B^2 = sum E Y_i^2.

    Algebraically equal to :func:`ar1_self_normalized`; computed independently.
    """
    n = path.n
    y = path.observations[1 : n + 1]
    eps_next = path.noise[1 : n + 1]
    b2 = ar1_cumulative_second_moment(path.theta, path.sigma, n)
    x = y * eps_next / (path.sigma * math.sqrt(b2))
    pred = float(np.sum(y * y)) / b2
    if pred == 0.0:
        raise DegenerateError("zero predictable variation")
    return float(np.sum(x)) / math.sqrt(pred)
