"""Berry-Esseen bound evaluation, ratio diagnostics and log-log rate fits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .empirics import NnEstimate


def berry_esseen_core(nn_total: float, p: float) -> float:
    """N_n^{1/(2p+1)}; the bound itself is this times an unknown C_p."""
    if nn_total < 0:
        raise ValueError("N_n must be nonnegative")
    if not p > 1.0:
        raise ValueError("p must exceed 1")
    return nn_total ** (1.0 / (2.0 * p + 1.0))


@dataclass(frozen=True)
class BoundEvaluation:
    n: int
    p: float
    delta_hat: float
    delta_band: float
    Nn: NnEstimate
    statistic_kind: str
    alpha: float | None = None
    #: P_hat(statistic <= 0) - 1/2
    shift_at_zero: float | None = None
    m: int = 0
    degenerate_count: int = 0

    @property
    def bound_core(self) -> float:
        return berry_esseen_core(self.Nn.total, self.p)

    @property
    def ratio(self) -> float:
        return self.delta_hat / self.bound_core

    @property
    def ratio_interval(self) -> tuple[float, float]:
        """Ratio with delta_hat widened by its DKW band."""
        bc = self.bound_core
        return max(0.0, self.delta_hat - self.delta_band) / bc, (self.delta_hat + self.delta_band) / bc


class RatioReport(NamedTuple):
    max_ratio: float
    min_ratio: float
    spread: float
    #: smallest max/min spread compatible with every ratio's band interval
    band_spread: float
    #: ratio(last n) minus ratio(first n) minus the two band half-widths; <= 0 means no growth
    growth_excess: float


def ratio_series(evals: Sequence[BoundEvaluation]) -> RatioReport:
    if len(evals) < 2:
        raise ValueError("ratio_series needs at least two grid points")
    if len({e.p for e in evals}) != 1:
        raise ValueError("ratio_series: mixed p values")
    if len({e.statistic_kind for e in evals}) != 1:
        raise ValueError("ratio_series: mixed statistic kinds")
    ratios = np.array([e.ratio for e in evals])
    lo = np.array([e.ratio_interval[0] for e in evals])
    hi = np.array([e.ratio_interval[1] for e in evals])
    mx, mn = float(ratios.max()), float(ratios.min())
    spread = mx / mn if mn > 0 else np.inf
    band_spread = max(1.0, float(lo.max() / hi.min()))
    first, last = sorted(evals, key=lambda e: e.n)[0], sorted(evals, key=lambda e: e.n)[-1]
    slack = first.delta_band / first.bound_core + last.delta_band / last.bound_core
    growth = last.ratio - first.ratio - slack
    return RatioReport(mx, mn, float(spread), band_spread, float(growth))


class RateFit(NamedTuple):
    slope: float
    intercept: float
    residual_max: float


def fit_rate(ns: Sequence[int], deltas: Sequence[float]) -> RateFit:
    """Least-squares line through (ln n, ln delta)."""
    ns = np.asarray(ns, dtype=np.float64)
    d = np.asarray(deltas, dtype=np.float64)
    if ns.shape != d.shape:
        raise ValueError("ns and deltas must have the same length")
    if ns.size < 3:
        raise ValueError("fit_rate needs at least three points")
    if np.any(d <= 0) or np.any(ns <= 0):
        raise ValueError("fit_rate needs positive n and delta")
    x, y = np.log(ns), np.log(d)
    xm, ym = x.mean(), y.mean()
    slope = float(np.sum((x - xm) * (y - ym)) / np.sum((x - xm) ** 2))
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    return RateFit(slope, intercept, float(np.max(np.abs(resid))))
