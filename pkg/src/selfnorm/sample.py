from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Provenance:
    model_digest: str
    statistic: str
    master_seed: int


@dataclass(frozen=True)
class EmpiricalSample:
    """Sorted replicate values of one scalar statistic.

    ``degenerate_count`` replicates had a vanishing normaliser and are not in
    ``values``.
    """

    values: np.ndarray
    degenerate_count: int = 0
    provenance: Provenance | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("an empirical sample needs at least one value")
        if np.any(v[1:] < v[:-1]):
            v = np.sort(v)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def m(self) -> int:
        return self.values.size

    def cdf_at(self, x: float) -> float:
        """Right-continuous empirical CDF, P_hat(value <= x)."""
        return np.searchsorted(self.values, x, side="right") / self.m
