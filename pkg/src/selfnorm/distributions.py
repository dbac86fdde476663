"""Standardised (mean 0, variance 1) base laws driven by one uniform per draw."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConfigError

KINDS = ("normal", "rademacher", "two_point", "student")


@dataclass(frozen=True)
class BaseDistribution:
    """A mean-0, variance-1 law sampled by inverse CDF.

    ``two_point`` puts mass ``q`` on a point with the sign of ``a`` and the
    rest on a point of opposite sign; both locations are solved from ``(a, q)``
    so the law is always centred and standardised.  ``b`` is accepted for
    symmetry with the usual ``(a, b, q)`` parametrisation and ignored.
    ``student`` is Student's t with ``nu > 2`` degrees of freedom, rescaled to
    unit variance.
    """

    kind: str = "normal"
    a: float = 1.0
    q: float = 0.5
    nu: float = 5.0
    b: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError("base", f"unknown base distribution {self.kind!r}; expected one of {KINDS}")
        if self.kind == "two_point":
            if not 0.0 < self.q < 1.0:
                raise ConfigError("q", f"two-point mass q must lie in (0, 1), got {self.q}")
            if self.a == 0.0 or not math.isfinite(self.a):
                raise ConfigError("a", "two-point location a must be finite and nonzero")
        if self.kind == "student" and not self.nu > 2.0:
            raise ConfigError("nu", f"student base needs nu > 2 for unit variance, got {self.nu}")

    @property
    def label(self) -> str:
        return self.kind

    def _two_points(self) -> tuple[float, float]:
        s = math.copysign(1.0, self.a)
        return s * math.sqrt((1.0 - self.q) / self.q), -s * math.sqrt(self.q / (1.0 - self.q))

    def quantile(self, u):
        """Map uniforms on (0, 1) to draws.  Works elementwise on arrays."""
        u = np.asarray(u, dtype=np.float64)
        if self.kind == "normal":
            return special.ndtri(u)
        if self.kind == "rademacher":
            return np.where(u < 0.5, -1.0, 1.0)
        if self.kind == "two_point":
            hi, lo = self._two_points()
            return np.where(u < self.q, hi, lo)
        return special.stdtrit(self.nu, u) * math.sqrt((self.nu - 2.0) / self.nu)

    def abs_moment(self, r: float) -> float:
        """E|X|^r, infinite when it does not exist."""
        if self.kind == "normal":
            return 2.0 ** (r / 2) * math.gamma((r + 1) / 2) / math.sqrt(math.pi)
        if self.kind == "rademacher":
            return 1.0
        if self.kind == "two_point":
            hi, lo = self._two_points()
            return self.q * abs(hi) ** r + (1.0 - self.q) * abs(lo) ** r
        nu = self.nu
        if r >= nu:
            return math.inf
        log_m = (
            (r / 2) * math.log(nu - 2.0)
            + math.lgamma((r + 1) / 2)
            + math.lgamma((nu - r) / 2)
            - 0.5 * math.log(math.pi)
            - math.lgamma(nu / 2)
        )
        return math.exp(log_m)

    @property
    def constant_modulus(self) -> bool:
        """True when |X| = 1 almost surely."""
        return self.kind == "rademacher"
