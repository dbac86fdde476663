"""Martingale-difference models.

A model is an immutable description plus a step function.  The step function
takes the current state and a handful of uniforms and returns the increment
together with its exact conditional second moment.  ``Model.advance`` is the
vectorised core; ``Model.step`` is a thin scalar wrapper around it, so a path
simulated one step at a time is bit-identical to the same replication
simulated in a batch.

Draw contract (uniforms per step, see ``Model.draws_per_step``):

* one uniform per scalar draw;
* the sharpness final step takes two: the first picks the sign, the second is
  unused and only keeps the interface uniform;
* the AR(1) noise model takes one extra uniform before the first step, for
  the initial observation ``Y_1 = eps_1``.
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import asdict, dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy import special

from .applications import ar1_cumulative_second_moment
from .distributions import BaseDistribution
from .errors import ConfigError
from .quadrature import sharpness_tail_integral


class Family(str, enum.Enum):
    IID_SCALED = "iid"
    MULTIPLICATIVE = "multiplicative"
    SHARPNESS = "sharpness"
    AR1_NOISE = "ar1"


class Method(str, enum.Enum):
    EXACT = "exact"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo_plug_in"
    UNAVAILABLE = "unavailable"


@dataclass(frozen=True)
class ModelSpec:
    family: Family
    n: int
    base: BaseDistribution = field(default_factory=BaseDistribution)
    alpha: float | None = None
    theta: float | None = None
    sigma: float = 1.0

    @property
    def name(self) -> str:
        if self.family is Family.SHARPNESS:
            return "sharpness"
        return f"{self.family.value}_{self.base.label}"

    def with_horizon(self, n: int) -> "ModelSpec":
        return replace(self, n=n)

    def with_alpha(self, alpha: float) -> "ModelSpec":
        return replace(self, alpha=alpha)

    def digest(self) -> str:
        d = asdict(self)
        d["family"] = self.family.value
        text = repr(sorted(d.items()))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


class ModelState(NamedTuple):
    """``k`` steps taken so far; ``value`` is the family's running quantity.

    IidScaled: unused (0).  MultiplicativeStationary: the previous increment.
    Sharpness: the partial sum S_k.  Ar1Noise: the current observation Y_{k+1}.
    """

    k: int
    value: float


class StepOutcome(NamedTuple):
    increment: float
    conditional_second_moment: float
    new_state: ModelState


class MomentReport(NamedTuple):
    sum_abs_2p: float
    pred_var_term: float
    method: Method


def stationary_gain_sq(prev, n: int):
    """g(x)^2 = 0.5 + 0.5 min(1, n x^2): the default bounded multiplicative gain, squared."""
    return 0.5 + 0.5 * np.minimum(1.0, n * (prev * prev))


class Model:
    """Stateless stepper for one :class:`ModelSpec`; all state lives in :class:`ModelState`."""

    def __init__(self, spec: ModelSpec):
        self.spec = spec
        n = spec.n
        self._inv_sqrt_n = 1.0 / math.sqrt(n)
        self._inv_n = 1.0 / n
        if spec.family is Family.SHARPNESS:
            self._prefix_scale = 1.0 / math.sqrt(n - 1)
            self._prefix_var = 1.0 / (n - 1)
            self._half_root = 0.5 * math.sqrt(spec.alpha)
        elif spec.family is Family.AR1_NOISE:
            cum = ar1_cumulative_second_moment(spec.theta, spec.sigma, n)
            self._pred_norm = 1.0 / cum
            self._inc_norm = 1.0 / (spec.sigma * math.sqrt(cum))

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def initial_draws(self) -> int:
        return 1 if self.spec.family is Family.AR1_NOISE else 0

    def draws_per_step(self, k: int) -> int:
        """Uniforms consumed by step ``k`` (1-based)."""
        if self.spec.family is Family.SHARPNESS and k == self.spec.n:
            return 2
        return 1

    def initial_value(self, u0=None):
        if self.spec.family is Family.AR1_NOISE:
            return self.spec.sigma * self.spec.base.quantile(u0)
        return 0.0

    def initial_state(self, draws=()) -> ModelState:
        if len(draws) < self.initial_draws:
            raise ValueError("draw supply exhausted")
        u0 = draws[0] if self.initial_draws else None
        return ModelState(0, float(self.initial_value(u0)))

    def advance(self, k: int, value, u0):
        """Vectorised step ``k`` (1-based) for arrays of states and uniforms.

        Returns ``(increment, conditional_second_moment, new_value)``.
        """
        spec = self.spec
        fam = spec.family
        if not 1 <= k <= spec.n:
            raise ValueError(f"step {k} outside horizon 1..{spec.n}")
        if fam is Family.IID_SCALED:
            inc = spec.base.quantile(u0) * self._inv_sqrt_n
            cvar = np.full_like(inc, self._inv_n)
            return inc, cvar, value
        if fam is Family.MULTIPLICATIVE:
            gsq_n = stationary_gain_sq(value, spec.n) * self._inv_n
            inc = spec.base.quantile(u0) * np.sqrt(gsq_n)
            return inc, gsq_n, inc
        if fam is Family.SHARPNESS:
            if k < spec.n:
                inc = special.ndtri(u0) * self._prefix_scale
                return inc, np.full_like(inc, self._prefix_var), value + inc
            x = np.asarray(value, dtype=np.float64)
            hit = x >= self._half_root
            f = np.divide(1.0, x, out=np.zeros_like(x), where=hit)
            mag = spec.alpha * f
            inc = np.where(np.asarray(u0) < 0.5, -mag, mag)
            return inc, mag * mag, value + inc
        # AR(1): X_k = Y_k eps_{k+1} / (sigma B), E[X_k^2 | F] = Y_k^2 / B^2
        eps = spec.sigma * spec.base.quantile(u0)
        inc = value * eps * self._inc_norm
        cvar = value * value * self._pred_norm
        return inc, cvar, spec.theta * value + eps

    def step(self, state: ModelState, draws) -> StepOutcome:
        k = state.k + 1
        if len(draws) < self.draws_per_step(k):
            raise ValueError("draw supply exhausted")
        inc, cvar, new_value = self.advance(k, np.float64(state.value), np.float64(draws[0]))
        return StepOutcome(float(inc), float(cvar), ModelState(k, float(new_value)))


def make_model(spec: ModelSpec) -> Model:
    if not isinstance(spec.n, (int, np.integer)) or spec.n < 1:
        raise ConfigError("n", f"horizon must be a positive integer, got {spec.n!r}")
    if spec.family is Family.SHARPNESS:
        if spec.n < 2:
            raise ConfigError("n", "sharpness model needs n >= 2")
        if spec.alpha is None or not 0.0 < spec.alpha <= 1.0:
            raise ConfigError("alpha", f"alpha must lie in (0, 1], got {spec.alpha}")
    if spec.family is Family.AR1_NOISE:
        if spec.theta is None or not abs(spec.theta) < 1.0:
            raise ConfigError("theta", f"|theta| < 1 required, got {spec.theta}")
        if not spec.sigma > 0.0:
            raise ConfigError("sigma", f"sigma must be positive, got {spec.sigma}")
    return Model(spec)


def _stationary_rademacher_gains(n: int) -> np.ndarray:
    """Deterministic g(X_{i-1})^2 sequence when |eps| = 1 and X_0 = 0."""
    out = np.empty(n)
    prev = 0.0
    for i in range(n):
        gsq_n = float(stationary_gain_sq(prev, n)) / n
        out[i] = gsq_n
        prev = math.sqrt(gsq_n)
    return out


def closed_form_moments(spec: ModelSpec, p: float) -> MomentReport:
    """The two pieces of N_n, sum_i E|X_i|^{2p} and E|<S>_n - 1|^p, where available."""
    if not p >= 1.0:
        raise ConfigError("p", "p must be at least 1")
    n = spec.n
    fam = spec.family
    if fam is Family.IID_SCALED:
        m2p = spec.base.abs_moment(2.0 * p)
        if not math.isfinite(m2p):
            raise ConfigError("p", f"E|X|^{2 * p:g} is infinite for base {spec.base.label}")
        return MomentReport(n ** (1.0 - p) * m2p, 0.0, Method.EXACT)
    if fam is Family.MULTIPLICATIVE:
        if not spec.base.constant_modulus:
            return MomentReport(math.nan, math.nan, Method.UNAVAILABLE)
        # |eps| = 1 makes every g(X_{i-1}) deterministic, hence <S>_n too
        cv = _stationary_rademacher_gains(n)
        return MomentReport(float(np.sum(cv**p)), abs(math.fsum(cv) - 1.0) ** p, Method.EXACT)
    if fam is Family.SHARPNESS:
        j = sharpness_tail_integral(spec.alpha, p)
        prefix = (n - 1) ** (1.0 - p) * BaseDistribution("normal").abs_moment(2.0 * p)
        return MomentReport(prefix + j, j, Method.QUADRATURE)
    return MomentReport(math.nan, math.nan, Method.UNAVAILABLE)


# -- config (de)serialisation -------------------------------------------------

_BASE_KEYS = {"a": "two_point_a", "q": "two_point_q", "nu": "student_nu"}


def spec_to_config(spec: ModelSpec) -> dict[str, str]:
    """Flat key=value fields describing a spec (horizon excluded: it comes from the n grid)."""
    out = {"model": spec.name}
    if spec.family is Family.SHARPNESS:
        out["alpha"] = repr(spec.alpha)
        return out
    if spec.base.kind == "two_point":
        out["two_point_a"] = repr(spec.base.a)
        out["two_point_q"] = repr(spec.base.q)
    if spec.base.kind == "student":
        out["student_nu"] = repr(spec.base.nu)
    if spec.family is Family.AR1_NOISE:
        out["theta"] = repr(spec.theta)
        out["sigma"] = repr(spec.sigma)
    return out


def spec_from_config(fields: dict[str, str], n: int = 1) -> ModelSpec:
    """Inverse of :func:`spec_to_config`.  ``fields['model']`` is e.g. ``iid_rademacher``."""
    name = fields["model"]
    if name == "sharpness":
        alpha = float(fields["alpha"]) if "alpha" in fields else None
        return ModelSpec(Family.SHARPNESS, n, alpha=alpha)
    fam_text, _, base_text = name.partition("_")
    try:
        family = Family(fam_text)
    except ValueError:
        raise ConfigError("model", f"unknown model family in {name!r}") from None
    if family is Family.SHARPNESS or not base_text:
        raise ConfigError("model", f"expected <family>_<base>, got {name!r}")
    kwargs = {}
    for attr, key in _BASE_KEYS.items():
        if key in fields:
            kwargs[attr] = float(fields[key])
    base = BaseDistribution(base_text, **kwargs)
    if family is Family.AR1_NOISE:
        theta = float(fields["theta"]) if "theta" in fields else None
        return ModelSpec(family, n, base, theta=theta, sigma=float(fields.get("sigma", 1.0)))
    return ModelSpec(family, n, base)
