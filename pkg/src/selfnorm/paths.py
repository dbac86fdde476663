"""Path simulation and the normalised statistics W = S_n/sqrt([S]_n), V = S_n/sqrt(<S>_n)."""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import ConfigError, DegenerateError, ExperimentAborted
from .models import Family, Model
from .sample import EmpiricalSample, Provenance

#: replications per chunk; fixed so chunking never depends on the worker count
CHUNK = 8192
MAX_DEGENERATE_FRACTION = 1e-3


class Statistic(str, enum.Enum):
    SELF_NORMALIZED = "self_normalized"
    VARIANCE_NORMALIZED = "variance_normalized"
    STUDENT_T = "student_t"
    AR1_SELF_NORMALIZED = "ar1_self_normalized"


@dataclass(frozen=True)
class MartingalePath:
    increments: np.ndarray
    partial_sums: np.ndarray
    quadratic_variation: np.ndarray
    predictable_variation: np.ndarray

    @property
    def n(self) -> int:
        return self.increments.size

    @classmethod
    def from_increments(cls, increments, conditional_second_moments=None) -> "MartingalePath":
        x = np.asarray(increments, dtype=np.float64)
        c = x * x if conditional_second_moments is None else np.asarray(conditional_second_moments, dtype=np.float64)
        return cls(x, np.cumsum(x), np.cumsum(x * x), np.cumsum(c))


def simulate_path(model: Model, n: int, stream: rng.Substream) -> MartingalePath:
    """One trajectory, stepping the model with uniforms from ``stream``.

    Step k (1-based) reads ``stream`` at step index k; index 0 feeds the
    model's initial state.
    """
    if n != model.n:
        raise ConfigError("n", f"path length {n} does not match model horizon {model.n}")
    state = model.initial_state(stream.draws(0, model.initial_draws))
    inc = np.empty(n)
    cvar = np.empty(n)
    for k in range(1, n + 1):
        out = model.step(state, stream.draws(k, model.draws_per_step(k)))
        inc[k - 1] = out.increment
        cvar[k - 1] = out.conditional_second_moment
        state = out.new_state
    return MartingalePath.from_increments(inc, cvar)


def self_normalized(path: MartingalePath) -> float:
    q = path.quadratic_variation[-1]
    if q == 0.0:
        raise DegenerateError("[S]_n = 0")
    return float(path.partial_sums[-1] / math.sqrt(q))


def variance_normalized(path: MartingalePath) -> float:
    v = path.predictable_variation[-1]
    if v == 0.0:
        raise DegenerateError("<S>_n = 0")
    return float(path.partial_sums[-1] / math.sqrt(v))


# -- batch engine ---------------------------------------------------------------


def accumulate(model: Model, master_seed: int, replications: np.ndarray, *, p: float | None = None,
               welford: bool = False) -> dict[str, np.ndarray]:
    """Stream a batch of replications through the model and keep running totals.

    Always returns ``S``, ``Q`` ([S]_n) and ``P`` (<S>_n).  With ``p``, also
    ``A`` = sum |X_i|^{2p}.  With ``welford``, the running ``mean`` and ``M2``
    of the increments.  For the AR(1) family, ``YY`` = sum Y_i^2 and
    ``YY1`` = sum Y_i Y_{i+1}.  Arithmetic is the same as :func:`simulate_path`
    step for step, so results agree bit for bit.
    """
    keys = rng.replication_keys(master_seed, replications)
    m = keys.size
    n = model.n
    value = model.initial_value(rng.uniforms(keys, 0)) if model.initial_draws else np.zeros(m)
    value = np.asarray(value, dtype=np.float64)
    s = np.zeros(m)
    q = np.zeros(m)
    pv = np.zeros(m)
    a = np.zeros(m) if p is not None else None
    ar1 = model.spec.family is Family.AR1_NOISE
    if ar1:
        yy = np.zeros(m)
        yy1 = np.zeros(m)
    if welford:
        mean = np.zeros(m)
        m2 = np.zeros(m)
    for k in range(1, n + 1):
        inc, cvar, new_value = model.advance(k, value, rng.uniforms(keys, k))
        s += inc
        q += inc * inc
        pv += cvar
        if a is not None:
            a += np.abs(inc) ** (2.0 * p)
        if ar1:
            yy += value * value
            yy1 += value * new_value
        if welford:
            delta = inc - mean
            mean += delta / k
            m2 += delta * (inc - mean)
        value = np.broadcast_to(new_value, (m,)) if np.ndim(new_value) == 0 else new_value
    out = {"S": s, "Q": q, "P": pv}
    if a is not None:
        out["A"] = a
    if ar1:
        out["YY"] = yy
        out["YY1"] = yy1
    if welford:
        out["mean"] = mean
        out["M2"] = m2
    return out


def _statistic_values(model: Model, statistic: Statistic, acc: dict[str, np.ndarray]) -> np.ndarray:
    """Statistic per replication; NaN marks a degenerate replication."""
    n = model.n
    with np.errstate(divide="ignore", invalid="ignore"):
        if statistic is Statistic.SELF_NORMALIZED:
            denom = acc["Q"]
            vals = acc["S"] / np.sqrt(denom)
        elif statistic is Statistic.VARIANCE_NORMALIZED:
            denom = acc["P"]
            vals = acc["S"] / np.sqrt(denom)
        elif statistic is Statistic.STUDENT_T:
            denom = acc["M2"]
            vals = math.sqrt(n) * acc["mean"] / np.sqrt(denom / (n - 1))
        else:
            denom = acc["YY"]
            theta_hat = acc["YY1"] / denom
            vals = (theta_hat - model.spec.theta) * np.sqrt(denom) / model.spec.sigma
    return np.where(denom > 0.0, vals, np.nan)


def resolve_workers(workers: int | None = None) -> int:
    """Explicit argument, else the WORKERS environment variable, else 1."""
    if workers is None:
        env = os.environ.get("WORKERS")
        if env is None or env.strip() == "":
            return 1
        try:
            workers = int(env)
        except ValueError:
            raise ConfigError("WORKERS", f"expected a positive integer, got {env!r}") from None
    if workers < 1:
        raise ConfigError("WORKERS", f"expected a positive integer, got {workers}")
    return workers


def chunked(m: int, chunk: int = CHUNK) -> list[np.ndarray]:
    return [np.arange(lo, min(lo + chunk, m), dtype=np.uint64) for lo in range(0, m, chunk)]


def map_chunks(fn, m: int, workers: int | None = None) -> list:
    """Apply ``fn`` to every replication chunk; results come back in chunk order."""
    workers = resolve_workers(workers)
    chunks = chunked(m)
    if workers == 1 or len(chunks) == 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


def replicate_statistic(model: Model, n: int, statistic: Statistic | str, m: int, master_seed: int,
                        workers: int | None = None) -> EmpiricalSample:
    """m independent replicates of ``statistic``, sorted.

    Replication r is driven by substream (master_seed, r) whatever the worker
    count.  Degenerate replicates are counted and left out; above a 1e-3
    fraction the whole experiment is aborted.
    """
    statistic = Statistic(statistic)
    if m < 1:
        raise ConfigError("m", "replication count must be at least 1")
    if n != model.n:
        raise ConfigError("n", f"n={n} does not match model horizon {model.n}")
    if statistic is Statistic.AR1_SELF_NORMALIZED and model.spec.family is not Family.AR1_NOISE:
        raise ConfigError("statistic", "ar1_self_normalized needs an ar1 model")
    if statistic is Statistic.STUDENT_T and n < 2:
        raise ConfigError("n", "student_t needs n >= 2")
    welford = statistic is Statistic.STUDENT_T

    def run(reps):
        return _statistic_values(model, statistic, accumulate(model, master_seed, reps, welford=welford))

    vals = np.concatenate(map_chunks(run, m, workers))
    bad = np.isnan(vals)
    degenerate = int(bad.sum())
    if degenerate > MAX_DEGENERATE_FRACTION * m:
        raise ExperimentAborted(
            f"{degenerate} of {m} replicates degenerate (> {MAX_DEGENERATE_FRACTION:g}); model misconfigured?",
            cell=f"{model.spec.name} n={n}",
        )
    if degenerate == m:
        raise ExperimentAborted("every replicate degenerate", cell=f"{model.spec.name} n={n}")
    vals = np.sort(vals[~bad], kind="stable")
    prov = Provenance(model.spec.digest(), statistic.value, int(master_seed))
    return EmpiricalSample(vals, degenerate, prov)
