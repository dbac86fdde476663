"""Experiment configuration, execution and CSV output."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .bounds import BoundEvaluation
from .empirics import dkw_band, estimate_Nn, kolmogorov_distance, sharpness_prediction, std_normal_cdf
from .errors import ConfigError, ExperimentAborted, NumericError
from .models import Family, ModelSpec, make_model, spec_from_config, spec_to_config
from .paths import Statistic, replicate_statistic, resolve_workers

log = logging.getLogger(__name__)

DEFAULT_SEED = 0x5EED

CSV_COLUMNS = (
    "experiment_id", "model", "statistic", "n", "alpha", "p", "m", "seed",
    "delta_hat", "delta_band", "nn_total", "nn_method", "bound_core", "ratio", "degenerate_count",
)

_MODEL_KEYS = ("alpha", "theta", "sigma", "two_point_a", "two_point_q", "student_nu")
_KNOWN_KEYS = frozenset((
    "experiment_id", "model", "statistic", "n_grid", "p", "m", "plug_in_replications",
    "seed", "delta", "output",
) + _MODEL_KEYS)
_REQUIRED = ("model", "n_grid", "p", "m")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str
    model: ModelSpec
    statistic: Statistic
    n_grid: tuple[int, ...]
    p: float
    m: int
    plug_in_replications: int = 10_000
    master_seed: int = DEFAULT_SEED
    delta: float = 0.01
    output_path: str = ""
    #: one alpha per n for sharpness models (a fixed alpha is repeated)
    alphas: tuple[float, ...] | None = None

    def __post_init__(self):
        validate_config(self)

    def cells(self) -> list[tuple[int, float | None]]:
        if self.alphas is None:
            return [(n, None) for n in self.n_grid]
        return list(zip(self.n_grid, self.alphas))

    def cell_spec(self, n: int, alpha: float | None) -> ModelSpec:
        spec = self.model.with_horizon(n)
        return spec.with_alpha(alpha) if alpha is not None else spec


def validate_config(cfg: ExperimentConfig) -> None:
    if not cfg.n_grid:
        raise ConfigError("n_grid", "at least one n is required")
    if any(n < 1 for n in cfg.n_grid):
        raise ConfigError("n_grid", "every n must be a positive integer")
    if any(b <= a for a, b in zip(cfg.n_grid, cfg.n_grid[1:])):
        raise ConfigError("n_grid", "n_grid must be strictly increasing")
    if not cfg.p > 1.0:
        raise ConfigError("p", "p must exceed 1")
    if cfg.m < 1:
        raise ConfigError("m", "m must be a positive integer")
    if cfg.plug_in_replications < 1:
        raise ConfigError("plug_in_replications", "must be a positive integer")
    if not 0 <= cfg.master_seed < 2**64:
        raise ConfigError("seed", "must be a 64-bit unsigned integer")
    if not 0.0 < cfg.delta < 1.0:
        raise ConfigError("delta", "must lie in (0, 1)")
    if cfg.model.family is Family.SHARPNESS:
        if cfg.alphas is None or len(cfg.alphas) != len(cfg.n_grid):
            raise ConfigError("alpha", "sharpness needs one alpha, or one alpha per n")
    if cfg.statistic is Statistic.AR1_SELF_NORMALIZED and cfg.model.family is not Family.AR1_NOISE:
        raise ConfigError("statistic", "ar1_self_normalized requires an ar1_* model")
    for n, alpha in cfg.cells():
        make_model(cfg.cell_spec(n, alpha))


def _parse_int(key: str, text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {text!r}") from None


def _parse_float(key: str, text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(key, f"expected a real number, got {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(key, f"expected a finite real number, got {text!r}")
    return v


def _parse_list(key: str, text: str, conv) -> list:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ConfigError(key, "expected a comma-separated list")
    return [conv(key, t) for t in items]


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat ``key=value`` format: one key per line, ``#`` starts a comment."""
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}", f"expected key=value, got {raw!r}")
        if key not in _KNOWN_KEYS:
            raise ConfigError(key, "unknown key")
        if key in fields:
            raise ConfigError(key, "duplicate key")
        fields[key] = value
    for key in _REQUIRED:
        if key not in fields:
            raise ConfigError(key, "missing required key")

    n_grid = tuple(_parse_list("n_grid", fields["n_grid"], _parse_int))
    try:
        statistic = Statistic(fields.get("statistic", Statistic.SELF_NORMALIZED.value))
    except ValueError:
        raise ConfigError("statistic", f"expected one of {[s.value for s in Statistic]}") from None

    model_fields = {"model": fields["model"]}
    for key in _MODEL_KEYS:
        if key in fields and key != "alpha":
            _parse_float(key, fields[key])
            model_fields[key] = fields[key]
    model = spec_from_config(model_fields, n=n_grid[0])

    alphas = None
    if "alpha" in fields:
        if model.family is not Family.SHARPNESS:
            raise ConfigError("alpha", "only meaningful for the sharpness model")
        vals = _parse_list("alpha", fields["alpha"], _parse_float)
        if len(vals) == 1:
            vals = vals * len(n_grid)
        alphas = tuple(vals)
        model = model.with_alpha(alphas[0])

    return ExperimentConfig(
        experiment_id=fields.get("experiment_id", "experiment"),
        model=model,
        statistic=statistic,
        n_grid=n_grid,
        p=_parse_float("p", fields["p"]),
        m=_parse_int("m", fields["m"]),
        plug_in_replications=_parse_int("plug_in_replications", fields.get("plug_in_replications", "10000")),
        master_seed=_parse_int("seed", fields.get("seed", str(DEFAULT_SEED))),
        delta=_parse_float("delta", fields.get("delta", "0.01")),
        output_path=fields.get("output", ""),
        alphas=alphas,
    )


def format_config(cfg: ExperimentConfig) -> str:
    """Render a config back to key=value text that :func:`parse_config` accepts."""
    lines = [f"experiment_id={cfg.experiment_id}"]
    model_fields = spec_to_config(cfg.model)
    lines.append(f"model={model_fields.pop('model')}")
    model_fields.pop("alpha", None)
    lines.append(f"statistic={cfg.statistic.value}")
    lines.append("n_grid=" + ",".join(str(n) for n in cfg.n_grid))
    if cfg.alphas is not None:
        lines.append("alpha=" + ",".join(repr(a) for a in cfg.alphas))
    lines += [f"{k}={v}" for k, v in model_fields.items()]
    lines += [
        f"p={cfg.p!r}", f"m={cfg.m}", f"plug_in_replications={cfg.plug_in_replications}",
        f"seed={cfg.master_seed}", f"delta={cfg.delta!r}",
    ]
    if cfg.output_path:
        lines.append(f"output={cfg.output_path}")
    return "\n".join(lines) + "\n"


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list[BoundEvaluation] = field(default_factory=list)
    wall_clock: float = 0.0
    workers: int = 1

    @property
    def degenerate_counts(self) -> list[int]:
        return [r.degenerate_count for r in self.rows]


def evaluate_cell(cfg: ExperimentConfig, n: int, alpha: float | None, workers: int | None = None) -> BoundEvaluation:
    spec = cfg.cell_spec(n, alpha)
    model = make_model(spec)
    sample = replicate_statistic(model, n, cfg.statistic, cfg.m, cfg.master_seed, workers)
    nn = estimate_Nn(spec, n, cfg.p, cfg.plug_in_replications, cfg.master_seed, workers)
    return BoundEvaluation(
        n=n,
        p=cfg.p,
        delta_hat=kolmogorov_distance(sample, std_normal_cdf),
        delta_band=dkw_band(sample.m, cfg.delta),
        Nn=nn,
        statistic_kind=cfg.statistic.value,
        alpha=alpha,
        shift_at_zero=sample.cdf_at(0.0) - 0.5,
        m=cfg.m,
        degenerate_count=sample.degenerate_count,
    )


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> ExperimentReport:
    """One row per (n, alpha) cell.  Bytes of the CSV depend only on ``cfg``."""
    workers = resolve_workers(workers)
    t0 = time.perf_counter()
    rows = []
    for n, alpha in cfg.cells():
        label = f"n={n}" + (f", alpha={alpha!r}" if alpha is not None else "")
        try:
            rows.append(evaluate_cell(cfg, n, alpha, workers))
        except ExperimentAborted as exc:
            raise ExperimentAborted(str(exc), cell=label) from exc
        except NumericError as exc:
            raise NumericError(f"[{label}] {exc}") from exc
        log.info("cell %s done: delta_hat=%.5g", label, rows[-1].delta_hat)
    return ExperimentReport(cfg, rows, time.perf_counter() - t0, workers)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def csv_rows(report: ExperimentReport) -> list[list[str]]:
    cfg = report.config
    out = []
    for r in report.rows:
        out.append([
            cfg.experiment_id, cfg.cell_spec(r.n, r.alpha).name, r.statistic_kind, _fmt(r.n), _fmt(r.alpha),
            _fmt(r.p), _fmt(r.m), _fmt(cfg.master_seed), _fmt(r.delta_hat), _fmt(r.delta_band),
            _fmt(r.Nn.total), r.Nn.method.value, _fmt(r.bound_core), _fmt(r.ratio), _fmt(r.degenerate_count),
        ])
    return out


def report_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(CSV_COLUMNS)
    w.writerows(csv_rows(report))
    return buf.getvalue()


def write_report(report: ExperimentReport, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(report_csv(report), encoding="utf-8", newline="")
    return path


def emit_plot_data(report: ExperimentReport, directory: str | Path, stem: str | None = None) -> tuple[Path, Path]:
    """Companion CSVs for rate plots and sharpness plots; one data row per report row."""
    directory = Path(directory)
    stem = stem or report.config.experiment_id
    rate_path = directory / f"{stem}_rate.csv"
    sharp_path = directory / f"{stem}_sharpness.csv"

    def ln(v: float) -> str:
        return repr(math.log(v)) if v > 0 else repr(-math.inf)

    rate = io.StringIO()
    w = csv.writer(rate)
    w.writerow(("ln_n", "ln_delta_hat", "ln_bound_core"))
    for r in report.rows:
        w.writerow((ln(r.n), ln(r.delta_hat), ln(r.bound_core)))

    sharp = io.StringIO()
    w = csv.writer(sharp)
    w.writerow(("alpha", "shift_at_zero", "sqrt_alpha_prediction"))
    for r in report.rows:
        pred = _fmt(sharpness_prediction(r.alpha)) if r.alpha is not None else ""
        w.writerow((_fmt(r.alpha), _fmt(r.shift_at_zero), pred))

    rate_path.write_text(rate.getvalue(), encoding="utf-8", newline="")
    sharp_path.write_text(sharp.getvalue(), encoding="utf-8", newline="")
    return rate_path, sharp_path


def read_report_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ConfigError("report", f"unexpected CSV header {reader.fieldnames}")
        return list(reader)

