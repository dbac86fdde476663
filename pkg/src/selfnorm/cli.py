"""Command-line entry point: ``selfnorm {run,sharpness,tstat-check,ar1,rate-fit,selftest}``."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np

from . import rng
from .applications import student_t, t_from_w, t_threshold
from .bounds import fit_rate
from .distributions import BaseDistribution
from .empirics import sharpness_prediction, sharpness_zero_mass
from .errors import ConfigError, DegenerateError, ExperimentAborted, NumericError
from .harness import (
    DEFAULT_SEED,
    ExperimentConfig,
    ExperimentReport,
    emit_plot_data,
    evaluate_cell,
    parse_config,
    read_report_csv,
    report_csv,
    run_experiment,
)
from .models import Family, ModelSpec
from .paths import Statistic, resolve_workers

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("selfnorm")


def _floats(text: str, name: str = "grid") -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(name, f"expected comma-separated reals, got {text!r}") from None
    if not vals:
        raise ConfigError(name, "empty list")
    return vals


def _ints(text: str, name: str = "grid") -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(name, f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise ConfigError(name, "empty list")
    return vals


def _emit(report: ExperimentReport, output: str, plot_dir: str | None) -> None:
    text = report_csv(report)
    if output:
        Path(output).write_text(text, encoding="utf-8", newline="")
        log.info("wrote %s", output)
    else:
        sys.stdout.write(text)
    if plot_dir:
        for p in emit_plot_data(report, plot_dir):
            log.info("wrote %s", p)
    log.info(
        "seed=%d workers=%d wall_clock=%.2fs degenerate=%s",
        report.config.master_seed, report.workers, report.wall_clock, report.degenerate_counts,
    )


def cmd_run(args) -> int:
    cfg = parse_config(Path(args.config).read_text(encoding="utf-8"))
    report = run_experiment(cfg, args.workers)
    _emit(report, args.output or cfg.output_path, args.plot_dir)
    return EXIT_OK


def cmd_sharpness(args) -> int:
    alphas = _floats(args.alpha_grid, "alpha-grid")
    base = ExperimentConfig(
        experiment_id=args.experiment_id, model=ModelSpec(Family.SHARPNESS, args.n, alpha=alphas[0]),
        statistic=Statistic.SELF_NORMALIZED, n_grid=(args.n,), p=args.p, m=args.m,
        plug_in_replications=args.plug_in, master_seed=args.seed, delta=args.delta, alphas=(alphas[0],),
    )
    workers = resolve_workers(args.workers)
    report = ExperimentReport(base, workers=workers)
    for a in alphas:
        row = evaluate_cell(base, args.n, a, workers)
        report.rows.append(row)
        p_hat = row.shift_at_zero + 0.5
        print(
            f"alpha={a:<8g} P(W<=0)={p_hat:.6f} exact={sharpness_zero_mass(a):.6f} "
            f"(P-0.5)/sqrt(a)={(p_hat - 0.5) / math.sqrt(a):.5f} "
            f"leading={sharpness_prediction(a) / math.sqrt(a):.5f} "
            f"delta_hat={row.delta_hat:.5f} Nn={row.Nn.total:.4g} ratio={row.ratio:.4f}",
            file=sys.stderr,
        )
    _emit(report, args.output, args.plot_dir)
    return EXIT_OK


def cmd_tstat_check(args) -> int:
    xs = _floats(args.x_grid, "x-grid")
    if any(x < 0 for x in xs):
        raise ConfigError("x-grid", "x must be nonnegative")
    failures = 0
    worst = 0.0
    for n in _ints(args.n, "n"):
        keys = rng.replication_keys(args.seed, np.arange(args.samples))
        obs = np.stack([BaseDistribution("normal").quantile(rng.uniforms(keys, k)) for k in range(1, n + 1)], axis=1)
        checked = 0
        for row in obs:
            try:
                t = student_t(row)
            except DegenerateError:
                continue
            w = float(np.sum(row)) / math.sqrt(float(np.sum(row * row)))
            worst = max(worst, abs(t - t_from_w(w, n)) / max(1.0, abs(t)))
            for x in xs:
                checked += 1
                failures += (t > x) != (w > t_threshold(x, n))
        print(f"n={n}: {checked} checks")
    print(f"identity failures: {failures}; max relative |T - W sqrt((n-1)/(n-W^2))| = {worst:.3g}")
    return EXIT_OK if failures == 0 and worst <= 1e-12 else EXIT_NUMERIC


def cmd_ar1(args) -> int:
    ns = _ints(args.n_grid, "n-grid")
    cfg = ExperimentConfig(
        experiment_id=args.experiment_id,
        model=ModelSpec(Family.AR1_NOISE, ns[0], BaseDistribution(args.noise), theta=args.theta, sigma=args.sigma),
        statistic=Statistic.AR1_SELF_NORMALIZED, n_grid=tuple(ns), p=args.p, m=args.m,
        plug_in_replications=args.plug_in, master_seed=args.seed, delta=args.delta,
    )
    report = run_experiment(cfg, args.workers)
    for r in report.rows:
        print(f"n={r.n:<6d} delta_hat={r.delta_hat:.5f} band={r.delta_band:.5f} Nn={r.Nn.total:.4g} "
              f"ratio={r.ratio:.4f}", file=sys.stderr)
    _emit(report, args.output, args.plot_dir)
    return EXIT_OK


def cmd_rate_fit(args) -> int:
    rows = read_report_csv(args.report)
    groups: dict[tuple, list[dict]] = defaultdict(list)
    for r in rows:
        groups[(r["experiment_id"], r["model"], r["statistic"], r["p"], r["alpha"])].append(r)
    for key, grp in groups.items():
        grp.sort(key=lambda r: int(r["n"]))
        ns = [int(r["n"]) for r in grp]
        label = "experiment={} model={} statistic={} p={}{}".format(*key[:4], f" alpha={key[4]}" if key[4] else "")
        if len(set(ns)) < 3:
            print(f"{label}: fewer than 3 distinct n, no fit")
            continue
        d = fit_rate(ns, [float(r["delta_hat"]) for r in grp])
        b = fit_rate(ns, [float(r["bound_core"]) for r in grp])
        print(f"{label}: delta_hat slope={d.slope:.4f} (resid {d.residual_max:.3g}); "
              f"bound_core slope={b.slope:.4f} (resid {b.residual_max:.3g})")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return EXIT_OK if run_selftest() else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="selfnorm", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, m_default):
        p.add_argument("--m", type=int, default=m_default, help="replications per cell")
        p.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
        p.add_argument("--p", type=float, default=1.5)
        p.add_argument("--plug-in", type=int, default=10_000, help="plug-in replications for N_n")
        p.add_argument("--delta", type=float, default=0.01)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--output", default="")
        p.add_argument("--plot-dir", default=None)

    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--output", default="")
    p.add_argument("--plot-dir", default=None)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("sharpness", help="sharpness construction over an alpha grid")
    p.add_argument("--alpha-grid", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--experiment-id", default="sharpness")
    common(p, 100_000)
    p.set_defaults(fn=cmd_sharpness)

    p = sub.add_parser("tstat-check", help="pathwise Student-t / self-normalised identity")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--x-grid", default="0,0.5,1,2")
    p.add_argument("--n", default="5,30")
    p.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
    p.set_defaults(fn=cmd_tstat_check)

    p = sub.add_parser("ar1", help="AR(1) least-squares estimator experiment")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--n-grid", required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--noise", default="normal", choices=("normal", "rademacher", "two_point"))
    p.add_argument("--experiment-id", default="ar1")
    common(p, 100_000)
    p.set_defaults(fn=cmd_ar1)

    p = sub.add_parser("rate-fit", help="log-log slopes from a report CSV")
    p.add_argument("report")
    p.set_defaults(fn=cmd_rate_fit)

    p = sub.add_parser("selftest", help="run the fast invariant checks")
    p.set_defaults(fn=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, ExperimentAborted, DegenerateError) as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
