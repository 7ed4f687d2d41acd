"""Command-line entry point.

    cloning-tradeoff tradeoff-curve  [--grid N] [--samples N] [--format csv|json] [--out PATH]
    cloning-tradeoff channel-curves  [--grid N] [--mc]
    cloning-tradeoff storage-curve   [--grid N]
    cloning-tradeoff verify          [--samples N] [--seed S] [--tolerance T]
    cloning-tradeoff mc --strategy NAME (--p P | --mu MU | --xi XI)

Exit codes: 0 success, 1 a verification check failed, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import channels as ch
from . import tradeoff as tr
from .montecarlo import MIN_SAMPLES, derive_seed
from .povm import XiFamily
from .verification import Check, mc_check, run_all

log = logging.getLogger("cloning_tradeoff")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
COMMANDS = ("tradeoff-curve", "channel-curves", "storage-curve", "verify", "mc")
MC_STRATEGIES = ("direct", "classicalAssist", "quantumMemory", "storage", "asymG", "symG", "symF")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    samples: int = 100_000
    seed: int = 42
    grid_points: int = 101
    output_format: str = "csv"
    output_path: str | None = None
    tolerance: float | None = None
    strategy: str | None = None
    p: float | None = None
    mu: float | None = None
    xi: float | None = None
    mc: bool = True
    workers: int = 1

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.samples < MIN_SAMPLES:
            raise UsageError(f"--samples must be at least {MIN_SAMPLES}")
        if self.grid_points < 2:
            raise UsageError("--grid must be at least 2")
        if self.output_format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")


@dataclass
class Report:
    command: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    duration_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "status": "pass" if self.passed else "fail",
            "checks": [c.to_dict() for c in self.checks],
            "duration_s": self.duration_s,
        }


# --- output -----------------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (float, np.floating)) and not math.isfinite(x):
        return "nan"
    return format(float(x), ".12g")


def _clean(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def write_rows(cfg: RunConfig, columns: Sequence[str], rows: Sequence[Sequence]) -> None:
    if cfg.output_format == "json":
        payload = {
            "config": _config_echo(cfg),
            "columns": list(columns),
            "rows": [{c: _clean(v) for c, v in zip(columns, row)} for row in rows],
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
    _emit(cfg, text)


def write_report(cfg: RunConfig, report: Report) -> None:
    if cfg.output_format == "json":
        _emit(cfg, json.dumps(report.to_dict(), indent=2, default=_clean) + "\n")
    else:
        cols = ["name", "status", "measured", "expected", "tolerance"]
        rows = [[c.name, c.status, c.measured, c.expected, c.tolerance] for c in report.checks]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        _emit(cfg, buf.getvalue())
    failed = [c.name for c in report.checks if not c.passed]
    summary = f"{report.command}: {'PASS' if report.passed else 'FAIL'} " \
              f"({len(report.checks) - len(failed)}/{len(report.checks)} checks, {report.duration_s:.1f} s)"
    print(summary, file=sys.stderr)
    for name in failed:
        print(f"  failed: {name}", file=sys.stderr)


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _config_echo(cfg: RunConfig) -> dict:
    return {k: _clean(v) for k, v in asdict(cfg).items()}


# --- commands -----------------------------------------------------------------------

TRADEOFF_COLUMNS = ("G", "F_banaszek", "F_asym_analytic", "F_sym_analytic", "F_mc", "mc_stderr")


def tradeoff_rows(cfg: RunConfig) -> list[list]:
    rows = []
    for k, g in enumerate(np.linspace(tr.G_RANDOM, tr.G_MAX, cfg.grid_points)):
        mu = tr.asym_mu_for_g(g)
        sym = tr.sym_point_for_g(g)
        f_mc = se = None
        if cfg.mc:
            est = tr.sym_f_monte_carlo(XiFamily(sym.parameter), cfg.samples, derive_seed(cfg.seed, k), cfg.workers)
            f_mc, se = est.mean, est.stderr
        rows.append([g, tr.banaszek_f(g), 1 - mu * mu / 2, sym.F, f_mc, se])
    return rows


CHANNEL_COLUMNS = ("p", "F_dir", "F_cl", "G_opt", "F_qm")
CHANNEL_MC_COLUMNS = ("F_dir_mc", "F_dir_se", "F_cl_mc", "F_cl_se", "F_qm_mc", "F_qm_se")


def channel_rows(cfg: RunConfig) -> tuple[tuple[str, ...], list[list]]:
    cols = CHANNEL_COLUMNS + (CHANNEL_MC_COLUMNS if cfg.mc else ())
    rows = []
    for k, p in enumerate(np.linspace(0.0, 1.0, cfg.grid_points)):
        row = [p, ch.f_direct(p), ch.f_classical(p), tr.g_opt_n_copies(1), ch.f_quantum_memory(p)]
        if cfg.mc:
            for j, strategy in enumerate(ch.STRATEGIES):
                est = ch.simulate_strategy(strategy, p, cfg.samples, derive_seed(cfg.seed, 3 * k + j), cfg.workers)
                row += [est.mean, est.stderr]
        rows.append(row)
    return cols, rows


STORAGE_COLUMNS = ("p", "F_S", "F_C", "advantage")


def storage_rows(cfg: RunConfig) -> tuple[tuple[str, ...], list[list]]:
    cols = STORAGE_COLUMNS + (("F_C_mc", "F_C_se") if cfg.mc else ())
    rows = []
    for k, p in enumerate(np.linspace(0.0, 1.0, cfg.grid_points)):
        row = [p, ch.f_storage_plain(p), ch.f_storage_cloned(p), ch.storage_advantage(p)]
        if cfg.mc:
            est = ch.simulate_storage(p, cfg.samples, derive_seed(cfg.seed, k), workers=cfg.workers)
            row += [est.mean, est.stderr]
        rows.append(row)
    return cols, rows


def cmd_verify(cfg: RunConfig) -> Report:
    start = time.perf_counter()
    checks = run_all(cfg.seed, cfg.samples, cfg.tolerance)
    return Report("verify", _config_echo(cfg), checks, time.perf_counter() - start)


def cmd_mc(cfg: RunConfig) -> Report:
    """One Monte Carlo estimator against its analytic reference (3σ verdict)."""
    s = cfg.strategy
    if s not in MC_STRATEGIES:
        raise UsageError(f"--strategy must be one of {', '.join(MC_STRATEGIES)}")
    start = time.perf_counter()
    n, seed, w = cfg.samples, cfg.seed, cfg.workers
    if s in ("direct", "classicalAssist", "quantumMemory", "storage"):
        _require(cfg, "p", forbid=("mu", "xi"))
        if s == "storage":
            est, ref = ch.simulate_storage(cfg.p, n, seed, workers=w), ch.f_storage_cloned(cfg.p)
        else:
            est, ref = ch.simulate_strategy(s, cfg.p, n, seed, w), ch.ANALYTIC[s](cfg.p)
        label = f"{s}(p={cfg.p:g})"
    elif s == "asymG":
        _require(cfg, "mu", forbid=("p", "xi"))
        est, ref = tr.asym_g_monte_carlo(cfg.mu, n, seed, w), tr.asym_g_analytic(cfg.mu)
        label = f"asymG(mu={cfg.mu:g})"
    else:
        _require(cfg, "xi", forbid=("p", "mu"))
        g, f = tr.sym_monte_carlo(cfg.xi, n, seed, w)
        pt = tr.sym_gf(cfg.xi)
        est, ref = (g, pt.G) if s == "symG" else (f, pt.F)
        label = f"{s}(xi={cfg.xi:g})"
    check = mc_check(label, est, ref)
    if cfg.tolerance is not None:
        check.tolerance = cfg.tolerance
    print(f"{label}: {est.mean:.6f} ± {est.stderr:.6f} (n={est.n}); analytic {ref:.6f}", file=sys.stderr)
    return Report("mc", _config_echo(cfg), [check], time.perf_counter() - start)


def _require(cfg: RunConfig, name: str, forbid: Sequence[str]) -> None:
    value = getattr(cfg, name)
    if value is None:
        raise UsageError(f"strategy {cfg.strategy} needs --{name}")
    extra = [f for f in forbid if getattr(cfg, f) is not None]
    if extra:
        raise UsageError(f"strategy {cfg.strategy} does not take --{', --'.join(extra)}")
    if name in ("p", "mu") and not 0.0 <= value <= 1.0:
        raise UsageError(f"--{name} must lie in [0, 1]")
    if name == "xi":
        try:
            XiFamily(value)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc


# --- argument parsing ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cloning-tradeoff",
        description="Cloning-based minimal-disturbance measurement: curves, checks and Monte Carlo runs.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--samples", type=int, default=100_000, help="Monte Carlo trials per estimate")
    parser.add_argument("--seed", type=int, default=42, help="master RNG seed")
    parser.add_argument("--grid", type=int, default=101, help="number of curve points")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", default=None, help="output file (default: stdout)")
    parser.add_argument("--strategy", choices=MC_STRATEGIES)
    parser.add_argument("--p", type=float, help="transmittivity / survival probability")
    parser.add_argument("--mu", type=float, help="cloner asymmetry")
    parser.add_argument("--xi", type=float, help="symmetric-scheme POVM parameter")
    parser.add_argument("--tolerance", type=float, help="override every check tolerance")
    parser.add_argument("--mc", action=argparse.BooleanOptionalAction, default=None,
                        help="include Monte Carlo columns in curve output "
                             "(default: on for tradeoff-curve, off for the others)")
    parser.add_argument("--workers", type=int, default=1, help="Monte Carlo worker threads")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    mc = args.mc if args.mc is not None else args.command == "tradeoff-curve"
    return RunConfig(
        command=args.command,
        samples=args.samples,
        seed=args.seed,
        grid_points=args.grid,
        output_format=args.format,
        output_path=args.out,
        tolerance=args.tolerance,
        strategy=args.strategy,
        p=args.p,
        mu=args.mu,
        xi=args.xi,
        mc=mc,
        workers=args.workers,
    )


def run(cfg: RunConfig) -> int:
    if cfg.command == "tradeoff-curve":
        write_rows(cfg, TRADEOFF_COLUMNS, tradeoff_rows(cfg))
    elif cfg.command == "channel-curves":
        write_rows(cfg, *channel_rows(cfg))
    elif cfg.command == "storage-curve":
        write_rows(cfg, *storage_rows(cfg))
    else:
        report = cmd_verify(cfg) if cfg.command == "verify" else cmd_mc(cfg)
        write_report(cfg, report)
        return EXIT_OK if report.passed else EXIT_FAIL
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(config_from_args(args))
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
