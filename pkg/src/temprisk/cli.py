"""Command-line entry point: ``temprisk eval | mc | parse-check | export``.

Exit codes: 0 success, 2 invalid specification/configuration (including an
infeasible risk request), 3 unreadable or malformed input files.
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .errors import SpecSyntaxError, TempriskError
from .io import (
    RunManifest, format_spec, histogram, read_signal, read_spec, samples_to_csv, write_signal,
)
from .lang import ConstraintSpec
from .robustness import ConstraintChecker, FormulaChecker, eta, theta
from .scenarios import SCENARIOS, scenario_checker_spec, servicing_model, t_intersection_model
from .signal import GroupPartition
from .stochastic import McConfig, ProcessModel, ShiftDistribution, mc_risk

EXIT_SPEC = 2
EXIT_IO = 3


class InputFileError(Exception):
    pass


def _fail(code: int, msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (InputFileError, OSError) as exc:
            _fail(EXIT_IO, str(exc))
        except (TempriskError, ValueError) as exc:
            _fail(EXIT_SPEC, str(exc))
    return wrapper


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise click.BadParameter(f"expected a comma-separated list of numbers, got {text!r}")


def _load_signal(path, dt):
    try:
        return read_signal(path, dt)
    except OSError:
        raise
    except (TempriskError, ValueError) as exc:
        raise InputFileError(f"{path}: {exc}") from None


def _load_spec(path, dt):
    try:
        return read_spec(path, dt)
    except UnicodeDecodeError as exc:
        raise InputFileError(f"{path}: {exc}") from None


def _checker(spec, t):
    return ConstraintChecker(spec) if isinstance(spec, ConstraintSpec) else FormulaChecker(spec, t)


def _spec_text(checker, dt) -> str:
    if isinstance(checker, ConstraintChecker):
        return format_spec(checker.spec, dt)
    return format_spec(checker.formula, dt) + f"@t={checker.t}"


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


@click.group()
@click.version_option(__version__)
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Temporal robustness and its risk under random time shifts."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command("eval")
@click.option("--signal", "signal_path", required=True, help="Signal CSV (t,x1..xn) or JSON.")
@click.option("--spec", "spec_path", required=True, help="Constraint or formula file.")
@click.option("--kind", type=click.Choice(["eta", "theta"]), default="eta", show_default=True)
@click.option("--r", "r", type=click.IntRange(min=0), default=50, show_default=True,
              help="Saturation bound in steps.")
@click.option("--groups", default=None, help='Component groups for theta, e.g. "1,2;3,4".')
@click.option("--t", "t", type=int, default=0, show_default=True, help="Evaluation step for formulas.")
@click.option("--dt", type=float, default=None, help="Sampling period (time units per step).")
@guarded
def eval_cmd(signal_path, spec_path, kind, r, groups, t, dt):
    """Temporal robustness of one signal."""
    s = _load_signal(signal_path, dt)
    spec = _load_spec(spec_path, s.dt)
    manifest = RunManifest("eval", {"signal": str(signal_path), "spec": format_spec(spec, s.dt),
                                    "kind": kind, "r": r, "groups": groups, "t": t, "dt": s.dt})
    checker = _checker(spec, t)
    if kind == "eta":
        v = eta(s, checker, r)
    else:
        p = GroupPartition.parse(groups, s.n) if groups else GroupPartition.per_component(s.n)
        v = theta(s, checker, r, p)
    out = {"schema": 1, "kind": kind, **v.to_dict(), "manifest": manifest.finish().to_dict()}
    click.echo(_dump(out), nl=False)


def _scenario_model(scenario, d, sigma, lam, start_times, seed):
    kind, _, variant = scenario.partition(":")
    if kind == "tintersection":
        return t_intersection_model(variant or "S1", d=d, sigma=sigma, start_times=start_times, seed=seed)
    if kind == "servicing":
        lam1, lam2 = lam if lam else (1.0, 1.0)
        return servicing_model(lam1, lam2, seed=seed)
    if kind == "example1":
        p = GroupPartition.per_component(2)
        return ProcessModel("example1", {}, p, [ShiftDistribution.uniform(d)] * 2, {}, seed)
    raise click.BadParameter(f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")


@main.command("mc")
@click.option("--scenario", default=None, help=f"Built-in scenario: {', '.join(SCENARIOS)}.")
@click.option("--model", "model_path", default=None, help="Process model JSON (needs --spec).")
@click.option("--spec", "spec_path", default=None, help="Constraint or formula file for --model.")
@click.option("--d", "d", type=click.IntRange(min=0), default=0, show_default=True,
              help="Uniform shift bound in steps.")
@click.option("--sigma", type=click.FloatRange(min=0), default=0.0, show_default=True,
              help="Speed noise standard deviation (tintersection).")
@click.option("--lam", default=None, help="Poisson delay rates per robot, e.g. 3,5 (servicing).")
@click.option("--start-times", default=None, help="Fixed start steps green,red,blue (tintersection).")
@click.option("--kind", type=click.Choice(["eta", "theta"]), default="theta", show_default=True)
@click.option("--r", "r", type=click.IntRange(min=0), default=60, show_default=True)
@click.option("--t", "t", type=int, default=0, show_default=True)
@click.option("--N", "N", type=click.IntRange(min=1), default=10000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--beta", "beta", default="0.95", show_default=True, help="VaR levels, comma-separated.")
@click.option("--cvar-beta", default=None, help="CVaR levels (default: same as --beta).")
@click.option("--delta", type=float, default=0.01, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=None,
              help="Worker processes (default: CPU count, capped by TEMPRISK_THREADS).")
@guarded
def mc_cmd(scenario, model_path, spec_path, d, sigma, lam, start_times, kind, r, t, N, seed, beta,
           cvar_beta, delta, out_dir, workers):
    """Monte Carlo risk of temporal robustness; writes report.json, samples.csv,
    hist.json and manifest.json to OUT_DIR."""
    if (scenario is None) == (model_path is None):
        raise click.UsageError("give exactly one of --scenario or --model")
    betas = _floats(beta)
    cvar_betas = _floats(cvar_beta) if cvar_beta else betas
    if scenario is not None:
        _, spec, _ = scenario_checker_spec(scenario)
        checker = ConstraintChecker(spec) if isinstance(spec, ConstraintSpec) else FormulaChecker(*spec)
        starts = [int(v) for v in _floats(start_times)] if start_times else None
        model = _scenario_model(scenario, d, sigma, _floats(lam) if lam else None, starts, seed)
    else:
        if spec_path is None:
            raise click.UsageError("--model needs --spec")
        try:
            model = ProcessModel.from_dict(json.loads(Path(model_path).read_text(encoding="utf-8")))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InputFileError(f"{model_path}: {exc}") from None
        model = ProcessModel(model.generator, model.params, model.partition, model.shifts,
                             model.noise, seed)
        checker = _checker(_load_spec(spec_path, model.base().dt), t)
    config = {"model": model.to_dict(), "spec": _spec_text(checker, model.base().dt), "kind": kind, "r": r, "N": N,
              "betas": list(betas), "cvar_betas": list(cvar_betas), "delta": delta}
    manifest = RunManifest("mc", config, seed)
    res = mc_risk(model, McConfig(N, r, kind, checker, betas, delta, cvar_betas), workers=workers)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(res.report.to_json(), encoding="utf-8")
    (out / "samples.csv").write_text(samples_to_csv(res.samples), encoding="utf-8")
    (out / "hist.json").write_text(_dump(histogram(res.samples)), encoding="utf-8")
    (out / "manifest.json").write_text(_dump(manifest.finish().to_dict()), encoding="utf-8")

    rep = res.report
    for (b, dl), (lo, hi) in sorted(rep.var.items()):
        click.echo(f"VaR_{b:g} (delta={dl:g}): [{lo:g}, {hi:g}]")
    for b, v in sorted(rep.cvar.items()):
        click.echo(f"CVaR_{b:g}: {v:g}")
    click.echo(f"E: {rep.expectation:g}  violations: {rep.violation_count}  saturated: {rep.saturated_count}")
    if rep.errors:
        for e in rep.errors:
            click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_SPEC)


@main.command("parse-check")
@click.argument("spec_path")
@click.option("--dt", type=float, default=1.0, show_default=True)
@guarded
def parse_check_cmd(spec_path, dt):
    """Validate a spec file and print its canonical form."""
    try:
        spec = _load_spec(spec_path, dt)
    except SpecSyntaxError as exc:
        _fail(EXIT_SPEC, f"{spec_path}: {exc}")
    click.echo(format_spec(spec, dt), nl=False)


@main.command("export")
@click.argument("scenario")
@click.option("--signal", "signal_path", required=True, help="Output signal file (.csv or .json).")
@click.option("--spec", "spec_path", required=True, help="Output spec file.")
@guarded
def export_cmd(scenario, signal_path, spec_path):
    """Write a built-in scenario's nominal signal and spec."""
    s, spec, _ = scenario_checker_spec(scenario)
    if isinstance(spec, tuple):
        spec = spec[0]
    write_signal(s, signal_path)
    Path(spec_path).write_text(format_spec(spec, s.dt), encoding="utf-8")


if __name__ == "__main__":
    main()
