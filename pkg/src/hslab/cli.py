"""Command-line front door.

Suites: eigen | bmo | ineq | hartogs | liouville | all, each writing a JSON
or CSV report. Precedence is flags > config file > defaults. Exit status 0
means every verdict held; 1 flags violated verdicts or check errors; usage
and config problems exit 2.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import funcspace as fs
from . import bmolab as bm
from . import ineqlab as iq
from . import hartogs as hg
from . import liouville as lv
from . import specfun as sp
from .quadcore import BallSpec, ContractViolation, QuadratureSpec
from .suites import (ConfigError, RunConfig, SuiteReport, load_config, run,
                     log_abs_field, default_problem)


def _common_options(fn):
    fn = click.option("--seed", type=int, default=None, help="Master seed (64-bit).")(fn)
    fn = click.option("--config", "config_path", type=click.Path(exists=True),
                      default=None, help="JSON config file.")(fn)
    fn = click.option("--out", "out_path", type=click.Path(), default=None,
                      help="Report destination (default: stdout).")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
                      default=None, help="Report format.")(fn)
    fn = click.option("--budget", type=click.Choice(["low", "default", "high"]),
                      default=None, help="Sample budget preset.")(fn)
    fn = click.option("--figures", is_flag=True, default=False,
                      help="Render matplotlib figures next to the report.")(fn)
    return fn


def _build_config(suite, seed, config_path, out_path, fmt, budget) -> RunConfig:
    raw = {}
    if config_path:
        try:
            raw = load_config(config_path)
        except ConfigError as exc:
            raise click.UsageError(str(exc))
    merged = RunConfig(
        suite=suite or raw.get("suite", "all"),
        seed=seed if seed is not None else int(raw.get("seed", 20240801)),
        budget=budget or raw.get("budget", "default"),
        budgets=raw.get("budgets", {}),
        output_path=out_path or raw.get("output_path"),
        format=fmt or raw.get("format", "json"),
    )
    try:
        return merged.validate()
    except ConfigError as exc:
        raise click.UsageError(str(exc))


def _emit_report(report: SuiteReport, config: RunConfig, figures: bool) -> int:
    text = report.to_json() if config.format == "json" else report.to_csv()
    if config.output_path:
        Path(config.output_path).parent.mkdir(parents=True, exist_ok=True)
        Path(config.output_path).write_text(text)
        click.echo(f"report written to {config.output_path} "
                   f"({report.summary['total']} records, "
                   f"{report.summary.get('violated', 0)} violated)")
    else:
        click.echo(text)
    if figures:
        from .figures import render_figures
        stem = Path(config.output_path).with_suffix("") if config.output_path \
            else Path("hslab_report")
        for path in render_figures(report, stem):
            click.echo(f"figure written to {path}")
    return report.exit_code


def _run_suite(suite, seed, config_path, out_path, fmt, budget, figures) -> None:
    config = _build_config(suite, seed, config_path, out_path, fmt, budget)
    report = run(config)
    sys.exit(_emit_report(report, config, figures))


def _emit_json(payload, out_path):
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    if out_path:
        Path(out_path).write_text(text)
        click.echo(f"written to {out_path}")
    else:
        click.echo(text)


@click.group()
def main():
    """Numerical verification lab for weighted inequalities, oscillation
    estimates and desk-scale holomorphic extension."""


@main.command()
@click.option("--n", "n_dim", type=int, default=None,
              help="Emit a single eigenvalue result for this dimension.")
@_common_options
def eigen(n_dim, seed, config_path, out_path, fmt, budget, figures):
    """Neumann eigenvalues of the unit ball with bracket certificates."""
    if n_dim is not None:
        try:
            result = sp.neumann_eigenvalue(n_dim)
        except (ContractViolation, ArithmeticError) as exc:
            raise click.ClickException(str(exc))
        _emit_json(result.to_dict(), out_path)
        return
    _run_suite("eigen", seed, config_path, out_path, fmt, budget, figures)


@main.command()
@click.option("--name", "check_name", default=None,
              help="Restrict to one check family (e.g. hardy).")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), default=None,
              help="JSON corpus of field families and parameters.")
@_common_options
def ineq(check_name, corpus_path, seed, config_path, out_path, fmt, budget, figures):
    """Inequality checks with error budgets and verdicts."""
    if corpus_path or check_name:
        reports = _run_named_corpus(check_name or "hardy", corpus_path,
                                    seed if seed is not None else 20240801)
        _emit_json([r.to_dict() for r in reports], out_path)
        bad = sum(r.verdict == "violated" for r in reports)
        sys.exit(1 if bad else 0)
    _run_suite("ineq", seed, config_path, out_path, fmt, budget, figures)


def _run_named_corpus(name: str, corpus_path, seed: int) -> list:
    """Corpus file: {"entries": [{"phi": {...family spec...},
    "psi": {...}, "eta": "t|sqrt|arctan", "n": 3}, ...]}."""
    if corpus_path:
        spec = json.loads(Path(corpus_path).read_text())
        entries = spec.get("entries", [])
    else:
        entries = [{"phi": {"family": "gaussian", "width": 0.7}, "n": 3}]
    mc = QuadratureSpec(mode="monte-carlo", max_samples=16384, seed=seed)
    out = []
    for i, entry in enumerate(entries):
        n = int(entry.get("n", 3))
        phi_spec = dict(entry.get("phi", {"family": "gaussian"}))
        fam = phi_spec.pop("family")
        phi = fs.field_from_catalog(fam, n, **phi_spec)
        if name == "hardy":
            out.append(iq.check_hardy(phi, n, mc.with_seed(seed + i)))
        elif name in ("prop14-minus", "prop14-plus", "poincare-minus", "poincare-plus"):
            psi_spec = dict(entry.get("psi", {"family": "smoothed-newtonian"}))
            psi = fs.field_from_catalog(psi_spec.pop("family"), n, **psi_spec)
            eta = fs.ETA_FAMILIES[entry.get("eta", "t")]()
            variant = name.rsplit("-", 1)[1]
            checker = iq.check_prop14 if name.startswith("prop14") \
                else iq.check_poincare_subharmonic
            out.append(checker(psi, eta, phi, variant, mc.with_seed(seed + i)))
        elif name == "laplace-3pi":
            psi_spec = dict(entry.get("psi", {"family": "newtonian"}))
            psi = fs.field_from_catalog(psi_spec.pop("family"), n, **psi_spec)
            out.append(iq.check_laplace_3pi(psi, phi, mc.with_seed(seed + i)))
        elif name == "caccioppoli":
            psi_spec = dict(entry.get("psi", {"family": "constant", "value": 1.0}))
            psi = fs.field_from_catalog(psi_spec.pop("family"), n, **psi_spec)
            out.append(iq.check_caccioppoli(psi, phi, mc.with_seed(seed + i)))
        else:
            raise click.UsageError(f"unknown check name {name!r}")
    return out


@main.group(invoke_without_command=True)
@click.pass_context
@_common_options
def bmo(ctx, seed, config_path, out_path, fmt, budget, figures):
    """Oscillation, doubling and reverse-Holder checks."""
    if ctx.invoked_subcommand is None:
        _run_suite("bmo", seed, config_path, out_path, fmt, budget, figures)


@bmo.command("lower-bound")
@click.option("--n", "n_dim", type=int, default=3)
@click.option("--field", "field_name", default="log-abs")
@click.option("--balls", type=int, default=2000)
@click.option("--seed", type=int, default=7)
@click.option("--out", "out_path", type=click.Path(), default=None)
def bmo_lower_bound_cmd(n_dim, field_name, balls, seed, out_path):
    """Sampled lower bound for the oscillation norm of a catalog field."""
    f = log_abs_field(n_dim) if field_name == "log-abs" \
        else fs.field_from_catalog(field_name, n_dim)
    est = bm.bmo_lower_bound(f, BallSpec((0.0,) * n_dim, 1.0), balls, seed,
                             radius_range=(0.05, 0.95))
    _emit_json(est.to_dict(), out_path)


@bmo.command("doubling")
@click.option("--n", "n_dim", type=int, default=3)
@click.option("--psi", "psi_name", default="smoothed-newtonian")
@click.option("--gamma", type=float, default=0.5)
@click.option("--balls", type=int, default=25)
@click.option("--seed", type=int, default=7)
@click.option("--out", "out_path", type=click.Path(), default=None)
def bmo_doubling_cmd(n_dim, psi_name, gamma, balls, seed, out_path):
    """Doubling-mass verdicts over seeded balls."""
    psi = fs.field_from_catalog(psi_name, n_dim)
    domain = BallSpec((0.0,) * n_dim, 3.0)
    from .quadcore import sample_balls
    ball_list = sample_balls(domain, balls, seed, (0.2, 1.2))
    mc = QuadratureSpec(mode="monte-carlo", max_samples=6000, seed=seed)
    reports = [bm.check_doubling(psi, gamma, b, mc.with_seed(seed + i)).to_dict()
               for i, b in enumerate(ball_list)]
    _emit_json(reports, out_path)
    sys.exit(1 if any(r["verdict"] == "violated" for r in reports) else 0)


@bmo.command("reverse-holder")
@click.option("--n", "n_dim", type=int, default=4)
@click.option("--psi", "psi_name", default="newtonian")
@click.option("--gammas", default="0.5,0.9,0.99")
@click.option("--weak", is_flag=True, default=False)
@click.option("--out", "out_path", type=click.Path(), default=None)
def bmo_reverse_holder_cmd(n_dim, psi_name, gammas, weak, out_path):
    """Reverse-Holder ratio sweep on the unit ball."""
    psi = fs.field_from_catalog(psi_name, n_dim)
    spec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-13, max_samples=200000)
    rows = [bm.check_reverse_holder(psi, float(g), BallSpec((0.0,) * n_dim, 1.0),
                                    spec, weak=weak).to_dict()
            for g in gammas.split(",")]
    _emit_json(rows, out_path)


@bmo.command("riesz")
@click.option("--eps", type=float, default=0.1)
@click.option("--radius", "R", type=float, default=0.5)
@click.option("--offset", type=float, default=3.0)
@click.option("--out", "out_path", type=click.Path(), default=None)
def bmo_riesz_cmd(eps, R, offset, out_path):
    """Disc decomposition diagnostics for the smoothed-log model field."""
    psi = fs.model_subharmonic("log-modulus", 2, eps=eps, offset=offset)
    pieces = bm.riesz_decompose_disc(psi, R)
    diag = bm.riesz_diagnostics(pieces, psi)
    diag["laplacian_mass"] = pieces.laplacian_mass.value
    diag["boundary_flux"] = bm.boundary_flux(psi, 2.0 * R)
    _emit_json(diag, out_path)


@main.group(invoke_without_command=True)
@click.pass_context
@_common_options
def hartogs(ctx, seed, config_path, out_path, fmt, budget, figures):
    """Extension solvers on C^2 at desk scale."""
    if ctx.invoked_subcommand is None:
        _run_suite("hartogs", seed, config_path, out_path, fmt, budget, figures)


@hartogs.command("run")
@click.option("--case", "case_name",
              type=click.Choice(["one", "z1", "z1sq-exp", "const", "re-z1", "re-z1sq-exp"]),
              default="z1")
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--decay-csv", "decay_csv", type=click.Path(), default=None,
              help="Write |u| against |z| samples for decay plots.")
def hartogs_run_cmd(case_name, out_path, decay_csv):
    """One extension case with residual and error report."""
    kind = "holomorphic" if case_name in ("one", "z1", "z1sq-exp") else "pluriharmonic"
    prob = default_problem(kind, case_name)
    rep = hg.hartogs_extend(prob) if kind == "holomorphic" \
        else hg.pluriharmonic_extend(prob)
    _emit_json(rep.to_dict(), out_path)
    if decay_csv:
        radii = np.geomspace(1.0, 6.0, 24)
        probe = np.zeros((len(radii), 4))
        probe[:, 0] = radii
        vals = np.abs(np.asarray(rep.correction(probe)))
        lines = ["radius,abs_u"] + [f"{r},{v}" for r, v in zip(radii, vals)]
        Path(decay_csv).write_text("\n".join(lines) + "\n")
        click.echo(f"decay samples written to {decay_csv}")


@main.group(invoke_without_command=True)
@click.pass_context
@_common_options
def liouville(ctx, seed, config_path, out_path, fmt, budget, figures):
    """Capacity, cutoff energies and divergence classification."""
    if ctx.invoked_subcommand is None:
        _run_suite("liouville", seed, config_path, out_path, fmt, budget, figures)


@liouville.command("classify")
@click.option("--family", type=click.Choice(sorted(lv.GROWTH_CATALOG)),
              default="finite-volume-quadratic")
@click.option("--t-max", type=float, default=1e6)
@click.option("--out", "out_path", type=click.Path(), default=None)
def liouville_classify_cmd(family, t_max, out_path):
    """Divergence verdict for a catalog growth family."""
    man, gp = lv.GROWTH_CATALOG[family]()
    kwargs = {}
    if family == "euclidean-control":
        kwargs["psi_profile"] = lambda t: -np.ones_like(np.asarray(t, dtype=float))
    verdict = lv.criterion_divergence(man, gp, math.e ** 2,
                                      np.geomspace(1e2, t_max, 9), **kwargs)
    _emit_json(verdict.to_dict(), out_path)


@liouville.command("cutoff")
@click.option("--r-inner", "r_inner", type=float, default=1.0)
@click.option("--r-outer", "r_outer", type=float, default=2.0)
@click.option("--eps", type=float, default=1.0)
@click.option("--points", type=int, default=60)
@click.option("--out", "out_path", type=click.Path(), default="cutoff_profile.csv")
def liouville_cutoff_cmd(r_inner, r_outer, eps, points, out_path):
    """Emit the volume-adapted cutoff profile as CSV."""
    man = lv.euclidean_manifold(3)
    cut = lv.cutoff_build(lambda t: man.volume(t), r_inner, r_outer, eps)
    grid = np.linspace(0.0, r_outer * 1.2, points)
    lines = ["t,chi"] + [f"{t},{c}" for t, c in zip(grid, cut.chi(grid))]
    Path(out_path).write_text("\n".join(lines) + "\n")
    click.echo(f"cutoff profile written to {out_path} (energy bound {cut.bound:.6g})")


@main.command(name="all")
@_common_options
def all_cmd(seed, config_path, out_path, fmt, budget, figures):
    """Every suite in sequence, one combined report."""
    _run_suite("all", seed, config_path, out_path, fmt, budget, figures)


if __name__ == "__main__":
    main()
