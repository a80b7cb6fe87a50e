"""Optional figure rendering for suite reports.

When the CLI is asked for figures, each suite's plottable records are drawn
to PNG files next to the delimited output. Rendering is best-effort: a suite
with nothing to plot is skipped silently.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path: Path, written: list):
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    written.append(str(path))


def _eigen_figure(records, stem: Path, written: list):
    rows = [(r.data["n"], r.data["mu_n"], r.data["bracket_lo"], r.data["bracket_hi"])
            for r in records if r.anchor == "neumann-eigenvalue-bracket"
            and "mu_n" in r.data]
    if not rows:
        return
    rows.sort()
    n, mu, lo, hi = (np.array(x) for x in zip(*rows))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(n, mu, "o-", label="first nonzero Neumann eigenvalue")
    ax.plot(n, lo, "--", color="gray", label="lower bracket (n+2)(n+4)/(n+6)")
    ax.plot(n, hi, "--", color="black", label="upper bracket n+2")
    ax.set_xlabel("dimension n")
    ax.set_ylabel("eigenvalue")
    ax.legend(fontsize=8)
    _save(fig, stem.with_name(stem.name + "_eigen.png"), written)


def _bmo_figure(records, stem: Path, written: list):
    for r in records:
        curve = r.data.get("curve")
        if r.anchor == "log-norm-two-sided-sandwich" and curve:
            counts, vals = zip(*curve)
            fig, ax = plt.subplots(figsize=(6, 4))
            ax.semilogx(counts, vals, "o-")
            if "lo" in r.data:
                ax.axhline(r.data["lo"], color="gray", ls="--", label="lower target")
                ax.axhline(r.data["hi"], color="black", ls="--", label="upper target")
                ax.legend(fontsize=8)
            ax.set_xlabel("balls tried")
            ax.set_ylabel("running max oscillation")
            ax.set_title(r.name, fontsize=9)
            _save(fig, stem.with_name(stem.name + f"_{r.name.replace('[','_').replace(']','')}.png"),
                  written)


def _ineq_figure(records, stem: Path, written: list):
    for r in records:
        rows = r.data.get("rows")
        if r.anchor == "carleman-ratio-curves" and rows:
            tau = [row["tau"] for row in rows]
            fig, ax = plt.subplots(figsize=(6, 4))
            ax.plot(tau, [row["weight_only"] for row in rows], "o-", label="weight-only ratio")
            ax.plot(tau, [row["gradient_weight"] for row in rows], "s-", label="gradient ratio")
            ax.set_xlabel("weight exponent")
            ax.set_ylabel("ratio")
            ax.legend(fontsize=8)
            _save(fig, stem.with_name(stem.name + "_carleman.png"), written)


def _hartogs_figure(records, stem: Path, written: list):
    for r in records:
        samples = r.data.get("samples")
        if r.anchor == "potential-far-field-rate" and samples:
            rad, val = zip(*samples)
            fig, ax = plt.subplots(figsize=(6, 4))
            ax.loglog(rad, np.abs(val), "o-")
            ax.set_xlabel("|z|")
            ax.set_ylabel("|u(z)|")
            ax.set_title("far-field decay of the potential", fontsize=9)
            _save(fig, stem.with_name(stem.name + "_decay.png"), written)


def _liouville_figure(records, stem: Path, written: list):
    rows = [(r.name, r.data.get("partials")) for r in records
            if r.anchor == "growth-criterion-classification" and r.data.get("partials")]
    if not rows:
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, partials in rows:
        t, p = zip(*partials)
        ax.semilogx(t, p, "o-", label=name.split("[")[-1].rstrip("]"))
    ax.set_xlabel("integration cutoff")
    ax.set_ylabel("partial integral")
    ax.legend(fontsize=8)
    _save(fig, stem.with_name(stem.name + "_divergence.png"), written)


def render_figures(report, out_stem) -> list:
    """Render per-suite figures next to the report; returns written paths."""
    stem = Path(out_stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    written: list = []
    _eigen_figure(report.records, stem, written)
    _bmo_figure(report.records, stem, written)
    _ineq_figure(report.records, stem, written)
    _hartogs_figure(report.records, stem, written)
    _liouville_figure(report.records, stem, written)
    return written
