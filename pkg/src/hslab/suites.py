"""Suite orchestration: named check collections producing machine-readable
reports with stable schemas.

Each record carries the claim it verifies (anchor), a verdict, its numeric
payload and a runtime. Timestamps and runtimes are volatile and live where
golden-file comparisons can strip them; every other field reproduces exactly
under a fixed seed.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__
from .quadcore import (BallSpec, ContractViolation, QuadratureSpec,
                       derive_rng, integrate_ball)
from . import funcspace as fs
from . import specfun as sp
from . import ineqlab as iq
from . import bmolab as bm
from . import hartogs as hg
from . import liouville as lv

BUDGET_FACTORS = {"low": 0.25, "default": 1.0, "high": 4.0}
SUITE_NAMES = ("eigen", "bmo", "ineq", "hartogs", "liouville", "all")


class ConfigError(ValueError):
    """Malformed run configuration; the message names the offending key."""


@dataclass
class Budget:
    name: str = "default"

    @property
    def factor(self) -> float:
        return BUDGET_FACTORS[self.name]

    def count(self, n: int, lo: int = 2) -> int:
        return max(lo, int(round(n * self.factor)))


@dataclass
class Record:
    name: str
    anchor: str
    verdict: str                  # holds | violated | inconclusive | info | error
    data: dict
    runtime_s: float = 0.0

    def to_dict(self, zero_runtime: bool = False) -> dict:
        return {"name": self.name, "anchor": self.anchor, "verdict": self.verdict,
                "data": self.data, "runtime_s": 0.0 if zero_runtime else self.runtime_s}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, float) and (math.isnan(obj) or math.isinf(obj)):
        return repr(obj)
    return obj


@dataclass
class SuiteReport:
    meta: dict
    records: list
    summary: dict

    @classmethod
    def assemble(cls, suite: str, seed: int, budget: Budget,
                 records: Sequence[Record], config_echo: dict) -> "SuiteReport":
        counts = {"holds": 0, "violated": 0, "inconclusive": 0, "info": 0, "error": 0}
        for r in records:
            counts[r.verdict] = counts.get(r.verdict, 0) + 1
        meta = {"artifact_version": __version__,
                "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                "suite": suite, "seed": seed, "budget": budget.name,
                "config": config_echo}
        summary = {"total": len(records), **counts}
        return cls(meta=meta, records=list(records), summary=summary)

    @property
    def exit_code(self) -> int:
        bad = self.summary.get("violated", 0) + self.summary.get("error", 0)
        return 1 if bad else 0

    def to_json(self, zero_runtime: bool = False) -> str:
        payload = {"meta": self.meta,
                   "records": [r.to_dict(zero_runtime) for r in self.records],
                   "summary": self.summary}
        return json.dumps(_jsonable(payload), indent=2, sort_keys=True)

    def body_bytes(self) -> bytes:
        """Canonical bytes of everything that must reproduce under a fixed
        seed: records (runtimes zeroed) and summary, no header block."""
        payload = {"records": [r.to_dict(zero_runtime=True) for r in self.records],
                   "summary": self.summary}
        return json.dumps(_jsonable(payload), sort_keys=True).encode()

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["name", "anchor", "verdict", "lhs", "lhs_err",
                         "rhs", "rhs_err", "value", "err", "runtime_s", "extra"])
        for r in self.records:
            d = r.data
            extra = {k: v for k, v in d.items()
                     if k not in ("lhs", "lhs_err", "rhs", "rhs_err", "value", "err")}
            writer.writerow([r.name, r.anchor, r.verdict,
                             d.get("lhs", ""), d.get("lhs_err", ""),
                             d.get("rhs", ""), d.get("rhs_err", ""),
                             d.get("value", ""), d.get("err", ""),
                             f"{r.runtime_s:.3f}",
                             json.dumps(_jsonable(extra), sort_keys=True)])
        return buf.getvalue()


def _timed(name: str, anchor: str, fn: Callable[[], tuple]) -> Record:
    """Run one check; contract violations and numeric failures become error
    records instead of killing the suite."""
    t0 = time.perf_counter()
    try:
        verdict, data = fn()
    except ContractViolation as exc:
        verdict, data = "error", {"message": str(exc)}
    except (ArithmeticError, bm.InconclusiveResult) as exc:
        verdict, data = "inconclusive", {"message": str(exc)}
    return Record(name=name, anchor=anchor, verdict=verdict, data=data,
                  runtime_s=time.perf_counter() - t0)


def _from_report(rep: iq.InequalityReport) -> tuple:
    return rep.verdict, rep.to_dict()


# ---------------------------------------------------------------------------
# eigen suite


def eigen_suite(seed: int, budget: Budget, overrides: Optional[dict] = None) -> list:
    overrides = overrides or {}
    n_max = int(overrides.get("n_max", 12))
    records = []
    for n in range(2, n_max + 1):
        def run(n=n):
            r = sp.neumann_eigenvalue(n)
            return "holds", r.to_dict()
        records.append(_timed(f"neumann-eigenvalue[n={n}]",
                              "neumann-eigenvalue-bracket", run))

    def run_half():
        root = sp.lowest_root("J", 0.5)
        ok = abs(root - math.pi) < 1e-10
        return ("holds" if ok else "violated"), {"value": root, "target": math.pi,
                                                 "err": abs(root - math.pi)}
    records.append(_timed("first-root-halforder", "half-order-root-closed-form", run_half))

    def run_brackets():
        worst = math.inf
        roots = {}
        for k in range(20):
            nu = 0.5 + 0.5 * k
            j = sp.lowest_root("J", nu)
            jp = sp.lowest_root("Jprime", nu)
            lo = math.sqrt(nu * (nu + 2.0))
            worst = min(worst, j - lo, math.sqrt(2 * (nu + 1) * (nu + 3)) - j,
                        jp - lo, math.sqrt(2 * nu * (nu + 1)) - jp, j - jp)
            roots[nu] = (jp, j)
        interlace = all(roots[nu][1] < roots[nu + 1][1] < roots[nu + 2][1]
                        for nu in [0.5 + 0.5 * k for k in range(16)])
        ok = worst > 0 and interlace
        return ("holds" if ok else "violated"), {"value": worst, "interlacing": interlace}
    records.append(_timed("root-bracket-sweep", "root-brackets-strict", run_brackets))

    def run_fe():
        grid = np.linspace(0.5, 10.0, 50)
        worst = 0.0
        for nu in (0.5, 1.0, 2.5):
            for x in grid:
                ra, rb = sp.functional_equation_residual(nu, float(x))
                worst = max(worst, ra, rb)
        return ("holds" if worst <= 1e-9 else "violated"), {"value": worst, "err": 0.0}
    records.append(_timed("order-raising-identities", "functional-equation-residuals", run_fe))

    def run_ode():
        worst = 0.0
        for n in (2, 3, 7, 12):
            worst = max(worst, float(sp.bessel_ode_residual(n, np.linspace(0.1, 10, 60)).max()))
        return ("holds" if worst <= 1e-8 else "violated"), {"value": worst}
    records.append(_timed("radial-equation-plugin", "radial-ode-residual", run_ode))
    return records


# ---------------------------------------------------------------------------
# bmo suite


def log_abs_field(n: int) -> fs.ScalarField:
    return fs.radial_c2_field(
        (0.0,) * n,
        lambda r: np.log(np.maximum(r, 1e-300)),
        lambda r: 1.0 / np.maximum(r, 1e-300),
        lambda r: -1.0 / np.maximum(r, 1e-300) ** 2,
        n, singular_balls=(BallSpec((0.0,) * n, 1e-12),), name=f"log|x| (n={n})")


def bmo_suite(seed: int, budget: Budget, overrides: Optional[dict] = None) -> list:
    overrides = overrides or {}
    records = []
    qspec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-13, max_samples=200000)
    ball_count = int(overrides.get("ball_count", budget.count(2000)))
    per_ball = int(overrides.get("samples_per_ball", budget.count(2048)))

    for n in (3, 4):
        def run_closed(n=n):
            f = log_abs_field(n)
            neg = fs.field_compose_scalar(f, lambda v: -v, lambda v: -np.ones_like(v),
                                          lambda v: np.zeros_like(v), name="log 1/|x|")
            mo = bm.mean_oscillation(neg, BallSpec((0.0,) * n, 1.0), qspec)
            mean_ok = abs(mo.mean.value - 1.0 / n) < 1e-8
            osc_ok = abs(mo.oscillation.value - 2.0 / (math.e * n)) < 1e-6
            return ("holds" if (mean_ok and osc_ok) else "violated"), {
                "lhs": mo.mean.value, "rhs": 1.0 / n,
                "value": mo.oscillation.value, "err": mo.oscillation.err,
                "osc_target": 2.0 / (math.e * n)}
        records.append(_timed(f"ball-mean-closed-form[n={n}]",
                              "log-mean-oscillation-closed-form", run_closed))

    for n in (3, 4):
        def run_sandwich(n=n):
            est = bm.bmo_lower_bound(log_abs_field(n), BallSpec((0.0,) * n, 1.0),
                                     ball_count, seed=int(derive_rng(seed, "bmo_lb", n).integers(2 ** 62)),
                                     radius_range=(0.05, 0.95), samples_per_ball=per_ball)
            lo = 2.0 / (math.e * n) - 0.01
            hi = 2.0 / math.sqrt(n - 2) + 0.01
            ok = lo <= est.lower_bound <= hi
            return ("holds" if ok else "violated"), {
                "value": est.lower_bound, "lo": lo, "hi": hi,
                "curve": [list(c) for c in est.curve],
                "witness_radius": None if est.witness is None else est.witness.radius}
        records.append(_timed(f"oscillation-sandwich[n={n}]",
                              "log-norm-two-sided-sandwich", run_sandwich))

    def run_doubling():
        mc = QuadratureSpec(mode="monte-carlo", max_samples=budget.count(6000), seed=seed)
        psi = fs.model_subharmonic("smoothed-newtonian", 3, eps=0.5)
        balls = bm.sample_balls(BallSpec((0.0, 0.0, 0.0), 3.0), budget.count(15),
                                seed=int(derive_rng(seed, "dbl").integers(2 ** 62)),
                                radius_range=(0.2, 1.2))
        violated = 0
        for i, b in enumerate(balls):
            rep = bm.check_doubling(psi, 0.5, b, mc.with_seed(int(derive_rng(seed, "dblb", i).integers(2 ** 62))))
            violated += rep.verdict == "violated"
        return ("holds" if violated == 0 else "violated"), {
            "value": violated, "balls": len(balls)}
    records.append(_timed("mass-doubling-corpus", "doubling-two-to-n", run_doubling))

    def run_rh():
        psi = fs.model_subharmonic("newtonian", 4)
        rows = []
        for gamma in (0.5, 0.9, 0.99):
            rep = bm.check_reverse_holder(psi, gamma, BallSpec((0.0,) * 4, 1.0), qspec)
            rows.append({"gamma": gamma, "rho": rep.rho, "normalized": rep.normalized})
        finite = all(math.isfinite(r["rho"]) for r in rows)
        return ("holds" if finite else "violated"), {
            "rows": rows, "value": max(r["normalized"] for r in rows)}
    records.append(_timed("reverse-holder-sweep", "reverse-holder-normalized-bounded", run_rh))

    def run_riesz():
        psi = fs.model_subharmonic("log-modulus", 2, eps=0.1, offset=3.0)
        pieces = bm.riesz_decompose_disc(psi, 0.5)
        diag = bm.riesz_diagnostics(pieces, psi)
        flux = bm.boundary_flux(psi, 1.0)
        ok = (diag["decomp_residual"] <= 1e-6 and diag["h_harmonic_residual"] <= 1e-4
              and diag["majorant_min"] >= -1e-8 and diag["h_max"] <= 1e-8
              and abs(pieces.laplacian_mass.value - flux) <= 1e-6 * abs(flux)
              and diag["v_inf"] <= diag["v_bound"] + 1e-12)
        return ("holds" if ok else "violated"), {
            "value": diag["h_harmonic_residual"], "mass": pieces.laplacian_mass.value,
            "flux": flux, **{k: v for k, v in diag.items()}}
    records.append(_timed("disc-decomposition", "potential-split-invariants", run_riesz))

    def run_submean():
        mc = QuadratureSpec(mode="monte-carlo", max_samples=budget.count(20000), seed=seed)
        fields = []
        for i, a in enumerate(np.linspace(-0.2, 0.2, 5)):
            fields.append(fs.radial_c2_field(
                (float(a), 0.0),
                lambda r: np.log(np.maximum(r, 1e-300) / 4.0),
                lambda r: 1.0 / np.maximum(r, 1e-300),
                lambda r: -1.0 / np.maximum(r, 1e-300) ** 2,
                2, singular_balls=(BallSpec((float(a), 0.0), 1e-12),),
                name=f"log|z-a|/4 a={a:.2f}"))
        rep = bm.check_submean_ratio(fields, 2.0, mc)
        return "info", rep.to_dict()
    records.append(_timed("half-disc-mass-ratio", "submean-value-family-ratio", run_submean))

    def run_subdomain():
        mc = QuadratureSpec(mode="monte-carlo", max_samples=budget.count(20000), seed=seed)
        f = log_abs_field(3)
        rep = bm.check_subdomain_oscillation(
            f, BallSpec((0.2, 0.0, 0.0), 0.3), BallSpec((0.0, 0.0, 0.0), 1.0), mc)
        return _from_report(rep)
    records.append(_timed("nested-domain-oscillation", "subdomain-oscillation-transfer",
                          run_subdomain))

    def run_psh_probe():
        def ev(pts):
            pts = np.atleast_2d(pts)
            with np.errstate(divide="ignore"):
                return 0.5 * np.log(pts[:, 0] ** 2 + pts[:, 1] ** 2)
        psi = fs.ScalarField(dim=4, evaluator=ev, name="log|z1|")
        est = bm.bmo_psh_probe(psi, BallSpec((0.0,) * 4, 1.0), budget.count(800),
                               seed=int(derive_rng(seed, "psh").integers(2 ** 62)),
                               samples_per_ball=budget.count(2048))
        ok = math.isfinite(est.lower_bound)
        return ("holds" if ok else "violated"), {
            "value": est.lower_bound, "curve": [list(c) for c in est.curve]}
    records.append(_timed("slice-log-oscillation-probe", "psh-locally-bounded-oscillation",
                          run_psh_probe))
    return records


# ---------------------------------------------------------------------------
# ineq suite


def ineq_suite(seed: int, budget: Budget, overrides: Optional[dict] = None) -> list:
    overrides = overrides or {}
    records = []
    corpus_size = int(overrides.get("corpus_size", budget.count(10)))
    mc_samples = int(overrides.get("mc_samples", budget.count(8192)))
    radial_spec = QuadratureSpec(rel_tol=1e-11, abs_tol=1e-13, max_samples=300000, seed=seed)
    mc = QuadratureSpec(mode="monte-carlo", max_samples=mc_samples, seed=seed)

    def run_hardy_gauss():
        phi = fs.gaussian_field((0.0, 0.0, 0.0), 1.0, 3)
        rep = iq.check_hardy(phi, 3, radial_spec)
        lhs_target = math.pi ** 1.5 / 2.0
        rhs_target = 3.0 * math.pi ** 1.5 / 2.0
        ok = (rep.verdict == "holds"
              and abs(rep.lhs.value - lhs_target) < 1e-8
              and abs(rep.rhs.value - rhs_target) < 1e-8)
        return ("holds" if ok else "violated"), rep.to_dict()
    records.append(_timed("hardy-gaussian-closed-form", "hardy-weight-inequality",
                          run_hardy_gauss))

    def corpus_records():
        phis = fs.corpus_phi(3, corpus_size, seed)
        psi_smooth = fs.model_subharmonic("smoothed-newtonian", 3, eps=0.5)
        psi_inv = fs.model_subharmonic("inverse-sqrt", 3)
        etas = [fs.eta_identity(), fs.eta_power(0.5), fs.eta_arctan()]
        pos = fs.radial_c2_field((0.0,) * 3, lambda r: 1.0 + r * r, lambda r: 2.0 * r,
                                 lambda r: 2.0 * np.ones_like(r), 3, name="1+|x|^2")
        out = {"violated": 0, "checks": 0, "worst_margin": math.inf}
        for i, phi in enumerate(phis):
            spec_i = mc.with_seed(int(derive_rng(seed, "corpus", i).integers(2 ** 62)))
            reps = [iq.check_hardy(phi, 3, spec_i)]
            psi = psi_smooth if i % 2 == 0 else psi_inv
            for eta in etas:
                reps.append(iq.check_prop14(psi, eta, phi, "minus", spec_i))
                reps.append(iq.check_poincare_subharmonic(psi, eta, phi, "minus", spec_i))
            reps.append(iq.check_prop14(pos, fs.eta_identity(), phi, "plus", spec_i))
            reps.append(iq.check_laplace_3pi(psi, phi, spec_i))
            reps.append(iq.check_caccioppoli(pos, phi, spec_i))
            for r in reps:
                out["checks"] += 1
                out["violated"] += r.verdict == "violated"
                margin = r.rhs.value - r.lhs.value
                out["worst_margin"] = min(out["worst_margin"], margin)
        verdict = "holds" if out["violated"] == 0 else "violated"
        return verdict, {"value": out["violated"], "checks": out["checks"],
                         "worst_margin": out["worst_margin"]}
    records.append(_timed("randomized-inequality-corpus", "corpus-zero-violations",
                          corpus_records))

    def run_kappa():
        reps = iq.kappa_bound_check(fs.eta_power(0.5), np.geomspace(1.0, 100.0, 8), 1.0)
        bad = sum(r.verdict == "violated" for r in reps)
        return ("holds" if bad == 0 else "violated"), {
            "value": bad, "grid": len(reps)}
    records.append(_timed("kappa-schwarz-bound", "kappa-square-bound", run_kappa))

    def run_carleman():
        phi = fs.make_annulus_bump((0.0, 0.0, 0.0), (1.0, 1.2, 1.8, 2.0), 3)
        rows = []
        ok = True
        for tau in range(3, 9):
            cs = iq.CarlemanSpec(tau=float(tau), n=3)
            rep = iq.carleman_ratio(phi, cs, "gradient-chain", radial_spec)
            w = iq.carleman_ratio(phi, cs, "weight-only", radial_spec)
            gw = iq.carleman_ratio(phi, cs, "gradient-weight", radial_spec)
            rows.append({"tau": tau, "weight_only": w.ratio, "gradient_weight": gw.ratio,
                         "slack": rep.slack, "slack_err": rep.slack_err})
            ok = ok and math.isfinite(w.ratio) and math.isfinite(gw.ratio) \
                and rep.slack >= -3.0 * rep.slack_err
        return ("holds" if ok else "violated"), {
            "rows": rows, "value": min(r["slack"] for r in rows)}
    records.append(_timed("weighted-annulus-estimates", "carleman-ratio-curves",
                          run_carleman))
    return records


# ---------------------------------------------------------------------------
# hartogs suite


HOLO_CASES = {
    "one": (lambda z1, z2: np.ones_like(z1), lambda z1, z2: np.zeros_like(z1),
            lambda z1, z2: np.zeros_like(z1)),
    "z1": (lambda z1, z2: z1, lambda z1, z2: np.ones_like(z1),
           lambda z1, z2: np.zeros_like(z1)),
    "z1sq-exp": (lambda z1, z2: z1 ** 2 * np.exp(z2), lambda z1, z2: 2 * z1 * np.exp(z2),
                 lambda z1, z2: z1 ** 2 * np.exp(z2)),
}

PH_CASES = {
    "const": (lambda z1, z2: 2.5 + 0.0 * z1, lambda z1, z2: 0.0 * z1,
              lambda z1, z2: 0.0 * z1),
    "re-z1": (lambda z1, z2: z1, lambda z1, z2: np.ones_like(z1),
              lambda z1, z2: np.zeros_like(z1)),
    "re-z1sq-exp": (lambda z1, z2: z1 ** 2 * np.exp(z2), lambda z1, z2: 2 * z1 * np.exp(z2),
                    lambda z1, z2: z1 ** 2 * np.exp(z2)),
}


def default_problem(kind: str, case: str) -> hg.ExtensionProblem:
    omega = BallSpec((0.0,) * 4, 1.2)
    e_set = BallSpec((0.0,) * 4, 0.5)
    fn, d1, d2 = (HOLO_CASES if kind == "holomorphic" else PH_CASES)[case]
    if kind == "holomorphic":
        f = hg.holo_field(fn, case, d1=d1, d2=d2)
        truth = hg.holo_field(fn, case + "-truth")
    else:
        f = hg.pluriharmonic_field(fn, case, d1=d1, d2=d2)
        truth = hg.pluriharmonic_field(fn, case + "-truth")
    return hg.ExtensionProblem(Omega=omega, E=e_set, margin=0.4, f=f, truth=truth)


def hartogs_suite(seed: int, budget: Budget, overrides: Optional[dict] = None) -> list:
    overrides = overrides or {}
    records = []
    solve_budget = hg.SolveBudget().scaled(float(overrides.get("budget_factor", budget.factor)))
    tol = 1e-2

    for case in HOLO_CASES:
        def run(case=case):
            prob = default_problem("holomorphic", case)
            rep = hg.hartogs_extend(prob, budget=solve_budget, seed=seed,
                                    compute_l2=(case == "z1"))
            ok = rep.sup_err_truth <= tol
            return ("holds" if ok else "violated"), rep.to_dict()
        records.append(_timed(f"holomorphic-extension[{case}]",
                              "cutoff-and-correct-extension", run))

    for case in PH_CASES:
        def run(case=case):
            prob = default_problem("pluriharmonic", case)
            rep = hg.pluriharmonic_extend(prob, budget=solve_budget, seed=seed)
            ok = rep.sup_err_truth <= tol
            return ("holds" if ok else "violated"), rep.to_dict()
        records.append(_timed(f"pluriharmonic-extension[{case}]",
                              "poisson-route-extension", run))

    def run_decay():
        bump = fs.make_bump(fs.BumpSpec((0.0,) * 4, 0.3, 0.6), 4)
        mass = integrate_ball(bump, BallSpec((0.0,) * 4, 0.6),
                              QuadratureSpec(rel_tol=1e-11, abs_tol=1e-14, max_samples=100000))
        g = fs.ScalarField(4, lambda p: bump(p) / mass.value, radial_about=(0.0,) * 4,
                           support=bump.support, name="unit-mass-bump")
        sol = hg.newtonian_solve(g, 4)
        dv = hg.decay_check(sol, 0.6, 2)
        slope_ok = abs(sol.decay[0] + 2.0) <= 0.1
        return ("holds" if (dv.passed and slope_ok) else "violated"), {
            "value": sol.decay[0], "fitted_constant": dv.fitted_constant,
            "samples": [list(s) for s in dv.samples]}
    records.append(_timed("far-field-decay", "potential-far-field-rate", run_decay))

    def run_psh():
        v = hg.log_psh_probe(grid_n=16)
        return ("holds" if v.holds else "violated"), v.to_dict()
    records.append(_timed("log-distance-psh-probe", "log-hyperbolic-distance-psh", run_psh))

    def run_dhyp():
        val = hg.hyperbolic_distance(hg.HyperbolicPoint(0.0), hg.HyperbolicPoint(0.5))
        ok = abs(val - math.log(3.0)) < 1e-12
        return ("holds" if ok else "violated"), {"value": val, "target": math.log(3.0)}
    records.append(_timed("disc-distance-closed-form", "hyperbolic-distance-formula",
                          run_dhyp))
    return records


# ---------------------------------------------------------------------------
# liouville suite


def liouville_suite(seed: int, budget: Budget, overrides: Optional[dict] = None) -> list:
    overrides = overrides or {}
    records = []

    def run_capacity():
        worst = 0.0
        for n in range(3, 9):
            for r in (0.5, 1.0, 2.0):
                e = lv.extremal_energy(n, r)
                c = lv.capacity_ball(n, r)
                worst = max(worst, abs(e.value - c) / c)
        return ("holds" if worst <= 1e-6 else "violated"), {"value": worst}
    records.append(_timed("capacity-extremal-energy", "ball-capacity-formula", run_capacity))

    def run_cutoff():
        rng = derive_rng(seed, "cutoff_corpus")
        violations = 0
        count = int(overrides.get("cutoff_configs", budget.count(10)))
        for i in range(count):
            man = lv.euclidean_manifold(3 if i % 2 == 0 else 4)
            amp = float(rng.uniform(0.5, 2.0))
            width = float(rng.uniform(0.5, 2.0))

            def f_prof(t, amp=amp, width=width):
                t = np.asarray(t, dtype=float)
                return amp * np.exp(-(t / width) ** 2) + 0.1

            r = float(rng.uniform(0.5, 1.5))
            R = r + float(rng.uniform(0.5, 2.0))
            eps = float(rng.uniform(0.1, 2.0))

            mass = lv.mass_function(f_prof, man, R + 0.5)
            cut = lv.cutoff_build(mass, r, R, eps)
            rep = lv.check_cutoff_bound(f_prof, man, cut)
            violations += rep.verdict == "violated"
        return ("holds" if violations == 0 else "violated"), {
            "value": violations, "configs": count}
    records.append(_timed("volume-cutoff-corpus", "cutoff-energy-bound", run_cutoff))

    grids = {"short": np.geomspace(1e2, 1e6, 9), "long": np.geomspace(1e2, 1e7, 10)}
    expected = {"finite-volume-quadratic": "divergent",
                "quadratic-volume-log": "divergent",
                "euclidean-control": "convergent"}
    for fam, want in expected.items():
        def run(fam=fam, want=want):
            man, gp = lv.GROWTH_CATALOG[fam]()
            kw = {}
            if fam == "euclidean-control":
                kw["psi_profile"] = lambda t: -np.ones_like(np.asarray(t, dtype=float))
            v = lv.criterion_divergence(man, gp, math.e ** 2, grids["short"], **kw)
            v_long = lv.criterion_divergence(man, gp, math.e ** 2, grids["long"], **kw)
            ok = v.classification == want and v_long.classification == want
            return ("holds" if ok else "violated"), {
                "classification": v.classification, "expected": want,
                "value": v.tail_exponent_fit,
                "tail_integrable": gp.lambda_tail_integrable,
                "partials": [list(p) for p in v.partial_values]}
        records.append(_timed(f"divergence-classify[{fam}]",
                              "growth-criterion-classification", run))

    def run_nad():
        man = lv.finite_volume_manifold()
        rep = lv.nadirashvili_reduction(
            man, lambda t: np.asarray(t, dtype=float),
            lambda t: -np.ones_like(np.asarray(t, dtype=float)), np.geomspace(1.0, 100.0, 6))
        ok = rep.applicable and rep.chain_holds
        return ("holds" if ok else "violated"), rep.to_dict()
    records.append(_timed("weighted-mass-reduction", "growth-chain-inequality", run_nad))

    def run_nad_quadratic():
        man = lv.quadratic_volume_manifold()
        psi = lambda t: -np.ones_like(np.asarray(t, dtype=float))
        grid = np.geomspace(1.0, 100.0, 6)
        ratios = [lv.v_lambda(man, lambda t: np.asarray(t, dtype=float), psi, float(r)).value
                  / (1.0 + r * r) for r in grid]
        gp = lv.GrowthPair.build(lambda t: np.asarray(t, dtype=float),
                                 lambda t: np.ones_like(np.asarray(t, dtype=float)),
                                 label="identity")
        v = lv.criterion_divergence(man, gp, 1.0, np.geomspace(1e2, 1e6, 9),
                                    psi_profile=psi, tail_condition="none")
        ok = max(ratios) <= 1.05 * max(1.0, max(ratios)) and v.classification == "divergent"
        return ("holds" if ok else "violated"), {
            "ratios": ratios, "classification": v.classification,
            "value": max(ratios)}
    records.append(_timed("bounded-ratio-route", "ratio-bounded-implies-divergent",
                          run_nad_quadratic))
    return records


SUITE_RUNNERS = {
    "eigen": eigen_suite,
    "bmo": bmo_suite,
    "ineq": ineq_suite,
    "hartogs": hartogs_suite,
    "liouville": liouville_suite,
}


# ---------------------------------------------------------------------------
# run configuration


KNOWN_CONFIG_KEYS = {"suite", "seed", "budget", "budgets", "output_path", "format"}
KNOWN_BUDGET_KEYS = {
    "eigen": {"n_max"},
    "bmo": {"ball_count", "samples_per_ball"},
    "ineq": {"corpus_size", "mc_samples"},
    "hartogs": {"budget_factor"},
    "liouville": {"cutoff_configs"},
}


@dataclass
class RunConfig:
    suite: str = "all"
    seed: int = 20240801
    budget: str = "default"
    budgets: dict = dc_field(default_factory=dict)
    output_path: Optional[str] = None
    format: str = "json"

    def validate(self) -> "RunConfig":
        if self.suite not in SUITE_NAMES:
            raise ConfigError(f"unknown suite {self.suite!r}; pick one of {SUITE_NAMES}")
        if self.budget not in BUDGET_FACTORS:
            raise ConfigError(f"unknown budget {self.budget!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")
        for mod, keys in self.budgets.items():
            if mod not in KNOWN_BUDGET_KEYS:
                raise ConfigError(f"unknown budgets module {mod!r}")
            for k in keys:
                if k not in KNOWN_BUDGET_KEYS[mod]:
                    raise ConfigError(f"unknown budget key {mod}.{k}")
        return self


def load_config(path: str) -> dict:
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    for k in raw:
        if k not in KNOWN_CONFIG_KEYS:
            raise ConfigError(f"unknown config key {k!r}")
    return raw


def run(config: RunConfig) -> SuiteReport:
    """Execute the configured suite and assemble the report."""
    config.validate()
    budget = Budget(config.budget)
    names = [s for s in SUITE_NAMES if s != "all"] if config.suite == "all" \
        else [config.suite]
    records = []
    for name in names:
        sub_seed = int(derive_rng(config.seed, "suite", name).integers(2 ** 62))
        records.extend(SUITE_RUNNERS[name](sub_seed, budget, config.budgets.get(name)))
    echo = {"suite": config.suite, "budgets": config.budgets, "format": config.format}
    return SuiteReport.assemble(config.suite, config.seed, budget, records, echo)
