"""Capacity formulas, the volume-adapted cutoff with its energy bound, and
divergence classification for constancy criteria on radial model manifolds.

Numerical quadrature cannot prove an integral diverges, so the classifier is
a fit-plus-monotone-partials heuristic with an explicit inconclusive outcome;
tail integrability of 1/lambda is verified before any classification is
accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .quadcore import (ContractViolation, DimensionConstants,
                       DivergedIntegral, MeasuredValue, PoisonedIntegrand,
                       QuadratureSpec, integrate_interval, integrate_radial)
from .ineqlab import InequalityReport, digest_of

_QSPEC = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-13, max_samples=150000)


@dataclass(frozen=True)
class ModelManifold:
    """Rotationally symmetric manifold described by its ball-volume function."""

    n: int
    volume: Callable[[np.ndarray], np.ndarray]
    area: Callable[[np.ndarray], np.ndarray]      # s(r) = V'(r)
    label: str = "model"

    def validate(self, r_max: float = 50.0) -> None:
        grid = np.geomspace(1e-4, r_max, 200)
        v = np.asarray(self.volume(grid), dtype=float)
        s = np.asarray(self.area(grid), dtype=float)
        if np.any(s <= 0):
            raise ContractViolation(f"{self.label}: boundary area must stay positive")
        if np.any(np.diff(v) <= 0):
            raise ContractViolation(f"{self.label}: volume must be increasing")
        if v[0] > 1e-6:
            raise ContractViolation(f"{self.label}: volume must vanish at the center")


def euclidean_manifold(n: int) -> ModelManifold:
    dims = DimensionConstants.for_dim(n)
    return ModelManifold(n=n,
                         volume=lambda r: dims.omega_n * np.asarray(r, dtype=float) ** n,
                         area=lambda r: dims.sigma_n * np.asarray(r, dtype=float) ** (n - 1),
                         label=f"euclidean-{n}")


def finite_volume_manifold(total: float = 1.0) -> ModelManifold:
    """V(r) = total * r^3/(1+r^3): finite total volume, positive area."""
    def vol(r):
        r = np.asarray(r, dtype=float)
        return total * r ** 3 / (1.0 + r ** 3)

    def area(r):
        r = np.asarray(r, dtype=float)
        return total * 3.0 * r ** 2 / (1.0 + r ** 3) ** 2

    return ModelManifold(n=3, volume=vol, area=area, label="finite-volume")


def quadratic_volume_manifold(c: float = 1.0) -> ModelManifold:
    return ModelManifold(n=2,
                         volume=lambda r: c * np.asarray(r, dtype=float) ** 2,
                         area=lambda r: 2.0 * c * np.asarray(r, dtype=float),
                         label="quadratic-volume")


MANIFOLD_CATALOG = {
    "euclidean-3": lambda: euclidean_manifold(3),
    "euclidean-4": lambda: euclidean_manifold(4),
    "finite-volume": finite_volume_manifold,
    "quadratic-volume": quadratic_volume_manifold,
}


# ---------------------------------------------------------------------------
# capacity of balls


def capacity_ball(n: int, r: float) -> float:
    """(n-2) sigma_n r^(n-2): the Dirichlet-energy capacity of a ball."""
    if n <= 2:
        raise ContractViolation("the capacity formula degenerates for n <= 2")
    if r <= 0:
        raise ContractViolation("radius must be positive")
    dims = DimensionConstants.for_dim(n)
    return (n - 2.0) * dims.sigma_n * r ** (n - 2.0)


def extremal_energy(n: int, r: float, spec: Optional[QuadratureSpec] = None) -> MeasuredValue:
    """Dirichlet energy of the explicit extremal profile min(1, (r/|x|)^(n-2)),
    by radial quadrature; must reproduce the capacity formula."""
    if n <= 2:
        raise ContractViolation("the capacity formula degenerates for n <= 2")
    spec = spec or _QSPEC
    dims = DimensionConstants.for_dim(n)
    c = (n - 2.0) ** 2 * r ** (2.0 * (n - 2.0))

    def profile(t):
        t = np.asarray(t, dtype=float)
        return c * t ** (-2.0 * (n - 1.0))

    return integrate_radial(profile, dims, r, math.inf, spec)


# ---------------------------------------------------------------------------
# growth data and tail verdicts


def tail_integrable(fn: Callable, lo: float,
                    spec: Optional[QuadratureSpec] = None) -> str:
    """'yes' / 'no' / 'inconclusive' verdict for convergence of the upper tail
    of integral fn(t) dt.

    Decade partials are computed by quadrature, but quadrature alone cannot
    separate log-level convergence from divergence in double precision (the
    tail of 1/(t log^{3/2} t) from t = 1e300 is still about 0.08), so the
    verdict combines decreasing partial increments with a two-level decay
    fit: the power of 1/t first, then the power of 1/log t on the critical
    line.
    """
    spec = spec or QuadratureSpec(rel_tol=1e-8, abs_tol=1e-12, max_samples=60000)
    tops = lo * np.array([10.0, 1e2, 1e3, 1e4, 1e5, 1e6])
    partials = []
    try:
        acc = 0.0
        prev = lo
        for t in tops:
            acc += integrate_interval(fn, prev, t, spec).value
            partials.append(acc)
            prev = t
    except (DivergedIntegral, PoisonedIntegrand):
        return "no"
    increments = np.diff(np.asarray(partials))
    grid = np.geomspace(max(lo, 1e4), max(lo, 1e4) * 1e4, 33)
    vals = np.asarray(fn(grid), dtype=float)
    if np.any(vals <= 0):
        # sign changes or vanishing: fall back on the partials alone
        return "yes" if increments[-1] <= 1e-6 * max(partials[-1], 1e-300) else "inconclusive"
    p_hat = -float(np.polyfit(np.log(grid), np.log(vals), 1)[0])
    if p_hat >= 1.2:
        return "yes" if np.all(np.diff(increments) <= 1e-12) else "inconclusive"
    if p_hat <= 0.98:
        return "no"
    # critical line 1/t: classify by the power of the log factor
    q_hat = -float(np.polyfit(np.log(np.log(grid)), np.log(vals * grid), 1)[0])
    if q_hat >= 1.25 and np.all(np.diff(increments) <= 1e-12):
        return "yes"
    if q_hat <= 0.9:
        return "no"
    return "inconclusive"


@dataclass(frozen=True)
class GrowthPair:
    """Increasing growth functions with a computed tail-integrability verdict
    for 1/lambda; the verdict is computed at construction, never assumed."""

    lam: Callable
    kappa: Callable
    lambda_tail_integrable: str
    label: str = "growth"

    @classmethod
    def build(cls, lam: Callable, kappa: Callable, label: str = "growth",
              check_from: float = 20.0) -> "GrowthPair":
        grid = np.geomspace(check_from, 1e6, 120)
        lv = np.asarray(lam(grid), dtype=float)
        kv = np.asarray(kappa(grid), dtype=float)
        if np.any(lv <= 0) or np.any(kv <= 0):
            raise ContractViolation(f"{label}: growth functions must be positive")
        if np.any(np.diff(lv) < 0) or np.any(np.diff(kv) < 0):
            raise ContractViolation(f"{label}: growth functions must be increasing")
        verdict = tail_integrable(lambda t: 1.0 / np.asarray(lam(t), dtype=float), check_from)
        return cls(lam=lam, kappa=kappa, lambda_tail_integrable=verdict, label=label)


def _log_k(t, k: int):
    """Iterated logarithm clamped above e so every level stays increasing."""
    t = np.maximum(np.asarray(t, dtype=float), math.e)
    for _ in range(k):
        t = np.log(np.maximum(t, math.e))
    return t


def growth_family_log(k: int = 1, eps: float = 1.0) -> Callable:
    """lambda(t) = t (log_k t)^(1+eps/2) prod_{j<k} log_j t."""

    def lam(t):
        t = np.maximum(np.asarray(t, dtype=float), math.e)
        out = t * _log_k(t, k) ** (1.0 + eps / 2.0)
        for j in range(1, k):
            out = out * _log_k(t, j)
        return out

    return lam


def kappa_family_quadratic(k: int = 1, eps: float = 1.0) -> Callable:
    """kappa(t) = t^2 (log_k t)^(-eps)."""

    def kap(t):
        t = np.maximum(np.asarray(t, dtype=float), math.e)
        return t * t * _log_k(t, k) ** (-eps)

    return kap


def kappa_family_log(k: int = 1, eps: float = 1.0) -> Callable:
    """kappa(t) = (log t) (log_{k+1} t)^(-eps)."""

    def kap(t):
        t = np.maximum(np.asarray(t, dtype=float), math.e ** 2)
        return np.log(t) * _log_k(t, k + 1) ** (-eps)

    return kap


GROWTH_CATALOG = {
    "finite-volume-quadratic": lambda: (finite_volume_manifold(),
                                        GrowthPair.build(growth_family_log(),
                                                         kappa_family_quadratic(),
                                                         label="t(log t)^1.5 / t^2/log t")),
    "quadratic-volume-log": lambda: (quadratic_volume_manifold(),
                                     GrowthPair.build(growth_family_log(),
                                                      kappa_family_log(),
                                                      label="t(log t)^1.5 / log t/loglog t")),
    "euclidean-control": lambda: (euclidean_manifold(3),
                                  GrowthPair.build(lambda t: np.asarray(t, dtype=float) ** 2,
                                                   lambda t: np.ones_like(np.asarray(t, dtype=float)),
                                                   label="t^2 control")),
}


# ---------------------------------------------------------------------------
# volume-adapted cutoff


@dataclass(frozen=True)
class CutoffFunction:
    """Lipschitz radial cutoff: 1 up to r, 0 beyond R, with the explicit
    energy bound 2c where 1/c is the defining integral."""

    r: float
    R: float
    epsilon: float
    c: float
    chi: Callable
    bound: float
    g: Callable                  # the mass function the cutoff was built from

    def to_profile(self, t):
        return self.chi(t)


def cutoff_build(g: Callable, r: float, R: float, epsilon: float,
                 grid_points: int = 2048) -> CutoffFunction:
    """chi(t) = c * integral_t^R (s - r)/(g(s) - g(r) + eps) ds on [r, R]."""
    if not (0 < r < R):
        raise ContractViolation("need 0 < r < R")
    if epsilon <= 0:
        raise ContractViolation("epsilon must be positive")
    grid = np.linspace(r, R, grid_points)
    gr = float(np.asarray(g(np.array([r])), dtype=float)[0])
    gv = np.asarray(g(grid), dtype=float)
    if np.any(np.diff(gv) < -1e-12 * (1.0 + np.abs(gv[:-1]).max())):
        raise ContractViolation("the mass function must be nondecreasing")
    den = gv - gr + epsilon
    if np.any(den <= 0):
        raise ContractViolation("degenerate mass function: denominator vanishes")
    integrand = (grid - r) / den
    # cumulative from the right on the dense grid (trapezoid)
    seg = 0.5 * (integrand[1:] + integrand[:-1]) * np.diff(grid)
    tail = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    total = float(tail[0])
    if total <= 0:
        raise ContractViolation("degenerate cutoff: defining integral vanishes")
    c = 1.0 / total

    def chi(t):
        t = np.asarray(t, dtype=float)
        inner = np.interp(t, grid, tail) * c
        return np.where(t <= r, 1.0, np.where(t >= R, 0.0, inner))

    return CutoffFunction(r=r, R=R, epsilon=epsilon, c=c, chi=chi,
                          bound=2.0 * c, g=g)


def check_cutoff_bound(f_profile: Callable, manifold: ModelManifold,
                       cut: CutoffFunction,
                       spec: Optional[QuadratureSpec] = None) -> InequalityReport:
    """Energy of the cutoff against its bound 2c.

    The mass function used to build the cutoff must match the manifold's
    integral of |f| (recomputed here); a mismatch is a contract violation.
    """
    spec = spec or _QSPEC

    def mass(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty(len(t))
        for i, ti in enumerate(t):
            out[i] = integrate_interval(
                lambda s: np.abs(np.asarray(f_profile(s), dtype=float))
                * np.asarray(manifold.area(s), dtype=float), 1e-12, ti, spec).value
        return out

    probe = np.linspace(cut.r, cut.R, 7)
    declared = np.asarray(cut.g(probe), dtype=float)
    recomputed = mass(probe)
    scale = 1.0 + np.abs(recomputed).max()
    if np.max(np.abs(declared - recomputed)) > 1e-6 * scale:
        raise ContractViolation("cutoff mass function does not match the manifold data")

    gr = float(np.asarray(cut.g(np.array([cut.r])), dtype=float)[0])

    def energy_integrand(t):
        t = np.asarray(t, dtype=float)
        gv = np.asarray(cut.g(t), dtype=float)
        slope = cut.c * (t - cut.r) / (gv - gr + cut.epsilon)
        return np.abs(np.asarray(f_profile(t), dtype=float)) * slope ** 2 \
            * np.asarray(manifold.area(t), dtype=float)

    lhs = integrate_interval(energy_integrand, cut.r, cut.R, spec)
    rhs = MeasuredValue(cut.bound, 0.0)
    return InequalityReport.from_sides(
        "cutoff-energy-bound", lhs, rhs,
        digest_of("cutoff", manifold.label, cut.r, cut.R, cut.epsilon))


# ---------------------------------------------------------------------------
# divergence classification


def mass_function(f_profile: Callable, manifold: ModelManifold, t_max: float,
                  n_grid: int = 16385) -> Callable:
    """Cumulative mass of |f| against the area element, as a fast callable.

    Dense cumulative trapezoid; accurate enough for the cutoff construction
    and the recomputation check in check_cutoff_bound."""
    grid = np.linspace(0.0, t_max, n_grid)
    vals = np.abs(np.asarray(f_profile(grid), dtype=float)) \
        * np.asarray(manifold.area(grid), dtype=float)
    vals[0] = 0.0 if not np.isfinite(vals[0]) else vals[0]
    seg = 0.5 * (vals[1:] + vals[:-1]) * np.diff(grid)
    cum = np.concatenate([[0.0], np.cumsum(seg)])

    def g(t):
        return np.interp(np.asarray(t, dtype=float), grid, cum)

    return g


def v_lambda(manifold: ModelManifold, lam: Callable, psi_profile: Callable,
             r: float, spec: Optional[QuadratureSpec] = None) -> MeasuredValue:
    """integral over the r-ball of lambda(|psi|), via the radial area element."""
    spec = spec or _QSPEC

    def integrand(t):
        t = np.asarray(t, dtype=float)
        return np.asarray(lam(np.abs(np.asarray(psi_profile(t), dtype=float))), dtype=float) \
            * np.asarray(manifold.area(t), dtype=float)

    return integrate_interval(integrand, 1e-12, r, spec)


@dataclass(frozen=True)
class DivergenceVerdict:
    integral_name: str
    partial_values: tuple
    classification: str          # divergent | convergent | inconclusive
    tail_exponent_fit: float

    def to_dict(self) -> dict:
        return {"integral_name": self.integral_name,
                "partials": [list(p) for p in self.partial_values],
                "classification": self.classification,
                "tail_exponent_fit": self.tail_exponent_fit}


SLOPE_MARGIN = 0.15


def criterion_divergence(manifold: ModelManifold, growth: GrowthPair,
                         r0: float, T_grid: Sequence[float],
                         psi_profile: Optional[Callable] = None,
                         spec: Optional[QuadratureSpec] = None,
                         tail_condition: str = "at-infinity") -> DivergenceVerdict:
    """Classify divergence of the criterion integral.

    Default integrand r / (lambda(kappa(r)) V_r); with psi_profile given,
    r / v_lambda(r) instead. Divergent needs monotone unbounded partials and
    a log-log tail exponent >= -1 - margin; convergent needs a steeper tail
    with vanishing increments.

    tail_condition gates acceptance on the verified integrability of
    1/lambda at infinity; pass "none" when |psi| stays away from the
    relevant limit and no tail hypothesis is needed.
    """
    spec = spec or QuadratureSpec(rel_tol=1e-8, abs_tol=1e-12, max_samples=120000)
    T_grid = sorted(float(t) for t in T_grid)
    if tail_condition not in ("at-infinity", "none"):
        raise ContractViolation(f"unknown tail_condition {tail_condition!r}")
    if tail_condition == "at-infinity" and growth.lambda_tail_integrable != "yes":
        return DivergenceVerdict(integral_name="criterion",
                                 partial_values=(), classification="inconclusive",
                                 tail_exponent_fit=math.nan)

    if psi_profile is None:
        def integrand(t):
            t = np.asarray(t, dtype=float)
            return t / (np.asarray(growth.lam(growth.kappa(t)), dtype=float)
                        * np.asarray(manifold.volume(t), dtype=float))
        name = "radius-over-lambda-kappa-volume"
    else:
        vcache = {}

        def integrand(t):
            t = np.atleast_1d(np.asarray(t, dtype=float))
            out = np.empty(len(t))
            for i, ti in enumerate(t):
                key = round(float(ti), 12)
                if key not in vcache:
                    vcache[key] = v_lambda(manifold, growth.lam, psi_profile, ti).value
                out[i] = ti / vcache[key]
            return out
        name = "radius-over-v-lambda"

    partials = []
    acc = 0.0
    prev = r0
    for t in T_grid:
        acc += integrate_interval(integrand, prev, t, spec).value
        partials.append((t, acc))
        prev = t
    fit_lo = T_grid[-1] / 100.0
    fit_grid = np.geomspace(max(fit_lo, r0 * 2), T_grid[-1], 24)
    fvals = np.asarray(integrand(fit_grid), dtype=float)
    slope = float(np.polyfit(np.log(fit_grid), np.log(np.maximum(fvals, 1e-300)), 1)[0])

    values = np.asarray([p[1] for p in partials])
    increments = np.diff(np.concatenate([[0.0], values]))
    monotone = bool(np.all(increments >= -1e-14))
    if monotone and slope >= -1.0 - SLOPE_MARGIN and increments[-1] > 0.05 * increments[0]:
        cls = "divergent"
    elif slope < -1.0 - SLOPE_MARGIN and increments[-1] <= 1e-2 * max(values[-1], 1e-300):
        cls = "convergent"
    else:
        cls = "inconclusive"
    return DivergenceVerdict(integral_name=name, partial_values=tuple(partials),
                             classification=cls, tail_exponent_fit=slope)


@dataclass(frozen=True)
class NadirashviliReport:
    applicable: bool
    weighted_integral: Optional[MeasuredValue]
    chain_holds: bool
    grid: tuple
    ratios: tuple                # v_lambda(r) / (1 + r^2)

    def to_dict(self) -> dict:
        return {"applicable": self.applicable,
                "weighted_integral": None if self.weighted_integral is None
                else self.weighted_integral.value,
                "chain_holds": self.chain_holds,
                "grid": list(self.grid), "ratios": list(self.ratios)}


def nadirashvili_reduction(manifold: ModelManifold, lam: Callable,
                           psi_profile: Callable, r_grid: Sequence[float],
                           spec: Optional[QuadratureSpec] = None) -> NadirashviliReport:
    """Finiteness of the (1+rho^2)-weighted mass implies the growth bound
    v_lambda(r) <= (1 + r^2) * that mass, which drives the divergence route.

    When the weighted integral diverges the reduction is inapplicable and is
    reported as such.
    """
    spec = spec or QuadratureSpec(rel_tol=1e-8, abs_tol=1e-12, max_samples=100000)

    def weighted(t):
        t = np.asarray(t, dtype=float)
        return np.asarray(lam(np.abs(np.asarray(psi_profile(t), dtype=float))), dtype=float) \
            * np.asarray(manifold.area(t), dtype=float) / (1.0 + t * t)

    try:
        W = integrate_interval(weighted, 1e-12, math.inf, spec)
    except (DivergedIntegral, PoisonedIntegrand):
        # overflow while chasing the improper endpoint reads as divergence
        return NadirashviliReport(applicable=False, weighted_integral=None,
                                  chain_holds=False, grid=tuple(r_grid), ratios=())
    ratios = []
    ok = True
    for r in r_grid:
        v = v_lambda(manifold, lam, psi_profile, float(r), spec)
        ratio = v.value / (1.0 + r * r)
        ratios.append(ratio)
        if ratio > W.value + 3.0 * (W.err + v.err) + 1e-12:
            ok = False
    return NadirashviliReport(applicable=True, weighted_integral=W,
                              chain_holds=ok, grid=tuple(float(r) for r in r_grid),
                              ratios=tuple(ratios))
