"""Two-sided evaluation of the explicit integral inequalities, with verdicts.

Every check integrates both sides on the support of the test function phi,
propagates quadrature/Monte-Carlo error, and renders holds/violated with a
3x combined-error threshold so that "violated" is a falsifiable statement.
Distributional Laplacian atoms declared by a field are added analytically.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .quadcore import (BallSpec, ContractViolation, MeasuredValue,
                       QuadratureSpec, derive_rng, integrate_ball,
                       integrate_interval, sample_in_ball)
from .funcspace import EtaFunction, ScalarField, subharmonic_certificate

VERDICT_SIGMAS = 3.0


def _seeded(spec: QuadratureSpec, *salt) -> QuadratureSpec:
    return spec.with_seed(int(derive_rng(spec.seed, *salt).integers(2 ** 62)))


def digest_of(*parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(repr(p).encode())
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class InequalityReport:
    """lhs <= rhs with error bars; holds unless lhs clears rhs by 3x the
    combined error estimate."""

    name: str
    lhs: MeasuredValue
    rhs: MeasuredValue
    verdict: str
    inputs_digest: str

    @classmethod
    def from_sides(cls, name: str, lhs: MeasuredValue, rhs: MeasuredValue,
                   inputs_digest: str, inconclusive: bool = False) -> "InequalityReport":
        if inconclusive:
            verdict = "inconclusive"
        else:
            slack = VERDICT_SIGMAS * (lhs.err + rhs.err)
            verdict = "holds" if lhs.value <= rhs.value + slack else "violated"
        return cls(name=name, lhs=lhs, rhs=rhs, verdict=verdict,
                   inputs_digest=inputs_digest)

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs.value, "lhs_err": self.lhs.err,
                "rhs": self.rhs.value, "rhs_err": self.rhs.err,
                "verdict": self.verdict, "inputs_digest": self.inputs_digest}


def _common_center(*centers) -> Optional[tuple]:
    present = [np.asarray(c, dtype=float) for c in centers if c is not None]
    if len(present) != len(centers):
        return None
    for c in present[1:]:
        if not np.allclose(c, present[0], atol=1e-14):
            return None
    return tuple(present[0])


def _expr_field(dim: int, fn, support: BallSpec, centers: Sequence,
                name: str) -> ScalarField:
    """Wrap a pointwise expression as a field; radial when all parts align."""
    center = _common_center(*centers)
    radial = None
    if center is not None and np.allclose(support.center_arr, center, atol=1e-14):
        radial = center
    return ScalarField(dim=dim, evaluator=fn, radial_about=radial,
                       support=support, name=name)


def _origin(dim: int) -> tuple:
    return (0.0,) * dim


def _integrate(field: ScalarField, support: BallSpec, spec: QuadratureSpec,
               *salt) -> MeasuredValue:
    return integrate_ball(field, support, _seeded(spec, *salt))


def _grad_sq(phi: ScalarField):
    def fn(pts):
        g = phi.grad(pts)
        return np.sum(g * g, axis=1)
    return fn


def _atom_sum(psi: ScalarField, phi: ScalarField, weight_at_atom) -> float:
    """Analytic contribution of distributional Laplacian atoms of psi paired
    against a continuous weight; weight_at_atom(point, mass) -> value."""
    total = 0.0
    for point, mass in psi.point_masses:
        total += weight_at_atom(np.asarray(point, dtype=float), float(mass))
    return total


# ---------------------------------------------------------------------------


def check_hardy(phi: ScalarField, n: int, spec: QuadratureSpec) -> InequalityReport:
    """((n-2)/2)^2 * integral of phi^2 |x|^-2 against integral of |grad phi|^2."""
    if n <= 2:
        raise ContractViolation("the |x|^-2 inequality needs n > 2")
    if phi.dim != n:
        raise ContractViolation("phi dimension mismatch")
    supp = phi.effective_support()
    c = (n - 2.0) ** 2 / 4.0

    def lhs_fn(pts):
        v = np.asarray(phi(pts), dtype=float)
        r2 = np.sum(pts * pts, axis=1)
        with np.errstate(divide="ignore"):
            return c * v * v / r2

    lhs_field = _expr_field(n, lhs_fn, supp, [phi.radial_about, _origin(n)], "hardy-lhs")
    rhs_field = _expr_field(n, _grad_sq(phi), supp, [phi.radial_about], "hardy-rhs")
    lhs = _integrate(lhs_field, supp, spec, "hardy", "lhs", phi.name)
    rhs = _integrate(rhs_field, supp, spec, "hardy", "rhs", phi.name)
    return InequalityReport.from_sides("hardy", lhs, rhs, digest_of("hardy", n, phi.name, spec))


@dataclass(frozen=True)
class RatioReport:
    """Numerator/denominator report for checks whose constant is unspecified."""

    name: str
    numerator: MeasuredValue
    denominator: MeasuredValue
    ratio: float
    ratio_err: float
    inputs_digest: str

    def to_dict(self) -> dict:
        return {"name": self.name, "numerator": self.numerator.value,
                "denominator": self.denominator.value, "ratio": self.ratio,
                "ratio_err": self.ratio_err, "inputs_digest": self.inputs_digest}


def check_sobolev(phi: ScalarField, n: int, spec: QuadratureSpec) -> RatioReport:
    """[integral |phi|^(2n/(n-2))]^((n-2)/n) over integral |grad phi|^2.

    The optimal constant is not pinned anywhere, so only the ratio is
    reported; callers assert boundedness across families.
    """
    if n <= 2:
        raise ContractViolation("the critical-exponent ratio needs n > 2")
    supp = phi.effective_support()
    p = 2.0 * n / (n - 2.0)

    def num_fn(pts):
        return np.abs(np.asarray(phi(pts), dtype=float)) ** p

    num_raw = _integrate(_expr_field(n, num_fn, supp, [phi.radial_about], "sobolev-num"),
                         supp, spec, "sobolev", "num", phi.name)
    den = _integrate(_expr_field(n, _grad_sq(phi), supp, [phi.radial_about], "sobolev-den"),
                     supp, spec, "sobolev", "den", phi.name)
    if den.value <= max(10 * den.err, 1e-300):
        raise ContractViolation("gradient integral vanishes: phi has no variation")
    ex = (n - 2.0) / n
    num_val = num_raw.value ** ex
    num_err = ex * num_raw.value ** (ex - 1.0) * num_raw.err if num_raw.value > 0 else 0.0
    num = MeasuredValue(num_val, num_err)
    ratio = num.value / den.value
    ratio_err = (num.err + ratio * den.err) / den.value
    return RatioReport("sobolev-ratio", num, den, ratio, ratio_err,
                       digest_of("sobolev", n, phi.name, spec))


def _validate_eta_args(eta: EtaFunction, psi: ScalarField, supp: BallSpec,
                       sign: float, spec: QuadratureSpec):
    """Probe eta's domain and positivity of eta' on the actual arguments."""
    rng = derive_rng(spec.seed, "eta_probe", eta.label)
    pts = sample_in_ball(supp, 512, rng)
    pts = pts[~psi.is_singular_at(pts)]
    args = sign * np.asarray(psi(pts), dtype=float)
    args = args[np.isfinite(args)]
    eta.check_args(args)
    if np.any(np.asarray(eta.eta_prime(args)) <= 0):
        raise ContractViolation(f"eta_prime not positive on sampled arguments ({eta.label})")


def check_prop14(psi: ScalarField, eta: EtaFunction, phi: ScalarField,
                 variant: str, spec: QuadratureSpec) -> InequalityReport:
    """The two reweighted integration-by-parts inequalities for C^2 psi.

    minus: integral phi^2 [2 lap psi / eta(-psi) + eta'(-psi)|grad psi|^2 / eta(-psi)^2]
           <= 4 integral |grad phi|^2 / eta'(-psi)
    plus:  integral phi^2 [2 eta(psi) lap psi + eta'(psi) |grad psi|^2]
           <= 4 integral eta(psi)^2/eta'(psi) |grad phi|^2
    """
    if variant not in ("minus", "plus"):
        raise ContractViolation(f"unknown variant {variant!r}")
    if psi.dim != phi.dim:
        raise ContractViolation("psi and phi dimensions differ")
    n = phi.dim
    supp = phi.effective_support()
    sign = -1.0 if variant == "minus" else 1.0
    _validate_eta_args(eta, psi, supp, sign, spec)
    if variant == "plus" and psi.point_masses:
        raise ContractViolation("plus variant requires a smooth (atom-free) psi")

    def lhs_fn(pts):
        v = np.asarray(phi(pts), dtype=float) ** 2
        s = sign * np.asarray(psi(pts), dtype=float)
        gpsi = psi.grad(pts)
        g2 = np.sum(gpsi * gpsi, axis=1)
        lap = np.asarray(psi.lap(pts), dtype=float)
        if variant == "minus":
            return v * (2.0 * lap / eta.eta(s) + eta.eta_prime(s) * g2 / eta.eta(s) ** 2)
        return v * (2.0 * eta.eta(s) * lap + eta.eta_prime(s) * g2)

    def rhs_fn(pts):
        g = phi.grad(pts)
        g2 = np.sum(g * g, axis=1)
        s = sign * np.asarray(psi(pts), dtype=float)
        if variant == "minus":
            return 4.0 * g2 / eta.eta_prime(s)
        return 4.0 * eta.eta(s) ** 2 / eta.eta_prime(s) * g2

    centers = [phi.radial_about, psi.radial_about]
    lhs_field = _expr_field(n, lhs_fn, supp, centers, "prop14-lhs")
    rhs_field = _expr_field(n, rhs_fn, supp, centers, "prop14-rhs")
    lhs = _integrate(lhs_field, supp, spec, "prop14", variant, "lhs", phi.name, psi.name)
    rhs = _integrate(rhs_field, supp, spec, "prop14", variant, "rhs", phi.name, psi.name)
    if variant == "minus" and psi.point_masses:
        if math.isfinite(eta.eta_infinity):
            atom = _atom_sum(psi, phi, lambda p, m: 2.0 * m * phi.at(p) ** 2 / eta.eta_infinity)
            lhs = MeasuredValue(lhs.value + atom, lhs.err)
        # eta -> infinity at the atom kills the pairing; nothing to add
    name = f"prop14-{variant}[{eta.label}]"
    return InequalityReport.from_sides(
        name, lhs, rhs, digest_of(name, phi.name, psi.name, spec))


def check_poincare_subharmonic(psi: ScalarField, eta: EtaFunction, phi: ScalarField,
                               variant: str, spec: QuadratureSpec,
                               cert_samples: int = 1024) -> InequalityReport:
    """The subharmonic specialization: the Laplacian term is dropped.

    A sampled subharmonicity certificate on supp phi gates the verdict; a
    failed certificate renders the report inconclusive rather than violated.
    """
    if variant not in ("minus", "plus"):
        raise ContractViolation(f"unknown variant {variant!r}")
    n = phi.dim
    supp = phi.effective_support()
    cert = subharmonic_certificate(psi, supp, cert_samples,
                                   seed=int(derive_rng(spec.seed, "poincare_cert").integers(2 ** 62)))
    sign = -1.0 if variant == "minus" else 1.0
    _validate_eta_args(eta, psi, supp, sign, spec)

    def lhs_fn(pts):
        v = np.asarray(phi(pts), dtype=float) ** 2
        s = sign * np.asarray(psi(pts), dtype=float)
        gpsi = psi.grad(pts)
        g2 = np.sum(gpsi * gpsi, axis=1)
        if variant == "minus":
            return v * eta.eta_prime(s) * g2 / eta.eta(s) ** 2
        return v * eta.eta_prime(s) * g2

    def rhs_fn(pts):
        g = phi.grad(pts)
        g2 = np.sum(g * g, axis=1)
        s = sign * np.asarray(psi(pts), dtype=float)
        if variant == "minus":
            return 4.0 * g2 / eta.eta_prime(s)
        return 4.0 * eta.eta(s) ** 2 / eta.eta_prime(s) * g2

    centers = [phi.radial_about, psi.radial_about]
    lhs_field = _expr_field(n, lhs_fn, supp, centers, "poincare-lhs")
    rhs_field = _expr_field(n, rhs_fn, supp, centers, "poincare-rhs")
    lhs = _integrate(lhs_field, supp, spec, "poincare", variant, "lhs", phi.name, psi.name)
    rhs = _integrate(rhs_field, supp, spec, "poincare", variant, "rhs", phi.name, psi.name)
    name = f"poincare-{variant}[{eta.label}]"
    return InequalityReport.from_sides(
        name, lhs, rhs, digest_of(name, phi.name, psi.name, spec),
        inconclusive=not cert.holds)


def kappa_eta(eta: EtaFunction, t: float, gamma: Optional[float] = None,
              spec: Optional[QuadratureSpec] = None) -> MeasuredValue:
    """kappa(t) = integral from gamma to t of sqrt(eta')/eta."""
    g = eta.gamma if gamma is None else gamma
    if g is None or not (g > 0):
        raise ContractViolation("a positive lower cut gamma is required")
    if t < g:
        raise ContractViolation("kappa is defined for t >= gamma")
    if t == g:
        return MeasuredValue(0.0, 0.0)
    spec = spec or QuadratureSpec(rel_tol=1e-11, abs_tol=1e-14, max_samples=65536)

    def fn(s):
        s = np.asarray(s, dtype=float)
        return np.sqrt(np.asarray(eta.eta_prime(s))) / np.asarray(eta.eta(s))

    return integrate_interval(fn, g, t, spec)


def kappa_bound_check(eta: EtaFunction, t_grid: Sequence[float],
                      gamma: float, spec: Optional[QuadratureSpec] = None) -> list:
    """kappa(t)^2 against the Schwarz bound (t-gamma)(1/eta(gamma) - 1/eta(t)).

    Also enforces that eta' is nonincreasing over the grid and that the
    Schwarz bound never exceeds its coarse form t/eta(gamma).
    """
    t_grid = sorted(float(t) for t in t_grid)
    primes = np.asarray(eta.eta_prime(np.asarray(t_grid)))
    if np.any(np.diff(primes) > 1e-12 * (1.0 + np.abs(primes[:-1]))):
        raise ContractViolation("eta_prime must be nonincreasing for the kappa bound")
    reports = []
    for t in t_grid:
        k = kappa_eta(eta, t, gamma=gamma, spec=spec)
        lhs = MeasuredValue(k.value ** 2, 2.0 * abs(k.value) * k.err)
        bound = (t - gamma) * (1.0 / float(eta.eta(gamma)) - 1.0 / float(eta.eta(t)))
        coarse = t / float(eta.eta(gamma))
        if bound > coarse * (1.0 + 1e-12):
            raise ContractViolation("Schwarz bound exceeded its coarse majorant")
        reports.append(InequalityReport.from_sides(
            f"kappa-bound[{eta.label}]@t={t:g}", lhs, MeasuredValue(bound, 0.0),
            digest_of("kappa", eta.label, gamma, t)))
    return reports


def check_laplace_3pi(psi: ScalarField, phi: ScalarField,
                      spec: QuadratureSpec, cert_samples: int = 1024) -> InequalityReport:
    """integral phi^2 lap psi <= 3 pi integral (1 + psi^2) |grad phi|^2
    for negative subharmonic psi; Laplacian atoms are added analytically."""
    n = phi.dim
    supp = phi.effective_support()
    cert = subharmonic_certificate(psi, supp, cert_samples,
                                   seed=int(derive_rng(spec.seed, "l3pi_cert").integers(2 ** 62)))

    def lhs_fn(pts):
        v = np.asarray(phi(pts), dtype=float) ** 2
        return v * np.asarray(psi.lap(pts), dtype=float)

    def rhs_fn(pts):
        g = phi.grad(pts)
        g2 = np.sum(g * g, axis=1)
        p = np.asarray(psi(pts), dtype=float)
        return 3.0 * math.pi * (1.0 + p * p) * g2

    centers = [phi.radial_about, psi.radial_about]
    lhs = _integrate(_expr_field(n, lhs_fn, supp, centers, "l3pi-lhs"),
                     supp, spec, "l3pi", "lhs", phi.name, psi.name)
    rhs = _integrate(_expr_field(n, rhs_fn, supp, centers, "l3pi-rhs"),
                     supp, spec, "l3pi", "rhs", phi.name, psi.name)
    atom = _atom_sum(psi, phi, lambda p, m: m * phi.at(p) ** 2)
    lhs = MeasuredValue(lhs.value + atom, lhs.err)
    return InequalityReport.from_sides(
        "laplace-3pi", lhs, rhs, digest_of("l3pi", phi.name, psi.name, spec),
        inconclusive=not cert.holds)


def check_caccioppoli(psi: ScalarField, phi: ScalarField,
                      spec: QuadratureSpec) -> InequalityReport:
    """integral phi^2 |grad psi|^2 <= 4 integral psi^2 |grad phi|^2
    - 2 integral phi^2 psi lap psi, for positive C^2 psi."""
    n = phi.dim
    supp = phi.effective_support()
    if psi.point_masses:
        raise ContractViolation("the energy inequality needs a smooth psi")
    rng = derive_rng(spec.seed, "cacc_pos")
    probe = sample_in_ball(supp, 512, rng)
    vals = np.asarray(psi(probe), dtype=float)
    if np.any(vals[np.isfinite(vals)] <= 0):
        raise ContractViolation("psi must be positive on supp phi")

    def lhs_fn(pts):
        v = np.asarray(phi(pts), dtype=float) ** 2
        g = psi.grad(pts)
        return v * np.sum(g * g, axis=1)

    def rhs1_fn(pts):
        g = phi.grad(pts)
        return np.asarray(psi(pts), dtype=float) ** 2 * np.sum(g * g, axis=1)

    def rhs2_fn(pts):
        v = np.asarray(phi(pts), dtype=float) ** 2
        return v * np.asarray(psi(pts), dtype=float) * np.asarray(psi.lap(pts), dtype=float)

    centers = [phi.radial_about, psi.radial_about]
    lhs = _integrate(_expr_field(n, lhs_fn, supp, centers, "cacc-lhs"),
                     supp, spec, "cacc", "lhs", phi.name, psi.name)
    a = _integrate(_expr_field(n, rhs1_fn, supp, centers, "cacc-rhs1"),
                   supp, spec, "cacc", "rhs1", phi.name, psi.name)
    b = _integrate(_expr_field(n, rhs2_fn, supp, centers, "cacc-rhs2"),
                   supp, spec, "cacc", "rhs2", phi.name, psi.name)
    rhs = MeasuredValue(4.0 * a.value - 2.0 * b.value, 4.0 * a.err + 2.0 * b.err)
    return InequalityReport.from_sides(
        "caccioppoli", lhs, rhs, digest_of("cacc", phi.name, psi.name, spec))


# ---------------------------------------------------------------------------
# weighted annulus estimates


@dataclass(frozen=True)
class CarlemanSpec:
    """Admissible weight exponent: tau >= n and tau - n/2 off the integers."""

    tau: float
    n: int
    dist_to_halfint: float = 0.0

    def __post_init__(self):
        d = abs(self.tau - self.n / 2.0 - round(self.tau - self.n / 2.0))
        object.__setattr__(self, "dist_to_halfint", d)
        if self.tau < self.n:
            raise ContractViolation(f"tau = {self.tau} must be >= n = {self.n}")
        if d <= 0:
            raise ContractViolation("tau - n/2 must stay away from the integers")


@dataclass(frozen=True)
class CarlemanReport:
    tau: float
    n: int
    which: str
    ratio: float
    norm_weighted_phi: float       # || |x|^-tau phi ||_2
    norm_weighted_lap: float       # || |x|^(2-tau) lap phi ||_2
    norm_weighted_grad: float      # || |x|^(1-tau) grad phi ||_2
    chain_bound_sq: float
    slack: float
    slack_err: float
    inputs_digest: str

    def to_dict(self) -> dict:
        return {"tau": self.tau, "n": self.n, "which": self.which, "ratio": self.ratio,
                "A": self.norm_weighted_phi, "B": self.norm_weighted_lap,
                "G": self.norm_weighted_grad, "chain_bound_sq": self.chain_bound_sq,
                "slack": self.slack, "slack_err": self.slack_err,
                "inputs_digest": self.inputs_digest}


def _origin_clearance(phi: ScalarField) -> float:
    supp = phi.effective_support()
    dist = float(np.linalg.norm(supp.center_arr))
    if phi.support_inner > 0 and dist < 1e-14:
        return phi.support_inner
    return dist - supp.radius


def _norm_sq(phi: ScalarField, weight_exp: float, kind: str,
             spec: QuadratureSpec, salt) -> MeasuredValue:
    n = phi.dim
    supp = phi.effective_support()

    def fn(pts):
        r = np.linalg.norm(pts, axis=1)
        w = r ** weight_exp
        if kind == "value":
            base = np.asarray(phi(pts), dtype=float) ** 2
        elif kind == "grad":
            g = phi.grad(pts)
            base = np.sum(g * g, axis=1)
        else:
            base = np.asarray(phi.lap(pts), dtype=float) ** 2
        return w * w * base

    field = _expr_field(n, fn, supp, [phi.radial_about, _origin(n)], f"carleman-{kind}")
    return _integrate(field, supp, spec, "carleman", kind, salt, phi.name)


def carleman_ratio(phi: ScalarField, spec_c: CarlemanSpec, which: str,
                   spec: QuadratureSpec) -> CarlemanReport:
    """Ratios of the |x|^-tau weighted norms on an annulus-supported phi.

    weight-only:    || |x|^-tau phi || / (tau^-1 || |x|^(2-tau) lap phi ||)
    gradient-weight:|| |x|^(1-tau) grad phi || / || |x|^(2-tau) lap phi ||
    gradient-chain: re-derives the gradient bound from the weight-only norm
    through the energy-inequality substitution and reports the slack
    4(tau-1)^2 A^2 + 2AB - G^2, which is nonnegative up to quadrature error.
    """
    if which not in ("weight-only", "gradient-weight", "gradient-chain"):
        raise ContractViolation(f"unknown ratio kind {which!r}")
    if phi.dim != spec_c.n:
        raise ContractViolation("phi dimension does not match the weight spec")
    if _origin_clearance(phi) <= 0:
        raise ContractViolation("phi support must exclude the origin")
    tau = spec_c.tau
    a2 = _norm_sq(phi, -tau, "value", spec, tau)
    b2 = _norm_sq(phi, 2.0 - tau, "lap", spec, tau)
    g2 = _norm_sq(phi, 1.0 - tau, "grad", spec, tau)
    A, B, G = (math.sqrt(max(v.value, 0.0)) for v in (a2, b2, g2))
    chain = 4.0 * (tau - 1.0) ** 2 * a2.value + 2.0 * A * B
    slack = chain - g2.value
    # error of the 2AB cross term: first order in the norm errors
    errA = a2.err / (2.0 * A) if A > 0 else 0.0
    errB = b2.err / (2.0 * B) if B > 0 else 0.0
    slack_err = 4.0 * (tau - 1.0) ** 2 * a2.err + 2.0 * (A * errB + B * errA) + g2.err
    if which == "weight-only":
        ratio = tau * A / B if B > 0 else math.inf
    elif which == "gradient-weight":
        ratio = G / B if B > 0 else math.inf
    else:
        ratio = g2.value / chain if chain > 0 else math.inf
    return CarlemanReport(tau=tau, n=spec_c.n, which=which, ratio=ratio,
                          norm_weighted_phi=A, norm_weighted_lap=B,
                          norm_weighted_grad=G, chain_bound_sq=chain,
                          slack=slack, slack_err=slack_err,
                          inputs_digest=digest_of("carleman", which, tau, phi.name, spec))
