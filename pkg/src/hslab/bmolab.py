"""Mean oscillation, sampled BMO lower bounds, doubling and reverse-Holder
checks for negative subharmonic fields, and the one-complex-variable Green /
potential decomposition machinery.

Sampled suprema are always reported as lower bounds for BMO norms; an upper
bound over all balls is not computable, so consistency with the analytic
upper bounds is checked instead of asserted equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .quadcore import (BallSpec, ContractViolation, DimensionConstants,
                       MeasuredValue, QuadratureSpec, derive_rng,
                       integrate_ball, integrate_interval, mc_mean,
                       sample_balls, sample_in_ball)
from .funcspace import ScalarField, field_neg_power, subharmonic_certificate
from .ineqlab import InequalityReport, _seeded, digest_of


class InconclusiveResult(Exception):
    """A gating certificate failed; the check has no verdict."""


@dataclass(frozen=True)
class MeanOscillationResult:
    ball: BallSpec
    mean: MeasuredValue
    oscillation: MeasuredValue

    def to_dict(self) -> dict:
        return {"center": list(self.ball.center), "radius": self.ball.radius,
                "mean": self.mean.value, "mean_err": self.mean.err,
                "oscillation": self.oscillation.value,
                "oscillation_err": self.oscillation.err}


def _mc_mean_oscillation(vals: np.ndarray):
    """Two-pass estimate on one sample stream: the mean first, then the
    absolute deviations about that estimated mean."""
    mean, mean_err = mc_mean(vals)
    dev = np.abs(vals[np.isfinite(vals)] - mean)
    osc = float(dev.mean())
    osc_err = float(dev.std(ddof=1) / math.sqrt(len(dev))) + mean_err
    return MeasuredValue(mean, mean_err), MeasuredValue(osc, osc_err)


def mean_oscillation(f: ScalarField, ball: BallSpec,
                     spec: QuadratureSpec) -> MeanOscillationResult:
    """Ball mean and mean absolute oscillation of f.

    Radial fields centered at the ball center go through the adaptive radial
    rule; everything else uses one seeded sample stream for both statistics.
    """
    if f.dim != ball.dim:
        raise ContractViolation("field and ball dimensions differ")
    dims = DimensionConstants.for_dim(ball.dim)
    if f.radial_about is not None and np.allclose(f.radial_about, ball.center_arr, atol=1e-14):
        vol = ball.volume()
        e1 = np.zeros(ball.dim); e1[0] = 1.0

        def profile(t):
            return f(ball.center_arr[None, :] + np.outer(np.atleast_1d(t), e1))

        total = integrate_ball(f, ball, spec)
        mean = total.scale(1.0 / vol)

        def dev_profile(t):
            return np.abs(np.asarray(profile(t), dtype=float) - mean.value)

        from .quadcore import integrate_radial
        osc_raw = integrate_radial(dev_profile, dims, 0.0, ball.radius, spec)
        osc = MeasuredValue(osc_raw.value / vol, osc_raw.err / vol + mean.err)
        return MeanOscillationResult(ball=ball, mean=mean, oscillation=osc)

    rng = derive_rng(spec.seed, "mean_osc")
    pts = sample_in_ball(ball, spec.max_samples, rng)
    vals = np.asarray(f(pts), dtype=float)
    mean, osc = _mc_mean_oscillation(vals)
    return MeanOscillationResult(ball=ball, mean=mean, oscillation=osc)


@dataclass(frozen=True)
class BmoEstimate:
    """Certified lower bound: the max sampled oscillation, never an upper bound."""

    lower_bound: float
    witness: Optional[BallSpec]
    balls_tried: int
    seed: int
    curve: tuple = ()          # (balls_tried, running_max) checkpoints

    def to_dict(self) -> dict:
        return {"lower_bound": self.lower_bound,
                "witness_center": None if self.witness is None else list(self.witness.center),
                "witness_radius": None if self.witness is None else self.witness.radius,
                "balls_tried": self.balls_tried, "seed": self.seed,
                "curve": [list(c) for c in self.curve]}


def bmo_lower_bound(f: ScalarField, domain: BallSpec, ball_count: int, seed: int,
                    radius_range: Optional[tuple] = None,
                    samples_per_ball: int = 4096,
                    exclusions: Sequence = (),
                    exclusion_clearance: float = 0.0) -> BmoEstimate:
    """Max mean oscillation over seeded balls inside the domain.

    exclusions lists singular points; balls whose center comes within
    radius + exclusion_clearance of one are discarded before measuring.
    """
    if radius_range is None:
        radius_range = (domain.radius / 20.0, domain.radius / 2.0)
    balls = sample_balls(domain, ball_count, seed, radius_range)
    if exclusions:
        kept = []
        for b in balls:
            ok = all(np.linalg.norm(b.center_arr - np.asarray(p, dtype=float))
                     > b.radius + exclusion_clearance for p in exclusions)
            if ok:
                kept.append(b)
        balls = kept
    best = -math.inf
    witness = None
    curve = []
    next_checkpoint = 100
    for i, b in enumerate(balls):
        rng = derive_rng(seed, "bmo_ball", i)
        pts = sample_in_ball(b, samples_per_ball, rng)
        vals = np.asarray(f(pts), dtype=float)
        finite = vals[np.isfinite(vals)]
        if len(finite) < samples_per_ball // 2:
            continue
        m = finite.mean()
        osc = float(np.abs(finite - m).mean())
        if osc > best:
            best, witness = osc, b
        if i + 1 >= next_checkpoint:
            curve.append((i + 1, best))
            next_checkpoint *= 3
    curve.append((len(balls), best))
    return BmoEstimate(lower_bound=best, witness=witness, balls_tried=len(balls),
                       seed=seed, curve=tuple(curve))


def check_doubling(psi: ScalarField, gamma: float, ball: BallSpec,
                   spec: QuadratureSpec, cert_samples: int = 512) -> InequalityReport:
    """Mass of |psi|^gamma on the doubled ball against 2^n times the mass on
    the ball, for negative subharmonic psi and 0 < gamma <= 1."""
    if not (0 < gamma <= 1):
        raise ContractViolation(f"gamma must lie in (0, 1], got {gamma}")
    n = psi.dim
    big = ball.scaled(2.0)
    cert = subharmonic_certificate(psi, big, cert_samples,
                                   seed=int(derive_rng(spec.seed, "dbl_cert").integers(2 ** 62)))
    pw = field_neg_power(psi, gamma)
    lhs = integrate_ball(pw, big, _seeded(spec, "doubling", "2B", ball.center, ball.radius))
    small = integrate_ball(pw, ball, _seeded(spec, "doubling", "B", ball.center, ball.radius))
    rhs = small.scale(2.0 ** n)
    return InequalityReport.from_sides(
        f"doubling[gamma={gamma}]", lhs, rhs,
        digest_of("doubling", psi.name, gamma, ball.center, ball.radius),
        inconclusive=not cert.holds)


@dataclass(frozen=True)
class ReverseHolderReport:
    """Higher-power mean against lower-power mean and the gamma-normalized ratio."""

    gamma: float
    n: int
    weak: bool
    high_mean: MeasuredValue      # [avg |psi|^(gamma n/(n-2))]^((n-2)/n)
    low_mean: MeasuredValue       # avg |psi|^gamma (over B, or 2B in weak form)
    rho: float
    rho_err: float
    normalized: float             # (1-gamma)^2 * rho
    inputs_digest: str

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "n": self.n, "weak": self.weak,
                "high_mean": self.high_mean.value, "low_mean": self.low_mean.value,
                "rho": self.rho, "rho_err": self.rho_err,
                "normalized": self.normalized, "inputs_digest": self.inputs_digest}


def check_reverse_holder(psi: ScalarField, gamma: float, ball: BallSpec,
                         spec: QuadratureSpec, weak: bool = False) -> ReverseHolderReport:
    """rho = [avg_B |psi|^(gamma n/(n-2))]^((n-2)/n) / avg |psi|^gamma.

    The constant in front of (1-gamma)^-2 is not pinned anywhere, so the
    contract is boundedness of (1-gamma)^2 rho across sweeps, not a value.
    """
    n = psi.dim
    if n <= 2:
        raise ContractViolation("reverse-Holder ratio needs n > 2")
    if not (0 < gamma < 1):
        raise ContractViolation(f"gamma must lie in (0, 1), got {gamma}")
    p_hi = gamma * n / (n - 2.0)
    hi_raw = integrate_ball(field_neg_power(psi, p_hi), ball,
                            _seeded(spec, "rh", "hi", ball.center, ball.radius))
    hi_avg = hi_raw.scale(1.0 / ball.volume())
    low_ball = ball.scaled(2.0) if weak else ball
    low_raw = integrate_ball(field_neg_power(psi, gamma), low_ball,
                             _seeded(spec, "rh", "lo", ball.center, ball.radius))
    low_avg = low_raw.scale(1.0 / low_ball.volume())
    ex = (n - 2.0) / n
    hi_val = max(hi_avg.value, 0.0) ** ex
    hi_err = ex * max(hi_avg.value, 1e-300) ** (ex - 1.0) * hi_avg.err
    high = MeasuredValue(hi_val, hi_err)
    rho = high.value / low_avg.value
    rho_err = (high.err + rho * low_avg.err) / low_avg.value
    return ReverseHolderReport(
        gamma=gamma, n=n, weak=weak, high_mean=high, low_mean=low_avg,
        rho=rho, rho_err=rho_err, normalized=(1.0 - gamma) ** 2 * rho,
        inputs_digest=digest_of("rh", psi.name, gamma, ball.center, ball.radius, weak))


@dataclass(frozen=True)
class MonotoneVerdict:
    holds: bool
    radii: tuple
    means: tuple          # MeasuredValue per radius
    worst_drop: float

    def to_dict(self) -> dict:
        return {"holds": self.holds, "radii": list(self.radii),
                "means": [m.value for m in self.means],
                "errs": [m.err for m in self.means], "worst_drop": self.worst_drop}


def spherical_mean_monotone(psi: ScalarField, center, radii: Sequence[float],
                            spec: QuadratureSpec) -> MonotoneVerdict:
    """Sphere means of a subharmonic field are nondecreasing in the radius.

    All radii share one direction stream so consecutive differences carry
    strongly correlated noise and the monotonicity test stays sharp.
    """
    from .quadcore import sphere_mean
    center = np.asarray(center, dtype=float)
    radii = sorted(float(r) for r in radii)
    means = [sphere_mean(psi, center, r, spec) for r in radii]
    worst = 0.0
    ok = True
    for a, b in zip(means[:-1], means[1:]):
        drop = a.value - b.value
        worst = max(worst, drop)
        if drop > 3.0 * (a.err + b.err) + 1e-12:
            ok = False
    return MonotoneVerdict(holds=ok, radii=tuple(radii), means=tuple(means),
                           worst_drop=worst)


# ---------------------------------------------------------------------------
# disc potential machinery (one complex variable)


def green_disc(R: float, z: complex, w: complex) -> float:
    """Boundary-vanishing disc kernel: log|z-w| + log(2R / |4R^2 - z conj(w)|)."""
    if R <= 0:
        raise ContractViolation("disc radius must be positive")
    z, w = complex(z), complex(w)
    if abs(z) > 2.0 * R + 1e-12 or abs(w) > 2.0 * R + 1e-12:
        raise ContractViolation("both points must lie in the closed disc of radius 2R")
    if z == w:
        raise ContractViolation("logarithmic pole at z = w")
    return math.log(abs(z - w)) + math.log(2.0 * R / abs(4.0 * R * R - z * w.conjugate()))


@dataclass(frozen=True)
class RieszGrid:
    """Quadrature and diagnostic resolution for the disc decomposition."""

    n_radial: int = 96
    n_angular: int = 256
    eval_points: int = 48
    fd_step: float = 5e-2
    core_delta: float = 1e-3


@dataclass
class RieszPieces:
    """psi = u + v + h on the disc of radius 2R.

    u is the logarithmic potential of the Laplacian mass, v the boundary
    kernel part, h the harmonic remainder (the least harmonic majorant,
    which satisfies psi <= h <= 0)."""

    R: float
    u: ScalarField
    v: ScalarField
    h: ScalarField
    laplacian_mass: MeasuredValue


def _polar_boundary_reach(z: complex, R2: float, theta: np.ndarray) -> np.ndarray:
    b = z.real * np.cos(theta) + z.imag * np.sin(theta)
    return -b + np.sqrt(b * b + R2 * R2 - abs(z) ** 2)


def riesz_decompose_disc(psi: ScalarField, R: float,
                         grid: Optional[RieszGrid] = None) -> RieszPieces:
    """Split a smooth negative subharmonic field on the closed 2R-disc.

    Radial Laplacians reduce both kernel integrals to one-dimensional
    quadrature; the general path integrates the log kernel in polar
    coordinates about each evaluation point so the singularity never meets a
    quadrature node.
    """
    if psi.dim != 2:
        raise ContractViolation("the disc decomposition lives on R^2")
    if R <= 0 or R > 0.5 + 1e-12:
        raise ContractViolation("disc parameter must satisfy 0 < R <= 1/2")
    grid = grid or RieszGrid()
    R2 = 2.0 * R
    hood = BallSpec((0.0, 0.0), 1.1 * R2)
    cert = subharmonic_certificate(psi, hood, 1024, seed=1711)
    rng = derive_rng(1713, "riesz_neg")
    probe = sample_in_ball(hood, 512, rng)
    vals = np.asarray(psi(probe), dtype=float)
    if not cert.holds or not np.all(vals[np.isfinite(vals)] < 0):
        raise InconclusiveResult("field is not certified negative subharmonic near the disc")

    qspec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-13, max_samples=200000)
    radial = psi.radial_about is not None and np.allclose(psi.radial_about, (0.0, 0.0))
    e1 = np.array([1.0, 0.0])

    def lap_profile(t):
        pts = np.outer(np.atleast_1d(t), e1)
        return np.asarray(psi.lap(pts), dtype=float)

    if radial:
        mass_raw = integrate_interval(lambda t: lap_profile(t) * t, 0.0, R2, qspec)
        mass = MeasuredValue(2.0 * math.pi * mass_raw.value, 2.0 * math.pi * mass_raw.err)

        def u_eval(pts):
            pts = np.atleast_2d(pts)
            out = np.empty(len(pts))
            for i, p in enumerate(pts):
                a = float(np.hypot(p[0], p[1]))
                inner = integrate_interval(lambda t: lap_profile(t) * t, 0.0, max(a, 1e-14), qspec).value \
                    if a > 1e-14 else 0.0
                outer = integrate_interval(lambda t: lap_profile(t) * t * np.log(t), a, R2, qspec).value \
                    if a < R2 else 0.0
                out[i] = inner * math.log(a) + outer if a > 1e-14 else outer
            return out

        v_const = -math.log(R2) * mass.value / (2.0 * math.pi)

        def v_eval(pts):
            return np.full(len(np.atleast_2d(pts)), v_const)
    else:
        # tensor polar grid about the origin for the mass and the smooth kernel
        tt, wt = np.polynomial.legendre.leggauss(grid.n_radial)
        t_nodes = 0.5 * R2 * (tt + 1.0)
        t_w = 0.5 * R2 * wt
        ang = 2.0 * math.pi * np.arange(grid.n_angular) / grid.n_angular
        w_ang = 2.0 * math.pi / grid.n_angular
        T, A = np.meshgrid(t_nodes, ang, indexing="ij")
        nodes = np.column_stack([(T * np.cos(A)).ravel(), (T * np.sin(A)).ravel()])
        lap_nodes = np.asarray(psi.lap(nodes), dtype=float)
        wgt = (t_w[:, None] * np.full((1, grid.n_angular), w_ang) * T).ravel()
        mass = MeasuredValue(float(np.dot(wgt, lap_nodes)), 1e-9 * abs(np.dot(wgt, np.abs(lap_nodes))))
        zeta = nodes[:, 0] + 1j * nodes[:, 1]

        def v_eval(pts):
            pts = np.atleast_2d(pts)
            out = np.empty(len(pts))
            for i, p in enumerate(pts):
                z = complex(p[0], p[1])
                ker = math.log(R2) - np.log(np.abs(4.0 * R * R - z * np.conj(zeta)))
                out[i] = float(np.dot(wgt, lap_nodes * ker)) / (2.0 * math.pi)
            return out

        gl_s, gl_w = np.polynomial.legendre.leggauss(32)

        def u_eval(pts):
            pts = np.atleast_2d(pts)
            out = np.empty(len(pts))
            theta = 2.0 * math.pi * np.arange(grid.n_angular) / grid.n_angular
            for i, p in enumerate(pts):
                z = complex(p[0], p[1])
                reach = _polar_boundary_reach(z, R2, theta)
                delta = grid.core_delta
                lap_z = float(np.asarray(psi.lap(np.array([[p[0], p[1]]])))[0])
                core = lap_z * (delta ** 2 * (2.0 * math.log(delta) - 1.0) / 4.0)
                acc = 0.0
                for lo_frac, hi_frac in ((0.0, 0.06), (0.06, 0.2), (0.2, 0.5), (0.5, 1.0)):
                    lo = delta + lo_frac * (reach - delta)
                    hi = delta + hi_frac * (reach - delta)
                    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
                    S = mid[None, :] + np.outer(gl_s, half)      # (24, n_ang)
                    W = np.outer(gl_w, half)
                    px = p[0] + S * np.cos(theta)[None, :]
                    py = p[1] + S * np.sin(theta)[None, :]
                    lap_vals = np.asarray(psi.lap(np.column_stack([px.ravel(), py.ravel()])),
                                          dtype=float).reshape(S.shape)
                    acc += float(np.sum(W * S * np.log(S) * lap_vals))
                out[i] = core + acc / grid.n_angular
            return out

    u_field = ScalarField(dim=2, evaluator=u_eval, name="riesz-u")
    v_field = ScalarField(dim=2, evaluator=v_eval, name="riesz-v")

    def h_eval(pts):
        pts = np.atleast_2d(pts)
        return np.asarray(psi(pts), dtype=float) - u_eval(pts) - v_eval(pts)

    h_field = ScalarField(dim=2, evaluator=h_eval, name="riesz-h")
    return RieszPieces(R=R, u=u_field, v=v_field, h=h_field, laplacian_mass=mass)


def riesz_diagnostics(pieces: RieszPieces, psi: ScalarField,
                      grid: Optional[RieszGrid] = None, seed: int = 23) -> dict:
    """Grid residuals for the decomposition invariants on the inner disc."""
    grid = grid or RieszGrid()
    R = pieces.R
    rng = derive_rng(seed, "riesz_diag")
    pts = sample_in_ball(BallSpec((0.0, 0.0), 0.85 * R), grid.eval_points, rng)
    u_vals = pieces.u(pts)
    v_vals = pieces.v(pts)
    h_vals = pieces.h(pts)
    psi_vals = np.asarray(psi(pts), dtype=float)
    decomp = float(np.max(np.abs(psi_vals - (u_vals + v_vals + h_vals))))
    hstep = grid.fd_step * R
    lap_res = []
    for p in pts:
        stencil = np.array([p, p + [hstep, 0], p - [hstep, 0], p + [0, hstep], p - [0, hstep]])
        hv = pieces.h(stencil)
        lap_res.append((hv[1] + hv[2] + hv[3] + hv[4] - 4.0 * hv[0]) / hstep ** 2)
    majorant_min = float(np.min(h_vals - psi_vals))
    # the kernel magnitude over the inner disc is at most |log R| + log 3
    v_bound = (abs(math.log(R)) + math.log(3.0)) / (2.0 * math.pi) * pieces.laplacian_mass.value
    return {"decomp_residual": decomp,
            "h_harmonic_residual": float(np.max(np.abs(lap_res))),
            "majorant_min": majorant_min,
            "h_max": float(np.max(h_vals)),
            "v_inf": float(np.max(np.abs(v_vals))),
            "v_bound": v_bound,
            "v_shape_constant": float(np.max(np.abs(v_vals)))
            / max(abs(math.log(R)) * pieces.laplacian_mass.value, 1e-300)}


def boundary_flux(psi: ScalarField, radius: float, n_nodes: int = 4096) -> float:
    """Outward normal derivative integrated over the circle (flux oracle)."""
    theta = 2.0 * math.pi * np.arange(n_nodes) / n_nodes
    pts = radius * np.column_stack([np.cos(theta), np.sin(theta)])
    grad = psi.grad(pts)
    normal = pts / radius
    return float(np.sum(np.sum(grad * normal, axis=1)) * (2.0 * math.pi * radius / n_nodes))


@dataclass(frozen=True)
class SubmeanReport:
    alpha: float
    ratios: tuple
    max_ratio: float
    inputs_digest: str

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "ratios": list(self.ratios),
                "max_ratio": self.max_ratio, "inputs_digest": self.inputs_digest}


def check_submean_ratio(fields: Sequence[ScalarField], alpha: float,
                        spec: QuadratureSpec) -> SubmeanReport:
    """integral over the half-disc of |u|^alpha against |u(0)|^alpha across a
    family of negative subharmonic fields; the constant is reported, not asserted."""
    if alpha <= 0:
        raise ContractViolation("alpha must be positive")
    ratios = []
    half = BallSpec((0.0, 0.0), 0.5)
    for i, u in enumerate(fields):
        if u.dim != 2:
            raise ContractViolation("submean ratio fields live on R^2")
        u0 = float(np.asarray(u(np.zeros((1, 2))))[0])
        if not np.isfinite(u0) or u0 == 0.0:
            raise ContractViolation("u(0) must be finite and nonzero")
        hood = BallSpec((0.0, 0.0), 1.05)
        cert = subharmonic_certificate(u, hood, 512, seed=37 + i)
        rng = derive_rng(41, "submean_neg", i)
        probe = sample_in_ball(hood, 256, rng)
        vals = np.asarray(u(probe), dtype=float)
        if not cert.holds or not np.all(vals[np.isfinite(vals)] < 0):
            raise InconclusiveResult("family member is not negative subharmonic near the disc")

        def integrand(pts, _u=u):
            return np.abs(np.asarray(_u(pts), dtype=float)) ** alpha

        fld = ScalarField(dim=2, evaluator=integrand,
                          radial_about=None, name=f"submean-{i}")
        num = integrate_ball(fld, half, _seeded(spec, "submean", i))
        ratios.append(num.value / abs(u0) ** alpha)
    return SubmeanReport(alpha=alpha, ratios=tuple(ratios),
                         max_ratio=max(ratios),
                         inputs_digest=digest_of("submean", alpha, len(fields)))


def check_subdomain_oscillation(f: ScalarField, W: BallSpec, V: BallSpec,
                                spec: QuadratureSpec) -> InequalityReport:
    """Oscillation on a subdomain against 2 |V|/|W| times the oscillation on V."""
    if not V.contains_ball(W):
        raise ContractViolation("W must be contained in V")
    mo_w = mean_oscillation(f, W, _seeded(spec, "sub_osc", "W"))
    mo_v = mean_oscillation(f, V, _seeded(spec, "sub_osc", "V"))
    factor = 2.0 * V.volume() / W.volume()
    return InequalityReport.from_sides(
        "subdomain-oscillation", mo_w.oscillation, mo_v.oscillation.scale(factor),
        digest_of("sub_osc", f.name, W.center, W.radius, V.center, V.radius))


def bmo_psh_probe(psi: ScalarField, region: BallSpec, ball_count: int, seed: int,
                  samples_per_ball: int = 4096) -> BmoEstimate:
    """Sampled oscillation supremum for a plurisubharmonic slice field.

    The contract is finiteness and stability of the curve as the ball count
    grows; no constant is asserted.
    """
    return bmo_lower_bound(psi, region, ball_count, seed,
                           samples_per_ball=samples_per_ball)
