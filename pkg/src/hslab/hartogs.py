"""Desk-scale extension machinery in two complex variables.

Everything runs on R^4 identified with C^2. The compact-support
del-bar solve is a first-variable Cauchy transform evaluated in polar
coordinates about the pole, so the kernel singularity never meets a node.
The pluriharmonic route goes through a free-space Newtonian potential in
R^4. Both particular solutions vanish identically on the unbounded
component of the data's complement, which is what makes the cutoff-and-
correct extension recipe work.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .quadcore import (BallSpec, ContractViolation, DimensionConstants,
                       QuadratureSpec, derive_rng, integrate_interval,
                       sample_in_ball)
from .funcspace import ScalarField, set_cutoff

_GL_CACHE: dict = {}


def _gl(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def to_complex_pair(pts: np.ndarray):
    pts = np.atleast_2d(pts)
    return pts[:, 0] + 1j * pts[:, 1], pts[:, 2] + 1j * pts[:, 3]


def from_complex_pair(z1, z2) -> np.ndarray:
    z1 = np.atleast_1d(z1)
    z2 = np.atleast_1d(z2)
    return np.column_stack([z1.real, z1.imag, z2.real, z2.imag])


def holo_field(fn: Callable, name: str, d1: Optional[Callable] = None,
               d2: Optional[Callable] = None) -> ScalarField:
    """Wrap a holomorphic function of (z1, z2) as a complex-valued field."""

    def ev(pts):
        z1, z2 = to_complex_pair(pts)
        return fn(z1, z2)

    f = ScalarField(dim=4, evaluator=ev, complex_valued=True,
                    tags=frozenset({"holomorphic-claimed"}), name=name)
    object.__setattr__(f, "holo_d1", d1)
    object.__setattr__(f, "holo_d2", d2)
    return f


def pluriharmonic_field(fn: Callable, name: str,
                        d1: Optional[Callable] = None,
                        d2: Optional[Callable] = None) -> ScalarField:
    """Real part of a holomorphic function, with the analytic real gradient
    when the complex derivatives are supplied."""

    def ev(pts):
        z1, z2 = to_complex_pair(pts)
        return np.real(fn(z1, z2))

    grad = None
    if d1 is not None and d2 is not None:
        def grad(pts):
            z1, z2 = to_complex_pair(pts)
            g1 = d1(z1, z2)
            g2 = d2(z1, z2)
            return np.column_stack([g1.real, -g1.imag, g2.real, -g2.imag])

    return ScalarField(dim=4, evaluator=ev, gradient=grad,
                       laplacian=lambda pts: np.zeros(len(np.atleast_2d(pts))),
                       tags=frozenset({"pluriharmonic-claimed"}), name=name)


# ---------------------------------------------------------------------------
# finite-difference Wirtinger calculus


def wirtinger_dbar(field: ScalarField, pts: np.ndarray, h: float = 1e-4):
    """FD (d/d zbar_1, d/d zbar_2) of a complex-valued field on R^4."""
    pts = np.atleast_2d(pts)

    def diff(axis):
        step = np.zeros_like(pts)
        step[:, axis] = h
        return (np.asarray(field(pts + step)) - np.asarray(field(pts - step))) / (2.0 * h)

    d0, d1, d2, d3 = (diff(a) for a in range(4))
    return 0.5 * (d0 + 1j * d1), 0.5 * (d2 + 1j * d3)


def _real_hessian(fn, p: np.ndarray, h: float) -> np.ndarray:
    """4x4 second-derivative matrix by central differences at one point."""
    out = np.empty((4, 4))
    f0 = float(fn(p[None, :])[0])
    for i in range(4):
        ei = np.zeros(4); ei[i] = h
        out[i, i] = (float(fn((p + ei)[None, :])[0]) - 2.0 * f0
                     + float(fn((p - ei)[None, :])[0])) / h ** 2
    for i in range(4):
        for j in range(i + 1, 4):
            ei = np.zeros(4); ei[i] = h
            ej = np.zeros(4); ej[j] = h
            val = (float(fn((p + ei + ej)[None, :])[0])
                   - float(fn((p + ei - ej)[None, :])[0])
                   - float(fn((p - ei + ej)[None, :])[0])
                   + float(fn((p - ei - ej)[None, :])[0])) / (4.0 * h ** 2)
            out[i, j] = out[j, i] = val
    return out


def complex_hessian(fn, p: np.ndarray, h: float = 1e-3,
                    richardson: bool = True) -> np.ndarray:
    """2x2 complex Hessian d^2/dz_j dzbar_k of a real function on R^4."""
    def assemble(hh):
        rh = _real_hessian(fn, p, hh)
        h11 = 0.25 * (rh[0, 0] + rh[1, 1])
        h22 = 0.25 * (rh[2, 2] + rh[3, 3])
        h12 = 0.25 * ((rh[0, 2] + rh[1, 3]) + 1j * (rh[0, 3] - rh[1, 2]))
        return np.array([[h11, h12], [np.conj(h12), h22]])

    if not richardson:
        return assemble(h)
    coarse, fine = assemble(h), assemble(h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def hermitian2_min_eig(m: np.ndarray) -> float:
    tr = float(np.real(m[0, 0] + m[1, 1]))
    det = float(np.real(m[0, 0] * m[1, 1] - m[0, 1] * np.conj(m[0, 1])))
    disc = max(tr * tr - 4.0 * det, 0.0)
    return 0.5 * (tr - math.sqrt(disc))


# ---------------------------------------------------------------------------
# compact (0,1) data and the Cauchy-transform solve


@dataclass(frozen=True)
class CompactForm:
    """Compactly supported form data on C^2 with a measured closedness defect."""

    degree: tuple
    coefficients: tuple          # ScalarFields; (v1, v2) for degree (0, 1)
    support: BallSpec
    support_inner: float
    closedness_residual: float

    @classmethod
    def build(cls, degree, coefficients, support, support_inner=0.0,
              probe_points: int = 64, seed: int = 97) -> "CompactForm":
        degree = tuple(degree)
        if degree not in ((0, 1), (1, 1)):
            raise ContractViolation("only (0,1) and (1,1) data are supported")
        rng = derive_rng(seed, "closedness")
        shell = support
        pts = sample_in_ball(shell, probe_points, rng)
        if degree == (0, 1):
            v1, v2 = coefficients
            _, d2_of_v1 = wirtinger_dbar(v1, pts)
            d1_of_v2, _ = wirtinger_dbar(v2, pts)
            res = float(np.max(np.abs(d2_of_v1 - d1_of_v2)))
        else:
            # trace data arrives already assembled for the Poisson route;
            # closedness is certified by the construction del-bar(del(chi f))
            res = 0.0
        # nonzero values outside the declared support would poison the solve
        wide = BallSpec(support.center, 1.5 * support.radius)
        far = sample_in_ball(wide, probe_points, derive_rng(seed, "supp"))
        outside = ~support.contains_points(far)
        worst = 0.0
        for c in coefficients:
            vals = np.abs(np.asarray(c(far[outside])))
            if len(vals):
                worst = max(worst, float(np.max(vals)))
        if worst > 1e-12:
            raise ContractViolation("coefficients do not vanish outside the support")
        return cls(degree=degree, coefficients=tuple(coefficients), support=support,
                   support_inner=support_inner, closedness_residual=res)


@dataclass(frozen=True)
class SolveBudget:
    """Resolution knobs for the extension solvers."""

    n_theta: int = 192
    n_radial: int = 12
    sphere_theta1: int = 8
    sphere_theta2: int = 8
    sphere_phi: int = 12
    n_potential_radial: int = 28

    def scaled(self, factor: float) -> "SolveBudget":
        s = max(factor, 0.05)
        return SolveBudget(
            n_theta=max(32, int(self.n_theta * s)),
            n_radial=max(6, int(round(self.n_radial * math.sqrt(s)))),
            sphere_theta1=max(6, int(round(self.sphere_theta1 * math.sqrt(s)))),
            sphere_theta2=max(6, int(round(self.sphere_theta2 * math.sqrt(s)))),
            sphere_phi=max(8, int(round(self.sphere_phi * math.sqrt(s)))),
            n_potential_radial=max(12, int(round(self.n_potential_radial * math.sqrt(s)))))


def _ray_circle_crossings(z1: complex, theta: np.ndarray, rho: float):
    """Positive parameters where |z1 + s e^{i theta}| = rho (nan when missed)."""
    b = z1.real * np.cos(theta) + z1.imag * np.sin(theta)
    disc = b * b + rho * rho - abs(z1) ** 2
    with np.errstate(invalid="ignore"):
        root = np.sqrt(disc)
    s_minus = -b - root
    s_plus = -b + root
    s_minus = np.where(disc >= 0, s_minus, np.nan)
    s_plus = np.where(disc >= 0, s_plus, np.nan)
    return s_minus, s_plus


def dbar_solve_compact(v: CompactForm, budget: Optional[SolveBudget] = None,
                       closedness_tol: float = 1e-3) -> ScalarField:
    """Particular solution of the (0,1) problem by the first-variable Cauchy
    transform; decays at infinity and vanishes on the unbounded component of
    the complement of the support."""
    if v.degree != (0, 1):
        raise ContractViolation("the Cauchy-transform solve takes (0,1) data")
    if v.closedness_residual > closedness_tol:
        raise ContractViolation(
            f"data is not closed within tolerance: residual {v.closedness_residual:.3g}")
    budget = budget or SolveBudget()
    v1 = v.coefficients[0]
    c4 = v.support.center_arr
    R_out = v.support.radius
    R_in = v.support_inner
    theta = 2.0 * math.pi * np.arange(budget.n_theta) / budget.n_theta
    w_theta = 2.0 * math.pi / budget.n_theta
    gl_x, gl_w = _gl(budget.n_radial)

    def eval_u(pts):
        pts = np.atleast_2d(pts)
        out = np.zeros(len(pts), dtype=complex)
        for idx, p in enumerate(pts):
            z1 = complex(p[0], p[1])
            z2 = complex(p[2], p[3])
            # slice radii of the 4-ball shell at this z2 (relative to center)
            dz2 = abs(z2 - complex(c4[2], c4[3])) ** 2
            ro2 = R_out ** 2 - dz2
            if ro2 <= 0:
                continue
            rho_out = math.sqrt(ro2)
            rho_in = math.sqrt(max(R_in ** 2 - dz2, 0.0))
            z1c = z1 - complex(c4[0], c4[1])
            cuts = [np.zeros_like(theta)]
            for rho in (rho_in, rho_out):
                if rho > 0:
                    lo, hi = _ray_circle_crossings(z1c, theta, rho)
                    cuts.extend([lo, hi])
            reach = np.nanmax(np.column_stack([np.zeros_like(theta),
                                               *(c for c in cuts[1:])]), axis=1) \
                if len(cuts) > 1 else np.zeros_like(theta)
            segs = np.column_stack(cuts)
            segs = np.where(np.isnan(segs) | (segs < 0), 0.0, segs)
            segs.sort(axis=1)
            # append the outer reach so the last panel closes the slice
            segs = np.column_stack([segs, reach])
            acc = np.zeros(len(theta), dtype=complex)
            for k in range(segs.shape[1] - 1):
                lo = segs[:, k]
                hi = segs[:, k + 1]
                half = 0.5 * (hi - lo)
                mid = 0.5 * (hi + lo)
                live = half > 1e-14
                if not np.any(live):
                    continue
                S = mid[None, :] + np.outer(gl_x, half)         # (g, n_theta)
                W = np.outer(gl_w, half)
                zeta = z1 + S * np.exp(1j * theta)[None, :]
                flat = from_complex_pair(zeta.ravel(), np.full(zeta.size, z2))
                vals = np.asarray(v1(flat)).reshape(S.shape)
                acc += np.sum(W * vals, axis=0)
            out[idx] = -(w_theta / math.pi) * np.sum(acc * np.exp(-1j * theta))
        return out

    return ScalarField(dim=4, evaluator=eval_u, complex_valued=True,
                       name="cauchy-transform-solution")


# ---------------------------------------------------------------------------
# free-space Newtonian potential


def sphere_rule_s3(n1: int, n2: int, n3: int):
    """Product quadrature on the unit 3-sphere; weights sum to 2 pi^2."""
    t1, w1 = _gl(n1)
    theta1 = 0.5 * math.pi * (t1 + 1.0)
    w_theta1 = 0.5 * math.pi * w1 * np.sin(theta1) ** 2
    c2, w2 = _gl(n2)
    s2 = np.sqrt(1.0 - c2 * c2)
    phi = 2.0 * math.pi * np.arange(n3) / n3
    w_phi = 2.0 * math.pi / n3
    T1, C2, P = np.meshgrid(theta1, c2, phi, indexing="ij")
    W = w_theta1[:, None, None] * w2[None, :, None] * np.full((1, 1, n3), w_phi)
    S2 = np.sqrt(1.0 - C2 * C2)
    omega = np.stack([np.cos(T1),
                      np.sin(T1) * C2,
                      np.sin(T1) * S2 * np.cos(P),
                      np.sin(T1) * S2 * np.sin(P)], axis=-1)
    return omega.reshape(-1, 4), W.ravel()


@dataclass(frozen=True)
class PotentialSolution:
    """Newtonian potential of a compactly supported density, with a far-field
    decay fit of log|u| against log|x|."""

    u: ScalarField
    rhs_digest: str
    decay: tuple                 # (slope, intercept)
    support_radius: float
    real_dim: int

    def residual_report(self, g: ScalarField, n_probe: int = 12,
                        seed: int = 5, h: float = 2e-2) -> float:
        """Max |FD-Laplacian(u) - g| over probe points near the support."""
        rng = derive_rng(seed, "potential_res")
        pts = sample_in_ball(BallSpec((0.0,) * self.real_dim, self.support_radius),
                             n_probe, rng)
        lap = []
        for p in pts:
            stencil = [p]
            for ax in range(self.real_dim):
                e = np.zeros(self.real_dim); e[ax] = h
                stencil.extend([p + e, p - e])
            vals = self.u(np.array(stencil))
            acc = sum(vals[1 + 2 * ax] + vals[2 + 2 * ax] - 2.0 * vals[0]
                      for ax in range(self.real_dim)) / h ** 2
            lap.append(acc)
        return float(np.max(np.abs(np.asarray(lap) - np.asarray(g(pts), dtype=float))))


def newtonian_solve(g: ScalarField, real_dim: int,
                    budget: Optional[SolveBudget] = None,
                    support: Optional[BallSpec] = None) -> PotentialSolution:
    """Convolution with the fundamental solution of the Laplacian in R^m.

    Radial densities reduce to a one-dimensional kernel; the general path
    (dimension 4) integrates sphere means about the evaluation point so the
    |x - y|^(2-m) singularity cancels against the volume element.
    """
    if real_dim < 3:
        raise ContractViolation("the free-space kernel route needs dimension >= 3")
    if g.dim != real_dim:
        raise ContractViolation("density dimension mismatch")
    budget = budget or SolveBudget()
    m = real_dim
    supp = support or g.effective_support()
    R_sup = float(np.linalg.norm(supp.center_arr) + supp.radius)
    qspec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-13, max_samples=120000)

    radial = g.radial_about is not None and np.allclose(g.radial_about, 0.0)
    if radial:
        e1 = np.zeros(m); e1[0] = 1.0

        def gprof(t):
            return np.asarray(g(np.outer(np.atleast_1d(t), e1)), dtype=float)

        def eval_u(pts):
            pts = np.atleast_2d(pts)
            out = np.empty(len(pts))
            for i, p in enumerate(pts):
                rho = float(np.linalg.norm(p))
                if rho < 1e-12:
                    val = integrate_interval(lambda t: gprof(t) * t, 1e-12, R_sup, qspec).value
                else:
                    inner = integrate_interval(
                        lambda t: gprof(t) * t ** (m - 1), 1e-14, min(rho, R_sup), qspec).value \
                        * rho ** (2.0 - m)
                    outer = integrate_interval(lambda t: gprof(t) * t, rho, R_sup, qspec).value \
                        if rho < R_sup else 0.0
                    val = inner + outer
                out[i] = -val / (m - 2.0)
            return out
    else:
        if m != 4:
            raise ContractViolation("the sphere-mean path is implemented for dimension 4")
        sigma4 = DimensionConstants.for_dim(4).sigma_n
        gl_x, gl_w = _gl(budget.n_radial)
        tau_x, tau_w = _gl(budget.sphere_theta1)
        c2_x, c2_w = _gl(budget.sphere_theta2)
        phi = 2.0 * math.pi * np.arange(budget.sphere_phi) / budget.sphere_phi
        w_phi = 2.0 * math.pi / budget.sphere_phi
        # tangential S^2 directions in frame coordinates (unit vectors in R^3)
        s2_sin = np.sqrt(1.0 - c2_x ** 2)
        vdirs = np.stack(np.broadcast_arrays(c2_x[:, None] * np.ones_like(phi)[None, :],
                                             s2_sin[:, None] * np.cos(phi)[None, :],
                                             s2_sin[:, None] * np.sin(phi)[None, :]),
                         axis=-1).reshape(-1, 3)
        w_v = (c2_w[:, None] * np.full((1, budget.sphere_phi), w_phi)).ravel()
        r_out = supp.radius
        r_in = getattr(g, "support_inner", 0.0)

        def eval_u(pts):
            pts = np.atleast_2d(pts)
            out = np.empty(len(pts))
            center = supp.center_arr
            for i, p in enumerate(pts):
                dvec = p - center
                d = float(np.linalg.norm(dvec))
                if d < 1e-12:
                    e_hat = np.array([1.0, 0.0, 0.0, 0.0])
                else:
                    e_hat = dvec / d
                # orthonormal frame with e_hat first
                basis = np.eye(4)
                idx = int(np.argmax(np.abs(e_hat)))
                cols = [e_hat] + [basis[j] for j in range(4) if j != idx]
                q, _ = np.linalg.qr(np.column_stack(cols))
                if np.dot(q[:, 0], e_hat) < 0:
                    q[:, 0] = -q[:, 0]
                tang = q[:, 1:]                       # (4, 3)
                lo = max(d - r_out, 0.0)
                hi = d + r_out
                cuts = {lo, hi}
                for rr in (r_in, r_out):
                    if rr > 0:
                        for c in (abs(d - rr), d + rr):
                            if lo < c < hi:
                                cuts.add(c)
                edges = sorted(cuts)
                acc = 0.0
                for a, b in zip(edges[:-1], edges[1:]):
                    s = 0.5 * (b + a) + 0.5 * (b - a) * gl_x
                    ws = 0.5 * (b - a) * gl_w
                    if d < 1e-12:
                        t_lo = -np.ones_like(s)
                        t_hi = np.ones_like(s)
                        live_s = (s >= r_in) & (s <= r_out)
                        if not np.any(live_s):
                            continue
                    else:
                        t_lo = np.clip((d * d + s * s - r_out ** 2) / (2.0 * s * d), -1.0, 1.0)
                        t_hi = np.clip((d * d + s * s - r_in ** 2) / (2.0 * s * d), -1.0, 1.0) \
                            if r_in > 0 else np.ones_like(s)
                        live_s = t_hi > t_lo
                        if not np.any(live_s):
                            continue
                    # tau = cos(xi) removes the sqrt(1 - tau^2) endpoint kink
                    xi_lo = np.arccos(np.clip(t_hi, -1.0, 1.0))
                    xi_hi = np.arccos(np.clip(t_lo, -1.0, 1.0))
                    xi_mid = 0.5 * (xi_hi + xi_lo)
                    xi_half = 0.5 * (xi_hi - xi_lo)
                    xi = xi_mid[:, None] + xi_half[:, None] * tau_x[None, :]     # (ns, nt)
                    w_xi = xi_half[:, None] * tau_w[None, :]
                    tau = np.cos(xi)
                    sin_t = np.sin(xi)
                    # nodes: p + s (-tau e_hat + sin_t v), v over S^2 in the frame
                    axial = -tau[:, :, None] * e_hat[None, None, :]
                    v4 = vdirs @ tang.T                                          # (nv, 4)
                    nodes = (p[None, None, None, :]
                             + s[:, None, None, None]
                             * (axial[:, :, None, :] + sin_t[:, :, None, None] * v4[None, None, :, :]))
                    vals = np.asarray(g(nodes.reshape(-1, 4)), dtype=float)
                    vals = vals.reshape(tau.shape + (len(vdirs),))
                    ring = vals @ w_v                                            # (ns, nt)
                    mean_s = np.sum(w_xi * sin_t ** 2 * ring, axis=1) / sigma4
                    mean_s = np.where(live_s, mean_s, 0.0)
                    acc += float(np.dot(ws, s * mean_s))
                out[i] = -acc / (m - 2.0)
            return out

    u_field = ScalarField(dim=m, evaluator=eval_u, name="newtonian-potential",
                          radial_about=(0.0,) * m if radial else None)
    radii = np.geomspace(1.6 * R_sup, 7.0 * R_sup, 10)
    probe = np.zeros((len(radii), m))
    probe[:, 0] = radii
    uvals = np.abs(np.asarray(u_field(probe), dtype=float))
    finite = uvals > 1e-300
    if finite.sum() >= 3:
        slope, intercept = np.polyfit(np.log(radii[finite]), np.log(uvals[finite]), 1)
    else:
        slope, intercept = math.nan, math.nan
    digest = hashlib.sha256(repr((g.name, m, R_sup)).encode()).hexdigest()[:16]
    return PotentialSolution(u=u_field, rhs_digest=digest,
                             decay=(float(slope), float(intercept)),
                             support_radius=R_sup, real_dim=m)


@dataclass(frozen=True)
class DecayVerdict:
    passed: bool
    trivial: bool
    fitted_constant: float
    slope: float
    samples: tuple

    def to_dict(self) -> dict:
        return {"passed": self.passed, "trivial": self.trivial,
                "fitted_constant": self.fitted_constant, "slope": self.slope,
                "samples": [list(s) for s in self.samples]}


def decay_check(sol: PotentialSolution, R_support: float, n_complex: int) -> DecayVerdict:
    """|u(z)| <= C (|z| - R)^(1-n) at sampled radii, with the fitted C
    reported, plus vanishing of |u| along the radius grid."""
    m = sol.real_dim
    radii = np.geomspace(1.5 * R_support, 8.0 * R_support, 14)
    probe = np.zeros((len(radii), m))
    probe[:, 0] = radii
    uvals = np.abs(np.asarray(sol.u(probe), dtype=float))
    if np.all(uvals < 1e-13):
        return DecayVerdict(passed=True, trivial=True, fitted_constant=0.0,
                            slope=math.nan, samples=tuple(zip(radii, uvals)))
    env = (radii - R_support) ** (n_complex - 1.0)
    fitted_c = float(np.max(uvals * env))
    # the bound holds with the fitted constant iff the sampled decay is at
    # least as fast as (|z|-R)^(1-n); check the rate, not the tautology
    shifted_slope, _ = np.polyfit(np.log(radii - R_support), np.log(np.maximum(uvals, 1e-300)), 1)
    rate_ok = shifted_slope <= (1.0 - n_complex) + 0.25
    vanish_ok = uvals[-1] <= 0.25 * uvals[0]
    return DecayVerdict(passed=bool(rate_ok and vanish_ok), trivial=False,
                        fitted_constant=fitted_c, slope=float(shifted_slope),
                        samples=tuple(zip(radii, uvals)))


# ---------------------------------------------------------------------------
# extension problems


@dataclass(frozen=True)
class ExtensionProblem:
    """Domain ball, excised closed ball, safety margin and boundary data."""

    Omega: BallSpec
    E: BallSpec
    margin: float
    f: ScalarField
    truth: Optional[ScalarField] = None

    def __post_init__(self):
        if self.Omega.dim != 4 or self.E.dim != 4:
            raise ContractViolation("extension problems live on C^2 (R^4)")
        d = float(np.linalg.norm(self.Omega.center_arr - self.E.center_arr))
        if d + self.E.radius + self.margin >= self.Omega.radius:
            raise ContractViolation("the fattened set E_r must sit inside Omega with slack")
        if self.margin <= 0:
            raise ContractViolation("margin must be positive")


@dataclass(frozen=True)
class ExtensionReport:
    kind: str
    sup_err_truth: Optional[float]
    agreement_outside: float
    residual_inside: float
    unbounded_component_max: float
    l2_ratio: Optional[float]
    extended: ScalarField
    correction: ScalarField

    def to_dict(self) -> dict:
        return {"kind": self.kind, "sup_err_truth": self.sup_err_truth,
                "agreement_outside": self.agreement_outside,
                "residual_inside": self.residual_inside,
                "unbounded_component_max": self.unbounded_component_max,
                "l2_ratio": self.l2_ratio}


def _chi_pieces(problem: ExtensionProblem):
    chi = set_cutoff(problem.E.center, problem.E.radius, problem.margin, 4)
    shell = BallSpec(problem.E.center, problem.E.radius + problem.margin)
    inner = problem.E.radius + problem.margin / 2.0
    return chi, shell, inner


def _grid_shells(problem: ExtensionProblem, count: int, seed: int):
    """Evaluation points split by region: inside E_r, the transition shell,
    and the outer region of Omega."""
    rng = derive_rng(seed, "ext_grid")
    omega_r = problem.Omega.radius
    pts = sample_in_ball(BallSpec(problem.Omega.center, 0.96 * omega_r), count, rng)
    return pts


def probe_holomorphy(f: ScalarField, pts: np.ndarray, tol_scale: float = 1e-5,
                     h: float = 1e-4) -> float:
    d1, d2 = wirtinger_dbar(f, pts, h=h)
    scale = 1.0 + float(np.max(np.abs(np.asarray(f(pts)))))
    res = float(np.max(np.abs(np.column_stack([d1, d2]))))
    if res > tol_scale * scale:
        raise ContractViolation(
            f"boundary data fails the holomorphy probe: residual {res:.3g}")
    return res


def probe_pluriharmonic(f: ScalarField, pts: np.ndarray, tol: float = 1e-5,
                        h: float = 1e-3) -> float:
    worst = 0.0
    for p in pts:
        hm = complex_hessian(lambda q: np.asarray(f(q), dtype=float), p, h=h)
        worst = max(worst, float(np.max(np.abs(hm))))
    scale = 1.0 + float(np.max(np.abs(np.asarray(f(pts), dtype=float))))
    if worst > tol * scale:
        raise ContractViolation(
            f"boundary data fails the pluriharmonicity probe: residual {worst:.3g}")
    return worst


def _l2_ratio(u: ScalarField, v_fields: Sequence[ScalarField], support: BallSpec,
              seed: int, n_samples: int = 1536) -> float:
    """Reported (never asserted) ratio ||u||_2 / ||max(|z|,1) v||_2.

    The particular solution here is not the minimal-norm one, so no bound
    from the minimal-solution theory is expected to apply.
    """
    rng = derive_rng(seed, "l2_ratio")
    big = BallSpec((0.0, 0.0, 0.0, 0.0), 4.0)
    pts = sample_in_ball(big, n_samples, rng)
    uv = np.abs(np.asarray(u(pts))) ** 2
    u_norm = math.sqrt(float(np.mean(uv)) * big.volume())
    pts_v = sample_in_ball(support, n_samples // 2, derive_rng(seed, "l2v"))
    wz = np.maximum(np.linalg.norm(pts_v, axis=1), 1.0) ** 2
    acc = np.zeros(len(pts_v))
    for c in v_fields:
        acc = acc + np.abs(np.asarray(c(pts_v))) ** 2
    v_norm = math.sqrt(float(np.mean(wz * acc)) * support.volume())
    return u_norm / v_norm if v_norm > 0 else math.inf


def hartogs_extend(problem: ExtensionProblem, budget: Optional[SolveBudget] = None,
                   grid_points: int = 160, residual_points: int = 24,
                   seed: int = 2024, compute_l2: bool = True) -> ExtensionReport:
    """Cutoff-and-correct extension of holomorphic data across the excised set.

    F = chi f - u with u the Cauchy-transform solution of the compactly
    supported (0,1) problem; F agrees with f outside the fattened set up to
    solver error and is holomorphic on the whole domain.
    """
    if "holomorphic-claimed" not in problem.f.tags:
        raise ContractViolation("data must be tagged holomorphic-claimed")
    budget = budget or SolveBudget()
    chi, shell, inner = _chi_pieces(problem)
    f = problem.f

    probe_ring = _annulus_points(problem, 48, seed)
    probe_holomorphy(f, probe_ring)

    def make_coeff(axis_pair):
        def ev(pts):
            pts = np.atleast_2d(pts)
            gch = chi.grad(pts)
            dbar = 0.5 * (gch[:, axis_pair[0]] + 0.0j) + 0.5j * gch[:, axis_pair[1]]
            out = np.zeros(len(pts), dtype=complex)
            live = np.abs(dbar) > 0
            if np.any(live):
                out[live] = np.asarray(f(pts[live])) * dbar[live]
            return out
        return ev

    v1 = ScalarField(dim=4, evaluator=make_coeff((0, 1)), complex_valued=True,
                     support=shell, name="dbar-chi-f-1")
    v2 = ScalarField(dim=4, evaluator=make_coeff((2, 3)), complex_valued=True,
                     support=shell, name="dbar-chi-f-2")
    form = CompactForm.build((0, 1), (v1, v2), shell, support_inner=inner)
    u = dbar_solve_compact(form, budget=budget)

    def F_eval(pts):
        pts = np.atleast_2d(pts)
        ch = chi(pts)
        out = -np.asarray(u(pts))
        live = ch > 0
        if np.any(live):
            out[live] = out[live] + ch[live] * np.asarray(f(pts[live]))
        return out

    F = ScalarField(dim=4, evaluator=F_eval, complex_valued=True,
                    tags=frozenset({"holomorphic-claimed"}), name="extension")
    return _finish_report("holomorphic", problem, F, u, (v1, v2), shell,
                          grid_points, residual_points, seed, compute_l2)


def pluriharmonic_extend(problem: ExtensionProblem, budget: Optional[SolveBudget] = None,
                         grid_points: int = 120, residual_points: int = 10,
                         seed: int = 2025, compute_l2: bool = False) -> ExtensionReport:
    """Cutoff-and-correct extension of pluriharmonic data.

    The correction solves the real free-space Poisson problem with density
    Laplacian(chi f) in R^4; F = chi f - u.
    """
    if "pluriharmonic-claimed" not in problem.f.tags:
        raise ContractViolation("data must be tagged pluriharmonic-claimed")
    budget = budget or SolveBudget()
    chi, shell, inner = _chi_pieces(problem)
    f = problem.f
    probe_ring = _annulus_points(problem, 24, seed)
    probe_pluriharmonic(f, probe_ring)

    def g_eval(pts):
        pts = np.atleast_2d(pts)
        lch = np.asarray(chi.lap(pts), dtype=float)
        gch = chi.grad(pts)
        live = (np.abs(lch) > 0) | (np.abs(gch).sum(axis=1) > 0)
        out = np.zeros(len(pts))
        if np.any(live):
            fv = np.asarray(f(pts[live]), dtype=float)
            gf = f.grad(pts[live])
            out[live] = fv * lch[live] + 2.0 * np.sum(gf * gch[live], axis=1)
        return out

    radial = (f.radial_about is not None and chi.radial_about is not None
              and np.allclose(f.radial_about, chi.radial_about) and
              np.allclose(chi.radial_about, (0.0,) * 4))
    g = ScalarField(dim=4, evaluator=g_eval, support=shell, support_inner=inner,
                    radial_about=(0.0,) * 4 if radial else None, name="lap-chi-f")
    sol = newtonian_solve(g, 4, budget=budget, support=shell)
    u = sol.u

    def F_eval(pts):
        pts = np.atleast_2d(pts)
        ch = chi(pts)
        out = -np.asarray(u(pts), dtype=float)
        live = ch > 0
        if np.any(live):
            out[live] = out[live] + ch[live] * np.asarray(f(pts[live]), dtype=float)
        return out

    F = ScalarField(dim=4, evaluator=F_eval,
                    tags=frozenset({"pluriharmonic-claimed"}), name="ph-extension")
    return _finish_report("pluriharmonic", problem, F, u, (g,), shell,
                          grid_points, residual_points, seed, compute_l2)


def _annulus_points(problem: ExtensionProblem, count: int, seed: int) -> np.ndarray:
    """Sample points in Omega \\ E_r, where the data is defined and smooth."""
    rng = derive_rng(seed, "annulus_pts")
    out = []
    lo = problem.E.radius + problem.margin * 1.05
    hi = 0.95 * problem.Omega.radius
    while len(out) < count:
        pts = sample_in_ball(BallSpec(problem.Omega.center, hi), 4 * count, rng)
        d = np.linalg.norm(pts - problem.E.center_arr, axis=1)
        good = pts[d >= lo]
        out.extend(good[: count - len(out)])
    return np.asarray(out)


def _finish_report(kind, problem, F, u, v_fields, shell, grid_points,
                   residual_points, seed, compute_l2):
    outside_pts = _annulus_points(problem, grid_points // 2, seed + 1)
    f_out = np.asarray(problem.f(outside_pts))
    F_out = np.asarray(F(outside_pts))
    agreement = float(np.max(np.abs(F_out - f_out)))

    truth_err = None
    if problem.truth is not None:
        all_pts = _grid_shells(problem, grid_points, seed + 2)
        truth_err = float(np.max(np.abs(np.asarray(F(all_pts))
                                        - np.asarray(problem.truth(all_pts)))))

    res_pts = sample_in_ball(BallSpec(problem.Omega.center,
                                      0.9 * problem.Omega.radius),
                             residual_points, derive_rng(seed, "res_pts"))
    if kind == "holomorphic":
        d1, d2 = wirtinger_dbar(F, res_pts, h=2e-3)
        residual = float(np.max(np.abs(np.column_stack([d1, d2]))))
    else:
        worst = 0.0
        for p in res_pts:
            hm = complex_hessian(lambda q: np.asarray(F(q), dtype=float), p,
                                 h=2e-2, richardson=False)
            worst = max(worst, float(np.max(np.abs(hm))))
        residual = worst

    far = np.array([[1.05 * problem.Omega.radius, 0.0, 0.0, 0.0],
                    [0.0, 0.0, 1.05 * problem.Omega.radius, 0.0],
                    [0.8, 0.0, 0.9, 0.0],
                    [2.0, 0.0, 2.0, 0.0]])
    keep = np.linalg.norm(far - shell.center_arr, axis=1) > shell.radius
    unb = float(np.max(np.abs(np.asarray(u(far[keep]))))) if keep.any() else 0.0

    l2 = _l2_ratio(u, v_fields, shell, seed) if compute_l2 else None
    return ExtensionReport(kind=kind, sup_err_truth=truth_err,
                           agreement_outside=agreement, residual_inside=residual,
                           unbounded_component_max=unb, l2_ratio=l2,
                           extended=F, correction=u)


# ---------------------------------------------------------------------------
# hyperbolic distance helper


@dataclass(frozen=True)
class HyperbolicPoint:
    z: complex

    def __post_init__(self):
        if abs(self.z) >= 1.0:
            raise ContractViolation("hyperbolic points live strictly inside the unit disc")


def hyperbolic_distance(a: HyperbolicPoint, b: HyperbolicPoint) -> float:
    """Invariant distance on the unit disc: log((1+m)/(1-m)) for the Mobius ratio m."""
    za, zb = a.z, b.z
    m = abs((za - zb) / (1.0 - zb.conjugate() * za))
    return math.log((1.0 + m) / (1.0 - m))


@dataclass(frozen=True)
class PshProbeVerdict:
    holds: bool
    min_eigenvalue: float
    points_checked: int

    def to_dict(self) -> dict:
        return {"holds": self.holds, "min_eigenvalue": self.min_eigenvalue,
                "points_checked": self.points_checked}


def log_psh_probe(grid_n: int = 20, disc_radius: float = 0.7,
                  min_separation: float = 0.3, tol: float = 1e-6) -> PshProbeVerdict:
    """FD complex Hessian of log of the disc distance on off-diagonal points
    of the bidisc; the smallest eigenvalue must clear -tol everywhere."""

    def fn(pts):
        pts = np.atleast_2d(pts)
        out = np.empty(len(pts))
        for i, p in enumerate(pts):
            out[i] = math.log(hyperbolic_distance(
                HyperbolicPoint(complex(p[0], p[1])),
                HyperbolicPoint(complex(p[2], p[3]))))
        return out

    side = max(2, int(round(math.sqrt(grid_n))))
    box = disc_radius / math.sqrt(2.0)
    lin = np.linspace(-box, box, side)
    candidates = [complex(a, b) for a in lin for b in lin]
    worst = math.inf
    checked = 0
    for z in candidates:
        for w in candidates:
            if abs(z - w) < min_separation:
                continue
            p = np.array([z.real, z.imag, w.real, w.imag])
            hm = complex_hessian(fn, p, h=7e-4)
            worst = min(worst, hermitian2_min_eig(hm))
            checked += 1
    return PshProbeVerdict(holds=worst >= -tol, min_eigenvalue=worst,
                           points_checked=checked)
