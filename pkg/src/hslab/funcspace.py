"""Test functions, weights and model subharmonic fields.

ScalarField is the universal carrier: an evaluator over point arrays plus
optional analytic gradient/Laplacian, declared radial symmetry, support,
singular balls and distributional Laplacian atoms. Finite differences with
Richardson extrapolation fill in whatever derivatives are not analytic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .quadcore import (BallSpec, ContractViolation, DimensionConstants,
                       derive_rng, sample_in_ball)

_EPS = np.finfo(float).eps
_H_GRAD = _EPS ** (1.0 / 3.0)   # first-derivative step before magnitude scaling
_H_LAP = _EPS ** 0.25           # second-derivative step


@dataclass(frozen=True)
class ScalarField:
    """A real- or complex-valued function handle on R^n.

    evaluator maps an (m, dim) array to (m,) values. gradient and laplacian,
    when given, are analytic and vectorized the same way. point_masses lists
    distributional Laplacian atoms (point, mass) that integrators of the
    Laplacian must add analytically.
    """

    dim: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    laplacian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    radial_about: Optional[tuple] = None
    support: Optional[BallSpec] = None
    support_inner: float = 0.0
    singular_balls: tuple = ()
    point_masses: tuple = ()
    complex_valued: bool = False
    tags: frozenset = frozenset()
    name: str = "field"

    def __post_init__(self):
        if self.radial_about is not None:
            object.__setattr__(self, "radial_about",
                               tuple(float(c) for c in np.atleast_1d(self.radial_about)))

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.asarray(self.evaluator(pts))

    def at(self, point) -> float:
        return complex(self(np.atleast_2d(point))[0]) if self.complex_valued \
            else float(self(np.atleast_2d(point))[0])

    def grad(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.gradient is not None:
            return np.asarray(self.gradient(pts))
        return fd_gradient(self.evaluator, pts)

    def lap(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.laplacian is not None:
            return np.asarray(self.laplacian(pts))
        return fd_laplacian(self.evaluator, pts)

    def is_singular_at(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        mask = np.zeros(len(pts), dtype=bool)
        for b in self.singular_balls:
            mask |= b.contains_points(pts)
        return mask

    def effective_support(self, fallback_radius: float = 12.0) -> BallSpec:
        if self.support is not None:
            return self.support
        center = self.radial_about if self.radial_about is not None else (0.0,) * self.dim
        return BallSpec(center, fallback_radius)


def fd_gradient(fn, pts: np.ndarray) -> np.ndarray:
    """Central differences with one Richardson step, per coordinate."""
    pts = np.atleast_2d(pts)
    m, n = pts.shape
    out = np.empty((m, n))
    for j in range(n):
        h = _H_GRAD * np.maximum(1.0, np.abs(pts[:, j]))
        acc = None
        for hh, w in ((h, 4.0 / 3.0), (2.0 * h, -1.0 / 3.0)):
            step = np.zeros_like(pts)
            step[:, j] = hh
            d = (np.asarray(fn(pts + step)) - np.asarray(fn(pts - step))) / (2.0 * hh)
            acc = w * d if acc is None else acc + w * d
        out[:, j] = acc
    return out


def fd_laplacian(fn, pts: np.ndarray) -> np.ndarray:
    """Sum of second central differences with one Richardson step."""
    pts = np.atleast_2d(pts)
    m, n = pts.shape
    f0 = np.asarray(fn(pts))
    total = np.zeros(m)
    for j in range(n):
        h = _H_LAP * np.maximum(1.0, np.abs(pts[:, j]))
        acc = None
        for hh, w in ((h, 4.0 / 3.0), (2.0 * h, -1.0 / 3.0)):
            step = np.zeros_like(pts)
            step[:, j] = hh
            d2 = (np.asarray(fn(pts + step)) - 2.0 * f0 + np.asarray(fn(pts - step))) / hh ** 2
            acc = w * d2 if acc is None else acc + w * d2
        total += acc
    return total


def differentiate(field: ScalarField, point, order: str):
    """Gradient or Laplacian at one point, with an error estimate.

    Uses the analytic path when the field carries one; otherwise central
    differences with Richardson extrapolation. Evaluation at a declared
    singular point is a contract violation.
    """
    pt = np.atleast_2d(np.asarray(point, dtype=float))
    if field.is_singular_at(pt).any():
        raise ContractViolation("differentiate called at a declared singular point")
    if order == "gradient":
        if field.gradient is not None:
            return np.asarray(field.gradient(pt))[0], 0.0
        coarse = fd_gradient(field.evaluator, pt)[0]
        # error estimate: difference against a single-step (non-extrapolated) stencil
        plain = _fd_gradient_plain(field.evaluator, pt)[0]
        return coarse, float(np.max(np.abs(coarse - plain)))
    if order == "laplacian":
        if field.laplacian is not None:
            return float(np.asarray(field.laplacian(pt))[0]), 0.0
        coarse = float(fd_laplacian(field.evaluator, pt)[0])
        plain = float(_fd_laplacian_plain(field.evaluator, pt)[0])
        return coarse, abs(coarse - plain)
    raise ContractViolation(f"unknown derivative order {order!r}")


def _fd_gradient_plain(fn, pts):
    pts = np.atleast_2d(pts)
    m, n = pts.shape
    out = np.empty((m, n))
    for j in range(n):
        h = _H_GRAD * np.maximum(1.0, np.abs(pts[:, j]))
        step = np.zeros_like(pts)
        step[:, j] = h
        out[:, j] = (np.asarray(fn(pts + step)) - np.asarray(fn(pts - step))) / (2.0 * h)
    return out


def _fd_laplacian_plain(fn, pts):
    pts = np.atleast_2d(pts)
    m, n = pts.shape
    f0 = np.asarray(fn(pts))
    total = np.zeros(m)
    for j in range(n):
        h = _H_LAP * np.maximum(1.0, np.abs(pts[:, j]))
        step = np.zeros_like(pts)
        step[:, j] = h
        total += (np.asarray(fn(pts + step)) - 2.0 * f0 + np.asarray(fn(pts - step))) / h ** 2
    return total


# ---------------------------------------------------------------------------
# smooth bump construction

def _smoothstep(t):
    """Quintic transition: 0 below 0, 1 above 1, C^2 with flat junctions."""
    t = np.clip(t, 0.0, 1.0)
    return t ** 3 * (10.0 + t * (-15.0 + 6.0 * t))


def _smoothstep_d1(t):
    inside = (t > 0.0) & (t < 1.0)
    t = np.clip(t, 0.0, 1.0)
    return np.where(inside, 30.0 * t ** 2 * (t - 1.0) ** 2, 0.0)


def _smoothstep_d2(t):
    inside = (t > 0.0) & (t < 1.0)
    t = np.clip(t, 0.0, 1.0)
    return np.where(inside, 60.0 * t * (2.0 * t - 1.0) * (t - 1.0), 0.0)


GRAD_BOUND_CONST = 15.0 / 8.0   # max of the quintic transition slope


@dataclass(frozen=True)
class BumpSpec:
    """1 on the inner ball, 0 outside the outer ball, quintic in between."""

    center: tuple
    r_inner: float
    r_outer: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        if not (0 < self.r_inner < self.r_outer):
            raise ContractViolation(
                f"need 0 < r_inner < r_outer, got ({self.r_inner}, {self.r_outer})")


def radial_c2_field(center, q, q1, q2, dim: int, **kw) -> ScalarField:
    """Field built from a radial profile q with derivatives q1, q2."""
    center = np.asarray(center, dtype=float)

    def ev(pts):
        return q(np.linalg.norm(pts - center, axis=1))

    def gr(pts):
        d = pts - center
        r = np.linalg.norm(d, axis=1)
        safe = np.where(r > 0, r, 1.0)
        return (q1(r) / safe)[:, None] * d

    def lap(pts):
        r = np.linalg.norm(pts - center, axis=1)
        safe = np.where(r > 0, r, 1.0)
        out = q2(r) + (dim - 1) * q1(r) / safe
        # at the exact center a C^2 radial profile has Laplacian n*q''(0)
        return np.where(r > 0, out, dim * q2(r))

    return ScalarField(dim=dim, evaluator=ev, gradient=gr, laplacian=lap,
                       radial_about=tuple(center), **kw)


def make_bump(spec: BumpSpec, dim: int) -> ScalarField:
    """C^2 bump: 1 on B(center, r_inner), 0 outside B(center, r_outer)."""
    a, b = spec.r_inner, spec.r_outer
    w = b - a

    def q(r):
        return 1.0 - _smoothstep((r - a) / w)

    def q1(r):
        return -_smoothstep_d1((r - a) / w) / w

    def q2(r):
        return -_smoothstep_d2((r - a) / w) / w ** 2

    return radial_c2_field(spec.center, q, q1, q2, dim,
                           support=BallSpec(spec.center, b),
                           name=f"bump(c={spec.center},{a},{b})")


def make_annulus_bump(center, radii: Sequence[float], dim: int) -> ScalarField:
    """1 on the middle annulus, 0 outside [r0, r3]; radii = (r0, r1, r2, r3)."""
    r0, r1, r2, r3 = (float(r) for r in radii)
    if not (0 < r0 < r1 < r2 < r3):
        raise ContractViolation(f"annulus radii must increase, got {radii}")
    w_in, w_out = r1 - r0, r3 - r2

    def q(r):
        return _smoothstep((r - r0) / w_in) * (1.0 - _smoothstep((r - r2) / w_out))

    def q1(r):
        up, dn = _smoothstep((r - r0) / w_in), 1.0 - _smoothstep((r - r2) / w_out)
        return (_smoothstep_d1((r - r0) / w_in) / w_in * dn
                - up * _smoothstep_d1((r - r2) / w_out) / w_out)

    def q2(r):
        up, dn = _smoothstep((r - r0) / w_in), 1.0 - _smoothstep((r - r2) / w_out)
        u1 = _smoothstep_d1((r - r0) / w_in) / w_in
        d1 = -_smoothstep_d1((r - r2) / w_out) / w_out
        u2 = _smoothstep_d2((r - r0) / w_in) / w_in ** 2
        d2 = -_smoothstep_d2((r - r2) / w_out) / w_out ** 2
        return u2 * dn + 2.0 * u1 * d1 + up * d2

    return radial_c2_field(center, q, q1, q2, dim,
                           support=BallSpec(center, r3), support_inner=r0,
                           name=f"annulus(c={tuple(center)},{r0},{r1},{r2},{r3})")


def set_cutoff(center, set_radius: float, margin: float, dim: int) -> ScalarField:
    """Rising cutoff around a closed ball: 0 where dist <= margin/2, 1 where dist >= margin."""
    inner = set_radius + margin / 2.0
    outer = set_radius + margin
    w = outer - inner

    def q(r):
        return _smoothstep((r - inner) / w)

    def q1(r):
        return _smoothstep_d1((r - inner) / w) / w

    def q2(r):
        return _smoothstep_d2((r - inner) / w) / w ** 2

    return radial_c2_field(center, q, q1, q2, dim,
                           name=f"cutoff(rho={set_radius},r={margin})")


def gaussian_field(center, width: float, dim: int, amplitude: float = 1.0) -> ScalarField:
    """amplitude * exp(-|x-c|^2 / (2 width^2)) with analytic derivatives."""
    s2 = width * width

    def q(r):
        return amplitude * np.exp(-r * r / (2 * s2))

    def q1(r):
        return -amplitude * r / s2 * np.exp(-r * r / (2 * s2))

    def q2(r):
        return amplitude * (r * r / s2 - 1.0) / s2 * np.exp(-r * r / (2 * s2))

    return radial_c2_field(center, q, q1, q2, dim,
                           support=BallSpec(center, 9.0 * width),
                           name=f"gaussian(c={tuple(np.atleast_1d(center))},w={width})")


def constant_field(c: float, dim: int) -> ScalarField:
    return ScalarField(
        dim=dim,
        evaluator=lambda pts: np.full(len(pts), float(c)),
        gradient=lambda pts: np.zeros_like(pts),
        laplacian=lambda pts: np.zeros(len(pts)),
        radial_about=(0.0,) * dim,
        tags=frozenset({"subharmonic-claimed"} | ({"negative-claimed"} if c < 0 else set())),
        name=f"const({c})")


def coordinate_field(index: int, dim: int) -> ScalarField:
    """The linear coordinate x_index; harmonic in every dimension."""

    def gr(pts):
        out = np.zeros_like(pts)
        out[:, index] = 1.0
        return out

    return ScalarField(dim=dim, evaluator=lambda pts: pts[:, index].copy(),
                       gradient=gr, laplacian=lambda pts: np.zeros(len(pts)),
                       tags=frozenset({"harmonic-claimed"}), name=f"x{index}")


# ---------------------------------------------------------------------------
# model subharmonic families

def model_subharmonic(name: str, dim: int, **params) -> ScalarField:
    """The negative subharmonic model fields used throughout the checks.

    newtonian:          -|x|^(2-n), n > 2 (distributional Laplacian atom at 0)
    smoothed-newtonian: -(|x|^2 + eps^2)^((2-n)/2), n > 2
    inverse-sqrt:       -(1 + |x|^2)^(-1/2), dimension 3
    log-modulus:        log(|z|^2 + eps^2) - offset on R^2 (one complex slice)
    """
    tags = frozenset({"subharmonic-claimed", "negative-claimed"})
    if name == "newtonian":
        if dim <= 2:
            raise ContractViolation("newtonian family needs dimension > 2")
        n = dim
        sigma = DimensionConstants.for_dim(n).sigma_n
        tiny = params.get("excision", 1e-8)

        def q(r):
            with np.errstate(divide="ignore"):
                return -np.where(r > 0, r, np.nan) ** (2.0 - n)

        def q1(r):
            return (n - 2.0) * np.where(r > 0, r, np.nan) ** (1.0 - n)

        def q2(r):
            return (n - 2.0) * (1.0 - n) * np.where(r > 0, r, np.nan) ** (-n)

        f = radial_c2_field((0.0,) * n, q, q1, q2, n, tags=tags, name=f"newtonian(n={n})",
                            singular_balls=(BallSpec((0.0,) * n, tiny),),
                            point_masses=(((0.0,) * n, (n - 2.0) * sigma),))
        # off the origin the field is harmonic; report exactly zero Laplacian
        object.__setattr__(f, "laplacian", lambda pts: np.zeros(len(np.atleast_2d(pts))))
        return f
    if name == "smoothed-newtonian":
        if dim <= 2:
            raise ContractViolation("smoothed-newtonian family needs dimension > 2")
        n, eps = dim, float(params.get("eps", 0.5))

        def q(r):
            return -(r * r + eps * eps) ** ((2.0 - n) / 2.0)

        def q1(r):
            return (n - 2.0) * r * (r * r + eps * eps) ** (-n / 2.0)

        def q2(r):
            w = r * r + eps * eps
            return (n - 2.0) * (w ** (-n / 2.0) - n * r * r * w ** (-n / 2.0 - 1.0))

        return radial_c2_field((0.0,) * n, q, q1, q2, n, tags=tags,
                               name=f"smoothed-newtonian(n={n},eps={eps})")
    if name == "inverse-sqrt":
        if dim != 3:
            raise ContractViolation("inverse-sqrt family is the dimension-3 model")

        def q(r):
            return -(1.0 + r * r) ** -0.5

        def q1(r):
            return r * (1.0 + r * r) ** -1.5

        def q2(r):
            return (1.0 + r * r) ** -1.5 - 3.0 * r * r * (1.0 + r * r) ** -2.5

        return radial_c2_field((0.0, 0.0, 0.0), q, q1, q2, 3, tags=tags, name="inverse-sqrt")
    if name == "log-modulus":
        if dim != 2:
            raise ContractViolation("log-modulus lives on one complex slice (dimension 2)")
        eps = float(params.get("eps", 0.1))
        off = float(params.get("offset", 3.0))

        def q(r):
            return np.log(r * r + eps * eps) - off

        def q1(r):
            return 2.0 * r / (r * r + eps * eps)

        def q2(r):
            w = r * r + eps * eps
            return 2.0 / w - 4.0 * r * r / w ** 2

        return radial_c2_field((0.0, 0.0), q, q1, q2, 2, tags=tags,
                               name=f"log-modulus(eps={eps},off={off})")
    raise ContractViolation(f"unknown model subharmonic family {name!r}")


@dataclass(frozen=True)
class CertificateVerdict:
    holds: bool
    status: str               # "holds" | "fails" | "inconclusive"
    min_laplacian: float
    samples_used: int


def subharmonic_certificate(field: ScalarField, region: BallSpec, samples: int,
                            seed: int, tol: float = 1e-7) -> CertificateVerdict:
    """Sampled nonnegativity check of the Laplacian outside excised singular balls.

    Point masses in the field registry are nonnegative additions and cannot
    break the verdict; only the smooth part is sampled.
    """
    rng = derive_rng(seed, "subharm_cert")
    pts = sample_in_ball(region, samples, rng)
    keep = ~field.is_singular_at(pts)
    pts = pts[keep]
    if len(pts) == 0:
        return CertificateVerdict(False, "inconclusive", math.nan, 0)
    lap = np.asarray(field.lap(pts), dtype=float)
    finite = np.isfinite(lap)
    if not finite.any():
        return CertificateVerdict(False, "inconclusive", math.nan, 0)
    lap = lap[finite]
    scale = 1.0 + float(np.median(np.abs(lap)))
    lo = float(lap.min())
    ok = lo >= -tol * scale
    return CertificateVerdict(ok, "holds" if ok else "fails", lo, int(finite.sum()))


def negativity_check(field: ScalarField, region: BallSpec, samples: int, seed: int) -> bool:
    rng = derive_rng(seed, "negativity")
    pts = sample_in_ball(region, samples, rng)
    pts = pts[~field.is_singular_at(pts)]
    vals = np.asarray(field(pts), dtype=float)
    return bool(np.all(vals[np.isfinite(vals)] < 0))


# ---------------------------------------------------------------------------
# field algebra (symmetry-preserving where it can be)

def field_compose_scalar(f: ScalarField, g, g1, g2, name=None) -> ScalarField:
    """g(f(x)) with chain-rule derivatives; keeps f's symmetry and support."""

    def ev(pts):
        return g(f(pts))

    def gr(pts):
        return g1(f(pts))[:, None] * f.grad(pts)

    def lap(pts):
        v = f(pts)
        gv = f.grad(pts)
        return g2(v) * np.sum(gv * gv, axis=1) + g1(v) * f.lap(pts)

    return ScalarField(dim=f.dim, evaluator=ev, gradient=gr, laplacian=lap,
                       radial_about=f.radial_about, support=f.support,
                       support_inner=f.support_inner,
                       singular_balls=f.singular_balls,
                       name=name or f"compose({f.name})")


def field_neg_power(psi: ScalarField, gamma: float, name=None) -> ScalarField:
    """|psi|^gamma = (-psi)^gamma for negative fields."""
    return field_compose_scalar(
        psi,
        lambda v: np.abs(v) ** gamma,
        lambda v: -gamma * np.abs(v) ** (gamma - 1.0) * np.sign(v),
        lambda v: gamma * (gamma - 1.0) * np.abs(v) ** (gamma - 2.0),
        name=name or f"|{psi.name}|^{gamma}")


def field_rescale_argument(f: ScalarField, s: float) -> ScalarField:
    """x -> f(s x); support and symmetry center shrink by 1/s."""
    if s <= 0:
        raise ContractViolation("rescale factor must be positive")

    def ev(pts):
        return f(pts * s)

    def gr(pts):
        return s * f.grad(pts * s)

    def lap(pts):
        return s * s * f.lap(pts * s)

    sup = None
    if f.support is not None:
        sup = BallSpec(tuple(np.asarray(f.support.center) / s), f.support.radius / s)
    rad = None if f.radial_about is None else tuple(np.asarray(f.radial_about) / s)
    return ScalarField(dim=f.dim, evaluator=ev, gradient=gr, laplacian=lap,
                       radial_about=rad, support=sup, name=f"{f.name}@scale{s}")


def validate_support(field: ScalarField, samples: int = 2048, seed: int = 11) -> bool:
    """Declared support must contain all nonzero samples (probed on a wide ball)."""
    if field.support is None:
        return True
    wide = BallSpec(field.support.center, 2.5 * field.support.radius)
    rng = derive_rng(seed, "support_check")
    pts = sample_in_ball(wide, samples, rng)
    vals = np.asarray(field(pts), dtype=float)
    outside = ~field.support.contains_points(pts)
    return bool(np.all(np.abs(vals[outside]) <= 1e-13))


# ---------------------------------------------------------------------------
# weights and eta families

@dataclass(frozen=True)
class WeightPair:
    """Weights (omega, omega') with the exponent alpha and its dual."""

    omega: ScalarField
    omega_prime: ScalarField
    alpha: float
    alpha_dual: float

    def __post_init__(self):
        if self.alpha < 1:
            raise ContractViolation("alpha must be >= 1")
        if abs(1.0 / self.alpha + 1.0 / self.alpha_dual - 1.0) > 1e-12:
            raise ContractViolation("alpha_dual inconsistent with alpha")


def hardy_weight_pair(n: int) -> WeightPair:
    """alpha = 2, omega = ((n-2)/2)^2 |x|^-2, omega' = 1."""
    if n <= 2:
        raise ContractViolation("the |x|^-2 weight pair needs n > 2")
    c = (n - 2.0) ** 2 / 4.0

    def ev(pts):
        r2 = np.sum(pts * pts, axis=1)
        return c / r2

    omega = ScalarField(dim=n, evaluator=ev, radial_about=(0.0,) * n,
                        singular_balls=(BallSpec((0.0,) * n, 1e-10),), name="hardy-weight")
    return WeightPair(omega=omega, omega_prime=constant_field(1.0, n),
                      alpha=2.0, alpha_dual=2.0)


@dataclass(frozen=True)
class EtaFunction:
    """A positive C^1 reweighting function with positive derivative.

    domain_sign records whether arguments must be positive ("positive-arg")
    or may range over the whole line ("negative-arg" allowed). eta_infinity
    is the limit at +infinity, used when distributional atoms meet 1/eta.
    """

    eta: Callable
    eta_prime: Callable
    domain_sign: str
    gamma: Optional[float] = None
    eta_infinity: float = math.inf
    label: str = "eta"

    def __post_init__(self):
        if self.domain_sign not in ("positive-arg", "negative-arg"):
            raise ContractViolation(f"unknown domain_sign {self.domain_sign!r}")
        lo = 1e-3 if self.domain_sign == "positive-arg" else -50.0
        grid = np.linspace(lo, 50.0, 257)
        if not np.all(np.asarray(self.eta(grid)) > 0):
            raise ContractViolation("eta must be positive on its domain")
        if not np.all(np.asarray(self.eta_prime(grid)) > 0):
            raise ContractViolation("eta_prime must be positive on its domain")

    def check_args(self, t: np.ndarray):
        if self.domain_sign == "positive-arg" and np.any(t <= 0):
            raise ContractViolation(
                f"eta family {self.label!r} requires positive arguments")


def eta_identity() -> EtaFunction:
    return EtaFunction(eta=lambda t: np.asarray(t, dtype=float),
                       eta_prime=lambda t: np.ones_like(np.asarray(t, dtype=float)),
                       domain_sign="positive-arg", label="t")


def eta_power(alpha: float) -> EtaFunction:
    if not (0 < alpha <= 1):
        raise ContractViolation("power family uses 0 < alpha <= 1")
    return EtaFunction(eta=lambda t: np.asarray(t, dtype=float) ** alpha,
                       eta_prime=lambda t: alpha * np.asarray(t, dtype=float) ** (alpha - 1.0),
                       domain_sign="positive-arg", label=f"t^{alpha}")


def eta_arctan() -> EtaFunction:
    return EtaFunction(eta=lambda t: math.pi + np.arctan(np.asarray(t, dtype=float)),
                       eta_prime=lambda t: 1.0 / (1.0 + np.asarray(t, dtype=float) ** 2),
                       domain_sign="negative-arg", eta_infinity=1.5 * math.pi,
                       label="pi+arctan(t)")


ETA_FAMILIES = {
    "t": eta_identity,
    "sqrt": lambda: eta_power(0.5),
    "arctan": eta_arctan,
}


# ---------------------------------------------------------------------------
# catalog and seeded corpora

def _catalog_gaussian(dim, center=None, width=1.0, **_):
    c = (0.0,) * dim if center is None else tuple(center)
    return gaussian_field(c, width, dim)


def _catalog_bump(dim, center=None, r_inner=1.0, r_outer=2.0, **_):
    c = (0.0,) * dim if center is None else tuple(center)
    return make_bump(BumpSpec(c, r_inner, r_outer), dim)


FIELD_CATALOG = {
    "newtonian": lambda dim, **p: model_subharmonic("newtonian", dim, **p),
    "smoothed-newtonian": lambda dim, **p: model_subharmonic("smoothed-newtonian", dim, **p),
    "inverse-sqrt": lambda dim, **p: model_subharmonic("inverse-sqrt", dim, **p),
    "log-modulus": lambda dim, **p: model_subharmonic("log-modulus", dim, **p),
    "gaussian": _catalog_gaussian,
    "bump": _catalog_bump,
    "constant": lambda dim, value=1.0, **_: constant_field(value, dim),
}


def field_from_catalog(name: str, dim: int, **params) -> ScalarField:
    if name not in FIELD_CATALOG:
        raise ContractViolation(f"unknown field family {name!r}; "
                                f"known: {sorted(FIELD_CATALOG)}")
    return FIELD_CATALOG[name](dim, **params)


def corpus_phi(n: int, count: int, seed: int, keep_off_origin: float = 0.0) -> list:
    """Seeded mix of bumps and Gaussians used by the randomized inequality runs.

    keep_off_origin > 0 forces supports at least that far from the origin
    (needed when the paired weight or psi is singular there).
    """
    rng = derive_rng(seed, "corpus_phi", n)
    out = []
    for _ in range(count):
        if keep_off_origin > 0:
            # compactly supported, with the whole support kept clear of the origin
            r_in = rng.uniform(0.1, 0.4)
            r_out = r_in + rng.uniform(0.15, 0.5)
            direction = rng.standard_normal(n)
            direction /= np.linalg.norm(direction)
            center = (keep_off_origin + r_out + rng.uniform(0.05, 0.8)) * direction
            out.append(make_bump(BumpSpec(tuple(center), r_in, r_out), n))
            continue
        center = rng.uniform(-1.5, 1.5, size=n)
        if rng.random() < 0.5:
            r_in = rng.uniform(0.15, 0.8)
            r_out = r_in + rng.uniform(0.2, 1.0)
            out.append(make_bump(BumpSpec(tuple(center), r_in, r_out), n))
        else:
            width = rng.uniform(0.25, 0.8)
            out.append(gaussian_field(tuple(center), width, n))
    return out
