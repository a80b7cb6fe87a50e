"""Deterministic integration over balls, spheres and annuli, plus seeded ball sampling.

Every downstream check measures through this module, so the contracts here are
strict: identical seeds give bit-identical results, every value carries an error
estimate, and integrals that cannot meet their error budget raise instead of
returning garbage.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field, replace
from heapq import heappush, heappop
from typing import Callable

import numpy as np


class ContractViolation(ValueError):
    """An operation was called outside its documented preconditions."""


class DivergedIntegral(ArithmeticError):
    """The error budget could not be met within the sample budget."""


class PoisonedIntegrand(ArithmeticError):
    """Too many non-finite samples for the estimate to be trusted."""


class BracketFailure(ArithmeticError):
    """A certified sign-change bracket did not contain a sign change."""


def derive_rng(seed: int, *salts) -> np.random.Generator:
    """Deterministic per-task generator: the master seed plus stable salts.

    Strings are hashed with crc32 so the derivation does not depend on
    PYTHONHASHSEED; parallel and serial sweeps see identical streams.
    """
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for s in salts:
        if isinstance(s, (int, np.integer)):
            words.append(int(s) & 0xFFFFFFFF)
        elif isinstance(s, str):
            words.append(zlib.crc32(s.encode()))
        else:
            words.append(zlib.crc32(repr(s).encode()))
    return np.random.default_rng(np.random.SeedSequence(words))


@dataclass(frozen=True)
class DimensionConstants:
    """Unit sphere area and unit ball volume in R^n."""

    n: int
    sigma_n: float
    omega_n: float

    @classmethod
    def for_dim(cls, n: int) -> "DimensionConstants":
        if n < 1:
            raise ContractViolation(f"dimension must be >= 1, got {n}")
        sigma = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
        return cls(n=n, sigma_n=sigma, omega_n=sigma / n)


@dataclass(frozen=True)
class BallSpec:
    """A ball in R^n given by center and radius."""

    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ContractViolation(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def center_arr(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)

    def volume(self) -> float:
        return DimensionConstants.for_dim(self.dim).omega_n * self.radius ** self.dim

    def scaled(self, c: float) -> "BallSpec":
        """The ball with the same center and radius expanded by the factor c."""
        return BallSpec(self.center, c * self.radius)

    def contains_ball(self, other: "BallSpec", tol: float = 1e-12) -> bool:
        d = float(np.linalg.norm(self.center_arr - other.center_arr))
        return d + other.radius <= self.radius + tol

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        return np.linalg.norm(pts - self.center_arr, axis=-1) <= self.radius


@dataclass(frozen=True)
class QuadratureSpec:
    """Budget and mode for one integration task.

    max_samples caps integrand evaluations for the adaptive rule and is the
    sample count for Monte Carlo. Identical (spec, inputs) pairs reproduce
    results bit-for-bit.
    """

    mode: str = "adaptive-radial"
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_samples: int = 16384
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("adaptive-radial", "monte-carlo"):
            raise ContractViolation(f"unknown quadrature mode {self.mode!r}")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ContractViolation("tolerances must be positive")
        if self.max_samples < 1:
            raise ContractViolation("max_samples must be >= 1")

    def with_seed(self, seed: int) -> "QuadratureSpec":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class MeasuredValue:
    """A real number with a nonnegative error estimate."""

    value: float
    err: float

    def __post_init__(self):
        if not (self.err >= 0):
            raise ContractViolation(f"error estimate must be >= 0, got {self.err}")

    def __add__(self, other: "MeasuredValue") -> "MeasuredValue":
        return MeasuredValue(self.value + other.value, self.err + other.err)

    def __sub__(self, other: "MeasuredValue") -> "MeasuredValue":
        return MeasuredValue(self.value - other.value, self.err + other.err)

    def scale(self, c: float) -> "MeasuredValue":
        return MeasuredValue(c * self.value, abs(c) * self.err)


# Nested Gauss pair used per panel: error is estimated from the difference of
# a 10-point and a 21-point Gauss-Legendre rule on the same panel.
_GL_LO = np.polynomial.legendre.leggauss(10)
_GL_HI = np.polynomial.legendre.leggauss(21)


def _panel_estimates(fn, a: float, b: float):
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    x_lo = mid + half * _GL_LO[0]
    x_hi = mid + half * _GL_HI[0]
    with np.errstate(all="ignore"):
        y_lo = np.asarray(fn(x_lo), dtype=float)
        y_hi = np.asarray(fn(x_hi), dtype=float)
    if not (np.all(np.isfinite(y_lo)) and np.all(np.isfinite(y_hi))):
        raise PoisonedIntegrand(f"non-finite integrand values on panel ({a}, {b})")
    i_lo = half * float(np.dot(_GL_LO[1], y_lo))
    i_hi = half * float(np.dot(_GL_HI[1], y_hi))
    return i_hi, abs(i_hi - i_lo)


def integrate_interval(fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
                       spec: QuadratureSpec) -> MeasuredValue:
    """Adaptive 1-D integral of a vectorized integrand on (lo, hi); hi may be inf.

    Improper upper limits are mapped by t = lo + s/(1-s). Panels are bisected
    worst-first until the summed error estimate meets rel_tol*|I| + abs_tol;
    running out of evaluation budget raises DivergedIntegral.
    """
    if not (lo < hi):
        raise ContractViolation(f"need lo < hi, got ({lo}, {hi})")
    if math.isinf(hi):
        base, r0 = fn, lo

        def fn_mapped(s):
            t = r0 + s / (1.0 - s)
            return base(t) / (1.0 - s) ** 2

        fn, lo, hi = fn_mapped, 0.0, 1.0

    evals = 0
    heap = []
    counter = 0
    total = MeasuredValue(0.0, 0.0)
    # seed with a handful of panels so sharp interior features are seen early
    edges = np.linspace(lo, hi, 9)
    value = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        i, e = _panel_estimates(fn, a, b)
        evals += 31
        value += i
        heappush(heap, (-e, counter, a, b, i)); counter += 1
    err = sum(-h[0] for h in heap)
    while err > spec.rel_tol * abs(value) + spec.abs_tol:
        if evals >= spec.max_samples * 31:
            raise DivergedIntegral(
                f"error budget not met within sample budget (err={err:.3g}, value={value:.6g})")
        neg_e, _, a, b, i_old = heappop(heap)
        m = 0.5 * (a + b)
        i1, e1 = _panel_estimates(fn, a, m)
        i2, e2 = _panel_estimates(fn, m, b)
        evals += 62
        value += i1 + i2 - i_old
        heappush(heap, (-e1, counter, a, m, i1)); counter += 1
        heappush(heap, (-e2, counter, m, b, i2)); counter += 1
        err = sum(-h[0] for h in heap)
    return MeasuredValue(value, err)


def integrate_radial(profile: Callable[[np.ndarray], np.ndarray], dims: DimensionConstants,
                     r_lo: float, r_hi: float, spec: QuadratureSpec) -> MeasuredValue:
    """sigma_n * integral of profile(t) * t^(n-1) over (r_lo, r_hi).

    The surface-area reduction for radial integrands over balls and annuli.
    Endpoint singularities up to t^-(n-1+delta), delta < 1, are absorbed by
    the adaptive subdivision.
    """
    if r_lo < 0 or not (r_lo < r_hi):
        raise ContractViolation(f"need 0 <= r_lo < r_hi, got ({r_lo}, {r_hi})")
    n = dims.n

    def weighted(t):
        t = np.asarray(t, dtype=float)
        return np.asarray(profile(t), dtype=float) * t ** (n - 1)

    try:
        out = integrate_interval(weighted, r_lo, r_hi, spec)
    except (PoisonedIntegrand, DivergedIntegral):
        if r_lo != 0.0:
            raise
        # an integrable endpoint singularity near t^-n defeats the linear
        # rule (panels would have to shrink past denormals); restate the
        # inner part in the log variable, where it decays exponentially,
        # stop where the profile itself overflows, and extrapolate the
        # remaining tail from the local power law
        def log_weighted(w):
            w = np.asarray(w, dtype=float)
            t = np.exp(w)
            with np.errstate(all="ignore"):
                return np.asarray(weighted(t), dtype=float) * t

        split = 1.0 if (math.isinf(r_hi) or r_hi > 1.0) else r_hi
        w_hi = math.log(split)
        w_lo = w_hi - 5.0
        tail_pair = log_weighted(np.array([w_lo, w_lo + 2.0]))
        for width in (10.0, 20.0, 40.0, 80.0, 160.0, 320.0, 640.0):
            probe = log_weighted(np.array([w_hi - width, w_hi - width + 2.0]))
            if not np.all(np.isfinite(probe)):
                break
            w_lo, tail_pair = w_hi - width, probe
        out = integrate_interval(log_weighted, w_lo, w_hi, spec)
        g0, g1 = float(tail_pair[0]), float(tail_pair[1])
        if g0 > 0.0:
            if not (g1 > g0):
                raise DivergedIntegral(
                    "endpoint singularity at or beyond the integrability border")
            beta = (math.log(g1) - math.log(g0)) / 2.0
            if beta <= 1e-3:
                raise DivergedIntegral(
                    "endpoint singularity at or beyond the integrability border")
            tail = g0 / beta
            out = MeasuredValue(out.value + tail, out.err + 0.5 * tail)
        if r_hi > split:
            out = out + integrate_interval(weighted, split, r_hi, spec)
    return out.scale(dims.sigma_n)


def sample_in_ball(ball: BallSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points in a ball: normalized Gaussian direction times U^(1/n) radius."""
    n = ball.dim
    g = rng.standard_normal((count, n))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    # probability of an exactly-zero Gaussian vector is zero; guard regardless
    norms[norms == 0.0] = 1.0
    u = rng.random((count, 1)) ** (1.0 / n)
    return ball.center_arr + ball.radius * u * (g / norms)


def mc_mean(values: np.ndarray, poison_fraction: float = 1e-3):
    """Mean and standard error of MC samples with a non-finite-sample guard."""
    finite = np.isfinite(values)
    bad = values.size - int(finite.sum())
    if bad > max(1, poison_fraction * values.size):
        raise PoisonedIntegrand(f"{bad}/{values.size} non-finite integrand samples")
    vals = values[finite]
    mean = float(vals.mean())
    sem = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return mean, sem


def integrate_ball(field, ball: BallSpec, spec: QuadratureSpec) -> MeasuredValue:
    """Integral of a scalar field over a ball.

    Radial fast path when the field declares radial symmetry about the ball
    center; otherwise seeded Monte Carlo, uniform in the ball, with the
    standard error reported.
    """
    if field.dim != ball.dim:
        raise ContractViolation(
            f"field dimension {field.dim} != ball dimension {ball.dim}")
    dims = DimensionConstants.for_dim(ball.dim)
    center = ball.center_arr
    if field.radial_about is not None and np.allclose(field.radial_about, center, atol=1e-14):
        e1 = np.zeros(ball.dim); e1[0] = 1.0

        def profile(t):
            pts = center[None, :] + np.outer(np.atleast_1d(t), e1)
            return field(pts)

        return integrate_radial(profile, dims, 0.0, ball.radius, spec)
    rng = derive_rng(spec.seed, "integrate_ball")
    pts = sample_in_ball(ball, spec.max_samples, rng)
    mean, sem = mc_mean(np.asarray(field(pts), dtype=float))
    vol = ball.volume()
    return MeasuredValue(mean * vol, sem * vol)


def sphere_directions(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((count, n))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return g / norms


def sphere_mean(field, center, r: float, spec: QuadratureSpec) -> MeasuredValue:
    """Mean of the field over the sphere of radius r about center."""
    if r <= 0:
        raise ContractViolation(f"sphere radius must be positive, got {r}")
    center = np.asarray(center, dtype=float)
    if field.dim != center.size:
        raise ContractViolation("field dimension does not match center")
    if field.radial_about is not None and np.allclose(field.radial_about, center, atol=1e-14):
        e1 = np.zeros(field.dim); e1[0] = 1.0
        val = float(np.asarray(field((center + r * e1)[None, :]))[0])
        return MeasuredValue(val, 0.0)
    rng = derive_rng(spec.seed, "sphere_mean")
    dirs = sphere_directions(field.dim, spec.max_samples, rng)
    vals = np.asarray(field(center[None, :] + r * dirs), dtype=float)
    mean, sem = mc_mean(vals)
    return MeasuredValue(mean, sem)


def sample_balls(domain: BallSpec, count: int, seed: int,
                 radius_range: tuple) -> list:
    """Seeded list of balls inside the domain.

    Radii are log-uniform in radius_range and centers uniform in the domain
    shrunk by each radius, so every sampled ball fits inside the domain.
    """
    r_lo, r_hi = float(radius_range[0]), float(radius_range[1])
    if not (0 < r_lo <= r_hi):
        raise ContractViolation(f"radius_range must be positive and ordered, got {radius_range}")
    if r_hi > domain.radius:
        raise ContractViolation(
            f"radius_range upper end {r_hi} exceeds domain radius {domain.radius}")
    if count < 0:
        raise ContractViolation("count must be >= 0")
    rng = derive_rng(seed, "sample_balls")
    out = []
    n = domain.dim
    for _ in range(count):
        rho = math.exp(rng.uniform(math.log(r_lo), math.log(r_hi)))
        slack = domain.radius - rho
        if slack <= 0:
            center = domain.center_arr
        else:
            g = rng.standard_normal(n)
            nrm = np.linalg.norm(g)
            if nrm == 0.0:
                nrm = 1.0
            center = domain.center_arr + slack * rng.random() ** (1.0 / n) * g / nrm
        out.append(BallSpec(tuple(center), rho))
    return out
