"""Bessel series with certified truncation, root bracketing, and the first
nonzero Neumann eigenvalue of the unit ball.

Evaluation is series-only: every root needed lies where the power series is
stable in double precision, and the truncation remainder is certified by a
geometric tail bound checked at construction. Roots come from bisection inside
sign-change brackets, with a sign scan confirming each root is the lowest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .quadcore import BracketFailure, ContractViolation

BISECT_TOL = 1e-12
SCAN_STEP = 1e-3


def gamma_real(x: float) -> float:
    """Gamma for the orders used here: exact sqrt(pi) recursion on half-integers,
    library (Lanczos-class, <= 1e-13 relative) elsewhere."""
    two_x = 2.0 * x
    if two_x == int(two_x) and x > 0:
        if x == int(x):
            return math.factorial(int(x) - 1)
        g = math.sqrt(math.pi)   # Gamma(1/2)
        t = 0.5
        while t < x - 0.25:
            g *= t
            t += 1.0
        return g
    return math.gamma(x)


@dataclass(frozen=True)
class BesselEval:
    """Truncated power series for J_nu certified on [0, x_max].

    remainder_bound dominates the truncation error of both the value and the
    term-wise derivative series for every |x| <= x_max.
    """

    nu: float
    trunc_terms: int
    x_max: float
    remainder_bound: float

    @classmethod
    def build(cls, nu: float, x_max: float = 22.0, target: float = 1e-13) -> "BesselEval":
        if nu < 0:
            raise ContractViolation("series evaluator requires order nu >= 0")
        half = x_max / 2.0
        # value-series term at x_max via the stable term recursion
        t = half ** nu / gamma_real(nu + 1.0)
        k = 0
        while k < 400:
            ratio = half * half / ((k + 1.0) * (k + 1.0 + nu))
            # derivative-series terms carry an extra (2k+nu)/x factor; the
            # bound below covers both series once the ratio is under 1/2
            if ratio < 0.5 and k >= 1:
                deriv_factor = (2.0 * k + nu) / max(x_max, 1e-9) + 2.0 / max(x_max, 1e-9)
                tail = t * (1.0 + deriv_factor) / (1.0 - 2.0 * ratio)
                if tail <= target:
                    return cls(nu=nu, trunc_terms=k + 1, x_max=x_max, remainder_bound=tail)
            t *= ratio
            k += 1
        raise ContractViolation(
            f"could not certify truncation for nu={nu}, x_max={x_max}")


def _series_terms(ev: BesselEval, x: np.ndarray):
    """Signed terms t_k(x) of the value series, shape (K, len(x))."""
    x = np.asarray(x, dtype=float)
    half = x / 2.0
    with np.errstate(divide="ignore"):
        t = np.where(half > 0, half ** ev.nu, 1.0 if ev.nu == 0 else 0.0)
    t = t / gamma_real(ev.nu + 1.0)
    terms = np.empty((ev.trunc_terms, len(x)))
    for k in range(ev.trunc_terms):
        terms[k] = t
        t = t * (-(half * half) / ((k + 1.0) * (k + 1.0 + ev.nu)))
    return terms


def bessel_j(ev: BesselEval, x) -> np.ndarray | float:
    """Truncated series value of J_nu; |error| <= ev.remainder_bound."""
    scalar = np.isscalar(x)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0) or np.any(x > ev.x_max):
        raise ContractViolation(f"x outside certified range [0, {ev.x_max}]")
    out = _series_terms(ev, x).sum(axis=0)
    return float(out[0]) if scalar else out


def bessel_j_prime(ev: BesselEval, x) -> np.ndarray | float:
    """Term-wise differentiated series; same certification discipline."""
    scalar = np.isscalar(x)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0) or np.any(x > ev.x_max):
        raise ContractViolation(f"x outside certified range [0, {ev.x_max}]")
    terms = _series_terms(ev, x)
    k = np.arange(ev.trunc_terms, dtype=float)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        dterms = terms * (2.0 * k + ev.nu) / x[None, :]
    out = dterms.sum(axis=0)
    if np.any(x == 0.0):
        # only the exponent-one term survives differentiation at the origin
        at0 = 0.5 if ev.nu == 1.0 else 0.0
        if 0.0 < ev.nu < 1.0:
            raise ContractViolation("derivative series is singular at x = 0 for 0 < nu < 1")
        out = np.where(x == 0.0, at0, out)
    return float(out[0]) if scalar else out


@lru_cache(maxsize=128)
def _cached_eval(nu: float, x_max: float = 22.0) -> BesselEval:
    return BesselEval.build(nu, x_max=x_max)


def functional_equation_residual(nu: float, x: float) -> tuple:
    """Residuals of the two order-raising identities linking J_nu to J_{nu+2}.

    res_a checks the derivative identity, res_b the value identity; both are
    exact relations, so residuals are pure numerics.
    """
    if x <= 0:
        raise ContractViolation("residuals need x > 0")
    ev0 = _cached_eval(nu)
    ev2 = _cached_eval(nu + 2.0)
    j0, j0p = bessel_j(ev0, x), bessel_j_prime(ev0, x)
    j2, j2p = bessel_j(ev2, x), bessel_j_prime(ev2, x)
    pref = 2.0 * (nu + 1.0) / x
    rhs_a = pref * (1.0 - nu * (nu + 2.0) / x ** 2) * j0 \
        - (1.0 - 2.0 * (nu + 1.0) * (nu + 2.0) / x ** 2) * j0p
    rhs_b = -(1.0 - 2.0 * nu * (nu + 1.0) / x ** 2) * j0 - pref * j0p
    return abs(j2p - rhs_a), abs(j2 - rhs_b)


@dataclass(frozen=True)
class RootBracket:
    """A sign-change certificate lo < hi with f(lo) f(hi) < 0."""

    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise ContractViolation("bracket endpoints out of order")
        if not (self.f_lo * self.f_hi < 0):
            raise BracketFailure(
                f"no sign change on bracket ({self.lo}, {self.hi}): "
                f"f(lo)={self.f_lo:.3g}, f(hi)={self.f_hi:.3g}")


def _neumann_fn(n: int):
    ev = _cached_eval(n / 2.0)

    def g(x):
        return x * bessel_j_prime(ev, x) - (n / 2.0 - 1.0) * bessel_j(ev, x)

    return g


def default_bracket(kind: str, order: float) -> tuple:
    """Certified search intervals: the classical root bounds for J and J',
    and the eigenvalue bracket for the Neumann equation."""
    if kind == "J":
        return math.sqrt(order * (order + 2.0)), math.sqrt(2.0 * (order + 1.0) * (order + 3.0))
    if kind == "Jprime":
        return math.sqrt(order * (order + 2.0)), math.sqrt(2.0 * order * (order + 1.0))
    if kind == "neumann":
        n = int(order)
        return (math.sqrt((n + 2.0) * (n + 4.0) / (n + 6.0)), math.sqrt(n + 2.0))
    raise ContractViolation(f"unknown root kind {kind!r}")


def lowest_root(kind: str, order: float, hint: RootBracket | None = None) -> float:
    """Bisection to 1e-12 for the lowest positive root of J_nu, J'_nu, or the
    Neumann boundary equation; a 1e-3-step sign scan below the root certifies
    that no earlier crossing was skipped."""
    if kind == "J":
        ev = _cached_eval(order)
        fn = lambda x: bessel_j(ev, x)
    elif kind == "Jprime":
        if order <= 0:
            raise ContractViolation("the J' bracket degenerates at order 0")
        ev = _cached_eval(order)
        fn = lambda x: bessel_j_prime(ev, x)
    elif kind == "neumann":
        fn = _neumann_fn(int(order))
    else:
        raise ContractViolation(f"unknown root kind {kind!r}")

    if hint is not None:
        lo, hi = hint.lo, hint.hi
    else:
        lo, hi = default_bracket(kind, order)
        lo = max(lo, 0.05)
    bracket = RootBracket(lo=lo, hi=hi, f_lo=float(fn(lo)), f_hi=float(fn(hi)))

    a, b, fa = bracket.lo, bracket.hi, bracket.f_lo
    while b - a > BISECT_TOL:
        m = 0.5 * (a + b)
        fm = float(fn(m))
        if fm == 0.0:
            a = b = m
            break
        if fa * fm < 0:
            b = m
        else:
            a, fa = m, fm
    root = 0.5 * (a + b)

    # certify lowest: no sign change from near zero up to just below the root
    scan_lo = min(0.05, root / 2.0)
    grid = np.arange(scan_lo, root - SCAN_STEP, SCAN_STEP)
    if len(grid) > 1:
        vals = np.asarray(fn(grid), dtype=float)
        if np.any(vals[:-1] * vals[1:] < 0):
            raise BracketFailure(
                f"sign change below the reported root for {kind}({order})")
    return root


@dataclass(frozen=True)
class EigenResult:
    """First nonzero Neumann eigenvalue of the unit ball with its certificates."""

    n: int
    mu_n: float
    root: float
    residual: float
    bracket_lo: float
    bracket_hi: float

    def __post_init__(self):
        if not (self.bracket_lo < self.mu_n < self.bracket_hi):
            raise BracketFailure(
                f"mu_{self.n} = {self.mu_n} escapes ({self.bracket_lo}, {self.bracket_hi})")
        if not (self.residual < 1e-10):
            raise BracketFailure(f"defining-equation residual too large: {self.residual}")

    def to_dict(self) -> dict:
        return {"n": self.n, "mu_n": self.mu_n, "root": self.root,
                "residual": self.residual, "bracket_lo": self.bracket_lo,
                "bracket_hi": self.bracket_hi}


def neumann_eigenvalue(n: int) -> EigenResult:
    """mu_n as the squared lowest positive root of the boundary equation.

    Also verifies mu_n sits below the first Dirichlet eigenvalue of the ball,
    which is the squared lowest root of J_{n/2-1}.
    """
    if n < 2:
        raise ContractViolation("dimension must be >= 2")
    root = lowest_root("neumann", n)
    mu = root * root
    residual = abs(_neumann_fn(n)(root))
    blo = (n + 2.0) * (n + 4.0) / (n + 6.0)
    bhi = float(n + 2)
    result = EigenResult(n=n, mu_n=mu, root=root, residual=residual,
                         bracket_lo=blo, bracket_hi=bhi)
    j_dir = lowest_root("J", n / 2.0 - 1.0)
    if not (mu < j_dir ** 2):
        raise BracketFailure(
            f"mu_{n} = {mu} not below the first Dirichlet eigenvalue {j_dir ** 2}")
    return result


def bessel_ode_residual(n: int, x) -> np.ndarray:
    """Plug x^(1-n/2) J_{n/2}(x) into the radial equation
    y'' + (n-1)/x y' + (1 - (n-1)/x^2) y and return |residual|."""
    ev = _cached_eval(n / 2.0)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    nu = n / 2.0
    j = np.asarray(bessel_j(ev, x))
    jp = np.asarray(bessel_j_prime(ev, x))
    # second derivative from the defining equation of J_nu itself
    jpp = -jp / x - (1.0 - nu ** 2 / x ** 2) * j
    a = 1.0 - nu
    y = x ** a * j
    yp = x ** a * (a * j / x + jp)
    ypp = x ** a * (a * (a - 1.0) * j / x ** 2 + 2.0 * a * jp / x + jpp)
    return np.abs(ypp + (n - 1.0) / x * yp + (1.0 - (n - 1.0) / x ** 2) * y)
