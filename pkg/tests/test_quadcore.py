"""Integration substrate: closed-form values, invariants, determinism."""

import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from hslab.quadcore import (BallSpec, ContractViolation, DimensionConstants,
                            DivergedIntegral, MeasuredValue, QuadratureSpec,
                            derive_rng, integrate_ball, integrate_interval,
                            integrate_radial, sample_balls, sample_in_ball,
                            sphere_mean)
from hslab.funcspace import ScalarField, gaussian_field, model_subharmonic

SPEC = QuadratureSpec(rel_tol=1e-11, abs_tol=1e-13, max_samples=200000)
MC = QuadratureSpec(mode="monte-carlo", max_samples=2 ** 15, seed=77)


def test_dimension_constants():
    d3 = DimensionConstants.for_dim(3)
    assert d3.sigma_n == pytest.approx(4.0 * math.pi, rel=1e-14)
    for n in range(2, 13):
        d = DimensionConstants.for_dim(n)
        assert d.sigma_n > 0
        assert d.omega_n == pytest.approx(d.sigma_n / n, rel=1e-14)


def test_integrate_radial_unit_ball_volume():
    d3 = DimensionConstants.for_dim(3)
    out = integrate_radial(lambda t: np.ones_like(t), d3, 0.0, 1.0, SPEC)
    assert out.value == pytest.approx(4.0 * math.pi / 3.0, abs=1e-10)


def test_integrate_radial_endpoint_singularity():
    # profile t^-2 against t^2 is constant: the integral is sigma_3 exactly
    d3 = DimensionConstants.for_dim(3)
    out = integrate_radial(lambda t: t ** -2.0, d3, 0.0, 1.0, SPEC)
    assert out.value == pytest.approx(4.0 * math.pi, rel=1e-10)


def test_integrate_radial_gaussian_improper():
    d3 = DimensionConstants.for_dim(3)
    out = integrate_radial(lambda t: np.exp(-t * t), d3, 0.0, math.inf, SPEC)
    # oracle: 1-D quadrature of the same reduction via an independent library
    oracle = 4.0 * math.pi * sp_integrate.quad(lambda t: math.exp(-t * t) * t * t,
                                               0, math.inf)[0]
    assert oracle == pytest.approx(math.pi ** 1.5, rel=1e-10)
    assert out.value == pytest.approx(oracle, rel=1e-9)
    assert out.err <= SPEC.rel_tol * abs(out.value) + SPEC.abs_tol


def test_integrate_radial_rejects_bad_range():
    d3 = DimensionConstants.for_dim(3)
    with pytest.raises(ContractViolation):
        integrate_radial(lambda t: t, d3, 1.0, 0.5, SPEC)


def test_non_integrable_singularity_diverges():
    d3 = DimensionConstants.for_dim(3)
    tight = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-14, max_samples=3000)
    with pytest.raises((DivergedIntegral, ArithmeticError)):
        integrate_radial(lambda t: t ** -4.2, d3, 0.0, 1.0, tight)


def test_integrate_ball_constant_field():
    ball = BallSpec((0.3, -0.2, 0.5), 1.7)
    c = 2.75
    field = ScalarField(3, lambda p: np.full(len(p), c))
    out = integrate_ball(field, ball, MC)
    assert out.value == pytest.approx(c * ball.volume(), rel=1e-12)


def test_integrate_ball_log_field_closed_form():
    # ball average of log 1/|x| over the unit ball is 1/n
    field = ScalarField(3, lambda p: -np.log(np.linalg.norm(p, axis=1)),
                        radial_about=(0.0, 0.0, 0.0))
    out = integrate_ball(field, BallSpec((0.0, 0.0, 0.0), 1.0), SPEC)
    vol = 4.0 * math.pi / 3.0
    assert out.value == pytest.approx(vol / 3.0, abs=1e-8)


def test_integrate_ball_radial_oracle():
    # |x| over the unit ball: sigma_3 * int t^3 = pi
    field = ScalarField(3, lambda p: np.linalg.norm(p, axis=1),
                        radial_about=(0.0, 0.0, 0.0))
    out = integrate_ball(field, BallSpec((0.0, 0.0, 0.0), 1.0), SPEC)
    assert out.value == pytest.approx(math.pi, rel=1e-10)


def test_integrate_ball_dimension_mismatch():
    field = ScalarField(2, lambda p: np.ones(len(p)))
    with pytest.raises(ContractViolation):
        integrate_ball(field, BallSpec((0.0, 0.0, 0.0), 1.0), MC)


def test_radial_and_mc_agree_on_radial_fields():
    rng = derive_rng(5, "profiles")
    for n in (2, 3, 5):
        ball = BallSpec((0.0,) * n, 1.5)
        for _ in range(5):
            a, b, c = rng.uniform(0.3, 2.0, 3)

            def ev(p, a=a, b=b, c=c):
                r = np.linalg.norm(p, axis=1)
                return a * np.exp(-b * r * r) + c * r

            radial = ScalarField(n, ev, radial_about=(0.0,) * n)
            flat = ScalarField(n, ev)
            fast = integrate_ball(radial, ball, SPEC)
            slow = integrate_ball(flat, ball, MC)
            assert abs(fast.value - slow.value) <= 4.0 * (fast.err + slow.err)


def test_integrate_ball_linearity():
    ball = BallSpec((0.1, 0.2, 0.0), 1.0)
    f = gaussian_field((0.3, 0.0, 0.0), 0.8, 3)
    g = gaussian_field((-0.4, 0.1, 0.0), 0.6, 3)
    fg = ScalarField(3, lambda p: np.asarray(f(p)) + np.asarray(g(p)))
    i_f = integrate_ball(ScalarField(3, f.evaluator), ball, MC)
    i_g = integrate_ball(ScalarField(3, g.evaluator), ball, MC)
    i_fg = integrate_ball(fg, ball, MC)
    assert abs(i_fg.value - i_f.value - i_g.value) <= 4.0 * (i_f.err + i_g.err + i_fg.err)


def test_sphere_mean_constant_and_radial():
    const = ScalarField(3, lambda p: np.full(len(p), -1.25))
    out = sphere_mean(const, (0.0, 0.0, 0.0), 2.0, MC)
    assert out.value == pytest.approx(-1.25, abs=1e-12)
    nw = model_subharmonic("newtonian", 3)
    out = sphere_mean(nw, (0.0, 0.0, 0.0), 2.0, MC)
    assert out.value == pytest.approx(-0.5, abs=1e-12)


def test_sphere_mean_harmonic_vanishes():
    # real part of the first complex coordinate on R^4: mean value zero
    field = ScalarField(4, lambda p: p[:, 0])
    for r in (0.5, 1.0, 2.0):
        out = sphere_mean(field, (0.0, 0.0, 0.0, 0.0), r, MC)
        assert abs(out.value) <= 4.0 * out.err + 1e-12


def test_sphere_mean_bounded_by_sup():
    rng = derive_rng(11, "spherefield")
    coef = rng.uniform(-1, 1, 4)

    def ev(p):
        return coef[0] + coef[1] * p[:, 0] + coef[2] * np.sin(3 * p[:, 1]) \
            + coef[3] * p[:, 2] ** 2

    field = ScalarField(3, ev)
    dirs = sample_in_ball(BallSpec((0.0, 0.0, 0.0), 1.0), 4096, derive_rng(3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    sup = np.max(np.abs(ev(2.0 * dirs)))
    out = sphere_mean(field, (0.0, 0.0, 0.0), 2.0, MC)
    assert abs(out.value) <= sup + 1e-9


def test_sample_balls_contract():
    domain = BallSpec((0.0, 0.0, 0.0), 1.0)
    assert sample_balls(domain, 0, 1, (0.1, 0.2)) == []
    balls = sample_balls(domain, 1000, 42, (0.05, 0.5))
    assert len(balls) == 1000
    assert all(domain.contains_ball(b) for b in balls)
    again = sample_balls(domain, 1000, 42, (0.05, 0.5))
    assert all(np.allclose(a.center, b.center) and a.radius == b.radius
               for a, b in zip(balls, again))
    with pytest.raises(ContractViolation):
        sample_balls(domain, 5, 1, (0.5, 2.0))


def test_mc_determinism_bitwise():
    ball = BallSpec((0.2, 0.1, -0.3), 0.9)
    field = ScalarField(3, lambda p: np.sin(p[:, 0]) + p[:, 1] ** 2)
    a = integrate_ball(field, ball, MC)
    b = integrate_ball(field, ball, MC)
    assert a.value == b.value and a.err == b.err


def test_measured_value_contract():
    with pytest.raises(ContractViolation):
        MeasuredValue(1.0, -0.1)
    v = MeasuredValue(2.0, 0.1).scale(-3.0)
    assert v.value == -6.0 and v.err == pytest.approx(0.3)


def test_scaled_ball_shares_center():
    b = BallSpec((1.0, 2.0), 0.5)
    big = b.scaled(2.0)
    assert big.center == b.center and big.radius == 1.0


def test_improper_interval_against_library():
    out = integrate_interval(lambda t: np.exp(-0.7 * t) * np.cos(t), 0.3, math.inf, SPEC)
    oracle = sp_integrate.quad(lambda t: math.exp(-0.7 * t) * math.cos(t),
                               0.3, math.inf)[0]
    assert out.value == pytest.approx(oracle, abs=1e-9)
