"""Field families: bumps, model subharmonic functions, derivatives, tags."""

import math

import numpy as np
import pytest

from hslab.quadcore import BallSpec, ContractViolation, derive_rng, sample_in_ball
from hslab.funcspace import (GRAD_BOUND_CONST, BumpSpec, EtaFunction, ScalarField,
                             WeightPair, constant_field, corpus_phi, differentiate,
                             eta_arctan, eta_identity, eta_power, fd_gradient,
                             fd_laplacian, field_from_catalog, field_neg_power,
                             field_rescale_argument, gaussian_field, hardy_weight_pair,
                             make_annulus_bump, make_bump, model_subharmonic,
                             negativity_check, radial_c2_field, set_cutoff,
                             subharmonic_certificate, validate_support)


def test_bump_values_and_gradient_bound():
    spec = BumpSpec((0.0, 0.0, 0.0), 1.0, 2.0)
    bump = make_bump(spec, 3)
    assert bump.at((0.0, 0.0, 0.0)) == 1.0
    assert bump.at((0.5, 0.5, 0.0)) == 1.0
    assert bump.at((3.0, 0.0, 0.0)) == 0.0
    radii = np.linspace(0.0, 2.5, 1000)
    pts = np.zeros((1000, 3))
    pts[:, 0] = radii
    grads = np.linalg.norm(bump.grad(pts), axis=1)
    assert grads.max() <= GRAD_BOUND_CONST / (2.0 - 1.0) + 1e-12


def test_bump_rejects_bad_radii():
    with pytest.raises(ContractViolation):
        BumpSpec((0.0, 0.0), 2.0, 1.0)


def test_set_cutoff_matches_distance_composition():
    # 0 on the half-fattened set, 1 outside the fattened set
    chi = set_cutoff((0.0, 0.0, 0.0, 0.0), 0.5, 0.4, 4)
    inner = np.array([[0.69, 0, 0, 0]])
    outer = np.array([[0.91, 0, 0, 0]])
    assert chi(inner)[0] == 0.0
    assert chi(outer)[0] == 1.0
    mid = np.array([[0.8, 0, 0, 0]])
    assert 0.0 < chi(mid)[0] < 1.0


def test_newtonian_formula_and_certificate():
    nw = model_subharmonic("newtonian", 3)
    assert nw.at((2.0, 0.0, 0.0)) == pytest.approx(-0.5, rel=1e-14)
    cert = subharmonic_certificate(nw, BallSpec((0.0, 0.0, 0.0), 1.0), 2000, seed=3)
    assert cert.holds and cert.min_laplacian >= -1e-12
    # every region excluding the origin certifies as well
    cert2 = subharmonic_certificate(nw, BallSpec((2.0, 0.0, 0.0), 1.0), 2000, seed=4)
    assert cert2.holds


def test_smoothed_newtonian_laplacian_positive():
    sm = model_subharmonic("smoothed-newtonian", 4, eps=0.5)
    pts = sample_in_ball(BallSpec((0.0,) * 4, 2.0), 500, derive_rng(9))
    lap = sm.lap(pts)
    assert np.all(lap > 0)
    # pointwise limit toward the sharp kernel away from the origin
    for eps in (0.2, 0.05, 0.01):
        sme = model_subharmonic("smoothed-newtonian", 3, eps=eps)
        gap = abs(sme.at((1.5, 0, 0)) - model_subharmonic("newtonian", 3).at((1.5, 0, 0)))
        assert gap <= eps ** 2


def test_inverse_sqrt_laplacian_closed_form():
    iq_field = model_subharmonic("inverse-sqrt", 3)
    val = iq_field.lap(np.array([[1.0, 0.0, 0.0]]))[0]
    assert val == pytest.approx(3.0 * 2.0 ** -2.5, rel=1e-12)
    with pytest.raises(ContractViolation):
        model_subharmonic("inverse-sqrt", 5)


def test_log_modulus_mass():
    lm = model_subharmonic("log-modulus", 2, eps=0.1, offset=3.0)
    # analytic Laplacian 4 eps^2/(|z|^2+eps^2)^2 at the origin
    assert lm.lap(np.zeros((1, 2)))[0] == pytest.approx(4.0 / 0.01, rel=1e-12)


def test_unknown_family_rejected():
    with pytest.raises(ContractViolation):
        model_subharmonic("mystery", 3)


def test_certificate_fails_on_nonsubharmonic():
    # -(exp(-r^2)) turns superharmonic beyond r^2 = n/2
    bad = radial_c2_field((0.0, 0.0, 0.0),
                          lambda r: -np.exp(-r * r),
                          lambda r: 2.0 * r * np.exp(-r * r),
                          lambda r: (2.0 - 4.0 * r * r) * np.exp(-r * r), 3)
    cert = subharmonic_certificate(bad, BallSpec((0.0, 0.0, 0.0), 2.0), 2000, seed=3)
    assert not cert.holds and cert.min_laplacian < 0


def test_certificate_constant_field():
    cert = subharmonic_certificate(constant_field(-1.0, 3),
                                   BallSpec((0.0, 0.0, 0.0), 1.0), 500, seed=1)
    assert cert.holds


def test_certificate_inconclusive_when_fully_singular():
    f = model_subharmonic("newtonian", 3)
    covered = ScalarField(3, f.evaluator, laplacian=f.laplacian,
                          singular_balls=(BallSpec((0.0, 0.0, 0.0), 10.0),))
    cert = subharmonic_certificate(covered, BallSpec((0.0, 0.0, 0.0), 1.0), 200, seed=2)
    assert cert.status == "inconclusive"


def test_differentiate_trivial_cases():
    sq = ScalarField(3, lambda p: np.sum(p * p, axis=1))
    grad, _ = differentiate(sq, (1.0, 2.0, 3.0), "gradient")
    assert np.allclose(grad, [2.0, 4.0, 6.0], atol=1e-8)
    lap, _ = differentiate(sq, (0.3, -0.4, 0.2), "laplacian")
    assert lap == pytest.approx(6.0, abs=1e-7)


def test_differentiate_fd_vs_analytic_inverse_sqrt():
    stripped = ScalarField(3, model_subharmonic("inverse-sqrt", 3).evaluator)
    lap, err = differentiate(stripped, (1.0, 0.0, 0.0), "laplacian")
    assert lap == pytest.approx(3.0 * 2.0 ** -2.5, abs=1e-6)


def test_differentiate_rejects_singular_point():
    nw = model_subharmonic("newtonian", 3)
    with pytest.raises(ContractViolation):
        differentiate(nw, (0.0, 0.0, 0.0), "gradient")


def test_fd_matches_analytic_on_random_points():
    rng = derive_rng(21, "fdcheck")
    fields = [gaussian_field((0.2, -0.1, 0.4), 0.8, 3),
              make_bump(BumpSpec((0.0, 0.0, 0.0), 0.8, 1.9), 3),
              model_subharmonic("smoothed-newtonian", 3, eps=0.7)]
    pts = rng.uniform(-1.2, 1.2, size=(100, 3))
    for f in fields:
        ga = f.grad(pts)
        gf = fd_gradient(f.evaluator, pts)
        scale = np.max(np.abs(ga)) + 1.0
        assert np.max(np.abs(ga - gf)) / scale <= 1e-6
        la = f.lap(pts)
        lf = fd_laplacian(f.evaluator, pts)
        lscale = np.max(np.abs(la)) + 1.0
        assert np.max(np.abs(la - lf)) / lscale <= 1e-6


def test_negative_tag_is_honest():
    for name, dim in (("newtonian", 3), ("smoothed-newtonian", 4), ("inverse-sqrt", 3)):
        f = model_subharmonic(name, dim)
        assert "negative-claimed" in f.tags
        assert negativity_check(f, BallSpec((0.0,) * dim, 2.5), 2000, seed=5)


def test_support_validation():
    assert validate_support(make_bump(BumpSpec((0.0, 0.0), 0.5, 1.0), 2))
    assert validate_support(gaussian_field((0.0, 0.0), 0.5, 2))


def test_annulus_bump_profile():
    ab = make_annulus_bump((0.0, 0.0, 0.0), (1.0, 1.2, 1.8, 2.0), 3)
    assert ab.at((1.5, 0.0, 0.0)) == 1.0
    assert ab.at((0.5, 0.0, 0.0)) == 0.0
    assert ab.at((2.2, 0.0, 0.0)) == 0.0
    assert ab.support_inner == 1.0


def test_field_rescale_argument():
    f = gaussian_field((0.0, 0.0, 0.0), 1.0, 3)
    s = field_rescale_argument(f, 2.0)
    p = np.array([[0.3, 0.1, -0.2]])
    assert s(p)[0] == pytest.approx(f(2.0 * p)[0], rel=1e-14)
    assert np.allclose(s.grad(p), 2.0 * f.grad(2.0 * p))


def test_neg_power_composition():
    nw = model_subharmonic("smoothed-newtonian", 3, eps=0.5)
    pw = field_neg_power(nw, 0.5)
    p = np.array([[0.4, 0.2, -0.1]])
    assert pw(p)[0] == pytest.approx(abs(nw(p)[0]) ** 0.5, rel=1e-13)


def test_weight_pair_validation():
    wp = hardy_weight_pair(3)
    assert wp.alpha == 2.0 and wp.alpha_dual == 2.0
    with pytest.raises(ContractViolation):
        WeightPair(wp.omega, wp.omega_prime, alpha=2.0, alpha_dual=3.0)


def test_eta_families():
    for eta in (eta_identity(), eta_power(0.5), eta_arctan()):
        grid = np.linspace(0.5, 20.0, 50)
        assert np.all(np.asarray(eta.eta(grid)) > 0)
        assert np.all(np.asarray(eta.eta_prime(grid)) > 0)
    assert eta_arctan().eta_infinity == pytest.approx(1.5 * math.pi)
    with pytest.raises(ContractViolation):
        eta_identity().check_args(np.array([-1.0]))
    with pytest.raises(ContractViolation):
        EtaFunction(eta=lambda t: -np.ones_like(np.asarray(t)),
                    eta_prime=lambda t: np.ones_like(np.asarray(t)),
                    domain_sign="positive-arg")


def test_catalog_and_corpus():
    f = field_from_catalog("gaussian", 3, width=0.5)
    assert f.dim == 3
    with pytest.raises(ContractViolation):
        field_from_catalog("nope", 3)
    phis = corpus_phi(3, 12, seed=9)
    assert len(phis) == 12
    again = corpus_phi(3, 12, seed=9)
    assert phis[0].at((0.1, 0.2, 0.3)) == again[0].at((0.1, 0.2, 0.3))
    off = corpus_phi(3, 6, seed=4, keep_off_origin=0.3)
    for f in off:
        c = np.asarray(f.support.center)
        assert np.linalg.norm(c) - f.support.radius >= 0.3 - 1e-12
