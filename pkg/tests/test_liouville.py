"""Capacity, adapted cutoffs, and divergence classification."""

import math

import numpy as np
import pytest
from scipy import integrate as si

from hslab.quadcore import ContractViolation, DimensionConstants, derive_rng
from hslab.liouville import (GROWTH_CATALOG, GrowthPair, ModelManifold,
                             capacity_ball, check_cutoff_bound,
                             criterion_divergence, cutoff_build, euclidean_manifold,
                             extremal_energy, finite_volume_manifold,
                             growth_family_log, kappa_family_quadratic,
                             nadirashvili_reduction, quadratic_volume_manifold,
                             tail_integrable, v_lambda)


def test_capacity_formula_values():
    assert capacity_ball(3, 1.0) == pytest.approx(4.0 * math.pi, rel=1e-14)
    # scaling homogeneity
    for n in (3, 5, 8):
        assert capacity_ball(n, 2.0) / capacity_ball(n, 1.0) == pytest.approx(
            2.0 ** (n - 2), rel=1e-12)
    with pytest.raises(ContractViolation):
        capacity_ball(2, 1.0)


def test_extremal_energy_matches_formula():
    for n in range(3, 9):
        for r in (0.5, 1.0, 2.0):
            e = extremal_energy(n, r)
            c = capacity_ball(n, r)
            assert abs(e.value - c) <= 1e-6 * c


def test_extremal_energy_oracle():
    # independent quadrature of the profile energy in dimension 3, radius 1
    d3 = DimensionConstants.for_dim(3)
    oracle = d3.sigma_n * si.quad(lambda t: t ** -4.0 * t ** 2, 1.0, np.inf)[0]
    assert extremal_energy(3, 1.0).value == pytest.approx(oracle, rel=1e-9)
    assert oracle == pytest.approx(4.0 * math.pi, rel=1e-10)


def test_manifold_validation():
    for m in (euclidean_manifold(3), finite_volume_manifold(),
              quadratic_volume_manifold()):
        m.validate()
    bad = ModelManifold(n=3, volume=lambda r: -np.asarray(r, dtype=float),
                        area=lambda r: -np.ones_like(np.asarray(r, dtype=float)))
    with pytest.raises(ContractViolation):
        bad.validate()


def test_cutoff_build_profile():
    man = euclidean_manifold(3)
    cut = cutoff_build(lambda t: man.volume(t), 1.0, 2.0, 1.0)
    grid = np.linspace(0.0, 2.5, 100)
    vals = cut.chi(grid)
    assert vals[grid <= 1.0].min() == 1.0
    assert vals[grid >= 2.0].max() == 0.0
    assert np.all(np.diff(vals) <= 1e-12)
    assert cut.bound == pytest.approx(2.0 * cut.c)
    with pytest.raises(ContractViolation):
        cutoff_build(lambda t: man.volume(t), 2.0, 1.0, 1.0)
    with pytest.raises(ContractViolation):
        cutoff_build(lambda t: man.volume(t), 1.0, 2.0, -1.0)


def test_cutoff_large_epsilon_limit():
    # once the mass difference is negligible the bound approaches
    # 4 eps / (R - r)^2
    man = euclidean_manifold(3)
    for eps in (1e4, 1e6):
        cut = cutoff_build(lambda t: man.volume(t), 1.0, 2.0, eps)
        assert cut.bound == pytest.approx(4.0 * eps / 1.0, rel=1e-2)


def test_cutoff_bound_euclidean():
    man = euclidean_manifold(3)

    def f_one(t):
        return np.ones_like(np.asarray(t, dtype=float))

    def mass(t):
        return np.asarray(man.volume(t), dtype=float)

    cut = cutoff_build(mass, 1.0, 2.0, 1.0)
    rep = check_cutoff_bound(f_one, man, cut)
    assert rep.verdict == "holds"
    assert rep.lhs.value <= rep.rhs.value


def test_cutoff_bound_mass_mismatch_rejected():
    man = euclidean_manifold(3)
    cut = cutoff_build(lambda t: 2.0 * np.asarray(man.volume(t), dtype=float),
                       1.0, 2.0, 1.0)
    with pytest.raises(ContractViolation):
        check_cutoff_bound(lambda t: np.ones_like(np.asarray(t, dtype=float)), man, cut)


def test_cutoff_bound_seeded_corpus():
    from hslab.liouville import mass_function
    rng = derive_rng(99, "corpus")
    violations = 0
    for i in range(50):
        man = euclidean_manifold(3 if i % 2 == 0 else 4)
        amp = float(rng.uniform(0.5, 2.0))
        width = float(rng.uniform(0.5, 2.0))

        def f_prof(t, amp=amp, width=width):
            t = np.asarray(t, dtype=float)
            return amp * np.exp(-(t / width) ** 2) + 0.1

        r = float(rng.uniform(0.5, 1.5))
        r_big = r + float(rng.uniform(0.5, 2.0))
        eps = float(rng.uniform(0.1, 2.0))
        cut = cutoff_build(mass_function(f_prof, man, r_big + 0.5), r, r_big, eps)
        rep = check_cutoff_bound(f_prof, man, cut)
        violations += rep.verdict == "violated"
    assert violations == 0


def test_v_lambda_basics():
    man = euclidean_manifold(3)
    const = lambda t: -np.ones_like(np.asarray(t, dtype=float))
    v = v_lambda(man, lambda t: np.asarray(t, dtype=float), const, 2.0)
    assert v.value == pytest.approx(float(man.volume(np.array([2.0]))[0]), rel=1e-9)
    # independent oracle for a decaying profile and quadratic growth function
    psi = lambda t: -1.0 / np.sqrt(1.0 + np.asarray(t, dtype=float) ** 2)
    lam = lambda t: np.asarray(t, dtype=float) ** 2
    got = v_lambda(man, lam, psi, 2.0)
    oracle = si.quad(lambda t: (1.0 / (1.0 + t * t)) * 4.0 * math.pi * t * t, 0, 2.0)[0]
    assert got.value == pytest.approx(oracle, rel=1e-8)
    # monotone in the radius
    vals = [v_lambda(man, lam, psi, r).value for r in (0.5, 1.0, 2.0, 4.0)]
    assert np.all(np.diff(vals) > 0)


def test_tail_integrability_verdicts():
    assert tail_integrable(lambda t: 1.0 / np.asarray(t, dtype=float) ** 2, 10.0) == "yes"
    assert tail_integrable(lambda t: 1.0 / np.asarray(t, dtype=float), 10.0) == "no"
    lam = growth_family_log(1, 1.0)
    assert tail_integrable(lambda t: 1.0 / np.asarray(lam(t), dtype=float), 20.0) == "yes"

    def critical(t):
        t = np.maximum(np.asarray(t, dtype=float), math.e)
        return 1.0 / (t * np.log(t))

    assert tail_integrable(critical, 20.0) in ("no", "inconclusive")


def test_growth_pair_validation():
    with pytest.raises(ContractViolation):
        GrowthPair.build(lambda t: -np.ones_like(np.asarray(t, dtype=float)),
                         lambda t: np.asarray(t, dtype=float))
    gp = GrowthPair.build(growth_family_log(), kappa_family_quadratic())
    assert gp.lambda_tail_integrable == "yes"


def test_divergence_classification_families():
    man1, gp1 = GROWTH_CATALOG["finite-volume-quadratic"]()
    v1 = criterion_divergence(man1, gp1, math.e ** 2, np.geomspace(1e2, 1e6, 9))
    assert v1.classification == "divergent"
    # integrand behaves like 1/(r sqrt(log r)): fitted exponent near -1
    assert -1.15 <= v1.tail_exponent_fit <= -0.95

    man2, gp2 = GROWTH_CATALOG["quadratic-volume-log"]()
    v2 = criterion_divergence(man2, gp2, math.e ** 2, np.geomspace(1e2, 1e6, 9))
    assert v2.classification == "divergent"

    man3, gp3 = GROWTH_CATALOG["euclidean-control"]()
    psi_const = lambda t: -np.ones_like(np.asarray(t, dtype=float))
    v3 = criterion_divergence(man3, gp3, 1.0, np.geomspace(1e2, 1e6, 9),
                              psi_profile=psi_const)
    assert v3.classification == "convergent"
    assert v3.tail_exponent_fit == pytest.approx(-2.0, abs=0.05)


def test_divergence_stable_under_grid_extension():
    for fam, want in (("finite-volume-quadratic", "divergent"),
                      ("quadratic-volume-log", "divergent"),
                      ("euclidean-control", "convergent")):
        man, gp = GROWTH_CATALOG[fam]()
        kw = {}
        if fam == "euclidean-control":
            kw["psi_profile"] = lambda t: -np.ones_like(np.asarray(t, dtype=float))
        short = criterion_divergence(man, gp, math.e ** 2, np.geomspace(1e2, 1e6, 9), **kw)
        long = criterion_divergence(man, gp, math.e ** 2, np.geomspace(1e2, 1e7, 10), **kw)
        assert short.classification == want
        assert long.classification == want


def test_divergence_requires_tail_verdict():
    man = euclidean_manifold(3)
    divergent_lambda = GrowthPair.build(lambda t: np.asarray(t, dtype=float),
                                        lambda t: np.asarray(t, dtype=float))
    assert divergent_lambda.lambda_tail_integrable == "no"
    v = criterion_divergence(man, divergent_lambda, 1.0, np.geomspace(1e2, 1e5, 6))
    assert v.classification == "inconclusive"
    # the explicit opt-out used when |psi| is bounded away from the limit
    v2 = criterion_divergence(man, divergent_lambda, 1.0, np.geomspace(1e2, 1e5, 6),
                              psi_profile=lambda t: -np.ones_like(np.asarray(t, dtype=float)),
                              tail_condition="none")
    assert v2.classification in ("convergent", "divergent")


def test_nadirashvili_reduction():
    lam_id = lambda t: np.asarray(t, dtype=float)
    psi_const = lambda t: -np.ones_like(np.asarray(t, dtype=float))
    rep = nadirashvili_reduction(finite_volume_manifold(), lam_id, psi_const,
                                 np.geomspace(1.0, 50.0, 5))
    assert rep.applicable and rep.chain_holds
    # slow area growth with slowly decaying field: weighted mass diverges
    psi_slow = lambda t: -1.0 / np.sqrt(1.0 + np.asarray(t, dtype=float) ** 2)
    rep2 = nadirashvili_reduction(euclidean_manifold(3), lam_id, psi_slow, [1.0, 2.0])
    assert not rep2.applicable
    # quadratic volume: ratio stays bounded and the criterion integral diverges
    man = quadratic_volume_manifold()
    ratios = [v_lambda(man, lam_id, psi_const, float(r)).value / (1.0 + r * r)
              for r in np.geomspace(1.0, 100.0, 6)]
    assert max(ratios) <= 1.0 + 1e-9
