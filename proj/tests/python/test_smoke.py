import math

import numpy as np
import pytest

import authbound as ab


def identity(n, rho, sigma=0.9, tau=None):
    if tau is None:
        tau = rho * sigma
    return ab.build_identity_scenario(n, rho, sigma, tau)


def test_scalar_analytic_optimum():
    sol = ab.solve(identity(1, 0.0))
    assert sol.converged
    assert sol.d_star == pytest.approx(0.81 / 0.19, abs=1e-10)
    assert sol.j_star == pytest.approx(2 + 0.81 / 0.19, abs=1e-10)


def test_wishart_determinism():
    a, attempts_a = ab.sample_wishart_scenario(3, 42, "real")
    b, attempts_b = ab.sample_wishart_scenario(3, 42, "real")
    assert attempts_a == attempts_b == 0
    np.testing.assert_array_equal(a.assembled(), b.assembled())
    assert not ab.validate(a)


def test_validation_flags_indefinite_model():
    bad = ab.build_identity_scenario(1, 0.0, 1.5, 0.0)
    violations = ab.validate(bad)
    assert any("PSD" in what for what, _ in violations)


def test_kl_gaussian_scalar():
    k0 = np.array([[2.0 + 0j]])
    k1 = np.array([[1.0 + 0j]])
    assert ab.kl_gaussian(k0, k1) == pytest.approx(2 - math.log(2) - 1, abs=1e-14)
    with pytest.raises(RuntimeError):
        ab.kl_gaussian(k1, np.zeros((1, 1), dtype=complex))


def test_region_boundary_inverts_the_bound():
    d_star = 0.35
    points = ab.region_boundary(d_star, [i / 100 for i in range(1, 99)])
    betas = [b for _, b in points]
    assert betas == sorted(betas, reverse=True)
    for alpha, beta in points:
        if beta > 0:
            f = ab.binary_divergence(beta, alpha)
            assert f == pytest.approx(d_star, abs=1e-12)


def test_solution_matches_divergence_and_structure():
    cov, _ = ab.sample_wishart_scenario(2, 7, "real")
    sol = ab.solve(cov, max_iter=5000)
    assert sol.converged
    assert sol.eta >= -1e-9
    d = ab.divergence_D(cov, sol.params)
    assert d == pytest.approx(sol.j_star - 2 * cov.n, abs=1e-10)
    kl = ab.kl_gaussian(ab.assemble_xv(cov, sol.params), cov.xy_joint())
    assert kl == pytest.approx(max(d, 0.0), abs=1e-12)


def test_zero_block_structure_for_generic_parameters():
    cov, _ = ab.sample_wishart_scenario(2, 9, "real")
    rng = np.random.default_rng(0)
    Z = rng.standard_normal((2, 2)) + 0j
    C = rng.standard_normal((2, 2)) + 2 * np.eye(2) + 0j
    params = ab.AttackParameters(Z, C)
    joint = ab.assemble_joint(cov, params)
    assert ab.check_zero_block_inverse(joint, 2, 2) <= 1e-8


def test_strategy_extraction():
    sol = ab.solve(identity(1, 0.0))
    strat = ab.extract_strategy(identity(1, 0.0), sol.params)
    assert abs(strat.gain[0, 0]) < 1e-10
    assert strat.cond_cov[0, 0].real == pytest.approx(0.19, abs=1e-10)
