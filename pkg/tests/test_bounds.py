import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from balancedbo import bounds, kernels
from balancedbo.bounds import BoundConfig
from balancedbo.candidates import q
from balancedbo.errors import InputError
from balancedbo.kernels import KernelSpec

import oracles


def cfg_for(family="rbf", theta0=1.0, d=1, N=1.0, sigma_n=0.1, delta=0.1, **kw):
    return BoundConfig(KernelSpec(family, theta0, d), N=N, delta=delta, sigma_n=sigma_n, **kw)


def test_config_validation():
    for bad in (dict(delta=0.0), dict(delta=1.0), dict(N=0.0), dict(sigma_n=-1.0),
                dict(mig_variant="other")):
        with pytest.raises(InputError):
            cfg_for(**bad)
    c = cfg_for(delta=0.2)
    assert c.delta_a == c.delta_b == pytest.approx(0.1)


def test_mig_rbf_unit_log():
    assert bounds.mig_bound(KernelSpec("rbf", 1.0, 1), math.e) == pytest.approx(1.0, rel=1e-15)


def test_mig_rbf_two_dims():
    got = bounds.mig_bound(KernelSpec("rbf", 0.5, 2), 10)
    assert got == pytest.approx(4 * math.log(10) ** 3, rel=1e-14)
    assert got == pytest.approx(48.84, abs=1e-2)  # quoted value is rounded


def test_mig_matern_variants():
    spec = KernelSpec("matern", 1.0, 1, 2.5)
    assert bounds.mig_bound(spec, 100) == pytest.approx(100 ** (1 / 6) * math.log(100) ** (5 / 6), rel=1e-14)
    for d in (1, 3, 5):
        for T in (2, 17, 400):
            s = KernelSpec("matern", 0.3, d)
            for variant in ("eigendecay", "main"):
                assert bounds.mig_bound(s, T, variant) == pytest.approx(
                    oracles.mig("matern", 0.3, d, T, variant=variant), rel=1e-13)


def test_mig_rejects_small_T():
    with pytest.raises(InputError):
        bounds.mig_bound(KernelSpec(), 1)


def test_exact_info_gain_cases():
    assert bounds.exact_info_gain(np.zeros((0, 0)), 0.1) == 0.0
    assert bounds.exact_info_gain(np.array([[1.0]]), 1.0) == pytest.approx(0.5 * math.log(2), abs=1e-15)
    X = np.random.default_rng(0).random((40, 2))
    K = oracles.kernel_matrix("matern", 0.3, X, X)
    lam = np.linalg.eigvalsh(K)
    expected = 0.5 * np.sum(np.log1p(np.clip(lam, 0, None) / 0.1**2))
    assert abs(bounds.exact_info_gain(K, 0.1) - expected) <= 1e-8


def test_norm_for_lengthscale():
    assert bounds.norm_for_lengthscale(0.7, 0.7, 3.0, 4) == 3.0
    assert bounds.norm_for_lengthscale(1.0, 1 / math.e, 1.0, 2) == pytest.approx(math.e, rel=1e-15)
    assert bounds.norm_for_lengthscale(1.0, q(1, 1.0, 5), 2.0, 5) == pytest.approx(2 * math.exp(0.5), rel=1e-14)
    with pytest.raises(InputError):
        bounds.norm_for_lengthscale(1.0, 1.5, 1.0, 1)


def test_beta_noiseless_edge_and_formula():
    c = cfg_for(sigma_n=0.0)
    assert bounds.beta(c, 1.0, 5) == 1.0
    c = cfg_for(sigma_n=0.1, delta=0.1)
    gamma = math.log(9) ** 2
    assert bounds.beta(c, 1.0, 10) == pytest.approx(1 + 0.1 * math.sqrt(2 * (gamma + 1 + math.log(2 / 0.1))), rel=1e-14)
    # t = 1 and t = 2 both clamp the information gain at T = 2
    assert bounds.beta(c, 1.0, 1) == bounds.beta(c, 1.0, 3)


def test_beta_halving_theta_doubles_norm_term():
    c = cfg_for(d=2, sigma_n=0.0)
    assert bounds.beta(c, 0.5, 7) == pytest.approx(2 * bounds.beta(c, 1.0, 7), rel=1e-15)


@pytest.mark.parametrize("family", ["rbf", "matern"])
def test_monotonicity_on_grid(family):
    c = cfg_for(family, theta0=1.0, d=2, sigma_n=0.05)
    thetas = np.geomspace(0.05, 1.0, 20)
    ts = np.unique(np.geomspace(1, 400, 20).astype(int))
    B = np.array([[bounds.beta(c, th, t) for t in ts] for th in thetas])
    R = np.array([[bounds.suspected_regret_bound(c, th, t) for t in ts] for th in thetas])
    assert np.all(B > 0)
    assert np.all(np.diff(B, axis=1) >= 0)            # non-decreasing in t
    assert np.all(np.diff(B, axis=0) <= 0)            # non-increasing in theta
    assert np.all(np.diff(R, axis=1) > 0)             # strictly increasing in t
    assert np.all(np.diff(R[:, -1]) < 0)              # increasing as theta decreases


def test_regret_bound_at_one_uses_clamped_gamma():
    c = cfg_for("matern", theta0=0.8, d=3, N=1.5)
    g2 = oracles.mig("matern", 0.8, 3, 2)
    assert bounds.suspected_regret_bound(c, 0.8, 1) == pytest.approx(1.5 * math.sqrt(g2) + g2, rel=1e-14)


def test_shorter_lengthscale_has_larger_bound():
    c = cfg_for("rbf", d=2)
    assert bounds.suspected_regret_bound(c, 0.6, 100) < bounds.suspected_regret_bound(c, 0.6 * math.exp(-1 / 2), 100)


def test_doubling_t_with_frozen_gamma():
    r1 = bounds.regret_bound_from_gamma(2.0, 3.7, 25)
    assert bounds.regret_bound_from_gamma(2.0, 3.7, 100) == 2 * r1
    assert bounds.regret_bound_from_gamma(2.0, 3.7, 50) == pytest.approx(math.sqrt(2) * r1, rel=1e-15)


@settings(max_examples=40, deadline=None)
@given(theta=st.floats(0.05, 1.0), d=st.integers(1, 5), N=st.floats(0.1, 5),
       family=st.sampled_from(["rbf", "matern"]))
def test_increments_clamped_to_twice_norm(theta, d, N, family):
    c = cfg_for(family, d=d, N=N)
    curve, clamped = bounds.regret_curve(c, theta, 200)
    B = bounds.norm_for_lengthscale(1.0, theta, N, d)
    assert curve[0] == 0.0
    assert np.all(np.diff(curve[1:]) <= 2 * B * (1 + 1e-12))
    raw, none = bounds.regret_curve(cfg_for(family, d=d, N=N, clamp_increments=False), theta, 200)
    assert none == 0
    assert curve[1] == raw[1]
    assert clamped == int(np.count_nonzero(np.diff(raw[1:]) > 2 * B))


def test_curve_matches_pointwise_formula_without_clamp():
    c = cfg_for("matern", theta0=1.0, d=2, N=1.0, clamp_increments=False)
    curve, _ = bounds.regret_curve(c, 0.4, 50)
    for t in (1, 2, 3, 10, 50):
        g = oracles.mig("matern", 0.4, 2, max(t, 2))
        assert curve[t] == pytest.approx(oracles.regret_bound((1 / 0.4), g, t), rel=1e-13)


def test_xi_examples():
    assert bounds.xi(1, 1, math.pi**2 / 6, 0.3) == pytest.approx(0.0, abs=1e-15)
    assert bounds.xi(10, 3, 0.05, 1.0) == pytest.approx(2 * math.log(3 * math.pi**2 * 100 / 0.3), rel=1e-14)
    for t in (1, 5, 77):
        assert bounds.xi(2 * t, 4, 0.05, 0.2) - bounds.xi(t, 4, 0.05, 0.2) == pytest.approx(
            2 * 0.04 * math.log(4), rel=1e-10)


def test_xi_monotone_and_validation():
    vals = [[bounds.xi(t, a, 0.05, 0.1) for t in range(1, 30)] for a in range(1, 8)]
    vals = np.array(vals)
    assert np.all(np.diff(vals, axis=0) >= 0) and np.all(np.diff(vals, axis=1) >= 0)
    with pytest.raises(InputError):
        bounds.xi(0, 1, 0.05, 0.1)
    with pytest.raises(InputError):
        bounds.xi(3, 0, 0.05, 0.1)


def test_xi_closed_form():
    got = bounds.xi_closed_form(10, 2, 3.0, 0.1, 0.5)
    assert got == pytest.approx(2 * 0.25 * math.log(2 * math.log(3.0) * math.pi**2 * 100) - math.log(0.3), rel=1e-14)
