import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motorcargo import DomainError, compute_groups, regime_classify, rescale_trajectory, wormlike_chain
from motorcargo.nondim import DimensionlessGroups, to_dimensionless


def test_preset_groups(groups):
    assert groups.epsilon == pytest.approx(2.9945e-3, rel=1e-4)
    assert groups.s == pytest.approx(0.238533, rel=1e-5)
    assert groups.rho == pytest.approx(2.036257, rel=1e-6)
    assert groups.sigma_mc**2 == pytest.approx(6.0976e-3, rel=1e-4)
    assert groups.theta_tilde == 0.0
    assert groups.lambda_ is None


def test_reference_scales(groups):
    assert groups.length_ref == pytest.approx(math.sqrt(2 * 4.1 / 0.34), rel=1e-14)
    assert groups.length_ref == pytest.approx(4.911, abs=1e-3)
    assert groups.time_ref == pytest.approx(1e-5 / 0.34, rel=1e-12)
    assert groups.velocity_ref == pytest.approx(500.0, rel=1e-12)


def test_identities(groups):
    assert groups.epsilon * groups.rho == pytest.approx(groups.sigma_mc**2, rel=1e-12)
    assert groups.time_ref * 500.0 / groups.length_ref == pytest.approx(groups.epsilon, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(k=st.floats(0.1, 100.0), which=st.sampled_from(["gamma", "v"]))
def test_scaling_properties(params, k, which):
    base = compute_groups(params)
    if which == "gamma":
        p = params.with_friction(params.gamma * k)
    else:
        v = params.free_velocity_v * k
        p = params.replace(free_velocity_v=v, v_max=v * 1.2, v_min=-0.1 * v)
    g = compute_groups(p)
    assert g.epsilon == pytest.approx(base.epsilon * k, rel=1e-12)
    assert g.s == pytest.approx(base.s, rel=1e-14)
    assert g.epsilon * g.rho == pytest.approx(g.sigma_mc**2, rel=1e-12)


def test_high_viscosity_epsilon(params):
    g = compute_groups(params.replace(viscosity_eta=params.viscosity_eta * 1000))
    assert g.epsilon == pytest.approx(3.0, rel=0.01)
    assert regime_classify(g) == "drag_dominated"


def test_theta_tilde(params, thermal_force):
    g = compute_groups(params.replace(trap_force_theta=5.0))
    assert g.theta_tilde == pytest.approx(5.0 / thermal_force)


@pytest.mark.parametrize("eps, regime", [(3e-3, "diffusion_dominated"), (0.1, "diffusion_dominated"),
                                         (0.1000001, "drag_dominated"), (3.0, "drag_dominated")])
def test_regime(eps, regime):
    assert regime_classify(eps) == regime


def test_general_law_lambda(params):
    g = compute_groups(params, wormlike_chain(0.34, 70.0))
    assert g.lambda_ == pytest.approx(g.length_ref / 70.0)
    with pytest.raises(DomainError):
        compute_groups(params, wormlike_chain(0.34, 3.0))


def test_groups_positive():
    with pytest.raises(DomainError):
        DimensionlessGroups(0.0, 0.2, 0.0, 0.1, 2.0, 1.0, 1.0)


def test_rescale_slow_clock(groups):
    t, x = rescale_trajectory([1.0], [1.0], groups, "slow")
    assert x[0] == pytest.approx(4.911, abs=1e-3)
    assert t[0] == pytest.approx(4.911 / 500, rel=1e-3)


def test_rescale_fast_clock(groups):
    t, _ = rescale_trajectory([2.0], [0.0], groups, "fast")
    assert t[0] == pytest.approx(2 * groups.time_ref)


def test_rescale_zero_path(groups):
    t, x = rescale_trajectory(np.zeros(5), np.zeros((5, 3)), groups, "slow")
    assert not t.any() and not x.any()


@pytest.mark.parametrize("base", ["fast", "slow"])
def test_round_trip(groups, base):
    rng = np.random.default_rng(4)
    t0, x0 = np.sort(rng.uniform(0, 100, 50)), rng.normal(size=(50, 3))
    t, x = rescale_trajectory(t0, x0, groups, base)
    t1, x1 = to_dimensionless(t, x, groups, base)
    assert np.allclose(t1, t0, rtol=1e-12, atol=0)
    assert np.allclose(x1, x0, rtol=1e-12, atol=0)


def test_time_base_required(groups):
    with pytest.raises(ValueError):
        rescale_trajectory([1.0], [1.0], groups, "seconds")
