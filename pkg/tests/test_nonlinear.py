import math
import warnings

import numpy as np
import pytest

from motorcargo import DomainError, quadratic_potential_spring, wormlike_chain
from motorcargo import averaging as av
from motorcargo.nonlinear import (
    GeneralSpringSet,
    averaged_drift_general,
    cargo_density_general,
    one_motor_transport_general,
    spring_from_name,
    two_motor_transport_general,
)
from motorcargo.springs import tabulated_spring


@pytest.fixture(scope="module")
def quad1(groups):
    return GeneralSpringSet.homogeneous(quadratic_potential_spring(0.34), 1, groups.length_ref)


@pytest.fixture(scope="module")
def quad2(groups):
    return GeneralSpringSet.homogeneous(quadratic_potential_spring(0.34), 2, groups.length_ref)


@pytest.fixture(scope="module")
def wlc1(groups):
    return GeneralSpringSet.homogeneous(wormlike_chain(0.34, 70.0), 1, groups.length_ref)


@pytest.mark.parametrize("x, theta", [((0.0,), 0.0), ((1.0, -2.0), 1.3), ((0.5, 0.2, 3.0), -2.0)])
def test_quadratic_cargo_density_is_gaussian(groups, x, theta):
    springs = GeneralSpringSet.homogeneous(quadratic_potential_spring(0.34), len(x), groups.length_ref)
    d = cargo_density_general(x, theta, springs)
    n = len(x)
    assert d.integrate(d.density) == pytest.approx(1, abs=1e-8)
    assert d.mean() == pytest.approx((sum(x) - theta) / n, abs=1e-10)
    assert d.variance() == pytest.approx(1 / (2 * n), rel=1e-9)


def test_wlc_density_symmetric_and_inside_contour(wlc1):
    d = cargo_density_general([2.0], 0.0, wlc1)
    assert d.mean() == pytest.approx(2.0, abs=1e-10)
    reach = wlc1.reach(0)
    assert np.all(np.abs(d.grid - 2.0) < reach)
    centred = d.grid - 2.0
    assert np.allclose(np.interp(-centred, centred, d.density), d.density, atol=1e-10)


def test_mode_moves_back_with_load(wlc1):
    modes = []
    for theta in (0.0, 2.0, 5.0, 10.0, 20.0):
        d = cargo_density_general([0.0], theta, wlc1)
        modes.append(d.grid[np.argmax(d.density)])
    assert np.all(np.diff(modes) < 0)


def test_translation_invariance(quad2, sigmoid, groups):
    a = cargo_density_general((1.0, -1.5), 0.0, quad2)
    b = cargo_density_general((11.0, 8.5), 0.0, quad2)
    assert b.mean() - a.mean() == pytest.approx(10.0, abs=1e-10)
    assert b.variance() == pytest.approx(a.variance(), rel=1e-10)
    for i in (0, 1):
        da = averaged_drift_general(sigmoid, (1.0, -1.5), 0.0, quad2, i, groups.s, a)
        db = averaged_drift_general(sigmoid, (11.0, 8.5), 0.0, quad2, i, groups.s, b)
        assert db == pytest.approx(da, rel=1e-10)


@pytest.mark.parametrize("theta_pN", np.linspace(-10, 20, 11))
def test_one_motor_reduction(sigmoid, groups, quad1, thermal_force, theta_pN):
    g = groups.with_theta(theta_pN / thermal_force)
    gen = one_motor_transport_general(sigmoid, g, quad1).velocity
    ref = av.one_motor_velocity_low_visc(sigmoid, g).velocity
    assert gen == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("r", [-4.0, -0.5, 0.0, 2.0, 6.0])
def test_two_motor_drift_reduction(sigmoid, groups, quad2, r):
    x = (r / 2, -r / 2)
    d = cargo_density_general(x, 0.0, quad2)
    # motor 2 trails by r, so its partner sits r ahead
    drift2 = averaged_drift_general(sigmoid, x, 0.0, quad2, 1, groups.s, d)
    drift1 = averaged_drift_general(sigmoid, x, 0.0, quad2, 0, groups.s, d)
    assert drift2 == pytest.approx(av.G_fluctuating_cargo(sigmoid, r, groups.s), rel=1e-8)
    assert drift1 == pytest.approx(av.G_fluctuating_cargo(sigmoid, -r, groups.s), rel=1e-8)


def test_two_motor_transport_reduction(sigmoid, groups, quad2):
    gen = two_motor_transport_general(sigmoid, groups, quad2, 0.0)
    G = av.fluctuating_cargo_G(sigmoid, groups.s)
    ref = av.two_motor_diffusivity(G, groups, 0.0)
    assert gen.velocity == pytest.approx(ref.velocity, rel=1e-7)
    assert gen.diffusivity == pytest.approx(ref.diffusivity, rel=1e-6)


def test_wlc_one_motor_velocity_bounded(sigmoid, groups, wlc1):
    v = one_motor_transport_general(sigmoid, groups, wlc1).velocity
    assert math.isfinite(v)
    assert v < 600 / 500
    # the tail is nearly Hookean at thermal extensions
    assert v == pytest.approx(av.one_motor_velocity_low_visc(sigmoid, groups).velocity, rel=1e-2)


def test_per_motor_laws(sigmoid, groups):
    springs = GeneralSpringSet.from_laws(
        [quadratic_potential_spring(0.34, 70.0), wormlike_chain(0.34, 70.0)], groups.length_ref
    )
    d = cargo_density_general((0.0, 0.0), 0.0, springs)
    assert d.integrate(d.density) == pytest.approx(1, abs=1e-8)


def test_lambda_limits(groups):
    with pytest.warns(UserWarning):
        GeneralSpringSet.homogeneous(quadratic_potential_spring(0.34, 4.0), 1, groups.length_ref)
    with pytest.raises(DomainError):
        GeneralSpringSet.homogeneous(quadratic_potential_spring(0.34, 3.0), 1, groups.length_ref)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        GeneralSpringSet.homogeneous(quadratic_potential_spring(0.34, 10.0), 1, groups.length_ref)


def test_shared_length_scale_required(groups):
    with pytest.raises(DomainError):
        GeneralSpringSet.from_laws(
            [quadratic_potential_spring(0.34, 10.0), quadratic_potential_spring(0.34, 20.0)],
            groups.length_ref,
        )


def test_nonconfining_law_rejected(groups):
    xi = np.linspace(-3, 3, 61)
    flat = tabulated_spring(0.34, 10.0, xi, 0.01 * np.tanh(xi))
    with pytest.raises(Exception):
        GeneralSpringSet.homogeneous(flat, 1, groups.length_ref)


@pytest.mark.parametrize("spec, kind, name", [("linear", "linear", "linear"), ("wlc", "general", "wlc"),
                                              ("wlc(0.3, 60)", "general", "wlc"),
                                              ("quadratic(12)", "general", "quadratic")])
def test_spring_from_name(spec, kind, name):
    law = spring_from_name(spec, 0.34)
    assert law.kind == kind and law.name == name


def test_spring_from_name_custom(tmp_path):
    xi = np.linspace(-2, 2, 41)
    path = tmp_path / "phi.csv"
    np.savetxt(path, np.column_stack([xi, xi]), delimiter=",")
    law = spring_from_name(f"custom({path}, 15)", 0.34)
    assert law.length_scale_Lc == 15.0
    with pytest.raises(ValueError):
        spring_from_name("rubber", 0.34)
