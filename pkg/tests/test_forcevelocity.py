import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motorcargo import DomainError, build_sigmoid_curve, check_assumption_1, custom_curve, linear_curve
from motorcargo.forcevelocity import tabulated_curve


def test_reference_sigmoid_constants(sigmoid):
    assert sigmoid.A == pytest.approx(0.55, abs=1e-14)
    assert sigmoid.B == pytest.approx(0.65, abs=1e-14)
    # closed forms evaluated independently
    C = np.arctanh(550 / 650) - np.arctanh((550 - 1000) / 650)
    D = np.arctanh((1000 - 550) / 650)
    assert sigmoid.C == pytest.approx(C, rel=1e-14)
    assert sigmoid.D == pytest.approx(D, rel=1e-14)
    assert sigmoid.C == pytest.approx(2.0948273710, abs=1e-9)
    assert sigmoid.D == pytest.approx(0.8523740461, abs=1e-9)


def test_normalization(sigmoid):
    assert abs(sigmoid.g(0.0) - 1) < 1e-12
    assert abs(sigmoid.g(1.0)) < 1e-12


def test_asymptotes(sigmoid):
    assert sigmoid.g(-40.0) == pytest.approx(600 / 500, abs=1e-12)
    assert sigmoid.g(40.0) == pytest.approx(-50 / 500, abs=1e-12)
    assert sigmoid.g_minus_inf == pytest.approx(1.2)
    assert sigmoid.g_plus_inf == pytest.approx(-0.1)


@settings(max_examples=60, deadline=None)
@given(
    vmax=st.floats(100.0, 2000.0),
    frac_min=st.floats(0.01, 0.95),
    frac_v=st.floats(0.02, 0.98),
)
def test_normalization_any_valid_inputs(vmax, frac_min, frac_v):
    vmin = -frac_min * vmax
    lo = 0.5 * (vmax + vmin)
    v = lo + frac_v * (vmax - lo)
    c = build_sigmoid_curve(vmax, vmin, v)
    assert abs(c.g(0.0) - 1) < 1e-10
    assert abs(c.g(1.0)) < 1e-10
    assert min(c.A, c.B, c.C, c.D) > 0


@pytest.mark.parametrize(
    "vmax, vmin, v",
    [(600, -50, 275), (600, -50, 600), (600, 10, 500), (600, -600, 500), (600, -50, -1),
     (600, 0, 500)],
)
def test_invalid_sigmoid_rejected(vmax, vmin, v):
    with pytest.raises(DomainError):
        build_sigmoid_curve(vmax, vmin, v)


def test_derivatives_match_finite_differences(sigmoid):
    f = np.linspace(-3, 4, 101)
    h = 1e-5
    fd1 = (sigmoid.g(f + h) - sigmoid.g(f - h)) / (2 * h)
    fd2 = (sigmoid.dg(f + h) - sigmoid.dg(f - h)) / (2 * h)
    assert np.allclose(sigmoid.dg(f), fd1, atol=1e-8)
    assert np.allclose(sigmoid.d2g(f), fd2, atol=1e-7)


def test_derivative_negative_everywhere(sigmoid):
    f = np.linspace(-20, 20, 10_000)
    assert np.all(sigmoid.dg(f) < 0)


def test_assumption_report_sigmoid(sigmoid):
    rep = check_assumption_1(sigmoid)
    assert rep.passed
    assert rep.monotone.passed and rep.concavity.passed and rep.strong_concavity.passed
    # inflection point sits at D/C
    assert rep.f_star_sup == pytest.approx(sigmoid.D / sigmoid.C, abs=1e-3)
    assert 0 < rep.f_star_sup < 0.5


def test_assumption_report_linear():
    rep = check_assumption_1(linear_curve())
    assert rep.monotone.passed
    assert not rep.concavity.passed
    assert not rep.strong_concavity.passed
    assert rep.concavity.first_violation == pytest.approx(-3.0)


def test_assumption_grid_requirements(sigmoid):
    with pytest.raises(ValueError):
        check_assumption_1(sigmoid, np.linspace(-2, 4, 6001))
    with pytest.raises(ValueError):
        check_assumption_1(sigmoid, np.linspace(-3, 4, 701))


def test_nonmonotone_custom_curve_is_flagged_not_rejected():
    # bump on the assisting side, normalized at 0 and 1
    def g(f):
        f = np.asarray(f, dtype=float)
        return 1 - f + 0.3 * f * (f - 1) * np.exp(-((f + 1.5) ** 2))

    curve = custom_curve(g)
    rep = check_assumption_1(curve)
    assert not rep.monotone.passed
    assert rep.monotone.first_violation is not None


def test_custom_curve_requires_normalization():
    with pytest.raises(DomainError):
        custom_curve(lambda f: 2 - np.asarray(f))


def test_custom_curve_finite_difference_curvature(sigmoid):
    curve = custom_curve(sigmoid.g)
    f = np.linspace(-2, 3, 51)
    assert np.allclose(curve.d2g(f), sigmoid.d2g(f), atol=1e-6)


def test_tabulated_curve_reproduces_source(sigmoid):
    f = np.linspace(-5, 6, 2201)
    curve = tabulated_curve(f, sigmoid.g(f))
    x = np.linspace(-4, 5, 333)
    assert np.allclose(curve.g(x), sigmoid.g(x), atol=1e-9)
    assert curve.g(100.0) == pytest.approx(sigmoid.g(6.0))


def test_kernel_spec(sigmoid, linear):
    code, par, _ = sigmoid.kernel_spec()
    assert code == 0 and np.allclose(par, [sigmoid.A, sigmoid.B, sigmoid.C, sigmoid.D])
    assert linear.kernel_spec()[0] == 1
    code, par, tab = custom_curve(sigmoid.g).kernel_spec()
    assert code == 2
    f = par[0] + par[1] * 40000
    assert tab[40000] == pytest.approx(sigmoid.g(f), abs=1e-14)
