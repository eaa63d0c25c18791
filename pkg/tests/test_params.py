import json
import math

import pytest

from motorcargo import DomainError, PhysicalParams, load_params, preset


def test_preset_values(params):
    assert params.stall_force_Fstar == 7.0
    assert params.free_velocity_v == 500.0
    assert params.spring_kappa == 0.34
    assert params.motor_diffusion_sigma2 == 5000.0
    assert params.motor_count_N == 1
    assert params.gamma == pytest.approx(1e-5, rel=1e-12)


def test_friction_is_derived(params):
    p = params.with_friction(1e-2)
    assert p.gamma == pytest.approx(1e-2, rel=1e-12)
    assert p.cargo_radius_a == params.cargo_radius_a
    assert "gamma" not in params.to_dict()


@pytest.mark.parametrize(
    "field, value",
    [
        ("stall_force_Fstar", 0.0),
        ("free_velocity_v", -1.0),
        ("spring_kappa", 0.0),
        ("kBT", -4.1),
        ("viscosity_eta", float("nan")),
        ("v_min", 10.0),
        ("v_max", 400.0),
        ("v_min", -700.0),
        ("motor_count_N", 0),
    ],
)
def test_invariants_rejected(params, field, value):
    with pytest.raises(DomainError):
        params.replace(**{field: value})


def test_midpoint_velocity_rejected(params):
    # v must exceed (v_max + v_min)/2
    with pytest.raises(DomainError):
        params.replace(free_velocity_v=275.0)


def test_zero_vmin_accepted(params):
    assert params.replace(v_min=0.0).v_min == 0.0


def test_load_json_and_yaml(tmp_path):
    j = tmp_path / "p.json"
    j.write_text(json.dumps({"preset": "kinesin_invitro", "trap_force_theta": 3.0}))
    assert load_params(j).trap_force_theta == 3.0
    y = tmp_path / "p.yaml"
    y.write_text("preset: kinesin_invitro\nmotor_count_N: 2\n")
    assert load_params(y).motor_count_N == 2


def test_unknown_key_rejected(tmp_path):
    y = tmp_path / "p.yaml"
    y.write_text("preset: kinesin_invitro\ngamma: 1.0\n")
    with pytest.raises(KeyError):
        load_params(y)


def test_full_file_without_preset(tmp_path, params):
    j = tmp_path / "p.json"
    j.write_text(json.dumps(params.to_dict()))
    assert load_params(j) == params


def test_unknown_preset():
    with pytest.raises(KeyError):
        preset("dynein")


def test_params_frozen(params):
    with pytest.raises(Exception):
        params.kBT = 1.0
    assert isinstance(params, PhysicalParams)
    assert math.isfinite(params.gamma)
