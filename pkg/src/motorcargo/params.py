"""Dimensional parameters of the motor-cargo model and their config files.

Units follow the pN / nm / s system used throughout the package.  The
``kinesin_invitro`` preset carries kinesin-1 values in a water-like buffer;
its viscosity is chosen so that the Stokes friction ``6*pi*a*eta`` equals the
tabulated 1e-5 pN s/nm for a 500 nm bead.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from .errors import DomainError

__all__ = ["PhysicalParams", "load_params", "params_from_mapping", "read_mapping", "preset", "PRESETS"]

PRESETS = ("kinesin_invitro",)


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional constants for motors, cargo, environment and trap.

    The cargo friction is derived from the radius and viscosity and is never
    stored on its own; use :meth:`with_friction` to sweep it.
    """

    step_size_L: float
    stall_force_Fstar: float
    free_velocity_v: float
    spring_kappa: float
    motor_diffusion_sigma2: float
    cargo_radius_a: float
    viscosity_eta: float
    trap_force_theta: float
    kBT: float
    v_max: float
    v_min: float
    motor_count_N: int = 1

    def __post_init__(self):
        positive = (
            "stall_force_Fstar",
            "free_velocity_v",
            "spring_kappa",
            "motor_diffusion_sigma2",
            "cargo_radius_a",
            "viscosity_eta",
            "kBT",
        )
        for name in positive:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
        if not (self.v_min <= 0 < self.free_velocity_v < self.v_max):
            raise DomainError("need v_min <= 0 < free_velocity_v < v_max")
        if not abs(self.v_min) < self.v_max:
            raise DomainError("need |v_min| < v_max")
        if not self.free_velocity_v > 0.5 * (self.v_max + self.v_min):
            raise DomainError("need free_velocity_v > (v_max + v_min)/2")
        if int(self.motor_count_N) != self.motor_count_N or self.motor_count_N < 1:
            raise DomainError("motor_count_N must be a positive integer")

    @property
    def gamma(self) -> float:
        """Stokes friction ``6*pi*a*eta`` of a spherical cargo (pN s/nm)."""
        return 6.0 * math.pi * self.cargo_radius_a * self.viscosity_eta

    def replace(self, **changes) -> "PhysicalParams":
        return dataclasses.replace(self, **changes)

    def with_friction(self, gamma: float) -> "PhysicalParams":
        """Same parameters with the viscosity rescaled to give friction ``gamma``."""
        eta = gamma / (6.0 * math.pi * self.cargo_radius_a)
        return self.replace(viscosity_eta=eta)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _coerce(raw: dict) -> PhysicalParams:
    names = {f.name for f in dataclasses.fields(PhysicalParams)}
    unknown = set(raw) - names
    if unknown:
        raise KeyError(f"unknown parameter keys: {sorted(unknown)}")
    values = {k: float(v) for k, v in raw.items()}
    if "motor_count_N" in values:
        values["motor_count_N"] = int(values["motor_count_N"])
    return PhysicalParams(**values)


def preset(name: str = "kinesin_invitro", **overrides) -> PhysicalParams:
    """Load a bundled parameter preset, optionally overriding fields."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {PRESETS}")
    text = resources.files(__package__).joinpath("presets").joinpath(f"{name}.json").read_text()
    raw = json.loads(text)
    raw.update(overrides)
    return _coerce(raw)


def read_mapping(path) -> dict:
    """Parse a JSON or YAML file that must hold a mapping."""
    path = Path(path)
    text = path.read_text()
    raw = json.loads(text) if path.suffix.lower() == ".json" else (yaml.safe_load(text) or {})
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: expected a mapping")
    return raw


def params_from_mapping(raw: dict) -> PhysicalParams:
    """Build parameters from a flat mapping; a ``preset`` key names the starting preset."""
    raw = dict(raw)
    base = raw.pop("preset", None)
    if base is not None:
        return preset(base, **raw)
    return _coerce(raw)


def load_params(path) -> PhysicalParams:
    """Read a flat key/value parameter file (JSON or YAML).

    A ``preset`` key names a bundled preset to start from; every other key
    overrides the field of the same name.
    """
    return params_from_mapping(read_mapping(path))
