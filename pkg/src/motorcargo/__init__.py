"""Stochastic motor-cargo transport: simulation and averaged theory.

Cargo is towed along a filament by one or more processive motors through
elastic tails.  The package rescales the model, integrates it by Monte
Carlo, and computes long-run velocities, diffusivities and stall forces from
the stochastically averaged (reduced) equations.
"""

__version__ = "0.1.0"

from .averaging import (
    EffectiveTransport,
    G_fixed_cargo,
    G_fluctuating_cargo,
    gaussian_average,
    one_motor_velocity_exact,
    one_motor_velocity_linear_approx,
    one_motor_velocity_low_visc,
    pi_R_density,
    pi_Y_density,
    stall_force,
    two_motor_diffusivity,
    two_motor_velocity,
)
from .density import StationaryDensity1D
from .errors import DomainError, NonConfinementError, QuadratureWarning, SimulationError
from .forcevelocity import (
    ForceVelocityCurve,
    build_sigmoid_curve,
    check_assumption_1,
    custom_curve,
    linear_curve,
)
from .nondim import DimensionlessGroups, compute_groups, regime_classify, rescale_trajectory
from .nonlinear import GeneralSpringSet, averaged_drift_general, cargo_density_general
from .params import PhysicalParams, load_params, preset
from .sde import SimConfig, TrajectoryEnsemble, TransportSummary, estimate_transport, integrate_system
from .springs import SpringLaw, linear_spring, quadratic_potential_spring, wormlike_chain

__all__ = [
    "__version__",
    "DimensionlessGroups",
    "DomainError",
    "EffectiveTransport",
    "ForceVelocityCurve",
    "G_fixed_cargo",
    "G_fluctuating_cargo",
    "GeneralSpringSet",
    "NonConfinementError",
    "PhysicalParams",
    "QuadratureWarning",
    "SimConfig",
    "SimulationError",
    "SpringLaw",
    "StationaryDensity1D",
    "TrajectoryEnsemble",
    "TransportSummary",
    "averaged_drift_general",
    "build_sigmoid_curve",
    "cargo_density_general",
    "check_assumption_1",
    "compute_groups",
    "custom_curve",
    "estimate_transport",
    "gaussian_average",
    "integrate_system",
    "linear_curve",
    "linear_spring",
    "load_params",
    "one_motor_velocity_exact",
    "one_motor_velocity_linear_approx",
    "one_motor_velocity_low_visc",
    "pi_R_density",
    "pi_Y_density",
    "preset",
    "quadratic_potential_spring",
    "regime_classify",
    "rescale_trajectory",
    "stall_force",
    "two_motor_diffusivity",
    "two_motor_velocity",
    "wormlike_chain",
]
