"""Reduced (averaged) transport theory for one and two motors.

All velocities are first computed on the slow clock, where a free unloaded
motor moves at unit speed, then converted with the reference scales of the
:class:`~motorcargo.nondim.DimensionlessGroups`.

Two-motor quantities are built from a drift function ``G``: ``G(r)`` is the
mean speed of a motor whose partner sits a signed distance ``r`` ahead of it
under zero load.  With separation ``R = X1 - X2`` and load ``theta``, motor 1
moves at ``G(-R - theta)`` and motor 2 at ``G(R - theta)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_simpson

from .density import TAIL_DROP, StationaryDensity1D, localize_density
from .errors import DomainError, NonConfinementError, QuadratureWarning
from .forcevelocity import ForceVelocityCurve
from .nondim import DimensionlessGroups, regime_classify
from .params import PhysicalParams
from .quadrature import GH_NODES, SIMPSON_RTOL, cumulative_integral
from .quadrature import gaussian_average as _gauss

__all__ = [
    "EffectiveTransport",
    "StallResult",
    "gaussian_average",
    "one_motor_velocity_low_visc",
    "pi_Y_density",
    "one_motor_velocity_exact",
    "one_motor_velocity_linear_approx",
    "G_fixed_cargo",
    "G_fluctuating_cargo",
    "fixed_cargo_G",
    "fluctuating_cargo_G",
    "pi_R_density",
    "pi_R_from_drifts",
    "two_motor_velocity",
    "two_motor_diffusivity",
    "transport_from_drifts",
    "force_balance_velocity",
    "stall_force",
]

CONSISTENCY_RTOL = 1e-6


@dataclass(frozen=True)
class EffectiveTransport:
    """Long-run velocity and diffusivity of the tracked coordinate.

    ``velocity``/``diffusivity`` are on the slow clock; the ``*_nm_s`` fields
    are dimensional.  ``diffusivity`` is ``nan`` when the theory used does
    not provide one.
    """

    velocity: float
    velocity_nm_s: float
    diffusivity: float
    diffusivity_nm2_s: float
    regime: str
    quad_error: float = 0.0
    flagged: bool = False
    details: dict = field(default_factory=dict)

    @classmethod
    def build(cls, groups, velocity, diffusivity=math.nan, quad_error=0.0, flagged=False, **details):
        return cls(
            float(velocity),
            float(velocity) * groups.velocity_ref,
            float(diffusivity),
            float(diffusivity) * groups.diffusivity_ref,
            regime_classify(groups),
            float(quad_error),
            bool(flagged),
            details,
        )


@dataclass(frozen=True)
class StallResult:
    theta: float
    bracket: tuple
    iterations: int
    flagged: bool = False
    first_nonmonotone: Optional[float] = None


# --------------------------------------------------------------------------
# one motor


def gaussian_average(curve: ForceVelocityCurve, mean, variance, nodes: int = GH_NODES,
                     full_output: bool = False):
    """Mean of ``g`` over a normal force with the given mean and variance."""
    return _gauss(curve.g, mean, variance, nodes, full_output=full_output)


def one_motor_velocity_low_visc(curve: ForceVelocityCurve, groups: DimensionlessGroups,
                                nodes: int = GH_NODES) -> EffectiveTransport:
    """Small-friction one-motor velocity and diffusivity.

    The cargo equilibrates around the motor, so the force is normal with mean
    ``s*theta`` and variance ``s**2/2`` (``theta/F*`` and ``kBT*kappa/F***2``
    in physical units); the motor diffusivity ``rho/2`` is unchanged.
    """
    s = groups.s
    value, err = gaussian_average(curve, s * groups.theta_tilde, s * s / 2, nodes, full_output=True)
    return EffectiveTransport.build(groups, value, groups.rho / 2, quad_error=err,
                                    flagged=err > 1e-9)


def pi_Y_density(curve: ForceVelocityCurve, groups: DimensionlessGroups, *,
                 rtol: float = SIMPSON_RTOL, n: int = 4001) -> StationaryDensity1D:
    """Stationary law of the motor-cargo separation for one motor at any friction.

    ``log pi_Y(y) = [-(y - theta)**2 + 2 eps int_0^y g(s u) du] / (1 + eps rho)``
    up to a constant; the inner integral uses adaptive Simpson.
    """
    eps, s, rho, theta = groups.epsilon, groups.s, groups.rho, groups.theta_tilde
    if not eps > 0:
        raise DomainError("epsilon must be > 0")

    def log_fn(y):
        prim, err = cumulative_integral(lambda u: curve.g(s * u), y, origin=0.0, rtol=rtol)
        return (-(y - theta) ** 2 + 2 * eps * prim) / (1 + eps * rho), 2 * eps * err / (1 + eps * rho)

    center = theta + eps * float(curve.g(s * theta))
    width = 8.0 * math.sqrt(1 + eps * rho)
    return localize_density(log_fn, center, width, n=n, kind="pi_Y", theta_tilde=theta)


def one_motor_velocity_exact(curve: ForceVelocityCurve, groups: DimensionlessGroups,
                             density: Optional[StationaryDensity1D] = None) -> EffectiveTransport:
    """One-motor velocity valid at any cargo friction.

    Averages ``g(s*y)`` over :func:`pi_Y_density` and cross-checks it against
    the net-force form ``(<Y> - theta)/eps``; a relative mismatch above 1e-6
    flags the result.
    """
    if density is None:
        density = pi_Y_density(curve, groups)
    s, eps, theta = groups.s, groups.epsilon, groups.theta_tilde
    v_drift = density.expect(lambda y: curve.g(s * y))
    v_force = (density.mean() - theta) / eps
    mismatch = abs(v_drift - v_force)
    flagged = mismatch > CONSISTENCY_RTOL * max(abs(v_drift), abs(v_force), 1e-3)
    if flagged:
        warnings.warn(
            f"drift and net-force velocities disagree by {mismatch:.3e}", QuadratureWarning,
            stacklevel=2,
        )
    return EffectiveTransport.build(
        groups, v_drift, quad_error=max(mismatch, density.quad_error), flagged=flagged,
        velocity_net_force=v_force,
    )


def one_motor_velocity_linear_approx(p: PhysicalParams) -> float:
    """Closed-form one-motor speed (nm/s) for a linear force-velocity curve.

    ``v (1 - theta/F*) / (1 + gamma v / F*)``, stated for loads in
    ``[-F*, F*]``.
    """
    F = p.stall_force_Fstar
    if not (-F <= p.trap_force_theta <= F):
        raise DomainError("trap force outside [-F*, F*]")
    v = p.free_velocity_v
    return v * (1 - p.trap_force_theta / F) / (1 + p.gamma * v / F)


def force_balance_velocity(curve: ForceVelocityCurve, groups: DimensionlessGroups,
                           n_motors: int = 2) -> float:
    """Slow-clock speed when each of ``n_motors`` carries an equal load share."""
    return float(curve.g(groups.s * groups.theta_tilde / n_motors))


# --------------------------------------------------------------------------
# two motors


def G_fixed_cargo(curve: ForceVelocityCurve, r, s: float):
    """Partner-induced drift with the cargo pinned at the motors' midpoint."""
    return curve.g(-s * np.asarray(r, dtype=float) / 2)


def G_fluctuating_cargo(curve: ForceVelocityCurve, r, s: float, nodes: int = GH_NODES):
    """Partner-induced drift averaged over cargo fluctuations.

    Normal average of ``g`` with mean ``-r s/2`` and variance ``s**2/4``.
    """
    return gaussian_average(curve, -np.asarray(r, dtype=float) * s / 2, s * s / 4, nodes)


def fixed_cargo_G(curve, s) -> Callable:
    return lambda r: G_fixed_cargo(curve, r, s)


def fluctuating_cargo_G(curve, s, nodes: int = GH_NODES) -> Callable:
    return lambda r: G_fluctuating_cargo(curve, r, s, nodes)


def _rho(groups):
    return groups.rho if hasattr(groups, "rho") else float(groups)


def pi_R_from_drifts(drift1: Callable, drift2: Callable, rho: float, *, rtol: float = SIMPSON_RTOL,
                     n: int = 4001, window: Optional[float] = None, drop: float = TAIL_DROP,
                     domain=(-np.inf, np.inf), **meta) -> StationaryDensity1D:
    """Stationary law of ``R = X1 - X2`` given each motor's drift as a function of ``R``.

    ``R`` diffuses with coefficient ``rho`` in the potential
    ``U(r) = int_0^r (drift2 - drift1)``; ``log pi_R = -U/rho``.  A finite
    ``domain`` bounds the separation (tails with a maximal extension).
    """
    if not rho > 0:
        raise DomainError("rho must be > 0")

    def slope(r):
        return drift2(r) - drift1(r)

    def log_fn(r):
        U, err = cumulative_integral(slope, r, origin=0.0, rtol=rtol)
        return -U / rho, err / rho

    if window is None:
        h = 1e-3
        curvature = float(slope(np.array([h]))[0] - slope(np.array([-h]))[0]) / (2 * h)
        window = 10.0 * math.sqrt(rho / curvature) if curvature > 0 else 20.0
    dens = localize_density(log_fn, 0.0, window, n=n, drop=drop, domain=domain, **meta)
    ends = slope(np.array(dens.truncation_bounds))
    if not (ends[0] < 0 < ends[1]):
        raise NonConfinementError(
            "separation potential does not grow at both window ends "
            "(is the force-velocity curve decreasing?)"
        )
    return dens


def pi_R_density(G: Callable, groups, theta_tilde: float, **kw) -> StationaryDensity1D:
    """Stationary separation law for two motors sharing load ``theta_tilde``.

    The law is even in ``r`` for any load, so the grid is mirrored about 0.
    """
    kw.setdefault("symmetric", True)
    return pi_R_from_drifts(
        lambda r: G(-r - theta_tilde), lambda r: G(r - theta_tilde), _rho(groups),
        kind="pi_R", theta_tilde=theta_tilde, **kw,
    )


def _centered_flux(mean_drift, dens):
    # running integral of (drift - V) * pi from whichever end is closer
    p = dens.density
    h = (mean_drift - dens.integrate(mean_drift * p)) * p
    from_left = cumulative_simpson(h, x=dens.grid, initial=0.0)
    from_right = -cumulative_simpson(h[::-1], x=-dens.grid[::-1], initial=0.0)[::-1]
    cdf = dens.cdf(dens.grid)
    return np.where(cdf <= 0.5, from_left, from_right)


def transport_from_drifts(drift1, drift2, groups, density=None, *, diffusivity=True,
                          retries: int = 2, **kw) -> EffectiveTransport:
    """Midpoint velocity and diffusivity for two motors with given drifts.

    The diffusivity is ``rho/4 + int I(r)**2 / (rho pi(r)) dr`` where
    ``I(r) = int_{-inf}^r (drift_M - V) pi``.  If that integrand has not
    decayed at the window ends the window is widened (up to ``retries``
    times) before the result is flagged.
    """
    rho = _rho(groups)
    drop = kw.pop("drop", TAIL_DROP)
    for attempt in range(retries + 1):
        if density is None or attempt > 0:
            density = pi_R_from_drifts(drift1, drift2, rho, drop=drop, **kw)
        mid = 0.5 * (drift1(density.grid) + drift2(density.grid))
        velocity = density.integrate(mid * density.density)
        if not diffusivity:
            return EffectiveTransport.build(
                groups, velocity, quad_error=density.quad_error * np.max(np.abs(mid)),
                density=density,
            )
        flux = _centered_flux(mid, density)
        log_p = density.log_density - density.log_normalizer
        with np.errstate(divide="ignore"):
            outer = np.exp(2 * np.log(np.abs(flux)) - log_p) / rho
        peak = np.max(outer)
        decayed = peak == 0 or max(outer[0], outer[-1]) <= 1e-10 * peak
        if decayed:
            break
        drop += 20.0
    excess = density.integrate(outer)
    return EffectiveTransport.build(
        groups, velocity, rho / 4 + excess, quad_error=density.quad_error * np.max(np.abs(mid)),
        flagged=not decayed, density=density,
    )


def two_motor_velocity(G: Callable, groups, theta_tilde: float,
                       density: Optional[StationaryDensity1D] = None) -> EffectiveTransport:
    """Midpoint speed ``int G_+(r)/2 pi_R(r) dr`` for two motors."""
    d1 = lambda r: G(-r - theta_tilde)  # noqa: E731
    d2 = lambda r: G(r - theta_tilde)  # noqa: E731
    return transport_from_drifts(d1, d2, groups, density, diffusivity=False,
                                 kind="pi_R", theta_tilde=theta_tilde, symmetric=True)


def two_motor_diffusivity(G: Callable, groups, theta_tilde: float,
                          density: Optional[StationaryDensity1D] = None) -> EffectiveTransport:
    """Midpoint velocity and long-run diffusivity for two motors."""
    d1 = lambda r: G(-r - theta_tilde)  # noqa: E731
    d2 = lambda r: G(r - theta_tilde)  # noqa: E731
    return transport_from_drifts(d1, d2, groups, density, kind="pi_R", theta_tilde=theta_tilde,
                                 symmetric=True)


# --------------------------------------------------------------------------
# stall forces


def stall_force(velocity_fn: Callable[[float], float], bracket, tol: float = 1e-4,
                checks: int = 16, expand: int = 0) -> StallResult:
    """Smallest load at which ``velocity_fn`` stops being positive, by bisection.

    Only the sign of the velocity is used.  ``checks`` interior points of the
    bracket are sampled first; a sign pattern that is not a single ``+ ... -``
    switch flags the result and records the first offending load.  If the
    velocity is still positive at the upper end, the bracket width is doubled
    up to ``expand`` times.
    """
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    v_lo, v_hi = velocity_fn(lo), velocity_fn(hi)
    for _ in range(expand):
        if v_hi <= 0:
            break
        hi = lo + 2 * (hi - lo)
        v_hi = velocity_fn(hi)
    bracket = (lo, hi)
    if not (v_lo > 0 > v_hi):
        raise ValueError(f"bracket does not straddle a stall: V({lo})={v_lo}, V({hi})={v_hi}")

    probes = np.linspace(lo, hi, checks + 2)[1:-1]
    positive = [velocity_fn(t) > 0 for t in probes]
    first_bad = None
    seen_nonpositive = False
    for t, pos in zip(probes, positive):
        if not pos:
            seen_nonpositive = True
        elif seen_nonpositive:
            first_bad = float(t)
            break
    # tighten the bracket with the probes before bisecting
    for t, pos in zip(probes, positive):
        if pos and first_bad is None:
            lo = max(lo, float(t))
    for t, pos in zip(probes[::-1], positive[::-1]):
        if not pos and first_bad is None:
            hi = min(hi, float(t))

    it = 0
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if velocity_fn(mid) > 0:
            lo = mid
        else:
            hi = mid
        it += 1
    return StallResult(0.5 * (lo + hi), (float(bracket[0]), float(bracket[1])), it,
                       flagged=first_bad is not None, first_nonmonotone=first_bad)
