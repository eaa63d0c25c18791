"""Averaging with general (possibly nonlinear, per-motor) tail force laws.

Positions are dimensionless (reference length ``sqrt(2 kBT / kappa)``) and
each tail potential is written ``Phi_i(xi)`` with ``xi = r / Lc``.  With
``lam = length_ref / Lc`` the tail force on motor ``i`` in thermal-force
units is ``Phi_i'(lam (x_i - z)) / lam``, which is ``x_i - z`` for the
quadratic potential.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .averaging import EffectiveTransport, pi_R_from_drifts, transport_from_drifts
from .density import StationaryDensity1D, localize_density
from .errors import DomainError, NonConfinementError
from .forcevelocity import ForceVelocityCurve
from .nondim import LAMBDA_MAX, LAMBDA_WARN, DimensionlessGroups
from .springs import (
    SpringLaw,
    check_confinement,
    linear_spring,
    load_tabulated_spring,
    quadratic_potential_spring,
    wormlike_chain,
)

__all__ = [
    "GeneralSpringSet",
    "cargo_density_general",
    "averaged_drift_general",
    "one_motor_transport_general",
    "two_motor_drifts_general",
    "two_motor_transport_general",
    "spring_from_name",
]

DEFAULT_LC = 10.0


@dataclass(frozen=True, eq=False)
class GeneralSpringSet:
    """Per-motor tail laws sharing a length scale ``Lc``.

    Build with :meth:`from_laws`, which validates ``lam`` and confinement.
    """

    laws: tuple
    length_scale_Lc: float
    lambda_: float

    @classmethod
    def from_laws(cls, laws: Sequence[SpringLaw], length_ref: float, *, check: bool = True):
        laws = tuple(
            quadratic_potential_spring(law.spring_kappa, DEFAULT_LC) if law.is_linear else law
            for law in laws
        )
        if not laws:
            raise ValueError("need at least one spring law")
        lcs = {law.length_scale_Lc for law in laws}
        if len(lcs) != 1:
            raise DomainError("all tails must share the same Lc")
        lc = lcs.pop()
        lam = length_ref / lc
        if lam > LAMBDA_MAX:
            raise DomainError(f"lambda = {lam:.3g} exceeds {LAMBDA_MAX}")
        if lam > LAMBDA_WARN:
            warnings.warn(f"lambda = {lam:.3g} > 1: tail law probed beyond its linear range",
                          stacklevel=2)
        if check:
            for law in laws:
                if not check_confinement(law):
                    raise NonConfinementError(f"tail law {law.name!r} is not confining")
        return cls(laws, float(lc), float(lam))

    @classmethod
    def homogeneous(cls, law: SpringLaw, n_motors: int, length_ref: float, **kw):
        return cls.from_laws([law] * n_motors, length_ref, **kw)

    @property
    def n_motors(self) -> int:
        return len(self.laws)

    def force(self, i: int, u):
        """Tail force on motor ``i`` (thermal units) at separation ``u = x_i - z``."""
        lam = self.lambda_
        return self.laws[i].dphi(lam * np.asarray(u, dtype=float)) / lam

    def potential(self, i: int, u):
        lam = self.lambda_
        return self.laws[i].phi(lam * np.asarray(u, dtype=float)) / lam**2

    def reach(self, i: int) -> float:
        """Largest admissible ``|x_i - z|`` (dimensionless)."""
        return self.laws[i].xi_max / self.lambda_


def cargo_density_general(x, theta_tilde: float, springs: GeneralSpringSet, *,
                          n: int = 4001) -> StationaryDensity1D:
    """Quasi-stationary cargo law with motors frozen at ``x``.

    ``log m(z) = -2 [theta z + sum_i Phi_i(lam (x_i - z)) / lam**2]`` up to
    normalization.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != springs.n_motors:
        raise ValueError("one position per spring law is required")
    lo = max(xi - springs.reach(i) for i, xi in enumerate(x))
    hi = min(xi + springs.reach(i) for i, xi in enumerate(x))
    if not lo < hi:
        raise DomainError("motor positions cannot share one cargo within the tail domain")

    def log_fn(z):
        total = theta_tilde * z
        for i, xi in enumerate(x):
            total = total + springs.potential(i, xi - z)
        with np.errstate(invalid="ignore"):
            return np.where(np.isfinite(total), -2.0 * total, -np.inf)

    center = float(np.clip((x.sum() - theta_tilde) / x.size, lo, hi))
    half = 10.0 / math.sqrt(x.size)
    return localize_density(log_fn, center, half, n=n, domain=(lo, hi), kind="cargo",
                            theta_tilde=theta_tilde)


def averaged_drift_general(curve: ForceVelocityCurve, x, theta_tilde: float,
                           springs: GeneralSpringSet, i: int, s: float,
                           density: Optional[StationaryDensity1D] = None) -> float:
    """Mean speed of motor ``i`` with the cargo averaged over its quasi-stationary law."""
    if density is None:
        density = cargo_density_general(x, theta_tilde, springs)
    xi = float(np.atleast_1d(x)[i])
    return density.expect(lambda z: curve.g(s * springs.force(i, xi - z)))


def one_motor_transport_general(curve: ForceVelocityCurve, groups: DimensionlessGroups,
                                springs: GeneralSpringSet) -> EffectiveTransport:
    """Small-friction one-motor velocity under a general tail law."""
    if springs.n_motors != 1:
        raise ValueError("expected a single-motor spring set")
    dens = cargo_density_general([0.0], groups.theta_tilde, springs)
    v = averaged_drift_general(curve, [0.0], groups.theta_tilde, springs, 0, groups.s, dens)
    return EffectiveTransport.build(groups, v, groups.rho / 2, quad_error=dens.quad_error)


def two_motor_drifts_general(curve: ForceVelocityCurve, groups: DimensionlessGroups,
                             springs: GeneralSpringSet, theta_tilde: float, r_grid=None):
    """Tabulated drifts of both motors as functions of ``r = x1 - x2``.

    Returns ``(drift1, drift2, domain)``; the drifts are cubic splines on
    ``r_grid`` (by default 801 points spanning the admissible separations,
    capped at ``|r| <= 40``).
    """
    if springs.n_motors != 2:
        raise ValueError("expected a two-motor spring set")
    limit = springs.reach(0) + springs.reach(1)
    if r_grid is None:
        half = min(40.0, 0.999 * limit)
        r_grid = np.linspace(-half, half, 801)
    r_grid = np.asarray(r_grid, dtype=float)
    d1 = np.empty_like(r_grid)
    d2 = np.empty_like(r_grid)
    for k, r in enumerate(r_grid):
        x = (r / 2, -r / 2)
        dens = cargo_density_general(x, theta_tilde, springs, n=1201)
        d1[k] = averaged_drift_general(curve, x, theta_tilde, springs, 0, groups.s, dens)
        d2[k] = averaged_drift_general(curve, x, theta_tilde, springs, 1, groups.s, dens)
    s1, s2 = CubicSpline(r_grid, d1), CubicSpline(r_grid, d2)
    lo, hi = float(r_grid[0]), float(r_grid[-1])
    clamp = lambda f: (lambda r: f(np.clip(r, lo, hi)))  # noqa: E731
    return clamp(s1), clamp(s2), (lo, hi)


def two_motor_transport_general(curve: ForceVelocityCurve, groups: DimensionlessGroups,
                                springs: GeneralSpringSet, theta_tilde: float,
                                r_grid=None) -> EffectiveTransport:
    """Two-motor midpoint velocity and diffusivity under general tail laws."""
    d1, d2, domain = two_motor_drifts_general(curve, groups, springs, theta_tilde, r_grid)
    dens = pi_R_from_drifts(d1, d2, groups.rho, domain=domain, kind="pi_R",
                            theta_tilde=theta_tilde)
    return transport_from_drifts(d1, d2, groups, dens, domain=domain, kind="pi_R",
                                 theta_tilde=theta_tilde)


_CALL = re.compile(r"^\s*(\w+)\s*(?:\((.*)\))?\s*$")


def spring_from_name(spec: str, kappa: float) -> SpringLaw:
    """Parse ``linear``, ``wlc``, ``wlc(kappa, lc)`` or ``custom(path)``.

    ``custom`` files tabulate ``Phi'`` on a uniform ``xi`` grid and use
    ``Lc = 10`` nm unless given as ``custom(path, Lc)``.
    """
    m = _CALL.match(spec)
    if not m:
        raise ValueError(f"cannot parse spring spec {spec!r}")
    name, args = m.group(1).lower(), m.group(2)
    parts = [a.strip() for a in args.split(",")] if args else []
    if name == "linear" and not parts:
        return linear_spring(kappa)
    if name == "quadratic":
        return quadratic_potential_spring(kappa, float(parts[0]) if parts else DEFAULT_LC)
    if name == "wlc":
        k = float(parts[0]) if parts else kappa
        lc = float(parts[1]) if len(parts) > 1 else 70.0
        return wormlike_chain(k, lc)
    if name == "custom" and parts:
        lc = float(parts[1]) if len(parts) > 1 else DEFAULT_LC
        return load_tabulated_spring(parts[0], kappa, lc)
    raise ValueError(f"unknown spring spec {spec!r}")
