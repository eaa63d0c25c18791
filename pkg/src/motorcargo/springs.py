"""Tail force laws connecting a motor to its cargo.

Force is measured against the motor's natural direction of motion, so a
positive separation ``r = X - Z`` (motor ahead of the cargo) gives a positive
opposing force.  General laws are written ``F(r) = Fbar * Phi'(r / Lc)`` with
``Fbar = kappa * Lc`` and a dimensionless potential ``Phi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError

__all__ = [
    "SpringLaw",
    "linear_spring",
    "wormlike_chain",
    "quadratic_potential_spring",
    "tabulated_spring",
    "spring_force",
    "check_confinement",
    "DEFAULT_CONTOUR_LENGTH",
]

DEFAULT_CONTOUR_LENGTH = 70.0  # nm, range over which the tail stays near-Hookean


@dataclass(frozen=True, eq=False)
class SpringLaw:
    """A linear or general tail law.

    For ``kind == "general"`` the callables ``phi`` and ``dphi`` give the
    dimensionless potential and its derivative; ``xi_max`` bounds the domain
    ``|xi| < xi_max`` (``inf`` when unbounded).  ``kernel`` is the flat form
    used by the compiled integrator.
    """

    kind: str
    spring_kappa: float
    length_scale_Lc: float = np.nan
    phi: Optional[Callable] = field(default=None, repr=False)
    dphi: Optional[Callable] = field(default=None, repr=False)
    xi_max: float = np.inf
    name: str = "linear"
    kernel: tuple = field(default=(0, (0.0,)), repr=False)

    @property
    def force_scale_Fbar(self) -> float:
        return self.spring_kappa * self.length_scale_Lc

    @property
    def is_linear(self) -> bool:
        return self.kind == "linear"


def linear_spring(kappa: float) -> SpringLaw:
    if not kappa > 0:
        raise DomainError("spring constant must be > 0")
    return SpringLaw("linear", float(kappa))


def quadratic_potential_spring(kappa: float, Lc: float = 10.0) -> SpringLaw:
    """General-form law with ``Phi(xi) = xi**2 / 2``; equivalent to a linear spring."""
    return SpringLaw(
        "general",
        float(kappa),
        float(Lc),
        phi=lambda xi: 0.5 * np.asarray(xi, dtype=float) ** 2,
        dphi=lambda xi: np.asarray(xi, dtype=float),
        name="quadratic",
        kernel=(1, (0.0,)),
    )


def wormlike_chain(kappa: float, lc: float = DEFAULT_CONTOUR_LENGTH, force_unit: float = 1.0):
    """Wormlike-chain tail ``F = kappa r + sgn(r)/4 ((1 - |r|/lc)**-2 - 1)``.

    The nonlinear term carries ``force_unit`` pN (1 pN as commonly quoted).
    The force diverges at the contour length ``lc``.
    """
    if not (kappa > 0 and lc > 0):
        raise DomainError("kappa and lc must be > 0")
    c = force_unit / (4.0 * kappa * lc)

    def dphi(xi):
        xi = np.asarray(xi, dtype=float)
        a = np.abs(xi)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = xi + np.sign(xi) * c * ((1.0 - a) ** -2 - 1.0)
            return np.where(a < 1.0, out, np.sign(xi) * np.inf)

    def phi(xi):
        xi = np.asarray(xi, dtype=float)
        a = np.abs(xi)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 0.5 * xi**2 + c * (1.0 / (1.0 - a) - 1.0 - a)
        return np.where(a < 1.0, out, np.inf)

    return SpringLaw(
        "general", float(kappa), float(lc), phi=phi, dphi=dphi, xi_max=1.0,
        name="wlc", kernel=(2, (c,)),
    )


def tabulated_spring(kappa: float, Lc: float, xi, dphi_values, name="custom") -> SpringLaw:
    """General law from ``Phi'`` sampled on a uniform ``xi`` grid.

    ``Phi`` is the spline antiderivative with ``Phi(0) = 0``; the law is
    undefined outside the tabulated range.
    """
    xi = np.asarray(xi, dtype=float)
    dphi_values = np.asarray(dphi_values, dtype=float)
    steps = np.diff(xi)
    if xi.ndim != 1 or xi.size < 4 or np.any(steps <= 0):
        raise ValueError("need an increasing 1-D grid with at least 4 points")
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise ValueError("tabulated spring grid must be uniform")
    if not (xi[0] < 0 < xi[-1]):
        raise ValueError("tabulated spring grid must straddle 0")
    spline = CubicSpline(xi, dphi_values)
    anti = spline.antiderivative()
    offset = float(anti(0.0))
    lo, hi = xi[0], xi[-1]

    def _inside(x):
        return (x > lo) & (x < hi)

    def dphi(x):
        x = np.asarray(x, dtype=float)
        return np.where(_inside(x), spline(np.clip(x, lo, hi)), np.nan)

    def phi(x):
        x = np.asarray(x, dtype=float)
        return np.where(_inside(x), anti(np.clip(x, lo, hi)) - offset, np.inf)

    return SpringLaw(
        "general", float(kappa), float(Lc), phi=phi, dphi=dphi,
        xi_max=min(-lo, hi), name=name,
        kernel=(3, (lo, steps[0]) + tuple(dphi_values)),
    )


def load_tabulated_spring(path, kappa: float, Lc: float) -> SpringLaw:
    """Read a two-column ``xi, dphi`` text/CSV file (``#`` comments allowed)."""
    data = np.loadtxt(Path(path), delimiter=",", comments="#", ndmin=2)
    return tabulated_spring(kappa, Lc, data[:, 0], data[:, 1], name=f"custom({path})")


def spring_force(law: SpringLaw, r):
    """Force in pN at signed separation ``r`` (nm)."""
    r = np.asarray(r, dtype=float)
    if law.is_linear:
        return law.spring_kappa * r
    xi = r / law.length_scale_Lc
    if np.any(np.abs(xi) >= law.xi_max):
        raise DomainError(
            f"separation beyond the {law.name} domain |r| < {law.xi_max * law.length_scale_Lc} nm"
        )
    return law.force_scale_Fbar * law.dphi(xi)


def check_confinement(law: SpringLaw, window=None, n=4001) -> bool:
    """Numerically check that ``exp(-2 Phi)`` is integrable on the window.

    The window defaults to the law's domain (or ``[-50, 50]`` when unbounded)
    and the integrand must be negligible at both ends.
    """
    if law.is_linear:
        return True
    if window is None:
        half = law.xi_max if np.isfinite(law.xi_max) else 50.0
        window = (-half, half)
    xi = np.linspace(window[0], window[1], n)[1:-1]
    with np.errstate(over="ignore", invalid="ignore"):
        w = np.exp(-2.0 * law.phi(xi))
    if not np.all(np.isfinite(w[1:-1]) | (w[1:-1] == 0)):
        return False
    peak = np.max(w)
    return bool(peak > 0 and w[0] < 1e-12 * peak and w[-1] < 1e-12 * peak)
