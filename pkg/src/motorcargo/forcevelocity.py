"""Nondimensional force-velocity curves ``g(f)`` and their structural checks.

``f`` is the opposing force divided by the stall force, and ``g`` is the
instantaneous motor speed divided by the unloaded speed, so ``g(0) = 1`` and
``g(1) = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError

__all__ = [
    "ForceVelocityCurve",
    "build_sigmoid_curve",
    "linear_curve",
    "custom_curve",
    "tabulated_curve",
    "ClauseResult",
    "AssumptionReport",
    "check_assumption_1",
    "default_force_grid",
]

SIGMOID, LINEAR, CUSTOM = "sigmoid", "linear", "custom"

# centered-difference spacing for curvature of tabulated / derivative-free curves
FD_STEP = 1e-4
NORMALIZATION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ForceVelocityCurve:
    """A bounded force-velocity curve with first and second derivatives.

    Use :func:`build_sigmoid_curve`, :func:`linear_curve`,
    :func:`custom_curve` or :func:`tabulated_curve` rather than constructing
    instances directly.
    """

    kind: str
    A: float = np.nan
    B: float = np.nan
    C: float = np.nan
    D: float = np.nan
    _g: Optional[Callable] = field(default=None, repr=False)
    _dg: Optional[Callable] = field(default=None, repr=False)
    _d2g: Optional[Callable] = field(default=None, repr=False)
    g_minus_inf: float = np.nan
    g_plus_inf: float = np.nan
    # uniform table used by the compiled integrator for custom curves
    table: Optional[tuple] = field(default=None, repr=False)

    def __call__(self, f):
        return self.g(f)

    def g(self, f):
        f = np.asarray(f, dtype=float)
        if self.kind == SIGMOID:
            return self.A - self.B * np.tanh(self.C * f - self.D)
        if self.kind == LINEAR:
            return 1.0 - f
        return np.asarray(self._g(f), dtype=float)

    def dg(self, f):
        f = np.asarray(f, dtype=float)
        if self.kind == SIGMOID:
            return -self.B * self.C / np.cosh(self.C * f - self.D) ** 2
        if self.kind == LINEAR:
            return np.full_like(f, -1.0)
        if self._dg is not None:
            return np.asarray(self._dg(f), dtype=float)
        return (self.g(f + FD_STEP) - self.g(f - FD_STEP)) / (2 * FD_STEP)

    def d2g(self, f):
        f = np.asarray(f, dtype=float)
        if self.kind == SIGMOID:
            u = self.C * f - self.D
            return 2 * self.B * self.C**2 * np.tanh(u) / np.cosh(u) ** 2
        if self.kind == LINEAR:
            return np.zeros_like(f)
        if self._d2g is not None:
            return np.asarray(self._d2g(f), dtype=float)
        return (self.g(f + FD_STEP) - 2 * self.g(f) + self.g(f - FD_STEP)) / FD_STEP**2

    def kernel_spec(self):
        """Flat description consumed by the compiled Euler-Maruyama kernel.

        Returns ``(code, params, table)``: code 0 is the sigmoid, 1 the linear
        curve, 2 a uniform table ``(f0, df)`` with linear interpolation and
        constant extrapolation.
        """
        if self.kind == SIGMOID:
            return 0, np.array([self.A, self.B, self.C, self.D]), np.zeros(1)
        if self.kind == LINEAR:
            return 1, np.zeros(4), np.zeros(1)
        if self.table is None:
            raise DomainError("custom curve has no simulation table")
        f0, df, values = self.table
        return 2, np.array([f0, df, 0.0, 0.0]), np.asarray(values, dtype=float)


def build_sigmoid_curve(v_max: float, v_min: float, v: float) -> ForceVelocityCurve:
    """Sigmoid ``g(f) = A - B tanh(C f - D)`` pinned by ``g(0)=1``, ``g(1)=0``
    and the asymptotes ``v_max/v`` (assisting) and ``v_min/v`` (superstall).

    Examples
    --------
    >>> c = build_sigmoid_curve(600.0, -50.0, 500.0)
    >>> round(c.A, 12), round(c.B, 12)
    (0.55, 0.65)
    """
    if not (v_min <= 0 < v < v_max):
        raise DomainError("need v_min <= 0 < v < v_max")
    if not abs(v_min) < v_max:
        raise DomainError("need |v_min| < v_max")
    if not v > 0.5 * (v_max + v_min):
        raise DomainError("need v > (v_max + v_min)/2")
    width = v_max - v_min
    args = (
        (2 * v - v_max - v_min) / width,
        (v_max + v_min) / width,
        (v_max + v_min - 2 * v) / width,
    )
    if any(abs(a) >= 1 for a in args):
        raise DomainError(f"arctanh argument outside (-1, 1): {args}")
    A = (v_max + v_min) / (2 * v)
    B = width / (2 * v)
    D = float(np.arctanh(args[0]))
    C = float(np.arctanh(args[1]) - np.arctanh(args[2]))
    return ForceVelocityCurve(
        SIGMOID, A=A, B=B, C=C, D=D, g_minus_inf=v_max / v, g_plus_inf=v_min / v
    )


def linear_curve() -> ForceVelocityCurve:
    """The unbounded linear curve ``g(f) = 1 - f``."""
    return ForceVelocityCurve(LINEAR, g_minus_inf=np.inf, g_plus_inf=-np.inf)


def _sim_table(g, lo=-40.0, hi=40.0, n=80001):
    f = np.linspace(lo, hi, n)
    return (lo, (hi - lo) / (n - 1), np.asarray(g(f), dtype=float))


def custom_curve(g, dg=None, d2g=None, *, validate=True, table_range=(-40.0, 40.0)):
    """Wrap closed-form callables as a curve.

    ``dg``/``d2g`` default to centered finite differences.  With
    ``validate=True`` the normalization ``g(0)=1``, ``g(1)=0`` is enforced;
    pass ``False`` for test drifts such as ``g = 0``.  A table on
    ``table_range`` (spacing 1e-3) feeds the simulator; outside it the curve is
    held constant.
    """
    if validate:
        _check_normalization(g)
    lo, hi = table_range
    big = np.array([lo, hi])
    ends = np.asarray(g(big), dtype=float)
    return ForceVelocityCurve(
        CUSTOM,
        _g=g,
        _dg=dg,
        _d2g=d2g,
        g_minus_inf=float(ends[0]),
        g_plus_inf=float(ends[1]),
        table=_sim_table(g, lo, hi, int(round((hi - lo) / 1e-3)) + 1),
    )


def tabulated_curve(f, values, *, validate=True):
    """Curve from samples ``values = g(f)`` via a cubic spline.

    The spline is held constant beyond the sampled range.  Second derivatives
    come from centered differences at spacing 1e-4.
    """
    f = np.asarray(f, dtype=float)
    values = np.asarray(values, dtype=float)
    if f.ndim != 1 or f.shape != values.shape or np.any(np.diff(f) <= 0):
        raise ValueError("need a strictly increasing 1-D grid matching the values")
    spline = CubicSpline(f, values)
    lo, hi = f[0], f[-1]

    def g(x):
        return spline(np.clip(x, lo, hi))

    def dg(x):
        x = np.asarray(x, dtype=float)
        return np.where((x < lo) | (x > hi), 0.0, spline(np.clip(x, lo, hi), 1))

    if validate:
        _check_normalization(g)
    return ForceVelocityCurve(
        CUSTOM,
        _g=g,
        _dg=dg,
        g_minus_inf=float(values[0]),
        g_plus_inf=float(values[-1]),
        table=_sim_table(g, min(lo, -40.0), max(hi, 40.0)),
    )


def _check_normalization(g):
    g0, g1 = (float(np.asarray(g(np.array(x)))) for x in (0.0, 1.0))
    if abs(g0 - 1) > NORMALIZATION_TOL or abs(g1) > NORMALIZATION_TOL:
        raise DomainError(f"curve must satisfy g(0)=1, g(1)=0; got {g0!r}, {g1!r}")


# --------------------------------------------------------------------------
# structural assumptions


@dataclass(frozen=True)
class ClauseResult:
    passed: bool
    first_violation: Optional[float] = None
    detail: str = ""


@dataclass(frozen=True)
class AssumptionReport:
    """Per-clause outcome of the sampled structural checks.

    ``f_star_sup`` is the supremum of admissible curvature-switch points
    ``f_*`` found on the grid (``nan`` when the curvature clause fails).
    """

    monotone: ClauseResult
    concavity: ClauseResult
    strong_concavity: ClauseResult
    f_star_sup: float = np.nan

    @property
    def passed(self) -> bool:
        return self.monotone.passed and self.concavity.passed and self.strong_concavity.passed


def default_force_grid() -> np.ndarray:
    return np.linspace(-3.0, 4.0, 7001)


def check_assumption_1(curve: ForceVelocityCurve, f_grid=None) -> AssumptionReport:
    """Sample monotonicity, curvature sign pattern and strong concavity of ``g``.

    The grid must cover ``[-3, 4]`` with spacing at most 1e-3.  Non-monotone
    custom curves are reported, not rejected.
    """
    f = default_force_grid() if f_grid is None else np.sort(np.asarray(f_grid, dtype=float))
    if f[0] > -3.0 or f[-1] < 4.0:
        raise ValueError("force grid must cover [-3, 4]")
    if np.max(np.diff(f)) > 1e-3 * (1 + 1e-9):
        raise ValueError("force grid spacing must be <= 1e-3")

    g = curve.g(f)
    bad = np.nonzero(np.diff(g) >= 0)[0]
    monotone = ClauseResult(
        bad.size == 0, None if bad.size == 0 else float(f[bad[0] + 1]), "g strictly decreasing"
    )

    # clause (ii): need f_* in (0, 1/2) with g'' < 0 on f <= f_* and g'' > 0 on f >= 1 - f_*
    curv = curve.d2g(f)
    nonneg = np.nonzero(curv >= 0)[0]
    nonpos = np.nonzero(curv <= 0)[0]
    left_limit = f[nonneg[0]] if nonneg.size else np.inf
    right_limit = 1.0 - f[nonpos[-1]] if nonpos.size else np.inf
    sup = min(left_limit, right_limit, 0.5)
    if sup > 0:
        concavity = ClauseResult(True, None, "curvature switches sign once about the middle")
        f_star = float(sup)
    else:
        first = f[nonneg[0]] if left_limit <= 0 else f[nonpos[-1]]
        concavity = ClauseResult(False, float(first), "no admissible f_* in (0, 1/2)")
        f_star = np.nan

    pos = f[f > 0]
    eta = curve.g(pos) + curve.g(-pos)
    eta_tilde = curve.g(1 + pos) + curve.g(1 - pos)
    bad_eta = np.nonzero(np.diff(eta) >= 0)[0]
    bad_tilde = np.nonzero(np.diff(eta_tilde) <= 0)[0]
    if bad_eta.size:
        strong = ClauseResult(False, float(pos[bad_eta[0] + 1]), "g(f)+g(-f) not decreasing")
    elif bad_tilde.size:
        strong = ClauseResult(False, float(pos[bad_tilde[0] + 1]), "g(1+f)+g(1-f) not increasing")
    else:
        strong = ClauseResult(True, None, "symmetric sums monotone")
    return AssumptionReport(monotone, concavity, strong, f_star)
