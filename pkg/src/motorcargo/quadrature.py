"""Quadrature primitives: Gaussian averages and vectorized adaptive Simpson.

The adaptive Simpson routine works on many panels at once: every panel is
bisected until its Richardson error estimate meets the tolerance, and all
panels still pending at a level are refined in one array operation.  The
integrand must therefore accept and return numpy arrays.
"""

from __future__ import annotations

import warnings
from functools import lru_cache

import numpy as np

from .errors import QuadratureWarning

__all__ = [
    "hermite_rule",
    "gaussian_average",
    "adaptive_simpson",
    "panel_integrals",
    "cumulative_integral",
    "GH_NODES",
    "GH_TOL",
    "SIMPSON_RTOL",
]

GH_NODES = 64
GH_TOL = 1e-9
SIMPSON_RTOL = 1e-12


@lru_cache(maxsize=16)
def hermite_rule(n: int):
    """Nodes and weights for ``E[h(m + sqrt(v) Z)]`` with ``Z ~ N(0, 1)``.

    Returned as ``(sqrt(2) * x, w / sqrt(pi))`` from the physicists' rule so
    that the weights sum to one.
    """
    x, w = np.polynomial.hermite.hermgauss(n)
    x = np.sqrt(2.0) * x
    w = w / np.sqrt(np.pi)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _gh(g, mean, sd, n):
    z, w = hermite_rule(n)
    pts = mean[..., None] + sd[..., None] * z
    return np.sum(g(pts) * w, axis=-1)


def gaussian_average(g, mean, variance, nodes: int = GH_NODES, *, tol: float = GH_TOL,
                     full_output: bool = False):
    """Average of ``g`` over a normal law with given mean and variance.

    ``mean`` and ``variance`` broadcast against each other.  A zero variance
    returns ``g(mean)`` exactly.  The error estimate is the change when the
    node count is doubled; a :class:`QuadratureWarning` is issued when it
    exceeds ``tol``.

    Returns the average, or ``(average, error_estimate)`` with
    ``full_output=True``.
    """
    mean, variance = np.broadcast_arrays(
        np.asarray(mean, dtype=float), np.asarray(variance, dtype=float)
    )
    if np.any(variance < 0):
        raise ValueError("variance must be >= 0")
    sd = np.sqrt(variance)
    value = _gh(g, mean, sd, nodes)
    finer = _gh(g, mean, sd, 2 * nodes)
    value = np.where(variance == 0, g(mean), value)
    err = np.where(variance == 0, 0.0, np.abs(finer - value))
    max_err = float(np.max(err)) if err.size else 0.0
    if max_err > tol:
        warnings.warn(
            f"Gauss-Hermite average changed by {max_err:.2e} on node doubling",
            QuadratureWarning,
            stacklevel=2,
        )
    if value.ndim == 0:
        value, err = float(value), float(err)
    return (value, err) if full_output else value


def panel_integrals(f, a, b, rtol: float = SIMPSON_RTOL, atol: float = 1e-15, max_depth: int = 40):
    """Integrals of ``f`` over panels ``[a[k], b[k]]`` by adaptive Simpson.

    Returns ``(integrals, error_estimates)``.  The tolerance for a panel is
    ``max(atol * width, rtol * |integral|)``, halved on each bisection.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    n = a.size
    result = np.zeros(n)
    errors = np.zeros(n)
    if n == 0:
        return result, errors

    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    whole = (b - a) / 6.0 * (fa + 4 * fm + fb)
    owner = np.arange(n)
    tol = np.maximum(atol * np.abs(b - a), rtol * np.abs(whole))

    for depth in range(max_depth + 1):
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4 * frm + fb)
        refined = left + right
        err = np.abs(refined - whole) / 15.0
        done = (err <= tol) | (depth == max_depth) | ~np.isfinite(err)
        if np.any(done):
            np.add.at(result, owner[done], refined[done] + (refined[done] - whole[done]) / 15.0)
            np.add.at(errors, owner[done], err[done])
        todo = ~done
        if not np.any(todo):
            break
        a, m, b = a[todo], m[todo], b[todo]
        lm, rm = lm[todo], rm[todo]
        fa, fm, fb = fa[todo], fm[todo], fb[todo]
        flm, frm = flm[todo], frm[todo]
        left, right, tol, owner = left[todo], right[todo], tol[todo] / 2, owner[todo]
        # each pending panel becomes its two halves
        a, m, b = np.concatenate([a, m]), np.concatenate([lm, rm]), np.concatenate([m, b])
        fa, fm, fb = np.concatenate([fa, fm]), np.concatenate([flm, frm]), np.concatenate([fm, fb])
        whole = np.concatenate([left, right])
        tol = np.concatenate([tol, tol])
        owner = np.concatenate([owner, owner])
    return result, errors


def adaptive_simpson(f, a: float, b: float, rtol: float = SIMPSON_RTOL, atol: float = 1e-15,
                     panels: int = 64):
    """Integral of a vectorized ``f`` over ``[a, b]``; returns ``(value, error)``."""
    edges = np.linspace(a, b, panels + 1)
    vals, errs = panel_integrals(f, edges[:-1], edges[1:], rtol=rtol, atol=atol)
    return float(np.sum(vals)), float(np.sum(errs))


def cumulative_integral(f, x, origin: float = 0.0, rtol: float = SIMPSON_RTOL, atol: float = 1e-15):
    """``F(x_k) = int_origin^{x_k} f`` on a sorted grid, by adaptive Simpson per cell.

    Returns ``(F, total_error_estimate)``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or np.any(np.diff(x) <= 0):
        raise ValueError("grid must be strictly increasing")
    cells, cell_err = panel_integrals(f, x[:-1], x[1:], rtol=rtol, atol=atol)
    F = np.concatenate([[0.0], np.cumsum(cells)])
    head, head_err = adaptive_simpson(f, origin, x[0], rtol=rtol, atol=atol, panels=8) \
        if x[0] != origin else (0.0, 0.0)
    return F + head, float(np.sum(cell_err) + head_err)
