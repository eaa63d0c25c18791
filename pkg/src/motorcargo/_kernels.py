"""Compiled Euler-Maruyama steps for the rescaled motor-cargo system.

The kernel advances one replica through a block of pre-drawn standard
normals, so random number generation stays in numpy and the stream for a
replica does not depend on how blocks are scheduled.
"""

import math

import numpy as np
from numba import njit

OK = 0
NONFINITE = 1
DOMAIN_EXIT = 2


@njit(cache=True, nogil=True)
def _g(f, code, par, tab):
    if code == 0:
        return par[0] - par[1] * math.tanh(par[2] * f - par[3])
    if code == 1:
        return 1.0 - f
    # uniform table with linear interpolation, constant beyond the ends
    u = (f - par[0]) / par[1]
    n = tab.shape[0]
    if u <= 0.0:
        return tab[0]
    if u >= n - 1:
        return tab[n - 1]
    k = int(u)
    w = u - k
    return (1.0 - w) * tab[k] + w * tab[k + 1]


@njit(cache=True, nogil=True)
def _tail(u, code, spar, lam):
    """Tail force in thermal units; nan signals a separation outside the law's domain."""
    if code == 0 or code == 1:
        return u
    xi = lam * u
    if code == 2:
        a = abs(xi)
        if a >= 1.0:
            return math.nan
        sgn = 1.0 if xi > 0 else (-1.0 if xi < 0 else 0.0)
        return (xi + sgn * spar[0] * ((1.0 - a) ** -2 - 1.0)) / lam
    lo = spar[0]
    dx = spar[1]
    n = spar.shape[0] - 2
    t = (xi - lo) / dx
    if t <= 0.0 or t >= n - 1:
        return math.nan
    k = int(t)
    w = t - k
    return ((1.0 - w) * spar[2 + k] + w * spar[3 + k]) / lam


@njit(cache=True, nogil=True)
def em_block(state, normals, dt, eps, s, theta, motor_scale, cargo_scale,
             gcode, gpar, gtab, scode, spar, lam, rec, step0, stride, fail):
    """Advance ``state = (X_1..X_N, Z)`` through ``normals.shape[0]`` steps.

    Recorded states go to ``rec[(step0 + k + 1) // stride]`` whenever that
    step count is a multiple of ``stride``.  Returns a status code; on
    failure ``fail[0]`` holds the step index and ``state`` the last finite
    state.
    """
    n_motors = state.shape[0] - 1
    forces = np.empty(n_motors)
    new_x = np.empty(n_motors)
    for k in range(normals.shape[0]):
        z = state[n_motors]
        total = 0.0
        for i in range(n_motors):
            f = _tail(state[i] - z, scode, spar, lam)
            if math.isnan(f):
                fail[0] = step0 + k
                return DOMAIN_EXIT
            forces[i] = f
            total += f
        new_z = z + (total - theta) * dt + cargo_scale * normals[k, n_motors]
        finite = math.isfinite(new_z)
        for i in range(n_motors):
            new_x[i] = state[i] + eps * _g(s * forces[i], gcode, gpar, gtab) * dt \
                + motor_scale * normals[k, i]
            finite = finite and math.isfinite(new_x[i])
        if not finite:
            fail[0] = step0 + k
            return NONFINITE
        for i in range(n_motors):
            state[i] = new_x[i]
        state[n_motors] = new_z
        done = step0 + k + 1
        if done % stride == 0:
            j = done // stride
            for i in range(n_motors + 1):
                rec[j, i] = state[i]
    return OK
