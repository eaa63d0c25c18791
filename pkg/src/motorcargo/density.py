"""One-dimensional stationary densities stored as log-values on a grid."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .errors import NonConfinementError

__all__ = ["StationaryDensity1D", "localize_density", "TAIL_DROP"]

TAIL_DROP = 40.0  # log-units between the peak and both window ends


@dataclass(frozen=True, eq=False)
class StationaryDensity1D:
    """Density ``exp(log_density - log_normalizer)`` on a uniform odd-length grid.

    Integrals use composite Simpson on the stored grid; the normalizer is
    defined with the same rule, so :meth:`integrate` of the density is one.
    ``quad_error`` bounds the absolute error of the stored log-density.
    """

    grid: np.ndarray
    log_density: np.ndarray
    log_normalizer: float
    truncation_bounds: tuple
    quad_error: float = 0.0
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_log_values(cls, grid, log_density, quad_error=0.0, **meta):
        grid = np.asarray(grid, dtype=float)
        log_density = np.asarray(log_density, dtype=float)
        peak = np.max(log_density)
        z = simpson(np.exp(log_density - peak), x=grid)
        return cls(grid, log_density, float(peak + np.log(z)), (float(grid[0]), float(grid[-1])),
                   float(quad_error), dict(meta))

    @property
    def density(self) -> np.ndarray:
        return np.exp(self.log_density - self.log_normalizer)

    def integrate(self, values) -> float:
        """Simpson integral of ``values`` (sampled on the grid) over the window."""
        return float(simpson(np.asarray(values, dtype=float), x=self.grid))

    def expect(self, fn) -> float:
        """Mean of ``fn(x)`` under the density; ``fn`` must be vectorized."""
        return self.integrate(np.asarray(fn(self.grid), dtype=float) * self.density)

    def mean(self) -> float:
        return self.expect(lambda x: x)

    def variance(self) -> float:
        mu = self.mean()
        return self.expect(lambda x: (x - mu) ** 2)

    def cdf(self, x):
        """Distribution function by cumulative Simpson and linear interpolation."""
        c = cumulative_simpson(self.density, x=self.grid, initial=0.0)
        c = np.maximum.accumulate(np.clip(c / c[-1], 0.0, 1.0))
        return np.interp(x, self.grid, c, left=0.0, right=1.0)

    def tails_ok(self, drop: float = TAIL_DROP) -> bool:
        peak = np.max(self.log_density)
        return bool(self.log_density[0] <= peak - drop and self.log_density[-1] <= peak - drop)

    def to_csv(self, path, header_comment: str | None = None):
        """Write ``grid, density`` columns."""
        path = Path(path)
        with path.open("w", newline="") as fh:
            if header_comment:
                for line in header_comment.splitlines():
                    fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(["grid", "density"])
            for x, p in zip(self.grid, self.density):
                w.writerow([repr(float(x)), repr(float(p))])
        return path


def _odd(n):
    return n if n % 2 else n + 1


def localize_density(log_fn, center: float, half_width: float, *, n: int = 4001,
                     drop: float = TAIL_DROP, domain=(-np.inf, np.inf), max_expand: int = 12,
                     coarse: int = 801, symmetric: bool = False, **meta) -> StationaryDensity1D:
    """Find a window where ``log_fn`` falls ``drop`` below its peak, then resample.

    ``log_fn(grid)`` returns unnormalized log-density values (or a pair
    ``(values, quad_error)``) on a sorted grid.  The window grows on any side
    whose end is not yet ``drop`` below the peak; failure after
    ``max_expand`` doublings raises :class:`NonConfinementError`.  The final
    window is trimmed to the region above ``peak - drop - 5`` and resampled on
    ``n`` uniform points.  With ``symmetric=True`` the final grid is an exact
    mirror image about ``center``, so evenness can be checked pointwise.
    """
    dom_lo, dom_hi = domain

    def call(grid):
        out = log_fn(grid)
        if isinstance(out, tuple):
            return np.asarray(out[0], dtype=float), float(out[1])
        return np.asarray(out, dtype=float), 0.0

    left = right = float(half_width)
    for _ in range(max_expand + 1):
        lo, hi = max(center - left, dom_lo), min(center + right, dom_hi)
        grid = _interior_grid(lo, hi, _odd(coarse), dom_lo, dom_hi)
        lp, _ = call(grid)
        finite = np.isfinite(lp)
        if not np.any(finite):
            raise NonConfinementError("log-density is not finite anywhere on the window")
        peak = np.max(lp[finite])
        low_ok = lp[0] <= peak - drop or lo <= dom_lo
        high_ok = lp[-1] <= peak - drop or hi >= dom_hi
        if low_ok and high_ok:
            break
        if not low_ok:
            left *= 2
        if not high_ok:
            right *= 2
    else:
        raise NonConfinementError(
            f"density not localized after {max_expand} window doublings around {center}"
        )

    keep = np.nonzero(lp > peak - drop - 5.0)[0]
    i0, i1 = max(keep[0] - 1, 0), min(keep[-1] + 1, grid.size - 1)
    at_lo = i0 == 0 and center - left <= dom_lo
    at_hi = i1 == grid.size - 1 and center + right >= dom_hi
    lo = dom_lo if at_lo else grid[i0]
    hi = dom_hi if at_hi else grid[i1]
    if symmetric:
        half = np.linspace(0.0, max(center - lo, hi - center), _odd(n) // 2 + 1)
        fine = np.concatenate([center - half[::-1], center + half[1:]])
    else:
        fine = _interior_grid(lo, hi, _odd(n), dom_lo, dom_hi)
    lp, err = call(fine)
    dens = StationaryDensity1D.from_log_values(fine, lp, quad_error=err, **meta)
    if not dens.tails_ok(drop - 1e-6) and not (at_lo or at_hi):
        raise NonConfinementError("resampled density does not decay at the window ends")
    return dens


def _interior_grid(lo, hi, n, dom_lo, dom_hi):
    # nudge off an open domain boundary where the log-density is -inf
    grid = np.linspace(lo, hi, n)
    if np.isfinite(dom_lo) and grid[0] <= dom_lo:
        grid[0] = np.nextafter(dom_lo, np.inf)
    if np.isfinite(dom_hi) and grid[-1] >= dom_hi:
        grid[-1] = np.nextafter(dom_hi, -np.inf)
    return grid
