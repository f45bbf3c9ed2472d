"""Power-law and log-linear fits that turn "~" asymptotics into numbers.

The fits are ordinary least squares in transformed coordinates, with sums
accumulated by math.fsum so the results are independent of point order.
Range-restricted scans (structure functions over a scale range, spectrum
over the matching wavenumber window) trim a fraction of each range's
log-width at both ends before fitting: the scaling constants degrade near
the range boundaries, and a fixed trim keeps the fits honest rather than
tuned per run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .diagnostics import (energy_spectrum, flatness, grid_shifts_in,
                          structure_function)
from .field import Field
from .solver import StabilityFailure

__all__ = [
    "PowerLawFit",
    "LogLinearFit",
    "fit_power_law",
    "fit_log_linear",
    "log_correction_check",
    "structure_exponent_scan",
    "spectrum_scan",
    "flatness_scan",
    "sobolev_exponent_sweep",
    "trim_interval",
]


@dataclass(frozen=True)
class PowerLawFit:
    """y ~ prefactor * x^exponent over the fitted points."""

    exponent: float
    prefactor: float
    r_squared: float
    points: tuple[tuple[float, float], ...]

    def __str__(self) -> str:
        return (f"x^{self.exponent:+.3f} (prefactor {self.prefactor:.3g}, "
                f"r2 {self.r_squared:.4f}, {len(self.points)} points)")


@dataclass(frozen=True)
class LogLinearFit:
    """y ~ slope * x + intercept (x already the transformed coordinate)."""

    slope: float
    intercept: float
    r_squared: float
    points: tuple[tuple[float, float], ...]


def _ols(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float]:
    n = len(xs)
    xm = math.fsum(xs) / n
    ym = math.fsum(ys) / n
    sxx = math.fsum((x - xm) ** 2 for x in xs)
    sxy = math.fsum((x - xm) * (y - ym) for x, y in zip(xs, ys))
    # identical x values leave only rounding residue in sxx, never exact 0
    if sxx <= n * (8e-16 * max(abs(xm), 1e-300)) ** 2:
        raise ValueError("fit needs at least two distinct x values")
    slope = sxy / sxx
    intercept = ym - slope * xm
    ss_res = math.fsum((y - (intercept + slope * x)) ** 2
                       for x, y in zip(xs, ys))
    ss_tot = math.fsum((y - ym) ** 2 for y in ys)
    # data constant to roundoff is a perfect zero-slope fit, not an
    # undefined one; below this floor ss_res/ss_tot is 0/0 noise
    if ss_tot <= n * (1e-13 * max(abs(ym), 1e-300)) ** 2:
        return slope, intercept, 1.0
    return slope, intercept, 1.0 - ss_res / ss_tot


def fit_power_law(points: Iterable[tuple[float, float]]) -> PowerLawFit:
    """OLS in log-log coordinates; needs >= 3 strictly positive points."""
    pts = tuple((float(x), float(y)) for x, y in points)
    if len(pts) < 3:
        raise ValueError(f"power-law fit needs >= 3 points, got {len(pts)}")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ValueError("power-law fit needs strictly positive coordinates")
    slope, intercept, r2 = _ols([math.log(x) for x, _ in pts],
                                [math.log(y) for _, y in pts])
    return PowerLawFit(exponent=slope, prefactor=math.exp(intercept),
                       r_squared=r2, points=pts)


def fit_log_linear(points: Iterable[tuple[float, float]]) -> LogLinearFit:
    """Plain linear OLS; x is whatever transformed coordinate you pass."""
    pts = tuple((float(x), float(y)) for x, y in points)
    if len(pts) < 3:
        raise ValueError(f"linear fit needs >= 3 points, got {len(pts)}")
    slope, intercept, r2 = _ols([x for x, _ in pts], [y for _, y in pts])
    return LogLinearFit(slope=slope, intercept=intercept, r_squared=r2,
                        points=pts)


def log_correction_check(pairs: Iterable[tuple[float, float]]) -> LogLinearFit:
    """Fit value vs |log nu| from (nu, value) pairs.

    A genuinely logarithmic quantity gives positive slope with r^2 near 1;
    power-law contamination shows up as curvature (materially lower r^2).
    """
    return fit_log_linear((abs(math.log(nu)), v) for nu, v in pairs)


def trim_interval(interval: tuple[float, float],
                  trim: float) -> tuple[float, float]:
    """Shrink (lo, hi) by `trim` of its log-width at each end."""
    lo, hi = interval
    if not 0.0 < lo < hi:
        raise ValueError(f"bad interval {interval}")
    width = math.log(hi / lo)
    return lo * math.exp(trim * width), hi * math.exp(-trim * width)


def _thin_log(values: np.ndarray, max_points: int) -> np.ndarray:
    if len(values) <= max_points:
        return values
    idx = np.unique(np.round(
        np.geomspace(1, len(values), max_points)).astype(int) - 1)
    return values[idx]


def structure_exponent_scan(samples: Sequence[Field], p_values: Sequence[float],
                            interval: tuple[float, float], *, trim: float = 0.2,
                            max_points: int = 24,
                            ) -> Mapping[float, PowerLawFit]:
    """Fit S_p(l) ~ l^xi over grid shifts inside the trimmed range.

    S_p at each scale is the ensemble mean over the samples. Cliff scaling
    predicts xi = min(p, 1) in the inertial range and xi = p (with a
    nu^-(p-1) prefactor for p >= 1) in the dissipation range.
    """
    if not samples:
        raise ValueError("no samples")
    grid = samples[0].grid
    ells = _thin_log(grid_shifts_in(grid, interval, trim=trim), max_points)
    if len(ells) < 3:
        raise ValueError(
            f"only {len(ells)} grid scales inside {interval} after trimming; "
            "range too narrow at this resolution")
    fits = {}
    for p in p_values:
        pts = [(float(ell),
                float(np.mean([structure_function(u, p, ell) for u in samples])))
               for ell in ells]
        fits[p] = fit_power_law(pts)
    return fits


def flatness_scan(samples: Sequence[Field], interval: tuple[float, float], *,
                  trim: float = 0.2, max_points: int = 24) -> PowerLawFit:
    """Fit F(l) ~ l^xi on the trimmed range; cliffs give xi near -1."""
    if not samples:
        raise ValueError("no samples")
    grid = samples[0].grid
    ells = _thin_log(grid_shifts_in(grid, interval, trim=trim), max_points)
    if len(ells) < 3:
        raise ValueError(f"only {len(ells)} grid scales inside {interval}")
    return fit_power_law([(float(ell), flatness(samples, float(ell)))
                          for ell in ells])


def spectrum_scan(samples: Sequence[Field], interval: tuple[float, float], *,
                  layer_ratio: float = 2.0, trim: float = 0.2,
                  max_points: int = 12) -> PowerLawFit:
    """Fit E(k) ~ k^xi for wavenumbers whose inverse falls in the range.

    The scale interval (lo, hi) is trimmed in log space and inverted to the
    window [1/hi', 1/lo']; layers must stay inside the resolved band.
    """
    if not samples:
        raise ValueError("no samples")
    grid = samples[0].grid
    lo, hi = trim_interval(interval, trim)
    k_lo = max(1, math.ceil(1.0 / hi))
    k_hi = math.floor(1.0 / lo)
    k_hi = min(k_hi, int((grid.n // 2 - 1) / layer_ratio))
    if k_hi < k_lo + 2:
        raise ValueError(
            f"wavenumber window [{k_lo}, {k_hi}] too narrow for a fit")
    ks = _thin_log(np.arange(k_lo, k_hi + 1), max_points)
    pts = [(float(k), energy_spectrum(samples, int(k), layer_ratio))
           for k in ks]
    return fit_power_law(pts)


def sobolev_exponent_sweep(nus: Sequence[float],
                           bracket: Callable[[float], float]) -> PowerLawFit:
    """Fit bracket(nu) ~ nu^xi across a viscosity sweep.

    `bracket` runs (or looks up) the experiment at one viscosity and returns
    the time-and-ensemble average of the norm in question. Blow-ups at
    single sweep points are tolerated as long as three points survive.
    """
    pts = []
    failed = []
    for nu in nus:
        try:
            pts.append((nu, bracket(nu)))
        except StabilityFailure as exc:
            failed.append((nu, str(exc)))
    if len(pts) < 3:
        detail = "; ".join(f"nu={nu:g}: {msg}" for nu, msg in failed)
        raise ValueError(f"only {len(pts)} sweep points survived ({detail})")
    return fit_power_law(pts)
