"""Small-scale diagnostics: structure functions, spectra, slope statistics.

Everything here is a pure function of fields or of the per-time records the
solver emits. The scale axis is split into three dyadic ranges:

* dissipation range J1 = (0, c1 nu]: increments are Taylor-like,
  S_p ~ l^p with a nu^-(p-1) prefactor;
* inertial range J2 = (c1 nu, c2]: cliffs dominate, S_p ~ l^min(p,1),
  flatness ~ 1/l, layer-averaged spectrum ~ k^-2;
* energy range J3 = (c2, 1]: everything saturates.

Two parametrizations of the split are provided. `from_envelope_constant`
implements the bookkeeping constants tied to the envelope constant K
(c1 = K^-2/4, c2 = K^-4/20, nu0 = K^-2/6), which are meaningful in the
asymptotic regime nu -> 0. `calibrated` places the boundaries at the
physical cliff width and cliff spacing, which is what power-law fits need at
the viscosities a workstation can actually reach; the fit pipeline uses it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .field import Field, Grid

__all__ = [
    "DegenerateField",
    "ZeroField",
    "RangePartition",
    "DiagnosticsRecord",
    "BracketAverage",
    "RECORD_NORM_KEYS",
    "make_record",
    "structure_function",
    "structure_function_alpha",
    "flatness",
    "energy_spectrum",
    "max_slope",
    "min_slope",
    "slope_bound",
    "genericity",
    "in_cliff_envelope",
    "occupation_fraction",
    "scan_envelope_constant",
    "bracket_average",
    "settling_window",
]


class DegenerateField(ValueError):
    """Second differences too small to normalize by."""


class ZeroField(ValueError):
    """The zero field has no genericity scale."""


# ------------------------------------------------------------------ ranges


@dataclass(frozen=True)
class RangePartition:
    """Dyadic split of shift scales (0, 1] at viscosity nu.

    J1 = (0, c1 nu], J2 = (c1 nu, c2], J3 = (c2, 1]. Instances must satisfy
    c1 * nu0 < c2 < 1 so the ranges are nonempty and ordered for nu <= nu0.
    """

    nu: float
    c1: float
    c2: float
    nu0: float
    envelope_k: int | None = None

    def __post_init__(self) -> None:
        if self.nu <= 0:
            raise ValueError("nu must be positive")
        if not self.c1 * self.nu0 < self.c2 < 1.0:
            raise ValueError(
                f"ranges collapse: need c1*nu0 < c2 < 1, got "
                f"c1={self.c1:.3g} c2={self.c2:.3g} nu0={self.nu0:.3g}")
        if self.nu > self.nu0:
            raise ValueError(f"nu={self.nu:.3g} above the validity bound {self.nu0:.3g}")

    @classmethod
    def from_envelope_constant(cls, nu: float, k: int) -> "RangePartition":
        """Bookkeeping constants c1 = K^-2/4, c2 = K^-4/20, nu0 = K^-2/6."""
        if k <= 1:
            raise ValueError("envelope constant must exceed 1")
        return cls(nu=nu, c1=0.25 / k**2, c2=0.05 / k**4, nu0=k**-2 / 6.0,
                   envelope_k=k)

    @classmethod
    def calibrated(cls, nu: float, dissipation_scale: float = 1.0,
                   inertial_top: float = 0.1) -> "RangePartition":
        """Desk-scale boundaries: cliff width below, cliff spacing above.

        J1 tops out at dissipation_scale * nu (inside the Taylor regime of a
        width ~4 nu cliff) and J2 at inertial_top (below the ~unit cliff
        spacing). Checked against pilot runs of the white-forced classical
        equation before the defaults were frozen.
        """
        return cls(nu=nu, c1=dissipation_scale, c2=inertial_top,
                   nu0=0.5 * inertial_top / dissipation_scale)

    @property
    def j1(self) -> tuple[float, float]:
        return (0.0, self.c1 * self.nu)

    @property
    def j2(self) -> tuple[float, float]:
        return (self.c1 * self.nu, self.c2)

    @property
    def j3(self) -> tuple[float, float]:
        return (self.c2, 1.0)

    def range(self, name: str) -> tuple[float, float]:
        try:
            return {"J1": self.j1, "J2": self.j2, "J3": self.j3}[name]
        except KeyError:
            raise ValueError(f"unknown range {name!r}") from None

    def classify(self, ell: float) -> str:
        if not 0.0 < ell <= 1.0:
            raise ValueError("scales live in (0, 1]")
        if ell <= self.c1 * self.nu:
            return "J1"
        return "J2" if ell <= self.c2 else "J3"


def grid_shifts_in(grid: Grid, interval: tuple[float, float],
                   trim: float = 0.0) -> np.ndarray:
    """Grid-multiple shifts l = j/N inside (lo, hi], optionally log-trimmed.

    trim removes that fraction of the log-width at each end, dodging the
    boundary contamination between adjacent scaling ranges.
    """
    lo, hi = interval
    if not 0.0 <= lo < hi:
        raise ValueError(f"bad interval {interval}")
    if trim:
        lo_eff = max(lo, grid.spacing / 2.0)
        width = math.log(hi / lo_eff)
        lo, hi = lo_eff * math.exp(trim * width), hi * math.exp(-trim * width)
    j_lo = max(1, int(math.floor(lo * grid.n)) + 1)
    j_hi = int(math.floor(hi * grid.n + 1e-9))
    if j_hi < j_lo:
        return np.empty(0)
    return np.arange(j_lo, j_hi + 1) / grid.n


# ----------------------------------------------------------------- records


@dataclass(frozen=True)
class BracketAverage:
    """Time average per trajectory, then ensemble mean with a spread."""

    value: float
    stderr: float
    window: tuple[float, float]
    ensemble_size: int
    per_trajectory: tuple[float, ...]


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-time scalar diagnostics of one trajectory.

    norms maps (m, p) tuples to |u|_{m,p} values and ("hs", s) to ||u||_s;
    spectrum, when kept, is the half-spectrum power |uhat(k)|^2.
    """

    trajectory: int
    t: float
    norms: Mapping[tuple, float]
    max_slope: float
    min_slope: float
    dissipated: float
    injected: float
    tail_fraction: float
    spectrum: np.ndarray | None = None

    def norm(self, m: float, p: float) -> float:
        return self.norms[(m, p)]

    def hs(self, s: float) -> float:
        return self.norms[("hs", s)]

    @property
    def sup(self) -> float:
        return self.norms[(0, math.inf)]


# the fixed norm table every record carries, in column order
RECORD_NORM_KEYS = (
    (0, 1), (0, 2), (0, math.inf),
    (1, 1), (1, 2), (1, math.inf),
    (2, 2), (2, math.inf),
    ("hs", 0.5),
)


def make_record(u: Field, t: float, *, trajectory: int = 0,
                dissipated: float = 0.0, injected: float = 0.0,
                include_spectrum: bool = True) -> DiagnosticsRecord:
    """Standard record: the norm table above plus slope extremes and tail.

    The p = 2 entries come from the spectral side (exact Parseval), the
    p = 1, inf entries from the sampled derivative fields.
    """
    du = u.derivative(1).values
    d2u = u.derivative(2).values
    v = u.values
    norms = {
        (0, 1): float(np.mean(np.abs(v))),
        (0, 2): u.hs_norm(0.0),
        (0, math.inf): float(np.max(np.abs(v))),
        (1, 1): float(np.mean(np.abs(du))),
        (1, 2): u.hs_norm(1.0),
        (1, math.inf): float(np.max(np.abs(du))),
        (2, 2): u.hs_norm(2.0),
        (2, math.inf): float(np.max(np.abs(d2u))),
        ("hs", 0.5): u.hs_norm(0.5),
    }
    power = u.grid.mode_weights * np.abs(u.coeffs) ** 2
    total = float(power.sum())
    tail = 0.0
    if total > 0.0:
        tail = float(power[u.grid.dealias_cutoff + 1:].sum() / total)
    return DiagnosticsRecord(
        trajectory=trajectory,
        t=t,
        norms=norms,
        max_slope=float(du.max()),
        min_slope=float(du.min()),
        dissipated=dissipated,
        injected=injected,
        tail_fraction=tail,
        spectrum=np.abs(u.coeffs) ** 2 if include_spectrum else None,
    )


# ------------------------------------------------- increments and spectra


def structure_function(u: Field, p: float, ell: float) -> float:
    """S_p(l) = int |u(x + l) - u(x)|^p dx for a grid-multiple shift."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    d = u.shift(ell).values - u.values
    if p == 2.0:
        return float(np.mean(d * d))
    return float(np.mean(np.abs(d) ** p))  # p = 0 gives 1 (0**0 == 1 here)


def structure_function_alpha(samples: Sequence[Field], p: float, alpha: float,
                             ell: float) -> float:
    """Ensemble alpha-moment of S_p: mean over samples of S_p(l)^alpha."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if not samples:
        raise ValueError("no samples")
    vals = [structure_function(u, p, ell) ** alpha for u in samples]
    return float(np.mean(vals))


def flatness(samples: Sequence[Field], ell: float) -> float:
    """F(l) = {S_4(l)} / {S_2(l)}^2 over the sample ensemble.

    3 for Gaussian increments; grows like 1/l through the inertial range as
    isolated cliffs dominate the fourth moment.
    """
    if not samples:
        raise ValueError("no samples")
    s2 = np.mean([structure_function(u, 2.0, ell) for u in samples])
    if s2 < 1e-14:
        raise DegenerateField(f"S_2({ell}) = {s2:.3g} below normalization floor")
    s4 = np.mean([structure_function(u, 4.0, ell) for u in samples])
    return float(s4 / s2**2)


def _layer_bounds(k: int, layer_ratio: float) -> tuple[int, int]:
    lo = int(math.ceil(k / layer_ratio - 1e-9))
    hi = int(math.floor(k * layer_ratio + 1e-9))
    return max(lo, 1), hi


def energy_spectrum(samples: Sequence[Field] | Sequence[np.ndarray], k: int,
                    layer_ratio: float = 2.0, *,
                    grid: Grid | None = None) -> float:
    """Layer-averaged spectrum: mean of |uhat(n)|^2 over |n| in [k/M, M k].

    Accepts fields or precomputed half-spectrum power arrays (then pass the
    grid). Averages over the sample ensemble as well as the layer.
    """
    if layer_ratio < 1.0:
        raise ValueError("layer ratio must be >= 1")
    if not len(samples):
        raise ValueError("no samples")
    first = samples[0]
    if isinstance(first, Field):
        grid = first.grid
        powers = (np.abs(u.coeffs) ** 2 for u in samples)
    elif grid is None:
        raise ValueError("grid required with raw power arrays")
    else:
        powers = iter(samples)
    lo, hi = _layer_bounds(k, layer_ratio)
    if not 1 <= lo <= hi or hi >= grid.n // 2:
        raise ValueError(
            f"layer [{lo}, {hi}] for k={k} leaves the resolved band of n={grid.n}")
    weights = grid.mode_weights[lo:hi + 1]
    count = float(weights.sum())
    acc = 0.0
    m = 0
    for pw in powers:
        acc += float((weights * pw[lo:hi + 1]).sum()) / count
        m += 1
    return acc / m


# ------------------------------------------------------- slope statistics


def max_slope(u: Field) -> float:
    return float(u.derivative(1).values.max())


def min_slope(u: Field) -> float:
    return float(u.derivative(1).values.min())


def slope_bound(d: float, sigma: float, t: float) -> float:
    """One-sided slope ceiling min(D, 1/(sigma t)) from the maximum principle.

    D encodes the initial data, and 1/(sigma t) is the universal decay that
    forgets it; at t = 0 only the data bound applies.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0.0:
        return d
    return min(d, 1.0 / (sigma * t))


def genericity(u0: Field) -> float:
    """D(u0) = max(|u0|_1^-1, |u0|_{1,inf}), the settling-window scale."""
    l1 = u0.lp_norm(1)
    if l1 < 1e-14:
        raise ZeroField("genericity scale undefined for the zero field")
    return max(1.0 / l1, u0.wmp_norm(1, math.inf))


# --------------------------------------------------- envelope occupation


def in_cliff_envelope(record: DiagnosticsRecord, k: int, nu: float,
                      variant: str = "O") -> bool:
    """Does the state look like a developed cliff profile at constant K?

    Checks 1/K <= |u|_inf <= max u_x <= K, the slope window
    1/(K nu) <= slope <= K/nu, and the curvature cap |u|_{2,inf} <= K/nu^2.
    Variant "L" windows the positive slope max u_x; variant "O" windows the
    cliff-side slope -min u_x instead.
    """
    if k <= 1:
        raise ValueError("envelope constant must exceed 1")
    if variant not in ("L", "O"):
        raise ValueError(f"unknown variant {variant!r}")
    sup = record.sup
    mx = record.max_slope
    if not (1.0 / k <= sup and sup <= mx and mx <= k):
        return False
    slope = record.norm(1, math.inf) if variant == "L" else -record.min_slope
    if not (1.0 / (k * nu) <= slope <= k / nu):
        return False
    return record.norm(2, math.inf) <= k / nu**2


def occupation_fraction(records: Sequence[DiagnosticsRecord], k: int,
                        nu: float, variant: str = "O") -> float:
    if not records:
        raise ValueError("no records")
    hits = sum(in_cliff_envelope(r, k, nu, variant) for r in records)
    return hits / len(records)


def scan_envelope_constant(records: Sequence[DiagnosticsRecord], nu: float,
                           *, threshold: float = 0.05, variant: str = "O",
                           candidates: Iterable[int] = range(2, 65)) -> int | None:
    """Smallest K whose envelope holds at least `threshold` of the time."""
    for k in candidates:
        if occupation_fraction(records, k, nu, variant) >= threshold:
            return k
    return None


# -------------------------------------------------------------- averaging


def bracket_average(records: Sequence[DiagnosticsRecord],
                    extractor: Callable[[DiagnosticsRecord], float],
                    window: tuple[float, float]) -> BracketAverage:
    """Trapezoid time average over the window, then ensemble statistics.

    Records are grouped by trajectory; each group needs at least one record
    inside [t0, t1]. The stderr is the ensemble standard error (0 for a
    single trajectory).
    """
    t0, t1 = window
    if not t0 < t1:
        raise ValueError("empty averaging window")
    groups: dict[int, list[DiagnosticsRecord]] = {}
    for r in records:
        if t0 - 1e-9 <= r.t <= t1 + 1e-9:
            groups.setdefault(r.trajectory, []).append(r)
    if not groups:
        raise ValueError(f"no records inside window [{t0}, {t1}]")
    means = []
    for traj in sorted(groups):
        rs = sorted(groups[traj], key=lambda r: r.t)
        ts = np.array([r.t for r in rs])
        ys = np.array([extractor(r) for r in rs])
        if len(rs) == 1:
            means.append(float(ys[0]))
        else:
            means.append(float(np.trapezoid(ys, ts) / (ts[-1] - ts[0])))
    vals = np.array(means)
    stderr = 0.0
    if len(vals) > 1:
        stderr = float(vals.std(ddof=1) / math.sqrt(len(vals)))
    return BracketAverage(value=float(vals.mean()), stderr=stderr,
                          window=(t0, t1), ensemble_size=len(vals),
                          per_trajectory=tuple(means))


def settling_window(pilot_records: Sequence[DiagnosticsRecord], u0: Field,
                    sigma: float, nu: float) -> tuple[float, float]:
    """Averaging window [T1, T2] for unforced decay from generic data.

    T1 = 1/(4 D^2 C) with C = sup_t nu ||u||_1^2 read off the pilot records,
    T2 = max(1.5 T1, 2 D / sigma). Past T1 the dissipation has saturated;
    past T2 the universal 1/(sigma t) slope decay has taken over.
    """
    if not pilot_records:
        raise ValueError("no pilot records")
    d = genericity(u0)
    c_tilde = max(nu * r.norm(1, 2) ** 2 for r in pilot_records)
    if c_tilde <= 0:
        raise ValueError("pilot run never dissipated; cannot place the window")
    t1 = 0.25 / (d * d * c_tilde)
    t2 = max(1.5 * t1, 2.0 * d / sigma)
    return t1, t2
