"""Strongly convex flux functions for u_t + (f(u))_x = nu u_xx + force.

A flux bundle carries f, f', f'' as vectorized callables plus the certified
convexity floor sigma = min f'' over the working range. The classical choice
f(u) = u^2/2 has sigma = 1; generalized fluxes must keep f'' bounded away
from zero, since every slope bound and scaling window in the diagnostics is
phrased in units of 1/sigma.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

__all__ = [
    "FluxFunction",
    "ConvexityViolation",
    "classical_flux",
    "cosine_flux",
    "shifted_flux",
    "check_convexity",
    "flux_from_name",
]

ArrayFn = Callable[[np.ndarray], np.ndarray]


class ConvexityViolation(ValueError):
    """f'' dipped to or below zero; carries a witness point."""

    def __init__(self, message: str, witness: float):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class FluxFunction:
    """f with derivatives and convexity metadata.

    growth_exponents maps derivative order m to the exponent h(m) in
    |f^(m)(x)| <= C (1 + |x|)^h(m); recorded for documentation, enforced
    nowhere at runtime. Sanity: h(1) must sit in [1, 2) or the sup-norm
    machinery loses its bite.
    """

    name: str
    eval: ArrayFn
    d1: ArrayFn
    d2: ArrayFn
    sigma: float
    working_range: tuple[float, float] = (-10.0, 10.0)
    growth_exponents: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError(f"flux {self.name!r}: sigma must be positive")
        lo, hi = self.working_range
        if not lo < hi:
            raise ValueError("working range is empty")
        h1 = self.growth_exponents.get(1)
        if h1 is not None and not 1.0 <= h1 < 2.0:
            raise ValueError(f"flux {self.name!r}: h(1)={h1} outside [1, 2)")

    def __call__(self, u: np.ndarray) -> np.ndarray:
        return self.eval(u)


def classical_flux() -> FluxFunction:
    """f(u) = u^2/2, the quadratic flux with sigma = 1."""
    return FluxFunction(
        name="classical",
        eval=lambda u: 0.5 * u * u,
        d1=lambda u: u,
        d2=lambda u: np.ones_like(u),
        sigma=1.0,
        growth_exponents={0: 2.0, 1: 1.0, 2: 0.0},
    )


def cosine_flux(eps: float) -> FluxFunction:
    """f(u) = u^2/2 + eps cos(u); strongly convex for eps < 1.

    f'' = 1 - eps cos(u) attains its minimum 1 - eps at u = 0, which lies in
    every working range of interest, so sigma = 1 - eps exactly.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("cosine perturbation needs 0 <= eps < 1")
    return FluxFunction(
        name=f"classical+cos:{eps:g}",
        eval=lambda u: 0.5 * u * u + eps * np.cos(u),
        d1=lambda u: u - eps * np.sin(u),
        d2=lambda u: 1.0 - eps * np.cos(u),
        sigma=1.0 - eps,
        growth_exponents={0: 2.0, 1: 1.0, 2: 0.0},
    )


def shifted_flux(inner: FluxFunction, b: float) -> FluxFunction:
    """g(y) = f(y + b) - b y, the flux seen from a mean-b moving frame.

    g'' = f''(. + b), so convexity and sigma survive; the working range
    shifts accordingly.
    """
    lo, hi = inner.working_range
    return FluxFunction(
        name=f"shifted:{b:g}:{inner.name}",
        eval=lambda y, _f=inner.eval: _f(y + b) - b * y,
        d1=lambda y, _d=inner.d1: _d(y + b) - b,
        d2=lambda y, _d=inner.d2: _d(y + b),
        sigma=inner.sigma,
        working_range=(lo - b, hi - b),
        growth_exponents=dict(inner.growth_exponents),
    )


def check_convexity(flux: FluxFunction, samples: int = 100_000) -> float:
    """Sampled min of f'' over the working range.

    Raises ConvexityViolation (with the offending u) if the minimum is not
    strictly positive. Sampling, not proof: a certificate for the fluxes
    built here, a smoke test for user-supplied ones.
    """
    lo, hi = flux.working_range
    u = np.linspace(lo, hi, samples)
    vals = np.asarray(flux.d2(u), dtype=np.float64)
    idx = int(np.argmin(vals))
    floor = float(vals[idx])
    if floor <= 0.0:
        raise ConvexityViolation(
            f"flux {flux.name!r}: f''({u[idx]:.6g}) = {floor:.3g} <= 0",
            witness=float(u[idx]),
        )
    return floor


def flux_from_name(spec: str) -> FluxFunction:
    """Parse "classical", "classical+cos:<eps>", "shifted:<b>:<inner>"."""
    if spec == "classical":
        return classical_flux()
    if spec.startswith("classical+cos:"):
        return cosine_flux(float(spec.split(":", 1)[1]))
    if spec.startswith("shifted:"):
        parts = spec.split(":", 2)
        if len(parts) != 3:
            raise ValueError(f"bad shifted flux spec {spec!r}")
        return shifted_flux(flux_from_name(parts[2]), float(parts[1]))
    raise ValueError(f"unknown flux {spec!r}")
