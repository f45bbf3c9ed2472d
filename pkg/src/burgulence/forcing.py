"""Random forcing: kicks at integer times or white-in-time noise.

Both act through the same diagonal spectral parametrization. With
e_k = sqrt(2) cos(2 pi k x) and e_{-k} = sqrt(2) sin(2 pi k x) an orthonormal
family, a kick is

    zeta = sum_k a_k A_k e_k + b_k B_k e_{-k},

with A_k, B_k independent, zero-mean, unit-variance scalars, and the white
force accumulates increments whose coefficients are Brownian:
Delta w has the same shape with A_k, B_k ~ N(0, dt). The order-m injection
rate is the trace constant

    I_m = sum_k (a_k^2 + b_k^2) (2 pi k)^{2m},

so E |zeta|_2^2 = I_0 per kick and E ||Delta w||_m^2 = I_m dt.

Streams are counter-based: (seed, domain, trajectory) keys a Philox
generator and the step index selects a disjoint counter window, so any
variate is addressable without replaying history and identical indices give
identical draws regardless of execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .field import Field, Grid

__all__ = [
    "SpectralAmplitudes",
    "ForcingSpec",
    "NoiseStream",
    "DOMAIN_FORCING",
    "DOMAIN_INITIAL",
    "sample_kick",
    "white_increment",
    "kick_coefficients",
    "random_smooth_field",
]

# Stream domains keep independent uses of one master seed from colliding.
DOMAIN_FORCING = 0
DOMAIN_INITIAL = 1

# Counter blocks reserved per step index: 64 blocks = 256 uint64 draws,
# comfortably above the ~2 k_max normals a step consumes.
_BLOCKS_PER_STEP = 64

_KICK_LAWS = ("gaussian", "two_point")


@dataclass(frozen=True)
class SpectralAmplitudes:
    """Diagonal covariance amplitudes a_k, b_k for modes k = 1..k_max."""

    a: tuple[float, ...]
    b: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.a) != len(self.b) or not self.a:
            raise ValueError("cos and sin amplitude lists must match and be nonempty")
        if any(x < 0 for x in self.a + self.b):
            raise ValueError("amplitudes must be nonnegative")
        if not any(x > 0 for x in self.a + self.b):
            raise ValueError("at least one amplitude must be positive")

    @classmethod
    def exponential(cls, k_max: int = 16, rate: float = 0.7,
                    scale: float = 1.0) -> "SpectralAmplitudes":
        """Default profile a_k = b_k = scale * exp(-rate k)."""
        amps = tuple(scale * math.exp(-rate * k) for k in range(1, k_max + 1))
        return cls(a=amps, b=amps)

    @property
    def k_max(self) -> int:
        return len(self.a)

    def trace_constant(self, m: int) -> float:
        """I_m = sum (a_k^2 + b_k^2) (2 pi k)^{2m}; finite for every m."""
        if m < 0:
            raise ValueError("m must be >= 0")
        return math.fsum(
            (a * a + b * b) * (2.0 * math.pi * k) ** (2 * m)
            for k, (a, b) in enumerate(zip(self.a, self.b), start=1))


@dataclass(frozen=True)
class ForcingSpec:
    """What drives the equation: nothing, integer-time kicks, or white noise."""

    kind: str
    amplitudes: SpectralAmplitudes | None = None
    kick_law: str = "gaussian"

    def __post_init__(self) -> None:
        if self.kind not in ("none", "kick", "white"):
            raise ValueError(f"unknown forcing kind {self.kind!r}")
        if self.kind != "none" and self.amplitudes is None:
            raise ValueError(f"{self.kind} forcing needs amplitudes")
        if self.kind == "kick" and self.kick_law not in _KICK_LAWS:
            raise ValueError(f"unknown kick law {self.kick_law!r}")

    @classmethod
    def none(cls) -> "ForcingSpec":
        return cls(kind="none")

    @classmethod
    def kick(cls, amplitudes: SpectralAmplitudes,
             law: str = "gaussian") -> "ForcingSpec":
        return cls(kind="kick", amplitudes=amplitudes, kick_law=law)

    @classmethod
    def white(cls, amplitudes: SpectralAmplitudes) -> "ForcingSpec":
        return cls(kind="white", amplitudes=amplitudes)

    def trace_constant(self, m: int) -> float:
        if self.kind == "none":
            return 0.0
        return self.amplitudes.trace_constant(m)


@dataclass(frozen=True)
class NoiseStream:
    """Counter-addressable stream of variates for one trajectory."""

    seed: int
    trajectory: int = 0
    domain: int = DOMAIN_FORCING

    @cached_property
    def _key(self) -> np.ndarray:
        ss = np.random.SeedSequence([self.seed, self.domain, self.trajectory])
        return ss.generate_state(2, np.uint64)

    def generator(self, step: int) -> np.random.Generator:
        """Fresh generator positioned at this step's counter window."""
        if step < 0:
            raise ValueError("step index must be >= 0")
        bg = np.random.Philox(key=self._key, counter=step * _BLOCKS_PER_STEP)
        return np.random.Generator(bg)

    def normals(self, step: int, count: int) -> np.ndarray:
        return self.generator(step).standard_normal(count)

    def signs(self, step: int, count: int) -> np.ndarray:
        """Symmetric two-point variates, +-1 with equal probability."""
        g = self.generator(step)
        return g.integers(0, 2, size=count).astype(np.float64) * 2.0 - 1.0


def _mode_field(grid: Grid, cos_coeffs: np.ndarray,
                sin_coeffs: np.ndarray) -> Field:
    """Field sum_k c_k cos(2 pi k x) + s_k sin(2 pi k x), k = 1..len."""
    k_max = len(cos_coeffs)
    coeffs = np.zeros(grid.n // 2 + 1, dtype=np.complex128)
    coeffs[1:k_max + 1] = 0.5 * (cos_coeffs - 1j * sin_coeffs)
    return Field.from_spectral(grid, coeffs)


def _check_headroom(spec: ForcingSpec, grid: Grid) -> SpectralAmplitudes:
    amps = spec.amplitudes
    if amps.k_max > grid.dealias_cutoff:
        raise ValueError(
            f"forcing reaches mode {amps.k_max} but the 2/3 rule on n={grid.n} "
            f"keeps only |k| <= {grid.dealias_cutoff}")
    return amps


def sample_kick(spec: ForcingSpec, stream: NoiseStream, grid: Grid,
                kick_index: int) -> Field:
    """The kick applied at integer time kick_index + 1."""
    if spec.kind != "kick":
        raise ValueError("spec is not kick forcing")
    amps = _check_headroom(spec, grid)
    k_max = amps.k_max
    if spec.kick_law == "gaussian":
        draws = stream.normals(kick_index, 2 * k_max)
    else:
        draws = stream.signs(kick_index, 2 * k_max)
    root2 = math.sqrt(2.0)
    cos_c = root2 * np.asarray(amps.a) * draws[:k_max]
    sin_c = root2 * np.asarray(amps.b) * draws[k_max:]
    return _mode_field(grid, cos_c, sin_c)


def white_increment(spec: ForcingSpec, stream: NoiseStream, grid: Grid,
                    step: int, dt: float) -> Field:
    """Brownian increment over one step of size dt."""
    if spec.kind != "white":
        raise ValueError("spec is not white forcing")
    if dt <= 0:
        raise ValueError("dt must be positive")
    amps = _check_headroom(spec, grid)
    k_max = amps.k_max
    draws = stream.normals(step, 2 * k_max)
    root = math.sqrt(2.0 * dt)
    cos_c = root * np.asarray(amps.a) * draws[:k_max]
    sin_c = root * np.asarray(amps.b) * draws[k_max:]
    return _mode_field(grid, cos_c, sin_c)


def white_increment_coeffs(spec: ForcingSpec, stream: NoiseStream, step: int,
                           dt: float) -> np.ndarray:
    """Half-spectrum coefficients of the increment, modes 1..k_max.

    Same draws as white_increment; the solver adds these in place without
    building a Field per substep.
    """
    amps = spec.amplitudes
    k_max = amps.k_max
    draws = stream.normals(step, 2 * k_max)
    root = math.sqrt(2.0 * dt)
    return 0.5 * root * (np.asarray(amps.a) * draws[:k_max]
                         - 1j * np.asarray(amps.b) * draws[k_max:])


def kick_coefficients(zeta: Field, k_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Project a field on the forcing frame: a_k(zeta), b_k(zeta).

    a_k(zeta) = sqrt(2) int cos(2 pi k x) zeta dx = sqrt(2) Re zhat(k) and
    b_k(zeta) = -sqrt(2) Im zhat(k); inverts sample_kick's construction.
    """
    if k_max > zeta.grid.n // 2:
        raise ValueError("k_max outside resolved band")
    c = zeta.coeffs[1:k_max + 1]
    root2 = math.sqrt(2.0)
    return root2 * c.real.copy(), -root2 * c.imag.copy()


def random_smooth_field(grid: Grid, stream: NoiseStream, *, step: int = 0,
                        amplitude: float = 1.0, k_max: int = 8) -> Field:
    """Random band-limited field rescaled to the requested sup norm.

    Coefficients ~ N(0, e^{-k}) over modes 1..k_max; smooth by construction
    and safely inside the dealiased band for any production grid.
    """
    if k_max > grid.dealias_cutoff:
        raise ValueError("k_max outside the dealiased band")
    draws = stream.normals(step, 2 * k_max)
    decay = np.exp(-0.5 * np.arange(1, k_max + 1))
    raw = _mode_field(grid, decay * draws[:k_max], decay * draws[k_max:])
    sup = raw.lp_norm(math.inf)
    if sup == 0.0:
        raise ValueError("degenerate draw: all modes vanished")
    return raw * (amplitude / sup)
