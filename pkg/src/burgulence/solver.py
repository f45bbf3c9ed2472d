"""Time integration of u_t + (f(u))_x = nu u_xx + eta on the circle.

The state is evolved in the half-spectrum representation. Diffusion is exact
per mode through an integrating factor; the conservative flux -(f(u))_x is
evaluated pseudo-spectrally with 2/3-rule dealiasing of the flux transform
(the state itself is never masked, so the spectral tail stays an honest
resolution indicator) and advanced with the integrating-factor form of
Kutta's third-order rule:

    n(v) = -(2 pi i k) fft(f(ifft(v)))           masked
    n1 = n(uh)
    g2 = Eh (uh + dt/2 n1)                       E  = exp(-4 pi^2 nu k^2 dt)
    n2 = n(g2)                                   Eh = E^(1/2)
    g3 = E (uh - dt n1) + 2 dt Eh n2
    uh' = E uh + dt/6 (E n1 + 4 Eh n2 + n(g3))

Kutta's abscissae increase monotonically, so every exponential factor is
a decay: a mode the step cannot resolve underflows to its exact limit
instead of overflowing, and arbitrarily stiff diffusion is harmless.

Time is quantized per record interval: the interval is cut into the integer
number of equal substeps demanded by the CFL estimate at its start. At every
boundary the state is round-tripped through physical samples, which makes
the boundary state canonical: restarting from a checkpoint reproduces the
uninterrupted run bitwise (for binary-representable record intervals).

White noise is added after each deterministic substep; kicks land at integer
times, before the record taken there. Energy accounting runs alongside in
float64: dissipation by the trapezoid rule on 2 nu ||u||_1^2, injection as
I_0 dt for white forcing and as the realized 2<u, z> + |z|^2 per kick.

Ensembles integrate as one batched (rows, modes) array with a common CFL
step taken from the batch maximum speed, so a row's step sizes depend on its
batch companions; rerunning the same batch is exactly reproducible, but a
trajectory extracted from a batch differs from its solo run at the
truncation level.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import fft as sfft

from .diagnostics import DiagnosticsRecord, make_record
from .field import Field, Grid, load_snapshot
from .flux import FluxFunction, classical_flux
from .forcing import ForcingSpec, NoiseStream, sample_kick, white_increment_coeffs

__all__ = [
    "StabilityFailure",
    "TimeStepping",
    "TrajectoryConfig",
    "TrajectoryState",
    "TrajectoryFailure",
    "BatchResult",
    "resolution_rule",
    "integrate",
    "integrate_batch",
    "step_deterministic",
    "step_stochastic",
    "apply_kick",
    "config_summary",
    "save_checkpoint",
    "load_checkpoint",
]

# A boundary time within this of an integer counts as a kick moment.
_TIME_EPS = 1e-9


class StabilityFailure(RuntimeError):
    """The integration blew up; carries the last valid state when known."""

    def __init__(self, message: str, state: "TrajectoryState | None" = None):
        super().__init__(message)
        self.state = state


def resolution_rule(nu: float) -> int:
    """Default grid size: next power of two >= 16/nu (resolves ~nu cliffs)."""
    if nu <= 0:
        raise ValueError("nu must be positive")
    return max(16, 2 ** math.ceil(math.log2(16.0 / nu)))


@dataclass(frozen=True)
class TimeStepping:
    """Step-size policy: CFL-adaptive (default) or fixed dt.

    Either way the realized dt divides the record interval exactly; in fixed
    mode the given dt must already do so.
    """

    mode: str = "cfl"
    cfl_safety: float = 0.4
    dt: float | None = None
    dt_cap: float = 0.05
    dt_floor: float = 1e-9

    def __post_init__(self) -> None:
        if self.mode not in ("cfl", "fixed"):
            raise ValueError(f"unknown stepping mode {self.mode!r}")
        if self.mode == "fixed":
            if self.dt is None or self.dt <= 0:
                raise ValueError("fixed mode needs dt > 0")
        elif not 0.0 < self.cfl_safety <= 0.8:
            # the advective stability edge is ~0.83 grid crossings per step
            raise ValueError("cfl_safety must lie in (0, 0.8]")
        if self.dt_floor <= 0 or self.dt_cap <= self.dt_floor:
            raise ValueError("need dt_cap > dt_floor > 0")


@dataclass(frozen=True)
class TrajectoryConfig:
    """Everything that determines a trajectory besides its initial state."""

    nu: float
    flux: FluxFunction = dataclass_field(default_factory=classical_flux)
    forcing: ForcingSpec = dataclass_field(default_factory=ForcingSpec.none)
    n: int | None = None
    stepping: TimeStepping = dataclass_field(default_factory=TimeStepping)
    record_interval: float = 0.25
    record_spectrum: bool = True
    dtype: str = "float64"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.nu <= 0:
            raise ValueError("nu must be positive")
        if self.record_interval <= 0:
            raise ValueError("record interval must be positive")
        if self.dtype not in ("float64", "float32"):
            raise ValueError(f"unsupported dtype {self.dtype!r}")
        if self.forcing.kind == "kick":
            per_unit = 1.0 / self.record_interval
            if abs(per_unit - round(per_unit)) > _TIME_EPS:
                raise ValueError(
                    "kick forcing needs a record interval dividing 1, "
                    f"got {self.record_interval}")

    def make_grid(self) -> Grid:
        return Grid(self.n if self.n is not None else resolution_rule(self.nu))


@dataclass
class TrajectoryState:
    """Instantaneous state plus the cumulative energy ledgers."""

    t: float
    u: Field
    dissipated: float = 0.0
    injected: float = 0.0
    step_index: int = 0
    kick_index: int = 0


@dataclass(frozen=True)
class TrajectoryFailure:
    trajectory: int
    t: float
    message: str


@dataclass
class BatchResult:
    """Outcome of a batched integration.

    states holds the final state per row (for failed rows, the last valid
    boundary state); records is the flat stream of per-boundary diagnostics
    in time-major order.
    """

    states: list[TrajectoryState]
    records: list[DiagnosticsRecord]
    failures: list[TrajectoryFailure]

    @property
    def ok(self) -> bool:
        return not self.failures

    def records_for(self, trajectory: int) -> list[DiagnosticsRecord]:
        return [r for r in self.records if r.trajectory == trajectory]


class _Engine:
    """Batched spectral stepper; one instance per integrate call."""

    def __init__(self, cfg: TrajectoryConfig, grid: Grid,
                 trajectories: Sequence[int]):
        self.cfg = cfg
        self.grid = grid
        self.batch = len(trajectories)
        self.rdtype = np.float32 if cfg.dtype == "float32" else np.float64
        self.cdtype = np.complex64 if cfg.dtype == "float32" else np.complex128

        k = grid.wavenumbers.astype(np.float64)
        self.mask = (grid.wavenumbers <= grid.dealias_cutoff).astype(np.float64)
        self.neg_ik = (-2j * np.pi * k * self.mask).astype(self.cdtype)
        self.decay_rate = 4.0 * np.pi**2 * cfg.nu * k**2
        self.h1_weights = grid.mode_weights * (2.0 * np.pi * k) ** 2
        self._factors: dict[float, tuple[np.ndarray, np.ndarray]] = {}

        if cfg.forcing.kind != "none":
            k_max = cfg.forcing.amplitudes.k_max
            if k_max > grid.dealias_cutoff:
                raise ValueError(
                    f"forcing reaches mode {k_max} but the grid resolves "
                    f"{grid.dealias_cutoff} after dealiasing")
            self.streams = [NoiseStream(cfg.seed, trajectory=tr)
                            for tr in trajectories]
        else:
            self.streams = []
        self.injection_rate = cfg.forcing.trace_constant(0)

    # ------------------------------------------------------------- pieces

    def factors(self, dt: float):
        """(E, Eh) = (exp(-4 pi^2 nu k^2 dt), its square root), cached."""
        cached = self._factors.get(dt)
        if cached is not None:
            return cached
        x = self.decay_rate * dt
        pair = (np.exp(-x).astype(self.rdtype),
                np.exp(-0.5 * x).astype(self.rdtype))
        if len(self._factors) > 128:
            self._factors.clear()
        self._factors[dt] = pair
        return pair

    def nonlinear(self, uh: np.ndarray) -> np.ndarray:
        u = sfft.irfft(uh, n=self.grid.n, norm="forward")
        return self.neg_ik * sfft.rfft(self.cfg.flux.eval(u), norm="forward")

    def h1sq(self, uh: np.ndarray) -> np.ndarray:
        """Per-row ||u||_1^2, accumulated in float64."""
        a = np.abs(uh)
        return (a * a) @ self.h1_weights

    def rebuild(self, uh: np.ndarray, alive: np.ndarray,
                ) -> tuple[list, np.ndarray]:
        """Canonical boundary state.

        Each live row becomes a float64 Field, and the row is rewritten from
        that Field's coefficients. This is byte-for-byte the path a
        checkpoint resume takes, which is what makes restarts exact.
        """
        phys = sfft.irfft(uh, n=self.grid.n, norm="forward")
        fields: list[Field | None] = [None] * uh.shape[0]
        phys_c = np.zeros((uh.shape[0], self.grid.n))
        for row in np.flatnonzero(alive):
            f = Field.from_physical(self.grid, phys[row].astype(np.float64))
            fields[row] = f
            phys_c[row] = f.values
            uh[row] = f.coeffs.astype(self.cdtype)
        return fields, phys_c

    def add_noise(self, uh: np.ndarray, step: int, dt: float) -> None:
        for row, stream in enumerate(self.streams):
            inc = white_increment_coeffs(self.cfg.forcing, stream, step, dt)
            uh[row, 1:inc.size + 1] += inc.astype(self.cdtype)

    # ------------------------------------------------------------ stepping

    def advance(self, uh: np.ndarray, dt: float, n_sub: int, step0: int,
                diss: np.ndarray, inj: np.ndarray) -> np.ndarray:
        """n_sub substeps; updates the energy ledgers in place."""
        e_full, e_half = self.factors(dt)
        white = self.cfg.forcing.kind == "white"
        nu_dt = self.cfg.nu * dt
        g_prev = self.h1sq(uh)
        for i in range(n_sub):
            n1 = self.nonlinear(uh)
            n2 = self.nonlinear(e_half * (uh + (0.5 * dt) * n1))
            n3 = self.nonlinear(e_full * (uh - dt * n1)
                                + (2.0 * dt) * (e_half * n2))
            uh = e_full * uh + (dt / 6.0) * (e_full * n1
                                             + 4.0 * (e_half * n2) + n3)
            g = self.h1sq(uh)
            diss += nu_dt * (g_prev + g)  # trapezoid of 2 nu ||u||_1^2
            if white:
                self.add_noise(uh, step0 + i, dt)
                inj += self.injection_rate * dt
                g = self.h1sq(uh)  # noise shifts the H1 ledger point
            g_prev = g
        return uh

    def speeds(self, phys: np.ndarray) -> np.ndarray:
        """Per-row max |f'(u)|, the advective CFL speed."""
        return np.max(np.abs(self.cfg.flux.d1(phys)), axis=-1)

    def plan(self, length: float, speed: float) -> tuple[int, float]:
        """Substep count and exact dt for one record interval."""
        st = self.cfg.stepping
        if st.mode == "fixed":
            ratio = length / st.dt
            n_sub = round(ratio)
            if n_sub < 1 or abs(ratio - n_sub) > 1e-6:
                raise ValueError(
                    f"fixed dt={st.dt} does not divide the interval {length}")
            return n_sub, length / n_sub
        dt_est = min(st.cfl_safety * self.grid.spacing / max(speed, 1e-12),
                     st.dt_cap, length)
        n_sub = max(1, math.ceil(length / dt_est - 1e-12))
        return n_sub, length / n_sub


def _kick_energy(uh_row: np.ndarray, zeta_coeffs: np.ndarray,
                 weights: np.ndarray) -> float:
    """Realized jump of |u|_2^2 when zeta is added: 2<u, z> + |z|^2."""
    cross = float(np.sum(weights * (uh_row.conj() * zeta_coeffs).real))
    zz = float(np.sum(weights * np.abs(zeta_coeffs) ** 2))
    return 2.0 * cross + zz


def integrate_batch(cfg: TrajectoryConfig, initial: Sequence[Field] | None = None,
                    t_end: float = 0.0, *,
                    trajectories: Sequence[int] | None = None,
                    resume: Sequence[TrajectoryState] | None = None,
                    make_records: bool = True,
                    field_sink: Callable[[int, int, float, Field], None] | None = None,
                    ) -> BatchResult:
    """Integrate an ensemble as one vectorized batch.

    Rows evolve under a common quantized time step (CFL from the batch
    maximum speed) with independent noise streams keyed by their trajectory
    index; passing the same index twice gives two rows the same realization,
    which is how same-noise coupling experiments are built. Pass `resume`
    (states sharing t and step_index) instead of `initial` to continue.

    field_sink, when given, is called as field_sink(row, trajectory, t, u)
    at every record boundary. A row that goes nonfinite is reported in
    failures and its last boundary state kept; the rest of the batch runs
    on, with the dead row zeroed.
    """
    if (initial is None) == (resume is None):
        raise ValueError("pass exactly one of initial fields or resume states")

    grid = cfg.make_grid()
    if resume is not None:
        fields = [s.u for s in resume]
        t0 = resume[0].t
        step0 = resume[0].step_index
        kick0 = resume[0].kick_index
        if any(abs(s.t - t0) > _TIME_EPS or s.step_index != step0
               or s.kick_index != kick0 for s in resume):
            raise ValueError("resumed states must share t and counters")
        diss = np.array([s.dissipated for s in resume])
        inj = np.array([s.injected for s in resume])
    else:
        fields = list(initial)
        t0 = 0.0
        step0 = kick0 = 0
        diss = np.zeros(len(fields))
        inj = np.zeros(len(fields))
    if not fields:
        raise ValueError("empty batch")
    for f in fields:
        if f.grid != grid:
            raise ValueError(
                f"initial field on n={f.grid.n} but config resolves n={grid.n}")

    n_rows = len(fields)
    if trajectories is None:
        trajectories = list(range(n_rows))
    elif len(trajectories) != n_rows:
        raise ValueError("one trajectory index per row")

    engine = _Engine(cfg, grid, trajectories)
    uh = np.stack([f.coeffs for f in fields]).astype(engine.cdtype)
    alive = np.ones(n_rows, dtype=bool)
    kicks = cfg.forcing.kind == "kick"
    interval = cfg.record_interval
    step_index = step0
    kick_index = kick0

    records: list[DiagnosticsRecord] = []
    failures: list[TrajectoryFailure] = []
    last_fields: list[Field] = list(fields)
    last_ledger = [(t0, float(diss[r]), float(inj[r]), step0, kick0)
                   for r in range(n_rows)]
    max_tail = 0.0
    range_hi = max(abs(cfg.flux.working_range[0]), abs(cfg.flux.working_range[1]))
    range_warned = False

    def boundary(t: float, row_fields: Sequence[Field | None],
                 phys_c: np.ndarray) -> None:
        nonlocal max_tail, range_warned
        for row in np.flatnonzero(alive):
            u = row_fields[row]
            last_fields[row] = u
            last_ledger[row] = (t, float(diss[row]), float(inj[row]),
                                step_index, kick_index)
            if make_records:
                rec = make_record(u, t, trajectory=trajectories[row],
                                  dissipated=float(diss[row]),
                                  injected=float(inj[row]),
                                  include_spectrum=cfg.record_spectrum)
                records.append(rec)
                max_tail = max(max_tail, rec.tail_fraction)
            if field_sink is not None:
                field_sink(row, trajectories[row], t, u)
        if not range_warned and np.abs(phys_c[alive]).max() > range_hi:
            warnings.warn(
                f"|u| exceeded the flux working range +-{range_hi:g}; "
                "the convexity certificate no longer applies", stacklevel=3)
            range_warned = True

    phys_c = np.stack([f.values for f in fields])
    boundary(t0, fields, phys_c)

    span = t_end - t0
    n_intervals = max(0, math.ceil(span / interval - _TIME_EPS))
    t = t0
    for j in range(1, n_intervals + 1):
        t_next = t0 + j * interval
        if t_next > t_end - _TIME_EPS * max(1.0, abs(t_end)):
            t_next = t_end
        length = t_next - t

        row_speeds = engine.speeds(phys_c)
        st = cfg.stepping
        if st.mode == "cfl":
            runaway = alive & (row_speeds > st.cfl_safety * grid.spacing / st.dt_floor)
            for row in np.flatnonzero(runaway):
                failures.append(TrajectoryFailure(
                    trajectories[row], t,
                    f"advective speed {row_speeds[row]:.3g} collapsed dt "
                    f"below {st.dt_floor:g}"))
                alive[row] = False
                uh[row] = 0.0
            if not alive.any():
                break
        n_sub, dt = engine.plan(length, float(row_speeds[alive].max()))

        uh = engine.advance(uh, dt, n_sub, step_index, diss, inj)
        step_index += n_sub

        bad = alive & ~np.isfinite(uh).all(axis=1)
        for row in np.flatnonzero(bad):
            failures.append(TrajectoryFailure(
                trajectories[row], t_next, "state went nonfinite"))
            alive[row] = False
            uh[row] = 0.0
        if not alive.any():
            break

        if kicks and abs(t_next - round(t_next)) < _TIME_EPS and round(t_next) > 0:
            zeta_cache = {}
            for row in np.flatnonzero(alive):
                key = trajectories[row]
                if key not in zeta_cache:
                    zeta_cache[key] = sample_kick(cfg.forcing,
                                                  engine.streams[row], grid,
                                                  kick_index)
                zc = zeta_cache[key].coeffs
                inj[row] += _kick_energy(uh[row].astype(np.complex128), zc,
                                         grid.mode_weights)
                uh[row] += zc.astype(engine.cdtype)
            kick_index += 1

        row_fields, phys_c = engine.rebuild(uh, alive)
        t = t_next
        boundary(t, row_fields, phys_c)

    if max_tail > 1e-6:
        warnings.warn(
            f"spectral tail fraction reached {max_tail:.2e} (> 1e-6); "
            "the grid is marginal for this viscosity", stacklevel=2)

    states = []
    for row in range(n_rows):
        lt, ld, li, ls, lk = last_ledger[row]
        states.append(TrajectoryState(
            t=lt, u=last_fields[row], dissipated=ld, injected=li,
            step_index=ls, kick_index=lk))
    return BatchResult(states=states, records=records, failures=failures)


def integrate(cfg: TrajectoryConfig, u0: Field | None = None,
              t_end: float = 0.0, *, trajectory: int = 0,
              state: TrajectoryState | None = None,
              field_sink: Callable[[int, int, float, Field], None] | None = None,
              ) -> tuple[TrajectoryState, list[DiagnosticsRecord]]:
    """Single-trajectory integration; raises StabilityFailure on blow-up.

    Records land at t0 and every record boundary through t_end. Pass a
    checkpointed state instead of u0 to continue a run.
    """
    result = integrate_batch(
        cfg,
        initial=None if state is not None else [u0],
        t_end=t_end,
        trajectories=[trajectory],
        resume=[state] if state is not None else None,
        field_sink=field_sink,
    )
    if result.failures:
        fail = result.failures[0]
        raise StabilityFailure(
            f"trajectory {fail.trajectory} at t={fail.t:g}: {fail.message}",
            state=result.states[0])
    return result.states[0], result.records


# ------------------------------------------------------- single-step ops


def _single(cfg: TrajectoryConfig, state: TrajectoryState):
    grid = cfg.make_grid()
    if state.u.grid != grid:
        raise ValueError("state grid does not match config resolution")
    return grid, _Engine(cfg, grid, [0])


def step_deterministic(state: TrajectoryState, cfg: TrajectoryConfig,
                       dt: float) -> TrajectoryState:
    """One unforced substep. integrate() is the fast path; this is the

    single-step hook for scheme tests (order, dissipation, monotonicity).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    grid, engine = _single(cfg, state)
    uh = state.u.coeffs[np.newaxis, :].astype(engine.cdtype)
    diss = np.array([state.dissipated])
    inj = np.array([state.injected])
    uh = engine.advance(uh, dt, 1, state.step_index, diss, inj)
    if not np.isfinite(uh).all():
        raise StabilityFailure(f"state went nonfinite at t={state.t:g}",
                               state=state)
    return TrajectoryState(
        t=state.t + dt, u=Field.from_spectral(grid, uh[0].astype(np.complex128)),
        dissipated=float(diss[0]), injected=float(inj[0]),
        step_index=state.step_index + 1, kick_index=state.kick_index)


def step_stochastic(state: TrajectoryState, cfg: TrajectoryConfig, dt: float,
                    stream: NoiseStream) -> TrajectoryState:
    """One substep of the white-forced equation (noise after the flux step)."""
    if cfg.forcing.kind != "white":
        raise ValueError("step_stochastic needs white forcing")
    if dt <= 0:
        raise ValueError("dt must be positive")
    grid, engine = _single(cfg, state)
    engine.streams = [stream]
    uh = state.u.coeffs[np.newaxis, :].astype(engine.cdtype)
    diss = np.array([state.dissipated])
    inj = np.array([state.injected])
    uh = engine.advance(uh, dt, 1, state.step_index, diss, inj)
    if not np.isfinite(uh).all():
        raise StabilityFailure(f"state went nonfinite at t={state.t:g}",
                               state=state)
    return TrajectoryState(
        t=state.t + dt, u=Field.from_spectral(grid, uh[0].astype(np.complex128)),
        dissipated=float(diss[0]), injected=float(inj[0]),
        step_index=state.step_index + 1, kick_index=state.kick_index)


def apply_kick(state: TrajectoryState, cfg: TrajectoryConfig,
               stream: NoiseStream) -> TrajectoryState:
    """Add the next kick at an integer time; time does not advance."""
    if cfg.forcing.kind != "kick":
        raise ValueError("apply_kick needs kick forcing")
    if abs(state.t - round(state.t)) > _TIME_EPS:
        raise ValueError(f"kicks land at integer times, not t={state.t}")
    grid = cfg.make_grid()
    zeta = sample_kick(cfg.forcing, stream, grid, state.kick_index)
    jump = _kick_energy(state.u.coeffs, zeta.coeffs, grid.mode_weights)
    return TrajectoryState(
        t=state.t, u=state.u + zeta,
        dissipated=state.dissipated, injected=state.injected + jump,
        step_index=state.step_index, kick_index=state.kick_index + 1)


# ----------------------------------------------------------- checkpoints


def config_summary(cfg: TrajectoryConfig, grid: Grid | None = None) -> dict:
    """JSON-ready echo of a config; config_from_summary inverts it."""
    if grid is None:
        grid = cfg.make_grid()
    forcing: dict = {"kind": cfg.forcing.kind}
    if cfg.forcing.kind != "none":
        amps = cfg.forcing.amplitudes
        forcing["a"] = list(amps.a)
        forcing["b"] = list(amps.b)
        if cfg.forcing.kind == "kick":
            forcing["law"] = cfg.forcing.kick_law
    return {
        "nu": cfg.nu,
        "n": grid.n,
        "dtype": cfg.dtype,
        "seed": cfg.seed,
        "record_interval": cfg.record_interval,
        "record_spectrum": cfg.record_spectrum,
        "flux": cfg.flux.name,
        "forcing": forcing,
        "stepping": {
            "mode": cfg.stepping.mode,
            "cfl_safety": cfg.stepping.cfl_safety,
            "dt": cfg.stepping.dt,
            "dt_cap": cfg.stepping.dt_cap,
            "dt_floor": cfg.stepping.dt_floor,
        },
    }


def save_checkpoint(path: str | Path, cfg: TrajectoryConfig,
                    state: TrajectoryState, *, trajectory: int = 0) -> None:
    """Snapshot of the state plus a JSON sidecar (<path>.json)."""
    path = Path(path)
    state.u.save(path, time=state.t)
    sidecar = {
        "t": state.t,
        "dissipated": state.dissipated,
        "injected": state.injected,
        "step_index": state.step_index,
        "kick_index": state.kick_index,
        "trajectory": trajectory,
        "config": config_summary(cfg, state.u.grid),
    }
    Path(str(path) + ".json").write_text(json.dumps(sidecar, indent=1))


def load_checkpoint(path: str | Path,
                    cfg: TrajectoryConfig | None = None
                    ) -> tuple[TrajectoryState, int]:
    """Reads (state, trajectory index); validates against cfg when given."""
    path = Path(path)
    u, t_snap = load_snapshot(path)
    meta = json.loads(Path(str(path) + ".json").read_text())
    if abs(meta["t"] - t_snap) > _TIME_EPS:
        raise ValueError(f"{path}: sidecar time {meta['t']} does not match "
                         f"snapshot time {t_snap}")
    if cfg is not None:
        echo = config_summary(cfg, cfg.make_grid())
        stored = meta["config"]
        for key in ("nu", "n", "dtype", "seed", "record_interval", "flux"):
            if stored.get(key) != echo[key]:
                raise ValueError(
                    f"{path}: checkpoint was written with {key}="
                    f"{stored.get(key)!r}, config has {echo[key]!r}")
        if stored.get("forcing") != echo["forcing"]:
            raise ValueError(f"{path}: checkpoint forcing differs from config")
    state = TrajectoryState(
        t=float(meta["t"]), u=u,
        dissipated=float(meta["dissipated"]),
        injected=float(meta["injected"]),
        step_index=int(meta["step_index"]),
        kick_index=int(meta["kick_index"]))
    return state, int(meta.get("trajectory", 0))
