"""Ensemble runs, their on-disk archives, and the stationary-regime tools.

The unit of work here is an ExperimentConfig: one trajectory configuration
plus ensemble size, end time, and a burn-in after which the run counts as
statistically settled. run_ensemble integrates the whole ensemble as a
single vectorized batch and returns an EnsembleArchive, which can rebuild
itself byte-for-byte from a directory (records as CSV with repr-precision
floats, spectra as a stacked .npy, final states as snapshot + sidecar
pairs, index.json as the manifest).

Stationary statistics come in two flavors: bracket averages over the record
stream (time average per trajectory, then ensemble mean) and empirical
measures built from decorrelated field snapshots. quasi_stationary_check
tests the dissipation balance 2 nu {|u|_1^2} = I_0 that a settled forced
run must satisfy; coupling_decay runs same-noise trajectory pairs to watch
the L1 contraction that underlies uniqueness of the stationary state.
"""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .diagnostics import (
    RECORD_NORM_KEYS,
    BracketAverage,
    DiagnosticsRecord,
    bracket_average,
)
from .field import Field, Grid
from .flux import flux_from_name
from .forcing import ForcingSpec, SpectralAmplitudes
from .hopf_cole import hopf_cole_solve
from .solver import (
    TimeStepping,
    TrajectoryConfig,
    TrajectoryFailure,
    TrajectoryState,
    config_summary,
    integrate,
    integrate_batch,
    load_checkpoint,
    save_checkpoint,
)

__all__ = [
    "ExperimentConfig",
    "EnsembleArchive",
    "EmpiricalMeasure",
    "BalanceReport",
    "CouplingSeries",
    "run_ensemble",
    "config_from_summary",
    "stationary_average",
    "quasi_stationary_check",
    "coupling_decay",
    "default_burn_in",
    "norm_bracket_sweep",
    "validation_table",
]


@dataclass(frozen=True)
class ExperimentConfig:
    """A trajectory config lifted to an ensemble with a settling window.

    Statistics should be read on [burn_in, t_end]; snapshot_interval is the
    decorrelation gap used when harvesting fields into an EmpiricalMeasure.
    """

    trajectory: TrajectoryConfig
    ensemble: int = 1
    t_end: float = 10.0
    burn_in: float = 0.0
    snapshot_interval: float = 1.0

    def __post_init__(self) -> None:
        if self.ensemble < 1:
            raise ValueError("ensemble size must be at least 1")
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")
        if not 0.0 <= self.burn_in < self.t_end:
            raise ValueError("burn_in must lie in [0, t_end)")
        if self.snapshot_interval < 1.0:
            raise ValueError("snapshots must be at least one time unit apart")

    @property
    def window(self) -> tuple[float, float]:
        return (self.burn_in, self.t_end)


_CSV_FIXED = ("max_slope", "min_slope", "dissipated", "injected",
              "tail_fraction")


def _norm_column(key: tuple) -> str:
    if key[0] == "hs":
        return f"hs_{key[1]:g}"
    m, p = key
    return f"n{m}_{'inf' if math.isinf(p) else format(p, 'g')}"


_CSV_COLUMNS = ("trajectory", "t",
                *[_norm_column(k) for k in RECORD_NORM_KEYS], *_CSV_FIXED)


@dataclass
class EnsembleArchive:
    """A finished ensemble: records, final states, and how it was made.

    save/load round-trip through a directory; identical configs and seeds
    produce byte-identical archives (floats are written with repr, spectra
    as a raw .npy, the manifest with sorted keys).
    """

    trajectory_config: TrajectoryConfig
    ensemble: int
    t_end: float
    burn_in: float
    snapshot_interval: float
    records: list[DiagnosticsRecord]
    failures: list[TrajectoryFailure]
    final_states: list[TrajectoryState]

    @property
    def window(self) -> tuple[float, float]:
        return (self.burn_in, self.t_end)

    def bracket(self, extractor: Callable[[DiagnosticsRecord], float],
                window: tuple[float, float] | None = None) -> BracketAverage:
        return bracket_average(self.records, extractor,
                               window if window is not None else self.window)

    def records_for(self, trajectory: int) -> list[DiagnosticsRecord]:
        return [r for r in self.records if r.trajectory == trajectory]

    def save(self, directory: str | Path) -> Path:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        files: dict = {"records": "records.csv"}

        with open(d / "records.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(_CSV_COLUMNS)
            for r in self.records:
                writer.writerow([
                    r.trajectory, repr(r.t),
                    *[repr(r.norms[k]) for k in RECORD_NORM_KEYS],
                    repr(r.max_slope), repr(r.min_slope),
                    repr(r.dissipated), repr(r.injected),
                    repr(r.tail_fraction),
                ])

        # .npy rather than .npz: the zip container timestamps its members,
        # which would break byte-identical reruns
        if self.records and self.records[0].spectrum is not None:
            stacked = np.stack([r.spectrum for r in self.records])
            np.save(d / "spectra.npy", stacked)
            files["spectra"] = "spectra.npy"

        state_paths = []
        if self.final_states:
            (d / "states").mkdir(exist_ok=True)
            for i, st in enumerate(self.final_states):
                rel = f"states/traj{i:04d}.snap"
                save_checkpoint(d / rel, self.trajectory_config, st,
                                trajectory=i)
                state_paths.append(rel)
        files["states"] = state_paths

        index = {
            "kind": "ensemble",
            "format": 1,
            "trajectory": config_summary(self.trajectory_config),
            "ensemble": self.ensemble,
            "t_end": self.t_end,
            "burn_in": self.burn_in,
            "snapshot_interval": self.snapshot_interval,
            "failures": [{"trajectory": f.trajectory, "t": f.t,
                          "message": f.message} for f in self.failures],
            "record_count": len(self.records),
            "files": files,
        }
        (d / "index.json").write_text(
            json.dumps(index, indent=2, sort_keys=True) + "\n")
        return d

    @classmethod
    def load(cls, directory: str | Path) -> "EnsembleArchive":
        d = Path(directory)
        index = json.loads((d / "index.json").read_text())
        if index.get("kind") != "ensemble":
            raise ValueError(f"{d}: not an ensemble archive")
        cfg = config_from_summary(index["trajectory"])
        files = index["files"]

        spectra = None
        if files.get("spectra"):
            spectra = np.load(d / files["spectra"])
        records = _read_records(d / files["records"], spectra)

        states = []
        for rel in files["states"]:
            state, _ = load_checkpoint(d / rel, cfg)
            states.append(state)
        failures = [TrajectoryFailure(trajectory=f["trajectory"], t=f["t"],
                                      message=f["message"])
                    for f in index["failures"]]
        return cls(
            trajectory_config=cfg,
            ensemble=int(index["ensemble"]),
            t_end=float(index["t_end"]),
            burn_in=float(index["burn_in"]),
            snapshot_interval=float(index["snapshot_interval"]),
            records=records,
            failures=failures,
            final_states=states,
        )


def _read_records(path: Path,
                  spectra: np.ndarray | None) -> list[DiagnosticsRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != _CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {header}")
        for i, row in enumerate(reader):
            vals = [float(x) for x in row[1:]]
            norms = dict(zip(RECORD_NORM_KEYS, vals[1:1 + len(RECORD_NORM_KEYS)]))
            rest = vals[1 + len(RECORD_NORM_KEYS):]
            records.append(DiagnosticsRecord(
                trajectory=int(row[0]), t=vals[0], norms=norms,
                max_slope=rest[0], min_slope=rest[1],
                dissipated=rest[2], injected=rest[3], tail_fraction=rest[4],
                spectrum=spectra[i] if spectra is not None else None))
    if spectra is not None and len(spectra) != len(records):
        raise ValueError(f"{path}: {len(records)} records but "
                         f"{len(spectra)} spectra")
    return records


def config_from_summary(summary: Mapping) -> TrajectoryConfig:
    """Rebuild a TrajectoryConfig from config_summary output."""
    fd = summary["forcing"]
    if fd["kind"] == "none":
        forcing = ForcingSpec.none()
    else:
        amps = SpectralAmplitudes(a=tuple(fd["a"]), b=tuple(fd["b"]))
        if fd["kind"] == "kick":
            forcing = ForcingSpec.kick(amps, fd.get("law", "gaussian"))
        else:
            forcing = ForcingSpec.white(amps)
    sd = summary["stepping"]
    stepping = TimeStepping(mode=sd["mode"], cfl_safety=sd["cfl_safety"],
                            dt=sd["dt"], dt_cap=sd["dt_cap"],
                            dt_floor=sd["dt_floor"])
    return TrajectoryConfig(
        nu=summary["nu"],
        flux=flux_from_name(summary["flux"]),
        forcing=forcing,
        n=summary["n"],
        stepping=stepping,
        record_interval=summary["record_interval"],
        record_spectrum=summary.get("record_spectrum", True),
        dtype=summary["dtype"],
        seed=summary["seed"],
    )


def run_ensemble(exp: ExperimentConfig, *,
                 initial: Field | Sequence[Field] | None = None,
                 measure: "EmpiricalMeasure | None" = None,
                 field_sink: Callable[[int, int, float, Field], None] | None = None,
                 ) -> EnsembleArchive:
    """Integrate the ensemble in one batch and wrap the outcome.

    initial may be a single field (replicated; rows still decorrelate
    through their noise) or one field per trajectory; forced runs default
    to starting from rest. An EmpiricalMeasure passed in is fed every
    record boundary and applies its own burn-in/decorrelation rules.
    Raises if more than half the ensemble goes unstable; fewer failures
    are recorded in the archive and excluded from the final states' uses.
    """
    cfg = exp.trajectory
    grid = cfg.make_grid()
    if initial is None:
        if cfg.forcing.kind == "none":
            raise ValueError("unforced ensembles need explicit initial fields")
        fields = [Field.zeros(grid)] * exp.ensemble
    elif isinstance(initial, Field):
        fields = [initial] * exp.ensemble
    else:
        fields = list(initial)
        if len(fields) != exp.ensemble:
            raise ValueError(f"got {len(fields)} initial fields for an "
                             f"ensemble of {exp.ensemble}")

    sinks = []
    if measure is not None:
        sinks.append(lambda row, traj, t, u: measure.offer(row, t, u))
    if field_sink is not None:
        sinks.append(field_sink)
    sink = None
    if sinks:
        def sink(row, traj, t, u, _sinks=tuple(sinks)):
            for s in _sinks:
                s(row, traj, t, u)

    result = integrate_batch(cfg, fields, exp.t_end, field_sink=sink)
    if 2 * len(result.failures) > exp.ensemble:
        first = result.failures[0]
        raise RuntimeError(
            f"{len(result.failures)} of {exp.ensemble} trajectories failed; "
            f"first at t={first.t:g}: {first.message}")
    return EnsembleArchive(
        trajectory_config=cfg,
        ensemble=exp.ensemble,
        t_end=exp.t_end,
        burn_in=exp.burn_in,
        snapshot_interval=exp.snapshot_interval,
        records=result.records,
        failures=result.failures,
        final_states=result.states,
    )


# ------------------------------------------------------ empirical measure


class EmpiricalMeasure:
    """Pool of decorrelated snapshots approximating the stationary state.

    Offers are accepted per source key (trajectory row) no earlier than
    `start` and no closer together than `interval`, which must be at least
    one time unit. When the pool overflows `cap` it is thinned to every
    other sample and the gap doubles, so long runs stay bounded while the
    retained samples spread out in time.
    """

    def __init__(self, interval: float = 1.0, cap: int = 512,
                 start: float = 0.0):
        if interval < 1.0:
            raise ValueError("snapshots must be at least one time unit apart")
        if cap < 2:
            raise ValueError("cap must be at least 2")
        self.interval = float(interval)
        self.cap = int(cap)
        self.start = float(start)
        self.fields: list[Field] = []
        self.times: list[float] = []
        self._last: dict = {}

    @property
    def sample_count(self) -> int:
        return len(self.fields)

    def offer(self, key, t: float, field: Field) -> bool:
        if t < self.start - 1e-9:
            return False
        last = self._last.get(key)
        if last is not None and t < last + self.interval - 1e-9:
            return False
        self._last[key] = t
        self.fields.append(field)
        self.times.append(t)
        if len(self.fields) > self.cap:
            self._thin()
        return True

    def _thin(self) -> None:
        self.fields = self.fields[::2]
        self.times = self.times[::2]
        self.interval *= 2.0

    def sink(self) -> Callable[[int, int, float, Field], None]:
        """Adapter with the field_sink(row, trajectory, t, u) signature."""
        return lambda row, traj, t, u: self.offer(row, t, u)


def stationary_average(measure: EmpiricalMeasure,
                       observable: Callable[[Field], float]) -> BracketAverage:
    """Mean of an observable over the snapshot pool, with its spread.

    Treats samples as independent (that is what the decorrelation gap is
    for), so the stderr is the plain sample one. Refuses pools under 30
    samples; the spread estimate is meaningless below that.
    """
    n = measure.sample_count
    if n < 30:
        raise ValueError(f"need at least 30 snapshots, have {n}")
    vals = np.array([observable(f) for f in measure.fields], dtype=np.float64)
    return BracketAverage(
        value=float(vals.mean()),
        stderr=float(vals.std(ddof=1) / math.sqrt(n)),
        window=(min(measure.times), max(measure.times)),
        ensemble_size=n,
        per_trajectory=tuple(float(v) for v in vals),
    )


# ------------------------------------------------------- balance and burn-in


@dataclass(frozen=True)
class BalanceReport:
    """Dissipation/injection balance of a (hopefully) settled run.

    ratio compares the measured dissipation rate 2 nu {|u|_1^2} with the
    forcing trace I_0; in the stationary regime it sits at 1. For unforced
    runs ratio and balanced are None and only the dissipation side is
    meaningful.
    """

    window: tuple[float, float]
    mean_h1_sq: float
    dissipation_rate: float
    trace_rate: float
    ledger_dissipation_rate: float
    ledger_injection_rate: float
    ratio: float | None
    balanced: bool | None


def _ledger_rate(records: Sequence[DiagnosticsRecord],
                 window: tuple[float, float],
                 attr: str) -> float:
    """Ensemble-mean growth rate of a cumulative ledger over the window."""
    t0, t1 = window
    rates = []
    groups: dict[int, list[DiagnosticsRecord]] = {}
    for r in records:
        if t0 - 1e-9 <= r.t <= t1 + 1e-9:
            groups.setdefault(r.trajectory, []).append(r)
    for rs in groups.values():
        rs.sort(key=lambda r: r.t)
        span = rs[-1].t - rs[0].t
        if span > 0:
            rates.append(
                (getattr(rs[-1], attr) - getattr(rs[0], attr)) / span)
    if not rates:
        raise ValueError(f"no ledger span inside window [{t0}, {t1}]")
    return float(np.mean(rates))


def quasi_stationary_check(archive: EnsembleArchive, *,
                           window: tuple[float, float] | None = None,
                           tolerance: float = 0.15) -> BalanceReport:
    """Check 2 nu {|u|_1^2} against I_0 on the post-burn-in window."""
    window = window if window is not None else archive.window
    nu = archive.trajectory_config.nu
    mean_h1_sq = archive.bracket(lambda r: r.norm(1, 2) ** 2, window).value
    dissipation_rate = 2.0 * nu * mean_h1_sq
    trace = archive.trajectory_config.forcing.trace_constant(0)
    ratio = dissipation_rate / trace if trace > 0 else None
    return BalanceReport(
        window=window,
        mean_h1_sq=mean_h1_sq,
        dissipation_rate=dissipation_rate,
        trace_rate=trace,
        ledger_dissipation_rate=_ledger_rate(archive.records, window,
                                             "dissipated"),
        ledger_injection_rate=_ledger_rate(archive.records, window,
                                           "injected"),
        ratio=ratio,
        balanced=None if ratio is None else abs(ratio - 1.0) <= tolerance,
    )


def default_burn_in(pilot_records: Sequence[DiagnosticsRecord],
                    forcing: ForcingSpec) -> float:
    """Settling time from a pilot run: max(20, 2 (sup E|u|_2^2 + 1) / I_0).

    The supremum runs over the pilot's record times with the ensemble mean
    taken at each; starting from rest this bounds the time the energy
    balance needs to saturate, and the factor 2 plus the floor of 20 give
    slack for the slowest modes.
    """
    if forcing.kind == "none":
        raise ValueError("burn-in heuristic applies to forced runs")
    i0 = forcing.trace_constant(0)
    by_t: dict[float, list[float]] = {}
    for r in pilot_records:
        by_t.setdefault(round(r.t, 9), []).append(r.norm(0, 2) ** 2)
    if not by_t:
        raise ValueError("pilot produced no records")
    c_prime = max(float(np.mean(v)) for v in by_t.values())
    return max(20.0, 2.0 * (c_prime + 1.0) / i0)


# ------------------------------------------------------------- coupling


@dataclass(frozen=True)
class CouplingSeries:
    """L1 distances between same-noise trajectory pairs over time."""

    times: np.ndarray       # (boundaries,)
    distances: np.ndarray   # (pairs, boundaries)

    @property
    def initial(self) -> np.ndarray:
        return self.distances[:, 0]

    @property
    def final(self) -> np.ndarray:
        return self.distances[:, -1]

    @property
    def max_uptick(self) -> float:
        """Largest single-interval increase across all pairs.

        The L1 distance between solutions sharing the forcing is a
        supermartingale pathwise here (it is exactly monotone for smooth
        solutions), so anything beyond discretization noise is a bug.
        """
        return float(np.diff(self.distances, axis=1).max())

    @property
    def decay_ratios(self) -> np.ndarray:
        return self.final / self.initial


def coupling_decay(cfg: TrajectoryConfig,
                   pairs: Sequence[tuple[Field, Field]],
                   t_end: float) -> CouplingSeries:
    """Evolve pairs under identical noise and track their L1 distances.

    Each pair shares one trajectory index, hence one noise realization;
    distances are recorded at every record boundary including t = 0.
    """
    if not pairs:
        raise ValueError("need at least one pair")
    rows: list[Field] = []
    trajectories: list[int] = []
    for i, (ua, ub) in enumerate(pairs):
        rows += [ua, ub]
        trajectories += [i, i]

    times: list[float] = []
    dists: list[list[float]] = [[] for _ in pairs]
    holder: dict[int, Field] = {}

    def sink(row: int, traj: int, t: float, u: Field) -> None:
        pair, side = divmod(row, 2)
        if side == 0:
            holder[pair] = u
            if pair == 0:
                times.append(t)
        else:
            other = holder.pop(pair)
            dists[pair].append(float(np.mean(np.abs(other.values - u.values))))

    result = integrate_batch(cfg, rows, t_end, trajectories=trajectories,
                             make_records=False, field_sink=sink)
    if result.failures:
        f = result.failures[0]
        raise RuntimeError(f"coupled row {f.trajectory} failed at "
                           f"t={f.t:g}: {f.message}")
    return CouplingSeries(times=np.array(times), distances=np.array(dists))


# ------------------------------------------------------------- sweeps


def norm_bracket_sweep(nus: Sequence[float],
                       experiment_for: Callable[[float], ExperimentConfig],
                       extractors: Mapping[str, Callable[[DiagnosticsRecord], float]],
                       *, initial: Field | Sequence[Field] | None = None,
                       ) -> dict[str, list[tuple[float, BracketAverage]]]:
    """Bracket several observables across a viscosity sweep.

    Runs one ensemble per nu (experiment_for decides resolution, ensemble
    size, and window) and returns, per observable name, the (nu, bracket)
    pairs ready for power-law fitting against nu.
    """
    out: dict[str, list[tuple[float, BracketAverage]]] = {
        name: [] for name in extractors}
    for nu in nus:
        archive = run_ensemble(experiment_for(nu), initial=initial)
        for name, extractor in extractors.items():
            out[name].append((nu, archive.bracket(extractor)))
    return out


# ------------------------------------------------------------- validation


def validation_table(nu: float = 1e-2, *, n: int = 1024,
                     times: Sequence[float] = (0.1, 0.5, 1.0),
                     u0: Field | None = None) -> list[dict]:
    """Solver-versus-closed-form errors for the unforced classical flux.

    Integrates once through the sorted times and compares each arrival
    state against the log-derivative solution from the same u0. Returns
    one row per time with absolute L2 and sup errors.
    """
    grid = Grid(n)
    if u0 is None:
        u0 = Field.from_function(grid, lambda x: np.sin(2.0 * np.pi * x))
    elif u0.grid.n != n:
        raise ValueError("u0 resolution must match n")
    rows = []
    current = u0
    prev_t = 0.0
    for t in sorted(times):
        if t <= prev_t:
            raise ValueError("times must be positive and distinct")
        seg = t - prev_t
        cfg = TrajectoryConfig(nu=nu, n=n, record_interval=seg,
                               record_spectrum=False)
        state, _ = integrate(cfg, current, seg)
        current = state.u
        exact = hopf_cole_solve(u0, nu, t)
        diff = current - exact
        rows.append({
            "t": t,
            "l2_error": diff.lp_norm(2),
            "linf_error": diff.lp_norm(math.inf),
        })
        prev_t = t
    return rows
