"""Builders for the heavy runs behind the acceptance suite.

Each run lands in a cache directory (BURGULENCE_ACCEPTANCE_CACHE, default
tests/_acceptance_cache) and is skipped when its completion marker exists,
so the multi-hour sweep happens once per machine. Parameters here are
pinned; the acceptance tests only read.

Runnable as a script to fill the cache ahead of pytest:

    python3 tests/acceptance_data.py run_b run_c run_e run_d run_a
"""

import json
import os
import shutil
import sys
import time
import traceback
from pathlib import Path

import numpy as np

from burgulence import (
    DOMAIN_INITIAL,
    EmpiricalMeasure,
    ExperimentConfig,
    Field,
    ForcingSpec,
    NoiseStream,
    SpectralAmplitudes,
    TimeStepping,
    TrajectoryConfig,
    coupling_decay,
    load_snapshot,
    random_smooth_field,
    resolution_rule,
    run_ensemble,
)
from burgulence.experiments import EnsembleArchive

AMPLITUDES = SpectralAmplitudes.exponential()

SWEEP_NUS = (4e-3, 2e-3, 1e-3, 5e-4)
SEED_A = 1101
SEED_B = 1102
SEED_C = 1103
SEED_D = 1104
SEED_E = 1105

# sup norm of the random initial data; matches the stationary energy level
# measured in the nu=4e-3 pilot so the burn-in only has to mix, not grow
MATCHED_AMPLITUDE = 0.95

BURN_IN_A = 6.0
WINDOW_A = 8.0


def cache_root() -> Path:
    root = os.environ.get("BURGULENCE_ACCEPTANCE_CACHE")
    if root:
        return Path(root)
    return Path(__file__).parent / "_acceptance_cache"


def _nu_tag(nu: float) -> str:
    return f"nu_{nu:.0e}"


def _complete(directory: Path) -> bool:
    return (directory / "complete").is_file()


def _mark_complete(directory: Path) -> None:
    (directory / "complete").write_text("ok\n")


def _save_pool(directory: Path, measure: EmpiricalMeasure) -> None:
    pool = directory / "pool"
    if pool.is_dir():
        shutil.rmtree(pool)  # a crashed build must not leave stale members
    pool.mkdir(parents=True)
    for i, (t, u) in enumerate(zip(measure.times, measure.fields)):
        u.save(pool / f"f{i:04d}.snap", time=t)


def load_pool(directory: Path) -> list[Field]:
    return [load_snapshot(p)[0] for p in sorted((directory / "pool").glob("*.snap"))]


def _matched_initial(grid, seed: int, count: int) -> list[Field]:
    return [random_smooth_field(
                grid, NoiseStream(seed, trajectory=i, domain=DOMAIN_INITIAL),
                amplitude=MATCHED_AMPLITUDE, k_max=8)
            for i in range(count)]


# ------------------------------------------------------- run A: nu sweep


def sweep_trajectory(nu: float, seed: int = SEED_A) -> TrajectoryConfig:
    return TrajectoryConfig(
        nu=nu,
        forcing=ForcingSpec.white(AMPLITUDES),
        n=resolution_rule(nu),
        stepping=TimeStepping(mode="cfl", cfl_safety=0.55),
        record_interval=0.25,
        record_spectrum=False,
        # statistics at the probed tolerances survive single precision;
        # the two coarse grids stay double as a cross-check
        dtype="float32" if nu <= 1e-3 else "float64",
        seed=seed,
    )


def ensure_run_a(nu: float) -> Path:
    out = cache_root() / "run_a" / _nu_tag(nu)
    if _complete(out):
        return out
    traj = sweep_trajectory(nu)
    exp = ExperimentConfig(trajectory=traj, ensemble=16,
                           t_end=BURN_IN_A + WINDOW_A, burn_in=BURN_IN_A,
                           snapshot_interval=1.0)
    initial = _matched_initial(traj.make_grid(), SEED_A, exp.ensemble)
    measure = EmpiricalMeasure(interval=1.0, start=BURN_IN_A)
    archive = run_ensemble(exp, initial=initial, measure=measure)
    if archive.failures:
        raise RuntimeError(f"run A at nu={nu}: {len(archive.failures)} "
                           "trajectories failed")
    archive.save(out)
    _save_pool(out, measure)
    _mark_complete(out)
    return out


def run_a() -> None:
    for nu in SWEEP_NUS:
        t0 = time.time()
        out = ensure_run_a(nu)
        print(f"run_a {_nu_tag(nu)}: {out} ({time.time() - t0:.0f}s)",
              flush=True)


# --------------------------------------------- run B: stationary balance


def ensure_run_b() -> Path:
    out = cache_root() / "run_b"
    if _complete(out):
        return out
    nu = 2e-2
    traj = TrajectoryConfig(
        nu=nu, forcing=ForcingSpec.white(AMPLITUDES), n=resolution_rule(nu),
        stepping=TimeStepping(mode="cfl", cfl_safety=0.55),
        record_interval=0.25, record_spectrum=False, seed=SEED_B)
    exp = ExperimentConfig(trajectory=traj, ensemble=8, t_end=30.0,
                           burn_in=20.0, snapshot_interval=1.0)
    archive = run_ensemble(exp)  # from rest: burn-in covers the full growth
    if archive.failures:
        raise RuntimeError(f"run B: {len(archive.failures)} trajectories failed")
    archive.save(out)
    _mark_complete(out)
    return out


def run_b() -> None:
    t0 = time.time()
    print(f"run_b: {ensure_run_b()} ({time.time() - t0:.0f}s)", flush=True)


# ------------------------------------------- run C: decaying slope bound


RUN_C_NUS = (1e-2, 2e-3)
RUN_C_ENSEMBLE = 20


def run_c_initial_fields(grid) -> list[Field]:
    """The 20 random smooth profiles; rebuilt identically by the tests."""
    return [random_smooth_field(
                grid, NoiseStream(SEED_C, trajectory=i, domain=DOMAIN_INITIAL),
                amplitude=1.0, k_max=8)
            for i in range(RUN_C_ENSEMBLE)]


def ensure_run_c(nu: float) -> Path:
    out = cache_root() / "run_c" / _nu_tag(nu)
    if _complete(out):
        return out
    traj = TrajectoryConfig(
        nu=nu, forcing=ForcingSpec.none(), n=resolution_rule(nu),
        stepping=TimeStepping(mode="cfl", cfl_safety=0.55),
        record_interval=0.05, record_spectrum=False, seed=SEED_C)
    exp = ExperimentConfig(trajectory=traj, ensemble=RUN_C_ENSEMBLE,
                           t_end=1.0)
    archive = run_ensemble(exp, initial=run_c_initial_fields(traj.make_grid()))
    if archive.failures:
        raise RuntimeError(f"run C at nu={nu}: {len(archive.failures)} "
                           "trajectories failed")
    archive.save(out)
    _mark_complete(out)
    return out


def run_c() -> None:
    for nu in RUN_C_NUS:
        t0 = time.time()
        print(f"run_c {_nu_tag(nu)}: {ensure_run_c(nu)} "
              f"({time.time() - t0:.0f}s)", flush=True)


# -------------------------------------------- run D: same-noise coupling


RUN_D_PAIRS = 10
RUN_D_T_END = 200.0


def ensure_run_d() -> Path:
    out = cache_root() / "run_d"
    if _complete(out):
        return out
    nu = 1e-2
    traj = TrajectoryConfig(
        nu=nu, forcing=ForcingSpec.white(AMPLITUDES), n=resolution_rule(nu),
        stepping=TimeStepping(mode="cfl", cfl_safety=0.55),
        record_interval=0.25, record_spectrum=False, seed=SEED_D)
    grid = traj.make_grid()
    pairs = []
    for i in range(RUN_D_PAIRS):
        ua = random_smooth_field(
            grid, NoiseStream(SEED_D, trajectory=2 * i, domain=DOMAIN_INITIAL),
            amplitude=1.0, k_max=8)
        ub = random_smooth_field(
            grid, NoiseStream(SEED_D, trajectory=2 * i + 1,
                              domain=DOMAIN_INITIAL),
            amplitude=1.0, k_max=8)
        pairs.append((ua, ub))
    series = coupling_decay(traj, pairs, RUN_D_T_END)
    out.mkdir(parents=True, exist_ok=True)
    np.save(out / "times.npy", np.asarray(series.times))
    np.save(out / "distances.npy", np.asarray(series.distances))
    (out / "summary.json").write_text(json.dumps({
        "initial": [float(v) for v in series.initial],
        "final": [float(v) for v in series.final],
        "decay_ratios": [float(v) for v in series.decay_ratios],
        "max_uptick": series.max_uptick,
    }, indent=2, sort_keys=True) + "\n")
    _mark_complete(out)
    return out


def run_d() -> None:
    t0 = time.time()
    print(f"run_d: {ensure_run_d()} ({time.time() - t0:.0f}s)", flush=True)


# ------------------------------------- run E: deterministic cliff census


def run_e_initial(grid) -> Field:
    return Field.from_function(
        grid, lambda x: (np.sin(2 * np.pi * x)
                         + 0.6 * np.sin(4 * np.pi * x + 1.1)
                         + 0.3 * np.sin(6 * np.pi * x + 2.3)))


def ensure_run_e() -> Path:
    out = cache_root() / "run_e"
    if _complete(out):
        return out
    nu = 2e-3
    traj = TrajectoryConfig(
        nu=nu, forcing=ForcingSpec.none(), n=resolution_rule(nu),
        stepping=TimeStepping(mode="cfl", cfl_safety=0.55),
        record_interval=0.05, record_spectrum=False, seed=SEED_E)
    # t_end clears T2 = 2 D / sigma ~ 35.4 for this profile (D ~ 17.7)
    exp = ExperimentConfig(trajectory=traj, ensemble=1, t_end=36.0)
    archive = run_ensemble(exp, initial=[run_e_initial(traj.make_grid())])
    if archive.failures:
        raise RuntimeError("run E failed")
    archive.save(out)
    _mark_complete(out)
    return out


def run_e() -> None:
    t0 = time.time()
    print(f"run_e: {ensure_run_e()} ({time.time() - t0:.0f}s)", flush=True)


def load_archive(directory: Path) -> EnsembleArchive:
    return EnsembleArchive.load(directory)


_RUNS = {"run_a": run_a, "run_b": run_b, "run_c": run_c,
         "run_d": run_d, "run_e": run_e}


def main(names: list[str]) -> int:
    if not names:
        names = list(_RUNS)
    failed = False
    for name in names:
        try:
            _RUNS[name]()
        except Exception:
            traceback.print_exc()
            failed = True
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
