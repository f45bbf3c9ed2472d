"""Small-scale statistics of the white-forced stationary state.

A handful of trajectories forced from rest settle into statistical
equilibrium; snapshots taken one time unit apart then stand in for the
stationary measure. Three signatures of cliff-dominated turbulence show
up already at this modest ensemble: an energy spectrum close to k^-2,
structure functions with the p-independent inertial slope min(p, 1), and
flatness growing like 1/ell until the cliff width cuts it off.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from burgulence import (EmpiricalMeasure, ExperimentConfig, ForcingSpec,
                        SpectralAmplitudes, TimeStepping, TrajectoryConfig,
                        energy_spectrum, flatness, quasi_stationary_check,
                        run_ensemble, structure_function)
from burgulence.diagnostics import grid_shifts_in

NU = 4e-3
N = 4096
ENSEMBLE = 4
BURN = 6.0
T_END = 22.0
OUT = pathlib.Path(__file__).parent / "output"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    exp = ExperimentConfig(
        trajectory=TrajectoryConfig(
            nu=NU, forcing=ForcingSpec.white(SpectralAmplitudes.exponential()),
            n=N, stepping=TimeStepping(mode="cfl", cfl_safety=0.55),
            record_interval=0.25, seed=7),
        ensemble=ENSEMBLE, t_end=T_END, burn_in=BURN, snapshot_interval=1.0)
    measure = EmpiricalMeasure(interval=1.0, start=BURN)
    archive = run_ensemble(exp, measure=measure)
    pool = measure.fields
    print(f"pooled {len(pool)} snapshots from t in [{BURN:g}, {T_END:g}]")

    report = quasi_stationary_check(archive)
    print(f"dissipation 2 nu {{|u|_1^2}} = {report.dissipation_rate:.4f}   "
          f"injection I_0 = {report.trace_rate:.4f}   ratio = {report.ratio:.3f}")

    grid = pool[0].grid
    ks = np.unique(np.geomspace(1, N // 8, 40).astype(int))
    ek = np.array([energy_spectrum(pool, int(k)) for k in ks])
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    ax.loglog(ks, ek, "o-", ms=3, lw=1)
    guide = ek[ks.searchsorted(8)] * (ks / 8.0) ** -2.0
    ax.loglog(ks, guide, "k--", lw=1, label=r"$k^{-2}$")
    ax.axvline(1.0 / NU, color="gray", lw=0.8, ls=":", label=r"$k = 1/\nu$")
    ax.set_xlabel("k")
    ax.set_ylabel("E(k)")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(OUT / "spectrum.png", dpi=150)

    # shifts past half the period mirror the ones below it
    ells = grid_shifts_in(grid, (grid.spacing, 0.5))
    ells = np.unique(np.geomspace(ells[0], ells[-1], 60))
    ells = np.round(ells * N) / N
    ells = np.unique(ells[ells > 0])
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for p, style in ((0.5, "C0"), (1.0, "C1"), (2.0, "C2"), (3.0, "C3")):
        sp = [np.mean([structure_function(u, p, ell) for u in pool])
              for ell in ells]
        ax.loglog(ells, sp, style, lw=1.2, label=f"p = {p:g}")
    mid = ells[(ells > 5 * NU) & (ells < 0.1)]
    if mid.size:
        ax.loglog(mid, 0.5 * mid, "k--", lw=1, label=r"slope 1")
    ax.axvline(NU, color="gray", lw=0.8, ls=":")
    ax.set_xlabel(r"$\ell$")
    ax.set_ylabel(r"$S_p(\ell)$")
    ax.legend(frameon=False, ncol=2, fontsize=8)
    fig.tight_layout()
    fig.savefig(OUT / "structure_functions.png", dpi=150)

    fl = np.array([flatness(pool, float(ell)) for ell in ells])
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    ax.loglog(ells, fl, "o-", ms=3, lw=1, label="F")
    if mid.size:
        ax.loglog(mid, 1.5 / mid, "k--", lw=1, label=r"$\ell^{-1}$")
    ax.axhline(3.0, color="gray", lw=0.8, ls=":", label="Gaussian")
    ax.set_xlabel(r"$\ell$")
    ax.set_ylabel(r"flatness $\{S_4\}/\{S_2\}^2$")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(OUT / "flatness.png", dpi=150)
    print(f"wrote spectrum.png, structure_functions.png, flatness.png in {OUT}")


if __name__ == "__main__":
    main()
