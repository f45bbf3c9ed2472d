"""Watch cliffs form and decay in an unforced run.

Smooth data steepens until viscosity arrests the gradient at O(1/nu),
leaving the classic sawtooth: gentle ramps separated by thin cliffs.
The one-sided slope never exceeds min(D, 1/t), so after the cliffs merge
the profile forgets its initial data and decays self-similarly.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from burgulence import Field, ForcingSpec, TimeStepping, TrajectoryConfig
from burgulence.diagnostics import genericity, slope_bound
from burgulence.solver import integrate

NU = 1e-2
N = 2048
T_END = 8.0
SNAP_TIMES = (0.0, 0.1, 0.3, 1.0, 4.0)
OUT = pathlib.Path(__file__).parent / "output"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    cfg = TrajectoryConfig(nu=NU, forcing=ForcingSpec.none(), n=N,
                           stepping=TimeStepping(mode="cfl"),
                           record_interval=0.05, seed=0)
    grid = cfg.make_grid()
    u0 = Field.from_function(
        grid, lambda x: (np.sin(2 * np.pi * x)
                         + 0.6 * np.sin(4 * np.pi * x + 1.1)
                         + 0.3 * np.sin(6 * np.pi * x + 2.3)))
    d = genericity(u0)
    print(f"initial max slope D = {d:.2f}")

    snaps = {}

    def sink(row, traj, t, u):
        for want in SNAP_TIMES:
            if abs(t - want) < 1e-9:
                snaps[want] = u

    _, records = integrate(cfg, u0, T_END, field_sink=sink)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for t in SNAP_TIMES:
        ax.plot(grid.x, snaps[t].values, lw=1.2, label=f"t = {t:g}")
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.legend(frameon=False, ncol=2)
    fig.tight_layout()
    fig.savefig(OUT / "cliffs.png", dpi=150)

    ts = np.array([r.t for r in records if r.t > 0])
    slopes = np.array([r.max_slope for r in records if r.t > 0])
    bound = np.array([slope_bound(d, 1.0, t) for t in ts])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.loglog(ts, slopes, lw=1.5, label="max u_x")
    ax.loglog(ts, bound, "k--", lw=1, label="min(D, 1/t)")
    ax.set_xlabel("t")
    ax.set_ylabel("one-sided slope")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(OUT / "slope_bound.png", dpi=150)
    print(f"wrote {OUT / 'cliffs.png'} and {OUT / 'slope_bound.png'}")


if __name__ == "__main__":
    main()
