"""How decaying sawtooth norms scale as viscosity drops.

After the cliffs form, a decaying solution keeps an O(1) amplitude while
its gradient piles into cliffs of width O(nu). Sweeping nu at fixed
resolution and time-averaging over the sawtooth stage shows the textbook
exponents: {|u|_1^2} ~ 1/nu and steepest slope ~ 1/nu, while the sup
norm stays O(1), its residual nu-dependence fading as nu drops.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from burgulence import (ExperimentConfig, Field, ForcingSpec, Grid,
                        TimeStepping, TrajectoryConfig, fit_power_law)
from burgulence.experiments import norm_bracket_sweep

NUS = (1.6e-2, 8e-3, 4e-3, 2e-3)
N = 8192
WINDOW = (1.0, 2.5)
OUT = pathlib.Path(__file__).parent / "output"


def experiment_for(nu: float) -> ExperimentConfig:
    return ExperimentConfig(
        trajectory=TrajectoryConfig(nu=nu, forcing=ForcingSpec.none(), n=N,
                                    stepping=TimeStepping(mode="cfl"),
                                    record_interval=0.05,
                                    record_spectrum=False, seed=0),
        ensemble=1, t_end=WINDOW[1], burn_in=WINDOW[0],
        snapshot_interval=1.0)


def main() -> None:
    OUT.mkdir(exist_ok=True)
    grid = Grid(N)
    u0 = Field.from_function(
        grid, lambda x: (np.sin(2 * np.pi * x)
                         + 0.6 * np.sin(4 * np.pi * x + 1.1)
                         + 0.3 * np.sin(6 * np.pi * x + 2.3)))
    sweep = norm_bracket_sweep(
        NUS, experiment_for,
        {"h1_sq": lambda r: r.norm(1, 2) ** 2,
         "slope": lambda r: r.norm(1, np.inf),
         "sup": lambda r: r.norm(0, np.inf)},
        initial=u0)

    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for name, label, expect in (("h1_sq", r"$\{|u|_1^2\}$", "-1"),
                                ("slope", r"$\{|u|_{1,\infty}\}$", "-1"),
                                ("sup", r"$\{|u|_\infty\}$",
                                 "0 in the limit; drifts at moderate nu")):
        pts = [(nu, b.value) for nu, b in sweep[name]]
        fit = fit_power_law(pts)
        print(f"{name:6s} exponent {fit.exponent:+.3f} "
              f"(expect {expect}, r^2 = {fit.r_squared:.4f})")
        nus = np.array([p[0] for p in pts])
        vals = np.array([p[1] for p in pts])
        line, = ax.loglog(nus, vals, "o", ms=5, label=f"{label}")
        ax.loglog(nus, fit.prefactor * nus ** fit.exponent, "--", lw=1,
                  color=line.get_color())
    ax.set_xlabel(r"$\nu$")
    ax.set_ylabel("time average over the sawtooth stage")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(OUT / "viscosity_sweep.png", dpi=150)
    print(f"wrote {OUT / 'viscosity_sweep.png'}")


if __name__ == "__main__":
    main()
