"""Command-line front end.

Run-producing commands (simulate, sweep, couple, stationary) read a JSON
config, apply --key=value overrides (dotted paths into the config, values
parsed as JSON with a plain-string fallback), and write a run directory
with an index.json manifest. Post-processing commands (structure,
spectrum, occupation) read such a directory back. Runs whose forcing is
stochastic refuse to start without an explicit --seed.

Example:

    burgulence simulate --config white.json --seed 7 --out runs/w7 \\
        --trajectory.nu=1e-3 --ensemble=8
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from collections.abc import Mapping, Sequence
from pathlib import Path

import numpy as np

from .diagnostics import RangePartition, occupation_fraction, scan_envelope_constant
from .experiments import (
    EmpiricalMeasure,
    EnsembleArchive,
    ExperimentConfig,
    coupling_decay,
    quasi_stationary_check,
    run_ensemble,
    norm_bracket_sweep,
    stationary_average,
    validation_table,
)
from .field import Field, Grid, load_snapshot
from .flux import flux_from_name
from .forcing import (
    DOMAIN_INITIAL,
    ForcingSpec,
    NoiseStream,
    SpectralAmplitudes,
    random_smooth_field,
)
from .scaling import (
    fit_power_law,
    flatness_scan,
    spectrum_scan,
    structure_exponent_scan,
)
from .solver import TimeStepping, TrajectoryConfig

__all__ = ["main"]


# ------------------------------------------------------- config plumbing


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _apply_override(cfg: dict, dotted: str, value) -> None:
    parts = dotted.split(".")
    node = cfg
    for part in parts[:-1]:
        nxt = node.get(part)
        if not isinstance(nxt, dict):
            nxt = {}
            node[part] = nxt
        node = nxt
    node[parts[-1]] = value


def _resolve_config(args: argparse.Namespace, extras: list[str]) -> dict:
    cfg: dict = {}
    if getattr(args, "config", None) is not None:
        cfg = json.loads(Path(args.config).read_text())
        if not isinstance(cfg, dict):
            raise ValueError(f"{args.config}: config must be a JSON object")
    for raw in extras:
        if not raw.startswith("--") or "=" not in raw:
            raise ValueError(f"unrecognized argument {raw!r} "
                             "(overrides look like --key.path=value)")
        key, _, text = raw[2:].partition("=")
        _apply_override(cfg, key, _parse_value(text))
    return cfg


def _forcing_from_dict(d: Mapping) -> ForcingSpec:
    kind = d.get("kind", "none")
    if kind == "none":
        return ForcingSpec.none()
    if "a" in d or "b" in d:
        amps = SpectralAmplitudes(a=tuple(d["a"]), b=tuple(d["b"]))
    else:
        amps = SpectralAmplitudes.exponential(
            k_max=int(d.get("k_max", 16)), rate=float(d.get("rate", 0.7)),
            scale=float(d.get("scale", 1.0)))
    if kind == "kick":
        return ForcingSpec.kick(amps, d.get("law", "gaussian"))
    if kind == "white":
        return ForcingSpec.white(amps)
    raise ValueError(f"unknown forcing kind {kind!r}")


def _stepping_from_dict(d: Mapping) -> TimeStepping:
    return TimeStepping(
        mode=d.get("mode", "cfl"),
        cfl_safety=float(d.get("cfl_safety", 0.4)),
        dt=float(d["dt"]) if d.get("dt") is not None else None,
        dt_cap=float(d.get("dt_cap", 0.05)),
        dt_floor=float(d.get("dt_floor", 1e-9)),
    )


def _trajectory_from_dict(d: Mapping | None,
                          seed: int | None) -> TrajectoryConfig:
    if not d:
        raise ValueError("config needs a trajectory block with at least nu")
    if "nu" not in d:
        raise ValueError("trajectory config needs nu")
    if seed is None:
        seed = int(d.get("seed", 0))
    return TrajectoryConfig(
        nu=float(d["nu"]),
        flux=flux_from_name(d.get("flux", "classical")),
        forcing=_forcing_from_dict(d.get("forcing", {})),
        n=int(d["n"]) if d.get("n") is not None else None,
        stepping=_stepping_from_dict(d.get("stepping", {})),
        record_interval=float(d.get("record_interval", 0.25)),
        record_spectrum=bool(d.get("record_spectrum", True)),
        dtype=d.get("dtype", "float64"),
        seed=seed,
    )


def _experiment_from_dict(cfg: Mapping, traj: TrajectoryConfig) -> ExperimentConfig:
    return ExperimentConfig(
        trajectory=traj,
        ensemble=int(cfg.get("ensemble", 1)),
        t_end=float(cfg.get("t_end", 10.0)),
        burn_in=float(cfg.get("burn_in", 0.0)),
        snapshot_interval=float(cfg.get("snapshot_interval", 1.0)),
    )


def _require_seed(traj: TrajectoryConfig, seed: int | None) -> None:
    if traj.forcing.kind != "none" and seed is None:
        raise ValueError("stochastic runs need an explicit --seed")


def _initial_fields(d: Mapping | None, grid: Grid, count: int,
                    seed: int) -> list[Field] | None:
    """Build per-trajectory initial fields from an "initial" config block."""
    if d is None:
        return None
    kind = d.get("kind", "zero")
    if kind == "zero":
        return [Field.zeros(grid)] * count
    if kind == "sine":
        amp = float(d.get("amplitude", 1.0))
        k = int(d.get("k", 1))
        u = Field.from_function(grid, lambda x: amp * np.sin(2.0 * np.pi * k * x))
        return [u] * count
    if kind == "random":
        amp = float(d.get("amplitude", 1.0))
        k_max = int(d.get("k_max", 8))
        return [random_smooth_field(
                    grid,
                    NoiseStream(seed, trajectory=i, domain=DOMAIN_INITIAL),
                    amplitude=amp, k_max=k_max)
                for i in range(count)]
    if kind == "file":
        u, _ = load_snapshot(Path(d["path"]))
        if u.grid.n != grid.n:
            raise ValueError(f"initial field has n={u.grid.n}, run uses "
                             f"n={grid.n}")
        return [u] * count
    raise ValueError(f"unknown initial kind {kind!r}")


def _parse_norm_token(token: str):
    """"n1_2^2" -> extractors for |u|_{1,2}^2; "hs_0.5" -> ||u||_0.5.

    Returns (field observable, record extractor) pairs sharing the token's
    meaning, so measure- and bracket-side statistics stay comparable.
    """
    base, _, pow_text = token.partition("^")
    power = float(pow_text) if pow_text else 1.0
    if base.startswith("hs_"):
        s = float(base[3:])
        return (lambda u: u.hs_norm(s) ** power,
                lambda r: r.hs(s) ** power)
    if base.startswith("n") and "_" in base:
        m_text, p_text = base[1:].split("_", 1)
        m = int(m_text)
        p = math.inf if p_text == "inf" else float(p_text)
        return (lambda u: u.wmp_norm(m, p) ** power,
                lambda r: r.norm(m, p) ** power)
    raise ValueError(f"bad norm token {token!r}; use n<m>_<p> or hs_<s>, "
                     "optionally with ^<power>")


def _fit_dict(fit) -> dict:
    return {
        "exponent": fit.exponent,
        "prefactor": fit.prefactor,
        "r_squared": fit.r_squared,
        "points": [list(p) for p in fit.points],
    }


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_manifest(out: Path, kind: str, files: dict, config: dict) -> None:
    _write_json(out / "index.json",
                {"kind": kind, "files": files, "config": config})


def _amend_manifest(out: Path, updates: dict) -> None:
    index = json.loads((out / "index.json").read_text())
    for key, value in updates.items():
        if key == "files":
            index.setdefault("files", {}).update(value)
        else:
            index[key] = value
    _write_json(out / "index.json", index)


def _save_measure(out: Path, measure: EmpiricalMeasure) -> None:
    if not measure.fields:
        return
    (out / "snapshots").mkdir(exist_ok=True)
    rels = []
    for i, (t, u) in enumerate(zip(measure.times, measure.fields)):
        rel = f"snapshots/snap{i:05d}.snap"
        u.save(out / rel, time=t)
        rels.append(rel)
    _amend_manifest(out, {"files": {"snapshots": rels},
                          "snapshot_times": list(measure.times)})


def _load_run_fields(run: Path) -> tuple[list[Field], list[float], dict]:
    """Snapshot pool of a run directory, falling back to final states."""
    index = json.loads((run / "index.json").read_text())
    files = index.get("files", {})
    rels = files.get("snapshots") or files.get("states") or []
    if not rels:
        raise ValueError(f"{run}: no stored fields to post-process")
    fields, times = [], []
    for rel in rels:
        u, t = load_snapshot(run / rel)
        fields.append(u)
        times.append(t)
    return fields, times, index


def _default_scale_interval(cfg: Mapping, nu: float) -> tuple[float, float]:
    if cfg.get("interval") is not None:
        lo, hi = cfg["interval"]
        return float(lo), float(hi)
    return RangePartition.calibrated(nu).j2


# ------------------------------------------------------------- commands


def _cmd_simulate(args: argparse.Namespace, extras: list[str]) -> int:
    cfg = _resolve_config(args, extras)
    traj = _trajectory_from_dict(cfg.get("trajectory"), args.seed)
    _require_seed(traj, args.seed)
    exp = _experiment_from_dict(cfg, traj)
    grid = traj.make_grid()
    initial = _initial_fields(cfg.get("initial"), grid, exp.ensemble, traj.seed)
    measure = None
    if cfg.get("save_snapshots"):
        measure = EmpiricalMeasure(interval=exp.snapshot_interval,
                                   start=exp.burn_in)
    archive = run_ensemble(exp, initial=initial, measure=measure)
    out = archive.save(args.out)
    _amend_manifest(out, {"command": "simulate"})
    if measure is not None:
        _save_measure(out, measure)
    print(f"{out}: {len(archive.records)} records, ensemble {exp.ensemble}, "
          f"t_end {exp.t_end:g}, n {grid.n}")
    if archive.failures:
        print(f"warning: {len(archive.failures)} of {exp.ensemble} "
              "trajectories failed")
    return 0


def _cmd_oracle_validate(args: argparse.Namespace, extras: list[str]) -> int:
    cfg = _resolve_config(args, extras)
    nu = float(cfg.get("nu", 1e-2))
    n = int(cfg.get("n", 1024))
    times = [float(t) for t in cfg.get("times", (0.1, 0.5, 1.0))]
    rows = validation_table(nu, n=n, times=times)
    for row in rows:
        print(f"t={row['t']:g}  L2_err={row['l2_error']:.3e}  "
              f"Linf_err={row['linf_error']:.3e}")
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "validation.csv", "w") as fh:
            fh.write("t,L2_err,Linf_err\n")
            for row in rows:
                fh.write(f"{row['t']!r},{row['l2_error']!r},"
                         f"{row['linf_error']!r}\n")
        _write_manifest(out, "oracle-validate",
                        {"table": "validation.csv"},
                        {"nu": nu, "n": n, "times": times})
    return 0


def _cmd_sweep(args: argparse.Namespace, extras: list[str]) -> int:
    cfg = _resolve_config(args, extras)
    if not cfg.get("nus"):
        raise ValueError("sweep config needs a nonempty nus list")
    nus = [float(v) for v in cfg["nus"]]
    tokens = list(cfg.get("norms", ("n1_2^2", "n1_inf")))
    extractors = {tok: _parse_norm_token(tok)[1] for tok in tokens}

    base = dict(cfg.get("trajectory") or {})
    if "nu" not in base:
        base["nu"] = nus[0]
    traj0 = _trajectory_from_dict(base, args.seed)
    _require_seed(traj0, args.seed)

    def experiment_for(nu: float) -> ExperimentConfig:
        d = dict(base)
        d["nu"] = nu
        return _experiment_from_dict(cfg, _trajectory_from_dict(d, args.seed))

    initial = None
    if cfg.get("initial") is not None:
        if base.get("n") is None:
            # per-nu resolution would change the grid under the fields
            raise ValueError("sweep with explicit initial fields needs a fixed n")
        initial = _initial_fields(cfg["initial"], traj0.make_grid(),
                                  int(cfg.get("ensemble", 1)), traj0.seed)

    results = norm_bracket_sweep(nus, experiment_for, extractors,
                                 initial=initial)

    fits = {}
    for token, pts in results.items():
        try:
            fits[token] = _fit_dict(fit_power_law(
                [(nu, b.value) for nu, b in pts]))
        except ValueError as exc:
            fits[token] = {"error": str(exc)}

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w") as fh:
        header = ["nu"]
        for tok in tokens:
            header += [tok, f"{tok}_stderr"]
        fh.write(",".join(header) + "\n")
        for i, nu in enumerate(nus):
            cells = [repr(nu)]
            for tok in tokens:
                b = results[tok][i][1]
                cells += [repr(b.value), repr(b.stderr)]
            fh.write(",".join(cells) + "\n")
    _write_json(out / "fits.json", {"nus": nus, "fits": fits})
    _write_manifest(out, "sweep",
                    {"table": "sweep.csv", "fits": "fits.json"}, cfg)
    for token in tokens:
        fit = fits[token]
        if "exponent" in fit:
            print(f"{token}: nu^{fit['exponent']:+.3f} "
                  f"(r2 {fit['r_squared']:.4f})")
        else:
            print(f"{token}: fit failed ({fit['error']})")
    return 0


def _cmd_structure(args: argparse.Namespace, extras: list[str]) -> int:
    cfg = _resolve_config(args, extras)
    fields, _, index = _load_run_fields(Path(args.run))
    nu = float(index["trajectory"]["nu"])
    interval = _default_scale_interval(cfg, nu)
    trim = float(cfg.get("trim", 0.2))
    p_values = [float(p) for p in cfg.get("p", (1.0, 2.0, 3.0, 4.0))]

    fits = structure_exponent_scan(fields, p_values, interval, trim=trim)
    flat = flatness_scan(fields, interval, trim=trim)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ells = [x for x, _ in fits[p_values[0]].points]
    with open(out / "structure.csv", "w") as fh:
        fh.write("ell," + ",".join(f"S_{p:g}" for p in p_values)
                 + ",flatness\n")
        flat_by_ell = dict(flat.points)
        for j, ell in enumerate(ells):
            cells = [repr(ell)]
            cells += [repr(fits[p].points[j][1]) for p in p_values]
            cells.append(repr(flat_by_ell.get(ell, float("nan"))))
            fh.write(",".join(cells) + "\n")
    _write_json(out / "fits.json", {
        "interval": list(interval),
        "trim": trim,
        "structure": {f"{p:g}": _fit_dict(fits[p]) for p in p_values},
        "flatness": _fit_dict(flat),
    })
    _write_manifest(out, "structure",
                    {"table": "structure.csv", "fits": "fits.json"}, cfg)
    for p in p_values:
        print(f"S_{p:g}: ell^{fits[p].exponent:+.3f} "
              f"(r2 {fits[p].r_squared:.4f})")
    print(f"flatness: ell^{flat.exponent:+.3f} (r2 {flat.r_squared:.4f})")
    return 0


def _cmd_spectrum(args: argparse.Namespace, extras: list[str]) -> int:
    cfg = _resolve_config(args, extras)
    fields, _, index = _load_run_fields(Path(args.run))
    nu = float(index["trajectory"]["nu"])
    interval = _default_scale_interval(cfg, nu)
    fit = spectrum_scan(fields, interval,
                        layer_ratio=float(cfg.get("layer_ratio", 2.0)),
                        trim=float(cfg.get("trim", 0.2)))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "spectrum.csv", "w") as fh:
        fh.write("k,E\n")
        for k, e in fit.points:
            fh.write(f"{k!r},{e!r}\n")
    _write_json(out / "fits.json", {"interval": list(interval),
                                    "spectrum": _fit_dict(fit)})
    _write_manifest(out, "spectrum",
                    {"table": "spectrum.csv", "fits": "fits.json"}, cfg)
    print(f"E(k): k^{fit.exponent:+.3f} (r2 {fit.r_squared:.4f}, "
          f"{len(fit.points)} layers)")
    return 0


def _cmd_occupation(args: argparse.Namespace, extras: list[str]) -> int:
    cfg = _resolve_config(args, extras)
    archive = EnsembleArchive.load(Path(args.run))
    nu = archive.trajectory_config.nu
    variant = cfg.get("variant", "O")
    window = cfg.get("window")
    t0, t1 = (float(window[0]), float(window[1])) if window \
        else archive.window
    records = [r for r in archive.records if t0 - 1e-9 <= r.t <= t1 + 1e-9]
    if not records:
        raise ValueError(f"no records inside window [{t0}, {t1}]")

    if cfg.get("k") is not None:
        ks = [int(cfg["k"])]
        smallest = None
    else:
        ks = [2, 4, 8, 16, 32, 64]
        smallest = scan_envelope_constant(
            records, nu, threshold=float(cfg.get("threshold", 0.05)),
            variant=variant)
    fractions = {k: occupation_fraction(records, k, nu, variant=variant)
                 for k in ks}

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "occupation.json", {
        "nu": nu,
        "variant": variant,
        "window": [t0, t1],
        "record_count": len(records),
        "fractions": {str(k): f for k, f in fractions.items()},
        "smallest_k": smallest,
    })
    _write_manifest(out, "occupation", {"report": "occupation.json"}, cfg)
    for k, frac in fractions.items():
        print(f"K={k}: occupation {frac:.3f}")
    if smallest is not None:
        print(f"smallest K with occupation >= "
              f"{float(cfg.get('threshold', 0.05)):g}: {smallest}")
    return 0


def _cmd_couple(args: argparse.Namespace, extras: list[str]) -> int:
    cfg = _resolve_config(args, extras)
    traj = _trajectory_from_dict(cfg.get("trajectory"), args.seed)
    _require_seed(traj, args.seed)
    pair_count = int(cfg.get("pairs", 4))
    t_end = float(cfg.get("t_end", 50.0))
    init = cfg.get("initial", {"kind": "random"})
    grid = traj.make_grid()

    pairs = []
    if init.get("kind", "random") == "random":
        amp = float(init.get("amplitude", 1.0))
        k_max = int(init.get("k_max", 8))
        for i in range(pair_count):
            ua = random_smooth_field(
                grid, NoiseStream(traj.seed, trajectory=2 * i,
                                  domain=DOMAIN_INITIAL),
                amplitude=amp, k_max=k_max)
            ub = random_smooth_field(
                grid, NoiseStream(traj.seed, trajectory=2 * i + 1,
                                  domain=DOMAIN_INITIAL),
                amplitude=amp, k_max=k_max)
            pairs.append((ua, ub))
    else:
        fields = _initial_fields(init, grid, pair_count, traj.seed)
        pairs = [(u, u) for u in fields]  # degenerate but legal: distance 0

    series = coupling_decay(traj, pairs, t_end)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "coupling.csv", "w") as fh:
        fh.write("t," + ",".join(f"d{i}" for i in range(pair_count)) + "\n")
        for j, t in enumerate(series.times):
            cells = [repr(float(t))]
            cells += [repr(float(series.distances[i, j]))
                      for i in range(pair_count)]
            fh.write(",".join(cells) + "\n")
    _write_json(out / "summary.json", {
        "pairs": pair_count,
        "t_end": t_end,
        "initial": [float(v) for v in series.initial],
        "final": [float(v) for v in series.final],
        "decay_ratios": [float(v) for v in series.decay_ratios],
        "max_uptick": series.max_uptick,
    })
    _write_manifest(out, "couple",
                    {"table": "coupling.csv", "summary": "summary.json"}, cfg)
    ratios = series.decay_ratios
    print(f"{pair_count} pairs to t={t_end:g}: mean decay ratio "
          f"{float(np.mean(ratios)):.3g}, max uptick {series.max_uptick:.3g}")
    return 0


def _cmd_stationary(args: argparse.Namespace, extras: list[str]) -> int:
    cfg = _resolve_config(args, extras)
    traj = _trajectory_from_dict(cfg.get("trajectory"), args.seed)
    _require_seed(traj, args.seed)
    exp = _experiment_from_dict(cfg, traj)
    grid = traj.make_grid()
    initial = _initial_fields(cfg.get("initial"), grid, exp.ensemble,
                              traj.seed)
    tokens = list(cfg.get("observables", ("n0_2^2", "n1_2^2")))

    measure = EmpiricalMeasure(interval=exp.snapshot_interval,
                               start=exp.burn_in)
    archive = run_ensemble(exp, initial=initial, measure=measure)
    balance = quasi_stationary_check(archive)

    observables = {}
    for token in tokens:
        field_fn, record_fn = _parse_norm_token(token)
        stat = stationary_average(measure, field_fn)
        bracket = archive.bracket(record_fn)
        spread = 2.0 * max(stat.stderr, bracket.stderr)
        observables[token] = {
            "measure_mean": stat.value,
            "measure_stderr": stat.stderr,
            "samples": stat.ensemble_size,
            "bracket_mean": bracket.value,
            "bracket_stderr": bracket.stderr,
            "consistent": bool(abs(stat.value - bracket.value) <= spread
                               or spread == 0.0),
        }

    out = archive.save(args.out)
    _amend_manifest(out, {"command": "stationary"})
    _save_measure(out, measure)
    _write_json(out / "stationary.json", {
        "balance": {
            "window": list(balance.window),
            "mean_h1_sq": balance.mean_h1_sq,
            "dissipation_rate": balance.dissipation_rate,
            "trace_rate": balance.trace_rate,
            "ledger_dissipation_rate": balance.ledger_dissipation_rate,
            "ledger_injection_rate": balance.ledger_injection_rate,
            "ratio": balance.ratio,
            "balanced": balance.balanced,
        },
        "observables": observables,
    })
    _amend_manifest(out, {"files": {"stationary": "stationary.json"}})
    if balance.ratio is not None:
        print(f"dissipation/injection ratio {balance.ratio:.3f} "
              f"({'balanced' if balance.balanced else 'NOT balanced'})")
    else:
        print(f"unforced run: dissipation rate "
              f"{balance.dissipation_rate:.3g}")
    for token, row in observables.items():
        print(f"{token}: measure {row['measure_mean']:.4g} "
              f"(+-{row['measure_stderr']:.2g}), bracket "
              f"{row['bracket_mean']:.4g}, "
              f"{'consistent' if row['consistent'] else 'INCONSISTENT'}")
    return 0


# ------------------------------------------------------------- wiring


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="burgulence", allow_abbrev=False,
        description="Simulate the periodic viscous conservation law and "
                    "post-process its scaling diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, *, help: str, config: bool = True,
            seed: bool = False, out: str = "required",
            run: bool = False) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help, allow_abbrev=False)
        if config:
            p.add_argument("--config", type=Path,
                           help="JSON config file; --key.path=value "
                                "overrides any field")
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help="master seed (required for stochastic runs)")
        else:
            p.set_defaults(seed=None)
        if run:
            p.add_argument("--run", type=Path, required=True,
                           help="run directory written by simulate or "
                                "stationary")
        if out != "none":
            p.add_argument("--out", type=Path,
                           required=(out == "required"),
                           help="output directory")
        p.set_defaults(func=func)
        return p

    add("simulate", _cmd_simulate, seed=True,
        help="run one ensemble and write its archive")
    add("oracle-validate", _cmd_oracle_validate, out="optional",
        help="compare the solver against the closed-form solution")
    add("sweep", _cmd_sweep, seed=True,
        help="bracket norms across a viscosity sweep and fit exponents")
    add("structure", _cmd_structure, run=True,
        help="structure functions and flatness from stored snapshots")
    add("spectrum", _cmd_spectrum, run=True,
        help="energy spectrum fit from stored snapshots")
    add("occupation", _cmd_occupation, run=True,
        help="cliff-envelope occupation fractions from stored records")
    add("couple", _cmd_couple, seed=True,
        help="same-noise pairs: L1 contraction toward the stationary state")
    add("stationary", _cmd_stationary, seed=True,
        help="stationary averages, balance check, and snapshot pool")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args, extras = parser.parse_known_args(argv)
    try:
        return args.func(args, extras)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
