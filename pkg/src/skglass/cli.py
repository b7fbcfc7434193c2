"""Command line driver: every experiment as a subcommand, plus the report tables.

Subcommands: constants, verify, free-energy, ground-state, rem, figure,
extrapolate. Values with a rigorous finite-n statement are printed with an
"asserted" label; values the limiting theory only conjectures (the claimed
limit 2.171812 at beta_star, the simulation density -0.7633) are always
labeled "reported" and never turned into a failure.

Configuration comes from flags, optionally seeded from a JSON config file
(flags win). The only environment variable consulted is SKGLASS_OUT for the
default output directory. Exit codes: 0 success, 1 failed check, 2 bad
configuration, 3 capacity exceeded, 4 integrity violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .checks import CHECKS, require_all, run_checks
from .constants import CONSTANTS, resolve_beta
from .ensemble import (
    RunManifest,
    canonical_json,
    make_units,
    run_ensemble,
    stable_hash64,
    write_records_csv,
)
from .errors import (
    CapacityError,
    CheckError,
    ConfigError,
    IntegrityError,
    SKGlassError,
)
from .groundstate import (
    AnnealSchedule,
    SolverConfig,
    check_density_bound,
    density_ensemble,
    extrapolate_density,
)
from .model import load_disorder, sample_disorder
from .rem import compare_sk_rem, rem_thermo, sample_rem
from .thermo import (
    ENUMERATION_CAP,
    BetaGrid,
    annealed_free_energy,
    emit_figure_data,
    enumerate_thermo,
)

VERSION = "0.1.0"
OUT_DIR_ENV = "SKGLASS_OUT"

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_INTEGRITY = 4

_EXIT_BY_ERROR = (
    (ConfigError, EXIT_CONFIG),
    (CapacityError, EXIT_CAPACITY),
    (IntegrityError, EXIT_INTEGRITY),
    (CheckError, EXIT_CHECK),
)

_REM_DEFAULT_BETAS = ("0.5", "1.0", "1.5", "beta_c", "2.5", "3.0")


@dataclass(frozen=True)
class RunConfig:
    """Complete, file-round-trippable configuration of one invocation.

    Beta values are kept as the tokens the user typed (numbers or the names
    beta_one, beta_star, beta_c) and resolved to full-precision floats only
    at the point of use, so saving and reloading a config never truncates a
    named constant.
    """

    subcommand: str
    n: tuple[int, ...] = ()
    beta: tuple[str, ...] = ()
    samples: int = 16
    seed: int = 0
    out: str = ""
    experiment_id: str = ""
    workers: int = 1
    on_error: str = "abort"
    reproducible: bool = True
    cap: int = ENUMERATION_CAP
    method: str = "exact"
    beta_start: float = 0.5
    beta_end: float = 5.0
    restarts: int = 32
    ladder_start: float = 0.3
    ladder_end: float = 3.0
    rungs: int = 16
    sweeps: int = 2000
    repeats: int = 1
    omega: float = 2.0 / 3.0
    n_exact: tuple[int, ...] = (12, 16, 20, 24, 28)
    n_heuristic: tuple[int, ...] = (40, 64, 100)
    beta_min: float = 0.0
    beta_max: float = 3.5
    points: int = 71
    checks: tuple[str, ...] = ()
    disorder_file: str = ""
    compare: bool = True
    output: str = ""

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for key, value in out.items():
            if isinstance(value, tuple):
                out[key] = list(value)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name: f for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        if "subcommand" not in data:
            raise ConfigError("config must name a subcommand")
        coerced = {}
        for key, value in data.items():
            if isinstance(value, list):
                if key == "n" or key.startswith("n_"):
                    value = tuple(int(v) for v in value)
                else:
                    value = tuple(str(v) for v in value)
            coerced[key] = value
        return cls(**coerced)

    def save(self, path: Path) -> None:
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: Path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    def resolved_betas(self, default: tuple[str, ...] = ()) -> list[float]:
        tokens = self.beta or default
        if not tokens:
            raise ConfigError("no beta values given; pass --beta")
        values = sorted(resolve_beta(t) for t in tokens)
        for a, b in zip(values, values[1:]):
            if a == b:
                raise ConfigError(f"duplicate beta value {a}")
        return values

    def out_dir(self) -> Path:
        return Path(self.out or os.environ.get(OUT_DIR_ENV, "runs"))


def _experiment_id(cfg: RunConfig, payload: dict) -> str:
    if cfg.experiment_id:
        return cfg.experiment_id
    tag = stable_hash64(canonical_json(payload)) % 16**8
    return f"{cfg.subcommand}-{tag:08x}"


def _is_close(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-12 * max(1.0, abs(b))


def _print_stats_line(label: str, mean: float, stderr: float, suffix: str = "") -> None:
    print(f"  {label:<28} {mean:+.7f} +- {stderr:.7f}{suffix}")


def cmd_constants(cfg: RunConfig) -> int:
    """Print the reference constants to 7 significant digits plus their identities."""
    CONSTANTS.validate()
    print("reference constants (computed at full precision, shown to 7 digits)")
    for name, value, desc in CONSTANTS.rows():
        print(f"  {name:<20} {value:+.7g}   {desc}")
    print("exact identities (absolute gaps):")
    for identity, gap in CONSTANTS.identity_gaps().items():
        print(f"  {identity:<50} gap {gap:.2e}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    """Run the named checks (all by default); exit 0 only if every one passes."""
    if cfg.disorder_file:
        disorder = load_disorder(cfg.disorder_file)
        print(
            f"PASS disorder-file: {cfg.disorder_file} verified "
            f"(n={disorder.n}, seed={disorder.seed})"
        )
    results = run_checks(list(cfg.checks) or None, seed=cfg.seed)
    for result in results:
        print(result.line())
    require_all(results)
    return EXIT_OK


def cmd_free_energy(cfg: RunConfig) -> int:
    """Quenched free energy, mean energy, and entropy over a (n, beta) grid.

    Runs through the checkpointed harness; emits the harness records and
    summary plus a free_energy.csv with the fixed column set
    (n, beta, sample_index, log_z, mean_energy, entropy).
    """
    if not cfg.n:
        raise ConfigError("pass --n with at least one size")
    if cfg.samples < 2:
        raise ConfigError(f"need at least 2 samples, got {cfg.samples}")
    betas = cfg.resolved_betas(default=("1.0", "beta_star"))
    params = [{"n": n, "beta": b} for n in cfg.n for b in betas]
    experiment_id = _experiment_id(
        cfg, {"op": "free-energy", "params": params, "samples": cfg.samples, "seed": cfg.seed}
    )
    units = make_units(params, cfg.samples, cfg.seed, experiment_id)
    manifest = RunManifest(
        experiment_id=experiment_id,
        master_seed=cfg.seed,
        grid=tuple(units),
        out_dir=cfg.out_dir(),
        version=VERSION,
    )

    def evaluate(unit: dict) -> dict:
        disorder = sample_disorder(unit["n"], unit["seed"], unit["sample_index"])
        res = enumerate_thermo(disorder, BetaGrid.of(unit["beta"]), cap=cfg.cap)[0]
        return {
            "log_z": res.log_z,
            "mean_energy": res.mean_energy,
            "entropy": res.entropy,
            "free_energy_per_site": res.free_energy_per_site,
            "entropy_per_site": res.entropy_per_site,
        }

    stats, rows = run_ensemble(
        manifest,
        evaluate,
        workers=cfg.workers,
        on_error=cfg.on_error,
        reproducible=cfg.reproducible,
    )
    csv_rows = [
        {key: row[key] for key in ("n", "beta", "sample_index", "log_z", "mean_energy", "entropy")}
        for row in rows
    ]
    write_records_csv(manifest.root / "free_energy.csv", csv_rows)

    print(f"experiment {experiment_id} -> {manifest.root}")
    for n in cfg.n:
        for beta in betas:
            fstat = stats.get(("free_energy_per_site", n, beta))
            sstat = stats.get(("entropy_per_site", n, beta))
            if fstat is None or fstat.count == 0:
                print(f"n={n} beta={beta:.6f}: no completed samples")
                continue
            annealed = annealed_free_energy(n, beta)
            jensen = "quenched <= annealed, as asserted" if (
                fstat.mean <= annealed + 3.0 * fstat.stderr
            ) else "EXCEEDS the annealed bound"
            print(f"n={n} beta={beta:.6f} ({fstat.count} samples)")
            _print_stats_line("quenched f_n", fstat.mean, fstat.stderr,
                              f"   annealed {annealed:+.7f} [asserted bound]; {jensen}")
            _print_stats_line("entropy s_n", sstat.mean, sstat.stderr)
            if _is_close(beta, CONSTANTS.beta_one):
                print(
                    f"  distance to limit {CONSTANTS.f_one_limit:.7g} (log 2 + 1/4): "
                    f"{fstat.mean - CONSTANTS.f_one_limit:+.7f} [reported only]"
                )
            if _is_close(beta, CONSTANTS.beta_star):
                print(
                    f"  distance to claimed limit {CONSTANTS.f_star_claimed:.7g} at beta_star: "
                    f"{fstat.mean - CONSTANTS.f_star_claimed:+.7f} [reported only, never asserted]"
                )
                print(
                    f"  s_n(beta_star) {sstat.mean:+.7f} +- {sstat.stderr:.7f} "
                    "[reported only; the conjectured limit is 0]"
                )
    return EXIT_OK


def _solver_from_config(cfg: RunConfig) -> SolverConfig:
    return SolverConfig(
        method=cfg.method,
        schedule=AnnealSchedule(
            beta_start=cfg.beta_start,
            beta_end=cfg.beta_end,
            sweeps=cfg.sweeps,
            restarts=cfg.restarts,
        ),
        ladder_start=cfg.ladder_start,
        ladder_end=cfg.ladder_end,
        rungs=cfg.rungs,
        sweeps=cfg.sweeps,
        repeats=cfg.repeats,
        cap=cfg.cap,
    )


def cmd_ground_state(cfg: RunConfig) -> int:
    """Ground-state energies and densities for each size, via the chosen solver."""
    if not cfg.n:
        raise ConfigError("pass --n with at least one size")
    if cfg.samples < 1:
        raise ConfigError(f"need at least 1 sample, got {cfg.samples}")
    solver = _solver_from_config(cfg)
    params = [{"n": n, "method": cfg.method} for n in cfg.n]
    experiment_id = _experiment_id(
        cfg,
        {
            "op": "ground-state",
            "params": params,
            "samples": cfg.samples,
            "seed": cfg.seed,
            "solver": dataclasses.asdict(solver),
        },
    )
    units = make_units(params, cfg.samples, cfg.seed, experiment_id)
    manifest = RunManifest(
        experiment_id=experiment_id,
        master_seed=cfg.seed,
        grid=tuple(units),
        out_dir=cfg.out_dir(),
        version=VERSION,
    )

    def evaluate(unit: dict) -> dict:
        disorder = sample_disorder(unit["n"], unit["seed"], unit["sample_index"])
        solver_seed = stable_hash64("ground-state", unit["seed"], unit["n"], unit["sample_index"])
        result = solver.solve(disorder, seed=solver_seed)
        return {
            "energy": result.energy,
            "density": result.density,
            "flips_used": result.steps,
        }

    stats, rows = run_ensemble(
        manifest,
        evaluate,
        workers=cfg.workers,
        on_error=cfg.on_error,
        reproducible=cfg.reproducible,
    )
    csv_rows = [
        {key: row[key] for key in ("n", "sample_index", "method", "energy", "density", "flips_used")}
        for row in rows
    ]
    write_records_csv(manifest.root / "ground_state.csv", csv_rows)

    print(f"experiment {experiment_id} -> {manifest.root}")
    certainty = "exact enumeration, certified" if cfg.method == "exact" else f"{cfg.method} heuristic"
    for n in cfg.n:
        dstat = stats.get(("density", n, None))
        if dstat is None or dstat.count == 0:
            print(f"n={n}: no completed samples")
            continue
        print(f"n={n} ({dstat.count} samples, {certainty})")
        _print_stats_line("density E_min/n", dstat.mean, dstat.stderr,
                          f"   range [{dstat.min:+.6f}, {dstat.max:+.6f}]")
    print(
        f"  reference points: lower bound {CONSTANTS.epsilon_bound:+.7f} [asserted "
        f"for the n->inf limit], simulation value {CONSTANTS.simulation_density:+.4f} [reported only]"
    )
    return EXIT_OK


def cmd_rem(cfg: RunConfig) -> int:
    """REM thermodynamics on a beta grid, plus the SK comparison at beta_c."""
    if cfg.samples < 2:
        raise ConfigError(f"need at least 2 samples, got {cfg.samples}")
    ns = cfg.n or (12,)
    betas = cfg.resolved_betas(default=_REM_DEFAULT_BETAS)
    grid = BetaGrid.of(*betas)
    experiment_id = _experiment_id(
        cfg, {"op": "rem", "n": list(ns), "betas": betas, "samples": cfg.samples, "seed": cfg.seed}
    )
    root = cfg.out_dir() / experiment_id
    root.mkdir(parents=True, exist_ok=True)

    rows = []
    entropy_values: dict[tuple[int, float], list[float]] = {}
    for n in ns:
        for idx in range(cfg.samples):
            instance = sample_rem(n, cfg.seed, idx)
            for res in rem_thermo(instance, grid):
                rows.append(
                    {
                        "model": "rem",
                        "n": n,
                        "beta": res.beta,
                        "sample_index": idx,
                        "log_z": res.log_z,
                        "mean_energy": res.mean_energy,
                        "entropy": res.entropy,
                    }
                )
                entropy_values.setdefault((n, res.beta), []).append(res.entropy_per_site)
    write_records_csv(root / "rem.csv", rows)

    print(f"experiment {experiment_id} -> {root}")
    summary = {"experiment_id": experiment_id, "seed": cfg.seed, "stats": []}
    for n in ns:
        print(f"n={n} ({cfg.samples} samples), entropy per site vs log 2 - beta^2/4:")
        for beta in betas:
            vals = np.asarray(entropy_values[(n, beta)])
            mean = float(vals.mean())
            stderr = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
            limit = max(0.0, float(np.log(2.0) - beta * beta / 4.0))
            print(
                f"  beta={beta:.6f} s_n {mean:+.6f} +- {stderr:.6f}   "
                f"limit prediction {limit:+.6f} [reported only]"
            )
            summary["stats"].append(
                {"observable": "entropy_per_site", "n": n, "beta": beta,
                 "mean": mean, "stderr": stderr, "count": len(vals)}
            )

    comparisons = []
    if cfg.compare:
        for n in ns:
            report = compare_sk_rem(n, cfg.samples, cfg.seed)
            label = "asserted (3 sigma)" if report.enforced else "reported only (n too small to enforce)"
            print(f"SK vs REM entropy per site, n={n}: [{label} at beta_c]")
            for row in report.rows:
                print(
                    f"  beta={row.beta:.6f}  SK {row.sk.mean:+.6f} +- {row.sk.stderr:.6f}   "
                    f"REM {row.rem.mean:+.6f} +- {row.rem.stderr:.6f}"
                )
            print(
                f"  separation at beta_c {report.separation:+.6f} "
                f"({report.separation_sigma:.1f} sigma); "
                f"beta_star - beta_c^2 gap {report.beta_consistency_gap:.1e}"
            )
            print(
                f"  SK at beta_star={report.beta_star:.6f}: "
                f"f_n {report.sk_star_free_energy.mean:+.6f} +- {report.sk_star_free_energy.stderr:.6f}, "
                f"s_n {report.sk_star_entropy.mean:+.6f} +- {report.sk_star_entropy.stderr:.6f} "
                "[reported only]"
            )
            comparisons.append(
                {
                    "n": n,
                    "separation": report.separation,
                    "separation_sigma": report.separation_sigma,
                    "enforced": report.enforced,
                    "passed": report.passed,
                }
            )
    summary["comparisons"] = comparisons
    (root / "rem_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_figure(cfg: RunConfig) -> int:
    """Tab-separated annealed curve and linear bound over a beta grid.

    Rows at beta = 1 and beta = beta_star are always present; the two columns
    cross exactly there.
    """
    if cfg.points < 2:
        raise ConfigError(f"need at least 2 grid points, got {cfg.points}")
    grid = BetaGrid.linspace(cfg.beta_min, cfg.beta_max, cfg.points, allow_zero=True)
    fig = emit_figure_data(grid)
    lines = [
        f"# markers: beta_one={fig.markers[0]!r} beta_star={fig.markers[1]!r}",
        "beta\tannealed_limit\tlinear_bound",
    ]
    for beta, annealed, line in fig.rows():
        lines.append(f"{beta!r}\t{annealed!r}\t{line!r}")
    text = "\n".join(lines) + "\n"

    if cfg.output:
        path = Path(cfg.output)
        path.parent.mkdir(parents=True, exist_ok=True)
    else:
        experiment_id = _experiment_id(
            cfg, {"op": "figure", "grid": [cfg.beta_min, cfg.beta_max, cfg.points]}
        )
        root = cfg.out_dir() / experiment_id
        root.mkdir(parents=True, exist_ok=True)
        path = root / "figure.tsv"
    path.write_text(text)

    print(f"figure data -> {path}")
    for marker in fig.markers:
        idx = int(np.argmin(np.abs(fig.betas - marker)))
        print(
            f"  at beta={fig.betas[idx]:.6f}: annealed {fig.annealed[idx]:.6f}, "
            f"line {fig.line[idx]:.6f} (equal by construction)"
        )
    return EXIT_OK


def cmd_extrapolate(cfg: RunConfig) -> int:
    """Full density pipeline: exact small sizes, tempering large ones, then the fit.

    Writes per-sample records and a fit JSON {omega, intercept, slope,
    residual, points[]}, prints the bound check (asserted) and the distance
    to the simulation value (reported).
    """
    if cfg.samples < 2:
        raise ConfigError(f"need at least 2 samples, got {cfg.samples}")
    experiment_id = _experiment_id(
        cfg,
        {
            "op": "extrapolate",
            "n_exact": list(cfg.n_exact),
            "n_heuristic": list(cfg.n_heuristic),
            "samples": cfg.samples,
            "seed": cfg.seed,
            "omega": cfg.omega,
        },
    )
    root = cfg.out_dir() / experiment_id
    root.mkdir(parents=True, exist_ok=True)

    points = []
    rows = []
    for n in cfg.n_exact:
        solver = SolverConfig(method="exact", cap=cfg.cap)
        stats, records = density_ensemble(n, cfg.samples, solver, cfg.seed, on_error=cfg.on_error)
        points.append(stats)
        rows.extend(records)
        print(f"n={n:<4d} exact   density {stats.mean:+.6f} +- {stats.stderr:.6f}")
    temper = _solver_from_config(dataclasses.replace(cfg, method="temper"))
    for n in cfg.n_heuristic:
        stats, records = density_ensemble(n, cfg.samples, temper, cfg.seed, on_error=cfg.on_error)
        points.append(stats)
        rows.extend(records)
        print(f"n={n:<4d} temper  density {stats.mean:+.6f} +- {stats.stderr:.6f}")
    write_records_csv(root / "ground_state.csv", rows)

    fit = extrapolate_density(points, omega=cfg.omega)
    report = check_density_bound(fit)
    payload = {
        "omega": fit.omega,
        "intercept": fit.epsilon0,
        "intercept_stderr": fit.epsilon0_stderr,
        "slope": fit.amplitude,
        "residual": fit.chi2,
        "dof": fit.dof,
        "points": [list(p) for p in fit.points],
        "bound": report.bound,
        "margin": report.margin,
        "passed": report.passed,
    }
    (root / "fit.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    print(f"fit e(n) = e0 + a n^(-{fit.omega:.4f}) over {len(fit.points)} sizes -> {root}")
    print(f"  intercept e0 = {fit.epsilon0:+.6f} +- {fit.epsilon0_stderr:.6f}, slope a = {fit.amplitude:+.6f}")
    print(f"  weighted residual chi2 = {fit.chi2:.3f} on {fit.dof} dof")
    status = "PASS" if report.passed else "FAIL"
    print(
        f"  {status} lower bound {report.bound:+.7f} [asserted]: margin {report.margin:+.6f} "
        f"({report.sigma_margin:+.1f} sigma)"
    )
    print(
        f"  distance to simulation value {report.simulation_reference:+.4f}: "
        f"{report.distance_to_simulation:+.6f} [reported only]"
    )
    if not report.passed:
        raise CheckError(
            f"extrapolated density {fit.epsilon0:+.6f} undercuts the lower bound "
            f"{report.bound:+.7f} beyond 3 sigma"
        )
    return EXIT_OK


_HANDLERS = {
    "constants": cmd_constants,
    "verify": cmd_verify,
    "free-energy": cmd_free_energy,
    "ground-state": cmd_ground_state,
    "rem": cmd_rem,
    "figure": cmd_figure,
    "extrapolate": cmd_extrapolate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skglass",
        description="Numerical laboratory for the mean-field spin glass: exact "
        "enumeration, ground-state search, REM comparison.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    def add_command(name: str, help_text: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_text, argument_default=argparse.SUPPRESS)
        sp.add_argument("--config", help="JSON config file; explicit flags override its values")
        sp.add_argument("--seed", type=int, help="master seed (default 0)")
        sp.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV} or ./runs)")
        sp.add_argument("--experiment-id", dest="experiment_id", help="output subdirectory name")
        sp.add_argument("--save-config", dest="save_config",
                        help="write the merged config to this path and continue")
        return sp

    add_command("constants", "print the reference constants and their identities")

    sp = add_command("verify", "run the internal consistency checks")
    sp.add_argument("--check", dest="checks", nargs="+", metavar="NAME",
                    help=f"subset of checks to run: {', '.join(CHECKS)}")
    sp.add_argument("--disorder-file", dest="disorder_file",
                    help="also verify a persisted disorder file byte for byte")

    sp = add_command("free-energy", "quenched free energy over a (n, beta) grid")
    sp.add_argument("--n", type=int, nargs="+", help="system sizes")
    sp.add_argument("--beta", nargs="+", help="betas: numbers or beta_one/beta_star/beta_c")
    sp.add_argument("--samples", type=int, help="disorder samples per grid point (default 16)")
    sp.add_argument("--workers", type=int, help="parallel evaluator threads (default 1)")
    sp.add_argument("--on-error", dest="on_error", choices=("abort", "skip"))
    sp.add_argument("--cap", type=int, help=f"enumeration cap override (default {ENUMERATION_CAP})")
    sp.add_argument("--no-reproducible", dest="reproducible", action="store_false",
                    help="aggregate in completion order instead of grid order")

    sp = add_command("ground-state", "ground-state energies per size")
    sp.add_argument("--n", type=int, nargs="+", help="system sizes")
    sp.add_argument("--samples", type=int, help="disorder samples per size (default 16)")
    sp.add_argument("--method", choices=("exact", "anneal", "temper"))
    sp.add_argument("--workers", type=int)
    sp.add_argument("--on-error", dest="on_error", choices=("abort", "skip"))
    sp.add_argument("--cap", type=int)
    sp.add_argument("--beta-start", dest="beta_start", type=float, help="anneal start (default 0.5)")
    sp.add_argument("--beta-end", dest="beta_end", type=float, help="anneal end (default 5.0)")
    sp.add_argument("--restarts", type=int, help="anneal restarts (default 32)")
    sp.add_argument("--ladder-start", dest="ladder_start", type=float, help="tempering ladder low end")
    sp.add_argument("--ladder-end", dest="ladder_end", type=float, help="tempering ladder high end")
    sp.add_argument("--rungs", type=int, help="tempering ladder size (default 16)")
    sp.add_argument("--sweeps", type=int, help="sweeps per restart/replica (default 2000)")
    sp.add_argument("--repeats", type=int, help="independent tempering repeats (default 1)")
    sp.add_argument("--no-reproducible", dest="reproducible", action="store_false")

    sp = add_command("rem", "random-energy-model thermodynamics and the SK comparison")
    sp.add_argument("--n", type=int, nargs="+", help="system sizes (default 12)")
    sp.add_argument("--beta", nargs="+", help="betas (default includes beta_c)")
    sp.add_argument("--samples", type=int, help="instances per size (default 16)")
    sp.add_argument("--no-compare", dest="compare", action="store_false",
                    help="skip the SK-vs-REM entropy comparison")

    sp = add_command("figure", "tabulate the annealed curve and the linear bound")
    sp.add_argument("--beta-min", dest="beta_min", type=float, help="grid start (default 0)")
    sp.add_argument("--beta-max", dest="beta_max", type=float, help="grid end (default 3.5)")
    sp.add_argument("--points", type=int, help="grid size (default 71)")
    sp.add_argument("--output", help="TSV path (default <out>/<experiment>/figure.tsv)")

    sp = add_command("extrapolate", "density pipeline across sizes plus the n->inf fit")
    sp.add_argument("--n-exact", dest="n_exact", type=int, nargs="+",
                    help="sizes solved exactly (default 12 16 20 24 28)")
    sp.add_argument("--n-heuristic", dest="n_heuristic", type=int, nargs="+",
                    help="sizes solved by tempering (default 40 64 100)")
    sp.add_argument("--samples", type=int, help="samples per size (default 16)")
    sp.add_argument("--omega", type=float, help="correction exponent (default 2/3)")
    sp.add_argument("--on-error", dest="on_error", choices=("abort", "skip"))
    sp.add_argument("--cap", type=int)
    sp.add_argument("--ladder-start", dest="ladder_start", type=float)
    sp.add_argument("--ladder-end", dest="ladder_end", type=float)
    sp.add_argument("--rungs", type=int)
    sp.add_argument("--sweeps", type=int)
    sp.add_argument("--repeats", type=int)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, optional config file, and explicit flags (flags win)."""
    provided = dict(vars(args))
    provided.pop("save_config", None)
    config_path = provided.pop("config", None)
    subcommand = provided.pop("subcommand")
    merged: dict = {"subcommand": subcommand}
    if config_path:
        file_cfg = RunConfig.load(Path(config_path)).to_dict()
        if file_cfg["subcommand"] != subcommand:
            raise ConfigError(
                f"config file is for {file_cfg['subcommand']!r}, not {subcommand!r}"
            )
        merged.update(file_cfg)
    merged.update(provided)
    return RunConfig.from_dict(merged)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        save_to = getattr(args, "save_config", None)
        if save_to:
            path = Path(save_to)
            path.parent.mkdir(parents=True, exist_ok=True)
            cfg.save(path)
            print(f"config -> {path}")
        return _HANDLERS[cfg.subcommand](cfg)
    except SKGlassError as exc:
        for err_type, code in _EXIT_BY_ERROR:
            if isinstance(exc, err_type):
                print(f"error: {exc}", file=sys.stderr)
                return code
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
