"""Ground-state search and the extrapolated energy density.

Three routes to the minimum of H: exact Gray-code enumeration (small n,
certifiably optimal), simulated annealing with restarts, and parallel
tempering. Every returned energy is re-evaluated from the configuration
before it leaves this module, so a solver bug cannot silently report an
energy its own spins do not reproduce.

The finite-size densities e(n) = E_min/n drift toward their limit roughly
like n^(-2/3); ``extrapolate_density`` fits that form by weighted least
squares and ``check_density_bound`` compares the intercept against the
rigorous lower bound carried in :mod:`skglass.constants`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .constants import CONSTANTS
from .ensemble import EnsembleStats, stable_hash64, stats_from_values
from .errors import CapacityError, ConfigError, IntegrityError, SKGlassError
from .kernels import anneal_kernel, gray_ground_state_kernel, tempering_kernel
from .model import Disorder, SpinConfig, bits_from_spins, hamiltonian, sample_disorder
from .thermo import ENUMERATION_CAP, BetaGrid

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric inverse-temperature ramp for one annealing restart."""

    beta_start: float = 0.5
    beta_end: float = 5.0
    sweeps: int = 2000
    restarts: int = 32

    def __post_init__(self):
        if not (0.0 < self.beta_start <= self.beta_end):
            raise ConfigError(
                f"need 0 < beta_start <= beta_end, got {self.beta_start}, {self.beta_end}"
            )
        if self.sweeps < 1 or self.restarts < 1:
            raise ConfigError(
                f"sweeps and restarts must be >= 1, got {self.sweeps}, {self.restarts}"
            )


def default_ladder() -> BetaGrid:
    """Geometric 16-rung ladder from 0.3 to 3.0 used by the tempering solver."""
    return BetaGrid.geometric(0.3, 3.0, 16)


@dataclass(frozen=True)
class GroundStateResult:
    """Best configuration found, its verified energy, and solver accounting.

    ``steps`` counts enumeration states for the exact route and accepted
    flips for the stochastic ones. ``certified`` is True only when the whole
    space was enumerated.
    """

    n: int
    energy: float
    bits: int
    method: str
    steps: int
    certified: bool
    seed: int | None = None
    swaps: int = 0

    @property
    def density(self) -> float:
        return self.energy / self.n

    def config(self, disorder: Disorder) -> SpinConfig:
        return SpinConfig.from_bits(disorder, self.bits)

    def validate(self, disorder: Disorder, tol: float = 1e-10) -> "GroundStateResult":
        recomputed = hamiltonian(self.config(disorder), disorder)
        gap = abs(recomputed - self.energy)
        if gap > tol * max(1.0, abs(self.energy)):
            raise IntegrityError(
                f"{self.method} solver reported E={self.energy} but its "
                f"configuration re-evaluates to {recomputed} (gap {gap:.3e})"
            )
        return self


def exact_ground_state(disorder: Disorder, cap: int = ENUMERATION_CAP) -> GroundStateResult:
    """Certified minimum by Gray-code enumeration of half the configuration space.

    The global spin flip preserves H, so the last spin is pinned up; the
    returned bit word therefore always has its top bit clear.
    """
    if disorder.n > cap:
        raise CapacityError(
            f"n={disorder.n} exceeds the enumeration cap {cap}; use "
            "anneal_ground_state or tempering_ground_state instead"
        )
    e_min, argmin, steps = gray_ground_state_kernel(disorder.matrix, True)
    result = GroundStateResult(
        n=disorder.n,
        energy=float(e_min),
        bits=int(argmin),
        method="exact",
        steps=int(steps) + 1,
        certified=True,
    )
    return result.validate(disorder)


def anneal_ground_state(
    disorder: Disorder, schedule: AnnealSchedule | None = None, seed: int = 0
) -> GroundStateResult:
    """Best energy over independent Metropolis annealing restarts."""
    if schedule is None:
        schedule = AnnealSchedule()
    best_e, best_sigma, flips = anneal_kernel(
        disorder.scaled_matrix,
        schedule.beta_start,
        schedule.beta_end,
        schedule.sweeps,
        schedule.restarts,
        np.uint64(seed & _MASK64),
    )
    result = GroundStateResult(
        n=disorder.n,
        energy=float(best_e),
        bits=bits_from_spins(best_sigma),
        method="anneal",
        steps=int(flips),
        certified=False,
        seed=seed,
    )
    return result.validate(disorder)


def tempering_ground_state(
    disorder: Disorder,
    ladder: BetaGrid | None = None,
    sweeps: int = 2000,
    seed: int = 0,
    repeats: int = 1,
) -> GroundStateResult:
    """Best energy from parallel tempering, optionally over independent repeats.

    Repeats rerun the whole replica set from fresh random configurations with
    seeds derived from ``seed``; the best verified energy across repeats wins.
    """
    if ladder is None:
        ladder = default_ladder()
    if len(ladder) < 2:
        raise ConfigError("tempering needs at least two ladder rungs to exchange")
    if sweeps < 1 or repeats < 1:
        raise ConfigError(f"sweeps and repeats must be >= 1, got {sweeps}, {repeats}")
    best = None
    total_flips = 0
    total_swaps = 0
    for r in range(repeats):
        run_seed = seed if repeats == 1 else stable_hash64("temper-repeat", seed, r)
        e, sigma, flips, swaps = tempering_kernel(
            disorder.scaled_matrix, ladder.values, sweeps, np.uint64(run_seed & _MASK64)
        )
        total_flips += int(flips)
        total_swaps += int(swaps)
        if best is None or e < best[0]:
            best = (float(e), bits_from_spins(sigma))
    result = GroundStateResult(
        n=disorder.n,
        energy=best[0],
        bits=best[1],
        method="temper",
        steps=total_flips,
        certified=False,
        seed=seed,
        swaps=total_swaps,
    )
    return result.validate(disorder)


@dataclass(frozen=True)
class SolverConfig:
    """Which route finds the minimum, plus its tuning knobs.

    The ladder scalars only matter for method="temper", the schedule only for
    method="anneal", and the cap only for method="exact".
    """

    method: str = "exact"
    schedule: AnnealSchedule = field(default_factory=AnnealSchedule)
    ladder_start: float = 0.3
    ladder_end: float = 3.0
    rungs: int = 16
    sweeps: int = 2000
    repeats: int = 1
    cap: int = ENUMERATION_CAP

    def __post_init__(self):
        if self.method not in ("exact", "anneal", "temper"):
            raise ConfigError(
                f"method must be one of exact, anneal, temper; got {self.method!r}"
            )

    def ladder(self) -> BetaGrid:
        return BetaGrid.geometric(self.ladder_start, self.ladder_end, self.rungs)

    def solve(self, disorder: Disorder, seed: int = 0) -> GroundStateResult:
        if self.method == "exact":
            return exact_ground_state(disorder, cap=self.cap)
        if self.method == "anneal":
            return anneal_ground_state(disorder, schedule=self.schedule, seed=seed)
        return tempering_ground_state(
            disorder, ladder=self.ladder(), sweeps=self.sweeps, seed=seed, repeats=self.repeats
        )


def density_ensemble(
    n: int,
    samples: int,
    solver: SolverConfig | None = None,
    seed: int = 0,
    on_error: str = "abort",
) -> tuple[EnsembleStats, list[dict]]:
    """Ground-state energy density over a disorder ensemble at one size.

    Disorder comes from the usual per-sample stream split; stochastic solver
    seeds are hashed from (seed, n, sample index) so runs are reproducible
    and samples stay independent. Returns the summary statistics and one
    record per sample.
    """
    if samples < 1:
        raise ConfigError(f"need at least 1 sample, got {samples}")
    if on_error not in ("abort", "skip"):
        raise ConfigError(f"on_error must be 'abort' or 'skip', got {on_error!r}")
    if solver is None:
        solver = SolverConfig()
    densities = []
    records = []
    failed = 0
    for idx in range(samples):
        solver_seed = stable_hash64("ground-state", seed, n, idx)
        try:
            disorder = sample_disorder(n, seed, idx)
            result = solver.solve(disorder, seed=solver_seed)
        except SKGlassError:
            if on_error == "abort":
                raise
            failed += 1
            continue
        densities.append(result.density)
        records.append(
            {
                "n": n,
                "sample_index": idx,
                "method": result.method,
                "energy": result.energy,
                "density": result.density,
                "flips_used": result.steps,
            }
        )
    stats = stats_from_values("ground_state_density", densities, n=n, beta=0.0, failed=failed)
    return stats, records


@dataclass(frozen=True)
class ExtrapolationFit:
    """Weighted fit of mean densities to e(n) = epsilon0 + a n^(-omega)."""

    epsilon0: float
    amplitude: float
    epsilon0_stderr: float
    amplitude_stderr: float
    omega: float
    chi2: float
    dof: int
    points: tuple[tuple[int, float, float], ...]

    def predicted(self, n: int) -> float:
        return self.epsilon0 + self.amplitude * float(n) ** (-self.omega)


def extrapolate_density(
    points: Sequence[EnsembleStats] | Sequence[tuple[int, float, float]],
    omega: float = 2.0 / 3.0,
) -> ExtrapolationFit:
    """Extrapolate mean densities to n -> infinity with weights 1/stderr^2.

    Accepts either EnsembleStats or raw (n, mean, stderr) triples. Needs at
    least three distinct sizes so the two-parameter fit has a residual degree
    of freedom; every stderr must be positive for the weighting to make sense.
    """
    triples = []
    for p in points:
        if isinstance(p, EnsembleStats):
            triples.append((int(p.n), float(p.mean), float(p.stderr)))
        else:
            n, mean, stderr = p
            triples.append((int(n), float(mean), float(stderr)))
    sizes = sorted({t[0] for t in triples})
    if len(sizes) < 3:
        raise ConfigError(f"need at least 3 distinct sizes to extrapolate, got {sizes}")
    if not omega > 0:
        raise ConfigError(f"omega must be positive, got {omega}")
    if any(t[2] <= 0 or not math.isfinite(t[2]) for t in triples):
        raise ConfigError("every point needs a positive finite stderr for weighting")

    ns = np.array([t[0] for t in triples], dtype=np.float64)
    ys = np.array([t[1] for t in triples])
    ws = np.array([1.0 / t[2] ** 2 for t in triples])
    design = np.column_stack([np.ones_like(ns), ns ** (-omega)])
    normal = design.T @ (ws[:, None] * design)
    rhs = design.T @ (ws * ys)
    try:
        params = np.linalg.solve(normal, rhs)
        cov = np.linalg.inv(normal)
    except np.linalg.LinAlgError as exc:
        raise ConfigError(f"degenerate extrapolation design: {exc}") from exc
    residuals = ys - design @ params
    chi2 = float(np.sum(ws * residuals**2))
    return ExtrapolationFit(
        epsilon0=float(params[0]),
        amplitude=float(params[1]),
        epsilon0_stderr=float(math.sqrt(max(cov[0, 0], 0.0))),
        amplitude_stderr=float(math.sqrt(max(cov[1, 1], 0.0))),
        omega=omega,
        chi2=chi2,
        dof=len(triples) - 2,
        points=tuple(triples),
    )


@dataclass(frozen=True)
class DensityBoundReport:
    """Extrapolated intercept against the rigorous lower bound on the limit density."""

    epsilon0: float
    epsilon0_stderr: float
    bound: float
    margin: float
    sigma_margin: float
    passed: bool
    simulation_reference: float
    distance_to_simulation: float


def check_density_bound(fit: ExtrapolationFit) -> DensityBoundReport:
    """Check that the extrapolated density does not undercut the lower bound.

    The bound is -log 2 - 1/(16 log 2); the true limit lies above it, so the
    fitted intercept may only dip below by statistical noise. The check
    passes when epsilon0 >= bound - 3 stderr; a clear violation signals a
    solver or fitting problem. The distance to the widely quoted simulation
    value is reported for orientation only.
    """
    bound = CONSTANTS.epsilon_bound
    margin = fit.epsilon0 - bound
    sigma_margin = margin / fit.epsilon0_stderr if fit.epsilon0_stderr > 0 else math.inf
    passed = margin >= -3.0 * fit.epsilon0_stderr
    return DensityBoundReport(
        epsilon0=fit.epsilon0,
        epsilon0_stderr=fit.epsilon0_stderr,
        bound=bound,
        margin=margin,
        sigma_margin=sigma_margin,
        passed=bool(passed),
        simulation_reference=CONSTANTS.simulation_density,
        distance_to_simulation=fit.epsilon0 - CONSTANTS.simulation_density,
    )
