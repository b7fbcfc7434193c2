"""Exact enumeration thermodynamics: log Z, Gibbs observables, finite-n identities.

One Gray-code sweep over the configuration space serves every requested beta;
partition sums accumulate in log space through a streaming log-sum-exp, so
values like beta_star * |H| (~60 nats at n = 28) never overflow. Entropy comes
from the identity S = log Z + beta <H>; the direct probability sum is kept for
cross-checks in tests, not production.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .constants import CONSTANTS, LOG2
from .ensemble import EnsembleStats, stats_from_values
from .errors import CapacityError, ConfigError, IntegrityError, SKGlassError
from .kernels import gray_all_energies_kernel, gray_thermo_kernel
from .model import Disorder, sample_disorder, split_rng

# Enumeration visits 2^(n-1) states; the default cap keeps one sample under
# minutes on a desktop. Operations that materialize a per-configuration array
# (2^n doubles) use the tighter memory cap.
ENUMERATION_CAP = 28
MEMORY_CAP = 24

STREAM_MOMENT = 2  # coupling stream domain for the annealed-moment estimator


@dataclass(frozen=True)
class BetaGrid:
    """Sorted grid of inverse temperatures (beta = 0 only for diagnostics)."""

    values: np.ndarray
    allow_zero: bool = False

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if arr.ndim != 1 or arr.size == 0:
            raise ConfigError("beta grid must be a non-empty 1-d array")
        if not np.all(np.isfinite(arr)):
            raise ConfigError("beta grid must be finite")
        if arr.size > 1 and not np.all(np.diff(arr) > 0):
            raise ConfigError("beta grid must be strictly increasing")
        floor = 0.0 if self.allow_zero else np.nextafter(0.0, 1.0)
        if arr[0] < floor:
            raise ConfigError(
                "beta must be positive" + ("" if self.allow_zero else " (beta=0 is diagnostic-only)")
            )
        object.__setattr__(self, "values", arr)

    @classmethod
    def of(cls, *betas: float, allow_zero: bool = False) -> "BetaGrid":
        return cls(np.sort(np.asarray(betas, dtype=np.float64)), allow_zero=allow_zero)

    @classmethod
    def linspace(cls, lo: float, hi: float, num: int, allow_zero: bool = False) -> "BetaGrid":
        return cls(np.linspace(lo, hi, num), allow_zero=allow_zero)

    @classmethod
    def geometric(cls, lo: float, hi: float, num: int) -> "BetaGrid":
        return cls(np.geomspace(lo, hi, num))

    def __len__(self) -> int:
        return int(self.values.size)


def _as_grid(betas) -> BetaGrid:
    if isinstance(betas, BetaGrid):
        return betas
    return BetaGrid.of(*np.atleast_1d(np.asarray(betas, dtype=np.float64)))


@dataclass(frozen=True)
class ThermoResult:
    """Per-disorder, per-beta observables from one exact sweep (all in nats)."""

    n: int
    beta: float
    log_z: float
    mean_energy: float
    entropy: float
    max_log_weight: float

    @property
    def free_energy_per_site(self) -> float:
        return self.log_z / self.n

    @property
    def entropy_per_site(self) -> float:
        return self.entropy / self.n

    def validate(self, logz_floor: float | None = None, tol: float = 1e-9) -> "ThermoResult":
        values = (self.log_z, self.mean_energy, self.entropy, self.max_log_weight)
        if not all(math.isfinite(v) for v in values):
            raise IntegrityError(f"non-finite thermo observable: {self}")
        identity_gap = abs(self.log_z - (self.entropy - self.beta * self.mean_energy))
        if identity_gap > tol * max(1.0, abs(self.log_z)):
            raise IntegrityError(f"thermodynamic identity violated by {identity_gap:.3e}: {self}")
        if not -tol <= self.entropy <= self.n * LOG2 + tol:
            raise IntegrityError(f"entropy {self.entropy} outside [0, n log 2]")
        if self.max_log_weight > tol:
            raise IntegrityError(f"max log weight {self.max_log_weight} is positive")
        if logz_floor is not None and self.log_z < logz_floor:
            raise IntegrityError(f"log Z = {self.log_z} below floor {logz_floor}")
        return self


def enumerate_thermo(
    disorder: Disorder, betas, cap: int = ENUMERATION_CAP
) -> list[ThermoResult]:
    """Exact log Z, <H>, entropy, and top Gibbs weight for every beta.

    A single sweep in Gray-code order with incremental O(n) energy updates
    visits half the configuration space (the global spin flip contributes the
    other half exactly). Cost is O(n 2^(n-1)) independent of the number of
    betas, which only add O(1) work per state.
    """
    grid = _as_grid(betas)
    if disorder.n > cap:
        raise CapacityError(
            f"n={disorder.n} exceeds the enumeration cap {cap}; raise the cap "
            "explicitly or switch to the heuristic ground-state solvers"
        )
    log_z, mean_h, e_min, _, _ = gray_thermo_kernel(disorder.matrix, grid.values, True)
    if not (np.all(np.isfinite(log_z)) and np.all(np.isfinite(mean_h)) and math.isfinite(e_min)):
        raise IntegrityError(f"enumeration produced non-finite values for n={disorder.n}")
    results = []
    floor = disorder.n * LOG2 - 1e-9
    for beta, lz, mh in zip(grid.values, log_z, mean_h):
        res = ThermoResult(
            n=disorder.n,
            beta=float(beta),
            log_z=float(lz),
            mean_energy=float(mh),
            entropy=float(lz + beta * mh),
            max_log_weight=float(-beta * e_min - lz),
        )
        results.append(res.validate(logz_floor=floor))
    return results


def all_energies(disorder: Disorder, cap: int = MEMORY_CAP) -> np.ndarray:
    """Energy of every configuration indexed by bit word (2^n doubles)."""
    if disorder.n > cap:
        raise CapacityError(
            f"n={disorder.n} exceeds the per-configuration memory cap {cap}"
        )
    return gray_all_energies_kernel(disorder.matrix)


def annealed_free_energy(n: int | None, beta: float, limit: bool = False) -> float:
    """Annealed free energy per site, log 2 + beta^2 (n-1)/(4n).

    With ``limit`` the n -> infinity value log 2 + beta^2/4 is returned and
    ``n`` is ignored.
    """
    if beta < 0:
        raise ConfigError(f"beta must be >= 0, got {beta}")
    if limit:
        return LOG2 + beta * beta / 4.0
    if n is None or n < 1:
        raise ConfigError(f"site count must be >= 1, got {n}")
    return LOG2 + beta * beta * (n - 1) / (4.0 * n)


@dataclass(frozen=True)
class MomentReport:
    """Monte-Carlo check of the closed-form disorder average of Z."""

    n: int
    beta: float
    samples: int
    mc_estimate: float
    closed_form: float
    stderr: float
    z_score: float
    reliable: bool


def verify_annealed_moment(
    n: int,
    beta: float,
    samples: int,
    seed: int,
    max_n: int = 10,
    max_beta: float = 1.0,
) -> MomentReport:
    """Estimate E_J[Z] by direct sampling and compare to 2^n e^{beta^2 (n-1)/4}.

    Restricted to small n and beta by default; the variance of Z grows fast
    enough with either that the plain Monte-Carlo mean becomes useless beyond
    them. An unusable variance estimate flags the report unreliable rather
    than raising.
    """
    if n < 1 or n > max_n:
        raise ConfigError(f"n={n} outside the estimator's range [1, {max_n}]")
    if beta < 0 or beta > max_beta:
        raise ConfigError(f"beta={beta} outside the estimator's range [0, {max_beta}]")
    if samples < 2:
        raise ConfigError(f"need at least 2 samples, got {samples}")

    words = np.arange(1 << n)
    spins = 1.0 - 2.0 * ((words[:, None] >> np.arange(n)[None, :]) & 1)
    iu, ju = np.triu_indices(n, k=1)
    pair_products = spins[:, iu] * spins[:, ju]  # (2^n, n(n-1)/2)

    rng = split_rng(seed, STREAM_MOMENT, 0)
    inv_sqrt_n = 1.0 / math.sqrt(n)
    z_values = np.empty(samples)
    chunk = max(1, (1 << 22) // max(1, pair_products.shape[0]))
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        couplings = rng.standard_normal((k, iu.size))
        energies = -inv_sqrt_n * (pair_products @ couplings.T)
        z_values[done : done + k] = np.exp(-beta * energies).sum(axis=0)
        done += k

    mean = float(np.mean(z_values))
    stderr = float(np.std(z_values, ddof=1) / math.sqrt(samples))
    closed = float(2.0**n * math.exp(beta * beta * (n - 1) / 4.0))
    diff = mean - closed
    if diff == 0.0:
        z_score = 0.0
    elif stderr > 0.0 and math.isfinite(stderr):
        z_score = diff / stderr
    else:
        z_score = math.copysign(math.inf, diff)
    reliable = math.isfinite(stderr) and (stderr > 0.0 or diff == 0.0)
    return MomentReport(
        n=n,
        beta=beta,
        samples=samples,
        mc_estimate=mean,
        closed_form=closed,
        stderr=stderr,
        z_score=z_score,
        reliable=reliable,
    )


def quenched_free_energy(
    n: int,
    beta: float,
    samples: int,
    seed: int,
    cap: int = ENUMERATION_CAP,
    on_error: str = "abort",
) -> EnsembleStats:
    """Mean and stderr of (1/n) log Z over the disorder ensemble.

    Deterministic in the seed. Per-sample enumeration failures abort the run
    by default; with on_error="skip" they are counted and excluded.
    """
    if samples < 2:
        raise ConfigError(f"need at least 2 samples, got {samples}")
    if on_error not in ("abort", "skip"):
        raise ConfigError(f"on_error must be 'abort' or 'skip', got {on_error!r}")
    values = []
    failed = 0
    for idx in range(samples):
        try:
            disorder = sample_disorder(n, seed, idx)
            res = enumerate_thermo(disorder, BetaGrid.of(beta, allow_zero=True), cap=cap)[0]
        except SKGlassError:
            if on_error == "abort":
                raise
            failed += 1
            continue
        values.append(res.free_energy_per_site)
    return stats_from_values("free_energy_per_site", values, n=n, beta=beta, failed=failed)


def functional_equation_residual(
    disorder: Disorder,
    beta_star: float | None = None,
    beta_base: float = 1.0,
    cap: int = MEMORY_CAP,
) -> float:
    """Max-over-configurations residual of the Gibbs-measure power identity.

    The measure at beta_star equals the measure at beta_base raised to the
    power beta_star/beta_base and renormalized by Z(beta_base)^(ratio)/Z(beta_star).
    This holds algebraically for any exponent pair, so the residual is pure
    floating-point noise; everything is evaluated in log space before the
    final exponentials.
    """
    if beta_star is None:
        beta_star = CONSTANTS.beta_star
    energies = all_energies(disorder, cap=cap)
    ratio = beta_star / beta_base
    log_z_base = float(logsumexp(-beta_base * energies))
    log_z_star = float(logsumexp(-beta_star * energies))
    lhs = np.exp(-beta_star * energies - log_z_star)
    rhs = np.exp(ratio * (-beta_base * energies - log_z_base) + ratio * log_z_base - log_z_star)
    return float(np.abs(lhs - rhs).max())


@dataclass(frozen=True)
class AlphaReport:
    """Finite-n deviation statistic between rescaled base and low-T free energies."""

    stats: EnsembleStats
    max_identity_gap: float
    beta_star: float


def alpha_sample(
    disorder: Disorder, beta_star: float | None = None, cap: int = MEMORY_CAP
) -> tuple[float, float]:
    """Per-sample alpha_hat = beta_star f_n(1) - f_n(beta_star) and its identity gap.

    The same sweep also evaluates -(1/n) log sum_sigma mu_{n,1}(sigma)^beta_star
    directly from the per-configuration probabilities; the two expressions are
    algebraically identical, so their gap measures only arithmetic noise.
    """
    if beta_star is None:
        beta_star = CONSTANTS.beta_star
    energies = all_energies(disorder, cap=cap)
    n = disorder.n
    log_z_one = float(logsumexp(-energies))
    log_z_star = float(logsumexp(-beta_star * energies))
    alpha = (beta_star * log_z_one - log_z_star) / n
    log_mu_power_sum = float(logsumexp(beta_star * (-energies - log_z_one)))
    alpha_direct = -log_mu_power_sum / n
    return alpha, abs(alpha - alpha_direct)


def alpha_estimate(
    n: int,
    samples: int,
    seed: int,
    beta_star: float | None = None,
    cap: int = MEMORY_CAP,
) -> AlphaReport:
    """Disorder average of alpha_hat_n, with the per-sample identity cross-check."""
    if beta_star is None:
        beta_star = CONSTANTS.beta_star
    if samples < 1:
        raise ConfigError(f"need at least 1 sample, got {samples}")
    values = []
    max_gap = 0.0
    for idx in range(samples):
        disorder = sample_disorder(n, seed, idx)
        alpha, gap = alpha_sample(disorder, beta_star=beta_star, cap=cap)
        values.append(alpha)
        max_gap = max(max_gap, gap)
    stats = stats_from_values("alpha", values, n=n, beta=beta_star)
    return AlphaReport(stats=stats, max_identity_gap=max_gap, beta_star=beta_star)


@dataclass(frozen=True)
class BetaStarRoots:
    """Both intersections of the annealed curve with the linear bound."""

    roots: tuple[float, float]
    residuals: tuple[float, float]


def solve_beta_star() -> BetaStarRoots:
    """Solve log 2 + beta^2/4 = beta (log 2 + 1/4) by bracketed root finding.

    The trivial root is beta = 1 by construction; the nontrivial one is
    4 log 2.
    """

    def gap(beta: float) -> float:
        return LOG2 + beta * beta / 4.0 - beta * (LOG2 + 0.25)

    eps = float(np.finfo(np.float64).eps)
    low = float(brentq(gap, 0.5, 1.5, xtol=1e-14, rtol=4 * eps))
    high = float(brentq(gap, 2.0, 4.0, xtol=1e-14, rtol=4 * eps))
    return BetaStarRoots(roots=(low, high), residuals=(gap(low), gap(high)))


@dataclass(frozen=True)
class FigureData:
    """Plot-ready columns: the annealed limit curve and the linear bound."""

    betas: np.ndarray
    annealed: np.ndarray
    line: np.ndarray
    markers: tuple[float, float]

    def rows(self) -> list[tuple[float, float, float]]:
        return [
            (float(b), float(a), float(l))
            for b, a, l in zip(self.betas, self.annealed, self.line)
        ]


def emit_figure_data(betas: BetaGrid) -> FigureData:
    """Tabulate log 2 + beta^2/4 and beta (log 2 + 1/4) over the grid.

    Rows at beta = 1 and beta = beta_star are always included, and both are
    reported as vertical markers; the two columns agree exactly at those
    abscissas.
    """
    grid_values = np.unique(
        np.concatenate([betas.values, [CONSTANTS.beta_one, CONSTANTS.beta_star]])
    )
    annealed = LOG2 + grid_values**2 / 4.0
    line = grid_values * (LOG2 + 0.25)
    return FigureData(
        betas=grid_values,
        annealed=annealed,
        line=line,
        markers=(CONSTANTS.beta_one, CONSTANTS.beta_star),
    )
