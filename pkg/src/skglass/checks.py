"""Named internal consistency checks, runnable as a battery or one at a time.

Each check compares an independently computed quantity against a closed form
or an exact identity and returns a CheckResult instead of asserting, so the
command line can print a full report before failing. Checks are deterministic
in the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import CONSTANTS, LOG2
from .errors import CheckError, ConfigError, IntegrityError
from .model import Disorder, n_pairs, sample_disorder, save_disorder, load_disorder
from .thermo import (
    BetaGrid,
    annealed_free_energy,
    enumerate_thermo,
    functional_equation_residual,
    quenched_free_energy,
    solve_beta_star,
    verify_annealed_moment,
)

import numpy as np


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named check; measured/threshold are in the check's units."""

    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.name}: measured {self.measured:.3e} vs threshold {self.threshold:.3e}"
        return f"{text} ({self.detail})" if self.detail else text


def check_constants() -> CheckResult:
    """Algebraic identities among the reference constants, to near machine precision."""
    gaps = CONSTANTS.identity_gaps()
    worst = max(gaps.values())
    which = max(gaps, key=gaps.get)
    return CheckResult(
        name="constants",
        passed=worst <= 1e-12,
        measured=worst,
        threshold=1e-12,
        detail=f"largest gap from {which}",
    )


def check_beta_star_root() -> CheckResult:
    """Bracketed root finding recovers beta = 1 and beta = 4 log 2."""
    roots = solve_beta_star()
    gap = max(abs(roots.roots[0] - 1.0), abs(roots.roots[1] - CONSTANTS.beta_star))
    residual = max(abs(r) for r in roots.residuals)
    return CheckResult(
        name="beta-star-root",
        passed=gap <= 1e-9 and residual <= 1e-12,
        measured=gap,
        threshold=1e-9,
        detail=f"roots {roots.roots[0]:.12f}, {roots.roots[1]:.12f}; residual {residual:.1e}",
    )


def check_intersection_identity() -> CheckResult:
    """The limit curve log 2 + b^2/4 meets the line b (log 2 + 1/4) exactly at both roots."""
    gap = 0.0
    for beta in (CONSTANTS.beta_one, CONSTANTS.beta_star):
        curve = annealed_free_energy(None, beta, limit=True)
        line = beta * (LOG2 + 0.25)
        gap = max(gap, abs(curve - line))
    return CheckResult(
        name="intersection-identity",
        passed=gap <= 1e-12,
        measured=gap,
        threshold=1e-12,
        detail="curve vs line at beta = 1 and beta_star",
    )


def check_functional_equation(seed: int = 0) -> CheckResult:
    """Gibbs-measure power identity: float-noise residual on a sample, zero at J = 0."""
    disorder = sample_disorder(12, seed)
    residual = functional_equation_residual(disorder)
    zero = Disorder(n=10, couplings=np.zeros(n_pairs(10)), seed=0)
    zero_residual = functional_equation_residual(zero)
    passed = residual < 1e-12 and zero_residual == 0.0
    return CheckResult(
        name="functional-equation",
        passed=passed,
        measured=residual,
        threshold=1e-12,
        detail=f"J=0 residual {zero_residual:.1e} (must be exactly 0)",
    )


def check_thermo_identity(seed: int = 0) -> CheckResult:
    """log Z = S - beta <H> across a beta grid on one enumerated sample."""
    disorder = sample_disorder(10, seed)
    grid = BetaGrid.of(0.25, 1.0, CONSTANTS.beta_star, 4.0)
    gap = 0.0
    try:
        for res in enumerate_thermo(disorder, grid):
            gap = max(gap, abs(res.log_z - (res.entropy - res.beta * res.mean_energy)))
    except IntegrityError as exc:
        return CheckResult(
            name="thermo-identity", passed=False, measured=math.inf, threshold=1e-9,
            detail=str(exc),
        )
    return CheckResult(
        name="thermo-identity",
        passed=gap <= 1e-9,
        measured=gap,
        threshold=1e-9,
        detail="max identity gap over the grid",
    )


def check_jensen(seed: int = 0) -> CheckResult:
    """Quenched mean free energy does not exceed the annealed value (3 sigma slack)."""
    n, beta, samples = 10, 1.0, 48
    stats = quenched_free_energy(n, beta, samples, seed)
    annealed = annealed_free_energy(n, beta)
    slack = annealed - stats.mean
    passed = slack >= -3.0 * stats.stderr
    return CheckResult(
        name="jensen",
        passed=passed,
        measured=slack,
        threshold=-3.0 * stats.stderr,
        detail=f"annealed {annealed:.6f}, quenched mean {stats.mean:.6f} "
        f"+- {stats.stderr:.6f} over {samples} samples",
    )


def check_annealed_moment(seed: int = 0) -> CheckResult:
    """Monte-Carlo E_J[Z] against 2^n e^(beta^2 (n-1)/4) within 4 sigma."""
    report = verify_annealed_moment(n=6, beta=0.5, samples=20000, seed=seed)
    passed = report.reliable and abs(report.z_score) <= 4.0
    return CheckResult(
        name="annealed-moment",
        passed=passed,
        measured=abs(report.z_score),
        threshold=4.0,
        detail=f"estimate {report.mc_estimate:.3f} vs closed form {report.closed_form:.3f}",
    )


def check_disorder_file(seed: int = 0, workdir: str | None = None) -> CheckResult:
    """Disorder files round-trip bit for bit and corruption is always detected."""
    import json
    import tempfile
    from pathlib import Path

    disorder = sample_disorder(8, seed)
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        path = Path(tmp) / "disorder.json"
        save_disorder(disorder, path)
        loaded = load_disorder(path)
        roundtrip_ok = (
            loaded.n == disorder.n
            and loaded.seed == disorder.seed
            and np.array_equal(loaded.couplings, disorder.couplings)
        )
        payload = json.loads(path.read_text())
        payload["couplings"][0] = payload["couplings"][0] + 1e-9
        path.write_text(json.dumps(payload))
        try:
            load_disorder(path)
            tamper_caught = False
        except IntegrityError:
            tamper_caught = True
    passed = roundtrip_ok and tamper_caught
    return CheckResult(
        name="disorder-file",
        passed=passed,
        measured=0.0 if passed else 1.0,
        threshold=0.0,
        detail=f"roundtrip {'ok' if roundtrip_ok else 'BROKEN'}, "
        f"tampering {'detected' if tamper_caught else 'MISSED'}",
    )


CHECKS = {
    "constants": lambda seed: check_constants(),
    "beta-star-root": lambda seed: check_beta_star_root(),
    "intersection-identity": lambda seed: check_intersection_identity(),
    "functional-equation": check_functional_equation,
    "thermo-identity": check_thermo_identity,
    "jensen": check_jensen,
    "annealed-moment": check_annealed_moment,
    "disorder-file": check_disorder_file,
}


def run_checks(names: list[str] | None = None, seed: int = 0) -> list[CheckResult]:
    """Run the named checks (all by default) and return their results in order."""
    selected = list(CHECKS) if names is None else names
    results = []
    for name in selected:
        if name not in CHECKS:
            raise ConfigError(f"unknown check {name!r}; known: {', '.join(CHECKS)}")
        results.append(CHECKS[name](seed))
    return results


def require_all(results: list[CheckResult]) -> None:
    """Raise CheckError naming every failed check, if any failed."""
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise CheckError(f"{len(failed)} check(s) failed: {', '.join(failed)}")
