"""Reference constants of the SK free-energy analysis and the exact identities among them.

All constants are computed from ``log 2`` at full double precision rather than
from their truncated decimal forms, so the algebraic identities below hold to
machine accuracy:

* ``beta_star = 4 log 2`` is the inverse temperature where the limiting
  annealed free-energy curve ``log 2 + beta^2/4`` meets the straight line
  ``beta * (log 2 + 1/4)`` through the high-temperature value at ``beta = 1``.
* ``beta_star == beta_c_rem ** 2`` where ``beta_c_rem = 2 sqrt(log 2)`` is the
  REM critical inverse temperature.
* ``annealed_at_star == beta_star * f_one_limit``.
* ``epsilon_bound = -beta_star/4 - 1/(4 beta_star)`` is the entropy-positivity
  lower bound on the ground-state energy density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, IntegrityError

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class ReferenceConstants:
    """Named constants used by reports, checks, and named-beta resolution."""

    beta_one: float = 1.0
    beta_star: float = 4.0 * LOG2
    f_one_limit: float = LOG2 + 0.25
    f_star_claimed: float = 4.0 * LOG2 * LOG2 + 0.25
    annealed_at_star: float = LOG2 + 4.0 * LOG2 * LOG2
    epsilon_bound: float = -LOG2 - 1.0 / (16.0 * LOG2)
    beta_c_rem: float = 2.0 * math.sqrt(LOG2)
    spherical_bound: float = 2.2058
    simulation_density: float = -0.7633

    def identity_gaps(self) -> dict[str, float]:
        """Absolute deviations of the exact identities; all should be ~1e-16."""
        return {
            "beta_star == beta_c_rem**2": abs(self.beta_star - self.beta_c_rem**2),
            "annealed_at_star == beta_star * f_one_limit": abs(
                self.annealed_at_star - self.beta_star * self.f_one_limit
            ),
            "f_star_claimed == beta_star**2/4 + 1/4": abs(
                self.f_star_claimed - (self.beta_star**2 / 4.0 + 0.25)
            ),
            "epsilon_bound == -beta_star/4 - 1/(4*beta_star)": abs(
                self.epsilon_bound - (-self.beta_star / 4.0 - 1.0 / (4.0 * self.beta_star))
            ),
        }

    def validate(self, tol: float = 1e-12) -> None:
        for name, gap in self.identity_gaps().items():
            if not gap <= tol:
                raise IntegrityError(f"constant identity violated: {name} (gap {gap:.3e})")

    def rows(self) -> list[tuple[str, float, str]]:
        """(name, value, description) rows for the constants table."""
        return [
            ("beta_one", self.beta_one, "inverse temperature fixing the scale"),
            ("beta_star", self.beta_star, "4 log 2, intersection of annealed curve and linear bound"),
            ("f_one_limit", self.f_one_limit, "limiting free energy per site at beta = 1 (log 2 + 1/4)"),
            ("f_star_claimed", self.f_star_claimed, "conjectured limit at beta_star (beta_star^2/4 + 1/4), reported only"),
            ("annealed_at_star", self.annealed_at_star, "annealed free energy limit at beta_star"),
            ("epsilon_bound", self.epsilon_bound, "entropy-positivity lower bound on ground-state density"),
            ("beta_c_rem", self.beta_c_rem, "REM critical inverse temperature, 2 sqrt(log 2)"),
            ("spherical_bound", self.spherical_bound, "spherical-model comparison value"),
            ("simulation_density", self.simulation_density, "ground-state density from replica-based simulations"),
        ]


CONSTANTS = ReferenceConstants()

_NAMED_BETAS = {
    "beta_one": CONSTANTS.beta_one,
    "beta_star": CONSTANTS.beta_star,
    "beta_c": CONSTANTS.beta_c_rem,
}


def resolve_beta(value: str | float) -> float:
    """Resolve a beta given as a number or one of the named constants.

    Named constants resolve to their full-precision values, never to
    truncated decimals.
    """
    if isinstance(value, (int, float)):
        return float(value)
    name = value.strip()
    if name in _NAMED_BETAS:
        return _NAMED_BETAS[name]
    try:
        return float(name)
    except ValueError:
        raise ConfigError(
            f"unknown beta {value!r}; use a number or one of {sorted(_NAMED_BETAS)}"
        ) from None
