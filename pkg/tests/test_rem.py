"""Random-energy benchmark: level sampling, exact thermodynamics, SK contrast."""

import math

import numpy as np
import pytest

from skglass import (
    CONSTANTS,
    LOG2,
    BetaGrid,
    CapacityError,
    CheckError,
    ConfigError,
    IntegrityError,
    RemInstance,
    compare_sk_rem,
    rem_entropy_scan,
    rem_ground_state,
    rem_thermo,
    sample_rem,
)

from oracles import naive_rem_thermo

# First levels of the (n=8, seed=2024, sample_index=1) stream plus the exact
# observables at beta=1.2, generated once and cross-checked against
# naive_rem_thermo. Guards both the level stream and the log-space sums.
FROZEN_LEVELS_8_2024_1 = (2.6269202556257683, 1.7197060411620846)
FROZEN_THERMO_8_2024_1 = (8.309012311608653, -4.072800049813183, 3.4216522518328323)


def test_sampling_deterministic_and_frozen():
    inst = sample_rem(8, 2024, 1)
    assert inst.levels.shape == (256,)
    assert tuple(float(x) for x in inst.levels[:2]) == FROZEN_LEVELS_8_2024_1
    again = sample_rem(8, 2024, 1)
    assert np.array_equal(inst.levels, again.levels)
    other = sample_rem(8, 2024, 2)
    assert not np.array_equal(inst.levels, other.levels)


def test_level_variance_matches_scaling():
    # Var = n/2 keeps the annealed free energy aligned with the SK curve
    values = np.concatenate([sample_rem(12, 3, i).levels for i in range(4)])
    assert abs(values.var(ddof=1) - 6.0) < 0.3
    assert abs(values.mean()) < 4 * math.sqrt(6.0 / values.size)


def test_instance_validation():
    with pytest.raises(IntegrityError):
        RemInstance(n=3, levels=np.zeros(7), seed=0)
    with pytest.raises(IntegrityError):
        RemInstance(n=2, levels=np.array([0.0, math.inf, 0.0, 0.0]), seed=0)
    with pytest.raises(IntegrityError):
        RemInstance(n=1, levels=np.zeros((2, 1)), seed=0)


def test_sampling_guards():
    with pytest.raises(ConfigError):
        sample_rem(0, seed=1)
    with pytest.raises(CapacityError):
        sample_rem(27, seed=1)
    with pytest.raises(CapacityError):
        sample_rem(12, seed=1, cap=10)


def test_thermo_matches_naive():
    inst = sample_rem(14, 5)
    betas = BetaGrid.of(0.4, 1.0, CONSTANTS.beta_c_rem, 2.5)
    for res in rem_thermo(inst, betas):
        log_z, mean_e, entropy = naive_rem_thermo(inst.levels, res.beta)
        assert res.log_z == pytest.approx(log_z, rel=1e-12, abs=1e-12)
        assert res.mean_energy == pytest.approx(mean_e, rel=1e-10, abs=1e-10)
        assert res.entropy == pytest.approx(entropy, rel=1e-9, abs=1e-9)
        assert res.max_log_weight <= 1e-12


def test_frozen_thermo_values():
    res = rem_thermo(sample_rem(8, 2024, 1), [1.2])[0]
    assert res.log_z == pytest.approx(FROZEN_THERMO_8_2024_1[0], rel=1e-12)
    assert res.mean_energy == pytest.approx(FROZEN_THERMO_8_2024_1[1], rel=1e-12)
    assert res.entropy == pytest.approx(FROZEN_THERMO_8_2024_1[2], rel=1e-12)


def test_degenerate_levels_are_pure_entropy():
    inst = RemInstance(n=3, levels=np.zeros(8), seed=0)
    res = rem_thermo(inst, [2.0])[0]
    assert res.log_z == 3 * LOG2
    assert res.entropy == 3 * LOG2
    assert res.mean_energy == 0.0


def test_zero_beta_anchor():
    res = rem_thermo(sample_rem(10, 7), BetaGrid.of(0.0, allow_zero=True))[0]
    assert res.entropy_per_site == pytest.approx(LOG2, abs=1e-13)
    assert res.log_z == pytest.approx(10 * LOG2, abs=1e-12)


def test_single_level_edge_case():
    inst = RemInstance(n=0, levels=np.array([1.7]), seed=0)
    res = rem_thermo(inst, [2.0])[0]
    assert res.log_z == pytest.approx(-3.4, abs=1e-15)
    assert res.mean_energy == pytest.approx(1.7, abs=1e-15)
    assert res.entropy == pytest.approx(0.0, abs=1e-15)
    assert res.max_log_weight == 0.0


def test_ground_state_is_argmin():
    inst = sample_rem(10, 11)
    energy, idx = rem_ground_state(inst)
    assert energy == float(inst.levels.min())
    assert inst.levels[idx] == energy


def test_entropy_per_instance_never_increases_with_beta():
    # dS/dbeta = -beta Var(H) <= 0 holds exactly for each fixed instance
    res = rem_thermo(
        sample_rem(16, 3), BetaGrid.of(0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, allow_zero=True)
    )
    entropies = [r.entropy for r in res]
    assert all(b <= a + 1e-10 for a, b in zip(entropies, entropies[1:]))


def test_entropy_scan_shows_collapse():
    beta_c = CONSTANTS.beta_c_rem
    grid = BetaGrid.of(beta_c / 2, 2 * beta_c)
    high_t = {}
    low_t = {}
    for n in (12, 16, 20):
        warm, cold = rem_entropy_scan(n, grid, samples=6, seed=9)
        high_t[n], low_t[n] = warm, cold
        # warm side tracks log 2 - beta^2/4 = (3/4) log 2
        assert abs(warm.mean - 0.75 * LOG2) < 0.02
        assert warm.mean > 0.2
        # cold side has frozen out
        assert cold.mean < 0.12
        gap = warm.mean - cold.mean
        spread = math.hypot(warm.stderr, cold.stderr)
        assert gap > 10 * spread
    with pytest.raises(ConfigError):
        rem_entropy_scan(12, grid, samples=1, seed=0)


def test_comparison_report_structure():
    report = compare_sk_rem(12, samples=8, seed=3, enforce=False)
    assert [row.beta for row in report.rows] == [
        0.0,
        CONSTANTS.beta_c_rem,
        CONSTANTS.beta_star,
    ]
    anchor = report.rows[0]
    assert anchor.sk.mean == pytest.approx(LOG2, abs=1e-12)
    assert anchor.rem.mean == pytest.approx(LOG2, abs=1e-12)
    assert anchor.sk.stderr == pytest.approx(0.0, abs=1e-12)
    assert report.beta_consistency_gap <= 1e-12
    assert report.sk_star_free_energy.count == 8
    assert report.sk_entropy.key()[2] == pytest.approx(CONSTANTS.beta_c_rem)


def test_comparison_enforced_at_reference_size():
    report = compare_sk_rem(16, samples=24, seed=2024)
    assert report.enforced and report.passed
    assert report.separation > 0
    assert report.separation_sigma >= 3.0
    # SK keeps finite entropy density at the REM's freezing point
    assert report.sk_entropy.mean > report.rem_entropy.mean


def test_comparison_not_enforced_below_reference_size():
    report = compare_sk_rem(8, samples=4, seed=1)
    assert not report.enforced


def test_comparison_guards():
    with pytest.raises(ConfigError):
        compare_sk_rem(12, samples=1, seed=0)


def test_comparison_enforcement_failure_raises():
    # two samples cannot clear a 3 sigma bar reliably; find a seed where the
    # report fails and confirm the enforced path raises CheckError for it
    failing_seed = None
    for seed in range(40):
        report = compare_sk_rem(16, samples=2, seed=seed, enforce=False)
        if not report.passed:
            failing_seed = seed
            break
    assert failing_seed is not None, "no failing seed found to exercise enforcement"
    with pytest.raises(CheckError, match="entropy separation"):
        compare_sk_rem(16, samples=2, seed=failing_seed)
