"""SK instance definition: Gaussian couplings, spin configurations, energy kernels.

Conventions used throughout the package:

* The Hamiltonian is ``H(sigma) = -(1/sqrt(n)) sum_{i<j} J_ij sigma_i sigma_j``
  with ``J_ij`` i.i.d. standard normal. There is no external field, no
  diagonal term, and no self-interaction.
* Couplings are stored as a flat row-major upper-triangular array. The pair
  ``(i, j)`` with ``i < j`` lives at index ``i*(2n - i - 1)//2 + (j - i - 1)``,
  i.e. pairs are ordered (0,1), (0,2), ..., (0,n-1), (1,2), ...
* Spins are packed into an integer word with bit ``i`` encoding site ``i``;
  bit value 0 means ``sigma_i = +1``, so the all-zeros word is the all-up
  configuration.
* Local fields are unscaled: ``h_i = sum_{j != i} J_ij sigma_j``, in units of
  J. Flipping site ``k`` changes the energy by ``(2/sqrt(n)) sigma_k h_k``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import IntegrityError

# Stream domain tags keep SK couplings and REM levels drawn from the same
# (seed, sample_index) statistically independent.
STREAM_SK = 0
STREAM_REM = 1

# Local-field caches are rebuilt from scratch after this many flips to bound
# floating-point drift, which accumulates linearly in flip count.
CACHE_REBUILD_PERIOD = 1 << 20


def split_rng(seed: int, domain: int, sample_index: int) -> np.random.Generator:
    """Stream-split generator keyed by (seed, domain, sample_index).

    Uses ``numpy.random.SeedSequence`` spawn keys, so distinct keys yield
    statistically independent streams and identical keys reproduce the same
    stream bit-for-bit across runs and thread counts.
    """
    if seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed}")
    if sample_index < 0:
        raise ValueError(f"sample_index must be non-negative, got {sample_index}")
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(domain, sample_index))
    return np.random.Generator(np.random.PCG64(ss))


def n_pairs(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(n: int, i: int, j: int) -> int:
    """Flat index of coupling (i, j), i < j, in the row-major upper triangle."""
    if not 0 <= i < j < n:
        raise ValueError(f"need 0 <= i < j < n, got i={i}, j={j}, n={n}")
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


@dataclass(frozen=True)
class Disorder:
    """One realization of the coupling matrix, plus its generating seed."""

    n: int
    couplings: np.ndarray
    seed: int
    sample_index: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"site count must be >= 1, got n={self.n}")
        flat = np.ascontiguousarray(np.asarray(self.couplings, dtype=np.float64))
        if flat.ndim != 1 or flat.shape[0] != n_pairs(self.n):
            raise IntegrityError(
                f"couplings must be a flat array of length n(n-1)/2 = "
                f"{n_pairs(self.n)} for n={self.n}, got shape {flat.shape}"
            )
        object.__setattr__(self, "couplings", flat)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense symmetric coupling matrix with zero diagonal."""
        m = np.zeros((self.n, self.n))
        iu, ju = np.triu_indices(self.n, k=1)
        m[iu, ju] = self.couplings
        m[ju, iu] = self.couplings
        return m

    @cached_property
    def scaled_matrix(self) -> np.ndarray:
        """Coupling matrix divided by sqrt(n), so H = -(1/2) sigma @ W @ sigma."""
        return self.matrix / math.sqrt(self.n)


def sample_disorder(n: int, seed: int, sample_index: int = 0) -> Disorder:
    """Draw the n(n-1)/2 standard-normal couplings for one disorder sample.

    Deterministic in (n, seed, sample_index); distinct (seed, sample_index)
    pairs give independent coupling streams. The normal transform is numpy's
    ``standard_normal`` (ziggurat) on a PCG64 stream split by sample_index.
    """
    if n < 1:
        raise ValueError(f"site count must be >= 1, got n={n}")
    rng = split_rng(seed, STREAM_SK, sample_index)
    couplings = rng.standard_normal(n_pairs(n))
    return Disorder(n=n, couplings=couplings, seed=seed, sample_index=sample_index)


def spins_from_bits(n: int, bits: int) -> np.ndarray:
    """Decode a bit word into a +-1 spin vector (bit 0 means +1)."""
    out = np.empty(n)
    for i in range(n):
        out[i] = 1.0 if (bits >> i) & 1 == 0 else -1.0
    return out


def bits_from_spins(spins: np.ndarray) -> int:
    bits = 0
    for i, s in enumerate(spins):
        if s < 0:
            bits |= 1 << i
    return bits


@dataclass(frozen=True)
class SpinConfig:
    """One spin configuration with optional cached local fields.

    Treated as an immutable value: flips return a new instance. ``flips``
    counts updates since the cache was last rebuilt from scratch.
    """

    n: int
    bits: int
    local_fields: np.ndarray | None = None
    flips: int = 0

    @classmethod
    def from_bits(cls, disorder: Disorder, bits: int) -> "SpinConfig":
        sigma = spins_from_bits(disorder.n, bits)
        fields = disorder.matrix @ sigma
        return cls(n=disorder.n, bits=bits, local_fields=fields)

    @classmethod
    def all_up(cls, disorder: Disorder) -> "SpinConfig":
        return cls.from_bits(disorder, 0)

    def spins(self) -> np.ndarray:
        return spins_from_bits(self.n, self.bits)

    def spin(self, k: int) -> float:
        return 1.0 if (self.bits >> k) & 1 == 0 else -1.0


def hamiltonian(sigma: SpinConfig, disorder: Disorder) -> float:
    """Energy -(1/sqrt(n)) sum_{i<j} J_ij sigma_i sigma_j, computed from scratch."""
    if sigma.n != disorder.n:
        raise ValueError(f"dimension mismatch: config n={sigma.n}, disorder n={disorder.n}")
    s = sigma.spins()
    return float(-0.5 / math.sqrt(disorder.n) * (s @ (disorder.matrix @ s)))


def _field(sigma: SpinConfig, disorder: Disorder, k: int) -> float:
    if sigma.local_fields is not None:
        return float(sigma.local_fields[k])
    s = sigma.spins()
    return float(disorder.matrix[k] @ s)


def flip_delta(sigma: SpinConfig, disorder: Disorder, k: int) -> float:
    """Energy change from flipping site k; the configuration is left untouched."""
    if sigma.n != disorder.n:
        raise ValueError(f"dimension mismatch: config n={sigma.n}, disorder n={disorder.n}")
    if not 0 <= k < sigma.n:
        raise ValueError(f"site index {k} out of range for n={sigma.n}")
    return 2.0 / math.sqrt(sigma.n) * sigma.spin(k) * _field(sigma, disorder, k)


def apply_flip(sigma: SpinConfig, disorder: Disorder, k: int) -> SpinConfig:
    """Flip site k, updating all local fields in O(n).

    The cache is rebuilt from scratch every CACHE_REBUILD_PERIOD flips.
    """
    if sigma.n != disorder.n:
        raise ValueError(f"dimension mismatch: config n={sigma.n}, disorder n={disorder.n}")
    if not 0 <= k < sigma.n:
        raise ValueError(f"site index {k} out of range for n={sigma.n}")
    new_bits = sigma.bits ^ (1 << k)
    if sigma.local_fields is None or sigma.flips + 1 >= CACHE_REBUILD_PERIOD:
        return SpinConfig.from_bits(disorder, new_bits)
    # h_j -= 2 sigma_k J_jk; the zero diagonal leaves h_k unchanged.
    fields = sigma.local_fields - 2.0 * sigma.spin(k) * disorder.matrix[:, k]
    return replace(sigma, bits=new_bits, local_fields=fields, flips=sigma.flips + 1)


def energy_from_fields(sigma: SpinConfig, disorder: Disorder) -> float:
    """Energy via the cached fields: -(1/(2 sqrt(n))) sum_i sigma_i h_i."""
    if sigma.local_fields is None:
        return hamiltonian(sigma, disorder)
    s = sigma.spins()
    return float(-0.5 / math.sqrt(sigma.n) * (s @ sigma.local_fields))


# ---------------------------------------------------------------------------
# Persistence. A disorder record is a JSON object {n, seed, sample_index,
# couplings?}; couplings may be omitted when the seed regenerates them. The
# flat coupling order is the row-major upper triangle documented above.
# ---------------------------------------------------------------------------


def disorder_to_record(disorder: Disorder, include_couplings: bool = True) -> dict:
    record = {
        "n": disorder.n,
        "seed": disorder.seed,
        "sample_index": disorder.sample_index,
    }
    if include_couplings:
        record["couplings"] = [float(x) for x in disorder.couplings]
    return record


def disorder_from_record(record: dict, verify: bool = True) -> Disorder:
    """Rebuild a Disorder from its record, checking integrity.

    When both seed and couplings are present the couplings are compared
    bit-for-bit against regeneration from the seed; a mismatch means the file
    was corrupted or written by an incompatible generator.
    """
    try:
        n = int(record["n"])
        seed = int(record["seed"])
        sample_index = int(record.get("sample_index", 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise IntegrityError(f"malformed disorder record: {exc}") from exc

    stored = record.get("couplings")
    if stored is None:
        return sample_disorder(n, seed, sample_index)

    couplings = np.asarray(stored, dtype=np.float64)
    if couplings.ndim != 1 or couplings.shape[0] != n_pairs(n):
        raise IntegrityError(
            f"disorder record has {couplings.size} couplings, expected "
            f"{n_pairs(n)} for n={n}"
        )
    if verify:
        regenerated = sample_disorder(n, seed, sample_index)
        if not np.array_equal(regenerated.couplings, couplings):
            raise IntegrityError(
                "stored couplings do not match regeneration from "
                f"(seed={seed}, sample_index={sample_index}, n={n})"
            )
    return Disorder(n=n, couplings=couplings, seed=seed, sample_index=sample_index)


def save_disorder(disorder: Disorder, path: str | Path, include_couplings: bool = True) -> None:
    Path(path).write_text(json.dumps(disorder_to_record(disorder, include_couplings)) + "\n")


def load_disorder(path: str | Path, verify: bool = True) -> Disorder:
    try:
        record = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise IntegrityError(f"disorder file {path} is not valid JSON: {exc}") from exc
    return disorder_from_record(record, verify=verify)
