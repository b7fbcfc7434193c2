"""Disorder-ensemble orchestration: statistics, manifests, checkpointed runs.

An experiment is a grid of independent units, each fully determined by its
entry in the manifest. Every completed unit leaves a marker file keyed by the
unit's content hash, so interrupted runs resume without recomputing and a
rerun with the same manifest reproduces the record files byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .errors import ConfigError, IntegrityError

RECORDS_FILE = "records.csv"
SUMMARY_FILE = "summary.json"
MANIFEST_FILE = "manifest.json"
MARKER_DIR = "markers"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def stable_hash64(*parts) -> int:
    """64-bit content hash; stable across runs and platforms (unlike hash())."""
    digest = hashlib.blake2b(
        "\x1f".join(str(p) for p in parts).encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")


def derive_seed(master_seed: int, experiment_id: str) -> int:
    """Per-experiment base seed; sample streams split off it by sample_index."""
    return stable_hash64("seed", master_seed, experiment_id)


@dataclass(frozen=True)
class EnsembleStats:
    """Running mean/stderr/min/max of one scalar observable over a disorder ensemble.

    ``m2`` is the sum of squared deviations from the mean; keeping it (rather
    than the derived stderr) is what lets two partial summaries merge exactly.
    """

    observable: str
    n: int | None
    beta: float | None
    count: int
    mean: float
    m2: float
    min: float
    max: float
    failed: int = 0

    @property
    def variance(self) -> float:
        """Unbiased sample variance."""
        if self.count < 2:
            return 0.0
        return self.m2 / (self.count - 1)

    @property
    def stderr(self) -> float:
        if self.count < 2:
            return 0.0
        return math.sqrt(self.variance / self.count)

    def key(self) -> tuple:
        return (self.observable, self.n, self.beta)

    def to_dict(self) -> dict:
        return {
            "observable": self.observable,
            "n": self.n,
            "beta": self.beta,
            "count": self.count,
            "mean": self.mean,
            "stderr": self.stderr,
            "m2": self.m2,
            "min": self.min,
            "max": self.max,
            "failed": self.failed,
        }


def stats_from_values(
    observable: str,
    values: Iterable[float],
    n: int | None = None,
    beta: float | None = None,
    failed: int = 0,
) -> EnsembleStats:
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        return EnsembleStats(observable, n, beta, 0, 0.0, 0.0, math.inf, -math.inf, failed)
    mean = float(np.mean(arr))
    m2 = float(np.sum((arr - mean) ** 2))
    return EnsembleStats(
        observable=observable,
        n=n,
        beta=beta,
        count=int(arr.size),
        mean=mean,
        m2=m2,
        min=float(arr.min()),
        max=float(arr.max()),
        failed=failed,
    )


def merge_stats(a: EnsembleStats, b: EnsembleStats) -> EnsembleStats:
    """Exact combination of two partial summaries (parallel-variance rule)."""
    if a.key() != b.key():
        raise ConfigError(f"cannot merge stats with keys {a.key()} and {b.key()}")
    if a.count == 0:
        return replace(b, failed=a.failed + b.failed)
    if b.count == 0:
        return replace(a, failed=a.failed + b.failed)
    count = a.count + b.count
    delta = b.mean - a.mean
    mean = a.mean + delta * (b.count / count)
    m2 = a.m2 + b.m2 + delta * delta * (a.count * b.count / count)
    return EnsembleStats(
        observable=a.observable,
        n=a.n,
        beta=a.beta,
        count=count,
        mean=mean,
        m2=m2,
        min=min(a.min, b.min),
        max=max(a.max, b.max),
        failed=a.failed + b.failed,
    )


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce an experiment: id, master seed, unit grid."""

    experiment_id: str
    master_seed: int
    grid: tuple[dict, ...]
    out_dir: Path
    version: str = "0.1.0"

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(dict(u) for u in self.grid))
        object.__setattr__(self, "out_dir", Path(self.out_dir))

    @property
    def root(self) -> Path:
        return self.out_dir / self.experiment_id

    def to_dict(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "master_seed": self.master_seed,
            "grid": list(self.grid),
            "version": self.version,
        }


def make_units(
    manifest_params: Iterable[dict],
    samples: int,
    master_seed: int,
    experiment_id: str,
) -> list[dict]:
    """Expand parameter points into per-sample units with derived seeds."""
    units = []
    base_seed = derive_seed(master_seed, experiment_id)
    for params in manifest_params:
        for idx in range(samples):
            units.append({**params, "seed": base_seed, "sample_index": idx})
    return units


def unit_key(unit: dict) -> str:
    return hashlib.blake2b(canonical_json(unit).encode(), digest_size=16).hexdigest()


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + f".tmp{os.getpid()}")
    tmp.write_text(text)
    tmp.replace(path)


def write_records_csv(path: Path, rows: list[dict]) -> None:
    """Deterministic CSV: fixed column order, shortest round-trip float repr."""
    if not rows:
        path.write_text("")
        return
    fieldnames = list(rows[0].keys())
    lines = [",".join(fieldnames)]
    for row in rows:
        lines.append(",".join(_format_cell(row.get(name)) for name in fieldnames))
    _write_atomic(path, "\n".join(lines) + "\n")


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def run_ensemble(
    manifest: RunManifest,
    evaluator: Callable[[dict], dict],
    workers: int = 1,
    on_error: str = "abort",
    reproducible: bool = True,
) -> tuple[dict[tuple, EnsembleStats], list[dict]]:
    """Execute all incomplete units of a manifest with checkpointing.

    The evaluator must be a pure function of its unit dict and return a flat
    record of scalars. Each finished unit is persisted as a marker file before
    the next starts, so a killed run resumes where it left off. Under the
    reproducible flag the aggregation order is the grid order regardless of
    completion order, and the emitted records.csv is byte-identical across
    reruns with the same manifest.

    Returns the per-(observable, n, beta) statistics and the record rows.
    """
    if on_error not in ("abort", "skip"):
        raise ConfigError(f"on_error must be 'abort' or 'skip', got {on_error!r}")
    root = manifest.root
    markers = root / MARKER_DIR
    markers.mkdir(parents=True, exist_ok=True)

    manifest_path = root / MANIFEST_FILE
    manifest_json = canonical_json(manifest.to_dict())
    if manifest_path.exists():
        if manifest_path.read_text().strip() != manifest_json:
            raise IntegrityError(
                f"{manifest_path} holds a different manifest; refusing to mix experiments"
            )
    else:
        _write_atomic(manifest_path, manifest_json)

    keyed = [(unit_key(unit), unit) for unit in manifest.grid]
    outcomes: dict[str, dict] = {}
    pending = []
    for key, unit in keyed:
        marker = markers / f"{key}.json"
        if marker.exists():
            outcomes[key] = json.loads(marker.read_text())
        else:
            pending.append((key, unit, marker))

    def run_unit(item):
        key, unit, marker = item
        try:
            record = evaluator(unit)
            outcome = {"unit": unit, "record": record}
        except Exception as exc:  # noqa: BLE001 - failure is part of the contract
            if on_error == "abort":
                # no marker: the unit stays incomplete and reruns on resume
                raise
            outcome = {"unit": unit, "error": f"{type(exc).__name__}: {exc}"}
        _write_atomic(marker, canonical_json(outcome))
        return key, outcome

    if workers <= 1:
        for item in pending:
            key, outcome = run_unit(item)
            outcomes[key] = outcome
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for key, outcome in pool.map(run_unit, pending):
                outcomes[key] = outcome

    if reproducible:
        ordered = keyed
    else:
        ordered = [(key, outcomes[key]["unit"]) for key in outcomes]
    rows: list[dict] = []
    failures: dict[tuple, int] = {}
    grouped: dict[tuple, list[float]] = {}
    for key, unit in ordered:
        # column order comes from the in-memory unit plus sorted record keys,
        # so rows rebuilt from marker files lay out identically to fresh ones
        outcome = outcomes[key]
        group = (unit.get("n"), unit.get("beta"))
        if "error" in outcome:
            failures[group] = failures.get(group, 0) + 1
            continue
        record = outcome["record"]
        rows.append({**unit, **{name: record[name] for name in sorted(record)}})
        for name in sorted(record):
            value = record[name]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                continue
            grouped.setdefault((name, *group), []).append(float(value))

    stats: dict[tuple, EnsembleStats] = {}
    for (name, n, beta), values in grouped.items():
        stats[(name, n, beta)] = stats_from_values(
            name, values, n=n, beta=beta, failed=failures.get((n, beta), 0)
        )

    write_records_csv(root / RECORDS_FILE, rows)
    summary = {
        "experiment_id": manifest.experiment_id,
        "master_seed": manifest.master_seed,
        "version": manifest.version,
        "stats": [stats[k].to_dict() for k in sorted(stats, key=str)],
    }
    _write_atomic(root / SUMMARY_FILE, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return stats, rows
