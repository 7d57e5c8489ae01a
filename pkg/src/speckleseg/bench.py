"""Benchmark harness: run (image, algorithm) cells, collect timing medians, export CSV.

Each cell runs once unrecorded to warm caches and JIT, then ``repeat``
recorded times; the reported wall time is the median. All columns except
the wall time are deterministic for fixed inputs and seeds.
"""

from __future__ import annotations

import hashlib
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields as dataclass_fields
from typing import Optional, Sequence

import numpy as np

from .metrics import pp_uniformity
from .solvers import SolverConfig, run

CSV_HEADER = "image_id,algorithm,iterations,wall_seconds_median,pp,dice,params_digest"


@dataclass(frozen=True)
class BenchImage:
    """One benchmark input: the field to segment plus optional references.

    ``reference`` is the image pp is scored on (the clean phantom when one
    exists, else the input itself); ``truth`` enables the dice column.
    """

    image_id: str
    f: np.ndarray
    reference: Optional[np.ndarray] = None
    truth: Optional[np.ndarray] = None


@dataclass(frozen=True)
class RunRecord:
    """One benchmark cell, mirroring one (image, algorithm) table entry."""

    image_id: str
    algorithm: str
    iterations: int
    wall_seconds: float
    pp: float
    dice: Optional[float]
    params_digest: str


def params_digest(cfg: SolverConfig) -> str:
    """Short stable hash of the effective solver configuration."""
    parts = []
    for fld in dataclass_fields(cfg):
        value = getattr(cfg, fld.name)
        if fld.name == "model":
            for mfld in dataclass_fields(value):
                parts.append(f"model.{mfld.name}={getattr(value, mfld.name)!r}")
        else:
            parts.append(f"{fld.name}={value!r}")
    blob = ";".join(sorted(parts)).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:12]


def run_cell(image: BenchImage, cfg: SolverConfig, repeat: int = 5) -> RunRecord:
    """Run one (image, algorithm) cell with a warmup and ``repeat`` timings."""
    run(image.f, cfg, truth=image.truth)  # warmup (JIT, caches)
    walls = []
    result = None
    for _ in range(max(repeat, 1)):
        result = run(image.f, cfg, truth=image.truth)
        walls.append(result.wall_seconds)
    pp = (
        pp_uniformity(image.reference, result.mask)
        if image.reference is not None
        else result.pp
    )
    return RunRecord(
        image_id=image.image_id,
        algorithm=cfg.algorithm,
        iterations=result.iterations,
        wall_seconds=statistics.median(walls),
        pp=pp,
        dice=result.dice,
        params_digest=params_digest(cfg),
    )


def run_benchmark(
    images: Sequence[BenchImage],
    configs: Sequence[SolverConfig],
    repeat: int = 5,
    workers: int = 1,
) -> list[RunRecord]:
    """All (image, algorithm) cells; records come back in manifest order
    regardless of completion order."""
    cells = [(img, cfg) for img in images for cfg in configs]
    if workers <= 1:
        return [run_cell(img, cfg, repeat) for img, cfg in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_cell, img, cfg, repeat) for img, cfg in cells]
        return [fut.result() for fut in futures]


def format_record(rec: RunRecord) -> str:
    dice = "" if rec.dice is None else f"{rec.dice:.6f}"
    return (
        f"{rec.image_id},{rec.algorithm},{rec.iterations},"
        f"{rec.wall_seconds:.6f},{rec.pp:.6f},{dice},{rec.params_digest}"
    )


def write_csv(records: Sequence[RunRecord], path) -> None:
    """UTF-8, LF line endings, fixed header."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for rec in records:
            fh.write(format_record(rec) + "\n")
