"""Micro-benchmarks for the entropy kernels and the parse+extract path.

Informational only: numbers are machine-dependent and nothing in the
test suite gates on them.  Measurement loops are single-threaded; each
row reports the median over its iterations.  Running a benchmark never
touches extraction state, so feature outputs are identical with
benchmarking on or off.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .features import build_feature
from .pe_layout import MalformedPEError, parse_pe
from .synth import splitmix64_stream

__all__ = ["BenchResult", "bench_entropy", "bench_parse", "results_to_csv"]

MIN_ITERATIONS = 10

_BENCH_SEED = 0x5EC7B0BE


@dataclass(frozen=True)
class BenchResult:
    """One measurement row: median throughput for an operation."""

    operation: str
    nbytes: int
    mb_per_s: float
    iterations: int


def _backends() -> list[tuple[str, object]]:
    pairs: list[tuple[str, object]] = []
    if _kernels.entropy_blocks_numba is not None:
        pairs.append(("entropy-numba", _kernels.entropy_blocks_numba))
    pairs.append(("entropy-numpy", _kernels.entropy_blocks_numpy))
    return pairs


def _median_seconds(fn, iterations: int) -> float:
    fn()  # warm-up; also triggers JIT compilation outside the timed region
    samples = []
    for _ in range(iterations):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return float(np.median(samples))


def bench_entropy(sizes: list[int], iterations: int = MIN_ITERATIONS) -> list[BenchResult]:
    """Entropy throughput over seeded random buffers, one row per
    (backend, size).  Both kernels are measured when the JIT backend is
    available, so their relative speed is visible in one report.
    """
    iterations = max(iterations, MIN_ITERATIONS)
    results: list[BenchResult] = []
    for name, kernel in _backends():
        for size in sizes:
            buf = np.frombuffer(splitmix64_stream(_BENCH_SEED, size), dtype=np.uint8)
            sec = _median_seconds(lambda: kernel(buf, size, 1), iterations)
            results.append(
                BenchResult(
                    operation=name,
                    nbytes=size,
                    mb_per_s=size / sec / 1e6,
                    iterations=iterations,
                )
            )
    return results


def bench_parse(corpus_dir: str, iterations: int = MIN_ITERATIONS) -> BenchResult:
    """End-to-end parse+extract throughput over a corpus directory.

    Each iteration runs the full pipeline over every parseable file;
    the row aggregates total bytes per pass.

    Raises:
        FileNotFoundError: missing or empty corpus directory.
    """
    iterations = max(iterations, MIN_ITERATIONS)
    root = Path(corpus_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {corpus_dir}")
    blobs = [
        p.read_bytes()
        for p in sorted(root.iterdir())
        if p.is_file() and p.suffix != ".csv"
    ]
    if not blobs:
        raise FileNotFoundError(f"no corpus files in {corpus_dir}")

    def one_pass() -> None:
        for data in blobs:
            try:
                layout = parse_pe(data)
            except MalformedPEError:
                continue
            build_feature(data, layout)

    total = sum(len(b) for b in blobs)
    sec = _median_seconds(one_pass, iterations)
    return BenchResult(
        operation="parse-extract",
        nbytes=total,
        mb_per_s=total / sec / 1e6,
        iterations=iterations,
    )


def results_to_csv(results: list[BenchResult]) -> str:
    lines = ["operation,bytes,mb_per_s,iters"]
    for r in results:
        lines.append(f"{r.operation},{r.nbytes},{r.mb_per_s:.3f},{r.iterations}")
    return "\n".join(lines) + "\n"
