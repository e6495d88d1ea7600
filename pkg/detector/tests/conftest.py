"""Fixtures: a self-contained .sefm writer and two synthetic corpora.

The writer mirrors the container contract from the package docstring
independently of the reader under test: header `<4sHIII`, float32 LE
payload, row-major.

Feature rows here are (entropy, 13-wide one-hot): column 0 carries the
entropy value, column 1+k the one-hot flag for section class ordinal k.
The two corpora exercise the two acceptance behaviors:

  ambiguity corpus    both classes share one entropy profile (a low
                      block then a high block); only WHICH class tag
                      carries each block differs.  Entropy-only features
                      are class-uninformative by construction.
  separable corpus    class-distinct entropy levels under a single tag;
                      trivially learnable.  Also provides a label-
                      shuffled manifest for the null-model check.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np
import pytest

ROWS = 256
COLS = 14
TEXT_COL = 1 + 8  # section class ordinal 8
RSRC_COL = 1 + 6  # section class ordinal 6

_HEADER = struct.Struct("<4sHIII")


def write_sefm(path: Path, data: np.ndarray, used_rows: int) -> None:
    data = np.ascontiguousarray(data, dtype="<f4")
    rows, cols = data.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(b"SEFM", 1, rows, cols, used_rows))
        fh.write(data.tobytes())


def write_manifest(path: Path, entries: list[tuple[str, int]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["path", "label"])
        writer.writerows(entries)


def _blocks(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """One sample's entropy sequence: 96 low rows then 96 high rows."""
    low = rng.uniform(1.2, 1.8, size=96)
    high = rng.uniform(6.2, 6.8, size=96)
    return low, high


def _sample(low: np.ndarray, high: np.ndarray, low_col: int, high_col: int) -> np.ndarray:
    data = np.zeros((ROWS, COLS), dtype=np.float32)
    data[:96, 0] = low
    data[:96, low_col] = 1.0
    data[96:192, 0] = high
    data[96:192, high_col] = 1.0
    return data  # rows 192.. stay zero padding


def _write_corpus(out: Path, samples: list[tuple[np.ndarray, int]]) -> tuple[Path, Path]:
    """Write full and entropy-only variants; returns both manifest paths."""
    full_dir = out / "full"
    base_dir = out / "baseline"
    full_dir.mkdir(parents=True)
    base_dir.mkdir(parents=True)
    entries = []
    for i, (data, label) in enumerate(samples):
        name = f"{i:04d}.sefm"
        write_sefm(full_dir / name, data, used_rows=192)
        write_sefm(base_dir / name, data[:, :1], used_rows=192)
        entries.append((name, label))
    write_manifest(full_dir / "manifest.csv", entries)
    write_manifest(base_dir / "manifest.csv", entries)
    return full_dir / "manifest.csv", base_dir / "manifest.csv"


@pytest.fixture(scope="session")
def ambiguity_corpus(tmp_path_factory) -> tuple[Path, Path]:
    """150 samples per class; classes differ only in tag placement."""
    rng = np.random.default_rng(815)
    samples = []
    for _ in range(150):
        low, high = _blocks(rng)
        samples.append((_sample(low, high, low_col=TEXT_COL, high_col=RSRC_COL), 0))
    for _ in range(150):
        low, high = _blocks(rng)
        samples.append((_sample(low, high, low_col=RSRC_COL, high_col=TEXT_COL), 1))
    return _write_corpus(tmp_path_factory.mktemp("ambiguity"), samples)


@pytest.fixture(scope="session")
def separable_corpus(tmp_path_factory) -> tuple[Path, Path]:
    """500 samples per class with class-distinct entropy levels; returns
    (true-label manifest, label-shuffled manifest) over one file set."""
    rng = np.random.default_rng(1117)
    out = tmp_path_factory.mktemp("separable")
    files = out / "files"
    files.mkdir()
    entries = []
    for i in range(1000):
        label = i % 2
        level = 2.0 if label == 0 else 6.0
        data = np.zeros((ROWS, COLS), dtype=np.float32)
        data[:192, 0] = rng.uniform(level - 0.2, level + 0.2, size=192)
        data[:192, TEXT_COL] = 1.0
        name = f"{i:04d}.sefm"
        write_sefm(files / name, data, used_rows=192)
        entries.append((name, label))
    write_manifest(files / "manifest.csv", entries)

    shuffled_labels = rng.permutation([label for _, label in entries])
    shuffled = [(name, int(lbl)) for (name, _), lbl in zip(entries, shuffled_labels)]
    write_manifest(files / "manifest_shuffled.csv", shuffled)
    return files / "manifest.csv", files / "manifest_shuffled.csv"
