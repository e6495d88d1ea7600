"""Reading .sefm feature files and manifests; stratified splitting.

This package deliberately talks to the extraction side only through its
two on-disk formats, so the reader here is self-contained:

    .sefm      18-byte header `<4sHIII` (magic "SEFM", version=1, rows,
               cols, used_rows) followed by rows*cols little-endian
               float32 values, row-major.
    manifest   CSV with header `path,label`; labels are 0 or 1; paths
               are relative to the manifest's directory and unique.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

__all__ = [
    "FeatureFormatError",
    "ManifestError",
    "ShapeMismatchError",
    "InsufficientSamplesError",
    "read_sefm",
    "read_manifest",
    "load_dataset",
    "split_dataset",
]

_MAGIC = b"SEFM"
_VERSION = 1
_HEADER = struct.Struct("<4sHIII")


class FeatureFormatError(ValueError):
    """Feature file violates the .sefm container layout."""


class ManifestError(ValueError):
    """Manifest text violates the path,label CSV contract."""


class ShapeMismatchError(ValueError):
    """Files in one manifest disagree on (rows, cols)."""


class InsufficientSamplesError(ValueError):
    """A class has too few samples to split into train and test."""


def read_sefm(path: str | Path) -> tuple[np.ndarray, int]:
    """Read one feature file; returns (float32 array (rows, cols), used_rows).

    Raises:
        FeatureFormatError: bad magic, unsupported version, truncation,
            or a column count outside {1, 14}.
    """
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise FeatureFormatError(f"{path}: truncated header ({len(blob)} bytes)")
    magic, version, rows, cols, used_rows = _HEADER.unpack_from(blob)
    if magic != _MAGIC:
        raise FeatureFormatError(f"{path}: bad magic {magic!r}")
    if version != _VERSION:
        raise FeatureFormatError(f"{path}: unsupported version {version}")
    if cols not in (1, 14):
        raise FeatureFormatError(f"{path}: column count {cols} not in {{1, 14}}")
    expected = rows * cols * 4
    payload = blob[_HEADER.size :]
    if len(payload) < expected:
        raise FeatureFormatError(
            f"{path}: payload holds {len(payload)} bytes, header promises {expected}"
        )
    data = np.frombuffer(payload[:expected], dtype="<f4").reshape(rows, cols).copy()
    return data, used_rows


def read_manifest(path: str | Path) -> list[tuple[str, int]]:
    """Parse a manifest file into (relative path, label) pairs.

    Raises:
        ManifestError: bad header, field count, non-binary label, or
            duplicate path.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["path", "label"]:
        raise ManifestError(f"{path}: expected header 'path,label'")
    entries: list[tuple[str, int]] = []
    seen: set[str] = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ManifestError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
        rel, label_text = row
        try:
            label = int(label_text)
        except ValueError:
            raise ManifestError(f"{path}:{lineno}: label {label_text!r} is not an integer") from None
        if label not in (0, 1):
            raise ManifestError(f"{path}:{lineno}: label must be 0 or 1, got {label}")
        if rel in seen:
            raise ManifestError(f"{path}:{lineno}: duplicate path {rel!r}")
        seen.add(rel)
        entries.append((rel, label))
    return entries


def load_dataset(manifest_path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Load every feature file a manifest references.

    Returns (features (N, rows, cols) float32, labels (N,) int64), in
    manifest order.

    Raises:
        ShapeMismatchError: referenced files disagree on rows or cols,
            or the manifest is empty.
        FeatureFormatError, ManifestError: propagated from the readers.
    """
    manifest_path = Path(manifest_path)
    entries = read_manifest(manifest_path)
    if not entries:
        raise ShapeMismatchError(f"{manifest_path}: manifest references no files")
    base = manifest_path.parent
    arrays: list[np.ndarray] = []
    labels: list[int] = []
    shape: tuple[int, int] | None = None
    for rel, label in entries:
        data, _ = read_sefm(base / rel)
        if shape is None:
            shape = data.shape
        elif data.shape != shape:
            raise ShapeMismatchError(
                f"{rel}: shape {data.shape} disagrees with earlier files {shape}"
            )
        arrays.append(data)
        labels.append(label)
    return np.stack(arrays), np.asarray(labels, dtype=np.int64)


def split_dataset(
    features: np.ndarray,
    labels: np.ndarray,
    ratio: float = 0.7,
    seed: int = 0,
) -> tuple[tuple[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """Stratified train/test split, deterministic in seed.

    Each class contributes round(ratio * count) training samples (always
    leaving at least one sample on each side), so the per-class train
    fraction is within one sample of the requested ratio.

    Returns ((train_x, train_y), (test_x, test_y)).

    Raises:
        InsufficientSamplesError: some class has fewer than 2 samples.
        ValueError: ratio outside (0, 1).
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    rng = np.random.default_rng(seed)
    train_idx: list[np.ndarray] = []
    test_idx: list[np.ndarray] = []
    for cls in (0, 1):
        idx = np.flatnonzero(labels == cls)
        if idx.size < 2:
            raise InsufficientSamplesError(
                f"class {cls} has {idx.size} sample(s); need at least 2"
            )
        idx = rng.permutation(idx)
        n_train = min(max(round(ratio * idx.size), 1), idx.size - 1)
        train_idx.append(idx[:n_train])
        test_idx.append(idx[n_train:])
    train = np.sort(np.concatenate(train_idx))
    test = np.sort(np.concatenate(test_idx))
    return (features[train], labels[train]), (features[test], labels[test])
