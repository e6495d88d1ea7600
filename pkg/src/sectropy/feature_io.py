"""Bit-exact serialization of feature matrices and dataset manifests.

The .sefm container is a fixed little-endian layout:

    offset  size  field
    0       4     magic "SEFM"
    4       2     version (currently 1), u16
    6       4     rows, u32
    10      4     cols, u32 (1 or 14)
    14      4     used_rows, u32
    18      -     rows*cols IEEE-754 float32 values, row-major

Manifests are plain CSV with the header line "path,label"; labels are 0
(benign) or 1 (malware) and paths must be unique.
"""

from __future__ import annotations

import csv
import io
import struct
from typing import BinaryIO, TextIO

import numpy as np

from .features import FEATURE_COLS, FeatureMatrix

__all__ = [
    "MAGIC",
    "VERSION",
    "HEADER_SIZE",
    "FeatureFormatError",
    "BadMagicError",
    "UnsupportedVersionError",
    "TruncatedPayloadError",
    "ManifestError",
    "DuplicatePathError",
    "write_feature",
    "read_feature",
    "write_manifest",
    "read_manifest",
    "export_csv",
]

MAGIC = b"SEFM"
VERSION = 1
HEADER_SIZE = 18
_HEADER_FMT = "<4sHIII"

VALID_LABELS = (0, 1)


class FeatureFormatError(ValueError):
    """Base for malformed .sefm streams."""


class BadMagicError(FeatureFormatError):
    pass


class UnsupportedVersionError(FeatureFormatError):
    pass


class TruncatedPayloadError(FeatureFormatError):
    pass


class ManifestError(ValueError):
    """Malformed manifest text; carries the 1-based offending line."""

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"{message} (line {line})")
        self.line = line


class DuplicatePathError(ManifestError):
    pass


def _check_matrix(matrix: FeatureMatrix) -> np.ndarray:
    data = matrix.data
    if data.ndim != 2 or data.shape[1] not in (1, FEATURE_COLS):
        raise ValueError(f"feature matrix must be (rows, 1) or (rows, {FEATURE_COLS}), got {data.shape}")
    if matrix.used_rows < 0:
        raise ValueError(f"used_rows must be >= 0, got {matrix.used_rows}")
    return np.ascontiguousarray(data, dtype=np.float32)


def write_feature(matrix: FeatureMatrix, sink: BinaryIO) -> int:
    """Serialize a matrix to the .sefm layout; returns bytes written."""
    data = _check_matrix(matrix)
    rows, cols = data.shape
    header = struct.pack(_HEADER_FMT, MAGIC, VERSION, rows, cols, matrix.used_rows)
    sink.write(header)
    payload = data.tobytes()
    sink.write(payload)
    return len(header) + len(payload)


def read_feature(source: BinaryIO) -> FeatureMatrix:
    """Inverse of :func:`write_feature`; round-trips bit-exactly.

    Raises:
        BadMagicError, UnsupportedVersionError, TruncatedPayloadError.
    """
    header = source.read(HEADER_SIZE)
    if len(header) < HEADER_SIZE:
        raise TruncatedPayloadError(f"header is {len(header)} bytes, need {HEADER_SIZE}")
    magic, version, rows, cols, used_rows = struct.unpack(_HEADER_FMT, header)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported version {version}, expected {VERSION}")
    if cols not in (1, FEATURE_COLS):
        raise FeatureFormatError(f"cols must be 1 or {FEATURE_COLS}, got {cols}")
    expected = rows * cols * 4
    payload = source.read(expected)
    if len(payload) < expected:
        raise TruncatedPayloadError(f"payload is {len(payload)} bytes, header promises {expected}")
    data = np.frombuffer(payload, dtype="<f4").reshape(rows, cols).copy()
    return FeatureMatrix(data=data, used_rows=used_rows)


def read_feature_file(path) -> FeatureMatrix:
    with open(path, "rb") as fh:
        return read_feature(fh)


def write_feature_file(matrix: FeatureMatrix, path) -> int:
    with open(path, "wb") as fh:
        return write_feature(matrix, fh)


def write_manifest(entries: list[tuple[str, int]]) -> str:
    """Render (path, label) pairs as manifest CSV text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["path", "label"])
    for path, label in entries:
        if label not in VALID_LABELS:
            raise ValueError(f"label must be 0 or 1, got {label!r} for {path!r}")
        writer.writerow([path, label])
    return buf.getvalue()


def read_manifest(text: str) -> list[tuple[str, int]]:
    """Parse manifest CSV text back into (path, label) pairs.

    Raises:
        ManifestError: bad header, field count, or label outside {0, 1}.
        DuplicatePathError: a path occurs twice.
    """
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or rows[0] != ["path", "label"]:
        raise ManifestError(f"expected header 'path,label', got {rows[0] if rows else 'empty input'}", 1)
    entries: list[tuple[str, int]] = []
    seen: set[str] = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ManifestError(f"expected 2 fields, got {len(row)}", lineno)
        path, label_text = row
        try:
            label = int(label_text)
        except ValueError:
            raise ManifestError(f"label {label_text!r} is not an integer", lineno) from None
        if label not in VALID_LABELS:
            raise ManifestError(f"label must be 0 or 1, got {label}", lineno)
        if path in seen:
            raise DuplicatePathError(f"duplicate path {path!r}", lineno)
        seen.add(path)
        entries.append((path, label))
    return entries


def export_csv(matrix: FeatureMatrix, sink: TextIO) -> None:
    """Human-inspectable dump: one line per row, entropy to 8 decimal
    places, one-hot entries as bare integers.

    The entropy cell renders the shortest decimal that round-trips the
    stored value (so a stored float32 2.3 prints as 2.30000000, not its
    raw binary expansion), padded to 8 decimal places.
    """
    for row in matrix.data:
        cells = [f"{float(str(row[0])):.8f}"]
        cells.extend(str(int(v)) for v in row[1:])
        sink.write(",".join(cells) + "\n")
