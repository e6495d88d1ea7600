"""Chunk entropy plus section one-hot, fused into fixed-shape matrices.

Each span of a layout is cut into disjoint chunks (boundaries reset at
every span, default 4096 bytes, the final chunk keeps its true length).
One matrix row per chunk: the chunk's Shannon entropy followed by the
13-element one-hot of the span's class.  Rows are emitted in file-offset
order, then zero-padded or truncated to a fixed row count (default 3600).

Baseline mode keeps only the entropy column, producing (rows, 1) matrices
for ablations against the section-aware (rows, 14) form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .pe_layout import LayoutMap, SectionClass, section_bytes

__all__ = [
    "DEFAULT_CHUNK_SIZE",
    "DEFAULT_MAX_ROWS",
    "NUM_CLASSES",
    "FEATURE_COLS",
    "EmptyChunkError",
    "FeatureMatrix",
    "chunk_section",
    "shannon_entropy",
    "one_hot",
    "chunk_vec",
    "build_feature",
]

DEFAULT_CHUNK_SIZE = 4096
DEFAULT_MAX_ROWS = 3600
NUM_CLASSES = 13
FEATURE_COLS = NUM_CLASSES + 1  # entropy column + one-hot


class EmptyChunkError(ValueError):
    """Entropy of a zero-length chunk is undefined."""


@dataclass(frozen=True)
class FeatureMatrix:
    """A fixed-shape per-file feature.

    ``data`` has shape (max_rows, 14), or (max_rows, 1) in baseline mode,
    stored float32 (the serialized precision).  ``used_rows`` is the
    pre-padding chunk count m and may exceed the row count when the file
    was truncated.  Rows at index >= min(m, max_rows) are all-zero
    padding.
    """

    data: np.ndarray
    used_rows: int

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]


def chunk_section(data: bytes, chunk_size: int) -> list[bytes]:
    """Split one section's bytes into consecutive chunks.

    Returns ceil(len/chunk_size) chunks; all are chunk_size long except
    possibly the last, which holds the remainder.  Empty input gives an
    empty list.  Chunks never straddle sections because each section is
    chunked separately.
    """
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
    return [data[i : i + chunk_size] for i in range(0, len(data), chunk_size)]


def shannon_entropy(chunk: bytes | np.ndarray) -> float:
    """Shannon entropy of a chunk in bits per byte, in [0, 8].

    Computed over the 256-symbol byte alphabet from relative frequencies
    within the chunk; zero-probability symbols contribute nothing.

    Raises:
        EmptyChunkError: on zero-length input.
    """
    arr = np.frombuffer(chunk, dtype=np.uint8) if isinstance(chunk, (bytes, bytearray, memoryview)) else np.asarray(chunk, dtype=np.uint8)
    if arr.size == 0:
        raise EmptyChunkError("cannot compute entropy of an empty chunk")
    counts = np.bincount(arr, minlength=256)
    p = counts[counts > 0] / arr.size
    # + 0.0 folds the -0.0 a negated zero sum produces back to +0.0
    return float(-np.sum(p * np.log2(p)) + 0.0)


def one_hot(cls: SectionClass) -> np.ndarray:
    """13-element float64 vector with a 1 at the class ordinal."""
    v = np.zeros(NUM_CLASSES, dtype=np.float64)
    v[int(cls)] = 1.0
    return v


def chunk_vec(entropy: float, cls: SectionClass) -> np.ndarray:
    """One 14-element row: entropy first, then the class one-hot.

    Raises:
        ValueError: entropy outside [0, 8].
    """
    if not 0.0 <= entropy <= 8.0:
        raise ValueError(f"entropy {entropy!r} outside [0, 8]")
    row = np.empty(FEATURE_COLS, dtype=np.float64)
    row[0] = entropy
    row[1:] = one_hot(cls)
    return row


def build_feature(
    file_bytes: bytes,
    layout: LayoutMap,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    max_rows: int = DEFAULT_MAX_ROWS,
    baseline: bool = False,
) -> FeatureMatrix:
    """Compute the per-file feature matrix for a parsed layout.

    Spans are processed in layout order (ascending file offset, Header
    first); each contributes ceil(raw_size/chunk_size) rows.  Short files
    are zero-padded to max_rows, long ones truncated to the first
    max_rows rows; used_rows always records the untruncated count.

    With ``baseline=True`` only the entropy column is kept.
    """
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
    if max_rows < 1:
        raise ValueError(f"max_rows must be >= 1, got {max_rows}")

    cols = 1 if baseline else FEATURE_COLS
    data = np.zeros((max_rows, cols), dtype=np.float32)

    row = 0
    used_rows = 0
    for span in layout.spans:
        n_chunks = -(-span.raw_size // chunk_size)
        used_rows += n_chunks
        if row >= max_rows:
            continue  # past truncation point; keep counting used_rows
        take = min(n_chunks, max_rows - row)
        span_arr = np.frombuffer(section_bytes(file_bytes, span), dtype=np.uint8)
        ent = _kernels.entropy_blocks(span_arr, chunk_size, take)
        data[row : row + take, 0] = ent
        if not baseline:
            data[row : row + take, 1 + int(span.cls)] = 1.0
        row += take

    return FeatureMatrix(data=data, used_rows=used_rows)
