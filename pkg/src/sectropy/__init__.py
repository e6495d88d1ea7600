"""Section-aware structural entropy features for PE binaries.

Parses the section table of a PE file, partitions the raw file image
into per-section chunks, computes Shannon entropy per chunk, and tags
each chunk with a one-hot section-class vector.  The result is a
fixed-shape feature matrix suitable for convolutional models, plus a
compact binary container (.sefm) and manifest format for exchanging
extracted features.
"""

from .pe_layout import (
    SectionClass,
    SectionSpan,
    LayoutMap,
    MalformedPEError,
    OutOfBoundsError,
    classify_section,
    parse_pe,
    section_bytes,
)
from .features import (
    DEFAULT_CHUNK_SIZE,
    DEFAULT_MAX_ROWS,
    NUM_CLASSES,
    FEATURE_COLS,
    EmptyChunkError,
    FeatureMatrix,
    build_feature,
    chunk_section,
    chunk_vec,
    one_hot,
    shannon_entropy,
)
from .feature_io import (
    FeatureFormatError,
    BadMagicError,
    UnsupportedVersionError,
    TruncatedPayloadError,
    ManifestError,
    DuplicatePathError,
    read_feature,
    read_feature_file,
    write_feature,
    write_feature_file,
    read_manifest,
    write_manifest,
    export_csv,
)
from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "SectionClass",
    "SectionSpan",
    "LayoutMap",
    "MalformedPEError",
    "OutOfBoundsError",
    "classify_section",
    "parse_pe",
    "section_bytes",
    "DEFAULT_CHUNK_SIZE",
    "DEFAULT_MAX_ROWS",
    "NUM_CLASSES",
    "FEATURE_COLS",
    "EmptyChunkError",
    "FeatureMatrix",
    "build_feature",
    "chunk_section",
    "chunk_vec",
    "one_hot",
    "shannon_entropy",
    "FeatureFormatError",
    "BadMagicError",
    "UnsupportedVersionError",
    "TruncatedPayloadError",
    "ManifestError",
    "DuplicatePathError",
    "read_feature",
    "read_feature_file",
    "write_feature",
    "write_feature_file",
    "read_manifest",
    "write_manifest",
    "export_csv",
    "BACKEND",
    "__version__",
]
