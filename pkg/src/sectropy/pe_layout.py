"""Minimal PE layout parser.

Parses just enough of the Portable Executable format (DOS header, PE
signature, COFF header, section table) to partition a file's raw bytes
into classified, non-overlapping spans that cover the whole file.

The layout is defined by the *file* image: section extents come from
PointerToRawData/SizeOfRawData, never from virtual addresses.  Bytes not
claimed by the header or any section (alignment gaps, trailing overlay)
are classified as Undefined.

All header fields are little-endian.  No imports, exports, relocations,
resources or certificates are touched.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

__all__ = [
    "SectionClass",
    "SectionSpan",
    "LayoutMap",
    "MalformedPEError",
    "OutOfBoundsError",
    "classify_section",
    "parse_pe",
    "section_bytes",
]

MZ_MAGIC = b"MZ"
PE_MAGIC = b"PE\x00\x00"

E_LFANEW_OFFSET = 0x3C
COFF_HEADER_SIZE = 20
SECTION_HEADER_SIZE = 40


class SectionClass(enum.IntEnum):
    """The 13 layout classes, in fixed one-hot order.

    The ordinal doubles as the index into the 13-element one-hot vector:
    HEADER is index 0, UNDEFINED index 12, and the 11 named classes sit
    in between (e.g. EDATA at index 2).
    """

    HEADER = 0
    DATA = 1
    EDATA = 2
    IDATA = 3
    PDATA = 4
    RDATA = 5
    RSRC = 6
    RELOC = 7
    TEXT = 8
    TLS = 9
    SDATA = 10
    XDATA = 11
    UNDEFINED = 12


# Exact, case-sensitive raw names of the 11 classes assigned by name.
# HEADER and UNDEFINED are assigned structurally, never by name.
_NAME_TABLE: dict[bytes, SectionClass] = {
    b".data": SectionClass.DATA,
    b".edata": SectionClass.EDATA,
    b".idata": SectionClass.IDATA,
    b".pdata": SectionClass.PDATA,
    b".rdata": SectionClass.RDATA,
    b".rsrc": SectionClass.RSRC,
    b".reloc": SectionClass.RELOC,
    b".text": SectionClass.TEXT,
    b".tls": SectionClass.TLS,
    b".sdata": SectionClass.SDATA,
    b".xdata": SectionClass.XDATA,
}


class MalformedPEError(ValueError):
    """The input cannot be parsed as a PE file.

    Attributes:
        structure: Name of the structure that failed to parse.
        offset: File offset where parsing failed.
    """

    def __init__(self, message: str, structure: str, offset: int) -> None:
        super().__init__(f"{message} (structure={structure}, offset={offset:#x})")
        self.structure = structure
        self.offset = offset


class OutOfBoundsError(ValueError):
    """A span points outside the file it is applied to."""


@dataclass(frozen=True)
class SectionSpan:
    """A contiguous byte range of the file, tagged with its class.

    ``raw_name`` is the 8-byte section-table name with trailing NULs
    stripped; synthetic spans (Header, gap/overlay Undefined) carry an
    empty name.  ``raw_size`` is always positive.
    """

    raw_name: bytes
    cls: SectionClass
    file_offset: int
    raw_size: int

    @property
    def end(self) -> int:
        return self.file_offset + self.raw_size


@dataclass(frozen=True)
class LayoutMap:
    """Ordered, disjoint, full-coverage partition of a file.

    Invariants (guaranteed by :func:`parse_pe`):
      * spans are sorted by ``file_offset`` and pairwise disjoint;
      * the first span is the Header span starting at offset 0;
      * every byte index in ``[0, total_len)`` lies in exactly one span.
    """

    spans: tuple[SectionSpan, ...]
    total_len: int


def classify_section(raw_name: bytes) -> SectionClass:
    """Map a raw section-table name to its class.

    Trailing NUL padding is stripped; the result must then match one of
    the 11 canonical dotted names exactly (case-sensitive).  Anything
    else, including nonstandard casings like ``.TEXT``, is UNDEFINED.
    Never raises.
    """
    return _NAME_TABLE.get(raw_name.rstrip(b"\x00"), SectionClass.UNDEFINED)


def parse_pe(file_bytes: bytes) -> LayoutMap:
    """Partition ``file_bytes`` into classified spans.

    The Header span runs from offset 0 to the lowest PointerToRawData of
    any section carrying raw data (the whole file if there is none).
    Section extents are clamped to the file length; overlaps are resolved
    first-wins in ascending offset order (the later span is shrunk or
    dropped).  Gaps and trailing overlay become Undefined spans.

    Raises:
        MalformedPEError: missing MZ or PE signatures, e_lfanew out of
            bounds, section table past end of file, or a section whose
            PointerToRawData lies at/past the end of the file.
    """
    n = len(file_bytes)
    if n < 2 or file_bytes[:2] != MZ_MAGIC:
        raise MalformedPEError("missing MZ magic", "dos_header", 0)
    if n < E_LFANEW_OFFSET + 4:
        raise MalformedPEError("file too short for e_lfanew", "dos_header", E_LFANEW_OFFSET)

    e_lfanew = struct.unpack_from("<I", file_bytes, E_LFANEW_OFFSET)[0]
    if e_lfanew + 4 > n:
        raise MalformedPEError("e_lfanew out of bounds", "dos_header", E_LFANEW_OFFSET)
    if file_bytes[e_lfanew : e_lfanew + 4] != PE_MAGIC:
        raise MalformedPEError("missing PE signature", "nt_headers", e_lfanew)

    coff_offset = e_lfanew + 4
    if coff_offset + COFF_HEADER_SIZE > n:
        raise MalformedPEError("truncated COFF header", "coff_header", coff_offset)
    num_sections = struct.unpack_from("<H", file_bytes, coff_offset + 2)[0]
    opt_header_size = struct.unpack_from("<H", file_bytes, coff_offset + 16)[0]

    table_offset = coff_offset + COFF_HEADER_SIZE + opt_header_size
    table_end = table_offset + num_sections * SECTION_HEADER_SIZE
    if table_end > n:
        raise MalformedPEError("section table past end of file", "section_table", table_offset)

    # Collect sections that carry raw data.  PointerToRawData == 0 means
    # "no data on disk" (uninitialized sections), so such entries are
    # dropped along with zero-size ones rather than flagged.
    sections: list[tuple[int, int, bytes]] = []
    for i in range(num_sections):
        entry = table_offset + i * SECTION_HEADER_SIZE
        raw_name = file_bytes[entry : entry + 8].rstrip(b"\x00")
        raw_size = struct.unpack_from("<I", file_bytes, entry + 16)[0]
        ptr = struct.unpack_from("<I", file_bytes, entry + 20)[0]
        if ptr >= n:
            raise MalformedPEError(
                f"section {i} PointerToRawData past end of file", "section_header", entry
            )
        if ptr == 0 or raw_size == 0:
            continue
        raw_size = min(raw_size, n - ptr)  # clamp truncated sections
        sections.append((ptr, raw_size, raw_name))

    sections.sort(key=lambda s: s[0])

    spans: list[SectionSpan] = []
    header_end = sections[0][0] if sections else n
    spans.append(SectionSpan(b"", SectionClass.HEADER, 0, header_end))
    cursor = header_end

    for ptr, raw_size, raw_name in sections:
        start = max(ptr, cursor)  # first-wins: earlier span keeps the overlap
        end = ptr + raw_size
        if end <= start:
            continue
        if start > cursor:
            spans.append(SectionSpan(b"", SectionClass.UNDEFINED, cursor, start - cursor))
        spans.append(SectionSpan(raw_name, classify_section(raw_name), start, end - start))
        cursor = end

    if cursor < n:
        spans.append(SectionSpan(b"", SectionClass.UNDEFINED, cursor, n - cursor))

    return LayoutMap(spans=tuple(spans), total_len=n)


def section_bytes(file_bytes: bytes, span: SectionSpan) -> bytes:
    """Extract the raw bytes a span covers.

    Raises:
        OutOfBoundsError: the span does not fit in ``file_bytes``
            (a span from a different file was passed).
    """
    if span.file_offset < 0 or span.end > len(file_bytes):
        raise OutOfBoundsError(
            f"span [{span.file_offset}, {span.end}) exceeds file of {len(file_bytes)} bytes"
        )
    return file_bytes[span.file_offset : span.end]
