"""Deterministic synthetic PE generator.

Builds minimal, structurally valid PE32+ images with prescribed section
names, sizes and content profiles, for tests and desk-scale corpora.
Files carry a real DOS header, PE signature, COFF header, optional
header, and section table; raw data starts at 512-byte-aligned offsets.
They are not runnable and contain no import machinery.

All pseudo-randomness comes from the splitmix64 mixing generator so that
corpora are reproducible from (spec, seed) alone, independently of any
library RNG.  For a 64-bit state s, one step is:

    s += 0x9E3779B97F4A7C15
    z = s
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    output = z ^ (z >> 31)

(all arithmetic mod 2^64).  Output j of a sequence seeded with s0 is
therefore mix64(s0 + j * 0x9E3779B97F4A7C15); sub-seeds for sections,
overlay and corpus files are taken from such sequences (see
`derive_seed`).
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "SpecError",
    "EntropyProfile",
    "SectionDef",
    "SynthSpec",
    "CorpusRecipe",
    "splitmix64_stream",
    "derive_seed",
    "build_synthetic_pe",
    "make_corpus",
    "parse_corpus_spec",
]

FILE_ALIGNMENT = 512
SECTION_ALIGNMENT = 0x1000

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1


class SpecError(ValueError):
    """Invalid generator spec (bad name, size, profile, or recipe)."""

    def __init__(self, message: str, line: int | None = None) -> None:
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Output `index` (1-based) of the splitmix64 sequence seeded `seed`."""
    return _mix64((seed + index * _GOLDEN) & _MASK64)


def splitmix64_stream(seed: int, nbytes: int) -> bytes:
    """First `nbytes` bytes of the splitmix64 output stream for `seed`.

    Outputs are emitted little-endian, 8 bytes per generator step.
    """
    if nbytes <= 0:
        return b""
    n_words = -(-nbytes // 8)
    idx = np.arange(1, n_words + 1, dtype=np.uint64)
    z = (np.uint64(seed & _MASK64) + idx * np.uint64(_GOLDEN))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    z = z ^ (z >> np.uint64(31))
    return z.tobytes()[:nbytes]


@dataclass(frozen=True)
class EntropyProfile:
    """Content recipe for one section.

    kind: "constant" (every byte equals byte_a), "two" (a byte_a block
    followed by a byte_b block at the given ratio), or "uniform"
    (splitmix64 stream).
    """

    kind: str
    byte_a: int = 0
    byte_b: int = 0
    ratio: float = 0.5

    @staticmethod
    def constant(value: int) -> "EntropyProfile":
        return EntropyProfile(kind="constant", byte_a=value)

    @staticmethod
    def two_symbol(a: int, b: int, ratio: float) -> "EntropyProfile":
        return EntropyProfile(kind="two", byte_a=a, byte_b=b, ratio=ratio)

    @staticmethod
    def uniform() -> "EntropyProfile":
        return EntropyProfile(kind="uniform")

    def validate(self) -> None:
        if self.kind not in ("constant", "two", "uniform"):
            raise SpecError(f"unknown profile kind {self.kind!r}")
        if not 0 <= self.byte_a <= 255 or not 0 <= self.byte_b <= 255:
            raise SpecError(f"profile bytes must be in [0, 255], got {self.byte_a}, {self.byte_b}")
        if self.kind == "two" and not 0.0 < self.ratio < 1.0:
            raise SpecError(f"two-symbol ratio must be in (0, 1), got {self.ratio}")

    def render(self, size: int, seed: int) -> bytes:
        if self.kind == "constant":
            return bytes([self.byte_a]) * size
        if self.kind == "two":
            n_a = round(size * self.ratio)
            return bytes([self.byte_a]) * n_a + bytes([self.byte_b]) * (size - n_a)
        return splitmix64_stream(seed, size)


@dataclass(frozen=True)
class SectionDef:
    name: bytes
    raw_size: int
    profile: EntropyProfile

    def validate(self) -> None:
        if not self.name or len(self.name) > 8:
            raise SpecError(f"section name must be 1-8 bytes, got {self.name!r}")
        if self.raw_size < 1:
            raise SpecError(f"section {self.name!r} raw_size must be >= 1, got {self.raw_size}")
        self.profile.validate()


@dataclass(frozen=True)
class SynthSpec:
    sections: tuple[SectionDef, ...]
    overlay_size: int = 0
    seed: int = 0

    def validate(self) -> None:
        if self.overlay_size < 0:
            raise SpecError(f"overlay_size must be >= 0, got {self.overlay_size}")
        for s in self.sections:
            s.validate()

    def with_seed(self, seed: int) -> "SynthSpec":
        return SynthSpec(sections=self.sections, overlay_size=self.overlay_size, seed=seed)


@dataclass(frozen=True)
class CorpusRecipe:
    label: int
    template: SynthSpec
    count: int


def _align(value: int, alignment: int) -> int:
    return -(-value // alignment) * alignment


def _section_characteristics(name: bytes) -> int:
    if name == b".text":
        return 0x60000020  # code | execute | read
    if name in (b".data", b".tls"):
        return 0xC0000040  # initialized data | read | write
    return 0x40000040  # initialized data | read


def build_synthetic_pe(spec: SynthSpec) -> bytes:
    """Render a spec to PE bytes; deterministic in (spec, seed).

    Section i's content stream is seeded with derive_seed(spec.seed, i+1);
    the overlay (uniform-random bytes) with derive_seed(spec.seed, n+1).

    Raises:
        SpecError: invalid section name, size, or profile.
    """
    spec.validate()
    n_sections = len(spec.sections)

    # DOS header (64 bytes) + PE signature + COFF + PE32+ optional header
    # (240 bytes incl. 16 data directories) + section table.
    e_lfanew = 64
    header_raw_end = e_lfanew + 4 + 20 + 240 + 40 * n_sections
    headers_size = _align(header_raw_end, FILE_ALIGNMENT)

    offsets: list[int] = []
    cursor = headers_size
    for s in spec.sections:
        offsets.append(cursor)
        cursor = _align(cursor + s.raw_size, FILE_ALIGNMENT)
    file_end = (offsets[-1] + spec.sections[-1].raw_size) if spec.sections else headers_size

    vaddrs: list[int] = []
    va = SECTION_ALIGNMENT
    for s in spec.sections:
        vaddrs.append(va)
        va += _align(max(s.raw_size, 1), SECTION_ALIGNMENT)
    size_of_image = va if spec.sections else SECTION_ALIGNMENT

    dos = bytearray(64)
    dos[0:2] = b"MZ"
    struct.pack_into("<I", dos, 0x3C, e_lfanew)

    coff = struct.pack(
        "<4sHHIIIHH",
        b"PE\x00\x00",
        0x8664,  # AMD64
        n_sections,
        0,  # TimeDateStamp
        0,
        0,
        240,  # SizeOfOptionalHeader (PE32+)
        0x0022,  # EXECUTABLE_IMAGE | LARGE_ADDRESS_AWARE
    )

    size_of_code = sum(s.raw_size for s in spec.sections if s.name == b".text")
    opt = struct.pack(
        "<HBBIIIII QIIHHHHHHIIIIHH QQQQ II",
        0x20B,  # PE32+
        14, 0,  # linker version
        size_of_code,
        sum(s.raw_size for s in spec.sections if s.name != b".text"),
        0,
        vaddrs[0] if spec.sections else 0,  # entry point
        vaddrs[0] if spec.sections else 0,  # base of code
        0x140000000,  # image base
        SECTION_ALIGNMENT,
        FILE_ALIGNMENT,
        6, 0,  # OS version
        0, 0,  # image version
        6, 0,  # subsystem version
        0,
        size_of_image,
        headers_size,
        0,  # checksum
        3,  # console subsystem
        0,  # dll characteristics
        0x100000, 0x1000, 0x100000, 0x1000,  # stack/heap reserve+commit
        0,
        16,  # NumberOfRvaAndSizes
    )
    data_dirs = bytes(16 * 8)

    table = bytearray()
    for s, off, vaddr in zip(spec.sections, offsets, vaddrs):
        table += struct.pack(
            "<8sIIIIIIHHI",
            s.name.ljust(8, b"\x00"),
            s.raw_size,  # VirtualSize
            vaddr,
            s.raw_size,  # SizeOfRawData
            off,
            0, 0, 0, 0,
            _section_characteristics(s.name),
        )

    image = bytearray(file_end)
    pos = 0
    for part in (dos, coff, opt, data_dirs, table):
        image[pos : pos + len(part)] = part
        pos += len(part)
    for i, (s, off) in enumerate(zip(spec.sections, offsets)):
        image[off : off + s.raw_size] = s.profile.render(s.raw_size, derive_seed(spec.seed, i + 1))
    if spec.overlay_size:
        image += splitmix64_stream(derive_seed(spec.seed, n_sections + 1), spec.overlay_size)
    return bytes(image)


def make_corpus(
    class_recipes: list[CorpusRecipe],
    seed: int,
    out_dir: str | os.PathLike,
) -> list[tuple[str, int]]:
    """Generate `count` files per recipe into `out_dir`.

    File j of recipe r is built from the template with seed
    derive_seed(derive_seed(seed, r+1), j+1), so the corpus is
    byte-identical across runs.  Writes `manifest.csv` alongside the
    files and returns its (relative path, label) entries.

    Raises:
        SpecError: a recipe with count < 1 or an invalid template.
    """
    from .feature_io import write_manifest

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries: list[tuple[str, int]] = []
    for r, recipe in enumerate(class_recipes):
        if recipe.count < 1:
            raise SpecError(f"recipe {r} count must be >= 1, got {recipe.count}")
        recipe.template.validate()
        recipe_seed = derive_seed(seed, r + 1)
        for j in range(recipe.count):
            name = f"c{recipe.label}_r{r}_{j:04d}.pe"
            data = build_synthetic_pe(recipe.template.with_seed(derive_seed(recipe_seed, j + 1)))
            (out / name).write_bytes(data)
            entries.append((name, recipe.label))
    (out / "manifest.csv").write_text(write_manifest(entries), encoding="utf-8")
    return entries


def _parse_int(text: str, line: int) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise SpecError(f"expected an integer, got {text!r}", line) from None


def _parse_profile(fields: list[str], line: int) -> EntropyProfile:
    kind = fields[0]
    if kind == "uniform" and len(fields) == 1:
        return EntropyProfile.uniform()
    if kind == "constant" and len(fields) == 2:
        return EntropyProfile.constant(_parse_int(fields[1], line))
    if kind == "two" and len(fields) == 4:
        try:
            ratio = float(fields[3])
        except ValueError:
            raise SpecError(f"expected a ratio, got {fields[3]!r}", line) from None
        return EntropyProfile.two_symbol(_parse_int(fields[1], line), _parse_int(fields[2], line), ratio)
    raise SpecError(f"bad profile {':'.join(fields)!r}", line)


def parse_corpus_spec(text: str) -> tuple[int, list[CorpusRecipe]]:
    """Parse the declarative corpus-spec format.

    Line-oriented: `#` comments, a top-level `seed = N`, and one or more
    `[recipe]` blocks with `label`, `count`, optional `overlay`, and one
    `section = name:size:profile` line per section.  Profiles are
    `uniform`, `constant:BYTE`, or `two:BYTE:BYTE:RATIO` (integers accept
    0x-prefixed hex).

    Raises:
        SpecError: with the offending line number.
    """
    seed = 0
    recipes: list[CorpusRecipe] = []
    current: dict | None = None

    def finish(line: int) -> None:
        nonlocal current
        if current is None:
            return
        if current["label"] is None:
            raise SpecError("recipe missing label", line)
        if current["count"] is None:
            raise SpecError("recipe missing count", line)
        spec = SynthSpec(sections=tuple(current["sections"]), overlay_size=current["overlay"])
        try:
            spec.validate()
        except SpecError as exc:
            raise SpecError(str(exc), current["line"]) from None
        recipes.append(CorpusRecipe(label=current["label"], template=spec, count=current["count"]))
        current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped == "[recipe]":
            finish(lineno)
            current = {"label": None, "count": None, "overlay": 0, "sections": [], "line": lineno}
            continue
        if "=" not in stripped:
            raise SpecError(f"expected 'key = value', got {stripped!r}", lineno)
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if current is None:
            if key != "seed":
                raise SpecError(f"unexpected key {key!r} outside [recipe]", lineno)
            seed = _parse_int(value, lineno)
            continue
        if key == "label":
            label = _parse_int(value, lineno)
            if label not in (0, 1):
                raise SpecError(f"label must be 0 or 1, got {label}", lineno)
            current["label"] = label
        elif key == "count":
            current["count"] = _parse_int(value, lineno)
        elif key == "overlay":
            current["overlay"] = _parse_int(value, lineno)
        elif key == "section":
            fields = value.split(":")
            if len(fields) < 3:
                raise SpecError(f"section needs name:size:profile, got {value!r}", lineno)
            name = fields[0].encode("latin-1")
            size = _parse_int(fields[1], lineno)
            profile = _parse_profile(fields[2:], lineno)
            sect = SectionDef(name=name, raw_size=size, profile=profile)
            try:
                sect.validate()
            except SpecError as exc:
                raise SpecError(str(exc), lineno) from None
            current["sections"].append(sect)
        else:
            raise SpecError(f"unknown key {key!r}", lineno)

    finish(len(text.splitlines()) + 1)
    if not recipes:
        raise SpecError("spec defines no [recipe] blocks", 1)
    return seed, recipes
