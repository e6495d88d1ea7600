"""Acceptance gate for the extraction pipeline.

One test per release criterion, each ending with an explicit PASS line
so a plain `pytest -v -s tests/test_acceptance.py` reads as a checklist.
Tolerances are part of the contract and are pinned here, not imported.
"""

from __future__ import annotations

import io
import struct

import numpy as np
import pytest

from sectropy.cli import main as cli_main
from sectropy.feature_io import (
    FeatureFormatError,
    read_feature,
    write_feature,
)
from sectropy.features import (
    FeatureMatrix,
    build_feature,
    chunk_vec,
    shannon_entropy,
)
from sectropy.pe_layout import MalformedPEError, SectionClass, parse_pe, section_bytes
from sectropy.synth import (
    EntropyProfile,
    SectionDef,
    SynthSpec,
    build_synthetic_pe,
)

from conftest import entropy_oracle


def _pass(criterion: int, message: str) -> None:
    print(f"ACCEPTANCE {criterion}: PASS - {message}")


def test_criterion_1_entropy_matches_independent_oracle():
    rng = np.random.default_rng(0xC0FFEE)
    worst = 0.0
    for _ in range(10_000):
        length = int(rng.integers(1, 4097))
        chunk = rng.integers(0, 256, size=length, dtype=np.uint8).tobytes()
        got = shannon_entropy(chunk)
        want = entropy_oracle(chunk)
        worst = max(worst, abs(got - want))
    assert worst <= 1e-9
    _pass(1, f"10,000 random chunks vs brute-force oracle, max abs diff {worst:.2e}")


def test_criterion_2_closed_form_entropies():
    assert shannon_entropy(b"\x7f" * 4096) == 0.0
    uniform = bytes(range(256)) * 16
    assert abs(shannon_entropy(uniform) - 8.0) <= 1e-12
    two = b"\x00" * 2048 + b"\xff" * 2048
    assert abs(shannon_entropy(two) - 1.0) <= 1e-12
    _pass(2, "constant=0.0 exact, uniform=8.0 and two-symbol=1.0 within 1e-12")


def test_criterion_3_fused_row_example():
    v = chunk_vec(2.3, SectionClass.EDATA)
    expected = [2.3, 0.0, 0.0, 1.0] + [0.0] * 10
    assert v.tolist() == expected
    _pass(3, "entropy 2.3 in .edata gives <2.3,0,0,1,0,...,0> exactly")


def _varied_spec(i: int) -> SynthSpec:
    """200 distinct layouts: cycling section mixes, deliberately odd sizes."""
    menu = [
        (b".text", EntropyProfile.constant(0x90)),
        (b".data", EntropyProfile.two_symbol(0x00, 0xFF, 0.25)),
        (b".rdata", EntropyProfile.uniform()),
        (b".rsrc", EntropyProfile.uniform()),
        (b".reloc", EntropyProfile.constant(0x00)),
        (b".idata", EntropyProfile.two_symbol(0x41, 0x42, 0.5)),
    ]
    n_sections = 1 + i % 4
    sections = tuple(
        SectionDef(
            name=menu[(i + k) % len(menu)][0],
            raw_size=512 * (1 + (i + k) % 9) + (i * 7 + k * 3) % 500,
            profile=menu[(i + k) % len(menu)][1],
        )
        for k in range(n_sections)
    )
    return SynthSpec(sections=sections, overlay_size=(i * 13) % 700, seed=i)


def test_criterion_4_shape_protocol():
    for i in range(200):
        blob = build_synthetic_pe(_varied_spec(i))
        layout = parse_pe(blob)
        expected_rows = sum(-(-s.raw_size // 4096) for s in layout.spans)

        full = build_feature(blob, layout)
        assert full.data.shape == (3600, 14)
        assert full.used_rows == expected_rows
        assert not full.data[full.used_rows :].any()

        base = build_feature(blob, layout, baseline=True)
        assert base.data.shape == (3600, 1)
        assert base.used_rows == expected_rows

    # oversized file: more chunks than rows; the first 3600 survive
    big = SynthSpec(
        sections=(
            SectionDef(b".text", 8 << 20, EntropyProfile.uniform()),
            SectionDef(b".data", 8 << 20, EntropyProfile.two_symbol(0, 255, 0.3)),
        ),
        seed=1,
    )
    blob = build_synthetic_pe(big)
    layout = parse_pe(blob)
    truncated = build_feature(blob, layout)
    untruncated = build_feature(blob, layout, max_rows=8192)
    assert truncated.used_rows > 3600
    assert truncated.used_rows == untruncated.used_rows
    np.testing.assert_array_equal(truncated.data, untruncated.data[:3600])
    _pass(4, "200 files keep (3600,14)/(3600,1) with exact used_rows; truncation keeps first 3600 rows")


def _mutate(blob: bytes, rng: np.random.Generator) -> bytes:
    mode = int(rng.integers(0, 5))
    buf = bytearray(blob)
    if mode == 0 and buf:  # flip random bytes
        for _ in range(int(rng.integers(1, 17))):
            buf[int(rng.integers(0, len(buf)))] = int(rng.integers(0, 256))
    elif mode == 1 and buf:  # truncate
        del buf[int(rng.integers(0, len(buf))) :]
    elif mode == 2:  # extend with noise
        buf += rng.integers(0, 256, size=int(rng.integers(1, 700)), dtype=np.uint8).tobytes()
    elif mode == 3 and len(buf) >= 8:  # stomp a dword somewhere early
        off = int(rng.integers(0, min(len(buf) - 4, 600)))
        struct.pack_into("<I", buf, off, int(rng.integers(0, 2**32)))
    else:  # shuffle a slice
        if len(buf) > 64:
            lo = int(rng.integers(0, len(buf) - 64))
            piece = np.frombuffer(bytes(buf[lo : lo + 64]), dtype=np.uint8)
            buf[lo : lo + 64] = rng.permutation(piece).tobytes()
    return bytes(buf)


def test_criterion_5_fuzzed_parse_totality():
    rng = np.random.default_rng(0xF522)
    bases = [build_synthetic_pe(_varied_spec(i)) for i in range(8)]
    clean_errors = 0
    parsed = 0
    for i in range(1_000):
        if i % 2 == 0:
            data = _mutate(bases[i % len(bases)], rng)
        else:
            data = rng.integers(0, 256, size=int(rng.integers(0, 2000)), dtype=np.uint8).tobytes()
        try:
            layout = parse_pe(data)
        except MalformedPEError:
            clean_errors += 1
            continue
        parsed += 1
        cursor = 0
        for span in layout.spans:
            assert span.file_offset == cursor
            assert span.raw_size > 0
            cursor = span.end
        assert cursor == len(data)
        assert b"".join(section_bytes(data, s) for s in layout.spans) == data
    assert clean_errors + parsed == 1_000
    _pass(5, f"1,000 fuzzed inputs: {parsed} parsed with exact coverage, {clean_errors} clean errors, 0 crashes")


def test_criterion_6_serialization_round_trip_and_fuzz():
    rng = np.random.default_rng(0x5EF3)
    for i in range(1_000):
        rows = int(rng.integers(1, 120)) if i % 50 else 3600
        cols = 14 if i % 3 else 1
        data = (rng.random((rows, cols)) * 8).astype(np.float32)
        m = FeatureMatrix(data=data, used_rows=int(rng.integers(0, 2 * rows)))
        sink = io.BytesIO()
        write_feature(m, sink)
        out = read_feature(io.BytesIO(sink.getvalue()))
        assert out.data.tobytes() == m.data.tobytes()
        assert out.used_rows == m.used_rows

    valid = io.BytesIO()
    write_feature(FeatureMatrix(data=np.ones((30, 14), dtype=np.float32), used_rows=30), valid)
    valid_blob = valid.getvalue()
    for i in range(1_000):
        if i % 2 == 0:
            blob = rng.integers(0, 256, size=int(rng.integers(0, 400)), dtype=np.uint8).tobytes()
        else:
            blob = _mutate(valid_blob, rng)
        try:
            read_feature(io.BytesIO(blob))
        except FeatureFormatError:
            pass
    _pass(6, "1,000 container round-trips bit-exact; 1,000 fuzzed streams handled without crashes")


def test_criterion_7_parallel_extraction_identical(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    for i in range(12):
        (corpus / f"f{i:02d}.pe").write_bytes(build_synthetic_pe(_varied_spec(i)))

    out1 = tmp_path / "w1"
    outn = tmp_path / "w8"
    args = ["--deterministic", "--label", "1"]
    assert cli_main(["extract", str(corpus), "--out", str(out1), "--jobs", "1", *args]) == 0
    assert cli_main(["extract", str(corpus), "--out", str(outn), "--jobs", "8", *args]) == 0

    names1 = sorted(p.name for p in out1.iterdir())
    namesn = sorted(p.name for p in outn.iterdir())
    assert names1 == namesn and len(names1) == 13  # 12 features + manifest
    for name in names1:
        assert (out1 / name).read_bytes() == (outn / name).read_bytes()
    _pass(7, "1-worker and 8-worker batch outputs are byte-identical, manifest included")
