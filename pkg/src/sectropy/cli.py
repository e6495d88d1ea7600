"""Command-line surface for batch extraction, inspection, corpus
generation, and benchmarking.

Exit codes are a fixed contract so shell pipelines can branch on the
failure class:

    0  success
    2  parse failure (malformed PE; or every file in a batch failed)
    3  I/O failure (missing path, unreadable file, unwritable output)
    4  invalid generator spec

Batch extraction parallelizes at file granularity only; outputs are
written atomically (temp file, then rename) and all reporting follows
the input order, so a run with --jobs 8 is byte-identical to --jobs 1.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import bench as bench_mod
from .feature_io import write_feature, write_manifest
from .features import (
    DEFAULT_CHUNK_SIZE,
    DEFAULT_MAX_ROWS,
    build_feature,
    chunk_section,
    shannon_entropy,
)
from .pe_layout import MalformedPEError, parse_pe, section_bytes
from .synth import SpecError, make_corpus, parse_corpus_spec

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_IO = 3
EXIT_SPEC = 4


def _err(message: str) -> None:
    print(f"sectropy: {message}", file=sys.stderr)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def cmd_inspect(args: argparse.Namespace) -> int:
    try:
        data = Path(args.path).read_bytes()
    except OSError as exc:
        _err(f"cannot read {args.path}: {exc}")
        return EXIT_IO
    try:
        layout = parse_pe(data)
    except MalformedPEError as exc:
        _err(f"malformed PE {args.path}: {exc}")
        return EXIT_PARSE

    print(f"{args.path}: {len(data)} bytes, {len(layout.spans)} spans")
    header = f"{'class':<12}{'name':<12}{'offset':>10}{'size':>10}{'chunks':>8}{'min':>8}{'mean':>8}{'max':>8}"
    print(header)
    for span in layout.spans:
        ents = [
            shannon_entropy(c)
            for c in chunk_section(section_bytes(data, span), args.chunk_size)
        ]
        name = span.raw_name.rstrip(b"\x00").decode("latin-1") or "-"
        stats = (
            f"{min(ents):>8.3f}{sum(ents) / len(ents):>8.3f}{max(ents):>8.3f}"
            if ents
            else f"{'-':>8}{'-':>8}{'-':>8}"
        )
        print(
            f"{span.cls.name:<12}{name:<12}{span.file_offset:>10}{span.raw_size:>10}"
            f"{len(ents):>8}{stats}"
        )
    return EXIT_OK


def _expand_inputs(paths: list[str]) -> list[Path]:
    out: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            out.extend(
                c for c in sorted(p.iterdir()) if c.is_file() and c.suffix != ".csv"
            )
        else:
            out.append(p)
    return out


def _extract_one(path: Path, out_dir: Path, args: argparse.Namespace) -> tuple[int | None, str | None]:
    """Returns (used_rows, None) on success, (None, reason) on skip."""
    try:
        data = path.read_bytes()
    except OSError as exc:
        return None, f"io error: {exc}"
    try:
        layout = parse_pe(data)
        matrix = build_feature(
            data,
            layout,
            chunk_size=args.chunk_size,
            max_rows=args.max_rows,
            baseline=args.baseline,
        )
    except MalformedPEError as exc:
        return None, f"malformed: {exc}"
    target = out_dir / (path.stem + ".sefm")
    tmp = out_dir / (path.stem + f".sefm.tmp{os.getpid()}")
    try:
        with open(tmp, "wb") as fh:
            write_feature(matrix, fh)
        os.replace(tmp, target)
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        return None, f"io error: {exc}"
    return matrix.used_rows, None


def cmd_extract(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    inputs = _expand_inputs(args.inputs)
    if not inputs:
        _err("no input files")
        return EXIT_IO
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        _err(f"cannot create {args.out}: {exc}")
        return EXIT_IO

    # Two inputs with the same stem would race for one output file;
    # keep the first, skip the rest.
    seen: set[str] = set()
    unique: list[Path] = []
    dup_skips: dict[Path, str] = {}
    for p in inputs:
        if p.stem in seen:
            dup_skips[p] = "duplicate output name"
        else:
            seen.add(p.stem)
            unique.append(p)

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        outcomes = list(pool.map(lambda p: _extract_one(p, out_dir, args), unique))

    processed = 0
    manifest_entries: list[tuple[str, int]] = []
    results = {p: r for p, r in zip(unique, outcomes)}
    for p in inputs:
        if p in dup_skips:
            print(f"{p}: skipped ({dup_skips[p]})")
            continue
        used_rows, reason = results[p]
        if reason is not None:
            print(f"{p}: skipped ({reason})")
        else:
            print(f"{p}: used_rows={used_rows}")
            processed += 1
            manifest_entries.append((p.stem + ".sefm", args.label))

    skipped = len(inputs) - processed
    if args.label is not None and manifest_entries:
        (out_dir / "manifest.csv").write_text(
            write_manifest(manifest_entries), encoding="utf-8"
        )
    print(f"processed {processed} skipped {skipped}")
    if not args.deterministic:
        print(f"elapsed {time.perf_counter() - t0:.2f}s")
    return EXIT_OK if processed else EXIT_PARSE


def cmd_synth(args: argparse.Namespace) -> int:
    try:
        text = Path(args.spec).read_text(encoding="utf-8")
    except OSError as exc:
        _err(f"cannot read {args.spec}: {exc}")
        return EXIT_IO
    try:
        seed, recipes = parse_corpus_spec(text)
        if args.seed is not None:
            seed = args.seed
        entries = make_corpus(recipes, seed, args.out)
    except SpecError as exc:
        _err(f"spec error: {exc}")
        return EXIT_SPEC
    except OSError as exc:
        _err(f"cannot write corpus: {exc}")
        return EXIT_IO
    print(f"wrote {len(entries)} files + manifest.csv to {args.out} (seed {seed})")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    results = bench_mod.bench_entropy(args.sizes, iterations=args.iters)
    if args.corpus is not None:
        try:
            results.append(bench_mod.bench_parse(args.corpus, iterations=args.iters))
        except (FileNotFoundError, OSError) as exc:
            _err(str(exc))
            return EXIT_IO
    csv_text = bench_mod.results_to_csv(results)
    if args.out is not None:
        try:
            Path(args.out).write_text(csv_text, encoding="utf-8")
        except OSError as exc:
            _err(f"cannot write {args.out}: {exc}")
            return EXIT_IO
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sectropy",
        description="Section-aware structural entropy features for PE binaries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_inspect = sub.add_parser("inspect", help="print the span layout of one PE file")
    p_inspect.add_argument("path")
    p_inspect.add_argument("--chunk-size", type=_positive_int, default=DEFAULT_CHUNK_SIZE)
    p_inspect.set_defaults(func=cmd_inspect)

    p_extract = sub.add_parser("extract", help="batch-extract .sefm feature files")
    p_extract.add_argument("inputs", nargs="+", help="PE files or directories of them")
    p_extract.add_argument("--out", required=True, help="output directory")
    p_extract.add_argument("--chunk-size", type=_positive_int, default=DEFAULT_CHUNK_SIZE)
    p_extract.add_argument("--max-rows", type=_positive_int, default=DEFAULT_MAX_ROWS)
    p_extract.add_argument("--baseline", action="store_true", help="entropy-only output (cols=1)")
    p_extract.add_argument("--jobs", type=_positive_int, default=1, help="worker threads")
    p_extract.add_argument(
        "--deterministic", action="store_true", help="suppress timing lines"
    )
    p_extract.add_argument(
        "--label",
        type=int,
        choices=(0, 1),
        default=None,
        help="also write manifest.csv tagging every output with this label",
    )
    p_extract.set_defaults(func=cmd_extract)

    p_synth = sub.add_parser("synth", help="generate a synthetic corpus from a spec file")
    p_synth.add_argument("spec", help="corpus spec file")
    p_synth.add_argument("--out", required=True, help="output directory")
    p_synth.add_argument("--seed", type=int, default=None, help="override the spec seed")
    p_synth.set_defaults(func=cmd_synth)

    p_bench = sub.add_parser("bench", help="entropy-kernel and pipeline throughput")
    p_bench.add_argument(
        "--sizes",
        type=int,
        nargs="+",
        default=[4096, 65536, 1048576],
        help="buffer sizes for the entropy benchmark",
    )
    p_bench.add_argument("--iters", type=int, default=bench_mod.MIN_ITERATIONS)
    p_bench.add_argument("--corpus", default=None, help="also measure parse+extract over this dir")
    p_bench.add_argument("--out", default=None, help="write CSV here instead of stdout")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
