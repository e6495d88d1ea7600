"""Shared test helpers: an independent entropy oracle and spec builders.

The oracle deliberately avoids numpy so it cannot share a bug with the
implementation under test: plain Counter histogram, math.log2, float
accumulation.
"""

from __future__ import annotations

import math
from collections import Counter

import pytest

from sectropy.synth import EntropyProfile, SectionDef, SynthSpec


def entropy_oracle(data: bytes) -> float:
    """Brute-force Shannon entropy in bits/byte over the 256-byte alphabet."""
    counts = Counter(data)
    n = len(data)
    total = 0.0
    for c in counts.values():
        p = c / n
        total -= p * math.log2(p)
    return total + 0.0


def simple_spec(seed: int = 0, overlay: int = 0) -> SynthSpec:
    """Two-section layout used wherever the exact shape is irrelevant."""
    return SynthSpec(
        sections=(
            SectionDef(b".text", 8192, EntropyProfile.constant(0x90)),
            SectionDef(b".rsrc", 4096, EntropyProfile.uniform()),
        ),
        overlay_size=overlay,
        seed=seed,
    )


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """Ten deterministic PE files on disk, for CLI and bench tests."""
    from sectropy.synth import CorpusRecipe, make_corpus

    out = tmp_path_factory.mktemp("small_corpus")
    recipes = [
        CorpusRecipe(label=0, template=simple_spec(overlay=256), count=6),
        CorpusRecipe(
            label=1,
            template=SynthSpec(
                sections=(
                    SectionDef(b".data", 4096, EntropyProfile.two_symbol(0x00, 0xFF, 0.25)),
                    SectionDef(b".text", 12288, EntropyProfile.uniform()),
                ),
            ),
            count=4,
        ),
    ]
    entries = make_corpus(recipes, seed=2024, out_dir=out)
    return out, entries
