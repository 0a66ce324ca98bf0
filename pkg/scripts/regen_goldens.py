#!/usr/bin/env python3
"""Regenerate the binary golden files under tests/golden/.

Only run this when the on-disk formats change intentionally; the test
suite compares fresh serializations byte-for-byte against these files.
"""

from pathlib import Path

import numpy as np

from tcgraph import BlockConfig, CsrGraph, translate, write_tcem, write_tcgt
from tcgraph import synth

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def main() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)

    four = CsrGraph.from_edges([0, 0, 1, 2], [0, 3, 3, 1], 4)
    write_tcgt(translate(four, BlockConfig(blk_h=2, blk_w=2)), GOLDEN / "tiny.tcgt")

    x = np.array([[1, 0], [0, 1], [2, 2], [5, 5]], dtype=np.float32)
    write_tcem(x, GOLDEN / "tiny.tcem")

    g = synth.gen_uniform(100, 4, 42)
    write_tcgt(translate(g, BlockConfig()), GOLDEN / "uniform100.tcgt")

    for p in sorted(GOLDEN.iterdir()):
        print(f"{p.name}: {p.stat().st_size} bytes")


if __name__ == "__main__":
    main()
