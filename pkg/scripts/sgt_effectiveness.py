#!/usr/bin/env python3
"""Tile-count reduction study: occupied tiles before vs after condensation.

Reports both the aggregation granularity (blk_h x blk_w operand tiles) and
the square-output granularity (blk_h x blk_h tiles) for each input graph.
With no inputs, runs on a small synthetic set.

Usage:
    python scripts/sgt_effectiveness.py [graph files ...] [--blk-h 16 --blk-w 8]
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from tcgraph import (
    BlockConfig,
    count_blocks_after,
    count_blocks_before,
    load_graph,
    paired_block_counts,
    translate,
)
from tcgraph import synth


def synthetic_set():
    return [
        ("uniform_4096_d8", synth.gen_uniform(4096, 8, 1)),
        ("uniform_16384_d16", synth.gen_uniform(16384, 16, 2)),
        ("powerlaw_8192_d8", synth.gen_powerlaw(8192, 8, 3)),
        ("blockdense_256w_4", synth.gen_blockdense(256, 4, 16, 4)),
    ]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("inputs", nargs="*", help="graph files (edge list or .mtx)")
    ap.add_argument("--blk-h", type=int, default=16)
    ap.add_argument("--blk-w", type=int, default=8)
    args = ap.parse_args()

    if args.inputs:
        graphs = [(Path(p).stem, load_graph(p)) for p in args.inputs]
    else:
        graphs = synthetic_set()

    cfg = BlockConfig(args.blk_h, args.blk_w)
    square = BlockConfig(args.blk_h, args.blk_h)
    print(
        "dataset,N,M,agg_before,agg_after,agg_reduction_pct,"
        "sq_before,sq_after,sq_reduction_pct,translate_ms"
    )
    for name, g in graphs:
        t0 = time.perf_counter()
        t = translate(g, cfg)
        ms = (time.perf_counter() - t0) * 1e3
        agg_before, _ = count_blocks_before(g, cfg)
        agg_after = count_blocks_after(t)
        sq_before, _ = count_blocks_before(g, square)
        sq_after = int(paired_block_counts(t).sum())

        def pct(before, after):
            return 100.0 * (1 - after / before) if before else 0.0

        print(
            f"{name},{g.num_nodes},{g.num_edges},{agg_before},{agg_after},"
            f"{pct(agg_before, agg_after):.2f},{sq_before},{sq_after},"
            f"{pct(sq_before, sq_after):.2f},{ms:.2f}"
        )


if __name__ == "__main__":
    main()
