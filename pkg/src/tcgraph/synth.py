"""Seeded synthetic graphs and embeddings for tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .graph import CsrGraph


def gen_uniform(n: int, avg_degree: float, seed: int) -> CsrGraph:
    """Graph with iid uniform endpoints: scattered columns, ~avg_degree per row."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if avg_degree < 0:
        raise ValueError(f"avg_degree must be >= 0, got {avg_degree}")
    m = int(round(n * avg_degree))
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n, size=m, dtype=np.int64)
    dst = rng.integers(0, n, size=m, dtype=np.int64)
    return CsrGraph.from_edges(src, dst, n)


def gen_powerlaw(n: int, avg_degree: float, seed: int, exponent: float = 2.0) -> CsrGraph:
    """Skewed graph: neighbor popularity follows a shuffled power law, so a
    few hot nodes are shared by many rows."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if avg_degree < 0:
        raise ValueError(f"avg_degree must be >= 0, got {avg_degree}")
    m = int(round(n * avg_degree))
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n, size=m, dtype=np.int64)
    ranks = rng.permutation(n).astype(np.float64) + 1.0
    probs = ranks ** (-exponent)
    probs /= probs.sum()
    dst = rng.choice(n, size=m, p=probs)
    return CsrGraph.from_edges(src, dst, n)


def gen_blockdense(
    num_windows: int, blocks_per_window: int, blk_h: int, seed: int
) -> CsrGraph:
    """Plant whole dense blk_h x blk_h blocks at aligned positions.

    Every row window receives exactly ``blocks_per_window`` fully dense
    square blocks at distinct aligned column offsets, giving a graph of
    N = num_windows*blk_h nodes with sparsity 1 - blocks_per_window*blk_h/N.
    """
    if num_windows < 1 or blk_h < 1:
        raise ValueError("num_windows and blk_h must be >= 1")
    if not 1 <= blocks_per_window <= num_windows:
        raise ValueError(
            f"blocks_per_window must be in [1, {num_windows}], got {blocks_per_window}"
        )
    rng = np.random.default_rng(seed)
    lane = np.arange(blk_h, dtype=np.int64)
    block_rows = np.repeat(lane, blk_h)
    block_cols = np.tile(lane, blk_h)
    src_parts, dst_parts = [], []
    for w in range(num_windows):
        chosen = np.sort(rng.choice(num_windows, size=blocks_per_window, replace=False))
        for cb in chosen:
            src_parts.append(w * blk_h + block_rows)
            dst_parts.append(int(cb) * blk_h + block_cols)
    return CsrGraph.from_edges(
        np.concatenate(src_parts), np.concatenate(dst_parts), num_windows * blk_h
    )


def random_embeddings(num_nodes: int, dim: int, seed: int) -> np.ndarray:
    """Seeded standard-normal float32 embedding matrix."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    return rng.standard_normal((num_nodes, dim), dtype=np.float32)
