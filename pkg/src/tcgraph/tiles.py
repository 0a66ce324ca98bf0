"""Fixed-shape dense tiles and the emulated matrix-multiply-accumulate.

The MMA primitive computes D = A*B + C on small dense tiles: operands may
be quantized to TF-32 precision (10 explicit mantissa bits) while the
accumulator stays full 32-bit float, and products fold into C in ascending
k order so results are bitwise reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sgt import TiledGraph

ROW_MAJOR = "row_major"
COL_MAJOR = "col_major"

TF32_MMA_M = 16
TF32_MMA_N = 16
TF32_MMA_K = 8

_EXP_MASK = np.uint32(0x7F800000)
_ROUND_MASK = np.uint32(0xFFFFE000)
_HALF_LSB = np.uint32(0x0FFF)


@dataclass
class Tile:
    """A rows*cols dense float32 operand with a declared storage layout.

    ``data`` holds the logical matrix; ``flat()`` returns the buffer in the
    declared element order. A-operands are row_major, B-operands col_major.
    """

    rows: int
    cols: int
    layout: str
    data: np.ndarray

    def __post_init__(self):
        if self.layout not in (ROW_MAJOR, COL_MAJOR):
            raise ValueError(f"unknown layout {self.layout!r}")
        self.data = np.ascontiguousarray(self.data, dtype=np.float32)
        if self.data.shape != (self.rows, self.cols):
            raise ValueError(
                f"tile data shape {self.data.shape} != declared {self.rows}x{self.cols}"
            )

    def flat(self) -> np.ndarray:
        order = "C" if self.layout == ROW_MAJOR else "F"
        return self.data.ravel(order=order)

    @classmethod
    def zeros(cls, rows: int, cols: int, layout: str = ROW_MAJOR) -> "Tile":
        return cls(rows, cols, layout, np.zeros((rows, cols), dtype=np.float32))

    @classmethod
    def from_matrix(cls, matrix, layout: str = ROW_MAJOR) -> "Tile":
        m = np.asarray(matrix, dtype=np.float32)
        if m.ndim != 2:
            raise ValueError(f"tile matrix must be 2-D, got shape {m.shape}")
        return cls(m.shape[0], m.shape[1], layout, m)


def quantize_tf32(x):
    """Round float32 value(s) to the nearest 10-explicit-mantissa-bit value.

    Round-to-nearest-even on the dropped 13 mantissa bits; carries may bump
    the exponent (that is the correct nearest value). NaN and infinity pass
    through unchanged. Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=np.float32)
    bits = arr.view(np.uint32)
    lsb = (bits >> np.uint32(13)) & np.uint32(1)
    rounded = (bits + _HALF_LSB + lsb) & _ROUND_MASK
    special = (bits & _EXP_MASK) == _EXP_MASK
    out = np.where(special, bits, rounded).view(np.float32)
    if arr.ndim == 0:
        return np.float32(out[()])
    return out


def mma(a: Tile, b: Tile, c: Tile, mode: str = "f32") -> Tile:
    """D = A*B + C on tiles: products accumulate into C in ascending k order.

    In tf32 mode both operands are quantized per element first and the
    shape must be M=16, K=8, N=16; the accumulator stays float32 either
    way. Exact mode allows any compatible shapes.
    """
    if a.cols != b.rows or a.rows != c.rows or b.cols != c.cols:
        raise ValueError(
            f"mma shape mismatch: A {a.rows}x{a.cols}, B {b.rows}x{b.cols}, "
            f"C {c.rows}x{c.cols}"
        )
    if a.layout != ROW_MAJOR:
        raise ValueError("operand A must be row_major")
    if b.layout != COL_MAJOR:
        raise ValueError("operand B must be col_major")
    if mode == "tf32":
        if (a.rows, a.cols, b.cols) != (TF32_MMA_M, TF32_MMA_K, TF32_MMA_N):
            raise ValueError(
                f"tf32 mode requires {TF32_MMA_M}x{TF32_MMA_K} * "
                f"{TF32_MMA_K}x{TF32_MMA_N} tiles, got "
                f"{a.rows}x{a.cols} * {b.rows}x{b.cols}"
            )
        am = quantize_tf32(a.data)
        bm = quantize_tf32(b.data)
    elif mode == "f32":
        am, bm = a.data, b.data
    else:
        raise ValueError(f"unknown precision mode {mode!r}")
    d = c.data.copy()
    for k in range(a.cols):
        d += am[:, k : k + 1] * bm[k : k + 1, :]
    return Tile(c.rows, c.cols, ROW_MAJOR, d)


def _check_block(t: TiledGraph, window: int, block: int) -> None:
    if not 0 <= window < t.num_row_windows:
        raise IndexError(f"window {window} out of range [0, {t.num_row_windows})")
    if not 0 <= block < int(t.win_partition[window]):
        raise IndexError(
            f"block {block} out of range [0, {int(t.win_partition[window])}) "
            f"in window {window}"
        )


def init_sparse(t: TiledGraph, window: int, block: int, values=None) -> Tile:
    """Densify one adjacency tile: entry (r, c) is the edge value of the
    window's row r toward condensed column block*blk_w + c, else 0.

    ``values`` optionally overrides the graph's edge values (aligned with
    edge_list), which is how per-edge weights enter the aggregation.
    """
    _check_block(t, window, block)
    g = t._require_graph()
    bh, bw = t.config.blk_h, t.config.blk_w
    lo, hi = t.window_edge_range(window)
    cols = t.edge_to_col[lo:hi].astype(np.int64)
    rows = t.window_edge_rows(window)
    sel = (cols >= block * bw) & (cols < (block + 1) * bw)
    data = np.zeros((bh, bw), dtype=np.float32)
    if values is not None:
        vals = np.asarray(values, dtype=np.float32)[lo:hi][sel]
    elif g.edge_values is not None:
        vals = g.edge_values[lo:hi][sel]
    else:
        vals = np.float32(1.0)
    data[rows[sel], cols[sel] - block * bw] = vals
    return Tile(bh, bw, ROW_MAJOR, data)


def fetch_dense(
    t: TiledGraph,
    x: np.ndarray,
    window: int,
    block: int,
    dim_start: int,
    dim_count: int,
) -> Tile:
    """Gather the embedding rows behind one tile's condensed columns.

    Row k of the result is the embedding row of the node condensed at
    column block*blk_w + k, restricted to dims [dim_start, dim_start+dim_count).
    Condensed columns past the window's unique count become zero rows.
    """
    _check_block(t, window, block)
    d = x.shape[1]
    if dim_start < 0 or dim_count < 0 or dim_start + dim_count > d:
        raise ValueError(
            f"dim range [{dim_start}, {dim_start + dim_count}) outside [0, {d})"
        )
    bw = t.config.blk_w
    lo = t.col_offsets[window] + block * bw
    hi = min(lo + bw, t.col_offsets[window + 1])
    nodes = t.col_to_node[lo:hi]
    data = np.zeros((bw, dim_count), dtype=np.float32)
    data[: nodes.shape[0]] = x[nodes, dim_start : dim_start + dim_count]
    return Tile(bw, dim_count, COL_MAJOR, data)


def fetch_dense_rows(
    x: np.ndarray,
    row_start: int,
    num_rows: int,
    dim_start: int,
    dim_count: int,
) -> Tile:
    """Consecutive embedding rows as a row_major tile, zero rows past N."""
    d = x.shape[1]
    if dim_start < 0 or dim_count < 0 or dim_start + dim_count > d:
        raise ValueError(
            f"dim range [{dim_start}, {dim_start + dim_count}) outside [0, {d})"
        )
    data = np.zeros((num_rows, dim_count), dtype=np.float32)
    r1 = min(row_start + num_rows, x.shape[0])
    if r1 > row_start:
        data[: r1 - row_start] = x[row_start:r1, dim_start : dim_start + dim_count]
    return Tile(num_rows, dim_count, ROW_MAJOR, data)


def store_dense(out: np.ndarray, tile: Tile, window: int, dim_start: int) -> None:
    """Write a result tile into the output rows of its window.

    Rows land at [window*blk_h, ...), columns at [dim_start, ...). Rows past
    the end of the matrix (short last window) are discarded. The caller owns
    the target rectangle exclusively; concurrent writers must not overlap.
    """
    r0 = window * tile.rows
    if r0 > out.shape[0] or r0 < 0:
        raise IndexError(f"window {window} writes past output rows {out.shape[0]}")
    if dim_start < 0 or dim_start + tile.cols > out.shape[1]:
        raise ValueError(
            f"dim range [{dim_start}, {dim_start + tile.cols}) outside "
            f"[0, {out.shape[1]})"
        )
    r1 = min(r0 + tile.rows, out.shape[0])
    out[r0:r1, dim_start : dim_start + tile.cols] = tile.data[: r1 - r0]


def store_sparse(
    edge_vals: np.ndarray,
    tile: Tile,
    t: TiledGraph,
    window: int,
    block: int,
) -> None:
    """Scatter an output tile back to the per-edge value list.

    ``block`` indexes output tiles of width tile.cols (the square-output
    granularity); each edge of the window whose condensed column falls in
    this block's range receives its tile entry, everything else is dropped.
    """
    if not 0 <= window < t.num_row_windows:
        raise IndexError(f"window {window} out of range [0, {t.num_row_windows})")
    if edge_vals.shape[0] != t.num_edges:
        raise ValueError(
            f"edge value list has {edge_vals.shape[0]} entries, expected {t.num_edges}"
        )
    col_base = block * tile.cols
    if block < 0 or col_base >= int(t.win_partition[window]) * t.config.blk_w + tile.cols:
        raise IndexError(f"block {block} out of range in window {window}")
    lo, hi = t.window_edge_range(window)
    cols = t.edge_to_col[lo:hi].astype(np.int64)
    rows = t.window_edge_rows(window)
    sel = (cols >= col_base) & (cols < col_base + tile.cols)
    idx = np.nonzero(sel)[0]
    edge_vals[lo + idx] = tile.data[rows[idx], cols[idx] - col_base]
