"""Per-row-window column condensation and tile-count accounting.

A graph is cut into horizontal row windows of ``blk_h`` rows. Within each
window the scattered neighbor column ids are sorted, deduplicated, and
remapped onto the compact range 0..u-1, so the window's nonzeros land in
``ceil(u / blk_w)`` dense tiles instead of one tile per touched column
bucket. The remapping never changes results, only the tiling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import CsrGraph

PRECISION_MODES = ("f32", "tf32")


@dataclass(frozen=True)
class BlockConfig:
    """Fixed tile shape and numeric mode for the MMA primitive.

    The default 16x8 matches the TF-32 operand shape (M=N=16, K=8); row
    windows are ``blk_h`` rows tall and condensed columns are grouped in
    ``blk_w``-wide tiles.
    """

    blk_h: int = 16
    blk_w: int = 8
    precision_mode: str = "f32"

    def __post_init__(self):
        if self.blk_h < 1 or self.blk_w < 1:
            raise ValueError(f"tile shape must be >= 1, got {self.blk_h}x{self.blk_w}")
        if self.precision_mode not in PRECISION_MODES:
            raise ValueError(
                f"precision_mode must be one of {PRECISION_MODES}, got {self.precision_mode!r}"
            )


@dataclass
class TiledGraph:
    """Result of condensing a CsrGraph into row-window tiles.

    ``win_partition[w]`` is the number of tiles in window ``w``;
    ``edge_to_col`` maps every edge to its condensed column id inside its
    window; ``col_to_node`` (sliced per window by ``col_offsets``) maps
    condensed column ids back to original node ids, sorted ascending.

    ``graph`` is None when the structure was loaded from a tiling file,
    which stores no row pointers; such a TiledGraph supports block counting
    but not kernel execution.
    """

    graph: CsrGraph | None
    config: BlockConfig
    num_nodes: int
    num_edges: int
    num_row_windows: int
    win_partition: np.ndarray
    edge_to_col: np.ndarray
    col_offsets: np.ndarray
    col_to_node: np.ndarray
    _aux: dict = field(default_factory=dict, repr=False, compare=False)

    def unique_count(self, window: int) -> int:
        return int(self.col_offsets[window + 1] - self.col_offsets[window])

    def window_nodes(self, window: int) -> np.ndarray:
        """Sorted unique original node ids condensed into this window."""
        return self.col_to_node[self.col_offsets[window] : self.col_offsets[window + 1]]

    def window_edge_range(self, window: int) -> tuple[int, int]:
        """Edge-index range [lo, hi) of the window's rows; needs the graph."""
        g = self._require_graph()
        bh = self.config.blk_h
        r0 = min(window * bh, g.num_nodes)
        r1 = min((window + 1) * bh, g.num_nodes)
        return int(g.node_pointer[r0]), int(g.node_pointer[r1])

    def window_edge_rows(self, window: int) -> np.ndarray:
        """Row offset within the window of each edge in window order."""
        g = self._require_graph()
        bh = self.config.blk_h
        r0 = min(window * bh, g.num_nodes)
        r1 = min((window + 1) * bh, g.num_nodes)
        deg = np.diff(g.node_pointer[r0 : r1 + 1])
        return np.repeat(np.arange(r1 - r0, dtype=np.int64), deg)

    def _require_graph(self) -> CsrGraph:
        if self.graph is None:
            raise ValueError(
                "this TiledGraph holds tiling structure only (no source graph); "
                "reload the original edge list or matrix file to run kernels"
            )
        return self.graph


def translate(g: CsrGraph, cfg: BlockConfig) -> TiledGraph:
    """Condense each row window's neighbor columns onto a compact id range.

    Per window: collect the window's column ids, sort ascending,
    deduplicate; the rank of an edge's column in that unique array becomes
    its condensed column id. Fully deterministic; windows are independent.
    """
    n, bh, bw = g.num_nodes, cfg.blk_h, cfg.blk_w
    num_windows = -(-n // bh)
    m = g.num_edges
    if m:
        deg = np.diff(g.node_pointer)
        row_of_edge = np.repeat(np.arange(n, dtype=np.int64), deg)
        win_of_edge = row_of_edge // bh
        key = win_of_edge * n + g.edge_list.astype(np.int64)
        uniq = np.unique(key)
        col_to_node = (uniq % n).astype(np.uint32)
        win_of_uniq = uniq // n
        col_offsets = np.searchsorted(win_of_uniq, np.arange(num_windows + 1)).astype(np.int64)
        edge_to_col = (np.searchsorted(uniq, key) - col_offsets[win_of_edge]).astype(np.uint32)
    else:
        col_to_node = np.empty(0, dtype=np.uint32)
        col_offsets = np.zeros(num_windows + 1, dtype=np.int64)
        edge_to_col = np.empty(0, dtype=np.uint32)
    ucounts = np.diff(col_offsets)
    win_partition = ((ucounts + bw - 1) // bw).astype(np.uint32)
    return TiledGraph(
        graph=g,
        config=cfg,
        num_nodes=n,
        num_edges=m,
        num_row_windows=num_windows,
        win_partition=win_partition,
        edge_to_col=edge_to_col,
        col_offsets=col_offsets,
        col_to_node=col_to_node,
    )


def count_blocks_before(g: CsrGraph, cfg: BlockConfig) -> tuple[int, np.ndarray]:
    """Tiles a window-sliding scheme would visit without condensation.

    Counts, per row window, the distinct ``blk_w``-wide original-column
    buckets containing at least one edge (only occupied tiles, the stricter
    baseline). Returns (total, per-window counts).
    """
    n, bh, bw = g.num_nodes, cfg.blk_h, cfg.blk_w
    num_windows = -(-n // bh)
    if g.num_edges == 0:
        return 0, np.zeros(num_windows, dtype=np.int64)
    deg = np.diff(g.node_pointer)
    win_of_edge = np.repeat(np.arange(n, dtype=np.int64), deg) // bh
    num_buckets = -(-n // bw)
    key = win_of_edge * num_buckets + g.edge_list.astype(np.int64) // bw
    uniq = np.unique(key)
    per_window = np.bincount(uniq // num_buckets, minlength=num_windows)
    return int(uniq.shape[0]), per_window


def count_blocks_after(t: TiledGraph) -> int:
    """Total tiles after condensation: the sum of win_partition."""
    return int(t.win_partition.sum())


def reduction_ratio(before: int, after: int) -> float:
    """1 - after/before, with 0/0 reported as 0.0."""
    if before == 0:
        return 0.0
    return 1.0 - after / before


def block_columns(t: TiledGraph, window: int, block: int) -> np.ndarray:
    """Original node ids behind one tile's condensed columns.

    The final block of a window may return fewer than ``blk_w`` ids; the
    missing tail is zero-padding handled by the tile fetchers.
    """
    if not 0 <= window < t.num_row_windows:
        raise IndexError(f"window {window} out of range [0, {t.num_row_windows})")
    if not 0 <= block < int(t.win_partition[window]):
        raise IndexError(
            f"block {block} out of range [0, {int(t.win_partition[window])}) in window {window}"
        )
    bw = t.config.blk_w
    lo = t.col_offsets[window] + block * bw
    hi = min(lo + bw, t.col_offsets[window + 1])
    return t.col_to_node[lo:hi].copy()


def paired_block_counts(t: TiledGraph) -> np.ndarray:
    """Per-window output-tile count at blk_h x blk_h granularity.

    The condensation is reused as-is for the square-output kernel, so the
    count is recomputed from win_partition: ceil(win_partition * blk_w / blk_h).
    """
    bh, bw = t.config.blk_h, t.config.blk_w
    wp = t.win_partition.astype(np.int64)
    return (wp * bw + bh - 1) // bh


def structure_blocks_before(t: TiledGraph, tile_width: int) -> int:
    """Occupied original-column buckets per window, from tiling structure.

    Equivalent to ``count_blocks_before`` on the source graph (the unique
    column sets per window are preserved by condensation), but computable
    for structure-only TiledGraphs.
    """
    if tile_width < 1:
        raise ValueError("tile_width must be >= 1")
    if t.col_to_node.size == 0:
        return 0
    win_of_uniq = np.repeat(
        np.arange(t.num_row_windows, dtype=np.int64), np.diff(t.col_offsets)
    )
    num_buckets = -(-t.num_nodes // tile_width)
    key = win_of_uniq * num_buckets + t.col_to_node.astype(np.int64) // tile_width
    return int(np.unique(key).shape[0])
