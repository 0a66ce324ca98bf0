"""Tiled neighbor-aggregation (SpMM) and edge-feature (SDDMM) kernels.

Both kernels walk the condensed tiles of a TiledGraph and push every
fixed-shape tile through the MMA primitive. Work is described by a
TaskPlan of (window, dim range) rectangles executed on a bounded worker
pool; outputs are bitwise identical for any worker count because each
output element is accumulated in a fixed order (tiles ascending, then k
ascending) regardless of how rectangles are scheduled.

Two engines produce identical bits: ``tilewise`` literally loops blocks
through the tile ops (readable, slow), ``vectorized`` batches independent
windows into stacked numpy ops (default).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import tiles
from .sgt import PRECISION_MODES, TiledGraph, paired_block_counts
from .tiles import COL_MAJOR, ROW_MAJOR, Tile, quantize_tf32

ENGINES = ("vectorized", "tilewise")


@dataclass
class Counters:
    """Work done by a kernel run.

    tiles_visited counts sparse-tile loads (SpMM) or output tiles (SDDMM);
    repeated passes over the same tile for further dim chunks share the
    load, matching the shared-tile reuse the counters model. bytes_gathered
    counts embedding bytes actually fetched (padding excluded).
    """

    tiles_visited: int = 0
    mma_calls: int = 0
    bytes_gathered: int = 0

    def add(self, other: "Counters") -> None:
        self.tiles_visited += other.tiles_visited
        self.mma_calls += other.mma_calls
        self.bytes_gathered += other.bytes_gathered


@dataclass
class TaskPlan:
    """Disjoint (window, dim_start, dim_count) rectangles covering the output."""

    tasks: list[tuple[int, int, int]]
    warps_per_block: int


def _dim_chunks(dim: int, parts: int, align: int) -> list[tuple[int, int]]:
    # Chunk boundaries align to the engine's dim step when there are enough
    # sub-tiles to go around; a dim no wider than one sub-tile falls back to
    # a near-even column split so each requested worker still gets a slice.
    if dim < 1:
        raise ValueError(f"embedding dimension must be >= 1, got {dim}")
    parts = max(1, parts)
    nsub = -(-dim // align)
    chunks: list[tuple[int, int]] = []
    if nsub >= parts:
        base, rem = divmod(nsub, parts)
        start = 0
        for i in range(parts):
            width = (base + (1 if i < rem else 0)) * align
            end = min(start + width, dim)
            chunks.append((start, end - start))
            start = end
    elif nsub > 1:
        for start in range(0, dim, align):
            chunks.append((start, min(align, dim - start)))
    else:
        k = min(parts, dim)
        base, rem = divmod(dim, k)
        start = 0
        for i in range(k):
            width = base + (1 if i < rem else 0)
            chunks.append((start, width))
            start += width
    return chunks


def make_plan(
    t: TiledGraph, dim: int, requested_workers: int | None = None
) -> TaskPlan:
    """Build the default work decomposition for a kernel run.

    warps_per_block follows the preprocessing heuristic
    max(1, floor(avg edges per row window / 32)) unless overridden; the
    embedding dimension is split into that many contiguous chunks and tasks
    enumerate every (window, chunk) pair.
    """
    num_windows = t.num_row_windows
    if requested_workers is not None:
        if requested_workers < 1:
            raise ValueError(f"requested_workers must be >= 1, got {requested_workers}")
        wpb = int(requested_workers)
    else:
        avg_edges = t.num_edges / num_windows if num_windows else 0.0
        wpb = max(1, math.floor(avg_edges / 32.0))
    chunks = _dim_chunks(dim, wpb, t.config.blk_h)
    tasks = [(w, d0, dc) for w in range(num_windows) for d0, dc in chunks]
    return TaskPlan(tasks=tasks, warps_per_block=wpb)


def validate_plan(plan: TaskPlan, num_windows: int, dim: int) -> None:
    """Reject plans whose rectangles overlap or fail to cover the output."""
    per_window: dict[int, list[tuple[int, int]]] = {}
    for w, d0, dc in plan.tasks:
        if not 0 <= w < num_windows:
            raise ValueError(f"plan window {w} out of range [0, {num_windows})")
        if dc < 1 or d0 < 0 or d0 + dc > dim:
            raise ValueError(f"plan dim range [{d0}, {d0 + dc}) invalid for D={dim}")
        per_window.setdefault(w, []).append((d0, dc))
    if len(per_window) != num_windows:
        missing = next(w for w in range(num_windows) if w not in per_window)
        raise ValueError(f"plan covers no dims of window {missing}")
    for w, spans in per_window.items():
        spans.sort()
        cursor = 0
        for d0, dc in spans:
            if d0 != cursor:
                kind = "overlap" if d0 < cursor else "gap"
                raise ValueError(f"plan {kind} at window {w}, dim {d0}")
            cursor += dc
        if cursor != dim:
            raise ValueError(f"plan covers dims [0, {cursor}) of window {w}, need {dim}")


def _check_embeddings(t: TiledGraph, x: np.ndarray) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float32)
    if x.ndim != 2:
        raise ValueError(f"embedding matrix must be 2-D, got shape {x.shape}")
    if x.shape[0] != t.num_nodes:
        raise ValueError(f"embedding rows {x.shape[0]} != graph nodes {t.num_nodes}")
    if x.shape[1] < 1:
        raise ValueError("embedding dimension must be >= 1")
    return x


def _resolve_mode(t: TiledGraph, mode: str | None) -> str:
    mode = mode if mode is not None else t.config.precision_mode
    if mode not in PRECISION_MODES:
        raise ValueError(f"precision mode must be one of {PRECISION_MODES}, got {mode!r}")
    if mode == "tf32" and (t.config.blk_h, t.config.blk_w) != (
        tiles.TF32_MMA_M,
        tiles.TF32_MMA_K,
    ):
        raise ValueError(
            "tf32 mode requires the 16x8 tile shape, got "
            f"{t.config.blk_h}x{t.config.blk_w}"
        )
    return mode


def _concat_ranges(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    lengths = hi - lo
    total = int(lengths.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    starts = np.repeat(lo, lengths)
    ends = np.cumsum(lengths)
    offsets = np.arange(total, dtype=np.int64) - np.repeat(ends - lengths, lengths)
    return starts + offsets


def _spmm_aux(t: TiledGraph) -> dict:
    aux = t._aux.get("spmm")
    if aux is None:
        g = t.graph
        bh, bw = t.config.blk_h, t.config.blk_w
        deg = np.diff(g.node_pointer)
        row_of_edge = np.repeat(np.arange(t.num_nodes, dtype=np.int64), deg)
        e2c = t.edge_to_col.astype(np.int64)
        aux = {
            "r_local": row_of_edge % bh,
            "win_of_edge": row_of_edge // bh,
            "b_of_edge": e2c // bw,
            "c_local": e2c % bw,
        }
        t._aux["spmm"] = aux
    return aux


def _group_tasks(plan: TaskPlan) -> list[tuple[int, int, np.ndarray]]:
    groups: dict[tuple[int, int], list[int]] = {}
    for w, d0, dc in plan.tasks:
        groups.setdefault((d0, dc), []).append(w)
    return [
        (d0, dc, np.array(sorted(ws), dtype=np.int64))
        for (d0, dc), ws in sorted(groups.items())
    ]


def _run_units(units, run, workers: int) -> Counters:
    total = Counters()
    if workers <= 1 or len(units) <= 1:
        for unit in units:
            total.add(run(*unit))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(lambda u: run(*u), units):
                total.add(part)
    return total


def spmm(
    t: TiledGraph,
    x: np.ndarray,
    f: np.ndarray | None = None,
    mode: str | None = None,
    plan: TaskPlan | None = None,
    workers: int = 1,
    counters: Counters | None = None,
    engine: str = "vectorized",
) -> np.ndarray:
    """Neighbor aggregation over the condensed tiles: out = (F .* A) @ X.

    ``f`` optionally weighs edges (aligned with edge_list); absent, the
    graph's stored edge values apply, or all ones for unweighted graphs.
    Per window and tile: densify the adjacency tile, gather the neighbor
    embedding tile, multiply-accumulate, and write the window's output
    rows. Exact float32 mode matches the CSR reference bitwise.
    """
    g = t._require_graph()
    x = _check_embeddings(t, x)
    d = x.shape[1]
    if f is not None:
        f = np.ascontiguousarray(f, dtype=np.float32)
        if f.shape[0] != t.num_edges:
            raise ValueError(f"edge value list has {f.shape[0]} entries, expected {t.num_edges}")
    mode = _resolve_mode(t, mode)
    if plan is None:
        plan = make_plan(t, d)
    validate_plan(plan, t.num_row_windows, d)
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}, got {engine!r}")
    out = np.zeros((t.num_nodes, d), dtype=np.float32)
    if engine == "tilewise":
        used = _spmm_tilewise(t, x, f, mode, plan, out)
    else:
        used = _spmm_vectorized(t, x, f, mode, plan, workers, out)
    if counters is not None:
        counters.add(used)
    return out


def _spmm_tilewise(t, x, f, mode, plan, out) -> Counters:
    c = Counters()
    bh, bw = t.config.blk_h, t.config.blk_w
    pad = mode == "tf32"
    for w, d0, dc in plan.tasks:
        nblocks = int(t.win_partition[w])
        first_chunk = d0 == 0
        u = t.unique_count(w)
        sub = 0
        while sub < dc:
            width = min(bh, dc - sub)
            acc = Tile.zeros(bh, bh if pad else width)
            for b in range(nblocks):
                a = tiles.init_sparse(t, w, b, values=f)
                xt = tiles.fetch_dense(t, x, w, b, d0 + sub, width)
                c.bytes_gathered += min(bw, u - b * bw) * width * 4
                if pad and width < bh:
                    padded = np.zeros((bw, bh), dtype=np.float32)
                    padded[:, :width] = xt.data
                    xt = Tile(bw, bh, COL_MAJOR, padded)
                acc = tiles.mma(a, xt, acc, mode)
                c.mma_calls += 1
                if first_chunk and sub == 0:
                    c.tiles_visited += 1
            result = acc if acc.cols == width else Tile(bh, width, ROW_MAJOR, acc.data[:, :width].copy())
            tiles.store_dense(out, result, w, d0 + sub)
            sub += width
    return c


def _spmm_vectorized(t, x, f, mode, plan, workers, out) -> Counters:
    g = t.graph
    n = t.num_nodes
    bh, bw = t.config.blk_h, t.config.blk_w
    aux = _spmm_aux(t)
    if f is not None:
        weights = f
    elif g.edge_values is not None:
        weights = g.edge_values
    else:
        weights = np.ones(t.num_edges, dtype=np.float32)
    x_pad = np.concatenate([x, np.zeros((1, x.shape[1]), dtype=np.float32)], axis=0)
    if mode == "tf32":
        x_pad = quantize_tf32(x_pad)
        weights = quantize_tf32(weights)
    ptr = g.node_pointer
    col_to_node = t.col_to_node.astype(np.int64) if t.col_to_node.size else None

    def run_unit(d0: int, dc: int, ws: np.ndarray, first_chunk: bool) -> Counters:
        c = Counters()
        if ws.size == 0:
            return c
        wp_s = t.win_partition[ws].astype(np.int64)
        ucounts = (t.col_offsets[ws + 1] - t.col_offsets[ws]).astype(np.int64)
        c.bytes_gathered += int(ucounts.sum()) * dc * 4
        c.mma_calls += int(wp_s.sum()) * (-(-dc // bh))
        if first_chunk:
            c.tiles_visited += int(wp_s.sum())
        maxb = int(wp_s.max()) if wp_s.size else 0
        acc = np.zeros((ws.size, bh, dc), dtype=np.float32)
        if maxb > 0:
            row_lo = ptr[np.minimum(ws * bh, n)]
            row_hi = ptr[np.minimum((ws + 1) * bh, n)]
            eidx = _concat_ranges(row_lo, row_hi)
            winpos_e = np.repeat(np.arange(ws.size, dtype=np.int64), (row_hi - row_lo))
            b_e = aux["b_of_edge"][eidx]
            # windows sorted by descending block count: each step's active
            # windows are then a contiguous prefix of the stack
            order_w = np.argsort(-wp_s, kind="stable")
            pos = np.empty(ws.size, dtype=np.int64)
            pos[order_w] = np.arange(ws.size, dtype=np.int64)
            hist = np.bincount(wp_s, minlength=maxb + 1)
            cnt = ws.size - np.cumsum(hist)[:maxb]
            order_e = np.argsort(b_e, kind="stable")
            b_sorted = b_e[order_e]
            bounds = np.searchsorted(b_sorted, np.arange(maxb + 1))
            a_targets = (
                pos[winpos_e[order_e]] * bh + aux["r_local"][eidx][order_e]
            ) * bw + aux["c_local"][eidx][order_e]
            v_sorted = weights[eidx][order_e]
            cstart = t.col_offsets[ws][order_w]
            cend = t.col_offsets[ws + 1][order_w]
            xc = x_pad[:, d0 : d0 + dc]
            lanes = np.arange(bw, dtype=np.int64)
            acc_sorted = np.zeros((ws.size, bh, dc), dtype=np.float32)
            a_buf = np.zeros((ws.size, bh, bw), dtype=np.float32)
            prod = np.empty((ws.size, bh, dc), dtype=np.float32)
            for b in range(maxb):
                nact = int(cnt[b])
                if nact == 0:
                    break
                lo_e, hi_e = bounds[b], bounds[b + 1]
                a_stack = a_buf[:nact]
                a_stack.reshape(-1)[...] = 0.0
                a_stack.reshape(-1)[a_targets[lo_e:hi_e]] = v_sorted[lo_e:hi_e]
                idx = cstart[:nact, None] + b * bw + lanes[None, :]
                valid = idx < cend[:nact, None]
                nodes = np.where(valid, col_to_node[np.where(valid, idx, 0)], n)
                b_stack = xc[nodes]
                active = acc_sorted[:nact]
                for k in range(bw):
                    np.multiply(a_stack[:, :, k, None], b_stack[:, k, None, :], out=prod[:nact])
                    active += prod[:nact]
            acc = acc_sorted[pos]
        # contiguous window runs store as one rectangle
        if ws.size and int(ws[-1] - ws[0]) + 1 == ws.size:
            r0 = int(ws[0]) * bh
            r1 = min((int(ws[-1]) + 1) * bh, n)
            out[r0:r1, d0 : d0 + dc] = acc.reshape(-1, dc)[: r1 - r0]
        else:
            for i, w in enumerate(ws):
                r0 = int(w) * bh
                r1 = min(r0 + bh, n)
                out[r0:r1, d0 : d0 + dc] = acc[i, : r1 - r0]
        return c

    units = []
    for d0, dc, ws in _group_tasks(plan):
        for stripe in np.array_split(ws, max(1, workers)):
            units.append((d0, dc, stripe, d0 == 0))
    return _run_units(units, run_unit, workers)


def sddmm(
    t: TiledGraph,
    x: np.ndarray,
    mode: str | None = None,
    workers: int = 1,
    counters: Counters | None = None,
    engine: str = "vectorized",
) -> np.ndarray:
    """Per-edge dot products of endpoint embeddings: F = (X @ X^T) .* A.

    Output tiles are blk_h x blk_h (the square-output granularity); the
    SpMM condensation is reused, with per-window tile counts recomputed as
    ceil(win_partition * blk_w / blk_h). The embedding dimension is folded
    in blk_w-wide chunks, ascending, and results scatter back to the
    edge-aligned value list.
    """
    t._require_graph()
    x = _check_embeddings(t, x)
    mode = _resolve_mode(t, mode)
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}, got {engine!r}")
    out = np.zeros(t.num_edges, dtype=np.float32)
    if engine == "tilewise":
        used = _sddmm_tilewise(t, x, mode, out)
    else:
        used = _sddmm_vectorized(t, x, mode, workers, out)
    if counters is not None:
        counters.add(used)
    return out


def _fetch_neighbor_cols(t, x, window, sb, dim_start, dim_count) -> Tile:
    # B operand of the square-output kernel: column c holds the embedding
    # of the node condensed at column sb*blk_h + c, dims as rows.
    bh = t.config.blk_h
    lo = t.col_offsets[window] + sb * bh
    hi = min(lo + bh, t.col_offsets[window + 1])
    nodes = t.col_to_node[lo:hi]
    data = np.zeros((dim_count, bh), dtype=np.float32)
    if nodes.size:
        data[:, : nodes.shape[0]] = x[nodes, dim_start : dim_start + dim_count].T
    return Tile(dim_count, bh, COL_MAJOR, data)


def _sddmm_tilewise(t, x, mode, out) -> Counters:
    c = Counters()
    n = t.num_nodes
    d = x.shape[1]
    bh, bw = t.config.blk_h, t.config.blk_w
    pad = mode == "tf32"
    sdd_counts = paired_block_counts(t)
    for w in range(t.num_row_windows):
        rows_real = min(bh, n - w * bh)
        u = t.unique_count(w)
        for sb in range(int(sdd_counts[w])):
            cols_real = max(0, min(bh, u - sb * bh))
            acc = Tile.zeros(bh, bh)
            for d0 in range(0, d, bw):
                kc = min(bw, d - d0)
                a = tiles.fetch_dense_rows(x, w * bh, bh, d0, kc)
                bt = _fetch_neighbor_cols(t, x, w, sb, d0, kc)
                c.bytes_gathered += (rows_real + cols_real) * kc * 4
                if pad and kc < bw:
                    a_data = np.zeros((bh, bw), dtype=np.float32)
                    a_data[:, :kc] = a.data
                    a = Tile(bh, bw, ROW_MAJOR, a_data)
                    b_data = np.zeros((bw, bh), dtype=np.float32)
                    b_data[:kc] = bt.data
                    bt = Tile(bw, bh, COL_MAJOR, b_data)
                acc = tiles.mma(a, bt, acc, mode)
                c.mma_calls += 1
            tiles.store_sparse(out, acc, t, w, sb)
            c.tiles_visited += 1
    return c


def _sddmm_aux(t: TiledGraph) -> dict:
    aux = t._aux.get("sddmm")
    if aux is None:
        g = t.graph
        n = t.num_nodes
        bh = t.config.blk_h
        num_windows = t.num_row_windows
        sdd_counts = paired_block_counts(t)
        tile_base = np.zeros(num_windows + 1, dtype=np.int64)
        np.cumsum(sdd_counts, out=tile_base[1:])
        n_tiles = int(tile_base[-1])
        tile_win = np.repeat(np.arange(num_windows, dtype=np.int64), sdd_counts)
        tile_sb = np.arange(n_tiles, dtype=np.int64) - tile_base[tile_win]
        lane = np.arange(bh, dtype=np.int64)
        anodes = tile_win[:, None] * bh + lane[None, :]
        anodes = np.where(anodes < n, anodes, n)
        bidx = t.col_offsets[tile_win][:, None] + tile_sb[:, None] * bh + lane[None, :]
        bvalid = bidx < t.col_offsets[tile_win + 1][:, None]
        if t.col_to_node.size:
            bnodes = np.where(
                bvalid, t.col_to_node.astype(np.int64)[np.where(bvalid, bidx, 0)], n
            )
        else:
            bnodes = np.full_like(bidx, n)
        deg = np.diff(g.node_pointer)
        row_of_edge = np.repeat(np.arange(n, dtype=np.int64), deg)
        e2c = t.edge_to_col.astype(np.int64)
        tid_e = tile_base[row_of_edge // bh] + e2c // bh
        eflat = (tid_e * bh + row_of_edge % bh) * bh + e2c % bh
        rows_real = np.minimum(bh, n - tile_win * bh)
        aux = {
            "tile_base": tile_base,
            "anodes": anodes,
            "bnodes": bnodes,
            "eflat": eflat,
            "gather_rows": rows_real + bvalid.sum(axis=1),
        }
        t._aux["sddmm"] = aux
    return aux


def _sddmm_vectorized(t, x, mode, workers, out) -> Counters:
    g = t.graph
    n = t.num_nodes
    bh, bw = t.config.blk_h, t.config.blk_w
    d = x.shape[1]
    aux = _sddmm_aux(t)
    x_pad = np.concatenate([x, np.zeros((1, d), dtype=np.float32)], axis=0)
    if mode == "tf32":
        x_pad = quantize_tf32(x_pad)
    ptr = g.node_pointer
    tile_base = aux["tile_base"]

    def run_unit(w0: int, w1: int) -> Counters:
        c = Counters()
        t0, t1 = int(tile_base[w0]), int(tile_base[w1])
        if t1 == t0:
            return c
        c.tiles_visited += t1 - t0
        c.mma_calls += (t1 - t0) * (-(-d // bw))
        c.bytes_gathered += int(aux["gather_rows"][t0:t1].sum()) * d * 4
        an = aux["anodes"][t0:t1]
        bn = aux["bnodes"][t0:t1]
        acc = np.zeros((t1 - t0, bh, bh), dtype=np.float32)
        prod = np.empty_like(acc)
        for d0 in range(0, d, bw):
            kc = min(bw, d - d0)
            xc = x_pad[:, d0 : d0 + kc]
            a_stack = xc[an]
            b_stack = xc[bn]
            for k in range(kc):
                np.multiply(a_stack[:, :, k, None], b_stack[:, None, :, k], out=prod)
                acc += prod
        e0 = int(ptr[min(w0 * bh, n)])
        e1 = int(ptr[min(w1 * bh, n)])
        if e1 > e0:
            out[e0:e1] = acc.reshape(-1)[aux["eflat"][e0:e1] - t0 * bh * bh]
        return c

    bounds = np.linspace(0, t.num_row_windows, max(1, workers) + 1).astype(int)
    units = [
        (int(bounds[i]), int(bounds[i + 1]))
        for i in range(len(bounds) - 1)
        if bounds[i + 1] > bounds[i]
    ]
    return _run_units(units, run_unit, workers)


def segment_softmax(values: np.ndarray, indptr: np.ndarray) -> np.ndarray:
    """Per-row softmax over edge segments, numerically stabilized.

    Rows with no edges contribute no entries; each nonempty row's weights
    sum to 1.
    """
    v = np.ascontiguousarray(values, dtype=np.float32)
    if v.size == 0:
        return v.copy()
    deg = np.diff(indptr)
    nonempty = deg > 0
    starts = np.asarray(indptr[:-1][nonempty], dtype=np.int64)
    rep = np.repeat(np.arange(int(nonempty.sum()), dtype=np.int64), deg[nonempty])
    shifted = v - np.maximum.reduceat(v, starts)[rep]
    ex = np.exp(shifted)
    return (ex / np.add.reduceat(ex, starts)[rep]).astype(np.float32)


def gcn_layer(
    t: TiledGraph,
    x: np.ndarray,
    w: np.ndarray,
    b: np.ndarray | None = None,
    mode: str | None = None,
    plan: TaskPlan | None = None,
    workers: int = 1,
    counters: Counters | None = None,
    engine: str = "vectorized",
) -> np.ndarray:
    """Aggregate then update: spmm(t, x) @ w + b, update in exact float32."""
    agg = spmm(t, x, mode=mode, plan=plan, workers=workers, counters=counters, engine=engine)
    w = np.ascontiguousarray(w, dtype=np.float32)
    if w.ndim != 2 or w.shape[0] != agg.shape[1]:
        raise ValueError(
            f"weight shape {w.shape} incompatible with aggregated dim {agg.shape[1]}"
        )
    out = agg @ w
    if b is not None:
        b = np.ascontiguousarray(b, dtype=np.float32)
        if b.shape != (w.shape[1],):
            raise ValueError(f"bias shape {b.shape} != ({w.shape[1]},)")
        out = out + b
    return out


def agnn_layer(
    t: TiledGraph,
    x: np.ndarray,
    mode: str | None = None,
    workers: int = 1,
    counters: Counters | None = None,
    engine: str = "vectorized",
) -> np.ndarray:
    """Attention aggregation: edge scores via sddmm, per-row softmax, then
    score-weighted spmm. Zero-degree nodes produce zero output rows."""
    g = t._require_graph()
    scores = sddmm(t, x, mode=mode, workers=workers, counters=counters, engine=engine)
    weights = segment_softmax(scores, g.node_pointer)
    return spmm(
        t, x, f=weights, mode=mode, workers=workers, counters=counters, engine=engine
    )
