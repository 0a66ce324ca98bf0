"""Graph and matrix file formats.

Text formats: whitespace-separated edge lists ('#'/'%' comments) and Matrix
Market coordinate files (pattern/real, general/symmetric). Binary formats:
TCGT for tiling structures and TCEM for embedding matrices, both
little-endian with bit-exact round-trips.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .graph import MAX_NODE_ID, CsrGraph
from .sgt import BlockConfig, TiledGraph

TCGT_MAGIC = b"TCGT"
TCEM_MAGIC = b"TCEM"
FORMAT_VERSION = 1


class GraphFormatError(ValueError):
    """Malformed or unsupported graph/matrix file content."""


def _parse_id(token: str, path, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise GraphFormatError(
            f"{path}:{lineno}: expected a non-negative integer node id, got {token!r}"
        ) from None
    if value < 0:
        raise GraphFormatError(f"{path}:{lineno}: negative node id {value}")
    if value > MAX_NODE_ID:
        raise GraphFormatError(
            f"{path}:{lineno}: node id {value} exceeds the 32-bit id width"
        )
    return value


def load_edge_list(path, num_nodes_hint: int | None = None) -> CsrGraph:
    """Load a 'src dst' text file into a normalized CsrGraph.

    Lines starting with '#' or '%' are comments, blank lines are skipped.
    Rows come out sorted and deduplicated; N is max(node id)+1 unless the
    hint is larger. The format carries no weights, so edge_values is None.
    """
    src: list[int] = []
    dst: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.strip()
            if not stripped or stripped[0] in "#%":
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise GraphFormatError(
                    f"{path}:{lineno}: expected 'src dst', got {len(parts)} fields"
                )
            src.append(_parse_id(parts[0], path, lineno))
            dst.append(_parse_id(parts[1], path, lineno))
    num_nodes = max(max(src, default=-1), max(dst, default=-1)) + 1
    if num_nodes_hint is not None:
        num_nodes = max(num_nodes, int(num_nodes_hint))
    return CsrGraph.from_edges(src, dst, num_nodes)


def save_edge_list(g: CsrGraph, path) -> None:
    """Write 'src dst' lines in CSR order; weights are not representable."""
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(g.num_nodes):
            for j in g.row(i):
                fh.write(f"{i} {int(j)}\n")


def load_matrix_market(path) -> CsrGraph:
    """Load a Matrix Market coordinate file as a graph adjacency.

    Supports pattern and real fields with general or symmetric symmetry.
    1-based indices become 0-based; symmetric off-diagonal entries are
    mirrored; real values land in edge_values (duplicates summed, the
    usual coordinate-assembly rule).
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        if not header.startswith("%%MatrixMarket"):
            raise GraphFormatError(f"{path}:1: missing %%MatrixMarket header")
        tokens = header.split()
        if len(tokens) != 5:
            raise GraphFormatError(f"{path}:1: malformed header {header.strip()!r}")
        _, obj, fmt, field, symmetry = (tok.lower() for tok in tokens)
        if obj != "matrix" or fmt != "coordinate":
            raise GraphFormatError(
                f"{path}:1: unsupported object/format '{obj} {fmt}' (need matrix coordinate)"
            )
        if field not in ("pattern", "real"):
            raise GraphFormatError(f"{path}:1: unsupported field {field!r}")
        if symmetry not in ("general", "symmetric"):
            raise GraphFormatError(f"{path}:1: unsupported symmetry {symmetry!r}")

        lineno = 1
        size_line = None
        for line in fh:
            lineno += 1
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            size_line = stripped
            break
        if size_line is None:
            raise GraphFormatError(f"{path}: missing size line")
        parts = size_line.split()
        if len(parts) != 3:
            raise GraphFormatError(f"{path}:{lineno}: malformed size line {size_line!r}")
        try:
            rows, cols, nnz = (int(p) for p in parts)
        except ValueError:
            raise GraphFormatError(
                f"{path}:{lineno}: malformed size line {size_line!r}"
            ) from None
        if rows != cols:
            raise GraphFormatError(
                f"{path}:{lineno}: adjacency matrix must be square, got {rows}x{cols}"
            )
        if rows > MAX_NODE_ID + 1:
            raise GraphFormatError(f"{path}:{lineno}: {rows} nodes exceed the 32-bit id width")

        has_values = field == "real"
        want = 3 if has_values else 2
        src: list[int] = []
        dst: list[int] = []
        vals: list[float] = [] if has_values else None
        seen = 0
        for line in fh:
            lineno += 1
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            parts = stripped.split()
            if len(parts) != want:
                raise GraphFormatError(
                    f"{path}:{lineno}: expected {want} fields, got {len(parts)}"
                )
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"{path}:{lineno}: malformed entry indices") from None
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise GraphFormatError(
                    f"{path}:{lineno}: index ({i}, {j}) out of declared bounds {rows}x{cols}"
                )
            if has_values:
                try:
                    v = float(parts[2])
                except ValueError:
                    raise GraphFormatError(f"{path}:{lineno}: malformed entry value") from None
            seen += 1
            src.append(i - 1)
            dst.append(j - 1)
            if has_values:
                vals.append(v)
            if symmetry == "symmetric" and i != j:
                src.append(j - 1)
                dst.append(i - 1)
                if has_values:
                    vals.append(v)
        if seen != nnz:
            raise GraphFormatError(f"{path}: declared {nnz} entries, found {seen}")
    return CsrGraph.from_edges(src, dst, rows, values=vals)


def detect_format(path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".mtx":
        return "mtx"
    if suffix == ".tcgt":
        return "tcgt"
    return "edgelist"


def load_graph(path, fmt: str = "auto", num_nodes_hint: int | None = None) -> CsrGraph:
    """Load a CsrGraph from an edge-list or Matrix Market file."""
    if fmt == "auto":
        fmt = detect_format(path)
    if fmt == "edgelist":
        return load_edge_list(path, num_nodes_hint)
    if fmt == "mtx":
        return load_matrix_market(path)
    raise GraphFormatError(f"format {fmt!r} does not describe a loadable graph")


def _read_exact(fh, count: int, what: str, path) -> bytes:
    data = fh.read(count)
    if len(data) != count:
        raise GraphFormatError(f"{path}: truncated file while reading {what}")
    return data


def _read_array(fh, dtype, count: int, what: str, path) -> np.ndarray:
    dt = np.dtype(dtype)
    raw = _read_exact(fh, dt.itemsize * count, what, path)
    return np.frombuffer(raw, dtype=dt).copy()


def write_tcgt(t: TiledGraph, path) -> None:
    """Serialize the tiling structure (not the source graph) to disk.

    Layout, little-endian: magic 'TCGT', version u32, blk_h u32, blk_w u32,
    N u64, M u64, num_row_windows u64, win_partition u32[W],
    edge_to_col u32[M], col offsets u64[W+1], concatenated col_to_node
    u32[offsets[-1]].
    """
    with open(path, "wb") as fh:
        fh.write(TCGT_MAGIC)
        fh.write(
            struct.pack(
                "<IIIQQQ",
                FORMAT_VERSION,
                t.config.blk_h,
                t.config.blk_w,
                t.num_nodes,
                t.num_edges,
                t.num_row_windows,
            )
        )
        fh.write(t.win_partition.astype("<u4").tobytes())
        fh.write(t.edge_to_col.astype("<u4").tobytes())
        fh.write(t.col_offsets.astype("<u8").tobytes())
        fh.write(t.col_to_node.astype("<u4").tobytes())


def read_tcgt(path) -> TiledGraph:
    """Load a tiling structure; the result has ``graph=None``."""
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, "magic", path)
        if magic != TCGT_MAGIC:
            raise GraphFormatError(f"{path}: bad magic {magic!r}, expected {TCGT_MAGIC!r}")
        version, blk_h, blk_w, n, m, num_windows = struct.unpack(
            "<IIIQQQ", _read_exact(fh, 36, "header", path)
        )
        if version != FORMAT_VERSION:
            raise GraphFormatError(f"{path}: unsupported format version {version}")
        win_partition = _read_array(fh, "<u4", num_windows, "win_partition", path)
        edge_to_col = _read_array(fh, "<u4", m, "edge_to_col", path)
        col_offsets = _read_array(fh, "<u8", num_windows + 1, "col offsets", path).astype(
            np.int64
        )
        total = int(col_offsets[-1]) if num_windows else 0
        col_to_node = _read_array(fh, "<u4", total, "col_to_node", path)
        if fh.read(1):
            raise GraphFormatError(f"{path}: trailing bytes after tiling payload")
    return TiledGraph(
        graph=None,
        config=BlockConfig(blk_h=blk_h, blk_w=blk_w),
        num_nodes=int(n),
        num_edges=int(m),
        num_row_windows=int(num_windows),
        win_partition=win_partition,
        edge_to_col=edge_to_col,
        col_offsets=col_offsets,
        col_to_node=col_to_node,
    )


def write_tcem(x: np.ndarray, path) -> None:
    """Serialize an embedding matrix: magic 'TCEM', version u32, N u64,
    D u64, then N*D float32 row-major, little-endian."""
    x = np.ascontiguousarray(x, dtype=np.float32)
    if x.ndim != 2:
        raise ValueError(f"embedding matrix must be 2-D, got shape {x.shape}")
    with open(path, "wb") as fh:
        fh.write(TCEM_MAGIC)
        fh.write(struct.pack("<IQQ", FORMAT_VERSION, x.shape[0], x.shape[1]))
        fh.write(x.astype("<f4").tobytes())


def read_tcem(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, "magic", path)
        if magic != TCEM_MAGIC:
            raise GraphFormatError(f"{path}: bad magic {magic!r}, expected {TCEM_MAGIC!r}")
        version, n, d = struct.unpack("<IQQ", _read_exact(fh, 20, "header", path))
        if version != FORMAT_VERSION:
            raise GraphFormatError(f"{path}: unsupported format version {version}")
        data = _read_array(fh, "<f4", int(n * d), "embedding data", path)
        if fh.read(1):
            raise GraphFormatError(f"{path}: trailing bytes after embedding payload")
    return data.reshape(int(n), int(d)).astype(np.float32)
