"""CSR graph container, invariant validation, and size/cost statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NODE_ID_DTYPE = np.uint32
EDGE_PTR_DTYPE = np.int64
VALUE_DTYPE = np.float32

MAX_NODE_ID = int(np.iinfo(NODE_ID_DTYPE).max)


@dataclass
class CsrGraph:
    """Square adjacency matrix in CSR form.

    ``node_pointer[i]:node_pointer[i+1]`` indexes the neighbors of node ``i``
    inside ``edge_list``. Loaders guarantee per-row columns are sorted
    ascending and duplicate-free. ``edge_values`` is ``None`` for unweighted
    graphs, meaning every edge weighs 1.0.
    """

    num_nodes: int
    node_pointer: np.ndarray
    edge_list: np.ndarray
    edge_values: np.ndarray | None = None

    def __post_init__(self):
        self.num_nodes = int(self.num_nodes)
        self.node_pointer = np.ascontiguousarray(self.node_pointer, dtype=EDGE_PTR_DTYPE)
        self.edge_list = np.ascontiguousarray(self.edge_list, dtype=NODE_ID_DTYPE)
        if self.edge_values is not None:
            self.edge_values = np.ascontiguousarray(self.edge_values, dtype=VALUE_DTYPE)

    @property
    def num_edges(self) -> int:
        return int(self.edge_list.shape[0])

    def degrees(self) -> np.ndarray:
        return np.diff(self.node_pointer)

    def row(self, i: int) -> np.ndarray:
        s, e = self.node_pointer[i], self.node_pointer[i + 1]
        return self.edge_list[s:e]

    def row_values(self, i: int) -> np.ndarray:
        s, e = self.node_pointer[i], self.node_pointer[i + 1]
        if self.edge_values is None:
            return np.ones(int(e - s), dtype=VALUE_DTYPE)
        return self.edge_values[s:e]

    @classmethod
    def from_edges(
        cls,
        src,
        dst,
        num_nodes: int,
        values=None,
    ) -> "CsrGraph":
        """Build a normalized graph from parallel src/dst id arrays.

        Edges are sorted by (row, column) and duplicates collapsed. When
        ``values`` is given, values of duplicate edges are summed into the
        surviving entry.
        """
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        keep = np.ones(src.shape[0], dtype=bool)
        if src.shape[0] > 1:
            keep[1:] = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
        if values is not None:
            vals = np.asarray(values, dtype=np.float64)[order]
            group = np.cumsum(keep) - 1
            acc = np.zeros(int(keep.sum()), dtype=np.float64)
            np.add.at(acc, group, vals)
            values = acc.astype(VALUE_DTYPE)
        src, dst = src[keep], dst[keep]
        node_pointer = np.zeros(num_nodes + 1, dtype=EDGE_PTR_DTYPE)
        if src.size:
            counts = np.bincount(src, minlength=num_nodes)
            np.cumsum(counts, out=node_pointer[1:])
        return cls(num_nodes, node_pointer, dst.astype(NODE_ID_DTYPE), values)


def validate(g: CsrGraph) -> list[str]:
    """Check every CsrGraph invariant; return one message per violated kind.

    Each message carries the first offending location and how many locations
    violate that invariant. An empty list means the graph is valid.
    """
    report: list[str] = []
    n = g.num_nodes
    ptr = g.node_pointer
    if ptr.shape[0] != n + 1:
        report.append(
            f"row pointer has length {ptr.shape[0]}, expected num_nodes+1 = {n + 1}"
        )
        return report
    if n >= 0 and ptr.shape[0] > 0 and ptr[0] != 0:
        report.append(f"row pointer does not start at 0 (got {int(ptr[0])})")
    diffs = np.diff(ptr)
    bad = np.nonzero(diffs < 0)[0]
    if bad.size:
        report.append(
            f"non-monotone row pointer at row {int(bad[0])}"
            + (f" ({bad.size} rows affected)" if bad.size > 1 else "")
        )
        return report
    if int(ptr[-1]) != g.num_edges:
        report.append(
            f"row pointer ends at {int(ptr[-1])} but edge list has {g.num_edges} entries"
        )
        return report
    cols = g.edge_list.astype(np.int64)
    oob = np.nonzero(cols >= n)[0] if g.num_edges else np.empty(0, dtype=np.int64)
    if oob.size:
        report.append(
            f"column id out of range at edge {int(oob[0])}"
            + (f" ({oob.size} edges affected)" if oob.size > 1 else "")
        )
    if g.num_edges > 1:
        row_of_edge = np.repeat(np.arange(n, dtype=np.int64), diffs)
        same_row = row_of_edge[1:] == row_of_edge[:-1]
        not_increasing = cols[1:] <= cols[:-1]
        bad_e = np.nonzero(same_row & not_increasing)[0] + 1
        if bad_e.size:
            report.append(
                f"unsorted or duplicate column at edge {int(bad_e[0])}"
                + (f" ({bad_e.size} edges affected)" if bad_e.size > 1 else "")
            )
    if g.edge_values is not None and g.edge_values.shape[0] != g.num_edges:
        report.append(
            f"edge value count {g.edge_values.shape[0]} != edge count {g.num_edges}"
        )
    return report


def dense_memory_bytes(num_nodes: int) -> int:
    """Bytes needed to hold the adjacency as a dense 32-bit float matrix."""
    return 4 * num_nodes * num_nodes


@dataclass
class GraphStats:
    num_nodes: int
    num_edges: int
    avg_degree: float
    dense_memory_bytes: int
    effective_computation: float
    avg_edges_per_row_window: float


def graph_stats(g: CsrGraph, window_height: int) -> GraphStats:
    """Size and cost metrics for a graph.

    ``effective_computation`` is nnz/(N*N): the fraction of a dense
    adjacency product that touches actual edges. ``avg_edges_per_row_window``
    divides nnz by the number of ``window_height``-row slabs. Zero-node
    graphs report 0.0 for the ratio metrics.
    """
    if window_height < 1:
        raise ValueError(f"window_height must be >= 1, got {window_height}")
    n, m = g.num_nodes, g.num_edges
    num_windows = -(-n // window_height)
    return GraphStats(
        num_nodes=n,
        num_edges=m,
        avg_degree=m / n if n else 0.0,
        dense_memory_bytes=dense_memory_bytes(n),
        effective_computation=m / (n * n) if n else 0.0,
        avg_edges_per_row_window=m / num_windows if num_windows else 0.0,
    )
