"""Condense sparse graph adjacency into dense fixed-shape tiles and run
tile-based SpMM/SDDMM through an emulated matrix-multiply-accumulate
primitive, with brute-force references, tile statistics, and a CLI."""

from .graph import CsrGraph, GraphStats, dense_memory_bytes, graph_stats, validate
from .io import (
    GraphFormatError,
    load_edge_list,
    load_graph,
    load_matrix_market,
    read_tcem,
    read_tcgt,
    save_edge_list,
    write_tcem,
    write_tcgt,
)
from .kernels import (
    Counters,
    TaskPlan,
    agnn_layer,
    gcn_layer,
    make_plan,
    sddmm,
    segment_softmax,
    spmm,
    validate_plan,
)
from .oracle import CompareReport, compare, ref_sddmm, ref_spmm
from .sgt import (
    BlockConfig,
    TiledGraph,
    block_columns,
    count_blocks_after,
    count_blocks_before,
    paired_block_counts,
    reduction_ratio,
    translate,
)
from .tiles import (
    COL_MAJOR,
    ROW_MAJOR,
    Tile,
    fetch_dense,
    fetch_dense_rows,
    init_sparse,
    mma,
    quantize_tf32,
    store_dense,
    store_sparse,
)

__version__ = "0.1.0"

__all__ = [
    "BlockConfig",
    "COL_MAJOR",
    "CompareReport",
    "Counters",
    "CsrGraph",
    "GraphFormatError",
    "GraphStats",
    "ROW_MAJOR",
    "TaskPlan",
    "Tile",
    "TiledGraph",
    "agnn_layer",
    "block_columns",
    "compare",
    "count_blocks_after",
    "count_blocks_before",
    "dense_memory_bytes",
    "fetch_dense",
    "fetch_dense_rows",
    "gcn_layer",
    "graph_stats",
    "init_sparse",
    "load_edge_list",
    "load_graph",
    "load_matrix_market",
    "make_plan",
    "mma",
    "paired_block_counts",
    "quantize_tf32",
    "read_tcem",
    "read_tcgt",
    "reduction_ratio",
    "ref_sddmm",
    "ref_spmm",
    "save_edge_list",
    "sddmm",
    "segment_softmax",
    "spmm",
    "store_dense",
    "store_sparse",
    "translate",
    "validate",
    "validate_plan",
    "write_tcem",
    "write_tcgt",
]
