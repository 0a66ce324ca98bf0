"""Brute-force CSR references used as ground truth for the tiled kernels.

These walk the graph row by row with a strict ascending accumulation
order, which is the canonical ordering the tiled kernels reproduce
bitwise in exact float32 mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import CsrGraph


def _check_embeddings(g: CsrGraph, x: np.ndarray) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float32)
    if x.ndim != 2:
        raise ValueError(f"embedding matrix must be 2-D, got shape {x.shape}")
    if x.shape[0] != g.num_nodes:
        raise ValueError(
            f"embedding rows {x.shape[0]} != graph nodes {g.num_nodes}"
        )
    return x


def ref_spmm(
    g: CsrGraph,
    x: np.ndarray,
    f: np.ndarray | None = None,
    accumulate: str = "f32",
) -> np.ndarray:
    """Neighbor aggregation by direct CSR evaluation, no tiling.

    out[i] = sum over edges e of row i of f[e] * x[edge_list[e]], edges
    folded in CSR order. ``f`` defaults to the graph's stored edge values,
    or all ones when the graph is unweighted. ``accumulate='f32'`` keeps
    plain float32 accumulation (one rounding per step); ``'f64'`` returns a
    float64 result for tolerance-based checks.
    """
    x = _check_embeddings(g, x)
    if f is None:
        f = g.edge_values
    else:
        f = np.asarray(f, dtype=np.float32)
        if f.shape[0] != g.num_edges:
            raise ValueError(f"edge value list has {f.shape[0]} entries, expected {g.num_edges}")
    if accumulate not in ("f32", "f64"):
        raise ValueError(f"unknown accumulate mode {accumulate!r}")
    acc_dtype = np.float32 if accumulate == "f32" else np.float64
    out = np.zeros((g.num_nodes, x.shape[1]), dtype=acc_dtype)
    ptr, cols = g.node_pointer, g.edge_list
    for i in range(g.num_nodes):
        s, e = int(ptr[i]), int(ptr[i + 1])
        row = out[i]
        for k in range(s, e):
            term = x[cols[k]] if f is None else f[k] * x[cols[k]]
            row += term.astype(acc_dtype, copy=False)
    return out


def ref_sddmm(
    g: CsrGraph,
    x: np.ndarray,
    accumulate: str = "f32",
) -> np.ndarray:
    """Per-edge dot products of endpoint embedding rows.

    F[e] = dot(x[row(e)], x[edge_list[e]]) with the embedding dimension
    folded ascending. float32 accumulation relies on cumulative-sum prefix
    semantics (pinned by a unit test); 'f64' accumulates in double.
    """
    x = _check_embeddings(g, x)
    if accumulate not in ("f32", "f64"):
        raise ValueError(f"unknown accumulate mode {accumulate!r}")
    m = g.num_edges
    srcs = np.repeat(np.arange(g.num_nodes, dtype=np.int64), g.degrees())
    if accumulate == "f64":
        out = np.zeros(m, dtype=np.float64)
    else:
        out = np.zeros(m, dtype=np.float32)
    chunk = 65536
    for lo in range(0, m, chunk):
        hi = min(lo + chunk, m)
        prod = x[srcs[lo:hi]] * x[g.edge_list[lo:hi]]
        if accumulate == "f64":
            out[lo:hi] = prod.astype(np.float64).sum(axis=1)
        elif prod.shape[1]:
            out[lo:hi] = np.cumsum(prod, axis=1, dtype=np.float32)[:, -1]
    return out


@dataclass
class CompareReport:
    """Element-wise agreement summary between a result and its reference."""

    passed: bool
    max_abs_err: float
    max_rel_err: float
    num_mismatch: int
    first_mismatch: tuple[int, ...] | None

    def __str__(self) -> str:
        status = "pass" if self.passed else "FAIL"
        loc = "" if self.first_mismatch is None else f" first at {self.first_mismatch}"
        return (
            f"{status}: max_abs={self.max_abs_err:.3e} max_rel={self.max_rel_err:.3e} "
            f"mismatches={self.num_mismatch}{loc}"
        )


def compare(a, b, rel_tol: float = 0.0, abs_tol: float = 0.0) -> CompareReport:
    """Check |a - b| <= abs_tol + rel_tol*|b| element-wise against reference b."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        return CompareReport(True, 0.0, 0.0, 0, None)
    diff = np.abs(a.astype(np.float64) - b.astype(np.float64))
    ok = diff <= abs_tol + rel_tol * np.abs(b.astype(np.float64))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(diff == 0.0, 0.0, diff / np.abs(b.astype(np.float64)))
    mismatch = ~ok
    num_bad = int(mismatch.sum())
    first = None
    if num_bad:
        flat = int(np.argmax(mismatch))
        first = tuple(int(v) for v in np.unravel_index(flat, a.shape))
    return CompareReport(
        passed=num_bad == 0,
        max_abs_err=float(diff.max()),
        max_rel_err=float(np.nanmax(rel)),
        num_mismatch=num_bad,
        first_mismatch=first,
    )
