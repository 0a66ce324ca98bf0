"""Command-line frontend: translate graphs, report tile statistics, run
benchmarked kernels, and generate synthetic inputs.

Exit codes: 0 success, 1 validation/verification failure, 2 I/O or format
failure. Set TCG_LOG={error,info,debug} for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io as gio
from . import kernels, oracle, sgt, synth
from .graph import graph_stats, validate
from .io import GraphFormatError
from .sgt import BlockConfig

log = logging.getLogger("tcgraph")

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_IO = 2

ORACLE_NODE_THRESHOLD = 100_000
KERNELS = ("spmm", "sddmm", "gcn", "agnn")


@dataclass
class RunConfig:
    input: str | None = None
    fmt: str = "auto"
    blk_h: int = 16
    blk_w: int = 8
    precision: str = "f32"
    dim: int = 16
    seed: int = 0
    workers: int = 0
    repeat: int = 200
    out: str | None = None
    oracle: str = "auto"


def _dataset_name(path: str) -> str:
    return Path(path).stem


def _load_for_kernels(cfg: RunConfig):
    fmt = cfg.fmt if cfg.fmt != "auto" else gio.detect_format(cfg.input)
    if fmt == "tcgt":
        raise GraphFormatError(
            f"{cfg.input}: TCGT files hold tiling structure only (no row pointers); "
            "kernel execution needs the original edge list or matrix file"
        )
    return gio.load_graph(cfg.input, fmt)


def _validated(g) -> list[str]:
    problems = validate(g)
    for p in problems:
        print(f"invalid graph: {p}", file=sys.stderr)
    return problems


def cmd_translate(cfg: RunConfig) -> int:
    g = _load_for_kernels(cfg)
    if _validated(g):
        return EXIT_VERIFY
    bcfg = BlockConfig(cfg.blk_h, cfg.blk_w, cfg.precision)
    t0 = time.perf_counter()
    t = sgt.translate(g, bcfg)
    sgt_ms = (time.perf_counter() - t0) * 1e3
    before, _ = sgt.count_blocks_before(g, bcfg)
    after = sgt.count_blocks_after(t)
    red = sgt.reduction_ratio(before, after)
    if cfg.out:
        gio.write_tcgt(t, cfg.out)
        log.info("wrote tiling to %s", cfg.out)
    print(
        f"dataset={_dataset_name(cfg.input)} N={g.num_nodes} M={g.num_edges} "
        f"windows={t.num_row_windows} blocks_before={before} blocks_after={after} "
        f"reduction={red * 100:.1f}% sgt_ms={sgt_ms:.3f}"
    )
    return EXIT_OK


STATS_HEADER = (
    "dataset,N,M,avg_deg,dense_mem_bytes,eff_comp,blocks_before_spmm,"
    "blocks_after_spmm,blocks_before_sddmm,blocks_after_sddmm"
)


def cmd_stats(cfg: RunConfig) -> int:
    fmt = cfg.fmt if cfg.fmt != "auto" else gio.detect_format(cfg.input)
    if fmt == "tcgt":
        t = gio.read_tcgt(cfg.input)
        bcfg = t.config
        n, m = t.num_nodes, t.num_edges
        before_spmm = sgt.structure_blocks_before(t, bcfg.blk_w)
        before_sddmm = sgt.structure_blocks_before(t, bcfg.blk_h)
    else:
        g = gio.load_graph(cfg.input, fmt)
        if _validated(g):
            return EXIT_VERIFY
        bcfg = BlockConfig(cfg.blk_h, cfg.blk_w, cfg.precision)
        n, m = g.num_nodes, g.num_edges
        t = sgt.translate(g, bcfg)
        before_spmm, _ = sgt.count_blocks_before(g, bcfg)
        before_sddmm, _ = sgt.count_blocks_before(g, BlockConfig(bcfg.blk_h, bcfg.blk_h))
    stats = graph_stats(t.graph, bcfg.blk_h) if t.graph is not None else None
    avg_deg = stats.avg_degree if stats else (m / n if n else 0.0)
    dense_mem = stats.dense_memory_bytes if stats else 4 * n * n
    eff = stats.effective_computation if stats else (m / (n * n) if n else 0.0)
    after_spmm = sgt.count_blocks_after(t)
    after_sddmm = int(sgt.paired_block_counts(t).sum())
    print(STATS_HEADER)
    print(
        f"{_dataset_name(cfg.input)},{n},{m},{avg_deg:.6g},{dense_mem},{eff:.6g},"
        f"{before_spmm},{after_spmm},{before_sddmm},{after_sddmm}"
    )
    return EXIT_OK


RUN_HEADER = (
    "dataset,kernel,D,blk,precision,workers,avg_ms,tiles_visited,mma_calls,"
    "max_rel_err_vs_oracle"
)


def _tf32_tolerance(k_total: int) -> float:
    # empirical bound: k quantized products, each ~2^-10 relative, 10x slack
    return min(0.5, 10.0 * max(1, k_total) * 2.0**-10)


def cmd_run(cfg: RunConfig, kernel: str) -> int:
    if kernel not in KERNELS:
        raise GraphFormatError(f"unknown kernel {kernel!r}")
    g = _load_for_kernels(cfg)
    if _validated(g):
        return EXIT_VERIFY
    bcfg = BlockConfig(cfg.blk_h, cfg.blk_w, cfg.precision)
    t0 = time.perf_counter()
    t = sgt.translate(g, bcfg)
    log.info("sgt took %.3f ms", (time.perf_counter() - t0) * 1e3)

    rng = np.random.default_rng(cfg.seed)
    x = rng.standard_normal((g.num_nodes, cfg.dim), dtype=np.float32)
    w = b = None
    if kernel == "gcn":
        w = rng.standard_normal((cfg.dim, cfg.dim), dtype=np.float32)
        b = rng.standard_normal(cfg.dim, dtype=np.float32)

    plan = kernels.make_plan(t, cfg.dim, requested_workers=cfg.workers or None)
    workers = cfg.workers if cfg.workers >= 1 else plan.warps_per_block

    def run_once(counters=None):
        kw = dict(mode=cfg.precision, workers=workers, counters=counters)
        if kernel == "spmm":
            return kernels.spmm(t, x, plan=plan, **kw)
        if kernel == "sddmm":
            return kernels.sddmm(t, x, **kw)
        if kernel == "gcn":
            return kernels.gcn_layer(t, x, w, b, plan=plan, **kw)
        return kernels.agnn_layer(t, x, **kw)

    counters = kernels.Counters()
    elapsed = 0.0
    result = None
    for i in range(cfg.repeat):
        start = time.perf_counter()
        result = run_once(counters if i == 0 else None)
        elapsed += time.perf_counter() - start
    avg_ms = elapsed / cfg.repeat * 1e3

    check = cfg.oracle == "on" or (cfg.oracle == "auto" and g.num_nodes <= ORACLE_NODE_THRESHOLD)
    err_col = "skipped"
    failed = False
    if check:
        max_deg = int(g.degrees().max()) if g.num_nodes else 0
        if kernel == "spmm":
            ref = oracle.ref_spmm(g, x)
            k_total = max_deg
        elif kernel == "sddmm":
            ref = oracle.ref_sddmm(g, x)
            k_total = cfg.dim
        elif kernel == "gcn":
            ref = oracle.ref_spmm(g, x) @ w + b
            k_total = max_deg + cfg.dim
        else:
            weights = kernels.segment_softmax(oracle.ref_sddmm(g, x), g.node_pointer)
            ref = oracle.ref_spmm(g, x, weights)
            k_total = max_deg + cfg.dim
        if cfg.precision == "tf32":
            tol = _tf32_tolerance(k_total)
            report = oracle.compare(result, ref, rel_tol=tol, abs_tol=tol)
        else:
            report = oracle.compare(result, ref, rel_tol=1e-5, abs_tol=0.0)
        err_col = f"{report.max_rel_err:.3e}"
        if not report.passed:
            print(f"oracle check failed: {report}", file=sys.stderr)
            failed = True

    print(RUN_HEADER)
    print(
        f"{_dataset_name(cfg.input)},{kernel},{cfg.dim},{bcfg.blk_h}x{bcfg.blk_w},"
        f"{cfg.precision},{workers},{avg_ms:.4f},{counters.tiles_visited},"
        f"{counters.mma_calls},{err_col}"
    )
    if cfg.out:
        matrix = result if result.ndim == 2 else result.reshape(-1, 1)
        gio.write_tcem(matrix, cfg.out)
        log.info("wrote result to %s", cfg.out)
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_gen(cfg: RunConfig, model: str, n: int, avg_degree: float, blocks_per_window: int) -> int:
    if not cfg.out:
        raise GraphFormatError("gen requires --out for the edge-list file")
    if model == "uniform":
        g = synth.gen_uniform(n, avg_degree, cfg.seed)
    elif model == "powerlaw":
        g = synth.gen_powerlaw(n, avg_degree, cfg.seed)
    elif model == "blockdense":
        if n % cfg.blk_h:
            raise GraphFormatError(
                f"blockdense needs n divisible by blk_h ({cfg.blk_h}), got {n}"
            )
        g = synth.gen_blockdense(n // cfg.blk_h, blocks_per_window, cfg.blk_h, cfg.seed)
    else:
        raise GraphFormatError(f"unknown model {model!r}")
    gio.save_edge_list(g, cfg.out)
    print(f"generated model={model} n={g.num_nodes} edges={g.num_edges} path={cfg.out}")
    return EXIT_OK


def _add_graph_args(sp, with_precision=True):
    sp.add_argument("--input", required=True, help="graph file path")
    sp.add_argument(
        "--format", default="auto", choices=("auto", "edgelist", "mtx", "tcgt"),
        help="input format (default: by extension)",
    )
    sp.add_argument("--blk-h", type=int, default=16, help="tile height / row-window height")
    sp.add_argument("--blk-w", type=int, default=8, help="tile width")
    if with_precision:
        sp.add_argument("--precision", default="f32", choices=("f32", "tf32"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tcg",
        description=(
            "Condense sparse graphs into dense fixed-shape tiles and run "
            "tile-based sparse kernels"
        ),
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("translate", help="condense a graph and report tile counts")
    _add_graph_args(sp)
    sp.add_argument("--out", help="write the tiling structure to this .tcgt file")

    sp = sub.add_parser("stats", help="CSV row of size metrics and tile counts")
    _add_graph_args(sp)

    sp = sub.add_parser("run", help="benchmark a kernel with oracle verification")
    sp.add_argument("kernel", choices=KERNELS)
    _add_graph_args(sp)
    sp.add_argument("--dim", type=int, default=16, help="embedding dimension")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=0, help="0 = heuristic choice")
    sp.add_argument("--repeat", type=int, default=200, help="timed repetitions")
    sp.add_argument("--out", help="write the kernel output to this .tcem file")
    sp.add_argument("--oracle", default="auto", choices=("on", "off", "auto"))

    sp = sub.add_parser("gen", help="write a seeded synthetic edge-list file")
    sp.add_argument("--model", required=True, choices=("uniform", "powerlaw", "blockdense"))
    sp.add_argument("--n", type=int, required=True, help="number of nodes")
    sp.add_argument("--avg-degree", type=float, default=8.0)
    sp.add_argument("--blocks-per-window", type=int, default=4)
    sp.add_argument("--blk-h", type=int, default=16)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True, help="output edge-list path")
    return p


def _configure_logging() -> None:
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("TCG_LOG", "error").lower(), logging.ERROR
    )
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        input=getattr(args, "input", None),
        fmt=getattr(args, "format", "auto"),
        blk_h=getattr(args, "blk_h", 16),
        blk_w=getattr(args, "blk_w", 8),
        precision=getattr(args, "precision", "f32"),
        dim=getattr(args, "dim", 16),
        seed=getattr(args, "seed", 0),
        workers=getattr(args, "workers", 0),
        repeat=getattr(args, "repeat", 200),
        out=getattr(args, "out", None),
        oracle=getattr(args, "oracle", "auto"),
    )
    if cfg.repeat < 1:
        print("--repeat must be >= 1", file=sys.stderr)
        return EXIT_IO
    try:
        if args.command == "translate":
            return cmd_translate(cfg)
        if args.command == "stats":
            return cmd_stats(cfg)
        if args.command == "run":
            return cmd_run(cfg, args.kernel)
        if args.command == "gen":
            return cmd_gen(cfg, args.model, args.n, args.avg_degree, args.blocks_per_window)
    except (GraphFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
