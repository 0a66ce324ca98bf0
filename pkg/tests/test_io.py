"""Loader, exporter, and binary-format tests including goldens."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings

from tcgraph import (
    BlockConfig,
    GraphFormatError,
    load_edge_list,
    load_matrix_market,
    read_tcem,
    read_tcgt,
    save_edge_list,
    translate,
    write_tcem,
    write_tcgt,
)
from tcgraph import synth

from conftest import edge_sets

GOLDEN = Path(__file__).parent / "golden"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestEdgeList:
    def test_basic(self, tmp_path):
        g = load_edge_list(write(tmp_path, "g.txt", "0 0\n0 3\n1 3\n2 1\n"))
        assert g.num_nodes == 4
        assert g.node_pointer.tolist() == [0, 2, 3, 4, 4]
        assert g.edge_list.tolist() == [0, 3, 3, 1]
        assert g.edge_values is None

    def test_empty_with_hint(self, tmp_path):
        g = load_edge_list(write(tmp_path, "g.txt", ""), num_nodes_hint=3)
        assert g.num_nodes == 3
        assert g.node_pointer.tolist() == [0, 0, 0, 0]
        assert g.edge_list.tolist() == []

    def test_duplicate_collapsed(self, tmp_path):
        g = load_edge_list(write(tmp_path, "g.txt", "0 1\n0 1\n"))
        assert g.node_pointer.tolist() == [0, 1, 1]
        assert g.edge_list.tolist() == [1]

    def test_comments_both_styles(self, tmp_path):
        g = load_edge_list(write(tmp_path, "g.txt", "# c\n% c\n\n0 1\n"))
        assert g.num_edges == 1

    def test_malformed_line_reports_number(self, tmp_path):
        p = write(tmp_path, "g.txt", "0 1\n0 1 2\n")
        with pytest.raises(GraphFormatError, match=r":2:"):
            load_edge_list(p)

    def test_non_integer_token(self, tmp_path):
        with pytest.raises(GraphFormatError, match=r":1:"):
            load_edge_list(write(tmp_path, "g.txt", "a b\n"))

    def test_negative_id(self, tmp_path):
        with pytest.raises(GraphFormatError, match="negative"):
            load_edge_list(write(tmp_path, "g.txt", "0 -1\n"))

    def test_id_overflow(self, tmp_path):
        with pytest.raises(GraphFormatError, match="32-bit"):
            load_edge_list(write(tmp_path, "g.txt", f"0 {2**32}\n"))

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(OSError):
            load_edge_list(tmp_path / "missing.txt")

    @settings(max_examples=40)
    @given(edge_sets())
    def test_round_trip(self, tmp_path_factory, ne):
        n, edges = ne
        from tcgraph import CsrGraph

        g = CsrGraph.from_edges([e[0] for e in edges], [e[1] for e in edges], n)
        p = tmp_path_factory.mktemp("rt") / "g.txt"
        save_edge_list(g, p)
        g2 = load_edge_list(p, num_nodes_hint=n)
        assert g2.num_nodes == g.num_nodes
        assert np.array_equal(g2.node_pointer, g.node_pointer)
        assert np.array_equal(g2.edge_list, g.edge_list)


MM_HEADER = "%%MatrixMarket matrix coordinate {field} {sym}\n"


class TestMatrixMarket:
    def test_pattern_general(self, tmp_path):
        text = MM_HEADER.format(field="pattern", sym="general") + "2 2 1\n1 2\n"
        g = load_matrix_market(write(tmp_path, "g.mtx", text))
        assert g.num_nodes == 2
        assert g.node_pointer.tolist() == [0, 1, 1]
        assert g.edge_list.tolist() == [1]

    def test_symmetric_mirrors(self, tmp_path):
        text = MM_HEADER.format(field="pattern", sym="symmetric") + "2 2 1\n2 1\n"
        g = load_matrix_market(write(tmp_path, "g.mtx", text))
        assert g.num_edges == 2
        assert g.row(0).tolist() == [1]
        assert g.row(1).tolist() == [0]

    def test_symmetric_diagonal_not_duplicated(self, tmp_path):
        text = MM_HEADER.format(field="pattern", sym="symmetric") + "2 2 1\n1 1\n"
        g = load_matrix_market(write(tmp_path, "g.mtx", text))
        assert g.num_edges == 1

    def test_real_values(self, tmp_path):
        text = MM_HEADER.format(field="real", sym="general") + "2 2 2\n1 2 0.5\n2 1 -3\n"
        g = load_matrix_market(write(tmp_path, "g.mtx", text))
        assert g.edge_values is not None
        assert g.edge_values.tolist() == [0.5, -3.0]

    def test_complex_rejected(self, tmp_path):
        text = MM_HEADER.format(field="complex", sym="general") + "2 2 1\n1 2 1 0\n"
        with pytest.raises(GraphFormatError, match="unsupported field"):
            load_matrix_market(write(tmp_path, "g.mtx", text))

    def test_bad_header(self, tmp_path):
        with pytest.raises(GraphFormatError, match="header"):
            load_matrix_market(write(tmp_path, "g.mtx", "not a header\n1 1 0\n"))

    def test_array_format_rejected(self, tmp_path):
        text = "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n"
        with pytest.raises(GraphFormatError, match="coordinate"):
            load_matrix_market(write(tmp_path, "g.mtx", text))

    def test_index_out_of_bounds(self, tmp_path):
        text = MM_HEADER.format(field="pattern", sym="general") + "2 2 1\n3 1\n"
        with pytest.raises(GraphFormatError, match="out of declared bounds"):
            load_matrix_market(write(tmp_path, "g.mtx", text))

    def test_non_square_rejected(self, tmp_path):
        text = MM_HEADER.format(field="pattern", sym="general") + "2 3 1\n1 2\n"
        with pytest.raises(GraphFormatError, match="square"):
            load_matrix_market(write(tmp_path, "g.mtx", text))

    def test_entry_count_mismatch(self, tmp_path):
        text = MM_HEADER.format(field="pattern", sym="general") + "2 2 2\n1 2\n"
        with pytest.raises(GraphFormatError, match="declared 2 entries"):
            load_matrix_market(write(tmp_path, "g.mtx", text))

    @settings(max_examples=30)
    @given(edge_sets(max_nodes=20, max_edges=40))
    def test_agrees_with_edge_list_loader(self, tmp_path_factory, ne):
        n, edges = ne
        tmp = tmp_path_factory.mktemp("mm")
        unique = sorted(set(edges))
        el = tmp / "g.txt"
        el.write_text("".join(f"{a} {b}\n" for a, b in unique))
        mm = tmp / "g.mtx"
        mm.write_text(
            MM_HEADER.format(field="pattern", sym="general")
            + f"{n} {n} {len(unique)}\n"
            + "".join(f"{a + 1} {b + 1}\n" for a, b in unique)
        )
        g1 = load_edge_list(el, num_nodes_hint=n)
        g2 = load_matrix_market(mm)
        assert g1.num_nodes == g2.num_nodes
        assert np.array_equal(g1.node_pointer, g2.node_pointer)
        assert np.array_equal(g1.edge_list, g2.edge_list)


class TestTcgt:
    def test_round_trip_bitwise(self, tmp_path, four_node_tiled):
        p1, p2 = tmp_path / "a.tcgt", tmp_path / "b.tcgt"
        write_tcgt(four_node_tiled, p1)
        t2 = read_tcgt(p1)
        write_tcgt(t2, p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert t2.graph is None
        assert t2.num_nodes == four_node_tiled.num_nodes
        assert np.array_equal(t2.win_partition, four_node_tiled.win_partition)
        assert np.array_equal(t2.edge_to_col, four_node_tiled.edge_to_col)
        assert np.array_equal(t2.col_offsets, four_node_tiled.col_offsets)
        assert np.array_equal(t2.col_to_node, four_node_tiled.col_to_node)
        assert t2.config.blk_h == 2 and t2.config.blk_w == 2

    def test_golden_bytes(self, tmp_path, four_node_tiled):
        p = tmp_path / "tiny.tcgt"
        write_tcgt(four_node_tiled, p)
        assert p.read_bytes() == (GOLDEN / "tiny.tcgt").read_bytes()

    def test_golden_larger(self, tmp_path):
        g = synth.gen_uniform(100, 4, 42)
        t = translate(g, BlockConfig())
        p = tmp_path / "uniform100.tcgt"
        write_tcgt(t, p)
        assert p.read_bytes() == (GOLDEN / "uniform100.tcgt").read_bytes()

    def test_empty_graph_round_trip(self, tmp_path):
        from tcgraph import CsrGraph

        for n in (0, 3):
            t = translate(CsrGraph.from_edges([], [], n), BlockConfig())
            p = tmp_path / f"empty{n}.tcgt"
            write_tcgt(t, p)
            t2 = read_tcgt(p)
            assert t2.num_nodes == n and t2.num_edges == 0
            assert t2.num_row_windows == t.num_row_windows

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "bad.tcgt"
        p.write_bytes(b"NOPE" + bytes(36))
        with pytest.raises(GraphFormatError, match="magic"):
            read_tcgt(p)

    def test_truncated(self, tmp_path, four_node_tiled):
        p = tmp_path / "t.tcgt"
        write_tcgt(four_node_tiled, p)
        p.write_bytes(p.read_bytes()[:-2])
        with pytest.raises(GraphFormatError, match="truncated"):
            read_tcgt(p)


class TestTcem:
    def test_round_trip_bitwise(self, tmp_path, four_node_x):
        p1, p2 = tmp_path / "a.tcem", tmp_path / "b.tcem"
        write_tcem(four_node_x, p1)
        x2 = read_tcem(p1)
        write_tcem(x2, p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert np.array_equal(x2, four_node_x)

    def test_golden_bytes(self, tmp_path, four_node_x):
        p = tmp_path / "tiny.tcem"
        write_tcem(four_node_x, p)
        assert p.read_bytes() == (GOLDEN / "tiny.tcem").read_bytes()

    def test_preserves_nan_bits(self, tmp_path):
        x = np.array([[np.nan, -0.0], [np.inf, 1.0]], dtype=np.float32)
        p = tmp_path / "x.tcem"
        write_tcem(x, p)
        x2 = read_tcem(p)
        assert x2.view(np.uint32).tolist() == x.view(np.uint32).tolist()

    def test_rejects_1d(self, tmp_path):
        with pytest.raises(ValueError, match="2-D"):
            write_tcem(np.zeros(4, dtype=np.float32), tmp_path / "x.tcem")
