"""Graph container, validation, and statistics tests."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings

from tcgraph import CsrGraph, dense_memory_bytes, graph_stats, validate

from conftest import csr_graphs


class TestFromEdges:
    def test_four_node(self, four_node_graph):
        assert four_node_graph.node_pointer.tolist() == [0, 2, 3, 4, 4]
        assert four_node_graph.edge_list.tolist() == [0, 3, 3, 1]
        assert four_node_graph.num_edges == 4

    def test_duplicates_collapse(self):
        g = CsrGraph.from_edges([0, 0], [1, 1], 2)
        assert g.node_pointer.tolist() == [0, 1, 1]
        assert g.edge_list.tolist() == [1]

    def test_duplicate_values_sum(self):
        g = CsrGraph.from_edges([0, 0, 1], [1, 1, 0], 2, values=[2.0, 3.0, 1.0])
        assert g.edge_list.tolist() == [1, 0]
        assert g.edge_values.tolist() == [5.0, 1.0]

    def test_rows_sorted(self):
        g = CsrGraph.from_edges([1, 1, 1], [9, 2, 5], 10)
        assert g.row(1).tolist() == [2, 5, 9]

    def test_empty(self):
        g = CsrGraph.from_edges([], [], 0)
        assert g.num_nodes == 0
        assert g.node_pointer.tolist() == [0]
        assert g.num_edges == 0

    def test_row_values_default_ones(self, four_node_graph):
        assert four_node_graph.row_values(0).tolist() == [1.0, 1.0]


class TestValidate:
    def test_valid_graph_empty_report(self, four_node_graph):
        assert validate(four_node_graph) == []

    def test_non_monotone_pointer(self):
        g = CsrGraph(2, np.array([0, 2, 1]), np.array([0, 1]))
        report = validate(g)
        assert any("non-monotone row pointer at row 1" in r for r in report)

    def test_column_out_of_range(self):
        g = CsrGraph(4, np.array([0, 1, 1, 1, 1]), np.array([7]))
        report = validate(g)
        assert any("column id out of range at edge 0" in r for r in report)

    def test_pointer_start_nonzero(self):
        g = CsrGraph(1, np.array([1, 1]), np.array([], dtype=np.uint32))
        assert any("start at 0" in r for r in validate(g))

    def test_pointer_end_mismatch(self):
        g = CsrGraph(1, np.array([0, 3]), np.array([0]))
        assert any("edge list has 1" in r for r in validate(g))

    def test_unsorted_row(self):
        g = CsrGraph(3, np.array([0, 2, 2, 2]), np.array([2, 1]))
        assert any("unsorted or duplicate column at edge 1" in r for r in validate(g))

    def test_duplicate_in_row(self):
        g = CsrGraph(3, np.array([0, 2, 2, 2]), np.array([1, 1]))
        assert any("unsorted or duplicate" in r for r in validate(g))

    def test_value_length_mismatch(self):
        g = CsrGraph(2, np.array([0, 1, 1]), np.array([0]), np.array([1.0, 2.0]))
        assert any("edge value count" in r for r in validate(g))

    @settings(max_examples=50)
    @given(csr_graphs())
    def test_from_edges_always_valid(self, g):
        assert validate(g) == []


class TestGraphStats:
    def test_million_node_dense_memory(self):
        # 1,890,931 nodes: 4*N^2 bytes is 14302.48 GB in 1e9-byte units
        n = 1_890_931
        g = CsrGraph(n, np.zeros(n + 1, dtype=np.int64), np.array([], dtype=np.uint32))
        st = graph_stats(g, 16)
        assert abs(st.dense_memory_bytes / 1e9 - 14302.48) <= 0.01

    def test_dense_memory_exact_at_2_31(self):
        n = 2**31
        assert dense_memory_bytes(n) == 4 * n * n

    def test_complete_graph_fully_effective(self):
        g = CsrGraph.from_edges([0, 0, 1, 1], [0, 1, 0, 1], 2)
        st = graph_stats(g, 16)
        assert st.effective_computation == 1.0

    def test_dd_scale_effective_computation(self):
        # 334,925 nodes and 1,686,092 edges: nnz/(N*N) ~ 1.503e-5
        n, m = 334_925, 1_686_092
        ptr = np.zeros(n + 1, dtype=np.int64)
        ptr[1:] = m  # all edges on row 0; only counts matter here
        g = CsrGraph(n, ptr, np.zeros(m, dtype=np.uint32))
        st = graph_stats(g, 16)
        assert st.effective_computation == pytest.approx(1.503e-5, rel=1e-3)

    def test_avg_edges_per_row_window(self, four_node_graph):
        st = graph_stats(four_node_graph, 2)
        assert st.avg_edges_per_row_window == pytest.approx(4 / 2)
        assert st.avg_degree == pytest.approx(1.0)

    def test_window_height_validation(self, four_node_graph):
        with pytest.raises(ValueError):
            graph_stats(four_node_graph, 0)

    def test_empty_graph_conventions(self):
        g = CsrGraph.from_edges([], [], 0)
        st = graph_stats(g, 16)
        assert st.effective_computation == 0.0
        assert st.avg_degree == 0.0
        assert st.avg_edges_per_row_window == 0.0

    @settings(max_examples=40)
    @given(csr_graphs())
    def test_dense_memory_formula(self, g):
        st = graph_stats(g, 4)
        assert st.dense_memory_bytes == 4 * g.num_nodes**2
        assert 0.0 <= st.effective_computation <= 1.0
