"""Shared fixtures and hypothesis strategies for the test suite."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from tcgraph import BlockConfig, CsrGraph, translate
from tcgraph import synth

settings.register_profile("no_deadline", deadline=None)
settings.load_profile("no_deadline")


@pytest.fixture
def four_node_graph() -> CsrGraph:
    """Edges (0,0), (0,3), (1,3), (2,1): the worked example used throughout."""
    return CsrGraph.from_edges([0, 0, 1, 2], [0, 3, 3, 1], 4)


@pytest.fixture
def four_node_tiled(four_node_graph):
    return translate(four_node_graph, BlockConfig(blk_h=2, blk_w=2))


@pytest.fixture
def four_node_x() -> np.ndarray:
    return np.array([[1, 0], [0, 1], [2, 2], [5, 5]], dtype=np.float32)


def identity_graph(n: int) -> CsrGraph:
    ids = np.arange(n)
    return CsrGraph.from_edges(ids, ids, n)


def corpus() -> list[tuple[str, CsrGraph]]:
    """Small but structurally diverse graphs shared by property tests."""
    graphs = [
        ("four_node", CsrGraph.from_edges([0, 0, 1, 2], [0, 3, 3, 1], 4)),
        ("empty_3", CsrGraph.from_edges([], [], 3)),
        ("single_self_loop", CsrGraph.from_edges([0], [0], 1)),
        ("identity_37", identity_graph(37)),
        ("complete_2", CsrGraph.from_edges([0, 0, 1, 1], [0, 1, 0, 1], 2)),
        ("uniform_300", synth.gen_uniform(300, 4, 11)),
        ("uniform_1000", synth.gen_uniform(1000, 8, 12)),
        ("powerlaw_500", synth.gen_powerlaw(500, 6, 13)),
        ("blockdense_8w", synth.gen_blockdense(8, 3, 16, 14)),
        ("ragged_45", synth.gen_uniform(45, 3, 15)),
    ]
    return graphs


@pytest.fixture(scope="session")
def graph_corpus():
    return corpus()


@st.composite
def edge_sets(draw, max_nodes=40, max_edges=120):
    n = draw(st.integers(min_value=1, max_value=max_nodes))
    edges = draw(
        st.lists(
            st.tuples(
                st.integers(min_value=0, max_value=n - 1),
                st.integers(min_value=0, max_value=n - 1),
            ),
            max_size=max_edges,
        )
    )
    return n, edges


@st.composite
def csr_graphs(draw, max_nodes=40, max_edges=120):
    n, edges = draw(edge_sets(max_nodes=max_nodes, max_edges=max_edges))
    src = [e[0] for e in edges]
    dst = [e[1] for e in edges]
    return CsrGraph.from_edges(src, dst, n)


@st.composite
def block_configs(draw, max_side=9):
    return BlockConfig(
        blk_h=draw(st.integers(min_value=1, max_value=max_side)),
        blk_w=draw(st.integers(min_value=1, max_value=max_side)),
    )
