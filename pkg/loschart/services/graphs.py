"""Neighbor-graph construction shared by the kernels and charting services."""

import logging
from typing import Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from ..models.schemas import NeighborGraph

logger = logging.getLogger(__name__)


def build_graph(n: int, rows, cols, weights) -> NeighborGraph:
    """Undirected graph from an edge list; self-loops dropped, duplicates merged.

    The first listed weight of an edge wins, in either direction. Zero
    weights stay as explicit CSR entries so that scipy.sparse.csgraph
    still treats them as edges.
    """
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    weights = np.asarray(weights, dtype=float)

    lo, hi = np.minimum(rows, cols), np.maximum(rows, cols)
    keep = lo != hi
    lo, hi, weights = lo[keep], hi[keep], weights[keep]
    _, first = np.unique(lo * max(n, 1) + hi, return_index=True)
    lo, hi, weights = lo[first], hi[first], weights[first]

    matrix = sparse.csr_matrix(
        (np.concatenate([weights, weights]), (np.concatenate([lo, hi]), np.concatenate([hi, lo]))),
        shape=(n, n),
    )
    matrix.sort_indices()

    if n:
        n_components, labels = connected_components(matrix, directed=False)
    else:
        n_components, labels = 0, np.zeros(0, dtype=np.int32)
    return NeighborGraph(n=n, weights=matrix, labels=labels, n_components=int(n_components))


def largest_component(graph: NeighborGraph) -> Tuple[np.ndarray, np.ndarray]:
    """(included, excluded) node indices; ties go to the lowest label."""
    if graph.n == 0:
        empty = np.zeros(0, dtype=int)
        return empty, empty
    sizes = np.bincount(graph.labels)
    biggest = int(np.argmax(sizes))
    included = np.flatnonzero(graph.labels == biggest)
    excluded = np.flatnonzero(graph.labels != biggest)
    return included, excluded


def subgraph(graph: NeighborGraph, nodes: np.ndarray) -> NeighborGraph:
    """Induced subgraph on `nodes` (re-indexed in the given order)."""
    nodes = np.asarray(nodes, dtype=int)
    sub = graph.weights[nodes][:, nodes].tocoo()
    return build_graph(len(nodes), sub.row, sub.col, sub.data)
