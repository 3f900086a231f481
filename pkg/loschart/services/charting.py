"""Chart learning: neighbor graph -> geodesic distances -> classical MDS."""

import logging
import warnings
from typing import Optional

import numpy as np
from scipy.linalg import eigh, orthogonal_procrustes
from scipy.sparse.csgraph import shortest_path
from sklearn.neighbors import NearestNeighbors

from ..errors import DisconnectedGraphError, ExcludedNodesWarning, GroundTruthMissingError, NonEuclideanWarning
from ..models.schemas import Chart, ChannelSet, DistanceMatrix, NeighborGraph, SystemConfig
from ..utils.helpers import polar_to_cartesian
from .graphs import build_graph, largest_component, subgraph
from .kernels import Channels, main_lobe_widths, pi_distance_matrix, thresholded_distance_matrix
from .metrics import neighborhood_sizes

logger = logging.getLogger(__name__)

# Relative tolerance below which an MDS eigenvalue counts as zero
EIGEN_TOL = 1e-9


def geodesic_distances(graph: NeighborGraph, min_density: Optional[float] = None) -> DistanceMatrix:
    """All-pairs shortest paths inside the largest connected component.

    Nodes outside that component are left out of the result; `indices`
    maps matrix rows back to graph nodes.
    """
    if graph.n == 0:
        raise ValueError("cannot compute geodesics on an empty graph")

    included, excluded = largest_component(graph)
    if 2 * included.size < graph.n:
        raise DisconnectedGraphError(
            f"largest connected component holds {included.size} of {graph.n} nodes "
            f"({graph.n_components} components).",
            min_density=min_density,
        )
    if excluded.size:
        message = f"{excluded.size} of {graph.n} nodes lie outside the largest component and are not charted"
        logger.warning("[Graph] %s", message)
        warnings.warn(message, ExcludedNodesWarning, stacklevel=2)

    sub = subgraph(graph, included) if excluded.size else graph
    d = shortest_path(sub.weights, method="D", directed=False)
    d = np.minimum(d, d.T)
    np.fill_diagonal(d, 0.0)
    logger.debug("[Graph] geodesics over %d nodes, %d edges", sub.n, sub.edge_count)
    return DistanceMatrix(kind="geodesic", entries=d, indices=included)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so that its first non-negligible entry is positive."""
    for j in range(vectors.shape[1]):
        column = vectors[:, j]
        nonzero = np.flatnonzero(np.abs(column) > 1e-12)
        if nonzero.size and column[nonzero[0]] < 0:
            vectors[:, j] = -column
    return vectors


def classical_mds(d: DistanceMatrix, dim: int = 2, n_input: Optional[int] = None) -> Chart:
    """Torgerson embedding: top eigenpairs of -1/2 J D^2 J scaled by sqrt(eigenvalue)."""
    if d.absent is not None and np.any(d.absent):
        raise ValueError("distance matrix has absent entries; complete it with geodesic_distances first")
    entries = np.asarray(d.entries, dtype=float)
    if not np.all(np.isfinite(entries)):
        raise ValueError("classical MDS needs a finite distance matrix")

    n = d.n
    indices = d.indices if d.indices is not None else np.arange(n)
    n_input = n if n_input is None else n_input
    if n <= 1:
        return Chart(points=np.zeros((n, dim)), indices=indices, n_input=n_input, source=d.kind,
                     eigenvalues=np.zeros(min(n, dim)))

    sq = entries ** 2
    b = -0.5 * (sq - sq.mean(axis=0)[None, :] - sq.mean(axis=1)[:, None] + sq.mean())
    b = 0.5 * (b + b.T)

    k = min(dim, n)
    values, vectors = eigh(b, subset_by_index=[n - k, n - 1])
    order = np.argsort(values)[::-1]
    values, vectors = values[order], _fix_signs(vectors[:, order])

    scale = max(np.abs(values).max(), 1.0)
    if np.any(values < -EIGEN_TOL * scale):
        message = f"leading MDS eigenvalues are negative: {values.tolist()}; input is not Euclidean"
        logger.warning("[MDS] %s", message)
        warnings.warn(message, NonEuclideanWarning, stacklevel=2)

    points = vectors * np.sqrt(np.clip(values, 0.0, None))[None, :]
    if k < dim:
        points = np.hstack([points, np.zeros((n, dim - k))])
    return Chart(points=points, indices=indices, n_input=n_input, source=d.kind, eigenvalues=values)


def procrustes_align(chart: Chart, truth: np.ndarray) -> Chart:
    """Similarity transform of the chart (rotation, reflection, scale, shift) onto truth."""
    truth = np.asarray(truth, dtype=float)
    if truth.shape[0] == chart.n_input and truth.shape[0] != chart.points.shape[0]:
        truth = truth[chart.indices]
    if truth.shape != chart.points.shape:
        raise ValueError(f"truth shape {truth.shape} does not match chart shape {chart.points.shape}")

    x_mean, y_mean = chart.points.mean(axis=0), truth.mean(axis=0)
    xc, yc = chart.points - x_mean, truth - y_mean
    norm = float(np.sum(xc ** 2))
    if norm == 0.0:
        aligned = np.repeat(y_mean[None, :], truth.shape[0], axis=0)
    else:
        rotation, singular_sum = orthogonal_procrustes(xc, yc)
        aligned = (singular_sum / norm) * xc @ rotation + y_mean
    return chart.model_copy(update={"points": aligned, "aligned": True})


def build_knn_graph(distance: DistanceMatrix, k: int) -> NeighborGraph:
    """Symmetrized k-nearest-neighbor graph over a dense distance matrix."""
    n = distance.n
    if not 1 <= k < n:
        raise ValueError(f"k must lie in [1, {n - 1}], got {k}")
    nn = NearestNeighbors(n_neighbors=k, metric="precomputed").fit(distance.entries)
    dist, neighbors = nn.kneighbors()
    rows = np.repeat(np.arange(n), k)
    return build_graph(n, rows, neighbors.ravel(), dist.ravel())


def build_radius_graph(positions_xy: np.ndarray, radius: float) -> NeighborGraph:
    """Graph linking every pair of points closer than `radius` (Euclidean weights)."""
    xy = np.asarray(positions_xy, dtype=float).reshape(-1, 2)
    n = xy.shape[0]
    if radius <= 0:
        raise ValueError("radius must be positive")
    if n == 0:
        return build_graph(0, [], [], [])
    dist, neighbors = NearestNeighbors(radius=radius).fit(xy).radius_neighbors()
    counts = np.array([len(nbrs) for nbrs in neighbors])
    rows = np.repeat(np.arange(n), counts)
    cols = np.concatenate(neighbors) if counts.sum() else np.zeros(0, dtype=int)
    weights = np.concatenate(dist) if counts.sum() else np.zeros(0)
    return build_graph(n, rows, cols, weights)


def _graph_stats(graph: NeighborGraph, **extra) -> dict:
    degrees = neighborhood_sizes(graph)
    stats = {
        "edge_count": graph.edge_count,
        "mean_degree": graph.mean_degree,
        "min_degree": int(degrees.min()) if degrees.size else 0,
        "n_components": graph.n_components,
    }
    stats.update(extra)
    return stats


def run_pipeline(
    channels: Channels,
    cfg: SystemConfig,
    thresholded: bool = True,
    distance: str = "pi",
    positions: Optional[np.ndarray] = None,
    k_neighbors: Optional[int] = None,
    min_density: Optional[float] = None,
    dim: int = 2,
) -> Chart:
    """Distance -> neighbor graph -> geodesics -> MDS.

    distance="pi" uses the thresholded PI graph, or when thresholded=False a
    kNN graph on raw PI distances whose k defaults to the rounded mean degree
    of the thresholded graph. distance="euclidean_gt" links ground-truth
    positions closer than L'_f / 2.
    """
    n = len(channels) if not isinstance(channels, np.ndarray) else channels.shape[0]
    if n == 0:
        raise ValueError("cannot chart an empty channel set")
    if positions is None and isinstance(channels, ChannelSet):
        positions = channels.positions
    if n == 1:
        return Chart(points=np.zeros((1, dim)), indices=np.arange(1), n_input=1,
                     source="geodesic", graph_stats={"edge_count": 0})

    if distance == "euclidean_gt":
        if positions is None:
            raise GroundTruthMissingError("the euclidean_gt distance needs ground-truth positions")
        radius = main_lobe_widths(cfg)["radial"].post_threshold_width / 2.0
        graph = build_radius_graph(polar_to_cartesian(positions), radius)
        stats = _graph_stats(graph, radius=radius)
    elif distance == "pi":
        _, t_graph = thresholded_distance_matrix(channels, cfg)
        if thresholded:
            graph = t_graph
            stats = _graph_stats(graph)
        else:
            k = k_neighbors or int(round(t_graph.mean_degree))
            k = min(max(k, 1), n - 1)
            graph = build_knn_graph(pi_distance_matrix(channels), k)
            stats = _graph_stats(graph, k_neighbors=k, thresholded_mean_degree=t_graph.mean_degree)
    else:
        raise ValueError(f"unknown distance kind: {distance}")

    logger.info("[Chart] %s graph (thresholded=%s): %d edges, mean degree %.2f",
                distance, thresholded, graph.edge_count, graph.mean_degree)
    geodesic = geodesic_distances(graph, min_density=min_density)
    chart = classical_mds(geodesic, dim=dim, n_input=n)
    return chart.model_copy(update={"graph_stats": stats})
