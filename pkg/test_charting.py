"""
Tests for the charting pipeline: neighbor graphs, geodesic completion,
classical MDS and Procrustes alignment.
"""

import math

import numpy as np
import pytest
from scipy.spatial.distance import pdist, squareform

from loschart.errors import (
    DisconnectedGraphError,
    ExcludedNodesWarning,
    GroundTruthMissingError,
    NonEuclideanWarning,
)
from loschart.models.schemas import DistanceMatrix, RegionSpec, SystemConfig, UCAGeometry
from loschart.services.channel_model import sample_positions, synth_channels
from loschart.services.charting import (
    build_knn_graph,
    build_radius_graph,
    classical_mds,
    geodesic_distances,
    procrustes_align,
    run_pipeline,
)
from loschart.services.graphs import build_graph
from loschart.services.metrics import evaluate_chart
from loschart.utils.helpers import polar_to_cartesian

UCA = SystemConfig(fc=3e9, ns=16, delta_f=625e3, array=UCAGeometry(na=64, radius=0.42))
DENSE = RegionSpec(r_min=300.0, r_max=340.0, theta_min=-0.15, theta_max=0.15)


def _euclidean(points: np.ndarray) -> DistanceMatrix:
    return DistanceMatrix(kind="euclidean_gt", entries=squareform(pdist(points)))


def _rotate(points: np.ndarray, angle: float) -> np.ndarray:
    rotation = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    return points @ rotation.T


def test_mds_recovers_euclidean_distances():
    """Classical MDS of an exact Euclidean matrix reproduces every pairwise distance."""
    points = np.random.default_rng(4).uniform(0.0, 10.0, size=(20, 2))
    chart = classical_mds(_euclidean(points))
    assert chart.points.shape == (20, 2)
    assert np.allclose(pdist(chart.points), pdist(points), atol=1e-9)
    assert chart.eigenvalues[0] >= chart.eigenvalues[1] > 0.0


def test_mds_is_deterministic():
    """Eigenvector signs are fixed, so the same input gives the same chart."""
    points = np.random.default_rng(5).uniform(0.0, 10.0, size=(15, 2))
    a = classical_mds(_euclidean(points))
    b = classical_mds(_euclidean(points))
    assert np.array_equal(a.points, b.points)


def test_procrustes_undoes_a_similarity_transform():
    """Rotation, reflection, scale and shift are all removed by the alignment."""
    truth = np.random.default_rng(6).uniform(-50.0, 50.0, size=(30, 2))
    moved = 0.3 * _rotate(truth, 1.1)[:, ::-1] + np.array([7.0, -2.0])
    chart = classical_mds(_euclidean(moved))
    aligned = procrustes_align(chart, truth)
    assert aligned.aligned
    assert np.allclose(aligned.points, truth, atol=1e-8)

    with pytest.raises(ValueError):
        procrustes_align(chart, truth[:10])


def test_single_point_chart():
    """One UE charts to the origin."""
    chart = classical_mds(DistanceMatrix(kind="geodesic", entries=np.zeros((1, 1))))
    assert chart.points.shape == (1, 2)
    assert np.all(chart.points == 0.0)

    positions = np.array([[300.0, 0.0]])
    single = run_pipeline(synth_channels(UCA, positions), UCA)
    assert single.points.shape == (1, 2)


def test_mds_refuses_absent_entries():
    """A thresholded matrix must be completed before it is embedded."""
    absent = np.zeros((3, 3), dtype=bool)
    absent[0, 2] = absent[2, 0] = True
    d = DistanceMatrix(kind="pi_thresholded", entries=np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0]], dtype=float),
                       absent=absent)
    with pytest.raises(ValueError):
        classical_mds(d)


def test_non_euclidean_input_warns():
    """A triangle-inequality violation shows up as a negative leading eigenvalue."""
    d = DistanceMatrix(kind="geodesic", entries=np.array([[0, 1, 3], [1, 0, 1], [3, 1, 0]], dtype=float))
    with pytest.warns(NonEuclideanWarning):
        chart = classical_mds(d, dim=3)
    assert np.all(np.isfinite(chart.points))
    assert chart.eigenvalues.min() < 0.0


def test_geodesics_follow_the_graph():
    """A weighted path 0-1-2-3 gives additive distances and a collinear chart."""
    graph = build_graph(4, [0, 1, 2], [1, 2, 3], [1.0, 2.0, 3.0])
    geodesic = geodesic_distances(graph)
    assert geodesic.kind == "geodesic"
    assert geodesic.entries[0].tolist() == [0.0, 1.0, 3.0, 6.0]
    assert np.array_equal(geodesic.entries, geodesic.entries.T)

    chart = classical_mds(geodesic)
    assert np.allclose(squareform(pdist(chart.points)), geodesic.entries, atol=1e-9)


def test_geodesics_match_dense_floyd_warshall():
    """Sparse Dijkstra agrees with a dense Floyd-Warshall on a random weighted graph."""
    rng = np.random.default_rng(8)
    n = 30
    ring = np.arange(n)
    rows = np.concatenate([ring, rng.integers(0, n, size=40)])
    cols = np.concatenate([(ring + 1) % n, rng.integers(0, n, size=40)])
    weights = rng.uniform(0.1, 2.0, size=rows.size)
    graph = build_graph(n, rows, cols, weights)

    dense = np.full((n, n), np.inf)
    np.fill_diagonal(dense, 0.0)
    coo = graph.weights.tocoo()
    dense[coo.row, coo.col] = coo.data
    for k in range(n):
        dense = np.minimum(dense, dense[:, k][:, None] + dense[k, :][None, :])

    assert np.allclose(geodesic_distances(graph).entries, dense, rtol=0.0, atol=1e-12)


def test_disconnected_graph():
    """A largest component below half the nodes is an error; a smaller loss is a warning."""
    fragmented = build_graph(5, [0], [1], [1.0])
    with pytest.raises(DisconnectedGraphError) as exc:
        geodesic_distances(fragmented, min_density=7.8e-4)
    assert exc.value.min_density == pytest.approx(7.8e-4)
    assert "UEs/m^2" in str(exc.value)

    mostly = build_graph(4, [0, 1], [1, 2], [1.0, 1.0])
    with pytest.warns(ExcludedNodesWarning):
        geodesic = geodesic_distances(mostly)
    assert geodesic.indices.tolist() == [0, 1, 2]

    with pytest.raises(ValueError):
        geodesic_distances(build_graph(0, [], [], []))


def test_knn_graph():
    """k = 1 on a line links each point to its closest one."""
    line = np.array([[0.0, 0.0], [1.0, 0.0], [3.0, 0.0], [6.0, 0.0], [10.0, 0.0]])
    graph = build_knn_graph(_euclidean(line), 1)
    assert graph.edge_count == 4
    assert graph.n_components == 1
    assert graph.weights[3, 4] == pytest.approx(4.0)

    for k in (0, 5):
        with pytest.raises(ValueError):
            build_knn_graph(_euclidean(line), k)


def test_radius_graph():
    """Only pairs closer than the radius are linked, with Euclidean weights."""
    graph = build_radius_graph(np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 0.0]]), 2.0)
    assert graph.edge_count == 1
    assert graph.weights[0, 1] == pytest.approx(1.0)
    assert graph.n_components == 2
    assert build_radius_graph(np.zeros((0, 2)), 1.0).n == 0
    with pytest.raises(ValueError):
        build_radius_graph(np.zeros((2, 2)), 0.0)


def test_pipeline_charts_a_dense_area():
    """The thresholded PI pipeline embeds every UE of a dense area and keeps neighborhoods."""
    positions = sample_positions(DENSE, 80, seed=9)
    channels = synth_channels(UCA, positions)
    chart = run_pipeline(channels, UCA)
    assert chart.points.shape == (80, 2)
    assert chart.excluded.size == 0
    assert chart.source == "geodesic"
    assert chart.graph_stats["n_components"] == 1
    assert chart.graph_stats["min_degree"] >= 1

    report = evaluate_chart(polar_to_cartesian(positions), chart)
    assert report.tw > 0.8
    print(f"✓ Dense area chart: TW={report.tw:.3f} CT={report.ct:.3f}")


def test_duplicate_ues_land_on_the_same_point():
    """Two UEs at the same position get coincident chart coordinates."""
    positions = sample_positions(DENSE, 40, seed=10)
    positions = np.vstack([positions, positions[7]])
    chart = run_pipeline(synth_channels(UCA, positions), UCA)
    assert np.allclose(chart.points[7], chart.points[40], atol=1e-6)


def test_raw_pi_distance_records_k():
    """Without the threshold, a kNN graph on raw PI distances is used and its k recorded."""
    channels = synth_channels(UCA, sample_positions(DENSE, 60, seed=11))
    chart = run_pipeline(channels, UCA, thresholded=False)
    stats = chart.graph_stats
    assert stats["k_neighbors"] == min(max(int(round(stats["thresholded_mean_degree"])), 1), 59)

    fixed = run_pipeline(channels, UCA, thresholded=False, k_neighbors=5)
    assert fixed.graph_stats["k_neighbors"] == 5


def test_euclidean_ground_truth_distance():
    """Ground-truth graphs link UEs closer than half the radial post-threshold width."""
    channels = synth_channels(UCA, sample_positions(DENSE, 60, seed=12))
    chart = run_pipeline(channels, UCA, distance="euclidean_gt")
    assert chart.graph_stats["radius"] == pytest.approx(40.436 / 2.0, rel=1e-3)

    with pytest.raises(GroundTruthMissingError):
        run_pipeline(channels.entries, UCA, distance="euclidean_gt")
    with pytest.raises(ValueError):
        run_pipeline(channels, UCA, distance="cosine")
    with pytest.raises(ValueError):
        run_pipeline(channels.entries[:0], UCA)
