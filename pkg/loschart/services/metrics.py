"""Chart quality: trustworthiness, continuity and Kruskal stress."""

import logging
import math
from typing import Optional, Union

import numpy as np
from scipy.spatial.distance import pdist, squareform

from ..config import config
from ..models.schemas import Chart, MetricsReport, NeighborGraph

logger = logging.getLogger(__name__)


def _check_inputs(truth: np.ndarray, chart: np.ndarray):
    truth = np.asarray(truth, dtype=float)
    chart = np.asarray(chart, dtype=float)
    if truth.ndim != 2 or chart.ndim != 2 or truth.shape[0] != chart.shape[0]:
        raise ValueError(f"truth {truth.shape} and chart {chart.shape} must have one row per UE")
    return truth, chart


def _check_k(n: int, k: int) -> None:
    if not (1 <= k and 2 * k < n):
        raise ValueError(f"k must satisfy 1 <= k < n/2 (n={n}), got {k}")


def _ranks(points: np.ndarray) -> np.ndarray:
    """rank[i, j] = position of j in i's distance order (self is 0, ties by index)."""
    d = squareform(pdist(points))
    np.fill_diagonal(d, -1.0)
    order = np.argsort(d, axis=1, kind="stable")
    ranks = np.empty_like(order)
    rows = np.arange(d.shape[0])[:, None]
    ranks[rows, order] = np.arange(d.shape[0])[None, :]
    return ranks


def _rank_penalty(reference_ranks: np.ndarray, neighbor_ranks: np.ndarray, k: int) -> float:
    """Sum of (reference rank - k) over each point's k nearest in the other space."""
    n = reference_ranks.shape[0]
    neighbors = np.argsort(neighbor_ranks, axis=1, kind="stable")[:, 1:k + 1]
    ranks = reference_ranks[np.arange(n)[:, None], neighbors]
    penalty = np.clip(ranks - k, 0, None).sum()
    return 1.0 - 2.0 / (n * k * (2.0 * n - 3.0 * k - 1.0)) * float(penalty)


def trustworthiness(truth: np.ndarray, chart: np.ndarray, k: int) -> float:
    """Penalizes chart neighbors that are not true neighbors."""
    truth, chart = _check_inputs(truth, chart)
    _check_k(truth.shape[0], k)
    return _rank_penalty(_ranks(truth), _ranks(chart), k)


def continuity(truth: np.ndarray, chart: np.ndarray, k: int) -> float:
    """Penalizes true neighbors that the chart pushes away."""
    truth, chart = _check_inputs(truth, chart)
    _check_k(truth.shape[0], k)
    return _rank_penalty(_ranks(chart), _ranks(truth), k)


def kruskal_stress(truth: np.ndarray, chart: np.ndarray) -> float:
    """Stress-1 after the optimal uniform rescaling of the chart distances."""
    truth, chart = _check_inputs(truth, chart)
    d = pdist(truth)
    d_hat = pdist(chart)
    denom = float(np.dot(d, d))
    if denom == 0.0:
        raise ValueError("Kruskal stress is undefined when all ground-truth points coincide")
    chart_norm = float(np.dot(d_hat, d_hat))
    beta = float(np.dot(d, d_hat)) / chart_norm if chart_norm > 0 else 0.0
    residual = beta * d_hat - d
    return math.sqrt(float(np.dot(residual, residual)) / denom)


def default_k(n: int, fraction: Optional[float] = None) -> int:
    """round(fraction * n), clamped into [1, n/2)."""
    fraction = config.rank_fraction() if fraction is None else fraction
    upper = (n - 1) // 2
    if upper < 1:
        raise ValueError(f"rank metrics need at least 3 points, got {n}")
    return int(min(max(round(fraction * n), 1), upper))


def evaluate_chart(truth: np.ndarray, chart: Union[Chart, np.ndarray], k: Optional[int] = None) -> MetricsReport:
    """TW, CT and KS of a chart against ground-truth Cartesian positions.

    A Chart that left nodes out is scored on its embedded subset only.
    """
    truth = np.asarray(truth, dtype=float)
    if isinstance(chart, Chart):
        if truth.shape[0] == chart.n_input and chart.points.shape[0] != chart.n_input:
            truth = truth[chart.indices]
        points = chart.points
    else:
        points = np.asarray(chart, dtype=float)
    truth, points = _check_inputs(truth, points)

    n = truth.shape[0]
    k = default_k(n) if k is None else k
    _check_k(n, k)

    tw = trustworthiness(truth, points, k)
    ct = continuity(truth, points, k)
    ks = kruskal_stress(truth, points)
    logger.info("[Metrics] n=%d k=%d TW=%.4f CT=%.4f KS=%.4f", n, k, tw, ct, ks)
    return MetricsReport(
        tw=float(np.clip(tw, 0.0, 1.0)),
        ct=float(np.clip(ct, 0.0, 1.0)),
        ks=ks,
        k_neighbors=k,
        n_scored=n,
    )


def neighborhood_sizes(graph: NeighborGraph) -> np.ndarray:
    """Per-UE neighbor counts in a graph."""
    return graph.degrees()
