"""
Tests for trustworthiness, continuity and Kruskal stress.
scikit-learn's trustworthiness is the independent oracle for the rank metrics.
"""

import math

import numpy as np
import pytest
from sklearn.manifold import trustworthiness as sklearn_trustworthiness

from loschart.models.schemas import Chart
from loschart.services.metrics import continuity, default_k, evaluate_chart, kruskal_stress, trustworthiness


def _cloud(n: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).uniform(-100.0, 100.0, size=(n, 2))


def test_perfect_chart():
    """The truth itself, or any similarity transform of it, scores TW = CT = 1 and KS = 0."""
    truth = _cloud(120, 1)
    report = evaluate_chart(truth, truth)
    assert report.tw == 1.0
    assert report.ct == 1.0
    assert report.ks == pytest.approx(0.0, abs=1e-12)

    angle = 0.7
    rotation = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    moved = 0.01 * truth @ rotation.T + np.array([5.0, 3.0])
    report = evaluate_chart(truth, moved)
    assert report.tw == pytest.approx(1.0)
    assert report.ct == pytest.approx(1.0)
    assert report.ks <= 1e-12


def test_trustworthiness_matches_sklearn():
    """Same formula and same ranks as sklearn.manifold.trustworthiness."""
    truth = _cloud(150, 2)
    chart = truth + np.random.default_rng(3).normal(scale=15.0, size=truth.shape)
    for k in (1, 7, 30):
        assert trustworthiness(truth, chart, k) == pytest.approx(
            sklearn_trustworthiness(truth, chart, n_neighbors=k), abs=1e-12
        )
        # continuity is trustworthiness with the two spaces swapped
        assert continuity(truth, chart, k) == pytest.approx(
            sklearn_trustworthiness(chart, truth, n_neighbors=k), abs=1e-12
        )
    print("✓ Rank metrics agree with scikit-learn")


def test_random_chart_scores_near_one_half():
    """A random relabelling keeps no neighborhood structure."""
    truth = _cloud(200, 4)
    scores = []
    for seed in range(20):
        shuffled = truth[np.random.default_rng(seed).permutation(200)]
        scores.append(trustworthiness(truth, shuffled, 10))
    assert 0.45 <= float(np.mean(scores)) <= 0.55
    assert all(0.35 <= s <= 0.65 for s in scores)


def test_kruskal_stress_ignores_scale():
    """Uniformly rescaled charts have zero stress; distorted ones do not."""
    truth = _cloud(50, 5)
    assert kruskal_stress(truth, 3.0 * truth) == pytest.approx(0.0, abs=1e-12)
    squashed = truth * np.array([1.0, 0.2])
    assert kruskal_stress(truth, squashed) > 0.1
    with pytest.raises(ValueError):
        kruskal_stress(np.zeros((5, 2)), truth[:5])


def test_default_k():
    """5% of the UE count, clamped into [1, n/2)."""
    assert default_k(2838) == 142
    assert default_k(10) == 1
    assert default_k(3) == 1
    assert default_k(100, fraction=0.1) == 10
    with pytest.raises(ValueError):
        default_k(2)


def test_rank_metrics_reject_bad_k():
    """k must satisfy 1 <= k < n/2."""
    truth = _cloud(20, 6)
    for k in (0, 10, 25):
        with pytest.raises(ValueError):
            trustworthiness(truth, truth, k)
    with pytest.raises(ValueError):
        evaluate_chart(truth, truth[:10])


def test_partial_chart_is_scored_on_its_subset():
    """Excluded UEs are left out of every metric."""
    truth = _cloud(60, 7)
    kept = np.arange(60)[::2]
    chart = Chart(points=truth[kept], indices=kept, n_input=60, source="geodesic")
    report = evaluate_chart(truth, chart)
    assert report.n_scored == 30
    assert report.k_neighbors == default_k(30)
    assert report.tw == 1.0
