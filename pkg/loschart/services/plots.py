"""Static figures: chart scatter, similarity heatmap, kernel profiles, threshold map."""

import logging
import math
from pathlib import Path
from typing import Dict, Optional, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..config import config  # noqa: E402
from ..models.schemas import Chart, PlotSpec, PolarPosition, SystemConfig, UCAGeometry, ULAGeometry  # noqa: E402
from ..utils.helpers import polar_to_cartesian, wrap_angle  # noqa: E402
from .kernels import (  # noqa: E402
    angular_term,
    angular_term_uca_approx,
    angular_term_ula,
    radial_term,
    threshold_for,
)

logger = logging.getLogger(__name__)

C = config.SPEED_OF_LIGHT

# Fixed SVG ids and no timestamps so that reruns produce identical files
plt.rcParams["svg.hashsalt"] = "loschart"


def _save(fig, spec: PlotSpec) -> Path:
    path = Path(spec.output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fmt = path.suffix.lstrip(".").lower() or config.PLOT_FORMAT
    metadata = {"Date": None} if fmt == "svg" else {"CreationDate": None} if fmt == "pdf" else None
    fig.savefig(path, format=fmt, metadata=metadata)
    plt.close(fig)
    logger.info("[Plot] wrote %s", path)
    return path


def _colors(truth_polar: np.ndarray, color_by: str) -> Tuple[np.ndarray, str, str]:
    if color_by == "range":
        return truth_polar[:, 0], "viridis", "range (m)"
    return truth_polar[:, 1], "twilight", "azimuth (rad)"


def scatter_chart(chart: Chart, truth_polar: Optional[np.ndarray], spec: PlotSpec) -> Path:
    """Ground truth next to the chart, both coloured by the true position."""
    fig, axes = plt.subplots(1, 2 if truth_polar is not None else 1, figsize=(10, 4.5), squeeze=False)
    points = chart.points
    if truth_polar is not None:
        truth_polar = np.asarray(truth_polar, dtype=float)[chart.indices]
        values, cmap, label = _colors(truth_polar, spec.color_by)
        xy = polar_to_cartesian(truth_polar)
        axes[0, 0].scatter(xy[:, 0], xy[:, 1], c=values, cmap=cmap, s=4)
        axes[0, 0].plot([0.0], [0.0], marker="^", color="black")
        axes[0, 0].set_title("ground truth")
        axes[0, 0].set_aspect("equal")
        sc = axes[0, 1].scatter(points[:, 0], points[:, 1], c=values, cmap=cmap, s=4)
        fig.colorbar(sc, ax=axes[0, 1], label=label)
        chart_ax = axes[0, 1]
    else:
        axes[0, 0].scatter(points[:, 0], points[:, 1], s=4, color="tab:blue")
        chart_ax = axes[0, 0]
    chart_ax.set_title(spec.title or "channel chart")
    chart_ax.set_aspect("equal")
    fig.tight_layout()
    return _save(fig, spec)


def similarity_grid(cfg: SystemConfig, ref: PolarPosition, half_size: float,
                    resolution: int = 201) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact factorized similarity from ref to every point of a square grid centred on the BS."""
    xs = np.linspace(-half_size, half_size, resolution)
    gx, gy = np.meshgrid(xs, xs)
    r = np.hypot(gx, gy).ravel()
    theta = np.arctan2(gy, gx).ravel()
    radial = radial_term(cfg, ref.r, r)
    if isinstance(cfg.array, ULAGeometry):
        angular = angular_term_ula(cfg, ref.theta, theta)
    else:
        angular = angular_term(cfg, np.full_like(theta, ref.theta), theta)
    s = np.where(r > 0, radial * angular, 0.0)
    return xs, xs, s.reshape(gx.shape)


def similarity_heatmap(cfg: SystemConfig, ref: PolarPosition, half_size: float, spec: PlotSpec) -> Path:
    xs, ys, s = similarity_grid(cfg, ref, half_size)
    fig, ax = plt.subplots(figsize=(6, 5))
    mesh = ax.pcolormesh(xs, ys, s, cmap="magma", vmin=0.0, vmax=1.0, shading="auto")
    ref_xy = polar_to_cartesian([[ref.r, ref.theta]])[0]
    ax.plot(ref_xy[0], ref_xy[1], marker="+", color="lime", markersize=10)
    ax.plot([0.0], [0.0], marker="^", color="white")
    fig.colorbar(mesh, ax=ax, label="similarity")
    ax.set_aspect("equal")
    ax.set_title(spec.title or "PI similarity to the reference UE")
    fig.tight_layout()
    return _save(fig, spec)


def kernel_profile_data(cfg: SystemConfig, ref: PolarPosition, points: int = 2001) -> Dict[str, np.ndarray]:
    """Radial factor over ref.r +- 3 c/B and angular factor over one turn."""
    span = 3.0 * C / cfg.bandwidth
    r = np.linspace(max(ref.r - span, 1e-3), ref.r + span, points)
    theta = wrap_angle(ref.theta + np.linspace(-math.pi, math.pi, points))
    data = {
        "r": r,
        "radial": radial_term(cfg, ref.r, r),
        "theta": theta,
        "angular": angular_term(cfg, np.full_like(theta, ref.theta), theta),
    }
    if isinstance(cfg.array, UCAGeometry):
        data["angular_approx"] = angular_term_uca_approx(cfg, ref.theta, theta)
    return data


def kernel_profile(cfg: SystemConfig, ref: PolarPosition, spec: PlotSpec) -> Path:
    data = kernel_profile_data(cfg, ref)
    t = threshold_for(cfg) if not cfg.geometry == "arbitrary" else None
    fig, (ax_r, ax_a) = plt.subplots(2, 1, figsize=(7, 6))
    ax_r.plot(data["r"], data["radial"], color="tab:orange")
    ax_r.set_xlabel("range (m)")
    ax_r.set_ylabel("radial factor")
    order = np.argsort(data["theta"])
    ax_a.plot(data["theta"][order], data["angular"][order], color="tab:blue", label="exact")
    if "angular_approx" in data:
        ax_a.plot(data["theta"][order], data["angular_approx"][order], color="tab:green",
                  linestyle="--", label="Bessel approximation")
        ax_a.legend(loc="upper right")
    ax_a.set_xlabel("azimuth (rad)")
    ax_a.set_ylabel("angular factor")
    if t is not None:
        for ax in (ax_r, ax_a):
            ax.axhline(t, color="grey", linestyle=":", linewidth=1)
    ax_r.set_title(spec.title or "similarity factors around the reference UE")
    fig.tight_layout()
    return _save(fig, spec)


def threshold_map(truth_polar: np.ndarray, distances: np.ndarray, absent: np.ndarray,
                  ref_index: int, spec: PlotSpec) -> Path:
    """PI distance to the reference UE before (top) and after (bottom) thresholding."""
    xy = polar_to_cartesian(truth_polar)
    kept = ~np.asarray(absent, dtype=bool)
    fig, (ax_raw, ax_cut) = plt.subplots(2, 1, figsize=(6, 9))
    sc = ax_raw.scatter(xy[:, 0], xy[:, 1], c=distances, cmap="viridis", vmin=0.0, vmax=math.sqrt(2.0), s=4)
    fig.colorbar(sc, ax=ax_raw, label="PI distance")
    ax_raw.set_title("before thresholding")
    ax_cut.scatter(xy[~kept, 0], xy[~kept, 1], color="lightgrey", s=4)
    sc = ax_cut.scatter(xy[kept, 0], xy[kept, 1], c=distances[kept], cmap="viridis",
                        vmin=0.0, vmax=math.sqrt(2.0), s=4)
    fig.colorbar(sc, ax=ax_cut, label="PI distance")
    ax_cut.set_title("after thresholding")
    for ax in (ax_raw, ax_cut):
        ax.plot(xy[ref_index, 0], xy[ref_index, 1], marker="o", color="red", markersize=6)
        ax.set_aspect("equal")
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    return _save(fig, spec)
