"""
Phase-insensitive similarity and distance, their radial/angular factors,
thresholds and main-lobe widths.

The similarity of two LoS channels factors as s = f(r1, r2) * a(th1, th2):
a Dirichlet kernel in range, and a Dirichlet kernel in sin(theta) (ULA) or
approximately a Bessel J0 kernel in the azimuth gap (UCA).
"""

import logging
import math
import warnings
from typing import Dict, Sequence, Tuple, Union

import numpy as np

from ..config import config
from ..errors import ConfigurationError, IsolatedGraphWarning
from ..models.schemas import (
    ChannelSet,
    ChannelVector,
    DistanceMatrix,
    KernelProfile,
    LobeExtent,
    NeighborGraph,
    PolarPosition,
    SystemConfig,
    UCAGeometry,
    ULAGeometry,
)
from .channel_model import as_polar_array, steering_matrix
from .graphs import build_graph
from .special_functions import (
    ANGULAR_CONSTANT,
    BESSEL_SIDE_LOBE,
    J0_FIRST_ROOT,
    RADIAL_CONSTANT,
    bessel_inverse,
    bessel_j0,
    dirichlet_inverse,
    dirichlet_kernel,
    dirichlet_side_lobe_threshold,
)

logger = logging.getLogger(__name__)

C = config.SPEED_OF_LIGHT

Channels = Union[ChannelSet, np.ndarray, Sequence[ChannelVector]]


def _as_vector(h) -> np.ndarray:
    entries = h.entries if isinstance(h, ChannelVector) else h
    return np.asarray(entries, dtype=complex).ravel()


def _as_matrix(channels: Channels) -> np.ndarray:
    if isinstance(channels, ChannelSet):
        return channels.entries
    if isinstance(channels, np.ndarray):
        return np.asarray(channels, dtype=complex)
    rows = [_as_vector(h) for h in channels]
    if not rows:
        return np.zeros((0, 0), dtype=complex)
    if len({len(r) for r in rows}) != 1:
        raise ValueError("channel vectors must all have the same length")
    return np.vstack(rows)


def _scalar_or_array(result, *inputs):
    return float(result) if all(np.ndim(x) == 0 for x in inputs) else result


# --- PI similarity / distance ------------------------------------------------


def pi_similarity(h1, h2) -> float:
    """s = |h1^H h2| / (||h1|| ||h2||), in [0, 1]."""
    v1, v2 = _as_vector(h1), _as_vector(h2)
    if v1.shape != v2.shape:
        raise ValueError(f"channel length mismatch: {v1.size} != {v2.size}")
    n1, n2 = np.linalg.norm(v1), np.linalg.norm(v2)
    if n1 == 0.0 or n2 == 0.0:
        raise ValueError("PI similarity is undefined for a zero channel")
    return float(min(1.0, abs(np.vdot(v1, v2)) / (n1 * n2)))


def similarity_to_distance(s):
    """d = sqrt(2 - 2 s)."""
    result = np.sqrt(np.maximum(0.0, 2.0 - 2.0 * np.asarray(s, dtype=float)))
    return _scalar_or_array(result, s)


def pi_distance(h1, h2) -> float:
    """d = sqrt(2 - 2 s), in [0, sqrt(2)]."""
    return similarity_to_distance(pi_similarity(h1, h2))


def pi_similarity_matrix(channels: Channels) -> np.ndarray:
    """Dense all-pairs PI similarity through one normalized Gram product."""
    h = _as_matrix(channels)
    if h.shape[0] == 0:
        return np.zeros((0, 0))
    norms = np.linalg.norm(h, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("PI similarity is undefined for a zero channel")
    hn = h / norms[:, None]
    s = np.abs(hn.conj() @ hn.T)
    s = 0.5 * (s + s.T)
    np.fill_diagonal(s, 1.0)
    return np.clip(s, 0.0, 1.0)


def pi_distances_from(channels: Channels, ref_index: int) -> np.ndarray:
    """PI distance from channel ref_index to every channel."""
    h = _as_matrix(channels)
    if not 0 <= ref_index < h.shape[0]:
        raise ValueError(f"reference index {ref_index} out of range for {h.shape[0]} channels")
    norms = np.linalg.norm(h, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("PI similarity is undefined for a zero channel")
    s = np.abs(h.conj() @ h[ref_index]) / (norms * norms[ref_index])
    d = similarity_to_distance(np.clip(s, 0.0, 1.0))
    d[ref_index] = 0.0
    return d


def pi_distance_matrix(channels: Channels) -> DistanceMatrix:
    """Dense all-pairs PI distance (kind=pi)."""
    d = similarity_to_distance(pi_similarity_matrix(channels))
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(kind="pi", entries=d)


# --- Factorized terms --------------------------------------------------------


def radial_term(cfg: SystemConfig, r1, r2):
    """|D_Ns(2 pi B (r1 - r2) / c)| == |f(r1)^H f(r2)|."""
    x = 2.0 * math.pi * cfg.bandwidth * (np.asarray(r1, dtype=float) - np.asarray(r2, dtype=float)) / C
    return _scalar_or_array(np.abs(dirichlet_kernel(cfg.ns, x)), r1, r2)


def angular_term(cfg: SystemConfig, th1, th2):
    """|a(th1)^H a(th2)| by direct inner product, for any geometry."""
    t1, t2 = np.broadcast_arrays(np.asarray(th1, dtype=float), np.asarray(th2, dtype=float))
    a1 = steering_matrix(cfg, t1.ravel())
    a2 = steering_matrix(cfg, t2.ravel())
    result = np.minimum(1.0, np.abs(np.sum(a1.conj() * a2, axis=1))).reshape(t1.shape)
    return _scalar_or_array(result, th1, th2)


def angular_term_ula(cfg: SystemConfig, th1, th2):
    """|D_Na(2 pi dr Na (sin th1 - sin th2))| for a ULA."""
    geometry = cfg.array
    if not isinstance(geometry, ULAGeometry):
        raise ConfigurationError("angular_term_ula needs a ULA geometry")
    gap = np.sin(np.asarray(th1, dtype=float)) - np.sin(np.asarray(th2, dtype=float))
    x = 2.0 * math.pi * geometry.delta_r * geometry.na * gap
    return _scalar_or_array(np.abs(dirichlet_kernel(geometry.na, x)), th1, th2)


def angular_term_uca(cfg: SystemConfig, th1, th2):
    """Exact |a(th1)^H a(th2)| for a UCA (the finite antenna sum)."""
    if not isinstance(cfg.array, UCAGeometry):
        raise ConfigurationError("angular_term_uca needs a UCA geometry")
    return angular_term(cfg, th1, th2)


def angular_term_uca_approx(cfg: SystemConfig, th1, th2):
    """|J0((4 pi R / lambda) |sin((th1 - th2) / 2)|)|, the large-Na UCA limit."""
    geometry = cfg.array
    if not isinstance(geometry, UCAGeometry):
        raise ConfigurationError("angular_term_uca_approx needs a UCA geometry")
    half_gap = 0.5 * (np.asarray(th1, dtype=float) - np.asarray(th2, dtype=float))
    arg = (4.0 * math.pi * geometry.radius / cfg.wavelength) * np.abs(np.sin(half_gap))
    return _scalar_or_array(np.abs(bessel_j0(arg)), th1, th2)


def pi_similarity_uca_approx(cfg: SystemConfig, p1, p2):
    """s~ = f(r1, r2) * a~(th1, th2).

    Takes two PolarPositions, or two (n, 2) polar arrays for a vectorized
    pairwise evaluation.
    """
    if isinstance(p1, PolarPosition) and isinstance(p2, PolarPosition):
        return float(radial_term(cfg, p1.r, p2.r) * angular_term_uca_approx(cfg, p1.theta, p2.theta))
    a, b = as_polar_array(p1), as_polar_array(p2)
    return radial_term(cfg, a[:, 0], b[:, 0]) * angular_term_uca_approx(cfg, a[:, 1], b[:, 1])


def factorized_similarity(cfg: SystemConfig, p1, p2):
    """f(r1, r2) * a(th1, th2) with the exact angular factor of the geometry."""
    a, b = as_polar_array(p1), as_polar_array(p2)
    if isinstance(cfg.array, ULAGeometry):
        angular = angular_term_ula(cfg, a[:, 1], b[:, 1])
    else:
        angular = angular_term(cfg, a[:, 1], b[:, 1])
    return radial_term(cfg, a[:, 0], b[:, 0]) * angular


# --- Thresholds ----------------------------------------------------------------


def threshold_for(cfg: SystemConfig) -> float:
    """Second-lobe magnitude that the similarity must reach to be trusted.

    ULA: max(|D_Ns(3 pi)|, |D_Na(3 pi)|).
    UCA: |J0(j'_{0,1})| ~ 0.403 when Ns > 2, else max(|D_Ns(3 pi)|, 0.403).
    """
    geometry = cfg.array
    t_f = dirichlet_side_lobe_threshold(cfg.ns)
    if isinstance(geometry, ULAGeometry):
        return float(max(t_f, dirichlet_side_lobe_threshold(geometry.na)))
    if isinstance(geometry, UCAGeometry):
        if cfg.ns > 2:
            return float(BESSEL_SIDE_LOBE)
        return float(max(t_f, BESSEL_SIDE_LOBE))
    raise ConfigurationError("no similarity threshold is derived for arbitrary arrays")


def thresholded_distance_matrix(channels: Channels, cfg: SystemConfig) -> Tuple[DistanceMatrix, NeighborGraph]:
    """PI distances restricted to pairs whose similarity reaches threshold_for(cfg).

    Pairs below the threshold are marked absent in the matrix and carry no
    edge in the graph.
    """
    h = _as_matrix(channels)
    n = h.shape[0]
    if n < 2:
        raise ValueError("a thresholded distance matrix needs at least 2 channels")

    t = threshold_for(cfg)
    s = pi_similarity_matrix(h)
    d = similarity_to_distance(s)
    np.fill_diagonal(d, 0.0)

    edges = s >= t
    np.fill_diagonal(edges, False)
    absent = ~edges
    np.fill_diagonal(absent, False)

    rows, cols = np.nonzero(np.triu(edges, k=1))
    graph = build_graph(n, rows, cols, d[rows, cols])
    logger.info("[Threshold] t=%.5f kept %d of %d pairs", t, graph.edge_count, n * (n - 1) // 2)

    if graph.edge_count == 0:
        message = f"thresholded graph has no edges: all {n} nodes are isolated at t={t:.4f}"
        logger.warning("[Threshold] %s", message)
        warnings.warn(message, IsolatedGraphWarning, stacklevel=2)

    return DistanceMatrix(kind="pi_thresholded", entries=d, absent=absent), graph


# --- Main lobes ----------------------------------------------------------------


def ula_main_lobe(cfg: SystemConfig, theta0: float = 0.0, threshold: float = None) -> LobeExtent:
    """Extent of the ULA angular main lobe around theta0.

    Without a threshold the lobe runs between the first nulls,
    |sin th - sin th0| < 1/(Na dr). With one, it runs between the two
    crossings of the threshold level. When the lobe runs past sin = +-1 it
    merges with its mirror image and is reported as split.
    """
    geometry = cfg.array
    if not isinstance(geometry, ULAGeometry):
        raise ConfigurationError("ula_main_lobe needs a ULA geometry")
    if geometry.na == 1:
        return LobeExtent(split=True)

    if threshold is None:
        half = 1.0 / (geometry.na * geometry.delta_r)
    elif threshold >= 1.0:
        half = 0.0
    else:
        y = dirichlet_inverse(geometry.na, threshold)
        half = y / (2.0 * math.pi * geometry.delta_r * geometry.na)

    back = abs(theta0) > math.pi / 2.0
    front = math.copysign(math.pi, theta0) - theta0 if back else theta0
    s0 = math.sin(front)
    if s0 - half < -1.0 or s0 + half > 1.0:
        return LobeExtent(split=True)

    lower, upper = math.asin(s0 - half), math.asin(s0 + half)
    if back:
        lower, upper = math.copysign(math.pi, theta0) - upper, math.copysign(math.pi, theta0) - lower
    return LobeExtent(lower=lower, upper=upper)


def _radial_profile(cfg: SystemConfig, t: float) -> KernelProfile:
    if cfg.ns == 1:
        # D_1 is constant: no radial resolution at all
        return KernelProfile(kernel="dirichlet", axis="radial", order=1, period=C / cfg.delta_f,
                             threshold=t, units="m", split=True)

    if isinstance(cfg.array, UCAGeometry) and cfg.ns > 2:
        post = C * RADIAL_CONSTANT / (math.pi * cfg.bandwidth)
    elif t >= 1.0:
        post = 0.0
    else:
        post = dirichlet_inverse(cfg.ns, t) * C / (math.pi * cfg.bandwidth)

    return KernelProfile(
        kernel="dirichlet",
        axis="radial",
        order=cfg.ns,
        period=C / cfg.delta_f,
        main_lobe_width=2.0 * C / cfg.bandwidth,
        threshold=t,
        post_threshold_width=post,
        units="m",
    )


def uca_angular_widths(cfg: SystemConfig, threshold: float = None) -> Tuple[float, float]:
    """(L_a, L'_a) of the Bessel kernel: null-to-null and post-threshold widths."""
    geometry = cfg.array
    if not isinstance(geometry, UCAGeometry):
        raise ConfigurationError("uca_angular_widths needs a UCA geometry")
    t = BESSEL_SIDE_LOBE if threshold is None else threshold
    scale = cfg.wavelength / (4.0 * math.pi * geometry.radius)

    pre = 4.0 * math.asin(min(scale * J0_FIRST_ROOT, 1.0))
    if t >= 1.0:
        # only the reference azimuth itself reaches s = 1
        return pre, 0.0
    constant = ANGULAR_CONSTANT if abs(t - BESSEL_SIDE_LOBE) < 1e-12 else bessel_inverse(t)
    arg = scale * constant
    if arg > 1.0:
        raise ConfigurationError(
            f"UCA radius {geometry.radius} m is too small at lambda={cfg.wavelength:.4g} m: "
            f"asin argument {arg:.4f} > 1, the angular kernel never reaches the threshold"
        )
    return pre, 4.0 * math.asin(arg)


def main_lobe_widths(cfg: SystemConfig, theta0: float = 0.0) -> Dict[str, KernelProfile]:
    """Radial and angular main-lobe profiles, before and after thresholding.

    ULA angular widths depend on theta0; UCA widths do not.
    """
    t = threshold_for(cfg)
    radial = _radial_profile(cfg, t)
    geometry = cfg.array

    if isinstance(geometry, ULAGeometry):
        pre = ula_main_lobe(cfg, theta0)
        post = ula_main_lobe(cfg, theta0, threshold=t)
        angular = KernelProfile(
            kernel="dirichlet",
            axis="angular",
            order=geometry.na,
            main_lobe_width=pre.width or None,
            threshold=t,
            post_threshold_width=post.width,
            units="rad",
            split=pre.split or post.split,
        )
    else:
        pre, post = uca_angular_widths(cfg, t)
        angular = KernelProfile(
            kernel="bessel_j0",
            axis="angular",
            period=2.0 * math.pi,
            main_lobe_width=pre,
            threshold=t,
            post_threshold_width=post,
            units="rad",
        )

    logger.debug("[Lobes] radial=%s angular=%s", radial.post_threshold_width, angular.post_threshold_width)
    return {"radial": radial, "angular": angular}
