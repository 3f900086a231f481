"""Line-of-sight MIMO-OFDM channel synthesis and UE sampling."""

import logging
import math
from typing import List, Sequence, Union

import numpy as np

from ..config import config
from ..models.schemas import (
    AreaSpec,
    ArbitraryGeometry,
    ChannelSet,
    ChannelVector,
    PolarPosition,
    RegionSpec,
    SystemConfig,
    UCAGeometry,
    ULAGeometry,
)
from ..utils.helpers import wrap_angle

logger = logging.getLogger(__name__)

C = config.SPEED_OF_LIGHT

Positions = Union[np.ndarray, Sequence[PolarPosition]]


def array_positions(cfg: SystemConfig) -> np.ndarray:
    """Antenna coordinates p_n (Na x 2, metres)."""
    geometry = cfg.array
    n = np.arange(geometry.na, dtype=float)
    if isinstance(geometry, ULAGeometry):
        return np.column_stack([np.zeros_like(n), n * geometry.delta_r * cfg.wavelength])
    if isinstance(geometry, UCAGeometry):
        phi = 2.0 * math.pi * n / geometry.na
        return geometry.radius * np.column_stack([np.cos(phi), np.sin(phi)])
    if isinstance(geometry, ArbitraryGeometry):
        return np.asarray(geometry.positions, dtype=float).reshape(-1, 2)
    raise TypeError(f"unsupported array geometry: {type(geometry).__name__}")


def as_polar_array(positions: Positions) -> np.ndarray:
    """Accept PolarPosition sequences or (n, 2) arrays; return (n, 2) floats."""
    if isinstance(positions, PolarPosition):
        positions = [positions]
    if len(positions) and isinstance(positions[0], PolarPosition):
        return np.array([[p.r, p.theta] for p in positions], dtype=float).reshape(-1, 2)
    return np.asarray(positions, dtype=float).reshape(-1, 2)


def subcarrier_frequencies(cfg: SystemConfig) -> np.ndarray:
    """The Ns subcarrier frequencies, symmetric around fc."""
    return cfg.subcarriers()


def steering_matrix(cfg: SystemConfig, theta) -> np.ndarray:
    """Rows are a(theta_i); shape (len(theta), Na)."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    u = np.column_stack([np.cos(theta), np.sin(theta)])
    phase = (2.0 * math.pi / cfg.wavelength) * (u @ array_positions(cfg).T)
    return np.exp(1j * phase) / math.sqrt(cfg.na)


def steering_vector(cfg: SystemConfig, theta: float) -> np.ndarray:
    """a(theta) = (1/sqrt(Na)) exp(j 2pi/lambda p_n . u(theta))."""
    return steering_matrix(cfg, [theta])[0]


def frequency_matrix(cfg: SystemConfig, r) -> np.ndarray:
    """Rows are f(r_i); shape (len(r), Ns)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    offsets = subcarrier_frequencies(cfg) - cfg.fc
    return np.exp(-2j * math.pi * np.outer(r / C, offsets)) / math.sqrt(cfg.ns)


def frequency_signature(cfg: SystemConfig, r: float) -> np.ndarray:
    """f(r) = (1/sqrt(Ns)) exp(-j 2pi (r/c) (f_s - fc))."""
    if r <= 0:
        raise ValueError(f"range must be positive, got {r}")
    return frequency_matrix(cfg, [r])[0]


def synth_channels(cfg: SystemConfig, positions: Positions) -> ChannelSet:
    """h(x_i) for every position, frequency-major f(r) (x) a(theta)."""
    polar = as_polar_array(positions)
    if polar.size and np.any(polar[:, 0] <= 0):
        raise ValueError("every UE range must be positive")
    if polar.shape[0] == 0:
        return ChannelSet(entries=np.zeros((0, cfg.na * cfg.ns), dtype=complex), positions=polar)

    r, theta = polar[:, 0], polar[:, 1]
    scale = math.sqrt(cfg.na * cfg.ns) / r * np.exp(-2j * math.pi * r / cfg.wavelength)
    f = frequency_matrix(cfg, r)
    a = steering_matrix(cfg, theta)
    entries = scale[:, None] * (f[:, :, None] * a[:, None, :]).reshape(polar.shape[0], -1)
    logger.debug("[Channel] synthesized %d channels of length %d", polar.shape[0], entries.shape[1])
    return ChannelSet(entries=entries, positions=polar)


def synth_channel(cfg: SystemConfig, pos: PolarPosition) -> ChannelVector:
    """h(x) = (sqrt(Na Ns)/r) exp(-j 2pi r/lambda) f(r) (x) a(theta)."""
    if pos.r <= 0:
        raise ValueError(f"range must be positive, got {pos.r}")
    entries = synth_channels(cfg, np.array([[pos.r, pos.theta]])).entries[0]
    return ChannelVector(entries=entries, position=pos)


def region_from_area(area: AreaSpec) -> RegionSpec:
    """Sampling region covering an AreaSpec."""
    if area.full_circle:
        theta_min, theta_max = -math.pi, math.pi
    else:
        theta_min = area.angular_center - area.angular_span / 2.0
        theta_max = area.angular_center + area.angular_span / 2.0
    return RegionSpec(r_min=area.r_min, r_max=area.r_max, theta_min=theta_min, theta_max=theta_max)


def sample_positions(region: RegionSpec, count: int, seed: int) -> np.ndarray:
    """Area-uniform (r, theta) samples, shape (count, 2)."""
    if count < 0:
        raise ValueError("count must be non-negative")
    rng = np.random.default_rng(seed)
    u = rng.random(count)
    r = np.sqrt(region.r_min ** 2 + u * (region.r_max ** 2 - region.r_min ** 2))
    theta = wrap_angle(rng.uniform(region.theta_min, region.theta_max, count))
    return np.column_stack([r, np.atleast_1d(theta)]).reshape(count, 2)


def sample_ues(region: RegionSpec, count: int, seed: int) -> List[PolarPosition]:
    """Deterministic, uniform-in-area UE positions inside an annular sector."""
    return [PolarPosition(r=r, theta=theta) for r, theta in sample_positions(region, count, seed)]
