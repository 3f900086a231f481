"""Utility functions and helpers."""

import math
from typing import Iterable

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(theta):
    """Wrap azimuths to (-pi, pi]."""
    wrapped = np.remainder(np.asarray(theta, dtype=float) + math.pi, TWO_PI) - math.pi
    wrapped = np.where(wrapped <= -math.pi, wrapped + TWO_PI, wrapped)
    return wrapped if np.ndim(wrapped) else float(wrapped)


def angular_difference(theta1, theta2):
    """Smallest absolute azimuth gap, in [0, pi]."""
    return np.abs(wrap_angle(np.asarray(theta1) - np.asarray(theta2)))


def polar_to_cartesian(positions: np.ndarray) -> np.ndarray:
    """(r, theta) rows to (x, y) rows."""
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    r, theta = positions[:, 0], positions[:, 1]
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def crosses_angle(theta_lo: float, theta_hi: float, axis: float) -> bool:
    """Whether [theta_lo, theta_hi] contains axis + k*pi for some integer k."""
    k = math.ceil((theta_lo - axis) / math.pi)
    return axis + k * math.pi <= theta_hi


def format_quantity(value: float, unit: str, digits: int = 4) -> str:
    """Render a value with an SI prefix, e.g. 710.9 kHz."""
    if value == 0 or not math.isfinite(value):
        return f"{value} {unit}"
    prefixes = [(1e9, "G"), (1e6, "M"), (1e3, "k"), (1.0, ""), (1e-3, "m")]
    for scale, prefix in prefixes:
        if abs(value) >= scale:
            return f"{value / scale:.{digits}g} {prefix}{unit}"
    return f"{value:.{digits}g} {unit}"


def format_table(rows: Iterable[Iterable], headers: Iterable[str]) -> str:
    """Plain-text table with left-aligned columns."""
    headers = [str(h) for h in headers]
    body = [[v if isinstance(v, str) else f"{v:.4f}" if isinstance(v, float) else str(v) for v in row]
            for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in body]
    return "\n".join(lines)
