"""
Identifiability conditions and the forward system-design calculator.

Necessary conditions bound the charting area so that only one main lobe of
each similarity factor is visible (no long-range ambiguity). Sufficient
conditions add the similarity threshold that cuts the side lobes (no
short-range ambiguity). The remaining rules size the UCA and the bandwidth so
that identifiable neighborhoods are round at the centre of the area.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import config
from ..errors import ConfigurationError, InfeasibleDesignError
from ..models.schemas import (
    AreaSpec,
    Clause,
    DesignConstraints,
    IdentifiabilityCheck,
    IdentifiabilityReport,
    PolarPosition,
    SystemConfig,
    UCAGeometry,
    ULAGeometry,
)
from ..utils.helpers import angular_difference, crosses_angle, format_quantity, polar_to_cartesian, wrap_angle
from .channel_model import as_polar_array, region_from_area, sample_positions, synth_channels
from .kernels import (
    angular_term_uca_approx,
    factorized_similarity,
    main_lobe_widths,
    pi_distances_from,
    pi_similarity_uca_approx,
    radial_term,
    similarity_to_distance,
    threshold_for,
    uca_angular_widths,
)
from .special_functions import ANGULAR_CONSTANT, RADIAL_CONSTANT, dirichlet_inverse, dirichlet_kernel

logger = logging.getLogger(__name__)

C = config.SPEED_OF_LIGHT

# Tolerance on the radial bound so that an area built from the bound itself passes
_RADIAL_SLACK = 1e-9


def radial_bound(cfg: SystemConfig) -> float:
    """Largest identifiable radial size c (1/delta_f - 1/B)."""
    return C * (1.0 / cfg.delta_f - 1.0 / cfg.bandwidth)


def _radial_clause(cfg: SystemConfig, area: AreaSpec, proposition: str) -> Clause:
    bound = radial_bound(cfg)
    ok = area.radial_size <= bound * (1.0 + _RADIAL_SLACK)
    return Clause(
        name="radial_size",
        proposition=proposition,
        ok=ok,
        detail=f"radial size {area.radial_size:.4g} m {'<=' if ok else '>'} c(1/df - 1/B) = {bound:.4g} m",
    )


def _angular_bounds(area: AreaSpec) -> Tuple[float, float]:
    if area.full_circle:
        return -math.pi, math.pi
    return area.angular_center - area.angular_span / 2.0, area.angular_center + area.angular_span / 2.0


def _sin_range(lo: float, hi: float) -> Tuple[float, float]:
    """Range of sin(theta) over [lo, hi]."""
    values = [math.sin(lo), math.sin(hi)]
    k_up = math.ceil((lo - math.pi / 2.0) / (2.0 * math.pi))
    if math.pi / 2.0 + 2.0 * math.pi * k_up <= hi:
        values.append(1.0)
    k_down = math.ceil((lo + math.pi / 2.0) / (2.0 * math.pi))
    if -math.pi / 2.0 + 2.0 * math.pi * k_down <= hi:
        values.append(-1.0)
    return min(values), max(values)


def ula_sin_half_range(geometry: ULAGeometry) -> float:
    """Half-range (Na - 1) / (2 dr Na) allowed around sin(theta_center)."""
    return (geometry.na - 1) / (2.0 * geometry.delta_r * geometry.na)


def necessary_condition_ula(cfg: SystemConfig, area: AreaSpec) -> List[Clause]:
    """Radial bound, angular spread around the centre, and no crossing of the array axis."""
    geometry = cfg.array
    if not isinstance(geometry, ULAGeometry):
        raise ConfigurationError("necessary_condition_ula needs a ULA geometry")

    proposition = "necessary identifiability condition (ULA)"
    clauses = [_radial_clause(cfg, area, proposition)]

    half = ula_sin_half_range(geometry)
    s0 = math.sin(area.angular_center)
    center_ok = half >= 1.0 or abs(s0) <= 1.0 - half + 1e-12
    clauses.append(Clause(
        name="angular_center",
        proposition=proposition,
        ok=center_ok,
        detail=f"|sin(theta_c)| = {abs(s0):.4f}, allowed up to {max(0.0, 1.0 - half):.4f}",
    ))

    lo, hi = _angular_bounds(area)
    s_lo, s_hi = _sin_range(lo, hi)
    spread_ok = s_lo >= s0 - half - 1e-12 and s_hi <= s0 + half + 1e-12
    clauses.append(Clause(
        name="angular_spread",
        proposition=proposition,
        ok=spread_ok,
        detail=f"sin(theta) spans [{s_lo:.4f}, {s_hi:.4f}], allowed [{s0 - half:.4f}, {s0 + half:.4f}]",
    ))

    crosses = area.full_circle or crosses_angle(lo, hi, math.pi / 2.0)
    clauses.append(Clause(
        name="array_axis",
        proposition=proposition,
        ok=not crosses,
        detail="area crosses the line of the ULA" if crosses else "area stays on one side of the ULA",
    ))
    return clauses


def necessary_condition_uca(cfg: SystemConfig, area: AreaSpec) -> List[Clause]:
    """Radial bound only; a UCA sees the whole angular domain without ambiguity."""
    if not isinstance(cfg.array, UCAGeometry):
        raise ConfigurationError("necessary_condition_uca needs a UCA geometry")
    proposition = "necessary identifiability condition (UCA)"
    return [
        _radial_clause(cfg, area, proposition),
        Clause(name="angular_span", proposition=proposition, ok=True,
               detail=f"span {area.angular_span:.4f} rad, unrestricted up to 2 pi"),
    ]


def necessary_condition(cfg: SystemConfig, area: AreaSpec) -> List[Clause]:
    if isinstance(cfg.array, ULAGeometry):
        return necessary_condition_ula(cfg, area)
    if isinstance(cfg.array, UCAGeometry):
        return necessary_condition_uca(cfg, area)
    raise ConfigurationError("identifiability conditions are only derived for ULA and UCA geometries")


def sufficient_threshold(cfg: SystemConfig) -> Tuple[float, float]:
    """(similarity threshold t, distance threshold sqrt(2 - 2t))."""
    t = threshold_for(cfg)
    return t, similarity_to_distance(t)


def neighborhood_axes(cfg: SystemConfig, r_ref: float, theta_ref: float = 0.0) -> Tuple[float, Optional[float]]:
    """(radial axis L'_f in m, angular arc L' * r_ref in m); arc is None for a split ULA lobe."""
    if r_ref <= 0:
        raise ValueError("reference range must be positive")
    widths = main_lobe_widths(cfg, theta_ref)
    radial = widths["radial"].post_threshold_width
    angular = widths["angular"].post_threshold_width
    return radial, (None if angular is None else angular * r_ref)


def roundness_gamma(cfg: SystemConfig, r_ref: float, theta_ref: float = 0.0) -> float:
    """gamma = L'_f / (L'_a * r_ref); 1 means round neighborhoods at r_ref."""
    radial, arc = neighborhood_axes(cfg, r_ref, theta_ref)
    if not arc:
        raise ConfigurationError("angular main lobe is split or empty; roundness is undefined")
    return radial / arc


def optimal_bandwidth(cfg: SystemConfig, r0: float) -> float:
    """B at which a UCA yields round neighborhoods at range r0."""
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    angular = uca_angular_widths(cfg)[1]
    return C * RADIAL_CONSTANT / (math.pi * angular * r0)


def optimal_radius(cfg: SystemConfig, r0: float, bandwidth: float = None) -> float:
    """UCA radius at which neighborhoods are round at range r0 for bandwidth B."""
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    bandwidth = cfg.bandwidth if bandwidth is None else bandwidth
    radial = C * RADIAL_CONSTANT / (math.pi * bandwidth)
    arg = radial / (4.0 * r0)
    if arg >= math.pi / 2.0:
        raise ConfigurationError(
            f"no UCA radius gives round neighborhoods: radial axis {radial:.4g} m is too long for r0={r0:.4g} m"
        )
    return cfg.wavelength * ANGULAR_CONSTANT / (4.0 * math.pi * math.sin(arg))


def round_center(cfg: SystemConfig) -> float:
    """Range r0 at which gamma = 1 for the configured UCA and bandwidth."""
    widths = main_lobe_widths(cfg)
    return widths["radial"].post_threshold_width / widths["angular"].post_threshold_width


def min_user_density(cfg: SystemConfig, k_min: int = 1) -> float:
    """UEs per m^2 so that a neighborhood of diameter L'_f holds k_min UEs on average."""
    if k_min < 0:
        raise ValueError("k_min must be non-negative")
    radial = main_lobe_widths(cfg)["radial"].post_threshold_width
    if not radial:
        raise ConfigurationError("the radial kernel has no main lobe at this subcarrier count")
    return 4.0 * k_min / (math.pi * radial ** 2)


def identifiable_area(cfg: SystemConfig, r_center: float, angular_center: float = 0.0) -> AreaSpec:
    """Maximal identifiable area around (r_center, angular_center)."""
    size = radial_bound(cfg)
    if size <= 0:
        raise InfeasibleDesignError("radial_size", "a single subcarrier leaves no identifiable radial extent")
    if r_center - size / 2.0 <= 0:
        raise InfeasibleDesignError(
            "area_inner_edge",
            f"an area of radial size {size:.4g} m centred at {r_center:.4g} m would reach the base station",
        )

    geometry = cfg.array
    if isinstance(geometry, UCAGeometry):
        return AreaSpec(r_center=r_center, radial_size=size, angular_center=wrap_angle(angular_center),
                        angular_span=2.0 * math.pi)
    if not isinstance(geometry, ULAGeometry):
        raise ConfigurationError("identifiable areas are only derived for ULA and UCA geometries")

    half = ula_sin_half_range(geometry)
    theta = wrap_angle(angular_center)
    back = abs(theta) > math.pi / 2.0
    front = math.copysign(math.pi, theta) - theta if back else theta
    s0 = math.sin(front)
    lo, hi = math.asin(max(s0 - half, -1.0)), math.asin(min(s0 + half, 1.0))
    if back:
        lo, hi = math.copysign(math.pi, theta) - hi, math.copysign(math.pi, theta) - lo
    if hi - lo <= 0:
        raise InfeasibleDesignError("angular_spread", "a single-antenna ULA has no identifiable angular extent")
    return AreaSpec(r_center=r_center, radial_size=size, angular_center=wrap_angle(0.5 * (lo + hi)),
                    angular_span=hi - lo)


def in_identifiable_neighborhood(cfg: SystemConfig, ref: PolarPosition, positions) -> np.ndarray:
    """Mask of positions whose similarity to ref reaches the threshold."""
    polar = as_polar_array(positions)
    reference = np.repeat([[ref.r, ref.theta]], polar.shape[0], axis=0)
    t = threshold_for(cfg)
    if isinstance(cfg.array, UCAGeometry):
        s = pi_similarity_uca_approx(cfg, reference, polar)
    else:
        s = factorized_similarity(cfg, reference, polar)
    return np.asarray(s) >= t


def _order_violations(s_y, s_z, gap_r_y, gap_r_z, gap_a_y, gap_a_z) -> int:
    """Triples where the less similar point is not farther in r or in the angle."""
    y_far = s_y < s_z
    z_far = s_z < s_y
    ok_y = (gap_r_y > gap_r_z) | (gap_a_y > gap_a_z)
    ok_z = (gap_r_z > gap_r_y) | (gap_a_z > gap_a_y)
    return int(np.sum(y_far & ~ok_y) + np.sum(z_far & ~ok_z))


def check_weak_identifiability(
    cfg: SystemConfig, area: AreaSpec, n_triples: int = 10_000, seed: int = 0, max_rounds: int = 50
) -> IdentifiabilityCheck:
    """Empirical weak-identifiability sweep.

    Draws x in the area and y, z in x's identifiable neighborhood, then counts
    triples where the PI distance orders y and z against both polar
    coordinates. A UCA uses the Bessel approximation of the similarity and
    the azimuth; a ULA uses the exact factors and sin(theta), the coordinate
    its angular kernel is monotone in.
    """
    t = threshold_for(cfg)
    widths = main_lobe_widths(cfg)
    half_r = widths["radial"].post_threshold_width / 2.0
    geometry = cfg.array
    is_ula = isinstance(geometry, ULAGeometry)
    if is_ula:
        if geometry.na == 1 or t >= 1.0:
            raise ConfigurationError("single-antenna ULA: no angular neighborhood to sample")
        half_a = dirichlet_inverse(geometry.na, t) / (2.0 * math.pi * geometry.delta_r * geometry.na)
    elif isinstance(geometry, UCAGeometry):
        half_a = widths["angular"].post_threshold_width / 2.0
    else:
        raise ConfigurationError("identifiability sweeps need a ULA or UCA geometry")

    rng = np.random.default_rng([seed, 1])
    region = region_from_area(area)
    checked = 0
    violations = 0
    batch = max(4 * n_triples, 1000)

    for round_index in range(max_rounds):
        if checked >= n_triples:
            break
        x = sample_positions(region, batch, seed + round_index)
        r_x = x[:, 0]
        a_x = np.sin(x[:, 1]) if is_ula else x[:, 1]
        dr = rng.uniform(-half_r, half_r, size=(2, batch))
        da = rng.uniform(-half_a, half_a, size=(2, batch))
        r_yz = r_x + dr
        a_yz = a_x + da

        if is_ula:
            gain = 2.0 * math.pi * geometry.delta_r * geometry.na
            angular = np.abs(dirichlet_kernel(geometry.na, gain * (a_x - a_yz)))
            valid = np.all(np.abs(a_yz) <= 1.0, axis=0)
        else:
            angular = angular_term_uca_approx(cfg, a_x, a_yz)
            valid = np.ones(batch, dtype=bool)
        s = radial_term(cfg, r_x, r_yz) * angular
        keep = valid & np.all(r_yz > 0, axis=0) & np.all(s >= t, axis=0)

        idx = np.flatnonzero(keep)[: n_triples - checked]
        gap_r = np.abs(r_yz[:, idx] - r_x[idx])
        gap_a = np.abs(a_yz[:, idx] - a_x[idx]) if is_ula else angular_difference(a_yz[:, idx], a_x[idx])
        violations += _order_violations(s[0, idx], s[1, idx], gap_r[0], gap_r[1], gap_a[0], gap_a[1])
        checked += idx.size

    if checked < n_triples:
        logger.warning("[Design] weak identifiability sweep kept only %d of %d triples", checked, n_triples)
    logger.info("[Design] weak identifiability: %d violations over %d triples", violations, checked)
    return IdentifiabilityCheck(kind="weak", n_checked=checked, violations=violations, threshold=t)


def check_strong_identifiability(
    cfg: SystemConfig, positions: Sequence, ref_index: int = 0
) -> IdentifiabilityCheck:
    """Count pairs whose PI-distance order from the reference UE disagrees with Euclidean order."""
    polar = as_polar_array(positions)
    if not 0 <= ref_index < polar.shape[0]:
        raise IndexError("reference index out of range")
    d_pi = pi_distances_from(synth_channels(cfg, polar), ref_index)
    xy = polar_to_cartesian(polar)
    d_eu = np.linalg.norm(xy - xy[ref_index], axis=1)

    others = np.delete(np.arange(polar.shape[0]), ref_index)
    sign_pi = np.sign(d_pi[others][:, None] - d_pi[others][None, :])
    sign_eu = np.sign(d_eu[others][:, None] - d_eu[others][None, :])
    discordant = int(np.sum(np.triu(sign_pi * sign_eu < 0, k=1)))
    n_pairs = others.size * (others.size - 1) // 2
    return IdentifiabilityCheck(kind="strong", n_checked=n_pairs, violations=discordant)


def identifiability_report(cfg: SystemConfig, area: AreaSpec, k_min: int = 1) -> IdentifiabilityReport:
    """Evaluate every identifiability rule for a fixed configuration over an area."""
    clauses = necessary_condition(cfg, area)
    necessary_ok = all(c.ok for c in clauses)

    t, d_t = sufficient_threshold(cfg)
    clauses.append(Clause(
        name="similarity_threshold",
        proposition=f"sufficient identifiability condition ({cfg.geometry.upper()})",
        ok=True,
        detail=f"keep pairs with s >= {t:.4f}, i.e. distance <= {d_t:.4f}",
    ))

    widths = main_lobe_widths(cfg, area.angular_center)
    radial = widths["radial"].post_threshold_width
    if not radial:
        raise ConfigurationError(
            f"{cfg.ns} subcarrier(s) give no radial resolution: the radial kernel is flat at threshold {t:.4f}"
        )
    angular = widths["angular"].post_threshold_width
    arc = None if angular is None else angular * area.r_center
    gamma = radial / arc if arc else None

    try:
        maximal = identifiable_area(cfg, area.r_center, area.angular_center)
    except InfeasibleDesignError as exc:
        logger.info("[Design] no maximal area: %s", exc)
        maximal = None

    return IdentifiabilityReport(
        geometry=cfg.geometry,
        necessary_ok=necessary_ok,
        clauses=clauses,
        sufficient_threshold=t,
        distance_threshold=d_t,
        identifiable_area=maximal,
        r_ref=area.r_center,
        radial_axis=radial,
        angular_axis=angular,
        angular_arc=arc,
        roundness_gamma=gamma,
        k_min=k_min,
        min_density=min_user_density(cfg, k_min),
    )


def design(area: AreaSpec, constraints: DesignConstraints = None) -> IdentifiabilityReport:
    """Solve a UCA system for an area: fc and R first, B for gamma = 1, then delta_f and Ns."""
    constraints = constraints or DesignConstraints()
    fc, na = constraints.fc, constraints.na
    r0 = area.r_center

    def trial(radius: float, bandwidth: float) -> SystemConfig:
        return SystemConfig(fc=fc, ns=1, delta_f=bandwidth, array=UCAGeometry(na=na, radius=radius))

    if constraints.uca_radius is not None or constraints.bandwidth is None:
        radius = constraints.uca_radius if constraints.uca_radius is not None else 0.42
        if constraints.bandwidth is None:
            try:
                bandwidth = optimal_bandwidth(trial(radius, 1.0), r0)
            except ConfigurationError as exc:
                raise InfeasibleDesignError("uca_radius", str(exc)) from exc
        else:
            bandwidth = constraints.bandwidth
    else:
        bandwidth = constraints.bandwidth
        try:
            radius = optimal_radius(trial(1.0, bandwidth), r0, bandwidth)
        except ConfigurationError as exc:
            raise InfeasibleDesignError("bandwidth", str(exc)) from exc

    guideline = C / area.radial_size if area.radial_size > 0 else math.inf
    max_spacing = 1.0 / (area.radial_size / C + 1.0 / bandwidth)
    # Ns > 2 keeps the threshold at the Bessel side lobe
    ns = max(3, math.ceil(bandwidth / max_spacing - 1e-9))
    if ns > config.max_subcarriers():
        raise InfeasibleDesignError(
            "radial_size",
            f"radial size {area.radial_size:.4g} m needs {ns} subcarriers at B={format_quantity(bandwidth, 'Hz')}, "
            f"above the cap of {config.max_subcarriers()}",
        )

    cfg = SystemConfig(fc=fc, ns=ns, delta_f=bandwidth / ns, array=UCAGeometry(na=na, radius=radius))
    try:
        report = identifiability_report(cfg, area, constraints.k_min)
    except ConfigurationError as exc:
        raise InfeasibleDesignError("uca_radius", str(exc)) from exc

    failed = report.violated_clauses
    if failed:
        clause = next(c for c in report.clauses if not c.ok)
        raise InfeasibleDesignError(clause.name, clause.detail)

    report.clauses.insert(0, Clause(
        name="subcarrier_spacing",
        proposition="practical guideline: delta_f <= c / radial size",
        ok=True,
        detail=(f"delta_f = {format_quantity(cfg.delta_f, 'Hz')} <= {format_quantity(max_spacing, 'Hz')} "
                f"(c / R = {format_quantity(guideline, 'Hz')})"),
    ))
    report.max_subcarrier_spacing = max_spacing
    report.guideline_spacing = guideline
    report.suggested_config = cfg
    logger.info("[Design] B=%.4g Hz, R=%.4g m, Ns=%d, delta_f=%.4g Hz", bandwidth, radius, ns, cfg.delta_f)
    return report
