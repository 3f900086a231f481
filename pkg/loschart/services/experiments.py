"""
Reproduction scenarios.

Suite "variants" is the base UCA scenario against three one-knob variants (no
threshold, doubled subcarrier spacing, reduced bandwidth). Suite "arrays" charts
a 16-antenna ULA and a 64-antenna UCA over a full annulus and over a sector
that is identifiable for the ULA as well.
"""

import logging
import math
from pathlib import Path
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from .. import __version__
from ..config import config
from ..errors import LosChartError, ScenarioRunError
from ..models.schemas import (
    AreaSpec,
    Chart,
    PlotSpec,
    RunManifest,
    ScenarioSpec,
    SystemConfig,
    UCAGeometry,
    ULAGeometry,
)
from ..storage.config_file import write_config_file
from ..storage.results import write_chart, write_manifest
from ..utils.helpers import format_table, polar_to_cartesian
from .channel_model import region_from_area, sample_positions, synth_channels
from .charting import procrustes_align, run_pipeline
from .design_rules import (
    identifiability_report,
    min_user_density,
    radial_bound,
    round_center,
    ula_sin_half_range,
)
from .kernels import pi_distances_from, similarity_to_distance, threshold_for
from .metrics import evaluate_chart
from .plots import scatter_chart, threshold_map

logger = logging.getLogger(__name__)

BASE_UE_COUNT = 2838
ULA_ANTENNAS = 16
# Radial size of the areas compared in the ULA / UCA runs
COMPARISON_RADIAL_SIZE = 200.0

PathLike = Union[str, Path]


def base_config() -> SystemConfig:
    """64-antenna UCA of radius 0.42 m at 3 GHz, 16 subcarriers over 10 MHz."""
    return SystemConfig(fc=3e9, ns=16, delta_f=625e3, array=UCAGeometry(na=64, radius=0.42))


def scenario_base(n_ue: int = BASE_UE_COUNT, seed: Optional[int] = None) -> ScenarioSpec:
    """Base scenario: round neighborhoods at the centre of a maximal-depth quarter annulus."""
    cfg = base_config()
    area = AreaSpec(
        r_center=round_center(cfg),
        radial_size=radial_bound(cfg),
        angular_center=0.0,
        angular_span=math.pi / 2.0,
    )
    return ScenarioSpec(
        name="base",
        description="UCA base scenario, thresholded PI distance",
        config=cfg,
        area=area,
        n_ue=n_ue,
        seed=config.seed() if seed is None else seed,
    )


def scenario_variants(base: ScenarioSpec, bandwidth_factor: float = 2.0) -> List[ScenarioSpec]:
    """The three variants, each changing one knob of the base scenario."""
    cfg = base.config
    if cfg.ns % 2:
        raise ValueError("doubling the subcarrier spacing at fixed bandwidth needs an even Ns")

    no_threshold = base.model_copy(update={
        "name": "variant1_no_threshold",
        "description": "raw PI distance, kNN graph with the thresholded mean degree",
        "no_threshold": True,
    })
    double_delta_f = base.model_copy(update={
        "name": "variant2_double_delta_f",
        "description": "subcarrier spacing doubled at fixed bandwidth (Ns halved)",
        "config": SystemConfig(fc=cfg.fc, ns=cfg.ns // 2, delta_f=2.0 * cfg.delta_f, array=cfg.array),
        "double_delta_f": True,
    })
    reduced_bandwidth = base.model_copy(update={
        "name": "variant3_reduced_bandwidth",
        "description": f"bandwidth divided by {bandwidth_factor:g} at fixed Ns",
        "config": SystemConfig(fc=cfg.fc, ns=cfg.ns, delta_f=cfg.delta_f / bandwidth_factor, array=cfg.array),
        "reduced_bandwidth": True,
        "bandwidth_factor": bandwidth_factor,
    })
    return [no_threshold, double_delta_f, reduced_bandwidth]


def scenario_ula_vs_uca(n_ue: int = BASE_UE_COUNT, seed: Optional[int] = None) -> List[ScenarioSpec]:
    """ULA and UCA over a full annulus and over a ULA-identifiable sector."""
    base = scenario_base(n_ue, seed)
    uca = base.config
    ula = SystemConfig(fc=uca.fc, ns=uca.ns, delta_f=uca.delta_f, array=ULAGeometry(na=ULA_ANTENNAS, delta_r=0.5))

    r0 = base.area.r_center
    full = AreaSpec(r_center=r0, radial_size=COMPARISON_RADIAL_SIZE, angular_span=2.0 * math.pi)
    sector = AreaSpec(
        r_center=r0,
        radial_size=COMPARISON_RADIAL_SIZE,
        angular_center=0.0,
        angular_span=2.0 * math.asin(ula_sin_half_range(ula.array)),
    )

    scenarios = []
    for area_name, area in (("full", full), ("sector", sector)):
        for array_name, cfg in (("ula", ula), ("uca", uca)):
            scenarios.append(base.model_copy(update={
                "name": f"{array_name}_{area_name}",
                "description": f"{cfg.na}-antenna {array_name.upper()} over the {area_name} area",
                "config": cfg,
                "area": area,
            }))
    return scenarios


def _suite_variants(n_ue: int, seed: Optional[int]) -> List[ScenarioSpec]:
    base = scenario_base(n_ue, seed)
    return [base] + scenario_variants(base)


SUITES: Dict[str, Callable[[int, Optional[int]], List[ScenarioSpec]]] = {
    "variants": _suite_variants,
    "arrays": scenario_ula_vs_uca,
}


def suite_key(name: str) -> str:
    """Case and surrounding whitespace are ignored."""
    key = name.strip().lower()
    if key not in SUITES:
        raise ValueError(f"unknown reproduction suite '{name}', choose one of {sorted(SUITES)}")
    return key


def list_scenarios(n_ue: int = BASE_UE_COUNT, seed: Optional[int] = None) -> List[ScenarioSpec]:
    scenarios = []
    for key in SUITES:
        scenarios.extend(SUITES[key](n_ue, seed))
    return scenarios


def scenario_by_name(name: str, n_ue: int = BASE_UE_COUNT, seed: Optional[int] = None) -> ScenarioSpec:
    for scenario in list_scenarios(n_ue, seed):
        if scenario.name == name:
            return scenario
    names = ", ".join(s.name for s in list_scenarios(1, 0))
    raise ValueError(f"unknown scenario '{name}'; known scenarios: {names}")


def _plain(value):
    """numpy scalars and arrays to JSON-friendly Python values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def _parameters(scenario: ScenarioSpec, chart: Chart) -> Dict:
    cfg = scenario.config
    report = identifiability_report(cfg, scenario.area)
    t, d_t = report.sufficient_threshold, report.distance_threshold
    return _plain({
        "bandwidth": cfg.bandwidth,
        "threshold": t,
        "distance_threshold": d_t,
        "thresholded": not scenario.no_threshold,
        "radial_lobe": report.radial_axis,
        "angular_lobe": report.angular_axis,
        "angular_arc": report.angular_arc,
        "gamma": report.roundness_gamma,
        "radial_bound": radial_bound(cfg),
        "necessary_ok": report.necessary_ok,
        "violated_clauses": report.violated_clauses,
        "min_density": report.min_density,
        "k_min": report.k_min,
        "k_min_reached": chart.graph_stats.get("min_degree", 0) >= report.k_min,
        "density": scenario.n_ue / _area_size(scenario.area),
        "n_charted": int(chart.points.shape[0]),
        "n_excluded": int(chart.excluded.size),
        "graph": chart.graph_stats,
    })


def _area_size(area: AreaSpec) -> float:
    return 0.5 * min(area.angular_span, 2.0 * math.pi) * (area.r_max ** 2 - area.r_min ** 2)


def _centre_index(scenario: ScenarioSpec, positions: np.ndarray) -> int:
    xy = polar_to_cartesian(positions)
    centre = polar_to_cartesian([[scenario.area.r_center, scenario.area.angular_center]])[0]
    return int(np.argmin(np.linalg.norm(xy - centre, axis=1)))


def run(scenario: ScenarioSpec, out_dir: Optional[PathLike] = None, make_plots: bool = True,
        threshold_figure: bool = False) -> RunManifest:
    """Sample, synthesize, chart, score and (optionally) write one scenario.

    Files land in out_dir/<scenario name>/ and the manifest lists them by
    path relative to that directory.
    """
    stage = "sampling UEs"
    try:
        cfg = scenario.config
        positions = sample_positions(region_from_area(scenario.area), scenario.n_ue, scenario.seed)

        stage = "synthesizing channels"
        channels = synth_channels(cfg, positions)

        stage = "charting"
        chart = run_pipeline(
            channels,
            cfg,
            thresholded=not scenario.no_threshold,
            distance=scenario.distance,
            positions=positions,
            min_density=min_user_density(cfg),
        )

        stage = "scoring the chart"
        truth_xy = polar_to_cartesian(positions)
        metrics = evaluate_chart(truth_xy, chart)
        aligned = procrustes_align(chart, truth_xy)

        stage = "collecting parameters"
        parameters = _parameters(scenario, chart)
        parameters["k_neighbors"] = metrics.k_neighbors

        outputs: Dict[str, str] = {}
        if out_dir is not None:
            stage = "writing outputs"
            run_dir = Path(out_dir) / scenario.name
            run_dir.mkdir(parents=True, exist_ok=True)
            write_config_file(cfg, run_dir / "system.cfg")
            outputs["config"] = "system.cfg"
            write_chart(aligned, run_dir / "chart.csv")
            outputs["chart"] = "chart.csv"
            if make_plots:
                stage = "plotting"
                fmt = config.PLOT_FORMAT
                scatter_chart(aligned, positions, PlotSpec(
                    kind="scatter_chart", output_path=str(run_dir / f"chart.{fmt}"),
                    title=f"{scenario.name}: TW={metrics.tw:.3f} CT={metrics.ct:.3f} KS={metrics.ks:.3f}",
                ))
                outputs["chart_plot"] = f"chart.{fmt}"
                if threshold_figure and scenario.n_ue > 0:
                    ref = _centre_index(scenario, positions)
                    distances = pi_distances_from(channels, ref)
                    absent = distances > similarity_to_distance(threshold_for(cfg))
                    threshold_map(positions, distances, absent, ref, PlotSpec(
                        kind="threshold_map", output_path=str(run_dir / f"threshold_map.{fmt}"),
                    ))
                    outputs["threshold_map"] = f"threshold_map.{fmt}"
            outputs["manifest"] = "manifest.json"

        manifest = RunManifest(
            scenario=scenario,
            parameters=parameters,
            metrics=metrics,
            outputs=outputs,
            tool_version=__version__,
            seed=scenario.seed,
        )
        if out_dir is not None:
            write_manifest(manifest, Path(out_dir) / scenario.name / "manifest.json")
    except (LosChartError, ValueError, ArithmeticError) as exc:
        logger.error("[Experiments] %s failed while %s: %s", scenario.name, stage, exc)
        raise ScenarioRunError(scenario.name, stage, exc) from exc

    logger.info("[Experiments] %s: TW=%.4f CT=%.4f KS=%.4f", scenario.name, metrics.tw, metrics.ct, metrics.ks)
    return manifest


def summary_table(manifests: List[RunManifest]) -> str:
    rows = []
    for m in manifests:
        gamma = m.parameters.get("gamma")
        rows.append([
            m.scenario.name,
            m.scenario.config.geometry.upper(),
            m.metrics.n_scored,
            m.metrics.tw,
            m.metrics.ct,
            m.metrics.ks,
            m.metrics.k_neighbors,
            m.parameters["graph"].get("edge_count", 0),
            "-" if gamma is None else f"{gamma:.3f}",
            "yes" if m.parameters["necessary_ok"] else "no",
        ])
    return format_table(rows, ["scenario", "array", "n", "TW", "CT", "KS", "k", "edges", "gamma", "identifiable"])


def run_suite(name: str, out_dir: Optional[PathLike] = None, n_ue: int = BASE_UE_COUNT,
              seed: Optional[int] = None, make_plots: bool = True) -> List[RunManifest]:
    """Run every scenario of a suite; writes summary.txt next to the run folders."""
    key = suite_key(name)
    scenarios = SUITES[key](n_ue, seed)
    logger.info("[Experiments] suite %s: %d scenarios, %d UEs each", key, len(scenarios), n_ue)

    manifests = [
        run(s, out_dir=out_dir, make_plots=make_plots, threshold_figure=(s.name == "base"))
        for s in scenarios
    ]
    if out_dir is not None:
        path = Path(out_dir) / "summary.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(f"suite {key}\n\n{summary_table(manifests)}\n", encoding="utf-8")
        logger.info("[Experiments] wrote %s", path)
    return manifests
