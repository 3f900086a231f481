"""
Command-line entry point.

    loschart design    --r-center 296 --radial-size 422
    loschart synth     --config system.cfg --r-min 100 --r-max 500 --n 2000 --out ues.lcd
    loschart chart     --dataset ues.lcd --out-dir run/
    loschart eval      --chart run/chart.csv --dataset ues.lcd
    loschart plot      kernel_profile --config system.cfg --out profile.svg
    loschart reproduce variants --out-dir outputs/variants

Exit codes: 0 success, 2 invalid input or infeasible design, 1 anything else.
"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from .. import __version__
from ..config import config
from ..errors import GroundTruthMissingError, LosChartError, ScenarioRunError
from ..models.schemas import (
    AreaSpec,
    DesignConstraints,
    IdentifiabilityReport,
    PlotSpec,
    PolarPosition,
    RegionSpec,
    RunManifest,
)
from ..services import experiments, plots
from ..services.channel_model import sample_positions, synth_channels
from ..services.charting import procrustes_align, run_pipeline
from ..services.design_rules import design, identifiability_report, min_user_density
from ..services.kernels import pi_distances_from, similarity_to_distance, threshold_for
from ..services.metrics import evaluate_chart
from ..storage.config_file import read_config_file, write_config_file
from ..storage.dataset import read_dataset, write_dataset
from ..storage.results import read_chart, write_chart, write_manifest
from ..utils.helpers import format_quantity, format_table, polar_to_cartesian

logger = logging.getLogger(__name__)

RULE = "-" * 40


# --- Output helpers --------------------------------------------------------------


def _print_report(report: IdentifiabilityReport) -> None:
    print("\n--- Identifiability ---")
    print(f"Geometry: {report.geometry.upper()}")
    print(f"Necessary condition: {'satisfied' if report.necessary_ok else 'VIOLATED'}")
    for clause in report.clauses:
        print(f"  [{'ok' if clause.ok else 'FAIL'}] {clause.name}: {clause.detail}")
    print(f"Similarity threshold: {report.sufficient_threshold:.5f}")
    print(f"Distance threshold: {report.distance_threshold:.3f}")

    print("\n--- Neighborhoods ---")
    print(f"Reference range: {report.r_ref:.4g} m")
    print(f"Radial axis: {report.radial_axis:.4g} m")
    if report.angular_axis is not None:
        print(f"Angular axis: {report.angular_axis:.5f} rad (arc {report.angular_arc:.4g} m)")
    else:
        print("Angular axis: split main lobe")
    if report.roundness_gamma is not None:
        print(f"Roundness gamma: {report.roundness_gamma:.4f}")
    print(f"Minimum UE density (k_min={report.k_min}): {report.min_density:.4e} UEs/m^2")
    if report.identifiable_area is not None:
        area = report.identifiable_area
        print(f"Maximal identifiable area: r in [{area.r_min:.4g}, {area.r_max:.4g}] m, "
              f"span {area.angular_span:.4f} rad around {area.angular_center:.4f} rad")

    cfg = report.suggested_config
    if cfg is not None:
        print("\n--- Suggested system ---")
        print(f"Carrier: {format_quantity(cfg.fc, 'Hz')}")
        print(f"UCA: {cfg.na} antennas, radius {cfg.array.radius:.4f} m")
        print(f"Bandwidth: {format_quantity(cfg.bandwidth, 'Hz')}")
        print(f"Subcarriers: {cfg.ns} x {format_quantity(cfg.delta_f, 'Hz')}")
        print(f"Max subcarrier spacing: {format_quantity(report.max_subcarrier_spacing, 'Hz')}")
        print(f"Guideline c / radial size: {format_quantity(report.guideline_spacing, 'Hz')}")
    print(RULE)


def _area_from_args(args) -> AreaSpec:
    return AreaSpec(
        r_center=args.r_center,
        radial_size=args.radial_size,
        angular_center=args.angular_center,
        angular_span=args.angular_span,
    )


def _run_manifest(parameters: dict, outputs: dict, seed: int, metrics=None) -> RunManifest:
    return RunManifest(parameters=parameters, metrics=metrics, outputs=outputs,
                       tool_version=__version__, seed=seed)


# --- Subcommands -----------------------------------------------------------------


def cmd_design(args) -> int:
    area = _area_from_args(args)
    if args.config:
        cfg = read_config_file(args.config)
        report = identifiability_report(cfg, area, args.k_min)
    else:
        constraints = DesignConstraints(
            fc=args.fc, na=args.na, bandwidth=args.bandwidth, uca_radius=args.uca_radius, k_min=args.k_min,
        )
        report = design(area, constraints)

    if args.json:
        print(report.model_dump_json(indent=2))
    else:
        _print_report(report)

    if args.out_config and report.suggested_config is not None:
        write_config_file(report.suggested_config, args.out_config)
        print(f"Config written to {args.out_config}")
    return 0 if report.necessary_ok else 2


def cmd_synth(args) -> int:
    cfg = read_config_file(args.config)
    region = RegionSpec(r_min=args.r_min, r_max=args.r_max, theta_min=args.theta_min, theta_max=args.theta_max)
    seed = config.seed() if args.seed is None else args.seed
    positions = sample_positions(region, args.n, seed)
    channels = synth_channels(cfg, positions)
    out = write_dataset(channels, cfg, args.out, include_truth=not args.no_truth)

    manifest = _run_manifest(
        parameters={"config": Path(args.config).name, "region": region.model_dump(), "n": args.n,
                    "include_truth": not args.no_truth},
        outputs={"dataset": out.name},
        seed=seed,
    )
    write_manifest(manifest, out.with_name(out.name + ".manifest.json"))

    print("\n--- Dataset ---")
    print(f"UEs: {channels.n}")
    print(f"Channel length: {cfg.na} x {cfg.ns}")
    print(f"Written to: {out}")
    print(RULE)
    return 0


def cmd_chart(args) -> int:
    header, channels = read_dataset(args.dataset)
    cfg = header.config
    if args.distance == "euclidean_gt" and channels.positions is None:
        raise GroundTruthMissingError("the euclidean_gt distance needs a dataset with ground truth")

    chart = run_pipeline(
        channels,
        cfg,
        thresholded=not args.no_threshold,
        distance=args.distance,
        k_neighbors=args.k,
        min_density=min_user_density(cfg),
    )
    metrics = None
    if channels.positions is not None and chart.points.shape[0] >= 3:
        truth_xy = polar_to_cartesian(channels.positions)
        metrics = evaluate_chart(truth_xy, chart)
        if args.align:
            chart = procrustes_align(chart, truth_xy)

    out_dir = Path(args.out_dir)
    write_chart(chart, out_dir / "chart.csv")
    t = threshold_for(cfg)
    parameters = {
        "dataset": Path(args.dataset).name,
        "distance": args.distance,
        "thresholded": not args.no_threshold,
        "threshold": t,
        "distance_threshold": similarity_to_distance(t),
        "aligned": chart.aligned,
        "n_input": chart.n_input,
        "n_charted": int(chart.points.shape[0]),
        "excluded": chart.excluded.tolist(),
        "graph": {k: (v.item() if isinstance(v, np.generic) else v) for k, v in chart.graph_stats.items()},
    }
    write_manifest(
        _run_manifest(parameters, {"chart": "chart.csv", "manifest": "manifest.json"}, config.seed(), metrics),
        out_dir / "manifest.json",
    )

    print("\n--- Chart ---")
    print(f"Charted UEs: {chart.points.shape[0]} of {chart.n_input}")
    print(f"Graph edges: {chart.graph_stats.get('edge_count', 0)}")
    if "k_neighbors" in chart.graph_stats:
        print(f"kNN k: {chart.graph_stats['k_neighbors']}")
    if metrics is not None:
        print(f"TW={metrics.tw:.4f} CT={metrics.ct:.4f} KS={metrics.ks:.4f} (k={metrics.k_neighbors})")
    print(f"Written to: {out_dir}")
    print(RULE)
    return 0


def cmd_eval(args) -> int:
    header, channels = read_dataset(args.dataset)
    if channels.positions is None:
        raise GroundTruthMissingError("evaluation needs a dataset with ground-truth positions")
    chart = read_chart(args.chart, n_input=header.n)
    report = evaluate_chart(polar_to_cartesian(channels.positions), chart, k=args.k)
    print(f"TW={report.tw:.6f}")
    print(f"CT={report.ct:.6f}")
    print(f"KS={report.ks:.6f}")
    print(f"K={report.k_neighbors}")
    print(f"N={report.n_scored}")
    return 0


def cmd_plot(args) -> int:
    spec = PlotSpec(kind=args.kind, color_by=args.color_by, output_path=args.out, title=args.title)

    if spec.kind in ("similarity_heatmap", "kernel_profile"):
        if not args.config:
            raise ValueError(f"{spec.kind} needs --config")
        cfg = read_config_file(args.config)
        ref = PolarPosition(r=args.ref_r, theta=args.ref_theta)
        if spec.kind == "similarity_heatmap":
            half = args.half_size if args.half_size else 1.5 * ref.r
            path = plots.similarity_heatmap(cfg, ref, half, spec)
        else:
            path = plots.kernel_profile(cfg, ref, spec)
    else:
        if not args.dataset:
            raise ValueError(f"{spec.kind} needs --dataset")
        header, channels = read_dataset(args.dataset)
        if spec.kind == "scatter_chart":
            if not args.chart:
                raise ValueError("scatter_chart needs --chart")
            chart = read_chart(args.chart, n_input=header.n)
            path = plots.scatter_chart(chart, channels.positions, spec)
        else:
            if channels.positions is None:
                raise GroundTruthMissingError("threshold_map needs a dataset with ground truth")
            distances = pi_distances_from(channels, args.ref_index)
            absent = distances > similarity_to_distance(threshold_for(header.config))
            path = plots.threshold_map(channels.positions, distances, absent, args.ref_index, spec)

    print(f"Plot written to {path}")
    return 0


def cmd_reproduce(args) -> int:
    out_dir = Path(args.out_dir) if args.out_dir else Path(config.OUTPUT_DIR) / experiments.suite_key(args.suite)
    manifests = experiments.run_suite(
        args.suite, out_dir=out_dir, n_ue=args.n_ue, seed=args.seed, make_plots=not args.no_plots,
    )
    print(f"\n--- Suite {experiments.suite_key(args.suite)} ---")
    print(experiments.summary_table(manifests))
    print(f"\nOutputs in {out_dir}")
    print(RULE)
    return 0


def cmd_scenarios(args) -> int:
    rows = [[s.name, s.config.geometry.upper(), s.config.na, format_quantity(s.config.bandwidth, "Hz"),
             s.config.ns, s.description] for s in experiments.list_scenarios()]
    print(format_table(rows, ["scenario", "array", "Na", "B", "Ns", "description"]))
    return 0


# --- Parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loschart", description="Line-of-sight channel charting toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="override LOSCHART_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="size a UCA system for an area, or check a given config")
    p.add_argument("--r-center", type=float, required=True, help="area centre range (m)")
    p.add_argument("--radial-size", type=float, required=True, help="area radial extent (m)")
    p.add_argument("--angular-center", type=float, default=0.0)
    p.add_argument("--angular-span", type=float, default=2.0 * math.pi)
    p.add_argument("--config", help="evaluate this config file instead of designing one")
    p.add_argument("--fc", type=float, default=3e9)
    p.add_argument("--na", type=int, default=64)
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--uca-radius", type=float, default=None)
    p.add_argument("--k-min", type=int, default=1)
    p.add_argument("--out-config", help="write the suggested config file here")
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("synth", help="sample UEs and write a channel dataset")
    p.add_argument("--config", required=True)
    p.add_argument("--r-min", type=float, required=True)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("--theta-min", type=float, default=-math.pi)
    p.add_argument("--theta-max", type=float, default=math.pi)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-truth", action="store_true", help="omit ground-truth positions")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("chart", help="chart a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--no-threshold", action="store_true", help="raw PI distance with a kNN graph")
    p.add_argument("--distance", choices=["pi", "euclidean_gt"], default="pi")
    p.add_argument("--k", type=int, default=None, help="kNN k for --no-threshold")
    p.add_argument("--align", action="store_true", help="Procrustes-align the chart to the ground truth")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_chart)

    p = sub.add_parser("eval", help="score a chart against ground truth")
    p.add_argument("--chart", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("plot", help="write a static figure")
    p.add_argument("kind", choices=["scatter_chart", "similarity_heatmap", "kernel_profile", "threshold_map"])
    p.add_argument("--config")
    p.add_argument("--dataset")
    p.add_argument("--chart")
    p.add_argument("--ref-r", type=float, default=300.0)
    p.add_argument("--ref-theta", type=float, default=0.0)
    p.add_argument("--ref-index", type=int, default=0)
    p.add_argument("--half-size", type=float, default=None)
    p.add_argument("--color-by", choices=["azimuth", "range"], default="azimuth")
    p.add_argument("--title", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("reproduce", help="run a reproduction suite (variants or arrays)")
    p.add_argument("suite")
    p.add_argument("--out-dir", default=None)
    p.add_argument("--n-ue", type=int, default=experiments.BASE_UE_COUNT)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("scenarios", help="list the known scenarios")
    p.set_defaults(func=cmd_scenarios)
    return parser


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, ScenarioRunError):
        return 2 if isinstance(exc.cause, ValueError) else 1
    if isinstance(exc, (LosChartError, ValueError)):
        return 2
    return 1


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config.configure_logging(args.log_level)
    try:
        return args.func(args)
    except Exception as exc:  # mapped to an exit code below
        code = _exit_code(exc)
        tag = type(exc).__name__ if code == 2 else "internal error"
        print(f"[{tag}] {exc}", file=sys.stderr)
        if code == 1:
            logger.exception("[CLI] unexpected failure")
        return code


if __name__ == "__main__":
    sys.exit(main())
