"""Chart coordinates (CSV) and run manifests (canonical JSON)."""

import json
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ..errors import DatasetFormatError
from ..models.schemas import Chart, RunManifest

logger = logging.getLogger(__name__)

CHART_HEADER = "index,x,y"

PathLike = Union[str, Path]


def write_chart(chart: Chart, path: PathLike) -> Path:
    """One `index,x,y` row per charted UE, full float precision."""
    if chart.points.shape[1] != 2:
        raise ValueError("chart files hold 2D charts only")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [CHART_HEADER]
    lines += [f"{int(i)},{x:.17g},{y:.17g}" for i, (x, y) in zip(chart.indices, chart.points)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_chart(path: PathLike, n_input: Optional[int] = None) -> Chart:
    path = Path(path)
    if not path.is_file():
        raise DatasetFormatError(f"chart file not found: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != CHART_HEADER:
        raise DatasetFormatError(f"{path}: chart files start with '{CHART_HEADER}'")
    try:
        rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:] if line.strip()],
                        dtype=float).reshape(-1, 3)
    except ValueError as exc:
        raise DatasetFormatError(f"{path}: malformed chart row ({exc})") from exc
    indices = rows[:, 0].astype(int)
    if n_input is None:
        n_input = int(indices.max()) + 1 if indices.size else 0
    return Chart(points=rows[:, 1:], indices=indices, n_input=n_input, source="geodesic")


def manifest_to_json(manifest: RunManifest) -> str:
    """Canonical text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(manifest.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def write_manifest(manifest: RunManifest, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(manifest_to_json(manifest), encoding="utf-8")
    logger.info("[Manifest] wrote %s", path)
    return path


def read_manifest(path: PathLike) -> RunManifest:
    return RunManifest.model_validate_json(Path(path).read_text(encoding="utf-8"))
