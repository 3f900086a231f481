"""Pydantic models and schemas for the library."""

import math
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import sparse

from ..config import config

# A similarity value s in [0, 1]
SimilarityValue = Annotated[float, Field(ge=0.0, le=1.0)]

DistanceKind = Literal["pi", "pi_thresholded", "euclidean_gt", "geodesic"]


class ULAGeometry(BaseModel):
    """Uniform linear array along the y axis, spacing in wavelengths."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["ula"] = "ula"
    na: int = Field(ge=1)
    delta_r: float = Field(default=0.5, gt=0)


class UCAGeometry(BaseModel):
    """Uniform circular array of radius `radius` metres."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["uca"] = "uca"
    na: int = Field(ge=1)
    radius: float = Field(gt=0)


class ArbitraryGeometry(BaseModel):
    """Free 2D layout, positions relative to the array barycenter."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["arbitrary"] = "arbitrary"
    positions: Tuple[Tuple[float, float], ...]

    @field_validator("positions")
    @classmethod
    def _centered(cls, value):
        if not value:
            raise ValueError("arbitrary geometry needs at least one antenna")
        xy = np.asarray(value, dtype=float)
        if np.max(np.abs(xy.mean(axis=0))) > 1e-12:
            raise ValueError("antenna positions must be given relative to their barycenter")
        return value

    @property
    def na(self) -> int:
        return len(self.positions)


ArrayGeometry = Annotated[
    Union[ULAGeometry, UCAGeometry, ArbitraryGeometry],
    Field(discriminator="kind"),
]


class SystemConfig(BaseModel):
    """Carrier, subcarrier grid and antenna array of the base station."""
    model_config = ConfigDict(frozen=True)

    fc: float = Field(gt=0)
    ns: int = Field(ge=1)
    delta_f: float = Field(gt=0)
    array: ArrayGeometry

    @model_validator(mode="after")
    def _grid_centered(self):
        grid = self.subcarriers()
        if abs(grid.mean() - self.fc) > 1e-9 * self.fc:
            raise ValueError("subcarrier grid is not centered on the carrier")
        return self

    @property
    def bandwidth(self) -> float:
        return self.ns * self.delta_f

    @property
    def wavelength(self) -> float:
        return config.SPEED_OF_LIGHT / self.fc

    @property
    def na(self) -> int:
        return self.array.na

    @property
    def geometry(self) -> str:
        return self.array.kind

    def subcarriers(self) -> np.ndarray:
        """f_s = fc - delta_f (ns - 1) / 2 + delta_f (s - 1), s = 1..ns."""
        s = np.arange(self.ns, dtype=float)
        return self.fc - self.delta_f * (self.ns - 1) / 2.0 + self.delta_f * s


class PolarPosition(BaseModel):
    """UE location in the array plane, azimuth wrapped to (-pi, pi]."""
    model_config = ConfigDict(frozen=True)

    r: float = Field(gt=0)
    theta: float

    @field_validator("theta")
    @classmethod
    def _wrap(cls, value: float) -> float:
        wrapped = math.remainder(value, 2.0 * math.pi)
        return math.pi if wrapped == -math.pi else wrapped


class RegionSpec(BaseModel):
    """Annular sector r in [r_min, r_max], theta in [theta_min, theta_max]."""
    r_min: float = Field(gt=0)
    r_max: float
    theta_min: float = -math.pi
    theta_max: float = math.pi

    @model_validator(mode="after")
    def _non_empty(self):
        if not self.r_max > self.r_min:
            raise ValueError("empty region: r_max must exceed r_min")
        span = self.theta_max - self.theta_min
        if not 0.0 < span <= 2.0 * math.pi + 1e-12:
            raise ValueError("empty region: angular span must lie in (0, 2*pi]")
        return self


class ChannelVector(BaseModel):
    """One channel h(x) of length na * ns, frequency-major."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    entries: np.ndarray
    position: Optional[PolarPosition] = None

    @field_validator("entries")
    @classmethod
    def _complex_vector(cls, value):
        value = np.asarray(value, dtype=complex)
        if value.ndim != 1:
            raise ValueError("channel entries must be a 1D vector")
        return value


class ChannelSet(BaseModel):
    """A batch of channels, one row per UE, with optional (r, theta) truth."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    entries: np.ndarray
    positions: Optional[np.ndarray] = None

    @model_validator(mode="after")
    def _shapes(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.entries.ndim != 2:
            raise ValueError("channel set entries must be an n x M matrix")
        if self.positions is not None:
            self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 2)
            if self.positions.shape[0] != self.entries.shape[0]:
                raise ValueError("positions and channels disagree on n")
        return self

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __len__(self) -> int:
        return self.n


class DistanceMatrix(BaseModel):
    """Symmetric pairwise distances; `absent` marks pairs cut by a threshold."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: DistanceKind
    entries: np.ndarray
    absent: Optional[np.ndarray] = None
    indices: Optional[np.ndarray] = None

    @model_validator(mode="after")
    def _invariants(self):
        d = np.asarray(self.entries, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("distance matrix must be square")
        if self.absent is not None:
            self.absent = np.asarray(self.absent, dtype=bool)
            if self.absent.shape != d.shape:
                raise ValueError("absent mask shape mismatch")
            if np.any(np.diag(self.absent)):
                raise ValueError("diagonal entries cannot be absent")
        if not np.allclose(d, d.T, rtol=0.0, atol=1e-12):
            raise ValueError("distance matrix must be symmetric")
        if np.any(np.diag(d) != 0.0):
            raise ValueError("distance matrix diagonal must be exactly zero")
        if np.any(d < 0.0):
            raise ValueError("distances must be non-negative")
        if self.kind == "pi" and np.any(d > math.sqrt(2.0) + 1e-12):
            raise ValueError("PI distances cannot exceed sqrt(2)")
        if self.indices is not None:
            self.indices = np.asarray(self.indices, dtype=int)
            if self.indices.shape != (d.shape[0],):
                raise ValueError("one node index per matrix row is required")
        self.entries = d
        return self

    @property
    def n(self) -> int:
        return self.entries.shape[0]


class NeighborGraph(BaseModel):
    """Weighted undirected graph stored as a symmetric CSR matrix.

    Explicit zeros in `weights` are edges (duplicate channels); missing
    entries are non-edges.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n: int = Field(ge=0)
    weights: Any
    labels: np.ndarray
    n_components: int

    @field_validator("weights")
    @classmethod
    def _csr(cls, value):
        if not sparse.issparse(value):
            raise ValueError("graph weights must be a scipy sparse matrix")
        return value.tocsr()

    @property
    def edge_count(self) -> int:
        return int(self.weights.nnz // 2)

    def degrees(self) -> np.ndarray:
        return np.diff(self.weights.indptr)

    @property
    def mean_degree(self) -> float:
        return float(self.degrees().mean()) if self.n else 0.0


class KernelProfile(BaseModel):
    """Main-lobe description of one similarity factor.

    threshold lies in (0, 1) except for a single antenna or a single
    subcarrier, where it is 1 and the post-threshold width collapses to 0.
    """
    kernel: Literal["dirichlet", "bessel_j0"]
    axis: Literal["radial", "angular"]
    order: Optional[int] = None
    period: Optional[float] = None
    main_lobe_width: Optional[float] = Field(default=None, gt=0)
    threshold: float = Field(gt=0, le=1)
    post_threshold_width: Optional[float] = None
    units: Literal["m", "rad"]
    split: bool = False


class LobeExtent(BaseModel):
    """Angular extent of a ULA main lobe around a reference azimuth."""
    lower: Optional[float] = None
    upper: Optional[float] = None
    split: bool = False

    @property
    def width(self) -> Optional[float]:
        if self.split:
            return None
        return self.upper - self.lower


class Chart(BaseModel):
    """Low-dimensional embedding of the embedded subset `indices` of the input."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    points: np.ndarray
    indices: np.ndarray
    n_input: int
    source: DistanceKind
    aligned: bool = False
    eigenvalues: Optional[np.ndarray] = None
    graph_stats: Dict[str, Any] = {}

    @model_validator(mode="after")
    def _finite(self):
        self.points = np.asarray(self.points, dtype=float)
        self.indices = np.asarray(self.indices, dtype=int)
        if self.points.ndim != 2 or self.points.shape[0] != self.indices.shape[0]:
            raise ValueError("chart points and indices disagree")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("chart coordinates must be finite")
        return self

    @property
    def excluded(self) -> np.ndarray:
        return np.setdiff1d(np.arange(self.n_input), self.indices)


class AreaSpec(BaseModel):
    """Charting area: annular sector around the base station."""
    r_center: float = Field(gt=0)
    radial_size: float = Field(ge=0)
    angular_center: float = 0.0
    angular_span: float = Field(default=2.0 * math.pi, gt=0, le=2.0 * math.pi + 1e-12)

    @model_validator(mode="after")
    def _inner_edge(self):
        if not self.r_center - self.radial_size / 2.0 > 0.0:
            raise ValueError("area crosses the base station: r_center - radial_size/2 must be > 0")
        return self

    @property
    def r_min(self) -> float:
        return self.r_center - self.radial_size / 2.0

    @property
    def r_max(self) -> float:
        return self.r_center + self.radial_size / 2.0

    @property
    def full_circle(self) -> bool:
        return self.angular_span >= 2.0 * math.pi - 1e-12


class Clause(BaseModel):
    """One checked design rule and the proposition it enforces."""
    name: str
    proposition: str
    ok: bool
    detail: str = ""


class IdentifiabilityReport(BaseModel):
    """Outcome of the identifiability analysis for one configuration."""
    geometry: Literal["ula", "uca", "arbitrary"]
    necessary_ok: bool
    clauses: List[Clause] = []
    sufficient_threshold: float
    distance_threshold: float
    identifiable_area: Optional[AreaSpec] = None
    r_ref: float
    radial_axis: float
    angular_axis: Optional[float] = None
    angular_arc: Optional[float] = None
    roundness_gamma: Optional[float] = Field(default=None, gt=0)
    k_min: int = 1
    min_density: float = Field(gt=0)
    max_subcarrier_spacing: Optional[float] = None
    guideline_spacing: Optional[float] = None
    suggested_config: Optional[SystemConfig] = None

    @property
    def violated_clauses(self) -> List[str]:
        return [c.name for c in self.clauses if not c.ok]


class IdentifiabilityCheck(BaseModel):
    """Result of an empirical identifiability sweep."""
    kind: Literal["weak", "strong"]
    n_checked: int = Field(ge=0)
    violations: int = Field(ge=0)
    threshold: Optional[float] = None

    @property
    def ok(self) -> bool:
        return self.violations == 0


class DesignConstraints(BaseModel):
    """Fixed quantities for the forward design; unset ones are solved for."""
    fc: float = Field(default=3e9, gt=0)
    na: int = Field(default=64, ge=1)
    bandwidth: Optional[float] = Field(default=None, gt=0)
    uca_radius: Optional[float] = Field(default=None, gt=0)
    k_min: int = Field(default=1, ge=1)


class MetricsReport(BaseModel):
    """Trustworthiness, continuity and Kruskal stress of one chart."""
    tw: float = Field(ge=0.0, le=1.0)
    ct: float = Field(ge=0.0, le=1.0)
    ks: float = Field(ge=0.0)
    k_neighbors: int
    n_scored: int


class ScenarioSpec(BaseModel):
    """A reproducible charting scenario."""
    name: str
    description: str = ""
    config: SystemConfig
    area: AreaSpec
    n_ue: int = Field(ge=0)
    seed: int = 0
    no_threshold: bool = False
    double_delta_f: bool = False
    reduced_bandwidth: bool = False
    bandwidth_factor: float = Field(default=2.0, gt=1.0)
    distance: Literal["pi", "euclidean_gt"] = "pi"


class RunManifest(BaseModel):
    """Everything needed to reproduce one run."""
    scenario: Optional[ScenarioSpec] = None
    parameters: Dict[str, Any]
    metrics: Optional[MetricsReport] = None
    outputs: Dict[str, str] = {}
    tool_version: str
    seed: int


class PlotSpec(BaseModel):
    """Static figure request."""
    kind: Literal["scatter_chart", "similarity_heatmap", "kernel_profile", "threshold_map"]
    color_by: Literal["azimuth", "range"] = "azimuth"
    output_path: str
    title: Optional[str] = None


class DatasetHeader(BaseModel):
    """Text header of a dataset file."""
    version: str
    n: int = Field(ge=0)
    na: int = Field(ge=1)
    ns: int = Field(ge=1)
    has_truth: bool
    config: SystemConfig

    @model_validator(mode="after")
    def _dims(self):
        if self.config.na != self.na or self.config.ns != self.ns:
            raise ValueError("header dimensions disagree with the config echo")
        return self

    @property
    def record_values(self) -> int:
        return 2 * self.na * self.ns + (2 if self.has_truth else 0)
