"""System-configuration files: flat dotenv-style KEY=value text."""

import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

from dotenv import dotenv_values
from pydantic import ValidationError

from ..config import config
from ..errors import ConfigurationError
from ..models.schemas import ArbitraryGeometry, SystemConfig, UCAGeometry, ULAGeometry

logger = logging.getLogger(__name__)

VERSION_KEY = "LOSCHART_CONFIG_VERSION"

PathLike = Union[str, Path]


def config_to_pairs(cfg: SystemConfig) -> List[Tuple[str, str]]:
    """Ordered KEY/value pairs; floats use repr so they read back exactly."""
    geometry = cfg.array
    pairs = [
        ("FC", repr(float(cfg.fc))),
        ("NS", str(cfg.ns)),
        ("DELTA_F", repr(float(cfg.delta_f))),
        ("ARRAY", geometry.kind),
        ("NA", str(geometry.na)),
    ]
    if isinstance(geometry, ULAGeometry):
        pairs.append(("DELTA_R", repr(float(geometry.delta_r))))
    elif isinstance(geometry, UCAGeometry):
        pairs.append(("UCA_RADIUS", repr(float(geometry.radius))))
    else:
        points = ";".join(f"{repr(float(x))},{repr(float(y))}" for x, y in geometry.positions)
        pairs.append(("POSITIONS", points))
    return pairs


def config_from_mapping(values: Mapping[str, Optional[str]]) -> SystemConfig:
    """Build a SystemConfig from parsed KEY/value pairs."""
    def required(key: str) -> str:
        value = values.get(key)
        if value is None or value == "":
            raise ConfigurationError(f"missing required key {key}")
        return value

    try:
        kind = required("ARRAY").strip().lower()
        if kind == "ula":
            geometry = ULAGeometry(na=int(required("NA")), delta_r=float(values.get("DELTA_R") or 0.5))
        elif kind == "uca":
            geometry = UCAGeometry(na=int(required("NA")), radius=float(required("UCA_RADIUS")))
        elif kind == "arbitrary":
            points = [tuple(float(v) for v in item.split(",")) for item in required("POSITIONS").split(";") if item]
            geometry = ArbitraryGeometry(positions=tuple(points))
            if values.get("NA") and int(values["NA"]) != geometry.na:
                raise ConfigurationError(f"NA={values['NA']} but {geometry.na} positions were given")
        else:
            raise ConfigurationError(f"unknown ARRAY kind: {kind}")
        return SystemConfig(
            fc=float(required("FC")),
            ns=int(required("NS")),
            delta_f=float(required("DELTA_F")),
            array=geometry,
        )
    except ValidationError as exc:
        raise ConfigurationError(f"invalid system configuration: {exc.errors()[0]['msg']}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"invalid system configuration value: {exc}") from exc


def write_config_file(cfg: SystemConfig, path: PathLike) -> Path:
    """Write a versioned config file; returns the path written."""
    path = Path(path)
    lines = [f"{VERSION_KEY}={config.CONFIG_FILE_VERSION}"]
    lines += [f"{key}={value}" for key, value in config_to_pairs(cfg)]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info("[Config] wrote %s", path)
    return path


def read_config_file(path: PathLike) -> SystemConfig:
    """Parse a config file written by write_config_file (or by hand)."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file not found: {path}")
    values: Dict[str, Optional[str]] = dotenv_values(path)
    version = values.get(VERSION_KEY)
    if version != config.CONFIG_FILE_VERSION:
        raise ConfigurationError(
            f"{path}: unsupported config version {version!r}, expected {config.CONFIG_FILE_VERSION}"
        )
    return config_from_mapping(values)
