"""
Channel dataset files.

A text header followed by a little-endian float64 body:

    LOSCHART-DATASET 1
    N=<records>
    NA=<antennas>
    NS=<subcarriers>
    HAS_TRUTH=<0|1>
    FC=... (config echo, same keys as a config file)
    END

Each record holds (r, theta) when HAS_TRUTH=1, then the Na*Ns channel
entries (frequency-major) as interleaved real/imaginary parts.
"""

import logging
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from pydantic import ValidationError

from ..config import config
from ..errors import DatasetFormatError
from ..models.schemas import ChannelSet, DatasetHeader, SystemConfig
from .config_file import config_from_mapping, config_to_pairs

logger = logging.getLogger(__name__)

MAGIC = "LOSCHART-DATASET"
END = b"END\n"
_DTYPE = np.dtype("<f8")

PathLike = Union[str, Path]


def _header_text(header: DatasetHeader) -> str:
    lines = [
        f"{MAGIC} {header.version}",
        f"N={header.n}",
        f"NA={header.na}",
        f"NS={header.ns}",
        f"HAS_TRUTH={int(header.has_truth)}",
    ]
    lines += [f"{key}={value}" for key, value in config_to_pairs(header.config)]
    lines.append("END")
    return "\n".join(lines) + "\n"


def encode_dataset(channels: ChannelSet, cfg: SystemConfig, include_truth: bool = True) -> bytes:
    """Serialize a channel set; truth is written only when present and requested."""
    if channels.n and channels.entries.shape[1] != cfg.na * cfg.ns:
        raise DatasetFormatError(
            f"channel length {channels.entries.shape[1]} does not match Na*Ns = {cfg.na * cfg.ns}"
        )
    has_truth = include_truth and channels.positions is not None
    header = DatasetHeader(
        version=config.DATASET_FORMAT_VERSION, n=channels.n, na=cfg.na, ns=cfg.ns,
        has_truth=has_truth, config=cfg,
    )
    entries = np.ascontiguousarray(channels.entries, dtype=np.complex128)
    body = entries.view(np.float64)
    if has_truth:
        body = np.hstack([channels.positions.reshape(channels.n, 2), body])
    return _header_text(header).encode("ascii") + body.astype(_DTYPE).tobytes()


def decode_dataset(data: bytes) -> Tuple[DatasetHeader, ChannelSet]:
    """Parse bytes produced by encode_dataset."""
    end = data.find(b"\n" + END)
    if not data.startswith(MAGIC.encode("ascii")) or end < 0:
        raise DatasetFormatError("not a loschart dataset (bad magic or missing END line)")
    header_lines = data[: end + 1].decode("ascii").splitlines()
    body = data[end + 1 + len(END):]

    version = header_lines[0][len(MAGIC):].strip()
    if version != config.DATASET_FORMAT_VERSION:
        raise DatasetFormatError(f"unsupported dataset version {version!r}")
    values = {}
    for line in header_lines[1:]:
        key, sep, value = line.partition("=")
        if not sep:
            raise DatasetFormatError(f"malformed header line: {line!r}")
        values[key.strip()] = value.strip()

    try:
        header = DatasetHeader(
            version=version,
            n=int(values["N"]),
            na=int(values["NA"]),
            ns=int(values["NS"]),
            has_truth=values["HAS_TRUTH"] == "1",
            config=config_from_mapping(values),
        )
    except KeyError as exc:
        raise DatasetFormatError(f"dataset header lacks {exc.args[0]}") from exc
    except (ValidationError, ValueError) as exc:
        raise DatasetFormatError(f"invalid dataset header: {exc}") from exc

    expected = header.n * header.record_values * _DTYPE.itemsize
    if len(body) != expected:
        raise DatasetFormatError(
            f"body holds {len(body)} bytes, expected {expected} for {header.n} records "
            f"of {header.record_values} values"
        )

    values_matrix = np.frombuffer(body, dtype=_DTYPE).astype(np.float64).reshape(header.n, header.record_values)
    positions = None
    if header.has_truth:
        positions, values_matrix = values_matrix[:, :2].copy(), values_matrix[:, 2:]
    entries = np.ascontiguousarray(values_matrix).view(np.complex128).reshape(header.n, header.na * header.ns)
    return header, ChannelSet(entries=entries.copy(), positions=positions)


def write_dataset(channels: ChannelSet, cfg: SystemConfig, path: PathLike, include_truth: bool = True) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_dataset(channels, cfg, include_truth))
    logger.info("[Dataset] wrote %d records to %s", channels.n, path)
    return path


def read_dataset(path: PathLike) -> Tuple[DatasetHeader, ChannelSet]:
    path = Path(path)
    if not path.is_file():
        raise DatasetFormatError(f"dataset file not found: {path}")
    header, channels = decode_dataset(path.read_bytes())
    logger.info("[Dataset] read %d records from %s", header.n, path)
    return header, channels
