"""
Tests for config files, channel datasets, chart CSVs and run manifests.
"""

from pathlib import Path

import numpy as np
import pytest

from loschart.errors import ConfigurationError, DatasetFormatError
from loschart.models.schemas import (
    ArbitraryGeometry,
    AreaSpec,
    Chart,
    ChannelSet,
    MetricsReport,
    RegionSpec,
    RunManifest,
    ScenarioSpec,
    SystemConfig,
    UCAGeometry,
    ULAGeometry,
)
from loschart.services.channel_model import sample_positions, synth_channels
from loschart.storage.config_file import read_config_file, write_config_file
from loschart.storage.dataset import decode_dataset, encode_dataset, read_dataset, write_dataset
from loschart.storage.results import manifest_to_json, read_chart, read_manifest, write_chart, write_manifest

SAMPLE_CONFIG = Path(__file__).parent / "sample_data" / "base_scenario.cfg"
UCA = SystemConfig(fc=3e9, ns=16, delta_f=625e3, array=UCAGeometry(na=64, radius=0.42))
SMALL = SystemConfig(fc=3e9, ns=4, delta_f=1e6, array=ULAGeometry(na=3, delta_r=0.5))


def _channels(n: int = 12, cfg: SystemConfig = SMALL) -> ChannelSet:
    region = RegionSpec(r_min=100.0, r_max=300.0, theta_min=-1.0, theta_max=1.0)
    return synth_channels(cfg, sample_positions(region, n, seed=21))


# ============================================
# CONFIG FILES
# ============================================

def test_sample_config_is_the_base_system():
    """The shipped sample file describes the 64-antenna, 16-subcarrier UCA."""
    assert read_config_file(SAMPLE_CONFIG) == UCA


def test_config_round_trip(tmp_path):
    """Every geometry reads back exactly."""
    arbitrary = SystemConfig(fc=2.4e9, ns=3, delta_f=333_333.3,
                             array=ArbitraryGeometry(positions=((0.1, 0.05), (-0.1, -0.05))))
    for i, cfg in enumerate((UCA, SMALL, arbitrary)):
        path = write_config_file(cfg, tmp_path / f"system{i}.cfg")
        assert read_config_file(path) == cfg


def test_config_errors(tmp_path):
    """Missing files, versions, keys and bad values are configuration errors."""
    with pytest.raises(ConfigurationError):
        read_config_file(tmp_path / "missing.cfg")

    cases = {
        "version.cfg": "LOSCHART_CONFIG_VERSION=2\nFC=3e9\nNS=16\nDELTA_F=625e3\nARRAY=uca\nNA=64\nUCA_RADIUS=0.42\n",
        "missing.cfg": "LOSCHART_CONFIG_VERSION=1\nFC=3e9\nDELTA_F=625e3\nARRAY=uca\nNA=64\nUCA_RADIUS=0.42\n",
        "kind.cfg": "LOSCHART_CONFIG_VERSION=1\nFC=3e9\nNS=16\nDELTA_F=625e3\nARRAY=planar\nNA=64\n",
        "value.cfg": "LOSCHART_CONFIG_VERSION=1\nFC=3e9\nNS=sixteen\nDELTA_F=625e3\nARRAY=uca\nNA=64\nUCA_RADIUS=0.42\n",
        "range.cfg": "LOSCHART_CONFIG_VERSION=1\nFC=3e9\nNS=16\nDELTA_F=-1\nARRAY=uca\nNA=64\nUCA_RADIUS=0.42\n",
        "count.cfg": "LOSCHART_CONFIG_VERSION=1\nFC=3e9\nNS=2\nDELTA_F=1e6\nARRAY=arbitrary\nNA=3\n"
                     "POSITIONS=0.1,0.0;-0.1,0.0\n",
    }
    for name, text in cases.items():
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        with pytest.raises(ConfigurationError):
            read_config_file(path)


# ============================================
# DATASETS
# ============================================

def test_dataset_round_trip_is_exact(tmp_path):
    """Decoding returns the same floats; re-encoding returns the same bytes."""
    channels = _channels()
    data = encode_dataset(channels, SMALL)
    header, decoded = decode_dataset(data)
    assert header.n == 12 and header.na == 3 and header.ns == 4 and header.has_truth
    assert header.config == SMALL
    assert np.array_equal(decoded.entries, channels.entries)
    assert np.array_equal(decoded.positions, channels.positions)

    path = write_dataset(decoded, header.config, tmp_path / "copy.lcd")
    assert path.read_bytes() == data
    _, again = read_dataset(path)
    assert np.array_equal(again.entries, channels.entries)


def test_dataset_without_truth(tmp_path):
    """Truth can be left out; the header says so and the records shrink."""
    channels = _channels()
    with_truth = encode_dataset(channels, SMALL)
    without = encode_dataset(channels, SMALL, include_truth=False)
    assert len(with_truth) - len(without) == 12 * 2 * 8
    header, decoded = decode_dataset(without)
    assert not header.has_truth
    assert decoded.positions is None
    assert np.array_equal(decoded.entries, channels.entries)


def test_empty_dataset():
    """N = 0 is a valid file with an empty body."""
    empty = synth_channels(SMALL, np.zeros((0, 2)))
    header, decoded = decode_dataset(encode_dataset(empty, SMALL))
    assert header.n == 0
    assert decoded.entries.shape == (0, 12)


def test_dataset_format_errors(tmp_path):
    """Bad magic, unknown versions, truncated bodies and wrong lengths are rejected."""
    data = encode_dataset(_channels(), SMALL)
    with pytest.raises(DatasetFormatError):
        decode_dataset(b"NOT-A-DATASET" + data)
    with pytest.raises(DatasetFormatError):
        decode_dataset(data.replace(b"LOSCHART-DATASET 1", b"LOSCHART-DATASET 9", 1))
    with pytest.raises(DatasetFormatError):
        decode_dataset(data[:-8])
    with pytest.raises(DatasetFormatError):
        decode_dataset(data.replace(b"N=12", b"N=13", 1))
    with pytest.raises(DatasetFormatError):
        encode_dataset(_channels(), UCA)
    with pytest.raises(DatasetFormatError):
        read_dataset(tmp_path / "missing.lcd")


# ============================================
# CHARTS AND MANIFESTS
# ============================================

def test_chart_csv_round_trip(tmp_path):
    """Coordinates survive the CSV at full precision; gaps in the indices are kept."""
    points = np.random.default_rng(2).normal(size=(5, 2)) * 1e3
    chart = Chart(points=points, indices=np.array([0, 1, 3, 4, 6]), n_input=7, source="geodesic")
    path = write_chart(chart, tmp_path / "chart.csv")
    assert path.read_text().splitlines()[0] == "index,x,y"

    back = read_chart(path, n_input=7)
    assert np.array_equal(back.points, points)
    assert back.indices.tolist() == [0, 1, 3, 4, 6]
    assert back.excluded.tolist() == [2, 5]


def test_chart_csv_errors(tmp_path):
    """Only index,x,y files with numeric rows are charts."""
    bad_header = tmp_path / "header.csv"
    bad_header.write_text("i,x,y\n0,1,2\n")
    with pytest.raises(DatasetFormatError):
        read_chart(bad_header)

    bad_row = tmp_path / "row.csv"
    bad_row.write_text("index,x,y\n0,one,2\n")
    with pytest.raises(DatasetFormatError):
        read_chart(bad_row)

    chart3d = Chart(points=np.zeros((2, 3)), indices=np.arange(2), n_input=2, source="geodesic")
    with pytest.raises(ValueError):
        write_chart(chart3d, tmp_path / "chart3d.csv")


def test_manifest_is_canonical(tmp_path):
    """Sorted keys and fixed layout: equal manifests give equal bytes."""
    scenario = ScenarioSpec(name="base", config=UCA, area=AreaSpec(r_center=315.56, radial_size=449.68),
                            n_ue=2838, seed=3)
    manifest = RunManifest(
        scenario=scenario,
        parameters={"threshold": 0.40276, "graph": {"edge_count": 10}},
        metrics=MetricsReport(tw=0.99, ct=0.98, ks=0.1, k_neighbors=142, n_scored=2838),
        outputs={"chart": "chart.csv"},
        tool_version="1.0.0",
        seed=3,
    )
    text = manifest_to_json(manifest)
    assert text.endswith("\n")
    assert text.index('"metrics"') < text.index('"outputs"') < text.index('"parameters"')

    path = write_manifest(manifest, tmp_path / "run" / "manifest.json")
    back = read_manifest(path)
    assert back == manifest
    assert manifest_to_json(back) == text
