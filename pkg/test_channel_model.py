"""
Tests for LoS channel synthesis, the array geometries and UE sampling.
"""

import math

import numpy as np
import pytest

from loschart.models.schemas import (
    AreaSpec,
    ArbitraryGeometry,
    PolarPosition,
    RegionSpec,
    SystemConfig,
    UCAGeometry,
    ULAGeometry,
)
from loschart.services.channel_model import (
    array_positions,
    frequency_matrix,
    frequency_signature,
    region_from_area,
    sample_positions,
    sample_ues,
    steering_matrix,
    steering_vector,
    subcarrier_frequencies,
    synth_channel,
    synth_channels,
)
from loschart.services.kernels import angular_term_ula, radial_term

UCA = SystemConfig(fc=3e9, ns=16, delta_f=625e3, array=UCAGeometry(na=64, radius=0.42))
ULA = SystemConfig(fc=3e9, ns=16, delta_f=625e3, array=ULAGeometry(na=16, delta_r=0.5))


def test_subcarrier_grid():
    """Ns frequencies centred on the carrier, delta_f apart."""
    f = subcarrier_frequencies(UCA)
    assert f.shape == (16,)
    assert f.mean() == pytest.approx(3e9, rel=1e-12)
    assert np.allclose(np.diff(f), 625e3)
    assert UCA.bandwidth == pytest.approx(10e6)


def test_array_positions():
    """UCA antennas sit on the circle, ULA antennas on the y axis at dr * lambda."""
    uca = array_positions(UCA)
    assert uca.shape == (64, 2)
    assert np.allclose(np.hypot(uca[:, 0], uca[:, 1]), 0.42)
    assert np.allclose(uca.mean(axis=0), 0.0, atol=1e-12)

    ula = array_positions(ULA)
    assert np.allclose(ula[:, 0], 0.0)
    assert np.allclose(np.diff(ula[:, 1]), 0.5 * ULA.wavelength)

    arbitrary = SystemConfig(fc=3e9, ns=1, delta_f=1e6,
                             array=ArbitraryGeometry(positions=((0.1, 0.0), (-0.1, 0.0))))
    assert np.allclose(array_positions(arbitrary), [[0.1, 0.0], [-0.1, 0.0]])


def test_barycenter_required_for_arbitrary_arrays():
    """Arbitrary layouts must be given relative to their barycenter."""
    with pytest.raises(ValueError):
        ArbitraryGeometry(positions=((1.0, 0.0), (2.0, 0.0)))


def test_signatures_are_unit_norm():
    """a(theta) and f(r) have unit norm."""
    assert np.linalg.norm(steering_vector(UCA, 0.3)) == pytest.approx(1.0)
    assert np.linalg.norm(frequency_signature(UCA, 250.0)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        frequency_signature(UCA, -1.0)


def test_channel_norm_and_layout():
    """||h|| = sqrt(Na Ns) / r and the vector is frequency-major f (x) a."""
    pos = PolarPosition(r=200.0, theta=0.7)
    h = synth_channel(UCA, pos)
    assert h.entries.shape == (64 * 16,)
    assert np.linalg.norm(h.entries) == pytest.approx(math.sqrt(64 * 16) / 200.0)

    f = frequency_signature(UCA, 200.0)
    a = steering_vector(UCA, 0.7)
    scale = math.sqrt(64 * 16) / 200.0 * np.exp(-2j * math.pi * 200.0 / UCA.wavelength)
    assert np.allclose(h.entries, scale * np.kron(f, a))


def test_batch_matches_single():
    """Row i of synth_channels equals synth_channel at position i."""
    positions = np.array([[120.0, -0.4], [300.0, 2.9], [451.5, 0.0]])
    batch = synth_channels(ULA, positions)
    for i, (r, theta) in enumerate(positions):
        single = synth_channel(ULA, PolarPosition(r=r, theta=theta))
        assert np.allclose(batch.entries[i], single.entries, rtol=0.0, atol=1e-14)
    assert np.array_equal(batch.positions, positions)


def test_empty_and_invalid_positions():
    """No positions gives an empty set; non-positive ranges are rejected."""
    empty = synth_channels(UCA, np.zeros((0, 2)))
    assert empty.entries.shape == (0, 64 * 16)
    with pytest.raises(ValueError):
        synth_channels(UCA, np.array([[0.0, 0.1]]))
    with pytest.raises(ValueError):
        PolarPosition(r=-3.0, theta=0.0)


def test_radial_closed_form():
    """|f(r1)^H f(r2)| = |D_Ns(2 pi B (r1 - r2) / c)| on a dense grid."""
    r2 = np.linspace(1.0, 1200.0, 10_000)
    f1 = frequency_signature(UCA, 300.0)
    f2 = frequency_matrix(UCA, r2)
    direct = np.abs(f2 @ f1.conj())
    assert np.max(np.abs(direct - radial_term(UCA, 300.0, r2))) < 1e-10

    c = 299_792_458.0
    assert radial_term(UCA, 300.0, 300.0 + c / UCA.delta_f) == pytest.approx(1.0, abs=1e-9)
    assert radial_term(UCA, 300.0, 300.0 + c / UCA.bandwidth) == pytest.approx(0.0, abs=1e-12)


def test_ula_closed_form_and_mirror_symmetry():
    """|a(th1)^H a(th2)| matches the ULA Dirichlet form and is blind to theta -> pi - theta."""
    theta = np.linspace(-math.pi, math.pi, 10_000)
    a_ref = steering_vector(ULA, 0.3)
    a = steering_matrix(ULA, theta)
    direct = np.abs(a @ a_ref.conj())
    assert np.max(np.abs(direct - angular_term_ula(ULA, 0.3, theta))) < 1e-10

    mirrored = np.abs(steering_matrix(ULA, math.pi - theta) @ a_ref.conj())
    assert np.max(np.abs(direct - mirrored)) < 1e-12


def test_sampling_is_deterministic_and_inside_region():
    """Same seed, same UEs; every UE falls inside the annular sector."""
    region = RegionSpec(r_min=100.0, r_max=200.0, theta_min=-0.5, theta_max=0.5)
    a = sample_positions(region, 500, seed=7)
    b = sample_positions(region, 500, seed=7)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_positions(region, 500, seed=8))
    assert np.all((a[:, 0] >= 100.0) & (a[:, 0] <= 200.0))
    assert np.all((a[:, 1] >= -0.5) & (a[:, 1] <= 0.5))
    assert sample_positions(region, 0, seed=1).shape == (0, 2)

    ues = sample_ues(region, 3, seed=7)
    assert [u.r for u in ues] == pytest.approx(a[:3, 0].tolist())


def test_sampling_is_uniform_in_area():
    """Uniform in area means mean r^2 = (r_min^2 + r_max^2) / 2 and a flat azimuth."""
    region = RegionSpec(r_min=100.0, r_max=200.0, theta_min=-0.5, theta_max=0.5)
    polar = sample_positions(region, 100_000, seed=3)
    expected = (100.0 ** 2 + 200.0 ** 2) / 2.0
    assert np.mean(polar[:, 0] ** 2) == pytest.approx(expected, rel=0.01)
    assert np.mean(polar[:, 1]) == pytest.approx(0.0, abs=0.01)


def test_region_from_area():
    """A full-circle area samples all azimuths; a sector keeps its span."""
    full = region_from_area(AreaSpec(r_center=300.0, radial_size=100.0))
    assert (full.r_min, full.r_max) == (250.0, 350.0)
    assert (full.theta_min, full.theta_max) == (-math.pi, math.pi)

    sector = region_from_area(AreaSpec(r_center=300.0, radial_size=100.0, angular_center=0.2, angular_span=1.0))
    assert sector.theta_min == pytest.approx(-0.3)
    assert sector.theta_max == pytest.approx(0.7)

    with pytest.raises(ValueError):
        AreaSpec(r_center=40.0, radial_size=100.0)
