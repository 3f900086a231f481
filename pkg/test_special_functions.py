"""
Tests for the Dirichlet kernel, the Bessel functions and the derived threshold constants.
scipy.special is the independent oracle.
"""

import math

import numpy as np
import pytest
from scipy import special

from loschart.services.kernels import similarity_to_distance
from loschart.services.special_functions import (
    ANGULAR_CONSTANT,
    BESSEL_SIDE_LOBE,
    J0_DERIVATIVE_FIRST_ROOT,
    J0_FIRST_ROOT,
    RADIAL_CONSTANT,
    bessel_inverse,
    bessel_j0,
    bessel_j1,
    dirichlet_inverse,
    dirichlet_kernel,
    dirichlet_side_lobe_threshold,
    sinc_inverse,
)


def test_bessel_matches_scipy():
    """J0 and J1 agree with scipy on both sides of the x = 5 switch."""
    x = np.linspace(0.0, 60.0, 6001)
    assert np.max(np.abs(bessel_j0(x) - special.j0(x))) < 1e-8
    assert np.max(np.abs(bessel_j1(x) - special.j1(x))) < 1e-8
    assert bessel_j1(-2.0) == pytest.approx(-special.j1(2.0), abs=1e-12)
    assert isinstance(bessel_j0(1.0), float)
    print("✓ Bessel functions match scipy")


def test_bessel_roots_and_side_lobe():
    """First zero of J0, first zero of J1 and |J0| at that point."""
    assert abs(bessel_j0(2.4048)) <= 1e-4
    assert abs(abs(bessel_j0(3.8317)) - 0.403) <= 1e-3
    assert J0_FIRST_ROOT == pytest.approx(special.jn_zeros(0, 1)[0], abs=1e-10)
    assert J0_DERIVATIVE_FIRST_ROOT == pytest.approx(special.jn_zeros(1, 1)[0], abs=1e-10)
    assert BESSEL_SIDE_LOBE == pytest.approx(0.40276, abs=1e-4)


def test_threshold_constants():
    """The radial and angular post-threshold constants and the 1.093 distance threshold."""
    assert abs(RADIAL_CONSTANT - 4.238) < 1e-3
    assert abs(ANGULAR_CONSTANT - 1.692) < 1e-3
    assert abs(similarity_to_distance(BESSEL_SIDE_LOBE) - 1.093) < 5e-4
    x = RADIAL_CONSTANT / 2.0
    assert math.sin(x) / x == pytest.approx(BESSEL_SIDE_LOBE, abs=1e-9)
    assert special.j0(ANGULAR_CONSTANT) == pytest.approx(BESSEL_SIDE_LOBE, abs=1e-9)


def test_dirichlet_kernel_values():
    """Peak, first null, side lobe and the limits at multiples of 2 pi N."""
    n = 16
    assert dirichlet_kernel(n, 0.0) == 1.0
    assert abs(dirichlet_kernel(n, 2.0 * math.pi)) < 1e-12
    assert dirichlet_kernel(n, 2.0 * math.pi * n) == pytest.approx((-1.0) ** (n - 1))
    assert dirichlet_kernel(5, 2.0 * math.pi * 5) == pytest.approx(1.0)
    assert dirichlet_side_lobe_threshold(n) == pytest.approx(1.0 / (n * math.sin(3.0 * math.pi / (2 * n))))
    assert dirichlet_side_lobe_threshold(n) == pytest.approx(0.21531, abs=1e-4)

    x = np.linspace(-40.0, 40.0, 801)
    values = dirichlet_kernel(n, x)
    assert values.shape == x.shape
    assert np.all(np.abs(values) <= 1.0)


def test_dirichlet_kernel_matches_sum():
    """(1/N) sum of a symmetric exponential grid equals D_N."""
    n = 7
    x = np.linspace(0.1, 30.0, 300)
    k = np.arange(n) - (n - 1) / 2.0
    direct = np.real(np.exp(1j * np.outer(x, k) / n).sum(axis=1)) / n
    assert np.max(np.abs(direct - dirichlet_kernel(n, x))) < 1e-12


def test_inverses():
    """Main-lobe inverses land back on the requested level."""
    for level in (0.2, 0.40276, 0.9):
        x = dirichlet_inverse(16, level)
        assert 0.0 < x < 2.0 * math.pi
        assert abs(dirichlet_kernel(16, x)) == pytest.approx(level, abs=1e-8)
        y = bessel_inverse(level)
        assert special.j0(y) == pytest.approx(level, abs=1e-8)
        z = sinc_inverse(level)
        assert np.sinc(z / (2.0 * math.pi)) == pytest.approx(level, abs=1e-8)


def test_inverse_rejects_bad_levels():
    """Levels outside (0, 1) have no main-lobe inverse."""
    with pytest.raises(ValueError):
        dirichlet_inverse(16, 1.0)
    with pytest.raises(ValueError):
        bessel_inverse(0.0)
    with pytest.raises(ValueError):
        sinc_inverse(-0.1)
    with pytest.raises(ValueError):
        dirichlet_kernel(0, 1.0)
