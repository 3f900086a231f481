"""
Dirichlet kernel, Bessel functions of order 0 and 1, and the threshold
constants derived from them.

J0 and J1 use the Cephes rational approximations: [0, 5] is covered by a
rational function in x^2 (with the first zeros factored out), (5, inf) by the
Hankel asymptotic form with two rational corrections. Absolute error is below
1e-15 on [0, 30].
"""

import math

import numpy as np
from scipy.optimize import bisect

from ..config import config

# Cephes j0.c coefficients
_J0_RP = [-4.79443220978201773821E9, 1.95617491946556577543E12,
          -2.49248344360967716204E14, 9.70862251047306323952E15]
_J0_RQ = [1.0, 4.99563147152651017219E2, 1.73785401676374683123E5,
          4.84409658339962045305E7, 1.11855537045356834862E10,
          2.11277520115489217587E12, 3.10518229857422583814E14,
          3.18121955943204943306E16, 1.71086294081043136091E18]
_J0_PP = [7.96936729297347051624E-4, 8.28352392107440799803E-2,
          1.23953371646414299388E0, 5.44725003058768775090E0,
          8.74716500199817011941E0, 5.30324038235394892183E0,
          9.99999999999999997821E-1]
_J0_PQ = [9.24408810558863637013E-4, 8.56288474354474431428E-2,
          1.25352743901058953537E0, 5.47097740330417105182E0,
          8.76190883237069594232E0, 5.30605288235394617618E0,
          1.00000000000000000218E0]
_J0_QP = [-1.13663838898469149931E-2, -1.28252718670509318512E0,
          -1.95539544257735972385E1, -9.32060152123768231369E1,
          -1.77681167980488050595E2, -1.47077505154951170175E2,
          -5.14105326766599330220E1, -6.05014350600728481186E0]
_J0_QQ = [1.0, 6.43178256118178023184E1, 8.56430025976980587198E2,
          3.88240183605401609683E3, 7.24046774195652478189E3,
          5.93072701187316984827E3, 2.06209331660327847417E3,
          2.42005740240291393179E2]
_J0_DR1 = 5.78318596294678452118E0
_J0_DR2 = 3.04712623436620863991E1

# Cephes j1.c coefficients
_J1_RP = [-8.99971225705559398224E8, 4.52228297998194034323E11,
          -7.27494245221818276015E13, 3.68295732863852883286E15]
_J1_RQ = [1.0, 6.20836478118054335476E2, 2.56987256757748830383E5,
          8.35146791431949253037E7, 2.21511595479792499675E10,
          4.74914122079991414898E12, 7.84369607876235854894E14,
          8.95222336184627338078E16, 5.32278620332680085395E18]
_J1_PP = [7.62125616208173112003E-4, 7.31397056940917570436E-2,
          1.12719608129684925192E0, 5.11207951146807644818E0,
          8.42404590141772420927E0, 5.21451598682361504063E0,
          1.00000000000000000254E0]
_J1_PQ = [5.71323128072548699714E-4, 6.88455908754495404082E-2,
          1.10514232634061696926E0, 5.07386386128601488557E0,
          8.39985554327604159757E0, 5.20982848682361821619E0,
          9.99999999999999997461E-1]
_J1_QP = [5.10862594750176621635E-2, 4.98213872951233449420E0,
          7.58238284132545283818E1, 3.66779609360150777800E2,
          7.10856304998926107277E2, 5.97489612400613639965E2,
          2.11688757100572135698E2, 2.52070205858023719784E1]
_J1_QQ = [1.0, 7.42373277035675149943E1, 1.05644886038262816351E3,
          4.98641058337653607651E3, 9.56231892404756170795E3,
          7.99704160447350683650E3, 2.82619278517639096600E3,
          3.36093607810698293419E2]
_J1_Z1 = 1.46819706421238932572E1
_J1_Z2 = 4.92184563216946036703E1

_SQ2OPI = 7.9788456080286535587989E-1  # sqrt(2/pi)
_PIO4 = 7.85398163397448309616E-1
_THPIO4 = 2.35619449019234492885


def _scalar_or_array(result, x):
    return float(result) if np.ndim(x) == 0 else result


def dirichlet_kernel(n: int, x):
    """D_N(x) = (1/N) sin(x/2) / sin(x/(2N)), extended by continuity."""
    if n < 1:
        raise ValueError("Dirichlet kernel order must be >= 1")
    x_arr = np.asarray(x, dtype=float)
    den = n * np.sin(x_arr / (2.0 * n))
    singular = np.abs(np.sin(x_arr / (2.0 * n))) < config.DIRICHLET_SINGULARITY_TOL
    safe_den = np.where(singular, 1.0, den)
    value = np.sin(x_arr / 2.0) / safe_den
    # Limit at x = 2 pi N m is (-1)^(m (N - 1))
    m = np.rint(x_arr / (2.0 * math.pi * n)).astype(np.int64)
    limit = np.where((m * (n - 1)) % 2 == 0, 1.0, -1.0)
    result = np.clip(np.where(singular, limit, value), -1.0, 1.0)
    return _scalar_or_array(result, x)


def bessel_j0(x):
    """Bessel function of the first kind, order 0."""
    x_arr = np.abs(np.asarray(x, dtype=float))
    small = x_arr <= 5.0

    with np.errstate(over="ignore", invalid="ignore"):
        z = x_arr * x_arr
        near = (z - _J0_DR1) * (z - _J0_DR2) * np.polyval(_J0_RP, z) / np.polyval(_J0_RQ, z)
    near = np.where(x_arr < 1e-5, 1.0 - z / 4.0, near)

    xs = np.where(small, 5.0, x_arr)
    w = 5.0 / xs
    q = 25.0 / (xs * xs)
    p = np.polyval(_J0_PP, q) / np.polyval(_J0_PQ, q)
    q = np.polyval(_J0_QP, q) / np.polyval(_J0_QQ, q)
    xn = xs - _PIO4
    far = (p * np.cos(xn) - w * q * np.sin(xn)) * _SQ2OPI / np.sqrt(xs)

    return _scalar_or_array(np.where(small, near, far), x)


def bessel_j1(x):
    """Bessel function of the first kind, order 1 (odd)."""
    x_signed = np.asarray(x, dtype=float)
    x_arr = np.abs(x_signed)
    small = x_arr <= 5.0

    with np.errstate(over="ignore", invalid="ignore"):
        z = x_arr * x_arr
        near = np.polyval(_J1_RP, z) / np.polyval(_J1_RQ, z) * x_arr * (z - _J1_Z1) * (z - _J1_Z2)

    xs = np.where(small, 5.0, x_arr)
    w = 5.0 / xs
    zz = w * w
    p = np.polyval(_J1_PP, zz) / np.polyval(_J1_PQ, zz)
    q = np.polyval(_J1_QP, zz) / np.polyval(_J1_QQ, zz)
    xn = xs - _THPIO4
    far = (p * np.cos(xn) - w * q * np.sin(xn)) * _SQ2OPI / np.sqrt(xs)

    result = np.sign(x_signed) * np.where(small, near, far)
    return _scalar_or_array(result, x)


def bisect_root(fn, lo: float, hi: float, tol: float = None) -> float:
    """Root of fn on a sign-changing bracket [lo, hi]."""
    tol = config.BISECTION_TOL if tol is None else tol
    return float(bisect(fn, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500))


def j0_first_root() -> float:
    """j_{0,1} ~ 2.4048."""
    return bisect_root(bessel_j0, 2.0, 3.0, tol=1e-14)


def j0_derivative_first_root() -> float:
    """j'_{0,1} ~ 3.8317, first root of J0' = -J1."""
    return bisect_root(bessel_j1, 3.0, 4.5, tol=1e-14)


def bessel_side_lobe_threshold() -> float:
    """|J0(j'_{0,1})| ~ 0.403, the second extremum of |J0|."""
    return abs(bessel_j0(j0_derivative_first_root()))


def dirichlet_side_lobe_threshold(n: int) -> float:
    """|D_N(3 pi)| = 1 / (N sin(3 pi / 2N))."""
    return abs(dirichlet_kernel(n, 3.0 * math.pi))


def dirichlet_inverse(n: int, level: float) -> float:
    """x in (0, 2 pi) with |D_N(x)| = level on the main lobe."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    return bisect_root(lambda x: abs(dirichlet_kernel(n, x)) - level, 0.0, 2.0 * math.pi)


def sinc_inverse(level: float) -> float:
    """x in (0, 2 pi) with sin(x/2)/(x/2) = level (the N -> infinity Dirichlet kernel)."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    return bisect_root(lambda x: np.sinc(x / (2.0 * math.pi)) - level, 1e-12, 2.0 * math.pi)


def bessel_inverse(level: float) -> float:
    """y in (0, j_{0,1}) with J0(y) = level."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    return bisect_root(lambda y: bessel_j0(y) - level, 0.0, j0_first_root())


def radial_threshold_constant() -> float:
    """Post-threshold radial lobe constant (~4.238): L'_f = c * k / (pi B)."""
    return sinc_inverse(BESSEL_SIDE_LOBE)


def angular_threshold_constant() -> float:
    """Post-threshold UCA angular constant (~1.692): L'_a = 4 asin(lambda k / (4 pi R))."""
    return bessel_inverse(BESSEL_SIDE_LOBE)


J0_FIRST_ROOT = j0_first_root()
J0_DERIVATIVE_FIRST_ROOT = j0_derivative_first_root()
BESSEL_SIDE_LOBE = bessel_side_lobe_threshold()
RADIAL_CONSTANT = radial_threshold_constant()
ANGULAR_CONSTANT = angular_threshold_constant()

assert abs(RADIAL_CONSTANT - 4.238) < 1e-3, RADIAL_CONSTANT
assert abs(ANGULAR_CONSTANT - 1.692) < 1e-3, ANGULAR_CONSTANT
