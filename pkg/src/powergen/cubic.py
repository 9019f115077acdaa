"""Root structure of ``1 + t + z t^3`` for ``z < -4/27``.

On that range the cubic has one positive real root ``x`` and a conjugate pair
``r e^{+-i theta}`` with ``theta`` in ``(2 pi/3, pi)``.  Everything here is
parameterized by ``theta``; :func:`theta_from_z` is the inverse map ``W``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

TWO_PI_3 = 2.0 * math.pi / 3.0
Z_CRIT = -4.0 / 27.0
# -4/27 = Z_CRIT + _Z_CRIT_LO to about 1e-33
_Z_CRIT_LO = float(Fraction(-4, 27) - Fraction(Z_CRIT))
ENDPOINT_GUARD = 1e-12


def crit_offset(z):
    """``-4/27 - z`` with the constant carried in two parts (exact near ``-4/27``)."""
    return (Z_CRIT - np.asarray(z, dtype=float)) + _Z_CRIT_LO


def _geometry(theta):
    """Vectorized ``(cos, x, r, z)`` in a form that stays accurate near ``2 pi/3``."""
    theta = np.asarray(theta, dtype=float)
    near_pi = theta > 5.0 * math.pi / 6.0
    # near pi: with s = sin((pi - theta)/2), cos = -1 + 2 s^2 exactly in form
    s2 = np.sin((math.pi - theta) / 2.0) ** 2
    c = np.where(near_pi, -1.0 + 2.0 * s2, np.cos(theta))
    # near 2pi/3: 1 + 2 cos(theta) = 2 (cos theta - cos 2pi/3), written as a sine product
    neg_one_plus_2c = np.where(
        near_pi,
        1.0 - 4.0 * s2,
        4.0 * np.sin((theta + TWO_PI_3) / 2.0) * np.sin((theta - TWO_PI_3) / 2.0),
    )
    one_minus_2c = np.where(near_pi, 3.0 - 4.0 * s2, 1.0 - 2.0 * c)
    x = one_minus_2c * neg_one_plus_2c
    r = x / (-2.0 * c)
    z = -4.0 * c * c / x**3
    return c, x, r, z


def z_of_theta(theta):
    """Forward map ``z(theta) = 4 cos^2 / (1 - 4 cos^2)^3``; vectorized."""
    return _geometry(theta)[3]


def dz_dtheta(theta):
    """``z'(theta) = -8 sin cos (8 cos^2 + 1) / (1 - 4 cos^2)^4``, positive on the interval."""
    c, x, _, _ = _geometry(theta)
    s = np.sin(np.asarray(theta, dtype=float))
    return -8.0 * s * c * (8.0 * c * c + 1.0) / x**4


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not (TWO_PI_3 + ENDPOINT_GUARD < theta < math.pi - ENDPOINT_GUARD):
        raise ValueError(f"theta must lie strictly inside (2pi/3, pi), got {theta!r}")
    return theta


def _check_z(z: float) -> float:
    z = float(z)
    if not math.isfinite(z) or not crit_offset(z) > ENDPOINT_GUARD:
        raise ValueError(f"z must satisfy z < -4/27, got {z!r}")
    return z


@dataclass(frozen=True)
class CubicRoots:
    theta: float
    r: float
    x: float
    z: float

    @property
    def y(self) -> complex:
        """Non-real root in the upper half-plane, ``r e^{i theta}``."""
        return self.r * complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def dist_sq(self) -> float:
        """``|x - y|^2`` via the law-of-cosines identity ``2 x^2 + r^2``."""
        return 2.0 * self.x**2 + self.r**2

    def roots(self) -> tuple[complex, complex, complex]:
        y = self.y
        return complex(self.x), y, y.conjugate()

    def vieta_residuals(self) -> tuple[float, float, float]:
        """``|x + 2r cos|``, ``|2 x r cos + r^2 - 1/z|`` and ``|x r^2 + 1/z|``."""
        c = math.cos(self.theta)
        x, r, z = self.x, self.r, self.z
        return (
            abs(x + 2.0 * r * c),
            abs(2.0 * x * r * c + r * r - 1.0 / z),
            abs(x * r * r + 1.0 / z),
        )


def discriminant(z: float) -> float:
    """Discriminant of ``1 + t + z t^3`` in ``t``."""
    return -27.0 * z * z - 4.0 * z


def roots_from_theta(theta: float) -> CubicRoots:
    theta = _check_theta(theta)
    _, x, r, z = _geometry(theta)
    return CubicRoots(theta, float(r), float(x), float(z))


def _cardano_x(z):
    # one real root of the depressed cubic t^3 + t/z + 1/z, hyperbolic form
    az = -np.asarray(z, dtype=float)
    arg = np.sqrt(27.0 * az / 4.0)
    return 2.0 / np.sqrt(3.0 * az) * np.cosh(np.arccosh(np.maximum(arg, 1.0)) / 3.0)


def _x_near_critical(d):
    """``x = 3 - e`` where ``3e - 4e^2/3 + 4e^3/27 = d (3-e)^3``, ``d = -4/27 - z``."""
    d = np.asarray(d, dtype=float)
    e = 9.0 * d
    for _ in range(60):
        f = 3.0 * e - (4.0 / 3.0) * e * e + (4.0 / 27.0) * e**3 - d * (3.0 - e) ** 3
        fp = 3.0 - (8.0 / 3.0) * e + (4.0 / 9.0) * e * e + 3.0 * d * (3.0 - e) ** 2
        step = f / fp
        e = e - step
        if np.all(np.abs(step) <= 4e-16 * np.abs(e)):
            break
    return e


def _real_root_x_array(z):
    """Vectorized safeguarded Newton for the positive root of ``1 + t + z t^3``.

    Returns ``(x, 3 - x)`` with the gap computed directly when ``z`` sits close
    to ``-4/27``, where forming ``3 - x`` by subtraction would cancel.
    """
    z = np.asarray(z, dtype=float)
    x = _cardano_x(z)
    lo = np.zeros_like(z)
    hi = np.full_like(z, 3.0)
    for _ in range(100):
        f = 1.0 + x + z * x**3
        lo = np.where(f > 0, x, lo)
        hi = np.where(f < 0, x, hi)
        fp = 1.0 + 3.0 * z * x * x
        with np.errstate(divide="ignore", invalid="ignore"):
            nx = x - f / fp
        bad = ~((nx > lo) & (nx < hi))
        nx = np.where(bad, 0.5 * (lo + hi), nx)
        done = np.abs(nx - x) <= 2e-16 * np.abs(x)
        x = nx
        if np.all(done):
            break
    d = crit_offset(z)
    near = d < 1e-3
    gap = 3.0 - x
    if np.any(near):
        e = _x_near_critical(np.where(near, d, 0.0))
        x = np.where(near, 3.0 - e, x)
        gap = np.where(near, e, gap)
    return x, gap


def real_root_x(z: float) -> float:
    """The unique positive real root ``x`` of ``1 + t + z t^3`` for ``z < -4/27``."""
    z = _check_z(z)
    x, _ = _real_root_x_array(z)
    return float(x)


def real_root_x_radicals(z: float) -> float:
    """Closed radical expression for ``x`` using real cube roots.

    For ``z < -4/27`` the radicand ``sqrt(3) sqrt(27 z^4 + 4 z^3) - 9 z^2`` is
    a negative real, so the real cube root is the branch that gives ``x``.
    Loses accuracy for large ``|z|`` through cancellation; kept as a check.
    """
    z = _check_z(z)
    s = math.sqrt(3.0) * math.sqrt(27.0 * z**4 + 4.0 * z**3) - 9.0 * z * z
    cs = float(np.cbrt(s))
    return cs / (2.0 ** (1.0 / 3.0) * 3.0 ** (2.0 / 3.0) * z) - (2.0 / 3.0) ** (1.0 / 3.0) / cs


def theta_from_z(z: float) -> float:
    """Inverse map ``W(z)``: bisection on the monotone ``z(theta)``, then Newton polish."""
    z = _check_z(z)
    lo, hi = TWO_PI_3, math.pi
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if z_of_theta(mid) < z:
            lo = mid
        else:
            hi = mid
    theta = 0.5 * (lo + hi)
    for _ in range(3):
        nt = theta - (float(z_of_theta(theta)) - z) / float(dz_dtheta(theta))
        if not lo <= nt <= hi:
            break
        if nt == theta:
            break
        theta = nt
    return float(theta)


@dataclass(frozen=True)
class GeneralRootTriple:
    roots: tuple
    z: float

    def residuals(self) -> list[float]:
        return [abs(1 + t + self.z * t**3) for t in self.roots]


def all_roots(z: float) -> GeneralRootTriple:
    """All three roots of ``1 + t + z t^3`` for any real ``z != 0``."""
    z = float(z)
    if z == 0.0:
        raise ValueError("z = 0 leaves a linear polynomial, not a cubic")
    roots = np.roots([z, 0.0, 1.0, 1.0]).astype(complex)
    polished = []
    for t in roots:
        for _ in range(3):
            fp = 1.0 + 3.0 * z * t * t
            if fp == 0:
                break
            step = (1.0 + t + z * t**3) / fp
            if not np.isfinite(step):
                break
            t_new = t - step
            if abs(1 + t_new + z * t_new**3) >= abs(1 + t + z * t**3):
                break
            t = t_new
        polished.append(complex(t))
    polished.sort(key=lambda t: (t.imag, t.real))
    return GeneralRootTriple(tuple(polished), z)
