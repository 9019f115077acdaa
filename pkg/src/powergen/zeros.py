"""Zeros of ``P_m`` and ``H_m``, the curve they lie on, and their limiting density."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.optimize import brentq

from .cubic import (
    TWO_PI_3,
    Z_CRIT,
    _check_z,
    _geometry,
    _real_root_x_array,
    _x_near_critical,
    crit_offset,
    theta_from_z,
    z_of_theta,
)
from .quadrature import QuadratureSpec, de_half_line
from .series import PolynomialZ, _check_alpha, eval_pm, hm_coeffs, pm_coeffs

RESIDUAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class RootSet:
    roots: np.ndarray
    residuals: np.ndarray
    iterations: int
    converged: bool

    def __len__(self):
        return len(self.roots)

    def real_sorted(self) -> np.ndarray:
        return np.sort(self.roots.real)


def _scaled_residuals(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """``|p(z)| / sum |c_k| |z|^k``, evaluated through the reversed polynomial when ``|z| > 1``."""
    d = len(coeffs) - 1
    out = np.empty(len(z))
    for i, zi in enumerate(z):
        if abs(zi) <= 1:
            num = abs(np.polynomial.polynomial.polyval(zi, coeffs))
            den = np.polynomial.polynomial.polyval(abs(zi), np.abs(coeffs))
        else:
            w = 1.0 / zi
            num = abs(np.polynomial.polynomial.polyval(w, coeffs[::-1]))
            den = np.polynomial.polynomial.polyval(abs(w), np.abs(coeffs[::-1]))
        out[i] = num / den if den > 0 else 0.0
    return out


def _newton_ratios(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """``p(z) / p'(z)`` for every entry of ``z``, reversed-polynomial form outside the unit disk."""
    d = len(coeffs) - 1
    deriv = coeffs[1:] * np.arange(1, d + 1)
    rev = coeffs[::-1]
    rev_deriv = rev[1:] * np.arange(1, d + 1)
    pv = np.polynomial.polynomial.polyval
    inside = np.abs(z) <= 1
    out = np.empty_like(z)
    zi = z[inside]
    out[inside] = pv(zi, coeffs) / pv(zi, deriv)
    zo = z[~inside]
    w = 1.0 / zo
    # p(z) = z^d q(w), so p/p' = z / (d - w q'(w)/q(w))
    out[~inside] = zo / (d - w * pv(w, rev_deriv) / pv(w, rev))
    return out


def aberth_roots(p: PolynomialZ, max_iter: int = 500, angle_offset: float = 0.4, ratio_fn=None) -> RootSet:
    """All roots of ``p`` by Aberth-Ehrlich iteration.

    Starts from ``d`` points on the circle of radius ``|c_0/c_d|^(1/d)`` at
    angles ``2 pi k/d + angle_offset``, so the result is reproducible.
    Exact zero roots (vanishing low-order coefficients) are split off first.
    ``ratio_fn(z)`` may supply ``p(z)/p'(z)`` from a better-conditioned
    evaluation than the monomial coefficients.
    """
    coeffs = np.asarray(p.coeffs, dtype=complex)
    if p.is_zero or len(coeffs) < 2:
        raise ValueError("need a polynomial of degree at least 1")
    n_zero = int(np.flatnonzero(coeffs)[0])
    work = coeffs[n_zero:]
    d = len(work) - 1
    if d == 0:
        roots = np.zeros(n_zero, dtype=complex)
        return RootSet(roots, np.zeros(n_zero), 0, True)

    if ratio_fn is None:
        ratios = lambda z: _newton_ratios(work, z)  # noqa: E731
    else:
        # p = z^k q gives q/q' = 1 / (p'/p - k/z)
        ratios = lambda z: 1.0 / (1.0 / ratio_fn(z) - n_zero / z) if n_zero else ratio_fn(z)  # noqa: E731

    radius = abs(work[0] / work[-1]) ** (1.0 / d)
    z = radius * np.exp(1j * (2.0 * np.pi * np.arange(d) / d + angle_offset))
    it = 0
    done = False
    with np.errstate(all="ignore"):
        for it in range(1, max_iter + 1):
            ratio = ratios(z)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            step = ratio / (1.0 - ratio * inv.sum(axis=1))
            step = np.where(np.isfinite(step), step, 0.0)
            z = z - step
            if np.all(np.abs(step) <= 1e-14 * np.maximum(np.abs(z), 1e-300)):
                done = True
                break
        # one Newton polish per root
        ratio = ratios(z)
        polished = z - np.where(np.isfinite(ratio), ratio, 0.0)
    res_old = _scaled_residuals(work, z)
    res_new = _scaled_residuals(work, polished)
    z = np.where(res_new < res_old, polished, z)
    residuals = np.minimum(res_new, res_old)

    roots = np.concatenate([np.zeros(n_zero, dtype=complex), z])
    residuals = np.concatenate([np.zeros(n_zero), residuals])
    order = np.lexsort((roots.imag, roots.real))
    roots, residuals = roots[order], residuals[order]
    ok = bool(np.all(residuals <= RESIDUAL_TOL)) and np.all(np.isfinite(roots))
    # a stalled but accurate run still counts; a converged step pattern with bad residuals does not
    return RootSet(roots, residuals, it, bool(ok and (done or np.all(residuals <= 1e-12))))


def hm_newton_ratios(alpha: float, A: PolynomialZ, B: PolynomialZ, m: int, z) -> np.ndarray:
    """``H_m(z) / H_m'(z)`` from the ``t``-recurrence run at each fixed ``z``.

    The ``z``-derivative is carried through the same recurrence.  Value and
    derivative are rescaled together, so only their ratio is meaningful.
    """
    z = np.asarray(z, dtype=complex)
    a, b = A(z), B(z)
    da, db = A.derivative()(z), B.derivative()(z)
    zero = np.zeros_like(z)
    h = [zero, zero, np.ones_like(z)]
    dh = [zero, zero, zero]
    for n in range(int(m)):
        nxt = -(n + alpha) * b * h[-1]
        dnxt = -(n + alpha) * (db * h[-1] + b * dh[-1])
        if n >= 2:
            nxt = nxt - (n - 2 + 3 * alpha) * a * h[-3]
            dnxt = dnxt - (n - 2 + 3 * alpha) * (da * h[-3] + a * dh[-3])
        h = [h[-2], h[-1], nxt / (n + 1)]
        dh = [dh[-2], dh[-1], dnxt / (n + 1)]
        size = np.max(np.abs(np.array(h + dh)), axis=0)
        if np.any(size > 1e100):
            f = np.where(size > 1e100, 1.0 / size, 1.0)
            h = [v * f for v in h]
            dh = [v * f for v in dh]
    with np.errstate(divide="ignore", invalid="ignore"):
        return h[-1] / dh[-1]


def pm_scaled_residual(alpha: float, m: int, z) -> np.ndarray:
    """``|P_m(z)| / sum |c_k| |z|^k`` for real ``z``.

    All coefficients of ``P_m`` share the sign ``(-1)^m``, so the denominator
    equals ``|P_m(|z|)|``; both values come from the stable recurrence.
    """
    z = np.asarray(z, dtype=float)
    _, num = eval_pm(alpha, m, z)
    _, den = eval_pm(alpha, m, np.abs(z))
    return np.exp(num - den)


@dataclass(frozen=True, eq=False)
class RealRoots:
    """Sorted real zeros of ``P_m`` together with the checks run on them."""

    alpha: float
    m: int
    roots: np.ndarray
    residuals: np.ndarray
    expected_count: int
    brackets_verified: bool
    method: str
    extra_roots: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    @property
    def count_ok(self) -> bool:
        return len(self.roots) == self.expected_count

    @property
    def all_below_critical(self) -> bool:
        return bool(np.all(self.roots <= Z_CRIT - 1e-9))

    @property
    def residuals_ok(self) -> bool:
        return bool(np.all(self.residuals <= RESIDUAL_TOL))

    @property
    def ok(self) -> bool:
        return self.count_ok and self.all_below_critical and self.residuals_ok and self.brackets_verified

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots.tolist())

    def __getitem__(self, i):
        return self.roots[i]


def _refine_in_z(alpha, m, z_lo, z_hi):
    s_lo, l_lo = eval_pm(alpha, m, z_lo)
    s_hi, l_hi = eval_pm(alpha, m, z_hi)
    ref = max(float(l_lo), float(l_hi))

    def f(z):
        s, lm = eval_pm(alpha, m, z)
        return float(s) * math.exp(min(float(lm) - ref, 700.0))

    return brentq(f, z_lo, z_hi, xtol=1e-300, rtol=8.9e-16, maxiter=400)


def _theta_brackets(alpha, m, n_grid, edge=1e-9):
    thetas = np.linspace(TWO_PI_3 + edge, math.pi - edge, n_grid)
    zs = z_of_theta(thetas)
    signs, _ = eval_pm(alpha, m, zs)
    idx = np.flatnonzero(signs[:-1] * signs[1:] < 0)
    exact = np.flatnonzero(signs == 0)
    return zs, idx, exact


def pm_real_roots_bracketed(alpha: float, m: int, max_doublings: int = 4) -> RealRoots:
    """Real zeros of ``P_m`` in ``(-inf, -4/27)`` from sign changes on a theta grid.

    ``P_m`` is evaluated with :func:`powergen.series.eval_pm` (forward
    recurrence at fixed ``z``), which stays accurate where the coefficient
    form cancels catastrophically.  The grid is uniform in ``theta`` since the
    zeros are asymptotically uniform there; it is doubled until the expected
    number of sign changes is found.
    """
    alpha = _check_alpha(alpha)
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise ValueError(f"m must be a non-negative integer, got {m!r}")
    m = int(m)
    expected = m // 3
    if expected == 0:
        return RealRoots(alpha, m, np.zeros(0), np.zeros(0), 0, True, "bracket")
    n_grid = 20 * m + 200
    for _ in range(max_doublings + 1):
        zs, idx, exact = _theta_brackets(alpha, m, n_grid)
        if len(idx) + len(exact) >= expected:
            break
        n_grid *= 2
    roots = [float(zs[i]) for i in exact]
    for i in idx:
        roots.append(_refine_in_z(alpha, m, float(zs[i]), float(zs[i + 1])))
    roots = np.array(sorted(roots))
    residuals = pm_scaled_residual(alpha, m, roots) if len(roots) else np.zeros(0)
    return RealRoots(alpha, m, roots, residuals, expected, _verify_sign_changes(alpha, m, roots), "bracket")


def _verify_sign_changes(alpha, m, roots, rel=1e-12):
    """Independent check that ``P_m`` changes sign across every root (scaled evaluation)."""
    if len(roots) == 0:
        return True
    lo = roots * (1 + rel)
    hi = roots * (1 - rel)
    s_lo, _ = eval_pm(alpha, m, lo)
    s_hi, _ = eval_pm(alpha, m, hi)
    return bool(np.all(s_lo * s_hi < 0))


def pm_roots_reciprocal(alpha: float, m: int) -> RootSet:
    """Roots of ``P_m`` via Aberth on the reversed polynomial in ``w = 1/z``.

    The reversed polynomial ``w^d P_m(1/w)`` has its zeros in ``(-27/4, 0)``.
    Its coefficients lose relative accuracy in the evaluation for large
    ``m`` (cancellation among terms of mixed sign), so this route is a
    cross-check for ``m`` up to about 50.
    """
    coeffs = pm_coeffs(alpha, m).coeffs
    if len(coeffs) < 2:
        raise ValueError("P_m is constant for m < 3")
    w_set = aberth_roots(PolynomialZ(coeffs[::-1]))
    return RootSet(1.0 / w_set.roots, w_set.residuals, w_set.iterations, w_set.converged)


def pm_real_roots(alpha: float, m: int, method: str = "auto") -> RealRoots:
    """Sorted real zeros of ``P_m^(alpha)``; ``floor(m/3)`` of them for large ``m``.

    ``method="bracket"`` runs the theta-grid search only.  ``"reciprocal"``
    uses Aberth in ``w = 1/z`` and keeps the real roots, each polished and
    re-checked by a sign change.  ``"auto"`` brackets first and, if fewer
    than ``floor(m/3)`` roots are found, adds the reciprocal run's leftover
    roots to ``extra_roots`` so nothing goes missing silently.
    """
    if method not in ("auto", "bracket", "reciprocal"):
        raise ValueError(f"unknown method {method!r}")
    if method in ("auto", "bracket"):
        out = pm_real_roots_bracketed(alpha, m)
        if method == "bracket" or out.count_ok:
            return out
        rs = pm_roots_reciprocal(alpha, m)
        extra = np.array([r for r in rs.roots if not np.any(np.isclose(r, out.roots, rtol=1e-6))])
        return RealRoots(out.alpha, out.m, out.roots, out.residuals, out.expected_count, out.brackets_verified, "auto", extra)
    rs = pm_roots_reciprocal(alpha, m)
    real_mask = np.abs(rs.roots.imag) <= 1e-8 * np.abs(rs.roots)
    reals = np.sort(rs.roots[real_mask].real)
    polished = []
    for r in reals:
        lo, hi = r * (1 + 1e-7), r * (1 - 1e-7)
        s_lo, _ = eval_pm(alpha, m, lo)
        s_hi, _ = eval_pm(alpha, m, hi)
        polished.append(_refine_in_z(alpha, m, lo, hi) if s_lo * s_hi < 0 else r)
    polished = np.array(polished)
    residuals = pm_scaled_residual(alpha, m, polished) if len(polished) else np.zeros(0)
    return RealRoots(
        float(alpha), int(m), polished, residuals, int(m) // 3,
        _verify_sign_changes(alpha, m, polished), "reciprocal", rs.roots[~real_mask],
    )


def _x_and_gap_from_offset(d):
    """``x`` and ``3 - x`` for ``z = -4/27 - d`` given the offset ``d > 0`` exactly."""
    d = np.asarray(d, dtype=float)
    z = (Z_CRIT - d)
    x, gap = _real_root_x_array(z)
    near = d < 1e-3
    if np.any(near):
        e = _x_near_critical(np.where(near, d, 1e-3))
        x = np.where(near, 3.0 - e, x)
        gap = np.where(near, e, gap)
    return x, gap, z


def _density_from_x(x, gap, z):
    return -3.0 * x * np.sqrt(x + 1.0) / (2.0 * np.pi * z * (3.0 + 2.0 * x) * np.sqrt(gap))


def limiting_density(z):
    """Limiting density of the zeros, ``-3 x sqrt(x+1) / (2 pi z (3+2x) sqrt(3-x))``.

    ``x`` is the positive root of ``1 + t + z t^3``.  Vectorized; rejects
    ``z >= -4/27``.
    """
    z_arr = np.asarray(z, dtype=float)
    d = crit_offset(z_arr)
    if np.any(~(d > 0)) or np.any(~np.isfinite(z_arr)):
        raise ValueError("the density is defined for z < -4/27 only")
    x, gap = _real_root_x_array(z_arr)
    out = _density_from_x(x, gap, z_arr)
    return float(out) if np.ndim(z) == 0 else out


def limiting_density_offset(d):
    """The same density as a function of ``d = -4/27 - z > 0``; keeps accuracy as ``d -> 0``."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(~(d_arr > 0)):
        raise ValueError("offset must be positive")
    x, gap, z = _x_and_gap_from_offset(d_arr)
    # for tiny d, z rounds to Z_CRIT, which is harmless in the z factor
    out = _density_from_x(x, gap, z)
    return float(out) if np.ndim(d) == 0 else out


def limiting_density_theta(theta):
    """Density at ``z(theta)``: ``-3 (1-4cos^2)^4 / (4 pi sin(2 theta) (8 cos^2 + 1))``."""
    c, x, _, _ = _geometry(theta)
    return -3.0 * x**4 / (4.0 * np.pi * np.sin(2.0 * theta) * (8.0 * c * c + 1.0))


def limiting_cdf(z):
    """``F(z) = (3/pi) (W(z) - 2pi/3)``; vectorized over ``z < -4/27``."""
    if np.ndim(z) == 0:
        return 3.0 / math.pi * (theta_from_z(z) - TWO_PI_3)
    return np.array([3.0 / math.pi * (theta_from_z(v) - TWO_PI_3) for v in np.ravel(z)]).reshape(np.shape(z))


def density_normalization(spec: QuadratureSpec | None = None):
    """Integral of :func:`limiting_density` over ``(-inf, -4/27)``; should be 1."""
    spec = spec or QuadratureSpec(levels=12, rel_tol=1e-13)
    return de_half_line(lambda log_d: np.log(limiting_density_offset(np.exp(log_d))), spec, scale=1.0)


@dataclass(frozen=True, eq=False)
class DensityReport:
    alpha: float
    m: int
    z_grid: np.ndarray
    density: np.ndarray
    empirical_cdf: np.ndarray
    model_cdf: np.ndarray
    ks_distance: float
    roots: RealRoots


def density_report(alpha: float, m: int, grid_size: int = 200, edge: float = 1e-10) -> DensityReport:
    """Empirical zero distribution of ``P_m`` against the limiting CDF.

    The sample grid is uniform in ``theta`` so the model CDF at its ends is
    exact to ``edge * 3/pi``.  ``ks_distance`` is the Kolmogorov-Smirnov
    statistic over the located roots; the empirical CDF is normalized by the
    actual root count.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    roots = pm_real_roots(alpha, m)
    if len(roots.roots) == 0:
        raise ValueError("no real roots to compare; m must be at least 3")
    thetas = np.linspace(TWO_PI_3 + edge, math.pi - edge, grid_size)
    z_grid = z_of_theta(thetas)
    model = 3.0 / math.pi * (thetas - TWO_PI_3)
    emp = np.searchsorted(roots.roots, z_grid, side="right") / len(roots.roots)
    ks = stats.kstest(roots.roots, limiting_cdf).statistic
    return DensityReport(float(alpha), int(m), z_grid, limiting_density_theta(thetas), emp, model, float(ks), roots)


@dataclass(frozen=True, eq=False)
class CurveReport:
    """Where the zeros of ``H_m`` fall relative to the curve ``B^3/A in (-27/4, 0)``.

    ``excluded_roots`` are roots at which ``A`` or ``B`` vanishes (within the
    threshold), with the reason; ``w`` is not meaningful there.
    """

    alpha: float
    m: int
    roots: np.ndarray
    w: np.ndarray
    max_im: float
    re_range_ok: bool
    im_ok: bool
    excluded_roots: list
    root_set: RootSet

    @property
    def on_curve(self) -> bool:
        return self.im_ok and self.re_range_ok


def curve_check_Hm(
    alpha: float,
    A: PolynomialZ,
    B: PolynomialZ,
    m: int,
    tol: float = 1e-6,
    threshold: float = 1e-8,
) -> CurveReport:
    """Locate the zeros of ``H_m`` and test them against the curve condition."""
    alpha = _check_alpha(alpha)
    hm = hm_coeffs(alpha, A, B, m)[m]
    if hm.degree < 1:
        raise ValueError(f"H_{m} is constant; nothing to check")
    rs = aberth_roots(hm, ratio_fn=lambda z: hm_newton_ratios(alpha, A, B, m, z))
    kept, w, excluded = [], [], []
    for z in rs.roots:
        a, b = complex(A(z)), complex(B(z))
        if abs(a) < threshold:
            excluded.append((complex(z), "A vanishes"))
        elif abs(b) < threshold:
            excluded.append((complex(z), "B vanishes"))
        else:
            kept.append(complex(z))
            w.append(b**3 / a)
    w = np.array(w, dtype=complex)
    if len(w):
        scaled_im = np.abs(w.imag) / (1.0 + np.abs(w))
        max_im = float(np.max(np.abs(w.imag)))
        im_ok = bool(np.all(scaled_im <= tol))
        re_ok = bool(np.all((w.real > -27.0 / 4.0 - tol) & (w.real < -1e-12)))
    else:
        max_im, im_ok, re_ok = 0.0, True, True
    return CurveReport(alpha, int(m), np.array(kept), w, max_im, re_ok, im_ok, excluded, rs)


def count_law_onset(alpha: float, m_max: int, m_min: int = 3):
    """Smallest ``M0`` with ``pm_real_roots(alpha, m).ok`` for every ``M0 <= m <= m_max``.

    ``None`` means the law fails at ``m_max``.  Small ``m`` may legitimately
    fail; the value is reported, not asserted.
    """
    onset = None
    for m in range(int(m_max), int(m_min) - 1, -1):
        if not pm_real_roots(alpha, m, method="bracket").ok:
            break
        onset = m
    return onset


def curve_law_onset(alpha: float, A: PolynomialZ, B: PolynomialZ, m_max: int, m_min: int = 1):
    """Smallest ``m`` from which every checked ``H_m`` up to ``m_max`` lies on the curve."""
    onset = None
    for m in range(int(m_max), int(m_min) - 1, -1):
        try:
            rep = curve_check_Hm(alpha, A, B, m)
        except ValueError:
            break
        if not (rep.on_curve and rep.root_set.converged):
            break
        onset = m
    return onset
