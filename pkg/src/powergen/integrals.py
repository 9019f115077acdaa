"""Real-line integral representation of ``P_m(z)`` for ``0 < alpha < 1``.

With ``x, y = r e^{i theta}`` the roots from :mod:`powergen.cubic`,

    P_m(z) = sin(alpha pi) / (pi (-z)^alpha) * (int_0^inf A_m dt - 2 Im int_0^inf B_m dt)

where ``A_m`` is positive and ``B_m`` is complex.  ``int B_m`` also has a
Laplace-type form with kernel ``g(u, theta) u^(-alpha) e^(-m u)`` whose
large-``m`` size is ``Gamma(1-alpha) / m^(1-alpha)``.  This module evaluates
all of these, the bound on ``int A_m``, the dominance ``int A_m < |int B_m|``
and the winding of ``h_m(theta) = int B_m`` over ``(2 pi/3, pi)``.

All complex powers are ``exp(alpha * Log w)`` with the principal logarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammainccinv

from .cubic import TWO_PI_3, _geometry, roots_from_theta, theta_from_z
from .quadrature import IntegralResult, QuadratureSpec, de_half_line

DEFAULT_SPEC = QuadratureSpec(levels=10, rel_tol=1e-10)


def gamma_fn(s: float) -> float:
    s = float(s)
    if s <= 0 and s == math.floor(s):
        raise ValueError(f"Gamma has a pole at {s!r}")
    return math.gamma(s)


def _check_alpha_unit(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"the integral representation needs 0 < alpha < 1, got {alpha!r}")
    return alpha


def _check_m(m: int) -> int:
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise ValueError(f"m must be a non-negative integer, got {m!r}")
    return int(m)


class _Geom:
    __slots__ = ("theta", "c", "s", "x", "r", "y", "dist_sq", "x_minus_y", "two_r_sin")

    def __init__(self, theta: float):
        roots_from_theta(theta)  # domain check
        c, x, r, _ = _geometry(theta)
        self.theta = float(theta)
        self.c = float(c)
        self.s = math.sin(theta)
        self.x = float(x)
        self.r = float(r)
        self.y = self.r * complex(self.c, self.s)
        self.dist_sq = 2.0 * self.x**2 + self.r**2
        self.x_minus_y = self.x - self.y
        self.two_r_sin = 2.0 * self.r * self.s


def _log_affine(a: complex, b: complex, log_t):
    """Principal ``Log(a + b t)`` for ``t = exp(log_t) > 0`` without overflow."""
    t = np.exp(np.minimum(log_t, 0.0))
    big = log_t > 0
    with np.errstate(over="ignore", under="ignore"):
        inv = np.exp(-np.maximum(log_t, 0.0))
        small_branch = np.log(a + b * t)
        large_branch = log_t + np.log(a * inv + b)
    return np.where(big, large_branch, small_branch)


def _log_quadratic(p: float, q: float, log_t):
    """``log(t^2 + p t + q)`` for ``p, q > 0``."""
    t = np.exp(np.minimum(log_t, 0.0))
    with np.errstate(over="ignore", under="ignore"):
        inv = np.exp(-np.maximum(log_t, 0.0))
        small_branch = np.log(q + t * (p + t))
        large_branch = 2.0 * log_t + np.log1p(inv * (p + q * inv))
    return np.where(log_t > 0, large_branch, small_branch)


def _log_A(g: _Geom, alpha: float, m: int, log_t):
    return (
        -alpha * log_t
        - alpha * _log_quadratic(3.0 * g.x, g.dist_sq, log_t)
        - (m + 1) * np.real(_log_affine(g.x, 1.0, log_t))
    )


def _log_B(g: _Geom, alpha: float, m: int, log_t):
    return -alpha * (
        _log_affine(g.x_minus_y, -1j, log_t) + log_t + np.real(_log_affine(g.two_r_sin, 1.0, log_t))
    ) - (m + 1) * _log_affine(g.y, 1j, log_t)


def _g_constants(theta: float):
    e = complex(math.cos(theta), math.sin(theta))
    k2 = e / (2.0 * math.cos(theta) + e)
    k3 = -1j * e / (2.0 * math.sin(theta))
    return k2, k3


def _log_g(theta: float, alpha: float, log_u):
    """``log g(u, theta)`` with ``g`` the three-factor Laplace kernel correction."""
    k2, k3 = _g_constants(theta)
    u = np.exp(log_u)
    small = log_u <= 0
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        em1 = np.expm1(np.where(small, u, 0.0))
        log_e = np.where(small, np.log(em1), u + np.log(-np.expm1(-u)))
        # log(e^u - 1) = log u + u/2 + O(u^2); exact in doubles once u is tiny
        log_e = np.where(log_u < -30.0, log_u + 0.5 * u, log_e)
        log_f1 = log_e - log_u
    return -alpha * (log_f1 + _log_affine(1.0, k2, log_e) + _log_affine(1.0, k3, log_e))


def integrand_A(t, theta: float, alpha: float, m: int):
    """``1 / (t^a (t^2 + 3 x t + |x-y|^2)^a (x + t)^(m+1))``; vectorized in ``t``."""
    g = _Geom(theta)
    return np.exp(_log_A(g, _check_alpha_unit(alpha), _check_m(m), np.log(np.asarray(t, float))))


def integrand_B(t, theta: float, alpha: float, m: int):
    """``1 / ((x-y-it)^a (t^2 + 2 r sin(theta) t)^a (y+it)^(m+1))``; vectorized in ``t``."""
    g = _Geom(theta)
    return np.exp(_log_B(g, _check_alpha_unit(alpha), _check_m(m), np.log(np.asarray(t, float))))


def integrand_g(u, theta: float, alpha: float):
    _Geom(theta)
    return np.exp(_log_g(float(theta), _check_alpha_unit(alpha), np.log(np.asarray(u, float))))


def _head_spec(alpha: float, spec: QuadratureSpec, tol: float = 1e-18) -> QuadratureSpec:
    """Widen the node window so the ``t^(-alpha)`` head below it carries less than ``tol``.

    The head mass below ``tau`` (in units of the scale) is ``tau^(1-alpha)/(1-alpha)``,
    which for ``alpha`` near 1 forces ``tau`` far below the default cutoff.
    """
    log_tau = math.log(tol * (1.0 - alpha)) / (1.0 - alpha)
    needed = math.asinh(-log_tau / (0.5 * math.pi)) + 0.25
    if needed <= spec.truncation:
        return spec
    return replace(spec, truncation=needed)


def _integral_A_normalized(g: _Geom, alpha, m, spec) -> IntegralResult:
    # t = x v pulls out x^(-(m+alpha)); the remaining integral is O(1/m^(1-alpha))
    x2 = g.x * g.x

    def f(log_v):
        return (
            -alpha * log_v
            - alpha * _log_quadratic(3.0, g.dist_sq / x2, log_v)
            - alpha * math.log(x2)
            - (m + 1) * np.real(_log_affine(1.0, 1.0, log_v))
        )

    return de_half_line(f, _head_spec(alpha, spec), scale=1.0 / (m + 1))


def log_integral_A(theta: float, alpha: float, m: int, spec: QuadratureSpec | None = None):
    """``(log int A_m, normalized IntegralResult)``; the log survives where the value overflows."""
    alpha, m = _check_alpha_unit(alpha), _check_m(m)
    g = _Geom(theta)
    res = _integral_A_normalized(g, alpha, m, spec or DEFAULT_SPEC)
    return math.log(res.real) - (m + alpha) * math.log(g.x), res


def integrate_A(theta: float, alpha: float, m: int, spec: QuadratureSpec | None = None) -> IntegralResult:
    log_val, res = log_integral_A(theta, alpha, m, spec)
    factor = math.exp(log_val - math.log(res.real)) if res.real > 0 else math.nan
    return IntegralResult(complex(res.real * factor), res.err_estimate * factor, res.nodes_used, res.converged)


def integrate_B_direct(theta: float, alpha: float, m: int, spec: QuadratureSpec | None = None) -> IntegralResult:
    """``int_0^inf B_m dt`` straight from its definition; meant for moderate ``m``."""
    alpha, m = _check_alpha_unit(alpha), _check_m(m)
    g = _Geom(theta)
    spec = _head_spec(alpha, spec or DEFAULT_SPEC)
    return de_half_line(lambda lt: _log_B(g, alpha, m, lt), spec, scale=g.r / (m + 1))


def _watson_window(alpha: float, m: int, tol: float = 1e-18):
    """Node window from the tails of ``u^(-alpha) e^(-m u)`` (``|g| <= 1`` on the ray).

    The head below ``u_lo`` is at most ``u_lo^(1-alpha)/(1-alpha)``; the tail
    past ``u_hi`` is ``Gamma(1-alpha, m u_hi) / m^(1-alpha)``.
    """
    mm = max(m, 1)
    total = math.gamma(1.0 - alpha) / mm ** (1.0 - alpha)
    # underflows to 0 for alpha near 1; the window then falls back to the truncation
    u_lo = math.exp(math.log(tol * total * (1.0 - alpha)) / (1.0 - alpha))
    u_hi = gammainccinv(1.0 - alpha, tol) / m if m > 0 else None
    return u_lo, u_hi


def watson_kernel_integral(theta: float, alpha: float, m: int, spec: QuadratureSpec | None = None) -> IntegralResult:
    """``int_0^inf g(u, theta) u^(-alpha) e^(-m u) du``."""
    alpha, m = _check_alpha_unit(alpha), _check_m(m)
    _Geom(theta)
    theta = float(theta)
    lo, hi = _watson_window(alpha, m)

    def f(log_u):
        # past log u = 700 the kernel is below e^(-e^700); drop those nodes
        capped = np.minimum(log_u, 700.0)
        with np.errstate(over="ignore"):
            val = _log_g(theta, alpha, capped) - alpha * capped - m * np.exp(capped)
        return np.where(log_u > 700.0, -np.inf, val)

    spec = _head_spec(alpha, spec or DEFAULT_SPEC)
    return de_half_line(f, spec, scale=1.0 / max(m, 1), lower=lo or None, upper=hi)


def watson_log_prefactor(theta: float, alpha: float, m: int) -> complex:
    """Principal log of ``(-i)^(1-alpha) / ((x-y)^alpha (2 r sin)^alpha y^(m+alpha))``."""
    g = _Geom(theta)
    return (
        -0.5j * math.pi * (1.0 - alpha)
        - alpha * np.log(g.x_minus_y)
        - alpha * math.log(g.two_r_sin)
        - (m + alpha) * np.log(g.y)
    )


def integrate_B_watson(theta: float, alpha: float, m: int, spec: QuadratureSpec | None = None) -> IntegralResult:
    """``int_0^inf B_m dt`` through the Laplace-type kernel; valid for every ``m``."""
    alpha, m = _check_alpha_unit(alpha), _check_m(m)
    kern = watson_kernel_integral(theta, alpha, m, spec)
    pref = np.exp(watson_log_prefactor(theta, alpha, m))
    return IntegralResult(complex(pref * kern.value), abs(pref) * kern.err_estimate, kern.nodes_used, kern.converged)


def reconstruct_Pm(
    z: float, alpha: float, m: int, spec: QuadratureSpec | None = None, b_path: str = "watson"
) -> float:
    """``P_m(z)`` rebuilt from ``int A_m`` and ``Im int B_m`` (``0 < alpha < 1`` only).

    Raises ``ArithmeticError`` if either quadrature fails to converge.
    """
    alpha, m = _check_alpha_unit(alpha), _check_m(m)
    theta = theta_from_z(z)
    ia = integrate_A(theta, alpha, m, spec)
    if b_path == "watson":
        ib = integrate_B_watson(theta, alpha, m, spec)
    elif b_path == "direct":
        ib = integrate_B_direct(theta, alpha, m, spec)
    else:
        raise ValueError(f"unknown b_path {b_path!r}")
    if not (ia.converged and ib.converged):
        raise ArithmeticError(f"quadrature did not converge at z={z!r}, m={m}")
    pref = math.sin(alpha * math.pi) / (math.pi * (-z) ** alpha)
    return pref * (ia.real - 2.0 * ib.value.imag)


def log_upper_bound_A(theta: float, alpha: float, m: int) -> float:
    alpha, m = _check_alpha_unit(alpha), _check_m(m)
    if m < 1:
        raise ValueError("the bound needs m >= 1")
    g = _Geom(theta)
    return (
        math.lgamma(1.0 - alpha)
        - alpha * math.log(g.dist_sq)
        - (m + alpha) * math.log(g.x)
        - (1.0 - alpha) * math.log(m)
    )


def upper_bound_A(theta: float, alpha: float, m: int) -> float:
    """``Gamma(1-alpha) / (|x-y|^(2 alpha) x^(m+alpha) m^(1-alpha))``."""
    return math.exp(log_upper_bound_A(theta, alpha, m))


def asymptotic_ratio(theta: float, alpha: float, m: int, spec: QuadratureSpec | None = None) -> float:
    """``|int g u^(-a) e^(-m u) du| * m^(1-a) / Gamma(1-a)``; tends to 1 as ``m`` grows."""
    alpha, m = _check_alpha_unit(alpha), _check_m(m)
    if m < 1:
        raise ValueError("m must be at least 1")
    if not float(theta) <= math.pi - 0.1:
        raise ValueError("the ratio is only uniform for theta <= pi - 0.1")
    kern = watson_kernel_integral(theta, alpha, m, spec)
    if not kern.converged:
        raise ArithmeticError(f"kernel quadrature did not converge at theta={theta!r}, m={m}")
    return abs(kern.value) * m ** (1.0 - alpha) / math.gamma(1.0 - alpha)


@dataclass(frozen=True)
class Dominance:
    holds: bool
    margin: float
    log_A: float
    log_abs_B: float
    converged: bool

    @property
    def log_ratio(self) -> float:
        """``log(int A / |int B|)``; negative when dominance holds."""
        return self.log_A - self.log_abs_B


def log_abs_integral_B(theta: float, alpha: float, m: int, spec: QuadratureSpec | None = None):
    kern = watson_kernel_integral(theta, alpha, m, spec)
    pref = watson_log_prefactor(theta, alpha, m)
    return pref.real + math.log(abs(kern.value)), kern


def dominance_check(theta: float, alpha: float, m: int, spec: QuadratureSpec | None = None) -> Dominance:
    """Whether ``int A_m < |int B_m|`` at ``theta``, compared in log space."""
    alpha, m = _check_alpha_unit(alpha), _check_m(m)
    log_a, ra = log_integral_A(theta, alpha, m, spec)
    log_b, rb = log_abs_integral_B(theta, alpha, m, spec)
    # |B| - A = |B| (1 - A/|B|); stays inf rather than nan when both overflow
    with np.errstate(over="ignore", invalid="ignore"):
        margin = float(np.exp(log_b) * -np.expm1(log_a - log_b))
    return Dominance(log_a < log_b, margin, log_a, log_b, ra.converged and rb.converged)


def _wrap(a):
    return (np.asarray(a) + math.pi) % (2.0 * math.pi) - math.pi


@dataclass
class ArgSweep:
    alpha: float
    m: int
    thetas: np.ndarray
    hm_values: np.ndarray
    unwrapped_arg: np.ndarray
    axis_crossings: list = field(default_factory=list)
    refinement_failed: bool = False
    converged: bool = True

    @property
    def total_change(self) -> float:
        return float(self.unwrapped_arg[-1] - self.unwrapped_arg[0])

    def expected_total_change(self) -> float:
        """``-m pi/3 - alpha pi/2 + Arg kernel(theta_end)`` from the prefactor phases."""
        return -self.m * math.pi / 3.0 - self.alpha * math.pi / 2.0 + self.limiting_kernel_phase

    limiting_kernel_phase: float = 0.0


class _PhaseEval:
    def __init__(self, alpha, m, spec):
        self.alpha, self.m, self.spec = alpha, m, spec
        self.converged = True

    def __call__(self, theta):
        kern = watson_kernel_integral(theta, self.alpha, self.m, self.spec)
        self.converged &= kern.converged
        pref = watson_log_prefactor(theta, self.alpha, self.m)
        logmod = pref.real + math.log(abs(kern.value))
        phase = float(_wrap(pref.imag + np.angle(kern.value)))
        return phase, logmod, complex(np.angle(kern.value))


def hm_arg_sweep(
    alpha: float,
    m: int,
    grid_size: int | None = None,
    spec: QuadratureSpec | None = None,
    edge: float = 1e-6,
    max_rounds: int = 12,
) -> ArgSweep:
    """Continuous argument of ``h_m(theta)`` on ``[2pi/3 + edge, pi - edge]``.

    The grid is bisected wherever adjacent wrapped phases differ by ``pi/2``
    or more, so the unwrapping is unambiguous.  Axis crossings (``h_m`` on
    ``i R+`` or ``i R-``) are then located by root finding on the
    continuous argument.
    """
    alpha, m = _check_alpha_unit(alpha), _check_m(m)
    if m < 1:
        raise ValueError("m must be at least 1")
    spec = spec or DEFAULT_SPEC
    if grid_size is None:
        grid_size = 4 * m + 64
    ev = _PhaseEval(alpha, m, spec)
    thetas = list(np.linspace(TWO_PI_3 + edge, math.pi - edge, int(grid_size)))
    data = [ev(t) for t in thetas]

    failed = True
    for _ in range(max_rounds):
        phases = np.array([d[0] for d in data])
        jumps = np.abs(_wrap(np.diff(phases)))
        bad = np.flatnonzero(jumps >= math.pi / 2)
        if bad.size == 0:
            failed = False
            break
        for i in bad[::-1]:
            mid = 0.5 * (thetas[i] + thetas[i + 1])
            thetas.insert(i + 1, mid)
            data.insert(i + 1, ev(mid))

    thetas = np.array(thetas)
    phases = np.array([d[0] for d in data])
    logmods = np.array([d[1] for d in data])
    unwrapped = phases[0] + np.concatenate([[0.0], np.cumsum(_wrap(np.diff(phases)))])
    with np.errstate(over="ignore"):
        values = np.exp(logmods + 1j * phases)

    crossings = []
    for i in range(len(thetas) - 1):
        a0, a1 = unwrapped[i], unwrapped[i + 1]
        lo_k = math.ceil((min(a0, a1) - math.pi / 2) / math.pi)
        hi_k = math.floor((max(a0, a1) - math.pi / 2) / math.pi)
        for k in range(lo_k, hi_k + 1):
            target = math.pi / 2 + k * math.pi
            if target in (a0, a1) and target == a1:
                continue  # counted in the next interval
            ph0 = phases[i]

            def resid(th, ph0=ph0, a0=a0, target=target):
                return a0 + float(_wrap(ev(th)[0] - ph0)) - target

            if a0 == target:
                th = thetas[i]
            else:
                th = brentq(resid, thetas[i], thetas[i + 1], xtol=1e-14)
            crossings.append((float(th), 1 if k % 2 == 0 else -1))

    sweep = ArgSweep(alpha, m, thetas, values, unwrapped, crossings, failed, ev.converged)
    sweep.limiting_kernel_phase = float(np.angle(watson_kernel_integral(thetas[-1], alpha, m, spec).value))
    return sweep


def winding_brackets(sweep: ArgSweep) -> list[tuple[float, float]]:
    """Theta intervals forced to contain a zero of ``P_m(z(theta))``.

    Where ``int A < |h_m|`` the sign of ``P_m`` is minus the sign of
    ``Im h_m``, so consecutive crossings onto opposite imaginary half-axes
    enclose a sign change.  The interval from ``2pi/3`` to the first
    crossing also counts when the crossing's sign disagrees with the sign
    ``(-1)^(m - m//3)`` of ``P_m`` as ``z -> -inf``.
    """
    cr = sweep.axis_crossings
    out = []
    if cr:
        p_sign_first = -cr[0][1]
        limit_sign = (-1) ** (sweep.m - sweep.m // 3)
        if p_sign_first != limit_sign:
            out.append((TWO_PI_3, cr[0][0]))
    for (t0, s0), (t1, s1) in zip(cr, cr[1:]):
        if s0 != s1:
            out.append((t0, t1))
    return out


def check_branch_continuity(theta: float, alpha: float, m: int, n: int = 4001) -> float:
    """Largest jump of any principal-branch factor argument along ``t`` in ``(0, inf)``.

    Samples ``t`` log-uniformly over 40 decades; a jump near ``pi`` or more
    would mean a factor crossed the cut.
    """
    g = _Geom(theta)
    log_t = np.linspace(-46.0, 46.0, n)
    worst = 0.0
    for a, b in ((g.x_minus_y, -1j), (g.y, 1j)):
        arg = np.imag(_log_affine(a, b, log_t))
        worst = max(worst, float(np.max(np.abs(np.diff(arg)))))
    k2, k3 = _g_constants(theta)
    for k in (k2, k3):
        arg = np.imag(_log_affine(1.0, k, log_t))
        worst = max(worst, float(np.max(np.abs(np.diff(arg)))))
    return worst


def dominance_onset(theta: float, alpha: float, m_max: int, spec: QuadratureSpec | None = None):
    """Smallest ``m`` such that dominance holds for every ``m..m_max`` at this ``theta``.

    Returns ``None`` if it fails at ``m_max`` itself.
    """
    onset = None
    for m in range(int(m_max), -1, -1):
        if not dominance_check(theta, alpha, m, spec).holds:
            break
        onset = m
    return onset
