"""Named verification checks behind ``powergen verify``.

Each check takes optional overrides (``None`` means the built-in grid) and
returns a :class:`CheckResult` holding the worst measured quantity next to
the tolerance it was held to.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import cubic, integrals, series, zeros
from .quadrature import QuadratureSpec

THETA_GRID = (13 * math.pi / 18, 3 * math.pi / 4, 5 * math.pi / 6)


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    details: dict = field(default_factory=dict)


def _seq(value, default):
    if value is None:
        return tuple(default)
    if isinstance(value, (list, tuple)):
        return tuple(value)
    return (value,)


def _pmap(fn, items, workers):
    items = list(items)
    if workers is None or workers <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def check_integral_rep(alpha=None, m=None, z=None, spec=None, workers=None, tol=1e-6):
    grid = [
        (a, zz, mm)
        for a in _seq(alpha, (0.25, 0.5, 0.9))
        for zz in _seq(z, (-0.5, -2.0, -10.0))
        for mm in _seq(m, (5, 12, 25))
    ]

    def one(p):
        a, zz, mm = p
        ref = series.eval_scaled(series.pm_coeffs(a, mm), zz).value
        got = integrals.reconstruct_Pm(zz, a, mm, spec)
        return abs(got - ref) / abs(ref)

    errs = _pmap(one, grid, workers)
    worst = max(errs)
    return CheckResult("integral-rep", worst <= tol, worst, tol, {"points": len(grid)})


def check_watson(alpha=None, m=None, theta=None, spec=None, workers=None, tol=1e-6):
    grid = [
        (a, th, mm)
        for a in _seq(alpha, (0.25, 0.5, 0.75))
        for th in _seq(theta, THETA_GRID)
        for mm in _seq(m, range(16))
    ]

    def one(p):
        a, th, mm = p
        d = integrals.integrate_B_direct(th, a, mm, spec)
        w = integrals.integrate_B_watson(th, a, mm, spec)
        ok = d.converged and w.converged
        return abs(d.value - w.value) / abs(w.value) if ok else math.inf

    errs = _pmap(one, grid, workers)
    worst = max(errs)
    return CheckResult("watson", worst <= tol, worst, tol, {"points": len(grid)})


def check_upper_bound(alpha=None, m=None, theta=None, spec=None, workers=None):
    grid = [
        (a, th, mm)
        for a in _seq(alpha, (0.25, 0.5, 0.75))
        for th in _seq(theta, THETA_GRID)
        for mm in _seq(m, (1, 2, 5, 10, 25, 50, 100, 200, 400))
    ]

    def one(p):
        a, th, mm = p
        log_a, res = integrals.log_integral_A(th, a, mm, spec)
        return log_a - integrals.log_upper_bound_A(th, a, mm) if res.converged else math.inf

    log_ratios = _pmap(one, grid, workers)
    worst = math.exp(max(log_ratios))
    return CheckResult("upper-bound", worst < 1.0, worst, 1.0, {"points": len(grid), "quantity": "max integral/bound"})


def check_asymptotics(alpha=None, m=None, theta=None, spec=None, workers=None, tol=0.05):
    grid = [
        (a, th) for a in _seq(alpha, (0.25, 0.5, 0.75)) for th in _seq(theta, (13 * math.pi / 18, 5 * math.pi / 6))
    ]
    m_final = int(m) if m is not None else 400
    ladder = [mm for mm in (50, 100, 200, 400) if mm < m_final] + [m_final]

    def one(p):
        a, th = p
        return [integrals.asymptotic_ratio(th, a, mm, spec) for mm in ladder]

    seqs = _pmap(one, grid, workers)
    worst = max(abs(s[-1] - 1.0) for s in seqs)
    approaching = all(
        all(abs(s[i + 1] - 1.0) <= abs(s[i] - 1.0) + 1e-12 for i in range(len(s) - 1)) for s in seqs
    )
    return CheckResult(
        "asymptotics", worst <= tol and approaching, worst, tol, {"m_ladder": ladder, "monotone_approach": approaching}
    )


def check_dominance(alpha=None, m=None, spec=None, workers=None, n_theta=50):
    mm = int(m) if m is not None else 200
    thetas = np.linspace(2 * math.pi / 3 + 0.01, math.pi - 0.01, n_theta)
    grid = [(a, th) for a in _seq(alpha, (0.25, 0.5, 0.75)) for th in thetas]

    def one(p):
        d = integrals.dominance_check(p[1], p[0], mm, spec)
        return d.log_ratio if d.converged else math.inf

    ratios = _pmap(one, grid, workers)
    worst = max(ratios)
    return CheckResult(
        "dominance", worst < 0.0, worst, 0.0, {"m": mm, "points": len(grid), "quantity": "max log(A/|B|)"}
    )


def winding_consistency(alpha: float, m: int, spec: QuadratureSpec | None = None):
    """Brackets from the arg sweep and how many located roots fall in each."""
    sweep = integrals.hm_arg_sweep(alpha, m, spec=spec)
    brackets = integrals.winding_brackets(sweep)
    roots = zeros.pm_real_roots(alpha, m)
    root_thetas = np.array([cubic.theta_from_z(r) for r in roots.roots])
    counts = [int(np.count_nonzero((root_thetas > lo) & (root_thetas < hi))) for lo, hi in brackets]
    return sweep, brackets, roots, counts


def check_winding(alpha=None, m=None, spec=None, workers=None):
    a = float(alpha) if alpha is not None else 0.5
    mm = int(m) if m is not None else 60
    sweep, brackets, roots, counts = winding_consistency(a, mm, spec)
    passed = (
        len(brackets) >= mm // 3
        and all(c == 1 for c in counts)
        and not sweep.refinement_failed
        and sweep.converged
    )
    return CheckResult(
        "winding",
        passed,
        float(len(brackets)),
        float(mm // 3),
        {
            "alpha": a,
            "m": mm,
            "crossings": len(sweep.axis_crossings),
            "roots_per_bracket": counts,
            "total_arg_change": sweep.total_change,
            "expected_arg_change": sweep.expected_total_change(),
        },
    )


def check_derivative(alpha=None, m=None, workers=None, tol=1e-12):
    grid = [(a, mm) for a in _seq(alpha, (0.5, 1.0, 3.0)) for mm in _seq(m, (0, 9, 30))]
    worst = max(series.derivative_identity_residual(a, mm) for a, mm in grid)
    return CheckResult("derivative", worst <= tol, worst, tol, {"points": len(grid)})


def check_density(alpha=None, m=None, workers=None, ks_tol=0.03):
    a = float(alpha) if alpha is not None else 0.5
    mm = int(m) if m is not None else 300
    norm = zeros.density_normalization()
    norm_err = abs(norm.real - 1.0)
    at_minus2 = zeros.limiting_density(-2.0)
    exact = 3.0 / (20.0 * math.pi)
    rel_minus2 = abs(at_minus2 - exact) / exact
    rep = zeros.density_report(a, mm)
    passed = norm_err <= 1e-8 and rel_minus2 <= 1e-10 and rep.ks_distance <= ks_tol and rep.roots.ok
    return CheckResult(
        "density",
        passed,
        rep.ks_distance,
        ks_tol,
        {"normalization_error": norm_err, "density_at_minus2_rel_error": rel_minus2, "roots_ok": rep.roots.ok},
    )


def check_geometry(n_theta=1000, workers=None, tol=1e-12, round_trip_tol=1e-10):
    # midpoint grid: interior, symmetric, no endpoint special cases
    thetas = 2 * math.pi / 3 + (math.pi / 3) * (np.arange(n_theta) + 0.5) / n_theta
    worst_vieta = worst_dist = worst_trip = 0.0
    for th in thetas:
        cr = cubic.roots_from_theta(th)
        scale = 1.0 / abs(cr.z)
        v = cr.vieta_residuals()
        worst_vieta = max(worst_vieta, v[0] / max(cr.x, 1.0), v[1] / max(scale, 1.0), v[2] / max(scale, 1.0))
        x, y = cr.roots()[0], cr.roots()[1]
        worst_dist = max(worst_dist, abs(abs(x - y) ** 2 - cr.dist_sq) / cr.dist_sq)
        worst_trip = max(worst_trip, abs(cubic.theta_from_z(cr.z) - th))
    passed = worst_vieta <= tol and worst_dist <= tol and worst_trip <= round_trip_tol
    return CheckResult(
        "geometry",
        passed,
        max(worst_vieta, worst_dist),
        tol,
        {"round_trip_error": worst_trip, "round_trip_tolerance": round_trip_tol, "points": n_theta},
    )


CHECKS = {
    "integral-rep": check_integral_rep,
    "watson": check_watson,
    "upper-bound": check_upper_bound,
    "asymptotics": check_asymptotics,
    "dominance": check_dominance,
    "winding": check_winding,
    "derivative": check_derivative,
    "density": check_density,
    "geometry": check_geometry,
}
