import math

import numpy as np
import pytest
from scipy import integrate, special

from powergen.quadrature import QuadratureSpec, de_half_line


def test_spec_validation():
    QuadratureSpec()
    for bad in ({"levels": 2}, {"levels": 15}, {"rel_tol": 0.0}, {"abs_tol": -1.0}, {"truncation": 0.0}):
        with pytest.raises(ValueError):
            QuadratureSpec(**bad)


@pytest.mark.parametrize("a", [0.1, 0.25, 0.5, 0.75, 0.9, 0.99])
def test_endpoint_singularity_with_exponential_tail(a):
    # int t^(-a) e^(-t) dt = Gamma(1 - a); near a = 1 the head needs a wider window
    spec = QuadratureSpec(truncation=9.0 if a > 0.95 else 6.5)
    res = de_half_line(lambda lt: -a * lt - np.exp(lt), spec)
    assert res.converged
    assert res.real == pytest.approx(math.gamma(1 - a), rel=1e-12)


@pytest.mark.parametrize("a", [0.1, 0.5, 0.9])
def test_algebraic_tail(a):
    # int t^(-a) / (1 + t) dt = pi / sin(a pi)
    res = de_half_line(lambda lt: -a * lt - np.logaddexp(0.0, lt))
    assert res.real == pytest.approx(math.pi / math.sin(a * math.pi), rel=1e-12)


def test_against_scipy_quad_on_a_concentrated_integrand():
    m = 50

    def f(t):
        return t**-0.3 * (1 + t) ** (-(m + 1))

    ref = integrate.quad(f, 0, 1, limit=200)[0] + integrate.quad(f, 1, np.inf, limit=200)[0]
    res = de_half_line(lambda lt: -0.3 * lt - (m + 1) * np.logaddexp(0.0, lt), scale=1.0 / m)
    assert res.real == pytest.approx(ref, rel=1e-9)
    # and against the exact Beta value B(0.7, m + 0.3)
    assert res.real == pytest.approx(special.beta(0.7, m + 0.3), rel=1e-12)


def test_complex_integrand():
    # int e^(-(1 - i) t) dt = 1 / (1 - i)
    res = de_half_line(lambda lt: -(1 - 1j) * np.exp(lt) + 0j)
    assert res.value == pytest.approx(1 / (1 - 1j), rel=1e-12)


def test_converged_implies_error_within_tolerance():
    spec = QuadratureSpec(levels=10, rel_tol=1e-10)
    res = de_half_line(lambda lt: -0.5 * lt - np.exp(lt), spec)
    assert res.converged
    assert res.err_estimate <= max(spec.abs_tol, spec.rel_tol * abs(res.value))


def test_one_more_level_changes_value_less_than_reported_error():
    f = lambda lt: -0.25 * lt - 2.0 * np.logaddexp(0.0, lt)  # noqa: E731
    coarse = de_half_line(f, QuadratureSpec(levels=4, rel_tol=1e-300, abs_tol=1e-300))
    fine = de_half_line(f, QuadratureSpec(levels=5, rel_tol=1e-300, abs_tol=1e-300))
    assert abs(fine.value - coarse.value) <= coarse.err_estimate + 1e-16


def test_nonconvergence_is_flagged():
    # oscillatory non-decaying integrand cannot converge
    res = de_half_line(lambda lt: np.log(2.0 + np.sin(np.exp(lt))), QuadratureSpec(levels=4))
    assert not res.converged


def test_nan_integrand_is_not_converged():
    res = de_half_line(lambda lt: np.full_like(lt, np.nan))
    assert not res.converged


def test_window_bounds_keep_accuracy():
    a, m = 0.5, 400
    exact = math.gamma(1 - a) / m ** (1 - a)
    res = de_half_line(lambda lt: -a * lt - m * np.exp(lt), scale=1.0 / m, lower=1e-40, upper=0.2)
    assert res.real == pytest.approx(exact, rel=1e-12)


def test_node_order_is_deterministic():
    f = lambda lt: -0.4 * lt - np.exp(lt)  # noqa: E731
    assert de_half_line(f).value == de_half_line(f).value
