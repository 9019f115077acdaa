import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from powergen.cubic import TWO_PI_3, Z_CRIT, z_of_theta
from powergen.series import PolynomialZ, pm_coeffs
from powergen.zeros import (
    aberth_roots,
    count_law_onset,
    curve_check_Hm,
    curve_law_onset,
    density_normalization,
    density_report,
    hm_newton_ratios,
    limiting_cdf,
    limiting_density,
    limiting_density_offset,
    limiting_density_theta,
    pm_real_roots,
    pm_roots_reciprocal,
    pm_scaled_residual,
)

ONE = PolynomialZ([1.0])
Z = PolynomialZ([0.0, 1.0])


def test_aberth_simple_examples():
    rs = aberth_roots(PolynomialZ([1.0, 0.0, 1.0]))
    assert rs.converged
    np.testing.assert_allclose(rs.roots, [-1j, 1j], atol=1e-15)
    rs = aberth_roots(PolynomialZ(pm_coeffs(1, 3).coeffs))
    np.testing.assert_allclose(rs.roots, [-1.0], atol=1e-15)


def test_aberth_splits_off_zero_roots():
    rs = aberth_roots(PolynomialZ([0.0, 0.0, -2.0, 1.0]))
    np.testing.assert_allclose(np.sort_complex(rs.roots), [0, 0, 2], atol=1e-15)


def test_aberth_rejects_constants():
    with pytest.raises(ValueError):
        aberth_roots(PolynomialZ([3.0]))


def test_aberth_on_degree_sixteen():
    rs = aberth_roots(PolynomialZ(pm_coeffs(7.5, 50).coeffs))
    assert len(rs) == 16 and rs.converged
    assert np.all(np.abs(rs.roots.imag) < 1e-8 * np.abs(rs.roots))
    assert np.all(rs.roots.real < Z_CRIT)


@settings(max_examples=40)
@given(st.lists(st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False), min_size=1, max_size=8))
def test_aberth_recovers_well_separated_roots(roots):
    roots = np.array(roots)
    gaps = np.abs(roots[:, None] - roots[None, :]) + np.eye(len(roots)) * 10
    if np.min(gaps) < 0.1:
        return
    rs = aberth_roots(PolynomialZ(np.polynomial.polynomial.polyfromroots(roots)))
    for r in roots:
        assert np.min(np.abs(rs.roots - r)) <= 1e-9 * (1 + abs(r))


def test_recurrence_ratio_matches_coefficient_ratio():
    A, B = PolynomialZ([2.0, 1.0]), PolynomialZ([-1.0, 0.0, 1.0])
    from powergen.series import hm_coeffs

    p = hm_coeffs(0.5, A, B, 7)[7]
    z = np.array([0.3 + 0.2j, 1.5 - 0.1j, -2.0 + 0j])
    np.testing.assert_allclose(hm_newton_ratios(0.5, A, B, 7, z), p(z) / p.derivative()(z), rtol=1e-12)


def test_real_roots_small_cases():
    r = pm_real_roots(1, 3)
    np.testing.assert_allclose(r.roots, [-1.0], rtol=1e-15)
    assert r.ok
    assert len(pm_real_roots(2.0, 2).roots) == 0


@pytest.mark.parametrize("alpha", [0.5, 1.0, 7.5])
@pytest.mark.parametrize("m", [3, 10, 31, 50, 100])
def test_count_and_location_law(alpha, m):
    r = pm_real_roots(alpha, m)
    assert r.ok, (r.count_ok, r.all_below_critical, r.residuals_ok, r.brackets_verified)
    assert len(r) == m // 3 and np.all(np.diff(r.roots) > 0)


@settings(max_examples=25)
@given(st.floats(0.05, 12.0), st.integers(3, 90))
def test_count_and_location_law_property(alpha, m):
    r = pm_real_roots(alpha, m)
    assert r.ok
    assert r.roots.max() < -4 / 27


@settings(max_examples=10)
@given(st.floats(0.1, 8.0), st.integers(3, 60))
def test_each_root_is_a_high_precision_sign_change(alpha, m):
    r = pm_real_roots(alpha, m)
    for z in r.roots:
        lo = oracles.pm_value(alpha, m, z * (1 + 1e-9))
        hi = oracles.pm_value(alpha, m, z * (1 - 1e-9))
        assert mp.sign(lo) * mp.sign(hi) < 0


@pytest.mark.parametrize("m", [10, 30, 50])
def test_reciprocal_route_agrees(m):
    a = pm_real_roots(7.5, m, method="reciprocal")
    b = pm_real_roots(7.5, m, method="bracket")
    assert a.ok and b.ok
    np.testing.assert_allclose(a.roots, b.roots, rtol=1e-10)
    assert len(a.extra_roots) == 0
    with pytest.raises(ValueError):
        pm_roots_reciprocal(7.5, 2)


def test_unknown_method():
    with pytest.raises(ValueError):
        pm_real_roots(1.0, 9, method="companion")


def test_large_index():
    r = pm_real_roots(0.5, 300)
    assert r.ok and len(r) == 100
    assert np.max(r.residuals) < 1e-12


@settings(max_examples=15)
@given(st.floats(0.1, 8.0), st.integers(9, 80))
def test_zeros_interlace_with_those_of_the_derivative(alpha, m):
    # d/dz P_m^(alpha) = -alpha P_(m-3)^(alpha+1), so Rolle puts one zero of the latter in each gap
    outer = pm_real_roots(alpha, m).roots
    inner = pm_real_roots(alpha + 1, m - 3).roots
    for lo, hi in zip(outer, outer[1:]):
        assert np.sum((inner > lo) & (inner < hi)) == 1


def test_scaled_residual_is_one_far_from_zeros():
    # every coefficient has the same sign, so on the positive axis there is no cancellation
    np.testing.assert_allclose(pm_scaled_residual(0.5, 30, [0.5, 2.0]), [1.0, 1.0], rtol=1e-12)


def test_density_examples():
    # x = 1 at z = -2: density = 3 sqrt(2) / (2 pi * 2 * 5 * sqrt(2)) = 3 / (20 pi)
    assert limiting_density(-2.0) == pytest.approx(3 / (20 * math.pi), rel=1e-15)
    assert limiting_density(-1.0) == pytest.approx(0.13188666662280801705, rel=1e-14)
    assert limiting_cdf(-2.0) == pytest.approx(0.25, abs=1e-15)


@given(st.floats(-1e6, Z_CRIT - 1e-6))
def test_density_matches_oracle(z):
    assert limiting_density(z) == pytest.approx(float(oracles.density(z)), rel=1e-11)


@given(st.floats(TWO_PI_3 + 1e-6, math.pi - 1e-6))
def test_three_forms_of_the_density_agree(theta):
    # each form is compared at its own exact input; near pi the rounding of z
    # alone moves the density by far more than the tolerance
    with mp.workdps(40):
        z_exact = oracles.geometry(mp.mpf(theta))[3]
        assert limiting_density_theta(theta) == pytest.approx(float(oracles.density(z_exact)), rel=1e-9)
        z = float(z_of_theta(theta))
        if not z < Z_CRIT - 1e-12:
            return
        d = float(mp.mpf(-4) / 27 - mp.mpf(z))
        ref = float(oracles.density(mp.mpf(z)))
    assert limiting_density(z) == pytest.approx(ref, rel=1e-9)
    assert limiting_density_offset(d) == pytest.approx(ref, rel=1e-9)


@settings(max_examples=30)
@given(st.floats(-1e4, -0.16))
def test_cdf_derivative_is_the_density(z):
    h = 1e-5 * min(abs(z), abs(z - Z_CRIT))
    fd = (limiting_cdf(z + h) - limiting_cdf(z - h)) / (2 * h)
    assert fd == pytest.approx(limiting_density(z), rel=1e-6)


def test_density_normalization():
    res = density_normalization()
    assert res.converged
    assert res.real == pytest.approx(1.0, abs=1e-12)


def test_cdf_endpoints_and_monotonicity():
    assert limiting_cdf(-1e9) < 1e-2
    # 1 - F grows like the square root of the offset
    assert limiting_cdf(-4 / 27 - 1e-10) == pytest.approx(1.0, abs=1e-4)
    zs = -np.logspace(6, math.log10(0.15), 200)
    cdf = limiting_cdf(zs)
    assert np.all(np.diff(cdf) > 0) and cdf.shape == zs.shape


def test_density_near_the_edge_keeps_accuracy():
    # d = 1e-14: direct z subtraction would lose every digit of 3 - x
    d = 1e-14
    with mp.workdps(60):
        ref = float(oracles.density(mp.mpf(-4) / 27 - mp.mpf(d), dps=60))
    assert limiting_density_offset(d) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("z", [Z_CRIT, -0.1, 0.0, math.nan])
def test_density_rejects_outside_domain(z):
    with pytest.raises(ValueError):
        limiting_density(z)
    with pytest.raises(ValueError):
        limiting_density_offset(0.0)


def test_density_report_shrinks_with_m():
    small = density_report(0.5, 60)
    large = density_report(0.5, 300)
    assert large.ks_distance < small.ks_distance
    assert large.ks_distance <= 0.03
    assert large.model_cdf[0] == pytest.approx(0.0, abs=1e-9)
    assert large.model_cdf[-1] == pytest.approx(1.0, abs=1e-9)
    assert np.all(np.diff(large.empirical_cdf) >= 0)


def test_density_report_needs_roots():
    with pytest.raises(ValueError):
        density_report(0.5, 2)
    with pytest.raises(ValueError):
        density_report(0.5, 30, grid_size=1)


def test_curve_normalized_case_excludes_the_forced_origin():
    rep = curve_check_Hm(0.5, ONE, Z, 40)
    assert rep.on_curve and rep.root_set.converged
    assert len(rep.roots) == 39
    assert [reason for _, reason in rep.excluded_roots] == ["B vanishes"]
    assert abs(rep.excluded_roots[0][0]) < 1e-12


def test_curve_reduces_to_pm_roots():
    rep = curve_check_Hm(0.5, Z, ONE, 40)
    assert rep.on_curve and not rep.excluded_roots
    np.testing.assert_allclose(np.sort(rep.roots.real), pm_real_roots(0.5, 40).roots, rtol=1e-10)


def test_curve_first_index_has_only_forced_roots():
    rep = curve_check_Hm(0.5, ONE, PolynomialZ([-1.0, 0.0, 1.0]), 1)
    assert len(rep.roots) == 0 and len(rep.excluded_roots) == 2
    assert rep.on_curve
    with pytest.raises(ValueError):
        curve_check_Hm(0.5, Z, ONE, 2)


PAIRS = [
    (PolynomialZ([2.0, 1.0]), PolynomialZ([-1.0, 0.0, 1.0])),
    (PolynomialZ([1.0, 2.0, 3.0]), PolynomialZ([0.5, -1.0, 0.0, 1.0])),
    (PolynomialZ([1j, 1.0]), PolynomialZ([1.0, 1j])),
]


@pytest.mark.parametrize("A,B", PAIRS)
@pytest.mark.parametrize("m", [4, 5, 20, 41, 60])
def test_curve_law_with_general_pairs(A, B, m):
    rep = curve_check_Hm(0.5, A, B, m)
    assert rep.root_set.converged and rep.on_curve
    # H_m carries the factor B^(m mod 3) and nothing else vanishes with B
    assert len(rep.excluded_roots) == (m % 3) * B.degree
    assert len(rep.roots) + len(rep.excluded_roots) == len(rep.root_set)


@pytest.mark.parametrize("A,B", PAIRS)
def test_curve_roots_are_zeros_in_high_precision(A, B):
    m, alpha = 20, 0.5
    rep = curve_check_Hm(alpha, A, B, m)
    c = pm_coeffs(alpha, m).coeffs
    with mp.workdps(40):
        for z in rep.roots:
            zz = mp.mpc(z)
            a = mp.polyval([mp.mpc(v) for v in A.coeffs[::-1]], zz)
            b = mp.polyval([mp.mpc(v) for v in B.coeffs[::-1]], zz)
            terms = [mp.mpf(ck) * a**k * b ** (m - 3 * k) for k, ck in enumerate(c)]
            assert abs(mp.fsum(terms)) <= 1e-10 * mp.fsum(abs(t) for t in terms)


def test_onsets():
    assert count_law_onset(0.5, 30) == 3
    assert curve_law_onset(0.5, PolynomialZ([2.0, 1.0]), PolynomialZ([-1.0, 0.0, 1.0]), 20) == 1
