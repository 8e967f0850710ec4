import math

import numpy as np
import pytest
from scipy.integrate import quad

from rstclt.estimators import (TailBoundParams, alpha_probe, clt_experiment, count_inversions,
                               covariance_envelope, diff2_bound, ell_e_cdf,
                               ell_e_moment_closed_form, ell_e_tail, erf, erfc,
                               estimate_rst_mean, estimate_rst_variance, estimate_va_ball,
                               estimate_va_integral, expectation_limit,
                               jackknife_variance_error, kolmogorov_distance,
                               kolmogorov_quantile, ks_distance, mecke_check, normal_cdf,
                               rst_tail_bound, summarize, truncation_radius, volume_ratio)
from rstclt.estimators.asymptotics import pair_covariance_sample
from rstclt.geom import ball, unit_ball_volume, unit_box
from rstclt.pointprocess import make_rng, uniform_points

# values from independent hand/library evaluation
SQRT2_HALF = 0.7071067811865476
TWO_OVER_PI = 0.6366197723675814
THREE_OVER_TWO_PI = 0.477464829275686
PHI1_MINUS_HALF = 0.3413447460685429     # 0.5 * math.erf(1 / sqrt(2))
U_E_INV = 0.7978845608028654             # sqrt(2 / pi)


def test_expectation_limit_examples():
    assert expectation_limit(1, 2, 1) == pytest.approx(SQRT2_HALF, rel=1e-15)
    assert expectation_limit(2, 2, 1) == pytest.approx(TWO_OVER_PI, rel=1e-15)
    for d in (1, 2, 3, 5):
        for vol in (0.3, 1.0, 7.0):
            assert expectation_limit(0, d, vol) == vol


def test_moment_closed_form_examples():
    assert ell_e_moment_closed_form(0, 2) == 1.0
    assert ell_e_moment_closed_form(2, 2) == pytest.approx(TWO_OVER_PI, rel=1e-15)
    assert ell_e_moment_closed_form(3, 3) == pytest.approx(THREE_OVER_TWO_PI, rel=1e-15)
    assert ell_e_moment_closed_form(1, 2) == pytest.approx(SQRT2_HALF, rel=1e-15)


@pytest.mark.parametrize("a", [0.5, 1, 2, 3])
@pytest.mark.parametrize("d", [2, 3])
def test_moment_closed_form_against_quadrature(a, d):
    kd = unit_ball_volume(d)
    # E[l^a] = int_0^inf P(l^a > v) dv, smooth at 0 for d / a >= 2/3
    val, _ = quad(lambda v: math.exp(-kd * v ** (d / a) / 2), 0, math.inf,
                  epsabs=0, epsrel=1e-13, limit=200)
    assert ell_e_moment_closed_form(a, d) == pytest.approx(val, rel=1e-8)


def test_domain_errors():
    with pytest.raises(ValueError):
        expectation_limit(-1, 2, 1)
    with pytest.raises(ValueError):
        expectation_limit(1, 2, 0)
    with pytest.raises(ValueError):
        ell_e_tail(-0.1, 2)
    with pytest.raises(ValueError):
        TailBoundParams(0.0)


def test_tail_examples():
    assert ell_e_tail(0, 2) == 1.0
    assert ell_e_tail(U_E_INV, 2) == pytest.approx(math.exp(-1), rel=1e-14)
    u = np.linspace(0, 3, 50)
    tails = [ell_e_tail(x, 2) for x in u]
    assert all(b <= a for a, b in zip(tails, tails[1:]))
    np.testing.assert_allclose(ell_e_cdf(u, 2), 1 - np.array(tails), atol=1e-15)


def test_rst_tail_bound_algebra():
    p = TailBoundParams(0.3)
    assert rst_tail_bound(0, 10, p, 2) == 1.0
    assert rst_tail_bound(0.1, 200, p, 2) == pytest.approx(rst_tail_bound(0.1, 100, p, 2) ** 2)
    with pytest.raises(ValueError):
        rst_tail_bound(0.1, 0.5, p, 2)


def test_diff2_bound_and_envelope():
    assert diff2_bound(0.0, 100, 0.5, 2) == 6.0
    assert covariance_envelope(0.0, 2, 3.0) == 3.0
    assert covariance_envelope(2.0, 2) == pytest.approx(math.exp(-math.pi / 2))


# ------------------------------------------------------------------ stats

def test_erf_matches_library():
    x = np.concatenate([np.linspace(-8, 8, 4001), [0.0, 2.5, -2.5, 2.5000001, 30.0]])
    ours = erf(x)
    ref = np.array([math.erf(v) for v in x])
    assert np.max(np.abs(ours - ref)) < 1e-12
    refc = np.array([math.erfc(v) for v in x[x > 0]])
    assert np.max(np.abs(erfc(x[x > 0]) - refc)) < 1e-14
    # the continued-fraction branch keeps relative accuracy deep in the tail
    big = x[x > 2.5]
    np.testing.assert_allclose(erfc(big), [math.erfc(v) for v in big], rtol=1e-12, atol=1e-300)


def test_normal_cdf_values():
    assert normal_cdf(0.0) == 0.5
    assert normal_cdf(1.0) - 0.5 == pytest.approx(PHI1_MINUS_HALF, abs=1e-15)
    assert normal_cdf(-40.0) < 1e-300


def test_kolmogorov_examples():
    assert kolmogorov_distance([0.0]) == 0.5
    assert kolmogorov_distance([-1.0, 1.0]) == pytest.approx(PHI1_MINUS_HALF, abs=1e-15)
    with pytest.raises(ValueError):
        kolmogorov_distance([])


def test_kolmogorov_large_normal_sample():
    x = np.random.default_rng(0).standard_normal(100_000)
    assert kolmogorov_quantile(100_000, 0.99) < 0.007
    assert kolmogorov_distance(x) < 0.007


def test_kolmogorov_permutation_invariant():
    x = np.random.default_rng(1).standard_normal(1000)
    y = np.random.default_rng(2).permutation(x)
    assert kolmogorov_distance(x) == kolmogorov_distance(y)


def test_ks_distance_uniform():
    assert ks_distance([0.5], lambda u: np.asarray(u)) == 0.5


def test_jackknife_against_direct_formula():
    x = np.random.default_rng(3).normal(size=200)
    blocks = np.array_split(x, 10)
    loo = [np.concatenate(blocks[:b] + blocks[b + 1:]).var(ddof=1) for b in range(10)]
    want = math.sqrt(9 / 10 * sum((v - np.mean(loo)) ** 2 for v in loo))
    assert jackknife_variance_error(x, 10) == pytest.approx(want, rel=1e-12)
    s = summarize(x)
    assert s.variance == pytest.approx(np.var(x, ddof=1))
    assert s.std_error_mean == pytest.approx(np.std(x, ddof=1) / math.sqrt(200))


def test_summarize_needs_two_values():
    with pytest.raises(ValueError):
        summarize([1.0])


# ----------------------------------------------------------------- checks

def test_volume_ratio_small_u_is_half():
    unit = uniform_points(make_rng(4), ball(1.0, 2), 20_000)
    p, se = volume_ratio(unit_box(2), np.array([0.2, 0.1]), 1e-4, unit)
    assert abs(p - 0.5) < 4 * se + 1e-3


def test_alpha_probe_range_and_stability():
    vals = [alpha_probe(unit_box(2), 6, 3000, seed).alpha_W for seed in range(3)]
    assert all(0 < v <= 1 for v in vals)
    assert max(vals) / min(vals) < 1.1
    with pytest.raises(ValueError):
        alpha_probe(unit_box(2), 0)


def test_mecke_counts():
    lhs, rhs = mecke_check(unit_box(2), 200, 0.0, 100, 5)
    assert rhs.mean == 200.0
    assert abs(lhs.mean - 200) < 3 * lhs.std_error_mean


def test_rst_mean_count_and_validation():
    s = estimate_rst_mean(unit_box(2), 300, 0.0, 200, 1)
    assert abs(s.mean - 1.0) < 3 * s.std_error_mean
    with pytest.raises(ValueError):
        estimate_rst_variance(unit_box(2), 300, 0.0, 10, 1)


def test_rst_variance_count():
    s = estimate_rst_variance(unit_box(2), 300, 0.0, 400, 2)
    assert abs(s.variance - 1.0) < 3 * s.std_error_variance


def test_va_integral_count_exact():
    est = estimate_va_integral(None, 0.0, 2, z_samples=50, seed=3)
    assert est.value == 1.0
    est = estimate_va_integral(2.0, 0.0, 2, z_samples=50, seed=3, coupled=False)
    assert est.value == 1.0


def test_va_ball_count():
    est = estimate_va_ball(4.0, 0.0, 2, replicates=400, seed=4)
    assert abs(est.value - 1.0) < 3 * est.std_error


def test_coupled_integrand_vanishes_far_away():
    rng = make_rng(6)
    z = np.array([40.0, 0.0])
    e = np.array([1.0, 0.0])
    assert all(pair_covariance_sample(rng, z, 1.0, e, 3.0) == 0.0 for _ in range(20))


def test_truncation_radius_solves_equation():
    kd = math.pi
    R = truncation_radius(1.0, 2, 0.4, 0.6)
    lhs = 0.4 * math.exp(-kd * R ** 2 / 8) * kd * R ** 2
    assert lhs == pytest.approx(1e-3 * 0.6, rel=1e-8)


def test_clt_validation_and_inversions():
    with pytest.raises(ValueError):
        clt_experiment(unit_box(2), 1, [256, 64], 1000, 1)
    with pytest.raises(ValueError):
        clt_experiment(unit_box(2), 1, [64], 10, 1)
    rows = [{"ks": 0.05, "ks_stderr": 0.01}, {"ks": 0.055, "ks_stderr": 0.01},
            {"ks": 0.02, "ks_stderr": 0.01}]
    assert count_inversions(rows) == (1, True)
