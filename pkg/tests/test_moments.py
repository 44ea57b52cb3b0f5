"""Tests for closed-form moments, estimators, and log coefficients."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slelab import flow, moments
from slelab.flow import DomainError, SimConfig, constant_driver, sample_ensemble, whole_plane_sample
from slelab.moments import (
    MomentSpec,
    circle_points,
    closed_moduli,
    closed_one_point,
    closed_two_point,
    estimate_moduli,
    estimate_one_point,
    estimate_two_point,
    extract_log_coeffs,
    integral_means_scan,
    log_coeff_cross_expectation,
    log_coeff_sq_expectation,
    mfold_identity_check,
    milin_expectation,
    parabola_cartesian_residual,
    parabola_gamma,
    parabola_gamma_from_pq,
    parabola_point,
)

kappas = st.floats(min_value=0.1, max_value=60.0, allow_nan=False)
gammas = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


class TestParabola:
    def test_known_values_kappa2(self):
        # gamma = 1 gives the (2, 2) pair
        assert parabola_point(2.0, 1.0) == (2.0, 2.0)

    def test_known_values_kappa6(self):
        p, q = parabola_point(6.0, 0.5)
        assert abs(p - 1.75) < 1e-15
        assert abs(q - 1.5) < 1e-15

    def test_q_zero_intersections(self):
        # q = 0 crossings of the parabola sit at p = (6+kappa)(2+kappa)/(8 kappa),
        # equal to 2 for kappa = 2 and kappa = 6
        for kappa in (2.0, 6.0):
            pk = (6 + kappa) * (2 + kappa) / (8 * kappa)
            assert abs(pk - 2.0) < 1e-15
            g = parabola_gamma_from_pq(kappa, pk, 0.0)
            pr, qr = parabola_point(kappa, g)
            assert abs(pr - pk) < 1e-12 and abs(qr) < 1e-12

    @given(kappas, gammas)
    @settings(max_examples=200, deadline=None)
    def test_cartesian_residual_vanishes_on_curve(self, kappa, gamma):
        p, q = parabola_point(kappa, gamma)
        assert abs(parabola_cartesian_residual(kappa, p, q)) < 1e-8 * max(1, abs(p), abs(q))

    @given(kappas, gammas)
    @settings(max_examples=200, deadline=None)
    def test_gamma_roundtrip(self, kappa, gamma):
        p, q = parabola_point(kappa, gamma)
        assert abs(parabola_gamma_from_pq(kappa, p, q) - gamma) < 1e-7

    def test_gamma_branches(self):
        kappa = 6.0
        p, _ = parabola_point(kappa, 0.5)
        lo = parabola_gamma(kappa, p, branch="-")
        hi = parabola_gamma(kappa, p, branch="+")
        assert abs(lo - 0.5) < 1e-12
        assert hi > lo
        assert abs(parabola_point(kappa, hi)[0] - p) < 1e-12

    def test_gamma_beyond_vertex_rejected(self):
        with pytest.raises(DomainError):
            parabola_gamma(6.0, 10.0)

    def test_spec_consistency_check(self):
        MomentSpec(2.0, 2.0, gamma=1.0).check(2.0)
        with pytest.raises(DomainError):
            MomentSpec(2.0, 1.9, gamma=1.0).check(2.0)
        with pytest.raises(DomainError):
            MomentSpec(0.0, 1.0).sigma


class TestClosedForms:
    def test_one_point_kappa2(self):
        assert abs(closed_one_point(0.5, 2.0, 1.0) - 0.5) < 1e-15

    def test_one_point_kappa6(self):
        assert abs(closed_one_point(0.5, 6.0, 0.5) - np.sqrt(0.5)) < 1e-15

    def test_moduli_kappa2_value(self):
        # (1-z)(1-zbar)/(1-z zbar) at z = 0.5 is 1/3
        assert abs(closed_moduli(0.5, 2.0, 1.0) - 1.0 / 3.0) < 1e-15

    def test_two_point_reduces_to_one_point(self):
        z = 0.3 + 0.2j
        assert abs(closed_two_point(z, 0.0, 6.0, 0.5) - closed_one_point(z, 6.0, 0.5)) < 1e-15

    def test_moduli_is_two_point_diagonal(self):
        z = 0.3 - 0.4j
        direct = closed_two_point(z, np.conj(z), 4.0, 0.7)
        assert abs(direct.imag) < 1e-15
        assert abs(closed_moduli(z, 4.0, 0.7) - direct.real) < 1e-15


def mc_sample(points, kappa=2.0, n=400, T=5.0, dt=5e-3, seed=17):
    cfg = SimConfig(kappa=kappa, horizon_T=T, dt=dt, seed=seed)
    return sample_ensemble(cfg, points, n, workers=1)


class TestEstimators:
    def test_estimate_at_origin_is_one(self):
        # the weight at z = 0 is exp(0) for every sample: estimator exact
        s = mc_sample([0.0], n=10, dt=2e-2, T=1.0)
        est = estimate_one_point(s, 2.0, 2.0, 0.0)
        assert abs(est.value - 1.0) < 1e-12
        assert est.stderr < 1e-12

    def test_one_point_matches_closed_form(self):
        s = mc_sample([0.5], n=800)
        est = estimate_one_point(s, 2.0, 2.0, 0.5)
        assert abs(est.value - 0.5) < max(4 * est.stderr, 0.02)

    def test_moduli_matches_closed_form(self):
        s = mc_sample([0.5], n=800)
        est = estimate_moduli(s, 2.0, 2.0, 0.5)
        assert est.value.imag == 0
        assert abs(est.value - 1.0 / 3.0) < max(4 * est.stderr, 0.02)
        assert est.median_of_means is not None

    def test_two_point_with_origin_reduces(self):
        s = mc_sample([0.5], n=50, dt=2e-2, T=2.0)
        a = estimate_two_point(s, 2.0, 2.0, 0.5, 0.0)
        b = estimate_one_point(s, 2.0, 2.0, 0.5)
        assert a.value == b.value

    def test_unknown_point_rejected(self):
        s = mc_sample([0.5], n=5, dt=2e-2, T=1.0)
        with pytest.raises(DomainError):
            estimate_one_point(s, 2.0, 2.0, 0.25)


class TestLogCoeffs:
    def test_circle_points(self):
        pts = circle_points(0.5, 4)
        assert np.allclose(pts, [0.5, 0.5j, -0.5, -0.5j])

    def test_non_circle_rejected(self):
        s = mc_sample([0.1, 0.2], n=2, dt=2e-2, T=1.0)
        with pytest.raises(DomainError):
            extract_log_coeffs(s, 1)

    def test_aliasing_guard(self):
        s = mc_sample(circle_points(0.5, 8), n=2, dt=2e-2, T=1.0)
        with pytest.raises(DomainError):
            extract_log_coeffs(s, 4)

    def test_koebe_oracle(self):
        # frozen driver: log(f(z)/z) = -2 log(1+z), so gamma_n = (-1)^n / n
        cfg = SimConfig(kappa=2.0, horizon_T=14.0, dt=5e-3, seed=0)
        pts = circle_points(0.5, 16)
        s = whole_plane_sample(cfg, pts, path=constant_driver(cfg))
        stats = extract_log_coeffs(s, 4)
        expect = np.array([(-1.0) ** n / n for n in range(1, 5)])
        assert np.max(np.abs(stats.mean_gamma - expect)) < 1e-5
        assert np.max(np.abs(stats.mean_sq - expect**2)) < 1e-5

    def test_kappa2_statistics_small_n(self):
        cfg = SimConfig(kappa=2.0, horizon_T=6.0, dt=4e-3, seed=23)
        s = sample_ensemble(cfg, circle_points(0.6, 16), 1500)
        stats = extract_log_coeffs(s, 3)
        assert abs(stats.mean_sq[0] - 0.5) < 0.05
        assert abs(stats.mean_sq[1] - 0.125) < 0.02
        assert abs(stats.mean_gamma[0] - (-0.5)) < 0.06
        assert abs(stats.mean_gamma[1]) < 0.05
        assert abs(stats.cross[0] - (-0.125)) < 0.04

    def test_expectation_helpers(self):
        assert log_coeff_sq_expectation(1) == 0.5
        assert log_coeff_sq_expectation(2) == 0.125
        assert log_coeff_cross_expectation(1) == -0.125
        with pytest.raises(DomainError):
            log_coeff_sq_expectation(0)


class TestMilin:
    def test_first_values(self):
        assert abs(milin_expectation(1) - (-0.5)) < 1e-15
        assert abs(milin_expectation(2) - (-1.25)) < 1e-15

    def test_matches_direct_double_sum(self):
        # independent recomputation from E|gamma_k|^2 = 1/(2 k^2)
        for n in (1, 2, 3, 7, 20):
            direct = sum(
                sum(k * log_coeff_sq_expectation(k) - 1.0 / k for k in range(1, m + 1))
                for m in range(1, n + 1)
            )
            assert abs(milin_expectation(n) - direct) < 1e-12

    def test_monotone_decreasing(self):
        vals = [milin_expectation(n) for n in range(1, 30)]
        assert all(b < a for a, b in zip(vals, vals[1:]))


@pytest.fixture(scope="module")
def interior_sample():
    cfg = SimConfig(kappa=2.0, horizon_T=3.0, dt=5e-3, seed=7)
    z0 = 0.4 + 0.2j
    pts = [z0, z0**2, z0**3]
    return z0, whole_plane_sample(cfg, pts, flow.sample_driver(cfg, n_paths=25))


class TestMfold:
    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_interior_identity(self, interior_sample, m):
        z0, s = interior_sample
        assert mfold_identity_check(s, m, z0, 2.0, 1.0) < 1e-12

    @pytest.mark.parametrize("m", [-1, -2, -3])
    def test_exterior_identity(self, interior_sample, m):
        z0, s = interior_sample
        assert mfold_identity_check(s, m, 1.0 / z0, 2.0, 1.0) < 1e-12

    def test_m_zero_rejected(self, interior_sample):
        z0, s = interior_sample
        with pytest.raises(DomainError):
            mfold_identity_check(s, 0, z0, 2.0, 1.0)

    def test_m_minus_one_exponent_swap(self, interior_sample):
        # m = -1 sends (p, q) to (p, 2p - q): check the identity numerically
        # against the directly transformed exponents at zeta = 1/z -> z
        z0, s = interior_sample
        p, q = 1.3, 0.4
        qm = p + (q - p) / (-1)
        assert abs(qm - (2 * p - q)) < 1e-15
        assert mfold_identity_check(s, -1, 1.0 / z0, p, q) < 1e-12


class TestMeansScan:
    def test_bad_grid_rejected(self):
        with pytest.raises(DomainError):
            integral_means_scan("closed", 2.0, 2.0, 2.0, [0.5, 0.4])

    def test_off_parabola_rejected(self):
        with pytest.raises(DomainError):
            integral_means_scan("closed", 2.0, 1.0, 2.0, [0.5, 0.6])

    def test_tip_dominated_flag(self):
        # strongly negative gamma: angular integral diverges, no slope fit
        kappa = 6.0
        p, q = parabola_point(kappa, -1.0)
        scan = integral_means_scan("closed", p, q, kappa, [0.5, 0.6])
        assert scan.tip_dominated and scan.beta is None

    @pytest.mark.parametrize("kappa,gamma,target", [(6.0, 0.5, 0.75), (2.0, 1.0, 1.0)])
    def test_closed_form_slopes(self, kappa, gamma, target):
        p, q = parabola_point(kappa, gamma)
        r_grid = 1 - np.geomspace(0.5, 1e-4, 50)
        scan = integral_means_scan("closed", p, q, kappa, r_grid)
        assert abs(scan.beta - target) / target < 0.02

    def test_callable_integrand(self):
        r_grid = 1 - np.geomspace(0.1, 1e-4, 20)
        scan = integral_means_scan(lambda z: np.ones_like(z, dtype=float),
                                   0.0, 0.0, 2.0, r_grid)
        # constant integrand: integrals tend to 2 pi, slope ~ 0
        assert abs(scan.beta) < 0.02
