"""Tests for the exact spectrum, phase diagram, and universal partition."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slelab import spectrum as sp
from slelab.flow import DomainError

kappas = st.floats(min_value=0.5, max_value=60.0, allow_nan=False)


class TestBetas:
    def test_beta0_known_value(self):
        # kappa = 6, p = 2: disc = 100 - 96 = 4, beta0 = -2 + 10*8/24 = 4/3
        assert abs(sp.beta_0(2.0, 6.0) - 4.0 / 3.0) < 1e-14

    def test_beta_tip_known_value(self):
        val = sp.beta_tip(-4.0, 6.0)
        assert abs(val - (3 + (10 - np.sqrt(292)) / 4)) < 1e-14

    def test_beta_lin_known_value(self):
        assert abs(sp.beta_lin(10.0, 6.0) - (10 - 100.0 / 96.0)) < 1e-12

    def test_beta1_at_origin(self):
        # p = q = 0: 3*0 - 0 - 1/2 - 1/2 = -1
        assert abs(sp.beta_1(0.0, 0.0, 6.0) + 1.0) < 1e-14

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            sp.beta_0(10.0, 6.0)
        with pytest.raises(DomainError):
            sp.beta_1(0.0, 5.0, 6.0)

    @given(kappas, st.floats(min_value=-5, max_value=1.0))
    @settings(max_examples=100, deadline=None)
    def test_beta1_above_beta_lin(self, kappa, p):
        # beta_1 - beta_lin = (1/kappa)(kappa/4 - y)^2 >= 0 wherever defined
        q = p - abs(p) - 0.1   # keeps 1 + 2 kappa (p - q) > 0
        d = 1 + 2 * kappa * (p - q)
        y = np.sqrt(d)
        gap = sp.beta_1(p, q, kappa) - sp.beta_lin(p, kappa)
        assert gap >= -1e-12
        assert abs(gap - (kappa / 4 - y) ** 2 / kappa) < 1e-9


class TestSpecialPoints:
    def test_kappa6_values(self):
        s = sp.special_points(6.0)
        assert np.allclose(s.P0, (1.5625, 35.0 / 24.0), atol=1e-12)
        assert np.allclose(s.P1, (14 * 26 / 192.0, 35.0 / 24.0), atol=1e-12)
        assert np.allclose(s.Q0, (-3.25, -7.25), atol=1e-12)
        assert np.allclose(s.Q1, (-3.25, -4.5), atol=1e-12)
        assert abs(s.p0dblprime - (-100 * 14 / 128.0)) < 1e-12

    def test_p_star_on_green_q0_section(self):
        # p* solves the green parabola's q = 0 equation
        for kappa in (2.0, 6.0, 50.0):
            s = sp.special_points(kappa)
            # find the green parameter with q = 0 near the lower arc
            from scipy.optimize import brentq
            g = brentq(lambda t: sp.curve_eval("greenParabola", kappa, t)[1],
                       1e-9, 10 / np.sqrt(kappa) + 3, xtol=1e-15)
            p_on = sp.curve_eval("greenParabola", kappa, g)[0]
            assert abs(p_on - s.p_star) < 1e-9

    def test_tangency_points_on_their_curves(self):
        for kappa in (2.0, 6.0):
            s = sp.special_points(kappa)
            assert np.allclose(s.T1, sp.curve_eval("redParabola", kappa, 1 / kappa))
            assert np.allclose(s.T0, sp.curve_eval("redParabola", kappa, 2 / kappa + 0.5))
            assert np.allclose(s.T2, sp.curve_eval("greenParabola", kappa, 1 / kappa))


class TestCurves:
    @pytest.mark.parametrize("curve", ["redParabola", "greenParabola", "blueQuartic"])
    @pytest.mark.parametrize("kappa", [2.0, 6.0, 50.0])
    def test_cartesian_residual_vanishes_on_curve(self, curve, kappa):
        lo = 1 + 2 / kappa if curve == "blueQuartic" else -1.0
        for t in np.linspace(lo, lo + 2.5, 17):
            p, q = sp.curve_eval(curve, kappa, t)
            res = sp.cartesian_residual(curve, kappa, p, q)
            assert abs(res) < 1e-8 * max(1.0, abs(p) ** 4 + abs(q) ** 4)

    def test_cartesian_residual_nonzero_off_curve(self):
        assert abs(sp.cartesian_residual("redParabola", 6.0, 1.0, -2.0)) > 1e-3

    def test_unknown_curve(self):
        with pytest.raises(DomainError):
            sp.curve_eval("mauveSeptic", 6.0, 0.0)

    def test_lower_boundary_segments_join(self):
        for kappa in (2.0, 6.0, 50.0):
            s = sp.special_points(kappa)
            # continuity at the segment junctions
            for pj in (s.p0prime, s.p0):
                a = sp.lower_boundary_q(pj - 1e-9, kappa)
                b = sp.lower_boundary_q(pj + 1e-9, kappa)
                assert abs(a - b) < 1e-6

    def test_lower_boundary_hits_Q0_and_P0(self):
        kappa = 6.0
        s = sp.special_points(kappa)
        assert abs(sp.lower_boundary_q(s.p0prime, kappa) - s.Q0[1]) < 1e-9
        assert abs(sp.lower_boundary_q(s.p0, kappa) - s.P0[1]) < 1e-9


class TestClassify:
    def test_trivial_origin(self):
        res = sp.classify(0.0, 0.0, 6.0)
        assert res.region == "II"
        assert res.beta == 0.0

    def test_four_regions_sampled(self):
        kappa = 6.0
        s = sp.special_points(kappa)
        assert sp.classify(s.p0prime - 2, 0.0, kappa).region == "I"
        assert sp.classify(1.0, 1.0, kappa).region == "II"
        assert sp.classify(s.p0 + 2, s.p0 + 2, kappa).region == "III"
        low = sp.lower_boundary_q(1.0, kappa) - 0.5
        assert sp.classify(1.0, low, kappa).region == "IV"

    def test_boundary_flags(self):
        kappa = 6.0
        s = sp.special_points(kappa)
        qb = sp.lower_boundary_q(1.0, kappa)
        res = sp.classify(1.0, qb, kappa)
        assert res.boundary and res.regions == ("IV", "II")
        res = sp.classify(s.p0, 3.0, kappa)
        assert res.boundary and res.regions == ("II", "III")
        res = sp.classify(s.p0prime, 0.0, kappa)
        assert res.boundary and res.regions == ("I", "II")

    @pytest.mark.parametrize("kappa", [2.0, 6.0, 50.0])
    def test_spectrum_continuous_across_lower_boundary(self, kappa):
        s = sp.special_points(kappa)
        for p in np.linspace(s.p0prime - 3, s.p0 + 3, 25):
            qb = sp.lower_boundary_q(p, kappa)
            above = sp.classify(p, qb + 1e-7, kappa).beta
            below = sp.classify(p, qb - 1e-7, kappa).beta
            assert abs(above - below) < 1e-5

    @pytest.mark.parametrize("kappa", [2.0, 6.0, 50.0])
    def test_spectrum_continuous_across_verticals(self, kappa):
        s = sp.special_points(kappa)
        for pj in (s.p0prime, s.p0):
            for q in (s.P0[1] + 1.0, s.P0[1] + 3.0):
                left = sp.classify(pj - 1e-9, q, kappa).beta
                right = sp.classify(pj + 1e-9, q, kappa).beta
                assert abs(left - right) < 1e-6


class TestMfoldDiagram:
    def test_map_roundtrip(self):
        T, Tinv = sp.mfold_map(3), sp.mfold_map_inv(3)
        p, q = 1.2, -0.7
        assert np.allclose(Tinv(*T(p, q)), (p, q))

    def test_m_zero_rejected(self):
        with pytest.raises(DomainError):
            sp.mfold_map(0)
        with pytest.raises(DomainError):
            sp.classify_mfold(0.0, 0.0, 6.0, 0)

    def test_m_one_is_identity(self):
        a = sp.classify(0.3, -0.2, 6.0)
        b = sp.classify_mfold(0.3, -0.2, 6.0, 1)
        assert (a.region, a.beta) == (b.region, b.beta)

    def test_region_sequence_kappa30_m10(self):
        # along q = 0, increasing p: I, II, III, IV
        seen = []
        for p in np.linspace(-20, 12, 3000):
            r = sp.classify_mfold(p, 0.0, 30.0, 10).region
            if not seen or seen[-1] != r:
                seen.append(r)
        assert seen == ["I", "II", "III", "IV"]

    def test_region_sequence_kappa2_m_minus30(self):
        seen = []
        for p in np.linspace(-4, 8, 2000):
            r = sp.classify_mfold(p, 0.0, 2.0, -30).region
            if not seen or seen[-1] != r:
                seen.append(r)
        assert seen == ["I", "II", "IV", "III"]

    def test_m_minus_one_green_q0_crossing(self):
        # pulled-back green parabola crosses q = 0 at p0'' = -(4+k)^2 (8+k)/128
        kappa = 6.0
        Tinv = sp.mfold_map_inv(-1)
        s = sp.special_points(kappa)
        from scipy.optimize import brentq

        def q_of(t):
            return Tinv(*sp.curve_eval("greenParabola", kappa, t))[1]

        g = brentq(q_of, 1e-6, 3.0, xtol=1e-15)
        p_cross = Tinv(*sp.curve_eval("greenParabola", kappa, g))[0]
        assert abs(p_cross - s.p0dblprime) < 1e-9

    def test_m_minus_one_quartic_meets_q2p_only_at_origin(self):
        # under m = -1 the line q = 2p maps to q = 0 in base coordinates;
        # the quartic's pullback meets it only at the origin
        kappa = 6.0
        Tinv = sp.mfold_map_inv(-1)
        for t in np.linspace(1 + 2 / kappa, 1 + 2 / kappa + 5, 300):
            p, q = Tinv(*sp.curve_eval("blueQuartic", kappa, t))
            gap = q - 2 * p
            if abs(p) > 1e-6:
                assert abs(gap) > 1e-6


class TestXYGeometry:
    @given(kappas, st.floats(min_value=-4, max_value=1.5),
           st.floats(min_value=0.05, max_value=4.0))
    @settings(max_examples=150, deadline=None)
    def test_roundtrip_on_sector(self, kappa, p, dq):
        q = p - dq   # guarantees y real; p < vertex keeps x real
        x, y = sp.xy_forward(p, q, kappa)
        p2, q2 = sp.xy_inverse(x, y, kappa)
        assert abs(p - p2) < 1e-9 and abs(q - q2) < 1e-9

    def test_known_point(self):
        # kappa = 6: (p, q) = (0, 0) maps to (x, y) = (10, 1)
        assert np.allclose(sp.xy_forward(0.0, 0.0, 6.0), (10.0, 1.0))

    def test_outside_sector_rejected(self):
        with pytest.raises(DomainError):
            sp.xy_forward(20.0, 0.0, 6.0)

    @given(kappas, st.floats(min_value=-4, max_value=1.0),
           st.floats(min_value=0.05, max_value=3.0))
    @settings(max_examples=150, deadline=None)
    def test_xy_spectra_match_pq_forms(self, kappa, p, dq):
        q = p - dq
        x, y = sp.xy_forward(p, q, kappa)
        b1, b0, btip, blin = sp.xy_spectra(x, y, kappa)
        assert abs(b1 - sp.beta_1(p, q, kappa)) < 1e-9
        assert abs(b0 - sp.beta_0(p, kappa)) < 1e-9
        assert abs(btip - sp.beta_tip(p, kappa)) < 1e-9
        assert abs(blin - sp.beta_lin(p, kappa)) < 1e-9

    @given(kappas, st.floats(min_value=0.1, max_value=20.0),
           st.floats(min_value=0.1, max_value=10.0))
    @settings(max_examples=150, deadline=None)
    def test_factorization(self, kappa, x, y):
        # 4 kappa (beta_1 - beta_0) = (2y + x - kappa - 2)(2y - x + 2)
        b1, b0, _, _ = sp.xy_spectra(x, y, kappa)
        lhs = 4 * kappa * (b1 - b0)
        rhs = (2 * y + x - kappa - 2) * (2 * y - x + 2)
        assert abs(lhs - rhs) < 1e-8 * max(1.0, abs(lhs))

    @given(kappas, st.floats(min_value=0.1, max_value=20.0),
           st.floats(min_value=0.1, max_value=10.0))
    @settings(max_examples=150, deadline=None)
    def test_hyperbola_residual(self, kappa, x, y):
        # 4 kappa (beta_1 - beta_tip) equals the shifted-hyperbola expression
        b1, _, btip, _ = sp.xy_spectra(x, y, kappa)
        lhs = 4 * kappa * (b1 - btip)
        rhs = sp.quartic_hyperbola_residual(x, y, kappa)
        assert abs(lhs - rhs) < 1e-8 * max(1.0, abs(lhs))

    def test_asymptotes(self):
        info = sp.quartic_asymptotes(6.0)
        (a, b, c), _ = info["xy_lines"][0]["coeffs"], info["xy_lines"][0]["label"]
        assert (a, b, c) == (1.0, -2.0, 0.0)
        a2, b2, c2 = info["xy_lines"][1]["coeffs"]
        assert (a2, b2, c2) == (1.0, 2.0, -6.0)
        assert abs(info["pq_line"]["q_of_p"](0.0) - 1.0) < 1e-12


class TestUniversal:
    def test_piecewise_bounded_spectrum(self):
        assert sp.universal_bounded(-3.0) == 2.0
        assert sp.universal_bounded(3.0) == 2.0
        assert sp.universal_bounded(1.0) == 0.25

    def test_generalized_max_form(self):
        # deep below the partition the mixed branch dominates
        assert sp.universal_B(0.0, -3.0) == 5.0
        # far above it the bounded spectrum dominates
        assert sp.universal_B(0.0, 3.0) == 0.0

    def test_kraetzer_triple_point(self):
        part = sp.universal_partition()
        # tip and bulk partition curves and the B-continuity meet at (-2, -4)
        assert abs(part["tip"]["q_of_p"](-2.0) - (-4.0)) < 1e-12
        assert abs(part["bulk"]["q_of_p"](-2.0) - (-4.0)) < 1e-12
        assert abs(sp.universal_bounded(-2.0) - 1.0) < 1e-12

    def test_partition_continuity_at_two(self):
        part = sp.universal_partition()
        assert abs(part["bulk"]["q_of_p"](2.0) - part["lin"]["q_of_p"](2.0)) < 1e-12

    def test_custom_b0_model(self):
        flat = sp.universal_partition(b0_model=lambda p: 0.0)
        assert abs(flat["bulk"]["q_of_p"](1.0) - 1.0) < 1e-12
        with pytest.raises(DomainError):
            sp.universal_B(0.0, 0.0, b0_model="unknown")

    def test_feng_mcgregor_domain(self):
        assert sp.feng_mcgregor_domain(2.0, 1.0)
        assert not sp.feng_mcgregor_domain(-1.0, -3.0)   # needs p >= 0
        assert not sp.feng_mcgregor_domain(2.0, 2.5)     # q >= 2 excluded

    def test_koebe_limit(self):
        lim = sp.koebe_limit_partition()
        assert lim["Q0"] == (-1.0, -2.0)
        # spectra: mixed branch is 3p - 2q - 1
        assert lim["spectra"]["IV"](1.0, 0.0) == 2.0
        assert lim["spectra"]["I"](1.0, 0.0) == -2.0
        # separatrix residuals vanish on their lines
        assert lim["red"]["residual"](2.0, 3.0) == 0.0
        assert lim["green"]["residual"](1.0, 1.0) == 0.0
        assert lim["quartic_lower"]["q_of_p"](-1.0) == -2.0
