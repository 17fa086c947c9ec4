import math

import numpy as np
import pytest
from scipy import special

from causal_wiener.errors import ConstraintViolated
from causal_wiener.lm_expansion import (DeltaCache, Kernel, Lattice, assemble_c2, assemble_c3,
                                        b_km, beta_seq, delta_k, estimate_constants, f_coeffs,
                                        f_series_closed_form, finite_predictor_series,
                                        fractional_beta, k4_ratio)
from causal_wiener.predictor import finite_predictor_coeffs, infinite_predictor_coeffs
from causal_wiener.process import ProcessSpec, ar_inf_coeffs, autocovariance, ma_inf_coeffs

WN = ProcessSpec.white_noise()
AR1 = ProcessSpec.arma(ar=[0.5])
MA1 = ProcessSpec.arma(ma=[0.5])
FI = ProcessSpec.arfima(0.25)

# 30-digit mpmath sums, d = 0.25
BETA_10 = 0.023085033747618104348          # sum_v psi_v phi_{10+v}
DELTA2_64_0_0 = 0.00080094129063837582368   # sum_w beta_{64+w}^2
DELTA2_64_3_5 = 0.00075335899497737221052   # sum_w beta_{67+w} beta_{69+w}
# 40-digit LU solve, fractional noise d = 0.2, horizon 3, n = 32, j = 5
THREE_STEP_J5 = 0.025197569398907329134


class TestFCoeffs:
    def test_leading_terms(self):
        f = f_coeffs(4).values
        h = 1e-5
        numeric = (math.asin(h) - math.asin(-h)) / (2 * h) / math.pi
        assert f[0] == pytest.approx(numeric, rel=1e-9)
        assert f[0] == pytest.approx(0.31830989, abs=1e-8)
        assert f[1] == pytest.approx(1 / math.pi ** 2, rel=1e-15)

    def test_closed_form_odd(self):
        # (2j)! / (pi 4^j (j!)^2 (2j+1))
        f = f_coeffs(64).values
        for j in range(32):
            ref = math.factorial(2 * j) / (math.pi * 4 ** j * math.factorial(j) ** 2 * (2 * j + 1))
            assert f[2 * j] == pytest.approx(ref, rel=1e-13)

    def test_positive(self):
        assert np.all(f_coeffs(200).values > 0)

    @pytest.mark.parametrize("x", [0.1, 0.25, 0.5])
    def test_generating_functions(self, x):
        f = f_coeffs(64)
        assert f.odd_sum(x) == pytest.approx(math.asin(x) / math.pi, abs=1e-10)
        assert f.even_sum(x) == pytest.approx((math.asin(x) / math.pi) ** 2, abs=1e-10)
        assert f.weighted_sum(x) == pytest.approx(f_series_closed_form(x), abs=1e-10)

    def test_one_sixth(self):
        assert f_coeffs(63).odd_sum(0.5) == pytest.approx(1 / 6, abs=1e-10)


class TestBeta:
    def test_white_noise(self):
        b, tail = beta_seq(ma_inf_coeffs(WN, 5), ar_inf_coeffs(WN, 20), 10, 5)
        assert not np.any(b[1:]) and tail == 0.0

    def test_ar1(self):
        b, _ = beta_seq(ma_inf_coeffs(AR1, 80), ar_inf_coeffs(AR1, 100), 10, 80)
        assert b[1] == pytest.approx(0.5, rel=1e-15)
        assert not np.any(b[2:])

    def test_fractional_closed_form(self):
        assert float(fractional_beta(0.25, 10)) == pytest.approx(BETA_10, rel=1e-14)

    def test_fractional_truncated_sum(self):
        trunc = 1_000_000
        b, tail = beta_seq(ma_inf_coeffs(FI, trunc), ar_inf_coeffs(FI, trunc + 11), 10, trunc)
        assert b[10] > 0
        assert abs(b[10] - BETA_10) <= tail
        assert b[10] + tail == pytest.approx(BETA_10, rel=1e-3)


class TestDelta:
    @pytest.fixture(scope="class")
    @staticmethod
    def cache():
        return DeltaCache(Kernel(FI), 64, max_k=8)

    def test_kronecker(self, cache):
        assert delta_k(cache, 0, 3, 3) == 1.0
        assert delta_k(cache, 0, 3, 4) == 0.0

    def test_one_term(self, cache):
        for u, v in [(0, 0), (2, 7), (16, 16)]:
            beta = float(fractional_beta(0.25, 64 + u + v))
            assert delta_k(cache, 1, u, v) == pytest.approx(beta, rel=1e-14)

    def test_second_order_against_direct_sum(self, cache):
        assert delta_k(cache, 2, 0, 0) == pytest.approx(DELTA2_64_0_0, rel=1e-9)
        assert delta_k(cache, 2, 3, 5) == pytest.approx(DELTA2_64_3_5, rel=1e-9)

    def test_symmetric(self, cache):
        assert delta_k(cache, 3, 2, 9) == pytest.approx(delta_k(cache, 3, 9, 2), rel=1e-15)

    def test_bound_example(self, cache):
        r, d = 1.05, 0.25
        bound = f_coeffs(2).values[1] * (r * math.sin(math.pi * d)) ** 2 / 64
        assert 0 < delta_k(cache, 2, 0, 0) <= bound

    @pytest.mark.parametrize("n", [8, 64, 256])
    def test_bound_grid(self, n):
        cache = DeltaCache(Kernel(FI), n, max_k=8)
        f = f_coeffs(8).values
        x = 1.05 * math.sin(math.pi * 0.25)
        for k in range(1, 9):
            rows = cache.rows(k)[:, :17]
            assert np.all(rows > 0)
            assert np.all(rows <= f[k - 1] * x ** k / n)

    def test_range_errors(self, cache):
        with pytest.raises(ValueError):
            cache.rows(9)
        with pytest.raises(ValueError):
            cache.delta(1, 17, 20)


class TestB:
    @pytest.mark.parametrize("spec", [FI, MA1, ProcessSpec.arma(ar=[0.4], ma=[0.3])])
    def test_first_term_is_next_horizon(self, spec):
        n = 20
        kern = Kernel(spec, max_j=n)
        cache = DeltaCache(kern, n + 1, max_k=2, u_max=6)
        psi, phi = ma_inf_coeffs(spec, 8), ar_inf_coeffs(spec, 60)
        for m in (0, 2, 5):
            ref = infinite_predictor_coeffs(psi, phi, m + 1, n).coeffs
            for j in (1, 4, 20):
                assert b_km(cache, 1, m, j) == pytest.approx(ref[j - 1], rel=1e-12)

    def test_white_noise(self):
        kern = Kernel(WN, max_j=10)
        cache = DeltaCache(kern, 11, max_k=3, u_max=1)
        assert b_km(cache, 2, 1, 3) == 0.0


class TestSeries:
    def test_ar1_terminates(self):
        res = finite_predictor_series(AR1, 8, 2)
        assert res.values[0] == pytest.approx(0.25, rel=1e-15)
        ref = finite_predictor_coeffs(autocovariance(AR1, 12), 2, 8).coeffs
        np.testing.assert_allclose(res.values, ref, atol=1e-15)

    def test_white_noise(self):
        assert not np.any(finite_predictor_series(WN, 10, 3).values)

    def test_fractional_example(self):
        res = finite_predictor_series(ProcessSpec.arfima(0.2), 32, 3)
        assert res.values[4] == pytest.approx(THREE_STEP_J5, rel=1e-6)
        assert res.remainder < 1e-12

    @pytest.mark.parametrize("spec", [MA1, ProcessSpec.arma(ar=[0.5], ma=[0.3])])
    def test_short_memory_matches_levinson(self, spec):
        g = autocovariance(spec, 40)
        for m in (1, 3):
            ref = finite_predictor_coeffs(g, m, 16).coeffs
            np.testing.assert_allclose(finite_predictor_series(spec, 16, m).values, ref,
                                       rtol=1e-9, atol=1e-14)

    def test_general_arfima_rejected(self):
        with pytest.raises(ValueError):
            Kernel(ProcessSpec.arfima(0.2, ar=[0.3]))

    def test_lattice_integrates_power_law(self):
        # sum_{u>=0} (u+1)^-2 = pi^2/6 through the Nystrom tail
        lat = Lattice.with_tail()
        assert float(np.sum(lat.weights * (lat.nodes + 1.0) ** -2)) == pytest.approx(
            math.pi ** 2 / 6, rel=1e-10)


class TestConstants:
    def test_white_noise(self):
        c = estimate_constants(WN, 0.5)
        assert c.C1 == pytest.approx(5.0) and c.N1 == 1

    def test_ma1(self):
        c = estimate_constants(MA1, 0.5)
        assert c.psi_norm == pytest.approx(1.5) and c.phi_norm == pytest.approx(2.0, rel=1e-12)
        assert c.C1 == pytest.approx(45.0, rel=1e-12)

    def test_n1_rule(self):
        # sum_{k>n} 0.9^k * 0.9 = 10 * 0.9^(n+2) <= 0.5 first holds at n = 27
        assert estimate_constants(ProcessSpec.arma(ma=[0.9]), 0.5).N1 == 27

    def test_fractional_finite_positive(self):
        c = estimate_constants(FI, r=1.05)
        for v in (c.K1, c.K2, c.K3, c.K4, c.C2, c.C3):
            assert math.isfinite(v) and v > 0
        assert c.K1 >= 2.0  # n = 1 term: sum_{j>=0} |phi_j| = 2
        assert c.K4 >= 1.0

    def test_probe_stability(self):
        a = estimate_constants(FI, probe_len=10_000)
        b = estimate_constants(FI, probe_len=100_000)
        for name in ("K1", "K2", "K3", "K4", "C2", "C3"):
            assert getattr(a, name) == pytest.approx(getattr(b, name), rel=0.02)

    def test_assembly_identity(self):
        c = estimate_constants(FI, r=1.05)
        x = 1.05 * math.sin(math.pi * 0.25)
        fsum = math.asin(x) / math.pi + (math.asin(x) / math.pi) ** 2
        assert c.C2 == pytest.approx(2 / 0.75 * c.K1 * c.K3 * fsum, rel=1e-14)
        assert c.C3 == pytest.approx(c.K1 * c.K2 * c.K4 * special.beta(0.25, 0.75), rel=1e-14)
        assert assemble_c2(0.25, 1.05, 2.0, 3.0, 0.5) == pytest.approx(2 / 0.75 * 3.0)
        assert assemble_c3(0.25, 1.0, 1.0, 1.0) == pytest.approx(special.beta(0.25, 0.75))

    def test_c2_series_value(self):
        # sum_k f_k(0) (1.05 sin(pi/4))^k from a 30-digit evaluation of arcsin
        c = estimate_constants(FI, r=1.05)
        assert c.probe["f_sum"] == pytest.approx(0.33728018814691044914, rel=1e-13)

    def test_constraint(self):
        with pytest.raises(ConstraintViolated):
            estimate_constants(ProcessSpec.arfima(0.45), r=1.05)
        with pytest.raises(ConstraintViolated):
            estimate_constants(FI, r=1.0)

    def test_k4_ratio_tends_to_one(self):
        # the integrand is singular at 0, so the Riemann sum converges like m^-d
        gaps = [1.0 - k4_ratio(0.25, m) for m in (10 ** 3, 10 ** 5, 10 ** 7)]
        assert all(g > 0 for g in gaps)
        assert gaps[1] / gaps[0] == pytest.approx(100 ** -0.25, rel=0.05)
        assert gaps[2] / gaps[1] == pytest.approx(100 ** -0.25, rel=0.05)


def test_delta_bound_is_asymptotic():
    # with r = 1.05 the bound is exceeded at very small n and first holds at n = 8
    f = f_coeffs(8).values
    x = 1.05 * math.sin(math.pi * 0.25)
    kern = Kernel(FI)

    def worst(n):
        cache = DeltaCache(kern, n, max_k=8)
        return max(np.max(np.abs(cache.rows(k)[:17, :17])) / (f[k - 1] * x ** k / n)
                   for k in range(1, 9))

    assert worst(1) == pytest.approx(3.7186, abs=1e-3)
    assert worst(7) > 1.0 > worst(8)
