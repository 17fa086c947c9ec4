import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from causal_wiener.errors import DivergentNorm, InvalidRoots, TruncationInsufficient
from causal_wiener.process import (CoeffSeq, ProcessSpec, TailModel, ar_inf_coeffs,
                                   autocovariance, frac_diff_coeffs, frac_ma_coeffs,
                                   ma_inf_coeffs, phi_at, psi_at, weighted_norm)
from causal_wiener.toeplitz import levinson_durbin

AR1 = ProcessSpec.arma(ar=[0.5])
MA1 = ProcessSpec.arma(ma=[0.5])
ARMA11 = ProcessSpec.arma(ar=[0.5], ma=[0.3])
FI = ProcessSpec.arfima(0.25)


# frozen with mpmath at 40 digits: Gamma(1-2d) Gamma(k+d) / (Gamma(d) Gamma(1-d) Gamma(k+1-d))
FI_GAMMA = {0: 1.180340599016096226, 1: 0.39344686633869874202, 10: 0.12613694630834104464}


class TestMaInf:
    def test_ar1(self):
        np.testing.assert_allclose(ma_inf_coeffs(AR1, 3).values, [1, 0.5, 0.25])

    def test_white_noise(self):
        np.testing.assert_array_equal(ma_inf_coeffs(ProcessSpec.white_noise(), 4).values,
                                      [1, 0, 0, 0])

    def test_fractional(self):
        # Gamma(j+d) / (Gamma(d) Gamma(j+1)) evaluated directly
        j = np.arange(3)
        ref = special.gamma(j + 0.25) / (special.gamma(0.25) * special.gamma(j + 1))
        np.testing.assert_allclose(ma_inf_coeffs(FI, 3).values, [1, 0.25, 0.15625], rtol=1e-15)
        np.testing.assert_allclose(ma_inf_coeffs(FI, 3).values, ref, rtol=1e-14)

    def test_raw_ma(self):
        seq = ma_inf_coeffs(ProcessSpec.raw_ma([0.4, -0.2]), 5)
        np.testing.assert_array_equal(seq.values, [1, 0.4, -0.2, 0, 0])
        assert seq.tail_bound == 0.0

    def test_truncated_raw_ma_reports_tail(self):
        seq = ma_inf_coeffs(ProcessSpec.raw_ma([0.4, -0.2]), 2)
        assert seq.tail_bound == pytest.approx(0.2)


class TestArInf:
    def test_ma1(self):
        np.testing.assert_allclose(ar_inf_coeffs(MA1, 4).values, [-1, 0.5, -0.25, 0.125])

    def test_ar1(self):
        np.testing.assert_allclose(ar_inf_coeffs(AR1, 4).values, [-1, 0.5, 0, 0])

    def test_fractional(self):
        np.testing.assert_allclose(ar_inf_coeffs(FI, 3).values, [-1, 0.25, 0.09375], rtol=1e-15)

    def test_arma11_closed_form(self):
        # 1 - sum phi_j z^j = (1 - a z) / (1 + t z) gives phi_j = (a + t)(-t)^(j-1)
        j = np.arange(1, 30)
        np.testing.assert_allclose(ar_inf_coeffs(ARMA11, 30).values[1:],
                                   0.8 * (-0.3) ** (j - 1), rtol=1e-13, atol=1e-300)


@pytest.mark.parametrize("spec", [AR1, MA1, ARMA11, FI, ProcessSpec.arfima(0.3, ar=[0.4], ma=[0.2]),
                                  ProcessSpec.arma(ar=[1.2, -0.5], ma=[0.4, 0.1])])
def test_convolution_identity(spec):
    psi = ma_inf_coeffs(spec, 200).values
    phi = ar_inf_coeffs(spec, 200).values
    conv = np.convolve(psi, -phi)[:200]
    expected = np.eye(1, 200).ravel()
    np.testing.assert_allclose(conv, expected, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-0.9, 0.9), t=st.floats(-0.9, 0.9))
def test_convolution_identity_random_arma(a, t):
    spec = ProcessSpec.arma(ar=[a], ma=[t])
    psi = ma_inf_coeffs(spec, 64).values
    phi = ar_inf_coeffs(spec, 64).values
    np.testing.assert_allclose(np.convolve(psi, -phi)[:64], np.eye(1, 64).ravel(), atol=1e-12)


class TestAutocovariance:
    def test_ar1(self):
        g = autocovariance(AR1, 3).gamma
        np.testing.assert_allclose(g[:2], [4 / 3, 2 / 3], rtol=1e-14)
        np.testing.assert_allclose(g, 0.5 ** np.arange(4) / 0.75, rtol=1e-14)

    def test_white_noise(self):
        g = autocovariance(ProcessSpec.white_noise(2.0), 5)
        np.testing.assert_array_equal(g.gamma, [2, 0, 0, 0, 0, 0])
        assert g.method == "closed_form"

    def test_arma11(self):
        # (1 + 2at + t^2)/(1 - a^2) and (1 + at)(a + t)/(1 - a^2)
        g = autocovariance(ARMA11, 5).gamma
        np.testing.assert_allclose(g[:2], [1.8533333333333333333, 1.2266666666666666667],
                                   rtol=1e-14)
        np.testing.assert_allclose(g[2:], g[1:-1] * 0.5, rtol=1e-14)

    def test_fractional_closed_form(self):
        g = autocovariance(FI, 10)
        assert g.method == "closed_form"
        for k, v in FI_GAMMA.items():
            assert g.gamma[k] == pytest.approx(v, rel=1e-13)
        assert g.gamma[1] / g.gamma[0] == pytest.approx(1 / 3, rel=1e-14)

    def test_fractional_convolution_cross_check(self):
        trunc = 100_000
        conv = autocovariance(FI, 5, trunc=trunc, method="psi_convolution")
        closed = autocovariance(FI, 5).gamma
        err = np.abs(conv.gamma - closed)
        assert np.all(err <= conv.error_bound * 1.01)
        assert conv.error_bound < 1e-2

    def test_arma_convolution_cross_check(self):
        conv = autocovariance(ARMA11, 20, trunc=200, method="psi_convolution")
        np.testing.assert_allclose(conv.gamma, autocovariance(ARMA11, 20).gamma, rtol=1e-13)

    def test_split_arfima_against_convolution(self):
        spec = ProcessSpec.arfima(0.2, ar=[0.4], ma=[0.3])
        split = autocovariance(spec, 30)
        assert split.method == "split"
        conv = autocovariance(spec, 30, trunc=400_000, method="psi_convolution")
        assert np.max(np.abs(split.gamma - conv.gamma)) <= conv.error_bound * 1.01

    def test_tolerance_raises(self):
        with pytest.raises(TruncationInsufficient):
            autocovariance(FI, 5, trunc=100, method="psi_convolution", tol=1e-10)

    def test_require(self):
        g = autocovariance(MA1, 4)
        with pytest.raises(TruncationInsufficient):
            g.require(5)

    @pytest.mark.parametrize("spec", [AR1, MA1, ARMA11, FI,
                                      ProcessSpec.arfima(0.4, ar=[-0.5], ma=[0.6])])
    def test_positive_definite_and_bounded(self, spec):
        g = autocovariance(spec, 300).gamma
        assert g[0] > 0
        assert np.all(np.abs(g) <= g[0] * (1 + 1e-14))
        _, v = levinson_durbin(g, 300)
        assert np.all(v > 0)


class TestWeightedNorm:
    def test_white_noise(self):
        assert weighted_norm(ma_inf_coeffs(ProcessSpec.white_noise(), 5), 0) == 1.0

    def test_ma1_psi(self):
        assert weighted_norm(ma_inf_coeffs(MA1, 5), 0) == pytest.approx(1.5)

    def test_ma1_phi(self):
        assert weighted_norm(ar_inf_coeffs(MA1, 60), 0) == pytest.approx(2.0, rel=1e-12)

    def test_ma1_phi_short_truncation_uses_tail(self):
        assert weighted_norm(ar_inf_coeffs(MA1, 8), 0) == pytest.approx(2.0, rel=1e-12)

    def test_weighted_geometric(self):
        # sum (1+j) 0.5^j = 1/(1-0.5)^2 = 4
        assert weighted_norm(ar_inf_coeffs(MA1, 10), 1.0) == pytest.approx(4.0, rel=1e-10)

    def test_divergent(self):
        with pytest.raises(DivergentNorm):
            weighted_norm(ma_inf_coeffs(FI, 100), 0.0)
        with pytest.raises(DivergentNorm):
            weighted_norm(ar_inf_coeffs(FI, 100), 0.25)

    def test_fractional_phi_norm(self):
        # |1 - z|^d at z = 1 gives sum_{j>=1} |phi_j| = 1
        assert weighted_norm(ar_inf_coeffs(FI, 10_000), 0.0) == pytest.approx(2.0, rel=1e-4)


class TestLongMemoryAsymptotics:
    def test_psi_ratio(self):
        j = 10_000
        psi = ma_inf_coeffs(FI, j + 1).values[j]
        assert psi / (j ** (0.25 - 1) / special.gamma(0.25)) == pytest.approx(1.0, rel=0.02)

    def test_phi_ratio(self):
        j, d = 10_000, 0.25
        phi = ar_inf_coeffs(FI, j + 1).values[j]
        scaled = abs(phi) * j ** (1 + d) * math.pi / (d * math.sin(math.pi * d))
        assert scaled == pytest.approx(special.gamma(d), rel=0.02)

    def test_extensions_agree_at_integers(self):
        x = np.arange(3, 40, dtype=float)
        np.testing.assert_allclose(psi_at(FI, x), ma_inf_coeffs(FI, 40).values[3:], rtol=1e-12)
        np.testing.assert_allclose(phi_at(FI, x), ar_inf_coeffs(FI, 40).values[3:], rtol=1e-12)

    def test_frac_coeff_helpers(self):
        np.testing.assert_allclose(np.convolve(frac_ma_coeffs(0.3, 50), frac_diff_coeffs(0.3, 50))[:50],
                                   np.eye(1, 50).ravel(), atol=1e-14)


class TestSpecValidation:
    def test_root_on_circle(self):
        with pytest.raises(InvalidRoots):
            ProcessSpec.arma(ar=[1.0])
        with pytest.raises(InvalidRoots):
            ProcessSpec.arma(ma=[-1.0])

    def test_bad_d(self):
        with pytest.raises(ValueError):
            ProcessSpec.arfima(0.5)
        with pytest.raises(ValueError):
            ProcessSpec("arma", d=0.2)

    def test_sigma2(self):
        with pytest.raises(ValueError):
            ProcessSpec.white_noise(0.0)

    def test_memory(self):
        assert FI.memory.is_long and FI.memory.d == 0.25
        assert not ARMA11.memory.is_long

    @pytest.mark.parametrize("spec", [AR1, FI, ProcessSpec.raw_ma([0.2]), ProcessSpec.white_noise(3.0),
                                      ProcessSpec.arma(ar=[0.1], alpha=2.0)])
    def test_json_round_trip(self, spec):
        assert ProcessSpec.from_json(spec.to_json()) == spec

    def test_json_document(self):
        spec = ProcessSpec.from_json('{"kind": "arfima", "ar": [], "d": 0.25, "ma": [], "sigma2": 1.0}')
        assert spec == FI

    def test_unknown_field(self):
        with pytest.raises(ValueError):
            ProcessSpec.from_dict({"kind": "arma", "foo": 1})


def test_geometric_tail_bound_consistent():
    seq = ar_inf_coeffs(MA1, 10)
    assert seq.tail_model == TailModel("geometric", 0.5)
    exact = sum(0.5 ** j for j in range(10, 200))
    assert seq.tail_bound == pytest.approx(exact, rel=1e-12)
    assert seq.abs_tail(3) == pytest.approx(0.25, rel=1e-12)


def test_coeffseq_tail_constant_polynomial():
    seq = CoeffSeq(np.arange(1, 101, dtype=float) ** -2.0, TailModel("polynomial", 2.0))
    # values[j] j^2 = (j/(j+1))^2 increases, so the sup over the trailing half is at j = 99
    assert seq.tail_constant() == pytest.approx(0.99 ** 2, rel=1e-14)
