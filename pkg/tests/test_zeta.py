"""Tests for the zeta product, its log-derivative and the W functions."""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tracekit.common import TailRecord, TruncationConfig
from tracekit.errors import ContourPoleClash, DomainError, ParameterOrdering, PoleProximity
from tracekit.spectrum import PrimitivePair, SpectrumModel
from tracekit.transforms import RationalTestFunction
from tracekit.zeta import (
    WParams,
    W_integral,
    W_series,
    cauchy_riemann_residual,
    cor39_identity,
    dirichlet_combination_check,
    duality_check,
    fe_parity_check,
    parity_gap,
    residue_check,
    sinpi,
    trivial_zero_multiplicity,
    trivial_zero_residue,
    w_consistency_check,
    zeta_log_deriv,
    zeta_product,
)

STD = (1.5, 2.0, 2.5, 3.0)
P = WParams(2.0, 2.5, 3.0)
Q = WParams(1.3, 2.2, 3.4)


def three_pairs():
    return SpectrumModel(3, (PrimitivePair(math.e**2, 1), PrimitivePair(3.0, 3),
                             PrimitivePair(5.0, 2)))


def log_deriv_reference(k, s, model, m_max=200):
    total = mp.mpc(0)
    for p in model.pairs:
        N = mp.mpf(p.norm)
        for q in range(1, p.ord2 + 1):
            th = 2 * mp.pi * q / p.ord2
            for m in range(1, m_max):
                Nm = N**m
                den = (mp.sqrt(Nm) - 1 / mp.sqrt(Nm)) * abs(Nm**0.25 * mp.expj(1.5 * th)
                                                            - Nm**-0.25 * mp.expj(-1.5 * th)) ** 2
                total += 3 / mp.mpf(p.ord2) * mp.log(N) * mp.expj(2 * k * th) / (den * Nm ** (s - 1))
    return complex(total)


class TestProduct:
    def test_empty_model(self):
        assert zeta_product(0, 3.0, SpectrumModel(3, ())) == 0
        assert zeta_log_deriv(0, 3.0, SpectrumModel(3, ())) == 0

    def test_against_mpmath_truncated(self):
        model = SpectrumModel(3, (PrimitivePair(3.0, 5),))
        trunc = TruncationConfig(j_max=4, l_max=4, n_max=4)
        s, k = mp.mpc(3, 0.5), 1
        ref = mp.mpc(0)
        for j in range(5):
            for l in range(5):
                for n in range(5):
                    E = 3 / mp.mpf(5) * sum(mp.expj((2 * k + 3 * (l - n)) * q * 2 * mp.pi / 5)
                                            for q in range(1, 6))
                    ref += E * mp.log(1 - mp.mpf(3) ** (-(s + j + mp.mpf(l + n) / 2)))
        np.testing.assert_allclose(zeta_product(k, 3 + 0.5j, model, trunc), complex(ref), rtol=1e-13)

    def test_j_max_convergence(self):
        model = SpectrumModel(3, (PrimitivePair(math.e**2, 1),))
        a = zeta_product(0, 5.0, model, TruncationConfig(j_max=20))
        b = zeta_product(0, 5.0, model, TruncationConfig(j_max=40))
        assert abs(a - b) < 1e-12

    def test_tail_recorded(self):
        tails = TailRecord()
        zeta_product(1, 3.0, three_pairs(), tails=tails)
        assert 0 < tails.total <= 1e-13

    def test_domain(self):
        with pytest.raises(DomainError):
            zeta_product(0, 2.0, three_pairs())
        with pytest.raises(DomainError):
            zeta_log_deriv(0, 1.5 + 3j, three_pairs())


class TestLogDerivative:
    @pytest.mark.parametrize("k", [0, 0.5, 1])
    @pytest.mark.parametrize("s", [3.0, 2.5 + 1j])
    def test_against_mpmath(self, k, s):
        model = three_pairs()
        np.testing.assert_allclose(zeta_log_deriv(k, s, model), log_deriv_reference(k, s, model),
                                   rtol=1e-12)

    def test_decays_at_infinity(self):
        vals = [abs(zeta_log_deriv(0, s, three_pairs())) for s in (5.0, 10.0, 20.0)]
        assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-8

    def test_weight_irrelevant_for_ord2_one(self):
        model = SpectrumModel(3, (PrimitivePair(math.e**2, 1),))
        np.testing.assert_allclose(zeta_log_deriv(0, 3.0, model), zeta_log_deriv(1, 3.0, model),
                                   rtol=1e-14)

    def test_vectorised(self):
        s = np.array([3.0, 4.0 + 1j])
        vals = zeta_log_deriv(0.5, s, three_pairs())
        # cutoffs follow the smallest Re s, so only the tail budget separates the two
        np.testing.assert_allclose(vals[1], zeta_log_deriv(0.5, s[1], three_pairs()), rtol=1e-10)

    @pytest.mark.parametrize("k", [0, 0.5, 1])
    @pytest.mark.parametrize("s", [3, 4, 3 + 2j])
    def test_duality(self, k, s):
        rep = duality_check(k, s, three_pairs())
        assert rep.passed, rep

    @pytest.mark.parametrize("s", [2.5 + 0.3j, 3 + 1j, 6.0])
    def test_cauchy_riemann(self, s):
        assert cauchy_riemann_residual(0.5, s, three_pairs()) <= 1e-8


class TestDirichletCombination:
    @pytest.mark.parametrize("k,ord2", [(0, 1), (0, 3), (0.5, 4), (0.5, 5), (1, 2)])
    def test_single_pair(self, k, ord2):
        model = SpectrumModel(3, (PrimitivePair(3.0, ord2),))
        rep = dirichlet_combination_check(k, model, RationalTestFunction(*STD))
        assert rep.passed and rep.rel_err <= 1e-8, rep

    @pytest.mark.parametrize("k", [0.5, 1])
    def test_order_three_cancels(self, k):
        # the rotation sum over q vanishes: both sides are zero to rounding
        model = SpectrumModel(3, (PrimitivePair(3.0, 3),))
        rep = dirichlet_combination_check(k, model, RationalTestFunction(*STD))
        assert rep.passed and abs(rep.lhs) < 1e-15 and abs(rep.rhs) < 1e-15

    def test_empty_model(self):
        rep = dirichlet_combination_check(0, SpectrumModel(3, ()), RationalTestFunction(*STD))
        assert rep.lhs == 0 and rep.rhs == 0 and rep.passed


class TestWFunctions:
    def test_params_ordering(self):
        with pytest.raises(ParameterOrdering):
            WParams(2.5, 2.0, 3.0)
        with pytest.raises(ParameterOrdering):
            WParams(0.9, 2.0, 3.0)

    @pytest.mark.parametrize("k", [0, 0.5, 1])
    def test_integral_against_mpmath(self, k):
        with mp.workdps(40):
            xi, a, b1, b2 = (mp.mpf(v) for v in ("0.7", "1.3", "2.2", "3.4"))
            # c must be exact in working precision or the r^-2 terms fail to cancel
            c = (a * a - xi * xi) / (b2 * b2 - b1 * b1)

            def f(r):
                br = (1 / (r * r + a * a) - 1 / (r * r + xi * xi)
                      + c * (1 / (r * r + b1 * b1) - 1 / (r * r + b2 * b2)))
                return (br * r * (r * r + k * k) * (mp.cosh(2 * mp.pi * r) + mp.cos(2 * k * mp.pi))
                        / mp.sinh(2 * mp.pi * r))

            head = mp.quad(f, [0, 1, 5, 50])
            # beyond R = 50 the hyperbolic factor is 1 to ~1e-270; the rational part
            # integrates in closed form since both sum(w) and sum(w a^2) vanish
            R = 50
            terms = ((1, a), (-1, xi), (c, b1), (-c, b2))
            tail = -sum(w * (k * k - p * p) / 2 * mp.log(1 + p * p / R**2) for w, p in terms)
            ref = 2 * (head + tail)
        np.testing.assert_allclose(W_integral(k, 0.7, Q), float(ref), rtol=1e-9)

    @pytest.mark.parametrize("k", [0, 0.5, 1])
    @pytest.mark.parametrize("xi", [0.3, 0.7, 1.2, 0.9 + 0.4j])
    @pytest.mark.parametrize("p", [P, Q])
    def test_series_matches_integral(self, k, xi, p):
        assert w_consistency_check(k, xi, p).passed

    def test_xi_equal_alpha2(self):
        assert abs(W_integral(0, 1.3, Q)) <= 1e-14

    def test_conjugation(self):
        xi = 0.8 + 0.3j
        np.testing.assert_allclose(W_integral(1, xi.conjugate(), Q), np.conj(W_integral(1, xi, Q)), atol=1e-10)
        np.testing.assert_allclose(W_series(1, xi.conjugate(), Q), np.conj(W_series(1, xi, Q)), atol=1e-10)

    def test_strip(self):
        with pytest.raises(DomainError):
            W_integral(0, 2.3, Q)
        with pytest.raises(DomainError):
            W_integral(0, -0.3, Q)

    @pytest.mark.parametrize("k,xi", [(0, 1.02), (0, -2.0), (1, 0.01), (0.5, 0.52), (0.5, -1.5)])
    def test_pole_proximity(self, k, xi):
        with pytest.raises(PoleProximity):
            W_series(k, xi, Q)

    def test_tail_correction(self):
        a = W_series(0, 0.7, Q, TruncationConfig(sum_k_max=100))
        b = W_series(0, 0.7, Q, TruncationConfig(sum_k_max=20_000))
        np.testing.assert_allclose(a, b, rtol=1e-13)

    def test_lattice_parameter_regularised(self):
        # alpha2 = 2 lies on the integer lattice; the continued value stays analytic
        np.testing.assert_allclose(W_series(0, 0.7, P), W_integral(0, 0.7, P), atol=1e-9)

    def test_tail_reported(self):
        tails = TailRecord()
        W_series(1, 0.4, Q, tails=tails)
        assert tails.total <= 1e-13


class TestParity:
    def test_zero_gap_at_half(self):
        rep = fe_parity_check(0, 0.5, P)
        assert rep.lhs == 0 and rep.rhs == 0 and rep.passed

    def test_half_weight_quarter(self):
        np.testing.assert_allclose(parity_gap(0.5, 0.25), 2 * math.pi * 0.1875, rtol=1e-15)
        assert fe_parity_check(0.5, 0.25, P).passed

    @pytest.mark.parametrize("k,xi", [(0, 0.3), (1, 0.3), (0.5, 0.7), (1, 1.3 + 0.2j)])
    def test_gap(self, k, xi):
        assert fe_parity_check(k, xi, Q).passed

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.06, 0.44), st.sampled_from([0, 0.5, 1]))
    def test_gap_antisymmetric(self, xi, k):
        np.testing.assert_allclose(parity_gap(k, -xi), -parity_gap(k, xi), atol=1e-10)

    def test_sinpi_exact(self):
        np.testing.assert_array_equal(sinpi(np.array([0.0, 0.5, 1.0, 1.5, -0.5, 2.0])),
                                      [0.0, 1.0, 0.0, -1.0, -1.0, 0.0])


class TestTrivialZeros:
    @pytest.mark.parametrize("m", [0, 1, 2, 3])
    @pytest.mark.parametrize("c2", [3, 6])
    def test_weight_zero(self, m, c2):
        r = trivial_zero_residue(0, m, c2)
        np.testing.assert_allclose(abs(r), trivial_zero_multiplicity(0, m, c2), rtol=1e-6)
        assert r.real < 0

    @pytest.mark.parametrize("m", [1, 2, 3])
    @pytest.mark.parametrize("c2", [3, 6])
    def test_half_weight(self, m, c2):
        r = trivial_zero_residue(0.5, m, c2)
        np.testing.assert_allclose(abs(r), trivial_zero_multiplicity(0.5, m, c2), rtol=1e-6)

    def test_half_weight_no_zero_at_half(self):
        assert abs(trivial_zero_residue(0.5, 0, 3)) <= 1e-12

    @pytest.mark.parametrize("m", [0, 1, 2, 3])
    def test_weight_one_residue_value(self, m):
        # the lattice weight k^3 - k of the weight-one series gives (8/3) c2 m (m+1)(m+2)
        r = trivial_zero_residue(1, m, 3)
        np.testing.assert_allclose(r.real, -8 * m * (m + 1) * (m + 2), atol=1e-9)

    def test_multiplicity_formulas(self):
        assert trivial_zero_multiplicity(0, 2, 3) == 216
        assert trivial_zero_multiplicity(0.5, 2, 3) == 120
        assert trivial_zero_multiplicity(1, 0, 3) == 8

    def test_contour_clash(self):
        with pytest.raises(ContourPoleClash):
            trivial_zero_residue(0, 1, 3, radius=0.97)

    def test_report_sign_note(self):
        rep = residue_check(0, 1, 3)
        assert rep.passed and "negative" in rep.note


class TestIntegrationByParts:
    @pytest.mark.parametrize("x", [0.25, 0.5, 0.75, 0.95])
    def test_identity(self, x):
        assert cor39_identity(x).passed

    def test_small_x(self):
        rep = cor39_identity(0.02)
        assert abs(rep.lhs) < 1e-5 and rep.passed

    def test_domain(self):
        with pytest.raises(DomainError):
            cor39_identity(0.995)
