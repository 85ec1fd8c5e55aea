"""Tests for synthetic spectra, orbital terms and the geometric side."""

import dataclasses
import json
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tracekit.common import TruncationConfig
from tracekit.errors import C2Invalid, DegenerateDenominator, SpectrumError, TailUnbounded
from tracekit.spectrum import (
    ConjugacyClassTerm,
    PrimitivePair,
    SpectrumModel,
    choose_m_max,
    formulation_check,
    geometric_side,
    hyperbolic_sum,
    hyperbolic_term,
    load_spectrum,
    oracle_orbital_integral,
    parse_spectrum,
    poincare_halfdet,
    poincare_halfdet_exp,
    poincare_halfdet_literal,
    poincare_halfdet_matrix,
)
from tracekit.transforms import bump_kernel, change_variable_to_g, forward_transform, rational_pair

STD = (1.5, 2.0, 2.5, 3.0)


def three_pairs(c2=3):
    return SpectrumModel(c2, (PrimitivePair(math.e**2, 1), PrimitivePair(3.0, 3),
                              PrimitivePair(5.0, 2)))


class TestHalfDet:
    def test_example(self):
        np.testing.assert_allclose(poincare_halfdet(4.0, 0.0), 0.75, rtol=1e-15)

    def test_degenerate(self):
        with pytest.raises(DegenerateDenominator):
            poincare_halfdet(1.0, 0.3)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(1.1, 1e4), st.floats(-7, 7))
    def test_forms_agree(self, N, theta):
        a = poincare_halfdet(N, theta)
        np.testing.assert_allclose(poincare_halfdet_literal(N, theta), a, rtol=1e-12)
        np.testing.assert_allclose(poincare_halfdet_exp(0.5 * math.log(N), theta), a, rtol=1e-12)
        np.testing.assert_allclose(poincare_halfdet_matrix(N, theta), a, rtol=1e-11)

    @pytest.mark.parametrize("N,theta", [(1 + 1e-6, 0.0), (1.001, 1e-4), (1.01, 2 * math.pi / 3),
                                         (50.0, 0.7)])
    def test_against_mpmath(self, N, theta):
        with mp.workdps(40):
            Nm, t = mp.mpf(N), mp.mpf(theta)
            ph = mp.expj(3 * t / 2)
            ref = (mp.sqrt(Nm) - 1 / mp.sqrt(Nm)) * abs(Nm ** 0.25 * ph - Nm ** -0.25 / ph) ** 2
        np.testing.assert_allclose(poincare_halfdet(N, theta), float(ref), rtol=1e-13)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(1.001, 1e4), st.floats(-7, 7))
    def test_phase_lower_bound(self, N, theta):
        lower = (N**0.25 - N**-0.25) ** 2 * (math.sqrt(N) - 1 / math.sqrt(N))
        assert poincare_halfdet(N, theta) >= lower * (1 - 1e-12)


class TestHyperbolicTerm:
    def test_denominator_example(self):
        pair = PrimitivePair(math.e**2, 1)
        np.testing.assert_allclose(poincare_halfdet(pair.norm, pair.theta2), 2.55291, rtol=1e-5)
        val = hyperbolic_term(0, ConjugacyClassTerm(pair, 1, 1), lambda eta: 1.0)
        np.testing.assert_allclose(val, 12 * math.pi / poincare_halfdet(pair.norm, 2 * math.pi))

    def test_zero_g(self):
        term = ConjugacyClassTerm(PrimitivePair(3.0, 3), 2, 1)
        assert hyperbolic_term(1, term, lambda eta: 0.0) == 0

    def test_weight_zero_is_real(self):
        g = rational_pair(STD, 0).g
        for t in three_pairs().terms(3):
            assert abs(hyperbolic_term(0, t, g).imag) <= 1e-12

    def test_ord2_one_ignores_weight(self):
        g = rational_pair(STD, 0).g
        t = ConjugacyClassTerm(PrimitivePair(3.0, 1), 2, 1)
        np.testing.assert_allclose(hyperbolic_term(0, t, g), hyperbolic_term(1, t, g), rtol=1e-14)

    @pytest.mark.parametrize("ord2", [1, 2])
    def test_small_orders_finite(self, ord2):
        p = PrimitivePair(1.01, ord2)
        for q in range(1, ord2 + 1):
            assert math.isfinite(abs(hyperbolic_term(0.5, ConjugacyClassTerm(p, 1, q), lambda e: 1.0)))

    def test_formulations_per_term(self):
        g = rational_pair(STD, 1).g
        for t in three_pairs().terms(4):
            np.testing.assert_allclose(hyperbolic_term(1, t, g, "poincare"), hyperbolic_term(1, t, g),
                                       rtol=1e-12)

    def test_term_validation(self):
        with pytest.raises(ValueError):
            ConjugacyClassTerm(PrimitivePair(3.0, 3), 0, 1)
        with pytest.raises(ValueError):
            ConjugacyClassTerm(PrimitivePair(3.0, 3), 1, 4)


class TestOrbitalOracle:
    @pytest.mark.parametrize("k,ord2", [(0, 1), (0, 3), (1, 3)])
    def test_matches_closed_form(self, k, ord2):
        K = bump_kernel()
        pair = PrimitivePair(4.0, ord2)
        g = change_variable_to_g(forward_transform(k, K))
        got = oracle_orbital_integral(k, pair, 1, 1, K)
        want = hyperbolic_term(k, ConjugacyClassTerm(pair, 1, 1), g)
        np.testing.assert_allclose(got, want, rtol=1e-6)

    def test_second_power_and_rotation(self):
        K = bump_kernel()
        pair = PrimitivePair(2.0, 4)
        g = change_variable_to_g(forward_transform(1, K))
        got = oracle_orbital_integral(1, pair, 2, 3, K)
        want = hyperbolic_term(1, ConjugacyClassTerm(pair, 2, 3), g)
        np.testing.assert_allclose(got, want, rtol=1e-6)

    def test_support_below_threshold(self):
        K = bump_kernel(0.5)
        pair = PrimitivePair(16.0, 1)
        g = change_variable_to_g(forward_transform(0, K))
        assert oracle_orbital_integral(0, pair, 1, 1, K) == 0
        assert hyperbolic_term(0, ConjugacyClassTerm(pair, 1, 1), g) == 0


class TestGeometricSide:
    @pytest.mark.parametrize("k", [0, 0.5, 1])
    def test_formulations_agree(self, k):
        assert formulation_check(k, rational_pair(STD, k), three_pairs()).passed

    def test_empty_model(self):
        ch = rational_pair(STD, 0)
        side = geometric_side(0, ch, SpectrumModel(3, ()))
        assert side.hyperbolic == 0 and side.value == side.identity

    def test_c2_changes_identity_only(self):
        ch = rational_pair(STD, 0)
        a = geometric_side(0, ch, three_pairs(3))
        b = geometric_side(0, ch, three_pairs(6))
        assert a.hyperbolic == b.hyperbolic
        np.testing.assert_allclose(b.identity, 2 * a.identity, rtol=1e-15)

    def test_tail_recorded(self):
        side = geometric_side(0, rational_pair(STD, 0), three_pairs())
        assert 0 < side.tail.total <= 1e-10
        assert set(side.m_max.values()) <= set(range(1, 100))

    def test_tail_bound_holds(self):
        ch = rational_pair(STD, 0)
        model = three_pairs()
        auto, _, tails = hyperbolic_sum(0, ch.g, model, g_decay=ch.g_decay)
        long, _, _ = hyperbolic_sum(0, ch.g, model, trunc=TruncationConfig(m_max=60))
        assert abs(long - auto) <= tails.total

    def test_no_certificate(self):
        ch = dataclasses.replace(rational_pair(STD, 0), g_decay=None)
        with pytest.raises(TailUnbounded):
            geometric_side(0, ch, three_pairs())

    def test_compact_g_truncates_exactly(self):
        m, tail = choose_m_max(PrimitivePair(math.e, 1), None, 3.5, 1e-10)
        assert m == 3 and tail == 0


class TestLoader:
    def test_round_trip(self, tmp_path):
        f = tmp_path / "s.json"
        f.write_text(json.dumps({"c2": 6, "pairs": [{"norm": 3.0, "ord2": 3}, {"norm": 7.5, "ord2": 1}]}))
        m = load_spectrum(f)
        assert m.c2 == 6 and len(m.pairs) == 2 and m.pairs[0].ord2 == 3

    def test_duplicates_dropped(self, tmp_path):
        f = tmp_path / "s.json"
        f.write_text(json.dumps({"c2": 3, "pairs": [{"norm": 3.0, "ord2": 3}] * 2}))
        with pytest.warns(UserWarning, match="duplicate"):
            m = load_spectrum(f)
        assert len(m.pairs) == 1

    @pytest.mark.parametrize("c2", [4, 0, -3, 3.5])
    def test_bad_c2(self, c2):
        with pytest.raises((C2Invalid, SpectrumError)):
            parse_spectrum({"c2": c2, "pairs": []})

    @pytest.mark.parametrize("norm", [1.0, 0.5, -2.0, 1 + 1e-8])
    def test_bad_norm(self, norm):
        with pytest.raises(SpectrumError):
            parse_spectrum({"c2": 3, "pairs": [{"norm": norm, "ord2": 1}]})

    @pytest.mark.parametrize("doc", [[], {"c2": 3}, {"c2": 3, "pairs": [{"norm": 2.0}]},
                                     {"c2": 3, "pairs": [{"norm": "2", "ord2": 1}]},
                                     {"c2": 3, "pairs": [{"norm": 2.0, "ord2": 0}]}])
    def test_malformed(self, doc):
        with pytest.raises(SpectrumError):
            parse_spectrum(doc)

    def test_invalid_json(self, tmp_path):
        f = tmp_path / "s.json"
        f.write_text("{not json")
        with pytest.raises(SpectrumError):
            load_spectrum(f)
