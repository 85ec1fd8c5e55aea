"""Tests for the adaptive quadrature engine."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tracekit.errors import MaxSubdivisions, StepUnderflow, UncertifiedTail
from tracekit.quadrature import (
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    ContourSpec,
    Decay,
    QuadConfig,
    contour_integral,
    differentiate,
    gauss_legendre,
    integrate_1d,
    integrate_nd,
    neumaier_sum,
)


class TestRule:
    def test_kronrod_exact_to_degree_23(self):
        for p in range(24):
            exact = (1 - (-1) ** (p + 1)) / (p + 1)
            np.testing.assert_allclose(KRONROD_WEIGHTS @ NODES**p, exact, atol=1e-14)

    def test_gauss_exact_to_degree_13(self):
        for p in range(14):
            exact = (1 - (-1) ** (p + 1)) / (p + 1)
            np.testing.assert_allclose(GAUSS_WEIGHTS @ NODES**p, exact, atol=1e-14)

    def test_gauss_legendre_unit_interval(self):
        x, w = gauss_legendre(12)
        np.testing.assert_allclose(w.sum(), 1.0, rtol=1e-15)
        np.testing.assert_allclose(w @ x**5, 1 / 6, rtol=1e-14)


class TestIntegrate1D:
    def test_exponential_semi_infinite(self):
        cfg = QuadConfig(abs_tol=1e-13, rel_tol=1e-13)
        res = integrate_1d(lambda u: np.exp(-u), (0, math.inf), cfg,
                           decay=Decay("exp", 1.0, 1.0))
        np.testing.assert_allclose(res.value, 1.0, atol=1e-12)
        assert res.error >= abs(res.value - 1.0)

    def test_declared_sqrt_singularity(self):
        res = integrate_1d(lambda x: 1 / np.sqrt(1 - x), (0, 1), singular="right")
        np.testing.assert_allclose(res.value, 2.0, atol=1e-12)

    def test_uncertified_tail_refused(self):
        with pytest.raises(UncertifiedTail):
            integrate_1d(lambda u: np.exp(-u), (0, math.inf))

    def test_full_line_gaussian(self):
        res = integrate_1d(lambda x: np.exp(-x * x), (-math.inf, math.inf),
                           decay=Decay("exp", 1.0, math.e ** 0.25))
        np.testing.assert_allclose(res.value, math.sqrt(math.pi), atol=1e-10)

    def test_power_decay_tail(self):
        res = integrate_1d(lambda x: 1 / (1 + x) ** 3, (0, math.inf),
                           QuadConfig(abs_tol=1e-11), decay=Decay("power", 3.0, 1.0))
        np.testing.assert_allclose(res.value, 0.5, atol=1e-10)

    def test_reversed_interval(self):
        res = integrate_1d(np.cos, (1.0, 0.0))
        np.testing.assert_allclose(res.value, -math.sin(1.0), atol=1e-13)

    def test_complex_integrand(self):
        res = integrate_1d(lambda x: np.exp(1j * x), (0, math.pi))
        np.testing.assert_allclose(res.value, 2j, atol=1e-12)

    def test_max_subdivisions(self):
        with pytest.raises(MaxSubdivisions):
            integrate_1d(lambda x: np.sin(1 / np.maximum(x, 1e-300)), (0, 1),
                         QuadConfig(abs_tol=1e-14, rel_tol=1e-14, max_subdivisions=50))

    def test_deterministic(self):
        f = lambda x: np.exp(-x) * np.cos(5 * x)
        a = integrate_1d(f, (0, 7)).value
        b = integrate_1d(f, (0, 7)).value
        assert a == b

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.1, 5.0), st.floats(0.1, 5.0))
    def test_error_estimate_bounds_truth(self, a, w):
        res = integrate_1d(lambda x: np.exp(-a * x), (0, w))
        exact = -math.expm1(-a * w) / a
        assert abs(res.value - exact) <= max(res.error, 1e-15)


class TestIntegrateND:
    def test_unit_square(self):
        res = integrate_nd(lambda x, y: np.ones_like(y), [(0, 1), (0, 1)])
        np.testing.assert_allclose(res.value, 1.0, atol=1e-14)

    def test_separable_exponential(self):
        d = Decay("exp", 1.0, 1.0)
        res = integrate_nd(lambda u, v: np.exp(-u - v), [(0, math.inf, d), (0, math.inf, d)])
        np.testing.assert_allclose(res.value, 1.0, atol=1e-9)

    def test_triangle_with_callable_bounds(self):
        res = integrate_nd(lambda x, y: x + y, [(0, 1), (0, lambda x: x)])
        np.testing.assert_allclose(res.value, 0.5, atol=1e-13)

    def test_three_dimensions(self):
        res = integrate_nd(lambda x, y, z: x * y * z, [(0, 1), (0, 2), (0, 3)])
        np.testing.assert_allclose(res.value, 0.5 * 2 * 4.5, rtol=1e-12)


class TestContour:
    def test_simple_pole(self):
        res = contour_integral(lambda z: 1 / z, ContourSpec(0, 1.0))
        np.testing.assert_allclose(res.value, 1.0, atol=1e-13)

    def test_constant(self):
        res = contour_integral(lambda z: np.ones_like(z), ContourSpec(0.3, 0.5))
        np.testing.assert_allclose(res.value, 0.0, atol=1e-15)

    def test_doubling_nodes(self):
        f = lambda z: np.exp(z) / (z - 0.1) ** 2
        a = contour_integral(f, ContourSpec(0, 0.5, 128)).value
        b = contour_integral(f, ContourSpec(0, 0.5, 256)).value
        assert abs(a - b) < 1e-12
        np.testing.assert_allclose(b, math.exp(0.1), rtol=1e-12)

    def test_node_validation(self):
        with pytest.raises(ValueError):
            ContourSpec(0, 1, 100)
        with pytest.raises(ValueError):
            ContourSpec(0, 1, 32)


class TestDifferentiate:
    def test_cubic(self):
        res = differentiate(lambda x: x**3, 2.0, 1)
        np.testing.assert_allclose(res.value, 12.0, atol=1e-9)

    def test_second_derivative_sin(self):
        res = differentiate(np.sin, 0.0, 2)
        np.testing.assert_allclose(res.value, 0.0, atol=1e-7)

    def test_forward_stencil(self):
        res = differentiate(np.exp, 0.0, 2, h=1e-2, levels=3, side="forward")
        np.testing.assert_allclose(res.value, 1.0, atol=1e-7)

    def test_step_underflow(self):
        with pytest.raises(StepUnderflow):
            differentiate(np.sin, 0.0, 1, h=1e-7)


class TestCompensatedSum:
    def test_cancellation(self):
        vals = np.array([1e16, 1.0, -1e16, 1.0])
        assert neumaier_sum(vals) == 2.0
