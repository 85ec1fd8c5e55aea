"""Tests for SU(2,1) geometry on the Siegel domain and the ball."""

import cmath
import math

import numpy as np
import pytest

from tracekit.errors import DomainError
from tracekit.geometry import (
    OMEGA,
    BallPoint,
    HyperbolicElement,
    SiegelPoint,
    act,
    automorphy,
    cayley,
    cayley_inv,
    hyperbolic_element,
    lie_algebra_projection,
    point_pair,
    random_ball_point,
    random_group_element,
    random_siegel_point,
    rho,
    rho_pair,
    rotation_about_base,
    su21_check,
    unipotent,
)


class TestMembership:
    def test_identity(self):
        m = su21_check(np.eye(3))
        assert m.ok and m.form_deviation == 0 and m.det_deviation == 0

    def test_diagonal_normal_form(self):
        e = cmath.exp(1j * math.pi / 3)
        assert su21_check(np.diag([2 * e, e**-2, 0.5 * e])).ok

    def test_non_member(self):
        m = su21_check(np.diag([2.0, 1.0, 1.0]))
        assert not m.ok
        assert m.form_deviation > 0 and m.det_deviation > 0

    def test_hyperbolic_elements_exact(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            h = HyperbolicElement(rng.uniform(1.01, 5), rng.uniform(0, 2 * math.pi))
            m = su21_check(h.matrix())
            assert m.form_deviation <= 1e-14 and m.det_deviation <= 1e-14
            np.testing.assert_allclose(h.norm, h.mu**2)

    def test_hyperbolic_needs_mu_above_one(self):
        with pytest.raises(DomainError):
            HyperbolicElement(1.0, 0.0)

    def test_random_elements(self):
        for seed in range(50):
            m = su21_check(random_group_element(seed))
            assert m.form_deviation <= 1e-12 and m.det_deviation <= 1e-12

    def test_zero_algebra_element(self):
        np.testing.assert_allclose(lie_algebra_projection(np.zeros((3, 3))), 0)

    def test_distinct_seeds(self):
        assert not np.allclose(random_group_element(1), random_group_element(2))

    def test_unipotent(self):
        np.testing.assert_allclose(unipotent(0, 0), np.eye(3))
        assert su21_check(unipotent(1 + 1j, 2.0)).ok
        prod = unipotent(1 + 1j, 2.0) @ unipotent(-0.5j, -1.0)
        np.testing.assert_allclose(np.tril(prod, -1), 0, atol=1e-15)


class TestPointPair:
    def test_rho_pair_examples(self):
        assert rho_pair(SiegelPoint(0.5, 0), SiegelPoint(0.5, 0)) == 1
        assert rho_pair(SiegelPoint(1, 0), SiegelPoint(0.5, 0)) == 1.5
        assert rho_pair(SiegelPoint(1, 1), SiegelPoint(1, 1)) == 1

    def test_self_pair_is_rho(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            Z = random_siegel_point(rng)
            np.testing.assert_allclose(rho_pair(Z, Z), rho(Z), rtol=1e-14)
            assert abs(rho_pair(Z, Z).imag) <= 1e-14 * rho(Z)

    def test_coincident(self):
        p = point_pair(SiegelPoint(0.5, 0), SiegelPoint(0.5, 0))
        assert p.sigma == 1 and p.u == 0 and p.delta == 1 and p.h(0.5) == 1

    def test_simple_pair(self):
        p = point_pair(SiegelPoint(1, 0), SiegelPoint(0.5, 0))
        np.testing.assert_allclose([p.sigma, p.u], [1.125, 0.125], rtol=1e-15)

    def test_sigma_at_least_one(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            p = point_pair(random_siegel_point(rng), random_siegel_point(rng))
            assert p.sigma > 1
            np.testing.assert_allclose(abs(p.h(1)), 1, rtol=1e-14)

    def test_outside_domain(self):
        with pytest.raises(DomainError):
            point_pair(SiegelPoint(0.1, 1.0), SiegelPoint(0.5, 0))

    def test_invariance_under_group(self):
        rng = np.random.default_rng(42)
        Z, Zp = random_siegel_point(rng), random_siegel_point(rng)
        u0 = point_pair(Z, Zp).u
        for seed in range(100):
            g = random_group_element(seed)
            u1 = point_pair(act(g, Z), act(g, Zp)).u
            assert abs(u1 - u0) <= 1e-10


class TestAutomorphy:
    def test_identity(self):
        j, J = automorphy(np.eye(3), SiegelPoint(1 + 2j, 0.3))
        assert j == 1 and J == 1

    def test_rotation_fixed_point(self):
        base = SiegelPoint(-OMEGA, 0)
        for theta in (0.3, 1.1, 2.5):
            g = rotation_about_base(theta)
            assert su21_check(g).ok
            fixed = act(g, base)
            np.testing.assert_allclose([fixed.z1, fixed.z2], [base.z1, base.z2], atol=1e-14)
            np.testing.assert_allclose(automorphy(g, base)[1], cmath.exp(1j * theta), atol=1e-14)

    def test_cocycle(self):
        rng = np.random.default_rng(42)
        for seed in range(30):
            g1, g2 = random_group_element(2 * seed), random_group_element(2 * seed + 1)
            Z = random_siegel_point(rng)
            lhs = automorphy(g1 @ g2, Z)[1]
            rhs = automorphy(g1, act(g2, Z))[1] * automorphy(g2, Z)[1]
            assert abs(lhs - rhs) <= 1e-12

    def test_unipotent_action(self):
        Zp = SiegelPoint(2 + 1j, 0.5)
        W = act(unipotent(1, 0), Zp)
        np.testing.assert_allclose([W.z1, W.z2], [Zp.z1 + Zp.z2 + 0.5, Zp.z2 + 1], atol=1e-15)


class TestCayley:
    def test_origin(self):
        Z = cayley(BallPoint(0, 0))
        np.testing.assert_allclose(Z.z1, 0.5 - 0.8660254037844386j, atol=1e-15)
        np.testing.assert_allclose(rho(Z), 1.0, atol=1e-15)

    def test_round_trip(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            W = random_ball_point(rng)
            Z = cayley(W).check()
            back = cayley_inv(Z)
            assert abs(back.w1 - W.w1) <= 1e-12 and abs(back.w2 - W.w2) <= 1e-12

    def test_boundary_limit(self):
        rhos = [rho(cayley(BallPoint(0, t))) for t in (0.9, 0.99, 0.999)]
        assert rhos[0] > rhos[1] > rhos[2] > 0
        assert rhos[2] < 1e-2

    def test_matrix_is_member_after_conjugation(self):
        g = rotation_about_base(0.7)
        m = su21_check(g)
        assert m.form_deviation <= 1e-12
