"""SU(2,1) acting on the Siegel domain and the unit ball.

Points of the Siegel domain are pairs (z1, z2) with
rho(Z) = z1 + conj(z1) - |z2|^2 > 0.  Group elements are 3x3 complex
matrices preserving the Hermitian form with anti-diagonal matrix
(-1, 1, -1), acting projectively on the column (z1, z2, 1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .errors import DomainError

FORM = np.array([[0, 0, -1], [0, 1, 0], [-1, 0, 0]], dtype=complex)
OMEGA = cmath.exp(2j * math.pi / 3)
MEMBERSHIP_TOL = 1e-10

# Cayley matrix from the ball model to the Siegel model (det 1,
# C^* FORM C = diag(1, 1, -1)).
CAYLEY = np.array(
    [[-OMEGA.conjugate(), 0, -OMEGA], [0, 1, 0], [-1, 0, 1]], dtype=complex
)


@dataclass(frozen=True)
class SiegelPoint:
    z1: complex
    z2: complex

    @property
    def rho(self) -> float:
        return rho(self)

    def check(self) -> "SiegelPoint":
        if not self.rho > 0:
            raise DomainError(f"point {self} lies outside the Siegel domain")
        return self

    def vector(self) -> np.ndarray:
        return np.array([self.z1, self.z2, 1.0], dtype=complex)


@dataclass(frozen=True)
class BallPoint:
    w1: complex
    w2: complex

    def check(self) -> "BallPoint":
        if not abs(self.w1) ** 2 + abs(self.w2) ** 2 < 1:
            raise DomainError(f"point {self} lies outside the unit ball")
        return self


@dataclass(frozen=True)
class HyperbolicElement:
    mu: float
    theta: float

    def __post_init__(self):
        if not self.mu > 1:
            raise DomainError("hyperbolic elements need mu > 1")

    @property
    def norm(self) -> float:
        return self.mu**2

    def matrix(self) -> np.ndarray:
        return hyperbolic_element(self.mu, self.theta)


class Membership(NamedTuple):
    ok: bool
    form_deviation: float
    det_deviation: float


class PointPair(NamedTuple):
    sigma: float
    u: float
    delta: float
    phase: complex  # rho(Z, Z') / |rho(Z, Z')|

    def h(self, k: float) -> complex:
        """H_k = phase**(2k)."""
        return self.phase ** (2 * k)


def su21_check(g, tol: float = MEMBERSHIP_TOL) -> Membership:
    g = np.asarray(g, dtype=complex)
    if g.shape != (3, 3):
        return Membership(False, math.inf, math.inf)
    form_dev = float(np.max(np.abs(g.conj().T @ FORM @ g - FORM)))
    det_dev = float(abs(np.linalg.det(g) - 1))
    return Membership(form_dev <= tol and det_dev <= tol, form_dev, det_dev)


def rho(Z: SiegelPoint) -> float:
    return 2.0 * complex(Z.z1).real - abs(Z.z2) ** 2


def rho_pair(Z: SiegelPoint, Zp: SiegelPoint) -> complex:
    return complex(Z.z1).conjugate() + Zp.z1 - complex(Z.z2).conjugate() * Zp.z2


def point_pair(Z: SiegelPoint, Zp: SiegelPoint) -> PointPair:
    r, rp = rho(Z), rho(Zp)
    if r <= 0 or rp <= 0:
        raise DomainError("point-pair invariant needs both points in the Siegel domain")
    cross = rho_pair(Z, Zp)
    sigma = abs(cross) ** 2 / (r * rp)
    phase = cross / abs(cross)
    return PointPair(sigma, sigma - 1.0, 0.5 * (sigma + 1.0), phase)


def act(g, Z: SiegelPoint) -> SiegelPoint:
    v = np.asarray(g, dtype=complex) @ Z.vector()
    return SiegelPoint(complex(v[0] / v[2]), complex(v[1] / v[2]))


def automorphy(g, Z: SiegelPoint) -> tuple[complex, complex]:
    """Return (j, J) with j = c1 z1 + c2 z2 + c3 and J = j/|j|."""
    g = np.asarray(g, dtype=complex)
    j = complex(g[2, 0] * Z.z1 + g[2, 1] * Z.z2 + g[2, 2])
    if j == 0:
        raise DomainError("automorphy factor vanished: group invariant breached")
    return j, j / abs(j)


def cayley(W: BallPoint) -> SiegelPoint:
    denom = 1 - W.w1
    return SiegelPoint(
        complex((-OMEGA.conjugate() * W.w1 - OMEGA) / denom), complex(W.w2 / denom)
    )


def cayley_inv(Z: SiegelPoint) -> BallPoint:
    denom = Z.z1 - OMEGA.conjugate()
    return BallPoint(complex((Z.z1 + OMEGA) / denom), complex(Z.z2 / denom))


def unipotent(a: complex, b: float) -> np.ndarray:
    a = complex(a)
    return np.array(
        [[1, a, abs(a) ** 2 / 2 + 1j * b], [0, 1, a.conjugate()], [0, 0, 1]],
        dtype=complex,
    )


def hyperbolic_element(mu: float, theta: float) -> np.ndarray:
    e = cmath.exp(1j * theta)
    return np.diag([mu * e, e ** (-2), e / mu]).astype(complex)


def rotation_about_base(theta: float) -> np.ndarray:
    """Element of the maximal compact subgroup fixing (-omega, 0).

    Conjugate of diag(e^{i theta}, e^{-2i theta}, e^{i theta}) by the Cayley
    matrix; its automorphy factor at the fixed point is e^{i theta}.
    """
    e = cmath.exp(1j * theta)
    k = np.diag([e, e ** (-2), e])
    return CAYLEY @ k @ np.linalg.inv(CAYLEY)


def lie_algebra_projection(X) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    Y = 0.5 * (X - FORM @ X.conj().T @ FORM)
    return Y - np.trace(Y) / 3 * np.eye(3)


def random_group_element(seed=None, scale: float = 1.0) -> np.ndarray:
    """exp(X) for a random X in the Lie algebra of SU(2,1)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    X = rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3))
    return expm(scale * lie_algebra_projection(X))


def random_siegel_point(rng: np.random.Generator, rho_range=(0.3, 3.0)) -> SiegelPoint:
    r = rng.uniform(*rho_range)
    z2 = complex(rng.normal(), rng.normal()) * 0.7
    t = rng.normal()
    return SiegelPoint(complex(0.5 * (r + abs(z2) ** 2), t), z2)


def random_ball_point(rng: np.random.Generator) -> BallPoint:
    while True:
        w = rng.uniform(-1, 1, 4)
        if w @ w < 0.999:
            return BallPoint(complex(w[0], w[1]), complex(w[2], w[3]))
