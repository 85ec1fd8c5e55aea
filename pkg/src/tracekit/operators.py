"""The weight-k Laplacian, radial eigenfunctions and ODE residual checks."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import DomainError, NonConvergent, PoleAtC, StepUnderflow
from .geometry import SiegelPoint, rho
from .quadrature import differentiate

SERIES_RADIUS = 0.95
# transformed argument 1/sigma; admits sigma > 1.031
CONTINUATION_RADIUS = 0.97


@dataclass(frozen=True)
class Weight:
    """Weight k stored as the integer 2k."""

    two_k: int

    def __post_init__(self):
        if self.two_k < 0:
            raise ValueError("negative weights are not supported")

    @property
    def k(self) -> float:
        return self.two_k / 2

    @property
    def explicit_inversion(self) -> bool:
        return self.two_k in (0, 1, 2)

    def __str__(self):
        return str(Fraction(self.two_k, 2))


def as_weight(k) -> Weight:
    if isinstance(k, Weight):
        return k
    if isinstance(k, str):
        k = float(Fraction(k))
    two_k = 2 * float(k)
    if abs(two_k - round(two_k)) > 1e-12:
        raise ValueError(f"2k must be an integer, got k={k}")
    return Weight(int(round(two_k)))


def explicit_weight(k) -> Weight:
    w = as_weight(k)
    if not w.explicit_inversion:
        raise ValueError(f"weight {w} has no explicit formulas (only 0, 1/2, 1)")
    return w


@dataclass(frozen=True)
class EigenParameter:
    s: complex

    @property
    def r(self) -> complex:
        return (self.s - 1) / 1j

    @property
    def lam(self) -> complex:
        return self.s * (self.s - 2)

    def lam_from_r(self) -> complex:
        return -1 - self.r**2


def hyp2f1(a, b, c, z, tol: float = 1e-15, max_terms: int = 20000,
           continuation: bool = False):
    """Gauss hypergeometric function by its power series.

    The series is summed directly for |z| < 0.95 and NonConvergent is raised
    outside that disc.  With ``continuation=True`` the Pfaff transformation
    F(a,b;c;z) = (1-z)^(-a) F(a, c-b; c; z/(z-1)) is used for arguments it
    maps inside |w| < 0.97 (e.g. -32 < z <= -1).  Accepts array ``z``.
    """
    c = complex(c)
    if c.imag == 0 and c.real <= 0 and c.real == round(c.real):
        raise PoleAtC(f"c = {c.real:g} is a non-positive integer")
    z_arr = np.asarray(z, dtype=complex)
    out = np.empty(z_arr.shape, dtype=complex)
    flat = z_arr.ravel()
    res = out.ravel()
    direct = np.abs(flat) < SERIES_RADIUS
    w = flat / (flat - 1)
    pfaff = ~direct & (np.abs(w) < CONTINUATION_RADIUS) & continuation
    if not np.all(direct | pfaff):
        bad = flat[~(direct | pfaff)][0]
        raise NonConvergent(f"argument {bad} outside the series region")
    if direct.any():
        res[direct] = _series(complex(a), complex(b), c, flat[direct], tol, max_terms)
    if pfaff.any():
        zz = flat[pfaff]
        res[pfaff] = (1 - zz) ** (-complex(a)) * _series(
            complex(a), c - complex(b), c, w[pfaff], tol, max_terms)
    if np.ndim(z) == 0:
        return complex(out[()])
    return out


def _series(a, b, c, z, tol, max_terms):
    term = np.ones_like(z)
    total = np.ones_like(z)
    zmax = float(np.max(np.abs(z))) if z.size else 0.0
    for n in range(max_terms):
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1))
        term = term * ratio * z
        total = total + term
        # tail bound: once the coefficient ratio is below 1/|z|, the tail is
        # dominated by a geometric series with ratio q
        q = abs((a + n + 1) * (b + n + 1) / ((c + n + 1) * (n + 2))) * zmax
        if n > abs(a) + abs(b) + abs(c) and q < 1:
            tail = np.max(np.abs(term)) * q / (1 - q)
            if tail <= tol * max(1.0, float(np.min(np.abs(total)))):
                return total
    raise NonConvergent("hypergeometric series did not converge")


def phi_weight0(s, u):
    """phi_s(u) = u^(-s) F(s, s-1; 2s-1; -1/u) for u > 0."""
    s = complex(s)
    u = np.asarray(u, dtype=float)
    return u ** (-s) * hyp2f1(s, s - 1, 2 * s - 1, -1.0 / u, continuation=True)


def phi_radial(k, s, sigma):
    """phi_{s,k}(sigma) for sigma > 1.

    The factor (1 - sigma)^(|k| - s) is taken as (sigma - 1)^(|k| - s); the
    dropped constant phase does not affect the linear ODE and makes k = 0
    coincide with phi_weight0 at u = sigma - 1.
    """
    kk = abs(as_weight(k).k)
    s = complex(s)
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 1):
        raise DomainError("phi_radial needs sigma > 1")
    return (sigma ** (-kk) * (sigma - 1) ** (kk - s)
            * hyp2f1(s - kk, s - 1 - kk, 2 * s - 1, -1.0 / (sigma - 1),
                     continuation=True))


def ball_radial(k, s, r):
    """f_k(r) = (r^2 - 1)^s F(s+|k|, s-|k|; 2s-1; 1-r^2), with
    (r^2 - 1)^s := e^{i pi s} (1 - r^2)^s."""
    kk = abs(as_weight(k).k)
    s = complex(s)
    r = np.asarray(r, dtype=float)
    x = 1 - r * r
    return cmath.exp(1j * math.pi * s) * x**s * hyp2f1(s + kk, s - kk, 2 * s - 1, x)


def ode_residual_sigma(k, s, sigma: float, func: Callable | None = None,
                       h: float = 1e-3) -> float:
    """Scaled residual of the radial ODE in sigma for phi_{s,k}.

    phi'' + (1/sigma + 2/(sigma-1)) phi' + (k^2/sigma + s(2-s))/(sigma(sigma-1)) phi
    """
    w = explicit_weight(k)
    if not sigma > 1.05:
        raise DomainError("sigma must exceed 1.05")
    s = complex(s)
    f = func if func is not None else (lambda x: phi_radial(w, s, x))
    val = complex(np.asarray(f(np.array([sigma])))[0])
    d1 = complex(differentiate(f, sigma, 1, h, levels=2).value)
    d2 = complex(differentiate(f, sigma, 2, h, levels=2).value)
    kk = w.k
    res = (d2 + (1 / sigma + 2 / (sigma - 1)) * d1
           + (kk * kk / sigma + s * (2 - s)) / (sigma * (sigma - 1)) * val)
    return abs(res) / max(1.0, abs(val))


def ode_residual_ball(k, s, r: float, func: Callable | None = None,
                      h: float = 1e-3) -> float:
    """Scaled residual of the ball ODE in v = r^2 for f_k.

    F'' + (2/v - 1/(v-1)) F' + [s(2-s)/(v-1) - k^2] F / (v(v-1)) = 0
    """
    w = explicit_weight(k)
    if not 0.05 < r < 0.95:
        raise DomainError("r must lie in (0.05, 0.95)")
    s = complex(s)
    if func is None:
        def f(v):
            return ball_radial(w, s, np.sqrt(v))
    else:
        f = func
    v = r * r
    val = complex(np.asarray(f(np.array([v])))[0])
    d1 = complex(differentiate(f, v, 1, h, levels=2).value)
    d2 = complex(differentiate(f, v, 2, h, levels=2).value)
    kk = w.k
    res = (d2 + (2 / v - 1 / (v - 1)) * d1
           + (s * (2 - s) / (v - 1) - kk * kk) / (v * (v - 1)) * val)
    return abs(res) / max(1.0, abs(val))


def _partials(f, Z: SiegelPoint, h: float):
    """Central-difference first and second partials in (x1, y1, x2, y2)."""
    base = np.array([Z.z1.real if isinstance(Z.z1, complex) else float(Z.z1),
                     complex(Z.z1).imag, complex(Z.z2).real, complex(Z.z2).imag])

    def F(p):
        return complex(f(complex(p[0], p[1]), complex(p[2], p[3])))

    e = np.eye(4) * h
    f0 = F(base)
    fp = [F(base + e[i]) for i in range(4)]
    fm = [F(base - e[i]) for i in range(4)]
    first = [(fp[i] - fm[i]) / (2 * h) for i in range(4)]
    second = np.empty((4, 4), dtype=complex)
    for i in range(4):
        second[i, i] = (fp[i] - 2 * f0 + fm[i]) / h**2
        for j in range(i + 1, 4):
            v = (F(base + e[i] + e[j]) - F(base + e[i] - e[j])
                 - F(base - e[i] + e[j]) + F(base - e[i] - e[j])) / (4 * h * h)
            second[i, j] = second[j, i] = v
    return first, second


def _delta_once(k: float, f, Z: SiegelPoint, h: float) -> complex:
    d, dd = _partials(f, Z, h)
    z1, z2 = complex(Z.z1), complex(Z.z2)
    X1, Y1, X2, Y2 = 0, 1, 2, 3
    lap1 = 0.25 * (dd[X1, X1] + dd[Y1, Y1])          # d^2/dz1 dz1bar
    lap2 = 0.25 * (dd[X2, X2] + dd[Y2, Y2])          # d^2/dz2 dz2bar
    mixed_a = 0.25 * (dd[X1, X2] - 1j * dd[X1, Y2] + 1j * dd[Y1, X2] + dd[Y1, Y2])  # d^2/dz1bar dz2
    mixed_b = 0.25 * (dd[X1, X2] + 1j * dd[X1, Y2] - 1j * dd[Y1, X2] + dd[Y1, Y2])  # d^2/dz1 dz2bar
    drift = -1j * d[Y1]                               # d/dz1 - d/dz1bar
    return rho(Z) * ((z1 + z1.conjugate()) * lap1 + lap2 + z2 * mixed_a
                     + z2.conjugate() * mixed_b - k * drift)


def apply_delta_k_fd(k, f: Callable, Z: SiegelPoint, h: float = 1e-3) -> complex:
    """Delta_k f(Z) by central differences in the four real coordinates with
    two-level Richardson extrapolation (steps h, h/2, h/4)."""
    kk = as_weight(k).k
    if h / 4 < 1e-6:
        raise StepUnderflow(f"step {h / 4:g} below 1e-6")
    if rho(Z) <= 8 * h * (1 + abs(complex(Z.z2))):
        raise DomainError("point too close to the boundary for the stencil")
    a = _delta_once(kk, f, Z, h)
    b = _delta_once(kk, f, Z, h / 2)
    c = _delta_once(kk, f, Z, h / 4)
    ab = (4 * b - a) / 3
    bc = (4 * c - b) / 3
    return (16 * bc - ab) / 15


def rho_power(s):
    """The function Z -> rho(Z)^s on the Siegel domain."""
    def f(z1, z2):
        return (2 * z1.real - abs(z2) ** 2) ** complex(s)
    return f
