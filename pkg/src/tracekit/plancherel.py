"""Plancherel densities, the identity contribution and four closed-form
integrals with quadrature oracles."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .common import VerificationReport, make_report
from .errors import C2Invalid, DecayUncertified
from .operators import Weight, as_weight, explicit_weight
from .quadrature import Decay, QuadConfig, integrate_1d

VOLUME_CONSTANT = 8 * math.pi**2 / 3
IDENTITY_CONFIG = QuadConfig(abs_tol=1e-12, rel_tol=1e-12)
APPENDIX_CONFIG = QuadConfig(abs_tol=1e-14, rel_tol=1e-12)
APPENDIX_NAMES = ("A1", "A2", "A3", "A4")


def cospi(x: float) -> float:
    """cos(pi x), exact at integers and half-integers."""
    x2 = 2 * x
    if x2 == round(x2):
        return (1.0, 0.0, -1.0, 0.0)[int(round(x2)) % 4]
    return math.cos(math.pi * x)


def validate_c2(c2) -> int:
    if isinstance(c2, bool) or int(c2) != c2 or c2 <= 0 or int(c2) % 3:
        raise C2Invalid(f"c2 must be a positive multiple of 3 (c2 = 0 mod 3), got {c2}")
    return int(c2)


def volume(c2: int) -> float:
    return VOLUME_CONSTANT * validate_c2(c2)


@dataclass(frozen=True)
class PlancherelDensity:
    weight: Weight

    @property
    def limit_at_zero(self) -> float:
        k = self.weight.k
        return k * k * (1 + cospi(2 * k)) / (2 * math.pi)

    def __call__(self, r):
        return density(self.weight, r)


def density(k, r):
    """d_k(r) = r (r^2 + k^2)(cosh 2 pi r + cos 2 k pi)/sinh 2 pi r.

    The ratio is evaluated as ((1 - e^-x)^2 + 2 (1 + cos 2k pi) e^-x)/(1 - e^-2x)
    with x = 2 pi |r|, which is free of overflow and cancellation; r = 0 takes
    the analytic limit k^2 (1 + cos 2k pi)/(2 pi), also used for |r| < 1e-100."""
    w = as_weight(k)
    kk = w.k
    c = cospi(2 * kk)
    r_arr = np.asarray(r, dtype=float)
    ra = np.abs(r_arr)
    x = 2 * math.pi * ra
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        e = np.exp(-x)
        ratio = (np.expm1(-x) ** 2 + 2 * (1 + c) * e) / (-np.expm1(-2 * x))
        val = ra * (ra * ra + kk * kk) * ratio
    # below 1e-100 the correction to the limit is under 1e-200
    val = np.where(ra < 1e-100, kk * kk * (1 + c) / (2 * math.pi), val)
    return val[()] if val.ndim == 0 else val


def density_simplified(k, r):
    """r^3 coth(pi r), r (r^2+1) coth(pi r), r (r^2 + 1/4) tanh(pi r)."""
    w = explicit_weight(k)
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if w.two_k == 1:
            val = r * (r * r + 0.25) * np.tanh(math.pi * r)
        else:
            kk = w.k
            val = np.where(r == 0, kk * kk / math.pi, r * (r * r + kk * kk) / np.tanh(math.pi * r))
    return val[()] if np.ndim(val) == 0 else val


def _density_decay(h_decay: Decay) -> Decay:
    if h_decay.kind == "power":
        if h_decay.rate <= 4:
            raise DecayUncertified("h must decay faster than r^-4")
        # |d_k(r)| <= 2.01 r^3 for r >= 1
        return Decay("power", h_decay.rate - 3, 2.01 * h_decay.constant,
                     start=max(h_decay.start, 1.0))
    # r^3 e^(-a r) <= (3/(a e))^3 e^(-a r / 2) * ... absorbed by halving the rate
    a = h_decay.rate
    return Decay("exp", a / 2, 2.01 * h_decay.constant * (6 / (a * math.e)) ** 3,
                 start=max(h_decay.start, 1.0))


def spectral_integral(k, h: Callable, h_decay: Decay | None,
                      config: QuadConfig | None = None):
    """int_{-inf}^{inf} h(r) d_k(r) dr for even h."""
    if h_decay is None:
        raise DecayUncertified("the identity integral needs a decay certificate for h")
    cfg = config or IDENTITY_CONFIG
    w = as_weight(k)
    res = integrate_1d(lambda r: np.real(h(r)) * density(w, r), (0.0, math.inf), cfg,
                       decay=_density_decay(h_decay))
    return 2 * res.value, 2 * res.error


def identity_term(k, h: Callable, c2: int, h_decay: Decay | None = None,
                  config: QuadConfig | None = None) -> float:
    """(2/3) c2 int h(r) d_k(r) dr, which equals Vol(M) Phi(0)."""
    c2 = validate_c2(c2)
    val, _ = spectral_integral(k, h, h_decay, config)
    return 2 * c2 * val / 3


def phi0_consistency(k, chain, tol: float = 1e-6) -> VerificationReport:
    """Phi(0) from the inversion formula against (1/4 pi^2) int h d_k dr."""
    t0 = time.perf_counter()
    w = explicit_weight(k)
    if chain.weight != w:
        raise ValueError(f"chain has weight {chain.weight}, expected {w}")
    lhs = chain.invert()(0.0)
    val, _ = spectral_integral(w, chain.h, chain.h_decay)
    rhs = val / (4 * math.pi**2)
    return make_report("phi0", {"k": str(w)}, lhs, rhs, tol, "rel", t0)


# --------------------------------------------------------- closed integrals


def appendix_closed(name: str, r):
    """Closed forms of the four integrals; r = 0 by the analytic limit."""
    r = np.asarray(r, dtype=float)
    x = math.pi * r
    with np.errstate(divide="ignore", invalid="ignore"):
        if name == "A1":
            val = np.where(r == 0, 0.0, math.pi / 4 * r * r / np.tanh(x / 2))
        elif name == "A2":
            val = math.pi / 2 * (r * r + 0.25) * np.tanh(x)
        elif name == "A3":
            # pi/tanh(x) - pi (2r^2+1)/sinh(x) = pi (2 sinh^2(x/2) - 2 r^2)/sinh(x)
            val = np.where(r == 0, 0.0, math.pi * (2 * np.sinh(x / 2) ** 2 - 2 * r * r) / np.sinh(x))
        elif name == "A4":
            val = np.where(r == 0, 4.0 / 3.0, 4 * x * (r * r + 1) / (3 * np.sinh(x)))
        else:
            raise ValueError(f"unknown integral {name!r}; expected one of {APPENDIX_NAMES}")
    return val[()] if val.ndim == 0 else val


def _numerator_series(r: float, n_max: int = 30) -> np.ndarray:
    """Taylor coefficients of cosh(u) sin(ru) - r sinh(u) cos(ru) = Im[(cosh u -
    i r sinh u) e^(iru)]; orders 0 through 2 vanish."""
    c = np.array([(1.0 if n % 2 == 0 else -1j * r) / math.factorial(n) for n in range(n_max + 1)])
    e = np.array([(1j * r) ** m / math.factorial(m) for m in range(n_max + 1)])
    coeffs = np.convolve(c, e)[: n_max + 1].imag
    coeffs[:3] = 0.0
    return coeffs


def _appendix_integrand(name: str, r: float) -> tuple[Callable, Decay]:
    if name in ("A1", "A2"):
        series = _numerator_series(r)

        def numerator(u):
            out = np.cosh(u) * np.sin(r * u) - r * np.sinh(u) * np.cos(r * u)
            small = u < 0.25
            if small.any():
                out[small] = np.polynomial.polynomial.polyval(u[small], series)
            return out

        if name == "A1":
            return (lambda u: numerator(u) / np.sinh(u) ** 3,
                    Decay("exp", 2.0, 11.9 * (1 + r / 2), start=1.0))
        return (lambda u: numerator(u) / (np.sinh(u / 2) * np.sinh(u) ** 2),
                Decay("exp", 1.5, 17.0 * (1 + r / 2), start=1.0))
    if name == "A3":
        return (lambda u: np.sin(r * u) / (np.sinh(u / 2) * np.cosh(u / 2) ** 3),
                Decay("exp", 2.0, 25.3, start=1.0))
    if name == "A4":
        return lambda u: np.cos(r * u) / np.cosh(u / 2) ** 4, Decay("exp", 2.0, 16.0)
    raise ValueError(f"unknown integral {name!r}; expected one of {APPENDIX_NAMES}")


def appendix_oracle(name: str, r: float, config: QuadConfig | None = None) -> float:
    """Adaptive quadrature of the defining integral over [0, inf)."""
    f, decay = _appendix_integrand(name, float(r))
    res = integrate_1d(f, (0.0, math.inf), config or APPENDIX_CONFIG, decay=decay)
    return float(res.value)


@dataclass(frozen=True)
class AppendixIntegral:
    name: str

    def closed(self, r):
        return appendix_closed(self.name, r)

    def oracle(self, r):
        return appendix_oracle(self.name, r)

    def check(self, r: float, tol: float = 1e-8) -> VerificationReport:
        t0 = time.perf_counter()
        return make_report(f"appendix-{self.name}", {"r": r}, self.oracle(r), self.closed(r),
                           tol, "rel", t0)
