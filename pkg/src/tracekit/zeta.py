"""Weight-k zeta functions of a synthetic length spectrum: the Euler-type
product, its logarithmic derivative, the continued W_k functions and the
checks built on them."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from .common import TailRecord, TruncationConfig, VerificationReport, make_report
from .errors import (ContourPoleClash, DomainError, ParameterOrdering, PoleProximity,
                     TruncationError)
from .operators import Weight, as_weight, explicit_weight
from .plancherel import density, validate_c2
from .quadrature import ContourSpec, Decay, QuadConfig, contour_integral, differentiate, integrate_1d
from .spectrum import SpectrumModel, hyperbolic_sum, poincare_halfdet

HALF_PLANE = 2 + 1e-9
POLE_GUARD = 0.05
REG_RADIUS = 0.1
REG_NODES = 16
TAIL_ORDERS = 10
W_INTEGRAL_CONFIG = QuadConfig(abs_tol=1e-10, rel_tol=1e-10)


def _check_half_plane(s):
    if np.any(np.real(s) <= HALF_PLANE):
        raise DomainError(f"need Re(s) > 2, got {s}")


# ----------------------------------------------------------- product side


def _exponents(two_k: int, ord2: int, L: int) -> np.ndarray:
    """E[l, n] = (3/ord2) sum_q exp([2k + 3(l - n)] i q theta2)."""
    theta2 = 2 * math.pi / ord2
    q = np.arange(1, ord2 + 1)
    d = np.arange(-L, L + 1)
    ph = np.exp(1j * np.outer(two_k + 3 * d, q) * theta2).sum(axis=1) * 3 / ord2
    idx = np.arange(L + 1)
    return ph[idx[:, None] - idx[None, :] + L]


def _product_cutoffs(N: float, sigma: float, trunc: TruncationConfig) -> tuple[int, int, int, float]:
    """Index cutoffs for one pair and the certified tail of the log product.

    With z0 = N^-sigma every factor obeys |E log(1 - z)| <= 3 z/(1 - z0), and the
    omitted (j, l, n) mass is at most S (a^(J+1) + b^(L+1) + b^(M+1)) with
    a = 1/N, b = N^(-1/2) and S the full geometric sum."""
    z0 = N ** (-sigma)
    a, b = 1 / N, N**-0.5
    S = 3 * z0 / (1 - z0) / ((1 - a) * (1 - b) ** 2)
    budget = trunc.tail_tol / 3

    def pick(given, base):
        if given is not None:
            return given
        return max(1, math.ceil(math.log(budget / S) / math.log(base)))

    J, L, M = pick(trunc.j_max, a), pick(trunc.l_max, b), pick(trunc.n_max, b)
    tail = S * (a ** (J + 1) + b ** (L + 1) + b ** (M + 1))
    return J, L, M, tail


def zeta_product(k, s, model: SpectrumModel, trunc: TruncationConfig | None = None,
                 tails: TailRecord | None = None):
    """log Z_k(s) from the truncated triple product, summed termwise with log1p."""
    w = as_weight(k)
    trunc = trunc or TruncationConfig()
    s_arr = np.asarray(s, dtype=complex)
    _check_half_plane(s_arr)
    total = np.zeros(s_arr.shape, dtype=complex)
    sigma = float(np.min(s_arr.real)) if s_arr.size else 3.0
    for p in model.pairs:
        J, L, M, tail = _product_cutoffs(p.norm, sigma, trunc)
        if tails is not None:
            tails.add(f"N={p.norm:g},ord2={p.ord2}", tail)
        LL = max(L, M)
        E = _exponents(w.two_k, p.ord2, LL)[: L + 1, : M + 1]
        shift = (np.arange(J + 1)[:, None, None] + 0.5 * (np.arange(L + 1)[None, :, None]
                                                          + np.arange(M + 1)[None, None, :]))
        for idx, sv in np.ndenumerate(s_arr):
            z = np.exp(-(sv + shift) * p.log_norm)
            total[idx] += np.sum(E[None] * np.log1p(-z))
    return total[()] if total.ndim == 0 else total


def _series_m_max(N: float, sigma: float, tol: float, cap: int = 100_000) -> tuple[int, float]:
    """Terms are bounded by b(m) = 3 ln N N^(-m(sigma-1)) / [(N^(m/2) - N^(-m/2))
    (N^(m/4) - N^(-m/4))^2], which falls at least by N^-(sigma-1) per step."""
    L = math.log(N)
    ratio = N ** (-(sigma - 1))

    def bound(m):
        return 3 * L * N ** (-m * (sigma - 1)) / (
            (N ** (m / 2) - N ** (-m / 2)) * (N ** (m / 4) - N ** (-m / 4)) ** 2)

    for m in range(1, cap + 1):
        tail = bound(m + 1) / (1 - ratio)
        if tail < tol:
            return m, tail
    raise TruncationError(f"log-derivative tail above {tol:g} at m = {cap}")


def zeta_log_deriv(k, s, model: SpectrumModel, trunc: TruncationConfig | None = None,
                   tails: TailRecord | None = None):
    """Z'_k/Z_k(s) = sum_pairs (3/ord2) sum_q sum_m ln N e^(2kiq theta2) /
    [halfdet(N^m, q theta2) N^(m(s-1))]."""
    w = as_weight(k)
    trunc = trunc or TruncationConfig()
    s_arr = np.asarray(s, dtype=complex)
    _check_half_plane(s_arr)
    total = np.zeros(s_arr.shape, dtype=complex)
    sigma = float(np.min(s_arr.real)) if s_arr.size else 3.0
    for p in model.pairs:
        if trunc.m_max is not None:
            mm = trunc.m_max
        else:
            mm, tail = _series_m_max(p.norm, sigma, trunc.tail_tol)
            if tails is not None:
                tails.add(f"N={p.norm:g},ord2={p.ord2}", tail)
        m = np.arange(1, mm + 1)
        coef = np.zeros(mm, dtype=complex)
        for q in range(1, p.ord2 + 1):
            th = q * p.theta2
            den = np.array([poincare_halfdet(p.norm**mi, th) for mi in m])
            coef += np.exp(1j * w.two_k * th) / den
        coef *= 3 / p.ord2 * p.log_norm
        powers = np.exp(-np.multiply.outer(s_arr - 1, m) * p.log_norm)
        total += powers @ coef
    return total[()] if total.ndim == 0 else total


def duality_check(k, s, model: SpectrumModel, tol: float = 1e-8,
                  trunc: TruncationConfig | None = None) -> VerificationReport:
    """Numerical d/ds of the log product against the Dirichlet-type series."""
    t0 = time.perf_counter()
    s = complex(s)
    deriv = differentiate(lambda z: zeta_product(k, z, model, trunc), s, order=1,
                          h=0.05, levels=4)
    rhs = zeta_log_deriv(k, s, model, trunc)
    return make_report("zeta-duality", {"k": str(as_weight(k)), "s": s}, deriv.value, rhs,
                       tol, "either", t0)


def cauchy_riemann_residual(k, s, model: SpectrumModel, h: float = 0.05) -> float:
    """|d/dx f + i d/dy f| for f = Z'/Z at s; zero for a holomorphic function."""
    s = complex(s)
    fx = differentiate(lambda x: zeta_log_deriv(k, x + 1j * s.imag, model), s.real,
                       h=h, levels=4).value
    fy = differentiate(lambda y: zeta_log_deriv(k, s.real + 1j * y, model), s.imag,
                       h=h, levels=4).value
    return float(abs(fx + 1j * fy))


def dirichlet_combination_check(k, model: SpectrumModel, rational, tol: float = 1e-8,
                                trunc: TruncationConfig | None = None) -> VerificationReport:
    """Hyperbolic sum with the rational g against

        1/(2(a1^2-a2^2)) [Z'/Z(a2+1)/a2 - Z'/Z(a1+1)/a1]
      - 1/(2(b1^2-b2^2)) [Z'/Z(b2+1)/b2 - Z'/Z(b1+1)/b1].
    """
    t0 = time.perf_counter()
    a1, a2, b1, b2 = rational.params
    lhs, _, _ = hyperbolic_sum(k, rational.g, model, g_decay=rational.g_decay(),
                               tol=1e-14)

    def L(x):
        return zeta_log_deriv(k, x + 1, model, trunc)

    rhs = (1 / (2 * (a1**2 - a2**2)) * (L(a2) / a2 - L(a1) / a1)
           - 1 / (2 * (b1**2 - b2**2)) * (L(b2) / b2 - L(b1) / b1))
    inputs = {"k": str(as_weight(k)), "params": list(rational.params), "pairs": len(model.pairs)}
    return make_report("prop36", inputs, lhs, rhs, tol, "either", t0)


# ------------------------------------------------------------ W functions


@dataclass(frozen=True)
class WParams:
    alpha2: complex
    beta1: complex
    beta2: complex

    def __post_init__(self):
        a, b, c = (complex(x) for x in (self.alpha2, self.beta1, self.beta2))
        if not 1 < a.real < b.real < c.real:
            raise ParameterOrdering(
                f"need 1 < Re alpha2 < Re beta1 < Re beta2, got {self.alpha2}, {self.beta1}, {self.beta2}")

    @property
    def values(self) -> tuple[complex, complex, complex]:
        return complex(self.alpha2), complex(self.beta1), complex(self.beta2)


def _bracket(x, xi2, a2, b1, b2):
    """1/(a2+x) - 1/(xi2+x) + c (1/(b1+x) - 1/(b2+x)) with c = (a2-xi2)/(b2-b1),
    written over a common denominator so the leading orders cancel exactly.
    Arguments are squares: a2 = alpha2^2 and so on."""
    num = (a2 - xi2) * (x * (a2 + xi2 - b1 - b2) + a2 * xi2 - b1 * b2)
    return num / ((x + a2) * (x + xi2) * (x + b1) * (x + b2))


def sinpi(x):
    """sin(pi x) for real or complex arrays, exact zeros and signs at
    integers and half-integers on the real line."""
    x = np.asarray(x)
    if np.iscomplexobj(x) and np.any(x.imag != 0):
        return np.sin(np.pi * x)
    xr = np.real(x).astype(float)
    r = xr - 2 * np.round(xr / 2)
    out = np.sin(np.pi * r)
    out = np.where(r == np.round(r), 0.0, out)
    out = np.where(np.abs(r) == 0.5, np.sign(r), out)
    return out


def cospi_arr(x):
    return sinpi(np.asarray(x) + 0.5)


def _boundary(two_k: int, z):
    """(z^2 - k^2) pi cot(pi z) for integer lattices, (k^2 - z^2) pi tan(pi z)
    for the half-integer lattice."""
    z = np.asarray(z, dtype=complex)
    s, c = sinpi(z), cospi_arr(z)
    if two_k == 1:
        return (0.25 - z * z) * np.pi * s / c
    kk = two_k / 2
    return (z * z - kk * kk) * np.pi * c / s


def _lattice_offset(two_k: int) -> float:
    return 0.5 if two_k == 1 else 0.0


def _lattice_distance(two_k: int, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    off = _lattice_offset(two_k)
    return np.abs(z - (np.round(z.real - off) + off))


def _tail_coefficients(xi2, a2, b1, b2, order: int):
    """b_j (j = 0..order) with B(-lam^2) = sum_j b_j lam^(-2j), by expanding
    1/prod(1 - a_i y) into complete homogeneous polynomials in the a_i."""
    roots = [xi2, np.broadcast_to(a2, np.shape(xi2)), np.broadcast_to(b1, np.shape(xi2)),
             np.broadcast_to(b2, np.shape(xi2))]
    h = np.zeros((order + 1,) + np.shape(xi2), dtype=complex)
    h[0] = 1
    for r in roots:
        # multiply the running series by 1/(1 - r y)
        for n in range(1, order + 1):
            h[n] = h[n] + r * h[n - 1]
    P = a2 + xi2 - b1 - b2
    Q = a2 * xi2 - b1 * b2
    b = np.zeros_like(h)
    for j in range(3, order + 1):
        # (A - X)(-P y^3 + Q y^4) H(y) with x = -lam^2; denominators carry (-1)^4
        b[j] = (a2 - xi2) * (-P * h[j - 3] + (Q * h[j - 4] if j >= 4 else 0))
    return b


def _lattice_sum(two_k: int, xi, a, b1, b2, K: int, tol: float, tails: TailRecord | None):
    """sum over lattice lam of 2 (lam^3 - k^2 lam) B(-lam^2), the first K points
    directly and the rest from an asymptotic expansion in Hurwitz zeta values."""
    kk2 = (two_k / 2) ** 2
    off = _lattice_offset(two_k)
    lam = np.arange(K) + (off if two_k == 1 else 1.0)
    xi2 = np.asarray(xi, dtype=complex) ** 2
    x = -lam**2
    terms = 2 * (lam**3 - kk2 * lam) * _bracket(x[None, :], xi2.reshape(-1, 1), a * a, b1 * b1, b2 * b2)
    head = terms.sum(axis=1).reshape(xi2.shape)
    lam0 = lam[-1] + 1
    coeffs = _tail_coefficients(xi2, a * a, b1 * b1, b2 * b2, TAIL_ORDERS)
    tail = np.zeros(xi2.shape, dtype=complex)
    for j in range(3, TAIL_ORDERS + 1):
        tail += 2 * coeffs[j] * (hurwitz_zeta(2 * j - 3, lam0) - kk2 * hurwitz_zeta(2 * j - 1, lam0))
    # remainder beyond TAIL_ORDERS from |h_n| <= C(n+3, 3) rho^n
    rho = float(np.max(np.abs([np.max(np.abs(xi2)), abs(a * a), abs(b1 * b1), abs(b2 * b2)])))
    P = np.max(np.abs(a * a + xi2 - b1 * b1 - b2 * b2))
    Q = np.max(np.abs(a * a * xi2 - b1 * b1 * b2 * b2))
    AX = np.max(np.abs(a * a - xi2))
    rem = 0.0
    for j in range(TAIL_ORDERS + 1, TAIL_ORDERS + 80):
        bj = AX * (P * comb(j, 3) * rho ** (j - 3) + Q * comb(j - 1, 3) * rho ** (j - 4))
        zsum = lam0 ** (3 - 2 * j) * (1 + lam0 / (2 * j - 4)) * (1 + kk2)
        rem += 2 * bj * zsum
    if rem > tol:
        raise TruncationError(f"lattice tail bound {rem:.3g} above {tol:g}; raise sum_k_max")
    if tails is not None:
        tails.add("lattice", rem)
    return head + tail


def _w_core(two_k: int, xi, a, b1, b2, K: int, tol: float, tails=None):
    xi = np.asarray(xi, dtype=complex)
    c = (a * a - xi * xi) / (b2 * b2 - b1 * b1)
    bnd = (_boundary(two_k, xi) - _boundary(two_k, a)) - c * (_boundary(two_k, b1) - _boundary(two_k, b2))
    return _lattice_sum(two_k, xi, a, b1, b2, K, tol, tails) + bnd


def W_series(k, xi, p: WParams, trunc: TruncationConfig | None = None,
             tails: TailRecord | None = None):
    """Continuation of W_k by lattice sums and cot/tan boundary terms, valid
    off the pole lattice (integers for k in {0, 1}, half-integers for k = 1/2).

    Parameters lying on the lattice are removable singularities of the
    continued expression; there the value is taken as the mean over a circle
    of radius 0.1 in the offending parameters (exact for analytic functions)."""
    w = explicit_weight(k)
    trunc = trunc or TruncationConfig()
    xi_arr = np.asarray(xi, dtype=complex)
    if np.any(_lattice_distance(w.two_k, xi_arr) < POLE_GUARD):
        raise PoleProximity(f"xi = {xi} lies within {POLE_GUARD} of the pole lattice")
    vals = np.array(p.values)
    near = _lattice_distance(w.two_k, vals) < POLE_GUARD
    K, tol = trunc.sum_k_max, trunc.tail_tol
    if not near.any():
        out = _w_core(w.two_k, xi_arr, *vals, K, tol, tails)
    else:
        shifts = REG_RADIUS * np.exp(2j * np.pi * (np.arange(REG_NODES) + 0.5) / REG_NODES)
        out = np.zeros(xi_arr.shape, dtype=complex)
        for t in shifts:
            out += _w_core(w.two_k, xi_arr, *(vals + near * t), K, tol, tails)
        out /= REG_NODES
    return out[()] if out.ndim == 0 else out


def _w_integral_decay(two_k: int, xi: complex, p: WParams) -> Decay:
    """|B(r^2)| <= |A - X| (|P| + |Q|/R0^2) (4/3)^4 r^-6 once r^2 >= 4 max|a_i|,
    and d_k(r) <= 2.01 r^3 for r >= 1."""
    a, b1, b2 = p.values
    sq = [xi * xi, a * a, b1 * b1, b2 * b2]
    R0 = max(1.0, 2 * math.sqrt(max(abs(v) for v in sq)))
    P = abs(sq[1] + sq[0] - sq[2] - sq[3])
    Q = abs(sq[1] * sq[0] - sq[2] * sq[3])
    C = abs(sq[1] - sq[0]) * (P + Q / R0**2) * (4 / 3) ** 4 * 2.01
    return Decay("power", 3.0, C, start=R0)


def W_integral(k, xi, p: WParams, config: QuadConfig | None = None) -> complex:
    """Adaptive quadrature of the defining integral over the real line."""
    w = explicit_weight(k)
    xi = complex(xi)
    if not 0 < xi.real < 2:
        raise DomainError(f"the defining integral needs 0 < Re(xi) < 2, got {xi}")
    a, b1, b2 = p.values
    sq = (xi * xi, a * a, b1 * b1, b2 * b2)

    def f(r):
        val = _bracket(r * r, *sq) * density(w, r)
        return np.stack([val.real, val.imag])

    # even integrand: twice the half line
    res = integrate_1d(f, (0.0, math.inf), config or W_INTEGRAL_CONFIG,
                       decay=_w_integral_decay(w.two_k, xi, p))
    return complex(2 * res.value[0], 2 * res.value[1])


def w_consistency_check(k, xi, p: WParams, tol: float = 1e-6,
                        trunc: TruncationConfig | None = None) -> VerificationReport:
    t0 = time.perf_counter()
    lhs = W_series(k, xi, p, trunc)
    rhs = W_integral(k, xi, p)
    inputs = {"k": str(as_weight(k)), "xi": complex(xi), "params": [complex(v) for v in p.values]}
    return make_report("w-consistency", inputs, lhs, rhs, tol, "either", t0)


def parity_gap(k, xi) -> complex:
    """2 pi (xi^2 - k^2) cot(pi xi) for k in {0, 1}; 2 pi (k^2 - xi^2) tan(pi xi)
    for k = 1/2."""
    w = explicit_weight(k)
    return complex(2 * _boundary(w.two_k, xi))


def fe_parity_check(k, xi, p: WParams, trunc: TruncationConfig | None = None,
                    tol: float = 1e-8) -> VerificationReport:
    """W_k(xi) - W_k(-xi) against the closed parity gap."""
    t0 = time.perf_counter()
    plus = W_series(k, xi, p, trunc)
    minus = W_series(k, -complex(xi), p, trunc)
    inputs = {"k": str(as_weight(k)), "xi": complex(xi)}
    return make_report("fe", inputs, plus - minus, parity_gap(k, xi), tol, "either", t0)


# --------------------------------------------------------- trivial zeros


def trivial_zero_centre(k, m: int) -> float:
    w = explicit_weight(k)
    return -m + (0.5 if w.two_k == 1 else 0.0)


def trivial_zero_multiplicity(k, m: int, c2: int) -> float:
    """(8/3) c2 (m+1)^3 for k in {0, 1}; (4/3) c2 m (m+1)(2m+1) for k = 1/2."""
    w = explicit_weight(k)
    c2 = validate_c2(c2)
    if w.two_k == 1:
        return 4 * c2 * m * (m + 1) * (2 * m + 1) / 3
    return 8 * c2 * (m + 1) ** 3 / 3


def trivial_zero_residue(k, m: int, c2: int, p: WParams | None = None,
                         radius: float = 0.25, nodes: int = 256,
                         trunc: TruncationConfig | None = None) -> complex:
    """(1/2 pi i) of the contour integral of (s-1)(4/3) c2 W_k(s-1) around the
    candidate trivial zero, by the trapezoid rule."""
    w = explicit_weight(k)
    c2 = validate_c2(c2)
    if m < 0:
        raise ValueError("m must be non-negative")
    p = p or WParams(1.3, 2.2, 3.4)
    if not POLE_GUARD <= radius <= 1 - POLE_GUARD:
        raise ContourPoleClash(f"radius {radius} brings the contour within {POLE_GUARD} of a pole")
    spec = ContourSpec(trivial_zero_centre(w, m), radius, nodes)
    res = contour_integral(lambda s: (s - 1) * (4 / 3) * c2 * W_series(w, s - 1, p, trunc), spec)
    return res.value


def residue_check(k, m: int, c2: int = 3, tol: float = 1e-6, **kw) -> VerificationReport:
    """Residue magnitude against the multiplicity formula; the sign is recorded
    in the note."""
    t0 = time.perf_counter()
    r = trivial_zero_residue(k, m, c2, **kw)
    want = trivial_zero_multiplicity(k, m, c2)
    sign = "negative" if r.real < 0 else ("positive" if r.real > 0 else "zero")
    return make_report("residue", {"k": str(as_weight(k)), "m": m, "c2": c2}, abs(r), want,
                       tol, "rel" if want else "abs", t0,
                       note=f"residue = {r.real:.12g}{r.imag:+.3g}i ({sign})")


# ------------------------------------------------ integration by parts


COR_CONFIG = QuadConfig(abs_tol=1e-13, rel_tol=1e-12)


def _cot_moment(x: float) -> float:
    # pi v^3 cot(pi v) ~ v^2 near 0
    return integrate_1d(lambda v: np.pi * v**3 * cospi_arr(v) / sinpi(v), (0.0, x), COR_CONFIG).value


def _log_moment(x: float) -> float:
    def f(v):
        out = v * v * np.log(np.abs(sinpi(v)))
        return np.where(v == 0, 0.0, out)
    return integrate_1d(f, (0.0, x), COR_CONFIG).value


def cor39_identity(x: float, tol: float = 1e-8) -> VerificationReport:
    """int_0^x pi v^3 cot(pi v) dv = x^3 log sin(pi x) - 3 int_0^x v^2 log sin(pi v) dv."""
    t0 = time.perf_counter()
    if not 0.02 <= x <= 0.98:
        raise DomainError("x must lie in [0.02, 0.98]")
    lhs = _cot_moment(x)
    rhs = x**3 * math.log(float(sinpi(x))) - 3 * _log_moment(x)
    return make_report("cor39", {"x": x}, lhs, rhs, tol, "abs", t0)
