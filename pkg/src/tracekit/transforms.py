"""Transform chains Phi -> P_k (or Q_0) -> g_k -> h_k, their inversions,
the rational test-function family, the Lambda_k eigenvalue integral and the
horospherical integral identity.

Every unbounded integral carries a tail certificate.  Kernel certificates
bound |Phi^(j)(u)| for j <= 2 either by C (1+u)^(-p) with p > 3 ("power") or by
C e^(-a u) ("exp"); everything downstream is derived from that bound.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .common import VerificationReport, make_report
from .errors import (
    DecayUncertified,
    MaxSubdivisions,
    ParameterOrdering,
    QuadratureFailure,
    SingularityHandlingFailure,
)
from .geometry import SiegelPoint, rho, rho_pair
from .operators import Weight, as_weight, explicit_weight
from .quadrature import Decay, QuadConfig, integrate_1d, integrate_nd

P_CONFIG = QuadConfig(abs_tol=1e-14, rel_tol=1e-13)
FOURIER_CONFIG = QuadConfig(abs_tol=1e-12, rel_tol=1e-11)
INVERT_CONFIG = QuadConfig(abs_tol=1e-10, rel_tol=1e-9)
DIFF_STEP = 0.02
DIFF_LEVELS = 3


class Envelope(NamedTuple):
    """|f(v)| <= constant (1+v)^(-rate) ("power") or constant e^(-rate v)
    ("exp") for v >= start."""

    kind: str
    rate: float
    constant: float
    start: float = 0.0


def _peak(p: float, a: float) -> float:
    """sup over w >= 0 of w^p exp(-a (w^2 - w))."""
    if p == 0:
        return math.exp(a / 4)
    w = (a + math.sqrt(a * a + 8 * a * p)) / (4 * a)
    return w**p * math.exp(-a * (w * w - w))


def _sqrt_exp_sup(a: float) -> float:
    """sup over v >= 0 of sqrt(1+v) exp(-a v)."""
    return 1.0 if a >= 0.5 else math.exp(a - 0.5) / math.sqrt(2 * a)


# ---------------------------------------------------------------- kernels


@dataclass(frozen=True)
class RadialKernel:
    """A radial kernel Phi(u), u >= 0, with a decay certificate or a compact
    support bound."""

    phi: Callable
    decay: Decay | None = None
    support: float | None = None
    name: str = "kernel"

    def __post_init__(self):
        if self.decay is None and self.support is None:
            raise DecayUncertified("kernel needs a decay certificate or a support bound")
        if self.decay is not None and self.decay.kind == "power" and self.decay.rate <= 3:
            raise DecayUncertified("power certificates need (1+u)^(-3-eps)")

    def __call__(self, u):
        return self.phi(np.asarray(u, dtype=float))


def exp_kernel(a: float = 1.0) -> RadialKernel:
    return RadialKernel(lambda u: np.exp(-a * u), Decay("exp", a, max(1.0, a * a)),
                        name=f"exp(-{a:g}u)")


def gaussian_kernel() -> RadialKernel:
    # |d^j/du^j e^(-u^2)| <= 3.4 e^(-u) for j <= 2
    return RadialKernel(lambda u: np.exp(-u * u), Decay("exp", 1.0, 4.0), name="exp(-u^2)")


def bump_kernel(support: float = 4.0) -> RadialKernel:
    """exp(1 - 1/(1 - (u/U)^2)) on |u| < U, zero beyond; Phi(0) = 1."""
    U = float(support)

    def phi(u):
        x = np.asarray(u, dtype=float) / U
        inside = np.abs(x) < 1
        out = np.zeros_like(x)
        xi = x[inside]
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - xi * xi))
        return out

    return RadialKernel(phi, support=U, name=f"bump[0,{U:g}]")


# ------------------------------------------------------ forward transforms


class RadialTransform:
    """Vectorised evaluator of P_k(v) (Q_0 for k = 1/2).

    ``envelope`` bounds |P|; ``d_envelope`` bounds the combination of
    derivatives integrated by the inversion formula.  Optional ``d1``/``d2``
    give analytic first and second derivatives.
    """

    def __init__(self, weight: Weight, func: Callable, *, envelope: Envelope | None = None,
                 d_envelope: Envelope | None = None, support: float | None = None,
                 d1: Callable | None = None, d2: Callable | None = None,
                 provenance: str = "numerical"):
        self.weight = weight
        self._func = func
        self.envelope = envelope
        self.d_envelope = d_envelope
        self.support = support
        self.d1 = d1
        self.d2 = d2
        self.provenance = provenance

    def __call__(self, v):
        arr = np.asarray(v, dtype=float)
        out = np.asarray(self._func(np.atleast_1d(arr).ravel()), dtype=float)
        return out.reshape(arr.shape) if arr.ndim else float(out[0])


def _forward_integrand(two_k: int, phi: Callable):
    if two_k == 0:
        def f(v, w):
            return 4.0 * w * np.arctan(w / np.sqrt(1.0 + v)) * phi(v + w * w)
    elif two_k == 2:
        def f(v, w):
            return 4.0 * phi(v + w * w) * np.sqrt(v + 1.0) * w * w / (v + w * w + 1.0)
    else:
        def f(v, w):
            return 4.0 * phi(v + w * w) * w * w / np.sqrt(v + w * w + 1.0)
    return f


def _forward_w_decay(kernel: RadialKernel) -> Decay:
    d = kernel.decay
    if d.kind == "power":
        return Decay("power", 2 * d.rate - 1, 2 * math.pi * d.constant)
    a, C = d.rate, d.constant
    const = 2 * math.pi * C * max(_peak(1, a), _sqrt_exp_sup(a) * _peak(0, a), _peak(2, a))
    return Decay("exp", a, const)


def _kernel_envelopes(two_k: int, kernel: RadialKernel) -> tuple[Envelope, Envelope]:
    """Bounds on |P| and on the inversion integrand D, from the kernel bound."""
    if kernel.decay is None:
        return None, None
    d = kernel.decay
    C = d.constant
    if d.kind == "power":
        p = d.rate
        P_env = Envelope("power", p - 1, math.pi * C / (p - 1))
        if two_k == 0:
            D_env = Envelope("power", p - 0.5, 2 * C * 3 * math.pi / 16)
        elif two_k == 2:
            D_env = Envelope("power", p - 0.5, 20 * C * math.pi / 32)
        else:
            D_env = Envelope("power", p - 1, 11 * C * 0.1334)
        return P_env, D_env
    a = d.rate
    P_env = Envelope("exp", a, math.pi * C / a)
    if two_k == 0:
        D_env = Envelope("exp", a, C * math.sqrt(math.pi / a))
    elif two_k == 2:
        D_env = Envelope("exp", a, 20 * C * math.sqrt(math.pi) / (4 * a**1.5))
    else:
        D_env = Envelope("exp", a, 11 * C * math.sqrt(math.pi) / (4 * a**1.5))
    return P_env, D_env


def forward_transform(k, kernel: RadialKernel, config: QuadConfig | None = None,
                      method: str = "named") -> RadialTransform:
    """P_k(v) from Phi.

    ``method="named"`` uses the single-integral forms for k in {0, 1/2, 1}
    (k = 1/2 returns Q_0), written in w with u = v + w^2:

        k = 0:    P(v)   = int 4 w atan(w / sqrt(1+v)) Phi(v + w^2) dw
        k = 1:    P_1(v) = int 4 sqrt(v+1) w^2 / (v+w^2+1) Phi(v + w^2) dw
        k = 1/2:  Q_0(v) = int 4 w^2 / sqrt(v+w^2+1) Phi(v + w^2) dw

    ``method="general"`` evaluates the double integral defining P_k for
    integer k <= 2.
    """
    cfg = config or P_CONFIG
    if method == "general":
        return _general_transform(k, kernel, cfg)
    if method != "named":
        raise ValueError(f"unknown method {method!r}")
    w_ = explicit_weight(k)
    f = _forward_integrand(w_.two_k, kernel)
    P_env, D_env = _kernel_envelopes(w_.two_k, kernel)

    if kernel.support is not None:
        U = kernel.support

        def P(v):
            out = np.zeros(v.shape)
            live = v < U
            if live.any():
                vv = v[live][:, None]
                scale = np.sqrt(U - vv)

                def g(tau):
                    return f(vv, scale * tau[None, :]) * scale

                out[live] = _integrate(g, (0.0, 1.0), cfg)
            return out
    else:
        decay = _forward_w_decay(kernel)

        def P(v):
            vv = v[:, None]
            return _integrate(lambda w: f(vv, w[None, :]), (0.0, math.inf), cfg, decay)

    return RadialTransform(w_, P, envelope=P_env, d_envelope=D_env, support=kernel.support)


def _integrate(f, interval, cfg, decay=None, singular=None):
    try:
        return integrate_1d(f, interval, cfg, decay=decay, singular=singular).value
    except MaxSubdivisions as exc:
        raise QuadratureFailure(f"transform quadrature failed: {exc}", exc.value, exc.error)


def _general_transform(k, kernel: RadialKernel, cfg: QuadConfig) -> RadialTransform:
    """P_k(v) = int_v^inf Phi(u) (u+1)^(-k) int_v^u sum_m (-1)^m C(2k,2m)
    (xi+1)^(k-m-1/2) (u-xi)^(m-1/2) dxi du, for integer k <= 2.

    With u = v + x^2 and u - xi = x^2 tau^2 the inner integral becomes a
    smooth integral over tau in [0, 1]."""
    w_ = as_weight(k)
    if w_.two_k % 2 or w_.two_k > 4:
        raise ValueError("the general transform is implemented for integer k <= 2")
    kk = w_.two_k // 2
    coeffs = [(-1) ** m * math.comb(2 * kk, 2 * m) for m in range(kk + 1)]
    inner_cfg = QuadConfig(abs_tol=1e-15, rel_tol=1e-14)

    def one(v: float) -> float:
        def inner(x):
            X = x[:, None]

            def f(tau):
                T = tau[None, :]
                base = v + 1.0 + X * X * (1.0 - T * T)
                s = 0.0
                for m, c in enumerate(coeffs):
                    s = s + c * 2.0 * X ** (2 * m + 1) * T ** (2 * m) * base ** (kk - m - 0.5)
                return s

            return integrate_1d(f, (0.0, 1.0), inner_cfg).value

        def outer(x):
            u = v + x * x
            return kernel(u) * (u + 1.0) ** (-kk) * inner(x) * 2.0 * x

        if kernel.support is not None:
            if v >= kernel.support:
                return 0.0
            return float(_integrate(outer, (0.0, math.sqrt(kernel.support - v)), cfg))
        d = kernel.decay
        if d.kind == "power":
            decay = Decay("power", 2 * d.rate - 2, 2 * 4**kk * d.constant)
        else:
            a = d.rate
            const = (2 * 4**kk * d.constant * max(1.0, math.exp(a - 1) / a)
                     * (_peak(0, a) + _peak(2, a)))
            decay = Decay("exp", a, const)
        return float(_integrate(outer, (0.0, math.inf), cfg, decay))

    def P(v):
        return np.array([one(float(x)) for x in v])

    P_env, _ = _kernel_envelopes(2 if kk == 1 else 0, kernel) if kk <= 1 else (None, None)
    return RadialTransform(w_, P, envelope=P_env, support=kernel.support)


def v_of_eta(eta):
    """v = (e^eta + e^-eta - 2)/4 = sinh^2(eta/2)."""
    return np.sinh(0.5 * np.asarray(eta, dtype=float)) ** 2


def change_variable_to_g(P: Callable) -> Callable:
    """g(eta) = P(sinh^2(eta/2)); even in eta by construction."""
    def g(eta):
        return P(v_of_eta(eta))
    return g


def g_decay_from_envelope(env: Envelope | None) -> Decay | None:
    """Exponential bound on g(eta) = P(sinh^2(eta/2)) from a bound on P."""
    if env is None:
        return None
    if env.kind == "power":
        # 1 + v = cosh^2(eta/2) >= e^|eta| / 4
        return Decay("exp", env.rate, env.constant * 4**env.rate)
    a = env.rate
    # v >= (e^|eta| - 2)/4 and sup_y y^2 e^(-a y/4) over y >= 1
    c = (8 / a) ** 2 * math.exp(-2) if a <= 8 else math.exp(-a / 4)
    return Decay("exp", 2.0, env.constant * math.exp(a / 2) * c)


def g_support(v_support: float | None) -> float | None:
    return None if v_support is None else 2.0 * math.asinh(math.sqrt(v_support))


# ----------------------------------------------------------------- Fourier


def fourier_g_to_h(g: Callable, decay: Decay | None = None, support: float | None = None,
                   config: QuadConfig | None = None) -> Callable:
    """h(r) = 2 pi int g(eta) e^(i r eta) d eta, complex-valued, vectorised in r."""
    if decay is None and support is None:
        raise DecayUncertified("Fourier transform of g needs a decay certificate")
    cfg = config or FOURIER_CONFIG

    def h(r):
        r_arr = np.asarray(r, dtype=float)
        rr = np.atleast_1d(r_arr).ravel()[:, None]

        def f(eta):
            return np.asarray(g(eta))[None, :] * np.exp(1j * rr * eta[None, :])

        if support is not None:
            val = _integrate(f, (-support, support), cfg)
        else:
            val = _integrate(f, (-math.inf, math.inf), cfg, decay)
        val = 2 * math.pi * np.asarray(val)
        return val.reshape(r_arr.shape) if r_arr.ndim else complex(val[0])

    return h


def fourier_h_to_g(h: Callable, decay: Decay | None = None,
                   config: QuadConfig | None = None) -> Callable:
    """g(eta) = (1/4 pi^2) int h(r) e^(-i r eta) dr, complex-valued."""
    if decay is None:
        raise DecayUncertified("inverse Fourier transform of h needs a decay certificate")
    cfg = config or FOURIER_CONFIG

    def g(eta):
        e_arr = np.asarray(eta, dtype=float)
        ee = np.atleast_1d(e_arr).ravel()[:, None]

        def f(r):
            return np.asarray(h(r))[None, :] * np.exp(-1j * ee * r[None, :])

        val = np.asarray(_integrate(f, (-math.inf, math.inf), cfg, decay)) / (4 * math.pi**2)
        return val.reshape(e_arr.shape) if e_arr.ndim else complex(val[0])

    return g


# --------------------------------------------------------------- inversion


def _derivatives(P: Callable, v: np.ndarray, step: float, levels: int):
    """P, P', P'' on an array of v >= 0."""
    d1 = getattr(P, "d1", None)
    d2 = getattr(P, "d2", None)
    if d1 is not None and d2 is not None:
        return P(v), d1(v), d2(v)
    from .quadrature import differentiate

    p0 = P(v)
    p1 = np.empty_like(v)
    p2 = np.empty_like(v)
    central = v >= step
    if central.any():
        x = v[central]
        p1[central] = differentiate(P, x, 1, step, levels).value
        p2[central] = differentiate(P, x, 2, step, levels).value
    if (~central).any():
        x = v[~central]
        p1[~central] = differentiate(P, x, 1, step, levels + 1, side="forward").value
        p2[~central] = differentiate(P, x, 2, step, levels + 1, side="forward").value
    return p0, p1, p2


def _inversion_integrand(two_k: int, P: Callable, step: float, levels: int):
    def D(v):
        shape = v.shape
        flat = v.ravel()
        p0, p1, p2 = _derivatives(P, flat, step, levels)
        s = np.sqrt(flat + 1.0)
        if two_k == 0:
            out = p1 / (2.0 * s) + s * p2
        elif two_k == 2:
            out = p2 / s - p1 / s**3 + 0.75 * p0 / s**5
        else:
            out = p2
        return out.reshape(shape)
    return D


def _w_decay(env: Envelope, u_min: float) -> Decay:
    if env.kind == "power":
        # (1 + u + w^2)^(-p) <= w^(-2p)
        return Decay("power", 2 * env.rate, env.constant, start=math.sqrt(env.start))
    a = env.rate
    # e^(-a (u + w^2)) <= e^(-a u) e^(a/4) e^(-a w)
    return Decay("exp", a, env.constant * math.exp(a / 4 - a * u_min),
                 start=math.sqrt(env.start))


def invert_to_phi(k, P: Callable, *, envelope: Envelope | None = None,
                  support: float | None = None, config: QuadConfig | None = None,
                  step: float = DIFF_STEP, levels: int = DIFF_LEVELS) -> Callable:
    """Recover Phi(u) from P_k (k in {0, 1}) or Q_0 (k = 1/2).

    With v = u + w^2 the inverse-square-root endpoint becomes regular:

        k = 0:    Phi(u) = (2/pi) int (sqrt(v+1) P'(v))' dw
        k = 1:    Phi(u) = (2/pi)(u+1) int (P(v)/sqrt(v+1))'' dw
        k = 1/2:  Phi(u) = (2/pi) sqrt(u+1) int Q_0''(v) dw

    Derivatives come from ``P.d1``/``P.d2`` when present, otherwise from
    Richardson-extrapolated finite differences (one-sided near v = 0).
    """
    w_ = explicit_weight(k)
    cfg = config or INVERT_CONFIG
    env = envelope if envelope is not None else getattr(P, "d_envelope", None)
    sup = support if support is not None else getattr(P, "support", None)
    if env is None and sup is None:
        raise DecayUncertified("inversion needs a derivative envelope or a support bound")
    D = _inversion_integrand(w_.two_k, P, step, levels)

    def phi(u):
        u_arr = np.asarray(u, dtype=float)
        uu = np.atleast_1d(u_arr).ravel()
        out = np.zeros(uu.shape)
        try:
            if sup is not None:
                live = uu < sup
                if live.any():
                    ul = uu[live][:, None]
                    scale = np.sqrt(sup - ul)
                    out[live] = np.real(_integrate(
                        lambda t: D(ul + (scale * t[None, :]) ** 2) * scale, (0.0, 1.0), cfg))
            else:
                decay = _w_decay(env, float(uu.min()))
                out[:] = np.real(_integrate(
                    lambda w: D(uu[:, None] + w[None, :] ** 2), (0.0, math.inf), cfg, decay))
        except QuadratureFailure as exc:
            raise SingularityHandlingFailure(f"inversion integral failed: {exc}") from exc
        out *= 2.0 / math.pi
        if w_.two_k == 2:
            out *= uu + 1.0
        elif w_.two_k == 1:
            out *= np.sqrt(uu + 1.0)
        return out.reshape(u_arr.shape) if u_arr.ndim else float(out[0])

    return phi


# -------------------------------------------------------- rational family


@dataclass(frozen=True)
class RationalTestFunction:
    """h(r) = 1/((r^2+a1^2)(r^2+a2^2)) - 1/((r^2+b1^2)(r^2+b2^2))."""

    alpha1: complex
    alpha2: complex
    beta1: complex
    beta2: complex

    def __post_init__(self):
        re = [complex(x).real for x in self.params]
        if not 1 < re[0] < re[1] < re[2] < re[3]:
            raise ParameterOrdering(
                "need 1 < Re alpha1 < Re alpha2 < Re beta1 < Re beta2, got "
                + ", ".join(f"{x:g}" for x in re))

    @property
    def params(self) -> tuple[complex, complex, complex, complex]:
        return tuple(complex(x) for x in (self.alpha1, self.alpha2, self.beta1, self.beta2))

    def coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        """(c, a) with g(eta) = sum_j c_j exp(-a_j |eta|) / a_j."""
        a1, a2, b1, b2 = self.params
        ca = 1 / (4 * math.pi * (a1 * a1 - a2 * a2))
        cb = 1 / (4 * math.pi * (b1 * b1 - b2 * b2))
        c = np.array([ca, -ca, -cb, cb], dtype=complex)
        a = np.array([a2, a1, b2, b1], dtype=complex)
        return c, a

    @property
    def delta(self) -> float:
        return complex(self.alpha1).real - 1 - 1e-6

    @property
    def asymptotic_constant(self) -> complex:
        """E with h(r) ~ E r^(-6)."""
        a1, a2, b1, b2 = self.params
        return b1 * b1 + b2 * b2 - a1 * a1 - a2 * a2

    def h(self, r):
        r2 = np.asarray(r) ** 2
        a1, a2, b1, b2 = self.params
        val = 1 / ((r2 + a1 * a1) * (r2 + a2 * a2)) - 1 / ((r2 + b1 * b1) * (r2 + b2 * b2))
        return _maybe_real(val)

    def g(self, eta):
        c, a = self.coefficients()
        e = np.abs(np.asarray(eta, dtype=float))
        val = np.tensordot(c / a, np.exp(-np.multiply.outer(a, e)), axes=1)
        return _maybe_real(val)

    def _g_derivs(self, eta):
        """g'(eta) and g''(eta) for eta >= 0."""
        c, a = self.coefficients()
        ex = np.exp(-np.multiply.outer(a, eta))
        return -np.tensordot(c, ex, axes=1), np.tensordot(c * a, ex, axes=1)

    def P(self, v):
        v = np.asarray(v, dtype=float)
        return self.g(2 * np.arcsinh(np.sqrt(v)))

    def P_d1(self, v):
        """P'(v) = 2 g'(eta)/sinh(eta); small eta by the series of g' with the
        vanishing orders 0 and 2 removed."""
        v = np.asarray(v, dtype=float)
        eta = 2 * np.arcsinh(np.sqrt(v))
        c, a = self.coefficients()
        out = np.empty(eta.shape, dtype=complex)
        small = eta < 0.5
        if small.any():
            e = eta[small]
            acc = np.zeros(e.shape, dtype=complex)
            term_n = 1.0
            for n in range(1, 45):
                term_n = term_n / n
                if n == 2:
                    continue
                acc += -((-1) ** n) * term_n * np.sum(c * a**n) * e**n
            out[small] = 2 * acc / np.sinh(e)
        if (~small).any():
            e = eta[~small]
            g1, _ = self._g_derivs(e)
            out[~small] = 2 * g1 / np.sinh(e)
        return _maybe_real(out)

    def P_d2(self, v):
        """P''(v) = 4 (g'' sinh eta - g' cosh eta)/sinh^3 eta; for small eta the
        numerator is summed as a series in eta whose orders 0, 1, 2 vanish."""
        v = np.asarray(v, dtype=float)
        eta = 2 * np.arcsinh(np.sqrt(v))
        c, a = self.coefficients()
        out = np.empty(eta.shape, dtype=complex)
        small = eta < 0.5
        if small.any():
            e = eta[small]
            acc = np.zeros(e.shape, dtype=complex)
            fact = 1.0
            for n in range(1, 45):
                fact *= n
                if n < 3:
                    continue
                fn = 0.5 * (1 - a * a) * ((1 - a) ** (n - 1) + (-1) ** n * (1 + a) ** (n - 1)) / fact
                acc += np.sum(c * fn) * e**n
            out[small] = 4 * acc / np.sinh(e) ** 3
        if (~small).any():
            e = eta[~small]
            g1, g2 = self._g_derivs(e)
            out[~small] = 4 * (g2 * np.sinh(e) - g1 * np.cosh(e)) / np.sinh(e) ** 3
        return _maybe_real(out)

    def strip_constant(self, grid: int = 400) -> float:
        """M with |h(r)| <= M (1 + |Re r|)^(-4-delta) on |Im r| <= 1 + delta,
        estimated as the sampled supremum times 1.05."""
        d = self.delta
        x = np.concatenate([np.linspace(0, 10, grid), np.geomspace(10, 1e4, grid)])
        y = np.linspace(-(1 + d), 1 + d, 81)
        X, Y = np.meshgrid(np.concatenate([-x[::-1], x]), y)
        vals = np.abs(self.h(X + 1j * Y)) * (1 + np.abs(X)) ** (4 + d)
        return 1.05 * float(np.max(vals))

    def g_decay(self) -> Decay:
        """|g(eta)| <= (M / 2 pi^2) e^(-(1+delta)|eta|)."""
        return Decay("exp", 1 + self.delta, self.strip_constant() / (2 * math.pi**2))

    def h_decay(self) -> Decay:
        """|h(r)| <= K |r|^(-6) for |r| >= R0 = 2 max|param|."""
        a1, a2, b1, b2 = self.params
        R0 = 2 * max(abs(x) for x in self.params)
        F = b1 * b1 * b2 * b2 - a1 * a1 * a2 * a2
        K = (abs(self.asymptotic_constant) + abs(F) / R0**2) * (4 / 3) ** 4
        return Decay("power", 6.0, K, start=R0)

    def envelopes(self, two_k: int) -> tuple[Envelope, Envelope]:
        """Bounds on |P| and on the inversion integrand for v >= 1, from
        |g^(i)(eta)| <= G_i e^(-a eta) and e^eta >= 4v."""
        c, aa = self.coefficients()
        a = complex(self.alpha1).real
        G = [float(np.sum(np.abs(c) * np.abs(aa) ** (i - 1))) for i in range(3)]
        P_env = Envelope("power", a, G[0])
        if two_k == 0:
            p, B = a + 1.5, 4**-a * (2 * G[2] + 2.63 * G[1])
        elif two_k == 2:
            p, B = a + 2.5, 4**-a * (math.sqrt(2) * G[2] + 2.5 * G[1] + 0.75 * G[0])
        else:
            p, B = a + 2.0, 4**-a * (math.sqrt(2) * G[2] + 1.5 * G[1])
        # v^(-p) <= 2^p (1+v)^(-p) for v >= 1
        return P_env, Envelope("power", p, B * 2**p, start=1.0)


def _maybe_real(val):
    val = np.asarray(val)
    if np.iscomplexobj(val) and np.all(val.imag == 0):
        val = val.real
    return val[()] if val.ndim == 0 else val


# ------------------------------------------------------------------ chains


@dataclass
class TransformChain:
    """Weight plus the quadruple (Phi, P_k or Q_0, g_k, h_k)."""

    weight: Weight
    phi: Callable | None
    P: RadialTransform
    g: Callable
    h: Callable
    provenance: dict = field(default_factory=dict)
    g_decay: Decay | None = None
    g_support: float | None = None
    h_decay: Decay | None = None
    kernel: RadialKernel | None = None
    rational: RationalTestFunction | None = None

    def invert(self, **kw) -> Callable:
        return invert_to_phi(self.weight, self.P, **kw)


def kernel_chain(k, kernel: RadialKernel, config: QuadConfig | None = None) -> TransformChain:
    """Numerical chain from a radial kernel."""
    w_ = explicit_weight(k)
    P = forward_transform(w_, kernel, config)
    g = change_variable_to_g(P)
    gd = g_decay_from_envelope(P.envelope)
    gs = g_support(kernel.support)
    h_c = fourier_g_to_h(g, gd, gs)

    def h(r):
        return np.real(h_c(r))

    prov = {"phi": "analytic", "P": "numerical", "g": "numerical", "h": "numerical"}
    return TransformChain(w_, kernel.phi, P, g, h, prov, gd, gs, None, kernel)


def rational_pair(params, k) -> TransformChain:
    """Closed-form chain for the rational family (same g and h for every
    weight; the weight only selects the inversion formula)."""
    rt = params if isinstance(params, RationalTestFunction) else RationalTestFunction(*params)
    w_ = explicit_weight(k)
    P_env, D_env = rt.envelopes(w_.two_k)
    P = RadialTransform(w_, rt.P, envelope=P_env, d_envelope=D_env, d1=rt.P_d1, d2=rt.P_d2,
                        provenance="analytic")
    prov = {"phi": "numerical", "P": "analytic", "g": "analytic", "h": "analytic"}
    return TransformChain(w_, None, P, rt.g, rt.h, prov, rt.g_decay(), None, rt.h_decay(),
                          None, rt)


# ------------------------------------------------------------ Lambda chain


class LambdaResult(NamedTuple):
    value: complex
    lower: complex  # 2 pi int_0^1
    upper: complex  # 2 pi int_1^inf
    error: float


def _rho_decay(env: Envelope, s: complex) -> Decay:
    """Bound on (rho^(s-2)) P((rho-1)^2/(4 rho)) for rho >= 1."""
    spread = abs(complex(s).real - 1)
    if env.kind == "power":
        # 1 + v = (1+rho)^2/(4 rho) >= rho/4
        rate = env.rate + 1 - spread
        if rate <= 1:
            raise DecayUncertified("Re(s) too far from 1 for the available decay")
        return Decay("power", rate, 2 * env.constant * 4**env.rate)
    if spread > 1:
        raise DecayUncertified("Re(s) must lie in [0, 2]")
    return Decay("exp", env.rate / 4, 2 * env.constant * math.exp(env.rate))


def lambda_chain(k, kernel: RadialKernel, s: complex, config: QuadConfig | None = None,
                 P: RadialTransform | None = None) -> LambdaResult:
    """Lambda_k[s(s-2)] = 2 pi int_0^inf rho^(s-2) P_k((rho-1)^2/(4 rho)) d rho,
    integrated literally in rho with the range split at rho = 1."""
    w_ = explicit_weight(k)
    cfg = config or QuadConfig(abs_tol=1e-12, rel_tol=1e-10)
    P = P or forward_transform(w_, kernel)
    s = complex(s)

    def f(r):
        return r ** (s - 2) * P((r - 1) ** 2 / (4 * r))

    lower = integrate_1d(f, (0.0, 1.0), cfg)
    if kernel.support is not None:
        top = math.exp(2 * math.asinh(math.sqrt(kernel.support)))
        upper = integrate_1d(f, (1.0, top), cfg)
    else:
        upper = integrate_1d(f, (1.0, math.inf), cfg, decay=_rho_decay(P.envelope, s))
    lo = 2 * math.pi * complex(lower.value)
    up = 2 * math.pi * complex(upper.value)
    return LambdaResult(lo + up, lo, up, 2 * math.pi * (lower.error + upper.error))


# ----------------------------------------------------- horospherical check


def horospherical_integral(kernel: RadialKernel, Z: SiegelPoint, Zp: SiegelPoint,
                           config: QuadConfig | None = None) -> float:
    """int_R int_C Phi(u(Z, n(a,b) Z')) da dabar db with da dabar = 2 dx dy.

    rho(Z, n(a,b)Z') = rho(Z,Z') + a z2' - conj(a) conj(z2) + |a|^2/2 + i b, so
    the support u <= U confines a to a disc and b to an interval."""
    if kernel.support is None:
        raise DecayUncertified("the horospherical integral needs a compactly supported kernel")
    cfg = config or QuadConfig(abs_tol=1e-8, rel_tol=1e-7)
    r, rp = rho(Z), rho(Zp)
    base = rho_pair(Z, Zp)
    z2, z2p = complex(Z.z2), complex(Zp.z2)
    S = math.sqrt((kernel.support + 1) * r * rp)
    # Re rho(Z, nZ') = (r + rp + |a - a0|^2)/2
    a0 = z2.conjugate() - z2p.conjugate()
    R2 = 2 * S - r - rp
    if R2 <= 0:
        return 0.0
    R = math.sqrt(R2)

    def re_part(x, y):
        return 0.5 * (r + rp + (x - a0.real) ** 2 + (y - a0.imag) ** 2)

    def im_shift(x, y):
        a = complex(x, y)
        return (base + a * z2p - a.conjugate() * z2.conjugate()).imag

    def half_width(x, y):
        return math.sqrt(max(S * S - re_part(x, y) ** 2, 0.0))

    def f(x, y, b):
        a = complex(x, y)
        val = base + a * z2p - a.conjugate() * z2.conjugate() + 0.5 * abs(a) ** 2 + 1j * b
        u = np.abs(val) ** 2 / (r * rp) - 1.0
        return 2.0 * kernel(u)

    def y_half(x):
        return math.sqrt(max(R2 - (x - a0.real) ** 2, 0.0))

    box = [
        (a0.real - R, a0.real + R),
        (lambda x: a0.imag - y_half(x), lambda x: a0.imag + y_half(x)),
        (lambda x, y: -im_shift(x, y) - half_width(x, y),
         lambda x, y: -im_shift(x, y) + half_width(x, y)),
    ]
    return float(np.real(integrate_nd(f, box, cfg).value))


def horospherical_check(kernel: RadialKernel, Z: SiegelPoint, Zp: SiegelPoint,
                        tol: float = 1e-4, config: QuadConfig | None = None) -> VerificationReport:
    """3D quadrature of the horospherical integral against
    2 pi rho rho' g(log rho' - log rho)."""
    t0 = time.perf_counter()
    lhs = horospherical_integral(kernel, Z, Zp, config)
    P = forward_transform(0, kernel)
    r, rp = rho(Z), rho(Zp)
    rhs = 2 * math.pi * r * rp * float(change_variable_to_g(P)(math.log(rp) - math.log(r)))
    inputs = {"kernel": kernel.name, "Z": [complex(Z.z1), complex(Z.z2)],
              "Zp": [complex(Zp.z1), complex(Zp.z2)]}
    return make_report("horospherical", inputs, lhs, rhs, tol, "rel", t0)
