"""Adaptive quadrature, contour integration and Richardson differentiation.

All integrators accept vectorised integrands: ``f(x)`` receives a 1-D array of
nodes and returns an array whose last axis matches the nodes.  Leading axes are
treated as independent components that share one panel subdivision, which keeps
batches of related integrals (e.g. a transform evaluated on a grid) cheap and
smooth in their parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import MaxSubdivisions, StepUnderflow, UncertifiedTail

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (positive half, centre last).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
# Gauss nodes sit at odd positions of the Kronrod half-grid.
for _i, _w in zip((1, 3, 5), _WG[:3]):
    GAUSS_WEIGHTS[_i] = _w
    GAUSS_WEIGHTS[14 - _i] = _w
GAUSS_WEIGHTS[7] = _WG[3]


@dataclass(frozen=True)
class QuadConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 10_000

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")

    def scaled(self, factor: float) -> "QuadConfig":
        return replace(self, abs_tol=self.abs_tol * factor, rel_tol=self.rel_tol * factor)


@dataclass(frozen=True)
class Decay:
    """Tail certificate for an integrand on an unbounded axis.

    ``kind="exp"``:   |f(x)| <= constant * exp(-rate * |x|)
    ``kind="power"``: |f(x)| <= constant * |x|**(-rate), rate > 1
    The bound is required for |x| beyond ``start``.
    """

    kind: str
    rate: float
    constant: float
    start: float = 0.0

    def __post_init__(self):
        if self.kind not in ("exp", "power"):
            raise ValueError(f"unknown decay kind {self.kind!r}")
        if self.rate <= 0 or (self.kind == "power" and self.rate <= 1):
            raise ValueError("decay rate too small to certify a tail")
        if self.constant < 0:
            raise ValueError("decay constant must be non-negative")

    def tail(self, x: float) -> float:
        """Bound on the integral of |f| over [x, inf) for x > 0."""
        if self.kind == "exp":
            return self.constant * math.exp(-self.rate * x) / self.rate
        return self.constant * x ** (1.0 - self.rate) / (self.rate - 1.0)

    def cutoff(self, target: float, lower: float) -> float:
        """Smallest convenient x >= lower whose tail bound is below target."""
        lower = max(lower, self.start, 1e-300)
        if self.constant == 0:
            return max(lower, 1.0)
        if self.kind == "exp":
            x = math.log(self.constant / (self.rate * target)) / self.rate
        else:
            x = (self.constant / ((self.rate - 1.0) * target)) ** (1.0 / (self.rate - 1.0))
        return max(x, lower, 1.0)


class QuadResult(NamedTuple):
    value: object
    error: float


def neumaier_sum(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Compensated summation along one axis, in index order."""
    values = np.moveaxis(np.asarray(values), axis, 0)
    total = np.zeros(values.shape[1:], dtype=values.dtype)
    comp = np.zeros_like(total)
    for v in values:
        t = total + v
        big = np.abs(total) >= np.abs(v)
        comp = comp + np.where(big, (total - t) + v, (v - t) + total)
        total = t
    return total + comp


def _evaluate(f, lo: np.ndarray, hi: np.ndarray):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = (centre[:, None] + half[:, None] * NODES[None, :]).ravel()
    vals = np.asarray(f(x))
    if vals.shape[-1:] != x.shape:
        vals = np.broadcast_to(vals, vals.shape[:-1] + x.shape) if vals.ndim else np.full(x.shape, vals)
    vals = vals.reshape(vals.shape[:-1] + (lo.size, 15))
    kron = (vals * KRONROD_WEIGHTS).sum(axis=-1) * half
    gauss = (vals * GAUSS_WEIGHTS).sum(axis=-1) * half
    err = np.abs(kron - gauss)
    resabs = (np.abs(vals) * KRONROD_WEIGHTS).sum(axis=-1) * np.abs(half)
    if err.ndim > 1:
        err = err.reshape(-1, lo.size).max(axis=0)
        resabs = resabs.reshape(-1, lo.size).max(axis=0)
    if not np.all(np.isfinite(kron)):
        raise MaxSubdivisions("integrand produced non-finite values")
    # estimate already at rounding level: further splitting cannot help
    floor = 50.0 * np.finfo(float).eps * resabs
    return kron, err, floor


def _sum_panels(kron: np.ndarray):
    if kron.ndim == 1:
        if np.iscomplexobj(kron):
            return complex(math.fsum(kron.real), math.fsum(kron.imag))
        return math.fsum(kron)
    return neumaier_sum(kron, axis=-1)


def _adaptive(f, breaks: np.ndarray, cfg: QuadConfig) -> QuadResult:
    lo, hi = breaks[:-1].astype(float), breaks[1:].astype(float)
    kron, err, floor = _evaluate(f, lo, hi)
    while True:
        total = np.asarray(_sum_panels(kron))
        total_err = float(math.fsum(err))
        tol = max(cfg.abs_tol, cfg.rel_tol * float(np.max(np.abs(total))))
        if total_err <= tol:
            return QuadResult(total[()], total_err)
        if lo.size >= cfg.max_subdivisions:
            raise MaxSubdivisions(
                f"reached {lo.size} panels with error estimate {total_err:.3e} > {tol:.3e}",
                value=total, error=total_err)
        width = hi - lo
        scale = np.maximum(np.abs(lo), np.abs(hi))
        splittable = (width > 64 * np.finfo(float).eps * np.maximum(scale, 1e-300)) & (err > floor)
        share = tol / lo.size
        split = splittable & (err > share)
        if not split.any():
            candidates = np.where(splittable, err, -1.0)
            best = int(np.argmax(candidates))
            if candidates[best] < 0:
                if total_err <= max(tol, float(math.fsum(floor))):
                    return QuadResult(total[()], total_err)
                raise MaxSubdivisions(
                    f"no panel can be refined further; error estimate {total_err:.3e}",
                    value=total, error=total_err)
            split[best] = True
        idx = np.flatnonzero(split)
        mid = 0.5 * (lo[idx] + hi[idx])
        new_lo = np.concatenate([lo[idx], mid])
        new_hi = np.concatenate([mid, hi[idx]])
        nk, ne, nf = _evaluate(f, new_lo, new_hi)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        kron = np.concatenate([kron[..., keep], nk], axis=-1)
        err = np.concatenate([err[keep], ne])
        floor = np.concatenate([floor[keep], nf])
        order = np.argsort(lo, kind="stable")
        lo, hi, kron, err, floor = lo[order], hi[order], kron[..., order], err[order], floor[order]


def _finite_breaks(a: float, b: float, points: Sequence[float]) -> np.ndarray:
    inner = sorted(p for p in points if a < p < b)
    return np.array([a, *inner, b], dtype=float)


def _map_semi_infinite(f, a: float, direction: float):
    """x = a + direction * t/(1-t); returns integrand in t."""

    def g(t):
        t = np.asarray(t, dtype=float)
        one = 1.0 - t
        x = a + direction * t / one
        return np.asarray(f(x)) / (one * one)

    return g


def integrate_1d(
    f: Callable,
    interval: tuple[float, float],
    config: QuadConfig | None = None,
    *,
    decay: Decay | None = None,
    singular: str | None = None,
    points: Sequence[float] = (),
) -> QuadResult:
    """Integrate ``f`` over ``interval`` with adaptive Gauss-Kronrod panels.

    ``singular`` declares an inverse square-root endpoint singularity at
    ``"left"``, ``"right"`` or ``"both"`` ends of a finite interval, removed by
    the substitution x = a + w**2.  Unbounded intervals need a ``decay``
    certificate, which fixes a cutoff and contributes its tail bound to the
    returned error.
    """
    cfg = config or QuadConfig()
    a, b = float(interval[0]), float(interval[1])
    if a == b:
        return QuadResult(np.zeros(np.shape(f(np.array([a])))[:-1])[()] * 0.0, 0.0)
    if a > b:
        res = integrate_1d(f, (b, a), cfg, decay=decay, singular=_flip(singular), points=points)
        return QuadResult(-res.value, res.error)

    if math.isinf(a) or math.isinf(b):
        if singular:
            raise ValueError("singular endpoints are only supported on finite intervals")
        if decay is None:
            raise UncertifiedTail("unbounded interval requires a decay certificate")
        if math.isinf(a) and math.isinf(b):
            left = integrate_1d(f, (-math.inf, 0.0), cfg.scaled(0.5), decay=decay,
                                points=[p for p in points if p < 0])
            right = integrate_1d(f, (0.0, math.inf), cfg.scaled(0.5), decay=decay,
                                 points=[p for p in points if p > 0])
            return QuadResult(left.value + right.value, left.error + right.error)
        tail_target = 0.1 * cfg.abs_tol
        if math.isinf(b):
            cut = decay.cutoff(tail_target, max(a, 0.0) + 1.0)
            cut = max(cut, a + 1.0)
            g = _map_semi_infinite(f, a, 1.0)
            tcut = (cut - a) / (1.0 + cut - a)
            tpts = [(p - a) / (1.0 + p - a) for p in points if a < p < cut]
            res = _adaptive(g, _finite_breaks(0.0, tcut, tpts), cfg.scaled(0.9))
            return QuadResult(res.value, res.error + decay.tail(cut))
        cut = decay.cutoff(tail_target, max(-b, 0.0) + 1.0)
        cut = max(cut, -b + 1.0)
        g = _map_semi_infinite(f, b, -1.0)
        tcut = (cut + b) / (1.0 + cut + b)
        tpts = [(b - p) / (1.0 + b - p) for p in points if -cut < p < b]
        res = _adaptive(g, _finite_breaks(0.0, tcut, tpts), cfg.scaled(0.9))
        return QuadResult(res.value, res.error + decay.tail(cut))

    if singular == "both":
        m = 0.5 * (a + b)
        left = integrate_1d(f, (a, m), cfg.scaled(0.5), singular="left", points=points)
        right = integrate_1d(f, (m, b), cfg.scaled(0.5), singular="right", points=points)
        return QuadResult(left.value + right.value, left.error + right.error)
    if singular == "left":
        def g(w):
            return np.asarray(f(a + w * w)) * (2.0 * w)
        wpts = [math.sqrt(p - a) for p in points if a < p < b]
        return _adaptive(g, _finite_breaks(0.0, math.sqrt(b - a), wpts), cfg)
    if singular == "right":
        def g(w):
            return np.asarray(f(b - w * w)) * (2.0 * w)
        wpts = [math.sqrt(b - p) for p in points if a < p < b]
        return _adaptive(g, _finite_breaks(0.0, math.sqrt(b - a), wpts), cfg)
    if singular is not None:
        raise ValueError(f"unknown singularity flag {singular!r}")
    return _adaptive(f, _finite_breaks(a, b, points), cfg)


def _flip(flag):
    return {"left": "right", "right": "left"}.get(flag, flag)


def integrate_nd(
    f: Callable,
    box: Sequence,
    config: QuadConfig | None = None,
) -> QuadResult:
    """Nested adaptive integration in 2 or 3 dimensions.

    ``box`` lists one entry per axis, outermost first: ``(lo, hi)`` or
    ``(lo, hi, decay)``.  Bounds of inner axes may be callables of the outer
    coordinates.  ``f(x0, ..., xn)`` is called with scalar outer coordinates and
    an array for the innermost axis.
    """
    cfg = config or QuadConfig()
    if len(box) not in (2, 3):
        raise ValueError("integrate_nd supports 2 or 3 dimensions")
    return _nested(f, list(box), (), cfg)


def _axis(spec, outer):
    lo, hi = spec[0], spec[1]
    decay = spec[2] if len(spec) > 2 else None
    lo = lo(*outer) if callable(lo) else lo
    hi = hi(*outer) if callable(hi) else hi
    return float(lo), float(hi), decay


def _nested(f, box, outer, cfg):
    lo, hi, decay = _axis(box[0], outer)
    if len(box) == 1:
        if lo >= hi:
            return QuadResult(0.0, 0.0)
        return integrate_1d(lambda x: f(*outer, x), (lo, hi), cfg, decay=decay)
    if lo >= hi:
        return QuadResult(0.0, 0.0)
    width = hi - lo if math.isfinite(hi - lo) else 1.0
    inner_cfg = replace(cfg, abs_tol=0.1 * cfg.abs_tol / max(width, 1.0), rel_tol=0.1 * cfg.rel_tol)
    inner_err = [0.0]

    def outer_f(xs):
        out = np.empty(np.shape(xs), dtype=complex)
        for i, x in enumerate(np.atleast_1d(xs)):
            r = _nested(f, box[1:], outer + (float(x),), inner_cfg)
            out[i] = r.value
            inner_err[0] = max(inner_err[0], r.error)
        return out

    res = integrate_1d(outer_f, (lo, hi), cfg, decay=decay)
    value = res.value
    if abs(np.imag(value)) == 0.0:
        value = float(np.real(value))
    return QuadResult(value, res.error + inner_err[0] * width)


@dataclass(frozen=True)
class ContourSpec:
    center: complex
    radius: float
    nodes: int = 256

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.nodes < 64 or self.nodes & (self.nodes - 1):
            raise ValueError("nodes must be a power of two and at least 64")

    def points(self, n: int | None = None) -> np.ndarray:
        n = n or self.nodes
        return self.center + self.radius * np.exp(2j * np.pi * np.arange(n) / n)


def contour_integral(f: Callable, spec: ContourSpec) -> QuadResult:
    """(1/2πi)∮ f(z) dz over a circle by the trapezoid rule.

    The error estimate compares against the rule on every other node.
    """
    z = spec.points()
    vals = np.asarray(f(z), dtype=complex) * (z - spec.center)
    full = neumaier_sum(vals) / spec.nodes
    half = neumaier_sum(vals[::2]) / (spec.nodes // 2)
    return QuadResult(complex(full), float(abs(full - half)))


_CENTRAL = {
    1: (np.array([-1.0, 1.0]), np.array([-0.5, 0.5])),
    2: (np.array([-1.0, 0.0, 1.0]), np.array([1.0, -2.0, 1.0])),
}
_FORWARD = {
    1: (np.array([0.0, 1.0, 2.0]), np.array([-1.5, 2.0, -0.5])),
    2: (np.array([0.0, 1.0, 2.0, 3.0]), np.array([2.0, -5.0, 4.0, -1.0])),
}


def differentiate(
    f: Callable,
    x,
    order: int = 1,
    h: float = 1e-3,
    levels: int = 2,
    side: str = "central",
) -> QuadResult:
    """Finite-difference derivative with Richardson extrapolation.

    Central stencils have error series in h**2, h**4, ...; one-sided stencils
    (``side="forward"`` or ``"backward"``) are second order with all higher
    powers present.  ``x`` may be an array (vectorised ``f``) or complex.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if h < 1e-6:
        raise StepUnderflow(f"step {h:g} below 1e-6")
    if side == "central":
        offsets, coeffs = _CENTRAL[order]
        powers = [2 * (i + 1) for i in range(levels)]
    elif side in ("forward", "backward"):
        offsets, coeffs = _FORWARD[order]
        if side == "backward":
            offsets = -offsets
            coeffs = coeffs * (-1.0) ** order
        powers = [2 + i for i in range(levels)]
    else:
        raise ValueError(f"unknown side {side!r}")

    x = np.asarray(x)
    rows = []
    for lvl in range(levels + 1):
        step = h / 2**lvl
        pts = x[..., None] + step * offsets
        vals = np.asarray(f(pts.ravel())).reshape(pts.shape)
        row = [(vals * coeffs).sum(axis=-1) / step**order]
        for j, p in enumerate(powers[:lvl]):
            fac = 2.0**p
            row.append((fac * row[j] - rows[-1][j]) / (fac - 1.0))
        rows.append(row)
    best = rows[-1][-1]
    prev = rows[-2][-1] if levels else best
    err = float(np.max(np.abs(best - prev))) if levels else float("nan")
    return QuadResult(best[()] if np.ndim(best) == 0 else best, err)


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w
