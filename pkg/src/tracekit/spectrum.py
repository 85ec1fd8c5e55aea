"""Synthetic length spectra, hyperbolic orbital terms and the geometric side of
the trace formula."""

from __future__ import annotations

import cmath
import json
import math
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .common import TailRecord, TruncationConfig, VerificationReport, make_report
from .errors import DecayUncertified, DegenerateDenominator, SpectrumError, TailUnbounded
from .operators import as_weight
from .plancherel import identity_term, validate_c2
from .quadrature import QuadConfig, integrate_nd, neumaier_sum

NORM_FLOOR = 1 + 1e-6


@dataclass(frozen=True)
class PrimitivePair:
    norm: float
    ord2: int = 1

    def __post_init__(self):
        if not self.norm >= NORM_FLOOR:
            raise SpectrumError(f"norm must exceed 1 + 1e-6, got {self.norm}")
        if int(self.ord2) != self.ord2 or self.ord2 < 1:
            raise SpectrumError(f"ord2 must be a positive integer, got {self.ord2}")

    @property
    def theta2(self) -> float:
        return 2 * math.pi / self.ord2

    @property
    def log_norm(self) -> float:
        return math.log(self.norm)


@dataclass(frozen=True)
class ConjugacyClassTerm:
    pair: PrimitivePair
    m: int
    q: int

    def __post_init__(self):
        if self.m < 1 or not 1 <= self.q <= self.pair.ord2:
            raise ValueError("need m >= 1 and 1 <= q <= ord2")

    @property
    def norm(self) -> float:
        return self.pair.norm**self.m

    @property
    def theta(self) -> float:
        return self.q * self.pair.theta2


@dataclass(frozen=True)
class SpectrumModel:
    c2: int
    pairs: tuple[PrimitivePair, ...] = ()

    def __post_init__(self):
        validate_c2(self.c2)
        object.__setattr__(self, "pairs", tuple(self.pairs))

    def terms(self, m_max: int) -> Iterable[ConjugacyClassTerm]:
        for p in self.pairs:
            for m in range(1, m_max + 1):
                for q in range(1, p.ord2 + 1):
                    yield ConjugacyClassTerm(p, m, q)


def parse_spectrum(data: dict) -> tuple[SpectrumModel, list[str]]:
    """Validate a decoded spectrum document; returns (model, warnings)."""
    if not isinstance(data, dict) or "c2" not in data or "pairs" not in data:
        raise SpectrumError('spectrum must be an object with keys "c2" and "pairs"')
    c2 = data["c2"]
    if isinstance(c2, bool) or not isinstance(c2, (int, float)) or int(c2) != c2:
        raise SpectrumError(f"c2 must be an integer, got {c2!r}")
    validate_c2(c2)
    if not isinstance(data["pairs"], list):
        raise SpectrumError('"pairs" must be a list')
    pairs, seen, notes = [], set(), []
    for i, entry in enumerate(data["pairs"]):
        if not isinstance(entry, dict) or "norm" not in entry or "ord2" not in entry:
            raise SpectrumError(f'pair {i} needs "norm" and "ord2"')
        norm, ord2 = entry["norm"], entry["ord2"]
        if isinstance(norm, bool) or not isinstance(norm, (int, float)):
            raise SpectrumError(f"pair {i}: norm must be a number")
        if isinstance(ord2, bool) or not isinstance(ord2, (int, float)) or int(ord2) != ord2:
            raise SpectrumError(f"pair {i}: ord2 must be an integer")
        if not norm > 1:
            raise SpectrumError(f"pair {i}: norm {norm} must be > 1")
        key = (float(norm), int(ord2))
        if key in seen:
            notes.append(f"pair {i}: duplicate (norm={norm}, ord2={ord2}) dropped")
            continue
        seen.add(key)
        pairs.append(PrimitivePair(float(norm), int(ord2)))
    return SpectrumModel(int(c2), tuple(pairs)), notes


def load_spectrum(path) -> SpectrumModel:
    """Read a spectrum JSON file; duplicates are dropped with a warning."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpectrumError(f"{path}: invalid JSON ({exc})") from exc
    model, notes = parse_spectrum(data)
    for note in notes:
        warnings.warn(note, stacklevel=2)
    return model


# -------------------------------------------------------- orbital terms


def poincare_halfdet(N: float, theta: float) -> float:
    """(N^1/2 - N^-1/2) |N^1/4 e^(3i theta/2) - N^-1/4 e^(-3i theta/2)|^2.

    Evaluated as 8 sinh(u) (sinh^2(u/2) + sin^2(3 theta/2)) with u = (1/2) ln N,
    which has no cancellation as N -> 1 or 3 theta -> 0 mod 2 pi."""
    if N <= 1:
        raise DegenerateDenominator(f"norm {N} must exceed 1")
    u = 0.5 * math.log(N)
    return 8 * math.sinh(u) * (math.sinh(0.5 * u) ** 2 + math.sin(1.5 * theta) ** 2)


def poincare_halfdet_literal(N: float, theta: float) -> float:
    """The N-based expression evaluated as written."""
    ph = cmath.exp(1.5j * theta)
    return (math.sqrt(N) - 1 / math.sqrt(N)) * abs(N**0.25 * ph - N**-0.25 / ph) ** 2


def poincare_halfdet_exp(u: float, theta: float) -> float:
    """The same quantity in terms of u = (1/2) ln N:
    2 sinh(u) (2 cosh(u) - 2 cos(3 theta))."""
    return 2 * math.sinh(u) * (2 * math.cosh(u) - 2 * math.cos(3 * theta))


def poincare_matrix(N: float, theta: float) -> np.ndarray:
    """Upper-triangular 6x6 representative of the linearised return map."""
    u = 0.5 * math.log(N)
    a = cmath.exp(u + 3j * theta)
    b = cmath.exp(-u - 3j * theta)
    P = np.zeros((6, 6), dtype=complex)
    P[0, 0] = math.exp(2 * u)
    P[1, 1] = P[2, 2] = a
    P[1, 2] = 1.0
    P[3, 3] = math.exp(-2 * u)
    P[4, 4] = P[5, 5] = b
    P[4, 5] = 1.0
    return P


def poincare_halfdet_matrix(N: float, theta: float) -> float:
    """|det(I - P)|^(1/2) by LU determinant of the 6x6 map."""
    return math.sqrt(abs(np.linalg.det(np.eye(6) - poincare_matrix(N, theta))))


def _denominator(term: ConjugacyClassTerm, formulation: str) -> float:
    if term.pair.norm < NORM_FLOOR:
        raise DegenerateDenominator(f"norm {term.pair.norm} too close to 1")
    if formulation == "explicit":
        return poincare_halfdet(term.norm, term.theta)
    if formulation == "poincare":
        return poincare_halfdet_matrix(term.norm, term.theta)
    raise ValueError(f"unknown formulation {formulation!r}")


def hyperbolic_term(k, term: ConjugacyClassTerm, g: Callable,
                    formulation: str = "explicit") -> complex:
    """(6 pi/ord2) ln N e^(2kiq theta2) g(m ln N) / halfdet(N^m, q theta2)."""
    w = as_weight(k)
    p = term.pair
    gval = complex(np.asarray(g(term.m * p.log_norm)))
    phase = cmath.exp(1j * w.two_k * term.theta)
    return 6 * math.pi / p.ord2 * p.log_norm * phase * gval / _denominator(term, formulation)


def oracle_orbital_integral(k, pair: PrimitivePair, m: int, q: int, phi,
                            config: QuadConfig | None = None) -> complex:
    """Direct 2D quadrature of the reduced orbital integral

        (3 pi/ord2) ln N e^(2ki theta) int int H Phi(f(u)^2 + e(u,v)^2 - 1) du dv

    with f(u) = (mu+1/mu)(u+1)/2 - u cos 3 theta, e = (mu-1/mu) v/2 + u sin 3 theta
    and H = ((f + i e)/|f + i e|)^(2k)."""
    if phi.support is None:
        raise DecayUncertified("the orbital oracle needs a compactly supported kernel")
    w = as_weight(k)
    cfg = config or QuadConfig(abs_tol=1e-11, rel_tol=1e-9)
    mu = pair.norm ** (m / 2)
    theta = q * pair.theta2
    c3, s3 = math.cos(3 * theta), math.sin(3 * theta)
    A = 0.5 * (mu + 1 / mu)
    Bm = 0.5 * (mu - 1 / mu)
    top = math.sqrt(phi.support + 1)
    if A >= top:
        return 0j
    u_max = (top - A) / (A - c3)

    def f_of(u):
        return A * (u + 1) - u * c3

    def e_half(u):
        return math.sqrt(max(top**2 - f_of(u) ** 2, 0.0))

    def integrand(u, v):
        f = f_of(u)
        e = Bm * v + u * s3
        val = phi(f * f + e * e - 1.0)
        if w.two_k:
            z = f + 1j * e
            val = val * (z / np.abs(z)) ** w.two_k
        return val

    box = [(0.0, u_max),
           (lambda u: (-e_half(u) - u * s3) / Bm, lambda u: (e_half(u) - u * s3) / Bm)]
    res = integrate_nd(integrand, box, cfg)
    pref = 3 * math.pi / pair.ord2 * pair.log_norm * cmath.exp(1j * w.two_k * theta)
    return complex(pref * res.value)


# --------------------------------------------------------- geometric side


@dataclass
class GeometricSide:
    value: complex
    identity: float
    hyperbolic: complex
    m_max: dict = field(default_factory=dict)
    tail: TailRecord = field(default_factory=TailRecord)


def _term_majorant(pair: PrimitivePair, m: int) -> float:
    """Upper bound for sum_q |term| / |g(m ln N)|."""
    N = pair.norm**m
    lower = (N**0.25 - N**-0.25) ** 2
    return 6 * math.pi * pair.log_norm / ((math.sqrt(N) - 1 / math.sqrt(N)) * lower)


def choose_m_max(pair: PrimitivePair, g_decay, g_support, tol: float,
                 cap: int = 10_000) -> tuple[int, float]:
    """Least m_max whose certified tail is below tol; returns (m_max, tail)."""
    L = pair.log_norm
    if g_support is not None:
        return max(1, int(math.floor(g_support / L))), 0.0
    if g_decay is None:
        raise TailUnbounded("no decay certificate for g; the hyperbolic sum cannot be truncated")
    if g_decay.kind != "exp":
        raise TailUnbounded("the hyperbolic tail needs an exponential bound on g")
    # term majorants decrease at least geometrically with ratio N^(-rate)
    ratio = pair.norm ** (-g_decay.rate)
    for m in range(1, cap + 1):
        nxt = _term_majorant(pair, m + 1) * g_decay.constant * math.exp(-g_decay.rate * (m + 1) * L)
        tail = nxt / (1 - ratio)
        if tail < tol:
            return m, tail
    raise TailUnbounded(f"tail still above {tol:g} at m = {cap}")


def hyperbolic_sum(k, g: Callable, model: SpectrumModel, *, g_decay=None, g_support=None,
                   trunc: TruncationConfig | None = None, formulation: str = "explicit",
                   tol: float = 1e-10) -> tuple[complex, dict, TailRecord]:
    """Sum of hyperbolic_term over all pairs, q and m <= m_max, ordered by
    m ln N and added with compensated summation."""
    trunc = trunc or TruncationConfig()
    tails = TailRecord()
    m_max = {}
    items = []
    for p in model.pairs:
        if trunc.m_max is not None:
            mm = trunc.m_max
        else:
            mm, t = choose_m_max(p, g_decay, g_support, tol / len(model.pairs))
            tails.add(f"N={p.norm:g},ord2={p.ord2}", t)
        m_max[(p.norm, p.ord2)] = mm
        for m in range(1, mm + 1):
            for q in range(1, p.ord2 + 1):
                items.append((m * p.log_norm, ConjugacyClassTerm(p, m, q)))
    items.sort(key=lambda it: it[0])
    vals = np.array([hyperbolic_term(k, t, g, formulation) for _, t in items], dtype=complex)
    total = complex(neumaier_sum(vals)) if vals.size else 0j
    return total, m_max, tails


def geometric_side(k, chain, model: SpectrumModel, trunc: TruncationConfig | None = None,
                   formulation: str = "explicit") -> GeometricSide:
    """Identity term plus the hyperbolic sum; ``formulation`` selects the
    explicit norm/phase denominator or the Poincare-map determinant."""
    ident = identity_term(k, chain.h, model.c2, chain.h_decay)
    hyp, m_max, tails = hyperbolic_sum(k, chain.g, model, g_decay=chain.g_decay,
                                       g_support=chain.g_support, trunc=trunc,
                                       formulation=formulation)
    return GeometricSide(ident + hyp, ident, hyp, m_max, tails)


def formulation_check(k, chain, model: SpectrumModel, tol: float = 1e-12) -> VerificationReport:
    t0 = time.perf_counter()
    a = geometric_side(k, chain, model, formulation="explicit")
    b = geometric_side(k, chain, model, formulation="poincare")
    inputs = {"k": str(as_weight(k)), "pairs": len(model.pairs), "c2": model.c2}
    return make_report("geom-side", inputs, b.value, a.value, tol, "rel", t0)
