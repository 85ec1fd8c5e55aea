"""Named verification checks returning VerificationReport records, plus the
acceptance battery run by ``tracekit suite``."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .common import VerificationReport, make_report
from .errors import DataError
from .geometry import (SiegelPoint, act, cayley, cayley_inv, point_pair, random_ball_point,
                       random_group_element, random_siegel_point, su21_check)
from .operators import apply_delta_k_fd, as_weight, ode_residual_ball, ode_residual_sigma, rho_power
from .plancherel import APPENDIX_NAMES, AppendixIntegral, density, density_simplified, phi0_consistency
from .spectrum import (ConjugacyClassTerm, PrimitivePair, SpectrumModel, formulation_check,
                       hyperbolic_term, oracle_orbital_integral, parse_spectrum)
from .transforms import (bump_kernel, change_variable_to_g, exp_kernel, forward_transform,
                         gaussian_kernel, horospherical_check, invert_to_phi, kernel_chain,
                         lambda_chain, rational_pair)
from .zeta import (WParams, cor39_identity, dirichlet_combination_check, duality_check,
                   fe_parity_check, residue_check, w_consistency_check)
from .transforms import RationalTestFunction

WEIGHTS = (0, 0.5, 1)
STANDARD_PARAMS = (1.5, 2.0, 2.5, 3.0)
ROUNDTRIP_GRID = (0.0, 0.3, 0.7, 1.5, 2.5, 3.5)
KERNELS = {"exp": exp_kernel, "gaussian": gaussian_kernel, "bump": bump_kernel}


def kernel_by_name(name: str):
    try:
        return KERNELS[name]()
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}; choose from {sorted(KERNELS)}") from None


def synthetic_model(c2: int = 3) -> SpectrumModel:
    """Three primitive pairs with different rotation orders."""
    return SpectrumModel(c2, (PrimitivePair(math.e**2, 1), PrimitivePair(3.0, 3),
                              PrimitivePair(5.0, 2)))


def density_check(k, n: int = 20, tol: float = 1e-12, seed: int = 42) -> VerificationReport:
    t0 = time.perf_counter()
    r = np.random.default_rng(seed).uniform(0.01, 6.0, n)
    a, b = density(k, r), density_simplified(k, r)
    i = int(np.argmax(np.abs(a - b) / np.abs(b)))
    err = float(np.max(np.abs(a - b) / np.abs(b)))
    return make_report("density", {"k": str(as_weight(k)), "points": n, "max_rel": err},
                       a[i], b[i], tol, "rel", t0)


def roundtrip_check(k, kernel_name: str, grid=ROUNDTRIP_GRID, tol: float = 1e-6) -> VerificationReport:
    """Phi -> P_k -> Phi on a grid; reports the worst grid point."""
    t0 = time.perf_counter()
    kernel = kernel_by_name(kernel_name)
    u = np.asarray(grid, dtype=float)
    back = invert_to_phi(k, forward_transform(k, kernel))(u)
    want = kernel(u)
    i = int(np.argmax(np.abs(back - want)))
    return make_report("roundtrip", {"k": str(as_weight(k)), "kernel": kernel.name, "u": u[i]},
                       back[i], want[i], tol, "abs", t0)


def lambda_check(k, r: float, kernel_name: str = "gaussian", tol: float = 1e-6) -> VerificationReport:
    """h_k(r) from the chain against Lambda_k(-1 - r^2) evaluated at s = 1 + ir."""
    t0 = time.perf_counter()
    kernel = kernel_by_name(kernel_name)
    chain = kernel_chain(k, kernel)
    lam = lambda_chain(k, kernel, complex(1, r), P=chain.P)
    return make_report("lambda-chain", {"k": str(as_weight(k)), "r": r, "kernel": kernel.name},
                       lam.value, chain.h(r), tol, "rel", t0)


def identity_check(k, params=STANDARD_PARAMS, tol: float = 1e-6) -> VerificationReport:
    return phi0_consistency(k, rational_pair(params, k), tol)


def orbital_check(k, ord2: int, norm: float = 4.0, m: int = 1, q: int = 1,
                  tol: float = 1e-6) -> VerificationReport:
    """2D orbital quadrature against the closed hyperbolic term for a bump kernel."""
    t0 = time.perf_counter()
    kernel = bump_kernel()
    pair = PrimitivePair(norm, ord2)
    lhs = oracle_orbital_integral(k, pair, m, q, kernel)
    g = change_variable_to_g(forward_transform(k, kernel))
    rhs = hyperbolic_term(k, ConjugacyClassTerm(pair, m, q), g)
    inputs = {"k": str(as_weight(k)), "N": norm, "ord2": ord2, "m": m, "q": q}
    return make_report("orbital", inputs, lhs, rhs, tol, "rel", t0)


def geom_side_check(k, model: SpectrumModel | None = None, tol: float = 1e-12) -> VerificationReport:
    return formulation_check(k, rational_pair(STANDARD_PARAMS, k), model or synthetic_model(), tol)


ODE_S = (1.5, 2.2, 2 + 0.5j)
ODE_SIGMA = (1.3, 2.0, 4.0, 8.0, 20.0)
ODE_BALL = (0.3, 0.45, 0.6, 0.75, 0.9)


def ode_check(k, s, tol: float = 1e-6) -> VerificationReport:
    """Largest residual of the radial equations over five sigma and five ball radii."""
    t0 = time.perf_counter()
    res = [ode_residual_sigma(k, s, x) for x in ODE_SIGMA] + [ode_residual_ball(k, s, r) for r in ODE_BALL]
    return make_report("ode", {"k": str(as_weight(k)), "s": complex(s)}, max(res), 0.0, tol, "abs", t0)


def fd_eigen_check(which: str, tol: float = 1e-4) -> VerificationReport:
    """Finite-difference Laplacian against the eigenvalue relation."""
    t0 = time.perf_counter()
    if which == "rho":
        Z, s = SiegelPoint(0.8 + 0.4j, -0.2 + 0.5j), 1.7
        got = apply_delta_k_fd(0, rho_power(s), Z)
        want = s * (s - 2) * Z.rho**s
        return make_report("fd-eigen", {"k": "0", "f": f"rho^{s}"}, got, want, tol, "rel", t0)
    if which == "holomorphic":
        Z = SiegelPoint(1.0 + 0.2j, 0.3)

        def f(z1, z2):
            return (2 * z1.real - abs(z2) ** 2) * z2

        got = apply_delta_k_fd(1, f, Z)
        return make_report("fd-eigen", {"k": "1", "f": "rho*z2"}, got, -f(Z.z1, Z.z2), tol, "rel", t0)
    raise ValueError("which must be 'rho' or 'holomorphic'")


def geometry_invariance_check(seed: int = 42, count: int = 100, tol: float = 1e-10) -> list[VerificationReport]:
    """Point-pair invariance, group membership and the Cayley round trip."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    worst_u, worst_m = 0.0, 0.0
    for _ in range(count):
        g = random_group_element(rng)
        Z, Zp = random_siegel_point(rng), random_siegel_point(rng)
        u0 = point_pair(Z, Zp).u
        u1 = point_pair(act(g, Z), act(g, Zp)).u
        worst_u = max(worst_u, abs(u1 - u0) / max(1.0, abs(u0)))
        mem = su21_check(g)
        worst_m = max(worst_m, mem.form_deviation, mem.det_deviation)
    worst_c = 0.0
    for _ in range(count):
        W = random_ball_point(rng)
        back = cayley_inv(cayley(W))
        worst_c = max(worst_c, abs(back.w1 - W.w1), abs(back.w2 - W.w2))
    inputs = {"seed": seed, "count": count}
    return [make_report("geometry-invariance", inputs, worst_u, 0.0, tol, "abs", t0, "point-pair"),
            make_report("geometry-invariance", inputs, worst_m, 0.0, 1e-12, "abs", t0, "membership"),
            make_report("geometry-invariance", inputs, worst_c, 0.0, 1e-12, "abs", t0, "cayley")]


def spectrum_rejection_check() -> list[VerificationReport]:
    """The loader must reject bad c2 values and norms <= 1."""
    bad = [{"c2": 4, "pairs": []}, {"c2": 0, "pairs": []}, {"c2": -3, "pairs": []},
           {"c2": 3, "pairs": [{"norm": 1.0, "ord2": 1}]},
           {"c2": 3, "pairs": [{"norm": 0.5, "ord2": 2}]}]
    out = []
    for doc in bad:
        t0 = time.perf_counter()
        try:
            parse_spectrum(doc)
            rejected = 0.0
        except DataError:
            rejected = 1.0
        out.append(make_report("spectrum-validate", {"doc": str(doc)}, rejected, 1.0, 0.0, "abs", t0))
    return out


# ----------------------------------------------------- acceptance battery


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    run: Callable[[], list[VerificationReport]]


def _c1():
    return [AppendixIntegral(n).check(r) for n in APPENDIX_NAMES for r in (0.1, 0.5, 1, 2, 5)]


def _c6():
    kernel = bump_kernel()
    pairs = [(SiegelPoint(0.5, 0), SiegelPoint(1.0, 0)),
             (SiegelPoint(0.7 + 0.3j, 0.2 - 0.1j), SiegelPoint(1.3 - 1j, 0.5j))]
    return [horospherical_check(kernel, Z, Zp) for Z, Zp in pairs]


def _c10():
    rt = RationalTestFunction(*STANDARD_PARAMS)
    models = {0: synthetic_model(), 0.5: SpectrumModel(3, (PrimitivePair(3.0, 4), PrimitivePair(2.0, 5))),
              1: synthetic_model()}
    return [dirichlet_combination_check(k, m, rt) for k, m in models.items()]


W_CHECK_PARAMS = WParams(2.0, 2.5, 3.0)
FE_XI = {0: (0.2, 0.3, 0.5, 0.7, 1.3), 0.5: (0.1, 0.25, 0.3, 0.7, 1.2), 1: (0.2, 0.3, 0.4, 0.7, 1.3)}


CRITERIA = (
    Criterion(1, "closed integrals vs quadrature", _c1),
    Criterion(2, "Plancherel density identities", lambda: [density_check(k) for k in WEIGHTS]),
    Criterion(3, "transform round trips",
              lambda: [roundtrip_check(k, n) for n in KERNELS for k in WEIGHTS]),
    Criterion(4, "Lambda chain", lambda: [lambda_check(k, r) for k in WEIGHTS for r in (0.5, 1, 2)]),
    Criterion(5, "identity-term consistency", lambda: [identity_check(k) for k in WEIGHTS]),
    Criterion(6, "horospherical identity", _c6),
    Criterion(7, "orbital oracle", lambda: [orbital_check(k, o) for k, o in ((0, 1), (0, 3), (1, 3))]),
    Criterion(8, "formulation equality", lambda: [geom_side_check(k) for k in WEIGHTS]),
    Criterion(9, "zeta duality",
              lambda: [duality_check(k, s, synthetic_model()) for k in WEIGHTS for s in (3, 4, 3 + 2j)]),
    Criterion(10, "Z'/Z combination", _c10),
    Criterion(11, "W continuation",
              lambda: [w_consistency_check(k, xi, W_CHECK_PARAMS) for k in WEIGHTS for xi in (0.3, 0.7, 1.2)]),
    Criterion(12, "parity gaps",
              lambda: [fe_parity_check(k, xi, W_CHECK_PARAMS) for k in WEIGHTS for xi in FE_XI[k]]),
    Criterion(13, "trivial-zero multiplicities",
              lambda: [residue_check(k, m, 3) for k in WEIGHTS for m in (0, 1, 2)]),
    Criterion(14, "ODE residuals", lambda: [ode_check(k, s) for k in WEIGHTS for s in ODE_S]),
    Criterion(15, "finite-difference eigen-relations",
              lambda: [fd_eigen_check("rho"), fd_eigen_check("holomorphic")]),
    Criterion(16, "geometry invariance", geometry_invariance_check),
    Criterion(17, "integration by parts", lambda: [cor39_identity(x) for x in (0.25, 0.5, 0.75)]),
    Criterion(18, "spectrum validation", spectrum_rejection_check),
)
