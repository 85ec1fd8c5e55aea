"""Command-line front end: every check prints JSON-lines reports.

Exit codes: 0 all reports pass, 1 numerical failure, 2 usage error,
3 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import re
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import checks
from .common import VerificationReport, make_report
from .operators import as_weight
from .errors import DataError, DomainError, NumericalError, TracekitError
from .geometry import SiegelPoint
from .plancherel import APPENDIX_NAMES, AppendixIntegral, density
from .spectrum import load_spectrum, parse_spectrum
from .transforms import RationalTestFunction, bump_kernel, horospherical_check
from .zeta import (WParams, cor39_identity, dirichlet_combination_check, duality_check,
                   fe_parity_check, residue_check, w_consistency_check, zeta_log_deriv,
                   zeta_product)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``a+bi``, ``a-bi``, ``bi`` or ``i``."""
    t = text.strip().replace(" ", "")
    if not t or "j" in t:
        raise argparse.ArgumentTypeError(f"invalid complex literal {text!r}; use a+bi")
    if t.endswith("i"):
        body = t[:-1]
        # split at the last sign that is not part of an exponent
        m = re.match(r"^(.*?)([+-]?)([0-9.]*(?:[eE][+-]?[0-9]+)?)$", body)
        re_part, sign, mag = m.group(1), m.group(2), m.group(3)
        try:
            imag = float(sign + (mag or "1"))
            real = float(re_part) if re_part else 0.0
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid complex literal {text!r}; use a+bi") from None
        return complex(real, imag)
    try:
        return complex(float(t), 0.0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid complex literal {text!r}; use a+bi") from None


def parse_weight(text: str) -> float:
    table = {"0": 0.0, "1/2": 0.5, "0.5": 0.5, "1": 1.0}
    if text.strip() not in table:
        raise argparse.ArgumentTypeError(f"weight must be one of 0, 1/2, 1; got {text!r}")
    return table[text.strip()]


def parse_params(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    return vals


def _emit(report: VerificationReport, out) -> bool:
    out.write(json.dumps(report.as_dict(), default=str) + "\n")
    out.flush()
    return report.passed


def _tol(args, default: float) -> float:
    return args.tol if args.tol is not None else default


def _model(args):
    if getattr(args, "spectrum", None):
        return load_spectrum(args.spectrum)
    return checks.synthetic_model()


def _weights(args):
    return [args.k] if args.k is not None else list(checks.WEIGHTS)


# ------------------------------------------------------------- commands


def cmd_appendix(args):
    names = APPENDIX_NAMES if args.which == "all" else (args.which,)
    rs = [args.r] if args.r is not None else [0.1, 0.5, 1, 2, 5]
    return [AppendixIntegral(n).check(r, _tol(args, 1e-8)) for n in names for r in rs]


def cmd_roundtrip(args):
    kernels = [args.kernel] if args.kernel else list(checks.KERNELS)
    return [checks.roundtrip_check(k, n, tol=_tol(args, 1e-6)) for n in kernels for k in _weights(args)]


def cmd_lambda(args):
    rs = [args.r] if args.r is not None else [0.5, 1, 2]
    return [checks.lambda_check(k, r, args.kernel, _tol(args, 1e-6)) for k in _weights(args) for r in rs]


def cmd_horospherical(args):
    Z = SiegelPoint(args.z1, args.z2).check()
    Zp = SiegelPoint(args.zp1, args.zp2).check()
    return [horospherical_check(bump_kernel(args.support), Z, Zp, _tol(args, 1e-4))]


def cmd_identity(args):
    return [checks.identity_check(k, args.params, _tol(args, 1e-6)) for k in _weights(args)]


def cmd_orbital(args):
    return [checks.orbital_check(args.k if args.k is not None else 0, args.ord2, args.norm,
                                 args.m, args.q, _tol(args, 1e-6))]


def cmd_geom_side(args):
    model = _model(args)
    return [checks.geom_side_check(k, model, _tol(args, 1e-12)) for k in _weights(args)]


def cmd_zeta(args):
    model = _model(args)
    out = []
    for k in _weights(args):
        logz = zeta_product(k, args.s, model)
        ld = zeta_log_deriv(k, args.s, model)
        rep = make_report("zeta", {"k": str(as_weight(k)), "s": args.s, "quantity": "log Z, Z'/Z"},
                          logz, ld, math.inf, "abs", None,
                          note="lhs = log Z_k(s), rhs = Z'_k/Z_k(s)")
        out.append(rep)
    return out


def cmd_zeta_duality(args):
    model = _model(args)
    ss = [args.s] if args.s is not None else [3, 4, 3 + 2j]
    return [duality_check(k, s, model, _tol(args, 1e-8)) for k in _weights(args) for s in ss]


def cmd_prop36(args):
    model = _model(args)
    rt = RationalTestFunction(*args.params)
    return [dirichlet_combination_check(k, model, rt, _tol(args, 1e-8)) for k in _weights(args)]


def _wparams(args):
    if len(args.wparams) != 3:
        raise UsageError("--wparams needs three values alpha2,beta1,beta2")
    return WParams(*args.wparams)


def cmd_w_consistency(args):
    p = _wparams(args)
    xs = [args.xi] if args.xi is not None else [0.3, 0.7, 1.2]
    return [w_consistency_check(k, xi, p, _tol(args, 1e-6)) for k in _weights(args) for xi in xs]


def cmd_fe(args):
    p = _wparams(args)
    out = []
    for k in _weights(args):
        xs = [args.xi] if args.xi is not None else checks.FE_XI[k]
        out += [fe_parity_check(k, xi, p, tol=_tol(args, 1e-8)) for xi in xs]
    return out


def cmd_residue(args):
    ms = [args.m] if args.m is not None else [0, 1, 2]
    return [residue_check(k, m, args.c2, _tol(args, 1e-6)) for k in _weights(args) for m in ms]


def cmd_cor39(args):
    xs = [args.x] if args.x is not None else [0.25, 0.5, 0.75]
    return [cor39_identity(x, _tol(args, 1e-8)) for x in xs]


def cmd_ode(args):
    ss = [args.s] if args.s is not None else list(checks.ODE_S)
    return [checks.ode_check(k, s, _tol(args, 1e-6)) for k in _weights(args) for s in ss]


def cmd_geometry(args):
    reps = checks.geometry_invariance_check(args.seed, args.count)
    if args.tol is not None:
        reps = [make_report(r.check, r.inputs, r.lhs, r.rhs, args.tol, r.mode, None, r.note) for r in reps]
    return reps


def cmd_spectrum_validate(args):
    try:
        data = json.loads(Path(args.file).read_text())
    except OSError as exc:
        raise DataError(f"cannot read {args.file}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{args.file}: invalid JSON ({exc})") from exc
    model, notes = parse_spectrum(data)
    for note in notes:
        print(f"warning: {note}", file=sys.stderr)
    return [make_report("spectrum-validate", {"file": str(args.file), "pairs": len(model.pairs),
                                              "c2": model.c2}, 1.0, 1.0, 0.0, "abs", None,
                        "; ".join(notes))]


def cmd_plot(args):
    if args.what != "density":
        raise UsageError("only 'density' can be plotted")
    if args.step <= 0 or args.rmax <= 0:
        raise UsageError("--rmax and --step must be positive")
    k = args.k if args.k is not None else 0.0
    r = np.arange(0.0, args.rmax + 0.5 * args.step, args.step)
    d = density(k, r)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "density"])
        for ri, di in zip(r, d):
            w.writerow([f"{ri:.12g}", f"{di:.17g}"])
    return [make_report("plot", {"what": "density", "k": str(as_weight(k)), "rows": len(r), "out": args.out},
                        len(r), len(r), 0.0, "abs", None)]


def _run_criterion(crit):
    try:
        return crit.run(), None
    except TracekitError as exc:
        return [], f"{type(exc).__name__}: {exc}"


def cmd_suite(args, out=None):
    out = out or sys.stdout
    wanted = set(args.only) if args.only else None
    crits = [c for c in checks.CRITERIA if wanted is None or c.number in wanted]
    threads = max(1, int(os.environ.get("TRACEKIT_THREADS", "1") or 1))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(_run_criterion, crits))
    all_ok = True
    for crit, (reports, err) in zip(crits, results):
        ok = err is None and bool(reports)
        for rep in reports:
            ok = _emit(rep, out) and ok
        line = {"criterion": crit.number, "title": crit.title, "pass": ok,
                "reports": len(reports)}
        if err:
            line["error"] = err
        out.write(json.dumps(line) + "\n")
        all_ok = all_ok and ok
    return all_ok


COMMANDS = {
    "appendix": cmd_appendix, "roundtrip": cmd_roundtrip, "lambda-chain": cmd_lambda,
    "horospherical": cmd_horospherical, "identity": cmd_identity, "orbital": cmd_orbital,
    "geom-side": cmd_geom_side, "zeta": cmd_zeta, "zeta-duality": cmd_zeta_duality,
    "prop36": cmd_prop36, "w-consistency": cmd_w_consistency, "fe": cmd_fe,
    "residue": cmd_residue, "cor39": cmd_cor39, "ode": cmd_ode,
    "geometry-invariance": cmd_geometry, "spectrum-validate": cmd_spectrum_validate,
    "plot": cmd_plot,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tracekit", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="override the default tolerance")
    common.add_argument("--seed", type=int, default=42, help="seed for randomised checks")
    weight = argparse.ArgumentParser(add_help=False)
    weight.add_argument("--k", type=parse_weight, default=None, help="weight 0, 1/2 or 1 (default: all)")
    spec = argparse.ArgumentParser(add_help=False)
    spec.add_argument("--spectrum", type=Path, default=None, help="spectrum JSON file")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, *parents, help=""):
        return sub.add_parser(name, parents=[common, *parents], help=help)

    p = add("appendix", help="closed integrals against quadrature")
    p.add_argument("--which", choices=[*APPENDIX_NAMES, "all"], default="all")
    p.add_argument("--r", type=float, default=None)
    p = add("roundtrip", weight, help="Phi -> P_k -> Phi round trip")
    p.add_argument("--kernel", choices=sorted(checks.KERNELS), default=None)
    p = add("lambda-chain", weight, help="h_k(r) against Lambda_k(-1-r^2)")
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--kernel", choices=sorted(checks.KERNELS), default="gaussian")
    p = add("horospherical", help="3D horospherical integral against 2 pi rho rho' g")
    p.add_argument("--z1", type=parse_complex, default=0.5)
    p.add_argument("--z2", type=parse_complex, default=0j)
    p.add_argument("--zp1", type=parse_complex, default=1.0)
    p.add_argument("--zp2", type=parse_complex, default=0j)
    p.add_argument("--support", type=float, default=4.0)
    p = add("identity", weight, help="Phi(0) against the spectral integral")
    p.add_argument("--params", type=parse_params, default=checks.STANDARD_PARAMS)
    p = add("orbital", weight, help="2D orbital integral against the closed term")
    p.add_argument("--ord2", type=int, default=1)
    p.add_argument("--norm", type=float, default=4.0)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--q", type=int, default=1)
    add("geom-side", weight, spec, help="both formulations of the geometric side")
    p = add("zeta", weight, spec, help="log Z_k(s) and Z'_k/Z_k(s)")
    p.add_argument("--s", type=parse_complex, required=True)
    p = add("zeta-duality", weight, spec, help="d/ds log Z against the series")
    p.add_argument("--s", type=parse_complex, default=None)
    p = add("prop36", weight, spec, help="hyperbolic sum against the Z'/Z combination")
    p.add_argument("--params", type=parse_params, default=checks.STANDARD_PARAMS)
    for name, helptext in (("w-consistency", "W series against the defining integral"),
                           ("fe", "parity gap of W")):
        p = add(name, weight, help=helptext)
        p.add_argument("--xi", type=parse_complex, default=None)
        p.add_argument("--wparams", type=parse_params, default=(2.0, 2.5, 3.0))
    p = add("residue", weight, help="contour residue at a trivial zero")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--c2", type=int, default=3)
    p = add("cor39", help="integration-by-parts identity")
    p.add_argument("--x", type=float, default=None)
    p = add("ode", weight, help="radial ODE residuals")
    p.add_argument("--s", type=parse_complex, default=None)
    p = add("geometry-invariance", help="invariance, membership and Cayley checks")
    p.add_argument("--count", type=int, default=100)
    p = add("spectrum-validate", help="validate a spectrum JSON file")
    p.add_argument("file", type=Path)
    p = add("plot", weight, help="write a CSV table")
    p.add_argument("what", choices=["density"])
    p.add_argument("--rmax", type=float, default=5.0)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--out", type=Path, required=True)
    p = add("suite", help="run the full acceptance battery")
    p.add_argument("--only", type=lambda s: [int(x) for x in s.split(",")], default=None,
                   help="comma-separated criterion numbers")
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            if args.command == "suite":
                return EXIT_OK if cmd_suite(args, out) else EXIT_FAIL
            reports = COMMANDS[args.command](args)
        ok = True
        for rep in reports:
            ok = _emit(rep, out) and ok
        return EXIT_OK if ok else EXIT_FAIL
    except (UsageError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
