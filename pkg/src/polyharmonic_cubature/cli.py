"""Command-line interface: ``polyharmonic-cubature {check,build,integrate,converge}``.

Exit codes: 0 pass, 1 check failure, 2 invalid input, 3 numerical failure.
The JSON formats are documented in ``docs/formats.md``.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import builtins
from .chebsys import (StripCubature, StripMeasure, build_annulus_cubature, build_strip_cubature,
                      integrate_strip)
from .cubature import (Cubature, PseudoPositiveMeasure, build_cubature, from_density,
                       integrate_function, integrate_lf, summability_report)
from .errors import (CubatureError, InsufficientSamples, InvalidRadii, InvalidSupport,
                     MissingMoment, NotPseudoPositive, TooShort)
from .laplace_fourier import BivariatePolynomial, lf_decompose
from .measures import UnivariateMeasure, power_moment, stieltjes_check

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
FORMAT = "polyharmonic-cubature/1"
STIELTJES_MOMENTS = 10
_INPUT_ERRORS = (InvalidSupport, NotPseudoPositive, InsufficientSamples, MissingMoment,
                 InvalidRadii, TooShort)


class InputError(Exception):
    pass


# radial densities for "components" sources: name -> (params -> callable)
def _radial_power(c=1.0, p=0.0):
    return lambda r: c * np.asarray(r, dtype=float) ** p


def _radial_damped_power(c=1.0, p=0.0, alpha=2.0):
    return lambda r: c * np.asarray(r, dtype=float) ** p * (1.0 - np.asarray(r, dtype=float) ** alpha)


RADIAL = {"power": _radial_power, "damped_power": _radial_damped_power}


# ---------------------------------------------------------------------------
# spec loading

def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _require(d, key, where):
    if key not in d:
        raise InputError(f"missing '{key}' in {where}")
    return d[key]


def _component_measure(entry, lo, hi):
    key = (int(_require(entry, "k", "component entry")), int(entry.get("l", 1)))
    spec = _require(entry, "measure", "component entry")
    kind = _require(spec, "type", "measure")
    if kind == "atoms":
        nodes = [float(v) for v in _require(spec, "nodes", "atoms")]
        weights = [float(v) for v in _require(spec, "weights", "atoms")]
        if len(nodes) != len(weights) or not nodes:
            raise InputError(f"component {key}: nodes and weights must match")
        for x, w in zip(nodes, weights):
            if w <= 0:
                raise NotPseudoPositive(key, x, w)
        return key, UnivariateMeasure.atomic(nodes, weights, support=(lo, hi))
    if kind == "density_radial":
        expr = _require(spec, "expr_id", "density_radial")
        if expr not in RADIAL:
            raise InputError(f"unknown radial density {expr!r}")
        dens = RADIAL[expr](**spec.get("params", {}))
        return key, UnivariateMeasure.from_density(dens, lo, hi, label=expr)
    raise InputError(f"unknown measure type {kind!r}")


def load_measure(spec, k_max=None):
    """Build the measure object described by a MeasureSpec document."""
    domain = _require(spec, "domain", "spec")
    source = _require(spec, "source", "spec")
    dtype = _require(domain, "type", "domain")
    K = int(k_max if k_max is not None else spec.get("k_max", 16))
    M = spec.get("angular_samples")
    if dtype == "cylinder":
        a, b = float(domain.get("a", 0.0)), float(domain.get("b", 1.0))
        if source.get("type") != "components":
            raise InputError("cylinder domains need a 'components' source")
        comps = {}
        for entry in _require(source, "entries", "source"):
            (k, _), m = _component_measure(entry, a, b)
            if abs(k) <= K:
                comps[k] = m
        return StripMeasure(comps, a, b)
    if dtype not in ("ball", "annulus"):
        raise InputError(f"unknown domain type {dtype!r}")
    R = float(_require(domain, "R", "domain"))
    rho = float(domain.get("rho", 0.0))
    if dtype == "annulus" and not rho > 0:
        raise InputError("annulus domains need rho > 0")
    stype = _require(source, "type", "source")
    if stype == "density2d":
        name = _require(source, "builtin", "source")
        if name not in builtins.DENSITY_IDS:
            raise InputError(f"unknown density builtin {name!r}")
        w = builtins.density(name, alpha=source.get("alpha"), value=source.get("value", 1.0))
        return from_density(w, rho, R, k_max=K, M=M)
    if stype == "components":
        comps = {}
        for entry in _require(source, "entries", "source"):
            key, m = _component_measure(entry, rho, R)
            if key[0] <= K:
                comps[key] = m
        return PseudoPositiveMeasure(comps, rho, R, K)
    raise InputError(f"unknown source type {stype!r}")


def build(measure, s):
    if isinstance(measure, StripMeasure):
        return build_strip_cubature(measure, s)
    if measure.rho > 0:
        return build_annulus_cubature(measure, s)
    return build_cubature(measure, s)


# ---------------------------------------------------------------------------
# cubature (de)serialization

def _atoms(m):
    return [float(v) for v in m.nodes], [float(v) for v in m.weights]


def cubature_to_dict(cub):
    comps = []
    if isinstance(cub, StripCubature):
        for k, m in cub.components.items():
            nodes, weights = _atoms(m)
            comps.append({"k": int(k), "nodes": nodes, "weights": weights})
        return {"format": FORMAT, "kind": "cylinder", "order": cub.order,
                "a": float(cub.a), "b": float(cub.b), "components": comps}
    for (k, l), m in cub.components.items():
        nodes, weights = _atoms(m)
        comps.append({"k": int(k), "l": int(l), "nodes": nodes, "weights": weights})
    return {"format": FORMAT, "kind": cub.kind, "order": cub.order, "rho": float(cub.rho),
            "R": float(cub.R), "k_max": int(cub.k_max), "components": comps}


def cubature_from_dict(d):
    if d.get("format") != FORMAT:
        raise InputError("not a cubature document")
    kind = d["kind"]
    s = int(d["order"])
    if kind == "cylinder":
        a, b = float(d["a"]), float(d["b"])
        comps = {int(c["k"]): UnivariateMeasure.atomic(c["nodes"], c["weights"], support=(a, b))
                 for c in d["components"]}
        return StripCubature(comps, s, a, b)
    rho, R = float(d["rho"]), float(d["R"])
    comps = {(int(c["k"]), int(c["l"])): UnivariateMeasure.atomic(c["nodes"], c["weights"],
                                                                  support=(rho, R))
             for c in d["components"]}
    return Cubature(comps, s, rho, R, int(d["k_max"]), kind)


def dumps(obj):
    return json.dumps(obj, indent=2) + "\n"


def rebuild(cub):
    """Rebuild a cubature from its own atomic components (a fixed point)."""
    if isinstance(cub, StripCubature):
        return build_strip_cubature(StripMeasure(cub.components, cub.a, cub.b), cub.order)
    mu = cub.as_measure()
    return build_annulus_cubature(mu, cub.order) if cub.kind == "annulus" else build_cubature(mu, cub.order)


# ---------------------------------------------------------------------------
# integrands

def parse_poly(text):
    """Parse a polynomial in ``x`` and ``y`` (e.g. ``"x^2 + 3*x*y"``)."""
    import sympy

    x, y = sympy.symbols("x y")
    try:
        expr = sympy.sympify(text, locals={"x": x, "y": y})
        poly = sympy.Poly(expr, x, y)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
        raise InputError(f"cannot parse polynomial {text!r}: {exc}") from exc
    return BivariatePolynomial({m: float(c) for m, c in poly.terms()})


def integrate_target(target, function=None, poly=None, M=None):
    if poly is not None:
        if isinstance(target, (StripCubature, StripMeasure)):
            raise InputError("--poly is only supported on disks and annuli")
        return integrate_lf(target, lf_decompose(parse_poly(poly)))
    f = builtins.function(function)
    if isinstance(target, (StripCubature, StripMeasure)):
        return integrate_strip(target, f, M)
    return integrate_function(target, f, M)


def parse_orders(text):
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return sorted({int(v) for v in text.split(",") if v.strip()})


# ---------------------------------------------------------------------------
# commands

def cmd_check(args, out):
    spec = _load_json(args.spec)
    mu = load_measure(spec, args.kmax)
    report = {"pseudo_positive": True, "components": [], "summability": None}
    ok = True
    if isinstance(mu, StripMeasure):
        items = [((k,), m) for k, m in mu.components.items()]
    else:
        items = list(mu.components.items())
    for key, m in items:
        moments = [power_moment(m, 2 * j) for j in range(STIELTJES_MOMENTS)]
        verdict = stieltjes_check(moments)
        ok &= verdict.is_stieltjes
        report["components"].append({"index": list(key), "is_positive_definite": verdict.is_positive_definite,
                                     "is_stieltjes": verdict.is_stieltjes,
                                     "min_eigenvalues": list(verdict.min_eigenvalues)})
    if isinstance(mu, PseudoPositiveMeasure):
        summ = summability_report(mu)
        report["summability"] = {"terms": list(summ.terms), "partial_sums": list(summ.partial_sums),
                                 "divergence_flag": summ.divergence_flag,
                                 "decay_exponent": summ.decay_exponent}
        ok &= not summ.divergence_flag
    report["passed"] = bool(ok)
    if args.json:
        out.write(dumps(report))
    else:
        out.write(f"pseudo-positive: yes\n")
        for c in report["components"]:
            out.write(f"component {tuple(c['index'])}: stieltjes={'yes' if c['is_stieltjes'] else 'no'}\n")
        if report["summability"] is not None:
            s = report["summability"]
            out.write(f"summability: partial sum {s['partial_sums'][-1]!r}, "
                      f"decay exponent {s['decay_exponent']!r}, "
                      f"divergence_flag={str(s['divergence_flag']).lower()}\n")
        out.write("PASS\n" if ok else "FAIL\n")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_build(args, out):
    spec = _load_json(args.spec)
    mu = load_measure(spec, args.kmax)
    cub = build(mu, args.order)
    text = dumps(cubature_to_dict(cub))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    if args.idempotence_check:
        again = dumps(cubature_to_dict(rebuild(cubature_from_dict(json.loads(text)))))
        same = again == text
        sys.stderr.write(f"idempotence: {'identical' if same else 'DIFFERENT'}\n")
        return EXIT_OK if same else EXIT_CHECK
    return EXIT_OK


def cmd_integrate(args, out):
    if (args.function is None) == (args.poly is None):
        raise InputError("give exactly one of --function and --poly")
    cub = cubature_from_dict(_load_json(args.cubature))
    value = integrate_target(cub, args.function, args.poly, args.angular_samples)
    out.write(f"{value!r}\n")
    return EXIT_OK


def cmd_converge(args, out):
    spec = _load_json(args.spec)
    mu = load_measure(spec, args.kmax)
    orders = parse_orders(args.orders)
    if not orders or orders[0] < 1:
        raise InputError("orders must be positive integers")
    M = args.angular_samples or spec.get("angular_samples")
    if args.reference is not None:
        reference = float(args.reference)
    else:
        reference = integrate_target(mu, args.function, args.poly, M)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s", "value", "reference", "abs_error"])
    last = None
    for s in orders:
        value = integrate_target(build(mu, s), args.function, args.poly, M)
        last = abs(value - reference)
        writer.writerow([s, repr(value), repr(reference), repr(last)])
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        out.write(buf.getvalue())
    if args.tol is not None and not last <= args.tol:
        sys.stderr.write(f"abs_error {last!r} at s={orders[-1]} exceeds --tol {args.tol!r}\n")
        return EXIT_CHECK
    return EXIT_OK


def make_parser():
    p = argparse.ArgumentParser(prog="polyharmonic-cubature",
                                description="Polyharmonic Gauss-Jacobi cubature on disks, with annulus and strip variants.")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized certificates")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="positivity of each component plus the summability test")
    c.add_argument("spec")
    c.add_argument("--kmax", type=int)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("build", help="build a cubature and write it as JSON")
    b.add_argument("spec")
    b.add_argument("--order", type=int, required=True)
    b.add_argument("--kmax", type=int)
    b.add_argument("--out")
    b.add_argument("--idempotence-check", action="store_true")
    b.set_defaults(func=cmd_build)

    i = sub.add_parser("integrate", help="integrate a builtin function or polynomial")
    i.add_argument("cubature")
    i.add_argument("--function", choices=sorted(builtins.FUNCTIONS))
    i.add_argument("--poly")
    i.add_argument("--angular-samples", type=int)
    i.set_defaults(func=cmd_integrate)

    v = sub.add_parser("converge", help="convergence table over cubature orders (CSV)")
    v.add_argument("spec")
    v.add_argument("--function", choices=sorted(builtins.FUNCTIONS))
    v.add_argument("--poly")
    v.add_argument("--orders", default="1..10")
    v.add_argument("--reference", type=float)
    v.add_argument("--kmax", type=int)
    v.add_argument("--tol", type=float)
    v.add_argument("--out")
    v.add_argument("--angular-samples", type=int)
    v.set_defaults(func=cmd_converge)
    return p


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    np.random.seed(args.seed)
    try:
        if args.command == "converge" and (args.function is None) == (args.poly is None):
            raise InputError("give exactly one of --function and --poly")
        return args.func(args, out)
    except CubatureError as exc:
        if isinstance(exc, _INPUT_ERRORS):
            sys.stderr.write(f"invalid input: {type(exc).__name__}: {exc}\n")
            return EXIT_INPUT
        sys.stderr.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC
    except (InputError, KeyError, ValueError, TypeError) as exc:
        sys.stderr.write(f"invalid input: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
