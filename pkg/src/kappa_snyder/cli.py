"""Command line: ``kappa-snyder <subcommand> [options]``.

Every subcommand prints an array of check objects with the keys ``check``,
``max_residual``, ``pass`` and ``details``. Exit status is 0 when all checks
pass, 1 when one fails and 2 for malformed input or points outside the domain.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import hopf, momentum
from .momentum import ConvergenceError, DomainError
from .numerics import DeformParams, RealizationSpec
from .suites import CheckReport, RunConfig, run_verify


class UsageError(ValueError):
    pass


def _fractions(text: str) -> tuple:
    try:
        return tuple(Fraction(t.strip()) for t in text.split(",") if t.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"malformed vector {text!r}") from exc


def _floats(text: str, n: int, what: str) -> np.ndarray:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"malformed vector for {what}: {text!r}") from exc
    if len(vals) != n:
        raise UsageError(f"{what} needs {n} components, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise UsageError(f"{what} has non-finite components")
    return np.array(vals)


def _config(args) -> RunConfig:
    a = _fractions(args.a) if args.a else None
    dim = args.dim if args.dim is not None else (len(a) if a else 2)
    if a is None:
        a = (Fraction(0),) * dim
    try:
        s = Fraction(args.s)
        spec = RealizationSpec.parse(args.realization)
        return RunConfig(dim, a, s, spec, args.order, args.seed, args.tol)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc


def _default_u(spec: RealizationSpec) -> Fraction:
    if spec.kind == "maggiore":
        return Fraction(1, 2)
    if spec.kind == "unit":
        return Fraction(0)
    if spec.kind == "general-u":
        return spec.u
    raise UsageError("perturbative formulas need f(B) = 1 - uB; pass --u")


# -- serialization --------------------------------------------------------------

def _encode(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format(x, ".16e") if math.isfinite(x) else "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {_encode(v)}" for k, v in sorted(obj.items()))
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    return json.dumps(str(obj))


def render(reports: list, fmt: str) -> str:
    reports = sorted(reports, key=lambda r: r.name)
    if fmt == "json":
        return "[\n" + ",\n".join("  " + _encode(r.as_dict()) for r in reports) + "\n]\n"
    lines = []
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.name:<45s} max_residual={r.max_residual:.3e}")
        if "value" in r.details:
            lines.append("      value = " + " ".join(f"{v:.15g}" for v in r.details["value"]))
    return "\n".join(lines) + "\n"


# -- subcommands -------------------------------------------------------------------

def cmd_verify(args, cfg):
    return run_verify(cfg)


def cmd_compose(args, cfg):
    p, spec, n = cfg.params, cfg.realization, cfg.dim
    k, q = _floats(args.k, n, "--k"), _floats(args.q, n, "--q")
    if args.method == "perturbative":
        u = Fraction(args.u) if args.u is not None else _default_u(spec)
        val = momentum.compose_perturbative(u, p, k, q)
        return [CheckReport("compose", 0.0, True, {"method": "perturbative", "u": str(u),
                                                    "value": val})]
    res = momentum.compose(spec, p, k, q, method=args.method, steps=args.steps)
    d = dict(res.diagnostics, method=res.method, value=res.value)
    return [CheckReport("compose", d["residual"], d["residual"] <= 1e-12, d)]


def cmd_antipode(args, cfg):
    p, spec, n = cfg.params, cfg.realization, cfg.dim
    k = _floats(args.k, n, "--k")
    if args.method == "perturbative":
        val = momentum.antipode_perturbative(p, k)
        left = np.linalg.norm(momentum.compose_perturbative(_default_u(spec), p, val, k))
        return [CheckReport("antipode", 0.0, True, {"method": "perturbative", "value": val,
                                                     "second_order_law_residual": float(left)})]
    res = momentum.antipode(spec, p, k, tol=min(cfg.tol, 1e-12), steps=args.steps)
    d = dict(res.diagnostics, method=res.method, value=res.value)
    return [CheckReport("antipode", d["residual"], d["residual"] <= 1e-12, d)]


def cmd_kvec(args, cfg):
    p, spec, n = cfg.params, cfg.realization, cfg.dim
    k = _floats(args.k, n, "--k")
    if args.inverse:
        x, res, it = momentum.kvec_inverse(spec, p, k, steps=args.steps, with_info=True)
        return [CheckReport("kvec_inverse", res, res <= 1e-12, {"value": x, "newton_iters": it})]
    val = momentum.kvec(spec, p, k, steps=args.steps)
    return [CheckReport("kvec", 0.0, True, {"value": val})]


def cmd_ode(args, cfg):
    p, spec, n = cfg.params, cfg.realization, cfg.dim
    k, q = _floats(args.k, n, "--k"), _floats(args.q, n, "--q")
    res = momentum.compose_ode(spec, p, k, q, steps=args.steps, tol=cfg.tol)
    d = dict(res.diagnostics, value=res.value)
    return [CheckReport("ode", d["residual"], bool(d["converged"]), d)]


def cmd_star(args, cfg):
    p, spec, n = cfg.params, cfg.realization, cfg.dim
    k, q = _floats(args.k, n, "--k"), _floats(args.q, n, "--q")
    w = hopf.star_plane_waves(spec, p, hopf.PlaneWave(k), hopf.PlaneWave(q))
    return [CheckReport("star", 0.0, True, {"value": w.momentum, "amplitude": float(np.real(w.amplitude))})]


def _series_coefficients(fn, eps_values, degree: int = 6) -> np.ndarray:
    """Taylor coefficients in eps from samples of fn(eps) (rows: powers)."""
    vals = np.array([fn(e) for e in eps_values])
    V = np.vander(np.asarray(eps_values), degree + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(V, vals, rcond=None)
    return coef


def cmd_expand(args, cfg):
    """Coefficients of eps^0..eps^2 of the exact laws at (eps a, eps^2 s) next to the formulas."""
    n, base = cfg.dim, cfg.params
    u = Fraction(args.u) if args.u is not None else _default_u(cfg.realization)
    spec = RealizationSpec.general_u(u) if u not in (0, Fraction(1, 2)) else (
        RealizationSpec.unit() if u == 0 else RealizationSpec.maggiore())
    k = _floats(args.k, n, "--k") if args.k else np.linspace(0.3, -0.2, n)
    q = _floats(args.q, n, "--q") if args.q else np.linspace(-0.1, 0.4, n)
    eps = np.linspace(0.02, 0.12, 9)
    scaled = {e: base.scaled(Fraction(e).limit_denominator(10 ** 9)) for e in eps}

    def table(name, exact, formula):
        ce = _series_coefficients(lambda e: exact(scaled[e]), eps)
        cf = _series_coefficients(lambda e: formula(scaled[e]), eps)
        diff = float(np.abs(ce[:3] - cf[:3]).max())
        rows = {f"eps^{m}": {"exact": ce[m], "formula": cf[m]} for m in range(3)}
        return CheckReport(f"expand.{name}", diff, diff <= args.expand_tol,
                           {"u": str(u), "coefficients": rows})

    out = [
        table("compose", lambda p: momentum.compose(spec, p, k, q).value,
              lambda p: momentum.compose_perturbative(u, p, k, q)),
        table("kvec", lambda p: momentum.kvec(spec, p, k),
              lambda p: momentum.kvec_perturbative(u, p, k)),
        table("kvec_inverse", lambda p: momentum.kvec_inverse(spec, p, k),
              lambda p: momentum.kvec_inverse_perturbative(u, p, k)),
    ]
    if all(x == 0 for x in base.a[1:]):
        out.append(table("antipode", lambda p: momentum.antipode(spec, p, k).value,
                         lambda p: momentum.antipode_perturbative(p, k)))
    return out


COMMANDS = {"verify": cmd_verify, "compose": cmd_compose, "antipode": cmd_antipode,
            "kvec": cmd_kvec, "ode": cmd_ode, "star": cmd_star, "expand": cmd_expand}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, help="spacetime dimension (default: length of --a)")
    common.add_argument("--a", default="", help="deformation vector, time component first")
    common.add_argument("--s", default="0", help="Snyder parameter")
    common.add_argument("--realization", default="maggiore", help="maggiore | unit | u=<value>")
    common.add_argument("--order", type=int, default=4, help="truncation order in eps")
    common.add_argument("--seed", type=int, default=1)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", help="also write the JSON report to this path")
    common.add_argument("--steps", type=int, default=momentum.DEFAULT_STEPS, help="RK4 steps")

    parser = argparse.ArgumentParser(prog="kappa-snyder", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run every verification suite")
    c = sub.add_parser("compose", parents=[common], help="compose two momenta")
    c.add_argument("--k", required=True)
    c.add_argument("--q", required=True)
    c.add_argument("--method", choices=("auto", "exact", "ode", "perturbative"), default="auto")
    c.add_argument("--u", help="realization parameter for --method perturbative")
    s = sub.add_parser("antipode", parents=[common], help="antipode of a momentum")
    s.add_argument("--k", required=True)
    s.add_argument("--method", choices=("numeric", "perturbative"), default="numeric")
    kv = sub.add_parser("kvec", parents=[common], help="the map K or its inverse")
    kv.add_argument("--k", required=True)
    kv.add_argument("--inverse", action="store_true")
    o = sub.add_parser("ode", parents=[common], help="integrate the momentum flow")
    o.add_argument("--k", required=True)
    o.add_argument("--q", required=True)
    st = sub.add_parser("star", parents=[common], help="star product of two plane waves")
    st.add_argument("--k", required=True)
    st.add_argument("--q", required=True)
    e = sub.add_parser("expand", parents=[common], help="eps coefficients of exact laws vs formulas")
    e.add_argument("--u")
    e.add_argument("--k")
    e.add_argument("--q")
    e.add_argument("--expand-tol", type=float, default=1e-6)
    return parser


_VALUE_FLAGS = ("--a", "--s", "--k", "--q", "--u")


def _attach_negative_values(argv: list) -> list:
    """Rewrite ``--k -0.1,0.2`` as ``--k=-0.1,0.2`` so argparse does not read a flag."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run_cli(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_attach_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        if args.steps < 1:
            raise UsageError("--steps must be at least 1")
        reports = COMMANDS[args.command](args, cfg)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        reports = [CheckReport(args.command, float("inf"), False, {"error": str(exc)})]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = render(reports, args.format)
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(render(reports, "json"))
    return 0 if all(r.passed for r in reports) else 1


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
