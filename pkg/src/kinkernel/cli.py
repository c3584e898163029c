"""Command-line interface.

Exit codes: 0 success, 1 domain error, 2 convergence failure, 3 a declared
tolerance was exceeded, 64 unusable arguments.
"""

import argparse
import csv
import io
import json
import math
import sys
from enum import Enum
from typing import List, Optional

from . import __version__
from .asymptotics import Route, SpatialRegimeInput, VelocityRegimeInput, c_s1, c_s3
from .bounds import Rect, RayKind, RaySpec, axis, ratio_grid, ray_limit
from .closed_half import k_half, k_half_error, k_half_semi
from .errors import ConvergenceError, DomainError, KinkernelError, VerificationError
from .fourier_kernel import KernelValue, Method, QuadSpec, k_eval, mass, p_eval
from .parallel import parallel_map
from .path_reps import RayPath, cancellation_identity, k_via_v_rep, k_via_x_rep, ray_gamma_identity
from .symbol import PhasePoint

EXIT_OK, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_VERIFICATION, EXIT_USAGE = 0, 1, 2, 3, 64

KERNEL_COLUMNS = ["s", "t", "x", "v", "value", "errorEstimate", "method"]
ASYMPTOTIC_COLUMNS = ["s", "kappa", "iota", "value", "errorEstimate", "route"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(x) -> str:
    """Shortest round-trip decimal for floats; str for everything else."""
    if isinstance(x, float):
        return repr(float(x))
    if isinstance(x, Enum):
        return x.value
    return str(x)


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, Enum):
        return x.value
    return x


def parse_range(text: str) -> List[float]:
    try:
        lo, hi, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"bad grid {text!r}; expected lo:hi:step")
    if not step > 0 or hi < lo:
        raise UsageError(f"bad grid {text!r}; need lo <= hi and step > 0")
    return [float(a) for a in axis(lo, hi, step)]


def _floats(text: str) -> List[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"bad number list {text!r}")


def _quad(args) -> QuadSpec:
    try:
        return QuadSpec(abs_tol=args.abs_tol, rel_tol=args.rel_tol)
    except DomainError as exc:
        raise UsageError(str(exc))


def _kernel_record(s, t, x, v, kv: KernelValue):
    return {"s": s, "t": t, "x": x, "v": v, "value": kv.value, "errorEstimate": kv.error, "method": kv.method.value}


def _eval_point(method, s, t, x, v, q):
    if method == "fourier":
        return p_eval(s, PhasePoint(x, v, t), q) if t != 1 else k_eval(s, x, v, q)
    if t != 1:
        raise DomainError(f"method {method} evaluates k_s at t = 1 only")
    if method == "closed":
        if s != 0.5:
            raise DomainError("the closed form needs s = 1/2")
        return KernelValue(float(k_half(x, v)), float(k_half_error(x, v)), Method.CLOSED_HALF)
    if method == "semi":
        if s != 0.5:
            raise DomainError("the semi-explicit form needs s = 1/2")
        return KernelValue(*k_half_semi(x, v, q, full_output=True), Method.SEMI_INTEGRAL)
    if method == "v-rep":
        return k_via_v_rep(s, x, v, q)
    return k_via_x_rep(s, x, v, q)


def cmd_eval(args):
    q = _quad(args)
    kv = _eval_point(args.method, args.s, args.t, args.x, args.v, q)
    return [_kernel_record(args.s, args.t, args.x, args.v, kv)], KERNEL_COLUMNS, EXIT_OK


def _grid_axes(args):
    xs = parse_range(args.xgrid or args.grid) if (args.xgrid or args.grid) else None
    vs = parse_range(args.vgrid or args.grid) if (args.vgrid or args.grid) else None
    if xs is None or vs is None:
        raise UsageError("give --grid or both --xgrid and --vgrid")
    return xs, vs


def cmd_grid(args):
    q = _quad(args)
    xs, vs = _grid_axes(args)
    pts = [(x, v) for x in xs for v in vs]
    vals = parallel_map(lambda p: _eval_point(args.method, args.s, args.t, p[0], p[1], q), pts, args.threads)
    return [_kernel_record(args.s, args.t, x, v, kv) for (x, v), kv in zip(pts, vals)], KERNEL_COLUMNS, EXIT_OK


def cmd_mass(args):
    q = _quad(args)
    value, err = mass(args.s, q, full_output=True)
    code = EXIT_OK if args.tol is None or abs(value - 1) <= args.tol else EXIT_VERIFICATION
    rec = {"s": args.s, "mass": value, "deviation": value - 1, "errorEstimate": err,
           "method": Method.FOURIER_1D.value}
    return [rec], list(rec), code


def cmd_verify_bounds(args):
    q = _quad(args)
    xs, vs = _grid_axes(args)
    step = xs[1] - xs[0] if len(xs) > 1 else 1.0
    rep = ratio_grid(args.s, Rect(xs[0], xs[-1], vs[0], vs[-1]), step, q, args.threads)
    ok = rep.min_ratio > 0 and math.isfinite(rep.empirical_c)
    if args.max_c is not None:
        ok = ok and rep.empirical_c <= args.max_c
    rec = {"s": args.s, "step": step, "min_ratio": rep.min_ratio, "max_ratio": rep.max_ratio,
           "argmin_x": rep.argmin[0], "argmin_v": rep.argmin[1],
           "argmax_x": rep.argmax[0], "argmax_v": rep.argmax[1], "empirical_c": rep.empirical_c,
           "min_error": rep.min_error, "max_error": rep.max_error, "method": rep.method.value}
    return [rec], list(rec), EXIT_OK if ok else EXIT_VERIFICATION


def cmd_ray_limit(args):
    q = _quad(args)
    kind = {"velocity": RayKind.VELOCITY, "spatial": RayKind.SPATIAL, "diagonal": RayKind.DIAGONAL_OFFSET}[args.kind]
    ray = RaySpec(kind, _floats(args.radii), args.kappa, args.iota)
    rep = ray_limit(args.s, ray, q, args.threads)
    rows = [{"s": args.s, "kind": kind.value, "radius": r, "value": v, "errorEstimate": e, "method": rep.method.value,
             "predicted": rep.predicted, "predicted_error": rep.predicted_error, "route": rep.route.value,
             "extrapolated": rep.extrapolated if rep.extrapolated is not None else float("nan")}
            for (r, v), e in zip(rep.values, rep.errors)]
    code = EXIT_OK
    if args.tol is not None and abs(rep.values[-1][1] / rep.predicted - 1) > args.tol:
        code = EXIT_VERIFICATION
    return rows, list(rows[0]), code


_ROUTES = {"auto": Route.AUTO, "pv": Route.PV_QUADRATURE, "hypergeometric": Route.HYPERGEOMETRIC,
           "special": Route.DERIVATIVE_SPECIAL}


def cmd_asymptotics(args):
    q = _quad(args)
    rows = []
    for kappa in _floats(args.kappa):
        if args.iota is not None:
            iota = float(args.iota)
            res = c_s1(args.s, VelocityRegimeInput(kappa, iota), q)
        else:
            iota = float("nan")
            res = c_s3(args.s, SpatialRegimeInput(kappa), _ROUTES[args.route], q)
        rows.append({"s": args.s, "kappa": kappa, "iota": iota, "value": res.value, "errorEstimate": res.error,
                     "route": res.route.value})
    return rows, ASYMPTOTIC_COLUMNS, EXIT_OK


def cmd_closed_form_check(args):
    q = _quad(args)
    xs, vs = _grid_axes(args)
    pts = [(x, v) for x in xs for v in vs]
    fourier = parallel_map(lambda p: k_eval(0.5, p[0], p[1], q), pts, args.threads)
    rows, worst = [], 0.0
    for (x, v), f in zip(pts, fourier):
        c = float(k_half(x, v))
        rows.append({"x": x, "v": v, "closed": c, "fourier": f.value, "absdiff": abs(c - f.value),
                     "errorEstimate": f.error + float(k_half_error(x, v)), "method": f.method.value})
        worst = max(worst, abs(c - f.value) / abs(c))
    cols = ["x", "v", "closed", "fourier", "absdiff", "errorEstimate", "method"]
    return rows, cols, EXIT_OK if worst <= args.tol else EXIT_VERIFICATION


def cmd_verify_identities(args):
    rows, ok = [], True
    for s in _floats(args.s_values):
        path = RayPath(0.5 * min(0.5, 2 * s))
        for a in (-0.5, 0.0, 1.0):
            num, closed = ray_gamma_identity(s, a, path)
            good = abs(num - closed) <= args.tol
            ok &= good
            rows.append({"identity": "ray-gamma", "s": s, "param": a, "c": float("nan"),
                         "numeric": num, "expected": closed, "absdiff": abs(num - closed), "pass": good,
                         "method": "RayQuadrature"})
        k0 = 1 / (2 * s)
        for k, expected in ((k0, math.pi * s / 2), (k0 + 0.5, 0.0)):
            for c in (0.5, 2.0):
                num = cancellation_identity(s, k, c, path)
                good = abs(num - expected) <= args.tol
                ok &= good
                rows.append({"identity": "cancellation", "s": s, "param": k, "c": c,
                             "numeric": num, "expected": expected, "absdiff": abs(num - expected), "pass": good,
                             "method": "RayQuadrature"})
    # the expected values are exact, so absdiff is the measured error of each record
    cols = ["identity", "s", "param", "c", "numeric", "expected", "absdiff", "pass", "method"]
    return rows, cols, EXIT_OK if ok else EXIT_VERIFICATION


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kinkernel", description="Fractional Kolmogorov kernel toolkit")
    p.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    common.add_argument("--output", choices=["csv", "json"], default="json")
    common.add_argument("--out", help="write to this file instead of stdout")
    common.add_argument("--abs-tol", type=float, default=1e-12)
    common.add_argument("--rel-tol", type=float, default=1e-9)
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: KINKERNEL_THREADS or 1)")
    grid = _Parser(add_help=False)
    grid.add_argument("--grid", help="lo:hi:step for both axes")
    grid.add_argument("--xgrid")
    grid.add_argument("--vgrid")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    methods = ["fourier", "closed", "semi", "v-rep", "x-rep"]

    e = sub.add_parser("eval", parents=[common], help="evaluate p_s(t, x + tv/2, v) or k_s")
    e.add_argument("--s", type=float, required=True)
    e.add_argument("--t", type=float, default=1.0)
    e.add_argument("--x", type=float, required=True)
    e.add_argument("--v", type=float, required=True)
    e.add_argument("--method", choices=methods, default="fourier")
    e.set_defaults(func=cmd_eval)

    g = sub.add_parser("grid", parents=[common, grid], help="evaluate on a grid")
    g.add_argument("--s", type=float, required=True)
    g.add_argument("--t", type=float, default=1.0)
    g.add_argument("--method", choices=methods, default="fourier")
    g.set_defaults(func=cmd_grid)

    m = sub.add_parser("mass", parents=[common], help="total mass of k_s")
    m.add_argument("--s", type=float, required=True)
    m.add_argument("--tol", type=float, default=None)
    m.set_defaults(func=cmd_mass)

    b = sub.add_parser("verify-bounds", parents=[common, grid], help="g_s ratio extrema on a grid")
    b.add_argument("--s", type=float, required=True)
    b.add_argument("--max-c", type=float, default=None)
    b.set_defaults(func=cmd_verify_bounds)

    r = sub.add_parser("ray-limit", parents=[common], help="j_s k_s along a ray")
    r.add_argument("--s", type=float, required=True)
    r.add_argument("--kind", choices=["velocity", "spatial", "diagonal"], required=True)
    r.add_argument("--kappa", type=float, default=0.0)
    r.add_argument("--iota", type=float, default=0.0)
    r.add_argument("--radii", default="50,100,200")
    r.add_argument("--tol", type=float, default=None, help="relative tolerance at the largest radius")
    r.set_defaults(func=cmd_ray_limit)

    a = sub.add_parser("asymptotics", parents=[common], help="asymptotic constants C_s1, C_s3")
    a.add_argument("--s", type=float, required=True)
    a.add_argument("--kappa", required=True, help="one value or a comma separated list")
    a.add_argument("--iota", default=None, help="velocity regime offset; omit for the spatial regime")
    a.add_argument("--route", choices=list(_ROUTES), default="auto")
    a.set_defaults(func=cmd_asymptotics)

    c = sub.add_parser("closed-form-check", parents=[common, grid], help="closed form vs Fourier at s = 1/2")
    c.add_argument("--tol", type=float, default=1e-5, help="relative tolerance")
    c.set_defaults(func=cmd_closed_form_check)

    i = sub.add_parser("verify-identities", parents=[common], help="ray integral identities")
    i.add_argument("--s-values", default="0.3,0.5,0.8")
    i.add_argument("--tol", type=float, default=1e-6)
    i.set_defaults(func=cmd_verify_identities)
    return p


def render(command, config, rows, columns, output) -> str:
    if output == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(row[c]) for c in columns])
        return buf.getvalue()
    data = [{k: _json_safe(v) for k, v in row.items()} for row in rows]
    meta = {"command": command, "version": __version__, "config": {k: _json_safe(v) for k, v in config.items()}}
    return json.dumps({"meta": meta, "data": data}, indent=2, allow_nan=False) + "\n"


_RANGE_FLAGS = ("--grid", "--xgrid", "--vgrid", "--kappa", "--iota", "--x", "--v", "--radii")


def _negative_number(tok: str) -> bool:
    # "-4:4:0.5", "-0.5,1", "-inf"
    if not tok.startswith("-"):
        return False
    try:
        float(tok.replace(":", ",").split(",")[0])
    except ValueError:
        return False
    return True


def _join_negative_values(argv: List[str]) -> List[str]:
    # argparse reads "-4:4:0.5" as an option; glue such values to their flag
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _RANGE_FLAGS and i + 1 < len(argv) and _negative_number(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
        config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
        rows, columns, code = args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        print(parser.format_usage(), end="", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except (DomainError, KinkernelError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    text = render(args.command, config, rows, columns, args.output)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
