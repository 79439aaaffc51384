"""``windline`` command-line front end.

Every command prints one JSON record on stdout (and optionally writes it to
``--json``).  Exit status: 0 ok, 2 bad input, 3 numeric failure,
4 admissibility conditions failed, 1 anything unexpected.
"""

from __future__ import annotations

import argparse
import itertools
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ParseError, WindlineError
from .expr import evaluate_constant
from .geometry import find_hits
from .grt import Verdict, evaluate, improper_integral_demo, sinc_sinh_function
from .curves import sinc_sinh_legs
from .integrate import QuadratureConfig, line_integral, locate_on_path, pv_integral
from .laurent import N_CLS, classify, default_radius, laurent_coeffs
from .problem import FIXTURES, fixture, load_problem
from .serialize import dumps
from .winding import (
    winding_bounded,
    winding_classical,
    winding_geometric,
    winding_pv,
)

EXIT_OK, EXIT_INTERNAL, EXIT_PARSE, EXIT_NUMERIC, EXIT_CONDITIONS = 0, 1, 2, 3, 4
PLOT_SAMPLES = 1001

WINDING_METHODS = {
    "pv": winding_pv,
    "bounded": winding_bounded,
    "geometric": winding_geometric,
    "classical": winding_classical,
}


def _number(text):
    try:
        return evaluate_constant(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _real_number(text):
    z = _number(text)
    if z.imag != 0:
        raise argparse.ArgumentTypeError(f"expected a real number, got {text!r}")
    return z.real


def _load(args):
    if args.fixture and args.problem:
        raise ParseError("give either a problem file or --fixture, not both")
    if args.fixture:
        kwargs = {}
        if args.alpha is not None:
            kwargs["alpha"] = args.alpha
        if args.r is not None:
            kwargs["r"] = args.r
        prob = fixture(args.fixture, **kwargs)
    elif args.problem:
        prob = load_problem(args.problem)
    else:
        raise ParseError("no problem given: pass a problem file or --fixture")
    if args.point:
        prob.points = list(args.point)
    prob.config = prob.config.replace(abs_tol=args.tol_abs, rel_tol=args.tol_rel)
    return prob


def _hit_record(h):
    return {
        "curve": h.curve_index,
        "segment": h.segment_index,
        "t": h.t_star,
        "alpha": h.alpha,
        "at_breakpoint": h.at_breakpoint,
        "degenerate": h.degenerate,
    }


def _pv_record(res):
    return {
        "status": res.status.value,
        "value": res.value,
        "growth_exponent": res.growth_exponent,
        "eps_trace": [[e, v] for e, v in res.eps_trace],
    }


# -- commands ----------------------------------------------------------------

def cmd_winding(prob, args):
    results, failed = [], False
    for z0 in prob.points:
        hits = find_hits(prob.cycle, z0)
        if args.method == "auto":
            names = ["pv", "bounded", "geometric"] if hits else ["classical"]
        elif args.method == "all":
            names = ["pv", "bounded", "geometric"] + ([] if hits else ["classical"])
        else:
            names = [args.method]
        values, details, errors = {}, {}, {}
        for name in names:
            try:
                rep = WINDING_METHODS[name](prob.cycle, z0, cfg=prob.config)
            except WindlineError as exc:
                errors[name] = exc.to_dict()
                failed = True
                continue
            values[name] = rep.value
            if name == "bounded":
                details[name] = {"guard_values": rep.diagnostics["guard_values"]}
            elif name == "geometric":
                details[name] = {"detoured_winding": rep.integer_part_tilde, "angle_sum": rep.angle_sum,
                                 "delta": rep.diagnostics["delta"]}
            elif name == "pv":
                details[name] = {"imag_part": rep.diagnostics["imag_part"]}
            else:
                details[name] = {"residual": rep.diagnostics["residual"],
                                 "crossings": rep.diagnostics["crossings"]}
        deltas = {f"{a}-{b}": abs(values[a] - values[b]) for a, b in itertools.combinations(values, 2)}
        rec = {
            "point": z0,
            "on_curve": bool(hits),
            "hits": [_hit_record(h) for h in hits],
            "values": values,
            "max_delta": max(deltas.values(), default=0.0),
            "deltas": deltas,
            "details": details,
        }
        if not hits and values:
            rec["rounded"] = int(round(next(iter(values.values()))))
        if errors:
            rec["errors"] = errors
        results.append(rec)
    return results, EXIT_NUMERIC if failed else EXIT_OK


def cmd_integrate(prob, args):
    if not args.pv:
        value = line_integral(prob.function, prob.cycle, prob.config)
        return [{"mode": "ordinary", "value": value}], EXIT_OK
    on_path = [(s, hits) for s, hits in locate_on_path(prob.function, prob.cycle) if hits]
    res = pv_integral(prob.function, prob.cycle, on_path, cfg=prob.config)
    rec = {"mode": "principal_value", **_pv_record(res)}
    rec["on_path"] = [{"location": s.location, "hits": [_hit_record(h) for h in hits]} for s, hits in on_path]
    return [rec], EXIT_OK


def cmd_residue(prob, args):
    f = prob.function
    locations = prob.points or [s.location for s in f.singularities]
    if not locations:
        raise ParseError("nothing to expand: give points or declare singularities")
    scale = prob.cycle.scale
    results = []
    for z0 in locations:
        radius = default_radius(f, z0, scale)
        s = classify(f, z0, radius=radius, scale=scale)
        coeffs = laurent_coeffs(f, z0, radius=radius, index_range=(-N_CLS, 8), scale=scale)
        results.append({
            "location": z0,
            "kind": s.kind.value,
            "order": s.order,
            "residue": s.residue,
            "radius": radius,
            "laurent": {str(k): v for k, v in sorted(coeffs.items()) if v != 0},
        })
    return results, EXIT_OK


def _condition(c):
    if c is None:
        return None
    return {k: getattr(c, k) for k in c.__dataclass_fields__}


def cmd_verify(prob, args):
    rep = evaluate(prob.function, prob.cycle, prob.config, exterior_probes=prob.exterior_probes,
                   winding_method="pv" if args.method == "pv" else "bounded")
    rec = {
        "verdict": rep.verdict.value,
        "lhs": _pv_record(rep.lhs),
        "rhs": rep.rhs,
        "discrepancy": rep.discrepancy,
        "tolerance": rep.tolerance,
        "reason": rep.reason,
        "relaxed_for_essential": rep.diagnostics.get("relaxed_for_essential", False),
        "singularities": [
            {
                "location": e.singularity.location,
                "kind": e.singularity.kind.value,
                "order": e.singularity.order,
                "on_cycle": e.on_cycle,
                "winding": e.winding,
                "residue": e.residue,
                "contribution": e.contribution,
                "hits": [_hit_record(h) for h in e.hits],
                "condition_a": _condition(e.cond_a),
                "condition_b": _condition(e.cond_b),
            }
            for e in rep.per_singularity
        ],
    }
    code = {Verdict.VERIFIED: EXIT_OK, Verdict.CONDITIONS_FAILED: EXIT_CONDITIONS}.get(rep.verdict, EXIT_NUMERIC)
    return [rec], code


def _plot_data(r):
    """Samples of the imaginary part of ``f dz`` along the upper ray.

    Pointwise this equals the real integrand ``sinc(t) sinh(t)/(cos t + cosh t)``.
    """
    f = sinc_sinh_function(r=r)
    upper = sinc_sinh_legs(r)[2]
    t = np.linspace(0.0, r, PLOT_SAMPLES)
    vals = np.imag(f(upper.point(t)) * upper.velocity(t))
    vals[0] = 0.0  # removable at t = 0
    return {"version": 1, "leg": "upper", "r": r, "t": t.tolist(), "integrand": vals.tolist()}


def cmd_improper(prob, args):
    r = 20.0 if args.r is None else args.r
    if not r > 0:
        raise ParseError("--r must be positive")
    cfg = prob.config if prob else QuadratureConfig().replace(abs_tol=args.tol_abs, rel_tol=args.tol_rel)
    res = improper_integral_demo(r, cfg)
    rec = {
        "r": res.r,
        "estimate": res.estimate,
        "exact": res.exact,
        "error": abs(res.estimate - res.exact),
        "error_bound": res.error_bound,
        "within_bound": abs(res.estimate - res.exact) <= res.error_bound,
        "closed_imag": res.closed_imag,
        "identity_residual": res.identity_residual,
        "legs_imag": res.legs_imag,
        "symmetry_residual": res.symmetry_residual,
    }
    if args.emit_plot:
        Path(args.emit_plot).write_text(dumps(_plot_data(r)))
        rec["plot_data"] = str(args.emit_plot)
    return [rec], EXIT_OK


COMMANDS = {
    "winding": cmd_winding,
    "integrate": cmd_integrate,
    "residue": cmd_residue,
    "verify": cmd_verify,
    "improper": cmd_improper,
}


# -- argument handling -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        err = {"code": "UsageError", "message": message, "exit_code": EXIT_PARSE}
        sys.stdout.write(dumps({"status": "error", "error": err}))
        raise SystemExit(EXIT_PARSE)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("problem", nargs="?", help="problem file (JSON, version 1)")
    common.add_argument("--fixture", choices=FIXTURES, help="use a built-in problem instead of a file")
    common.add_argument("--alpha", type=_real_number, help="sector opening angle, e.g. 'pi/2'")
    common.add_argument("--r", type=_real_number, help="radius for the sector, semicircle and wedge contours")
    common.add_argument("--point", type=_number, action="append", help="query point (repeatable)")
    common.add_argument("--tol-abs", type=float, help="absolute quadrature tolerance")
    common.add_argument("--tol-rel", type=float, help="relative quadrature tolerance")
    common.add_argument("--json", metavar="PATH", help="also write the result record here")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing in the record")

    parser = _Parser(prog="windline", description="Winding numbers and residues for curves through singular points.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    w = sub.add_parser("winding", parents=[common], help="winding numbers about the query points")
    w.add_argument("--method", choices=["auto", "all", *WINDING_METHODS], default="auto")
    i = sub.add_parser("integrate", parents=[common], help="contour integral of the function")
    i.add_argument("--pv", action="store_true", help="principal value through on-curve singularities")
    sub.add_parser("residue", parents=[common], help="classify singularities and report residues")
    v = sub.add_parser("verify", parents=[common], help="check the residue theorem on the cycle")
    v.add_argument("--method", choices=["bounded", "pv"], default="bounded",
                   help="winding method for on-curve singularities")
    im = sub.add_parser("improper", parents=[common], help="wedge-contour estimate of the sinc-sinh integral")
    im.add_argument("--emit-plot", metavar="PATH", help="write integrand samples along the upper ray")
    return parser


def _command_echo(args):
    echo = {"name": args.command}
    for key in ("problem", "fixture", "alpha", "r", "point", "method", "pv", "tol_abs", "tol_rel", "emit_plot"):
        val = getattr(args, key, None)
        if val is not None and val is not False:
            echo[key] = val
    return echo


def run(argv=None):
    """Execute one command; returns ``(record, exit_code)``."""
    args = build_parser().parse_args(argv)
    record = {"version": 1, "command": _command_echo(args)}
    start = time.perf_counter()
    try:
        if args.command == "improper" and not (args.problem or args.fixture):
            prob = None
        else:
            prob = _load(args)
            record["problem"] = prob.label
        results, code = COMMANDS[args.command](prob, args)
    except WindlineError as exc:
        record["status"] = "error"
        record["error"] = exc.to_dict()
        code = exc.exit_code
    else:
        record["status"] = "ok" if code == EXIT_OK else "failed"
        record["results"] = results
    if args.timing:
        record["timing"] = {"wall_seconds": time.perf_counter() - start}
    record["exit_code"] = code
    return record, code, args


def main(argv=None):
    try:
        record, code, args = run(argv)
    except SystemExit:
        raise
    except Exception as exc:  # noqa: BLE001
        err = {"code": "InternalError", "message": f"{type(exc).__name__}: {exc}", "exit_code": EXIT_INTERNAL}
        sys.stdout.write(dumps({"status": "error", "error": err}))
        return EXIT_INTERNAL
    text = dumps(record)
    sys.stdout.write(text)
    if args.json:
        Path(args.json).write_text(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
