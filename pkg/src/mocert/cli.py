"""Command-line front end.

Exit codes: 0 success, 1 the certification answered "no", 2 input error,
3 numerical error.  Reports are JSON (``schema_version`` 1) or CSV.
"""
import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import geoffrion, kkt, lagrangian, pareto, scalarization, sequences
from .errors import (
    CertificationError,
    EvaluationError,
    InputError,
    NoCertificateError,
    NotApplicableError,
    NumericalError,
    PreconditionError,
)
from .problem import (
    epsilon_vector,
    evaluate,
    load_config,
    make_grid,
    read_candidates_csv,
    registry_instance,
    sample_points,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3
COMMANDS = ("pareto", "geoffrion", "kkt", "saddle", "sequence", "example")


# --------------------------------------------------------------------------
# deterministic JSON


def _number(v):
    v = float(v)
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    return format(v, ".17g")


def dumps(obj, indent=0):
    """JSON text with floats at 17 significant digits and insertion-ordered keys."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v, indent + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + 1) for v in seq) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _number(obj)
    return json.dumps(str(obj))


def _point(p):
    return {"x": p.x.tolist(), "f": p.fvals.tolist(), "g": p.gvals.tolist(),
            "feasible": bool(p.feasible)}


# --------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser():
    parser = _Parser(prog="mocert", description="Certify approximate Pareto, Geoffrion "
                     "proper and KKT points of multiobjective problems.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--instance", default="paper-discrete" if name == "example" else None,
                       help="registry key or path to a JSON instance config")
        p.add_argument("--candidates", help="CSV file with columns x1..xn (optional f1..fm)")
        p.add_argument("--point", help="comma-separated coordinates of the query point")
        p.add_argument("--epsilon", default="0", help="scalar or comma-separated vector")
        p.add_argument("--m-hat", type=float, dest="m_hat")
        p.add_argument("--weights", help="comma-separated strictly positive weights")
        p.add_argument("--grid-resolution", type=int, dest="grid_resolution")
        p.add_argument("--sample-count", type=int, dest="sample_count")
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--count", type=int, default=13, help="schedule length (sequence)")
        p.add_argument("--factor", type=float, default=0.5, help="schedule ratio (sequence)")
        p.add_argument("--format", choices=("json", "csv"), default="json", dest="output_format")
        p.add_argument("--output", help="report path; relative paths honour MOCERT_OUTPUT_DIR")
    return parser


def _floats(text, what):
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise InputError(f"{what} must be comma-separated numbers, got {text!r}") from None


def _load(args):
    if args.instance is None:
        raise InputError("--instance is required")
    if args.instance.endswith(".json") or os.path.sep in args.instance:
        problem, cset, _ = load_config(args.instance)
    else:
        problem, cset = registry_instance(args.instance)
    if args.candidates:
        cset = read_candidates_csv(problem, args.candidates)
    elif args.sample_count:
        cset = sample_points(problem, args.sample_count, args.seed)
    elif args.grid_resolution:
        cset = make_grid(problem, args.grid_resolution)
    return problem, cset


def _query(args, problem, required=True):
    if args.point is None:
        if required:
            raise InputError("--point is required for this command")
        return None
    return evaluate(problem, _floats(args.point, "--point"))


def _m_hat(args):
    if args.m_hat is None or not args.m_hat > 0:
        raise InputError("--m-hat must be given and positive")
    return args.m_hat


def _config_echo(args):
    return {
        "command": args.command,
        "instance": args.instance,
        "candidates": args.candidates,
        "point": args.point,
        "epsilon": args.epsilon,
        "m_hat": args.m_hat,
        "weights": args.weights,
        "grid_resolution": args.grid_resolution,
        "sample_count": args.sample_count,
        "tol": args.tol,
        "seed": args.seed,
        "format": args.output_format,
    }


# --------------------------------------------------------------------------
# commands; each returns (results, diagnostics, negative)


def _cmd_pareto(args, problem, cset, eps):
    x = _query(args, problem, required=False)
    if x is None:
        mask = pareto.pareto_mask(cset, eps)
        rows = [dict(index=k, **_point(p), pareto=bool(mask[k])) for k, p in enumerate(cset)]
        return rows, [f"{int(mask.sum())} of {len(cset)} candidates are eps-Pareto"], False
    v = pareto.is_eps_pareto(x, cset, eps)
    row = dict(**_point(x), dominated=v.dominated,
               witness=None if v.witness is None else _point(v.witness),
               witness_index=v.witness_index, mode=v.mode.value)
    return [row], [], v.dominated


def _cmd_geoffrion(args, problem, cset, eps):
    weights = None
    if args.weights is not None:
        weights = scalarization.weight_vector(_floats(args.weights, "--weights"), problem.m)
        if args.m_hat is None:
            args.m_hat = scalarization.m_bound_from_weights(weights, problem.m)
    M = _m_hat(args)
    x = _query(args, problem, required=False)
    if x is None:
        mask = geoffrion.geoffrion_mask(cset, M, eps)
        rows = [dict(index=k, **_point(p), proper=bool(mask[k])) for k, p in enumerate(cset)]
        return rows, [f"{int(mask.sum())} of {len(cset)} candidates are proper at M={M!r}"], False
    try:
        cert = geoffrion.min_M_for_point(x, cset, eps)
    except PreconditionError as exc:
        return [dict(**_point(x), eps_pareto=False, proper=False)], [str(exc)], True
    proper = cert.is_proper(M)
    top = max(cert.witnesses, key=lambda w: w.ratio, default=None)
    row = dict(**_point(x), eps_pareto=True, minimal_M=cert.minimal_M, vacuous=cert.vacuous,
               m_hat=M, proper=proper, pairs=len(cert),
               binding=None if top is None else
               {"i": top.i, "j": top.best_j, "ratio": top.ratio, "x": top.x.x.tolist()})
    if weights is not None:
        row["weights"] = weights.tolist()
        row["s_eps_minimum"] = scalarization.is_s_eps_minimum(x, weights, eps, cset)
    return [row], [], not proper


def _cmd_kkt(args, problem, cset, eps):
    x = _query(args, problem)
    rep = kkt.kkt_residual(x, problem)
    row = dict(**_point(x), residual=rep.residual, comp_slack=rep.comp_slack,
               lam=rep.multipliers.lam.tolist(), mu=rep.multipliers.mu.tolist(),
               kkt=bool(x.feasible and rep.residual <= args.tol and rep.comp_slack >= -args.tol))
    negative = not row["kkt"]
    if np.any(eps > 0):
        e = float(np.max(eps))
        mod = kkt.is_modified_eps_kkt(x, e, problem, cset)
        row["modified_eps"] = e
        row["modified_certified"] = mod is not None
        if mod is not None:
            row["companion"] = mod.companion.x.tolist()
            row["companion_residual"] = mod.residual
        negative = mod is None
    return [row], [], negative


def _cmd_saddle(args, problem, cset, eps):
    M = _m_hat(args)
    x = _query(args, problem)
    rows, negative = [], False
    for i in range(problem.m):
        try:
            cert = geoffrion.gordan_multipliers(x, i, M, eps, cset)
        except (NoCertificateError, PreconditionError) as exc:
            rows.append({"i": i, "certificate": None, "reason": str(exc), "ok": False})
            negative = True
            continue
        rep = lagrangian.verify_saddle(i, x, cert.tau, cert.mu, eps, M, cset, atol=args.tol)
        rows.append({"i": i, "tau": cert.tau.tolist(), "mu": cert.mu.tolist(),
                     "eps_bar": rep.eps_bar, "left_ok": rep.left_ok, "right_ok": rep.right_ok,
                     "slack_ok": rep.slack_ok, "right_gap": rep.right_gap, "ok": rep.ok})
        negative |= not rep.ok
    return rows, [], negative


def _cmd_sequence(args, problem, cset, eps):
    x = _query(args, problem)
    eps0 = float(np.max(eps)) if np.any(eps > 0) else 0.1
    sched = sequences.make_schedule(eps0, args.factor, args.count)
    trace = sequences.build_kkt_sequence(problem, x, sched, cset)
    rows = [dict(k=k, eps=e, **_point(p), certified=r is not None,
                 residual=None if r is None else r.residual,
                 companion=None if r is None else r.companion.x.tolist())
            for k, (e, p, r) in enumerate(zip(trace.schedule, trace.points, trace.reports))]
    ok = sequences.verify_limit_kkt(trace, args.tol)
    diag = [f"limit {trace.limit.x.tolist()} residual {trace.limit_residual!r} "
            f"({trace.limit_kind}); limit KKT: {ok}"]
    return rows, diag, not (ok and trace.certified)


def _cmd_example(args, problem, cset, eps):
    rows = []
    for M in (2.0, 1.0, 0.99):
        members = geoffrion.geoffrion_set(cset, M, eps)
        rows.append({"m_hat": M, "size": len(members), "members": [p.x.tolist() for p in members]})
    for k, p in enumerate(cset):
        cert = geoffrion.min_M_for_point(p, cset, eps)
        rows.append({"index": k, "x": p.x.tolist(), "minimal_M": cert.minimal_M,
                     "vacuous": cert.vacuous})
    return rows, [], False


_HANDLERS = {
    "pareto": _cmd_pareto, "geoffrion": _cmd_geoffrion, "kkt": _cmd_kkt,
    "saddle": _cmd_saddle, "sequence": _cmd_sequence, "example": _cmd_example,
}


# --------------------------------------------------------------------------
# output


def _flatten(row, prefix=""):
    out = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)) and k in ("x", "f", "g") and not prefix:
            for t, vt in enumerate(v):
                out[f"{k}{t + 1}"] = vt
        else:
            out[key] = v
    return out


def _csv_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (list, tuple)):
        return ";".join(_csv_value(t) for t in v)
    return "" if v is None else str(v)


def render(report, fmt):
    if fmt == "json":
        return dumps(report) + "\n"
    rows = [_flatten(r) for r in report["results"]]
    cols = []
    for r in rows:
        cols += [c for c in r if c not in cols]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_csv_value(r.get(c)) for c in cols])
    return buf.getvalue()


def _target(path):
    base = os.environ.get("MOCERT_OUTPUT_DIR")
    if path and base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _emit(text, path):
    path = _target(path)
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None):
    """Parse ``argv``, run the command, write the report, return the exit code."""
    args = None
    try:
        args = build_parser().parse_args(argv)
        problem, cset = _load(args)
        vals = _floats(args.epsilon, "--epsilon")
        eps = epsilon_vector(vals[0] if len(vals) == 1 else vals, problem.m)
        results, diags, negative = _HANDLERS[args.command](args, problem, cset, eps)
        code = EXIT_NEGATIVE if negative else EXIT_OK
        diagnostics = [{"level": "info", "message": d} for d in diags]
    except (InputError, NotApplicableError) as exc:
        code, results = EXIT_INPUT, []
        diagnostics = [{"level": "error", "kind": type(exc).__name__, "message": str(exc)}]
    except NoCertificateError as exc:
        code, results = EXIT_NEGATIVE, []
        diagnostics = [{"level": "error", "kind": type(exc).__name__, "message": str(exc)}]
    except (NumericalError, EvaluationError, CertificationError) as exc:
        code, results = EXIT_NUMERICAL, []
        diagnostics = [{"level": "error", "kind": type(exc).__name__, "message": str(exc)}]

    report = {
        "schema_version": SCHEMA_VERSION,
        "command": getattr(args, "command", None),
        "config": _config_echo(args) if args is not None else {},
        "results": results,
        "diagnostics": diagnostics,
    }
    fmt = getattr(args, "output_format", "json") if args is not None else "json"
    try:
        text = render(report, fmt) if results or fmt == "json" else dumps(report) + "\n"
    except InputError:
        text = dumps(report) + "\n"
    _emit(text, getattr(args, "output", None))
    if code != EXIT_OK:
        for d in diagnostics:
            if d["level"] == "error":
                print(f"mocert: {d['message']}", file=sys.stderr)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
