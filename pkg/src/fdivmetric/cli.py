"""Command-line interface: ``fdivmetric <subcommand> ...``.

Every report starts with a header holding the package version, the seed
and the numerical defaults in force.  JSON output carries ``"schema": 1``;
CSV output puts the header in ``#`` comment lines.

Exit status: 0 when every requested check passes, 1 when a check fails,
2 on usage or input errors.
"""

import argparse
import csv
import io
import json
import math
import sys
from importlib import resources

import numpy as np

from . import __version__
from . import cone_cost as cc
from . import divergence_dynamics as dd
from . import entropy as en
from . import entropy_transport as et
from . import metric_check as mc
from ._kernels import KERNEL_NAME
from .marginal_perspective import MarginalPerspective

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

#: parameter sets emitted by ``plot-data --family all``
FIGURE_FAMILIES = {
    "chi": ["1", "2", "3"],
    "matusita": ["0.25", "0.5", "1"],
    "powerlike": ["-1", "0", "0.5", "1", "2"],
    "powerlog": ["1", "1.5", "2"],
    "doublepower": ["1.5/0.5", "2/1", "-1/2"],
}


class CLIError(Exception):
    pass


def _num(x):
    """JSON-safe float: infinities become the strings ``"inf"``/``"-inf"``."""
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def header(args, **defaults):
    out = {
        "program": "fdivmetric",
        "version": __version__,
        "command": args.command,
        "seed": getattr(args, "seed", mc.SEED),
        "kernel": KERNEL_NAME,
    }
    out.update(defaults)
    return out


class Output:
    """Collects a report and writes it as JSON or CSV."""

    def __init__(self, args):
        self.fmt = args.format
        self.path = args.output

    def _write(self, text):
        if self.path in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(self.path, "w", newline="") as fh:
                fh.write(text)

    def emit(self, head, report, columns=None, rows=None):
        if self.fmt == "json":
            doc = {"schema": 1, "header": head}
            doc.update(report)
            self._write(json.dumps(_clean(doc), indent=2) + "\n")
            return
        buf = io.StringIO()
        for k, v in head.items():
            buf.write(f"# {k}: {v}\n")
        for k, v in report.items():
            if not isinstance(v, (list, dict)):
                buf.write(f"# {k}: {_num(v) if isinstance(v, float) else v}\n")
        if columns is not None:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(columns)
            for row in rows:
                w.writerow([_num(x) if isinstance(x, (float, np.floating)) else x for x in row])
        self._write(buf.getvalue())


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise CLIError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _load_measure(path):
    data = _load_json(path)
    try:
        return en.DiscreteMeasure.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise CLIError(f"{path}: not a measure file ({exc})") from exc


def _entropy(text):
    try:
        return en.parse_entropy(text)
    except (ValueError, TypeError, OSError) as exc:
        raise CLIError(f"bad entropy spec {text!r}: {exc}") from exc


def bundled(name):
    """Path of a bundled example file."""
    return str(resources.files("fdivmetric") / "data" / name)


# ----------------------------------------------------------------------
# subcommands


def cmd_divergence(args):
    F = _entropy(args.entropy)
    mu1 = _load_measure(args.mu1)
    mu2 = _load_measure(args.mu2)
    try:
        keys, r, t = en._aligned(mu1, mu2)
    except en.SpaceMismatchError as exc:
        raise CLIError(str(exc)) from exc
    R = F.reverse()
    H = MarginalPerspective(F)
    rows = []
    for k, ri, ti in zip(keys, r, t):
        rows.append((k, ri, ti, en.perspective(F, ri, ti), en.perspective(R, ri, ti), float(H(ri, ti))))

    def total(col):
        vals = [row[col] for row in rows]
        return math.fsum(vals) if all(math.isfinite(v) for v in vals) else math.inf

    report = {
        "entropy": F.spec,
        "D_F": total(3),
        "D_R": total(4),
        "H": total(5),
        "atoms": [dict(zip(("atom", "r", "t", "D_F", "D_R", "H"), row)) for row in rows],
    }
    Output(args).emit(header(args), report, ["atom", "r", "t", "D_F", "D_R", "H"], rows)
    return EXIT_OK


def _is_self_reverse(F, s_max):
    s = np.exp(np.linspace(0.0, math.log(s_max), 33))
    with np.errstate(all="ignore"):
        a = np.asarray(F(s), dtype=float)
        b = s * np.asarray(F(1.0 / s), dtype=float)
    fin = np.isfinite(a) & np.isfinite(b)
    if np.any(np.isfinite(a) != np.isfinite(b)):
        return False
    return bool(np.all(np.abs(a[fin] - b[fin]) <= 1e-9 * (1.0 + np.abs(a[fin]))))


def cmd_iterate(args):
    F = _entropy(args.entropy)
    try:
        dd.prefactor(args.a)
    except ValueError as exc:
        raise CLIError(str(exc)) from exc
    if _is_self_reverse(F, args.smax):
        seed = dd.SampledFunction.from_callable(F, args.nodes, args.smax)
        start = "entropy"
    else:
        # first application done exactly: T_a(F)(s) = 2**(1/a-1) H_F(1, s)
        H = MarginalPerspective(F)
        fac = dd.prefactor(args.a)
        seed = dd.SampledFunction.from_callable(lambda s: fac * np.asarray(H(np.ones_like(s), s)), args.nodes, args.smax)
        start = "T_a(entropy)"
    G, rep = dd.iterate_T(seed, args.a, args.max_iters, args.tol, kernel=args.kernel, keep_trace=True)
    head = header(args, nodes=args.nodes, s_max=args.smax, tol=args.tol, max_iters=args.max_iters,
                  n_scan=dd.N_SCAN, n_golden=dd.N_GOLDEN)
    report = rep.to_dict()
    report.update({"entropy": F.spec, "start": start, "final": list(zip(G.grid.tolist(), G.values.tolist()))})
    rows = dd.trace_rows(seed, rep)
    Output(args).emit(head, report if args.format == "json" else {k: v for k, v in report.items() if k != "final"},
                      ["iter", "s", "value"], rows)
    return EXIT_OK if rep.converged else EXIT_FAIL


def cmd_metric_audit(args):
    F = _entropy(args.entropy)
    H = MarginalPerspective(F)
    tri = mc.check_costless_triangle(H, args.a, args.grid, args.random, args.seed)
    ok_k, prof = mc.kafka_certificate(H, args.a)
    report = {"entropy": F.spec, "a": args.a, "triangle": tri.to_dict(), "kafka": {"passed": ok_k, **prof.to_dict()}}
    if args.max_power:
        report["max_metric_power"] = mc.max_metric_power(H, u_grid=args.grid, n_random=args.random, seed=args.seed)
    head = header(args, grid=args.grid, random=args.random, tol_triangle=mc.TOL_TRI, tol_monotone=mc.TOL_MONO)
    w = tri.witness or {}
    rows = [(F.spec, args.a, "PASS" if tri.passed else "FAIL", tri.worst_violation, w.get("u"), w.get("v"),
             "PASS" if ok_k else "FAIL")]
    Output(args).emit(head, report, ["entropy", "a", "triangle", "worst_violation", "u", "v", "kafka"], rows)
    return EXIT_OK if tri.passed else EXIT_FAIL


def _space(args):
    try:
        if args.space:
            return cc.FiniteMetricSpace.load_csv(args.space)
        if args.path:
            return cc.FiniteMetricSpace.path(args.path)
        return cc.FiniteMetricSpace.load_csv(bundled("planar5.csv"))
    except (OSError, ValueError) as exc:
        raise CLIError(f"cannot build metric space: {exc}") from exc


def cmd_cone(args):
    p = args.p
    head = header(args, samples=args.samples, tol_triangle=mc.TOL_TRI)
    report = {"p": p}
    ok = True
    rows = []
    if args.eval:
        try:
            d, r, t = (float(x) for x in args.eval.split(","))
        except ValueError as exc:
            raise CLIError("--eval expects d,r,t") from exc
        val = cc.h_p_cone(p, d, r, t)
        report["value"] = val
        rows.append(("value", val, "", ""))
    elif p >= 1:
        X = _space(args)
        rep = cc.check_cone_triangle(p, X, samples=args.samples, seed=args.seed)
        report["triangle"] = rep.to_dict()
        ok = rep.passed
        rows.append(("triangle", rep.worst_violation, "PASS" if ok else "FAIL", rep.tested_count))
    else:
        cx = cc.counterexample_p_below_one(p)
        report["counterexample"] = cx
        ok = False
        rows.append(("counterexample", cx["margin"], "FAIL", ""))
    if args.final_inequality:
        if p <= 1:
            raise CLIError("--final-inequality needs p > 1")
        fin_ok, info = cc.final_inequality_check(p)
        report["final_inequality"] = {"passed": fin_ok, **info}
        ok = ok and fin_ok
        rows.append(("final_inequality", info["sup_lhs"], "PASS" if fin_ok else "FAIL", info["inf_rhs"]))
    Output(args).emit(head, report, ["check", "value", "status", "extra"], rows)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_et_solve(args):
    try:
        P = et.ETProblem.load(args.problem)
    except OSError as exc:
        raise CLIError(f"cannot read {args.problem}: {exc.strerror}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise CLIError(f"{args.problem}: invalid problem ({exc})") from exc
    try:
        plan, value, rep = et.solve(P, tol=args.tol, max_iters=args.max_iters, method=args.method)
    except ValueError as exc:
        raise CLIError(str(exc)) from exc
    report = et.solution_dict(plan, value, rep)
    report.pop("schema")
    ok = rep.converged and rep.feasible
    if args.brute_force:
        try:
            h_form = args.h_form == "on" or (args.h_form == "auto" and P.F.family == "powerlike")
            bf = et.brute_force_et(P, args.grid, forms=("energy", "h") if h_form else ("energy",))
        except et.ETError as exc:
            raise CLIError(str(exc)) from exc
        report["brute_force"] = bf.to_dict()
        report["brute_force"].pop("schema")
        agree = abs(value - bf.energy_min) <= 1e-4 * (1.0 + abs(bf.energy_min))
        report["brute_force"]["agrees"] = agree
        ok = ok and agree
    head = header(args, tol=args.tol, max_iters=args.max_iters, coercivity_factor=et.COERCIVITY_FACTOR,
                  grid=args.grid)
    rows = [(i, j, plan[i, j]) for i in range(plan.shape[0]) for j in range(plan.shape[1])]
    Output(args).emit(head, report, ["i", "j", "gamma"], rows)
    return EXIT_OK if ok else EXIT_FAIL


def _family_params(family, token):
    return [x for x in token.split("/") if x]


def cmd_plot_data(args):
    if args.family == "all":
        jobs = [(fam, tok) for fam, toks in FIGURE_FAMILIES.items() for tok in toks]
    else:
        toks = args.params.split(",") if args.params else FIGURE_FAMILIES.get(args.family, [])
        jobs = [(args.family, tok.strip()) for tok in toks if tok.strip()]
    s = np.linspace(args.s_min, args.s_max, args.points)
    rows = []
    for fam, tok in jobs:
        try:
            F = en.make_entropy(fam, _family_params(fam, tok))
        except (ValueError, TypeError) as exc:
            raise CLIError(f"bad parameters {tok!r} for {fam}: {exc}") from exc
        vals = F(s)
        rows.extend((fam, tok, float(si), float(v)) for si, v in zip(s, vals))
    head = header(args, s_min=args.s_min, s_max=args.s_max, points=args.points)
    report = {"rows": len(rows)}
    if args.format == "json":
        report["data"] = [dict(zip(("family", "param", "s", "F"), r)) for r in rows]
    Output(args).emit(head, report, ["family", "param", "s", "F(s)"], rows)
    return EXIT_OK


# ----------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="fdivmetric", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (default json; csv for plot-data)")
    common.add_argument("-o", "--output", default=None, help="output file (default stdout)")
    common.add_argument("--seed", type=lambda x: int(x, 0), default=mc.SEED, help="RNG seed (default 0x5EED)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("divergence", parents=[common], help="D_F, D_R and H_F between two measures")
    p.add_argument("--entropy", required=True, help="entropy spec, e.g. powerlike:1")
    p.add_argument("--mu1", required=True, help="measure JSON file")
    p.add_argument("--mu2", required=True, help="measure JSON file")
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("iterate", parents=[common], help="iterate T_a on a sampled entropy")
    p.add_argument("--entropy", required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--nodes", type=int, default=dd.DEFAULT_NODES)
    p.add_argument("--smax", type=float, default=dd.DEFAULT_SMAX)
    p.add_argument("--tol", type=float, default=dd.DEFAULT_TOL)
    p.add_argument("--max-iters", type=int, default=dd.DEFAULT_MAX_ITERS)
    p.add_argument("--kernel", choices=("python", "cython"), default=None)
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("metric-audit", parents=[common], help="triangle audit of H_F**a")
    p.add_argument("--entropy", required=True)
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--grid", type=int, default=mc.GRID_N)
    p.add_argument("--random", type=int, default=mc.N_RANDOM)
    p.add_argument("--max-power", action="store_true", help="also bisect the largest metric power")
    p.set_defaults(func=cmd_metric_audit)

    p = sub.add_parser("cone", parents=[common], help="cone metric audit for U_p with cost d^2")
    p.add_argument("--p", type=float, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--space", help="distance-matrix CSV (default: bundled planar 5-point space)")
    g.add_argument("--path", type=int, help="unit-edge path with this many points")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--eval", help="only evaluate H_p at d,r,t")
    p.add_argument("--final-inequality", action="store_true")
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("et-solve", parents=[common], help="solve a discrete entropy-transport problem")
    p.add_argument("problem", help="problem JSON file")
    p.add_argument("--tol", type=float, default=et.TOL_SOLVE)
    p.add_argument("--max-iters", type=int, default=et.MAX_ITERS)
    p.add_argument("--method", choices=("auto", "gradient", "coordinate"), default="auto")
    p.add_argument("--brute-force", action="store_true", help="compare with the grid oracle (m*n <= 4)")
    p.add_argument("--grid", type=int, default=20, help="brute-force points per entry")
    p.add_argument("--h-form", choices=["auto", "on", "off"], default="auto",
                   help="also minimise the homogeneous form (auto: only for powerlike, where it is fast)")
    p.set_defaults(func=cmd_et_solve)

    p = sub.add_parser("plot-data", parents=[common], help="sample entropy families as CSV")
    p.add_argument("--family", required=True, help="family name or 'all'")
    p.add_argument("--params", default=None, help="comma-separated parameter sets; two-parameter sets as p/q")
    p.add_argument("--s-min", type=float, default=0.0)
    p.add_argument("--s-max", type=float, default=4.0)
    p.add_argument("--points", type=int, default=201)
    p.set_defaults(func=cmd_plot_data)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "plot-data" else "json"
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"fdivmetric: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
