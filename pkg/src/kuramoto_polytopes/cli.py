"""Command-line front end.

Exit status is 0 on success, 1 on a usage or input error and 2 when the
acceptance report contains a failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .core import project_mean_zero
from .evs import parse_distribution, phase_transition_experiment
from .membership import in_polytope, order_param_locking_test
from .norms import norm_for, parse_spec
from .points import MAX_MATERIALIZE, VertexFamily, tau, tau_general
from .report import DEFAULT_SEED, Profile, build_report, report_json
from .sampler import STD_ERROR_CAVEAT, covering_half_width, estimate_spec_volume, estimate_true_volume
from .tables import table1, table2
from .volumes import exact_volume, postnikov_volume

__all__ = ["main", "build_parser", "UsageError"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _config(args) -> dict:
    skip = {"func", "out"}
    cfg = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    cfg["version"] = __version__
    return cfg


def _emit(args, rows: list[dict], extra: dict | None = None):
    """Write rows as CSV (with a '# config' header line) or as JSON."""
    cfg = _config(args)
    if args.format == "json":
        body = {"config": cfg, "rows": rows}
        if extra:
            body.update(extra)
        text = json.dumps(body, indent=2, sort_keys=True, default=_json_default) + "\n"
    else:
        buf = io.StringIO()
        buf.write("# config " + json.dumps(cfg, sort_keys=True, default=_json_default) + "\r\n")
        if extra:
            for k, v in extra.items():
                buf.write(f"# {k} {v}\r\n")
        if rows:
            fields = list(dict.fromkeys(k for r in rows for k in r))
            w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\r\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: _fmt(v) for k, v in r.items()})
        text = buf.getvalue()
    _write(args, text)


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _write(args, text: str):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _vector(text: str):
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise UsageError(f"expected a comma-separated vector, got {text!r}")


def cmd_points(args):
    rows = []
    if args.tau:
        for n in args.n:
            row = {"n": n, "tau": tau(n).value}
            for j in range(1, n // 2 + 1):
                row[f"tau_{j}"] = tau_general(n, j).value
            rows.append(row)
        return _emit(args, rows)
    if len(args.n) != 1:
        raise UsageError("points needs a single --n")
    fam = VertexFamily(args.family, args.n[0], args.j)
    if len(fam) > MAX_MATERIALIZE:
        raise UsageError(f"{len(fam)} vertices exceed the limit of {MAX_MATERIALIZE}")
    for v in fam:
        rows.append({f"x{i + 1}": float(x) for i, x in enumerate(np.asarray(v))})
    _emit(args, rows, {"family": fam.label, "count": len(fam)})


def cmd_norm(args):
    spec = parse_spec(args.spec)
    y = project_mean_zero(_vector(args.omega)).entries if args.project else _vector(args.omega)
    if spec.kind == "HullOfUnion":
        raise UsageError("hull of a union has no closed-form norm; use `member`")
    _emit(args, [{"spec": str(spec), "norm": float(norm_for(spec, y))}])


def cmd_member(args):
    y = project_mean_zero(_vector(args.omega)).entries if args.project else _vector(args.omega)
    rows = []
    if args.spec:
        spec = parse_spec(args.spec)
        rows.append({"test": str(spec), "inside": bool(in_polytope(spec, y))})
    if args.locking:
        gamma = float(args.gamma) if args.gamma is not None else float(y.size)
        rows.append({"test": f"locking(gamma={gamma:g})", "inside": bool(order_param_locking_test(y, gamma))})
    if not rows:
        raise UsageError("member needs --spec and/or --locking")
    _emit(args, rows)


def cmd_volume(args):
    modes = [args.exact, args.mc, args.postnikov, args.true]
    if sum(bool(m) for m in modes) != 1:
        raise UsageError("choose exactly one of --exact, --mc, --postnikov, --true")
    extra = None
    if args.postnikov:
        if args.x is None:
            raise UsageError("--postnikov needs --x")
        x = _vector(args.x)
        row = {"x": args.x, "volume": postnikov_volume(x, euclidean=args.euclidean),
               "euclidean": bool(args.euclidean), "method": "exact"}
    elif args.true:
        if not args.n or len(args.n) != 1:
            raise UsageError("--true needs a single --n")
        est = estimate_true_volume(args.n[0], args.samples, args.seed, args.threads)
        row = dict(spec=f"true({args.n[0]})", method="mc", **est.as_dict())
        extra = {"caveat": STD_ERROR_CAVEAT}
    else:
        if not args.spec:
            raise UsageError("--exact and --mc need --spec")
        spec = parse_spec(args.spec)
        if args.n and args.n != [spec.n]:
            raise UsageError(f"--n {args.n} disagrees with spec {spec}")
        if args.exact:
            row = {"spec": str(spec), "volume": exact_volume(spec), "method": "exact"}
        else:
            est = estimate_spec_volume(spec, args.samples, args.seed, args.threads)
            row = dict(spec=str(spec), method="mc", cube_half_width=covering_half_width(spec), **est.as_dict())
            extra = {"caveat": STD_ERROR_CAVEAT}
    _emit(args, [row], extra)


def _table_rows(rows):
    out = []
    for r in rows:
        d = asdict(r)
        d["volume"] = float(d["volume"])
        out.append(d)
    return out


def cmd_table1(args):
    rows = table1(args.n or [5, 10, 15, 20], args.samples, args.seed, args.threads, args.verify)
    _emit(args, _table_rows(rows), {"caveat": STD_ERROR_CAVEAT})


def cmd_table2(args):
    n_list = args.n or [5, 10, 15]
    if any(n >= 10 for n in n_list):
        print("warning: hull-of-union rows solve one LP per sample and are slow", file=sys.stderr)
    rows = table2(n_list, args.samples, args.lp_samples, args.seed, args.threads, args.verify)
    _emit(args, _table_rows(rows), {"caveat": STD_ERROR_CAVEAT})


def cmd_evs(args):
    dist = parse_distribution(args.dist)
    curve = phase_transition_experiment(dist, args.n, args.kappa, args.trials, args.seed)
    _emit(args, [asdict(r) for r in curve.rows])


def cmd_report(args):
    maker = Profile.quick if args.profile == "quick" else Profile.full
    profile = maker(seed=args.seed, threads=args.threads)
    log = (lambda s: print(s, file=sys.stderr)) if args.verbose else None
    rep = build_report(profile, log=log)
    _write(args, report_json(rep))
    return 0 if rep["all_passed"] else 2


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="RNG seed (default %(default)s)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for Monte Carlo")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", metavar="FILE", help="write output here instead of stdout")

    p = _Parser(prog="kuramoto-polytopes", description="Phase-locking polytopes of the Kuramoto model.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("points", parents=[common], help="boundary vertex families or the tau table")
    s.add_argument("--n", type=_int_list, required=True)
    s.add_argument("--family", type=str.upper, choices=("DB", "CS"), default="CS")
    s.add_argument("--j", type=int, default=1)
    s.add_argument("--tau", action="store_true", help="print tau_N and tau_{N,j} for each --n")
    s.set_defaults(func=cmd_points)

    s = sub.add_parser("norm", parents=[common], help="closed-form polytope norm of a vector")
    s.add_argument("--spec", required=True)
    s.add_argument("--omega", "--vector", dest="omega", required=True, help="comma-separated mean-zero vector")
    s.add_argument("--project", action="store_true", help="subtract the mean first")
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("member", parents=[common], help="polytope membership and locking test")
    s.add_argument("--spec")
    s.add_argument("--omega", "--vector", dest="omega", required=True)
    s.add_argument("--project", action="store_true")
    s.add_argument("--locking", "--true", dest="locking", action="store_true", help="run the order-parameter test")
    s.add_argument("--gamma", type=float, help="coupling for --locking (default N)")
    s.set_defaults(func=cmd_member)

    s = sub.add_parser("volume", parents=[common], help="exact, Monte Carlo or permutahedron volume")
    s.add_argument("--spec")
    s.add_argument("--n", type=_int_list)
    s.add_argument("--samples", type=int, default=10**6)
    s.add_argument("--exact", action="store_true")
    s.add_argument("--mc", action="store_true")
    s.add_argument("--true", action="store_true", help="volume of the phase-locked region")
    s.add_argument("--postnikov", action="store_true")
    s.add_argument("--x", help="comma-separated vector for --postnikov")
    s.add_argument("--euclidean", action="store_true", help="multiply by sqrt(N)")
    s.set_defaults(func=cmd_volume)

    for name, fn, lp in (("table1", cmd_table1, False), ("table2", cmd_table2, True)):
        helptext = "circumscribed volume table" if name == "table1" else "inscribed volume table"
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--n", type=_int_list)
        s.add_argument("--samples", type=int, default=10**6)
        if lp:
            s.add_argument("--lp-samples", type=int, default=10**4)
        s.add_argument("--verify", action="store_true", help="also estimate exact cells by MC")
        s.set_defaults(func=fn)

    s = sub.add_parser("evs", parents=[common], help="synchronization phase-transition curve")
    s.add_argument("--dist", default="gaussian", help="gaussian, exp:RATE, dexp:RATE, uniform, ...")
    s.add_argument("--n", type=_int_list, required=True)
    s.add_argument("--kappa", type=_float_list, required=True)
    s.add_argument("--trials", type=int, default=500)
    s.set_defaults(func=cmd_evs)

    s = sub.add_parser("report", parents=[common], help="run the acceptance suite, emit JSON")
    s.add_argument("--profile", choices=("full", "quick"), default="full")
    s.add_argument("--verbose", action="store_true", help="log one line per check to stderr")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 1
    return 0 if code is None else code


if __name__ == "__main__":
    sys.exit(main())
