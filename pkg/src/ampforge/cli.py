"""Command-line front end.

Every subcommand produces a list of rows.  Rows are written as CSV (one
header row, floats at 17 significant digits) and, with ``--output PREFIX``,
also as ``PREFIX.json`` holding the same fields.  Exit status: 0 when every
row passes its check, 1 when a check fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import applications as apps
from .approx import library_function
from .circuits import build_diag_encoding_real_part
from .engine import function_transform, importance_transform, uniform_transform
from .errors import AmpforgeError, BadPromiseError, UsageError
from .instances import oracle_from_real, planted_gap_state, random_complex_state, random_real_state
from .lemmas import DEFAULT_TRIALS, PARTS, run_fuzz

ENCODE_TOL = 1e-9
OK, FAILED, USAGE = 0, 1, 2


# --------------------------------------------------------------------------
# argument helpers


def int_range(text: str) -> list:
    """``"4"``, ``"4-10"`` or ``"4,6,8"`` to a list of integers."""
    try:
        out = []
        for part in str(text).split(","):
            if "-" in part.strip()[1:]:
                lo, hi = part.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer range: {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty range")
    return out


def float_list(text: str) -> list:
    try:
        return [float(v) for v in str(text).split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "" if v is None else str(v)


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (int, np.integer)):
        return int(v)
    return v


def rows_to_csv(rows: list) -> str:
    fields = []
    for r in rows:
        fields.extend(k for k in r if k not in fields)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_fmt(r.get(k)) for k in fields])
    return buf.getvalue()


def rows_to_json(rows: list) -> str:
    return json.dumps([{k: _jsonable(v) for k, v in r.items()} for r in rows], indent=1) + "\n"


def _function(args):
    params = {}
    if getattr(args, "sigma", None) is not None:
        params["sigma"] = args.sigma
    return library_function(args.function, k=getattr(args, "k", None), **params)


def _map(func, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(func, items))
    return [func(i) for i in items]


# --------------------------------------------------------------------------
# subcommands


def _encode_row(item):
    n, seed, p = item
    u = random_complex_state(n, seed) if p == 1 else random_real_state(n, seed)
    be = build_diag_encoding_real_part(u, p)
    amp = u.amplitudes()
    diag = amp.real if p == 0 else amp.imag
    dev = float(np.linalg.norm(np.diag(diag) - be.alpha * be.raw_block(), 2))
    return {
        "n": n,
        "seed": seed,
        "p": p,
        "max_block_deviation": dev,
        "ancillas": be.ancillas,
        "controlled_U_queries": be.controlled_U_queries,
        "depth_estimate": be.depth_estimate,
        "passed": dev <= ENCODE_TOL,
    }


def cmd_encode_check(args):
    items = [(n, args.seed + t, args.p) for n in args.n for t in range(args.trials)]
    return _map(_encode_row, items, args.jobs)


def cmd_transform(args):
    f = _function(args)
    rows = []
    for n in args.n:
        u = random_real_state(n, args.seed)
        if args.engine == "auto":
            _, rep = function_transform(u, f, args.eps, budget=args.budget, encoding=args.encoding)
        else:
            psi = u.real_amplitudes()
            fvals = f.func(psi)
            eps0 = args.eps * float(np.linalg.norm(fvals)) ** 2 / (16 * f.gamma * psi.size)
            p = f.at_tolerance(eps0).poly
            engine = importance_transform if args.engine == "importance" else uniform_transform
            _, rep = engine(u, p, args.eps / 2, encoding=args.encoding, reference=fvals)
        row = {"function": f.target_name, "n": n, "seed": args.seed, "eps": args.eps}
        row.update(rep.to_dict())
        row["poly_degree"] = rep.details.get("poly_degree")
        row["passed"] = rep.achieved_l2_error <= args.eps
        rows.append(row)
    return rows


def cmd_approx_error(args):
    rows = []
    for k in args.k:
        params = {} if args.sigma is None else {"sigma": args.sigma}
        f = library_function(args.function, k=k, **params)
        rows.append(
            {
                "function": args.function,
                "k": k,
                "degree": f.degree,
                "bound": f.sup_error_bound,
                "measured": f.measured_error,
                "passed": f.measured_error <= f.sup_error_bound,
            }
        )
    return rows


def cmd_benchmark_tanh(args):
    ns = list(range(args.n_min, args.n_max + 1))
    rows = apps.benchmark_tanh(ns, args.eps, args.seed, encoding=args.encoding)
    spread = apps.relative_spread([r["queries_importance"] for r in rows])
    slope = (
        apps.loglog_slope([2 ** (r["n"] / 2) for r in rows], [r["queries_uniform"] for r in rows])
        if len(rows) > 1
        else float("nan")
    )
    ok = spread <= args.max_spread and (len(rows) < 2 or args.slope_min <= slope <= args.slope_max)
    for r in rows:
        r["importance_spread"] = spread
        r["uniform_slope"] = slope
        r["passed"] = bool(ok and r["target_norm"] >= 0.75 and max(r["error_importance"], r["error_uniform"]) <= args.eps)
    return rows


def _maxfind_row(item):
    n, gap, seed, eps, claimed_gap = item
    v, top = planted_gap_state(n, gap, seed)
    spec = apps.MaxFindSpec(oracle_from_real(v), float(v[top]), claimed_gap, eps)
    return _maxfind(spec, top, {"n": n, "gap": gap, "claimed_gap": claimed_gap, "seed": seed, "eps": eps})


def _maxfind(spec, expected, row):
    row = dict(row, expected_index=expected)
    try:
        index, rep = apps.find_maximum(spec)
    except BadPromiseError as exc:
        row.update(index=-1, top_probability=float("nan"), mask_degree=-1, passed=False, error=str(exc))
        return row
    row.update(
        index=index,
        top_probability=rep.details["top_probability"],
        threshold=rep.details["threshold"],
        mask_degree=rep.details["mask_degree"],
        controlled_U_queries=rep.controlled_U_queries,
        passed=(expected is None or index == expected),
        error="",
    )
    return row


def cmd_max_find(args):
    if args.amplitudes is not None:
        v = np.asarray(args.amplitudes)
        u = oracle_from_real(v)
        psi = u.real_amplitudes()
        order = np.argsort(-psi, kind="stable")
        psi1 = args.psi1 if args.psi1 is not None else float(psi[order[0]])
        gap = args.gap if args.gap is not None else float(psi[order[0]] - psi[order[1]])
        spec = apps.MaxFindSpec(u, psi1, gap, args.eps)
        return [_maxfind(spec, int(order[0]), {"n": u.n_qubits, "gap": gap, "eps": args.eps})]
    if args.gap is None:
        raise UsageError("--gap is required for planted instances")
    claimed = args.gap if args.claimed_gap is None else args.claimed_gap
    items = [(args.n[0], args.gap, args.seed + t, args.eps, claimed) for t in range(args.trials)]
    return _map(_maxfind_row, items, args.jobs)


def cmd_prepare_state(args):
    if args.function == "constant":
        from .approx import constant_approximation

        f = constant_approximation(1.0)
    else:
        f = _function(args)
    rows = []
    for n in args.n:
        _, rep = apps.prepare_state(apps.StatePrepSpec(f, (args.a, args.b), n, args.eps))
        rows.append(
            {
                "function": f.target_name,
                "n": n,
                "a": args.a,
                "b": args.b,
                "eps": args.eps,
                "achieved_l2_error": rep.achieved_l2_error,
                "filling_ratio": rep.details["filling_ratio"],
                "composite_degree": rep.details["composite_degree"],
                "success_probability": rep.success_probability,
                "aa_rounds": rep.aa_rounds,
                "controlled_U_queries": rep.controlled_U_queries,
                "passed": rep.achieved_l2_error <= args.eps,
            }
        )
    return rows


def cmd_lemma_fuzz(args):
    parts = args.parts
    if any(p not in PARTS for p in parts):
        raise UsageError(f"--parts must be letters from {''.join(PARTS)}")
    return [
        {
            "part": r.part,
            "trials": r.trials,
            "checks": r.checks,
            "violations": r.violations,
            "worst_ratio": r.worst,
            "passed": r.passed,
        }
        for r in run_fuzz(parts, args.seed, args.trials)
    ]


COMMANDS = {
    "encode-check": cmd_encode_check,
    "transform": cmd_transform,
    "approx-error": cmd_approx_error,
    "benchmark-tanh": cmd_benchmark_tanh,
    "max-find": cmd_max_find,
    "prepare-state": cmd_prepare_state,
    "lemma-fuzz": cmd_lemma_fuzz,
}


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed for every random instance")
    common.add_argument("--output", help="write PREFIX.csv and PREFIX.json instead of CSV on stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for independent trials")
    common.add_argument("--config", help="JSON file with option values (command line wins)")

    parser = argparse.ArgumentParser(prog="ampforge", description="Amplitude transformation experiments.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("encode-check", parents=[common], help="diagonal block-encoding exactness")
    p.add_argument("--n", type=int_range, default=[3])
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--p", type=int, choices=(0, 1), default=0, help="0: real part, 1: imaginary part")

    p = sub.add_parser("transform", parents=[common], help="transform a seeded state")
    p.add_argument("--function", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--n", type=int_range, default=[4])
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--engine", choices=("auto", "importance", "uniform"), default="auto")
    p.add_argument("--budget", choices=("standard", "weighted"), default="standard")
    p.add_argument("--encoding", choices=("auto", "circuit", "standin"), default="auto")

    p = sub.add_parser("approx-error", parents=[common], help="measured vs analytic approximation error")
    p.add_argument("--function", required=True)
    p.add_argument("--k", type=int_range, default=[10])
    p.add_argument("--sigma", type=float)

    p = sub.add_parser("benchmark-tanh", parents=[common], help="importance vs uniform engine on tanh")
    p.add_argument("--n-min", type=int, default=4)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--eps", type=float, default=1e-2)
    p.add_argument("--encoding", choices=("auto", "circuit", "standin"), default="auto")
    p.add_argument("--max-spread", type=float, default=0.15)
    p.add_argument("--slope-min", type=float, default=0.8)
    p.add_argument("--slope-max", type=float, default=1.2)

    p = sub.add_parser("max-find", parents=[common], help="index of the largest amplitude")
    p.add_argument("--n", type=int_range, default=[3])
    p.add_argument("--gap", type=float, help="planted gap (or claimed gap with --amplitudes)")
    p.add_argument("--claimed-gap", type=float, help="gap promised to the algorithm (defaults to --gap)")
    p.add_argument("--psi1", type=float)
    p.add_argument("--amplitudes", type=float_list, help="comma-separated non-negative amplitudes")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=1)

    p = sub.add_parser("prepare-state", parents=[common], help="sample a function into amplitudes")
    p.add_argument("--function", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--a", type=float, default=-1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--n", type=int_range, default=[6])
    p.add_argument("--eps", type=float, default=1e-2)

    p = sub.add_parser("lemma-fuzz", parents=[common], help="randomised lemma checks")
    p.add_argument("--parts", default="".join(DEFAULT_TRIALS))
    p.add_argument("--trials", type=int, help="override every part's trial count")
    parser.set_defaults(subparsers=sub.choices)
    return parser


def _apply_config(parser, sub_name, path, argv):
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    cmd = cfg.pop("command", None)
    if cmd is not None and cmd != sub_name:
        raise UsageError(f"config is for {cmd!r}, not {sub_name!r}")
    subparser = parser.get_default("subparsers")[sub_name]
    known = {a.dest: a for a in subparser._actions}
    out = []
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest not in known or dest in ("help", "config"):
            raise UsageError(f"unknown config key {key!r}")
        flags = known[dest].option_strings
        if any(a == f or a.startswith(f + "=") for a in argv for f in flags):
            continue
        flag = flags[0]
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        out += [flag, str(value)]
    return out


def parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        extra = _apply_config(parser, args.command, args.config, argv)
        args = parser.parse_args(list(argv) + extra)
    return args


def emit(rows, output):
    text = rows_to_csv(rows)
    if output:
        with open(output + ".csv", "w") as fh:
            fh.write(text)
        with open(output + ".json", "w") as fh:
            fh.write(rows_to_json(rows))
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    except (UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"ampforge: {exc}", file=sys.stderr)
        return USAGE
    try:
        rows = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ampforge: {exc}", file=sys.stderr)
        return USAGE
    except AmpforgeError as exc:
        print(f"ampforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return FAILED
    emit(rows, args.output)
    return OK if all(r.get("passed", True) for r in rows) else FAILED


if __name__ == "__main__":
    sys.exit(main())
