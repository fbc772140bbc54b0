"""Command-line front end.

Every subcommand prints an output envelope:

    {"version": ..., "command": [...], "seed": ..., "payload": {...},
     "elapsed_ms": ...}

Identical command + seed + config produce a byte-identical payload
(elapsed_ms excluded).  Exit codes: 0 success, 1 domain error, 2 usage
error, 3 resource limit.

Worker counts come from --workers, falling back to the GPFREE_WORKERS
environment variable, then to the available parallelism.  A --config FILE of
key=value lines may preset the resource budgets of gpfree.limits.Limits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time

from . import __version__, bounds, divisor, gpcore, process, syndetic
from .errors import GPFreeError, ResourceLimit
from .limits import DEFAULT_LIMITS, Limits

WORKERS_ENV = "GPFREE_WORKERS"

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _load_limits(path: str | None) -> Limits:
    if not path:
        return DEFAULT_LIMITS
    overrides = {}
    int_keys = {"sieve_max_len", "mertens_max_x", "process_max_n", "search_node_budget"}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key in int_keys:
                overrides[key] = int(value)
            elif key == "search_time_budget_s":
                overrides[key] = float(value)
            else:
                raise GPFreeError(f"unknown config key {key!r}")
    return DEFAULT_LIMITS.with_overrides(**overrides)


def _emit(args, payload: dict, seed=None, elapsed_ms: float = 0.0) -> None:
    fmt = getattr(args, "format", "json")
    if fmt == "csv" and "rows" in payload:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(payload["columns"])
        writer.writerows(payload["rows"])
        sys.stdout.write(buf.getvalue())
        return
    envelope = {
        "version": __version__,
        "command": args._argv,
        "seed": seed,
        "payload": payload,
        "elapsed_ms": round(elapsed_ms, 3),
    }
    json.dump(envelope, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")


def _gp_payload(gp: gpcore.KGeoProgression) -> dict:
    return {"k": gp.k, "a": gp.a, "b": gp.b, "c": gp.c, "terms": gp.terms()}


# ---------------------------------------------------------------------------
# gp subcommands

def cmd_gp_enumerate(args):
    stream = gpcore.enumerate_gps(args.k, args.position, args.bound)
    out = []
    for gp in stream:
        out.append(_gp_payload(gp))
        if len(out) >= args.max_items:
            break
    return {"gps": out, "truncated": len(out) >= args.max_items}


def cmd_gp_decompose(args):
    terms = [int(t) for t in args.terms.split(",")]
    return _gp_payload(gpcore.canonicalize(terms))


def cmd_gp_contains(args):
    with open(args.input) as fh:
        members = sorted({int(tok) for tok in fh.read().split()})
    mode = gpcore.INTEGER if args.mode == "int" else gpcore.RATIONAL
    witness = gpcore.contains_gp(members, args.k, mode)
    return {"witness": _gp_payload(witness) if witness else None}


# ---------------------------------------------------------------------------
# divisor subcommands

def _divisor_spec(args) -> divisor.DivisorSpec:
    if args.k is not None:
        return divisor.DivisorSpec.single(args.k)
    return divisor.DivisorSpec.pair(args.i, args.j)


def cmd_divisor_table(args):
    limits = _load_limits(args.config)
    table = divisor.sieve(divisor.Interval(args.start, args.len), _divisor_spec(args), limits)
    rows = list(table.rows())
    return {
        "interval": {"x": args.start, "h": args.len},
        "spec": table.spec.label(),
        "columns": ["n", "value"],
        "rows": rows,
        "values": [v for _, v in rows],
    }


def cmd_divisor_sum(args):
    limits = _load_limits(args.config)
    val = divisor.sum_S(divisor.Interval(args.start, args.len), args.i, args.j, args.D, limits)
    return {"x": args.start, "h": args.len, "i": args.i, "j": args.j, "D": args.D, "S": val}


def cmd_divisor_mertens(args):
    limits = _load_limits(args.config)
    return {"x": args.x, "sum": divisor.mertens_sum(args.x, limits)}


# ---------------------------------------------------------------------------
# process subcommands

def _parse_kind(s: str) -> process.ProcessKind:
    return process.ProcessKind(s)


def cmd_process_run(args):
    limits = _load_limits(args.config)
    cfg = process.ProcessConfig(_parse_kind(args.kind), args.n, args.seed)
    run_ = process.run(cfg, workers=args.workers, limits=limits)
    doc = process.run_to_dict(run_)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(process.run_to_json(run_))
        return {"written": args.out, "counts": doc["counts"], "config": doc["config"]}
    return doc


def _load_run(path: str) -> process.ProcessRun:
    with open(path) as fh:
        return process.run_from_json(fh.read())


def cmd_process_gaps(args):
    rep = process.gap_report(_load_run(args.infile), args.epsilon)
    return {
        "epsilon": rep.epsilon,
        "max_gap": rep.max_gap,
        "fitted_c_eps": rep.fitted_c_eps,
        "gap_count": len(rep.gaps),
        "columns": ["t", "gap"],
        "rows": [list(g) for g in rep.gaps],
    }


def cmd_process_verify(args):
    witness = process.verify_free(_load_run(args.infile))
    return {"free": witness is None,
            "witness": _gp_payload(witness) if witness else None}


def cmd_process_survival(args):
    limits = _load_limits(args.config)
    est = process.survival_probability(
        _parse_kind(args.kind), args.x, args.h, args.trials, args.seed, limits
    )
    return {
        "kind": est.kind.value, "x": est.x, "h": est.h,
        "trials": est.trials, "empties": est.empties, "estimate": est.estimate,
    }


# ---------------------------------------------------------------------------
# syndetic subcommands

def cmd_syndetic_search(args):
    limits = _load_limits(args.config)
    if args.budget is not None:
        limits = limits.with_overrides(search_node_budget=args.budget)
    inst = syndetic.build_instance(args.n, args.pairing)
    out = syndetic.search(inst, order=args.order, propagation=not args.no_propagation,
                          workers=args.workers, limits=limits)
    payload = {
        "N": args.n,
        "pairing": args.pairing,
        "verdict": out.verdict,
        "nodes": out.stats.nodes,
        "prunings": out.stats.prunings,
        "elapsed_ms": round(out.stats.elapsed_ms, 3),
    }
    if out.selection is not None:
        payload["counterexample"] = list(out.selection)
    if out.verdict == syndetic.BUDGET_EXHAUSTED:
        raise ResourceLimit(json.dumps(payload, sort_keys=True))
    return payload


def cmd_syndetic_export(args):
    inst = syndetic.build_instance(args.n, args.pairing)
    sys.stdout.write(syndetic.export_dimacs(inst))
    return None  # already printed


# ---------------------------------------------------------------------------
# bounds subcommand

def cmd_bounds_envelope(args):
    if args.points < 1:
        raise SystemExit(EXIT_USAGE)
    if args.points == 1:
        xs = [float(args.x0)]
    else:
        # geometric grid from x0 to x1 inclusive
        ratio = (args.x1 / args.x0) ** (1.0 / (args.points - 1))
        xs = [args.x0 * ratio**p for p in range(args.points)]
    rows = [[x, bounds.gap_envelope(x, args.epsilon, args.c_eps)] for x in xs]
    return {
        "C_2_3": bounds.C_ij(2, 3),
        "epsilon": args.epsilon,
        "c_eps": args.c_eps,
        "columns": ["x", "value"],
        "rows": rows,
    }


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gpfree", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, workers=False, config=True, fmt=True):
        if fmt:
            sp.add_argument("--format", choices=["json", "csv"], default="json")
        if config:
            sp.add_argument("--config", default=None, help="key=value budget file")
        if workers:
            sp.add_argument("--workers", type=int, default=_default_workers())

    gp = sub.add_parser("gp", help="geometric-progression core").add_subparsers(
        dest="sub", required=True)
    sp = gp.add_parser("enumerate")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--position", type=int, required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--max-items", type=int, default=10000)
    common(sp)
    sp.set_defaults(func=cmd_gp_enumerate)
    sp = gp.add_parser("decompose")
    sp.add_argument("--terms", required=True, help="comma-separated integers")
    common(sp)
    sp.set_defaults(func=cmd_gp_decompose)
    sp = gp.add_parser("contains")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--mode", choices=["rational", "int"], default="rational")
    sp.add_argument("--input", required=True)
    common(sp)
    sp.set_defaults(func=cmd_gp_contains)

    dv = sub.add_parser("divisor", help="divisor-function sieves and sums").add_subparsers(
        dest="sub", required=True)
    sp = dv.add_parser("table")
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--i", type=int, default=None)
    sp.add_argument("--j", type=int, default=None)
    sp.add_argument("--start", type=int, required=True)
    sp.add_argument("--len", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_divisor_table)
    sp = dv.add_parser("sum")
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--j", type=int, required=True)
    sp.add_argument("--start", type=int, required=True)
    sp.add_argument("--len", type=int, required=True)
    sp.add_argument("--D", type=float, required=True)
    common(sp)
    sp.set_defaults(func=cmd_divisor_sum)
    sp = dv.add_parser("mertens")
    sp.add_argument("--x", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_divisor_mertens)

    pr = sub.add_parser("process", help="randomized GP-removal processes").add_subparsers(
        dest="sub", required=True)
    sp = pr.add_parser("run")
    sp.add_argument("--kind", choices=["6gp", "5gp", "3gp-int"], required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", default=None)
    common(sp, workers=True)
    sp.set_defaults(func=cmd_process_run)
    sp = pr.add_parser("gaps")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--epsilon", type=float, required=True)
    common(sp)
    sp.set_defaults(func=cmd_process_gaps)
    sp = pr.add_parser("verify")
    sp.add_argument("--in", dest="infile", required=True)
    common(sp)
    sp.set_defaults(func=cmd_process_verify)
    sp = pr.add_parser("survival")
    sp.add_argument("--kind", choices=["6gp", "5gp", "3gp-int"], required=True)
    sp.add_argument("--x", type=int, required=True)
    sp.add_argument("--h", type=int, required=True)
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_process_survival)

    sy = sub.add_parser("syndetic", help="exhaustive pair-selection search").add_subparsers(
        dest="sub", required=True)
    sp = sy.add_parser("search")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--pairing", choices=["disjoint", "overlapping"], default="disjoint")
    sp.add_argument("--order", choices=[syndetic.ASCENDING, syndetic.MOST_CONSTRAINED],
                    default=syndetic.ASCENDING)
    sp.add_argument("--no-propagation", action="store_true")
    sp.add_argument("--budget", type=int, default=None, help="node budget")
    common(sp, workers=True)
    sp.set_defaults(func=cmd_syndetic_search)
    sp = sy.add_parser("export")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--pairing", choices=["disjoint", "overlapping"], default="disjoint")
    sp.add_argument("--format", choices=["dimacs"], default="dimacs")
    common(sp, config=False, fmt=False)
    sp.set_defaults(func=cmd_syndetic_export)

    bd = sub.add_parser("bounds", help="envelope evaluation").add_subparsers(
        dest="sub", required=True)
    sp = bd.add_parser("envelope")
    sp.add_argument("--epsilon", type=float, required=True)
    sp.add_argument("--c-eps", dest="c_eps", type=float, required=True)
    sp.add_argument("--from", dest="x0", type=float, required=True)
    sp.add_argument("--to", dest="x1", type=float, required=True)
    sp.add_argument("--points", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_bounds_envelope)

    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = argv
    if not hasattr(args, "config"):
        args.config = None
    t0 = time.perf_counter()
    try:
        payload = args.func(args)
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except GPFreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if payload is not None:
        _emit(args, payload, seed=getattr(args, "seed", None),
              elapsed_ms=(time.perf_counter() - t0) * 1000.0)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
