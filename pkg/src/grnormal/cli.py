"""Command-line interface: ``grnormal {predict,certify,sweep-lemmas,compute,verify}``.

Exit codes: 0 when everything checked passes, 1 when a Mismatch or a failed
proof step is found, 2 for usage and configuration errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from .cohomology import DEFAULT_PRIME
from .exactlinalg import is_prime, MAX_MODULUS
from .harness import (
    MISMATCH,
    certify_or_error,
    default_samples,
    emit_records,
    resolve_seed,
    run_header,
    verdict_counts,
    verify_box,
    verify_cell,
)
from .induction import revalidate, sweep_lemmas
from .predictor import DegenerateGrassmannian, predict_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive(name, value, lo=1):
    if value < lo:
        raise UsageError(f"--{name} must be >= {lo}, got {value}")


def _check_prime(p):
    if not is_prime(p) or p > MAX_MODULUS:
        raise UsageError(f"--p must be a prime <= {MAX_MODULUS}, got {p}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grnormal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="closed-form classification of a cell")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--char", type=int, default=0)

    p = sub.add_parser("certify", help="replay the inductive proof for one instance")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--tree", action="store_true", help="print the full certificate tree")

    p = sub.add_parser("sweep-lemmas", help="exhaustive check of the numerical lemmas on a box")
    p.add_argument("--a-max", type=int, required=True)
    p.add_argument("--b-max", type=int, required=True)
    p.add_argument("--d-max", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--diagnostics", action="store_true",
                   help="also report the uncorrected form of the positivity inequality")

    p = sub.add_parser("compute", help="sample curves and compute normal bundle types")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=int, default=DEFAULT_PRIME)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--mod", action="append", choices=("lower", "upper"), default=[],
                   help="add a general modification at a fresh point (repeatable)")

    p = sub.add_parser("verify", help="cross-check predictor, certificates and engine on a box")
    p.add_argument("--a-max", type=int, required=True)
    p.add_argument("--b-max", type=int, required=True)
    p.add_argument("--d-max", type=int, required=True)
    p.add_argument("--sum-max", type=int, default=None, help="only cells with a + b <= SUM_MAX")
    p.add_argument("--p", type=int, default=DEFAULT_PRIME)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None, help="append JSONL records here instead of printing a summary")
    p.add_argument("--timing", action="store_true", help="include per-cell timings in records")
    return parser


def _dump(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_predict(args) -> int:
    _positive("a", args.a)
    _positive("b", args.b)
    _positive("d", args.d)
    if args.char < 0:
        raise UsageError("--char must be 0 or a prime")
    try:
        report = predict_report(args.a, args.b, args.d, args.char)
    except DegenerateGrassmannian as exc:
        raise UsageError(str(exc)) from exc
    _dump(report.to_dict())
    return EXIT_OK


def cmd_certify(args) -> int:
    _positive("a", args.a)
    _positive("b", args.b, 2)
    _positive("d", args.d)
    _positive("n", args.n, 0)
    cert, err = certify_or_error(args.a, args.b, args.d, args.n)
    if err is not None:
        _dump({"instance": [args.a, args.b, args.d, args.n], "error": type(err).__name__, "message": str(err)})
        return EXIT_FAIL
    out = cert.to_dict() if args.tree else {
        "instance": cert.instance.to_dict(),
        "regime": cert.regime.value,
        "conclusion": cert.conclusion.to_dict(),
        "depth": cert.depth(),
        "nodes": len(cert.unique_nodes()),
    }
    out["revalidated"] = revalidate(cert)
    if cert.exception:
        out["exception"] = cert.exception
    _dump(out)
    return EXIT_OK if out["revalidated"] else EXIT_FAIL


def cmd_sweep(args) -> int:
    for name in ("a_max", "b_max"):
        _positive(name.replace("_", "-"), getattr(args, name), 2)
    _positive("d-max", args.d_max)
    _positive("n-max", args.n_max, 0)
    t0 = time.perf_counter()
    try:
        reports = sweep_lemmas((2, args.a_max), (2, args.b_max), (1, args.d_max), (0, args.n_max),
                               diagnostics=args.diagnostics)
    except OverflowError as exc:
        raise UsageError(str(exc)) from exc
    out = {"lemmas": [r.to_dict() for r in reports],
           "examples": {r.lemma: [list(map(int, v)) if not isinstance(v[0], str) else list(v)
                                  for v in r.violations[:5]] for r in reports if r.violations},
           "seconds": round(time.perf_counter() - t0, 2)}
    _dump(out)
    primary = [r for r in reports if r.lemma != "dpos_as_printed"]
    return EXIT_OK if all(r.passed for r in primary) else EXIT_FAIL


def cmd_compute(args) -> int:
    _positive("a", args.a)
    _positive("b", args.b)
    _positive("d", args.d)
    _check_prime(args.p)
    if args.a * args.b < 2:
        raise UsageError("the normal bundle of a curve in Gr(1, 2) has rank 0")
    seed = resolve_seed(args.seed)
    samples = args.samples or default_samples(args.p)
    rec = verify_cell(args.a, args.b, args.d, args.p, samples, seed, mod_kinds=args.mod)
    out = rec.to_dict()
    out["type"] = rec.witnesses[0] if len(rec.witnesses) == 1 else rec.witnesses
    _dump(out)
    return EXIT_FAIL if rec.verdict == MISMATCH else EXIT_OK


def cmd_verify(args) -> int:
    _positive("a-max", args.a_max)
    _positive("b-max", args.b_max, 2)
    _positive("d-max", args.d_max)
    _positive("jobs", args.jobs)
    _check_prime(args.p)
    seed = resolve_seed(args.seed)
    samples = args.samples or default_samples(args.p)
    records = verify_box(args.a_max, args.b_max, args.d_max, args.p, samples, seed, args.jobs, args.sum_max)
    box = {"a_max": args.a_max, "b_max": args.b_max, "d_max": args.d_max, "sum_max": args.sum_max}
    counts = verdict_counts(records)
    if args.out:
        try:
            emit_records(records, args.out, run_header(box, seed, args.p, samples), args.timing)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from exc
        _dump({"cells": len(records), "verdicts": counts, "out": args.out})
    else:
        _dump({"header": run_header(box, seed, args.p, samples), "cells": len(records), "verdicts": counts,
               "records": [r.to_dict(args.timing) for r in records]})
    return EXIT_FAIL if counts[MISMATCH] else EXIT_OK


COMMANDS = {"predict": cmd_predict, "certify": cmd_certify, "sweep-lemmas": cmd_sweep,
            "compute": cmd_compute, "verify": cmd_verify}


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"grnormal {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None) -> None:
    sys.exit(run_command(argv))


if __name__ == "__main__":
    main()
