"""Command line: ``fairdiv solve | verify | bench | generate``.

stdout carries exactly one JSON document; diagnostics go to stderr.
Exit codes: 0 success / verdict true, 1 verdict false, 2 user error,
3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import statistics
import sys
import time
from fractions import Fraction
from pathlib import Path

from .core import Allocation, Instance, fmt
from .errors import FairDivError, HypothesisViolation, InvariantBreach, TooLarge
from .gen import FAMILIES, generate
from .solve import ALGORITHMS, run_algorithm
from .verify import (
    EF,
    EF1,
    EFX,
    FairnessReport,
    alpha_ef,
    alpha_efx,
    check_fairness,
    max_alpha_efx,
)

log = logging.getLogger("fairdiv")

EXIT_OK, EXIT_FALSE, EXIT_USER, EXIT_BREACH = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _trace_path(algorithm: str) -> Path:
    base = Path(os.environ.get("FAIRDIV_TRACE_DIR", "."))
    base.mkdir(parents=True, exist_ok=True)
    return base / f"trace-{algorithm.replace(':', '_')}.jsonl"


def cmd_solve(args) -> int:
    inst = Instance.from_json(_load_json(args.instance))
    trace = [] if args.trace else None
    doc = run_algorithm(inst, args.algorithm, trace)
    doc["algorithm"] = args.algorithm
    if trace is not None:
        path = _trace_path(args.algorithm)
        path.write_text("".join(json.dumps(r, sort_keys=True) + "\n" for r in trace))
        log.info("trace written to %s", path)
    _emit(doc)
    return EXIT_OK if doc["allocation"] is not None else EXIT_FALSE


def parse_property(text: str):
    t = text.strip().lower()
    simple = {"ef": EF, "ef1": EF1, "efx": EFX}
    if t in simple:
        return simple[t]
    if t == "max-alpha":
        return None
    name, _, alpha = t.partition(":")
    try:
        if name == "alpha-ef":
            return alpha_ef(Fraction(alpha))
        if name == "alpha-efx":
            return alpha_efx(Fraction(alpha))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad alpha in {text!r}: {exc}") from exc
    raise UsageError(f"unknown property {text!r}")


def cmd_verify(args) -> int:
    inst = Instance.from_json(_load_json(args.instance))
    alloc = Allocation.from_json(_load_json(args.allocation), inst.m)
    alloc.check_for(inst)
    prop = parse_property(args.property)
    if prop is None:
        report = FairnessReport(True, [], max_alpha_efx(inst, alloc))
    else:
        report = check_fairness(inst, alloc, prop)
    _emit(report.to_json())
    return EXIT_OK if report.verdict else EXIT_FALSE


def parse_seeds(text: str) -> range:
    try:
        if ":" in text:
            a, b = text.split(":", 1)
            return range(int(a), int(b))
        return range(int(text))
    except ValueError as exc:
        raise UsageError(f"bad seed range {text!r} (use N or START:STOP)") from exc


def _family_params(args) -> dict:
    params = {"n": args.n, "m": args.m}
    for key in ("ell", "kind", "max_tier_size", "lo", "hi"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    return params


def bench_one(job):
    """Run one seed; returns a result row (never raises for hypothesis mismatches)."""
    family, params, algorithm, seed = job
    row = {"seed": seed, "status": "ok", "alpha": "", "ef1": "", "efx": "", "fallbacks": 0, "seconds": 0.0}
    try:
        inst = generate(family, params, seed)
        t0 = time.perf_counter()
        doc = run_algorithm(inst, algorithm)
        row["seconds"] = round(time.perf_counter() - t0, 6)
    except (HypothesisViolation, TooLarge) as exc:
        row.update(status="inapplicable", detail=str(exc))
        return row
    except InvariantBreach as exc:
        row.update(status="breach", detail=str(exc))
        return row
    if doc["allocation"] is None:
        row["status"] = "no-solution"
        return row
    alpha = Fraction(doc["verified"]["efx_alpha"])
    row.update(
        alpha=fmt(alpha),
        ef1=doc["verified"]["ef1"],
        efx=alpha == 1,
        fallbacks=doc.get("fallbacks", 0),
    )
    return row


def summarize(rows: list) -> dict:
    ok = [r for r in rows if r["status"] == "ok"]
    alphas = sorted(Fraction(r["alpha"]) for r in ok)
    out = {
        "runs": len(rows),
        "applicable": len(ok),
        "inapplicable": sum(r["status"] == "inapplicable" for r in rows),
        "breaches": sum(r["status"] == "breach" for r in rows),
        "min_alpha": fmt(alphas[0]) if alphas else None,
        "median_alpha": fmt(statistics.median_low(alphas)) if alphas else None,
        "ef1_pass_rate": sum(r["ef1"] is True for r in ok) / len(ok) if ok else None,
        "efx_pass_rate": sum(r["efx"] is True for r in ok) / len(ok) if ok else None,
        "fallback_activations": sum(r["fallbacks"] for r in ok),
        "total_seconds": round(sum(r["seconds"] for r in ok), 6),
    }
    return out


def cmd_bench(args) -> int:
    params = _family_params(args)
    jobs = [(args.family, params, args.algorithm, s) for s in parse_seeds(args.seeds)]
    if args.jobs > 1:
        from multiprocessing import Pool

        with Pool(args.jobs) as pool:
            rows = pool.map(bench_one, jobs)
    else:
        rows = [bench_one(j) for j in jobs]
    summary = {"family": args.family, "algorithm": args.algorithm, "params": params, **summarize(rows)}
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        fields = ["seed", "status", "alpha", "ef1", "efx", "fallbacks", "seconds", "detail"]
        with open(out.with_suffix(".csv"), "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=fields)
            w.writeheader()
            for r in rows:
                w.writerow(r)
        out.with_suffix(".json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _emit(summary)
    return EXIT_OK if summary["breaches"] == 0 else EXIT_BREACH


def cmd_generate(args) -> int:
    _emit(generate(args.family, _family_params(args), args.seed).to_json())
    return EXIT_OK


def _add_family_args(p) -> None:
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--ell", type=int)
    p.add_argument("--kind")
    p.add_argument("--max-tier-size", dest="max_tier_size", type=int)
    p.add_argument("--lo", type=int)
    p.add_argument("--hi", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairdiv", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run a solver on an instance file")
    p.add_argument("instance")
    p.add_argument("--algorithm", required=True, help=" | ".join(ALGORITHMS))
    p.add_argument("--trace", action="store_true", help="write a JSONL trace to $FAIRDIV_TRACE_DIR")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a fairness property of an allocation")
    p.add_argument("instance")
    p.add_argument("allocation")
    p.add_argument("--property", required=True, help="ef | ef1 | efx | alpha-ef:p/q | alpha-efx:p/q | max-alpha")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run an algorithm over generated instances")
    _add_family_args(p)
    p.add_argument("--seeds", default="100", help="N or START:STOP")
    p.add_argument("--algorithm", required=True)
    p.add_argument("--out", help="path prefix for the CSV rows and JSON summary")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("generate", help="emit a generated instance as JSON")
    _add_family_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USER if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, HypothesisViolation, ValueError) as exc:
        print(f"fairdiv: error: {exc}", file=sys.stderr)
        return EXIT_USER
    except InvariantBreach as exc:
        print(f"fairdiv: internal invariant breach: {exc}", file=sys.stderr)
        return EXIT_BREACH
    except FairDivError as exc:
        print(f"fairdiv: error: {exc}", file=sys.stderr)
        return EXIT_USER


if __name__ == "__main__":
    sys.exit(main())
