"""Command-line runner: ``dialg --type G2 --check strange``.

Exit status 0 when every selected check passes (skips are not failures),
1 on any failure, 2 on a usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from .checks import CheckPlan, build_registry, run_check, select
from .rootdata import RootDataError

SCHEMA = "dialg-report/1"
_REGISTRY = {}


def _registry(plan):
    reg = _REGISTRY.get(plan)
    if reg is None:
        reg = _REGISTRY[plan] = {c.id: c for c in build_registry(plan)}
    return reg


def _run_one(plan, cid):
    return run_check(_registry(plan)[cid], plan)


def run(plan: CheckPlan, jobs: int = 1):
    """Execute the plan; returns (records, unknown selectors)."""
    picked, unknown = select(list(_registry(plan).values()), plan.checks)
    if unknown:
        return [], unknown
    ids = [c.id for c in picked]
    if jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            recs = list(pool.map(_run_one, [plan] * len(ids), ids))
    else:
        recs = [_run_one(plan, cid) for cid in ids]
    return recs, []


def summarize(recs):
    out = {"pass": 0, "fail": 0, "skipped": 0}
    for r in recs:
        out[r["status"]] += 1
    out["total"] = len(recs)
    out["ok"] = out["fail"] == 0
    return out


def machine_report(plan, recs, timings=False) -> str:
    """One JSON document {schema, plan, checks, summary}.  Wall-clock times
    are left out (null) unless asked for, so equal plans give equal bytes."""
    checks = []
    for r in recs:
        rec = {"id": r["id"], "status": r["status"], "strategy": r["strategy"],
               "elapsed": round(r["elapsed"], 3) if timings else None,
               "witness": r["witness"]}
        checks.append(rec)
    doc = {"schema": SCHEMA, "plan": plan.as_dict(), "checks": checks, "summary": summarize(recs)}
    return json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"


def text_report(plan, recs) -> str:
    lines = [f"dialg: type {plan.rtype} ({plan.cd.convention}), mode {plan.mode}, "
             f"N={plan.N}, {plan.tag()}"]
    width = max((len(r["id"]) for r in recs), default=10)
    for r in recs:
        line = f"  {r['status'].upper():7} {r['id']:<{width}}  {r['elapsed']:7.2f}s"
        if r["witness"] and r["status"] != "pass":
            line += "  " + json.dumps(r["witness"], sort_keys=True, default=str)
        lines.append(line)
    s = summarize(recs)
    lines.append(f"{s['pass']} passed, {s['fail']} failed, {s['skipped']} skipped")
    return "\n".join(lines) + "\n"


def _parser():
    ap = argparse.ArgumentParser(prog="dialg", description=__doc__.splitlines()[0])
    ap.add_argument("--type", required=True, help="root type, e.g. A2, B3, G2")
    ap.add_argument("--convention", choices=("standard", "ns"), default=None)
    ap.add_argument("--mode", choices=("theta", "generic"), default="theta")
    ap.add_argument("--check", default="all",
                    help="comma-separated check ids or prefixes (default: all)")
    ap.add_argument("--p-order", type=int, default=4, dest="N")
    ap.add_argument("--equality", choices=("exact", "prob"), default="prob")
    ap.add_argument("--seed", type=lambda s: int(s, 0), default=0xD1A)
    ap.add_argument("--trials", type=int, default=24)
    ap.add_argument("--report", choices=("text", "machine"), default="text")
    ap.add_argument("--out", default=None, help="write the report here instead of stdout")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes")
    ap.add_argument("--timings", action="store_true", help="keep wall-clock times in machine reports")
    ap.add_argument("--list", action="store_true", help="list the check ids and exit")
    return ap


def main(argv=None) -> int:
    ap = _parser()
    args = ap.parse_args(argv)
    try:
        plan = CheckPlan(args.type, args.convention, args.mode, args.N, args.equality,
                         args.seed, args.trials, tuple(s.strip() for s in args.check.split(",") if s.strip()))
    except (ValueError, RootDataError) as exc:
        ap.print_usage(sys.stderr)
        print(f"dialg: error: {exc}", file=sys.stderr)
        return 2
    if args.list:
        print("\n".join(_registry(plan)))
        return 0
    recs, unknown = run(plan, args.jobs)
    if unknown:
        print(f"dialg: error: unknown check id(s): {', '.join(unknown)}", file=sys.stderr)
        return 2
    body = machine_report(plan, recs, args.timings) if args.report == "machine" else text_report(plan, recs)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return 0 if summarize(recs)["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
