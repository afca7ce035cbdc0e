"""Command-line experiment runner.

Exit codes:
    0  success
    2  bad command-line usage
    3  scenario file not found / unreadable
    4  invalid scenario or invalid argument value (e.g. duration 0)
    5  output location not writable

Set IPNDN_LOG (DEBUG, INFO, WARNING, ...) to control log verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .gateway import Mode
from .simnet import ScenarioError, build_topology, load_scenario, mean_ci95, run
from .simnet.results import (
    FLOW_COLUMNS,
    NODE_COLUMNS,
    RUN_COLUMNS,
    flow_rows,
    fmt,
    node_rows,
    run_summary,
    write_csv,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING = 3
EXIT_INVALID = 4
EXIT_UNWRITABLE = 5

log = logging.getLogger("ipndn")

_DURATION = re.compile(r"^\s*([0-9]*\.?[0-9]+)\s*(ms|s|m)?\s*$")


class UsageError(Exception):
    pass


class OutputError(Exception):
    pass


def parse_duration(text: str) -> float:
    """'10s', '500ms', '2m' or a bare number of seconds -> milliseconds."""
    m = _DURATION.match(text)
    if not m:
        raise UsageError(f"bad duration {text!r} (use e.g. 10s, 500ms)")
    value = float(m.group(1))
    scale = {"ms": 1.0, "s": 1000.0, "m": 60000.0, None: 1000.0}[m.group(2)]
    ms = value * scale
    if ms <= 0:
        raise UsageError(f"duration must be > 0, got {text!r}")
    return ms


def parse_seeds(text: str) -> list[int]:
    """'1,2,5' or '1-10' (inclusive) or a mix: '1-3,7'."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise UsageError("at least one seed is required")
    return seeds


def _load(ref: str):
    return load_scenario(ref)


def _prepare_out(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OutputError(f"cannot write to {path}: {exc.strerror or exc}") from exc
    return out


def cmd_validate(args) -> int:
    scenario = _load(args.scenario)
    build_topology(scenario)
    print(
        f"{args.scenario}: ok ({len(scenario.nodes)} nodes, {len(scenario.links)} links, "
        f"{len(scenario.flows)} flows)"
    )
    return EXIT_OK


def cmd_run(args) -> int:
    duration = parse_duration(args.duration)
    topo = build_topology(_load(args.scenario))
    out = _prepare_out(args.out)
    result = run(topo, seed=args.seed, duration_ms=duration, mode=args.mode)
    write_csv(out / "flows.csv", flow_rows(result), FLOW_COLUMNS)
    write_csv(out / "nodes.csv", node_rows(result), NODE_COLUMNS)
    for row in flow_rows(result):
        log.info(
            "%s %s: %d/%d delivered, %.3f Mbit/s, jitter %s ms",
            result.mode.value, row["flow_id"], row["received_packets"], row["sent_packets"],
            row["rate_bps"] / 1e6, fmt(row["jitter_ms"]) or "n/a",
        )
    print(f"wrote {out / 'flows.csv'} and {out / 'nodes.csv'}")
    return EXIT_OK


def _one(job):
    ref, mode, seed, duration = job
    topo = build_topology(load_scenario(ref))
    return run(topo, seed=seed, duration_ms=duration, mode=mode)


def compare(scenario: str, seeds: list[int], duration_ms: float, jobs: int = 1):
    """Run both modes for every seed; returns per-run summaries and results in (mode, seed) order."""
    work = [(scenario, mode, seed, duration_ms) for mode in (Mode.BASIC, Mode.IMPROVED) for seed in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_one, work))
    else:
        results = [_one(w) for w in work]
    return [run_summary(r) for r in results], results


def summarize(runs: list[dict]) -> list[dict]:
    rows = []
    for mode in (Mode.BASIC, Mode.IMPROVED):
        mine = [r for r in runs if r["mode"] == mode.value]
        for metric in ("rate_bps", "jitter_ms", "loss_pct", "overhead_ratio"):
            mean, half = mean_ci95([r[metric] for r in mine])
            rows.append({"mode": mode.value, "metric": metric, "n": len(mine), "mean": mean, "ci95": half})
    return rows


def cmd_compare(args) -> int:
    duration = parse_duration(args.duration)
    seeds = parse_seeds(args.seeds)
    build_topology(_load(args.scenario))
    out = _prepare_out(args.out)
    runs, results = compare(args.scenario, seeds, duration, args.jobs)

    write_csv(out / "runs.csv", runs, RUN_COLUMNS)
    write_csv(out / "flows.csv", [row for r in results for row in flow_rows(r)], FLOW_COLUMNS)
    summary = summarize(runs)
    write_csv(out / "summary.csv", summary, ["mode", "metric", "n", "mean", "ci95"])

    print(f"{'mode':<9} {'metric':<15} {'mean':>14} {'95% CI':>14}")
    for row in summary:
        ci = f"±{row['ci95']:.4g}" if row["ci95"] is not None else "n/a"
        print(f"{row['mode']:<9} {row['metric']:<15} {row['mean']:>14.6g} {ci:>14}")
    print(f"wrote {out / 'summary.csv'}, {out / 'runs.csv'}, {out / 'flows.csv'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ipndn", description="IP over NDN gateway simulator")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a scenario without simulating")
    v.add_argument("scenario", help="scenario file or bundled scenario name")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("run", help="simulate one mode and seed, write flows.csv and nodes.csv")
    r.add_argument("scenario", help="scenario file or bundled scenario name")
    r.add_argument("--mode", choices=[m.value for m in Mode], default="basic")
    r.add_argument("--seed", type=int, default=1)
    r.add_argument("--duration", default="10s")
    r.add_argument("--out", default="results")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="basic vs improved over several seeds")
    c.add_argument("scenario", help="scenario file or bundled scenario name")
    c.add_argument("--seeds", default="1-10")
    c.add_argument("--duration", default="3s")
    c.add_argument("--out", default="results")
    c.add_argument("--jobs", type=int, default=1, help="worker processes")
    c.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("IPNDN_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNWRITABLE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except ScenarioError as exc:
        print(f"error: invalid scenario\n{exc}", file=sys.stderr)
        return EXIT_INVALID
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_UNWRITABLE


if __name__ == "__main__":
    sys.exit(main())
