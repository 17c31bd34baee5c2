"""Command line entry point: ``steinlab <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .experiments import (
    FAIL,
    ExperimentConfig,
    Report,
    load_configs,
    merge_reports,
    parse_ring,
    run_many,
    write_reports,
)

SUBCOMMANDS = {
    "build-complex": "build a truncated partial-basis complex or a Tits building and export it",
    "homology": "reduced integral homology of a building or partial-basis complex",
    "phi": "span of the apartment-class map over all bases of F_q^n",
    "folded-frame": "certified folded frames for every apartment of the quotient building",
    "integral-image": "image of integral apartment classes in the quotient building",
    "coinvariants": "GL_n(F_q)-coinvariants of the Steinberg module",
    "perms": "good and bad permutations and the sign-reversing involution",
    "run": "run every experiment in an INI config file",
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ring", default="Z", help="Z, F_q, Z[sqrt(-5)], Z[(1+sqrt(-23))/2] or Q(sqrt(d))")
    p.add_argument("--n", type=int, default=2, help="rank")
    p.add_argument("--ideal", default=None, help="0, O, or comma-separated generators such as 2,1+w")
    p.add_argument("--bound", type=int, action="append", default=None, help="vertex height bound (repeatable)")
    p.add_argument("--search-bound", type=int, default=None, help="completion and path bound, at least --bound")
    p.add_argument("--budget", type=int, default=None, help="search budget for summand searches")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="directory for report.json and exported tables")
    p.add_argument("--format", action="append", choices=["json", "csv", "dot"], default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steinlab", description="Exact experiments on buildings and partial bases.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in SUBCOMMANDS.items():
        p = sub.add_parser(name, help=text, description=text)
        if name == "run":
            p.add_argument("config", help="INI file with one section per experiment")
            p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
            p.add_argument("--out", default=None)
            p.add_argument("--format", action="append", choices=["json", "csv", "dot"], default=None)
            continue
        _common(p)
        if name == "homology":
            p.add_argument("--complex", choices=["building", "partial-bases"], default=None)
        if name == "perms":
            p.set_defaults(n=7)
    return parser


def config_from_args(args) -> ExperimentConfig:
    ring = parse_ring(args.ring)
    field = ring.kind == "field"
    common = {
        "ring": args.ring,
        "n": args.n,
        "ideal": args.ideal,
        "bounds": args.bound or [],
        "search_bound": args.search_bound,
        "budget": args.budget,
        "seed": args.seed,
        "formats": tuple(args.format or ["json"]),
        "name": args.command,
    }
    cmd = args.command
    if cmd == "build-complex":
        kind = "building-homology" if field else "pb-connectivity"
        return ExperimentConfig.from_mapping({"kind": kind, "homology": False, **common}, name=cmd)
    if cmd == "homology":
        which = args.complex or ("building" if field else "partial-bases")
        kind = "building-homology" if which == "building" else "pb-connectivity"
        return ExperimentConfig.from_mapping({"kind": kind, **common}, name=cmd)
    if cmd == "perms":
        return ExperimentConfig.from_mapping({"kind": "perm-combinatorics", "max_n": args.n, **common}, name=cmd)
    kind = {
        "phi": "phi-surjectivity",
        "folded-frame": "folded-frame",
        "integral-image": "integral-image",
        "coinvariants": "coinvariants",
    }[cmd]
    return ExperimentConfig.from_mapping({"kind": kind, **common}, name=cmd)


def print_report(rep: Report, stream=None) -> None:
    stream = stream or sys.stdout
    title = rep.config.name or rep.config.kind
    for c in rep.checks:
        extra = f" (expected {c.expected})" if c.status == FAIL and c.expected is not None else ""
        print(f"{c.status:<8} {title}: {c.name} = {json.dumps(c.value)}{extra}", file=stream)
    if rep.error:
        print(f"{FAIL:<8} {title}: {rep.error}", file=stream)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            configs = load_configs(args.config)
            if args.format:
                for c in configs:
                    c.formats = tuple(args.format)
            reports = run_many(configs, jobs=args.jobs)
        else:
            reports = run_many([config_from_args(args)])
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for rep in reports:
        print_report(rep)
    if args.out:
        path = write_reports(reports, args.out)
        print(f"report written to {path}")
    elif args.command != "run" and "json" in (args.format or []):
        print(json.dumps(merge_reports(reports), indent=1, sort_keys=True))
    return 1 if any(r.failed for r in reports) else 0


if __name__ == "__main__":
    sys.exit(main())
