"""Command line interface.

Exit codes: 0 related/ok, 1 not-related, 2 usage or model errors,
3 unknown verdicts and exceeded caps or budgets.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus as corpus_mod
from .checkers import DecideCaps, check_relation, decide, verify
from .errors import ParseError, PneqError, SearchBudgetError, StateSpaceLimitError
from .formats import lts_to_dot, parse_marking, parse_net, parse_relation
from .ltsbisim import decide_interleaving
from .net import reach_lts
from .relations import additive_member, d_additive_member, format_side

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_UNKNOWN = 3

GRAPH_KINDS = ("int", "bint")
PLACE_KINDS = ("place", "dplace", "bplace", "bdplace")


def _load_net(path: str):
    return parse_net(Path(path).read_text())


def _witness_pairs(rel) -> list:
    return [[format_side(a), format_side(b)] for a, b in rel.sorted_pairs()]


def _emit(report: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=True))
        return
    print(f"verdict: {report['verdict']}")
    if report.get("witness"):
        pairs = " ".join(f"({a},{b})" for a, b in report["witness"])
        print(f"witness: {pairs}")
    for v in report.get("violations", []):
        print(
            f"violation: transition {v['transition']} side {v['side']} "
            f"against {v['marking']}: {v['reason']}"
        )
    stats = report.get("stats", {})
    if stats:
        short = ", ".join(f"{k}={stats[k]}" for k in sorted(stats))
        print(f"stats: {short}")


def _verdict_exit(status: str) -> int:
    if status == "related":
        return EXIT_OK
    if status == "not-related":
        return EXIT_NEGATIVE
    return EXIT_UNKNOWN


def cmd_check(args) -> int:
    net = _load_net(args.net)
    m1 = parse_marking(args.m1, net)
    m2 = parse_marking(args.m2, net)
    query = {
        "command": "check",
        "net": args.net,
        "eq": args.eq,
        "m1": args.m1,
        "m2": args.m2,
    }
    if args.eq in GRAPH_KINDS:
        equivalent, lts = decide_interleaving(
            net, m1, m2, args.eq == "bint", args.state_cap, 10 * args.state_cap
        )
        status = "related" if equivalent else "not-related"
        report = {
            "query": query,
            "verdict": status,
            "witness": None,
            "violations": [],
            "stats": {"states": len(lts.states), "edges": len(lts.edges)},
        }
        _emit(report, args.json)
        return _verdict_exit(status)
    threads = 1 if args.deterministic else args.threads
    caps = DecideCaps(
        max_pairs=args.max_pairs, node_budget=args.node_budget, threads=threads
    )
    verdict = decide(net, m1, m2, args.eq, args.mode, caps)
    query["mode"] = args.mode
    report = {
        "query": query,
        "verdict": verdict.status,
        "witness": _witness_pairs(verdict.witness) if verdict.witness else None,
        "violations": [],
        "stats": verdict.stats,
    }
    _emit(report, args.json)
    return _verdict_exit(verdict.status)


def cmd_verify(args) -> int:
    net = _load_net(args.net)
    rel = parse_relation(Path(args.relation).read_text(), net)
    m1 = parse_marking(args.m1, net)
    m2 = parse_marking(args.m2, net)
    verdict = verify(net, rel, args.eq, m1, m2)
    violations = []
    if not verdict.stats.get("relation_ok", False):
        report = check_relation(net, rel, args.eq)
        violations = [
            {
                "transition": v.transition,
                "marking": net.format_marking(v.marking),
                "side": v.side,
                "reason": v.reason,
                "details": v.details,
            }
            for v in report.violations
        ]
    report = {
        "query": {
            "command": "verify",
            "net": args.net,
            "eq": args.eq,
            "relation": args.relation,
            "m1": args.m1,
            "m2": args.m2,
        },
        "verdict": verdict.status,
        "witness": _witness_pairs(verdict.witness) if verdict.witness else None,
        "violations": violations,
        "stats": verdict.stats,
    }
    _emit(report, args.json)
    return _verdict_exit(verdict.status)


def cmd_closure(args) -> int:
    net = _load_net(args.net)
    rel = parse_relation(Path(args.relation).read_text(), net)
    m1 = parse_marking(args.m1, net)
    m2 = parse_marking(args.m2, net)
    witness = d_additive_member(rel, m1, m2) if args.d else additive_member(rel, m1, m2)
    member = witness is not None
    report = {
        "query": {
            "command": "closure",
            "net": args.net,
            "relation": args.relation,
            "d": args.d,
            "m1": args.m1,
            "m2": args.m2,
        },
        "verdict": "member" if member else "not-member",
        "witness": (
            [[format_side(a), format_side(b)] for a, b in witness.pairs]
            if member
            else None
        ),
        "violations": [],
        "stats": {},
    }
    _emit(report, args.json)
    return EXIT_OK if member else EXIT_NEGATIVE


def cmd_lts(args) -> int:
    net = _load_net(args.net)
    m0 = parse_marking(args.m0, net)
    lts = reach_lts(net, [m0], state_cap=args.cap, edge_cap=10 * args.cap)
    if args.dot:
        Path(args.dot).write_text(lts_to_dot(lts, net))
    report = {
        "query": {"command": "lts", "net": args.net, "m0": args.m0, "cap": args.cap},
        "verdict": "ok",
        "witness": None,
        "violations": [],
        "stats": {"states": len(lts.states), "edges": len(lts.edges)},
    }
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(f"states: {len(lts.states)}")
        print(f"edges: {len(lts.edges)}")
        for i, m in enumerate(lts.states):
            mark = "*" if i in lts.initials else " "
            print(f"{mark} {i}: {net.format_marking(m)}")
    return EXIT_OK


def cmd_corpus(args) -> int:
    results = corpus_mod.run_corpus(include_slow=args.include_slow)
    failures = [r for r in results if not r.passed]
    if args.json:
        print(
            json.dumps(
                {
                    "cases": [
                        {
                            "name": r.name,
                            "expected": r.expected,
                            "verdict": r.verdict,
                            "passed": r.passed,
                            "oracle": r.oracle,
                            "seconds": round(r.seconds, 3),
                        }
                        for r in results
                    ],
                    "failures": len(failures),
                },
                indent=2,
                sort_keys=True,
            )
        )
    else:
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            oracle = f" oracle={r.oracle}" if r.oracle else ""
            print(
                f"{status} {r.name}: {r.verdict} "
                f"(expected {r.expected}){oracle} [{r.seconds:.2f}s]"
            )
        print(f"{len(results) - len(failures)}/{len(results)} cases passed")
    return EXIT_OK if not failures else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pneq",
        description="Decide and verify place-based behavioral equivalences "
        "on P/T nets with silent moves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="decide an equivalence for two markings")
    p_check.add_argument("--eq", required=True, choices=PLACE_KINDS + GRAPH_KINDS)
    p_check.add_argument(
        "--mode", default="auto", choices=("exhaustive", "guided", "auto")
    )
    p_check.add_argument("--max-pairs", type=int, default=22)
    p_check.add_argument("--state-cap", type=int, default=10_000)
    p_check.add_argument("--node-budget", type=int, default=1_000_000)
    p_check.add_argument("--json", action="store_true")
    p_check.add_argument("--deterministic", action="store_true")
    p_check.add_argument("--threads", type=int, default=1)
    p_check.add_argument("net")
    p_check.add_argument("m1")
    p_check.add_argument("m2")
    p_check.set_defaults(func=cmd_check)

    p_verify = sub.add_parser("verify", help="verify a candidate relation")
    p_verify.add_argument("--eq", required=True, choices=PLACE_KINDS)
    p_verify.add_argument("--relation", required=True)
    p_verify.add_argument("--json", action="store_true")
    p_verify.add_argument("net")
    p_verify.add_argument("m1")
    p_verify.add_argument("m2")
    p_verify.set_defaults(func=cmd_verify)

    p_closure = sub.add_parser("closure", help="closure membership of two markings")
    p_closure.add_argument("--d", action="store_true", help="theta-extended closure")
    p_closure.add_argument("--relation", required=True)
    p_closure.add_argument("--json", action="store_true")
    p_closure.add_argument("net")
    p_closure.add_argument("m1")
    p_closure.add_argument("m2")
    p_closure.set_defaults(func=cmd_closure)

    p_lts = sub.add_parser("lts", help="bounded reachability graph")
    p_lts.add_argument("--cap", type=int, default=10_000)
    p_lts.add_argument("--dot", help="write the graph in DOT format")
    p_lts.add_argument("--json", action="store_true")
    p_lts.add_argument("net")
    p_lts.add_argument("m0")
    p_lts.set_defaults(func=cmd_lts)

    p_corpus = sub.add_parser("corpus", help="built-in regression corpus")
    corpus_sub = p_corpus.add_subparsers(dest="corpus_command", required=True)
    p_run = corpus_sub.add_parser("run", help="run the corpus")
    p_run.add_argument("--include-slow", action="store_true")
    p_run.add_argument("--json", action="store_true")
    p_run.set_defaults(func=cmd_corpus)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (StateSpaceLimitError, SearchBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PneqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
