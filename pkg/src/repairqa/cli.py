"""Command-line interface.

Subcommands: filter (answer a query under a chosen semantics), genpriority
(derive a priority relation for an instance), geninstance (synthesize a
random instance), verify (agreement suite against the brute-force oracle),
and bench (timing table). Exit codes: 0 success, 2 invalid combination or
input, 3 solver budget exhausted (partial results flagged).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .encoding import DEFAULT_NODE_CAP, EncodingSpec, build_multi_formula, export_dimacs
from .errors import CapacityError, InputError, PairingError
from .files import (load_instance, result_document, save_instance, write_json)
from .filters import FilterRequest, answer_query, remove_self_inconsistent, valid_pairing
from .generate import priority_for_mode, random_instance
from .model import is_score_structured
from .verify import run_verification

REPAIR_FLAGS = {"s": ("s", "s"), "p1": ("p", "p1"), "p2": ("p", "p2"), "c": ("c", "c")}

EXIT_OK = 0
EXIT_BAD_COMBINATION = 2
EXIT_BUDGET = 3


def _spec_from_flags(args) -> EncodingSpec:
    repair, max_variant = REPAIR_FLAGS[args.repair]
    return EncodingSpec(args.sem, repair, max_variant, args.neg)


def _add_filter_flags(parser, with_algo=True):
    parser.add_argument("--sem", required=True, choices=("ar", "iar", "brave"))
    parser.add_argument("--repair", required=True, choices=tuple(REPAIR_FLAGS))
    parser.add_argument("--neg", type=int, default=1, choices=(1, 2))
    if with_algo:
        parser.add_argument("--algo", required=True,
                            choices=("simple", "maxsat", "muses", "assume",
                                     "cause", "iarcauses", "iarfacts"))
    parser.add_argument("--kb", required=True, help="knowledge-base JSON file")
    parser.add_argument("--ans", required=True, help="potential-answers JSON file")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=None,
                        help="conflict budget per solver call")
    parser.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP,
                        help="fact cap for the completion encoding")


def cmd_filter(args) -> int:
    spec = _spec_from_flags(args)
    if not valid_pairing(spec.semantics, args.algo):
        print(f"error: algorithm {args.algo!r} cannot compute {spec.semantics!r}",
              file=sys.stderr)
        return EXIT_BAD_COMBINATION
    instance = load_instance(args.kb, args.ans)
    omit = args.mutate == "drop-acyc"
    if args.dump_cnf:
        prepped, _ = remove_self_inconsistent(instance)
        targets = list(prepped.answers)
        if targets:
            formula = build_multi_formula(prepped, spec, targets,
                                          node_cap=args.node_cap,
                                          omit_acyclicity=omit)
        else:
            from .encoding import CnfFormula
            formula = CnfFormula()
        with open(args.dump_cnf, "wb") as handle:
            handle.write(export_dimacs(formula, weighted=bool(formula.soft_units)))
    report = answer_query(FilterRequest(
        instance, spec, args.algo, conflict_budget=args.budget,
        node_cap=args.node_cap, omit_acyclicity=omit, seed=args.seed))
    doc = result_document(args.sem, args.repair, args.neg, args.algo, report)
    if args.out:
        write_json(args.out, doc)
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        print()
    return EXIT_OK if report.complete else EXIT_BUDGET


def cmd_genpriority(args) -> int:
    if args.ans:
        instance = load_instance(args.kb, args.ans)
    else:
        # answers are irrelevant for priorities; accept a kb alone
        from .files import _load_json, parse_instance
        kb_doc = _load_json(args.kb)
        instance = parse_instance(kb_doc, {"query": "q", "answers": []},
                                  source=args.kb)
    if args.mode == "score":
        if args.levels is None:
            print("error: --mode score requires --levels", file=sys.stderr)
            return EXIT_BAD_COMBINATION
        priority = priority_for_mode(instance, "score", args.seed,
                                     levels=args.levels)
    else:
        if args.p is None:
            print("error: --mode random requires --p", file=sys.stderr)
            return EXIT_BAD_COMBINATION
        priority = priority_for_mode(instance, "random", args.seed, p=args.p)
    doc = {
        "mode": args.mode,
        "seed": args.seed,
        "priority": [list(e) for e in priority.sorted_edges()],
        "score_structured": is_score_structured(instance.conflicts, priority),
    }
    if args.levels is not None:
        doc["levels"] = args.levels
    if args.p is not None:
        doc["p"] = args.p
    if args.out:
        write_json(args.out, doc)
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        print()
    return EXIT_OK


def cmd_geninstance(args) -> int:
    try:
        instance = random_instance(args.facts, args.conflicts, args.answers,
                                   args.max_cause_size, args.seed,
                                   unary=args.unary)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_COMBINATION
    if args.priority_mode != "none":
        priority = priority_for_mode(instance, args.priority_mode, args.seed,
                                     levels=args.levels or 2, p=args.p or 0.5)
        instance = instance.with_priority(priority)
    save_instance(instance, args.out_kb, args.out_ans)
    return EXIT_OK


def cmd_verify(args) -> int:
    outcome = run_verification(args.trials, max_facts=args.max_facts,
                               seed=args.seed, mutate=args.mutate,
                               conflict_budget=args.budget, jobs=args.jobs)
    print(f"trials: {outcome.trials}")
    print(f"combinations checked: {outcome.combos_checked}")
    print(f"mismatches: {len(outcome.mismatches)}")
    if outcome.mismatches:
        print("first counterexample:")
        print(outcome.mismatches[0].render())
        return 1
    return EXIT_OK


def cmd_bench(args) -> int:
    instance = load_instance(args.kb, args.ans)
    spec_base = REPAIR_FLAGS[args.repair]
    rows = []
    for algo in args.algo.split(","):
        algo = algo.strip()
        spec = EncodingSpec(args.sem, spec_base[0], spec_base[1], args.neg)
        if not valid_pairing(spec.semantics, algo):
            print(f"error: algorithm {algo!r} cannot compute {args.sem!r}",
                  file=sys.stderr)
            return EXIT_BAD_COMBINATION
        pre = flt = 0.0
        count = None
        complete = True
        for _ in range(args.repeat):
            report = answer_query(FilterRequest(
                instance, spec, algo, conflict_budget=args.budget,
                node_cap=args.node_cap, seed=args.seed))
            pre += report.timings_ms["preprocess_ms"]
            flt += report.timings_ms["filter_ms"]
            count = len(report.answers)
            complete = complete and report.complete
        rows.append({
            "semantics": args.sem,
            "repair": args.repair,
            "encoding": f"neg{args.neg}",
            "algorithm": algo,
            "preprocess_ms": round(pre / args.repeat, 3),
            "filter_ms": round(flt / args.repeat, 3),
            "result_count": count,
        })
        if not complete:
            return EXIT_BUDGET
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    text = buffer.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repairqa",
        description="Query answering over inconsistent prioritized knowledge bases")
    sub = parser.add_subparsers(dest="command", required=True)

    p_filter = sub.add_parser("filter", help="compute the answers holding "
                                             "under a semantics")
    _add_filter_flags(p_filter)
    p_filter.add_argument("--out", default=None, help="result JSON path "
                                                      "(stdout when omitted)")
    p_filter.add_argument("--dump-cnf", default=None,
                          help="also export the multi-answer encoding as "
                               "DIMACS CNF/WCNF")
    p_filter.add_argument("--mutate", choices=("drop-acyc",), default=None,
                          help="known-bad encoding mutation, for harness tests")
    p_filter.set_defaults(func=cmd_filter)

    p_gp = sub.add_parser("genpriority", help="build a priority relation "
                                              "over an instance's conflicts")
    p_gp.add_argument("--kb", required=True)
    p_gp.add_argument("--ans", default=None,
                      help="optional answers file (ignored for priorities)")
    p_gp.add_argument("--mode", required=True, choices=("score", "random"))
    p_gp.add_argument("--levels", type=int, default=None,
                      help="number of score levels (score mode)")
    p_gp.add_argument("--p", type=float, default=None,
                      help="orientation probability (random mode)")
    p_gp.add_argument("--seed", type=int, default=0)
    p_gp.add_argument("--out", default=None)
    p_gp.set_defaults(func=cmd_genpriority)

    p_gi = sub.add_parser("geninstance", help="synthesize a random instance")
    p_gi.add_argument("--facts", type=int, required=True)
    p_gi.add_argument("--conflicts", type=int, required=True)
    p_gi.add_argument("--answers", type=int, required=True)
    p_gi.add_argument("--max-cause-size", type=int, required=True)
    p_gi.add_argument("--seed", type=int, required=True)
    p_gi.add_argument("--unary", type=int, default=0,
                      help="number of self-inconsistent facts")
    p_gi.add_argument("--priority-mode", choices=("none", "score", "random"),
                      default="none")
    p_gi.add_argument("--levels", type=int, default=None)
    p_gi.add_argument("--p", type=float, default=None)
    p_gi.add_argument("--out-kb", required=True)
    p_gi.add_argument("--out-ans", required=True)
    p_gi.set_defaults(func=cmd_geninstance)

    p_verify = sub.add_parser("verify", help="cross-validate the pipeline "
                                             "against the brute-force oracle")
    p_verify.add_argument("--trials", type=int, required=True)
    p_verify.add_argument("--max-facts", type=int, default=8)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--budget", type=int, default=None)
    p_verify.add_argument("--jobs", type=int, default=1)
    p_verify.add_argument("--mutate", choices=("drop-acyc",), default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_bench = sub.add_parser("bench", help="time the filtering pipeline")
    _add_filter_flags(p_bench, with_algo=False)
    p_bench.add_argument("--algo", required=True,
                         help="one algorithm or a comma-separated list")
    p_bench.add_argument("--repeat", type=int, default=5)
    p_bench.add_argument("--out", default=None, help="CSV path (stdout when omitted)")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PairingError, InputError, CapacityError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_COMBINATION


if __name__ == "__main__":
    sys.exit(main())
