"""Agreement harness: every algorithm/encoding combination versus the oracle.

For each instance the brute-force oracle fixes the expected answer set per
semantics and repair notion; the SAT pipeline is then run over every valid
combination of maximality variant, blocking variant, and algorithm, and any
disagreement is reported with the instance spelled out in full.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .encoding import EncodingSpec
from .files import example_instance, instance_documents
from .filters import FilterRequest, answer_query
from .generate import verification_instance
from .model import PrioritizedInstance, is_score_structured
from .oracle import oracle_answers

ALGOS_FOR = {
    "ar": ("simple", "maxsat", "muses", "assume"),
    "brave": ("simple", "maxsat", "muses", "assume", "cause"),
    "iar": ("simple", "maxsat", "muses", "assume", "cause", "iarcauses", "iarfacts"),
}


@dataclass(frozen=True)
class Combo:
    semantics: str
    repair: str
    max_variant: str
    neg_variant: int
    algorithm: str


def combos_for(instance: PrioritizedInstance) -> list[Combo]:
    """All valid combinations for this instance.

    The completion notion may borrow the pareto maximality encodings exactly
    when the priority is score-structured (the two repair families coincide
    then). Blocking variants only matter when causes get blocked, so "brave"
    runs a single one.
    """
    score = is_score_structured(instance.conflicts, instance.priority)
    variants = {
        "s": ("s",),
        "p": ("p1", "p2"),
        "c": ("c", "p1", "p2") if score else ("c",),
    }
    out = []
    for sem, algos in ALGOS_FOR.items():
        negs = (1, 2) if sem in ("ar", "iar") else (1,)
        for repair, mvs in variants.items():
            for mv in mvs:
                for neg in negs:
                    for algo in algos:
                        out.append(Combo(sem, repair, mv, neg, algo))
    return out


@dataclass
class Mismatch:
    trial: int
    combo: Combo
    expected: tuple[str, ...]
    got: tuple[str, ...]
    kb_doc: dict
    answers_doc: dict

    def render(self) -> str:
        import json
        lines = [
            f"trial {self.trial}: {self.combo.semantics}/{self.combo.repair}"
            f"/{self.combo.max_variant}/neg{self.combo.neg_variant}"
            f"/{self.combo.algorithm}",
            f"  expected {sorted(self.expected)}, got {sorted(self.got)}",
            "  instance:",
            "  " + json.dumps(self.kb_doc, sort_keys=True),
            "  answers:",
            "  " + json.dumps(self.answers_doc, sort_keys=True),
        ]
        return "\n".join(lines)


@dataclass
class VerifyOutcome:
    trials: int = 0
    combos_checked: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def check_instance(instance: PrioritizedInstance, trial: int = 0,
                   mutate: Optional[str] = None,
                   conflict_budget: Optional[int] = None,
                   stop_on_first: bool = True) -> tuple[int, list[Mismatch]]:
    """Compare the pipeline against the oracle on one instance."""
    omit_acyc = mutate == "drop-acyc"
    expected: dict[tuple[str, str], frozenset[str]] = {}
    for sem in ("ar", "iar", "brave"):
        for repair in ("s", "p", "c"):
            expected[(sem, repair)] = oracle_answers(instance, sem, repair).answers
    checked = 0
    mismatches: list[Mismatch] = []
    for combo in combos_for(instance):
        spec = EncodingSpec(combo.semantics, combo.repair, combo.max_variant,
                            combo.neg_variant)
        report = answer_query(FilterRequest(
            instance, spec, combo.algorithm, conflict_budget=conflict_budget,
            omit_acyclicity=omit_acyc))
        checked += 1
        want = expected[(combo.semantics, combo.repair)]
        if report.answers != want:
            kb_doc, ans_doc = instance_documents(instance)
            mismatches.append(Mismatch(trial, combo, tuple(sorted(want)),
                                       tuple(sorted(report.answers)),
                                       kb_doc, ans_doc))
            if stop_on_first:
                break
    return checked, mismatches


def _instances(trials: int, seed: int, max_facts: int,
               include_example: bool) -> Iterable[tuple[int, PrioritizedInstance]]:
    start = 0
    if include_example:
        yield 0, example_instance()
        start = 1
    for i in range(start, trials):
        yield i, verification_instance(i, seed, max_facts=max_facts)


def _worker(args) -> tuple[int, int, list[Mismatch]]:
    trial, seed, max_facts, mutate, budget, is_example = args
    instance = example_instance() if is_example else \
        verification_instance(trial, seed, max_facts=max_facts)
    checked, mismatches = check_instance(instance, trial, mutate, budget)
    return 1, checked, mismatches


def run_verification(trials: int, max_facts: int = 8, seed: int = 0,
                     mutate: Optional[str] = None,
                     conflict_budget: Optional[int] = None,
                     include_example: bool = True,
                     jobs: int = 1,
                     stop_on_first: bool = True) -> VerifyOutcome:
    """Run the agreement suite over the fixture plus seeded random instances."""
    if mutate not in (None, "drop-acyc"):
        raise ValueError(f"unknown mutation {mutate!r}")
    outcome = VerifyOutcome()
    if jobs > 1:
        tasks = []
        start = 0
        if include_example:
            tasks.append((0, seed, max_facts, mutate, conflict_budget, True))
            start = 1
        tasks += [(i, seed, max_facts, mutate, conflict_budget, False)
                  for i in range(start, trials)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for done, checked, mismatches in pool.map(_worker, tasks, chunksize=8):
                outcome.trials += done
                outcome.combos_checked += checked
                outcome.mismatches.extend(mismatches)
                if mismatches and stop_on_first:
                    break
        return outcome
    for trial, instance in _instances(trials, seed, max_facts, include_example):
        checked, mismatches = check_instance(instance, trial, mutate,
                                             conflict_budget,
                                             stop_on_first=stop_on_first)
        outcome.trials += 1
        outcome.combos_checked += checked
        outcome.mismatches.extend(mismatches)
        if mismatches and stop_on_first:
            break
    return outcome
