"""Answer filtering: preprocessing plus seven SAT-backed strategies.

Every strategy computes the same answer set for a given semantics and repair
notion; they differ in how they drive the solver (one formula per answer,
one shared formula with soft activators maximized, enumerated as cores, or
assumed one at a time, plus cause- and fact-grained variants for the
intersection semantics).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .encoding import (DEFAULT_NODE_CAP, CnfFormula, EncodingSpec,
                       build_multi_formula, build_single_formula)
from .errors import BudgetExceededError, PairingError
from .model import (EMPTY_PRIORITY, FactId, PotentialAnswer, PrioritizedInstance,
                    is_score_structured)
from .sat import (UNSAT, SolverSession, SolverStats, enumerate_mus,
                  maximize_soft, solve_clauses)

ALGORITHMS = ("simple", "maxsat", "muses", "assume", "cause", "iarcauses", "iarfacts")

CLASS_TRIVIAL = "trivial"
CLASS_IAR = "iar-not-trivial"
CLASS_AR = "ar-not-iar"
CLASS_BRAVE = "brave-not-ar"
CLASS_NONE = "not-brave"


def valid_pairing(semantics: str, algorithm: str) -> bool:
    if algorithm not in ALGORITHMS:
        return False
    if algorithm == "cause":
        return semantics in ("brave", "iar")
    if algorithm in ("iarcauses", "iarfacts"):
        return semantics == "iar"
    return True


@dataclass(frozen=True)
class FilterRequest:
    instance: PrioritizedInstance
    spec: EncodingSpec
    algorithm: str
    conflict_budget: Optional[int] = None
    node_cap: int = DEFAULT_NODE_CAP
    omit_acyclicity: bool = False
    seed: int = 0


@dataclass
class FilterReport:
    answers: frozenset[str]
    trivial_answers: frozenset[str]
    removed_self_inconsistent: frozenset[FactId]
    timings_ms: dict[str, float]
    solver_stats: dict
    complete: bool = True


# ----------------------------------------------------------------------
# preprocessing


def remove_self_inconsistent(instance: PrioritizedInstance
                             ) -> tuple[PrioritizedInstance, frozenset[FactId]]:
    """Drop self-inconsistent facts, their conflicts, and the causes using them."""
    bad = instance.conflicts.self_inconsistent
    if not bad:
        return instance, frozenset()
    pairs = [(a, b) for a, b in instance.conflicts.sorted_pairs()
             if a not in bad and b not in bad]
    pair_set = {p for p in pairs}
    edges = [(a, b) for a, b in instance.priority.sorted_edges()
             if (min(a, b), max(a, b)) in pair_set]
    answers = []
    for ans in instance.answers:
        causes = [c for c in ans.causes if not (c & bad)]
        if causes:
            answers.append(PotentialAnswer(ans.answer_id, tuple(causes)))
    from .model import make_instance
    cleaned = make_instance((f for f in instance.universe if f not in bad),
                            pairs, edges, answers, labels=instance.labels)
    return cleaned, frozenset(bad)


def extract_trivial_answers(instance: PrioritizedInstance
                            ) -> tuple[tuple[str, ...], PrioritizedInstance]:
    """Delete facts that sit in every optimal repair from all causes.

    Facts without outgoing conflict-graph edges can never be traded away, so
    an answer owning a cause of only such facts holds under every semantics;
    those answers are returned and withheld from further filtering. Expects
    self-inconsistent facts to be gone already.
    """
    safe = instance.dcg().zero_out_degree(instance.universe)
    trivial = []
    kept = []
    for ans in instance.answers:
        reduced = [frozenset(c - safe) for c in ans.causes]
        if any(not c for c in reduced):
            trivial.append(ans.answer_id)
        else:
            kept.append(PotentialAnswer(ans.answer_id, tuple(reduced)))
    return tuple(trivial), instance.with_answers(kept)


# ----------------------------------------------------------------------
# the seven filtering strategies


@dataclass
class _Ctx:
    budget: Optional[int]
    node_cap: int
    omit_acyclicity: bool
    seed: int
    stats: SolverStats = field(default_factory=SolverStats)
    held: set = field(default_factory=set)


def _verdict_is_hold(spec: EncodingSpec, is_sat: bool) -> bool:
    # every/intersection semantics hold on refutation, possibility on a model
    if spec.semantics in ("ar", "iar"):
        return not is_sat
    return is_sat


def _build_single(instance, spec, target, ctx) -> CnfFormula:
    return build_single_formula(instance, spec, target, node_cap=ctx.node_cap,
                                omit_acyclicity=ctx.omit_acyclicity)


def _build_multi(instance, spec, targets, ctx) -> CnfFormula:
    return build_multi_formula(instance, spec, targets, node_cap=ctx.node_cap,
                               omit_acyclicity=ctx.omit_acyclicity)


def filter_simple(instance: PrioritizedInstance, spec: EncodingSpec, ctx: _Ctx) -> set[str]:
    for ans in instance.answers:
        formula = _build_single(instance, spec, ans, ctx)
        res = solve_clauses(formula.nvars, formula.hard,
                            conflict_budget=ctx.budget, seed=ctx.seed,
                            stats=ctx.stats)
        if _verdict_is_hold(spec, res.is_sat):
            ctx.held.add(ans.answer_id)
    return ctx.held


def filter_all_maxsat(instance: PrioritizedInstance, spec: EncodingSpec,
                      ctx: _Ctx) -> set[str]:
    """Maximize true activators, blocking each observed one, until a fixpoint.

    Under the intersection semantics one round suffices: each cause has its
    own variables, so every individually reachable activator is reachable
    jointly.
    """
    answers = instance.answers
    psi = _build_multi(instance, spec, list(answers), ctx)
    var_of = {a.answer_id: psi.answer_var(a.answer_id) for a in answers}
    observed: set[str] = set()
    assumed: list[int] = []
    while True:
        res = maximize_soft(psi.nvars, psi.hard, psi.soft_units, assumed,
                            conflict_budget=ctx.budget, seed=ctx.seed,
                            stats=ctx.stats)
        if res.status == UNSAT:
            break
        new = {aid for aid, v in var_of.items()
               if aid not in observed and res.model[v]}
        if not new:
            break
        observed |= new
        assumed += [-var_of[aid] for aid in sorted(new)]
        if spec.semantics == "iar" or len(observed) == len(answers):
            break
    if spec.semantics == "brave":
        ctx.held |= observed
    else:
        ctx.held |= {a.answer_id for a in answers if a.answer_id not in observed}
    return ctx.held


def filter_all_muses(instance: PrioritizedInstance, spec: EncodingSpec,
                     ctx: _Ctx) -> set[str]:
    """Singleton activator cores decide the verdicts outright."""
    answers = instance.answers
    psi = _build_multi(instance, spec, list(answers), ctx)
    muses = enumerate_mus(psi.nvars, psi.hard, psi.soft_units,
                          conflict_budget=ctx.budget, seed=ctx.seed,
                          stats=ctx.stats)
    single_vars = {next(iter(s)) for s in muses if len(s) == 1}
    blocked = {a.answer_id for a in answers
               if psi.answer_var(a.answer_id) in single_vars}
    if spec.semantics == "brave":
        ctx.held |= {a.answer_id for a in answers if a.answer_id not in blocked}
    else:
        ctx.held |= blocked
    return ctx.held


def filter_assumptions(instance: PrioritizedInstance, spec: EncodingSpec,
                       ctx: _Ctx) -> set[str]:
    answers = instance.answers
    psi = _build_multi(instance, spec, list(answers), ctx)
    session = SolverSession(psi.nvars, conflict_budget=ctx.budget, seed=ctx.seed)
    for clause in psi.hard:
        session.add_clause(clause)
    try:
        for ans in answers:
            res = session.solve([psi.answer_var(ans.answer_id)])
            if _verdict_is_hold(spec, res.is_sat):
                ctx.held.add(ans.answer_id)
    finally:
        ctx.stats.merge(session.stats)
    return ctx.held


def filter_cause_by_cause(instance: PrioritizedInstance, spec: EncodingSpec,
                          ctx: _Ctx) -> set[str]:
    for ans in instance.answers:
        for cause in ans.causes:
            formula = _build_single(instance, spec, frozenset(cause), ctx)
            res = solve_clauses(formula.nvars, formula.hard,
                                conflict_budget=ctx.budget, seed=ctx.seed,
                                stats=ctx.stats)
            if _verdict_is_hold(spec, res.is_sat):
                ctx.held.add(ans.answer_id)
                break
    return ctx.held


def filter_iar_causes(instance: PrioritizedInstance, spec: EncodingSpec,
                      ctx: _Ctx) -> set[str]:
    """Check causes fact by fact, caching per-fact verdicts across answers."""
    iar_facts: set[FactId] = set()
    non_iar: set[FactId] = set()
    for ans in instance.answers:
        for cause in ans.causes:
            if ans.answer_id in ctx.held or cause & non_iar:
                continue
            rest = cause - iar_facts
            if not rest:
                ctx.held.add(ans.answer_id)
                continue
            all_iar = True
            for fact in sorted(rest):
                formula = _build_single(instance, spec, fact, ctx)
                res = solve_clauses(formula.nvars, formula.hard,
                                    conflict_budget=ctx.budget, seed=ctx.seed,
                                    stats=ctx.stats)
                if not res.is_sat:
                    iar_facts.add(fact)
                else:
                    non_iar.add(fact)
                    all_iar = False
                    break
            if all_iar:
                ctx.held.add(ans.answer_id)
    return ctx.held


def filter_iar_facts(instance: PrioritizedInstance, spec: EncodingSpec,
                     ctx: _Ctx) -> set[str]:
    """Classify whole fact batches per answer with the soft-maximization loop."""
    iar_facts: set[FactId] = set()
    non_iar: set[FactId] = set()
    for ans in instance.answers:
        relevant = set()
        for cause in ans.causes:
            relevant |= cause
        relevant -= iar_facts
        relevant -= non_iar
        if relevant:
            psi = _build_multi(instance, spec, sorted(relevant), ctx)
            var_of = {f: psi.assume_var(f) for f in sorted(relevant)}
            new_non: set[FactId] = set()
            assumed: list[int] = []
            while True:
                res = maximize_soft(psi.nvars, psi.hard, psi.soft_units, assumed,
                                    conflict_budget=ctx.budget, seed=ctx.seed,
                                    stats=ctx.stats)
                if res.status == UNSAT:
                    break
                found = {f for f, v in var_of.items()
                         if f not in new_non and res.model[v]}
                if not found:
                    break
                new_non |= found
                assumed += [-var_of[f] for f in sorted(found)]
                if new_non == relevant:
                    break
            iar_facts |= relevant - new_non
            non_iar |= new_non
        if ans.answer_id not in ctx.held:
            if any(not (cause - iar_facts) for cause in ans.causes):
                ctx.held.add(ans.answer_id)
    return ctx.held


_DISPATCH = {
    "simple": filter_simple,
    "maxsat": filter_all_maxsat,
    "muses": filter_all_muses,
    "assume": filter_assumptions,
    "cause": filter_cause_by_cause,
    "iarcauses": filter_iar_causes,
    "iarfacts": filter_iar_facts,
}


# ----------------------------------------------------------------------
# the high-level pipeline


def answer_query(request: FilterRequest) -> FilterReport:
    """Preprocess, shortcut trivial answers, then run the chosen strategy."""
    spec = request.spec
    if not valid_pairing(spec.semantics, request.algorithm):
        raise PairingError(
            f"algorithm {request.algorithm!r} cannot compute {spec.semantics!r}")
    instance = request.instance
    if spec.repair == "s" and not instance.priority.is_empty():
        # plain subset repairs disregard preferences everywhere
        instance = instance.with_priority(EMPTY_PRIORITY)
    if spec.repair == "c" and spec.max_variant != "c" and not is_score_structured(
            instance.conflicts, instance.priority):
        raise PairingError(
            "pareto-style maximality stands in for completion repairs only "
            "under score-structured priorities")

    t0 = time.perf_counter()
    cleaned, removed = remove_self_inconsistent(instance)
    trivial, remaining = extract_trivial_answers(cleaned)
    t1 = time.perf_counter()

    ctx = _Ctx(budget=request.conflict_budget, node_cap=request.node_cap,
               omit_acyclicity=request.omit_acyclicity, seed=request.seed)
    complete = True
    if remaining.answers:
        try:
            _DISPATCH[request.algorithm](remaining, spec, ctx)
        except BudgetExceededError:
            complete = False
    t2 = time.perf_counter()

    return FilterReport(
        answers=frozenset(trivial) | frozenset(ctx.held),
        trivial_answers=frozenset(trivial),
        removed_self_inconsistent=removed,
        timings_ms={"preprocess_ms": round((t1 - t0) * 1000.0, 3),
                    "filter_ms": round((t2 - t1) * 1000.0, 3)},
        solver_stats=ctx.stats.as_dict(),
        complete=complete,
    )


def classify_answers(instance: PrioritizedInstance, repair_type: str,
                     neg_variant: int = 1, algorithm: str = "simple",
                     conflict_budget: Optional[int] = None,
                     node_cap: int = DEFAULT_NODE_CAP) -> dict[str, str]:
    """Bucket every answer by the strongest semantics it satisfies."""
    max_variant = {"s": "s", "p": "p1", "c": "c"}[repair_type]
    reports = {}
    for sem in ("iar", "ar", "brave"):
        algo = algorithm if valid_pairing(sem, algorithm) else "simple"
        spec = EncodingSpec(sem, repair_type, max_variant, neg_variant)
        reports[sem] = answer_query(FilterRequest(
            instance, spec, algo, conflict_budget=conflict_budget,
            node_cap=node_cap))
    trivial = reports["iar"].trivial_answers
    out = {}
    for ans in instance.answers:
        aid = ans.answer_id
        if aid in trivial:
            out[aid] = CLASS_TRIVIAL
        elif aid in reports["iar"].answers:
            out[aid] = CLASS_IAR
        elif aid in reports["ar"].answers:
            out[aid] = CLASS_AR
        elif aid in reports["brave"].answers:
            out[aid] = CLASS_BRAVE
        else:
            out[aid] = CLASS_NONE
    return out
