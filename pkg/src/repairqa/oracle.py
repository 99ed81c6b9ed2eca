"""Brute-force ground truth for repairs and query answers on small instances.

Enumerates maximal conflict-free subsets, filters them down to the preference
aware families, and evaluates all three answer semantics directly from their
definitions. Everything here is exponential and capped; it exists to validate
the SAT pipeline, not to scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import CapacityError
from .model import FactId, PrioritizedInstance

DEFAULT_FACT_CAP = 22
DEFAULT_PAIR_CAP = 16
FULL_PARETO_CHECK_LIMIT = 12


@dataclass(frozen=True)
class RepairFamily:
    kind: str  # "s" | "p" | "c"
    repairs: tuple[frozenset[FactId], ...]
    completion_count: Optional[int] = None

    def as_set(self) -> frozenset[frozenset[FactId]]:
        return frozenset(self.repairs)

    def intersection(self) -> frozenset[FactId]:
        if not self.repairs:
            return frozenset()
        out = set(self.repairs[0])
        for r in self.repairs[1:]:
            out &= r
        return frozenset(out)


def _core(instance: PrioritizedInstance):
    """Conflicting facts, their adjacency, and the always-safe free facts.

    Self-inconsistent facts belong to no repair, and conflicts touching them
    never constrain anything else, so both are dropped here.
    """
    bad = instance.conflicts.self_inconsistent
    pairs = [(a, b) for a, b in instance.conflicts.sorted_pairs()
             if a not in bad and b not in bad]
    nodes = sorted({f for p in pairs for f in p})
    adj = {v: set() for v in nodes}
    for a, b in pairs:
        adj[a].add(b)
        adj[b].add(a)
    free = frozenset(instance.universe) - set(nodes) - bad
    return nodes, pairs, adj, free


def _maximal_independent_sets(nodes, adj):
    """All maximal independent sets, via pivoted clique search on the complement."""
    node_set = set(nodes)
    comp = {v: node_set - adj[v] - {v} for v in nodes}
    found = []

    def extend(current, candidates, excluded):
        if not candidates and not excluded:
            found.append(frozenset(current))
            return
        pivot = max(sorted(candidates | excluded), key=lambda u: len(comp[u] & candidates))
        for v in sorted(candidates - comp[pivot]):
            extend(current | {v}, candidates & comp[v], excluded & comp[v])
            candidates = candidates - {v}
            excluded = excluded | {v}

    extend(set(), set(nodes), set())
    return found


def enumerate_repairs(instance: PrioritizedInstance,
                      fact_cap: int = DEFAULT_FACT_CAP) -> RepairFamily:
    """All inclusion-maximal conflict-free fact sets."""
    nodes, _pairs, adj, free = _core(instance)
    if len(nodes) > fact_cap:
        raise CapacityError(f"{len(nodes)} conflicting facts exceed the cap {fact_cap}")
    if not nodes:
        return RepairFamily("s", (frozenset(free),))
    repairs = sorted({mis | free for mis in _maximal_independent_sets(nodes, adj)},
                     key=sorted)
    return RepairFamily("s", tuple(repairs))


def _beats_via_single_fact(instance, repair, nodes, adj) -> Optional[FactId]:
    """A fact outside the repair preferred to all of its in-repair rivals.

    Adding such a fact and dropping exactly its rivals is an improvement; the
    converse holds too, so this single-fact test is exact.
    """
    prefers = instance.priority.prefers
    for b in nodes:
        if b in repair:
            continue
        rivals = adj[b] & repair
        if rivals and all(prefers(b, a) for a in rivals):
            return b
    return None


def _beats_via_full_definition(instance, repair, nodes, adj) -> bool:
    """Directly search all consistent sets for an improvement witness."""
    prefers = instance.priority.prefers
    n = len(nodes)
    repair_conf = [v for v in nodes if v in repair]
    for mask in range(1 << n):
        chosen = {nodes[i] for i in range(n) if mask >> i & 1}
        if any(b in chosen for a in chosen for b in adj[a]):
            continue  # not conflict-free
        dropped = [a for a in repair_conf if a not in chosen]
        for b in chosen:
            if b not in repair and all(prefers(b, a) for a in dropped):
                return True
    return False


def enumerate_pareto_repairs(instance: PrioritizedInstance,
                             fact_cap: int = DEFAULT_FACT_CAP) -> RepairFamily:
    """Repairs no single preferred fact can improve upon.

    On small instances the result is re-checked against the literal
    improvement definition quantifying over all consistent sets.
    """
    base = enumerate_repairs(instance, fact_cap)
    nodes, _pairs, adj, _free = _core(instance)
    node_list = sorted(nodes)
    keep = []
    for repair in base.repairs:
        optimal = _beats_via_single_fact(instance, repair, node_list, adj) is None
        if len(node_list) <= FULL_PARETO_CHECK_LIMIT:
            full = not _beats_via_full_definition(instance, repair, node_list, adj)
            if full != optimal:
                raise AssertionError(
                    f"pareto tests disagree on {sorted(repair)}: "
                    f"single-fact={optimal} full={full}")
        if optimal:
            keep.append(repair)
    return RepairFamily("p", tuple(keep))


def _unique_repair_for_total_order(nodes, adj, pred, free):
    """Peel off non-dominated facts, discard their rivals, repeat."""
    remaining = set(nodes)
    repair = set(free)
    while remaining:
        top = {a for a in remaining if not (pred[a] & remaining)}
        repair |= top
        losers = {a for a in remaining - top if adj[a] & top}
        remaining -= top
        remaining -= losers
    return frozenset(repair)


def enumerate_completion_repairs(instance: PrioritizedInstance,
                                 pair_cap: int = DEFAULT_PAIR_CAP) -> RepairFamily:
    """Repairs optimal under some acyclic total orientation of the conflicts.

    Enumerates every acyclic completion of the priority relation over the
    conflict pairs (pruning cyclic branches early) and collects the unique
    optimal repair each induces.
    """
    nodes, pairs, adj, free = _core(instance)
    prefers = instance.priority.prefers
    fixed = [(a, b) for a, b in pairs if prefers(a, b)] + \
            [(b, a) for a, b in pairs if prefers(b, a)]
    open_pairs = [(a, b) for a, b in pairs
                  if not prefers(a, b) and not prefers(b, a)]
    if len(open_pairs) > pair_cap:
        raise CapacityError(
            f"{len(open_pairs)} unoriented conflict pairs exceed the cap {pair_cap}")

    succ = {v: set() for v in nodes}
    pred = {v: set() for v in nodes}
    for a, b in fixed:
        succ[a].add(b)
        pred[b].add(a)

    def reaches(src, dst):
        seen = {src}
        stack = [src]
        while stack:
            v = stack.pop()
            if v == dst:
                return True
            for w in succ[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    repairs: set[frozenset[FactId]] = set()
    count = 0

    def orient(i):
        nonlocal count
        if i == len(open_pairs):
            count += 1
            repairs.add(_unique_repair_for_total_order(nodes, adj, pred, free))
            return
        a, b = open_pairs[i]
        for hi, lo in ((a, b), (b, a)):
            if reaches(lo, hi):
                continue  # this orientation would close a cycle
            succ[hi].add(lo)
            pred[lo].add(hi)
            orient(i + 1)
            succ[hi].remove(lo)
            pred[lo].remove(hi)

    if nodes:
        orient(0)
    else:
        count = 1
        repairs.add(frozenset(free))
    return RepairFamily("c", tuple(sorted(repairs, key=sorted)),
                        completion_count=count)


def repair_family(instance: PrioritizedInstance, repair_type: str,
                  fact_cap: int = DEFAULT_FACT_CAP,
                  pair_cap: int = DEFAULT_PAIR_CAP) -> RepairFamily:
    if repair_type == "s":
        return enumerate_repairs(instance, fact_cap)
    if repair_type == "p":
        return enumerate_pareto_repairs(instance, fact_cap)
    if repair_type == "c":
        return enumerate_completion_repairs(instance, pair_cap)
    raise ValueError(f"unknown repair type {repair_type!r}")


@dataclass(frozen=True)
class OracleAnswers:
    answers: frozenset[str]
    intersection: Optional[frozenset[FactId]] = None


def oracle_answers(instance: PrioritizedInstance, semantics: str, repair_type: str,
                   fact_cap: int = DEFAULT_FACT_CAP,
                   pair_cap: int = DEFAULT_PAIR_CAP) -> OracleAnswers:
    """Evaluate a semantics directly over the enumerated repair family.

    A repair supports an answer when it contains one of its listed supporting
    sets (supersets and inconsistent sets are harmless: the former witness
    entailment exactly like the real support they contain, the latter fit in
    no repair).
    """
    family = repair_family(instance, repair_type, fact_cap, pair_cap)

    def entails(repair, answer):
        return any(cause <= repair for cause in answer.causes)

    if semantics == "brave":
        names = {a.answer_id for a in instance.answers
                 if any(entails(r, a) for r in family.repairs)}
        return OracleAnswers(frozenset(names))
    if semantics == "ar":
        names = {a.answer_id for a in instance.answers
                 if family.repairs and all(entails(r, a) for r in family.repairs)}
        return OracleAnswers(frozenset(names))
    if semantics == "iar":
        body = family.intersection()
        names = {a.answer_id for a in instance.answers
                 if any(cause <= body for cause in a.causes)}
        return OracleAnswers(frozenset(names), intersection=body)
    raise ValueError(f"unknown semantics {semantics!r}")
