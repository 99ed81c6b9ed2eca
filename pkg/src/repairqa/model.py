"""Domain model for prioritized knowledge bases at the conflict-graph level.

Facts are dense non-negative integers (labels are kept separately, for
reporting only). Conflicts are unordered fact pairs plus a set of
self-inconsistent facts; the priority relation is an acyclic set of ordered
pairs, each covering a conflict pair.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

FactId = int


def _norm_pair(a: FactId, b: FactId) -> tuple[FactId, FactId]:
    return (a, b) if a < b else (b, a)


class ConflictSet:
    """Binary conflicts plus self-inconsistent (unary-conflict) facts."""

    __slots__ = ("pairs", "self_inconsistent", "_adj")

    def __init__(self, pairs: Iterable[tuple[FactId, FactId]],
                 self_inconsistent: Iterable[FactId] = ()):
        normalized = set()
        for a, b in pairs:
            if a == b:
                raise ValueError(f"conflict pair ({a},{b}) relates a fact to itself")
            normalized.add(_norm_pair(a, b))
        self.pairs: frozenset[tuple[FactId, FactId]] = frozenset(normalized)
        self.self_inconsistent: frozenset[FactId] = frozenset(self_inconsistent)
        adj: dict[FactId, set[FactId]] = {}
        for a, b in self.pairs:
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        self._adj = {f: frozenset(ns) for f, ns in adj.items()}

    def facts(self) -> frozenset[FactId]:
        """All facts that occur in some conflict (binary or unary)."""
        return frozenset(self._adj) | self.self_inconsistent

    def neighbors(self, fact: FactId) -> frozenset[FactId]:
        return self._adj.get(fact, frozenset())

    def conflicts_with(self, a: FactId, b: FactId) -> bool:
        return _norm_pair(a, b) in self.pairs

    def sorted_pairs(self) -> list[tuple[FactId, FactId]]:
        return sorted(self.pairs)

    def __eq__(self, other):
        return (isinstance(other, ConflictSet)
                and self.pairs == other.pairs
                and self.self_inconsistent == other.self_inconsistent)

    def __hash__(self):
        return hash((self.pairs, self.self_inconsistent))

    def __repr__(self):
        return f"ConflictSet(pairs={sorted(self.pairs)}, self_inconsistent={sorted(self.self_inconsistent)})"


class PriorityRelation:
    """Ordered pairs (a, b) meaning fact a is preferred to conflicting fact b."""

    __slots__ = ("edges", "_above")

    def __init__(self, edges: Iterable[tuple[FactId, FactId]] = ()):
        self.edges: frozenset[tuple[FactId, FactId]] = frozenset(tuple(e) for e in edges)
        above: dict[FactId, set[FactId]] = {}
        for a, b in self.edges:
            above.setdefault(b, set()).add(a)
        self._above = {f: frozenset(s) for f, s in above.items()}

    def prefers(self, a: FactId, b: FactId) -> bool:
        return (a, b) in self.edges

    def dominators_of(self, fact: FactId) -> frozenset[FactId]:
        """Facts preferred to `fact`."""
        return self._above.get(fact, frozenset())

    def is_empty(self) -> bool:
        return not self.edges

    def sorted_edges(self) -> list[tuple[FactId, FactId]]:
        return sorted(self.edges)

    def __eq__(self, other):
        return isinstance(other, PriorityRelation) and self.edges == other.edges

    def __hash__(self):
        return hash(self.edges)

    def __repr__(self):
        return f"PriorityRelation({sorted(self.edges)})"


EMPTY_PRIORITY = PriorityRelation()


@dataclass(frozen=True)
class PotentialAnswer:
    """A candidate answer with the fact sets that would support it.

    The sets may be supersets of minimal supports and may even contain
    conflicting or self-inconsistent facts; the filtering pipeline tolerates
    both.
    """

    answer_id: str
    causes: tuple[frozenset[FactId], ...]

    def __post_init__(self):
        if not self.causes:
            raise ValueError(f"answer {self.answer_id!r} has no causes")
        for c in self.causes:
            if not c:
                raise ValueError(f"answer {self.answer_id!r} has an empty cause")

    def all_facts(self) -> frozenset[FactId]:
        out: set[FactId] = set()
        for c in self.causes:
            out |= c
        return frozenset(out)


def make_answer(answer_id: str, causes: Iterable[Iterable[FactId]]) -> PotentialAnswer:
    return PotentialAnswer(answer_id, tuple(frozenset(c) for c in causes))


@dataclass(frozen=True)
class PriorityViolation:
    """First failed validity condition, with a witness."""

    kind: str  # "edge-not-conflict" | "symmetric-pair" | "cycle"
    witness: tuple

    def __str__(self):
        return f"{self.kind}: {self.witness}"


def validate_priority(conflicts: ConflictSet,
                      priority: PriorityRelation) -> Optional[PriorityViolation]:
    """Return None when valid, else a report naming the first violation.

    A valid relation orients only conflict pairs, never both directions of a
    pair, and is acyclic.
    """
    for a, b in sorted(priority.edges):
        if not conflicts.conflicts_with(a, b):
            return PriorityViolation("edge-not-conflict", (a, b))
    for a, b in sorted(priority.edges):
        if (b, a) in priority.edges:
            return PriorityViolation("symmetric-pair", (a, b))
    cycle = _find_cycle(priority.edges)
    if cycle is not None:
        return PriorityViolation("cycle", tuple(cycle))
    return None


def _find_cycle(edges: frozenset[tuple[FactId, FactId]]) -> Optional[list[FactId]]:
    succ: dict[FactId, list[FactId]] = {}
    for a, b in sorted(edges):
        succ.setdefault(a, []).append(b)
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[FactId, int] = {}
    stack_path: list[FactId] = []

    def visit(v: FactId) -> Optional[list[FactId]]:
        color[v] = GRAY
        stack_path.append(v)
        for w in succ.get(v, ()):
            c = color.get(w, WHITE)
            if c == GRAY:
                return stack_path[stack_path.index(w):]
            if c == WHITE:
                found = visit(w)
                if found is not None:
                    return found
        stack_path.pop()
        color[v] = BLACK
        return None

    for v in sorted(succ):
        if color.get(v, WHITE) == WHITE:
            found = visit(v)
            if found is not None:
                return found
    return None


class DirectedConflictGraph:
    """Edge a -> b iff {a,b} is a conflict and a is not preferred to b."""

    __slots__ = ("out_edges",)

    def __init__(self, out_edges: Mapping[FactId, frozenset[FactId]]):
        self.out_edges = dict(out_edges)

    def out(self, fact: FactId) -> frozenset[FactId]:
        return self.out_edges.get(fact, frozenset())

    def nodes(self) -> frozenset[FactId]:
        return frozenset(self.out_edges)

    def zero_out_degree(self, universe: Iterable[FactId]) -> frozenset[FactId]:
        """Facts with no outgoing edge; these sit in every optimal repair."""
        return frozenset(f for f in universe if not self.out_edges.get(f))


def directed_conflict_graph(conflicts: ConflictSet,
                            priority: PriorityRelation) -> DirectedConflictGraph:
    """Build the directed conflict graph; self-inconsistent facts are excluded."""
    bad = conflicts.self_inconsistent
    out: dict[FactId, set[FactId]] = {}
    for a, b in conflicts.sorted_pairs():
        if a in bad or b in bad:
            continue
        out.setdefault(a, set())
        out.setdefault(b, set())
        if not priority.prefers(a, b):
            out[a].add(b)
        if not priority.prefers(b, a):
            out[b].add(a)
    return DirectedConflictGraph({f: frozenset(s) for f, s in out.items()})


def reachable_set(dcg: DirectedConflictGraph, seed: Iterable[FactId]) -> frozenset[FactId]:
    """Closure of `seed` under outgoing edges; seed facts are always included."""
    result = set(seed)
    frontier = [f for f in result if f in dcg.out_edges]
    while frontier:
        nxt = []
        for f in frontier:
            for g in dcg.out(f):
                if g not in result:
                    result.add(g)
                    nxt.append(g)
        frontier = nxt
    return frozenset(result)


def reachable_minus_set(conflicts: ConflictSet, priority: PriorityRelation,
                        seed: Iterable[FactId]) -> frozenset[FactId]:
    """Fixpoint closure used by the variable-lean maximality encoding.

    Starting from the seed, repeatedly add every non-dominated contradictor of
    every fact preferred to a fact already in the set.
    """
    dcg = directed_conflict_graph(conflicts, priority)
    result = set(seed)
    frontier = list(result)
    while frontier:
        nxt = []
        for a in frontier:
            for b in priority.dominators_of(a):
                for g in dcg.out(b):
                    if g not in result:
                        result.add(g)
                        nxt.append(g)
        frontier = nxt
    return frozenset(result)


def build_score_priority(conflicts: ConflictSet,
                         scores: Mapping[FactId, int]) -> PriorityRelation:
    """Orient each conflict pair toward the strictly higher score."""
    edges = []
    for a, b in conflicts.sorted_pairs():
        try:
            sa, sb = scores[a], scores[b]
        except KeyError as missing:
            raise ValueError(f"no score for conflicting fact {missing.args[0]}") from None
        if sa > sb:
            edges.append((a, b))
        elif sb > sa:
            edges.append((b, a))
    return PriorityRelation(edges)


def build_random_priority(conflicts: ConflictSet, p: float,
                          rng_seed: int) -> PriorityRelation:
    """Orient each conflict pair with probability p, skipping cyclic choices.

    Pairs are visited in sorted order and each draws its own orientation, so
    the result is reproducible for a fixed seed.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability p={p} outside [0, 1]")
    rng = random.Random(rng_seed)
    succ: dict[FactId, set[FactId]] = {}
    edges: list[tuple[FactId, FactId]] = []

    def creates_cycle(a: FactId, b: FactId) -> bool:
        # would a -> b close a cycle, i.e. is a reachable from b?
        seen = {b}
        stack = [b]
        while stack:
            v = stack.pop()
            if v == a:
                return True
            for w in succ.get(v, ()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    for a, b in conflicts.sorted_pairs():
        if rng.random() >= p:
            continue
        hi, lo = (a, b) if rng.random() < 0.5 else (b, a)
        if creates_cycle(hi, lo):
            continue
        edges.append((hi, lo))
        succ.setdefault(hi, set()).add(lo)
    return PriorityRelation(edges)


def is_score_structured(conflicts: ConflictSet, priority: PriorityRelation) -> bool:
    """Decide whether some scoring function induces the relation.

    Conflicting but incomparable pairs force equal scores, so collapse them
    into components and check that the strict preferences between components
    are acyclic.
    """
    parent: dict[FactId, FactId] = {}

    def find(x: FactId) -> FactId:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: FactId, y: FactId):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for a, b in conflicts.sorted_pairs():
        if not priority.prefers(a, b) and not priority.prefers(b, a):
            union(a, b)
    comp_edges = set()
    for a, b in priority.sorted_edges():
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        comp_edges.add((ra, rb))
    return _find_cycle(frozenset(comp_edges)) is None


@dataclass(frozen=True)
class PrioritizedInstance:
    """A knowledge base reduced to its conflict structure plus candidate answers."""

    universe: tuple[FactId, ...]
    conflicts: ConflictSet
    priority: PriorityRelation
    answers: tuple[PotentialAnswer, ...]
    labels: Mapping[FactId, str] = field(default_factory=dict)

    def __post_init__(self):
        known = set(self.universe)
        if len(known) != len(self.universe):
            raise ValueError("duplicate fact ids in universe")
        for group in (self.conflicts.facts(), *(a.all_facts() for a in self.answers)):
            stray = group - known
            if stray:
                raise ValueError(f"facts {sorted(stray)} not declared in the universe")
        violation = validate_priority(self.conflicts, self.priority)
        if violation is not None:
            raise ValueError(f"invalid priority relation, {violation}")

    def label(self, fact: FactId) -> str:
        return self.labels.get(fact, str(fact))

    @cached_property
    def _dcg(self) -> DirectedConflictGraph:
        return directed_conflict_graph(self.conflicts, self.priority)

    def dcg(self) -> DirectedConflictGraph:
        return self._dcg

    def answer_ids(self) -> list[str]:
        return [a.answer_id for a in self.answers]

    def with_priority(self, priority: PriorityRelation) -> "PrioritizedInstance":
        return PrioritizedInstance(self.universe, self.conflicts, priority,
                                   self.answers, self.labels)

    def with_answers(self, answers: Sequence[PotentialAnswer]) -> "PrioritizedInstance":
        return PrioritizedInstance(self.universe, self.conflicts, self.priority,
                                   tuple(answers), self.labels)


def make_instance(universe: Iterable[FactId],
                  conflict_pairs: Iterable[tuple[FactId, FactId]],
                  priority_edges: Iterable[tuple[FactId, FactId]] = (),
                  answers: Iterable[PotentialAnswer] = (),
                  self_inconsistent: Iterable[FactId] = (),
                  labels: Optional[Mapping[FactId, str]] = None) -> PrioritizedInstance:
    return PrioritizedInstance(
        tuple(sorted(set(universe))),
        ConflictSet(conflict_pairs, self_inconsistent),
        PriorityRelation(priority_edges),
        tuple(answers),
        dict(labels or {}),
    )
