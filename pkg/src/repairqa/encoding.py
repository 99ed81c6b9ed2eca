"""Propositional encodings for repair-based query answering.

Builds CNF formulas whose models correspond to partial fact selections
extendable to an optimal repair, combined with clauses that force or block
query supports. Two blocking-clause variants are supported, three maximality
encodings (plus the trivial one for plain subset repairs), and both
single-target and multi-target (activator-literal) assembly modes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .errors import CapacityError
from .model import (EMPTY_PRIORITY, FactId, PotentialAnswer, PrioritizedInstance,
                    reachable_minus_set, reachable_set)

VarKey = tuple

SEMANTICS = ("ar", "iar", "brave")
REPAIRS = ("s", "p", "c")
MAX_VARIANTS = ("s", "p1", "p2", "c")

DEFAULT_NODE_CAP = 64


@dataclass(frozen=True)
class EncodingSpec:
    """Which semantics, repair notion, maximality and blocking variants to use.

    Pairing a completion repair with a "p1"/"p2" maximality is legal only for
    score-structured priorities; callers check that against the instance.
    """

    semantics: str
    repair: str
    max_variant: str
    neg_variant: int = 1

    def __post_init__(self):
        if self.semantics not in SEMANTICS:
            raise ValueError(f"unknown semantics {self.semantics!r}")
        if self.repair not in REPAIRS:
            raise ValueError(f"unknown repair type {self.repair!r}")
        if self.max_variant not in MAX_VARIANTS:
            raise ValueError(f"unknown maximality variant {self.max_variant!r}")
        if self.neg_variant not in (1, 2):
            raise ValueError(f"blocking variant must be 1 or 2, got {self.neg_variant}")
        allowed = {"s": ("s",), "p": ("p1", "p2"), "c": ("c", "p1", "p2")}[self.repair]
        if self.max_variant not in allowed:
            raise ValueError(
                f"maximality {self.max_variant!r} incompatible with repair {self.repair!r}")


class CnfFormula:
    """Interned tagged variables, hard clauses, and unit soft literals."""

    def __init__(self):
        self.keys: list[VarKey] = []
        self.index: dict[VarKey, int] = {}
        self.hard: list[tuple[int, ...]] = []
        self.soft_units: list[int] = []
        self.scopes: dict[str, frozenset[FactId]] = {}
        self._clause_set: set[tuple[int, ...]] = set()

    # -- variables ------------------------------------------------------

    def var(self, key: VarKey) -> int:
        idx = self.index.get(key)
        if idx is None:
            self.keys.append(key)
            idx = len(self.keys)
            self.index[key] = idx
        return idx

    def fact_var(self, fact: FactId, ns: Optional[int] = None) -> int:
        return self.var(("fact", ns, fact))

    def answer_var(self, answer_id: str) -> int:
        return self.var(("answer", answer_id))

    def assume_var(self, fact: FactId) -> int:
        return self.var(("assume", fact))

    def key_of(self, var: int) -> VarKey:
        return self.keys[var - 1]

    @property
    def nvars(self) -> int:
        return len(self.keys)

    # -- clauses --------------------------------------------------------

    def add(self, lits: Iterable[int]) -> tuple[int, ...]:
        clause = tuple(lits)
        if clause not in self._clause_set:
            self._clause_set.add(clause)
            self.hard.append(clause)
        return clause

    def add_soft_unit(self, var: int) -> None:
        if var not in self.soft_units:
            self.soft_units.append(var)

    def facts_in(self, clauses: Iterable[Iterable[int]],
                 ns: Optional[int] = None) -> frozenset[FactId]:
        out = set()
        for clause in clauses:
            for lit in clause:
                key = self.key_of(abs(lit))
                if key[0] == "fact" and key[1] == ns:
                    out.add(key[2])
        return frozenset(out)


# ----------------------------------------------------------------------
# building blocks


def _sorted_out(instance: PrioritizedInstance, fact: FactId) -> list[FactId]:
    return sorted(instance.dcg().out(fact))


def encode_neg_cause(formula: CnfFormula, instance: PrioritizedInstance,
                     cause: Iterable[FactId], variant: int,
                     activator: Optional[VarKey] = None,
                     ns: Optional[int] = None) -> list[tuple[int, ...]]:
    """Clauses stating that the cause does not survive in the selected repair.

    Variant 1 emits a single clause of non-dominated contradictors; variant 2
    additionally justifies each cause fact individually. When an activator key
    is given its negation guards the (first) clause. A cause with no
    contradictor at all yields an unguarded empty clause: the formula becomes
    unsatisfiable, which callers read as "the cause always survives".
    """
    cause = sorted(set(cause))
    bad = set(cause) & instance.conflicts.self_inconsistent
    if bad:
        raise ValueError(f"cause contains self-inconsistent facts {sorted(bad)}; "
                         "preprocess the instance first")
    clauses = []
    guard = [-formula.var(activator)] if activator is not None else []
    if variant == 1:
        lits = list(guard)
        seen = set()
        for a in cause:
            for b in _sorted_out(instance, a):
                v = formula.fact_var(b, ns)
                if v not in seen:
                    seen.add(v)
                    lits.append(v)
        clauses.append(formula.add(lits))
    else:
        first = list(guard) + [-formula.fact_var(a, ns) for a in cause]
        clauses.append(formula.add(first))
        for a in cause:
            clauses.append(formula.add(
                [formula.fact_var(a, ns)]
                + [formula.fact_var(b, ns) for b in _sorted_out(instance, a)]))
    return clauses


def encode_neg_query(formula: CnfFormula, instance: PrioritizedInstance,
                     answer: PotentialAnswer, variant: int,
                     multi: bool = False) -> list[tuple[int, ...]]:
    """Block every cause of the answer; in multi mode each block is guarded
    by the answer's activator variable."""
    activator = ("answer", answer.answer_id) if multi else None
    clauses = []
    for cause in answer.causes:
        clauses.extend(encode_neg_cause(formula, instance, cause, variant,
                                        activator=activator))
    return clauses


def encode_pos_cause(formula: CnfFormula,
                     cause: Iterable[FactId]) -> list[tuple[int, ...]]:
    """Force every fact of the cause into the selection."""
    cause = sorted(set(cause))
    if not cause:
        raise ValueError("empty cause")
    return [formula.add([formula.fact_var(a)]) for a in cause]


def encode_pos_query(formula: CnfFormula, answer: PotentialAnswer,
                     multi: bool = False) -> list[tuple[int, ...]]:
    """Require some cause of the answer to be fully selected."""
    selectors = [formula.var(("causesel", answer.answer_id, i))
                 for i in range(len(answer.causes))]
    head = [-formula.answer_var(answer.answer_id)] if multi else []
    clauses = [formula.add(head + selectors)]
    for sel, cause in zip(selectors, answer.causes):
        for a in sorted(cause):
            clauses.append(formula.add([-sel, formula.fact_var(a)]))
    return clauses


def encode_consistency(formula: CnfFormula, instance: PrioritizedInstance,
                       scope: Iterable[FactId],
                       ns: Optional[int] = None) -> list[tuple[int, ...]]:
    """No conflict pair inside the scope may be selected together."""
    scope = set(scope)
    clauses = []
    for a, b in instance.conflicts.sorted_pairs():
        if a in scope and b in scope:
            clauses.append(formula.add([-formula.fact_var(a, ns),
                                        -formula.fact_var(b, ns)]))
    return clauses


def encode_max(formula: CnfFormula, instance: PrioritizedInstance, variant: str,
               scope: Iterable[FactId], ns: Optional[int] = None,
               node_cap: int = DEFAULT_NODE_CAP,
               omit_acyclicity: bool = False
               ) -> tuple[list[tuple[int, ...]], frozenset[FactId]]:
    """Clauses ensuring the selection extends to an optimal repair.

    Returns the clauses and the facts they range over. The "s" variant is
    empty (every consistent set extends to a maximal one). "p1" works over the
    reachability closure of the scope, "p2" over the leaner dominator-driven
    closure, and "c" adds explicit completion-order and transitive-closure
    variables, which is cubic in the closure size and therefore capped.
    """
    if variant == "s":
        return [], frozenset()
    dcg = instance.dcg()
    clauses: list[tuple[int, ...]] = []
    if variant == "p1":
        reach = reachable_set(dcg, set(scope))
        for a in sorted(reach):
            clauses.append(formula.add(
                [formula.fact_var(a, ns)]
                + [formula.fact_var(b, ns) for b in sorted(dcg.out(a))]))
        return clauses, reach

    if variant == "p2":
        closure = reachable_minus_set(instance.conflicts, instance.priority, set(scope))
        used = set(closure)
        for a in sorted(closure):
            for b in sorted(instance.priority.dominators_of(a)):
                body = sorted(dcg.out(b))
                used.update(body)
                clauses.append(formula.add(
                    [-formula.fact_var(a, ns)]
                    + [formula.fact_var(g, ns) for g in body]))
        return clauses, frozenset(used)

    if variant == "c":
        reach = reachable_set(dcg, set(scope))
        if len(reach) > node_cap:
            raise CapacityError(
                f"completion encoding over {len(reach)} facts exceeds the cap of "
                f"{node_cap}; raise the cap explicitly to proceed")
        pairs = [(a, b) for a, b in instance.conflicts.sorted_pairs()
                 if a in reach and b in reach]

        def comp(a, b):
            return formula.var(("comp", ns, a, b))

        def pref(src, dst):
            return formula.var(("pref", ns, src, dst))

        def trans(a, b):
            return formula.var(("trans", ns, a, b))

        # a fact may only be dropped for an included, completion-preferred rival
        neighbors: dict[FactId, list[FactId]] = {a: [] for a in sorted(reach)}
        for a, b in pairs:
            neighbors[a].append(b)
            neighbors[b].append(a)
        for a in sorted(reach):
            clauses.append(formula.add(
                [formula.fact_var(a, ns)]
                + [pref(b, a) for b in sorted(neighbors[a])]))
        for a, b in pairs:
            for src, dst in ((a, b), (b, a)):
                clauses.append(formula.add([-pref(src, dst), formula.fact_var(src, ns)]))
                clauses.append(formula.add([-pref(src, dst), comp(src, dst)]))
        # the completion orders every conflicting pair, exactly one way,
        # and extends the given priorities
        for a, b in pairs:
            clauses.append(formula.add([comp(a, b), comp(b, a)]))
            clauses.append(formula.add([-comp(a, b), -comp(b, a)]))
            if instance.priority.prefers(a, b):
                clauses.append(formula.add([comp(a, b)]))
            elif instance.priority.prefers(b, a):
                clauses.append(formula.add([comp(b, a)]))
        if not omit_acyclicity:
            # transitive-closure variables rule out completion cycles
            for a, b in pairs:
                for src, dst in ((a, b), (b, a)):
                    clauses.append(formula.add([-comp(src, dst), trans(src, dst)]))
                    clauses.append(formula.add([-comp(src, dst), -trans(dst, src)]))
            ordered = [(a, b) for a, b in pairs] + [(b, a) for a, b in pairs]
            ordered.sort()
            for f in sorted(reach):
                for src, dst in ordered:
                    if f == src or f == dst:
                        continue
                    clauses.append(formula.add(
                        [-trans(f, src), -comp(src, dst), trans(f, dst)]))
        return clauses, reach

    raise ValueError(f"unknown maximality variant {variant!r}")


# ----------------------------------------------------------------------
# formula assembly

Target = Union[PotentialAnswer, frozenset, set, int]


def _effective_instance(instance: PrioritizedInstance,
                        spec: EncodingSpec) -> PrioritizedInstance:
    # plain subset repairs ignore preferences entirely
    if spec.repair == "s" and not instance.priority.is_empty():
        return instance.with_priority(EMPTY_PRIORITY)
    return instance


def _scoped_block(formula: CnfFormula, instance: PrioritizedInstance,
                  spec: EncodingSpec, base_clauses: list[tuple[int, ...]],
                  ns: Optional[int], node_cap: int, omit_acyclicity: bool,
                  tag: str = "") -> None:
    seed = formula.facts_in(base_clauses, ns)
    max_clauses, used = encode_max(formula, instance, spec.max_variant, seed,
                                   ns=ns, node_cap=node_cap,
                                   omit_acyclicity=omit_acyclicity)
    full = seed | used
    encode_consistency(formula, instance, full, ns=ns)
    suffix = f"@{ns}" if ns is not None else ""
    formula.scopes[f"seed{suffix}{tag}"] = seed
    formula.scopes[f"full{suffix}{tag}"] = full


def build_single_formula(instance: PrioritizedInstance, spec: EncodingSpec,
                         target: Target,
                         node_cap: int = DEFAULT_NODE_CAP,
                         omit_acyclicity: bool = False) -> CnfFormula:
    """Formula deciding one answer, cause, or fact under the chosen semantics.

    Satisfiability answers the query: a "brave" formula is satisfiable iff the
    target holds in some optimal repair; an "ar"/"iar" formula is
    unsatisfiable iff the target holds in every optimal repair (respectively
    their intersection).
    """
    instance = _effective_instance(instance, spec)
    formula = CnfFormula()
    if isinstance(target, PotentialAnswer):
        kind = "answer"
    elif isinstance(target, (set, frozenset)):
        kind = "cause"
    elif isinstance(target, int):
        kind = "fact"
    else:
        raise TypeError(f"unsupported target {target!r}")

    sem = spec.semantics
    if sem == "ar":
        if kind != "answer":
            raise ValueError("ar formulas take a whole answer as target")
        base = encode_neg_query(formula, instance, target, spec.neg_variant)
        _scoped_block(formula, instance, spec, base, None, node_cap, omit_acyclicity)
    elif sem == "brave":
        if kind == "answer":
            base = encode_pos_query(formula, target)
        elif kind == "cause":
            base = encode_pos_cause(formula, target)
        else:
            raise ValueError("brave formulas take an answer or a cause as target")
        _scoped_block(formula, instance, spec, base, None, node_cap, omit_acyclicity)
    else:  # iar
        if kind == "answer":
            # independent sub-problems per cause, on disjoint variables
            for i, cause in enumerate(target.causes):
                base = encode_neg_cause(formula, instance, cause,
                                        spec.neg_variant, ns=i)
                _scoped_block(formula, instance, spec, base, i,
                              node_cap, omit_acyclicity)
        else:
            cause = {target} if kind == "fact" else set(target)
            base = encode_neg_cause(formula, instance, cause, spec.neg_variant)
            _scoped_block(formula, instance, spec, base, None,
                          node_cap, omit_acyclicity)
    return formula


def build_multi_formula(instance: PrioritizedInstance, spec: EncodingSpec,
                        targets: Union[Sequence[PotentialAnswer], Iterable[FactId]],
                        node_cap: int = DEFAULT_NODE_CAP,
                        omit_acyclicity: bool = False) -> CnfFormula:
    """One formula covering many answers (or, for "iar", many single facts).

    Each target gets an activator variable, emitted as a unit soft literal so
    that callers may treat it as a soft clause, an assumption, or a candidate
    core. An activator can be true only when the target's condition holds in
    the model, so maximizing true activators sweeps whole answer sets at once.
    """
    instance = _effective_instance(instance, spec)
    targets = list(targets)
    if not targets:
        raise ValueError("no targets to encode")
    formula = CnfFormula()
    answer_mode = isinstance(targets[0], PotentialAnswer)

    if answer_mode:
        sem = spec.semantics
        if sem in ("ar", "brave"):
            all_base: list[tuple[int, ...]] = []
            for ans in targets:
                if sem == "ar":
                    all_base += encode_neg_query(formula, instance, ans,
                                                 spec.neg_variant, multi=True)
                else:
                    all_base += encode_pos_query(formula, ans, multi=True)
            _scoped_block(formula, instance, spec, all_base, None,
                          node_cap, omit_acyclicity)
        else:  # iar: per distinct cause, namespaced; guards per answer
            ns_of: dict[frozenset, int] = {}
            for ans in targets:
                activator = ("answer", ans.answer_id)
                for cause in ans.causes:
                    key = frozenset(cause)
                    first_time = key not in ns_of
                    if first_time:
                        ns_of[key] = len(ns_of)
                    ns = ns_of[key]
                    base = encode_neg_cause(formula, instance, cause,
                                            spec.neg_variant,
                                            activator=activator, ns=ns)
                    if first_time:
                        _scoped_block(formula, instance, spec, base, ns,
                                      node_cap, omit_acyclicity)
        for ans in targets:
            formula.add_soft_unit(formula.answer_var(ans.answer_id))
    else:
        if spec.semantics != "iar":
            raise ValueError("fact-set targets only make sense for iar")
        rel = sorted(set(targets))
        all_base = []
        for fact in rel:
            all_base += encode_neg_cause(formula, instance, {fact},
                                         spec.neg_variant,
                                         activator=("assume", fact))
        _scoped_block(formula, instance, spec, all_base, None,
                      node_cap, omit_acyclicity)
        for fact in rel:
            formula.add_soft_unit(formula.assume_var(fact))
    return formula


# ----------------------------------------------------------------------
# DIMACS export


def _render_key(key: VarKey) -> str:
    tag = key[0]
    if tag == "fact":
        ns, fact = key[1], key[2]
        return f"fact({fact})" if ns is None else f"fact({fact})@cause{ns}"
    if tag == "answer":
        return f"answer({key[1]})"
    if tag == "assume":
        return f"assume_fact({key[1]})"
    if tag == "causesel":
        return f"cause_sel({key[1]},{key[2]})"
    if tag == "pref":
        ns, src, dst = key[1], key[2], key[3]
        base = f"pref_in({src}->{dst})"
    elif tag == "comp":
        ns, src, dst = key[1], key[2], key[3]
        base = f"order({src}>{dst})"
    elif tag == "trans":
        ns, src, dst = key[1], key[2], key[3]
        base = f"reaches({src},{dst})"
    else:
        return repr(key)
    return base if ns is None else f"{base}@cause{ns}"


def export_dimacs(formula: CnfFormula, weighted: bool = False) -> bytes:
    """Serialize to DIMACS CNF, or WCNF with unit-weight softs when asked."""
    lines = []
    for i, key in enumerate(formula.keys, start=1):
        lines.append(f"c var {i} = {_render_key(key)}")
    if weighted:
        top = len(formula.soft_units) + 1
        nclauses = len(formula.hard) + len(formula.soft_units)
        lines.append(f"p wcnf {formula.nvars} {nclauses} {top}")
        for clause in formula.hard:
            lines.append(" ".join([str(top)] + [str(l) for l in clause] + ["0"]))
        for unit in formula.soft_units:
            lines.append(f"1 {unit} 0")
    else:
        lines.append(f"p cnf {formula.nvars} {len(formula.hard)}")
        for clause in formula.hard:
            lines.append(" ".join([str(l) for l in clause] + ["0"]))
    return ("\n".join(lines) + "\n").encode("utf-8")
