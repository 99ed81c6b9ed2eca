"""JSON input and output formats.

Knowledge-base file: {"facts": [{"id": int, "label": str?}],
"conflicts": [[a, b] | [a]], "priority": [[preferred, other]]}.
Answers file: {"query": str, "answers": [{"id": str, "causes": [[int, ...]]}]}.
Result file: see `result_document`. All writers are deterministic.
"""

from __future__ import annotations

import json
from importlib import resources
from .errors import InputError
from .filters import FilterReport
from .model import PrioritizedInstance, make_answer, make_instance

SCHEMA_VERSION = 1


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    except json.JSONDecodeError as err:
        raise InputError(f"{path}: parse error at line {err.lineno}, "
                         f"column {err.colno}: {err.msg}") from None


def parse_instance(kb_doc, answers_doc, source: str = "<input>") -> PrioritizedInstance:
    try:
        fact_entries = kb_doc["facts"]
        conflict_entries = kb_doc.get("conflicts", [])
        priority_entries = kb_doc.get("priority", [])
    except (TypeError, KeyError) as err:
        raise InputError(f"{source}: missing field {err}") from None
    labels = {}
    ids = []
    for entry in fact_entries:
        fid = entry["id"]
        if not isinstance(fid, int) or fid < 0:
            raise InputError(f"{source}: fact id {fid!r} is not a non-negative integer")
        if fid in labels:
            raise InputError(f"{source}: duplicate fact id {fid}")
        ids.append(fid)
        labels[fid] = entry.get("label", str(fid))
    known = set(ids)
    pairs = []
    unary = []
    for entry in conflict_entries:
        if not isinstance(entry, list) or not 1 <= len(entry) <= 2:
            raise InputError(f"{source}: conflict {entry!r} is not a 1- or 2-element list")
        stray = set(entry) - known
        if stray:
            raise InputError(f"{source}: conflict {entry!r} references unknown facts "
                             f"{sorted(stray)}")
        if len(entry) == 1:
            unary.append(entry[0])
        else:
            pairs.append((entry[0], entry[1]))
    edges = []
    for entry in priority_entries:
        if not isinstance(entry, list) or len(entry) != 2:
            raise InputError(f"{source}: priority entry {entry!r} is not a pair")
        stray = set(entry) - known
        if stray:
            raise InputError(f"{source}: priority {entry!r} references unknown facts "
                             f"{sorted(stray)}")
        edges.append((entry[0], entry[1]))
    answers = []
    seen_ids = set()
    for entry in answers_doc.get("answers", []):
        aid = entry["id"]
        if aid in seen_ids:
            raise InputError(f"{source}: duplicate answer id {aid!r}")
        seen_ids.add(aid)
        causes = entry.get("causes", [])
        if not causes:
            raise InputError(f"{source}: answer {aid!r} has no causes")
        for cause in causes:
            stray = set(cause) - known
            if stray:
                raise InputError(f"{source}: cause {cause!r} of answer {aid!r} "
                                 f"references unknown facts {sorted(stray)}")
            if not cause:
                raise InputError(f"{source}: answer {aid!r} has an empty cause")
        answers.append(make_answer(aid, causes))
    try:
        return make_instance(ids, pairs, edges, answers, self_inconsistent=unary,
                             labels=labels)
    except ValueError as err:
        raise InputError(f"{source}: {err}") from None


def load_instance(kb_path: str, answers_path: str) -> PrioritizedInstance:
    kb_doc = _load_json(kb_path)
    answers_doc = _load_json(answers_path)
    return parse_instance(kb_doc, answers_doc, source=kb_path)


def instance_documents(instance: PrioritizedInstance, query: str = "q"):
    kb_doc = {
        "facts": [{"id": f, "label": instance.label(f)} for f in instance.universe],
        "conflicts": ([list(p) for p in instance.conflicts.sorted_pairs()]
                      + [[f] for f in sorted(instance.conflicts.self_inconsistent)]),
        "priority": [list(e) for e in instance.priority.sorted_edges()],
    }
    answers_doc = {
        "query": query,
        "answers": [{"id": a.answer_id, "causes": [sorted(c) for c in a.causes]}
                    for a in instance.answers],
    }
    return kb_doc, answers_doc


def write_json(path: str, doc) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)
        handle.write("\n")


def save_instance(instance: PrioritizedInstance, kb_path: str, answers_path: str,
                  query: str = "q") -> None:
    kb_doc, answers_doc = instance_documents(instance, query)
    write_json(kb_path, kb_doc)
    write_json(answers_path, answers_doc)


def result_document(semantics: str, repair_flag: str, neg_variant: int,
                    algorithm: str, report: FilterReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "semantics": semantics,
        "repair": repair_flag,
        "encoding": {"neg": neg_variant, "max": repair_flag},
        "algorithm": algorithm,
        "trivial": sorted(report.trivial_answers),
        "answers": sorted(report.answers),
        "removed_self_inconsistent": sorted(report.removed_self_inconsistent),
        "timings_ms": report.timings_ms,
        "solver_stats": report.solver_stats,
        "complete": report.complete,
    }


def example_instance() -> PrioritizedInstance:
    """The four-fact fixture shipped with the package."""
    kb = json.loads(resources.files("repairqa.data")
                    .joinpath("example1_kb.json").read_text())
    ans = json.loads(resources.files("repairqa.data")
                     .joinpath("example1_answers.json").read_text())
    return parse_instance(kb, ans, source="example1")
