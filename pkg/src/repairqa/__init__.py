"""Query answering over inconsistent, prioritized knowledge bases.

The package builds propositional encodings of the three repair-based
semantics (answers holding in every, in the intersection of, or in some
optimal repair) for subset, preference-maximal, and completion-maximal
repairs, solves them with an embedded SAT engine, and cross-validates every
result against a brute-force repair enumerator.
"""

from .encoding import (CnfFormula, EncodingSpec, build_multi_formula,
                       build_single_formula, export_dimacs)
from .errors import BudgetExceededError, CapacityError, InputError, PairingError
from .files import example_instance, load_instance, save_instance
from .filters import (FilterReport, FilterRequest, answer_query, classify_answers,
                      extract_trivial_answers, remove_self_inconsistent)
from .model import (ConflictSet, DirectedConflictGraph, PotentialAnswer,
                    PriorityRelation, PrioritizedInstance, build_random_priority,
                    build_score_priority, directed_conflict_graph,
                    is_score_structured, make_answer, make_instance,
                    reachable_minus_set, reachable_set, validate_priority)
from .oracle import (OracleAnswers, RepairFamily, enumerate_completion_repairs,
                     enumerate_pareto_repairs, enumerate_repairs, oracle_answers)
from .sat import (MaxSatResult, SolveResult, SolverSession, enumerate_mus,
                  maximize_soft, solve_clauses)
from .verify import run_verification

__all__ = [
    "BudgetExceededError", "CapacityError", "CnfFormula", "ConflictSet",
    "DirectedConflictGraph", "EncodingSpec", "FilterReport", "FilterRequest",
    "InputError", "MaxSatResult", "OracleAnswers", "PairingError",
    "PotentialAnswer", "PriorityRelation", "PrioritizedInstance", "RepairFamily",
    "SolveResult", "SolverSession", "answer_query", "build_multi_formula",
    "build_random_priority", "build_score_priority", "build_single_formula",
    "classify_answers", "directed_conflict_graph", "enumerate_completion_repairs",
    "enumerate_mus", "enumerate_pareto_repairs", "enumerate_repairs",
    "example_instance", "export_dimacs", "extract_trivial_answers",
    "is_score_structured", "load_instance", "make_answer", "make_instance",
    "maximize_soft", "oracle_answers", "reachable_minus_set", "reachable_set",
    "remove_self_inconsistent", "run_verification", "save_instance",
    "solve_clauses", "validate_priority",
]

__version__ = "0.1.0"
