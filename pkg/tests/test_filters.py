import pytest

from repairqa.encoding import EncodingSpec
from repairqa.errors import PairingError
from repairqa.filters import (CLASS_AR, CLASS_IAR, CLASS_TRIVIAL, FilterRequest,
                              answer_query, classify_answers,
                              extract_trivial_answers, remove_self_inconsistent)
from repairqa.model import make_answer, make_instance
from repairqa.oracle import oracle_answers

from conftest import small_instances

ALGOS_FOR = {
    "ar": ("simple", "maxsat", "muses", "assume"),
    "brave": ("simple", "maxsat", "muses", "assume", "cause"),
    "iar": ("simple", "maxsat", "muses", "assume", "cause", "iarcauses", "iarfacts"),
}


def spec_for(sem, repair, variant=None, neg=1):
    variant = variant or {"s": "s", "p": "p1", "c": "c"}[repair]
    return EncodingSpec(sem, repair, variant, neg)


def run(inst, sem, repair, algo, variant=None, neg=1, **kw):
    return answer_query(FilterRequest(inst, spec_for(sem, repair, variant, neg),
                                      algo, **kw))


class TestRemoveSelfInconsistent:
    def test_identity_without_unary_conflicts(self, ex1):
        cleaned, removed = remove_self_inconsistent(ex1)
        assert removed == frozenset()
        assert cleaned is ex1

    def test_causes_with_bad_facts_dropped(self):
        inst = make_instance(range(3), [(1, 2)], self_inconsistent=[0],
                             answers=[make_answer("a", [[0], [1]])])
        cleaned, removed = remove_self_inconsistent(inst)
        assert removed == {0}
        assert cleaned.answers[0].causes == (frozenset({1}),)

    def test_answer_without_causes_left_dropped(self):
        inst = make_instance(range(2), [], self_inconsistent=[0],
                             answers=[make_answer("a", [[0]])])
        cleaned, _ = remove_self_inconsistent(inst)
        assert cleaned.answers == ()

    def test_conflicts_touching_bad_facts_dropped(self):
        inst = make_instance(range(3), [(0, 1), (1, 2)], [(1, 2)],
                             self_inconsistent=[0])
        cleaned, _ = remove_self_inconsistent(inst)
        assert cleaned.conflicts.sorted_pairs() == [(1, 2)]
        assert cleaned.priority.sorted_edges() == [(1, 2)]
        assert 0 not in cleaned.universe


class TestTrivialAnswers:
    def test_worked_example_has_none(self, ex1):
        trivial, remaining = extract_trivial_answers(ex1)
        assert trivial == ()
        assert remaining.answers == ex1.answers

    def test_dominating_fact_makes_answer_trivial(self):
        inst = make_instance(range(2), [(0, 1)], [(0, 1)],
                             answers=[make_answer("a", [[0]])])
        trivial, remaining = extract_trivial_answers(inst)
        assert trivial == ("a",)
        assert remaining.answers == ()

    def test_conflict_free_cause_is_trivial(self):
        inst = make_instance(range(3), [(0, 1)],
                             answers=[make_answer("a", [[2]])])
        trivial, _ = extract_trivial_answers(inst)
        assert trivial == ("a",)

    def test_safe_facts_deleted_from_surviving_causes(self):
        inst = make_instance(range(3), [(0, 1)],
                             answers=[make_answer("a", [[0, 2]])])
        _, remaining = extract_trivial_answers(inst)
        assert remaining.answers[0].causes == (frozenset({0}),)


class TestWorkedExampleVerdicts:
    @pytest.mark.parametrize("algo", ALGOS_FOR["ar"])
    def test_pareto_ar(self, ex1, algo):
        assert run(ex1, "ar", "p", algo).answers == {"q(a)"}

    @pytest.mark.parametrize("algo", ALGOS_FOR["iar"])
    def test_pareto_iar(self, ex1, algo):
        assert run(ex1, "iar", "p", algo).answers == set()

    @pytest.mark.parametrize("algo", ALGOS_FOR["iar"])
    def test_completion_iar(self, ex1, algo):
        assert run(ex1, "iar", "c", algo).answers == {"q(a)"}

    @pytest.mark.parametrize("algo", ALGOS_FOR["brave"])
    def test_pareto_brave(self, ex1, algo):
        assert run(ex1, "brave", "p", algo).answers == {"q(a)"}


class TestPipelineMechanics:
    def test_invalid_pairing_rejected_before_solving(self, ex1):
        with pytest.raises(PairingError):
            run(ex1, "brave", "s", "iarcauses")

    def test_completion_with_pareto_maximality_needs_structure(self, ex1):
        # the fixture's priority is not score-structured
        with pytest.raises(PairingError):
            run(ex1, "ar", "c", "simple", variant="p1")

    def test_trivial_only_instance_never_solves(self):
        inst = make_instance(range(3), [],
                             answers=[make_answer("a", [[0]]),
                                      make_answer("b", [[1, 2]])])
        report = run(inst, "ar", "p", "simple")
        assert report.answers == {"a", "b"}
        assert report.trivial_answers == {"a", "b"}
        assert report.solver_stats["solve_calls"] == 0

    def test_subset_repairs_ignore_priority(self, ex1):
        # with preferences ignored, nothing is trivially safe in the fixture
        report = run(ex1, "iar", "s", "simple")
        assert report.answers == set()
        inst = make_instance(range(2), [(0, 1)], [(0, 1)],
                             answers=[make_answer("a", [[0]])])
        assert run(inst, "iar", "s", "simple").answers == set()
        assert run(inst, "iar", "p", "simple").answers == {"a"}

    def test_budget_exhaustion_flags_incomplete(self):
        inst = make_instance(range(3), [(0, 1), (1, 2), (0, 2)],
                             answers=[make_answer("a", [[0]]),
                                      make_answer("b", [[1]]),
                                      make_answer("c", [[2]])])
        report = run(inst, "brave", "s", "maxsat", conflict_budget=0)
        assert not report.complete

    def test_fact_cache_shares_solves(self):
        # both answers hinge on the same fact: one solve must settle both
        inst = make_instance(range(2), [(0, 1)], [(1, 0)],
                             answers=[make_answer("a1", [[0]]),
                                      make_answer("a2", [[0]])])
        report = run(inst, "iar", "p", "iarcauses")
        assert report.answers == set()
        assert report.solver_stats["solve_calls"] == 1

    def test_iarfacts_skips_solving_on_cached_facts(self):
        inst1 = make_instance(range(2), [(0, 1)], [(1, 0)],
                              answers=[make_answer("a1", [[0]])])
        inst2 = make_instance(range(2), [(0, 1)], [(1, 0)],
                              answers=[make_answer("a1", [[0]]),
                                       make_answer("a2", [[0]])])
        one = run(inst1, "iar", "p", "iarfacts")
        two = run(inst2, "iar", "p", "iarfacts")
        assert one.solver_stats["solve_calls"] == two.solver_stats["solve_calls"]

    def test_timings_reported(self, ex1):
        report = run(ex1, "iar", "c", "iarcauses")
        assert set(report.timings_ms) == {"preprocess_ms", "filter_ms"}


class TestCauseTolerance:
    def test_superset_and_inconsistent_causes_change_nothing(self):
        for inst in small_instances(12, seed=41):
            conflict_pair = next(iter(inst.conflicts.sorted_pairs()), None)
            noisy_answers = []
            for ans in inst.answers:
                causes = list(ans.causes)
                base = set(causes[0])
                extra = base | {min(inst.universe)}
                causes.append(frozenset(extra))
                if conflict_pair:
                    causes.append(frozenset(base | set(conflict_pair)))
                noisy_answers.append(make_answer(ans.answer_id, causes))
            noisy = inst.with_answers(noisy_answers)
            for sem in ("ar", "iar", "brave"):
                for repair in ("s", "p", "c"):
                    want = run(inst, sem, repair, "simple").answers
                    got = run(noisy, sem, repair, "simple").answers
                    assert got == want, (sem, repair)


class TestCrossAlgorithmAgreement:
    def test_all_algorithms_match_oracle(self):
        for inst in small_instances(15, seed=42):
            for sem, algos in ALGOS_FOR.items():
                for repair in ("s", "p", "c"):
                    want = oracle_answers(inst, sem, repair).answers
                    for algo in algos:
                        got = run(inst, sem, repair, algo).answers
                        assert got == want, (sem, repair, algo)

    def test_semantic_chain_via_pipeline(self):
        for inst in small_instances(10, seed=43):
            for repair in ("s", "p", "c"):
                iar = run(inst, "iar", repair, "simple")
                ar = run(inst, "ar", repair, "simple")
                brave = run(inst, "brave", repair, "simple")
                assert iar.trivial_answers <= iar.answers <= ar.answers <= brave.answers


class TestClassifyAnswers:
    def test_worked_example_completion(self, ex1):
        assert classify_answers(ex1, "c") == {"q(a)": CLASS_IAR}

    def test_worked_example_pareto(self, ex1):
        assert classify_answers(ex1, "p") == {"q(a)": CLASS_AR}

    def test_conflict_free_answer_is_trivial(self):
        inst = make_instance(range(2), [],
                             answers=[make_answer("a", [[0]])])
        assert classify_answers(inst, "s") == {"a": CLASS_TRIVIAL}

    def test_classes_partition_the_answers(self):
        for inst in small_instances(8, seed=44):
            for repair in ("s", "p", "c"):
                classes = classify_answers(inst, repair)
                assert set(classes) == {a.answer_id for a in inst.answers}
