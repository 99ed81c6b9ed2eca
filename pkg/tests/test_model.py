import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repairqa.model import (ConflictSet, PriorityRelation, build_random_priority,
                            build_score_priority, directed_conflict_graph,
                            is_score_structured, make_answer, make_instance,
                            reachable_minus_set, reachable_set, validate_priority)

from conftest import ALPHA, BETA, DELTA, GAMMA


def conflicts(*pairs, unary=()):
    return ConflictSet(pairs, unary)


class TestValidatePriority:
    def test_worked_example_is_valid(self, ex1):
        assert validate_priority(ex1.conflicts, ex1.priority) is None

    def test_empty_priority_is_valid(self):
        assert validate_priority(conflicts((0, 1), (1, 2)), PriorityRelation()) is None

    def test_cycle_is_reported(self):
        report = validate_priority(conflicts((0, 1), (1, 2), (0, 2)),
                                   PriorityRelation([(0, 1), (1, 2), (2, 0)]))
        assert report is not None and report.kind == "cycle"
        assert set(report.witness) == {0, 1, 2}

    def test_non_conflict_edge_is_reported(self):
        report = validate_priority(conflicts((0, 1)), PriorityRelation([(0, 2)]))
        assert report is not None and report.kind == "edge-not-conflict"
        assert report.witness == (0, 2)

    def test_symmetric_pair_is_reported(self):
        report = validate_priority(conflicts((0, 1)),
                                   PriorityRelation([(0, 1), (1, 0)]))
        assert report is not None and report.kind == "symmetric-pair"


class TestDirectedConflictGraph:
    def test_worked_example_edges(self, ex1):
        dcg = ex1.dcg()
        assert {f: set(dcg.out(f)) for f in range(4)} == {
            ALPHA: {DELTA},
            BETA: {ALPHA, GAMMA},
            GAMMA: {BETA},
            DELTA: {ALPHA, GAMMA},
        }

    def test_unprioritized_pair_is_symmetric(self):
        dcg = directed_conflict_graph(conflicts((0, 1)), PriorityRelation())
        assert dcg.out(0) == {1} and dcg.out(1) == {0}

    def test_dominated_direction_removed(self):
        dcg = directed_conflict_graph(conflicts((0, 1)), PriorityRelation([(0, 1)]))
        assert dcg.out(0) == frozenset() and dcg.out(1) == {0}

    def test_self_inconsistent_excluded(self):
        dcg = directed_conflict_graph(conflicts((0, 1), unary=[0]), PriorityRelation())
        assert dcg.nodes() == frozenset()


class TestReachability:
    def test_worked_example_closure(self, ex1):
        assert reachable_set(ex1.dcg(), {BETA}) == {ALPHA, BETA, GAMMA, DELTA}

    def test_empty_seed(self, ex1):
        assert reachable_set(ex1.dcg(), set()) == frozenset()

    def test_single_edge(self):
        dcg = directed_conflict_graph(conflicts((0, 1)), PriorityRelation([(0, 1)]))
        assert reachable_set(dcg, {1}) == {0, 1}

    def test_minus_closure_no_dominators(self, ex1):
        assert reachable_minus_set(ex1.conflicts, ex1.priority, {ALPHA}) == {ALPHA}

    def test_minus_closure_two_steps(self, ex1):
        assert reachable_minus_set(ex1.conflicts, ex1.priority, {BETA}) == {BETA, DELTA}

    def test_minus_closure_empty_priority(self):
        cs = conflicts((0, 1), (1, 2))
        assert reachable_minus_set(cs, PriorityRelation(), {0, 2}) == {0, 2}


class TestScorePriority:
    def test_direct_comparison(self):
        prio = build_score_priority(conflicts((0, 1), (1, 2)), {0: 3, 1: 1, 2: 2})
        assert prio.edges == {(0, 1), (2, 1)}

    def test_equal_scores_mean_no_edges(self):
        prio = build_score_priority(conflicts((0, 1), (1, 2)), {0: 1, 1: 1, 2: 1})
        assert prio.is_empty()

    def test_worked_example_scores(self, ex1):
        prio = build_score_priority(ex1.conflicts, {0: 2, 1: 1, 2: 2, 3: 1})
        assert prio.edges == {(0, 1), (2, 3), (0, 3), (2, 1)}

    def test_missing_score_rejected(self):
        with pytest.raises(ValueError, match="no score"):
            build_score_priority(conflicts((0, 1)), {0: 1})


class TestRandomPriority:
    def test_zero_probability_gives_empty(self):
        assert build_random_priority(conflicts((0, 1), (1, 2)), 0.0, 3).is_empty()

    def test_triangle_never_cyclic(self):
        cs = conflicts((0, 1), (1, 2), (0, 2))
        for seed in range(40):
            prio = build_random_priority(cs, 1.0, seed)
            assert len(prio.edges) <= 3
            assert validate_priority(cs, prio) is None

    def test_deterministic_for_fixed_seed(self):
        cs = conflicts((0, 1), (1, 2), (2, 3), (0, 3))
        a = build_random_priority(cs, 0.7, 42)
        b = build_random_priority(cs, 0.7, 42)
        assert a == b

    def test_bad_probability_rejected(self):
        with pytest.raises(ValueError):
            build_random_priority(conflicts((0, 1)), 1.5, 0)


class TestScoreStructured:
    def test_worked_example_priority_is_not(self, ex1):
        # incomparable pairs force s(alpha)=s(delta) and s(beta)=s(gamma),
        # which the two strict edges then contradict
        assert not is_score_structured(ex1.conflicts, ex1.priority)

    def test_score_built_priority_always_is(self):
        cs = conflicts((0, 1), (1, 2), (2, 3), (0, 3), (0, 2))
        for seed in range(25):
            scores = {f: (seed * (f + 3)) % 4 + 1 for f in range(4)}
            assert is_score_structured(cs, build_score_priority(cs, scores))

    def test_empty_priority_is(self):
        assert is_score_structured(conflicts((0, 1)), PriorityRelation())


# ----------------------------------------------------------------------
# property tests

pair_lists = st.lists(
    st.tuples(st.integers(0, 7), st.integers(0, 7)).filter(lambda t: t[0] != t[1]),
    max_size=12)


def _prio_for(pairs, seed, p):
    return build_random_priority(ConflictSet(pairs), p, seed)


@given(pairs=pair_lists, seed=st.integers(0, 999), p=st.floats(0, 1))
@settings(max_examples=120, deadline=None)
def test_random_priority_always_valid(pairs, seed, p):
    cs = ConflictSet(pairs)
    assert validate_priority(cs, build_random_priority(cs, p, seed)) is None


@given(pairs=pair_lists, seed=st.integers(0, 999))
@settings(max_examples=120, deadline=None)
def test_dcg_edges_match_definition(pairs, seed):
    cs = ConflictSet(pairs)
    prio = _prio_for(pairs, seed, 0.6)
    dcg = directed_conflict_graph(cs, prio)
    for a in range(8):
        for b in range(8):
            expected = cs.conflicts_with(a, b) and not prio.prefers(a, b)
            assert (b in dcg.out(a)) == expected


@given(pairs=pair_lists, seed=st.integers(0, 999),
       seed_facts=st.sets(st.integers(0, 7), max_size=5),
       extra=st.sets(st.integers(0, 7), max_size=3))
@settings(max_examples=120, deadline=None)
def test_reachable_monotone_and_idempotent(pairs, seed, seed_facts, extra):
    dcg = directed_conflict_graph(ConflictSet(pairs), _prio_for(pairs, seed, 0.5))
    base = reachable_set(dcg, seed_facts)
    assert base <= reachable_set(dcg, seed_facts | extra)
    assert reachable_set(dcg, base) == base


@given(pairs=pair_lists, seed=st.integers(0, 999),
       seed_facts=st.sets(st.integers(0, 7), max_size=5))
@settings(max_examples=120, deadline=None)
def test_minus_closure_replays_its_rule(pairs, seed, seed_facts):
    cs = ConflictSet(pairs)
    prio = _prio_for(pairs, seed, 0.7)
    dcg = directed_conflict_graph(cs, prio)
    closure = reachable_minus_set(cs, prio, seed_facts)
    assert seed_facts <= closure
    # every non-seed member is justified by the step rule, and the set is closed
    justified = set(seed_facts)
    changed = True
    while changed:
        changed = False
        for a in sorted(justified):
            for b in prio.dominators_of(a):
                for g in dcg.out(b):
                    if g not in justified:
                        justified.add(g)
                        changed = True
    assert closure == frozenset(justified)


@given(pairs=pair_lists, data=st.data())
@settings(max_examples=120, deadline=None)
def test_score_priority_is_score_structured(pairs, data):
    cs = ConflictSet(pairs)
    facts = sorted({f for p in pairs for f in p})
    scores = {f: data.draw(st.integers(1, 4)) for f in facts}
    prio = build_score_priority(cs, scores)
    assert validate_priority(cs, prio) is None
    assert is_score_structured(cs, prio)


def test_instance_rejects_dangling_answer_facts():
    with pytest.raises(ValueError, match="not declared"):
        make_instance([0, 1], [(0, 1)], (), [make_answer("a", [[5]])])


def test_instance_rejects_invalid_priority():
    with pytest.raises(ValueError, match="invalid priority"):
        make_instance([0, 1, 2], [(0, 1)], [(1, 2)])
