import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arglts.aaf import AAF, enumerate_complete_labellings
from arglts.adl import Sequence, Setting, Trace, is_quiescent, run
from arglts.analysis import (
    associated_graph,
    associated_labelling,
    atlas,
    check_correctness,
    final_labelling,
    is_sigma_c_state,
    is_sigma_s_state,
    ordered_partitions,
    present_arguments,
    random_ordered_partition,
    state_report,
    synthesize_sequence,
)
from arglts.errors import CapacityError, DomainError, IntegrityError
from arglts.transform import build_base_context, build_context, build_lelu_context, can_attack, enunciate, is_in, is_out, last, present

from conftest import EX1, L1, L2, L3, aafs, aaf_and_order, lab


def seq_of(*groups):
    return Sequence(frozenset((enunciate(x), r) for r, g in enumerate(groups) for x in g))


def status_state(af, kind="base", **args):
    ctx = build_context(af, kind)
    upd = {}
    for x, st_ in args.items():
        upd[present(x)] = True
        upd[is_in(x)] = st_ == "IN"
        upd[is_out(x)] = st_ == "OUT"
    return ctx.initial_state.replace(upd)


class TestPredicates:
    def test_initial_is_argumentative(self):
        s = build_base_context(EX1).initial_state
        assert is_sigma_c_state(s) and is_sigma_s_state(s) and present_arguments(s) == []

    def test_undecided_two_cycle(self, two_cycle):
        s = status_state(two_cycle, a="UNDEC", b="UNDEC")
        assert is_sigma_c_state(s) and not is_sigma_s_state(s)

    def test_stable_two_cycle(self, two_cycle):
        s = status_state(two_cycle, a="IN", b="OUT")
        assert is_sigma_c_state(s) and is_sigma_s_state(s)

    def test_both_in_is_not(self, two_cycle):
        assert not is_sigma_c_state(status_state(two_cycle, a="IN", b="IN"))

    def test_lelu_flag_blocks(self, two_cycle):
        s = status_state(two_cycle, "lelu", a="IN", b="OUT").replace({last("a"): True})
        assert not is_sigma_c_state(s)

    def test_ignores_absent_attacker(self, two_cycle):
        assert is_sigma_c_state(status_state(two_cycle, a="IN"))


class TestViews:
    def test_associated_labelling(self):
        s = status_state(EX1, a="IN", b="OUT", c="UNDEC")
        assert associated_labelling(s) == lab("a", "b", "c")

    def test_in_and_out_raises(self, two_cycle):
        s = status_state(two_cycle, a="IN").replace({is_out("a"): True})
        with pytest.raises(IntegrityError):
            associated_labelling(s)

    def test_associated_graph(self):
        s = status_state(EX1, a="IN", c="OUT", d="IN").replace({can_attack("a", "c"): False})
        g = associated_graph(s, EX1)
        assert g.arguments == ("a", "c", "d") and g.attacks == {("c", "d")}

    def test_state_report(self, two_cycle):
        r = state_report(status_state(two_cycle, a="IN", b="OUT"), two_cycle, 3)
        assert r.time == 3 and r.is_sigma_s and r.labelling == lab("a", "b")


class TestCorrectness:
    def test_lelu_run_ok(self, ex1):
        tr = run(Setting(seq_of("bc", "ad"), build_lelu_context(ex1)))
        rep = check_correctness(tr, ex1)
        assert rep.ok and rep.checked == list(tr.argumentative_marks)
        assert associated_labelling(tr.final_state) == L1

    def test_flipped_out_flag_detected(self, ex1):
        tr = run(Setting(seq_of("bc", "ad"), build_lelu_context(ex1)))
        broken = tr.final_state.replace({is_out("c"): False})
        bad = Trace(tr.states[:-1] + (broken,), tr.event_sets, tr.argumentative_marks)
        rep = check_correctness(bad, ex1)
        assert not rep.ok and rep.violation[0] == len(tr.states) - 1
        assert rep.as_dict()["violation"]["t"] == rep.violation[0]


class TestSynthesis:
    @pytest.mark.parametrize("target", [L1, L2, L3], ids=["L1", "L2", "L3"])
    def test_example_targets(self, ex1, target):
        seq = synthesize_sequence(ex1, target)
        assert final_labelling(ex1, _groups(seq), "lelu") == target

    def test_rank_layout(self, ex1):
        assert _groups(synthesize_sequence(ex1, L1)) == [["b", "c"], ["a", "d"]]
        assert _groups(synthesize_sequence(ex1, L3)) == [["a", "b", "c", "d"]]

    def test_rejects_non_complete(self, ex1):
        with pytest.raises(DomainError):
            synthesize_sequence(ex1, lab("a", u="bcd"))

    @settings(max_examples=40, deadline=None)
    @given(af=aafs(max_args=5))
    def test_every_complete_labelling_reachable(self, af):
        for target in enumerate_complete_labellings(af):
            synthesize_sequence(af, target, verify=True)


def _groups(seq):
    return [sorted(a.args[0] for a in g) for g in seq.rank_groups()]


class TestOrders:
    def test_ordered_partition_counts(self):
        # ordered Bell numbers
        assert [sum(1 for _ in ordered_partitions(list("abcdef"[:n]))) for n in range(6)] == [1, 1, 3, 13, 75, 541]

    def test_random_partition_covers(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            order = random_ordered_partition(list("abcde"), rng)
            assert sorted(x for b in order for x in b) == list("abcde")
            assert all(b for b in order)


class TestAtlas:
    def test_base_example_all_undecided(self, ex1):
        at = atlas(ex1, "base")
        assert len(at.entries) == 75 and at.image() == {L3}

    def test_lelu_example_reaches_all(self, ex1):
        at = atlas(ex1, "lelu")
        assert {L1, L2, L3} <= at.image()
        assert at.image() <= set(enumerate_complete_labellings(ex1))

    def test_capacity(self):
        with pytest.raises(CapacityError):
            atlas(AAF.build("abcdefg", []), "base")

    def test_sampled(self, ex1):
        at = atlas(ex1, "lelu", ("sampled", 20, 1))
        assert 0 < len(at.entries) <= 20

    def test_bad_enumeration(self, ex1):
        with pytest.raises(DomainError):
            atlas(ex1, "base", "some-orders")

    def test_base_misses_complete_labellings(self, ex1):
        # base outcome set is strictly smaller than the complete labellings here
        assert atlas(ex1, "base").image() < set(enumerate_complete_labellings(ex1))


@pytest.mark.parametrize("kind", ["base", "lelu"])
@settings(max_examples=40, deadline=None)
@given(inst=aaf_and_order(max_args=5))
def test_quiescent_iff_argumentative(kind, inst):
    af, order = inst
    ctx = build_context(af, kind)
    for s in run(Setting(seq_of(*order), ctx)).states:
        assert is_quiescent(ctx, s) == is_sigma_c_state(s)


@pytest.mark.parametrize("kind", ["base", "lelu"])
@settings(max_examples=40, deadline=None)
@given(inst=aaf_and_order(max_args=5))
def test_presence_is_monotone(kind, inst):
    af, order = inst
    tr = run(Setting(seq_of(*order), build_context(af, kind)))
    seen = set()
    for s in tr.states:
        now = set(present_arguments(s))
        assert seen <= now
        seen = now


@pytest.mark.parametrize("kind", ["base", "lelu"])
@settings(max_examples=40, deadline=None)
@given(inst=aaf_and_order(max_args=5))
def test_final_labelling_complete(kind, inst):
    af, order = inst
    tr = run(Setting(seq_of(*order), build_context(af, kind)))
    assert check_correctness(tr, af).ok
    assert associated_labelling(tr.final_state) in enumerate_complete_labellings(af)
