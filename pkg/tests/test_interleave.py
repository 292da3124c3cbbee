from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from keythread.errors import (
    BadTemplate,
    DuplicateIndex,
    EmptyKeyframes,
    IndexOutOfRange,
    MissingCaption,
    NegativeIndex,
)
from keythread.interleave import (
    Layout,
    Scope,
    ThreadBudget,
    narrative_count,
    render_plan,
    solve_delta,
    thread,
)
from keythread.store import CaptionSet


def caps_for(indices) -> CaptionSet:
    return CaptionSet({t: f"caption {t}" for t in indices})


ALL_CAPS = caps_for(range(600))


def item_kinds(plan):
    return [(it.kind, it.t) for it in plan.items]


def test_solve_delta_two_keyframes():
    # stride 10 yields exactly 3 slots (20, 30, 40); stride 9 yields 4
    assert narrative_count([10, 50], 10, Scope.BETWEEN_KEYFRAMES) == 3
    assert narrative_count([10, 50], 9, Scope.BETWEEN_KEYFRAMES) == 4
    assert solve_delta([10, 50], 3) == 10


def test_solve_delta_zero_budget_sentinel():
    assert solve_delta([10, 50], 0) is None


def test_solve_delta_floor_of_one():
    assert solve_delta([0, 7], 100) == 1


def test_solve_delta_minimality_on_samples():
    for ys, budget in [([3, 40, 200], 7), ([0, 499], 25), ([10, 20, 30, 400], 50)]:
        d = solve_delta(ys, budget)
        assert narrative_count(ys, d, Scope.BETWEEN_KEYFRAMES) <= budget
        if d > 1:
            assert narrative_count(ys, d - 1, Scope.BETWEEN_KEYFRAMES) > budget


def test_solve_delta_validates_input():
    with pytest.raises(EmptyKeyframes):
        solve_delta([], 5)
    with pytest.raises(ValueError):
        solve_delta([1, 2], -1)
    with pytest.raises(NegativeIndex):
        solve_delta([-3, 2], 5)
    with pytest.raises(DuplicateIndex):
        solve_delta([2, 2], 5)


def test_thread_expands_stride_pattern():
    plan = thread([10, 50], ALL_CAPS, ThreadBudget(total_narratives=3))
    assert plan.delta == 10
    assert item_kinds(plan) == [
        ("frame", 10),
        ("narrative", 20),
        ("narrative", 30),
        ("narrative", 40),
        ("frame", 50),
    ]
    assert plan.items[1].text == "caption 20"


def test_thread_single_keyframe_has_no_narratives():
    plan = thread([7], ALL_CAPS)
    assert item_kinds(plan) == [("frame", 7)]
    assert plan.delta is None


def test_thread_default_budget_210_over_seven_gaps():
    ys = [0, 80, 160, 240, 320, 400, 480, 560]
    plan = thread(ys, ALL_CAPS)
    narratives = [it for it in plan.items if it.kind == "narrative"]
    assert len(narratives) <= 210
    assert [it.t for it in plan.items if it.kind == "frame"] == ys


def test_thread_zero_budget():
    plan = thread([10, 50], ALL_CAPS, ThreadBudget(total_narratives=0))
    assert item_kinds(plan) == [("frame", 10), ("frame", 50)]
    assert plan.delta is None


def test_thread_forced_delta_overrides_solved():
    plan = thread([10, 50], ALL_CAPS, ThreadBudget(total_narratives=210, delta=20))
    assert plan.delta == 20
    assert [it.t for it in plan.items if it.kind == "narrative"] == [30]


def test_thread_forced_delta_truncates_to_budget_in_temporal_order():
    plan = thread([0, 30], ALL_CAPS, ThreadBudget(total_narratives=3, delta=1))
    assert [it.t for it in plan.items if it.kind == "narrative"] == [1, 2, 3]


def test_thread_full_scope_adds_prefix_and_suffix():
    # stride 10 gives 3 between-slots plus one prefix and one suffix slot
    plan = thread(
        [10, 50], ALL_CAPS, ThreadBudget(total_narratives=5),
        scope=Scope.FULL_VIDEO, n_frames=61,
    )
    assert plan.delta == 10
    assert item_kinds(plan) == [
        ("narrative", 0),
        ("frame", 10),
        ("narrative", 20),
        ("narrative", 30),
        ("narrative", 40),
        ("frame", 50),
        ("narrative", 60),
    ]


def test_thread_full_scope_requires_n_frames():
    with pytest.raises(ValueError):
        thread([1, 5], ALL_CAPS, scope=Scope.FULL_VIDEO)
    with pytest.raises(IndexOutOfRange):
        thread([1, 80], ALL_CAPS, scope=Scope.FULL_VIDEO, n_frames=50)


def test_thread_missing_caption_is_loud():
    with pytest.raises(MissingCaption):
        thread([10, 50], caps_for([20, 30]), ThreadBudget(total_narratives=3))


def test_thread_layout_blocks():
    kf = thread([10, 50], ALL_CAPS, ThreadBudget(total_narratives=2),
                layout=Layout.KEYFRAMES_FIRST)
    kinds = [it.kind for it in kf.items]
    assert kinds == ["frame", "frame", "narrative", "narrative"]
    nf = thread([10, 50], ALL_CAPS, ThreadBudget(total_narratives=2),
                layout=Layout.NARRATIVES_FIRST)
    assert [it.kind for it in nf.items] == ["narrative", "narrative", "frame", "frame"]
    # blocks stay timestamp-sorted internally
    assert [it.t for it in nf.items if it.kind == "narrative"] == sorted(
        it.t for it in nf.items if it.kind == "narrative"
    )


def test_thread_unsorted_input_is_sorted():
    plan = thread([50, 10], ALL_CAPS, ThreadBudget(total_narratives=0))
    assert item_kinds(plan) == [("frame", 10), ("frame", 50)]


def test_plan_to_dict_schema():
    plan = thread([10, 50], ALL_CAPS, ThreadBudget(total_narratives=3))
    d = plan.to_dict()
    assert d["scope"] == "between" and d["layout"] == "interleaved"
    assert d["delta"] == 10
    assert d["items"][0] == {"type": "frame", "t": 10}
    assert d["items"][1] == {"type": "narrative", "t": 20, "text": "caption 20"}


def test_render_frame_and_narrative_lines():
    plan = thread([10], caps_for([]), ThreadBudget(total_narratives=0))
    plan.items.append(type(plan.items[0])("narrative", 20, "a dog runs"))
    assert render_plan(plan, "<frame:{t}>") == "<frame:10>\n[t=20] a dog runs\n"


def test_render_single_frame_plan():
    plan = thread([4], caps_for([]))
    assert render_plan(plan, "<frame:{t}>") == "<frame:4>\n"


def test_render_keyframes_first_blocks():
    plan = thread([10, 50], ALL_CAPS, ThreadBudget(total_narratives=2),
                  layout=Layout.KEYFRAMES_FIRST)
    text = render_plan(plan, "F{t}")
    frame_part, narrative_part = text.split("[", 1)
    assert frame_part == "F10\nF50\n"
    assert narrative_part.startswith("t=")


def test_render_rejects_bad_templates():
    plan = thread([4], caps_for([]))
    with pytest.raises(BadTemplate):
        render_plan(plan, "<frame>")
    with pytest.raises(BadTemplate):
        render_plan(plan, "<frame:{t}{other}>")


keyframe_sets = st.lists(st.integers(0, 500), min_size=1, max_size=9, unique=True)


@settings(max_examples=120, deadline=None)
@given(keyframe_sets, st.integers(0, 60))
def test_threading_invariants(ys, budget):
    """Budget compliance, stride minimality, temporal order, stride-pattern
    membership, multiset equality across layouts, and keyframe exclusivity."""
    plan = thread(ys, ALL_CAPS, ThreadBudget(total_narratives=budget))
    ys_sorted = sorted(ys)
    narratives = [it for it in plan.items if it.kind == "narrative"]
    frames = [it.t for it in plan.items if it.kind == "frame"]
    assert frames == ys_sorted
    assert len(narratives) <= budget
    ts = [it.t for it in plan.items]
    assert ts == sorted(ts) and len(set(ts)) == len(ts)
    assert not set(it.t for it in narratives) & set(ys_sorted)
    if plan.delta is not None:
        if plan.delta > 1:
            assert narrative_count(ys_sorted, plan.delta - 1,
                                   Scope.BETWEEN_KEYFRAMES) > budget
        for it in narratives:
            left = max(y for y in ys_sorted if y < it.t)
            right = min(y for y in ys_sorted if y > it.t)
            assert (it.t - left) % plan.delta == 0
            assert it.t < right
    for layout in (Layout.NARRATIVES_FIRST, Layout.KEYFRAMES_FIRST):
        other = thread(ys, ALL_CAPS, ThreadBudget(total_narratives=budget),
                       layout=layout)
        assert sorted((it.kind, it.t) for it in other.items) == sorted(
            (it.kind, it.t) for it in plan.items
        )


@settings(max_examples=60, deadline=None)
@given(keyframe_sets, st.integers(1, 40), st.integers(0, 80))
def test_full_scope_invariants(ys, budget, extra):
    n = max(ys) + 1 + extra
    plan = thread(ys, ALL_CAPS, ThreadBudget(total_narratives=budget),
                  scope=Scope.FULL_VIDEO, n_frames=n)
    narratives = [it for it in plan.items if it.kind == "narrative"]
    assert len(narratives) <= budget
    ts = [it.t for it in plan.items]
    assert ts == sorted(ts) and len(set(ts)) == len(ts)
    assert all(0 <= t < n for t in ts)
    if plan.delta is not None:
        ys_sorted = sorted(ys)
        for it in narratives:
            if it.t < ys_sorted[0]:
                # prefix slots anchor at the first keyframe counting down
                assert (ys_sorted[0] - it.t) % plan.delta == 0
            elif it.t > ys_sorted[-1]:
                assert (it.t - ys_sorted[-1]) % plan.delta == 0
