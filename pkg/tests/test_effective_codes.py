"""Tree codes, staged presentations, and the difference-code transform.

Oracle layout: Borel-code node meanings are checked against an
independent mask-based set computation; the Hausdorff least-index
semantics against the difference-code evaluator; the F counter and the
alternating tree against hand-worked instances on the cylinder space;
the transform against ground-truth membership oracles on three model
families.
"""

import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hierkit.diff_hierarchy import DiffCode, SearchBudgetExceeded, eval_diff
from hierkit.effective_codes import (
    PI,
    SIGMA,
    BorelCode,
    HausdorffCode,
    StagedPresentation,
    UnionClosureAdapter,
    block_start,
    build_alt_tree,
    claim2_gaps,
    clopen_presentation,
    compute_F,
    effective_hausdorff_transform,
    empty_presentation,
    eval_borel,
    eval_hausdorff_code,
    first_one_presentation,
    hausdorff_from_diff,
    presentation_from_json,
    rows_presentation,
    stage_ladder,
    verify_transform,
    whole_space_index,
)
from hierkit.alt_trees import kb_sorted
from hierkit.finite_space import FinitePoset
from hierkit.ordinals import OMEGA, Ordinal
from hierkit.space_models import (
    CylinderModel,
    CylPoint,
    FinitePosetModel,
    SetPoint,
    pinf_model,
)


def fork_model():
    """Two-element chain plus an isolated point: exactly six basic
    opens, and {2} is clopen."""
    return FinitePosetModel(FinitePoset.from_cover(3, [(0, 1)]))


def cyl_points(model, depth, tails=None):
    tails = tails if tails is not None else range(model.alphabet)
    return [
        CylPoint(p, (c,))
        for p in itertools.product(range(model.alphabet), repeat=depth)
        for c in tails
    ]


def by_index(model):
    return lambda s, x: model.point_in_basic(x, s)


# -- borel codes: node meanings against direct set computation ---------------


def test_bare_root_denotes_nothing():
    m = fork_model()
    code = BorelCode([()])
    assert all(not eval_borel(code, m, SIGMA, x) for x in m.points())
    assert all(eval_borel(code, m, PI, x) for x in m.points())


def test_single_leaf_reads_its_open():
    m = fork_model()
    for label in range(len(m.opens)):
        code = BorelCode([(), (label,)])
        for x in m.points():
            assert eval_borel(code, m, SIGMA, x) == m.point_in_basic(x, label)
            assert eval_borel(code, m, PI, x) != m.point_in_basic(x, label)


def test_rank_two_difference_matches_direct_sets():
    m = fork_model()
    # root children (0, 1): meaning is [[(0)]] \ [[(1)]] = O_3 \ O_1
    code = BorelCode([(), (0,), (1,), (0, 3)])
    assert code.rank() == 2
    expected = m.opens[3] & ~m.opens[1]
    for x in m.points():
        assert eval_borel(code, m, SIGMA, x) == bool((expected >> x) & 1)


def test_unpaired_children_are_rejected():
    with pytest.raises(ValueError, match="difference partner"):
        BorelCode([(), (0,), (0, 2)])
    with pytest.raises(ValueError, match="difference partner"):
        BorelCode([(), (0,), (1,), (2,), (0, 3)])
    # rank-1 nodes union their children freely, no pairing needed
    BorelCode([(), (0,), (3,)])


def test_trees_must_be_prefix_closed():
    with pytest.raises(ValueError, match="prefix closed"):
        BorelCode([(), (0, 1)])


def test_borel_side_names_are_checked():
    with pytest.raises(ValueError, match="side"):
        eval_borel(BorelCode([()]), fork_model(), "both", 0)


def test_borel_json_roundtrip():
    code = BorelCode([(), (0,), (1,), (0, 3)])
    again = BorelCode.from_json(json.loads(json.dumps(code.to_json())))
    assert again == code and hash(again) == hash(code)


def _direct_rank(nodes, node):
    kids = [n for n in nodes if len(n) == len(node) + 1 and n[: len(node)] == node]
    return 0 if not kids else 1 + max(_direct_rank(nodes, k) for k in kids)


def _direct_mask(nodes, node, opens):
    """Independent evaluation: compute whole masks by the four cases."""
    rank = _direct_rank(nodes, node)
    if rank == 0:
        return opens[node[-1]] if node else 0
    labels = sorted(
        n[-1] for n in nodes if len(n) == len(node) + 1 and n[: len(node)] == node
    )
    if rank == 1:
        out = 0
        for c in labels:
            out |= opens[c]
        return out
    out = 0
    for c in labels:
        if c % 2 == 0 and c + 1 in labels:
            out |= _direct_mask(nodes, node + (c,), opens) & ~_direct_mask(
                nodes, node + (c + 1,), opens
            )
    return out


def test_small_codes_match_direct_computation():
    m = fork_model()
    universe = [(a,) for a in range(6)] + [
        (a, b) for a in range(6) for b in range(6)
    ]
    checked = 0
    for size in range(5):
        for extra in itertools.combinations(universe, size):
            nodes = set(extra) | {()}
            if any(n[:-1] not in nodes for n in nodes if n):
                continue
            try:
                code = BorelCode(nodes)
            except ValueError:
                continue
            if code.rank() > 2:
                continue
            want = _direct_mask(nodes, (), m.opens)
            for x in m.points():
                inside = bool((want >> x) & 1)
                assert eval_borel(code, m, SIGMA, x) == inside
                assert eval_borel(code, m, PI, x) == (not inside)
            checked += 1
    # every pairing-valid rank-<=2 shape over six labels
    assert checked == 291


# -- hausdorff codes: least-index semantics -----------------------------------


def test_single_tree_with_even_slot_is_plain_sigma():
    m = fork_model()
    tree = BorelCode([(), (4,)])
    code = HausdorffCode((0,), {0}, (tree,))
    for x in m.points():
        assert eval_hausdorff_code(code, m, x) == eval_borel(tree, m, SIGMA, x)


def test_nested_pair_is_a_proper_difference():
    m = fork_model()
    small, big = 1, 4  # opens {1} inside {1,2}
    code = HausdorffCode(
        (0, 1), {1}, (BorelCode([(), (small,)]), BorelCode([(), (big,)]))
    )
    dcode = DiffCode(2, "D", ((0, small), (1, big)))
    expected = m.opens[big] & ~m.opens[small]
    for x in m.points():
        got = eval_hausdorff_code(code, m, x)
        assert got == bool((expected >> x) & 1)
        assert got == eval_diff(dcode, x, by_index(m))


def test_point_in_no_tree_is_out():
    m = fork_model()
    code = HausdorffCode((0,), {0}, (BorelCode([(), (1,)]),))
    assert not eval_hausdorff_code(code, m, 2)  # 2 outside O_1 = {1}


def test_hausdorff_shape_is_validated():
    tree = BorelCode([()])
    with pytest.raises(ValueError, match="one rank per tree"):
        HausdorffCode((0, 2), {0}, (tree, tree))
    with pytest.raises(ValueError, match="outside the order"):
        HausdorffCode((0,), {3}, (tree,))


def test_hausdorff_json_roundtrip():
    code = HausdorffCode(
        (1, 0), {0}, (BorelCode([(), (2,)]), BorelCode([()]))
    )
    again = HausdorffCode.from_json(json.loads(json.dumps(code.to_json())))
    assert again == code
    assert again.rank_of(1) == 0


# -- translation from difference codes ----------------------------------------


def test_translation_fills_missing_slots_with_dead_trees():
    m = fork_model()
    dcode = DiffCode(3, "D", ((1, 2),))
    h = hausdorff_from_diff(dcode)
    assert len(h.trees) == 3
    for x in m.points():
        assert eval_hausdorff_code(h, m, x) == eval_diff(dcode, x, by_index(m))


def test_co_d_translation_goes_through_the_carrier():
    m = fork_model()
    dcode = DiffCode(2, "co-D", ((0, 1), (1, 4)))
    with pytest.raises(ValueError, match="whole-space"):
        hausdorff_from_diff(dcode)
    h = hausdorff_from_diff(dcode, carrier_index=len(m.opens) - 1)
    for x in m.points():
        assert eval_hausdorff_code(h, m, x) == eval_diff(dcode, x, by_index(m))


def test_translation_needs_a_finite_order():
    with pytest.raises(ValueError, match="finite"):
        hausdorff_from_diff(DiffCode(OMEGA, "D", ((0, 1),)))


@settings(deadline=None, max_examples=120)
@given(
    alpha=st.integers(min_value=1, max_value=6),
    picks=st.lists(st.integers(min_value=0, max_value=5), max_size=6, unique=True),
    handles=st.lists(st.integers(min_value=0, max_value=5), min_size=6, max_size=6),
    polarity=st.sampled_from(["D", "co-D"]),
)
def test_translation_agrees_with_diff_evaluation(alpha, picks, handles, polarity):
    m = fork_model()
    entries = tuple(
        (i, handles[i]) for i in sorted(p for p in picks if p < alpha)
    )
    dcode = DiffCode(alpha, polarity, entries)
    h = hausdorff_from_diff(dcode, carrier_index=len(m.opens) - 1)
    for x in m.points():
        assert eval_hausdorff_code(h, m, x) == eval_diff(dcode, x, by_index(m))


# -- staged presentations ------------------------------------------------------


def test_rows_may_only_grow_with_the_stage():
    shrinking = StagedPresentation(lambda eps, n, t: (1,) if t < 8 else ())
    assert shrinking.row(1, 0, 5) == (1,)
    with pytest.raises(ValueError, match="shrank"):
        shrinking.row(1, 0, 9)
    # asking about an earlier stage may not un-enumerate the index either
    forgetful = StagedPresentation(lambda eps, n, t: (1,) if t == 9 else ())
    assert forgetful.row(0, 2, 9) == (1,)
    with pytest.raises(ValueError, match="shrank"):
        forgetful.row(0, 2, 20)
    fine = StagedPresentation(lambda eps, n, t: (1,) if t >= 8 else ())
    assert fine.row(0, 2, 3) == ()
    assert fine.row(0, 2, 9) == (1,)


def test_visibility_truncates_rows():
    pres = StagedPresentation(lambda eps, n, t: (1 << 10,))
    assert pres.row(1, 0, 5) == ()
    assert pres.row(1, 0, 11) == (1 << 10,)


def test_sides_are_binary():
    with pytest.raises(ValueError, match="side"):
        StagedPresentation(lambda eps, n, t: ()).row(2, 0, 1)


def test_clopen_presentation_is_stable_on_all_points():
    m = fork_model()
    pres = clopen_presentation(m, m.index_of(0b100), m.index_of(0b011))
    report = pres.check_points(m, m.points(), depth=4, stage=8)
    assert set(report.values()) == {"stable"}


def test_first_one_presentation_is_stable_at_finite_resolution():
    c3 = CylinderModel(3)
    pres = first_one_presentation(c3)
    pts = [
        CylPoint((1,), (0,)),
        CylPoint((2,), (0,)),
        CylPoint((0, 1), (1,)),
        CylPoint((0, 2), (2,)),
        CylPoint((), (0,)),
    ]
    report = pres.check_points(c3, pts, depth=4, stage=32)
    assert set(report.values()) == {"stable"}
    assert pres.member(CylPoint((0, 0), (1,)))
    assert not pres.member(CylPoint((0, 2), (1,)))
    assert not pres.member(CylPoint((), (0,)))


def test_presentation_json_roundtrip():
    m = fork_model()
    pres = rows_presentation(m, [[2], [2, 4]], [[3]], tail="empty")
    again = presentation_from_json(m, json.loads(json.dumps(pres.to_json())))
    for eps, n, t in itertools.product((0, 1), range(4), (4, 8)):
        assert pres.row(eps, n, t) == again.row(eps, n, t)
    anonymous = StagedPresentation(lambda eps, n, t: ())
    with pytest.raises(ValueError, match="serial form"):
        anonymous.to_json()
    with pytest.raises(ValueError, match="unknown presentation"):
        presentation_from_json(m, {"kind": "mystery"})


def test_tail_modes_differ_past_the_list():
    m = fork_model()
    repeat = rows_presentation(m, [[2]], [[3]])
    empty = rows_presentation(m, [[2]], [[3]], tail="empty")
    assert repeat.row(1, 7, 8) == (2,)
    assert empty.row(1, 7, 8) == ()


# -- the F counter -------------------------------------------------------------


def test_zero_stage_never_counts():
    c3 = CylinderModel(3)
    pres = first_one_presentation(c3)
    assert compute_F(c3.singleton((1,)), 0, 1, pres, c3) == 0


def test_constant_rows_count_every_stage():
    c3 = CylinderModel(3)
    pres = rows_presentation(
        c3,
        [[c3.singleton((1,))]],
        [[c3.singleton((0,)), c3.singleton((2,))]],
    )
    sub = c3.singleton((1, 0))  # a sub-cylinder of [1]
    assert compute_F(sub, 10, 1, pres, c3) == 10
    assert compute_F(c3.singleton((1,)), 12, 1, pres, c3) == 12


def test_failing_first_containment_stays_at_zero():
    c3 = CylinderModel(3)
    pres = rows_presentation(
        c3,
        [[c3.singleton((1,))]],
        [[c3.singleton((0,)), c3.singleton((2,))]],
    )
    assert compute_F(c3.singleton((2,)), 10, 1, pres, c3) == 0


def test_invisible_index_counts_nothing():
    c3 = CylinderModel(3)
    pres = rows_presentation(c3, [[c3.singleton((1,))]], [[c3.singleton((0,))]])
    sub = c3.singleton((1, 0))  # needs 9 bits
    assert compute_F(sub, 4, 1, pres, c3) == 0
    assert compute_F(sub, 10, 1, pres, c3) == 10


# -- the alternating tree -------------------------------------------------------


def test_clopen_tree_is_flat_with_hand_types():
    m = fork_model()
    pres = clopen_presentation(m, m.index_of(0b100), m.index_of(0b011))
    tree = build_alt_tree(pres, m, 8)
    assert tree.stages == (1, 2, 4, 8)
    # {1} and {0,1} sit inside the complement, {2} inside the set;
    # {1,2} and the whole space straddle both, so they never type
    expected = {}
    for t in (2, 4, 8):
        expected[((1, t),)] = 0
        expected[((2, t),)] = 1
        expected[((3, t),)] = 0
    assert {seq: eps for seq, (eps, _, _) in tree.nodes.items()} == expected
    assert tree.growth_violations == ()
    assert tree.frontier == {((1, 8),), ((2, 8),), ((3, 8),)}
    assert tree.wf().rank() == 1


def test_empty_set_grows_no_type_one_nodes():
    cm = CylinderModel(2)
    tree = build_alt_tree(empty_presentation(cm), cm, 8)
    assert tree.nodes
    assert all(eps == 0 for eps, _, _ in tree.nodes.values())
    assert all(len(seq) == 1 for seq in tree.nodes)


def test_first_one_tree_matches_hand_analysis():
    c3 = CylinderModel(3)
    pres = first_one_presentation(c3)
    tree = build_alt_tree(pres, c3, 16)
    whole = c3.singleton(())
    one = c3.singleton((1,))
    two = c3.singleton((2,))
    # the whole space types 0 immediately: its own side-0 row contains
    # it, while the side-1 union never swallows the 2-branch
    assert tree.nodes[((whole, 1),)][0] == 0
    # [1] types 1 as soon as it becomes visible (stage 4 on the ladder)
    assert tree.nodes[((one, 4),)][0] == 1
    # [2] sits inside every complement row: type 0 forever
    assert tree.nodes[((two, 4),)][0] == 0
    # alternation: the deep branch through the whole space reaches [1]
    assert ((whole, 1), (one, 4)) in tree.nodes
    # nothing inside the set's own union can flip back to type 0
    for seq, (eps, _, _) in tree.nodes.items():
        assert len(seq) <= 2
        if len(seq) == 2:
            assert eps == 1
        f0, f1 = tree.nodes[seq][1:]
        assert f0 != f1 and eps == (1 if f1 > f0 else 0)
    assert tree.growth_violations == ()


def test_node_budget_is_enforced():
    c3 = CylinderModel(3)
    with pytest.raises(SearchBudgetExceeded, match="alternating tree"):
        build_alt_tree(first_one_presentation(c3), c3, 32, node_cap=10)


def test_frontier_marks_leaves_at_the_last_stage():
    c3 = CylinderModel(3)
    tree = build_alt_tree(first_one_presentation(c3), c3, 16)
    leaves = set(tree.leaves())
    assert tree.frontier
    for seq in tree.frontier:
        assert seq in leaves and seq[-1][1] == 16


def test_stage_ladder_shape():
    assert stage_ladder(1) == (1,)
    assert stage_ladder(8) == (1, 2, 4, 8)
    assert stage_ladder(100) == (1, 2, 4, 8, 16, 32, 64, 100)
    with pytest.raises(ValueError):
        stage_ladder(0)


# -- block ranks ---------------------------------------------------------------


def test_block_starts_collapse_to_omega_r_plus_two():
    assert block_start(0) == Ordinal.from_int(0)
    assert block_start(1) == OMEGA + Ordinal.from_int(2)
    assert block_start(3) == Ordinal.omega(1, 3) + Ordinal.from_int(2)
    for r in range(5):
        start = block_start(r)
        assert (start + OMEGA).parity() == 0
        assert (start + OMEGA + Ordinal.from_int(1)).parity() == 1


def test_kb_order_on_pair_sequences():
    a = ((1, 1), (4, 2))
    b = ((1, 1),)
    c = ((1, 2),)
    assert kb_sorted([(), b, a, c]) == [a, b, c, ()]


# -- the transform --------------------------------------------------------------


def test_clopen_transform_denotes_the_set():
    m = fork_model()
    pres = clopen_presentation(m, m.index_of(0b100), m.index_of(0b011))
    res = effective_hausdorff_transform(pres, m, 8)
    assert res.xi == Ordinal.omega(1, 10) + Ordinal.from_int(2)
    for x in m.points():
        want = x == 2
        assert res.eval_point(m, x) == want
        assert eval_diff(res.diff_code, x, by_index(m)) == want
        assert eval_hausdorff_code(res.hausdorff, m, x) == want
    assert claim2_gaps(res, m, m.points(), member=pres.member) == []


def test_empty_transform_denotes_nothing():
    cm = CylinderModel(2)
    res = effective_hausdorff_transform(empty_presentation(cm), cm, 8)
    pts = [CylPoint((), (0,)), CylPoint((1,), (0,)), CylPoint((0, 1), (1,))]
    assert all(not res.eval_point(cm, x) for x in pts)
    assert all(not eval_hausdorff_code(res.hausdorff, cm, x) for x in pts)


def test_whole_space_transform_denotes_everything():
    m = fork_model()
    pres = clopen_presentation(m, whole_space_index(m), 0)
    res = effective_hausdorff_transform(pres, m, 8)
    assert all(res.eval_point(m, x) for x in m.points())


def test_first_one_transform_verifies_to_depth_three():
    c3 = CylinderModel(3)
    pres = first_one_presentation(c3)
    rep = verify_transform(pres, c3, cyl_points(c3, 3), budget=8, max_budget=64)
    assert rep.ok() and rep.mismatches == ()
    assert rep.budgets[0] == 8 and rep.budgets[-1] <= 64
    res = rep.result
    # slot parity carries the type, and ranks strictly ascend
    for s in res.slots:
        assert s.rank.parity() == s.eps
    assert all(a.rank < b.rank for a, b in zip(res.slots, res.slots[1:]))
    assert res.kb_order[-1] == ()
    assert claim2_gaps(res, c3, cyl_points(c3, 3), member=pres.member) == []


def test_starved_transform_reports_incomplete():
    c3 = CylinderModel(3)
    pres = first_one_presentation(c3)
    rep = verify_transform(pres, c3, cyl_points(c3, 3), budget=2, max_budget=4)
    assert not rep.ok()
    assert rep.status == "INCOMPLETE"
    assert rep.mismatches
    assert rep.budgets == (2, 4)
    assert rep.result is not None


def test_verification_needs_an_oracle():
    cm = CylinderModel(2)
    pres = rows_presentation(cm, [[cm.singleton((1,))]], [[cm.singleton((0,))]])
    with pytest.raises(ValueError, match="oracle"):
        verify_transform(pres, cm, [CylPoint((0,), (0,))], budget=4)


@settings(deadline=None, max_examples=40)
@given(
    rows1=st.lists(
        st.lists(st.integers(min_value=0, max_value=11), max_size=2), max_size=2
    ),
    rows0=st.lists(
        st.lists(st.integers(min_value=0, max_value=11), max_size=2), max_size=2
    ),
)
def test_renderings_always_agree(rows1, rows0):
    cm = CylinderModel(2)
    pres = rows_presentation(
        cm,
        [[1 << c for c in row] for row in rows1],
        [[1 << c for c in row] for row in rows0],
    )
    res = effective_hausdorff_transform(pres, cm, 12)
    for x in cyl_points(cm, 3):
        direct = res.eval_point(cm, x)
        assert direct == eval_diff(res.diff_code, x, by_index(cm))
        assert direct == eval_hausdorff_code(res.hausdorff, cm, x)


def test_transform_is_deterministic():
    c3 = CylinderModel(3)
    one = effective_hausdorff_transform(first_one_presentation(c3), c3, 16)
    two = effective_hausdorff_transform(first_one_presentation(c3), c3, 16)
    assert json.dumps(one.to_json()) == json.dumps(two.to_json())


def test_adapter_carries_union_free_bases_through_the_pipeline():
    ad = UnionClosureAdapter(pinf_model())
    assert ad.lam([1 << 1, 1 << 2]) == (1 << 1) | (1 << 2)
    assert ad.point_in_basic(SetPoint(frozenset({0, 2})), 1 << 1)
    assert ad.basic_subset(1 << 3, (1 << 1) | (1 << 3))
    assert not ad.basic_nonempty(0)
    pts = [
        SetPoint(frozenset()),
        SetPoint(frozenset({0})),
        SetPoint(frozenset({1, 2}), cofinite_from=5),
    ]
    nothing = effective_hausdorff_transform(empty_presentation(ad), ad, 6)
    assert all(not nothing.eval_point(ad, x) for x in pts)
    everything = effective_hausdorff_transform(
        clopen_presentation(ad, whole_space_index(ad), 0), ad, 6
    )
    assert all(everything.eval_point(ad, x) for x in pts)
