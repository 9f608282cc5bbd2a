"""Model-layer tests.

Documented oracle values come first: the closed form of the P_inf
relation, clause-row bookkeeping on tiny hand-checked systems, and the
Baire construction on cylinder spaces.  Property tests then confirm the
approximation-relation conditions on every shipped model.
"""

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hierkit.finite_space import FinitePoset
from hierkit.space_models import (
    INF,
    NOT_A_CLAUSE,
    SOLVED,
    UNKNOWN,
    UNSOLVED_CLAUSE,
    BaireResult,
    ClauseSystem,
    CylinderModel,
    CylPoint,
    FinitePosetModel,
    PSpaceModel,
    SetPoint,
    baire_witness,
    check_approx_conditions,
    index_visible,
    lift_relation,
    model_from_json,
    pinf_ll,
    pinf_model,
    pn_model,
    point_from_json,
    staged_ll,
)

# -- oracles ----------------------------------------------------------------


def test_pinf_rows_always_clauses_solved_iff_max_reaches():
    m = pinf_model()
    for a in ({0}, {0, 3}, {2, 5}, set()):
        i = m.index_of(a)
        top = max(a, default=-1)
        for n in range(8):
            st_ = m.clause_status(i, n)
            assert st_ != NOT_A_CLAUSE
            assert (st_ == SOLVED) == (n <= top)
        assert m.n_u(i) == top + 1


def test_finite_row_clause_status():
    sys_ = ClauseSystem([({0}, [{1}])])
    m = PSpaceModel(sys_)
    assert m.clause_status(m.index_of({2}), 0) == NOT_A_CLAUSE
    assert m.clause_status(m.index_of({0, 1}), 0) == SOLVED
    assert m.clause_status(m.index_of({0}), 0) == UNSOLVED_CLAUSE
    assert m.n_u(m.index_of({0})) == 0
    assert m.n_u(m.index_of({2})) == INF


def test_pinf_ll_documented_pairs():
    m = pinf_model()
    assert m.ll(m.index_of({0}), m.index_of({0, 3}))
    assert not m.ll(m.index_of({2}), m.index_of({2}))
    # failing containment kills the relation regardless of clauses
    assert not m.ll(m.index_of({0, 1}), m.index_of({0}))
    # max(empty) = -1: the empty cone sits below any inhabited one
    assert m.ll(m.index_of(set()), m.index_of({0}))


def test_pinf_generic_clause_ll_matches_closed_form():
    m = pinf_model()
    for a in range(128):
        for b in range(128):
            assert m.ll(a, b) == pinf_ll(m.descriptor(a), m.descriptor(b))


def test_pn_ll_is_containment():
    # descriptors grow, cones shrink: O_b <= O_a iff a's bits sit in b
    m = pn_model()
    for a in range(32):
        for b in range(32):
            assert m.ll(a, b) == (a | b == b)


def test_refine_witness_follows_least_unsolved_clause():
    m = pinf_model()
    x = SetPoint({0, 5}, cofinite_from=6)
    v = m.refine_witness(x, m.index_of({0}))
    assert m.descriptor(v) == {0, 5}
    assert m.ll(m.index_of({0}), v)
    # nothing unsolved: the open itself comes back
    pn = pn_model()
    assert pn.refine_witness(SetPoint({1}), pn.index_of({1})) == pn.index_of({1})
    with pytest.raises(ValueError):
        m.refine_witness(SetPoint({7}), m.index_of({0}))  # not in the open
    with pytest.raises(ValueError):
        # finite point: not actually in the presented subspace
        m.refine_witness(SetPoint({0}), m.index_of({0}))


def test_chain_limit_pinf_and_pn():
    m = pinf_model()
    chain = [m.index_of(set()), m.index_of({0}), m.index_of({0, 1})]
    x = m.chain_limit(chain)
    assert x.includes({0, 1}) and x.cofinite_from is not None
    assert all(m.point_in_basic(x, i) for i in chain)
    pn = pn_model()
    const = [pn.index_of({3, 4})] * 3
    y = pn.chain_limit(const)
    assert y == SetPoint({3, 4})


def test_chain_limit_rejects_bad_chains():
    m = pinf_model()
    with pytest.raises(ValueError, match="step 1"):
        m.chain_limit([m.index_of(set()), m.index_of({0}), m.index_of({0})])
    sys_ = ClauseSystem([({0}, [{1}])])
    s = PSpaceModel(sys_)
    with pytest.raises(ValueError, match="clause 0"):
        # the union point {0} triggers the row but misses its witness
        s.chain_limit([s.index_of(set()), s.index_of({0})])


def test_pn_chain_converges_to_union_neighborhoods():
    # the union point's own cone refines every member: convergence in
    # the strong sense, not just membership
    m = pn_model()
    chain = [m.index_of(set()), m.index_of({1}), m.index_of({1, 4})]
    union = 0
    for i in chain:
        union |= i
    assert all(m.basic_subset(union, i) for i in chain)


# -- lift -------------------------------------------------------------------


def test_lift_same_basis_contains_original():
    m = pinf_model()
    pool = list(range(32))
    for a in range(16):
        for b in range(16):
            if m.ll(a, b):
                assert lift_relation(m, a, b, pool) is True


def test_lift_to_coarser_basis_keeps_first_conditions():
    m = pinf_model()
    pool = list(range(32))
    coarse = [i for i in range(32) if len(m.descriptor(i)) % 2 == 0]
    lifted = {}
    for c in coarse[:16]:
        for d in coarse[:16]:
            lifted[c, d] = lift_relation(m, c, d, pool) is True
    for (c, d), holds in lifted.items():
        if holds:
            assert m.basic_subset(d, c)  # condition (1)
    for c in coarse[:16]:
        for t in coarse[:16]:
            if not m.basic_subset(c, t):
                continue
            for d in coarse[:16]:
                if lifted[c, d]:
                    assert lifted[t, d]  # condition (2)


def test_lift_exhausted_pool():
    m = pinf_model()
    assert lift_relation(m, 1, 3, [], exhaustive=True) is False
    assert lift_relation(m, 1, 3, []) == UNKNOWN


# -- staging ----------------------------------------------------------------

def test_staged_relation_grows_with_t():
    m = CylinderModel(2)
    idx = [m.singleton(w) for w in [(), (0,), (1,), (0, 1), (1, 0, 1)]]
    for t in range(12):
        for i in idx:
            for j in idx:
                if staged_ll(m, i, j, t):
                    assert staged_ll(m, i, j, t + 1)
    assert index_visible(0, 0) and not index_visible(2, 1)


# -- shipped models satisfy the approximation conditions ---------------------


def test_conditions_hold_on_all_shipped_models():
    rng = random.Random(11)
    m = pinf_model()
    assert check_approx_conditions(m, range(64), rng=rng, chains=25).ok()
    assert check_approx_conditions(pn_model(), range(32), rng=rng, chains=10).ok()
    fm = FinitePosetModel(FinitePoset.from_cover(4, [(0, 1), (1, 2), (1, 3)]))
    assert check_approx_conditions(fm, fm.candidate_indices(), rng=rng, chains=10).ok()
    cy = CylinderModel(2)
    sample = [cy.singleton(w) for w in [(), (0,), (1,), (0, 0), (0, 1), (1, 1)]]
    assert check_approx_conditions(cy, sample, rng=rng, chains=10).ok()


@given(st.integers(0, 3), st.data())
@settings(max_examples=40, deadline=None)
def test_random_clause_systems_keep_first_two_conditions(nrows, data):
    rows = []
    for _ in range(nrows):
        alpha = data.draw(st.frozensets(st.integers(0, 3), max_size=2))
        wits = data.draw(
            st.lists(st.frozensets(st.integers(0, 4), max_size=2), max_size=3)
        )
        rows.append((alpha, wits))
    m = PSpaceModel(ClauseSystem(rows))
    idx = range(32)
    for i in idx:
        for j in idx:
            if m.ll(i, j):
                assert m.basic_subset(j, i)
    for u in idx:
        for v in idx:
            if not m.ll(u, v):
                continue
            for t in range(0, 32, 5):
                if m.basic_subset(u, t):
                    assert m.ll(t, v)


# -- cylinder specifics -----------------------------------------------------


@given(st.integers(2, 3), st.lists(st.integers(0, 2), max_size=6))
def test_word_code_roundtrip(k, word):
    word = tuple(a % k for a in word)
    m = CylinderModel(k)
    assert m.code_word(m.word_code(word)) == word


def test_cylinder_covering_awareness():
    m = CylinderModel(2)
    assert m.basic_subset(m.singleton((0, 1)), m.singleton((0,)))
    # the whole space is covered by the two depth-1 cylinders together
    assert m.basic_subset(m.singleton(()), m.singleton((0,)) | m.singleton((1,)))
    assert not m.basic_subset(m.singleton(()), m.singleton((0,)))
    three = CylinderModel(3)
    both = three.singleton((0,)) | three.singleton((1,))
    assert not three.basic_subset(three.singleton(()), both)


def test_cylinder_points_and_searches():
    m = CylinderModel(2)
    x = CylPoint((0, 1), (1, 0))
    assert [x.letter(i) for i in range(6)] == [0, 1, 1, 0, 1, 0]
    assert m.point_in_basic(x, m.singleton((0, 1, 1)))
    assert m.least_containing(x) == m.singleton(())
    c = m.singleton((0,))
    assert m.least_ll_above(c, x) == m.singleton((0,))
    y = CylPoint((1,), (0,))
    with pytest.raises(Exception):
        m.least_ll_above(c, y)


# -- baire ------------------------------------------------------------------


def _ones_after(model, k, depth):
    out = []
    for n in range(k, depth):
        for pre in _words(model.alphabet, n):
            out.append(model.singleton(pre + (1,)))
    return tuple(out)


def _words(k, n):
    if n == 0:
        yield ()
        return
    for w in _words(k, n - 1):
        for a in range(k):
            yield w + (a,)


def test_baire_degenerate_whole_space_dense_sets():
    m = pn_model()
    res = baire_witness(m, [((m.index_of(set()),), ())], m.index_of({1}), budget=500)
    assert res.outcome == "VERIFIED"
    assert res.point.contains(1)


def test_baire_two_dense_cylinder_sets():
    m = CylinderModel(2)
    dense = [(_ones_after(m, k, 4), ()) for k in (0, 1)]
    res = baire_witness(m, dense, m.singleton((0,)), budget=10_000)
    assert res.outcome == "VERIFIED"
    x = res.point
    assert x.letter(0) == 0
    for u_part, _ in dense:
        assert m.point_in_union(x, u_part)
    assert len(res.chain) >= 3


def test_baire_flags_non_dense_constraint():
    m = CylinderModel(2)
    # U empty and F = [1] (encoded as the complement of [0]), so the
    # union misses the target [0] entirely
    res = baire_witness(m, [((), (m.singleton((0,)),))], m.singleton((0,)), budget=500)
    assert res.outcome == "DENSITY_VIOLATION"
    assert res.failed_index == 0


def test_baire_budget_exhaustion():
    m = CylinderModel(2)
    dense = [(_ones_after(m, 0, 3), ())]
    res = baire_witness(m, dense, m.singleton((0,)), budget=2)
    assert res.outcome == "BUDGET_EXCEEDED"


def test_baire_result_serialization():
    r = BaireResult("VERIFIED", [1, 2], CylPoint((0,), (0,)))
    data = r.to_json()
    assert data["outcome"] == "VERIFIED" and data["point"]["prefix"] == [0]


# -- symbolic points and serialization --------------------------------------


def test_set_point_membership_and_horizon():
    x = SetPoint({1, 4}, cofinite_from=10)
    assert x.contains(1) and x.contains(12) and not x.contains(5)
    assert x.includes({1, 4, 11}) and not x.includes({3})
    assert x.horizon() == 10
    assert SetPoint.from_json(x.to_json()) == x


def test_cyl_point_requires_tail():
    with pytest.raises(ValueError):
        CylPoint((0,), ())
    x = CylPoint((), (1, 0))
    assert CylPoint.from_json(x.to_json()) == x


def test_model_json_roundtrip():
    models = [
        pn_model(),
        pinf_model(32),
        PSpaceModel(ClauseSystem([({0}, [{1}, {2}])])),
        CylinderModel(3),
        FinitePosetModel(FinitePoset.from_cover(3, [(0, 1), (1, 2)])),
    ]
    for m in models:
        m2 = model_from_json(json.dumps(m.to_json()))
        assert m2.kind == m.kind
        assert m2.to_json() == m.to_json()
    m = CylinderModel(2)
    x = point_from_json(m, '{"prefix": [0, 1], "cycle": [1]}')
    assert x == CylPoint((0, 1), (1,))
    assert point_from_json(pn_model(), '{"core": [2]}') == SetPoint({2})
    assert point_from_json(models[-1], "2") == 2


def test_poset_model_least_searches():
    fm = FinitePosetModel(FinitePoset.from_cover(3, [(0, 1), (1, 2)]))
    # opens ascend by size: empty, {2}, {1,2}, whole
    assert [fm.mask(i) for i in fm.candidate_indices()] == [0, 4, 6, 7]
    assert fm.mask(fm.least_containing(1)) == 0b110
    assert fm.mask(fm.least_ll_above(fm.index_of(0b110), 1)) == 0b110
    assert fm.some_point_in(fm.index_of(0)) is None
