"""Tree-shaped set codes and the staged difference-code transform.

Three layers live here.  BorelCode is a finite well-founded tree whose
nodes denote sets by rank: a bare root is empty, a leaf reads the basic
open named by its last entry, a rank-1 node unions its children, and a
rank->=2 node unions the differences of its children taken in (2n,
2n+1) pairs.  HausdorffCode strings a list of such trees along an
explicit finite well-order with a parity set P; a point belongs to the
coded set exactly when the least tree containing it has its index in P.

The third layer turns a two-sided staged presentation of a set A (rows
I_n^{eps,t} of basis indices whose unions intersect to A for eps=1 and
to its complement for eps=0) into a difference code over an ordinal
below omega^2.  The counter F_eps(m,t) measures how many leading rows
of side eps approximate O_m from above at stage t; pairs (m,t) whose
two counters disagree get the type of the larger side, and sequences of
such pairs with increasing coordinates, shrinking opens, and
alternating types form a finite tree.  Kleene-Brouwer order on that
tree, with each node spread over an (omega+2)-block of slots, yields
the code: the only nonempty slot of a node's block sits at omega+type,
so slot parity tracks the type, and least-slot evaluation reads off the
type of the deepest-leftmost node whose open contains the point.

Nothing here silently extrapolates: the transform is exact for the
budget it was given, and verify_transform re-runs it on growing budgets
against a membership oracle, reporting INCOMPLETE with the observed
convergence data instead of patching answers.
"""

from __future__ import annotations

from dataclasses import dataclass

from hierkit.alt_trees import WfTree, kb_sorted
from hierkit.diff_hierarchy import DiffCode, SearchBudgetExceeded, embed_co
from hierkit.finite_space import bits
from hierkit.ordinals import OMEGA, Ordinal
from hierkit.space_models import (
    CylinderModel,
    FinitePosetModel,
    index_visible,
    staged_ll,
)

SIGMA = "sigma"
PI = "pi"

ONE = Ordinal.from_int(1)
TWO = Ordinal.from_int(2)


# -- tree-shaped codes -------------------------------------------------------


class BorelCode:
    """A finite prefix-closed tree read as a set description.

    Node meaning by rank: the root alone is the empty set; a non-root
    leaf is the basic open named by its last entry; a rank-1 node is
    the union of the opens named by its children; a node of rank >= 2
    is the union over n of (child 2n) minus (child 2n+1).  Children of
    rank->=2 nodes must therefore come in (2n, 2n+1) pairs, which is
    checked at construction.
    """

    def __init__(self, nodes):
        self.tree = nodes if isinstance(nodes, WfTree) else WfTree(nodes)
        for node in self.tree.nodes:
            if self.tree.node_rank(node) < 2:
                continue
            labels = {k[-1] for k in self.tree.children(node)}
            for c in labels:
                if c ^ 1 not in labels:
                    raise ValueError(
                        "child %d under %r has no difference partner" % (c, node)
                    )

    def rank(self):
        return self.tree.rank()

    def __eq__(self, other):
        return isinstance(other, BorelCode) and self.tree.nodes == other.tree.nodes

    def __hash__(self):
        return hash(self.tree.nodes)

    def __repr__(self):
        return "BorelCode(%r)" % (sorted(self.tree.nodes),)

    def to_json(self):
        return {"nodes": [list(n) for n in sorted(self.tree.nodes)]}

    @staticmethod
    def from_json(data):
        return BorelCode([tuple(n) for n in data["nodes"]])


def _node_value(tree, node, model, x):
    rank = tree.node_rank(node)
    if rank == 0:
        return bool(node) and model.point_in_basic(x, node[-1])
    labels = sorted(k[-1] for k in tree.children(node))
    if rank == 1:
        return any(model.point_in_basic(x, c) for c in labels)
    for c in labels:
        if c % 2:
            continue
        if _node_value(tree, node + (c,), model, x) and not _node_value(
            tree, node + (c + 1,), model, x
        ):
            return True
    return False


def eval_borel(code, model, side, x):
    """Membership of x in the coded set (side pi is the complement)."""
    if side not in (SIGMA, PI):
        raise ValueError("side must be %r or %r" % (SIGMA, PI))
    inside = _node_value(code.tree, (), model, x)
    return not inside if side == PI else inside


@dataclass(frozen=True)
class HausdorffCode:
    """Trees along a finite well-order with a parity set.

    `order` lists element ids from least to greatest; `trees[n]` is the
    BorelCode attached to element n; a point lands in the coded set
    exactly when the least element whose tree contains it lies in
    `parity_set`.  Points in no tree are out.
    """

    order: tuple
    parity_set: frozenset
    trees: tuple

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        object.__setattr__(self, "parity_set", frozenset(self.parity_set))
        object.__setattr__(self, "trees", tuple(self.trees))
        if sorted(self.order) != list(range(len(self.trees))):
            raise ValueError("order must enumerate one rank per tree")
        if not self.parity_set <= set(self.order):
            raise ValueError("parity set mentions elements outside the order")

    def rank_of(self, n):
        return self.order.index(n)

    def to_json(self):
        return {
            "order": list(self.order),
            "parity_set": sorted(self.parity_set),
            "trees": [t.to_json() for t in self.trees],
        }

    @staticmethod
    def from_json(data):
        return HausdorffCode(
            tuple(data["order"]),
            frozenset(data["parity_set"]),
            tuple(BorelCode.from_json(t) for t in data["trees"]),
        )


def eval_hausdorff_code(code, model, x):
    for n in code.order:
        if eval_borel(code.trees[n], model, SIGMA, x):
            return n in code.parity_set
    return False


def hausdorff_from_diff(code, carrier_index=None):
    """Re-express a finite difference code whose handles are basis
    indices.  Listed slots become rank-1 trees over their open;
    unlisted slots get the bare-root tree, which never fires, so the
    least-slot semantics carries over unchanged.  A co-D code is first
    pushed into the next level, which needs the whole space's index.
    """
    if code.polarity == "co-D":
        if carrier_index is None:
            raise ValueError("co-D translation needs the whole-space index")
        code = embed_co(code, carrier_index)
    if not code.alpha.is_finite():
        raise ValueError("only finite-length codes translate to explicit orders")
    length = code.alpha.as_int()
    filled = {}
    for idx, handle in code.entries:
        filled[idx.as_int()] = handle
    trees = tuple(
        BorelCode([(), (filled[n],)]) if n in filled else BorelCode([()])
        for n in range(length)
    )
    parity = frozenset(n for n in range(length) if n % 2 != length % 2)
    return HausdorffCode(tuple(range(length)), parity, trees)


# -- staged presentations ----------------------------------------------------


class StagedPresentation:
    """Two staged row enumerations for a set and its complement.

    `rows(eps, n, t)` yields the stage-t approximation of the n-th row
    of side eps as basis indices.  The class filters each row down to
    the indices visible at stage t and checks -- against every row it
    has already handed out -- that rows only grow with the stage.
    `member`, when provided, is the ground-truth membership oracle used
    by verification; the presentation itself never consults it.
    """

    def __init__(self, rows, member=None, name="staged", json_form=None):
        self._rows = rows
        self.member = member
        self.name = name
        self.json_form = json_form
        self._seen = {}
        self._memo = {}

    def row(self, eps, n, t):
        if eps not in (0, 1):
            raise ValueError("side must be 0 or 1")
        key = (eps, n, t)
        if key in self._memo:
            return self._memo[key]
        got = frozenset(i for i in self._rows(eps, n, t) if index_visible(i, t))
        seen = self._seen.setdefault((eps, n), {})
        for u, prev in seen.items():
            older, newer = (prev, got) if u <= t else (got, prev)
            if not older <= newer:
                raise ValueError(
                    "row (%d, %d) shrank between stages %d and %d"
                    % (eps, n, min(u, t), max(u, t))
                )
        seen[t] = got
        out = tuple(sorted(got))
        self._memo[key] = out
        return out

    def check_points(self, model, points, depth=6, stage=32):
        """Disjoint-and-covering sanity at finite resolution: a point is
        `stable` when the examined rows of its own side all contain it
        and some examined row of the other side has already shed it."""
        if self.member is None:
            raise ValueError("check_points needs the membership oracle")
        report = {}
        for x in points:
            side = 1 if self.member(x) else 0
            covered = all(
                model.point_in_union(x, self.row(side, n, stage))
                for n in range(depth)
            )
            escaped = any(
                not model.point_in_union(x, self.row(1 - side, n, stage))
                for n in range(depth)
            )
            report[x] = "stable" if covered and escaped else "unstable"
        return report

    def to_json(self):
        if self.json_form is None:
            raise ValueError("presentation %r has no serial form" % self.name)
        return dict(self.json_form)


def whole_space_index(model):
    if isinstance(model, UnionClosureAdapter):
        return 1 << whole_space_index(model.base)
    if hasattr(model, "singleton"):
        return model.singleton(())
    if hasattr(model, "opens"):
        return len(model.opens) - 1
    return 0


def clopen_presentation(model, inside, outside, member=None):
    """Constant rows: every row of side 1 is {inside}, of side 0 is
    {outside}.  Correct exactly when the two opens partition the space,
    which is the caller's claim and check_points' job to probe."""
    if member is None:
        member = lambda x: model.point_in_basic(x, inside)
    return StagedPresentation(
        lambda eps, n, t: (inside,) if eps == 1 else (outside,),
        member=member,
        name="clopen",
        json_form={"kind": "clopen", "inside": inside, "outside": outside},
    )


def empty_presentation(model):
    whole = whole_space_index(model)
    return StagedPresentation(
        lambda eps, n, t: (whole,) if eps == 0 else (),
        member=lambda x: False,
        name="empty",
        json_form={"kind": "empty"},
    )


def first_one_presentation(model):
    """Words whose first letter other than 0 is a 1.

    The set is the open union of the cylinders [0^k 1]; its complement
    is a genuine countable intersection: row n is [0^n] together with
    every [0^k j], k < n, j >= 2.
    """
    if not isinstance(model, CylinderModel):
        raise TypeError("this presentation lives on a cylinder model")
    k = model.alphabet

    def visible_singleton(word, t):
        # test the code before shifting: word codes grow exponentially
        # with depth, so 1 << code must never be built for losers
        code = model.word_code(word)
        return 1 << code if code + 1 <= t else None

    def rows(eps, n, t):
        out = []
        if eps == 1:
            depth = 0
            while True:
                idx = visible_singleton((0,) * depth + (1,), t)
                if idx is None:
                    return out
                out.append(idx)
                depth += 1
        idx = visible_singleton((0,) * n, t)
        if idx is not None:
            out.append(idx)
        for d in range(n):
            for j in range(2, k):
                idx = visible_singleton((0,) * d + (j,), t)
                if idx is not None:
                    out.append(idx)
        return out

    def member(x):
        for i in range(len(x.prefix) + len(x.cycle)):
            a = x.letter(i)
            if a:
                return a == 1
        return False

    return StagedPresentation(
        rows, member=member, name="first-one", json_form={"kind": "first-one"}
    )


def rows_presentation(model, rows1, rows0, member=None, tail="repeat"):
    """Explicit finite row lists.  Rows past the end repeat the last
    listed row (`tail="repeat"`) or go empty (`tail="empty"`)."""
    if tail not in ("repeat", "empty"):
        raise ValueError("tail must be 'repeat' or 'empty'")
    table = {1: [tuple(r) for r in rows1], 0: [tuple(r) for r in rows0]}

    def rows(eps, n, t):
        listed = table[eps]
        if n < len(listed):
            return listed[n]
        if tail == "repeat" and listed:
            return listed[-1]
        return ()

    return StagedPresentation(
        rows,
        member=member,
        name="rows",
        json_form={
            "kind": "rows",
            "rows1": [list(r) for r in table[1]],
            "rows0": [list(r) for r in table[0]],
            "tail": tail,
        },
    )


def presentation_from_json(model, data):
    kind = data["kind"]
    if kind == "rows":
        return rows_presentation(
            model, data["rows1"], data["rows0"], tail=data.get("tail", "repeat")
        )
    if kind == "clopen":
        return clopen_presentation(model, data["inside"], data["outside"])
    if kind == "empty":
        return empty_presentation(model)
    if kind == "first-one":
        return first_one_presentation(model)
    raise ValueError("unknown presentation kind %r" % kind)


class UnionClosureAdapter:
    """Finite-union closure for bases without a union operator.

    Adapter indices are bitmasks over base indices, so the union map is
    bitwise or and the empty mask is the empty union.  The containment
    reading of ll is kept; for cone-like bases, where a basic open
    inside a finite union always sits inside a single member, this
    preserves the approximation-relation conditions.
    """

    def __init__(self, base):
        self.base = base
        self.kind = "union-closure"

    def lam(self, indices):
        u = 0
        for i in indices:
            u |= i
        return u

    def point_in_basic(self, x, i):
        return any(self.base.point_in_basic(x, a) for a in bits(i))

    def point_in_union(self, x, indices):
        return any(self.point_in_basic(x, i) for i in indices)

    def basic_nonempty(self, i):
        return any(self.base.basic_nonempty(a) for a in bits(i))

    def basic_subset(self, i, j):
        members = tuple(bits(j))
        return all(self.base.union_subset(a, members) for a in bits(i))

    def union_subset(self, i, indices):
        return self.basic_subset(i, self.lam(indices))

    def ll(self, i, j):
        return self.basic_nonempty(j) and self.basic_subset(j, i)

    def some_point_in(self, i):
        for a in bits(i):
            if self.base.basic_nonempty(a):
                return self.base.some_point_in(a)
        return None

    def candidate_indices(self, limit):
        return (1 << a for a in range(limit))


# -- the F counter and the alternating tree ----------------------------------


def compute_F(m, t, eps, pres, model):
    """The largest p <= t such that every row q < p of side eps
    approximates O_m from above at stage t, i.e. the stage-t union of
    row q is nonempty-refined by O_m.  Not monotone in t in general
    (rows grow, but so does the row count to survive) and never assumed
    to be."""
    p = 0
    while p < t:
        row = pres.row(eps, p, t)
        if not staged_ll(model, model.lam(row), m, t):
            break
        p += 1
    return p


def stage_ladder(budget):
    """Geometric stage schedule 1, 2, 4, ... capped at the budget. A
    sub-enumeration of stages keeps every check meaningful (each is
    made at its own listed stage) while bounding branch length by the
    ladder's length."""
    if budget < 1:
        raise ValueError("stage budget must be at least 1")
    out, t = [], 1
    while t < budget:
        out.append(t)
        t *= 2
    out.append(budget)
    return tuple(out)


def _default_pool(pres, model, budget, stages):
    cand = set(model.candidate_indices(budget))
    for eps in (0, 1):
        for t in stages:
            for q in range(t):
                row = pres.row(eps, q, t)
                cand.update(row)
                u = model.lam(row)
                if u:
                    cand.add(u)
    return tuple(
        sorted(
            i
            for i in cand
            if index_visible(i, budget) and model.basic_nonempty(i)
        )
    )


@dataclass
class StagedTree:
    """The alternating tree over (index, stage) pairs, with per-node
    type and counter values."""

    nodes: dict  # sequence -> (type, F0, F1)
    stages: tuple
    pool: tuple
    budget: int
    frontier: frozenset  # leaves at the last stage: cut off by the budget
    growth_violations: tuple

    def wf(self):
        return WfTree(self.nodes.keys())

    def type_of(self, seq):
        return self.nodes[tuple(seq)][0]

    def leaves(self):
        prefixes = {seq[:-1] for seq in self.nodes}
        return [seq for seq in self.nodes if seq not in prefixes]

    def __len__(self):
        return len(self.nodes)


def build_alt_tree(pres, model, stage_budget, pool=None, stages=None, node_cap=50_000):
    """All sequences ((m_0,t_0),...,(m_k,t_k)) with strictly increasing
    m's and t's, each open nonempty-refining its predecessor at the
    later pair's stage, and the two F counters disagreeing at every
    pair with the winning side alternating along the sequence.

    Leaves sitting at the final stage are flagged as frontier: they
    could not gain children inside the budget but might beyond it.  The
    counter-growth bound F_type(m_l, t_l) >= l // 2 is re-checked on
    every node rather than trusted.
    """
    if stages is None:
        stages = stage_ladder(stage_budget)
    if pool is None:
        pool = _default_pool(pres, model, stage_budget, stages)

    f_memo = {}

    def fvals(m, t):
        if (m, t) not in f_memo:
            f_memo[(m, t)] = (
                compute_F(m, t, 0, pres, model),
                compute_F(m, t, 1, pres, model),
            )
        return f_memo[(m, t)]

    typed = {}
    for t in stages:
        entries = []
        for m in pool:
            if not index_visible(m, t):
                continue
            f0, f1 = fvals(m, t)
            if f0 != f1:
                entries.append((m, 1 if f1 > f0 else 0))
        typed[t] = tuple(entries)

    nodes = {}

    def extend(prefix, last_m, last_t, last_eps):
        for t in stages:
            if last_t is not None and t <= last_t:
                continue
            for m, eps in typed[t]:
                if last_m is not None:
                    if m <= last_m or eps == last_eps:
                        continue
                    if not staged_ll(model, last_m, m, t):
                        continue
                if len(nodes) >= node_cap:
                    raise SearchBudgetExceeded(
                        "alternating tree exceeded %d nodes" % node_cap
                    )
                seq = prefix + ((m, t),)
                f0, f1 = fvals(m, t)
                nodes[seq] = (eps, f0, f1)
                extend(seq, m, t, eps)

    extend((), None, None, None)

    prefixes = {seq[:-1] for seq in nodes}
    frontier = frozenset(
        seq for seq in nodes if seq not in prefixes and seq[-1][1] == stages[-1]
    )
    violations = []
    for seq, (eps, f0, f1) in nodes.items():
        if (f1 if eps else f0) < (len(seq) - 1) // 2:
            violations.append(seq)
    return StagedTree(nodes, tuple(stages), tuple(pool), stage_budget, frontier, tuple(violations))


# -- block ranks and the transform -------------------------------------------


def block_start(r):
    """Ordinal rank of the first slot of the r-th (omega+2)-block:
    (omega+2)*r, which collapses to omega*r + 2 for r >= 1."""
    if r == 0:
        return Ordinal.from_int(0)
    return Ordinal.omega(1, r) + TWO


_GAMMA_PROBES = (
    (Ordinal.from_int(0), 0),
    (ONE, 1),
    (OMEGA, 0),
    (OMEGA + ONE, 1),
)


@dataclass(frozen=True)
class Slot:
    seq: tuple
    rank: Ordinal
    eps: int
    open_index: int


@dataclass
class TransformResult:
    """A built difference code plus everything needed to audit it."""

    tree: StagedTree
    kb_order: tuple  # all tree sequences, Kleene-Brouwer ascending, root last
    xi: Ordinal
    slots: tuple  # the nonempty slots, rank-ascending
    diff_code: DiffCode
    hausdorff: HausdorffCode
    budget: int

    def eval_point(self, model, x):
        for s in self.slots:
            if model.point_in_basic(x, s.open_index):
                return s.eps == 1
        return False

    def to_json(self):
        return {
            "xi": str(self.xi),
            "budget": self.budget,
            "nodes": len(self.tree),
            "frontier": len(self.tree.frontier),
            "slots": [
                {
                    "node": [list(p) for p in s.seq],
                    "rank": str(s.rank),
                    "type": s.eps,
                    "open": s.open_index,
                }
                for s in self.slots
            ],
            "hausdorff": self.hausdorff.to_json(),
        }


def effective_hausdorff_transform(pres, model, stage_budget, **kw):
    """Build the alternating tree, order it Kleene-Brouwer style (root
    last), spread each node over an (omega+2)-block of slots, and emit
    the difference code whose only nonempty slot per block carries the
    node's open at offset omega + type.

    Slot parity equals the type by construction; this is asserted for
    the probe offsets 0, 1, omega, omega+1 of every block rather than
    trusted.  Evaluation of the result is exact for this budget: a
    point in no slot's open is reported outside, never guessed.
    """
    tree = build_alt_tree(pres, model, stage_budget, **kw)
    order = kb_sorted(tree.wf().nodes)
    if order[-1] != ():
        raise AssertionError("root is not Kleene-Brouwer-last")
    for r in range(len(order)):
        start = block_start(r)
        for gamma, want in _GAMMA_PROBES:
            if (start + gamma).parity() != want:
                raise AssertionError("slot parity drifted in block %d" % r)
    xi = block_start(len(order))
    slots = []
    for r, seq in enumerate(order):
        if not seq:
            continue
        eps = tree.nodes[seq][0]
        rank = block_start(r) + OMEGA + Ordinal.from_int(eps)
        slots.append(Slot(seq, rank, eps, seq[-1][0]))
    entries = tuple((s.rank, s.open_index) for s in slots)
    diff_code = DiffCode(xi, "D", entries)
    trees = tuple(BorelCode([(), (s.open_index,)]) for s in slots)
    parity_set = frozenset(i for i, s in enumerate(slots) if s.eps == 1)
    hausdorff = HausdorffCode(tuple(range(len(slots))), parity_set, trees)
    return TransformResult(
        tree, tuple(order), xi, tuple(slots), diff_code, hausdorff, stage_budget
    )


# -- honesty: verification against a membership oracle -----------------------


@dataclass
class VerificationReport:
    status: str  # "COMPLETE" | "INCOMPLETE"
    result: TransformResult
    budgets: tuple
    mismatches: tuple  # points still wrong at the last budget tried
    first_change: int | None  # smallest budget increase that moved any answer

    def ok(self):
        return self.status == "COMPLETE"


def verify_transform(pres, model, points, budget, max_budget=None, member=None, **kw):
    """Run the transform on doubling budgets until its evaluation
    matches the membership oracle on every test point, or the budget
    cap is hit.  The report never hides a disagreement: INCOMPLETE
    carries the points still wrong and the smallest budget increase
    that changed any answer, so convergence is observable."""
    if member is None:
        member = pres.member
    if member is None:
        raise ValueError("verification needs a membership oracle")
    if max_budget is None:
        max_budget = budget * 8
    points = tuple(points)
    truth = [bool(member(x)) for x in points]
    budgets, answers = [], []
    result = None
    b = budget
    while True:
        result = effective_hausdorff_transform(pres, model, b, **kw)
        budgets.append(b)
        answers.append([result.eval_point(model, x) for x in points])
        if answers[-1] == truth or b >= max_budget:
            break
        b = min(b * 2, max_budget)
    status = "COMPLETE" if answers[-1] == truth else "INCOMPLETE"
    first_change = None
    for bb, aa in zip(budgets[1:], answers[1:]):
        if aa != answers[0]:
            first_change = bb - budgets[0]
            break
    mismatches = tuple(
        x for x, a, want in zip(points, answers[-1], truth) if a != want
    )
    return VerificationReport(status, result, tuple(budgets), mismatches, first_change)


def claim2_gaps(result, model, points, member=None, pres=None):
    """Saturation check: every node typed against a point's side and
    containing the point must have a child whose open still contains
    it.  Frontier nodes are exempt -- their children were cut off by
    the budget, which the result already reports."""
    if member is None and pres is not None:
        member = pres.member
    if member is None:
        raise ValueError("the check needs a membership oracle")
    tree = result.tree
    kids = {}
    for seq in tree.nodes:
        kids.setdefault(seq[:-1], []).append(seq)
    gaps = []
    for x in points:
        side = 1 if member(x) else 0
        for seq, (eps, _, _) in tree.nodes.items():
            if eps == side or seq in tree.frontier:
                continue
            if not model.point_in_basic(x, seq[-1][0]):
                continue
            if not any(
                model.point_in_basic(x, c[-1][0]) for c in kids.get(seq, ())
            ):
                gaps.append((x, seq))
    return gaps
