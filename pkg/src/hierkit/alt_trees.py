"""Well-founded trees, alternating chains, and the audit they power.

Trees are finite prefix-closed sets of tuples; rank(leaf) = 0 and
rank(node) = max(rank(child) + 1).  The classification bridge: a subset
a of a finite poset is at D-level <= n exactly when no membership-
alternating strictly increasing chain starting inside a has n edges.
On a finite poset the maximal rank of an (a, eps)-alternating increasing
tree equals the longest such chain, so the tree search collapses to a
DP over the order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from hierkit.diff_hierarchy import (
    DiffCode,
    code_from_masks,
    denote_mask,
    sigma_pi_levels,
)
from hierkit.finite_space import bits, popcount


# -- raw trees ----------------------------------------------------------


class WfTree:
    """A finite tree of finite sequences (always contains the root ())."""

    def __init__(self, nodes):
        nodes = set(tuple(n) for n in nodes)
        nodes.add(())
        for node in nodes:
            if node and node[:-1] not in nodes:
                raise ValueError("not prefix closed at %r" % (node,))
        self.nodes = frozenset(nodes)

    def children(self, node):
        node = tuple(node)
        return [m for m in self.nodes if len(m) == len(node) + 1 and m[: len(node)] == node]

    def node_rank(self, node):
        try:
            memo = self._ranks
        except AttributeError:
            memo = self._ranks = {}
            for m in sorted(self.nodes, key=len, reverse=True):
                kids = [memo[k] for k in self.children(m)]
                memo[m] = max(kids) + 1 if kids else 0
        return memo[tuple(node)]

    def rank(self):
        return self.node_rank(())

    def __len__(self):
        return len(self.nodes)


def kb_less(s, t):
    """Kleene-Brouwer: proper extensions come first; incomparable nodes
    compare at the first differing entry."""
    s, t = tuple(s), tuple(t)
    if s == t:
        return False
    k = min(len(s), len(t))
    for i in range(k):
        if s[i] != t[i]:
            return s[i] < t[i]
    return len(s) > len(t)


def kb_sorted(nodes):
    import functools

    return sorted(nodes, key=functools.cmp_to_key(lambda a, b: -1 if kb_less(a, b) else 1))


# -- labeled alternating trees -------------------------------------------


@dataclass
class LabeledAltTree:
    """A tree whose nodes carry poset elements, increasing along edges,
    with membership in `member_mask` flipping along every edge."""

    tree: WfTree
    labels: dict  # node tuple -> element

    def validate(self, poset, member_mask, eps=None):
        chi = lambda v: bool((member_mask >> v) & 1)
        for node in self.tree.nodes:
            if node not in self.labels:
                raise ValueError("unlabeled node %r" % (node,))
            if node:
                parent = node[:-1]
                a, b = self.labels[parent], self.labels[node]
                if not poset.lt(a, b):
                    raise ValueError("labels not strictly increasing at %r" % (node,))
                if chi(a) == chi(b):
                    raise ValueError("membership does not alternate at %r" % (node,))
        if eps is not None and chi(self.labels[()]) != bool(eps):
            raise ValueError("root sign is not eps=%d" % eps)

    def rank(self):
        return self.tree.rank()


def prune_to_rank(f, poset, member_mask, beta, eps):
    """Extract from f an (a, eps)-alternating subtree of rank exactly beta.

    Works by walking one maximal-rank branch and keeping beta+1
    consecutive nodes starting at depth 0 or 1, whichever has the right
    sign.  Guaranteed for beta < rank(f) (either sign); for
    beta = rank(f) only with the root's own sign.  Returns
    (LabeledAltTree, embedding dict new-node -> old-node).
    """
    chi = lambda v: bool((member_mask >> v) & 1)
    r = f.tree.rank()
    if beta > r:
        raise ValueError("no subtree of rank %d in a rank-%d tree" % (beta, r))
    branch = [()]
    while f.tree.node_rank(branch[-1]) > 0:
        want = f.tree.node_rank(branch[-1]) - 1
        branch.append(
            next(k for k in f.tree.children(branch[-1]) if f.tree.node_rank(k) == want)
        )
    d = 0 if chi(f.labels[branch[0]]) == bool(eps) else 1
    if d + beta > r:
        raise ValueError("rank-%d eps=%d subtree unavailable" % (beta, eps))
    picked = branch[d : d + beta + 1]
    nodes = [()]
    embedding = {(): picked[0]}
    labels = {(): f.labels[picked[0]]}
    path = ()
    for old in picked[1:]:
        path = path + (old[-1],)
        nodes.append(path)
        embedding[path] = old
        labels[path] = f.labels[old]
    g = LabeledAltTree(WfTree(nodes), labels)
    g.validate(poset, member_mask, eps)
    if g.rank() != beta:
        raise AssertionError("pruning missed the target rank")  # pragma: no cover
    return g, embedding


# -- chain DP classification ----------------------------------------------


def _chain_dp(poset, a_mask):
    """m[v] = number of nodes in the longest strictly increasing
    membership-alternating chain starting at v."""
    # Anything strictly above v has a strictly smaller up-set, so sorting
    # by up-set size processes every strict successor before v.
    order = sorted(range(poset.n), key=lambda v: popcount(poset.up[v]))
    m = [1] * poset.n
    for v in order:
        chi_v = (a_mask >> v) & 1
        best = 0
        for y in bits(poset.up[v]):
            if y != v and ((a_mask >> y) & 1) != chi_v:
                best = max(best, m[y])
        m[v] = 1 + best
    return m


def max_alt_rank(poset, a_mask, eps):
    """Largest rank of an (a, eps)-alternating increasing tree, or None
    when there is none at all (eps side empty)."""
    m = _chain_dp(poset, a_mask)
    side = [v for v in range(poset.n) if bool((a_mask >> v) & 1) == bool(eps)]
    if not side:
        return None
    return max(m[v] for v in side) - 1


def classify_by_trees(poset, a_mask):
    """(sigma, pi) levels from the chain characterization."""
    r1 = max_alt_rank(poset, a_mask, 1)
    r0 = max_alt_rank(poset, a_mask, 0)
    sigma = 0 if r1 is None else r1 + 1
    pi = 0 if r0 is None else r0 + 1
    return sigma, pi


def witness_tree(poset, a_mask, eps):
    """A maximal-rank (a, eps)-alternating increasing tree, as an actual
    labeled tree (the full chain tree below one best starting point)."""
    m = _chain_dp(poset, a_mask)
    side = [v for v in range(poset.n) if bool((a_mask >> v) & 1) == bool(eps)]
    if not side:
        return None
    root = max(side, key=lambda v: m[v])
    nodes = {(): root}
    frontier = [((), root)]
    while frontier:
        node, v = frontier.pop()
        chi_v = (a_mask >> v) & 1
        for y in bits(poset.up[v]):
            if y != v and ((a_mask >> y) & 1) != chi_v:
                child = node + (y,)
                nodes[child] = y
                frontier.append((child, y))
    t = LabeledAltTree(WfTree(nodes.keys()), nodes)
    t.validate(poset, a_mask, eps)
    return t


# -- code synthesis from chain ranks ---------------------------------------


def diff_code_from_trees(poset, a_mask):
    """Difference code for a at its tree-classified sigma level.

    Slot beta collects the up-sets of every element c whose residual
    chain rank m(c)-1 is <= beta and whose membership matches the slot
    parity (in a iff beta and alpha have different parities).
    """
    sigma, _ = classify_by_trees(poset, a_mask)
    alpha = sigma
    m = _chain_dp(poset, a_mask)
    masks = []
    for beta in range(alpha):
        want_in = (beta % 2) != (alpha % 2)
        acc = 0
        for c in range(poset.n):
            if m[c] - 1 <= beta and bool((a_mask >> c) & 1) == want_in:
                acc |= poset.up[c]
        masks.append(acc)
    code = code_from_masks(alpha, masks)
    if denote_mask(code, poset) != a_mask:
        raise AssertionError("tree code does not denote its set")  # pragma: no cover
    return code


# -- ambiguity audit --------------------------------------------------------


@dataclass
class AmbiguityReport:
    poset: object
    n_max: int
    levels: dict = field(default_factory=dict)  # mask -> (sigma, pi)
    equal_at: dict = field(default_factory=dict)  # n -> bool
    violations: dict = field(default_factory=dict)  # n -> [mask, ...]

    def ok(self, ns=None):
        ns = self.equal_at.keys() if ns is None else ns
        return all(self.equal_at[n] for n in ns)


def ambiguity_audit(poset, n_max, classify=classify_by_trees):
    """Compare D_n & co-D_n against the union of everything below n.

    For each subset: membership in D_n is sigma <= n, in co-D_n is
    pi <= n.  Records, per 1 <= n <= n_max, whether

        D_n & co-D_n  ==  union over m < n of (D_m | co-D_m)

    and the offending masks when not.
    """
    report = AmbiguityReport(poset, n_max)
    for mask in range(1 << poset.n):
        report.levels[mask] = classify(poset, mask)
    for n in range(1, n_max + 1):
        bad = []
        for mask, (s, p) in report.levels.items():
            lhs = s <= n and p <= n
            rhs = s < n or p < n
            if lhs != rhs:
                bad.append(mask)
        report.equal_at[n] = not bad
        report.violations[n] = bad
    return report


def ambiguous_drop_surgery(poset, a_mask, n):
    """The point-adjunction construction behind successor-level
    collapse arguments.

    Given a set ambiguous at level n+1 (sigma, pi <= n+1, n >= 1), glue
    a fresh point strictly below the top slot of a monotone D_(n+1)
    code for a.  In the enlarged poset the enlarged set a+ = a | {new}
    still has a D_(n+1) code (top entry extended by the new point) and
    its complement is unchanged, so a+ stays ambiguous at n+1.  Returns
    (new_poset, new_mask, levels_of_new_mask).

    The textbook next step — that the new point forces min(sigma, pi)
    of a+ down to n — is *not* asserted here, because it is false
    without a least element: on two disjoint 2-chains the set
    {top of one, bottom of the other} is ambiguous at 2 and the
    adjunction leaves it at sigma = pi = 2.  The prepend trick needs
    the new point below an alternating tree rooted *outside* the set,
    and it is only below those rooted inside.  Callers get the levels
    back and decide.
    """
    if n < 1:
        raise ValueError("the collapse argument needs n >= 1")
    s, p = classify_by_trees(poset, a_mask)
    if s > n + 1 or p > n + 1:
        raise ValueError("set is not ambiguous at level %d" % (n + 1))
    from hierkit.diff_hierarchy import normalize_monotone, pad

    code = pad(diff_code_from_trees(poset, a_mask), n + 1)
    code = normalize_monotone(code, lambda u, v: u | v)
    top_slot = 0
    for idx, mask in code.entries:
        top_slot |= mask
    bigger = poset.adjoin_point_below(top_slot)
    new_mask = a_mask | (1 << poset.n)
    return bigger, new_mask, classify_by_trees(bigger, new_mask)
