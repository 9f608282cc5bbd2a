"""Finite posets carrying their Scott topology.

Points are 0..n-1 and subsets are int bitmasks, so set algebra is bit
twiddling.  In the Scott topology of a finite poset the opens are
exactly the up-closed sets and the closure of a set is its down-closure;
every element is compact, so the way-below relation coincides with the
order.
"""

from __future__ import annotations

import itertools
import json
import random


def bits(mask):
    """Indices of set bits, ascending.  Sparse-friendly: cost scales
    with the number of set bits, not the mask width."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(xs):
    m = 0
    for x in xs:
        m |= 1 << x
    return m


def popcount(mask):
    return bin(mask).count("1")


class FinitePoset:
    """A finite poset given by its full order relation.

    up[i] is the bitmask of {j : i <= j}; down[i] the bitmask of
    {j : j <= i}.  Constructors validate reflexivity, antisymmetry and
    transitivity so downstream code can trust the masks.
    """

    def __init__(self, n, up):
        self.n = n
        self.up = tuple(up)
        if len(self.up) != n:
            raise ValueError("need one up-set per element")
        full = (1 << n) - 1
        for i in range(n):
            if self.up[i] & ~full:
                raise ValueError("up-set out of range")
            if not (self.up[i] >> i) & 1:
                raise ValueError("order not reflexive at %d" % i)
        for i in range(n):
            for j in bits(self.up[i]):
                if i != j and (self.up[j] >> i) & 1:
                    raise ValueError("order not antisymmetric on (%d,%d)" % (i, j))
                if self.up[j] & ~self.up[i]:
                    raise ValueError("order not transitive at (%d,%d)" % (i, j))
        self.down = tuple(
            mask_of(j for j in range(n) if (self.up[j] >> i) & 1) for i in range(n)
        )
        self.carrier = full

    @staticmethod
    def from_cover(n, cover_pairs):
        """Build from a Hasse-style edge list [(lo, hi), ...] (any DAG
        edges work; the transitive closure is taken)."""
        up = [1 << i for i in range(n)]
        for lo, hi in cover_pairs:
            if not (0 <= lo < n and 0 <= hi < n):
                raise ValueError("cover pair out of range: (%r, %r)" % (lo, hi))
            up[lo] |= 1 << hi
        # Warshall closure over the up masks.
        for k in range(n):
            for i in range(n):
                if (up[i] >> k) & 1:
                    up[i] |= up[k]
        return FinitePoset(n, up)

    @staticmethod
    def chain(n):
        return FinitePoset.from_cover(n, [(i, i + 1) for i in range(n - 1)])

    @staticmethod
    def antichain(n):
        return FinitePoset.from_cover(n, [])

    def leq(self, i, j):
        return bool((self.up[i] >> j) & 1)

    def lt(self, i, j):
        return i != j and self.leq(i, j)

    # -- topology -------------------------------------------------------

    def is_open(self, mask):
        """Open = up-closed."""
        for i in bits(mask):
            if self.up[i] & ~mask:
                return False
        return True

    def is_closed(self, mask):
        return self.is_open(self.carrier & ~mask)

    def closure(self, mask):
        m = 0
        for i in bits(mask):
            m |= self.down[i]
        return m

    def up_closure(self, mask):
        m = 0
        for i in bits(mask):
            m |= self.up[i]
        return m

    def interior(self, mask):
        return self.carrier & ~self.closure(self.carrier & ~mask)

    def opens(self):
        """All open sets, sorted by (size, mask).  Cached."""
        try:
            return self._opens
        except AttributeError:
            pass
        found = [m for m in range(1 << self.n) if self.is_open(m)]
        found.sort(key=lambda m: (popcount(m), m))
        self._opens = found
        return found

    def least_element(self):
        for i in range(self.n):
            if self.up[i] == self.carrier:
                return i
        return None

    def height(self):
        """Number of elements in a longest chain."""
        memo = [0] * self.n
        for i in sorted(range(self.n), key=lambda i: popcount(self.up[i])):
            above = [memo[j] for j in bits(self.up[i]) if j != i]
            memo[i] = 1 + max(above, default=0)
        return max(memo, default=0)

    def maximal_elements(self):
        return [i for i in range(self.n) if self.up[i] == 1 << i]

    # -- surgery ----------------------------------------------------------

    def adjoin_point_below(self, open_mask):
        """Add a fresh point strictly below exactly the open set given.

        The new point gets index n.  Requires open_mask to be up-closed;
        the result is again a poset (transitivity holds because the set
        is an up-set).  Returns the new poset.
        """
        if not self.is_open(open_mask):
            raise ValueError("can only adjoin a point below an open (up-closed) set")
        up = list(self.up) + [open_mask | (1 << self.n)]
        return FinitePoset(self.n + 1, up)

    # -- interchange -------------------------------------------------------

    def cover_pairs(self):
        """Hasse diagram edges (i covered-by j)."""
        out = []
        for i in range(self.n):
            for j in bits(self.up[i]):
                if j == i:
                    continue
                between = [
                    k for k in bits(self.up[i] & self.down[j]) if k not in (i, j)
                ]
                if not between:
                    out.append((i, j))
        return out

    def to_json(self):
        return json.dumps({"n": self.n, "cover": [list(p) for p in self.cover_pairs()]})

    @staticmethod
    def from_json(text):
        data = text if isinstance(text, dict) else json.loads(text)
        return FinitePoset.from_cover(int(data["n"]), [tuple(p) for p in data["cover"]])

    # -- identity ------------------------------------------------------------

    def canon(self):
        """Canonical form under relabeling (min adjacency bits over all
        permutations).  Only sane for small n."""
        best = None
        for perm in itertools.permutations(range(self.n)):
            key = 0
            for i in range(self.n):
                for j in range(self.n):
                    if self.leq(i, j):
                        key |= 1 << (perm[i] * self.n + perm[j])
            if best is None or key < best:
                best = key
        return (self.n, best)

    def __eq__(self, other):
        return isinstance(other, FinitePoset) and self.n == other.n and self.up == other.up

    def __hash__(self):
        return hash((self.n, self.up))

    def __repr__(self):
        return "FinitePoset(n=%d, cover=%r)" % (self.n, self.cover_pairs())


def random_poset(n, rng_or_seed, edge_prob=0.35):
    """Random poset: seeded random DAG on a shuffled labeling, then
    transitive closure."""
    rng = rng_or_seed if isinstance(rng_or_seed, random.Random) else random.Random(rng_or_seed)
    order = list(range(n))
    rng.shuffle(order)
    pairs = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < edge_prob:
                pairs.append((order[a], order[b]))
    return FinitePoset.from_cover(n, pairs)


def all_posets(n):
    """Every poset on n labeled points (brute force; n <= 4 intended)."""
    if n == 0:
        return []
    strict_pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for picks in itertools.product([0, 1], repeat=len(strict_pairs)):
        rel = {p for p, b in zip(strict_pairs, picks) if b}
        # transitive?
        if any((a, c) not in rel for (a, b) in rel for (b2, c) in rel
               if b == b2 and a != c):
            continue
        if any((b, a) in rel for (a, b) in rel):
            continue
        up = [1 << i for i in range(n)]
        for a, b in rel:
            up[a] |= 1 << b
        out.append(FinitePoset(n, up))
    return out


def all_posets_upto_iso(n):
    seen = {}
    for p in all_posets(n):
        seen.setdefault(p.canon(), p)
    return list(seen.values())
