"""Symbolic presentations of infinite spaces.

Three families of models share a small duck-typed surface (basis by
integer index, decidable point membership, decidable containment, an
approximation relation ``ll``):

* ``PSpaceModel``: a subspace of P(N) with the Scott topology cut out
  by a clause system ``forall n (alpha_n <= X  =>  exists gamma in I_n,
  gamma <= X)``.  Basic opens are the cones O_beta = {X : beta <= X}
  restricted to the subspace, indexed by the bitmask of beta.  The
  trivial system (no rows) is P(N) itself, where ll is containment; the
  "every tail is inhabited" system is P_inf(N), where ll works out to
  A <= B and max(A) < max(B).

* ``FinitePosetModel``: a finite poset's Scott topology with the whole
  (finite) open lattice as basis and ll(U, V) = V nonempty and V <= U.

* ``CylinderModel``: infinite words over a finite alphabet; a basic
  open is a finite union of cylinders, indexed by a bitmask over word
  codes, and ll(U, V) = V nonempty and V <= U (sound by compactness).

Points carry only finite data plus a tail rule, which keeps membership
in any single basic open decidable; that is all the algorithms here
need.  "Least" searches use the integer index order as the well-order
on the basis, except that models with unbounded index spaces enumerate
a complete candidate cone (see the per-model ``least_containing``).
"""

from __future__ import annotations

import heapq
import itertools
import json
import math
from dataclasses import dataclass, field

from hierkit.finite_space import FinitePoset, bits, mask_of

INF = math.inf

NOT_A_CLAUSE = "not-a-clause"
UNSOLVED_CLAUSE = "unsolved"
SOLVED = "solved"


class SearchExhausted(Exception):
    """A bounded least-search ran out of candidates."""


# -- symbolic points --------------------------------------------------------


@dataclass(frozen=True)
class SetPoint:
    """A subset of N given by a finite core plus an optional cofinite
    tail (contains every n >= cofinite_from)."""

    core: frozenset
    cofinite_from: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "core", frozenset(self.core))

    def contains(self, n):
        if n in self.core:
            return True
        return self.cofinite_from is not None and n >= self.cofinite_from

    def includes(self, finite_set):
        return all(self.contains(n) for n in finite_set)

    def horizon(self):
        """Largest element the finite data mentions."""
        m = max(self.core, default=-1)
        if self.cofinite_from is not None:
            m = max(m, self.cofinite_from)
        return m

    def to_json(self):
        return {"core": sorted(self.core), "cofinite_from": self.cofinite_from}

    @staticmethod
    def from_json(data):
        if isinstance(data, str):
            data = json.loads(data)
        return SetPoint(frozenset(data["core"]), data.get("cofinite_from"))


@dataclass(frozen=True)
class CylPoint:
    """An infinite word: explicit prefix, then a repeating cycle."""

    prefix: tuple
    cycle: tuple = (0,)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise ValueError("tail cycle must be non-empty")

    def letter(self, i):
        if i < len(self.prefix):
            return self.prefix[i]
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def starts_with(self, word):
        return all(self.letter(i) == a for i, a in enumerate(word))

    def to_json(self):
        return {"prefix": list(self.prefix), "cycle": list(self.cycle)}

    @staticmethod
    def from_json(data):
        if isinstance(data, str):
            data = json.loads(data)
        return CylPoint(tuple(data["prefix"]), tuple(data.get("cycle", (0,))))


# -- clause systems ---------------------------------------------------------


class ClauseSystem:
    """Rows (alpha_n, I_n) denoting {X : alpha_n <= X => some gamma in
    I_n has gamma <= X}, intersected over n.

    Finitely many explicit rows, plus an optional generator for systems
    that are infinite in spirit; ``bound`` caps how many generated rows
    any query examines.  The generator takes (n, ceiling) and must
    produce the row's witnesses exactly up to elements <= ceiling, so
    truncation never causes a false negative at desk scale.
    """

    def __init__(self, rows, gen=None, bound=64):
        self.rows = [
            (frozenset(a), tuple(frozenset(g) for g in gs)) for a, gs in rows
        ]
        self.gen = gen
        self.bound = bound

    def n_rows(self):
        return self.bound if self.gen is not None else len(self.rows)

    def row(self, n, ceiling=None):
        if n < len(self.rows):
            return self.rows[n]
        if self.gen is not None and n < self.bound:
            a, gs = self.gen(n, self.bound if ceiling is None else ceiling)
            return frozenset(a), tuple(frozenset(g) for g in gs)
        return None

    def to_json(self):
        return {
            "rows": [
                {"alpha": sorted(a), "witnesses": [sorted(g) for g in gs]}
                for a, gs in self.rows
            ]
        }

    @staticmethod
    def from_json(data):
        if isinstance(data, str):
            data = json.loads(data)
        return ClauseSystem(
            [(r["alpha"], [tuple(g) for g in r["witnesses"]]) for r in data["rows"]]
        )


def pinf_system(bound=64):
    """Clause presentation of P_inf(N): row n says some j >= n is in X."""
    def gen(n, ceiling):
        return frozenset(), tuple(frozenset((j,)) for j in range(n, ceiling + 1))
    return ClauseSystem([], gen=gen, bound=bound)


def pinf_ll(a, b):
    """Closed form of the clause relation on P_inf(N) cones."""
    a, b = frozenset(a), frozenset(b)
    return a <= b and max(a, default=-1) < max(b, default=-1)


def _ascending_submasks(bit_positions, cap=4096):
    """Submasks over the given bit positions in increasing numeric
    order, generated lazily (heap walk of the subset lattice), at most
    cap of them."""
    bs = sorted(set(bit_positions))
    heap = [0]
    seen = {0}
    count = 0
    while heap and count < cap:
        m = heapq.heappop(heap)
        yield m
        count += 1
        for b in bs:
            m2 = m | (1 << b)
            if m2 != m and m2 not in seen:
                seen.add(m2)
                heapq.heappush(heap, m2)


class PSpaceModel:
    """A clause-system subspace of P(N).  Basis index i denotes the cone
    O_beta (cut to the subspace) where beta is the set of bits of i."""

    def __init__(self, system, kind="clauses"):
        self.system = system
        self.kind = kind
        self._status_memo = {}
        self._nu_memo = {}

    # descriptors and membership

    def descriptor(self, i):
        return frozenset(bits(i))

    def index_of(self, beta):
        return mask_of(beta)

    def point_in_basic(self, x, i):
        return x.includes(self.descriptor(i))

    def point_in_union(self, x, indices):
        return any(self.point_in_basic(x, i) for i in indices)

    def basic_subset(self, i, j):
        # O_beta(i) <= O_beta(j) iff beta(j) <= beta(i)
        return j & ~i == 0

    def union_subset(self, i, indices):
        # a cone lies inside a finite union of cones iff inside one of
        # them (witnessed by the point that is exactly the descriptor,
        # padded with fresh elements when the subspace needs them)
        return any(self.basic_subset(i, j) for j in indices)

    def basic_nonempty(self, i):
        return self.completion(i) is not None

    # clause bookkeeping

    def clause_status(self, i, n):
        try:
            return self._status_memo[i, n]
        except KeyError:
            pass
        beta = self.descriptor(i)
        ceiling = max(beta, default=0) + 1
        row = self.system.row(n, ceiling=ceiling)
        if row is None:
            out = NOT_A_CLAUSE
        else:
            alpha, gammas = row
            if not alpha <= beta:
                out = NOT_A_CLAUSE
            elif any(g <= beta for g in gammas):
                out = SOLVED
            else:
                out = UNSOLVED_CLAUSE
        self._status_memo[i, n] = out
        return out

    def n_u(self, i):
        """Least index of an unsolved clause whose premiss the cone
        forces, or INF when none exists within the examination bound."""
        try:
            return self._nu_memo[i]
        except KeyError:
            pass
        out = INF
        for n in range(self.system.n_rows()):
            if self.clause_status(i, n) == UNSOLVED_CLAUSE:
                out = n
                break
        self._nu_memo[i] = out
        return out

    def ll(self, i, j):
        if not self.basic_subset(j, i):
            return False
        nu = self.n_u(i)
        if nu == INF:
            return True
        if self.clause_status(j, nu) == SOLVED:
            return True
        for m in range(nu):
            if (
                self.clause_status(i, m) == NOT_A_CLAUSE
                and self.clause_status(j, m) == SOLVED
            ):
                return True
        return False

    def refine_witness(self, x, i):
        """A basic j with x in O_j and ll(i, j), built by solving the
        least unsolved clause with a witness drawn from x itself."""
        if not self.point_in_basic(x, i):
            raise ValueError("point is not in the open to refine")
        nu = self.n_u(i)
        if nu == INF:
            return i
        _, gammas = self.system.row(nu, ceiling=max(x.horizon(), nu) + 1)
        for g in gammas:
            if x.includes(g):
                return i | self.index_of(g)
        raise ValueError(
            "point fails clause %d: not in the presented subspace" % nu
        )

    # points

    def check_point(self, x):
        """Index of the first violated clause, or None if x satisfies
        every examinable row.  The generation ceiling tracks both the
        row number and the point's horizon so witnesses above either
        are still produced."""
        for n in range(self.system.n_rows()):
            row = self.system.row(n, ceiling=max(x.horizon(), n) + 1)
            if row is None:
                break
            alpha, gammas = row
            if x.includes(alpha) and not any(x.includes(g) for g in gammas):
                return n
        return None

    def completion(self, i):
        """Some point of the subspace inside basic i, or None.  Tries
        the descriptor itself, then the descriptor with a cofinite
        tail."""
        beta = self.descriptor(i)
        for x in (
            SetPoint(beta),
            SetPoint(beta, cofinite_from=max(beta, default=-1) + 1),
        ):
            if self.check_point(x) is None:
                return x
        return None

    def some_point_in(self, i):
        return self.completion(i)

    def chain_limit(self, chain):
        """The union-of-descriptors point of a ll-increasing chain,
        verified against every member and every examinable clause."""
        for k in range(len(chain) - 1):
            if not self.ll(chain[k], chain[k + 1]):
                raise ValueError("chain is not ll-increasing at step %d" % k)
        union = 0
        for i in chain:
            union |= i
        beta = self.descriptor(union)
        candidates = [SetPoint(beta)]
        if self.system.gen is not None:
            candidates.append(
                SetPoint(beta, cofinite_from=max(beta, default=-1) + 1)
            )
        bad = None
        for x in candidates:
            bad = self.check_point(x)
            if bad is None:
                for i in chain:
                    if not self.point_in_basic(x, i):  # pragma: no cover
                        raise AssertionError("limit point escaped a chain member")
                return x
        raise ValueError("chain limit violates clause %d" % bad)

    # least searches (the well-order is the integer index order)

    def _universe(self, x, extra=8):
        u = set(x.core)
        if x.cofinite_from is not None:
            u |= set(range(x.cofinite_from, x.cofinite_from + extra))
        return u

    def least_containing(self, x, within=None):
        """Least basic index i with x in O_i (and O_i inside the union
        ``within`` when given).

        Exact without search: a cone inside the union must refine one
        of its members, whose index is then no larger, so the least
        candidate is the least member containing x; with no union the
        whole-space cone 0 wins outright."""
        if within is None:
            return 0
        best = None
        for j in within:
            if self.point_in_basic(x, j) and (best is None or j < best):
                best = j
        if best is None:
            raise SearchExhausted("point lies outside the union")
        return best

    def least_ll_above(self, c, x, cap=4096):
        """Least basic index b with ll(c, b) and x in O_b.

        Any such b refines the c-cone, so b = c plus extra descriptor
        bits, and x in O_b keeps those bits inside x; the extras are
        walked in increasing order.  Past the cap the clause-solving
        witness stands in: still valid and deterministic, just not
        certifiably least."""
        extras = self._universe(x) - set(bits(c))
        for e in _ascending_submasks(extras, cap=cap):
            b = c | e
            if self.ll(c, b) and self.point_in_basic(x, b):
                return b
        b = self.refine_witness(x, c)
        if self.ll(c, b):
            return b
        raise SearchExhausted("no ll-successor found around the point")

    def random_ll_successor(self, i, rng):
        x = self.completion(i)
        if x is None:
            raise ValueError("cannot extend an empty basic open")
        j = self.refine_witness(x, i)
        top = max(self.descriptor(i | j), default=-1)
        if j == i or rng.randrange(2):
            # jitter with a fresh element; solvedness only ever improves
            # when the descriptor grows, so the relation survives
            j |= 1 << (top + 1 + rng.randrange(3))
        return j if self.ll(i, j) else self.refine_witness(x, i)

    def candidate_indices(self, limit):
        return range(limit)

    def to_json(self):
        data = {"kind": self.kind}
        if self.kind == "clauses":
            data.update(self.system.to_json())
        if self.kind == "pinf":
            data["bound"] = self.system.bound
        return data


def pn_model():
    return PSpaceModel(ClauseSystem([]), kind="pn")


def pinf_model(bound=64):
    return PSpaceModel(pinf_system(bound), kind="pinf")


# -- finite poset model -----------------------------------------------------


class FinitePosetModel:
    """The open lattice of a finite poset as an indexed basis.  Opens
    are enumerated smallest-first (by size, then mask), so index 0 is
    the empty set and the last index the whole carrier."""

    def __init__(self, poset):
        self.poset = poset
        self.opens = poset.opens()
        self._index = {m: i for i, m in enumerate(self.opens)}
        self.kind = "poset"

    def mask(self, i):
        return self.opens[i]

    def index_of(self, mask):
        return self._index[mask]

    def points(self):
        return range(self.poset.n)

    def point_in_basic(self, x, i):
        return bool((self.opens[i] >> x) & 1)

    def point_in_union(self, x, indices):
        return any(self.point_in_basic(x, i) for i in indices)

    def basic_subset(self, i, j):
        return self.opens[i] & ~self.opens[j] == 0

    def union_subset(self, i, indices):
        u = 0
        for j in indices:
            u |= self.opens[j]
        return self.opens[i] & ~u == 0

    def basic_nonempty(self, i):
        return self.opens[i] != 0

    def ll(self, i, j):
        return self.opens[j] != 0 and self.basic_subset(j, i)

    def lam(self, indices):
        u = 0
        for i in indices:
            u |= self.opens[i]
        return self._index[u]

    def some_point_in(self, i):
        m = self.opens[i]
        if not m:
            return None
        return next(bits(m))

    def chain_limit(self, chain):
        for k in range(len(chain) - 1):
            if not self.ll(chain[k], chain[k + 1]):
                raise ValueError("chain is not ll-increasing at step %d" % k)
        x = self.some_point_in(chain[-1])
        if x is None:
            raise ValueError("chain ends in the empty open")
        return x

    def least_containing(self, x, within=None):
        for i in range(len(self.opens)):
            if self.point_in_basic(x, i) and (
                within is None or self.union_subset(i, within)
            ):
                return i
        raise SearchExhausted("no basic open contains the point")

    def least_ll_above(self, c, x):
        for i in range(len(self.opens)):
            if self.point_in_basic(x, i) and self.ll(c, i):
                return i
        raise SearchExhausted("no ll-successor found around the point")

    def random_ll_successor(self, i, rng):
        m = self.opens[i]
        if not m:
            raise ValueError("cannot extend the empty open")
        pts = list(bits(m))
        sub = 0
        for p in rng.sample(pts, rng.randrange(1, len(pts) + 1)):
            sub |= self.poset.up[p]
        return self._index[sub]

    def candidate_indices(self, limit=None):
        return range(len(self.opens))

    def to_json(self):
        return {"kind": "poset", "poset": json.loads(self.poset.to_json())}


# -- cylinder model ---------------------------------------------------------


def _word_code(word, k):
    """Length-then-lexicographic code of a word over {0..k-1}."""
    c = 0
    for _ in range(len(word)):
        c = c * k + 1
    v = 0
    for a in word:
        v = v * k + a
    return c + v


def _code_word(c, k):
    length = 0
    block = 1
    start = 0
    while start + block <= c:
        start += block
        block *= k
        length += 1
    v = c - start
    word = []
    for _ in range(length):
        word.append(v % k)
        v //= k
    return tuple(reversed(word))


class CylinderModel:
    """Infinite words over {0..k-1}; basic opens are finite unions of
    cylinders [w], indexed by a bitmask over word codes.  Containment
    is covering-aware: [w] lies in a union if some member is a prefix
    of w, or every deep enough extension of w has one.  The relation
    ll(U, V) = "V nonempty and V <= U" is an approximation relation by
    compactness of the product space."""

    def __init__(self, alphabet=2):
        if alphabet < 2:
            raise ValueError("alphabet needs at least two letters")
        self.alphabet = alphabet
        self.kind = "cylinder"

    def word_code(self, word):
        return _word_code(tuple(word), self.alphabet)

    def code_word(self, c):
        return _code_word(c, self.alphabet)

    def words(self, i):
        return [self.code_word(c) for c in bits(i)]

    def singleton(self, word):
        return 1 << self.word_code(word)

    def point_in_basic(self, x, i):
        return any(x.starts_with(w) for w in self.words(i))

    def point_in_union(self, x, indices):
        return any(self.point_in_basic(x, i) for i in indices)

    def _covered(self, word, cover_words):
        """[word] inside the union of the cover's cylinders."""
        if any(word[: len(v)] == v for v in cover_words):
            return True
        depth = max((len(v) for v in cover_words), default=0)
        if len(word) >= depth:
            return False
        k = self.alphabet
        # counting precheck: each compatible cover word accounts for at
        # most k^(depth-len) leaves, so too few leaves means no cover
        # without enumerating anything
        need = k ** (depth - len(word))
        have = sum(
            k ** (depth - len(v)) for v in cover_words if v[: len(word)] == word
        )
        if have < need:
            return False
        exts = itertools.product(range(k), repeat=depth - len(word))
        return all(
            any((word + e)[: len(v)] == v for v in cover_words) for e in exts
        )

    def basic_subset(self, i, j):
        cover = self.words(j)
        return all(self._covered(w, cover) for w in self.words(i))

    def union_subset(self, i, indices):
        u = 0
        for j in indices:
            u |= j
        return self.basic_subset(i, u)

    def basic_nonempty(self, i):
        return i != 0

    def ll(self, i, j):
        return j != 0 and self.basic_subset(j, i)

    def lam(self, indices):
        u = 0
        for i in indices:
            u |= i
        return u

    def some_point_in(self, i):
        if i == 0:
            return None
        w = self.code_word(next(bits(i)))
        return CylPoint(w, (0,))

    def chain_limit(self, chain):
        for k in range(len(chain) - 1):
            if not self.ll(chain[k], chain[k + 1]):
                raise ValueError("chain is not ll-increasing at step %d" % k)
        x = self.some_point_in(chain[-1])
        if x is None:
            raise ValueError("chain ends in the empty open")
        for i in chain:  # pragma: no branch
            if not self.point_in_basic(x, i):  # pragma: no cover
                raise AssertionError("limit point escaped a chain member")
        return x

    def least_containing(self, x, within=None, max_depth=36):
        # among indices that fit, a singleton on a prefix of x is
        # always numerically least; search by depth at the word level
        # and build the (exponentially sized) index mask only once
        cover = None
        if within is not None:
            cover = [w for j in within for w in self.words(j)]
        for d in range(max_depth + 1):
            w = tuple(x.letter(i) for i in range(d))
            if cover is None or self._covered(w, cover):
                return self.singleton(w)
        raise SearchExhausted("point has no small enough neighborhood")

    def least_ll_above(self, c, x, max_depth=36):
        cover = self.words(c)
        for d in range(max_depth + 1):
            w = tuple(x.letter(i) for i in range(d))
            if c != 0 and self._covered(w, cover):
                return self.singleton(w)
        raise SearchExhausted("no ll-successor found around the point")

    def random_ll_successor(self, i, rng):
        # one letter per step: word codes grow exponentially with
        # depth, so desk-scale plays must deepen gently
        if i == 0:
            raise ValueError("cannot extend the empty open")
        w = self.code_word(rng.choice(list(bits(i))))
        return self.singleton(w + (rng.randrange(self.alphabet),))

    def candidate_indices(self, limit):
        return (1 << c for c in range(limit))

    def to_json(self):
        return {"kind": "cylinder", "alphabet": self.alphabet}


def model_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    kind = data["kind"]
    if kind == "pn":
        return pn_model()
    if kind == "pinf":
        return pinf_model(data.get("bound", 64))
    if kind == "clauses":
        return PSpaceModel(ClauseSystem.from_json(data))
    if kind == "cylinder":
        return CylinderModel(data.get("alphabet", 2))
    if kind == "poset":
        p = data["poset"]
        return FinitePosetModel(
            FinitePoset.from_cover(p["n"], [tuple(e) for e in p["cover"]])
        )
    raise ValueError("unknown model kind %r" % kind)


def point_from_json(model, data):
    if isinstance(data, str):
        data = json.loads(data)
    if isinstance(model, CylinderModel):
        return CylPoint.from_json(data)
    if isinstance(model, FinitePosetModel):
        return int(data)
    return SetPoint.from_json(data)


# -- staging ----------------------------------------------------------------


def index_visible(i, t):
    """Stage-t visibility of a basis index: its bit length fits in t.
    Monotone in t, so the staged relation only ever grows."""
    return i.bit_length() <= t


def staged_ll(model, i, j, t):
    return index_visible(i, t) and index_visible(j, t) and model.ll(i, j)


# -- relation transport and auditing ----------------------------------------


UNKNOWN = "UNKNOWN"


def lift_relation(model, c, d, pool, exhaustive=False):
    """Transport ll along basis change: c is below d in the lifted
    relation iff some pool pair U ll V fits between them
    (c >= U ll V >= d).  Returns True, False (only when the pool is
    known exhaustive) or UNKNOWN."""
    for u in pool:
        if not model.basic_subset(u, c):
            continue
        for v in pool:
            if model.ll(u, v) and model.basic_subset(d, v):
                return True
    return False if exhaustive else UNKNOWN


@dataclass
class ApproxReport:
    cond1: list = field(default_factory=list)
    cond2: list = field(default_factory=list)
    cond3: list = field(default_factory=list)
    cond4: list = field(default_factory=list)

    def ok(self):
        return not (self.cond1 or self.cond2 or self.cond3 or self.cond4)


def check_approx_conditions(model, indices, rng=None, chains=0, chain_len=6):
    """Test the four approximation-relation conditions on the given
    index sample: (1) ll shrinks, (2) ll is stable under enlarging the
    left side, (3) every point of a basic open sits inside some
    ll-successor, (4) ll-chains have a common point (witnessed
    constructively via chain_limit)."""
    indices = list(indices)
    rep = ApproxReport()
    ll = {(i, j): model.ll(i, j) for i in indices for j in indices}
    sub = {(i, j): model.basic_subset(i, j) for i in indices for j in indices}
    for i in indices:
        for j in indices:
            if ll[i, j] and not sub[j, i]:
                rep.cond1.append((i, j))
    for u in indices:
        for t in indices:
            if not sub[u, t]:
                continue
            for v in indices:
                if ll[u, v] and not ll[t, v]:
                    rep.cond2.append((u, t, v))
    for i in indices:
        x = model.some_point_in(i)
        if x is None:
            continue
        try:
            w = model.least_ll_above(i, x)
        except SearchExhausted:
            rep.cond3.append((i, x))
            continue
        if not model.point_in_basic(x, w):
            rep.cond3.append((i, x))  # pragma: no cover
    for _ in range(chains):
        start = rng.choice(indices)
        if not model.basic_nonempty(start):
            continue
        chain = [start]
        for _ in range(chain_len - 1):
            chain.append(model.random_ll_successor(chain[-1], rng))
        try:
            x = model.chain_limit(chain)
        except ValueError:
            rep.cond4.append(tuple(chain))
            continue
        if not all(model.point_in_basic(x, i) for i in chain):
            rep.cond4.append(tuple(chain))  # pragma: no cover
    return rep


# -- the Baire-style witness ------------------------------------------------


@dataclass
class BaireResult:
    outcome: str  # VERIFIED | DENSITY_VIOLATION | BUDGET_EXCEEDED
    chain: list
    point: object = None
    failed_index: int | None = None

    def to_json(self):
        data = {
            "outcome": self.outcome,
            "chain": list(self.chain),
            "failed_index": self.failed_index,
        }
        if self.point is not None:
            data["point"] = (
                self.point.to_json()
                if hasattr(self.point, "to_json")
                else self.point
            )
        return data


def _least_ll_successor(model, i, budget, inside=None):
    """Least basic j with ll(i, j), optionally inside a union; the
    enumeration order is the model's candidate order.  Returns
    (index or None, steps used, hit the hard budget)."""
    steps = 0
    for j in model.candidate_indices(max(budget, 0)):
        steps += 1
        if steps > budget:
            return None, steps, True
        if not model.ll(i, j):
            continue
        if inside is not None and not model.union_subset(j, inside):
            continue
        return j, steps, False
    return None, steps, False


def baire_witness(model, dense, o, budget=10_000, schedule=None):
    """Drive a ll-chain through a list of dense open-union-closed
    constraints and certify a point of the target basic open that
    meets every one.

    dense is a list of pairs (U, F): U a tuple of basis indices read as
    their union, F a tuple of indices read as the complement of their
    union.  Rounds follow the schedule (default: two round-robin
    cycles).  Each scheduled round either steps into the open part
    (when it contains a ll-successor) or shows the current open still
    meets the closed part; an open that does neither is a density
    violation at that round.  The final point is re-verified against
    the target and every constraint."""
    steps = 0
    o0, used, capped = _least_ll_successor(model, o, budget)
    steps += used
    if o0 is None:
        return BaireResult("BUDGET_EXCEEDED" if capped else "DENSITY_VIOLATION", [])
    chain = [o0]
    rounds = 2 * len(dense) if schedule is None else len(schedule)
    for n in range(rounds):
        j = n % len(dense) if schedule is None else schedule[n]
        u_part, f_part = dense[j]
        w, used, capped = _least_ll_successor(model, chain[-1], budget - steps)
        steps += used
        if w is None:
            return BaireResult("BUDGET_EXCEEDED", chain)
        if u_part:
            w_star, used, capped = _least_ll_successor(
                model, w, budget - steps, inside=u_part
            )
            steps += used
        else:
            w_star, capped = None, False
        if w_star is None:
            if capped:
                return BaireResult("BUDGET_EXCEEDED", chain)
            # no way into the open part; the closed part must still
            # meet the current open, i.e. the open cannot sit inside
            # the closed part's complementary union
            if model.union_subset(w, f_part):
                return BaireResult("DENSITY_VIOLATION", chain, failed_index=j)
        chain.append(w if w_star is None else w_star)
    x = model.chain_limit(chain)
    if not model.point_in_basic(x, o):  # pragma: no cover
        return BaireResult("DENSITY_VIOLATION", chain, x, failed_index=-1)
    for j, (u_part, f_part) in enumerate(dense):
        in_u = model.point_in_union(x, u_part)
        in_f = not model.point_in_union(x, f_part)
        if not (in_u or in_f):
            return BaireResult("DENSITY_VIOLATION", chain, x, failed_index=j)
    return BaireResult("VERIFIED", chain, x)
