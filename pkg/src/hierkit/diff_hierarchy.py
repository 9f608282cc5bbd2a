"""Difference codes and the level machinery built on them.

A code is (alpha, polarity, entries): entries are (index, open-set)
pairs with strictly increasing ordinal indices below alpha.  Missing
indices denote the empty set.  Evaluation uses least-index semantics:
for polarity "D" a point belongs to the coded set iff the least listed
index whose set contains it exists and has parity different from
alpha's; "co-D" is the complement.

Level 0 is degenerate by design: D_0 denotes the empty set and co-D_0
the whole carrier, with no entries.

Set handles are opaque: on finite posets they are bitmasks, on symbolic
models they are tuples of basis indices.  Every operation that needs to
look inside a set takes callbacks.
"""

from __future__ import annotations

from dataclasses import dataclass

from hierkit.ordinals import Ordinal, parse_ordinal


def _as_ordinal(x):
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, int):
        return Ordinal.from_int(x)
    if isinstance(x, str):
        return parse_ordinal(x)
    raise TypeError("not an ordinal: %r" % (x,))


@dataclass(frozen=True)
class DiffCode:
    alpha: Ordinal
    polarity: str  # "D" | "co-D"
    entries: tuple  # ((Ordinal, set_handle), ...)

    def __post_init__(self):
        object.__setattr__(self, "alpha", _as_ordinal(self.alpha))
        if self.polarity not in ("D", "co-D"):
            raise ValueError("polarity must be 'D' or 'co-D'")
        ents = tuple((_as_ordinal(i), s) for i, s in self.entries)
        object.__setattr__(self, "entries", ents)
        prev = None
        for idx, _ in ents:
            if not idx < self.alpha:
                raise ValueError("entry index %s not below alpha=%s" % (idx, self.alpha))
            if prev is not None and not prev < idx:
                raise ValueError("entry indices must strictly increase")
            prev = idx

    def with_polarity(self, polarity):
        return DiffCode(self.alpha, polarity, self.entries)


def eval_diff(code, x, contains):
    """Least-index evaluation.  contains(set_handle, x) -> bool."""
    verdict = False
    for idx, s in code.entries:
        if contains(s, x):
            verdict = idx.parity() != code.alpha.parity()
            break
    if code.polarity == "co-D":
        verdict = not verdict
    return verdict


def normalize_monotone(code, union):
    """Replace each entry set by the union of it and all earlier entry
    sets.  Denotation is unchanged under least-index semantics."""
    ents = []
    acc = None
    for idx, s in code.entries:
        acc = s if acc is None else union(acc, s)
        ents.append((idx, acc))
    return DiffCode(code.alpha, code.polarity, tuple(ents))


def pad(code, alpha2):
    """Re-express the same set at a higher level alpha2 >= alpha.

    Same parity: indices stay put.  Opposite parity: every index shifts
    up by one (slot 0 is left implicitly empty), which flips each
    entry parity in step with alpha's.
    """
    alpha2 = _as_ordinal(alpha2)
    if alpha2 < code.alpha:
        raise ValueError("pad target %s below alpha %s" % (alpha2, code.alpha))
    if alpha2.parity() == code.alpha.parity():
        return DiffCode(alpha2, code.polarity, code.entries)
    ents = tuple((idx + 1, s) for idx, s in code.entries)
    return DiffCode(alpha2, code.polarity, ents)


def embed_co(code, carrier):
    """Turn a co-D_alpha code into a D_(alpha+1) code by appending the
    carrier at slot alpha."""
    if code.polarity != "co-D":
        raise ValueError("embed_co starts from a co-D code")
    ents = code.entries + ((code.alpha, carrier),)
    return DiffCode(code.alpha + 1, "D", ents)


# -- finite poset glue -----------------------------------------------------


def mask_contains(mask, x):
    return bool((mask >> x) & 1)


def eval_diff_mask(code, x):
    return eval_diff(code, x, mask_contains)


def denote_mask(code, poset):
    m = 0
    for x in range(poset.n):
        if eval_diff_mask(code, x):
            m |= 1 << x
    return m


def code_from_masks(alpha, masks, polarity="D"):
    """Entries at 0..len(masks)-1; empty masks are dropped (they can
    never fire)."""
    ents = tuple(
        (Ordinal.from_int(i), m) for i, m in enumerate(masks) if m
    )
    return DiffCode(_as_ordinal(alpha), polarity, ents)


class SearchBudgetExceeded(Exception):
    pass


def level_bruteforce(poset, target_mask, cap=None, max_nodes=2_000_000):
    """Least n such that target is D_n of a <=-increasing n-tuple of
    opens.  Existence is guaranteed at n = height + 1, which is the
    default cap.  Only monotone sequences are searched; that loses no
    generality because cumulative unions preserve the denotation.

    Raises SearchBudgetExceeded past max_nodes search states.
    """
    if cap is None:
        cap = poset.height() + 1
    opens = poset.opens()
    carrier = poset.carrier
    counter = [0]

    def feasible(n):
        # Choose U_0 <= U_1 <= ... <= U_{n-1}; points first covered at
        # slot i are "in" iff parity(i) != parity(n).
        def rec(i, prev_union):
            counter[0] += 1
            if counter[0] > max_nodes:
                raise SearchBudgetExceeded(counter[0])
            if i == n:
                return (carrier & ~prev_union) & target_mask == 0
            want_in = (i % 2) != (n % 2)
            for u in opens:
                if u & prev_union != prev_union:
                    continue
                fresh = u & ~prev_union
                hit = fresh & target_mask
                if want_in and hit != fresh:
                    continue
                if not want_in and hit:
                    continue
                if rec(i + 1, u):
                    return True
            return False

        return rec(0, 0)

    for n in range(cap + 1):
        if feasible(n):
            return n
    raise RuntimeError(
        "no representation up to cap=%d; this should be impossible on a finite poset"
        % cap
    )


def sigma_pi_levels(poset, mask, **kw):
    """(least D-level, least co-D-level) by brute force."""
    sigma = level_bruteforce(poset, mask, **kw)
    pi = level_bruteforce(poset, poset.carrier & ~mask, **kw)
    return sigma, pi
