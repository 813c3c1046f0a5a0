"""Nested tail families and their comparison machinery.

One engine serves both the dual graph and its subdivision: a family lives on
a CurveGraph, is anchored at an arbitrary nonempty vertex set, and is grown
by iterated minimum extraction over the exhaustively enumerated s-tails.
The closure lemmas that guarantee a unique minimum at each step are enforced
as runtime assertions rather than trusted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import InvariantViolation, PreconditionError
from .graph import CurveGraph, canon_key, members, precedes


@dataclass(frozen=True)
class NestedFamily:
    """A chain of s-tails, each strictly preceding the next."""

    level: int
    anchors: int
    members: tuple[int, ...]

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


def nested(G: CurveGraph, s: int, anchors: int) -> NestedFamily:
    """The nested family of s-tails containing the anchors, marked outside.

    Each member is the unique inclusion-minimal candidate strictly preceded
    by the previous member; level 3 additionally demands freeness from every
    member of the level-2 family with the same anchors.  Minimum extraction
    intersects all remaining candidates and asserts the intersection is
    itself a candidate, which turns the wedge-closure lemmas into checks.
    """
    if s not in (1, 2, 3):
        raise PreconditionError(f"level must be 1, 2 or 3, got {s}")
    if anchors == 0:
        raise PreconditionError("anchors must be nonempty")
    if anchors & ~G.full_mask:
        raise PreconditionError("anchors outside the component range")
    key = (s, anchors)
    fam = G._nested.get(key)
    if fam is not None:
        return fam
    if (anchors >> G.marked) & 1:
        fam = NestedFamily(s, anchors, ())
        G._nested[key] = fam
        return fam
    marked_bit = 1 << G.marked
    cands = [
        z
        for z in G.k_tails(s)
        if z & anchors == anchors and not z & marked_bit
    ]
    if s == 3:
        blocked = 0
        for w in nested(G, 2, anchors).members:
            blocked |= G.term_mask(w)
        cands = [z for z in cands if not G.term_mask(z) & blocked]
    chain: list[int] = []
    prev = 0
    while True:
        step = [z for z in cands if precedes(G, prev, z)]
        if not step:
            break
        meet = step[0]
        for z in step[1:]:
            meet &= z
        if meet not in set(step):
            minimal = [
                z for z in step if not any(y != z and y & z == y for y in step)
            ]
            raise InvariantViolation(
                "no unique minimal candidate during nested-family growth",
                level=s,
                anchors=G.names_of(anchors),
                witnesses=[G.names_of(z) for z in minimal[:2]],
            )
        chain.append(meet)
        prev = meet
    if s == 1 and len(chain) != len(cands):
        raise InvariantViolation(
            "1-tail candidates are not totally ordered",
            anchors=G.names_of(anchors),
            chain=[G.names_of(z) for z in chain],
            candidates=[G.names_of(z) for z in cands],
        )
    fam = NestedFamily(s, anchors, tuple(chain))
    G._nested[key] = fam
    return fam


def tail_family(G: CurveGraph, g1: int, g2: int) -> tuple[int, ...]:
    """The multiset of tails attached to a component pair.

    Concatenates the two level-1 families (a tail in both is listed twice,
    and g1 == g2 doubles the level-1 family) with the level-2 and level-3
    families anchored at the pair.
    """
    if not (0 <= g1 < G.p and 0 <= g2 < G.p):
        raise PreconditionError("component index out of range")
    pair_anchor = (1 << g1) | (1 << g2)
    return (
        nested(G, 1, 1 << g1).members
        + nested(G, 1, 1 << g2).members
        + nested(G, 2, pair_anchor).members
        + nested(G, 3, pair_anchor).members
    )


def d_count(G: CurveGraph, family: Iterable[int], node_mask: int) -> int:
    """Number of family members with a terminal node in the given node set.

    Counted once per tail, however many of its terminal nodes are hit.
    """
    return sum(1 for w in family if G.term_mask(w) & node_mask)


def joining_nodes_mask(G: CurveGraph, i: int, j: int) -> int:
    """Bitmask over node indices of the edges joining components i and j."""
    m = 0
    for t, nd in enumerate(G.nodes):
        if not nd.is_loop and {nd.a, nd.b} == {i, j}:
            m |= 1 << t
    return m


@dataclass(frozen=True)
class SymmDiffReport:
    """Symmetric difference of two same-level families sharing a component."""

    level: int
    i: int
    j: int
    k: int
    family: tuple[int, ...]
    difference_nodes: tuple[int, ...]  # node indices; empty or a pair
    condition: str  # "empty" | "condition-i" | "condition-ii"


def symm_diff(G: CurveGraph, s: int, i: int, j: int, k: int) -> SymmDiffReport:
    """Symmetric difference of the level-s families for (i, k) and (j, k).

    Requires i != j with at least one node joining them.  For s == 1 the
    pairwise family is read as the union of the two single-component level-1
    families.  The report carries the structural classification and, at
    level 2, the two difference nodes oriented so the first lies on a node
    joining i and j.
    """
    if i == j:
        raise PreconditionError("symmetric difference needs distinct i, j")
    ij_nodes = joining_nodes_mask(G, i, j)
    if not ij_nodes:
        raise PreconditionError(
            f"components {G.names[i]} and {G.names[j]} share no node"
        )
    fam_a, fam_b = _level_families(G, s, i, j, k)
    sd = sorted(fam_a ^ fam_b, key=canon_key)
    # the chain shape is asserted, not assumed
    for t in range(1, len(sd)):
        if sd[t - 1] & sd[t] != sd[t - 1]:
            raise InvariantViolation(
                "symmetric difference is not totally ordered by inclusion",
                level=s,
                members=[G.names_of(z) for z in sd],
            )
        if not G.term_mask(sd[t - 1]) & G.term_mask(sd[t]):
            raise InvariantViolation(
                "consecutive symmetric-difference members are not terminal",
                level=s,
                members=[G.names_of(z) for z in sd],
            )
    if not sd:
        return SymmDiffReport(s, i, j, k, (), (), "empty")
    condition = _classify(G, s, i, j, k, sd, fam_a, fam_b)
    diff_nodes: tuple[int, ...] = ()
    if s == 2:
        diff_nodes = _difference_nodes(G, i, j, k, sd, ij_nodes)
    return SymmDiffReport(s, i, j, k, tuple(sd), diff_nodes, condition)


def _level_families(G, s, i, j, k) -> tuple[set, set]:
    if s == 1:
        fam_a = set(nested(G, 1, 1 << i).members) | set(nested(G, 1, 1 << k).members)
        fam_b = set(nested(G, 1, 1 << j).members) | set(nested(G, 1, 1 << k).members)
    else:
        fam_a = set(nested(G, s, (1 << i) | (1 << k)).members)
        fam_b = set(nested(G, s, (1 << j) | (1 << k)).members)
    return fam_a, fam_b


def _sd_members(G, s, i, j, k) -> list[int]:
    """Raw symmetric-difference members at one level, inclusion-ordered."""
    fam_a, fam_b = _level_families(G, s, i, j, k)
    return sorted(fam_a ^ fam_b, key=canon_key)


def _classify(G, s, i, j, k, sd, fam_a, fam_b) -> str:
    if s == 1:
        # A nonempty level-1 difference is a single tail terminating exactly
        # in the nodes joining i and j.
        if len(sd) != 1 or G.term_mask(sd[0]) != joining_nodes_mask(G, i, j):
            raise InvariantViolation(
                "level-1 symmetric difference is not a single (i,j)-cut tail",
                members=[G.names_of(z) for z in sd],
            )
        return "condition-i"
    cross = (1 << i) | (1 << j)
    union = fam_a | fam_b
    non_containing = [w for w in union if w & cross != cross]
    if len(non_containing) == 1 and non_containing[0] == sd[0]:
        return "condition-i"
    if s == 3:
        sd2 = _sd_members(G, 2, i, j, k)
        if sd2:
            zterm = G.term_mask(sd2[-1])
            hits = [w for w in union if G.term_mask(w) & zterm]
            if len(hits) == 1 and hits[0] == sd[0]:
                return "condition-ii"
    raise InvariantViolation(
        "nonempty symmetric difference satisfies neither condition",
        level=s,
        members=[G.names_of(z) for z in sd],
    )


def _difference_nodes(G, i, j, k, sd, ij_nodes) -> tuple[int, int]:
    w0, wm = sd[0], sd[-1]
    if len(sd) == 1:
        pair = members(G.term_mask(w0))
        if len(pair) != 2:
            raise InvariantViolation(
                "level-2 symmetric-difference member is not a 2-tail",
                member=G.names_of(w0),
            )
        s1, s2 = pair
    else:
        d1 = G.term_mask(w0) & ~G.term_mask(sd[1])
        d2 = G.term_mask(wm) & ~G.term_mask(sd[-2])
        if d1.bit_count() != 1 or d2.bit_count() != 1:
            raise InvariantViolation(
                "difference nodes are not unique at the chain ends",
                members=[G.names_of(z) for z in sd],
            )
        s1 = d1.bit_length() - 1
        s2 = d2.bit_length() - 1
    def in_ij(t):
        return bool((ij_nodes >> t) & 1)

    if in_ij(s2) and not in_ij(s1):
        s1, s2 = s2, s1
    elif in_ij(s1) and in_ij(s2):
        sd3 = _sd_members(G, 3, i, j, k)
        if sd3:
            t3 = G.term_mask(sd3[0])
            if (t3 >> s1) & 1 and not (t3 >> s2) & 1:
                s1, s2 = s2, s1
    return (s1, s2)
