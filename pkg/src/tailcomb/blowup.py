"""Local blowup choices at pairs of reducible nodes and the resolution test.

A choice pairs the sides of two distinct non-loop nodes; each choice carries
two distinguished points, encoded by triples of component pairs.  The
quasistable-point predicate runs under a convention profile: the default
"reconstructed" profile conditions on the two diagonal corner pairs, which is
the reading consistent with the banana fixture and the resolution theorem;
"as-displayed" keeps the literally printed pair set so the harness can
demonstrate the discrepancy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

from .errors import GraphError, InvariantViolation, PreconditionError
from .graph import CurveGraph
from .tails import nested
from .degrees import delta, twister

RECONSTRUCTED = "reconstructed"
AS_DISPLAYED = "as-displayed"
PROFILES = (RECONSTRUCTED, AS_DISPLAYED)


def _check_profile(profile: str) -> str:
    if profile not in PROFILES:
        raise PreconditionError(f"unknown profile {profile!r}; use one of {PROFILES}")
    return profile


@dataclass(frozen=True)
class BlowupChoice:
    """An unordered pair of distinct reducible nodes with a side matching.

    r1 < r2 are node indices; the matching holds two (side-of-r1, side-of-r2)
    component pairs covering all four sides.
    """

    r1: int
    r2: int
    matching: frozenset

    def matched_pairs(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return tuple(sorted(self.matching))


def _node_sides(G: CurveGraph, r: int) -> tuple[int, int]:
    nd = G.nodes[r]
    if nd.is_loop:
        raise PreconditionError(f"node {nd.id!r} is a loop, not a reducible node")
    return (nd.a, nd.b)


def make_choice(G: CurveGraph, r1: int, r2: int, matching) -> BlowupChoice:
    """Normalize and validate a blowup choice (pair order, side coverage)."""
    if r1 == r2:
        raise PreconditionError("a blowup choice needs two distinct nodes")
    if r1 > r2:
        r1, r2 = r2, r1
        matching = [(y, x) for (x, y) in matching]
    s1 = set(_node_sides(G, r1))
    s2 = set(_node_sides(G, r2))
    pairs = frozenset((int(x), int(y)) for x, y in matching)
    if len(pairs) != 2:
        raise PreconditionError("a matching consists of two side pairs")
    if {x for x, _ in pairs} != s1 or {y for _, y in pairs} != s2:
        raise PreconditionError(
            f"matching {sorted(pairs)} does not cover the sides of "
            f"{G.nodes[r1].id!r} and {G.nodes[r2].id!r}"
        )
    return BlowupChoice(r1, r2, pairs)


def pair_matchings(G: CurveGraph, r1: int, r2: int) -> tuple[BlowupChoice, BlowupChoice]:
    """The two possible choices at a pair of distinct reducible nodes."""
    if r1 > r2:
        r1, r2 = r2, r1
    x, xb = _node_sides(G, r1)
    y, yb = _node_sides(G, r2)
    return (
        BlowupChoice(r1, r2, frozenset(((x, y), (xb, yb)))),
        BlowupChoice(r1, r2, frozenset(((x, yb), (xb, y)))),
    )


@dataclass(frozen=True)
class DistinguishedPoint:
    """One of the two distinguished points of a blowup choice.

    The triple consists of the two matched pairs plus one cross pair; the
    canonical labels read off the repeated first and second coordinates:
    triple = {(g1, g2), (g1, g2p), (g1p, g2)}.
    """

    choice: BlowupChoice
    index: int  # 1 or 2, in the deterministic order below
    triple: frozenset
    g1: int
    g1p: int
    g2: int
    g2p: int

    def describe(self, G: CurveGraph) -> dict:
        n = G.names
        return {
            "pair": [G.nodes[self.choice.r1].id, G.nodes[self.choice.r2].id],
            "matching": [[n[x], n[y]] for x, y in self.choice.matched_pairs()],
            "point": self.index,
            "triple": sorted([n[x], n[y]] for x, y in self.triple),
            "labels": {
                "g1": n[self.g1],
                "g1'": n[self.g1p],
                "g2": n[self.g2],
                "g2'": n[self.g2p],
            },
        }


def distinguished_points(
    G: CurveGraph, choice: BlowupChoice
) -> tuple[DistinguishedPoint, DistinguishedPoint]:
    """The two distinguished points of a choice.

    For matching {(x,y), (xb,yb)} the triples are the matching plus (x,yb)
    and the matching plus (xb,y); the extra pair determines the point.
    """
    (x, y), (xb, yb) = choice.matched_pairs()
    base = set(choice.matching)
    a1 = DistinguishedPoint(
        choice, 1, frozenset(base | {(x, yb)}), g1=x, g1p=xb, g2=yb, g2p=y
    )
    a2 = DistinguishedPoint(
        choice, 2, frozenset(base | {(xb, y)}), g1=xb, g1p=x, g2=y, g2p=yb
    )
    return (a1, a2)


def condition_pairs(point: DistinguishedPoint, profile: str) -> tuple:
    _check_profile(profile)
    if profile == RECONSTRUCTED:
        return ((point.g1, point.g2), (point.g1p, point.g2p))
    return ((point.g1, point.g2), (point.g1, point.g2p))


@dataclass(frozen=True)
class PointVerdict:
    ok: bool
    profile: str
    # On failure: the condition pair and, per offending node, the tails
    # whose terminal sets contribute it.
    failing_pair: tuple[int, int] | None = None
    contributing: tuple = ()

    def describe(self, G: CurveGraph) -> dict:
        out = {"quasistable": self.ok, "profile": self.profile}
        if not self.ok:
            a, b = self.failing_pair
            out["condition_pair"] = [G.names[a], G.names[b]]
            out["contributing_tails"] = [
                {"node": G.nodes[r].id, "tails": [list(G.names_of(w)) for w in ws]}
                for r, ws in self.contributing
            ]
        return out


def is_quasistable_point(
    G: CurveGraph, point: DistinguishedPoint, profile: str = RECONSTRUCTED
) -> PointVerdict:
    """Whether at most one of the two nodes is terminal across each condition
    pair's level-2 and level-3 families."""
    _check_profile(profile)
    r1, r2 = point.choice.r1, point.choice.r2
    bits = (1 << r1) | (1 << r2)
    for (a, b) in condition_pairs(point, profile):
        anchors = (1 << a) | (1 << b)
        fam = nested(G, 2, anchors).members + nested(G, 3, anchors).members
        covered = 0
        for w in fam:
            covered |= G.term_mask(w) & bits
        if covered.bit_count() > 1:
            contributing = tuple(
                (r, tuple(w for w in fam if G.term_mask(w) & (1 << r)))
                for r in (r1, r2)
            )
            return PointVerdict(False, profile, (a, b), contributing)
    return PointVerdict(True, profile)


def choice_from_tails(G: CurveGraph, r1: int, r2: int) -> BlowupChoice | None:
    """The matching induced by the tails covering both nodes, if any.

    Every 2- or 3-tail with both nodes terminal pairs the sides it contains;
    all covering tails must agree, which realizes the order-independence of
    the tail-product blowup sequence as a runtime assertion.
    """
    if r1 > r2:
        r1, r2 = r2, r1
    _node_sides(G, r1), _node_sides(G, r2)
    bits = (1 << r1) | (1 << r2)
    induced: BlowupChoice | None = None
    witness = None
    for w in G.tails():
        if G.k(w) not in (2, 3):
            continue
        if G.term_mask(w) & bits != bits:
            continue
        n1, n2 = G.nodes[r1], G.nodes[r2]
        x = n1.a if (w >> n1.a) & 1 else n1.b
        y = n2.a if (w >> n2.a) & 1 else n2.b
        xo = n1.a if n1.b == x else n1.b
        yo = n2.a if n2.b == y else n2.b
        cand = BlowupChoice(r1, r2, frozenset(((x, y), (xo, yo))))
        if induced is None:
            induced, witness = cand, w
        elif cand.matching != induced.matching:
            raise InvariantViolation(
                "covering tails induce conflicting matchings",
                pair=(G.nodes[r1].id, G.nodes[r2].id),
                tails=[list(G.names_of(witness)), list(G.names_of(w))],
            )
    return induced


class BlowupPlan:
    """Per-pair local blowup choices; pairs may be left unchosen."""

    def __init__(self, choices: dict[tuple[int, int], BlowupChoice] | None = None):
        self.choices = dict(choices or {})

    def get(self, r1: int, r2: int) -> BlowupChoice | None:
        return self.choices.get((min(r1, r2), max(r1, r2)))

    def set(self, choice: BlowupChoice):
        self.choices[(choice.r1, choice.r2)] = choice

    def __len__(self):
        return len(self.choices)

    def __eq__(self, other):
        return isinstance(other, BlowupPlan) and self.choices == other.choices

    def to_spec(self, G: CurveGraph) -> list:
        out = []
        for (r1, r2), ch in sorted(self.choices.items()):
            out.append(
                {
                    "pair": [G.nodes[r1].id, G.nodes[r2].id],
                    "match": [
                        [G.names[x], G.names[y]] for x, y in ch.matched_pairs()
                    ],
                }
            )
        return out

    def to_json(self, G: CurveGraph, **kw) -> str:
        kw.setdefault("sort_keys", True)
        return json.dumps(self.to_spec(G), **kw)

    @classmethod
    def from_spec(cls, G: CurveGraph, data) -> "BlowupPlan":
        if not isinstance(data, list):
            raise GraphError("a plan is a JSON array of pair choices")
        plan = cls()
        for entry in data:
            try:
                ids = entry["pair"]
                match = entry["match"]
            except (KeyError, TypeError):
                raise GraphError(f"malformed plan entry {entry!r}") from None
            if len(ids) != 2:
                raise GraphError(f"plan pair {ids!r} needs two node ids")
            r1, r2 = (G.node_index(i) for i in ids)
            pairs = [(G.index(x), G.index(y)) for x, y in match]
            plan.set(make_choice(G, r1, r2, pairs))
        return plan


def plan_from_tails(G: CurveGraph) -> BlowupPlan:
    """The plan that chooses, at every coverable pair, the tail-induced
    matching (the combinatorial shadow of blowing up all 2- and 3-tail
    squares)."""
    plan = BlowupPlan()
    red = G.reducible_nodes()
    for r1, r2 in combinations(red, 2):
        ch = choice_from_tails(G, r1, r2)
        if ch is not None:
            plan.set(ch)
    return plan


# -- admissibility ----------------------------------------------------------


@dataclass(frozen=True)
class IneqInstance:
    ineq: int  # 18..25
    args: tuple
    value: int
    gated: bool
    ok: bool


@dataclass(frozen=True)
class AdmissibilityReport:
    r1: int
    r2: int
    instances: tuple[IneqInstance, ...]

    @property
    def ok(self) -> bool:
        return all(inst.ok or not inst.gated for inst in self.instances)

    def failures(self) -> tuple[IneqInstance, ...]:
        return tuple(i for i in self.instances if i.gated and not i.ok)


def admissibility_check(
    G: CurveGraph,
    r1: int,
    r2: int,
    choice: BlowupChoice | None = None,
    gated: bool = True,
) -> AdmissibilityReport:
    """Evaluate the admissibility inequalities at a node pair.

    For distinct nodes a matching must be supplied (it determines which
    divisor pairs are treated as intersecting); for r1 == r2 the diagonal
    pairing of the node's two sides is forced.  ``gated=False`` evaluates
    every instance regardless of the intersection hypothesis, for
    exploration only.
    """
    twister(G)  # warm the table once
    diagonal = r1 == r2
    if diagonal:
        # The diagonal blowup pairs each side with the other one.
        g1, g1p = _node_sides(G, r1)
        g2, g2p = g1p, g1
        matched = frozenset(((g1, g2), (g1p, g2p)))
    else:
        if choice is None:
            raise PreconditionError("distinct nodes need a matching")
        if (min(r1, r2), max(r1, r2)) != (choice.r1, choice.r2):
            raise PreconditionError("choice does not describe this node pair")
        r1, r2 = choice.r1, choice.r2
        (x, y), (xb, yb) = choice.matched_pairs()
        matched = choice.matching
        g1, g1p, g2, g2p = x, xb, y, yb
    triples = (
        frozenset(matched | {(g1, g2p)}),
        frozenset(matched | {(g1p, g2)}),
    )

    def gate(pa, pb):
        if pa[0] == pb[0] or pa[1] == pb[1]:
            return True
        return any(pa in t and pb in t for t in triples)

    instances: list[IneqInstance] = []

    def emit(ineq, args, value, gate_ok):
        counts = gate_ok or not gated
        instances.append(IneqInstance(ineq, args, value, counts, abs(value) <= 1))

    # (18): every other node S joining distinct components m, n.
    sides1 = (g1, g1p)
    sides2 = (g2, g2p)
    for t, nd in enumerate(G.nodes):
        if nd.is_loop or t in (r1, r2):
            continue
        m, n = nd.a, nd.b
        for a in sides1:
            for ap in sides1:
                for b in sides2:
                    for bp in sides2:
                        g = gate((a, b), (ap, bp))
                        if not g and gated:
                            continue
                        v = delta(G, a, b, m, n) - delta(G, ap, bp, m, n)
                        emit(18, (nd.id, a, ap, b, bp), v, g)
    if not diagonal:
        orders1 = ((g1, g1p), (g1p, g1))
        orders2 = ((g2, g2p), (g2p, g2))
        for a, ap in orders1:
            for b, bp in orders2:
                emit(19, (a, ap, b, bp),
                     delta(G, a, b, a, ap) - delta(G, a, bp, a, ap), True)
                emit(20, (a, ap, b, bp),
                     delta(G, a, b, b, bp) - delta(G, ap, b, b, bp), True)
                emit(21, (a, ap, b, bp),
                     delta(G, a, b, a, ap) - delta(G, ap, b, a, ap) - 1, True)
                emit(22, (a, ap, b, bp),
                     delta(G, a, b, b, bp) - delta(G, a, bp, b, bp) - 1, True)
                g = gate((a, b), (ap, bp))
                if g or not gated:
                    emit(23, (a, ap, b, bp),
                         delta(G, a, b, a, ap) - delta(G, ap, bp, a, ap) - 1, g)
                    emit(24, (a, ap, b, bp),
                         delta(G, a, b, b, bp) - delta(G, ap, bp, b, bp) - 1, g)
    else:
        for a, ap in ((g1, g1p), (g1p, g1)):
            emit(25, (a, ap),
                 delta(G, a, a, a, ap) - delta(G, a, ap, a, ap) - 1, True)
    return AdmissibilityReport(min(r1, r2), max(r1, r2), tuple(instances))


# -- resolution -------------------------------------------------------------


@dataclass(frozen=True)
class MatchingVerdict:
    choice: BlowupChoice
    points: tuple[PointVerdict, PointVerdict]

    @property
    def ok(self) -> bool:
        return self.points[0].ok and self.points[1].ok


@dataclass(frozen=True)
class PairVerdict:
    r1: int
    r2: int
    chosen: bool
    matchings: tuple[MatchingVerdict, ...]

    @property
    def ok(self) -> bool:
        return all(m.ok for m in self.matchings)


@dataclass(frozen=True)
class ResolutionReport:
    profile: str
    pairs: tuple[PairVerdict, ...]

    @property
    def resolved(self) -> bool:
        return all(p.ok for p in self.pairs)

    def failing_pairs(self) -> tuple[PairVerdict, ...]:
        return tuple(p for p in self.pairs if not p.ok)

    def describe(self, G: CurveGraph) -> dict:
        return {
            "profile": self.profile,
            "resolved": self.resolved,
            "pairs": [
                {
                    "pair": [G.nodes[p.r1].id, G.nodes[p.r2].id],
                    "chosen": p.chosen,
                    "ok": p.ok,
                    "matchings": [
                        {
                            "match": [
                                [G.names[x], G.names[y]]
                                for x, y in m.choice.matched_pairs()
                            ],
                            "ok": m.ok,
                            "points": [pt.describe(G) for pt in m.points],
                        }
                        for m in p.matchings
                    ],
                }
                for p in self.pairs
            ],
        }


def _evaluate_matching(G, choice, profile) -> MatchingVerdict:
    a1, a2 = distinguished_points(G, choice)
    return MatchingVerdict(
        choice,
        (is_quasistable_point(G, a1, profile), is_quasistable_point(G, a2, profile)),
    )


def decide_resolution(
    G: CurveGraph, plan: BlowupPlan, profile: str = RECONSTRUCTED
) -> ResolutionReport:
    """Whether the plan's local choices resolve every pair of distinct
    reducible nodes.

    A chosen pair needs both distinguished points of its matching
    quasistable; an unchosen pair needs that for both matchings, since
    either refinement must remain available.  Same-node pairs and pairs
    involving loops are unconditionally resolved and carry no verdict.
    """
    _check_profile(profile)
    verdicts = []
    red = G.reducible_nodes()
    for r1, r2 in combinations(red, 2):
        choice = plan.get(r1, r2)
        if choice is not None:
            mats = (_evaluate_matching(G, choice, profile),)
            chosen = True
        else:
            mats = tuple(
                _evaluate_matching(G, ch, profile)
                for ch in pair_matchings(G, r1, r2)
            )
            chosen = False
        verdicts.append(PairVerdict(r1, r2, chosen, mats))
    return ResolutionReport(profile, tuple(verdicts))


# -- minimality -------------------------------------------------------------

FREE_PAIR = "free"
FORCED_PAIR = "forced"
BLOCKED_PAIR = "blocked"


@dataclass(frozen=True)
class MinimalityReport:
    profile: str
    classification: tuple  # ((r1, r2), kind, passing choices) per pair
    minimal_plan: BlowupPlan | None
    phi_t: BlowupPlan
    phi_t_minimal: bool

    def forced_pairs(self):
        return tuple(p for p, kind, _ in self.classification if kind == FORCED_PAIR)

    def blocked_pairs(self):
        return tuple(p for p, kind, _ in self.classification if kind == BLOCKED_PAIR)

    def describe(self, G: CurveGraph) -> dict:
        return {
            "profile": self.profile,
            "pairs": [
                {
                    "pair": [G.nodes[r1].id, G.nodes[r2].id],
                    "kind": kind,
                    "passing": [
                        [[G.names[x], G.names[y]] for x, y in ch.matched_pairs()]
                        for ch in passing
                    ],
                }
                for (r1, r2), kind, passing in self.classification
            ],
            "minimal_plan": None
            if self.minimal_plan is None
            else self.minimal_plan.to_spec(G),
            "plan_from_tails": self.phi_t.to_spec(G),
            "plan_from_tails_minimal": self.phi_t_minimal,
        }


def minimality_probe(G: CurveGraph, profile: str = RECONSTRUCTED) -> MinimalityReport:
    """Classify every pair as free, forced or blocked and build the minimal
    resolving plan (choices exactly on the forced pairs)."""
    _check_profile(profile)
    classification = []
    minimal = BlowupPlan()
    blocked = False
    for r1, r2 in combinations(G.reducible_nodes(), 2):
        passing = tuple(
            ch
            for ch in pair_matchings(G, r1, r2)
            if _evaluate_matching(G, ch, profile).ok
        )
        if len(passing) == 2:
            kind = FREE_PAIR
        elif len(passing) == 1:
            kind = FORCED_PAIR
            minimal.set(passing[0])
        else:
            kind = BLOCKED_PAIR
            blocked = True
        classification.append(((r1, r2), kind, passing))
    phi_t = plan_from_tails(G)
    phi_t_minimal = not blocked and phi_t == minimal
    return MinimalityReport(
        profile,
        tuple(classification),
        None if blocked else minimal,
        phi_t,
        phi_t_minimal,
    )
