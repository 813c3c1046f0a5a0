"""The node subdivision of a dual graph and the synchronization predicate.

Each node of the base graph is replaced by a chain of two exceptional
vertices, producing another CurveGraph, so the whole tail machinery applies
unchanged.  Canonical liftings, the hat families anchored at exceptional
vertices over a distinguished point, and the multiset comparison that
defines synchronization all live here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .blowup import DistinguishedPoint
from .errors import InvariantViolation, PreconditionError
from .graph import CurveGraph, Node, canon_key, members, precedes
from .tails import NestedFamily, d_count, nested


class LiftedGraph:
    """Subdivision of a base graph with the contraction bookkeeping.

    Every base node S with endpoints (u, v) becomes the chain
    C_u -- E(S,u) -- E(S,v) -- C_v (loop sides are numbered 1 and 2); the
    lifted graph is itself a CurveGraph marked at the strict transform of
    the base marked component.
    """

    __slots__ = ("base", "graph", "strict", "mu_comp", "over_node", "_exc")

    def __init__(self, base: CurveGraph):
        self.base = base
        names: list[str] = []
        mu_comp: list[int | None] = []
        over_node: list[int | None] = []
        strict = []
        for m, nm in enumerate(base.names):
            strict.append(len(names))
            names.append(nm)
            mu_comp.append(m)
            over_node.append(None)
        exc: dict[tuple[int, int | str], int] = {}
        edges: list[Node] = []
        for t, nd in enumerate(base.nodes):
            if nd.is_loop:
                keys = (1, 2)
                labels = ("1", "2")
            else:
                keys = (nd.a, nd.b)
                labels = (base.names[nd.a], base.names[nd.b])
            vid = []
            for key, lab in zip(keys, labels):
                exc[(t, key)] = len(names)
                vid.append(len(names))
                names.append(f"E({nd.id},{lab})")
                mu_comp.append(None)
                over_node.append(t)
            edges.append(Node(f"{nd.id}:{labels[0]}", strict[nd.a], vid[0]))
            edges.append(Node(f"{nd.id}:mid", vid[0], vid[1]))
            edges.append(Node(f"{nd.id}:{labels[1]}", vid[1], strict[nd.b]))
        self.graph = CurveGraph(names, edges, strict[base.marked])
        self.strict = tuple(strict)
        self.mu_comp = tuple(mu_comp)
        self.over_node = tuple(over_node)
        self._exc = exc

    def exceptional(self, node: int, key: int) -> int:
        """Lifted vertex E(node, key); key is the side component for a
        non-loop node and the slot 1 or 2 for a loop."""
        try:
            return self._exc[(node, key)]
        except KeyError:
            raise PreconditionError(
                f"no exceptional vertex over node index {node} with key {key}"
            ) from None

    def chain_edges(self, node: int) -> tuple[int, int, int]:
        """Indices of the three lifted edges over a base node."""
        return (3 * node, 3 * node + 1, 3 * node + 2)

    def mu_image(self, mask: int) -> tuple[int, bool]:
        """Base subcurve under the contraction, with a purely-exceptional flag."""
        img = 0
        for v in members(mask):
            m = self.mu_comp[v]
            if m is not None:
                img |= 1 << m
        return img, (mask != 0 and img == 0)

    def to_dot(self) -> str:
        g = self.graph
        lines = ["graph lifted {"]
        for i, nm in enumerate(g.names):
            if self.mu_comp[i] is None:
                lines.append(f'  "{nm}" [shape=square, width=0.25, height=0.25];')
            else:
                shape = "doublecircle" if i == g.marked else "circle"
                lines.append(f'  "{nm}" [shape={shape}];')
        for nd in g.nodes:
            lines.append(f'  "{g.names[nd.a]}" -- "{g.names[nd.b]}" [label="{nd.id}"];')
        lines.append("}")
        return "\n".join(lines)


def build_c2(G: CurveGraph) -> LiftedGraph:
    if G._c2 is None:
        G._c2 = LiftedGraph(G)
    return G._c2


def canonical_liftings(LG: LiftedGraph, W: int) -> tuple[int, int, int]:
    """The three canonical liftings of a proper nonempty base subcurve.

    L0 carries the strict transforms and both exceptional vertices of every
    interior node; L1 adds, per terminal node, the exceptional vertex on the
    W side; L2 adds the far one.  The chain L0 < L1 < L2 (with disjoint
    terminal sets, provided W is connected) is asserted.
    """
    base = LG.base
    if not base.is_proper(W):
        raise PreconditionError("canonical liftings need a proper nonempty subcurve")
    core = 0
    for m in members(W):
        core |= 1 << LG.strict[m]
    l0 = core
    add1 = 0
    add2 = 0
    for t, nd in enumerate(base.nodes):
        ina = (W >> nd.a) & 1
        inb = (W >> nd.b) & 1
        if nd.is_loop:
            if ina:
                l0 |= (1 << LG.exceptional(t, 1)) | (1 << LG.exceptional(t, 2))
            continue
        if ina and inb:
            l0 |= (1 << LG.exceptional(t, nd.a)) | (1 << LG.exceptional(t, nd.b))
        elif ina:
            add1 |= 1 << LG.exceptional(t, nd.a)
            add2 |= 1 << LG.exceptional(t, nd.b)
        elif inb:
            add1 |= 1 << LG.exceptional(t, nd.b)
            add2 |= 1 << LG.exceptional(t, nd.a)
    l1 = l0 | add1
    l2 = l1 | add2
    lg = LG.graph
    if base.connected(W):
        for a, b in ((l0, l1), (l1, l2)):
            if not precedes(lg, a, b):
                raise InvariantViolation(
                    "canonical liftings do not chain",
                    subcurve=base.names_of(W),
                    liftings=[lg.names_of(x) for x in (l0, l1, l2)],
                )
    for l in (l0, l1, l2):
        img, pure = LG.mu_image(l)
        if img != W or pure:
            raise InvariantViolation(
                "canonical lifting does not contract to its subcurve",
                subcurve=base.names_of(W),
                lifting=lg.names_of(l),
            )
    return (l0, l1, l2)


@dataclass(frozen=True)
class HatFamilies:
    """Nested families on the subdivision attached to a distinguished point."""

    point: DistinguishedPoint
    t1: tuple[NestedFamily, NestedFamily]
    t2: NestedFamily
    t3: NestedFamily


def hat_families(G: CurveGraph, point: DistinguishedPoint) -> HatFamilies:
    """Families on the subdivision anchored at E(R1, g1) and E(R2, g2)."""
    LG = build_c2(G)
    lg = LG.graph
    a1 = 1 << LG.exceptional(point.choice.r1, point.g1)
    a2 = 1 << LG.exceptional(point.choice.r2, point.g2)
    return HatFamilies(
        point,
        (nested(lg, 1, a1), nested(lg, 1, a2)),
        nested(lg, 2, a1 | a2),
        nested(lg, 3, a1 | a2),
    )


def base_level_multiset(G: CurveGraph, point: DistinguishedPoint, s: int) -> tuple[int, ...]:
    """The base multiset at one level: the three families of the point's
    triple pairs, concatenated."""
    out: list[int] = []
    for (a, b) in ((point.g1, point.g2), (point.g1, point.g2p), (point.g1p, point.g2)):
        out.extend(nested(G, s, (1 << a) | (1 << b)).members)
    return tuple(sorted(out, key=canon_key))


@dataclass(frozen=True)
class LevelSync:
    level: int
    ok: bool
    hat_images: tuple[int, ...]  # base masks, sorted; purely exceptional kept as 0
    base_multiset: tuple[int, ...]
    pure_exceptional: tuple[int, ...]  # offending lifted members


@dataclass(frozen=True)
class SyncReport:
    point: DistinguishedPoint
    levels: tuple[LevelSync, ...]
    diagnostic: "OneTailDiagnostic"

    @property
    def synchronized(self) -> bool:
        return all(l.ok for l in self.levels)

    def level_ok(self, s: int) -> bool:
        """Per-level verdict; level 1 always holds (the diagnostic is
        structural, not a synchronization condition)."""
        if s == 1:
            return True
        for l in self.levels:
            if l.level == s:
                return l.ok
        raise PreconditionError(f"level must be 1, 2 or 3, got {s}")

    def describe(self, G: CurveGraph) -> dict:
        return {
            "point": self.point.describe(G),
            "synchronized": self.synchronized,
            "levels": [
                {
                    "level": l.level,
                    "ok": l.ok,
                    "hat_images": [list(G.names_of(w)) for w in l.hat_images],
                    "base": [list(G.names_of(w)) for w in l.base_multiset],
                }
                for l in self.levels
            ],
            "one_tail_diagnostic_ok": self.diagnostic.ok,
        }


def is_synchronized(G: CurveGraph, point: DistinguishedPoint) -> SyncReport:
    """Compare hat families against the base multisets at levels 2 and 3.

    A level synchronizes when the contraction images of the hat family equal
    the base multiset with multiplicity and no member is purely exceptional.
    Level 1 always synchronizes; its structural diagnostic is attached.
    """
    LG = build_c2(G)
    hats = hat_families(G, point)
    levels = []
    for s in (2, 3):
        fam = hats.t2 if s == 2 else hats.t3
        images = []
        pure_members = []
        for y in fam.members:
            img, pure = LG.mu_image(y)
            if pure:
                pure_members.append(y)
            images.append(img)
        images.sort(key=canon_key)
        base = base_level_multiset(G, point, s)
        ok = not pure_members and tuple(images) == base
        levels.append(LevelSync(s, ok, tuple(images), base, tuple(pure_members)))
    return SyncReport(point, tuple(levels), one_tail_diagnostic(G, point))


# -- level-1 diagnostic -------------------------------------------------------


@dataclass(frozen=True)
class OneTailDiagnostic:
    """Structural account of the level-1 hat families.

    ok gates on facts that hold unconditionally: every member contracts to a
    1-tail avoiding the marked component; the members whose image crosses
    the anchored node are exactly the three canonical liftings of each base
    1-tail containing both of its sides; and the leftover members match the
    separating-node pattern.  The two candidate counts for the level-1 base
    multiset are recorded without gating, since the intended reading is
    ambiguous.
    """

    ok: bool
    detail: tuple
    hat_count: int
    reading_four_term: int
    reading_six_term: int


def one_tail_diagnostic(G: CurveGraph, point: DistinguishedPoint) -> OneTailDiagnostic:
    LG = build_c2(G)
    lg = LG.graph
    ok = True
    detail = []
    hat_total = 0
    for (r, g) in ((point.choice.r1, point.g1), (point.choice.r2, point.g2)):
        nd = G.nodes[r]
        fam = nested(lg, 1, 1 << LG.exceptional(r, g)).members
        hat_total += len(fam)
        crossing = []
        rest = []
        for y in fam:
            img, pure = LG.mu_image(y)
            if pure or not G.is_tail(img) or (img >> G.marked) & 1:
                ok = False
                detail.append(("bad-image", nd.id, lg.names_of(y)))
                continue
            both = (img >> nd.a) & 1 and (img >> nd.b) & 1
            (crossing if both else rest).append(y)
        expected = set()
        for w in G.k_tails(1):
            if (w >> G.marked) & 1:
                continue
            if (w >> nd.a) & 1 and (w >> nd.b) & 1:
                expected.update(canonical_liftings(LG, w))
        if set(crossing) != expected:
            ok = False
            detail.append(("crossing-mismatch", nd.id))
        # Non-crossing members exist exactly over a separating node.
        exp_rest: set[int] = set()
        side = _component_without(G, nd.a, r)
        if not (side >> nd.b) & 1:
            v = side if not (side >> G.marked) & 1 else G.full_mask ^ side
            l0, l1, l2 = canonical_liftings(LG, v)
            exp_rest = {l1, l2} if (v >> g) & 1 else {l2}
        if set(rest) != exp_rest:
            ok = False
            detail.append(("separating-mismatch", nd.id))
    t1 = lambda c: len(nested(G, 1, 1 << c).members)
    four = t1(point.g1) + t1(point.g1p) + t1(point.g2) + t1(point.g2p)
    six = 2 * t1(point.g1) + t1(point.g1p) + 2 * t1(point.g2) + t1(point.g2p)
    return OneTailDiagnostic(ok, tuple(detail), hat_total, four, six)


def _component_without(G: CurveGraph, start: int, skip_node: int) -> int:
    """Vertex set reachable from start without using the given node."""
    seen = 1 << start
    frontier = [start]
    while frontier:
        v = frontier.pop()
        for t, nd in enumerate(G.nodes):
            if t == skip_node or nd.is_loop:
                continue
            if nd.a == v or nd.b == v:
                u = nd.b if nd.a == v else nd.a
                if not (seen >> u) & 1:
                    seen |= 1 << u
                    frontier.append(u)
    return seen


def eq34_level2(G: CurveGraph, point: DistinguishedPoint) -> tuple:
    """Node-by-node counting identity at level 2 for a synchronized point.

    For every base node, the number of base level-2 family members having it
    terminal must equal the total over its three lifted edges of hat family
    members having that edge terminal.  Returns the violations.
    """
    LG = build_c2(G)
    lg = LG.graph
    hats = hat_families(G, point)
    base = base_level_multiset(G, point, 2)
    bad = []
    for t, nd in enumerate(G.nodes):
        lhs = d_count(G, base, 1 << t)
        rhs = 0
        for e in LG.chain_edges(t):
            rhs += d_count(lg, hats.t2.members, 1 << e)
        if lhs != rhs:
            bad.append((nd.id, lhs, rhs))
    return tuple(bad)
