"""Vertex-marked multigraph model of a nodal curve's dual graph.

Components are vertices and nodes are edges; a loop is a self-node of a
single component and is never a reducible node.  Subcurves are encoded as
integer bitmasks over the component indices, so every set operation is exact,
hashable and cheap.  All values are immutable after construction; derived
data (adjacency, tails, nested families) is cached lazily on the instance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .errors import GraphError

PRECEDES = "precedes"
TERMINAL = "terminal"
FREE = "free"


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def members(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def canon_key(mask: int):
    """Sort key: by size, then lexicographically on the vertex tuple."""
    return (mask.bit_count(), members(mask))


@dataclass(frozen=True)
class Node:
    """One node of the curve: an edge joining two (possibly equal) components."""

    id: str
    a: int
    b: int

    @property
    def is_loop(self) -> bool:
        return self.a == self.b

    @property
    def ends(self) -> tuple[int, int]:
        return (self.a, self.b)


@dataclass(frozen=True)
class PairRelation:
    """Relation of a subcurve pair: exactly one of precedes/terminal/free,
    plus the independent perfection flag."""

    kind: str
    perfect: bool

    @property
    def precedes(self) -> bool:
        return self.kind == PRECEDES

    @property
    def terminal(self) -> bool:
        return self.kind == TERMINAL

    @property
    def free(self) -> bool:
        # Free means the terminal sets are disjoint; preceding pairs are free.
        return self.kind != TERMINAL


class CurveGraph:
    """Connected multigraph with ordered components and a marked component."""

    __slots__ = (
        "names",
        "nodes",
        "marked",
        "full_mask",
        "_index",
        "_node_index",
        "_nbr",
        "_term",
        "_tails",
        "_tails_by_k",
        "_nested",
        "_c2",
        "_twister",
        "_hash",
    )

    def __init__(self, names: Iterable[str], nodes: Iterable[Node], marked: int):
        names = tuple(str(n) for n in names)
        nodes = tuple(nodes)
        if not names:
            raise GraphError("a curve graph needs at least one component")
        index: dict[str, int] = {}
        for i, nm in enumerate(names):
            if nm in index:
                raise GraphError(f"duplicate component name {nm!r}")
            index[nm] = i
        if not 0 <= marked < len(names):
            raise GraphError(f"marked component index {marked} out of range")
        node_index: dict[str, int] = {}
        for i, nd in enumerate(nodes):
            if nd.id in node_index:
                raise GraphError(f"duplicate node id {nd.id!r}")
            node_index[nd.id] = i
            for e in (nd.a, nd.b):
                if not 0 <= e < len(names):
                    raise GraphError(f"node {nd.id!r} endpoint {e} out of range")
        self.names = names
        self.nodes = nodes
        self.marked = marked
        self.full_mask = (1 << len(names)) - 1
        self._index = index
        self._node_index = node_index
        nbr = [0] * len(names)
        for nd in nodes:
            if not nd.is_loop:
                nbr[nd.a] |= 1 << nd.b
                nbr[nd.b] |= 1 << nd.a
        self._nbr = tuple(nbr)
        self._term: dict[int, int] = {}
        self._tails = None
        self._tails_by_k = None
        self._nested = {}
        self._c2 = None
        self._twister = None
        self._hash = None
        if not self.connected(self.full_mask):
            raise GraphError("the multigraph is disconnected")

    # -- identity ---------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, CurveGraph)
            and self.names == other.names
            and self.nodes == other.nodes
            and self.marked == other.marked
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.names, self.nodes, self.marked))
        return self._hash

    def __repr__(self):
        return (
            f"CurveGraph({list(self.names)}, "
            f"{[(n.id, self.names[n.a], self.names[n.b]) for n in self.nodes]}, "
            f"marked={self.names[self.marked]!r})"
        )

    # -- lookups ----------------------------------------------------------

    @property
    def p(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise GraphError(f"unknown component {name!r}") from None

    def node_index(self, node_id: str) -> int:
        try:
            return self._node_index[node_id]
        except KeyError:
            raise GraphError(f"unknown node {node_id!r}") from None

    def subcurve(self, items: Iterable[str | int]) -> int:
        """Bitmask of the subcurve spanned by component names or indices."""
        m = 0
        for it in items:
            m |= 1 << (it if isinstance(it, int) else self.index(it))
        return m

    def names_of(self, mask: int) -> tuple[str, ...]:
        return tuple(self.names[i] for i in members(mask))

    def node_ids(self, node_mask: int) -> tuple[str, ...]:
        return tuple(self.nodes[i].id for i in members(node_mask))

    # -- connectivity and terminal data ------------------------------------

    def connected(self, mask: int) -> bool:
        if mask == 0:
            return True
        seen = mask & -mask
        frontier = seen
        nbr = self._nbr
        while frontier:
            nxt = 0
            t = frontier
            while t:
                low = t & -t
                nxt |= nbr[low.bit_length() - 1]
                t ^= low
            nxt &= mask & ~seen
            seen |= nxt
            frontier = nxt
        return seen == mask

    def term_mask(self, mask: int) -> int:
        """Bitmask over node indices of the terminal nodes of a subcurve.

        Loops never count; the full and empty subcurves have no terminal
        nodes by definition.
        """
        t = self._term.get(mask)
        if t is None:
            t = 0
            for i, nd in enumerate(self.nodes):
                if ((mask >> nd.a) & 1) != ((mask >> nd.b) & 1):
                    t |= 1 << i
            self._term[mask] = t
        return t

    def terminal_set(self, mask: int) -> tuple[str, ...]:
        return self.node_ids(self.term_mask(mask))

    def k(self, mask: int) -> int:
        return self.term_mask(mask).bit_count()

    def is_proper(self, mask: int) -> bool:
        return mask != 0 and mask != self.full_mask

    def is_tail(self, mask: int) -> bool:
        return (
            self.is_proper(mask)
            and self.connected(mask)
            and self.connected(self.full_mask ^ mask)
        )

    # -- tail enumeration ---------------------------------------------------

    def tails(self) -> tuple[int, ...]:
        """Every tail, canonically ordered.

        Enumeration grows connected vertex sets from component 0 by frontier
        extension; a set and its complement are both tails or neither, so
        rooting the growth at one vertex visits each tail pair exactly once.
        """
        if self._tails is None:
            if self.p == 1:
                self._tails = ()
            else:
                full = self.full_mask
                nbr = self._nbr
                found = []
                seen = {1}
                stack = [1]
                while stack:
                    s = stack.pop()
                    comp = full ^ s
                    if comp and self.connected(comp):
                        found.append(s)
                    frontier = 0
                    t = s
                    while t:
                        low = t & -t
                        frontier |= nbr[low.bit_length() - 1]
                        t ^= low
                    frontier &= ~s
                    while frontier:
                        low = frontier & -frontier
                        nxt = s | low
                        if nxt not in seen:
                            seen.add(nxt)
                            stack.append(nxt)
                        frontier ^= low
                out = []
                for s in found:
                    out.append(s)
                    out.append(full ^ s)
                self._tails = tuple(sorted(out, key=canon_key))
        return self._tails

    def k_tails(self, kk: int) -> tuple[int, ...]:
        if self._tails_by_k is None:
            buckets: dict[int, list[int]] = {}
            for z in self.tails():
                buckets.setdefault(self.k(z), []).append(z)
            self._tails_by_k = {kk_: tuple(v) for kk_, v in buckets.items()}
        return self._tails_by_k.get(kk, ())

    def reducible_nodes(self) -> tuple[int, ...]:
        """Indices of the reducible nodes, i.e. all non-loop edges."""
        return tuple(i for i, nd in enumerate(self.nodes) if not nd.is_loop)

    # -- serialization ------------------------------------------------------

    def to_spec(self) -> dict:
        return {
            "components": list(self.names),
            "marked": self.names[self.marked],
            "nodes": [
                {"id": nd.id, "ends": [self.names[nd.a], self.names[nd.b]]}
                for nd in self.nodes
            ],
        }

    def to_json(self, **kw) -> str:
        kw.setdefault("sort_keys", True)
        return json.dumps(self.to_spec(), **kw)

    def to_dot(self) -> str:
        lines = ["graph curve {"]
        for i, nm in enumerate(self.names):
            shape = "doublecircle" if i == self.marked else "circle"
            lines.append(f'  "{nm}" [shape={shape}];')
        for nd in self.nodes:
            lines.append(
                f'  "{self.names[nd.a]}" -- "{self.names[nd.b]}" [label="{nd.id}"];'
            )
        lines.append("}")
        return "\n".join(lines)


def validate(data: dict) -> CurveGraph:
    """Build a CurveGraph from its JSON description, checking every invariant.

    Component entries may be bare names or objects with a ``name`` key;
    extra per-component fields (``genus`` in particular) are accepted and
    ignored, since nothing downstream depends on them.
    """
    if not isinstance(data, dict):
        raise GraphError("graph description must be a JSON object")
    try:
        comp_spec = data["components"]
        marked_name = data["marked"]
        node_spec = data.get("nodes", [])
    except KeyError as exc:
        raise GraphError(f"missing field {exc.args[0]!r}") from None
    names = []
    for entry in comp_spec:
        if isinstance(entry, dict):
            if "name" not in entry:
                raise GraphError(f"component object without a name: {entry!r}")
            names.append(str(entry["name"]))
        else:
            names.append(str(entry))
    index = {nm: i for i, nm in enumerate(names)}
    if len(index) != len(names):
        raise GraphError("duplicate component name")
    if marked_name not in index:
        raise GraphError(f"marked component {marked_name!r} not among components")
    nodes = []
    for entry in node_spec:
        try:
            nid = entry["id"]
            ends = entry["ends"]
        except (KeyError, TypeError):
            raise GraphError(f"malformed node entry {entry!r}") from None
        if len(ends) != 2:
            raise GraphError(f"node {nid!r} needs exactly two endpoints")
        for e in ends:
            if e not in index:
                raise GraphError(f"node {nid!r} endpoint {e!r} unknown")
        a, b = sorted(index[e] for e in ends)
        nodes.append(Node(str(nid), a, b))
    return CurveGraph(names, nodes, index[marked_name])


def load(path: str) -> CurveGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return validate(json.load(fh))


def relate(G: CurveGraph, Z: int, Zp: int) -> PairRelation:
    """Compare two subcurves: precedes / terminal / free, plus perfection."""
    if G.term_mask(Z) & G.term_mask(Zp):
        kind = TERMINAL
    elif Z != Zp and Z & Zp == Z:
        kind = PRECEDES
    else:
        kind = FREE
    zc = G.full_mask ^ Z
    perfect = (
        Z | Zp == Zp
        or Zp | Z == Z
        or zc | Zp == Zp
        or Zp | zc == zc
    )
    return PairRelation(kind, perfect)


def precedes(G: CurveGraph, Z: int, Zp: int) -> bool:
    """Fast strict-containment-with-disjoint-terminals test (Z before Zp)."""
    return Z != Zp and Z & Zp == Z and not (G.term_mask(Z) & G.term_mask(Zp))


def wedge(Z: int, Zp: int) -> int:
    """Union of the components contained in both subcurves."""
    return Z & Zp


def crosses(G: CurveGraph, Z: int, node: int | str) -> bool:
    """Whether the subcurve contains both component endpoints of a node.

    Loops return False by convention: a loop lies on a single component, and
    the crossing notion presumes two branches on distinct components.
    """
    nd = G.nodes[node if isinstance(node, int) else G.node_index(node)]
    if nd.is_loop:
        return False
    return bool((Z >> nd.a) & 1 and (Z >> nd.b) & 1)


def node_on(G: CurveGraph, Z: int, node: int | str) -> bool:
    """Whether a node lies on the subcurve (at least one endpoint inside)."""
    nd = G.nodes[node if isinstance(node, int) else G.node_index(node)]
    return bool((Z >> nd.a) & 1 or (Z >> nd.b) & 1)
