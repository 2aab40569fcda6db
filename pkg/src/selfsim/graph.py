"""Finite directed graphs with categorical path composition.

Edges compose right to left: in a path ``p = e1 e2 ... en`` the source of
``e_i`` equals the range of ``e_{i+1}``, the range of ``p`` is ``r(e1)`` and
the source is ``d(en)``.  A length-zero path is anchored at a single vertex
and has that vertex as both range and source.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .verdict import GraphError, NonComposable


class Graph:
    """Immutable finite directed graph with total range/source maps."""

    __slots__ = ("vertices", "edges", "_range", "_source", "_into", "_out_of")

    def __init__(self, vertices: Iterable[str], edges: Mapping[str, tuple[str, str]]):
        """``edges`` maps edge id -> (source, range)."""
        vs = list(vertices)
        if len(set(vs)) != len(vs):
            raise GraphError("DuplicateId: repeated vertex id")
        self.vertices = tuple(sorted(vs))
        vset = set(self.vertices)
        eids = list(edges)
        if len(set(eids)) != len(eids):
            raise GraphError("DuplicateId: repeated edge id")
        if vset & set(eids):
            raise GraphError("DuplicateId: vertex and edge ids must not collide")
        self.edges = tuple(sorted(eids))
        self._range: dict[str, str] = {}
        self._source: dict[str, str] = {}
        self._into: dict[str, tuple[str, ...]] = {v: () for v in self.vertices}
        self._out_of: dict[str, tuple[str, ...]] = {v: () for v in self.vertices}
        into: dict[str, list[str]] = {v: [] for v in self.vertices}
        out_of: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            src, rng = edges[e]
            if src not in vset or rng not in vset:
                raise GraphError(f"DanglingEdge: edge {e} references unknown vertex")
            self._source[e] = src
            self._range[e] = rng
            into[rng].append(e)
            out_of[src].append(e)
        self._into = {v: tuple(into[v]) for v in self.vertices}
        self._out_of = {v: tuple(out_of[v]) for v in self.vertices}

    def range_of(self, e: str) -> str:
        return self._range[e]

    def source_of(self, e: str) -> str:
        return self._source[e]

    def edges_into(self, v: str) -> tuple[str, ...]:
        """All edges with range v (the receivers of v)."""
        return self._into[v]

    def edges_out_of(self, v: str) -> tuple[str, ...]:
        """All edges with source v."""
        return self._out_of[v]

    def is_simple_vertex(self, v: str) -> bool:
        """A vertex receiving exactly one edge."""
        return len(self._into[v]) == 1

    def sources(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if not self._into[v])

    def sinks(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if not self._out_of[v])

    def vertex_path(self, v: str) -> "Path":
        return Path(self, (), v)

    def edge_path(self, e: str) -> "Path":
        return Path(self, (e,))

    def path(self, edge_ids: Sequence[str]) -> "Path":
        return Path(self, tuple(edge_ids))

    def __repr__(self) -> str:
        return f"Graph({len(self.vertices)} vertices, {len(self.edges)} edges)"


@dataclass(frozen=True)
class Path:
    """A finite path; empty paths carry an anchoring vertex."""

    graph: Graph = field(compare=False, repr=False)
    edges: tuple[str, ...] = ()
    anchor: Optional[str] = None

    def __post_init__(self):
        g = self.graph
        if not self.edges:
            if self.anchor is None or self.anchor not in set(g.vertices):
                raise GraphError("a length-0 path must be anchored at a vertex")
            return
        if self.anchor is not None:
            raise GraphError("nonempty path must not carry an anchor")
        for e in self.edges:
            if e not in g._range:
                raise GraphError(f"unknown edge {e}")
        for a, b in zip(self.edges, self.edges[1:]):
            if g.source_of(a) != g.range_of(b):
                raise NonComposable(
                    f"edges {a} and {b} do not compose: d({a}) != r({b})")

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def is_vertex(self) -> bool:
        return not self.edges

    def range_vertex(self) -> str:
        return self.anchor if self.is_vertex else self.graph.range_of(self.edges[0])

    def source_vertex(self) -> str:
        return self.anchor if self.is_vertex else self.graph.source_of(self.edges[-1])

    def prefix(self, n: int) -> "Path":
        if n < 0 or n > self.length:
            raise GraphError("prefix length out of range")
        if n == 0:
            return Path(self.graph, (), self.range_vertex())
        return Path(self.graph, self.edges[:n])

    def suffix_after(self, n: int) -> "Path":
        """The remainder once the first n edges are removed."""
        if n < 0 or n > self.length:
            raise GraphError("suffix index out of range")
        if n == self.length:
            return Path(self.graph, (), self.source_vertex())
        return Path(self.graph, self.edges[n:])

    def is_prefix_of(self, other: "Path") -> bool:
        if self.length > other.length:
            return False
        if self.is_vertex:
            return self.anchor == other.range_vertex()
        return other.edges[: self.length] == self.edges

    def proper_prefixes(self) -> Iterator["Path"]:
        for n in range(self.length):
            yield self.prefix(n)

    def __str__(self) -> str:
        if self.is_vertex:
            return f"({self.anchor})"
        if all(len(e) == 1 for e in self.edges):
            return "".join(self.edges)
        return " ".join(self.edges)


def compose(p: Path, q: Path) -> Path:
    """Concatenation p followed (deeper) by q; requires d(p) = r(q)."""
    if p.graph is not q.graph:
        raise NonComposable("paths over different graphs")
    if p.source_vertex() != q.range_vertex():
        raise NonComposable(
            f"d(p)={p.source_vertex()} != r(q)={q.range_vertex()}")
    if p.is_vertex:
        return q
    if q.is_vertex:
        return p
    return Path(p.graph, p.edges + q.edges)


def is_circuit(p: Path) -> bool:
    return p.length >= 1 and p.source_vertex() == p.range_vertex()


def require_circuit(p: Path) -> Path:
    if not is_circuit(p):
        raise GraphError("not a circuit: needs length >= 1 and d = r")
    return p


@dataclass(frozen=True)
class ValidationReport:
    no_sources: bool
    no_sinks: bool
    row_finite: bool
    simple_vertices: tuple[str, ...]
    source_list: tuple[str, ...]
    sink_list: tuple[str, ...]


def validate_graph(g: Graph) -> ValidationReport:
    """Structural report; id errors are raised at construction time."""
    sources = g.sources()
    sinks = g.sinks()
    return ValidationReport(
        no_sources=not sources,
        no_sinks=not sinks,
        row_finite=True,
        simple_vertices=tuple(v for v in g.vertices if g.is_simple_vertex(v)),
        source_list=sources,
        sink_list=sinks,
    )


def circuit_has_entry(g: Graph, c: Path) -> bool:
    """True iff some vertex along the circuit receives at least two edges."""
    require_circuit(c)
    return any(not g.is_simple_vertex(g.source_of(e)) for e in c.edges)


def path_has_entry(g: Graph, c: Path) -> bool:
    """Entry check for an arbitrary nonempty path (used for twisted circuits)."""
    if c.is_vertex:
        raise GraphError("entry check needs a nonempty path")
    return any(not g.is_simple_vertex(g.source_of(e)) for e in c.edges)


def condition_L(g: Graph) -> bool:
    """Every circuit has an entry.

    A circuit without an entry passes only through simple vertices, and each
    of its edges is then the unique edge received by a simple vertex.  So
    condition (L) fails exactly when the subgraph formed by those unique
    incoming edges (with both endpoints simple) contains a directed cycle.
    """
    return entryless_circuit(g) is None


def entryless_circuit(g: Graph) -> Optional[Path]:
    """A witness circuit without entry, or None when condition (L) holds.

    Each simple vertex has one incoming edge, so walking "my unique incoming
    edge's source, while it stays simple" is a functional chain; entryless
    circuits are exactly the cycles of that partial map.
    """
    pred: dict[str, tuple[str, str]] = {}
    for v in g.vertices:
        if not g.is_simple_vertex(v):
            continue
        e = g.edges_into(v)[0]
        u = g.source_of(e)
        if g.is_simple_vertex(u):
            pred[v] = (e, u)
    done: set[str] = set()
    for start in sorted(pred):
        if start in done:
            continue
        chain: list[str] = []
        pos: dict[str, int] = {}
        v = start
        while v in pred and v not in done and v not in pos:
            pos[v] = len(chain)
            chain.append(v)
            v = pred[v][1]
        if v in pos:
            cyc = chain[pos[v]:]
            return Path(g, tuple(pred[w][0] for w in cyc))
        done.update(chain)
    return None


def simple_cycles(g: Graph, max_len: Optional[int] = None) -> list[Path]:
    """Exhaustive enumeration of simple circuits (no repeated vertex).

    Exponential; intended as an independent oracle on small graphs.
    """
    out: list[Path] = []
    limit = max_len if max_len is not None else len(g.vertices)

    def extend(start: str, v: str, edges: list[str], seen: set[str]):
        for e in sorted(g.edges_out_of(v)):
            w = g.range_of(e)
            if w == start:
                out.append(Path(g, tuple(reversed(edges + [e]))))
            elif w not in seen and len(edges) + 1 < limit:
                extend(start, w, edges + [e], seen | {w})

    for start in g.vertices:
        extend(start, start, [], {start})
    # dedupe rotations: keep the lexicographically least rotation of each
    canon: dict[tuple[str, ...], Path] = {}
    for c in out:
        rots = [c.edges[i:] + c.edges[:i] for i in range(len(c.edges))]
        key = min(rots)
        canon.setdefault(key, c)
    return [canon[k] for k in sorted(canon)]


def reach(g: Graph, x: str, y: str) -> bool:
    """True iff some path has source x and range y (length 0 included)."""
    if x == y:
        return True
    seen = {x}
    frontier = [x]
    while frontier:
        nxt: list[str] = []
        for u in frontier:
            for e in g.edges_out_of(u):
                w = g.range_of(e)
                if w == y:
                    return True
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return False


def reachable_set(g: Graph, x: str) -> set[str]:
    seen = {x}
    frontier = [x]
    while frontier:
        nxt = []
        for u in frontier:
            for e in g.edges_out_of(u):
                w = g.range_of(e)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def cyclic_scc_representatives(g: Graph) -> list[str]:
    """One vertex from each strongly connected component containing a cycle.

    These are exactly the vertex sets that infinite paths visit cofinally.
    """
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = itertools.count()
    sccs: list[list[str]] = []

    def strongconnect(v0: str):
        work = [(v0, iter(sorted(g.range_of(e) for e in g.edges_out_of(v0))))]
        index[v0] = low[v0] = next(counter)
        stack.append(v0)
        on_stack.add(v0)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(g.range_of(e) for e in g.edges_out_of(w)))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)

    for v in g.vertices:
        if v not in index:
            strongconnect(v)

    reps = []
    for comp in sccs:
        cs = set(comp)
        has_cycle = len(comp) > 1 or any(
            g.range_of(e) in cs for e in g.edges_out_of(comp[0]))
        if has_cycle:
            reps.append(min(comp))
    return sorted(reps)


def cyclic_vertices(g: Graph) -> set[str]:
    """Vertices lying on at least one circuit."""
    out: set[str] = set()
    for u in g.vertices:
        if any(reach(g, u, g.source_of(e)) for e in g.edges_into(u)):
            out.add(u)
    return out


def has_unbounded_incoming(g: Graph, v: str) -> bool:
    """True iff arbitrarily long paths with range v exist.

    Walking r -> d from v, some reachable vertex must sit on a circuit.
    """
    cyc = cyclic_vertices(g)
    seen = {v}
    frontier = [v]
    while frontier:
        nxt = []
        for u in frontier:
            if u in cyc:
                return True
            for e in g.edges_into(u):
                w = g.source_of(e)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return False
