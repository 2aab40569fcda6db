"""Pluggable group backends: automaton words, integers, finite tables.

A backend supplies exact multiplication and inversion plus an equality
*verdict*.  Integer and finite backends decide equality outright.  The
automaton backend decides equality in the bisimulation quotient: two words
are equal when they induce the same action and the same restriction cocycle
on every finite path.  That quotient is exactly what the groupoid
constructions see, so all downstream verdicts are statements about the
quotient system.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .graph import Graph
from .verdict import (BackendMismatch, BudgetMeter, GraphError, NotAutomorphism,
                      SearchBudget, Verdict3)

Letter = tuple[str, int]  # (generator name, +1 or -1)


@dataclass(frozen=True)
class GroupElement:
    backend: "GroupBackend" = field(compare=False, repr=False)
    payload: object = None

    def __post_init__(self):
        object.__setattr__(self, "payload", self.backend.normalize(self.payload))

    def __eq__(self, other):  # syntactic equality; semantic equality via equal()
        return (isinstance(other, GroupElement)
                and self.backend is other.backend
                and self.payload == other.payload)

    def __hash__(self):
        return hash((id(self.backend), self.payload))

    def __str__(self) -> str:
        return self.backend.render(self.payload)

    def __repr__(self) -> str:
        return f"<{self}>"


class GroupBackend:
    """Interface shared by the three backends."""

    kind = "abstract"

    def identity(self) -> GroupElement:
        raise NotImplementedError

    def generators(self) -> list[GroupElement]:
        raise NotImplementedError

    def normalize(self, payload):
        return payload

    def render(self, payload) -> str:
        raise NotImplementedError

    def mul_payload(self, a, b):
        raise NotImplementedError

    def inv_payload(self, a):
        raise NotImplementedError

    def element(self, payload) -> GroupElement:
        return GroupElement(self, payload)

    def is_identity(self, a: GroupElement, budget: Optional[SearchBudget] = None) -> Verdict3:
        raise NotImplementedError

    def equal(self, a: GroupElement, b: GroupElement,
              budget: Optional[SearchBudget] = None) -> Verdict3:
        raise NotImplementedError

    def key(self, a: GroupElement):
        """Hashable canonical-enough key (exact for integer/finite backends)."""
        return a.payload


def _require_same_backend(a: GroupElement, b: GroupElement) -> GroupBackend:
    if a.backend is not b.backend:
        raise BackendMismatch("elements belong to different backends")
    return a.backend


def mul(a: GroupElement, b: GroupElement) -> GroupElement:
    be = _require_same_backend(a, b)
    return GroupElement(be, be.mul_payload(a.payload, b.payload))


def inv(a: GroupElement) -> GroupElement:
    return GroupElement(a.backend, a.backend.inv_payload(a.payload))


def is_identity(a: GroupElement, budget: Optional[SearchBudget] = None) -> Verdict3:
    return a.backend.is_identity(a, budget)


def equal(a: GroupElement, b: GroupElement,
          budget: Optional[SearchBudget] = None) -> Verdict3:
    _require_same_backend(a, b)
    return a.backend.equal(a, b, budget)


class IntegerBackend(GroupBackend):
    """The group of integers; generators are +1 and -1."""

    kind = "integer"

    def identity(self) -> GroupElement:
        return GroupElement(self, 0)

    def generators(self) -> list[GroupElement]:
        return [GroupElement(self, 1), GroupElement(self, -1)]

    def normalize(self, payload):
        return int(payload)

    def render(self, payload) -> str:
        return str(payload)

    def mul_payload(self, a, b):
        return a + b

    def inv_payload(self, a):
        return -a

    def is_identity(self, a, budget=None) -> Verdict3:
        return Verdict3.yes() if a.payload == 0 else Verdict3.no(a.payload)

    def equal(self, a, b, budget=None) -> Verdict3:
        return Verdict3.yes() if a.payload == b.payload else Verdict3.no((a.payload, b.payload))


class FiniteGroupBackend(GroupBackend):
    """A finite group given by its full multiplication table."""

    kind = "finite"

    def __init__(self, names: Sequence[str], table: Mapping[tuple[str, str], str],
                 generator_names: Optional[Sequence[str]] = None):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise GraphError("DuplicateId: repeated element name")
        idx = {n: i for i, n in enumerate(self.names)}
        n = len(self.names)
        self.table = [[-1] * n for _ in range(n)]
        for (x, y), z in table.items():
            self.table[idx[x]][idx[y]] = idx[z]
        if any(v == -1 for row in self.table for v in row):
            raise GraphError("multiplication table is not total")
        self._validate_group()
        if generator_names is None:
            generator_names = [nm for nm in self.names if idx[nm] != self.identity_index]
        self.generator_indices = [idx[nm] for nm in generator_names]
        self._word_cache: dict[int, tuple[int, ...]] = {}

    def _validate_group(self):
        n = len(self.names)
        ident = None
        for e in range(n):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(n)):
                ident = e
                break
        if ident is None:
            raise GraphError("table has no identity element")
        self.identity_index = ident
        self.inverse = [-1] * n
        for x in range(n):
            for y in range(n):
                if self.table[x][y] == ident and self.table[y][x] == ident:
                    self.inverse[x] = y
            if self.inverse[x] == -1:
                raise GraphError(f"element {self.names[x]} has no inverse")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                        raise GraphError("table is not associative")

    def identity(self) -> GroupElement:
        return GroupElement(self, self.identity_index)

    def generators(self) -> list[GroupElement]:
        return [GroupElement(self, i) for i in self.generator_indices]

    def normalize(self, payload):
        if isinstance(payload, str):
            payload = self.names.index(payload)
        return int(payload)

    def render(self, payload) -> str:
        return self.names[payload]

    def mul_payload(self, a, b):
        return self.table[a][b]

    def inv_payload(self, a):
        return self.inverse[a]

    def is_identity(self, a, budget=None) -> Verdict3:
        ok = a.payload == self.identity_index
        return Verdict3.yes() if ok else Verdict3.no(self.render(a.payload))

    def equal(self, a, b, budget=None) -> Verdict3:
        ok = a.payload == b.payload
        return Verdict3.yes() if ok else Verdict3.no((self.render(a.payload), self.render(b.payload)))

    def generator_word(self, index: int) -> tuple[int, ...]:
        """A shortest expression of an element as generator indices (BFS)."""
        if index in self._word_cache:
            return self._word_cache[index]
        frontier = [(self.identity_index, ())]
        seen = {self.identity_index}
        self._word_cache[self.identity_index] = ()
        while frontier:
            nxt = []
            for cur, word in frontier:
                for gi in self.generator_indices:
                    t = self.table[gi][cur]
                    if t not in seen:
                        seen.add(t)
                        w = (gi,) + word  # leftmost letter acts last
                        self._word_cache[t] = w
                        nxt.append((t, w))
            frontier = nxt
        if index not in self._word_cache:
            raise GraphError("declared generators do not generate the group")
        return self._word_cache[index]


def free_reduce(word: Iterable[Letter]) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for name, exp in word:
        if out and out[-1][0] == name and out[-1][1] == -exp:
            out.pop()
        else:
            out.append((name, exp))
    return tuple(out)


class AutomatonBackend(GroupBackend):
    """Group elements are free-reduced words over automaton generators.

    The generator data fixes, per generator, a vertex permutation, an edge
    permutation commuting with both incidence maps, and a restriction word
    per edge.  Words act letter by letter (leftmost letter acts last), and
    equality is breadth-first bisimulation of the induced (action, cocycle)
    pair.
    """

    kind = "automaton"

    def __init__(self, graph: Graph, generator_names: Sequence[str],
                 vertex_maps: Mapping[str, Mapping[str, str]],
                 edge_maps: Mapping[str, Mapping[str, str]],
                 restrictions: Mapping[str, Mapping[str, Sequence[Letter]]]):
        self.graph = graph
        self.generator_names = tuple(generator_names)
        if len(set(self.generator_names)) != len(self.generator_names):
            raise GraphError("DuplicateId: repeated generator name")
        self.vertex_maps = {g: dict(vertex_maps[g]) for g in self.generator_names}
        self.edge_maps = {g: dict(edge_maps[g]) for g in self.generator_names}
        self.restrictions = {
            g: {e: free_reduce(w) for e, w in restrictions[g].items()}
            for g in self.generator_names
        }
        self._validate()
        self.inv_vertex_maps = {
            g: {w: v for v, w in self.vertex_maps[g].items()} for g in self.generator_names}
        self.inv_edge_maps = {
            g: {w: e for e, w in self.edge_maps[g].items()} for g in self.generator_names}

    def _validate(self):
        g0 = self.graph
        vset, eset = set(g0.vertices), set(g0.edges)
        for gen in self.generator_names:
            vm, em, rm = self.vertex_maps[gen], self.edge_maps[gen], self.restrictions[gen]
            if set(vm) != vset or set(vm.values()) != vset:
                raise NotAutomorphism(f"generator {gen}: vertex map is not a bijection on vertices")
            if set(em) != eset or set(em.values()) != eset:
                raise NotAutomorphism(f"generator {gen}: edge map is not a bijection on edges")
            for e in g0.edges:
                if g0.range_of(em[e]) != vm[g0.range_of(e)]:
                    raise NotAutomorphism(f"generator {gen}: edge map does not commute with r at {e}")
                if g0.source_of(em[e]) != vm[g0.source_of(e)]:
                    raise NotAutomorphism(f"generator {gen}: edge map does not commute with d at {e}")
            if set(rm) != eset:
                raise GraphError(f"generator {gen}: restriction table must cover every edge")
            for e, w in rm.items():
                for name, exp in w:
                    if name not in self.generator_names:
                        raise GraphError(
                            f"generator {gen}: restriction at {e} uses undeclared generator {name}")
                    if exp not in (1, -1):
                        raise GraphError("restriction letters must have exponent +1 or -1")

    # -- elements ---------------------------------------------------------

    def identity(self) -> GroupElement:
        return GroupElement(self, ())

    def generators(self) -> list[GroupElement]:
        return [GroupElement(self, ((g, 1),)) for g in self.generator_names]

    def normalize(self, payload):
        return free_reduce(payload or ())

    def render(self, payload) -> str:
        if not payload:
            return "1"
        toks = [name if exp == 1 else f"{name}^-1" for name, exp in payload]
        if all(len(n) == 1 and e == 1 for n, e in payload):
            return "".join(toks)
        return " ".join(toks)

    def mul_payload(self, a, b):
        return free_reduce(tuple(a) + tuple(b))

    def inv_payload(self, a):
        return tuple((name, -exp) for name, exp in reversed(a))

    # -- letterwise action and cocycle -------------------------------------

    def letter_vertex(self, letter: Letter, v: str) -> str:
        name, exp = letter
        return self.vertex_maps[name][v] if exp == 1 else self.inv_vertex_maps[name][v]

    def letter_edge(self, letter: Letter, e: str) -> str:
        name, exp = letter
        return self.edge_maps[name][e] if exp == 1 else self.inv_edge_maps[name][e]

    def letter_restriction(self, letter: Letter, e: str) -> tuple[Letter, ...]:
        name, exp = letter
        if exp == 1:
            return self.restrictions[name][e]
        # phi(s^-1, e) = phi(s, s^-1 e)^-1
        pre = self.inv_edge_maps[name][e]
        return self.inv_payload(self.restrictions[name][pre])

    def act_vertex_payload(self, word, v: str) -> str:
        for letter in reversed(word):
            v = self.letter_vertex(letter, v)
        return v

    def act_edge_payload(self, word, e: str) -> str:
        for letter in reversed(word):
            e = self.letter_edge(letter, e)
        return e

    def cocycle_payload(self, word, e: str):
        out: tuple[Letter, ...] = ()
        cur = e
        for letter in reversed(word):
            rest = self.letter_restriction(letter, cur)
            cur = self.letter_edge(letter, cur)
            out = free_reduce(rest + out)
        return out

    # -- equality by bisimulation ------------------------------------------

    def equal(self, a, b, budget: Optional[SearchBudget] = None) -> Verdict3:
        budget = budget or SearchBudget()
        meter = BudgetMeter(budget)
        start = (tuple(a.payload), tuple(b.payload))
        seen = {start}
        frontier: list[tuple[tuple, tuple, tuple[str, ...]]] = [(start[0], start[1], ())]
        while frontier:
            nxt = []
            for u, w, trail in frontier:
                for v in self.graph.vertices:
                    if self.act_vertex_payload(u, v) != self.act_vertex_payload(w, v):
                        return Verdict3.no({"path": trail, "vertex": v})
                for e in sorted(self.graph.edges):
                    if self.act_edge_payload(u, e) != self.act_edge_payload(w, e):
                        return Verdict3.no({"path": trail + (e,)})
                    pair = (self.cocycle_payload(u, e), self.cocycle_payload(w, e))
                    if pair not in seen:
                        if not meter.charge_state():
                            return Verdict3.unknown(
                                f"bisimulation budget exhausted after {meter.states_used} states")
                        seen.add(pair)
                        nxt.append((pair[0], pair[1], trail + (e,)))
            frontier = nxt
        return Verdict3.yes({"states": len(seen)})

    def is_identity(self, a, budget: Optional[SearchBudget] = None) -> Verdict3:
        return self.equal(a, self.identity(), budget)
