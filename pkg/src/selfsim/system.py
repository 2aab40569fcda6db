"""Validated group-graph-cocycle triples and strongly-fixed-path machinery.

A system couples a finite graph, a group backend, and an action + cocycle
provider.  The provider answers three exact questions: how a group element
moves a vertex, how it moves an edge, and which group element it restricts
to past an edge.  Everything else (paths, infinite paths, semigroup and
germ arithmetic, property verdicts) is derived from those three maps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .graph import Graph, Path, has_unbounded_incoming
from .groups import (AutomatonBackend, FiniteGroupBackend, GroupBackend,
                     GroupElement, IntegerBackend, equal, inv, is_identity, mul)
from .verdict import (BudgetMeter, DomainMismatch, NotAGCircuit,
                      NotAutomorphism, SearchBudget, SelfsimError,
                      StandingHypothesisViolated, Verdict3)


class ActionProvider:
    """Exact action/cocycle evaluation for arbitrary backend elements."""

    def act_vertex(self, g: GroupElement, v: str) -> str:
        raise NotImplementedError

    def act_edge(self, g: GroupElement, e: str) -> str:
        raise NotImplementedError

    def cocycle(self, g: GroupElement, e: str) -> GroupElement:
        raise NotImplementedError


class AutomatonAction(ActionProvider):
    """The action an automaton backend already carries."""

    def __init__(self, backend: AutomatonBackend):
        self.backend = backend

    def act_vertex(self, g, v):
        return self.backend.act_vertex_payload(g.payload, v)

    def act_edge(self, g, e):
        return self.backend.act_edge_payload(g.payload, e)

    def cocycle(self, g, e):
        return GroupElement(self.backend, self.backend.cocycle_payload(g.payload, e))


class TableAction(ActionProvider):
    """Per-generator tables, extended to all elements word by word.

    For the integer backend the single generator is 1 and powers iterate the
    table.  For finite backends arbitrary elements are expanded through a
    shortest generator word.
    """

    def __init__(self, backend: GroupBackend, graph: Graph,
                 vertex_maps: dict[str, dict[str, str]],
                 edge_maps: dict[str, dict[str, str]],
                 cocycles: dict[str, dict[str, GroupElement]]):
        self.backend = backend
        self.graph = graph
        self.vertex_maps = vertex_maps
        self.edge_maps = edge_maps
        self.cocycles = cocycles
        self.inv_vertex_maps = {k: {w: v for v, w in m.items()} for k, m in vertex_maps.items()}
        self.inv_edge_maps = {k: {w: e for e, w in m.items()} for k, m in edge_maps.items()}
        self._orbit_cache: dict[str, tuple[list[str], dict[str, int], list[int], int]] = {}
        self._vorbit_cache: dict[str, tuple[list[str], dict[str, int]]] = {}

    def _integer_edge_orbit(self, e: str):
        """Orbit of e under the generator, with cocycle prefix sums.

        Lets integer powers act in O(orbit) instead of O(|m|).
        """
        if e in self._orbit_cache:
            return self._orbit_cache[e]
        name = self.generator_names()[0]
        em = self.edge_maps[name]
        cm = self.cocycles[name]
        orbit = [e]
        sums = [0]
        cur = e
        while True:
            sums.append(sums[-1] + cm[cur].payload)
            cur = em[cur]
            if cur == e:
                break
            orbit.append(cur)
        total = sums[-1]
        index = {x: i for i, x in enumerate(orbit)}
        data = (orbit, index, sums, total)
        for i, x in enumerate(orbit):
            # share the structure shifted per orbit member
            self._orbit_cache[x] = data
        return data

    def _integer_vertex_orbit(self, v: str):
        if v in self._vorbit_cache:
            return self._vorbit_cache[v]
        name = self.generator_names()[0]
        vm = self.vertex_maps[name]
        orbit = [v]
        cur = vm[v]
        while cur != v:
            orbit.append(cur)
            cur = vm[cur]
        index = {x: i for i, x in enumerate(orbit)}
        data = (orbit, index)
        for x in orbit:
            self._vorbit_cache[x] = data
        return data

    def generator_names(self) -> list[str]:
        return list(self.vertex_maps)

    def _letters(self, g: GroupElement) -> list[tuple[str, int]]:
        """Expand g to generator letters, leftmost acting last."""
        be = self.backend
        if isinstance(be, IntegerBackend):
            m = g.payload
            name = self.generator_names()[0]
            return [(name, 1)] * m if m >= 0 else [(name, -1)] * (-m)
        if isinstance(be, FiniteGroupBackend):
            word = be.generator_word(g.payload)
            return [(be.names[i], 1) for i in word]
        raise SelfsimError("TableAction needs an integer or finite backend")

    def _letter_vertex(self, letter, v):
        name, exp = letter
        return self.vertex_maps[name][v] if exp == 1 else self.inv_vertex_maps[name][v]

    def _letter_edge(self, letter, e):
        name, exp = letter
        return self.edge_maps[name][e] if exp == 1 else self.inv_edge_maps[name][e]

    def _letter_cocycle(self, letter, e) -> GroupElement:
        name, exp = letter
        if exp == 1:
            return self.cocycles[name][e]
        pre = self.inv_edge_maps[name][e]
        return inv(self.cocycles[name][pre])

    def act_vertex(self, g, v):
        if isinstance(self.backend, IntegerBackend):
            orbit, index = self._integer_vertex_orbit(v)
            return orbit[(index[v] + g.payload) % len(orbit)]
        for letter in reversed(self._letters(g)):
            v = self._letter_vertex(letter, v)
        return v

    def act_edge(self, g, e):
        if isinstance(self.backend, IntegerBackend):
            orbit, index, _, _ = self._integer_edge_orbit(e)
            return orbit[(index[e] + g.payload) % len(orbit)]
        for letter in reversed(self._letters(g)):
            e = self._letter_edge(letter, e)
        return e

    def cocycle(self, g, e):
        if isinstance(self.backend, IntegerBackend):
            orbit, index, sums, total = self._integer_edge_orbit(e)
            length = len(orbit)
            i = index[e]
            q, r = divmod(g.payload, length)
            # phi(qL + r, e) = q * (cocycle around the orbit) + phi(r, e)
            partial = sums[i + r] - sums[i] if i + r <= length else (
                sums[length] - sums[i] + sums[i + r - length] - sums[0])
            return GroupElement(self.backend, q * total + partial)
        out = self.backend.identity()
        cur = e
        for letter in reversed(self._letters(g)):
            out = mul(self._letter_cocycle(letter, cur), out)
            cur = self._letter_edge(letter, cur)
        return out


@dataclass
class System:
    """A validated (group, graph, cocycle) triple."""

    graph: Graph
    backend: GroupBackend
    action: ActionProvider
    name: str = "system"
    amenable_asserted: bool = False
    faithful_asserted: bool = False
    accept_weak_hypothesis: bool = False

    # -- raw action --------------------------------------------------------

    def act_vertex(self, g: GroupElement, v: str) -> str:
        return self.action.act_vertex(g, v)

    def act_edge(self, g: GroupElement, e: str) -> str:
        return self.action.act_edge(g, e)

    def cocycle_edge(self, g: GroupElement, e: str) -> GroupElement:
        return self.action.cocycle(g, e)

    def identity(self) -> GroupElement:
        return self.backend.identity()

    def generator_elements(self, with_inverses: bool = True) -> list[GroupElement]:
        gens = self.backend.generators()
        if with_inverses:
            for g in list(gens):
                gi = inv(g)
                if gi not in gens:
                    gens.append(gi)
        return gens

    # -- paths -------------------------------------------------------------

    def act_path(self, g: GroupElement, p: Path) -> Path:
        """Apply g edge by edge, threading the restriction cocycle."""
        if p.graph is not self.graph:
            raise DomainMismatch("path belongs to a different graph")
        if p.is_vertex:
            return self.graph.vertex_path(self.act_vertex(g, p.anchor))
        out = []
        h = g
        for e in p.edges:
            out.append(self.act_edge(h, e))
            h = self.cocycle_edge(h, e)
        return Path(self.graph, tuple(out))

    def restrict_path(self, g: GroupElement, p: Path) -> GroupElement:
        """The cocycle along a whole path; a vertex restricts to g itself."""
        if p.graph is not self.graph:
            raise DomainMismatch("path belongs to a different graph")
        h = g
        for e in p.edges:
            h = self.cocycle_edge(h, e)
        return h

    def strongly_fixes(self, g: GroupElement, p: Path,
                       budget: Optional[SearchBudget] = None) -> Verdict3:
        """gp = p together with an identity restriction.

        A vertex restricts to g itself, so it is strongly fixed exactly by
        the identity; searches over nontrivial elements therefore start at
        length-one paths.
        """
        if p.is_vertex:
            return is_identity(g, budget)
        if self.act_path(g, p) != p:
            return Verdict3.no("path is moved")
        return is_identity(self.restrict_path(g, p), budget)


# -- validation -------------------------------------------------------------


@dataclass(frozen=True)
class SystemReport:
    valid: bool
    problems: tuple[str, ...]
    weak_hypothesis_only: bool
    checked_generators: tuple[str, ...]


def validate_system(s: System) -> SystemReport:
    """Automorphism axioms plus the vertex-compatibility law on generators.

    The strong law asks sigma_{phi(g,e)} = sigma_g on every vertex; with
    ``accept_weak_hypothesis`` only the source of e is required, and the
    report flags it.
    """
    g0 = s.graph
    problems: list[str] = []
    weak_only = False
    gens = s.generator_elements()
    for g in gens:
        vimg = {}
        eimg = {}
        for v in g0.vertices:
            vimg[v] = s.act_vertex(g, v)
        for e in g0.edges:
            eimg[e] = s.act_edge(g, e)
        if set(vimg.values()) != set(g0.vertices):
            problems.append(f"NotAutomorphism: {g} is not bijective on vertices")
        if set(eimg.values()) != set(g0.edges):
            problems.append(f"NotAutomorphism: {g} is not bijective on edges")
        for e in g0.edges:
            if g0.range_of(eimg[e]) != vimg[g0.range_of(e)]:
                problems.append(f"NotAutomorphism: {g} breaks r at {e}")
            if g0.source_of(eimg[e]) != vimg[g0.source_of(e)]:
                problems.append(f"NotAutomorphism: {g} breaks d at {e}")
        for e in g0.edges:
            h = s.cocycle_edge(g, e)
            bad = [x for x in g0.vertices
                   if s.act_vertex(h, x) != s.act_vertex(g, x)]
            if not bad:
                continue
            src = g0.source_of(e)
            if src in bad:
                problems.append(f"StandingHypothesisViolated: ({g}, {e}, {src})")
            elif s.accept_weak_hypothesis:
                weak_only = True
            else:
                problems.append(f"StandingHypothesisViolated: ({g}, {e}, {bad[0]})")
    return SystemReport(valid=not problems, problems=tuple(problems),
                        weak_hypothesis_only=weak_only,
                        checked_generators=tuple(str(g) for g in gens))


def require_valid(s: System) -> System:
    rep = validate_system(s)
    if not rep.valid:
        first = rep.problems[0]
        if first.startswith("StandingHypothesisViolated"):
            raise StandingHypothesisViolated(first)
        raise NotAutomorphism(first)
    return s


# -- strongly fixed paths -----------------------------------------------------


@dataclass(frozen=True)
class InfinitudeWitness:
    """A restriction-state cycle with a strongly fixed completion.

    Pumping the cycle before taking the completion yields arbitrarily many
    distinct minimal strongly fixed paths.
    """

    base: tuple[str, ...]        # edges from the root to the cycle state
    cycle: tuple[str, ...]       # edges closing the non-fixed state cycle
    completion: tuple[str, ...]  # edges from the cycle state to identity restriction
    root_vertex: str

    def pumped(self, k: int) -> tuple[str, ...]:
        return self.base + self.cycle * k + self.completion


@dataclass(frozen=True)
class SfpReport:
    element: GroupElement
    minimal_paths: tuple[Path, ...]
    verdict: str                      # "finite" | "infinite" | "unknown"
    witness: Optional[InfinitudeWitness]
    states_explored: int
    depth_reached: int
    truncated: bool = False
    note: str = ""

    @property
    def is_finite(self) -> bool:
        return self.verdict == "finite"

    @property
    def is_infinite(self) -> bool:
        return self.verdict == "infinite"


_BISIM_MERGE_LIMIT = 256


class _StateGraph:
    """Shared search scaffold over states (restriction element, vertex)."""

    def __init__(self, system: System, budget: SearchBudget):
        self.system = system
        self.budget = budget
        self.meter = BudgetMeter(budget)
        self.elements: list[GroupElement] = []
        self.vertex_of: list[str] = []
        self.level_of: list[int] = []
        self.first_path: list[tuple[str, ...]] = []
        self.by_key: dict[tuple, int] = {}
        self.by_vertex: dict[str, list[int]] = {}
        self.unknown_reason: str = ""

    def _lookup(self, h: GroupElement, v: str) -> Optional[int]:
        key = (self.system.backend.key(h), v)
        if key in self.by_key:
            return self.by_key[key]
        if (self.system.backend.kind == "automaton"
                and len(self.elements) <= _BISIM_MERGE_LIMIT):
            for sid in self.by_vertex.get(v, ()):
                verdict = equal(self.elements[sid], h, self.budget.smaller())
                if verdict.is_unknown:
                    self.unknown_reason = "state-merge equality unknown"
                    return None
                if verdict.is_yes:
                    return sid
        return None

    def add(self, h: GroupElement, v: str, level: int,
            path: tuple[str, ...]) -> Optional[int]:
        sid = len(self.elements)
        if not self.meter.charge_state():
            return None
        self.elements.append(h)
        self.vertex_of.append(v)
        self.level_of.append(level)
        self.first_path.append(path)
        self.by_key[(self.system.backend.key(h), v)] = sid
        self.by_vertex.setdefault(v, []).append(sid)
        return sid


def minimal_strongly_fixed(system: System, g: GroupElement,
                           budget: Optional[SearchBudget] = None) -> SfpReport:
    """Breadth-first enumeration of the minimal strongly fixed paths of g.

    States are (restriction so far, current source vertex); expansion only
    follows edges the current restriction fixes, and a branch is accepted
    the first time the accumulated restriction is the identity.  A state
    cycle from which an accepted state stays reachable certifies that
    infinitely many minimal strongly fixed paths exist.
    """
    budget = budget or SearchBudget()
    sg = _StateGraph(system, budget)
    succ: dict[int, list[tuple[str, int]]] = {}
    accepted: list[tuple[tuple[str, ...], int]] = []  # (path, from-state)
    accept_from: set[int] = set()
    back_edges: list[tuple[int, str, int]] = []  # (from, edge, to already seen)
    unknown_reason = ""

    roots: list[int] = []
    for v in system.graph.vertices:
        sid = sg.add(g, v, 0, ())
        if sid is None:
            return SfpReport(g, (), "unknown", None, sg.meter.states_used,
                             sg.meter.depth_reached, note="state budget exhausted")
        roots.append(sid)

    frontier = list(roots)
    while frontier and not unknown_reason:
        nxt: list[int] = []
        for sid in frontier:
            h = sg.elements[sid]
            v = sg.vertex_of[sid]
            level = sg.level_of[sid]
            if not sg.meter.allow_depth(level + 1):
                unknown_reason = "depth budget exhausted"
                break
            for e in system.graph.edges_into(v):
                if system.act_edge(h, e) != e:
                    continue
                h2 = system.cocycle_edge(h, e)
                idv = is_identity(h2, budget.smaller())
                if idv.is_unknown:
                    unknown_reason = "identity test unknown"
                    break
                path2 = sg.first_path[sid] + (e,)
                if idv.is_yes:
                    accepted.append((path2, sid))
                    accept_from.add(sid)
                    continue
                v2 = system.graph.source_of(e)
                existing = sg._lookup(h2, v2)
                if sg.unknown_reason:
                    unknown_reason = sg.unknown_reason
                    break
                if existing is not None:
                    succ.setdefault(sid, []).append((e, existing))
                    back_edges.append((sid, e, existing))
                    continue
                new_id = sg.add(h2, v2, level + 1, path2)
                if new_id is None:
                    unknown_reason = "state budget exhausted"
                    break
                succ.setdefault(sid, []).append((e, new_id))
                nxt.append(new_id)
            if unknown_reason:
                break
        frontier = nxt

    closed = not unknown_reason

    # States that can still reach an acceptance.
    co_accept = set(accept_from)
    changed = True
    while changed:
        changed = False
        for sid, outs in succ.items():
            if sid in co_accept:
                continue
            if any(t in co_accept for _, t in outs):
                co_accept.add(sid)
                changed = True

    witness = _find_witness(sg, succ, co_accept, accepted, system)
    if witness is not None:
        cutoff = len(witness.base) + len(witness.cycle)
        paths = sorted({p for p, _ in accepted if len(p) <= cutoff} | {witness.pumped(1)},
                       key=lambda p: (len(p), p))
        return SfpReport(g, tuple(Path(system.graph, p) for p in paths),
                         "infinite", witness, sg.meter.states_used,
                         sg.meter.depth_reached)

    if not closed:
        paths = sorted({p for p, _ in accepted}, key=lambda p: (len(p), p))
        return SfpReport(g, tuple(Path(system.graph, p) for p in paths),
                         "unknown", None, sg.meter.states_used,
                         sg.meter.depth_reached, note=unknown_reason)

    paths, truncated = _enumerate_accept_paths(sg, succ, co_accept, accepted,
                                               roots, budget)
    return SfpReport(g, tuple(Path(system.graph, p) for p in paths), "finite",
                     None, sg.meter.states_used, sg.meter.depth_reached,
                     truncated=truncated)


def _find_witness(sg: _StateGraph, succ, co_accept, accepted, system) -> Optional[InfinitudeWitness]:
    """Pick a deterministic cycle-with-completion among co-accepting states."""
    # restrict the successor relation to co-accepting states
    sub = {s: [(e, t) for e, t in outs if t in co_accept]
           for s, outs in succ.items() if s in co_accept}
    cyc_state = None
    cyc_edges: Optional[tuple[str, ...]] = None
    for start in sorted(sub, key=lambda s: (sg.level_of[s], s)):
        found = _shortest_cycle(sub, start)
        if found is not None:
            cyc_state, cyc_edges = start, found
            break
    if cyc_state is None:
        return None
    completion = _shortest_completion(sg, succ, accepted, cyc_state)
    if completion is None:
        return None
    return InfinitudeWitness(base=sg.first_path[cyc_state], cycle=cyc_edges,
                             completion=completion,
                             root_vertex=sg.vertex_of[cyc_state])


def _shortest_cycle(sub, start) -> Optional[tuple[str, ...]]:
    frontier = [(start, ())]
    seen = {start}
    while frontier:
        nxt = []
        for sid, trail in frontier:
            for e, t in sub.get(sid, ()):
                if t == start:
                    return trail + (e,)
                if t not in seen:
                    seen.add(t)
                    nxt.append((t, trail + (e,)))
        frontier = nxt
    return None


def _shortest_completion(sg, succ, accepted, start) -> Optional[tuple[str, ...]]:
    """BFS from start to the nearest accepting transition."""
    frontier = [(start, ())]
    seen = {start}
    accept_map: dict[int, list[str]] = {}
    for p, s in accepted:
        accept_map.setdefault(s, []).append(p[-1])
    while frontier:
        nxt = []
        for sid, trail in frontier:
            if sid in accept_map:
                return trail + (sorted(accept_map[sid])[0],)
            for e, t in succ.get(sid, ()):
                if t not in seen:
                    seen.add(t)
                    nxt.append((t, trail + (e,)))
        frontier = nxt
    return None


def _enumerate_accept_paths(sg, succ, co_accept, accepted, roots, budget):
    """All root-to-acceptance edge sequences in a cycle-free state graph."""
    accept_map: dict[int, list[str]] = {}
    for p, s in accepted:
        accept_map.setdefault(s, []).append(p[-1])
    out: list[tuple[str, ...]] = []
    truncated = False
    limit = budget.max_states
    stack = [(r, ()) for r in reversed(roots)
             if r in co_accept or r in accept_map]
    while stack:
        sid, trail = stack.pop()
        if len(out) >= limit:
            truncated = True
            break
        for e in sorted(accept_map.get(sid, ())):
            out.append(trail + (e,))
        for e, t in sorted(succ.get(sid, ()), reverse=True):
            if t in co_accept:
                stack.append((t, trail + (e,)))
    out = sorted(set(out), key=lambda p: (len(p), p))
    return out, truncated


# -- pseudo-freeness ---------------------------------------------------------


def restriction_ball(system: System, budget: Optional[SearchBudget] = None):
    """Generators and inverses, closed under edge restrictions.

    Returns (elements in deterministic order, complete flag).  Identity
    elements are kept (callers skip them as needed).
    """
    budget = budget or SearchBudget()
    out: list[GroupElement] = []
    keys: set = set()
    complete = True
    frontier: list[GroupElement] = []
    for g in system.generator_elements():
        k = system.backend.key(g)
        if k in keys:
            continue
        if system.backend.kind == "automaton" and any(
                equal(g, o, budget.smaller()).is_yes for o in out):
            keys.add(k)
            continue
        keys.add(k)
        out.append(g)
        frontier.append(g)
    while frontier:
        if len(out) >= budget.max_ball:
            complete = False
            break
        nxt = []
        for g in frontier:
            for e in system.graph.edges:
                h = system.cocycle_edge(g, e)
                k = system.backend.key(h)
                if k in keys:
                    continue
                if system.backend.kind == "automaton" and len(out) <= _BISIM_MERGE_LIMIT:
                    if any(equal(h, o, budget.smaller()).is_yes for o in out):
                        keys.add(k)
                        continue
                keys.add(k)
                out.append(h)
                nxt.append(h)
                if len(out) >= budget.max_ball:
                    complete = False
                    break
            if not complete:
                break
        frontier = nxt
    if system.backend.kind == "finite":
        be = system.backend
        out = [GroupElement(be, i) for i in range(len(be.names))]
        complete = True
    return out, complete


def _integer_edge_orbit_data(system: System, e: str) -> tuple[int, int]:
    """Orbit length of e under the +1 action and the cocycle around the orbit."""
    one = GroupElement(system.backend, 1)
    cur = e
    total = 0
    length = 0
    while True:
        total += system.cocycle_edge(one, cur).payload
        cur = system.act_edge(one, cur)
        length += 1
        if cur == e:
            return length, total
        if length > 10_000_000:
            raise SelfsimError("edge orbit did not close")


def is_pseudo_free(system: System,
                   budget: Optional[SearchBudget] = None) -> Verdict3:
    """No nontrivial element may fix an edge with identity restriction.

    Exact for integer and finite backends; automaton backends are explored
    through the restriction-closure ball and may answer Unknown.
    """
    budget = budget or SearchBudget()
    if system.backend.kind == "integer":
        for e in system.graph.edges:
            length, total = _integer_edge_orbit_data(system, e)
            if total == 0:
                return Verdict3.no({"element": length, "edge": e})
        return Verdict3.yes({"method": "edge-orbit cocycle sums all nonzero"})
    ball, complete = restriction_ball(system, budget)
    for g in ball:
        idg = is_identity(g, budget)
        if idg.is_unknown:
            return Verdict3.unknown("identity test unknown in ball")
        if idg.is_yes:
            continue
        for e in system.graph.edges:
            if system.act_edge(g, e) != e:
                continue
            fix = is_identity(system.cocycle_edge(g, e), budget)
            if fix.is_unknown:
                return Verdict3.unknown("cocycle identity test unknown")
            if fix.is_yes:
                return Verdict3.no({"element": str(g), "edge": e})
    if complete:
        return Verdict3.yes({"ball": len(ball)})
    return Verdict3.unknown(f"ball truncated at {len(ball)} elements")


# -- slackness ----------------------------------------------------------------


def slack_at(system: System, g: GroupElement, x: str,
             budget: Optional[SearchBudget] = None) -> Verdict3:
    """Do all long enough paths with range x become strongly fixed by g?

    Yes carries the witness level; No carries either a moved path that
    extends forever or a restriction-state cycle that never reaches the
    identity.
    """
    budget = budget or SearchBudget()
    sg = _StateGraph(system, budget)
    root = sg.add(g, x, 0, ())
    if root is None:
        return Verdict3.unknown("state budget exhausted")
    succ: dict[int, list[int]] = {}
    max_open_depth = 0
    frontier = [root]
    while frontier:
        nxt = []
        for sid in frontier:
            h = sg.elements[sid]
            v = sg.vertex_of[sid]
            level = sg.level_of[sid]
            if not sg.meter.allow_depth(level + 1):
                return Verdict3.unknown("depth budget exhausted")
            for e in system.graph.edges_into(v):
                if system.act_edge(h, e) != e:
                    moved = sg.first_path[sid] + (e,)
                    if has_unbounded_incoming(system.graph, system.graph.source_of(e)):
                        return Verdict3.no({"moved_path": moved})
                    continue  # moved branch dies out; harmless beyond its depth
                h2 = system.cocycle_edge(h, e)
                idv = is_identity(h2, budget.smaller())
                if idv.is_unknown:
                    return Verdict3.unknown("identity test unknown")
                if idv.is_yes:
                    continue  # strongly fixed from here on
                v2 = system.graph.source_of(e)
                existing = sg._lookup(h2, v2)
                if sg.unknown_reason:
                    return Verdict3.unknown(sg.unknown_reason)
                if existing is not None:
                    succ.setdefault(sid, []).append(existing)
                    cyc = _reaches(succ, existing, sid)
                    if cyc:
                        return Verdict3.no({
                            "cycle_base": sg.first_path[existing],
                            "cycle_vertex": sg.vertex_of[existing]})
                    continue
                new_id = sg.add(h2, v2, level + 1, sg.first_path[sid] + (e,))
                if new_id is None:
                    return Verdict3.unknown("state budget exhausted")
                succ.setdefault(sid, []).append(new_id)
                max_open_depth = max(max_open_depth, level + 1)
                nxt.append(new_id)
        frontier = nxt
    return Verdict3.yes({"level": max_open_depth + 1})


def _reaches(succ: dict[int, list[int]], start: int, target: int) -> bool:
    if start == target:
        return True
    seen = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        for t in succ.get(s, ()):
            if t == target:
                return True
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return False


# -- twisted circuits ---------------------------------------------------------


@dataclass(frozen=True)
class PeriodicCertificate:
    prefix: Path
    cycle: Path


@dataclass(frozen=True)
class PathOrPrefix:
    """Result of an iterative infinite-path construction.

    Either an eventually periodic certificate or, when the iteration budget
    ran out before the state repeated, just the finite prefix built so far.
    """

    periodic: Optional[PeriodicCertificate]
    prefix_only: Optional[Path] = None
    note: str = ""

    @property
    def is_periodic(self) -> bool:
        return self.periodic is not None


def g_circuit_fixed_point(system: System, g: GroupElement, gamma: Path,
                          depth: int = 512) -> PathOrPrefix:
    """Iterate gamma^{n+1} = g_n gamma^n, g_{n+1} = phi(g_n, gamma^n).

    The concatenation gamma^1 gamma^2 ... is the unique infinite path fixed
    by (beta gamma, g, beta)-shaped elements; the iteration stops with a
    certificate once the pair (g_n, gamma^n) repeats.
    """
    if gamma.is_vertex:
        raise NotAGCircuit("twisted circuit needs a nonempty path")
    if gamma.source_vertex() != system.act_vertex(g, gamma.range_vertex()):
        raise NotAGCircuit("d(gamma) != g * r(gamma)")
    seen: dict[tuple, int] = {}
    history: list[tuple[GroupElement, Path]] = []
    segments: list[Path] = []
    cur_g, cur_p = g, gamma
    for n in range(depth):
        key = (system.backend.key(cur_g), cur_p.edges)
        m = seen.get(key)
        if m is None and system.backend.kind == "automaton" and len(history) <= 64:
            # merge bisimilar restriction states so short words still close
            for idx, (hg, hp) in enumerate(history):
                if hp == cur_p and equal(hg, cur_g).is_yes:
                    m = idx
                    break
        if m is not None:
            prefix_edges = tuple(itertools.chain.from_iterable(
                p.edges for p in segments[:m]))
            cycle_edges = tuple(itertools.chain.from_iterable(
                p.edges for p in segments[m:]))
            prefix = (Path(system.graph, prefix_edges) if prefix_edges
                      else system.graph.vertex_path(gamma.range_vertex()))
            return PathOrPrefix(PeriodicCertificate(prefix, Path(system.graph, cycle_edges)))
        seen[key] = len(segments)
        history.append((cur_g, cur_p))
        segments.append(cur_p)
        nxt_p = system.act_path(cur_g, cur_p)
        nxt_g = system.restrict_path(cur_g, cur_p)
        cur_g, cur_p = nxt_g, nxt_p
    edges = tuple(itertools.chain.from_iterable(p.edges for p in segments))
    return PathOrPrefix(None, Path(system.graph, edges),
                        note=f"no state repetition within depth {depth}")
