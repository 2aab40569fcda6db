"""Eventually periodic infinite paths and germ arithmetic.

Infinite paths are represented as prefix + primitive repeating circuit in a
normal form that makes equality syntactic: the circuit is never a proper
power and the prefix cannot absorb a rotation of the circuit.  These paths
are dense in the full infinite path space and suffice for every fixed-point
and property computation on finite graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .graph import Graph, Path, compose, is_circuit
from .groups import GroupElement, equal
from .semigroup import SgeElement, f_idempotent, sge_mul
from .system import PathOrPrefix, PeriodicCertificate, System
from .verdict import (DomainMismatch, NonComposableGerms, SearchBudget,
                      SelfsimError, UncertifiedPeriodicity, Verdict3, WrongShape)


def _primitive_root(edges: tuple[str, ...]) -> tuple[str, ...]:
    n = len(edges)
    for p in range(1, n + 1):
        if n % p == 0 and edges == edges[:p] * (n // p):
            return edges[:p]
    return edges


@dataclass(frozen=True)
class EventuallyPeriodicPath:
    """prefix . cycle . cycle . ...  in normal form."""

    graph: Graph = field(compare=False, repr=False)
    prefix_edges: tuple[str, ...] = ()
    cycle_edges: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.cycle_edges:
            raise SelfsimError("the repeating part must be nonempty")
        cyc = _primitive_root(self.cycle_edges)
        pre = self.prefix_edges
        while pre and pre[-1] == cyc[-1]:
            pre = pre[:-1]
            cyc = (cyc[-1],) + cyc[:-1]
        object.__setattr__(self, "prefix_edges", pre)
        object.__setattr__(self, "cycle_edges", cyc)
        cpath = Path(self.graph, self.cycle_edges)
        if not is_circuit(cpath):
            raise SelfsimError("repeating part must be a circuit")
        if self.prefix_edges:
            p = Path(self.graph, self.prefix_edges)
            if p.source_vertex() != cpath.range_vertex():
                raise SelfsimError("prefix does not feed the circuit")

    @staticmethod
    def of(prefix: Path, cycle: Path) -> "EventuallyPeriodicPath":
        return EventuallyPeriodicPath(cycle.graph, prefix.edges, cycle.edges)

    @staticmethod
    def periodic(cycle: Path) -> "EventuallyPeriodicPath":
        return EventuallyPeriodicPath(cycle.graph, (), cycle.edges)

    def range_vertex(self) -> str:
        if self.prefix_edges:
            return self.graph.range_of(self.prefix_edges[0])
        return self.graph.range_of(self.cycle_edges[0])

    def edge_at(self, i: int) -> str:
        np = len(self.prefix_edges)
        if i < np:
            return self.prefix_edges[i]
        return self.cycle_edges[(i - np) % len(self.cycle_edges)]

    def prefix_path(self, n: int) -> Path:
        """The finite path of the first n edges."""
        if n == 0:
            return self.graph.vertex_path(self.range_vertex())
        return Path(self.graph, tuple(self.edge_at(i) for i in range(n)))

    def in_cylinder(self, beta: Path) -> bool:
        if beta.is_vertex:
            return beta.anchor == self.range_vertex()
        return self.prefix_path(beta.length) == beta

    def strip(self, beta: Path) -> "EventuallyPeriodicPath":
        """Drop a finite prefix beta, renormalizing."""
        if not self.in_cylinder(beta):
            raise DomainMismatch("path does not start with the given prefix")
        n = beta.length
        np = len(self.prefix_edges)
        if n <= np:
            return EventuallyPeriodicPath(self.graph, self.prefix_edges[n:],
                                          self.cycle_edges)
        k = (n - np) % len(self.cycle_edges)
        cyc = self.cycle_edges[k:] + self.cycle_edges[:k]
        return EventuallyPeriodicPath(self.graph, (), cyc)

    def prepend(self, beta: Path) -> "EventuallyPeriodicPath":
        if not beta.is_vertex and beta.source_vertex() != self.range_vertex():
            raise DomainMismatch("prefix does not compose with the path")
        if beta.is_vertex:
            if beta.anchor != self.range_vertex():
                raise DomainMismatch("anchor mismatch")
            return self
        return EventuallyPeriodicPath(self.graph, beta.edges + self.prefix_edges,
                                      self.cycle_edges)

    def __str__(self) -> str:
        pre = Path(self.graph, self.prefix_edges) if self.prefix_edges else None
        cyc = Path(self.graph, self.cycle_edges)
        return (f"{pre}({cyc})^inf" if pre is not None else f"({cyc})^inf")


def from_certificate(cert: PeriodicCertificate) -> EventuallyPeriodicPath:
    return EventuallyPeriodicPath(cert.cycle.graph, cert.prefix.edges,
                                  cert.cycle.edges)


def g_act_infinite(system: System, g: GroupElement, xi: EventuallyPeriodicPath,
                   depth: int = 512) -> PathOrPrefix:
    """Apply g prefix-wise; certify periodicity of the image when the
    restriction state repeats along the repeating part."""
    pre = xi.prefix_path(len(xi.prefix_edges))
    img_prefix = system.act_path(g, pre)
    h = system.restrict_path(g, pre)
    cyc = Path(system.graph, xi.cycle_edges)
    images: list[Path] = []
    seen: dict[object, int] = {}
    history: list[GroupElement] = []
    for n in range(depth):
        key = system.backend.key(h)
        m = seen.get(key)
        if m is None and system.backend.kind == "automaton" and len(history) <= 64:
            for idx, prev in enumerate(history):
                if equal(prev, h).is_yes:
                    m = idx
                    break
        if m is not None:
            head = img_prefix.edges + tuple(
                e for p in images[:m] for e in p.edges)
            loop = tuple(e for p in images[m:] for e in p.edges)
            return PathOrPrefix(PeriodicCertificate(
                Path(system.graph, head) if head else system.graph.vertex_path(
                    system.act_vertex(g, xi.range_vertex())),
                Path(system.graph, loop)))
        seen[key] = len(images)
        history.append(h)
        images.append(system.act_path(h, cyc))
        h = system.restrict_path(h, cyc)
    edges = img_prefix.edges + tuple(e for p in images for e in p.edges)
    return PathOrPrefix(None, Path(system.graph, edges),
                        note=f"no restriction-state repetition within {depth} turns")


@dataclass(frozen=True)
class GermElement:
    """A semigroup element localized at a base path inside its domain cylinder."""

    s: SgeElement
    base: EventuallyPeriodicPath

    def __post_init__(self):
        if self.s.is_zero:
            raise SelfsimError("germs require a nonzero semigroup element")
        if not self.base.in_cylinder(self.s.beta):
            raise DomainMismatch("base path is outside the domain cylinder")

    @property
    def system(self) -> System:
        return self.s.system

    def apply(self, depth: int = 512) -> EventuallyPeriodicPath:
        """The image of the base point under the localized element."""
        rest = self.base.strip(self.s.beta)
        moved = g_act_infinite(self.system, self.s.g, rest, depth)
        if not moved.is_periodic:
            raise UncertifiedPeriodicity(moved.note)
        return from_certificate(moved.periodic).prepend(self.s.alpha)

    def __str__(self) -> str:
        return f"[{self.s.alpha}; {self.s.g}; {self.s.beta}] @ {self.base}"


def unit_germ(system: System, xi: EventuallyPeriodicPath) -> GermElement:
    x = system.graph.vertex_path(xi.range_vertex())
    return GermElement(f_idempotent(system, x), xi)


def germ_adjoint(u: GermElement, depth: int = 512) -> GermElement:
    from .semigroup import sge_adjoint
    return GermElement(sge_adjoint(u.s), u.apply(depth))


def germ_compose(u: GermElement, v: GermElement, depth: int = 512) -> GermElement:
    """Defined when u is based at the image of v's base."""
    if u.system is not v.system:
        raise NonComposableGerms("germs over different systems")
    if u.base != v.apply(depth):
        raise NonComposableGerms("u is not based at v's image")
    prod = sge_mul(u.s, v.s)
    if prod.is_zero:
        raise NonComposableGerms("semigroup product vanished")
    return GermElement(prod, v.base)


def germ_equal(u: GermElement, v: GermElement,
               budget: Optional[SearchBudget] = None,
               depth: int = 512) -> Verdict3:
    """Same base and some cylinder idempotent equalizing the two elements.

    Reduces to: the two images agree as infinite paths, and along the base
    some finite prefix gives equal restrictions.  The restriction pair walks
    the repeating part, so a repeated pair state without an equality is a
    finite certificate of inequality.
    """
    budget = budget or SearchBudget()
    if u.system is not v.system:
        raise NonComposableGerms("germs over different systems")
    system = u.system
    if u.base != v.base:
        return Verdict3.no("different base points")
    xi = u.base
    s, t = u.s, v.s
    if s.alpha.length - s.beta.length != t.alpha.length - t.beta.length:
        return Verdict3.no("images have different length offsets")
    try:
        if u.apply(depth) != v.apply(depth):
            return Verdict3.no("images differ as infinite paths")
    except UncertifiedPeriodicity as exc:
        return Verdict3.unknown(f"image periodicity uncertified: {exc}")
    n0 = max(s.beta.length, t.beta.length)
    eps_s = xi.strip(s.beta)
    eps_t = xi.strip(t.beta)
    hs = system.restrict_path(s.g, eps_s.prefix_path(n0 - s.beta.length))
    ht = system.restrict_path(t.g, eps_t.prefix_path(n0 - t.beta.length))
    seen: dict[tuple, int] = {}
    n = n0
    steps = 0
    while steps <= budget.max_depth + depth:
        v3 = equal(hs, ht, budget)
        if v3.is_unknown:
            return Verdict3.unknown("restriction equality unknown")
        if v3.is_yes:
            return Verdict3.yes({"prefix_length": n})
        # phase within the repeating part of the base
        np = len(xi.prefix_edges)
        phase = (n - np) % len(xi.cycle_edges) if n >= np else -(np - n)
        key = (system.backend.key(hs), system.backend.key(ht), phase)
        if n >= np and key in seen:
            return Verdict3.no({"cycle_from": seen[key], "cycle_to": n})
        if n >= np:
            seen[key] = n
        e = xi.edge_at(n)
        hs = system.cocycle_edge(hs, e)
        ht = system.cocycle_edge(ht, e)
        n += 1
        steps += 1
    return Verdict3.unknown("prefix search budget exhausted")


def unique_fixed_point(system: System, t: SgeElement,
                       depth: int = 512) -> Optional[PathOrPrefix]:
    """The single fixed path of a strictly length-increasing element.

    Exists exactly when beta prefixes alpha; the remainder then closes a
    twisted circuit whose iteration builds the fixed path.
    """
    from .system import g_circuit_fixed_point
    if t.is_zero:
        raise WrongShape("zero has no fixed point")
    if t.alpha.length <= t.beta.length:
        raise WrongShape("|alpha| must exceed |beta|")
    if not t.beta.is_prefix_of(t.alpha):
        return None
    gamma = t.alpha.suffix_after(t.beta.length)
    res = g_circuit_fixed_point(system, t.g, gamma, depth)
    if res.is_periodic:
        xi = from_certificate(res.periodic).prepend(t.beta)
        return PathOrPrefix(PeriodicCertificate(
            Path(system.graph, xi.prefix_edges) if xi.prefix_edges
            else system.graph.vertex_path(xi.range_vertex()),
            Path(system.graph, xi.cycle_edges)))
    return PathOrPrefix(None, compose(t.beta, res.prefix_only), note=res.note)


def isolated_fixed_point(system: System, t: SgeElement,
                         depth: int = 512) -> Verdict3:
    """Is the unique fixed point isolated?  Yes iff the closing twisted
    circuit has no entry."""
    from .graph import path_has_entry
    fp = unique_fixed_point(system, t, depth)
    if fp is None:
        raise WrongShape("element has no fixed point to test")
    gamma = t.alpha.suffix_after(t.beta.length)
    if path_has_entry(system.graph, gamma):
        entries = [system.graph.source_of(e) for e in gamma.edges
                   if not system.graph.is_simple_vertex(system.graph.source_of(e))]
        return Verdict3.no({"entry_vertices": sorted(set(entries))})
    return Verdict3.yes({"no_entry_along": str(gamma)})
