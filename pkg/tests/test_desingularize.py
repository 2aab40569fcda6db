import random

import pytest

from selfsim.desingularize import (LazyEdgeFamily, countable_property_bridge,
                                   desingularize_infinite_receiver,
                                   desingularize_source)
from selfsim.graph import Graph, condition_L
from selfsim.groups import FiniteGroupBackend, GroupElement
from selfsim.presets import trivial_group_backend
from selfsim.system import System, TableAction, validate_system
from selfsim.verdict import (IncoherentFamily, NotASource,
                             NotInfiniteReceiver)


def trivial_system(graph: Graph, name="t") -> System:
    be = trivial_group_backend()
    ident = GroupElement(be, 0)
    action = TableAction(be, graph, {"1": {v: v for v in graph.vertices}},
                         {"1": {e: e for e in graph.edges}},
                         {"1": {e: ident for e in graph.edges}})
    return System(graph=graph, backend=be, action=action, name=name,
                  amenable_asserted=True)


def z2_mirrored_system() -> System:
    g = Graph(["x1", "x2", "w"], {"a1": ("x1", "w"), "a2": ("x2", "w"),
                                  "l0": ("w", "w"), "l1": ("w", "w")})
    z2 = FiniteGroupBackend(["1", "g"], {("1", "1"): "1", ("1", "g"): "g",
                                         ("g", "1"): "g", ("g", "g"): "1"})
    gg = GroupElement(z2, "g")
    action = TableAction(z2, g,
                         {"g": {"x1": "x2", "x2": "x1", "w": "w"}},
                         {"g": {"a1": "a2", "a2": "a1", "l0": "l0", "l1": "l1"}},
                         {"g": {e: gg for e in g.edges}})
    return System(graph=g, backend=z2, action=action, name="mirrored")


def test_not_a_source():
    g = Graph(["v"], {"e": ("v", "v")})
    with pytest.raises(NotASource):
        desingularize_source(trivial_system(g), "v")


def test_classic_tail():
    g = Graph(["s", "w"], {"a": ("s", "w"), "l": ("w", "w"), "m": ("w", "w")})
    ts = desingularize_source(trivial_system(g), "s")
    for level in range(1, 7):
        rep = ts.level_report(level)
        assert rep["valid"], rep["problems"]
        assert rep["source_free"]
        assert rep["row_finite"]
        assert rep["condition_L"] == condition_L(g)
    m2 = ts.materialize(2)
    assert "v[s#1]" in m2.graph.vertices
    assert m2.graph.edges_into("s") == ("e[s#1]",)


def test_mirrored_sources_one_descriptor():
    s = z2_mirrored_system()
    ts = desingularize_source(s, "x1")
    assert [v for v, _ in ts.descriptors[0].orbit_reps] == ["x1", "x2"]
    m = ts.materialize(3)
    assert validate_system(m).valid
    # the swap carries one tail onto the other
    gg = GroupElement(s.backend, "g")
    assert m.act_edge(gg, "e[x1#2]") == "e[x2#2]"
    assert m.act_vertex(gg, "v[x1#1]") == "v[x2#1]"
    # pass-through restriction along tail edges
    assert m.cocycle_edge(gg, "e[x1#2]") == gg


def test_tail_cocycle_pass_through():
    g = Graph(["s", "w"], {"a": ("s", "w"), "l": ("w", "w"), "m": ("w", "w")})
    ts = desingularize_source(trivial_system(g), "s")
    m = ts.materialize(4)
    ident = m.identity()
    for e in m.graph.edges:
        assert m.cocycle_edge(ident, e) == ident


def test_level_coherence():
    g = Graph(["s", "w"], {"a": ("s", "w"), "l": ("w", "w"), "m": ("w", "w")})
    ts = desingularize_source(trivial_system(g), "s")
    small = ts.materialize(2)
    big = ts.materialize(3)
    assert set(small.graph.vertices) <= set(big.graph.vertices)
    assert set(small.graph.edges) <= set(big.graph.edges)
    for e in small.graph.edges:
        assert small.graph.source_of(e) == big.graph.source_of(e)
        assert small.graph.range_of(e) == big.graph.range_of(e)


def test_receiver_requires_family():
    g = Graph(["v", "w"], {"k": ("w", "w"), "a": ("w", "v")})
    s = trivial_system(g)
    with pytest.raises(NotInfiniteReceiver):
        desingularize_infinite_receiver(s, "v", None)


def test_receiver_rejects_present_edges():
    g = Graph(["v", "w"], {"k": ("w", "w"), "a": ("w", "v")})
    s = trivial_system(g)
    ident = GroupElement(s.backend, 0)
    fam = LazyEdgeFamily(lambda i: "w", lambda n, e, i: i, lambda h, i: ident)
    with pytest.raises(NotInfiniteReceiver):
        desingularize_infinite_receiver(s, "v", fam)


def test_receiver_standard_replacement():
    g = Graph(["v", "w"], {"k": ("w", "w"), "b": ("v", "w")})
    s = trivial_system(g)
    ident = GroupElement(s.backend, 0)
    fam = LazyEdgeFamily(lambda i: "w", lambda n, e, i: i, lambda h, i: ident,
                         finite_source_support=("w",))
    ts = desingularize_infinite_receiver(s, "v", fam)
    m = ts.materialize(3)
    assert m.graph.edges_into("v") == ("e[v#1]", "f[v#1]")
    for level in range(1, 7):
        rep = ts.level_report(level)
        assert rep["valid"] and rep["source_free"]
    # composite connector paths restrict like the replaced family edges
    ident2 = m.identity()
    alpha = m.graph.path(["e[v#1]", "e[v#2]", "f[v#3]"])
    assert m.restrict_path(ident2, alpha) == ident2


def test_receiver_incoherent_family_rejected():
    # stabilizing generator moves the source of an index
    g = Graph(["v", "w", "u"], {"k": ("w", "u"), "k2": ("u", "w"),
                                "b": ("v", "w")})
    z2 = FiniteGroupBackend(["1", "g"], {("1", "1"): "1", ("1", "g"): "g",
                                         ("g", "1"): "g", ("g", "g"): "1"})
    gg = GroupElement(z2, "g")
    action = TableAction(z2, g,
                         {"g": {"v": "v", "w": "u", "u": "w"}},
                         {"g": {"k": "k2", "k2": "k", "b": "b"}},
                         {"g": {e: gg for e in g.edges}})
    s = System(graph=g, backend=z2, action=action, name="swapish")
    ident = GroupElement(z2, "1")
    fam = LazyEdgeFamily(lambda i: "w" if i % 2 else "u",
                         lambda n, e, i: i + (1 if i % 2 else -1),
                         lambda h, i: ident)
    with pytest.raises(IncoherentFamily):
        desingularize_infinite_receiver(s, "v", fam)


def test_bridge_source_tail_two_components():
    # tails cannot be dominated from a separate component
    g = Graph(["s", "w", "z"], {"a": ("s", "w"), "l": ("w", "w"),
                                "m": ("w", "w"), "q": ("z", "z"),
                                "q2": ("z", "z")})
    ts = desingularize_source(trivial_system(g), "s")
    br = countable_property_bridge(ts)
    assert br.minimal.is_no
    assert br.locally_contracting.is_yes


def test_bridge_receiver_minimal_yes():
    g = Graph(["v", "w"], {"k": ("w", "w"), "b": ("v", "w")})
    s = trivial_system(g)
    ident = GroupElement(s.backend, 0)
    fam = LazyEdgeFamily(lambda i: "w", lambda n, e, i: i, lambda h, i: ident,
                         finite_source_support=("w",))
    ts = desingularize_infinite_receiver(s, "v", fam)
    br = countable_property_bridge(ts)
    assert br.minimal.is_yes
    assert br.hausdorff.is_yes
    assert br.effective.is_yes


def test_bridge_effective_stabilized_tail_fails():
    # a nontrivial element fixing a source pointwise-fixes its tail thread
    g = Graph(["s", "w"], {"a": ("s", "w"), "l": ("w", "w"), "m": ("w", "w")})
    z2 = FiniteGroupBackend(["1", "g"], {("1", "1"): "1", ("1", "g"): "g",
                                         ("g", "1"): "g", ("g", "g"): "1"})
    gg = GroupElement(z2, "g")
    action = TableAction(z2, g, {"g": {"s": "s", "w": "w"}},
                         {"g": {"a": "a", "l": "m", "m": "l"}},
                         {"g": {e: gg for e in g.edges}})
    s = System(graph=g, backend=z2, action=action, name="stab")
    assert validate_system(s).valid
    ts = desingularize_source(s, "s")
    br = countable_property_bridge(ts)
    assert br.effective.is_no
    assert br.effective.certificate["tail_at"] == "s"


def test_random_source_desingularizations():
    rng = random.Random(2026)
    count = 0
    while count < 20:
        nv = rng.randint(2, 5)
        vs = [f"v{i}" for i in range(nv)]
        edges = {}
        eid = 0
        for _ in range(rng.randint(nv, 8)):
            src = rng.choice(vs)
            dst = rng.choice(vs[1:])  # keep v0 unreceiving
            edges[f"e{eid}"] = (src, dst)
            eid += 1
        if not any(s == "v0" for s, _ in edges.values()):
            edges[f"e{eid}"] = ("v0", rng.choice(vs[1:]))
            eid += 1
        for v in vs[1:]:  # v0 stays the single source
            if not any(r == v for _, r in edges.values()):
                edges[f"e{eid}"] = (rng.choice(vs), v)
                eid += 1
        g = Graph(vs, edges)
        assert g.sources() == ("v0",)
        s = trivial_system(g, name=f"rand{count}")
        ts = desingularize_source(s, "v0")
        core_l = condition_L(g)
        for level in range(1, 7):
            rep = ts.level_report(level)
            assert rep["valid"], rep["problems"]
            assert rep["source_free"]
            assert rep["row_finite"]
            assert rep["condition_L"] == core_l
        count += 1


def test_receiver_connector_cocycle_matches_family():
    # nontrivial family cocycle: connectors must restrict exactly like the
    # edges they replace, and composite tail paths likewise
    g = Graph(["v", "w"], {"k": ("w", "w"), "b": ("v", "w")})
    z2 = FiniteGroupBackend(["1", "g"], {("1", "1"): "1", ("1", "g"): "g",
                                         ("g", "1"): "g", ("g", "g"): "1"})
    one, gg = GroupElement(z2, "1"), GroupElement(z2, "g")
    action = TableAction(z2, g, {"g": {"v": "v", "w": "w"}},
                         {"g": {"k": "k", "b": "b"}},
                         {"g": {"k": gg, "b": gg}})
    s = System(graph=g, backend=z2, action=action, name="par2")

    def fam_cocycle(h, i):
        if h == one:
            return one
        return gg if i % 2 else one  # per-index homomorphisms into Z/2

    fam = LazyEdgeFamily(lambda i: "w", lambda n, e, i: i, fam_cocycle,
                         finite_source_support=("w",))
    ts = desingularize_infinite_receiver(s, "v", fam)
    m = ts.materialize(4)
    assert validate_system(m).valid
    for i in (1, 2, 3, 4):
        assert m.cocycle_edge(gg, f"f[v#{i}]") == fam_cocycle(gg, i)
        alpha_edges = [f"e[v#{k}]" for k in range(1, i)] + [f"f[v#{i}]"]
        alpha = m.graph.path(alpha_edges)
        assert m.restrict_path(gg, alpha) == fam_cocycle(gg, i)
        # tail edges pass the element straight through
        assert m.cocycle_edge(gg, f"e[v#{i}]") == gg
