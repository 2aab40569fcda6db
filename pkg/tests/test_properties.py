import random

from selfsim.graph import Graph, condition_L, reach, simple_cycles
from selfsim.groups import GroupElement
from selfsim.presets import (cuntz_system, grigorchuk_erschler_system,
                             trivial_group_backend)
from selfsim.properties import (check_effective, check_hausdorff,
                                check_locally_contracting, check_minimal,
                                g_transitive, simplicity_report, vertex_orbits)
from selfsim.system import System, TableAction
from selfsim.verdict import SearchBudget


def trivial_system(graph: Graph) -> System:
    be = trivial_group_backend()
    ident = GroupElement(be, 0)
    action = TableAction(be, graph, {"1": {v: v for v in graph.vertices}},
                         {"1": {e: e for e in graph.edges}},
                         {"1": {e: ident for e in graph.edges}})
    return System(graph=graph, backend=be, action=action, name="trivial",
                  amenable_asserted=True)


# -- hausdorff -------------------------------------------------------------------


def test_hausdorff_pseudo_free_shortcut():
    from selfsim.katsura import build_katsura, make_data
    s = build_katsura(make_data([[2, 1], [1, 2]], [[1, 1], [1, 1]]))
    v = check_hausdorff(s)
    assert v.is_yes and v.certificate["via"] == "pseudo-free"


def test_hausdorff_grigorchuk_witness_b(grig):
    v = check_hausdorff(grig)
    assert v.is_no and v.certificate["element"] == "b"


def test_hausdorff_katsura_no(katsura):
    v = check_hausdorff(katsura)
    assert v.is_no and v.certificate["element"] == "1"


def test_hausdorff_erschler_no():
    v = check_hausdorff(grigorchuk_erschler_system())
    assert v.is_no


def test_hausdorff_monotone_in_budget(grig, katsura):
    small = SearchBudget(max_states=200, max_depth=8, max_ball=8)
    big = SearchBudget()
    for s in (grig, katsura):
        a = check_hausdorff(s, small)
        b = check_hausdorff(s, big)
        if not a.is_unknown:
            assert a.kind == b.kind


# -- minimality --------------------------------------------------------------------


def test_minimal_single_vertex(grig):
    assert check_minimal(grig).is_yes


def test_minimal_two_components():
    g = Graph(["v", "w"], {"e": ("v", "v"), "f": ("w", "w")})
    v = check_minimal(trivial_system(g))
    assert v.is_no


def test_minimal_orbit_rescues_components():
    # two isolated loops joined by a swapping symmetry
    from selfsim.groups import FiniteGroupBackend
    g = Graph(["v", "w"], {"e": ("v", "v"), "f": ("w", "w")})
    z2 = FiniteGroupBackend(["1", "s"], {("1", "1"): "1", ("1", "s"): "s",
                                         ("s", "1"): "s", ("s", "s"): "1"})
    s_el = GroupElement(z2, "s")
    action = TableAction(z2, g, {"s": {"v": "w", "w": "v"}},
                         {"s": {"e": "f", "f": "e"}},
                         {"s": {"e": s_el, "f": s_el}})
    sysm = System(graph=g, backend=z2, action=action)
    assert check_minimal(sysm).is_yes


def test_minimal_katsura(katsura):
    assert check_minimal(katsura).is_yes


def brute_force_weakly_transitive(system) -> bool:
    """Independent oracle straight from the definition on small graphs."""
    g = system.graph
    orbits = vertex_orbits(system)
    cycles = simple_cycles(g)
    for c in cycles:
        cyc_vertices = {g.source_of(e) for e in c.edges}
        for x in g.vertices:
            if not any(reach(g, v, u) for v in cyc_vertices
                       for u in orbits[x]):
                return False
    return True


def test_minimal_matches_brute_force_on_randoms():
    rng = random.Random(100)
    for _ in range(100):
        nv = rng.randint(1, 5)
        vs = [f"v{i}" for i in range(nv)]
        ne = rng.randint(1, 8)
        edges = {f"e{i}": (rng.choice(vs), rng.choice(vs)) for i in range(ne)}
        sysm = trivial_system(Graph(vs, edges))
        assert check_minimal(sysm).is_yes == brute_force_weakly_transitive(sysm)


def test_g_transitive_no_sinks_equivalence():
    rng = random.Random(200)
    agree = 0
    for _ in range(100):
        nv = rng.randint(1, 4)
        vs = [f"v{i}" for i in range(nv)]
        ne = rng.randint(nv, 8)
        edges = {f"e{i}": (rng.choice(vs), rng.choice(vs)) for i in range(ne)}
        g = Graph(vs, edges)
        if g.sinks():
            continue
        sysm = trivial_system(g)
        assert check_minimal(sysm).is_yes == g_transitive(sysm)
        agree += 1
    assert agree > 20


# -- effectiveness ------------------------------------------------------------------


def test_effective_single_vertex_faithful(grig):
    v = check_effective(grig)
    assert v.is_yes and "single-vertex" in v.certificate["via"]


def test_effective_single_loop_fails():
    assert check_effective(cuntz_system(1)).is_no


def test_effective_katsura(katsura):
    assert check_effective(katsura).is_yes


def test_effective_slack_failure_detected():
    # s fixes every path from v but its restriction never dies out
    from selfsim.groups import FiniteGroupBackend
    g = Graph(["v"], {"e": ("v", "v"), "f": ("v", "v")})
    z2 = FiniteGroupBackend(["1", "s"], {("1", "1"): "1", ("1", "s"): "s",
                                         ("s", "1"): "s", ("s", "s"): "1"})
    s_el = GroupElement(z2, "s")
    action = TableAction(z2, g, {"s": {"v": "v"}},
                         {"s": {"e": "e", "f": "f"}},
                         {"s": {"e": s_el, "f": s_el}})
    sysm = System(graph=g, backend=z2, action=action)
    v = check_effective(sysm)
    assert v.is_no and v.certificate["element"] == "s"


def test_locally_contracting_is_condition_L():
    rng = random.Random(321)
    for _ in range(100):
        nv = rng.randint(1, 5)
        vs = [f"v{i}" for i in range(nv)]
        ne = rng.randint(1, 8)
        edges = {f"e{i}": (rng.choice(vs), rng.choice(vs)) for i in range(ne)}
        g = Graph(vs, edges)
        sysm = trivial_system(g)
        v = check_locally_contracting(sysm)
        brute = all(c_has for c_has in
                    (any(not g.is_simple_vertex(g.source_of(e)) for e in c.edges)
                     for c in simple_cycles(g)))
        assert v.is_yes == brute == condition_L(g)


# -- report assembly -----------------------------------------------------------------


def test_simplicity_cuntz(cuntz3):
    rep = simplicity_report(cuntz3)
    assert rep.simple_cstar.is_yes and rep.purely_infinite.is_yes
    assert rep.simple_algebraic.is_yes


def test_simplicity_grig_unknown_with_char_warning(grig):
    rep = simplicity_report(grig, field_char=2)
    assert rep.hausdorff.is_no
    assert rep.simple_cstar.is_unknown
    assert rep.simple_algebraic.is_unknown
    assert any("characteristic 2" in w for w in rep.warnings)


def test_simplicity_refuted_by_minimality():
    g = Graph(["v", "w"], {"e": ("v", "v"), "f": ("w", "w")})
    rep = simplicity_report(trivial_system(g))
    assert rep.minimal.is_no
    assert rep.simple_cstar.is_no and rep.simple_algebraic.is_no
    assert rep.purely_infinite.is_no


def test_simplicity_structural_invariant(grig, katsura, cuntz3):
    for s in (grig, katsura, cuntz3):
        rep = simplicity_report(s)
        if rep.simple_cstar.is_yes:
            assert rep.hausdorff.is_yes and rep.minimal.is_yes \
                and rep.effective.is_yes and rep.amenable_asserted


def test_amenability_not_computed(cuntz3):
    rep = simplicity_report(cuntz3, amenable=False)
    assert rep.simple_cstar.is_unknown
    assert rep.simple_algebraic.is_yes  # the algebraic side needs no amenability
