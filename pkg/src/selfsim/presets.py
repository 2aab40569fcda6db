"""Programmatic builders for the bundled example systems."""

from __future__ import annotations

from .graph import Graph
from .groups import AutomatonBackend, FiniteGroupBackend, GroupElement
from .katsura import KatsuraData, build_katsura, make_data
from .system import AutomatonAction, System, TableAction

GRIGORCHUK_RESTRICTIONS = {
    # generator -> (restriction past edge 0, restriction past edge 1)
    "a": ("1", "1"),
    "b": ("a", "c"),
    "c": ("a", "d"),
    "d": ("1", "b"),
}

GRIGORCHUK_ERSCHLER_RESTRICTIONS = {
    "a": ("1", "1"),
    "b": ("a", "b"),
    "c": ("1", "d"),
    "d": ("a", "c"),
}


def _binary_automaton_system(name: str, restrictions: dict[str, tuple[str, str]],
                             swapping: tuple[str, ...]) -> System:
    graph = Graph(["v"], {"0": ("v", "v"), "1": ("v", "v")})
    gens = list(restrictions)
    vmaps = {g: {"v": "v"} for g in gens}
    emaps = {}
    for g in gens:
        if g in swapping:
            emaps[g] = {"0": "1", "1": "0"}
        else:
            emaps[g] = {"0": "0", "1": "1"}
    rmaps = {}
    for g, (r0, r1) in restrictions.items():
        rmaps[g] = {"0": () if r0 == "1" else ((r0, 1),),
                    "1": () if r1 == "1" else ((r1, 1),)}
    backend = AutomatonBackend(graph, gens, vmaps, emaps, rmaps)
    return System(graph=graph, backend=backend, action=AutomatonAction(backend),
                  name=name, amenable_asserted=True, faithful_asserted=True)


def grigorchuk_system() -> System:
    """The four-generator action on binary words with restrictions e,a,c | a,d | e,b."""
    return _binary_automaton_system("grigorchuk", GRIGORCHUK_RESTRICTIONS, ("a",))


def grigorchuk_erschler_system() -> System:
    return _binary_automaton_system("grigorchuk-erschler",
                                    GRIGORCHUK_ERSCHLER_RESTRICTIONS, ("a",))


def trivial_group_backend() -> FiniteGroupBackend:
    return FiniteGroupBackend(["1"], {("1", "1"): "1"}, generator_names=[])


def cuntz_system(n: int, name: str | None = None) -> System:
    """Single vertex, n loops, trivial group, trivial cocycle."""
    graph = Graph(["v"], {f"e{i}": ("v", "v") for i in range(n)})
    backend = trivial_group_backend()
    ident = GroupElement(backend, 0)
    action = TableAction(backend, graph,
                         vertex_maps={"1": {"v": "v"}},
                         edge_maps={"1": {e: e for e in graph.edges}},
                         cocycles={"1": {e: ident for e in graph.edges}})
    return System(graph=graph, backend=backend, action=action,
                  name=name or f"cuntz-{n}", amenable_asserted=True)


KATSURA_EXAMPLE_A = ((2, 1, 0), (1, 2, 1), (1, 1, 2))
KATSURA_EXAMPLE_B = ((1, 2, 0), (2, 1, 2), (0, 2, 1))


def katsura_example_data() -> KatsuraData:
    """The 3x3 pair whose groupoid is minimal, effective and non-Hausdorff."""
    return make_data(KATSURA_EXAMPLE_A, KATSURA_EXAMPLE_B)


def katsura_example_system() -> System:
    return build_katsura(katsura_example_data(), name="katsura-noncommutative")
