"""Integer-matrix systems: Z acting on the graph of A by rotation data B.

For an N x N nonnegative integer matrix A, the graph has vertices 1..N and,
for each pair (i, j) with A[i][j] >= 1, edges e(i,j,n) from vertex j to
vertex i indexed by 0 <= n < A[i][j].  The integer m acts by

    m * B[i][j] + n = k * A[i][j] + n'   with 0 <= n' < A[i][j],

sending e(i,j,n) to e(i,j,n') and restricting to the quotient k.  Euclidean
division with a nonnegative remainder keeps this exact for negative m.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .graph import Graph, reach
from .groups import GroupElement, IntegerBackend
from .system import ActionProvider, System
from .verdict import Condition0Violated, ShapeMismatch


@dataclass(frozen=True)
class KatsuraData:
    a: tuple[tuple[int, ...], ...]
    b: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.a)
        if any(len(r) != n for r in self.a) or len(self.b) != n or any(
                len(r) != n for r in self.b):
            raise ShapeMismatch("A and B must be square matrices of the same size")
        if any(v < 0 for r in self.a for v in r):
            raise ShapeMismatch("A must be nonnegative")

    @property
    def size(self) -> int:
        return len(self.a)

    def omega(self) -> list[tuple[int, int]]:
        """Index pairs (i, j), 1-based, with A[i][j] >= 1."""
        return [(i + 1, j + 1) for i in range(self.size)
                for j in range(self.size) if self.a[i][j] >= 1]

    def check_condition0(self) -> None:
        for i in range(self.size):
            if all(v == 0 for v in self.a[i]):
                raise Condition0Violated(f"row {i + 1} of A is zero")
        for i in range(self.size):
            for j in range(self.size):
                if self.a[i][j] == 0 and self.b[i][j] != 0:
                    raise Condition0Violated(f"B[{i + 1}][{j + 1}] nonzero outside the support of A")


def make_data(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> KatsuraData:
    return KatsuraData(tuple(tuple(int(v) for v in r) for r in a),
                       tuple(tuple(int(v) for v in r) for r in b))


def vertex_id(i: int) -> str:
    return f"v{i}"

def edge_id(i: int, j: int, n: int) -> str:
    return f"e({i},{j},{n})"

def parse_edge_id(e: str) -> tuple[int, int, int]:
    i, j, n = e[2:-1].split(",")
    return int(i), int(j), int(n)


class KatsuraAction(ActionProvider):
    """Closed-form Euclidean-division action; trivial on vertices."""

    def __init__(self, data: KatsuraData, backend: IntegerBackend):
        self.data = data
        self.backend = backend

    def act_vertex(self, g: GroupElement, v: str) -> str:
        return v

    def act_edge(self, g: GroupElement, e: str) -> str:
        i, j, n = parse_edge_id(e)
        a = self.data.a[i - 1][j - 1]
        n2 = (g.payload * self.data.b[i - 1][j - 1] + n) % a
        return edge_id(i, j, n2)

    def cocycle(self, g: GroupElement, e: str) -> GroupElement:
        i, j, n = parse_edge_id(e)
        a = self.data.a[i - 1][j - 1]
        k = (g.payload * self.data.b[i - 1][j - 1] + n) // a
        return GroupElement(self.backend, k)


def build_katsura(data: KatsuraData, name: str = "katsura") -> System:
    """The integer system of (A, B); raises unless condition (0) holds."""
    data.check_condition0()
    n = data.size
    vertices = [vertex_id(i) for i in range(1, n + 1)]
    edges = {}
    for (i, j) in data.omega():
        for k in range(data.a[i - 1][j - 1]):
            edges[edge_id(i, j, k)] = (vertex_id(j), vertex_id(i))
    graph = Graph(vertices, edges)
    backend = IntegerBackend()
    return System(graph=graph, backend=backend,
                  action=KatsuraAction(data, backend), name=name,
                  amenable_asserted=True)  # the acting group is Z


def kirchberg_precheck(data: KatsuraData) -> bool:
    """A irreducible, diagonal of A at least 2, diagonal of B exactly 1."""
    data.check_condition0()
    n = data.size
    for i in range(n):
        if abs(data.a[i][i]) < 2 or data.b[i][i] != 1:
            return False
    system = build_katsura(data)
    g = system.graph
    return all(reach(g, x, y) for x in g.vertices for y in g.vertices)
