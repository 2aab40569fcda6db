"""The system file format: parsing with positioned diagnostics, serializing.

A system file has one graph block, one backend declaration, one action and
one cocycle block per generator, and optional assertion lines.  Tokens are
whitespace-separated; edge ids may carry parentheses and commas as long as
they contain no whitespace.  See the grammar in the package README.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .graph import Graph
from .groups import (AutomatonBackend, FiniteGroupBackend, GroupElement,
                     IntegerBackend, Letter)
from .system import AutomatonAction, System, TableAction
from .verdict import ParseError


@dataclass
class _Tok:
    text: str
    line: int
    col: int


def _strip_comment(raw: str) -> str:
    """Drop a '#' comment, but only when the '#' starts a word: generated
    tail ids like v[s#1] keep their hash."""
    for i, ch in enumerate(raw):
        if ch == "#" and (i == 0 or raw[i - 1].isspace()):
            return raw[:i]
    return raw


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        i = 0
        while i < len(line):
            ch = line[i]
            if ch.isspace():
                i += 1
                continue
            if ch in "{};":
                toks.append(_Tok(ch, ln, i + 1))
                i += 1
                continue
            j = i
            while j < len(line) and not line[j].isspace() and line[j] not in "{};":
                j += 1
            toks.append(_Tok(line[i:j], ln, i + 1))
            i = j
    return toks


class _Cursor:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    @property
    def done(self) -> bool:
        return self.i >= len(self.toks)

    def peek(self) -> Optional[_Tok]:
        return self.toks[self.i] if not self.done else None

    def next(self, block: str = "") -> _Tok:
        if self.done:
            last = self.toks[-1] if self.toks else _Tok("", 1, 1)
            raise ParseError("unexpected end of file", last.line, last.col, block)
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str, block: str = "") -> _Tok:
        t = self.next(block)
        if t.text != text:
            raise ParseError(f"expected '{text}', found '{t.text}'",
                             t.line, t.col, block)
        return t


def _parse_word(tokens: list[str]) -> tuple[Letter, ...]:
    if tokens == ["1"]:
        return ()
    out: list[Letter] = []
    for tok in tokens:
        if tok.endswith("^-1"):
            out.append((tok[:-3], -1))
        else:
            out.append((tok, 1))
    return tuple(out)


def parse_system(text: str, name_hint: str = "system") -> System:
    toks = _tokenize(text)
    cur = _Cursor(toks)
    name = name_hint
    vertices: list[str] = []
    edges: dict[str, tuple[str, str]] = {}
    edge_positions: dict[str, tuple[int, int]] = {}
    backend_kind = ""
    generators: list[str] = []
    finite_elements: list[str] = []
    finite_table: dict[tuple[str, str], str] = {}
    actions: dict[str, dict[str, str]] = {}
    vertex_actions: dict[str, dict[str, str]] = {}
    cocycles_raw: dict[str, dict[str, list[str]]] = {}
    amenable = False
    faithful = False
    saw_graph = False

    while not cur.done:
        t = cur.next()
        if t.text == "system":
            name = cur.next("system").text
        elif t.text == "graph":
            saw_graph = True
            cur.expect("{", "graph")
            while True:
                u = cur.next("graph")
                if u.text == "}":
                    break
                if u.text == "vertex":
                    v = cur.next("graph")
                    if v.text in vertices:
                        raise ParseError(f"duplicate vertex id {v.text}",
                                         v.line, v.col, "graph")
                    vertices.append(v.text)
                elif u.text == "edge":
                    eid = cur.next("graph").text
                    cur.expect("source", "graph")
                    src = cur.next("graph").text
                    cur.expect("range", "graph")
                    rng = cur.next("graph").text
                    if eid in edges:
                        raise ParseError(f"duplicate edge id {eid}", u.line, u.col, "graph")
                    edges[eid] = (src, rng)
                    edge_positions[eid] = (u.line, u.col)
                else:
                    raise ParseError(f"unknown graph item '{u.text}'", u.line, u.col, "graph")
        elif t.text == "backend":
            backend_kind = cur.next("backend").text
            if backend_kind == "automaton":
                cur.expect("{", "backend")
                while True:
                    u = cur.next("backend")
                    if u.text == "}":
                        break
                    if u.text == "generators":
                        while cur.peek() and cur.peek().text not in ("}", "generators"):
                            generators.append(cur.next("backend").text)
                    else:
                        raise ParseError(f"unknown backend item '{u.text}'",
                                         u.line, u.col, "backend")
            elif backend_kind == "integer":
                generators = ["1"]
            elif backend_kind == "finite":
                cur.expect("{", "backend")
                while True:
                    u = cur.next("backend")
                    if u.text == "}":
                        break
                    if u.text == "elements":
                        while cur.peek() and cur.peek().text not in (
                                "}", "generators", "mul"):
                            finite_elements.append(cur.next("backend").text)
                    elif u.text == "generators":
                        while cur.peek() and cur.peek().text not in ("}", "mul"):
                            generators.append(cur.next("backend").text)
                    elif u.text == "mul":
                        a = cur.next("backend").text
                        b = cur.next("backend").text
                        cur.expect("->", "backend")
                        c = cur.next("backend").text
                        finite_table[(a, b)] = c
                    else:
                        raise ParseError(f"unknown backend item '{u.text}'",
                                         u.line, u.col, "backend")
            else:
                raise ParseError(f"unknown backend kind '{backend_kind}'",
                                 t.line, t.col, "backend")
        elif t.text == "action":
            gen = cur.next("action").text
            cur.expect("{", "action")
            vertex_actions.setdefault(gen, {})
            actions.setdefault(gen, {})
            while True:
                u = cur.next("action")
                if u.text == "}":
                    break
                if u.text == ";":
                    continue
                if u.text == "vertex":
                    v = cur.next("action").text
                    cur.expect("->", "action")
                    vertex_actions[gen][v] = cur.next("action").text
                elif u.text == "edge":
                    e = cur.next("action").text
                    cur.expect("->", "action")
                    actions[gen][e] = cur.next("action").text
                else:
                    raise ParseError(f"unknown action item '{u.text}'",
                                     u.line, u.col, "action")
        elif t.text == "cocycle":
            gen = cur.next("cocycle").text
            cur.expect("{", "cocycle")
            cocycles_raw.setdefault(gen, {})
            while True:
                u = cur.next("cocycle")
                if u.text == "}":
                    break
                if u.text == ";":
                    continue
                eid = u.text
                cur.expect("->", "cocycle")
                word: list[str] = []
                while cur.peek() and cur.peek().text not in (";", "}"):
                    word.append(cur.next("cocycle").text)
                if not word:
                    raise ParseError(f"empty cocycle value for edge {eid}",
                                     u.line, u.col, "cocycle")
                cocycles_raw[gen][eid] = word
        elif t.text == "assert":
            which = cur.next("assert").text
            val = cur.next("assert").text
            flag = val.lower() == "true"
            if which == "amenable":
                amenable = flag
            elif which == "faithful":
                faithful = flag
            else:
                raise ParseError(f"unknown assertion '{which}'", t.line, t.col, "assert")
        else:
            raise ParseError(f"unknown top-level item '{t.text}'", t.line, t.col)

    if not saw_graph:
        raise ParseError("missing graph block", 1, 1)
    if not backend_kind:
        raise ParseError("missing backend declaration", 1, 1)
    vset = set(vertices)
    for eid, (src, rng) in edges.items():
        ln, col = edge_positions[eid]
        if src not in vset:
            raise ParseError(f"edge {eid} has unknown source vertex {src}",
                             ln, col, "graph")
        if rng not in vset:
            raise ParseError(f"edge {eid} has unknown range vertex {rng}",
                             ln, col, "graph")
    try:
        graph = Graph(vertices, edges)
    except Exception as exc:
        raise ParseError(str(exc), 1, 1, "graph")

    for gen in generators:
        va = vertex_actions.setdefault(gen, {})
        for v in graph.vertices:
            va.setdefault(v, v)
        ea = actions.setdefault(gen, {})
        missing = [e for e in graph.edges if e not in ea]
        if missing:
            for e in missing:
                ea.setdefault(e, e)
        cc = cocycles_raw.setdefault(gen, {})
        for e in graph.edges:
            if e not in cc:
                raise ParseError(f"cocycle of generator {gen} misses edge {e}",
                                 1, 1, "cocycle")

    if backend_kind == "automaton":
        restrictions = {
            g: {e: _parse_word(w) for e, w in cocycles_raw[g].items()}
            for g in generators}
        backend = AutomatonBackend(graph, generators, vertex_actions,
                                   actions, restrictions)
        return System(graph=graph, backend=backend,
                      action=AutomatonAction(backend), name=name,
                      amenable_asserted=amenable, faithful_asserted=faithful)
    if backend_kind == "integer":
        backend = IntegerBackend()
        cocycles = {
            "1": {e: GroupElement(backend, int(w[0]))
                  for e, w in cocycles_raw["1"].items()}}
        action = TableAction(backend, graph, {"1": vertex_actions["1"]},
                             {"1": actions["1"]}, cocycles)
        return System(graph=graph, backend=backend, action=action, name=name,
                      amenable_asserted=amenable, faithful_asserted=faithful)
    # finite
    backend = FiniteGroupBackend(finite_elements, finite_table,
                                 generator_names=generators or None)
    gen_names = [backend.names[i] for i in backend.generator_indices]
    cocycles = {g: {e: GroupElement(backend, w[0])
                    for e, w in cocycles_raw[g].items()} for g in gen_names}
    action = TableAction(backend, graph,
                         {g: vertex_actions[g] for g in gen_names},
                         {g: actions[g] for g in gen_names}, cocycles)
    return System(graph=graph, backend=backend, action=action, name=name,
                  amenable_asserted=amenable, faithful_asserted=faithful)


def parse_system_file(path: str) -> System:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stem = path.rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return parse_system(text, name_hint=stem)


def render_system_file(system: System, header: str = "") -> str:
    """Serialize a system back to the file format (deterministic bytes)."""
    g = system.graph
    out: list[str] = []
    if header:
        out.extend(f"# {line}" for line in header.splitlines())
    out.append(f"system {system.name}")
    out.append("graph {")
    for v in g.vertices:
        out.append(f"  vertex {v}")
    for e in g.edges:
        out.append(f"  edge {e} source {g.source_of(e)} range {g.range_of(e)}")
    out.append("}")
    be = system.backend
    if be.kind == "automaton":
        out.append("backend automaton {")
        out.append("  generators " + " ".join(be.generator_names))
        out.append("}")
        gen_names = list(be.generator_names)
        gens = [GroupElement(be, ((n, 1),)) for n in gen_names]
    elif be.kind == "integer":
        out.append("backend integer")
        gen_names = ["1"]
        gens = [GroupElement(be, 1)]
    else:
        out.append("backend finite {")
        out.append("  elements " + " ".join(be.names))
        gnames = [be.names[i] for i in be.generator_indices]
        if gnames:
            out.append("  generators " + " ".join(gnames))
        for a in be.names:
            for b in be.names:
                c = be.names[be.table[be.names.index(a)][be.names.index(b)]]
                out.append(f"  mul {a} {b} -> {c}")
        out.append("}")
        gen_names = gnames
        gens = [GroupElement(be, n) for n in gen_names]
    for nm, gel in zip(gen_names, gens):
        items = [f"vertex {v} -> {system.act_vertex(gel, v)}" for v in g.vertices]
        items += [f"edge {e} -> {system.act_edge(gel, e)}" for e in g.edges]
        out.append(f"action {nm} {{ " + " ; ".join(items) + " }")
    for nm, gel in zip(gen_names, gens):
        items = []
        for e in g.edges:
            val = system.cocycle_edge(gel, e)
            items.append(f"{e} -> {val}")
        out.append(f"cocycle {nm} {{ " + " ; ".join(items) + " }")
    out.append(f"assert amenable {'true' if system.amenable_asserted else 'false'}")
    out.append(f"assert faithful {'true' if system.faithful_asserted else 'false'}")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class MatrixPair:
    a: tuple[tuple[int, ...], ...]
    b: tuple[tuple[int, ...], ...]


def parse_matrix_file(text: str) -> MatrixPair:
    rows_a: list[list[int]] = []
    rows_b: list[list[int]] = []
    n = None
    current = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("N "):
            n = int(line.split()[1])
        elif line in ("A {", "A{"):
            current = rows_a
        elif line in ("B {", "B{"):
            current = rows_b
        elif line == "}":
            current = None
        else:
            if current is None:
                raise ParseError(f"row outside a matrix block: '{line}'", ln, 1)
            try:
                current.append([int(v) for v in line.split()])
            except ValueError:
                raise ParseError(f"non-integer entry in '{line}'", ln, 1)
    if n is None:
        n = len(rows_a)
    if len(rows_a) != n or len(rows_b) != n:
        raise ParseError(f"expected {n} rows in each matrix", 1, 1)
    return MatrixPair(tuple(tuple(r) for r in rows_a),
                      tuple(tuple(r) for r in rows_b))


def parse_matrix_pair_file(path: str) -> MatrixPair:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix_file(fh.read())
