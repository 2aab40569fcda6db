"""Batch command-line front end.

Exit codes: 0 the command ran (Unknown verdicts are answers), 2 parse or
validation failure, 3 precondition failure.
"""

from __future__ import annotations

import argparse
import sys

from .abelian import katsura_homology, katsura_ktheory
from .graph import Path
from .groups import GroupElement
from .katsura import build_katsura, kirchberg_precheck, make_data
from .pathspace import (EventuallyPeriodicPath, GermElement, germ_compose,
                        germ_equal)
from .properties import simplicity_report
from .reports import (fingerprint, render_props_report, render_sfp_report,
                      verify_props_certificates)
from .semigroup import SgeElement, sge_adjoint, sge_mul, sge_triple, sge_zero
from .sysfile import (parse_matrix_pair_file, parse_system,
                      render_system_file)
from .system import System, minimal_strongly_fixed, validate_system
from .verdict import ParseError, SearchBudget, SelfsimError

PARSE_EXIT = 2
PRECONDITION_EXIT = 3


def _budget(args) -> SearchBudget:
    return SearchBudget(max_states=args.budget_states,
                        max_depth=args.budget_depth,
                        max_ball=args.budget_ball)


def _load_system(path: str, args=None) -> tuple[System, bytes]:
    with open(path, "rb") as fh:
        raw = fh.read()
    stem = path.rsplit("/", 1)[-1].rsplit(".", 1)[0]
    system = parse_system(raw.decode("utf-8"), name_hint=stem)
    if args is not None:
        if getattr(args, "assume_amenable", False):
            system.amenable_asserted = True
        if getattr(args, "assume_faithful", False):
            system.faithful_asserted = True
    return system, raw


def cmd_validate(args) -> int:
    system, raw = _load_system(args.file)
    rep = validate_system(system)
    print("selfsim validation report")
    print(f"system: {system.name}")
    print(f"fingerprint: {fingerprint(raw)}")
    from .graph import validate_graph
    g = validate_graph(system.graph)
    print(f"vertices: {len(system.graph.vertices)}  edges: {len(system.graph.edges)}")
    print(f"no sources: {g.no_sources}" + (
        "" if g.no_sources else f"  (sources: {', '.join(g.source_list)})"))
    print(f"no sinks: {g.no_sinks}" + (
        "" if g.no_sinks else f"  (sinks: {', '.join(g.sink_list)})"))
    print(f"row finite: {g.row_finite}")
    print(f"simple vertices: {', '.join(g.simple_vertices) if g.simple_vertices else 'none'}")
    if rep.valid:
        print("system axioms: ok" + (
            " (weak vertex-compatibility only)" if rep.weak_hypothesis_only else ""))
        return 0
    print("system axioms: FAILED")
    for p in rep.problems:
        print(f"  {p}")
    return PARSE_EXIT


def cmd_props(args) -> int:
    system, raw = _load_system(args.file, args)
    budget = _budget(args)
    vr = validate_system(system)
    if not vr.valid:
        print("validation failed:", vr.problems[0], file=sys.stderr)
        return PARSE_EXIT
    report = simplicity_report(system, field_char=args.field_char, budget=budget)
    verified = None
    if args.verify:
        verified = verify_props_certificates(system, report, budget)
    sys.stdout.write(render_props_report(system, report, budget, raw, verified))
    return 0


def cmd_sfp(args) -> int:
    system, raw = _load_system(args.file, args)
    budget = _budget(args)
    try:
        g = _parse_element(system, args.element)
    except SelfsimError as exc:
        print(f"bad element: {exc}", file=sys.stderr)
        return PRECONDITION_EXIT
    rep = minimal_strongly_fixed(system, g, budget)
    sys.stdout.write(render_sfp_report(system, rep, budget, raw))
    return 0


def cmd_ktheory(args) -> int:
    pair = parse_matrix_pair_file(args.file)
    k0, k1 = katsura_ktheory(pair.a, pair.b)
    data = make_data(pair.a, pair.b)
    print("selfsim K-theory report")
    print(f"size: {data.size}")
    print(f"K0 = {k0}")
    print(f"K1 = {k1}")
    print(f"kirchberg precheck: {'pass' if kirchberg_precheck(data) else 'fail'}")
    print("")
    print("== machine ==")
    print(f"K0={k0}")
    print(f"K1={k1}")
    return 0


def cmd_homology(args) -> int:
    pair = parse_matrix_pair_file(args.file)
    res = katsura_homology(pair.a, pair.b)
    print("selfsim homology report")
    if res.removed_rows:
        print("removed zero rows:", ", ".join(str(i + 1) for i in res.removed_rows))
    print(f"H0 = {res.h0}")
    print(f"H1 = {res.h1}")
    print(f"H2 = {res.h2}")
    print(f"Hn = 0 for n >= {res.vanishing_above}")
    print(f"K0 = {res.k0}")
    print(f"K1 = {res.k1}")
    print("")
    print("== machine ==")
    for k, v in (("H0", res.h0), ("H1", res.h1), ("H2", res.h2),
                 ("K0", res.k0), ("K1", res.k1)):
        print(f"{k}={v}")
    return 0


def cmd_katsura(args) -> int:
    pair = parse_matrix_pair_file(args.file)
    system = build_katsura(make_data(pair.a, pair.b))
    sys.stdout.write(render_system_file(
        system, header="generated by: selfsim katsura"))
    return 0


def cmd_desing(args) -> int:
    from .desingularize import desingularize_source
    system, _ = _load_system(args.file)
    try:
        ts = desingularize_source(system, args.vertex)
    except SelfsimError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return PRECONDITION_EXIT
    m = ts.materialize(args.level)
    header = (f"generated by: selfsim desing (level {args.level} of an "
              f"infinite tail at {args.vertex})\n"
              f"boundary vertices: {', '.join(ts.boundary_vertices(args.level))}")
    sys.stdout.write(render_system_file(m, header=header))
    return 0


def cmd_sge(args) -> int:
    system, _ = _load_system(args.file)
    try:
        result = _eval_sge_expression(system, args.expression)
    except SelfsimError as exc:
        print(f"bad expression: {exc}", file=sys.stderr)
        return PRECONDITION_EXIT
    print(result)
    return 0


def cmd_germ(args) -> int:
    system, _ = _load_system(args.file)
    budget = SearchBudget()
    try:
        result = _eval_germ_expression(system, args.expression, budget)
    except SelfsimError as exc:
        print(f"bad expression: {exc}", file=sys.stderr)
        return PRECONDITION_EXIT
    print(result)
    return 0


# -- small expression parsers ---------------------------------------------------


def _parse_element(system: System, text: str) -> GroupElement:
    be = system.backend
    text = text.strip()
    if be.kind == "integer":
        try:
            return GroupElement(be, int(text))
        except ValueError:
            raise SelfsimError(f"integer backend needs an integer, got '{text}'")
    if be.kind == "finite":
        if text not in be.names:
            raise SelfsimError(f"unknown element '{text}'")
        return GroupElement(be, text)
    if text == "1":
        return be.identity()
    word = []
    toks = text.split(".") if "." in text else (
        text.split() if " " in text else list(text))
    for tok in toks:
        if tok == "1" or not tok:
            continue
        if tok.endswith("^-1"):
            name, exp = tok[:-3], -1
        else:
            name, exp = tok, 1
        if name not in be.generator_names:
            raise SelfsimError(f"unknown generator '{name}'")
        word.append((name, exp))
    return GroupElement(be, tuple(word))


def _parse_path(system: System, text: str) -> Path:
    text = text.strip()
    if text in system.graph.vertices:
        return system.graph.vertex_path(text)
    toks = [t for t in text.split(".") if t]
    if all(t in system.graph.edges for t in toks):
        return system.graph.path(toks)
    if all(ch in system.graph.edges for ch in text):
        return system.graph.path(list(text))
    raise SelfsimError(f"cannot read path '{text}'")


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _parse_sge_atom(system: System, text: str) -> SgeElement:
    text = text.strip()
    if text == "zero" or text == "0":
        return sge_zero(system)
    if text.startswith("adj(") and text.endswith(")"):
        return sge_adjoint(_parse_sge_atom(system, text[4:-1]))
    if not (text.startswith("(") and text.endswith(")")):
        raise SelfsimError(f"expected '(alpha, g, beta)', got '{text}'")
    parts = _split_top(text[1:-1], ",")
    if len(parts) != 3:
        raise SelfsimError(f"expected three components in '{text}'")
    alpha = _parse_path(system, parts[0])
    g = _parse_element(system, parts[1])
    beta = _parse_path(system, parts[2])
    return sge_triple(system, alpha, g, beta)


def _eval_sge_expression(system: System, text: str) -> str:
    sides = _split_top(text, "=")
    sides = [s for s in sides if s.strip()]
    if len(sides) == 2:
        left = _eval_sge_product(system, sides[0])
        right = _eval_sge_product(system, sides[1])
        from .semigroup import sge_equal
        return f"{left} == {right}: {sge_equal(left, right)}"
    return str(_eval_sge_product(system, text))


def _eval_sge_product(system: System, text: str) -> SgeElement:
    factors = _split_top(text, "*")
    out = None
    for f in factors:
        atom = _parse_sge_atom(system, f)
        out = atom if out is None else sge_mul(out, atom)
    if out is None:
        raise SelfsimError("empty expression")
    return out


def _parse_germ_atom(system: System, text: str) -> GermElement:
    text = text.strip()
    if "@" not in text:
        raise SelfsimError("germ needs '[alpha; g; beta] @ base'")
    head, base_text = text.split("@", 1)
    head = head.strip()
    if not (head.startswith("[") and head.endswith("]")):
        raise SelfsimError(f"expected '[alpha; g; beta]', got '{head}'")
    parts = head[1:-1].split(";")
    if len(parts) != 3:
        raise SelfsimError("germ head needs three ';'-separated components")
    alpha = _parse_path(system, parts[0])
    g = _parse_element(system, parts[1])
    beta = _parse_path(system, parts[2])
    base = _parse_epp(system, base_text)
    return GermElement(sge_triple(system, alpha, g, beta), base)


def _parse_epp(system: System, text: str) -> EventuallyPeriodicPath:
    text = text.strip()
    if not text.endswith("^inf"):
        raise SelfsimError("base path must end with '(cycle)^inf'")
    body = text[:-4].strip()
    if not body.endswith(")"):
        raise SelfsimError("base path must end with '(cycle)^inf'")
    open_idx = body.rfind("(")
    prefix_text = body[:open_idx].strip()
    cycle_text = body[open_idx + 1:-1].strip()
    cycle = _parse_path(system, cycle_text)
    if prefix_text:
        prefix = _parse_path(system, prefix_text)
        return EventuallyPeriodicPath(system.graph, prefix.edges, cycle.edges)
    return EventuallyPeriodicPath(system.graph, (), cycle.edges)


def _eval_germ_expression(system: System, text: str, budget: SearchBudget) -> str:
    sides = _split_top(text, "=")
    sides = [s for s in sides if s.strip()]
    if len(sides) == 2:
        left = _eval_germ_product(system, sides[0])
        right = _eval_germ_product(system, sides[1])
        return f"germ equality: {germ_equal(left, right, budget)}"
    return str(_eval_germ_product(system, text))


def _eval_germ_product(system: System, text: str) -> GermElement:
    factors = _split_top(text, "*")
    out = None
    for f in factors:
        atom = _parse_germ_atom(system, f)
        out = atom if out is None else germ_compose(out, atom)
    if out is None:
        raise SelfsimError("empty germ expression")
    return out


# -- entry point -----------------------------------------------------------------


def _add_budget_flags(p: argparse.ArgumentParser):
    p.add_argument("--budget-states", type=int, default=100_000)
    p.add_argument("--budget-depth", type=int, default=64)
    p.add_argument("--budget-ball", type=int, default=64)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="selfsim",
        description="Self-similar graph systems: validation, property "
                    "verdicts, semigroup and germ arithmetic, exact invariants.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a system file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("props", help="property verdicts with certificates")
    p.add_argument("file")
    _add_budget_flags(p)
    p.add_argument("--field-char", type=int, default=None)
    p.add_argument("--assume-amenable", action="store_true")
    p.add_argument("--assume-faithful", action="store_true")
    p.add_argument("--verify", action="store_true",
                   help="replay certificates before printing")
    p.set_defaults(func=cmd_props)

    p = sub.add_parser("sfp", help="minimal strongly fixed paths of an element")
    p.add_argument("file")
    p.add_argument("element")
    _add_budget_flags(p)
    p.add_argument("--assume-amenable", action="store_true")
    p.add_argument("--assume-faithful", action="store_true")
    p.set_defaults(func=cmd_sfp)

    p = sub.add_parser("ktheory", help="K-groups from a matrix pair file")
    p.add_argument("file")
    p.set_defaults(func=cmd_ktheory)

    p = sub.add_parser("homology", help="homology from a matrix pair file")
    p.add_argument("file")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("katsura", help="build a system file from a matrix pair")
    p.add_argument("file")
    p.set_defaults(func=cmd_katsura)

    p = sub.add_parser("desing", help="materialize a source desingularization")
    p.add_argument("file")
    p.add_argument("vertex")
    p.add_argument("--level", type=int, default=3)
    p.set_defaults(func=cmd_desing)

    p = sub.add_parser("sge", help="evaluate a semigroup expression")
    p.add_argument("file")
    p.add_argument("expression")
    p.set_defaults(func=cmd_sge)

    p = sub.add_parser("germ", help="evaluate a germ expression")
    p.add_argument("file")
    p.add_argument("expression")
    p.set_defaults(func=cmd_germ)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return PARSE_EXIT
    except FileNotFoundError as exc:
        print(f"cannot open file: {exc.filename}", file=sys.stderr)
        return PARSE_EXIT
    except SelfsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PRECONDITION_EXIT


if __name__ == "__main__":
    sys.exit(main())
