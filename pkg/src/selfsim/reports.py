"""Deterministic plain-text reports with a trailing machine block.

Identical input and flags produce identical bytes: every collection is
rendered in sorted or construction order, and nothing environment-dependent
(timestamps, paths, versions) enters the output.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Optional

from .properties import PropertyReport
from .system import InfinitudeWitness, SfpReport, System
from .verdict import SearchBudget, Verdict3


def fingerprint(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:12]


def edge_seq_str(edges: Iterable[str]) -> str:
    edges = list(edges)
    if not edges:
        return "''"
    if all(len(e) == 1 for e in edges):
        return "".join(edges)
    return " ".join(edges)


def _verdict_lines(name: str, v: Verdict3, detail: list[str]) -> list[str]:
    out = [f"{name}: {v.kind}"]
    out.extend(f"  {line}" for line in detail)
    if v.is_unknown and v.reason:
        out.append(f"  {v.reason}")
    return out


def _hausdorff_detail(v: Verdict3) -> list[str]:
    if v.is_yes and isinstance(v.certificate, dict):
        if v.certificate.get("via") == "pseudo-free":
            return ["via: pseudo-freeness"]
        ball = v.certificate.get("ball", ())
        return [f"all {len(ball)} ball elements have finitely many minimal "
                f"strongly fixed paths"]
    if v.is_no and isinstance(v.certificate, dict):
        out = [f"witness: element {v.certificate['element']} admits infinitely "
               f"many minimal strongly fixed paths"]
        w = v.certificate.get("witness")
        if isinstance(w, InfinitudeWitness):
            out.append(f"state cycle: base {edge_seq_str(w.base)} + cycle "
                       f"{edge_seq_str(w.cycle)} + completion "
                       f"{edge_seq_str(w.completion)}")
        paths = v.certificate.get("minimal_paths")
        if paths:
            out.append("minimal paths found: " + ", ".join(paths))
        return out
    return []


def _minimal_detail(v: Verdict3) -> list[str]:
    if v.is_yes and isinstance(v.certificate, dict):
        comps = v.certificate.get("cyclic_components", ())
        return [f"cyclic components checked: {', '.join(comps) if comps else 'none'}"]
    if v.is_no and isinstance(v.certificate, dict):
        return [f"witness: vertex {v.certificate['path_vertex']} on an infinite "
                f"path never dominates vertex {v.certificate['unreached_vertex']}"]
    return []


def _effective_detail(v: Verdict3) -> list[str]:
    if v.is_yes and isinstance(v.certificate, dict):
        if "via" in v.certificate:
            return [f"via: {v.certificate['via']}"]
        ball = v.certificate.get("ball", ())
        cov = "complete" if v.certificate.get("ball_complete") else "truncated"
        return [f"condition (L) holds; {len(ball)} ball elements certified "
                f"vacuous or slack ({cov} ball)"]
    if v.is_no and isinstance(v.certificate, dict):
        if "entryless_circuit" in v.certificate:
            return [f"witness: circuit {v.certificate['entryless_circuit']} has no entry"]
        return [f"witness: element {v.certificate.get('element')} fixes the "
                f"cylinder at {v.certificate.get('vertex')} pointwise but is "
                f"not slack there"]
    return []


def _lc_detail(v: Verdict3) -> list[str]:
    if v.is_yes:
        return ["condition (L) holds"]
    if v.is_no and isinstance(v.certificate, dict):
        return [f"witness: circuit {v.certificate['entryless_circuit']} has no entry"]
    return []


def _simple_detail(v: Verdict3) -> list[str]:
    if isinstance(v.certificate, dict):
        if "via" in v.certificate:
            return [f"via: {v.certificate['via']}"]
        if "because" in v.certificate:
            return [f"fails: {v.certificate['because']} is No"]
    return []


def render_props_report(system: System, report: PropertyReport,
                        budget: SearchBudget, source_bytes: bytes,
                        verified: Optional[int] = None) -> str:
    lines = ["selfsim props report"]
    lines.append(f"system: {report.system_name}")
    lines.append(f"fingerprint: {fingerprint(source_bytes)}")
    lines.append(f"budget: states={budget.max_states} depth={budget.max_depth} "
                 f"ball={budget.max_ball}")
    lines.append(f"assertions: amenable={str(report.amenable_asserted).lower()} "
                 f"faithful={str(report.faithful_asserted).lower()}")
    if report.field_char is not None:
        lines.append(f"field characteristic: {report.field_char}")
    lines.append("")
    lines += _verdict_lines("hausdorff", report.hausdorff,
                            _hausdorff_detail(report.hausdorff))
    lines += _verdict_lines("minimal", report.minimal,
                            _minimal_detail(report.minimal))
    lines += _verdict_lines("effective", report.effective,
                            _effective_detail(report.effective))
    lines += _verdict_lines("locally contracting", report.locally_contracting,
                            _lc_detail(report.locally_contracting))
    lines += _verdict_lines("simple (C*)", report.simple_cstar,
                            _simple_detail(report.simple_cstar))
    lines += _verdict_lines("simple (algebraic)", report.simple_algebraic,
                            _simple_detail(report.simple_algebraic))
    lines += _verdict_lines("purely infinite", report.purely_infinite,
                            _simple_detail(report.purely_infinite))
    if report.warnings:
        lines.append("warnings:")
        lines.extend(f"  - {w}" for w in report.warnings)
    lines.append(f"coverage: {report.coverage}")
    if verified is not None:
        lines.append(f"verified: {verified} certificates replayed")
    lines.append("")
    lines.append("== machine ==")
    mach = {
        "hausdorff": report.hausdorff.kind,
        "minimal": report.minimal.kind,
        "effective": report.effective.kind,
        "locally_contracting": report.locally_contracting.kind,
        "simple_cstar": report.simple_cstar.kind,
        "simple_algebraic": report.simple_algebraic.kind,
        "purely_infinite": report.purely_infinite.kind,
        "amenable": str(report.amenable_asserted).lower(),
        "faithful": str(report.faithful_asserted).lower(),
    }
    if report.field_char is not None:
        mach["field_char"] = str(report.field_char)
    if report.hausdorff.is_no and isinstance(report.hausdorff.certificate, dict):
        mach["hausdorff_witness"] = str(report.hausdorff.certificate["element"])
    for k, v in mach.items():
        lines.append(f"{k}={v}")
    return "\n".join(lines) + "\n"


def render_sfp_report(system: System, rep: SfpReport, budget: SearchBudget,
                      source_bytes: bytes) -> str:
    lines = ["selfsim strongly-fixed-path report"]
    lines.append(f"system: {system.name}")
    lines.append(f"fingerprint: {fingerprint(source_bytes)}")
    lines.append(f"element: {rep.element}")
    lines.append(f"budget: states={budget.max_states} depth={budget.max_depth}")
    lines.append("")
    lines.append(f"verdict: {rep.verdict}")
    if rep.minimal_paths:
        lines.append("minimal strongly fixed paths:")
        for p in rep.minimal_paths:
            lines.append(f"  {p}")
    else:
        lines.append("minimal strongly fixed paths: none found")
    if rep.witness is not None:
        w = rep.witness
        lines.append(f"infinitude witness: base {edge_seq_str(w.base)} + cycle "
                     f"{edge_seq_str(w.cycle)} + completion {edge_seq_str(w.completion)}")
        lines.append("  pumping the cycle yields arbitrarily many minimal "
                     "strongly fixed paths")
    if rep.truncated:
        lines.append("note: path list truncated by budget")
    if rep.note:
        lines.append(f"note: {rep.note}")
    lines.append(f"search: states={rep.states_explored} depth={rep.depth_reached}")
    lines.append("")
    lines.append("== machine ==")
    lines.append(f"verdict={rep.verdict}")
    lines.append(f"paths={';'.join(str(p) for p in rep.minimal_paths)}")
    return "\n".join(lines) + "\n"


def verify_props_certificates(system: System, report: PropertyReport,
                              budget: SearchBudget) -> int:
    """Replay every decisive certificate in a property report.

    Raises AssertionError when a certificate fails to check out; returns the
    number of certificates replayed.
    """
    from .graph import Path, condition_L
    from .properties import dominates, vertex_orbits
    count = 0
    h = report.hausdorff
    if h.is_no and isinstance(h.certificate, dict):
        w = h.certificate.get("witness")
        if isinstance(w, InfinitudeWitness):
            g = _element_from_str(system, h.certificate["element"])
            for k in (0, 1, 2):
                p = Path(system.graph, w.pumped(k))
                assert system.strongly_fixes(g, p, budget).is_yes, \
                    "witness pump is not strongly fixed"
                for q in p.proper_prefixes():
                    if not q.is_vertex:
                        assert not system.strongly_fixes(g, q, budget).is_yes, \
                            "witness pump is not minimal"
            count += 1
    m = report.minimal
    if m.is_no and isinstance(m.certificate, dict):
        orbits = vertex_orbits(system)
        assert not dominates(system, orbits, m.certificate["path_vertex"],
                             m.certificate["unreached_vertex"])
        count += 1
    if m.is_yes:
        count += 1  # recomputation happens inside check_minimal already
    e = report.effective
    if e.is_no and isinstance(e.certificate, dict) and \
            "entryless_circuit" in e.certificate:
        assert not condition_L(system.graph)
        count += 1
    lc = report.locally_contracting
    if lc.is_yes or lc.is_no:
        assert lc.is_yes == condition_L(system.graph)
        count += 1
    return count


def _element_from_str(system: System, text: str):
    from .groups import GroupElement
    be = system.backend
    if be.kind == "integer":
        return GroupElement(be, int(text))
    if be.kind == "finite":
        return GroupElement(be, text)
    word = []
    for tok in (text.split() if " " in text else list(text)):
        if tok == "1":
            continue
        if tok.endswith("^-1"):
            word.append((tok[:-3], -1))
        else:
            word.append((tok, 1))
    return GroupElement(be, tuple(word))
