"""Exact arithmetic in the inverse semigroup of path-group-path triples.

Nonzero elements are triples (alpha, g, beta) with d(alpha) = g * d(beta);
the product splits on which of the two inner paths extends the other, and
zero absorbs everything else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .graph import Path, compose
from .groups import GroupElement, equal, inv, is_identity, mul
from .system import System
from .verdict import (NotIdempotent, SearchBudget, SelfsimError,
                      SystemMismatch, Verdict3)


@dataclass(frozen=True)
class SgeElement:
    """Zero, or a triple (alpha, g, beta) over a fixed system."""

    system: System = field(compare=False, repr=False)
    alpha: Optional[Path] = None
    g: Optional[GroupElement] = None
    beta: Optional[Path] = None

    def __post_init__(self):
        if self.is_zero:
            if not (self.alpha is None and self.g is None and self.beta is None):
                raise SelfsimError("zero element must have empty components")
            return
        want = self.system.act_vertex(self.g, self.beta.source_vertex())
        if self.alpha.source_vertex() != want:
            raise SelfsimError(
                f"membership violated: d(alpha)={self.alpha.source_vertex()} "
                f"but g*d(beta)={want}")

    @property
    def is_zero(self) -> bool:
        return self.alpha is None and self.beta is None and self.g is None

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        return f"({self.alpha}, {self.g}, {self.beta})"


def sge_zero(system: System) -> SgeElement:
    return SgeElement(system)


def sge_triple(system: System, alpha: Path, g: GroupElement, beta: Path) -> SgeElement:
    return SgeElement(system, alpha, g, beta)


def f_idempotent(system: System, alpha: Path) -> SgeElement:
    """The idempotent attached to a finite path."""
    return SgeElement(system, alpha, system.identity(), alpha)


def _same_system(s: SgeElement, t: SgeElement) -> System:
    if s.system is not t.system:
        raise SystemMismatch("elements live over different systems")
    return s.system


def sge_mul(s: SgeElement, t: SgeElement) -> SgeElement:
    """Case split on whether beta extends gamma or gamma extends beta."""
    system = _same_system(s, t)
    if s.is_zero or t.is_zero:
        return sge_zero(system)
    alpha, g, beta = s.alpha, s.g, s.beta
    gamma, h, delta = t.alpha, t.g, t.beta
    if beta.is_prefix_of(gamma):
        eps = gamma.suffix_after(beta.length)
        return SgeElement(system,
                          compose(alpha, system.act_path(g, eps)),
                          mul(system.restrict_path(g, eps), h),
                          delta)
    if gamma.is_prefix_of(beta):
        eps = beta.suffix_after(gamma.length)
        hinv = inv(h)
        return SgeElement(system,
                          alpha,
                          mul(g, inv(system.restrict_path(hinv, eps))),
                          compose(delta, system.act_path(hinv, eps)))
    return sge_zero(system)


def sge_adjoint(s: SgeElement) -> SgeElement:
    if s.is_zero:
        return s
    return SgeElement(s.system, s.beta, inv(s.g), s.alpha)


def sge_equal(s: SgeElement, t: SgeElement,
              budget: Optional[SearchBudget] = None) -> Verdict3:
    """Componentwise equality; the middle goes through the backend verdict."""
    _same_system(s, t)
    if s.is_zero and t.is_zero:
        return Verdict3.yes()
    if s.is_zero != t.is_zero:
        return Verdict3.no("one side is zero")
    if s.alpha != t.alpha or s.beta != t.beta:
        return Verdict3.no("path components differ")
    return equal(s.g, t.g, budget)


def is_sge_idempotent(s: SgeElement, budget: Optional[SearchBudget] = None) -> Verdict3:
    if s.is_zero:
        return Verdict3.yes()
    if s.alpha != s.beta:
        return Verdict3.no("alpha != beta")
    return is_identity(s.g, budget)


def leq_idempotent_under(e: SgeElement, s: SgeElement,
                         budget: Optional[SearchBudget] = None) -> Verdict3:
    """Is the idempotent e dominated by s in the natural order?

    Requires alpha = beta, gamma = alpha tau, and tau strongly fixed by the
    middle element of s.
    """
    system = _same_system(e, s)
    idm = is_sge_idempotent(e, budget)
    if not idm.is_yes:
        raise NotIdempotent(f"first argument is not a certified idempotent: {idm}")
    if e.is_zero:
        return Verdict3.yes("zero is below everything")
    if s.is_zero:
        return Verdict3.no("nothing nonzero sits below zero")
    if s.alpha != s.beta:
        return Verdict3.no("alpha != beta")
    if not s.alpha.is_prefix_of(e.alpha):
        return Verdict3.no("gamma does not extend alpha")
    tau = e.alpha.suffix_after(s.alpha.length)
    return system.strongly_fixes(s.g, tau, budget)
