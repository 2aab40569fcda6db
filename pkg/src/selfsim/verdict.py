"""Three-valued verdicts with certificates, and search budgets.

Every semidecidable check in this package answers Yes / No / Unknown.  A Yes
or No always carries a machine-checkable certificate or witness; Unknown
carries the reason the search gave up (usually a budget).  Verdicts are
monotone: growing a budget may sharpen Unknown into Yes or No, never flip
Yes into No.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

YES = "Yes"
NO = "No"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict3:
    kind: str
    certificate: Any = None
    reason: str = ""

    @staticmethod
    def yes(certificate: Any = None, reason: str = "") -> "Verdict3":
        return Verdict3(YES, certificate, reason)

    @staticmethod
    def no(witness: Any = None, reason: str = "") -> "Verdict3":
        return Verdict3(NO, witness, reason)

    @staticmethod
    def unknown(reason: str = "", certificate: Any = None) -> "Verdict3":
        return Verdict3(UNKNOWN, certificate, reason)

    @property
    def is_yes(self) -> bool:
        return self.kind == YES

    @property
    def is_no(self) -> bool:
        return self.kind == NO

    @property
    def is_unknown(self) -> bool:
        return self.kind == UNKNOWN

    def __str__(self) -> str:
        return self.kind


@dataclass(frozen=True)
class SearchBudget:
    """Caps for the breadth-first searches over restriction states.

    max_states bounds memory (number of distinct states kept), max_depth
    bounds path length, max_ball bounds how many group elements the
    restriction-closure ball may contain before coverage is declared
    incomplete.
    """

    max_states: int = 100_000
    max_depth: int = 64
    max_ball: int = 64

    def smaller(self, states: int = 4096, depth: int = 32) -> "SearchBudget":
        return SearchBudget(min(self.max_states, states),
                            min(self.max_depth, depth),
                            self.max_ball)


@dataclass
class BudgetMeter:
    """Mutable consumption counter for one search."""

    budget: SearchBudget
    states_used: int = 0
    depth_reached: int = 0
    exhausted: bool = False

    def charge_state(self) -> bool:
        """Consume one state; False once the state budget is gone."""
        if self.states_used >= self.budget.max_states:
            self.exhausted = True
            return False
        self.states_used += 1
        return True

    def allow_depth(self, depth: int) -> bool:
        self.depth_reached = max(self.depth_reached, depth)
        if depth > self.budget.max_depth:
            self.exhausted = True
            return False
        return True


class SelfsimError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(SelfsimError):
    pass


class NonComposable(SelfsimError):
    pass


class BackendMismatch(SelfsimError):
    pass


class SystemMismatch(SelfsimError):
    pass


class DomainMismatch(SelfsimError):
    pass


class NotAutomorphism(SelfsimError):
    pass


class StandingHypothesisViolated(SelfsimError):
    pass


class NotAGCircuit(SelfsimError):
    pass


class WrongShape(SelfsimError):
    pass


class NotIdempotent(SelfsimError):
    pass


class NonComposableGerms(SelfsimError):
    pass


class UncertifiedPeriodicity(SelfsimError):
    pass


class Condition0Violated(SelfsimError):
    pass


class ShapeMismatch(SelfsimError):
    pass


class AbelianizationInconsistent(SelfsimError):
    pass


class NotASource(SelfsimError):
    pass


class NotInfiniteReceiver(SelfsimError):
    pass


class IncoherentFamily(SelfsimError):
    pass


class OrbitNotComputable(SelfsimError):
    pass


class ParseError(SelfsimError):
    def __init__(self, message: str, line: int = 0, column: int = 0, block: str = ""):
        self.line = line
        self.column = column
        self.block = block
        super().__init__(f"{message} (line {line}, column {column}"
                         + (f", block {block}" if block else "") + ")")
