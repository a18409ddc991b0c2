"""Budgeted, error-aware evaluation of expressions within a scope.

Evaluation is strict, left-to-right, call-by-value; `if` runs only the taken
branch.  Every primitive application debits its cost before its evaluator
runs, and evaluation halts the moment a debit cannot be covered.  Outcomes
are total: a value, a runtime failure, or budget exhaustion -- nothing
partial ever escapes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .exec import compile_expr
from .exec.backend import engine
from .exec import opcodes as oc
from .expr import Expr
from .types import SemType

# default allowances: one slot application, and a whole test case
PER_ITERATION_OPS = 10_000
PER_CASE_OPS = 100_000

DIV_BY_ZERO = "DivByZero"
EMPTY_STRUCTURE = "EmptyStructure"
CONVERSION_ERROR = "ConversionError"
OVERFLOW = "Overflow"

_STATUS_KIND = {
    oc.ST_DIV0: DIV_BY_ZERO,
    oc.ST_EMPTY: EMPTY_STRUCTURE,
    oc.ST_CONV: CONVERSION_ERROR,
    oc.ST_OVERFLOW: OVERFLOW,
}


@dataclass
class Budget:
    """Weighted-operation counter; never increases, evaluation stops when a
    debit cannot be covered."""

    remaining_ops: int

    def __post_init__(self):
        if self.remaining_ops < 0:
            raise ValueError("budget must be non-negative")


class EvalOutcome:
    __slots__ = ()

    @property
    def is_ok(self) -> bool:
        return isinstance(self, Ok)


@dataclass(frozen=True, slots=True)
class Ok(EvalOutcome):
    value: object


@dataclass(frozen=True, slots=True)
class RuntimeFailure(EvalOutcome):
    kind: str


@dataclass(frozen=True, slots=True)
class BudgetExhausted(EvalOutcome):
    pass


@dataclass(frozen=True, slots=True)
class IterationCapExceeded(EvalOutcome):
    pass


@dataclass(frozen=True, slots=True)
class PerIterationBudget(EvalOutcome):
    """One slot application spent more than its allowance; the enclosing
    individual's evaluation is aborted, not just the current case."""


def outcome_from_status(status: int, value) -> EvalOutcome:
    if status == oc.ST_OK:
        return Ok(value)
    if status == oc.ST_BUDGET:
        return BudgetExhausted()
    if status == oc.ST_PER_ITER:
        return PerIterationBudget()
    if status == oc.ST_ITER_CAP:
        return IterationCapExceeded()
    return RuntimeFailure(_STATUS_KIND[status])


@dataclass(frozen=True, slots=True)
class Binding:
    name: str
    type: SemType
    value: object


@dataclass(frozen=True)
class Scope:
    """Ordered name/type/value bindings; names are unique, lookup is exact."""

    bindings: tuple[Binding, ...] = ()
    _by_name: dict = field(init=False, repr=False)

    def __post_init__(self):
        by = {b.name: b for b in self.bindings}
        if len(by) != len(self.bindings):
            raise ValueError("duplicate names in scope")
        object.__setattr__(self, "_by_name", by)

    @staticmethod
    def of(*triples) -> "Scope":
        return Scope(tuple(Binding(n, t, v) for n, t, v in triples))

    def names(self) -> tuple[str, ...]:
        return tuple(b.name for b in self.bindings)

    def types(self) -> dict[str, SemType]:
        return {b.name: b.type for b in self.bindings}

    def values(self) -> list:
        return [b.value for b in self.bindings]

    def lookup(self, name: str) -> Optional[Binding]:
        return self._by_name.get(name)


def eval(e: Expr, scope: Scope, budget: Budget) -> EvalOutcome:  # noqa: A001
    """Evaluates an expression whose free variables the scope binds.
    The budget object is debited in place."""
    compiled = compile_expr(e, scope.names())
    status, value, left = engine.eval_expr(compiled, scope.values(), budget.remaining_ops)
    budget.remaining_ops = left
    return outcome_from_status(oc.ST_BUDGET if status == oc.ST_PER_ITER else status, value)


def eval_fun_value(f, arg, budget: Budget) -> EvalOutcome:
    """Applies a function value (closure or partial application) to one
    argument under the budget."""
    status, value, left = engine.apply_fun(f, arg, budget.remaining_ops)
    budget.remaining_ops = left
    return outcome_from_status(oc.ST_BUDGET if status == oc.ST_PER_ITER else status, value)
