"""The six scaffold patterns: applicability, slot derivation, execution.

Each pattern is an immutable program skeleton with typed, scoped holes.
Instantiating a pattern against a problem signature yields the exact slot
list (output type + scope bindings); executing one drives the selected
engine's scheme loop over the compiled slot bodies.

Slot tables (o = output type, e = element type of arg0 = [e], a = the
caller-provided unbound type, i0/i1 = argument types):

    NoScheme     slot1::o   args
    Cata         slot1::o   (nothing)
                 slot2::o   i::Int, x::e, acc::o, args
    CurriedCata  slot1::o   ys::i1
                 slot2::o   i::Int, x::e, f::i1->o, ys::i1      (no args)
    Ana          slot1::i0  args
                 slot2::Bool seed::i0, args
                 slot3::e   seed::i0, args        (o = [e])
                 slot4::i0  seed::i0              (seed only)
    Accu         slot1::a   args
                 slot2::a   x::e, xs::[e], s::a, args
                 slot3::o   s::a, args
                 slot4::o   x::e, acc::o, s::a, args
    Hylo         slot1::Bool seed::i0, args
                 slot2::a   seed::i0, args
                 slot3::i0  seed::i0, args
                 slot4::o   (nothing)
                 slot5::o   x::a, acc::o, args
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from .exec import compile_expr
from .exec.backend import engine
from .exec import opcodes as oc
from .expr import Expr, typecheck
from .interp import (
    PER_CASE_OPS,
    PER_ITERATION_OPS,
    EvalOutcome,
    outcome_from_status,
)
from .types import BOOL, INT, FunT, ListT, SemType, Signature


class PatternKind(enum.IntEnum):
    """Complexity rank order doubles as the escalation order."""

    NO_SCHEME = 1
    CATA = 2
    CURRIED_CATA = 3
    ANA = 4
    ACCU = 5
    HYLO = 6

    @property
    def engine_id(self) -> int:
        return _ENGINE_IDS[self]

    @property
    def needs_unbound(self) -> bool:
        return self in (PatternKind.ACCU, PatternKind.HYLO)

    @property
    def label(self) -> str:
        return _LABELS[self]

    @staticmethod
    def from_label(text: str) -> "PatternKind":
        key = text.strip().lower().replace("-", "").replace("_", "")
        for kind, label in _LABELS.items():
            if label.lower() == key:
                return kind
        raise ValueError(f"unknown pattern {text!r}; expected one of "
                         + ", ".join(v.lower() for v in _LABELS.values()))


_ENGINE_IDS = {
    PatternKind.NO_SCHEME: oc.K_NOSCHEME,
    PatternKind.CATA: oc.K_CATA,
    PatternKind.CURRIED_CATA: oc.K_CURRIED,
    PatternKind.ANA: oc.K_ANA,
    PatternKind.ACCU: oc.K_ACCU,
    PatternKind.HYLO: oc.K_HYLO,
}

_LABELS = {
    PatternKind.NO_SCHEME: "noscheme",
    PatternKind.CATA: "cata",
    PatternKind.CURRIED_CATA: "curriedcata",
    PatternKind.ANA: "ana",
    PatternKind.ACCU: "accu",
    PatternKind.HYLO: "hylo",
}

SLOT_COUNT = {
    PatternKind.NO_SCHEME: 1,
    PatternKind.CATA: 2,
    PatternKind.CURRIED_CATA: 2,
    PatternKind.ANA: 4,
    PatternKind.ACCU: 4,
    PatternKind.HYLO: 5,
}


@dataclass(frozen=True)
class SlotSpec:
    slot_index: int
    out_type: SemType
    scope: tuple[tuple[str, SemType], ...]

    def scope_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.scope)

    def scope_types(self) -> dict[str, SemType]:
        return dict(self.scope)


@dataclass(frozen=True)
class PatternInstance:
    kind: PatternKind
    signature: Signature
    unbound_type: Optional[SemType]
    slots: tuple[SlotSpec, ...]


class NotApplicable(ValueError):
    pass


class MissingUnboundType(ValueError):
    pass


def applicable(kind: PatternKind, sig: Signature) -> bool:
    arg0_is_list = bool(sig.arg_types) and isinstance(sig.arg_types[0], ListT)
    if kind == PatternKind.NO_SCHEME or kind == PatternKind.HYLO:
        return True
    if kind == PatternKind.CATA or kind == PatternKind.ACCU:
        return arg0_is_list
    if kind == PatternKind.CURRIED_CATA:
        return len(sig.arg_types) == 2 and arg0_is_list
    if kind == PatternKind.ANA:
        return isinstance(sig.out_type, ListT)
    raise ValueError(kind)


def instantiate(
    kind: PatternKind, sig: Signature, unbound: Optional[SemType] = None
) -> PatternInstance:
    if not applicable(kind, sig):
        raise NotApplicable(f"{kind.label} does not apply to {sig}")
    if kind.needs_unbound and unbound is None:
        raise MissingUnboundType(f"{kind.label} requires an unbound type")
    if not kind.needs_unbound:
        unbound = None

    args = tuple((f"arg{i}", t) for i, t in enumerate(sig.arg_types))
    o = sig.out_type

    def slot(idx, out, scope):
        return SlotSpec(idx, out, tuple(scope))

    if kind == PatternKind.NO_SCHEME:
        slots = (slot(1, o, args),)
    elif kind == PatternKind.CATA:
        e = sig.arg_types[0].elem
        slots = (
            slot(1, o, ()),
            slot(2, o, (("i", INT), ("x", e), ("acc", o), *args)),
        )
    elif kind == PatternKind.CURRIED_CATA:
        e = sig.arg_types[0].elem
        i1 = sig.arg_types[1]
        slots = (
            slot(1, o, (("ys", i1),)),
            slot(2, o, (("i", INT), ("x", e), ("f", FunT(i1, o)), ("ys", i1))),
        )
    elif kind == PatternKind.ANA:
        i0 = sig.arg_types[0]
        e = o.elem
        slots = (
            slot(1, i0, args),
            slot(2, BOOL, (("seed", i0), *args)),
            slot(3, e, (("seed", i0), *args)),
            slot(4, i0, (("seed", i0),)),
        )
    elif kind == PatternKind.ACCU:
        e = sig.arg_types[0].elem
        a = unbound
        slots = (
            slot(1, a, args),
            slot(2, a, (("x", e), ("xs", ListT(e)), ("s", a), *args)),
            slot(3, o, (("s", a), *args)),
            slot(4, o, (("x", e), ("acc", o), ("s", a), *args)),
        )
    else:  # HYLO
        i0 = sig.arg_types[0]
        a = unbound
        slots = (
            slot(1, BOOL, (("seed", i0), *args)),
            slot(2, a, (("seed", i0), *args)),
            slot(3, i0, (("seed", i0), *args)),
            slot(4, o, ()),
            slot(5, o, (("x", a), ("acc", o), *args)),
        )
    return PatternInstance(kind, sig, unbound, slots)


DEFAULT_ITER_CAP = 10_000


@dataclass(frozen=True)
class Limits:
    iter_cap: int = DEFAULT_ITER_CAP
    per_iter_ops: int = PER_ITERATION_OPS
    global_ops: int = PER_CASE_OPS

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.iter_cap, self.per_iter_ops, self.global_ops)


DEFAULT_LIMITS = Limits()


def compile_slots(inst: PatternInstance, slot_exprs: Sequence[Expr]):
    return [
        compile_expr(e, spec.scope_names())
        for e, spec in zip(slot_exprs, inst.slots)
    ]


def check_slots(inst: PatternInstance, slot_exprs: Sequence[Expr]) -> None:
    if len(slot_exprs) != len(inst.slots):
        raise ValueError(f"{inst.kind.label} needs {len(inst.slots)} slots")
    for e, spec in zip(slot_exprs, inst.slots):
        t = typecheck(e, spec.scope_types())
        if t != spec.out_type:
            raise ValueError(
                f"slot{spec.slot_index} has type {t}, expected {spec.out_type}"
            )


def execute(
    inst: PatternInstance,
    slot_exprs: Sequence[Expr],
    inputs: Sequence[object],
    limits: Limits = DEFAULT_LIMITS,
) -> EvalOutcome:
    """Runs the scaffold over one input row.  Slot expressions must typecheck
    against the instance (checked lazily by the engines only as far as
    variable indices; call check_slots for the full guarantee)."""
    compiled = compile_slots(inst, slot_exprs)
    status, value = engine.run_case(
        inst.kind.engine_id, compiled, tuple(inputs), limits.as_tuple()
    )
    return outcome_from_status(status, value)
