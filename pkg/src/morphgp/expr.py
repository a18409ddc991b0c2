"""Typed expression trees and their runtime value representation.

Expressions are the unit of evolution inside a slot: leaves are variables or
constants, internal nodes apply primitives (fully or partially).  Every node
carries its ground type; depth and size are precomputed at construction since
variation operators query them constantly.

Runtime values piggyback on plain Python objects:

    Int   -> int (kept within signed 64 bits by the evaluators)
    Float -> float
    Bool  -> bool
    Char  -> 1-character str
    List  -> tuple
    Pair  -> 2-tuple
    Map   -> tuple of (key, value) pairs, sorted by key, keys unique
    Fun   -> engine closure / partial-application object

The static type always disambiguates (a 2-tuple is a pair or a length-2 list
depending on context), so no runtime tagging is needed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .types import (
    BOOL,
    CHAR,
    FLOAT,
    INT,
    FunT,
    IntT,
    ListT,
    MapT,
    PairT,
    SemType,
    has_vars,
    unify,
)

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1


class Expr:
    __slots__ = ()
    type: SemType
    depth: int
    size: int


@dataclass(frozen=True, slots=True)
class Var(Expr):
    name: str
    type: SemType
    depth: int = field(init=False, default=1, repr=False)
    size: int = field(init=False, default=1, repr=False)


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: object
    type: SemType
    depth: int = field(init=False, default=1, repr=False)
    size: int = field(init=False, default=1, repr=False)


@dataclass(frozen=True, slots=True)
class App(Expr):
    prim: str
    args: tuple[Expr, ...]
    type: SemType
    depth: int = field(init=False, repr=False)
    size: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "depth", 1 + max(a.depth for a in self.args))
        object.__setattr__(self, "size", 1 + sum(a.size for a in self.args))


@dataclass(frozen=True, slots=True)
class PartialApp(Expr):
    """A primitive with a proper prefix of its arguments supplied; the node's
    type is the curried function type of the remaining parameters."""

    prim: str
    supplied: tuple[Expr, ...]
    type: FunT
    depth: int = field(init=False, repr=False)
    size: int = field(init=False, repr=False)

    def __post_init__(self):
        d = 1 + max((a.depth for a in self.supplied), default=0)
        object.__setattr__(self, "depth", d)
        object.__setattr__(self, "size", 1 + sum(a.size for a in self.supplied))


def expr_children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, App):
        return e.args
    if isinstance(e, PartialApp):
        return e.supplied
    return ()


def with_children(e: Expr, new: Sequence[Expr]) -> Expr:
    if isinstance(e, App):
        return App(e.prim, tuple(new), e.type)
    if isinstance(e, PartialApp):
        return PartialApp(e.prim, tuple(new), e.type)
    assert not new
    return e


Path = tuple[int, ...]


def iter_nodes(e: Expr, _path: Path = ()) -> Iterator[tuple[Path, Expr]]:
    """Pre-order traversal yielding (path-of-child-indices, node)."""
    yield _path, e
    for i, c in enumerate(expr_children(e)):
        yield from iter_nodes(c, _path + (i,))


def node_at(e: Expr, path: Path) -> Expr:
    for i in path:
        e = expr_children(e)[i]
    return e


def replace_at(e: Expr, path: Path, new: Expr) -> Expr:
    if not path:
        return new
    kids = list(expr_children(e))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(e, kids)


class TypecheckError(Exception):
    def __init__(self, node: Expr, message: str):
        super().__init__(message)
        self.node = node


def typecheck(e: Expr, scope: dict[str, SemType]) -> SemType:
    """Returns the expression's type; raises TypecheckError at the offending
    node if any application is inconsistent with its primitive's signature,
    a variable is unbound, or a stored node type disagrees."""
    from .primitives import registry  # deferred: primitives imports types too

    reg = registry()
    if isinstance(e, Var):
        t = scope.get(e.name)
        if t is None:
            raise TypecheckError(e, f"unbound variable {e.name}")
        if t != e.type:
            raise TypecheckError(e, f"{e.name}: annotated {e.type}, scope has {t}")
        return t
    if isinstance(e, Const):
        if has_vars(e.type):
            raise TypecheckError(e, f"constant with non-ground type {e.type}")
        if not value_fits(e.value, e.type):
            raise TypecheckError(e, f"constant {e.value!r} does not inhabit {e.type}")
        return e.type
    if isinstance(e, (App, PartialApp)):
        prim = reg.get(e.prim)
        if prim is None:
            raise TypecheckError(e, f"unknown primitive {e.prim}")
        params, ret = prim.fresh_signature()
        kids = expr_children(e)
        if isinstance(e, App):
            if len(kids) != len(params):
                raise TypecheckError(e, f"{e.prim} expects {len(params)} args, got {len(kids)}")
            expected_out = ret
        else:
            if not 0 <= len(kids) < len(params):
                raise TypecheckError(e, f"{e.prim} partial with {len(kids)} args")
            expected_out = ret
            for p in reversed(params[len(kids):]):
                expected_out = FunT(p, expected_out)
        subst = {}
        for kid, param in zip(kids, params):
            kt = typecheck(kid, scope)
            subst = unify(param, kt, subst)
            if subst is None:
                raise TypecheckError(e, f"{e.prim}: argument type {kt} clashes with {param}")
        subst = unify(expected_out, e.type, subst)
        if subst is None:
            raise TypecheckError(e, f"{e.prim}: node type {e.type} clashes with signature")
        return e.type
    raise TypecheckError(e, f"not an expression: {e!r}")


def typechecks(e: Expr, scope: dict[str, SemType], expected: SemType | None = None) -> bool:
    try:
        t = typecheck(e, scope)
    except TypecheckError:
        return False
    return expected is None or t == expected


def value_fits(v: object, t: SemType) -> bool:
    """Structural check that a constant inhabits its annotated type.
    Function values are engine objects and never appear as constants."""
    if isinstance(t, IntT):
        return type(v) is int and INT_MIN <= v <= INT_MAX
    if t == FLOAT:
        return type(v) is float
    if t == BOOL:
        return type(v) is bool
    if t == CHAR:
        return type(v) is str and len(v) == 1
    if isinstance(t, ListT):
        return type(v) is tuple and all(value_fits(x, t.elem) for x in v)
    if isinstance(t, PairT):
        return type(v) is tuple and len(v) == 2 and value_fits(v[0], t.fst) and value_fits(v[1], t.snd)
    if isinstance(t, MapT):
        if type(v) is not tuple:
            return False
        keys = [kv[0] for kv in v]
        return (
            all(type(kv) is tuple and len(kv) == 2 for kv in v)
            and all(value_fits(k, t.key) for k in keys)
            and all(value_fits(kv[1], t.val) for kv in v)
            and keys == sorted(set(keys), key=_order_key)
        )
    return False


def _order_key(v):
    # total order on non-function values of a common type; tuples recurse
    if type(v) is tuple:
        return tuple(_order_key(x) for x in v)
    return v


def sort_map_items(items) -> tuple:
    """Canonical map form: unique keys, sorted; later duplicates win."""
    merged = {}
    for k, v in items:
        merged[k] = v
    return tuple(sorted(merged.items(), key=lambda kv: _order_key(kv[0])))


def string_value(s: str) -> tuple:
    """[Char] runtime form of a Python string."""
    return tuple(s)


def value_to_python(v: object, t: SemType):
    """Type-directed conversion to plain JSON-ready Python data:
    [Char] becomes str, lists become Python lists, pairs/maps become lists."""
    if isinstance(t, ListT):
        if t.elem == CHAR:
            return "".join(v)
        return [value_to_python(x, t.elem) for x in v]
    if isinstance(t, PairT):
        return [value_to_python(v[0], t.fst), value_to_python(v[1], t.snd)]
    if isinstance(t, MapT):
        return [[value_to_python(k, t.key), value_to_python(x, t.val)] for k, x in v]
    return v


def value_from_python(obj, t: SemType):
    """Inverse of value_to_python."""
    if isinstance(t, ListT):
        if t.elem == CHAR:
            return tuple(obj)
        return tuple(value_from_python(x, t.elem) for x in obj)
    if isinstance(t, PairT):
        return (value_from_python(obj[0], t.fst), value_from_python(obj[1], t.snd))
    if isinstance(t, MapT):
        return sort_map_items(
            (value_from_python(k, t.key), value_from_python(x, t.val)) for k, x in obj
        )
    if t == FLOAT:
        return float(obj)
    if isinstance(t, IntT):
        return int(obj)
    return obj
