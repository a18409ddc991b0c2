"""The primitive operation registry and type-directed candidate lookup.

Every operation the synthesizer may place in a slot lives here, with its
polymorphic signature and a pure evaluator.  Deliberately absent: map, filter,
sum, product, foldr and every other implicitly recursive function -- recursion
happens only through the scheme scaffolds.

Evaluators work on the plain-Python value representation from expr.py and
raise PrimError for the documented runtime failures (division by zero, empty
structures, out-of-range conversions, 64-bit overflow).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .expr import INT_MAX, INT_MIN, sort_map_items
from .types import (
    BOOL,
    CHAR,
    FLOAT,
    INT,
    STRING,
    FunT,
    ListT,
    MapT,
    PairT,
    SemType,
    Subst,
    VarT,
    apply_subst,
    contains_fun,
    format_type,
    free_vars,
    rename_vars,
    unify,
)

# runtime failure kinds (shared with the interpreter's outcomes)
DIV_BY_ZERO = "DivByZero"
EMPTY_STRUCTURE = "EmptyStructure"
CONVERSION_ERROR = "ConversionError"
OVERFLOW = "Overflow"

# hard cap for list-building primitives when called outside a budgeted engine
_RAW_BUILD_CAP = 10**6


class PrimError(Exception):
    def __init__(self, kind: str):
        super().__init__(kind)
        self.kind = kind


@dataclass(frozen=True)
class Primitive:
    id: str
    params: tuple[SemType, ...]
    ret: SemType
    fn: Callable
    var_cost: bool = False  # cost = 1 + output length instead of flat 1
    cost: int = 1

    _fresh_counter = itertools.count()

    def fresh_signature(self) -> tuple[tuple[SemType, ...], SemType]:
        """Signature with capture-free variable names, for unification."""
        sfx = f"#{next(Primitive._fresh_counter)}"
        return tuple(rename_vars(p, sfx) for p in self.params), rename_vars(self.ret, sfx)

    @property
    def arity(self) -> int:
        return len(self.params)


def _chk_int(r: int) -> int:
    if r < INT_MIN or r > INT_MAX:
        raise PrimError(OVERFLOW)
    return r


def _quot(a: int, b: int) -> int:
    if b == 0:
        raise PrimError(DIV_BY_ZERO)
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _div_int(a, b):
    if b == 0:
        raise PrimError(DIV_BY_ZERO)
    return _chk_int(a // b)


def _mod_int(a, b):
    if b == 0:
        raise PrimError(DIV_BY_ZERO)
    return a % b


def _rem_int(a, b):
    return a - _quot(a, b) * b


def _div_float(a, b):
    if b == 0.0:
        raise PrimError(DIV_BY_ZERO)
    return a / b


def _float_to_int(f: float, op) -> int:
    if math.isnan(f) or math.isinf(f):
        raise PrimError(OVERFLOW)
    return _chk_int(op(f))


def _head(xs):
    if not xs:
        raise PrimError(EMPTY_STRUCTURE)
    return xs[0]


def _last(xs):
    if not xs:
        raise PrimError(EMPTY_STRUCTURE)
    return xs[-1]


def _tail(xs):
    if not xs:
        raise PrimError(EMPTY_STRUCTURE)
    return xs[1:]


def _init(xs):
    if not xs:
        raise PrimError(EMPTY_STRUCTURE)
    return xs[:-1]


def _delete(x, xs):
    for i, y in enumerate(xs):
        if y == x:
            return xs[:i] + xs[i + 1 :]
    return xs


def _replicate(n, x):
    if n > _RAW_BUILD_CAP:
        raise PrimError(OVERFLOW)
    return (x,) * n if n > 0 else ()


def enum_length(a: int, b: int, c: int) -> int:
    """Length of enumFromThenTo a b c; zero step yields the empty sequence."""
    step = b - a
    if step == 0:
        return 0
    if step > 0:
        return 0 if a > c else (c - a) // step + 1
    return 0 if a < c else (a - c) // (-step) + 1


def _enum_from_then_to(a, b, c):
    n = enum_length(a, b, c)
    if n > _RAW_BUILD_CAP:
        raise PrimError(OVERFLOW)
    step = b - a
    return tuple(a + i * step for i in range(n))


def _split_at(n, xs):
    k = max(0, min(n, len(xs)))
    return (xs[:k], xs[k:])


def _intercalate(sep, xss):
    out = []
    for i, xs in enumerate(xss):
        if i:
            out.extend(sep)
        out.extend(xs)
    return tuple(out)


def _int_to_char(n):
    if 0 <= n <= 0x10FFFF:
        return chr(n)
    raise PrimError(CONVERSION_ERROR)


def _apply_direct(f, x):
    # direct evalPrimitive use only; engines apply their own closure objects
    if callable(f):
        return f(x)
    raise PrimError(CONVERSION_ERROR)


def _insert_with(f, k, v, m):
    for i, (k2, old) in enumerate(m):
        if k2 == k:
            merged = _apply_direct(f, (v, old))
            return m[:i] + ((k, merged),) + m[i + 1 :]
    return sort_map_items(m + ((k, v),))


def _from_list(pairs):
    return sort_map_items(pairs)


A = VarT("a")
B = VarT("b")


def _rows():
    """Table rows in registry order: (id, params, ret, fn, var_cost)."""
    r = []

    def row(pid, params, ret, fn, var_cost=False):
        r.append(Primitive(pid, tuple(params), ret, fn, var_cost))

    # integer arithmetic
    row("addInt", [INT, INT], INT, lambda a: _chk_int(a[0] + a[1]))
    row("subInt", [INT, INT], INT, lambda a: _chk_int(a[0] - a[1]))
    row("multInt", [INT, INT], INT, lambda a: _chk_int(a[0] * a[1]))
    row("divInt", [INT, INT], INT, lambda a: _div_int(a[0], a[1]))
    row("quotInt", [INT, INT], INT, lambda a: _chk_int(_quot(a[0], a[1])))
    row("modInt", [INT, INT], INT, lambda a: _mod_int(a[0], a[1]))
    row("remInt", [INT, INT], INT, lambda a: _rem_int(a[0], a[1]))
    row("minInt", [INT, INT], INT, lambda a: a[0] if a[0] <= a[1] else a[1])
    row("maxInt", [INT, INT], INT, lambda a: a[0] if a[0] >= a[1] else a[1])
    row("absInt", [INT], INT, lambda a: _chk_int(abs(a[0])))
    row("succInt", [INT], INT, lambda a: _chk_int(a[0] + 1))
    row("predInt", [INT], INT, lambda a: _chk_int(a[0] - 1))
    # float arithmetic
    row("addFloat", [FLOAT, FLOAT], FLOAT, lambda a: a[0] + a[1])
    row("subFloat", [FLOAT, FLOAT], FLOAT, lambda a: a[0] - a[1])
    row("multFloat", [FLOAT, FLOAT], FLOAT, lambda a: a[0] * a[1])
    row("divFloat", [FLOAT, FLOAT], FLOAT, lambda a: _div_float(a[0], a[1]))
    row("minFloat", [FLOAT, FLOAT], FLOAT, lambda a: a[0] if a[0] <= a[1] else a[1])
    row("maxFloat", [FLOAT, FLOAT], FLOAT, lambda a: a[0] if a[0] >= a[1] else a[1])
    row("absFloat", [FLOAT], FLOAT, lambda a: abs(a[0]))
    row("sqrt", [FLOAT], FLOAT, lambda a: math.sqrt(a[0]) if a[0] >= 0.0 else math.nan)
    row("sin", [FLOAT], FLOAT, lambda a: math.sin(a[0]))
    row("cos", [FLOAT], FLOAT, lambda a: math.cos(a[0]))
    row("succFloat", [FLOAT], FLOAT, lambda a: a[0] + 1.0)
    row("predFloat", [FLOAT], FLOAT, lambda a: a[0] - 1.0)
    # conversions
    row("fromIntegral", [INT], FLOAT, lambda a: float(a[0]))
    row("floor", [FLOAT], INT, lambda a: _float_to_int(a[0], math.floor))
    row("ceiling", [FLOAT], INT, lambda a: _float_to_int(a[0], math.ceil))
    row("round", [FLOAT], INT, lambda a: _float_to_int(a[0], round))
    # comparisons
    row("ltInt", [INT, INT], BOOL, lambda a: a[0] < a[1])
    row("gtInt", [INT, INT], BOOL, lambda a: a[0] > a[1])
    row("gteInt", [INT, INT], BOOL, lambda a: a[0] >= a[1])
    row("lteInt", [INT, INT], BOOL, lambda a: a[0] <= a[1])
    row("ltFloat", [FLOAT, FLOAT], BOOL, lambda a: a[0] < a[1])
    row("gtFloat", [FLOAT, FLOAT], BOOL, lambda a: a[0] > a[1])
    row("gteFloat", [FLOAT, FLOAT], BOOL, lambda a: a[0] >= a[1])
    row("lteFloat", [FLOAT, FLOAT], BOOL, lambda a: a[0] <= a[1])
    # booleans; `if` is special-formed in the engines but registered here
    row("and", [BOOL, BOOL], BOOL, lambda a: a[0] and a[1])
    row("or", [BOOL, BOOL], BOOL, lambda a: a[0] or a[1])
    row("not", [BOOL], BOOL, lambda a: not a[0])
    row("if", [BOOL, A, A], A, lambda a: a[1] if a[0] else a[2])
    row("eq", [A, A], BOOL, lambda a: a[0] == a[1])
    row("neq", [A, A], BOOL, lambda a: a[0] != a[1])
    # show / char
    row("showInt", [INT], STRING, lambda a: tuple(str(a[0])))
    row("showFloat", [FLOAT], STRING, lambda a: tuple(repr(a[0])))
    row("showBool", [BOOL], STRING, lambda a: tuple("True" if a[0] else "False"))
    row("showChar", [CHAR], STRING, lambda a: (a[0],))
    row("charToInt", [CHAR], INT, lambda a: ord(a[0]))
    row("intToChar", [INT], CHAR, lambda a: _int_to_char(a[0]))
    row("isLetter", [CHAR], BOOL, lambda a: a[0].isalpha())
    row("isSpace", [CHAR], BOOL, lambda a: a[0].isspace())
    row("isDigit", [CHAR], BOOL, lambda a: a[0].isdigit())
    # lists
    row("length", [ListT(A)], INT, lambda a: len(a[0]))
    row("cons", [A, ListT(A)], ListT(A), lambda a: (a[0],) + a[1])
    row("snoc", [A, ListT(A)], ListT(A), lambda a: a[1] + (a[0],))
    row("mappend", [ListT(A), ListT(A)], ListT(A), lambda a: a[0] + a[1], var_cost=True)
    row("elem", [A, ListT(A)], BOOL, lambda a: a[0] in a[1])
    row("delete", [A, ListT(A)], ListT(A), lambda a: _delete(a[0], a[1]))
    row("null", [ListT(A)], BOOL, lambda a: len(a[0]) == 0)
    row("head", [ListT(A)], A, lambda a: _head(a[0]))
    row("last", [ListT(A)], A, lambda a: _last(a[0]))
    row("tail", [ListT(A)], ListT(A), lambda a: _tail(a[0]))
    row("init", [ListT(A)], ListT(A), lambda a: _init(a[0]))
    row("zip", [ListT(A), ListT(B)], ListT(PairT(A, B)), lambda a: tuple(zip(a[0], a[1])), var_cost=True)
    row("replicate", [INT, A], ListT(A), lambda a: _replicate(a[0], a[1]), var_cost=True)
    row("enumFromThenTo", [INT, INT, INT], ListT(INT), lambda a: _enum_from_then_to(a[0], a[1], a[2]), var_cost=True)
    row("reverse", [ListT(A)], ListT(A), lambda a: a[0][::-1], var_cost=True)
    row("splitAt", [INT, ListT(A)], PairT(ListT(A), ListT(A)), lambda a: _split_at(a[0], a[1]), var_cost=True)
    row("intercalate", [ListT(A), ListT(ListT(A))], ListT(A), lambda a: _intercalate(a[0], a[1]), var_cost=True)
    # pairs
    row("fst", [PairT(A, B)], A, lambda a: a[0][0])
    row("snd", [PairT(A, B)], B, lambda a: a[0][1])
    row("mkPair", [A, B], PairT(A, B), lambda a: (a[0], a[1]))
    # function application
    row("apply", [FunT(A, B), A], B, lambda a: _apply_direct(a[0], a[1]))
    # ordered maps (construction only; the grammar has no lookup)
    row("singleton", [A, B], MapT(A, B), lambda a: ((a[0], a[1]),))
    row("insert", [A, B, MapT(A, B)], MapT(A, B), lambda a: sort_map_items(a[2] + ((a[0], a[1]),)))
    row("insertWith", [FunT(PairT(B, B), B), A, B, MapT(A, B)], MapT(A, B), lambda a: _insert_with(a[0], a[1], a[2], a[3]))
    row("fromList", [ListT(PairT(A, B))], MapT(A, B), lambda a: _from_list(a[0]), var_cost=True)
    return r


class Registry:
    """Immutable after construction; lookup by id or registry position."""

    def __init__(self, prims: list[Primitive]):
        self.ordered = tuple(prims)
        self.by_id = {p.id: p for p in prims}
        if len(self.by_id) != len(prims):
            raise ValueError("duplicate primitive id")
        self.index = {p.id: i for i, p in enumerate(prims)}

    def get(self, pid: str) -> Optional[Primitive]:
        return self.by_id.get(pid)

    def __getitem__(self, pid: str) -> Primitive:
        return self.by_id[pid]

    def __contains__(self, pid: str) -> bool:
        return pid in self.by_id

    def __iter__(self):
        return iter(self.ordered)


_REGISTRY: Optional[Registry] = None


def register_all() -> Registry:
    """The full operation table; built once, shared everywhere."""
    global _REGISTRY
    if _REGISTRY is None:
        _REGISTRY = Registry(_rows())
    return _REGISTRY


registry = register_all


def eval_primitive(p: Primitive, args) -> object:
    """Direct, unbudgeted evaluation; deterministic, pure.  Function-valued
    arguments must be Python callables here -- inside the engines they are
    closure objects applied under the running budget."""
    return p.fn(tuple(args))


@dataclass(frozen=True)
class TypeEnv:
    """The ground types a problem's programs may mention.  Primitives are
    offered only when every instantiated parameter type is in this set."""

    types: frozenset[SemType]
    ordered: tuple[SemType, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "ordered", tuple(sorted(self.types, key=format_type))
        )

    @staticmethod
    def closing_over(types) -> "TypeEnv":
        """Env containing the given types and all their component types."""
        from .types import subterms

        out = set()
        for t in types:
            out.update(subterms(t))
        return TypeEnv(frozenset(out))

    def extend(self, types) -> "TypeEnv":
        return TypeEnv.closing_over(tuple(self.types) + tuple(types))

    def allows(self, t: SemType) -> bool:
        return t in self.types


def _completions(base: Subst, params, env: TypeEnv):
    """All ways to ground the parameter variables left free after unifying
    the return type; assignments range over the env's ground types."""
    free = sorted({v for p in params for v in free_vars(apply_subst(base, p))})
    if not free:
        yield base
        return
    for combo in itertools.product(env.ordered, repeat=len(free)):
        s = dict(base)
        s.update(zip(free, combo))
        yield s


def _clean(subst: Subst, names) -> Subst:
    return {k: apply_subst(subst, VarT(k)) for k in names}


_CANDIDATE_CACHE: dict[tuple, list] = {}


def candidates_returning(t: SemType, env: TypeEnv) -> list[tuple[Primitive, Subst]]:
    """Primitives whose instantiated return type is exactly `t` and whose
    instantiated parameters all fall inside `env`.  Deterministic registry
    order; an empty result sends the generator back to terminals.

    Type variables are never instantiated at function-containing types, so
    function-typed targets have no direct candidates (they are built from
    scope variables or partial applications instead)."""
    key = (t, env.types)
    hit = _CANDIDATE_CACHE.get(key)
    if hit is not None:
        return hit
    out = []
    for prim in register_all():
        base = unify(prim.ret, t)
        if base is None:
            continue
        names = free_vars(prim.ret) | {v for p in prim.params for v in free_vars(p)}
        for subst in _completions(base, prim.params, env):
            subst = _clean(subst, names)
            if any(contains_fun(b) for b in subst.values()):
                continue
            inst_params = [apply_subst(subst, p) for p in prim.params]
            if all(env.allows(p) for p in inst_params):
                out.append((prim, subst))
    _CANDIDATE_CACHE[key] = out
    return out


_PARTIAL_CACHE: dict[tuple, list] = {}


def partial_candidates(t: FunT, env: TypeEnv) -> list[tuple[Primitive, int, Subst]]:
    """Ways to build a function value of type `t` by partially applying a
    primitive: (primitive, number-of-supplied-args, substitution).  Zero
    supplied arguments is a bare primitive reference (a leaf)."""
    key = (t, env.types)
    hit = _PARTIAL_CACHE.get(key)
    if hit is not None:
        return hit
    out = []
    for prim in register_all():
        for n_sup in range(prim.arity):
            curried = prim.ret
            for p in reversed(prim.params[n_sup:]):
                curried = FunT(p, curried)
            base = unify(curried, t)
            if base is None:
                continue
            names = free_vars(prim.ret) | {v for p in prim.params for v in free_vars(p)}
            supplied = prim.params[:n_sup]
            for subst in _completions(base, supplied, env):
                subst = _clean(subst, names)
                if any(contains_fun(b) for b in subst.values()):
                    continue
                inst_sup = [apply_subst(subst, p) for p in supplied]
                if all(env.allows(p) for p in inst_sup):
                    out.append((prim, n_sup, subst))
    _PARTIAL_CACHE[key] = out
    return out
