"""The type language shared by every module.

Types are immutable trees: four base types, lists, pairs, ordered maps,
single-argument functions, and type variables.  Type variables only ever
appear in primitive signatures and unification intermediates; instantiated
slots and expressions are always ground.  Strings are exactly ``ListT(CharT)``
-- there is no separate string type.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional


class SemType:
    """Base class. Concrete types are frozen dataclasses below."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_type(self)


@dataclass(frozen=True, slots=True)
class IntT(SemType):
    pass


@dataclass(frozen=True, slots=True)
class FloatT(SemType):
    pass


@dataclass(frozen=True, slots=True)
class BoolT(SemType):
    pass


@dataclass(frozen=True, slots=True)
class CharT(SemType):
    pass


@dataclass(frozen=True, slots=True)
class ListT(SemType):
    elem: SemType


@dataclass(frozen=True, slots=True)
class PairT(SemType):
    fst: SemType
    snd: SemType


@dataclass(frozen=True, slots=True)
class MapT(SemType):
    key: SemType
    val: SemType


@dataclass(frozen=True, slots=True)
class FunT(SemType):
    arg: SemType
    ret: SemType


@dataclass(frozen=True, slots=True)
class VarT(SemType):
    name: str


INT = IntT()
FLOAT = FloatT()
BOOL = BoolT()
CHAR = CharT()
STRING = ListT(CHAR)

Subst = dict[str, SemType]


@dataclass(frozen=True, slots=True)
class Signature:
    """A problem signature: argument types (arg0..argn) and the output type."""

    arg_types: tuple[SemType, ...]
    out_type: SemType

    def __post_init__(self):
        for t in (*self.arg_types, self.out_type):
            if has_vars(t):
                raise ValueError(f"signature must be ground, got {t}")


def children(t: SemType) -> tuple[SemType, ...]:
    if isinstance(t, ListT):
        return (t.elem,)
    if isinstance(t, PairT):
        return (t.fst, t.snd)
    if isinstance(t, MapT):
        return (t.key, t.val)
    if isinstance(t, FunT):
        return (t.arg, t.ret)
    return ()


def subterms(t: SemType) -> Iterator[SemType]:
    """The type itself plus all nested component types."""
    yield t
    for c in children(t):
        yield from subterms(c)


def has_vars(t: SemType) -> bool:
    return any(isinstance(s, VarT) for s in subterms(t))


def contains_fun(t: SemType) -> bool:
    return any(isinstance(s, FunT) for s in subterms(t))


def free_vars(t: SemType) -> set[str]:
    return {s.name for s in subterms(t) if isinstance(s, VarT)}


def apply_subst(subst: Subst, t: SemType) -> SemType:
    if isinstance(t, VarT):
        bound = subst.get(t.name)
        return apply_subst(subst, bound) if bound is not None else t
    if isinstance(t, ListT):
        return ListT(apply_subst(subst, t.elem))
    if isinstance(t, PairT):
        return PairT(apply_subst(subst, t.fst), apply_subst(subst, t.snd))
    if isinstance(t, MapT):
        return MapT(apply_subst(subst, t.key), apply_subst(subst, t.val))
    if isinstance(t, FunT):
        return FunT(apply_subst(subst, t.arg), apply_subst(subst, t.ret))
    return t


def _occurs(name: str, t: SemType, subst: Subst) -> bool:
    if isinstance(t, VarT):
        if t.name == name:
            return True
        nxt = subst.get(t.name)
        return _occurs(name, nxt, subst) if nxt is not None else False
    return any(_occurs(name, c, subst) for c in children(t))


def unify(t1: SemType, t2: SemType, subst: Optional[Subst] = None) -> Optional[Subst]:
    """Most-general unifier of two types, or None on constructor clash /
    occurs-check failure.  The returned substitution maps variable names to
    types; applying it to both inputs yields identical types."""
    subst = {} if subst is None else dict(subst)
    if _unify_into(t1, t2, subst):
        return subst
    return None


def _resolve(t: SemType, subst: Subst) -> SemType:
    while isinstance(t, VarT):
        nxt = subst.get(t.name)
        if nxt is None:
            return t
        t = nxt
    return t


def _unify_into(t1: SemType, t2: SemType, subst: Subst) -> bool:
    t1 = _resolve(t1, subst)
    t2 = _resolve(t2, subst)
    if t1 == t2:
        return True
    if isinstance(t1, VarT):
        if _occurs(t1.name, t2, subst):
            return False
        subst[t1.name] = t2
        return True
    if isinstance(t2, VarT):
        return _unify_into(t2, t1, subst)
    if type(t1) is not type(t2):
        return False
    c1, c2 = children(t1), children(t2)
    return all(_unify_into(a, b, subst) for a, b in zip(c1, c2))


def rename_vars(t: SemType, suffix: str) -> SemType:
    """Fresh-renames every variable, used to instantiate primitive signatures."""
    if isinstance(t, VarT):
        return VarT(t.name + suffix)
    if isinstance(t, ListT):
        return ListT(rename_vars(t.elem, suffix))
    if isinstance(t, PairT):
        return PairT(rename_vars(t.fst, suffix), rename_vars(t.snd, suffix))
    if isinstance(t, MapT):
        return MapT(rename_vars(t.key, suffix), rename_vars(t.val, suffix))
    if isinstance(t, FunT):
        return FunT(rename_vars(t.arg, suffix), rename_vars(t.ret, suffix))
    return t


def format_type(t: SemType) -> str:
    """Haskell-like rendering: [Char], (Int, Float), Map Int Bool, Int -> Bool."""
    if isinstance(t, IntT):
        return "Int"
    if isinstance(t, FloatT):
        return "Float"
    if isinstance(t, BoolT):
        return "Bool"
    if isinstance(t, CharT):
        return "Char"
    if isinstance(t, ListT):
        return f"[{format_type(t.elem)}]"
    if isinstance(t, PairT):
        return f"({format_type(t.fst)}, {format_type(t.snd)})"
    if isinstance(t, MapT):
        return f"Map {_atom(t.key)} {_atom(t.val)}"
    if isinstance(t, FunT):
        a = format_type(t.arg)
        if isinstance(t.arg, FunT):
            a = f"({a})"
        return f"{a} -> {format_type(t.ret)}"
    if isinstance(t, VarT):
        return t.name
    raise TypeError(f"not a SemType: {t!r}")


def _atom(t: SemType) -> str:
    s = format_type(t)
    return f"({s})" if isinstance(t, (MapT, FunT)) else s


class TypeSyntaxError(ValueError):
    pass


def parse_type(text: str) -> SemType:
    """Parses the format_type syntax (round-trips with it)."""
    toks = _lex_type(text)
    t, pos = _parse_fun(toks, 0)
    if pos != len(toks):
        raise TypeSyntaxError(f"trailing tokens in type: {text!r}")
    return t


def _lex_type(text: str) -> list[str]:
    toks, i = [], 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "[](),":
            toks.append(c)
            i += 1
        elif text.startswith("->", i):
            toks.append("->")
            i += 2
        elif c.isalpha():
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(text[i:j])
            i = j
        else:
            raise TypeSyntaxError(f"bad character {c!r} in type {text!r}")
    return toks


def _parse_fun(toks, pos):
    t, pos = _parse_app(toks, pos)
    if pos < len(toks) and toks[pos] == "->":
        ret, pos = _parse_fun(toks, pos + 1)
        return FunT(t, ret), pos
    return t, pos


def _parse_app(toks, pos):
    if pos < len(toks) and toks[pos] == "Map":
        k, pos = _parse_atom(toks, pos + 1)
        v, pos = _parse_atom(toks, pos)
        return MapT(k, v), pos
    return _parse_atom(toks, pos)


def _parse_atom(toks, pos):
    if pos >= len(toks):
        raise TypeSyntaxError("unexpected end of type")
    tok = toks[pos]
    if tok == "[":
        elem, pos = _parse_fun(toks, pos + 1)
        if pos >= len(toks) or toks[pos] != "]":
            raise TypeSyntaxError("missing ]")
        return ListT(elem), pos + 1
    if tok == "(":
        first, pos = _parse_fun(toks, pos + 1)
        if pos < len(toks) and toks[pos] == ",":
            second, pos = _parse_fun(toks, pos + 1)
            if pos >= len(toks) or toks[pos] != ")":
                raise TypeSyntaxError("missing ) in pair type")
            return PairT(first, second), pos + 1
        if pos >= len(toks) or toks[pos] != ")":
            raise TypeSyntaxError("missing )")
        return first, pos + 1
    base = {"Int": INT, "Float": FLOAT, "Bool": BOOL, "Char": CHAR}.get(tok)
    if base is not None:
        return base, pos + 1
    if tok and tok[0].islower():
        return VarT(tok), pos + 1
    raise TypeSyntaxError(f"unknown type token {tok!r}")
