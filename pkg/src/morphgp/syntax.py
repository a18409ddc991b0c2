"""Haskell-like surface syntax: printing and parsing of expressions and of
whole scaffold programs (the shipped champion format).

Expressions print in prefix form (`addInt (length arg0) 1`); `if` is an
ordinary prefix application in this syntax.  Printing then parsing is a fixed
point for every expression the generators can produce.

A champion file is a small comment header (problem / pattern / unbound type)
followed by the scaffold text with the evolved slots inlined.
"""
from __future__ import annotations

import re
from typing import Optional, Sequence

from .expr import App, Const, Expr, PartialApp, Var
from .primitives import register_all
from .schemes import PatternInstance, PatternKind
from .types import (
    BOOL,
    CHAR,
    FLOAT,
    INT,
    CharT,
    FunT,
    IntT,
    ListT,
    MapT,
    PairT,
    SemType,
    VarT,
    apply_subst,
    format_type,
    has_vars,
    parse_type,
    unify,
)


class ExprSyntaxError(ValueError):
    pass


_ESCAPES = {"\n": "\\n", "\t": "\\t", "\r": "\\r", "\\": "\\\\"}
_UNESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'", '"': '"'}


def _escape(ch: str, quote: str) -> str:
    if ch == quote:
        return "\\" + quote
    return _ESCAPES.get(ch, ch)


def format_value(v, t: SemType) -> str:
    if isinstance(t, IntT):
        return str(v)
    if t == FLOAT:
        return repr(v)
    if t == BOOL:
        return "True" if v else "False"
    if t == CHAR:
        return "'" + _escape(v, "'") + "'"
    if isinstance(t, ListT):
        if t.elem == CHAR:
            return '"' + "".join(_escape(c, '"') for c in v) + '"'
        return "[" + ", ".join(format_value(x, t.elem) for x in v) + "]"
    if isinstance(t, PairT):
        return f"({format_value(v[0], t.fst)}, {format_value(v[1], t.snd)})"
    raise ExprSyntaxError(f"no literal syntax for values of type {t}")


def format_expr(e: Expr) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        return format_value(e.value, e.type)
    if isinstance(e, App):
        return " ".join([e.prim] + [_atom(a) for a in e.args])
    if isinstance(e, PartialApp):
        if not e.supplied:
            return e.prim
        return " ".join([e.prim] + [_atom(a) for a in e.supplied])
    raise ExprSyntaxError(f"cannot print {e!r}")


def _atom(e: Expr) -> str:
    s = format_expr(e)
    if isinstance(e, (App, PartialApp)) and (not isinstance(e, PartialApp) or e.supplied):
        return f"({s})"
    if isinstance(e, Const) and s.startswith("-"):
        return f"({s})"
    return s


_TOKEN_RE = re.compile(
    r"""\s+
      | -?\d+\.\d+(?:[eE][+-]?\d+)?
      | -?\d+[eE][+-]?\d+
      | -?\d+
      | '(?:\\.|[^'\\])'
      | "(?:\\.|[^"\\])*"
      | ->
      | [A-Za-z_][A-Za-z0-9_']*
      | [()\[\],:=\\]
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[str]:
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ExprSyntaxError(f"bad character {text[pos]!r} at offset {pos}")
        tok = m.group(0)
        if not tok.isspace():
            toks.append(tok)
        pos = m.end()
    return toks


def _unquote_char(tok: str) -> str:
    body = tok[1:-1]
    if body.startswith("\\"):
        ch = _UNESCAPES.get(body[1])
        if ch is None:
            raise ExprSyntaxError(f"bad escape {body!r}")
        return ch
    return body


def _unquote_string(tok: str) -> tuple:
    out, i, body = [], 0, tok[1:-1]
    while i < len(body):
        c = body[i]
        if c == "\\":
            ch = _UNESCAPES.get(body[i + 1])
            if ch is None:
                raise ExprSyntaxError(f"bad escape in {tok}")
            out.append(ch)
            i += 2
        else:
            out.append(c)
            i += 1
    return tuple(out)


class _Parser:
    """Recursive-descent parser with unification-based type inference; node
    types may be type variables until the final grounding pass."""

    def __init__(self, toks: list[str], scope: dict[str, SemType]):
        self.toks = toks
        self.pos = 0
        self.scope = scope
        self.reg = register_all()
        self.subst: dict[str, SemType] = {}
        self.fresh = 0

    def fresh_var(self) -> VarT:
        self.fresh += 1
        return VarT(f"?{self.fresh}")

    def peek(self) -> Optional[str]:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ExprSyntaxError("unexpected end of expression")
        self.pos += 1
        return tok

    def expect(self, tok: str):
        got = self.take()
        if got != tok:
            raise ExprSyntaxError(f"expected {tok!r}, got {got!r}")

    def unify_types(self, t1: SemType, t2: SemType, what: str):
        s = unify(t1, t2, self.subst)
        if s is None:
            raise ExprSyntaxError(
                f"type mismatch in {what}: {format_type(apply_subst(self.subst, t1))}"
                f" vs {format_type(apply_subst(self.subst, t2))}"
            )
        self.subst = s

    # expression := application | atom
    def parse_expr(self) -> tuple:
        head = self.peek()
        if head is not None and _is_ident(head) and head not in self.scope:
            prim = self.reg.get(head)
            if prim is not None:
                self.take()
                args = []
                while self._at_atom():
                    args.append(self.parse_atom())
                return self._apply_prim(head, args)
        return self.parse_atom()

    def _at_atom(self) -> bool:
        tok = self.peek()
        if tok is None or tok in (")", "]", ","):
            return False
        return tok not in (":", "=", "->", "\\")

    def _apply_prim(self, name: str, args: list) -> tuple:
        prim = self.reg[name]
        if len(args) > prim.arity:
            raise ExprSyntaxError(f"{name} takes {prim.arity} args, got {len(args)}")
        params, ret = prim.fresh_signature()
        for (node, t), p in zip(args, params):
            self.unify_types(p, t, f"argument of {name}")
        if len(args) == prim.arity:
            return (("app", name, [n for n, _ in args], ret), ret)
        out = ret
        for p in reversed(params[len(args):]):
            out = FunT(p, out)
        return (("partial", name, [n for n, _ in args], out), out)

    def parse_atom(self) -> tuple:
        tok = self.take()
        if tok == "(":
            first = self.parse_expr()
            if self.peek() == ",":
                self.take()
                second = self.parse_expr()
                self.expect(")")
                t = PairT(first[1], second[1])
                return (("pair", first[0], second[0], t), t)
            self.expect(")")
            return first
        if tok == "[":
            elems = []
            if self.peek() != "]":
                elems.append(self.parse_expr())
                while self.peek() == ",":
                    self.take()
                    elems.append(self.parse_expr())
            self.expect("]")
            ev = self.fresh_var()
            for _, t in elems:
                self.unify_types(ev, t, "list literal")
            t = ListT(ev)
            return (("list", [n for n, _ in elems], t), t)
        if _is_ident(tok):
            if tok == "True":
                return (("const", True, BOOL), BOOL)
            if tok == "False":
                return (("const", False, BOOL), BOOL)
            if tok in self.scope:
                t = self.scope[tok]
                return (("var", tok, t), t)
            prim = self.reg.get(tok)
            if prim is not None:
                return self._apply_prim(tok, [])
            raise ExprSyntaxError(f"unknown name {tok!r}")
        if tok.startswith("'"):
            return (("const", _unquote_char(tok), CHAR), CHAR)
        if tok.startswith('"'):
            t = ListT(CHAR)
            return (("const", _unquote_string(tok), t), t)
        if re.fullmatch(r"-?\d+", tok):
            return (("const", int(tok), INT), INT)
        if re.fullmatch(r"-?\d[\d.eE+-]*", tok):
            return (("const", float(tok), FLOAT), FLOAT)
        raise ExprSyntaxError(f"unexpected token {tok!r}")

    def finalize(self, node) -> Expr:
        kind = node[0]
        if kind == "var":
            return Var(node[1], self.ground(node[2]))
        if kind == "const":
            return Const(node[1], self.ground(node[2]))
        if kind == "app":
            return App(node[1], tuple(self.finalize(a) for a in node[2]), self.ground(node[3]))
        if kind == "partial":
            return PartialApp(node[1], tuple(self.finalize(a) for a in node[2]), self.ground(node[3]))
        if kind == "pair":
            fst = self.finalize(node[1])
            snd = self.finalize(node[2])
            return Const((_const_value(fst), _const_value(snd)), PairT(fst.type, snd.type))
        if kind == "list":
            elems = [self.finalize(e) for e in node[1]]
            t = self.ground(node[2])
            return Const(tuple(_const_value(e) for e in elems), t)
        raise AssertionError(kind)

    def ground(self, t: SemType) -> SemType:
        t = apply_subst(self.subst, t)
        if has_vars(t):
            # only empty-list element types can stay unconstrained, and an
            # empty list behaves identically at every element type
            t = _default_vars(t)
        return t


def _default_vars(t: SemType) -> SemType:
    from .types import subterms

    return apply_subst({v.name: INT for v in subterms(t) if isinstance(v, VarT)}, t)


def _const_value(e: Expr):
    if not isinstance(e, Const):
        raise ExprSyntaxError("pair and list literals must contain constants")
    return e.value


def _is_ident(tok: str) -> bool:
    return bool(re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok))


def parse_expr(
    text: str, scope: dict[str, SemType], expected: Optional[SemType] = None
) -> Expr:
    toks = text if isinstance(text, list) else tokenize(text)
    p = _Parser(toks, scope)
    node, t = p.parse_expr()
    if p.pos != len(p.toks):
        raise ExprSyntaxError(f"trailing tokens: {' '.join(p.toks[p.pos:])}")
    if expected is not None:
        p.unify_types(t, expected, "slot result")
    return p.finalize(node)


# -- scaffold programs -------------------------------------------------------

# template token streams; «n» marks slot n (1-based)
_TEMPLATES = {
    PatternKind.NO_SCHEME: "f ARGS = «1»",
    PatternKind.CATA: (
        "f ARGS = cata alg arg0 where "
        "alg INil = «1» "
        "alg ( ICons i x acc ) = «2»"
    ),
    PatternKind.CURRIED_CATA: (
        "f ARGS = cata alg arg0 arg1 where "
        "alg INil = \\ ys -> «1» "
        "alg ( ICons i x f ) = \\ ys -> «2»"
    ),
    PatternKind.ANA: (
        "f ARGS = ana coalg «1» where "
        "coalg seed = if «2» then [ ] else «3» : «4»"
    ),
    PatternKind.ACCU: (
        "f ARGS = accu st alg arg0 «1» where "
        "st [ ] s = [ ] "
        "st ( x : xs ) s = x : ( xs , «2» ) "
        "alg [ ] s = «3» "
        "alg ( x : acc ) s = «4»"
    ),
    PatternKind.HYLO: (
        "f ARGS = hylo alg coalg arg0 where "
        "coalg seed = if «1» then [ ] else «2» : «3» "
        "alg [ ] = «4» "
        "alg ( x : acc ) = «5»"
    ),
}

_LAYOUT = {
    PatternKind.NO_SCHEME: "f {args} = {s1}",
    PatternKind.CATA: (
        "f {args} = cata alg arg0\n"
        "  where\n"
        "    alg INil = {s1}\n"
        "    alg (ICons i x acc) = {s2}"
    ),
    PatternKind.CURRIED_CATA: (
        "f {args} = cata alg arg0 arg1\n"
        "  where\n"
        "    alg INil = \\ys -> {s1}\n"
        "    alg (ICons i x f) = \\ys -> {s2}"
    ),
    PatternKind.ANA: (
        "f {args} = ana coalg {s1}\n"
        "  where\n"
        "    coalg seed = if {s2} then [] else {s3} : {s4}"
    ),
    PatternKind.ACCU: (
        "f {args} = accu st alg arg0 {s1}\n"
        "  where\n"
        "    st [] s = []\n"
        "    st (x : xs) s = x : (xs, {s2})\n"
        "    alg [] s = {s3}\n"
        "    alg (x : acc) s = {s4}"
    ),
    PatternKind.HYLO: (
        "f {args} = hylo alg coalg arg0\n"
        "  where\n"
        "    coalg seed = if {s1} then [] else {s2} : {s3}\n"
        "    alg [] = {s4}\n"
        "    alg (x : acc) = {s5}"
    ),
}


def format_scaffold(inst: PatternInstance, slot_exprs: Sequence[Expr]) -> str:
    """Scaffold text with the slots inlined; slots render parenthesized
    unless atomic so the text re-parses unambiguously."""
    args = " ".join(f"arg{i}" for i in range(len(inst.signature.arg_types)))
    fields = {"args": args}
    for spec, e in zip(inst.slots, slot_exprs):
        fields[f"s{spec.slot_index}"] = _atom(e)
    return _LAYOUT[inst.kind].format(**fields)


def parse_scaffold(text: str, inst: PatternInstance) -> list[Expr]:
    """Recovers the slot expressions from scaffold text, typed and checked
    against the instance's slot specs."""
    toks = tokenize(text)
    template = _TEMPLATES[inst.kind].split()
    n_args = len(inst.signature.arg_types)
    fixed: list[str] = []
    for t in template:
        if t == "ARGS":
            fixed.extend(f"arg{i}" for i in range(n_args))
        else:
            fixed.append(t)

    spans: dict[int, list[str]] = {}
    pos = 0
    i = 0
    while i < len(fixed):
        ft = fixed[i]
        if ft.startswith("«"):
            slot_no = int(ft[1:-1])
            stop = fixed[i + 1] if i + 1 < len(fixed) else None
            depth = 0
            span: list[str] = []
            while pos < len(toks):
                tok = toks[pos]
                if depth == 0 and tok == stop:
                    break
                if tok in "([":
                    depth += 1
                elif tok in ")]":
                    if depth == 0:
                        break
                    depth -= 1
                span.append(tok)
                pos += 1
            if stop is None and pos != len(toks):
                raise ExprSyntaxError("trailing scaffold tokens")
            if not span:
                raise ExprSyntaxError(f"empty slot {slot_no}")
            spans[slot_no] = span
            i += 1
        else:
            if pos >= len(toks) or toks[pos] != ft:
                got = toks[pos] if pos < len(toks) else "<end>"
                raise ExprSyntaxError(f"scaffold mismatch: expected {ft!r}, got {got!r}")
            pos += 1
            i += 1
    if pos != len(toks):
        raise ExprSyntaxError("trailing text after scaffold")

    out = []
    for spec in inst.slots:
        span = spans[spec.slot_index]
        out.append(parse_expr(span, spec.scope_types(), spec.out_type))
    return out


def format_champion(
    problem: str, inst: PatternInstance, slot_exprs: Sequence[Expr], seed: Optional[int] = None
) -> str:
    lines = [f"-- problem: {problem}", f"-- pattern: {inst.kind.label}"]
    if inst.unbound_type is not None:
        lines.append(f"-- unbound: {format_type(inst.unbound_type)}")
    if seed is not None:
        lines.append(f"-- seed: {seed}")
    lines.append(format_scaffold(inst, slot_exprs))
    return "\n".join(lines) + "\n"


def parse_champion_header(text: str) -> tuple[dict, str]:
    """Splits a champion file into its header fields and the scaffold body."""
    meta: dict[str, str] = {}
    body_lines = []
    for line in text.splitlines():
        m = re.match(r"\s*--\s*(\w+)\s*:\s*(.+?)\s*$", line)
        if m and not body_lines:
            meta[m.group(1)] = m.group(2)
        elif line.strip():
            body_lines.append(line)
    out: dict[str, object] = dict(meta)
    if "pattern" in meta:
        out["pattern"] = PatternKind.from_label(meta["pattern"])
    if "unbound" in meta:
        out["unbound"] = parse_type(meta["unbound"])
    if "seed" in meta:
        out["seed"] = int(meta["seed"])
    return out, "\n".join(body_lines)
