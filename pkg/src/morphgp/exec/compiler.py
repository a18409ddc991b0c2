"""Flattens typed expression trees into the engines' instruction triples.

`if` becomes a conditional jump so only the taken branch runs; everything
else is a post-order stack program.  Compiled slots are immutable and cheap
to build (compilation happens once per individual per evaluation).
"""
from __future__ import annotations

from array import array

from ..expr import App, Const, Expr, PartialApp, Var
from . import opcodes as oc


class Compiled:
    """One slot's executable form: instruction triples + constant pool."""

    __slots__ = ("code", "consts", "scope_len", "max_stack")

    def __init__(self, code: array, consts: tuple, scope_len: int, max_stack: int):
        self.code = code
        self.consts = consts
        self.scope_len = scope_len
        self.max_stack = max_stack


class _Emitter:
    def __init__(self, scope_names):
        self.var_index = {n: i for i, n in enumerate(scope_names)}
        self.code: list[int] = []
        self.consts: list = []

    def n_instr(self) -> int:
        return len(self.code) // 3

    def emit(self, op: int, a: int = 0, b: int = 0) -> int:
        self.code.extend((op, a, b))
        return self.n_instr() - 1

    def patch(self, at: int, a: int):
        self.code[3 * at + 1] = a

    def const_id(self, value) -> int:
        self.consts.append(value)
        return len(self.consts) - 1

    def walk(self, e: Expr):
        if isinstance(e, Var):
            self.emit(oc.OP_LOAD_VAR, self.var_index[e.name])
        elif isinstance(e, Const):
            self.emit(oc.OP_LOAD_CONST, self.const_id(e.value))
        elif isinstance(e, App):
            prim_idx = oc.PRIM_INDEX[e.prim]
            if prim_idx == oc.P_IF:
                cond, then, alt = e.args
                self.walk(cond)
                jf = self.emit(oc.OP_JF)
                self.walk(then)
                jmp = self.emit(oc.OP_JMP)
                self.patch(jf, self.n_instr())
                self.walk(alt)
                self.patch(jmp, self.n_instr())
            else:
                for a in e.args:
                    self.walk(a)
                self.emit(oc.OP_CALL, prim_idx, len(e.args))
        elif isinstance(e, PartialApp):
            for a in e.supplied:
                self.walk(a)
            self.emit(oc.OP_MK_PARTIAL, oc.PRIM_INDEX[e.prim], len(e.supplied))
        else:
            raise TypeError(f"cannot compile {e!r}")


def compile_expr(e: Expr, scope_names) -> Compiled:
    em = _Emitter(scope_names)
    em.walk(e)
    # stack never grows past one entry per node along a root path; the tree
    # depth bound keeps this tiny, but compute the true high-water mark
    depth, high = 0, 0
    code = em.code
    for i in range(0, len(code), 3):
        op = code[i]
        if op in (oc.OP_LOAD_VAR, oc.OP_LOAD_CONST):
            depth += 1
        elif op == oc.OP_CALL:
            depth += 1 - code[i + 2]
        elif op == oc.OP_MK_PARTIAL:
            depth += 1 - code[i + 2] if code[i + 2] else 1
        elif op == oc.OP_JF:
            depth -= 1
        high = max(high, depth)
    return Compiled(array("q", code), tuple(em.consts), len(em.var_index), high)
