"""Shared instruction set, status codes and primitive numbering.

Single source of truth for both engines: the pure-Python engine imports these
names, and setup.py generates a .pxi header from constant_table() so the
native engine compiles against the same numbers.
"""
from __future__ import annotations

from ..primitives import register_all

# instructions (one triple per instruction: op, a, b)
OP_LOAD_VAR = 1    # push env[a]
OP_LOAD_CONST = 2  # push consts[a]
OP_CALL = 3        # a = prim index, b = arity: pop args, push result
OP_JF = 4          # debit the `if` cost, pop condition, jump to a when false
OP_JMP = 5         # jump to a
OP_MK_PARTIAL = 6  # a = prim index, b = supplied count: pop args, push partial

# evaluation statuses
ST_OK = 0
ST_DIV0 = 1
ST_EMPTY = 2
ST_CONV = 3
ST_OVERFLOW = 4
ST_BUDGET = 5      # per-case weighted-operation budget exhausted
ST_PER_ITER = 6    # one slot application exceeded its own budget
ST_ITER_CAP = 7    # unfold produced more than the iteration cap

# scheme kinds (driver selectors)
K_NOSCHEME = 0
K_CATA = 1
K_CURRIED = 2
K_ANA = 3
K_ACCU = 4
K_HYLO = 5

# fitness metrics
M_INT = 0
M_FLOAT = 1
M_BOOL = 2
M_LEV = 3
M_SEQNUM = 4
M_PAIR = 5

_REG = register_all()

PRIM_INDEX: dict[str, int] = {p.id: i for i, p in enumerate(_REG.ordered)}
PRIM_NAMES: tuple[str, ...] = tuple(p.id for p in _REG.ordered)
ARITY: tuple[int, ...] = tuple(p.arity for p in _REG.ordered)
VAR_COST: tuple[bool, ...] = tuple(p.var_cost for p in _REG.ordered)
EVALUATORS = tuple(p.fn for p in _REG.ordered)

P_IF = PRIM_INDEX["if"]
P_APPLY = PRIM_INDEX["apply"]
P_INSERTWITH = PRIM_INDEX["insertWith"]
P_REPLICATE = PRIM_INDEX["replicate"]
P_ENUMFTT = PRIM_INDEX["enumFromThenTo"]
P_SPLITAT = PRIM_INDEX["splitAt"]


def constant_table() -> list[tuple[str, int]]:
    """(name, value) pairs for the generated native header."""
    out = [
        (n, v)
        for n, v in globals().items()
        if n.startswith(("OP_", "ST_", "K_", "M_")) and isinstance(v, int)
    ]
    for name, idx in PRIM_INDEX.items():
        out.append((f"PRIM_{name.upper()}", idx))
    out.append(("N_PRIMS", len(PRIM_NAMES)))
    return out
