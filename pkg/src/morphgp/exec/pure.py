"""Pure-Python evaluation engine: bytecode interpreter, scheme drivers,
budgets and fitness scoring.

This is the reference semantics; the native engine mirrors it instruction for
instruction and the test suite holds the two to byte-identical outcomes.

Budget rule: every primitive application debits its cost before the evaluator
runs; list-building primitives debit 1 up front and their output length after
(replicate/enumFromThenTo check the planned length *before* allocating).  A
debit that cannot be covered halts evaluation on the spot.  Each slot
application starts with a fresh per-iteration allowance while the per-case
allowance persists; nested closure applications inside a slot share the
enclosing application's allowance -- that is what catches the CurriedCata
fork bomb.
"""
from __future__ import annotations

from ..primitives import (
    CONVERSION_ERROR,
    DIV_BY_ZERO,
    EMPTY_STRUCTURE,
    OVERFLOW,
    PrimError,
    enum_length,
)
from ..expr import sort_map_items
from . import opcodes as oc
from .compiler import Compiled

NAME = "pure"

FAIL_PENALTY = 1e6

_KIND_STATUS = {
    DIV_BY_ZERO: oc.ST_DIV0,
    EMPTY_STRUCTURE: oc.ST_EMPTY,
    CONVERSION_ERROR: oc.ST_CONV,
    OVERFLOW: oc.ST_OVERFLOW,
}


class EngineError(Exception):
    def __init__(self, status: int):
        self.status = status


class Closure:
    """A one-argument function value capturing a compiled slot body and its
    environment prefix; applying appends the argument."""

    __slots__ = ("compiled", "captured")

    def __init__(self, compiled: Compiled, captured: tuple):
        self.compiled = compiled
        self.captured = captured


class Partial:
    """A primitive with a proper prefix of its arguments supplied."""

    __slots__ = ("prim", "args")

    def __init__(self, prim: int, args: tuple):
        self.prim = prim
        self.args = args


def make_closure(compiled: Compiled, captured: tuple) -> Closure:
    return Closure(compiled, captured)


def _debit(budget: list, cost: int):
    it = budget[0] - cost
    gl = budget[1] - cost
    if it < 0:
        budget[0] = 0
        budget[1] = gl if gl > 0 else 0
        raise EngineError(oc.ST_PER_ITER)
    if gl < 0:
        budget[0] = it
        budget[1] = 0
        raise EngineError(oc.ST_BUDGET)
    budget[0] = it
    budget[1] = gl


def _call_prim(prim: int, args: tuple, budget: list):
    """Debits and runs one primitive application (shared by OP_CALL, partial
    completion and insertWith's collision function)."""
    if prim == oc.P_REPLICATE:
        n = args[0] if args[0] > 0 else 0
        _debit(budget, 1 + n)
        return (args[1],) * n
    if prim == oc.P_ENUMFTT:
        n = enum_length(args[0], args[1], args[2])
        _debit(budget, 1 + n)
        step = args[1] - args[0]
        return tuple(args[0] + i * step for i in range(n))
    _debit(budget, 1)
    if prim == oc.P_APPLY:
        return apply_value(args[0], args[1], budget)
    if prim == oc.P_INSERTWITH:
        fv, k, v, m = args
        for i, (k2, old) in enumerate(m):
            if k2 == k:
                merged = apply_value(fv, (v, old), budget)
                return m[:i] + ((k, merged),) + m[i + 1 :]
        return sort_map_items(m + ((k, v),))
    try:
        result = oc.EVALUATORS[prim](args)
    except PrimError as exc:
        raise EngineError(_KIND_STATUS[exc.kind]) from None
    if oc.VAR_COST[prim]:
        if prim == oc.P_SPLITAT:
            _debit(budget, len(result[0]) + len(result[1]))
        else:
            _debit(budget, len(result))
    return result


def apply_value(fv, arg, budget: list):
    """Applies a function value under the *current* budget (no reset)."""
    if type(fv) is Closure:
        c = fv.compiled
        return run_code(c, list(fv.captured) + [arg], budget)
    if type(fv) is Partial:
        args = fv.args + (arg,)
        if len(args) == oc.ARITY[fv.prim]:
            return _call_prim(fv.prim, args, budget)
        return Partial(fv.prim, args)
    raise TypeError(f"not a function value: {fv!r}")


def run_code(compiled: Compiled, env: list, budget: list):
    """Executes one compiled slot body; returns the value or raises
    EngineError with the failure status."""
    code = compiled.code
    consts = compiled.consts
    stack = []
    push = stack.append
    pc = 0
    n = len(code) // 3
    while pc < n:
        i = 3 * pc
        op = code[i]
        if op == 1:  # OP_LOAD_VAR
            push(env[code[i + 1]])
            pc += 1
        elif op == 2:  # OP_LOAD_CONST
            push(consts[code[i + 1]])
            pc += 1
        elif op == 3:  # OP_CALL
            arity = code[i + 2]
            args = tuple(stack[-arity:])
            del stack[-arity:]
            push(_call_prim(code[i + 1], args, budget))
            pc += 1
        elif op == 4:  # OP_JF: the `if` debits its cost at branch selection
            _debit(budget, 1)
            pc = code[i + 1] if not stack.pop() else pc + 1
        elif op == 5:  # OP_JMP
            pc = code[i + 1]
        else:  # OP_MK_PARTIAL
            k = code[i + 2]
            if k:
                args = tuple(stack[-k:])
                del stack[-k:]
            else:
                args = ()
            push(Partial(code[i + 1], args))
            pc += 1
    return stack[-1]


def eval_expr(compiled: Compiled, env, ops_budget: int):
    """Standalone expression evaluation under a single counter.
    Returns (status, value-or-None, remaining_ops)."""
    budget = [ops_budget, ops_budget]
    try:
        value = run_code(compiled, list(env), budget)
    except EngineError as exc:
        st = oc.ST_BUDGET if exc.status == oc.ST_PER_ITER else exc.status
        return st, None, budget[1]
    return oc.ST_OK, value, budget[1]


def apply_fun(fv, arg, ops_budget: int):
    """Standalone function-value application; same contract as eval_expr."""
    budget = [ops_budget, ops_budget]
    try:
        value = apply_value(fv, arg, budget)
    except EngineError as exc:
        st = oc.ST_BUDGET if exc.status == oc.ST_PER_ITER else exc.status
        return st, None, budget[1]
    return oc.ST_OK, value, budget[1]


def _slot(slots, idx, env, budget, per_iter):
    budget[0] = per_iter
    return run_code(slots[idx], env, budget)


def run_case(kind: int, slots, args: tuple, limits) -> tuple[int, object]:
    """Executes one scaffold on one input row.
    limits = (iter_cap, per_iteration_ops, per_case_ops)."""
    iter_cap, per_iter, global_ops = limits
    budget = [per_iter, global_ops]
    args = tuple(args)
    try:
        if kind == oc.K_NOSCHEME:
            return oc.ST_OK, _slot(slots, 0, list(args), budget, per_iter)

        if kind == oc.K_CATA:
            lst = args[0]
            acc = _slot(slots, 0, [], budget, per_iter)
            for i in range(len(lst) - 1, -1, -1):
                acc = _slot(slots, 1, [i, lst[i], acc, *args], budget, per_iter)
            return oc.ST_OK, acc

        if kind == oc.K_CURRIED:
            lst = args[0]
            f = Closure(slots[0], ())
            for i in range(len(lst) - 1, -1, -1):
                f = Closure(slots[1], (i, lst[i], f))
            budget[0] = per_iter
            return oc.ST_OK, apply_value(f, args[1], budget)

        if kind == oc.K_ANA:
            seed = _slot(slots, 0, list(args), budget, per_iter)
            out = []
            while True:
                if _slot(slots, 1, [seed, *args], budget, per_iter):
                    return oc.ST_OK, tuple(out)
                if len(out) == iter_cap:
                    return oc.ST_ITER_CAP, None
                out.append(_slot(slots, 2, [seed, *args], budget, per_iter))
                seed = _slot(slots, 3, [seed], budget, per_iter)

        if kind == oc.K_ACCU:
            lst = args[0]
            s = _slot(slots, 0, list(args), budget, per_iter)
            states = [s]
            for i, x in enumerate(lst):
                s = _slot(slots, 1, [x, lst[i + 1 :], s, *args], budget, per_iter)
                states.append(s)
            acc = _slot(slots, 2, [states[-1], *args], budget, per_iter)
            for i in range(len(lst) - 1, -1, -1):
                acc = _slot(slots, 3, [lst[i], acc, states[i], *args], budget, per_iter)
            return oc.ST_OK, acc

        if kind == oc.K_HYLO:
            seed = args[0]
            xs = []
            while True:
                if _slot(slots, 0, [seed, *args], budget, per_iter):
                    break
                if len(xs) == iter_cap:
                    return oc.ST_ITER_CAP, None
                xs.append(_slot(slots, 1, [seed, *args], budget, per_iter))
                seed = _slot(slots, 2, [seed, *args], budget, per_iter)
            acc = _slot(slots, 3, [], budget, per_iter)
            for i in range(len(xs) - 1, -1, -1):
                acc = _slot(slots, 4, [xs[i], acc, *args], budget, per_iter)
            return oc.ST_OK, acc
    except EngineError as exc:
        return exc.status, None
    raise ValueError(f"unknown scheme kind {kind}")


def _lev(a: tuple, b: tuple) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, 1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb))
        prev = cur
    return prev[-1]


def score_value(metric, expected, actual) -> float:
    """Per-case error of an Ok value, capped at the failure penalty so a
    wrong-but-running program never scores worse than a crash."""
    m = metric[0]
    if m == oc.M_INT:
        d = expected - actual
        raw = float(min(d if d >= 0 else -d, 10**6))
    elif m == oc.M_FLOAT:
        d = abs(expected - actual)
        raw = FAIL_PENALTY if d != d else d  # NaN-safe
    elif m == oc.M_BOOL:
        raw = 0.0 if expected == actual else 1.0
    elif m == oc.M_LEV:
        raw = float(_lev(expected, actual))
    elif m == oc.M_SEQNUM:
        penalty = metric[1]
        raw = penalty * abs(len(expected) - len(actual))
        for e, a in zip(expected, actual):
            d = abs(e - a)
            raw += 10**6 if d != d or d > 10**6 else d
    elif m == oc.M_PAIR:
        raw = score_value(metric[1], expected[0], actual[0]) + score_value(
            metric[2], expected[1], actual[1]
        )
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return raw if raw < FAIL_PENALTY else FAIL_PENALTY


def run_fitness(kind: int, slots, cases, metric, limits) -> tuple[float, int]:
    """Total error over the cases plus the count of zero-error cases.
    A per-iteration overrun aborts the individual: the offending case and
    every remaining case contribute the failure penalty."""
    total = 0.0
    n_zero = 0
    n = len(cases)
    for idx in range(n):
        args, expected = cases[idx]
        status, value = run_case(kind, slots, args, limits)
        if status == oc.ST_OK:
            sc = score_value(metric, expected, value)
        elif status == oc.ST_PER_ITER:
            total += FAIL_PENALTY * (n - idx)
            return total, n_zero
        else:
            sc = FAIL_PENALTY
        total += sc
        if sc == 0.0:
            n_zero += 1
    return total, n_zero
