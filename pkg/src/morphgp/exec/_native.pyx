# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Native evaluation engine: same bytecode, drivers, budgets and scoring as
exec/pure.py, with C-level dispatch and unboxed fast paths for the hot
primitives.  Held to byte-identical outcomes by the cross-engine tests."""

include "_opcodes.pxi"

from cpython.list cimport PyList_GET_ITEM, PyList_GET_SIZE
from cpython.tuple cimport PyTuple_GET_ITEM, PyTuple_GET_SIZE, PyTuple_New, PyTuple_SET_ITEM
from cpython.ref cimport Py_INCREF
from cpython.mem cimport PyMem_Malloc, PyMem_Free
from libc.math cimport fabs, isnan, isfinite, nearbyint
from libc.math cimport sqrt as c_sqrt, sin as c_sin, cos as c_cos, floor as c_floor, ceil as c_ceil

cdef extern from *:
    bint __builtin_add_overflow(long long, long long, long long*)
    bint __builtin_sub_overflow(long long, long long, long long*)
    bint __builtin_mul_overflow(long long, long long, long long*)

from . import opcodes as _oc
from ..primitives import PrimError as _PrimError, enum_length as _enum_length
from ..expr import sort_map_items as _sort_map_items

NAME = "native"

FAIL_PENALTY = 1e6

cdef double _PENALTY = 1e6
cdef long long _INT_CAP = 1000000

# python-side tables for the generic fallback path
cdef tuple _EVALS = _oc.EVALUATORS
cdef tuple _VCOST = tuple(1 if v else 0 for v in _oc.VAR_COST)

cdef int _ARITY[128]
assert len(_oc.ARITY) <= 128
for _i, _a in enumerate(_oc.ARITY):
    _ARITY[_i] = _a

_KIND_STATUS = {
    "DivByZero": ST_DIV0,
    "EmptyStructure": ST_EMPTY,
    "ConversionError": ST_CONV,
    "Overflow": ST_OVERFLOW,
}


class EngineError(Exception):
    def __init__(self, status):
        self.status = status


cdef class NSlot:
    """Native view of one compiled slot."""
    cdef long long[::1] code
    cdef tuple consts
    cdef int n_instr
    cdef int max_stack

    def __init__(self, compiled):
        self.code = compiled.code
        self.consts = compiled.consts
        self.n_instr = len(compiled.code) // 3
        self.max_stack = compiled.max_stack if compiled.max_stack > 0 else 1


cdef class Closure:
    cdef NSlot slot
    cdef tuple captured

    def __init__(self, NSlot slot, tuple captured):
        self.slot = slot
        self.captured = captured


cdef class Partial:
    cdef int prim
    cdef tuple args

    def __init__(self, int prim, tuple args):
        self.prim = prim
        self.args = args


def make_closure(compiled, tuple captured):
    return Closure(NSlot(compiled), captured)


cdef inline int debit(long long* bud, long long c) noexcept:
    cdef long long it = bud[0] - c
    cdef long long gl = bud[1] - c
    if it < 0:
        bud[0] = 0
        bud[1] = gl if gl > 0 else 0
        return ST_PER_ITER
    if gl < 0:
        bud[0] = it
        bud[1] = 0
        return ST_BUDGET
    bud[0] = it
    bud[1] = gl
    return 0


cdef inline object _box_bool(bint v):
    return True if v else False


cdef object call_prim(int prim, list stack, Py_ssize_t* sp, long long* bud, int* status):
    """Debits and runs one primitive; arguments are on the stack.  Returns
    the result or None with *status set."""
    cdef long long ia, ib, ic, r, n, step, i
    cdef double da, db
    cdef Py_ssize_t k, ln
    cdef object oa, ob, oc_, od, res
    cdef tuple ta, tb
    cdef Py_UCS4 ch
    cdef int st

    # list builders with a priori length: check before allocating
    if prim == PRIM_REPLICATE:
        sp[0] -= 2
        oa = <object>PyList_GET_ITEM(stack, sp[0])
        ob = <object>PyList_GET_ITEM(stack, sp[0] + 1)
        ia = oa
        n = ia if ia > 0 else 0
        st = debit(bud, 1 + n)
        if st:
            status[0] = st
            return None
        res = PyTuple_New(n)
        for i in range(n):
            Py_INCREF(ob)
            PyTuple_SET_ITEM(res, i, ob)
        return res
    if prim == PRIM_ENUMFROMTHENTO:
        sp[0] -= 3
        oa = <object>PyList_GET_ITEM(stack, sp[0])
        ob = <object>PyList_GET_ITEM(stack, sp[0] + 1)
        oc_ = <object>PyList_GET_ITEM(stack, sp[0] + 2)
        n = _enum_length(oa, ob, oc_)
        st = debit(bud, 1 + n)
        if st:
            status[0] = st
            return None
        res = PyTuple_New(n)
        if n > 0:
            ia = oa
            step = (<long long>ob - ia) if n > 1 else 0
            for i in range(n):
                od = ia + i * step
                Py_INCREF(od)
                PyTuple_SET_ITEM(res, i, od)
        return res

    st = debit(bud, 1)
    if st:
        status[0] = st
        return None

    # int arithmetic block
    if prim <= PRIM_PREDINT:
        if prim >= PRIM_ABSINT:  # absInt succInt predInt
            sp[0] -= 1
            ia = <object>PyList_GET_ITEM(stack, sp[0])
            if prim == PRIM_ABSINT:
                if ia == (-9223372036854775807 - 1):
                    status[0] = ST_OVERFLOW
                    return None
                return ia if ia >= 0 else -ia
            if prim == PRIM_SUCCINT:
                if __builtin_add_overflow(ia, 1, &r):
                    status[0] = ST_OVERFLOW
                    return None
            else:
                if __builtin_sub_overflow(ia, 1, &r):
                    status[0] = ST_OVERFLOW
                    return None
            return r
        sp[0] -= 2
        ia = <object>PyList_GET_ITEM(stack, sp[0])
        ib = <object>PyList_GET_ITEM(stack, sp[0] + 1)
        if prim == PRIM_ADDINT:
            if __builtin_add_overflow(ia, ib, &r):
                status[0] = ST_OVERFLOW
                return None
            return r
        if prim == PRIM_SUBINT:
            if __builtin_sub_overflow(ia, ib, &r):
                status[0] = ST_OVERFLOW
                return None
            return r
        if prim == PRIM_MULTINT:
            if __builtin_mul_overflow(ia, ib, &r):
                status[0] = ST_OVERFLOW
                return None
            return r
        if prim == PRIM_MININT:
            return ia if ia <= ib else ib
        if prim == PRIM_MAXINT:
            return ia if ia >= ib else ib
        # division family
        if ib == 0:
            if prim == PRIM_REMINT:
                status[0] = ST_DIV0  # rem via quot: same zero-divisor error
                return None
            status[0] = ST_DIV0
            return None
        if ib == -1 and ia == (-9223372036854775807 - 1):
            if prim == PRIM_REMINT or prim == PRIM_MODINT:
                return 0
            status[0] = ST_OVERFLOW  # divInt/quotInt overflow at INT_MIN / -1
            return None
        r = ia / ib  # C division truncates
        if prim == PRIM_QUOTINT:
            return r
        if prim == PRIM_REMINT:
            return ia - r * ib
        # floor semantics for divInt/modInt
        if (ia % ib != 0) and ((ia < 0) != (ib < 0)):
            r -= 1
        if prim == PRIM_DIVINT:
            return r
        return ia - r * ib  # PRIM_MODINT

    # float block
    if prim <= PRIM_PREDFLOAT:
        if prim >= PRIM_ABSFLOAT:
            sp[0] -= 1
            da = <object>PyList_GET_ITEM(stack, sp[0])
            if prim == PRIM_ABSFLOAT:
                return fabs(da)
            if prim == PRIM_SQRT:
                return c_sqrt(da) if da >= 0.0 else float("nan")
            if prim == PRIM_SIN:
                return c_sin(da)
            if prim == PRIM_COS:
                return c_cos(da)
            if prim == PRIM_SUCCFLOAT:
                return da + 1.0
            return da - 1.0
        sp[0] -= 2
        da = <object>PyList_GET_ITEM(stack, sp[0])
        db = <object>PyList_GET_ITEM(stack, sp[0] + 1)
        if prim == PRIM_ADDFLOAT:
            return da + db
        if prim == PRIM_SUBFLOAT:
            return da - db
        if prim == PRIM_MULTFLOAT:
            return da * db
        if prim == PRIM_DIVFLOAT:
            if db == 0.0:
                status[0] = ST_DIV0
                return None
            return da / db
        if prim == PRIM_MINFLOAT:
            return da if da <= db else db
        return da if da >= db else db

    # conversions
    if prim <= PRIM_ROUND:
        sp[0] -= 1
        oa = <object>PyList_GET_ITEM(stack, sp[0])
        if prim == PRIM_FROMINTEGRAL:
            ia = oa
            return <double>ia
        da = oa
        if prim == PRIM_FLOOR:
            da = c_floor(da)
        elif prim == PRIM_CEILING:
            da = c_ceil(da)
        else:
            da = nearbyint(da)  # ties to even, matching the reference round
        if not isfinite(da) or da >= 9223372036854775808.0 or da < -9223372036854775808.0:
            status[0] = ST_OVERFLOW
            return None
        return <long long>da

    # comparisons
    if prim <= PRIM_LTEINT:
        sp[0] -= 2
        ia = <object>PyList_GET_ITEM(stack, sp[0])
        ib = <object>PyList_GET_ITEM(stack, sp[0] + 1)
        if prim == PRIM_LTINT:
            return _box_bool(ia < ib)
        if prim == PRIM_GTINT:
            return _box_bool(ia > ib)
        if prim == PRIM_GTEINT:
            return _box_bool(ia >= ib)
        return _box_bool(ia <= ib)
    if prim <= PRIM_LTEFLOAT:
        sp[0] -= 2
        da = <object>PyList_GET_ITEM(stack, sp[0])
        db = <object>PyList_GET_ITEM(stack, sp[0] + 1)
        if prim == PRIM_LTFLOAT:
            return _box_bool(da < db)
        if prim == PRIM_GTFLOAT:
            return _box_bool(da > db)
        if prim == PRIM_GTEFLOAT:
            return _box_bool(da >= db)
        return _box_bool(da <= db)

    # boolean connectives and polymorphic equality
    if prim <= PRIM_NEQ:
        if prim == PRIM_NOT:
            sp[0] -= 1
            return _box_bool((<object>PyList_GET_ITEM(stack, sp[0])) is False)
        sp[0] -= 2
        oa = <object>PyList_GET_ITEM(stack, sp[0])
        ob = <object>PyList_GET_ITEM(stack, sp[0] + 1)
        if prim == PRIM_AND:
            return ob if oa is True else oa
        if prim == PRIM_OR:
            return ob if oa is False else oa
        if prim == PRIM_EQ:
            return _box_bool(oa == ob)
        return _box_bool(oa != ob)

    # char and show
    if prim <= PRIM_ISDIGIT:
        sp[0] -= 1
        oa = <object>PyList_GET_ITEM(stack, sp[0])
        if prim == PRIM_CHARTOINT:
            ch = (<str>oa)[0]
            return <long long>ch
        if prim == PRIM_INTTOCHAR:
            ia = oa
            if ia < 0 or ia > 0x10FFFF:
                status[0] = ST_CONV
                return None
            return chr(ia)
        if prim == PRIM_SHOWCHAR:
            return (oa,)
        if prim == PRIM_ISLETTER:
            return _box_bool((<str>oa).isalpha())
        if prim == PRIM_ISSPACE:
            return _box_bool((<str>oa).isspace())
        if prim == PRIM_ISDIGIT:
            return _box_bool((<str>oa).isdigit())
        if prim == PRIM_SHOWINT:
            return tuple(str(oa))
        if prim == PRIM_SHOWFLOAT:
            return tuple(repr(oa))
        return tuple("True") if oa is True else tuple("False")  # showBool

    # list block
    if prim <= PRIM_INTERCALATE:
        if prim == PRIM_LENGTH:
            sp[0] -= 1
            return PyTuple_GET_SIZE(<object>PyList_GET_ITEM(stack, sp[0]))
        if prim == PRIM_CONS or prim == PRIM_SNOC:
            sp[0] -= 2
            oa = <object>PyList_GET_ITEM(stack, sp[0])
            ta = <tuple>PyList_GET_ITEM(stack, sp[0] + 1)
            if prim == PRIM_CONS:
                return (oa,) + ta
            return ta + (oa,)
        if prim == PRIM_ELEM or prim == PRIM_DELETE:
            sp[0] -= 2
            oa = <object>PyList_GET_ITEM(stack, sp[0])
            ta = <tuple>PyList_GET_ITEM(stack, sp[0] + 1)
            if prim == PRIM_ELEM:
                return _box_bool(oa in ta)
            ln = PyTuple_GET_SIZE(ta)
            for k in range(ln):
                if (<object>PyTuple_GET_ITEM(ta, k)) == oa:
                    return ta[:k] + ta[k + 1:]
            return ta
        if prim == PRIM_NULL:
            sp[0] -= 1
            return _box_bool(PyTuple_GET_SIZE(<object>PyList_GET_ITEM(stack, sp[0])) == 0)
        if PRIM_HEAD <= prim <= PRIM_INIT:  # head last tail init
            sp[0] -= 1
            ta = <tuple>PyList_GET_ITEM(stack, sp[0])
            ln = PyTuple_GET_SIZE(ta)
            if ln == 0:
                status[0] = ST_EMPTY
                return None
            if prim == PRIM_HEAD:
                return <object>PyTuple_GET_ITEM(ta, 0)
            if prim == PRIM_LAST:
                return <object>PyTuple_GET_ITEM(ta, ln - 1)
            if prim == PRIM_TAIL:
                return ta[1:]
            return ta[:ln - 1]
        if prim == PRIM_MAPPEND:
            sp[0] -= 2
            ta = <tuple>PyList_GET_ITEM(stack, sp[0])
            tb = <tuple>PyList_GET_ITEM(stack, sp[0] + 1)
            res = ta + tb
            st = debit(bud, PyTuple_GET_SIZE(<tuple>res))
            if st:
                status[0] = st
                return None
            return res
        if prim == PRIM_REVERSE:
            sp[0] -= 1
            ta = <tuple>PyList_GET_ITEM(stack, sp[0])
            res = ta[::-1]
            st = debit(bud, PyTuple_GET_SIZE(<tuple>res))
            if st:
                status[0] = st
                return None
            return res
        if prim == PRIM_ZIP:
            sp[0] -= 2
            ta = <tuple>PyList_GET_ITEM(stack, sp[0])
            tb = <tuple>PyList_GET_ITEM(stack, sp[0] + 1)
            res = tuple(zip(ta, tb))
            st = debit(bud, PyTuple_GET_SIZE(<tuple>res))
            if st:
                status[0] = st
                return None
            return res
        if prim == PRIM_SPLITAT:
            sp[0] -= 2
            oa = <object>PyList_GET_ITEM(stack, sp[0])
            ta = <tuple>PyList_GET_ITEM(stack, sp[0] + 1)
            ia = oa
            ln = PyTuple_GET_SIZE(ta)
            k = 0 if ia < 0 else (ln if ia > <long long>ln else <Py_ssize_t>ia)
            st = debit(bud, ln)
            if st:
                status[0] = st
                return None
            return (ta[:k], ta[k:])
        # intercalate: generic fallback below handles cost after the result
        sp[0] -= 2
        ta = <tuple>PyList_GET_ITEM(stack, sp[0])
        tb = <tuple>PyList_GET_ITEM(stack, sp[0] + 1)
        try:
            res = _EVALS[prim]((ta, tb))
        except _PrimError as exc:
            status[0] = _KIND_STATUS[exc.kind]
            return None
        st = debit(bud, PyTuple_GET_SIZE(<tuple>res))
        if st:
            status[0] = st
            return None
        return res

    # pairs
    if prim <= PRIM_MKPAIR:
        if prim == PRIM_MKPAIR:
            sp[0] -= 2
            oa = <object>PyList_GET_ITEM(stack, sp[0])
            ob = <object>PyList_GET_ITEM(stack, sp[0] + 1)
            return (oa, ob)
        sp[0] -= 1
        ta = <tuple>PyList_GET_ITEM(stack, sp[0])
        return <object>PyTuple_GET_ITEM(ta, 0 if prim == PRIM_FST else 1)

    if prim == PRIM_APPLY:
        sp[0] -= 2
        oa = <object>PyList_GET_ITEM(stack, sp[0])
        ob = <object>PyList_GET_ITEM(stack, sp[0] + 1)
        return apply_value_c(oa, ob, bud, status)

    if prim == PRIM_INSERTWITH:
        sp[0] -= 4
        oa = <object>PyList_GET_ITEM(stack, sp[0])      # function value
        ob = <object>PyList_GET_ITEM(stack, sp[0] + 1)  # key
        oc_ = <object>PyList_GET_ITEM(stack, sp[0] + 2)  # value
        ta = <tuple>PyList_GET_ITEM(stack, sp[0] + 3)   # map
        ln = PyTuple_GET_SIZE(ta)
        for k in range(ln):
            tb = <tuple>PyTuple_GET_ITEM(ta, k)
            if (<object>PyTuple_GET_ITEM(tb, 0)) == ob:
                res = apply_value_c(oa, (oc_, <object>PyTuple_GET_ITEM(tb, 1)), bud, status)
                if status[0]:
                    return None
                return ta[:k] + ((ob, res),) + ta[k + 1:]
        return _sort_map_items(ta + ((ob, oc_),))

    # remaining cold primitives (singleton, insert, fromList) via the tables
    k = _ARITY[prim]
    sp[0] -= k
    ta = PyTuple_New(k)
    for i in range(k):
        oa = <object>PyList_GET_ITEM(stack, sp[0] + i)
        Py_INCREF(oa)
        PyTuple_SET_ITEM(ta, i, oa)
    try:
        res = _EVALS[prim](ta)
    except _PrimError as exc:
        status[0] = _KIND_STATUS[exc.kind]
        return None
    if _VCOST[prim]:
        st = debit(bud, PyTuple_GET_SIZE(<tuple>res))
        if st:
            status[0] = st
            return None
    return res


cdef object call_prim_tuple(int prim, tuple args, long long* bud, int* status):
    cdef list tmp = list(args)
    cdef Py_ssize_t sp = PyList_GET_SIZE(tmp)
    return call_prim(prim, tmp, &sp, bud, status)


cdef object apply_value_c(object fv, object arg, long long* bud, int* status):
    """Function-value application under the current budget (no reset)."""
    cdef Closure cl
    cdef Partial pa
    cdef tuple args
    cdef list env
    if type(fv) is Closure:
        cl = <Closure>fv
        env = list(cl.captured)
        env.append(arg)
        return run_code(cl.slot, env, bud, status)
    if type(fv) is Partial:
        pa = <Partial>fv
        args = pa.args + (arg,)
        if PyTuple_GET_SIZE(args) == _ARITY[pa.prim]:
            return call_prim_tuple(pa.prim, args, bud, status)
        return Partial(pa.prim, args)
    raise TypeError(f"not a function value: {fv!r}")


cdef object run_code(NSlot slot, list env, long long* bud, int* status):
    cdef long long[::1] code = slot.code
    cdef list stack = [None] * slot.max_stack
    cdef Py_ssize_t pc = 0, n = slot.n_instr, sp = 0
    cdef long long op, a
    cdef object v
    cdef int st
    while pc < n:
        op = code[3 * pc]
        a = code[3 * pc + 1]
        if op == OP_LOAD_VAR:
            stack[sp] = <object>PyList_GET_ITEM(env, a)
            sp += 1
            pc += 1
        elif op == OP_LOAD_CONST:
            stack[sp] = <object>PyTuple_GET_ITEM(slot.consts, a)
            sp += 1
            pc += 1
        elif op == OP_CALL:
            v = call_prim(<int>a, stack, &sp, bud, status)
            if status[0]:
                return None
            stack[sp] = v
            sp += 1
            pc += 1
        elif op == OP_JF:
            st = debit(bud, 1)
            if st:
                status[0] = st
                return None
            sp -= 1
            pc = a if (<object>PyList_GET_ITEM(stack, sp)) is False else pc + 1
        elif op == OP_JMP:
            pc = a
        else:  # OP_MK_PARTIAL
            op = code[3 * pc + 2]  # supplied count
            sp -= op
            v = PyTuple_New(op)
            for a in range(op):
                arg = <object>PyList_GET_ITEM(stack, sp + a)
                Py_INCREF(arg)
                PyTuple_SET_ITEM(v, a, arg)
            stack[sp] = Partial(<int>code[3 * pc + 1], <tuple>v)
            sp += 1
            pc += 1
    return <object>PyList_GET_ITEM(stack, sp - 1)


# -- scheme drivers -----------------------------------------------------------


cdef object run_case_c(int kind, list slots, tuple args, long long iter_cap,
                       long long per_iter, long long global_ops, int* status):
    cdef long long bud[2]
    cdef NSlot s0, s1, s2, s3, s4
    cdef tuple lst
    cdef list env, out, states
    cdef Py_ssize_t ln, i
    cdef Py_ssize_t nargs = PyTuple_GET_SIZE(args)
    cdef object acc, seed, x, v, f
    bud[1] = global_ops
    status[0] = 0

    if kind == K_NOSCHEME:
        bud[0] = per_iter
        return run_code(<NSlot>PyList_GET_ITEM(slots, 0), list(args), bud, status)

    if kind == K_CATA:
        s0 = <NSlot>PyList_GET_ITEM(slots, 0)
        s1 = <NSlot>PyList_GET_ITEM(slots, 1)
        lst = <tuple>PyTuple_GET_ITEM(args, 0)
        bud[0] = per_iter
        acc = run_code(s0, [], bud, status)
        if status[0]:
            return None
        ln = PyTuple_GET_SIZE(lst)
        env = [None] * (3 + nargs)
        for i in range(nargs):
            env[3 + i] = <object>PyTuple_GET_ITEM(args, i)
        for i in range(ln - 1, -1, -1):
            env[0] = i
            env[1] = <object>PyTuple_GET_ITEM(lst, i)
            env[2] = acc
            bud[0] = per_iter
            acc = run_code(s1, env, bud, status)
            if status[0]:
                return None
        return acc

    if kind == K_CURRIED:
        s0 = <NSlot>PyList_GET_ITEM(slots, 0)
        s1 = <NSlot>PyList_GET_ITEM(slots, 1)
        lst = <tuple>PyTuple_GET_ITEM(args, 0)
        f = Closure(s0, ())
        for i in range(PyTuple_GET_SIZE(lst) - 1, -1, -1):
            f = Closure(s1, (i, <object>PyTuple_GET_ITEM(lst, i), f))
        bud[0] = per_iter
        return apply_value_c(f, <object>PyTuple_GET_ITEM(args, 1), bud, status)

    if kind == K_ANA:
        s0 = <NSlot>PyList_GET_ITEM(slots, 0)
        s1 = <NSlot>PyList_GET_ITEM(slots, 1)
        s2 = <NSlot>PyList_GET_ITEM(slots, 2)
        s3 = <NSlot>PyList_GET_ITEM(slots, 3)
        bud[0] = per_iter
        seed = run_code(s0, list(args), bud, status)
        if status[0]:
            return None
        env = [None] * (1 + nargs)
        for i in range(nargs):
            env[1 + i] = <object>PyTuple_GET_ITEM(args, i)
        out = []
        while True:
            env[0] = seed
            bud[0] = per_iter
            v = run_code(s1, env, bud, status)
            if status[0]:
                return None
            if v is True:
                return tuple(out)
            if PyList_GET_SIZE(out) == iter_cap:
                status[0] = ST_ITER_CAP
                return None
            bud[0] = per_iter
            v = run_code(s2, env, bud, status)
            if status[0]:
                return None
            out.append(v)
            bud[0] = per_iter
            seed = run_code(s3, [seed], bud, status)
            if status[0]:
                return None

    if kind == K_ACCU:
        s0 = <NSlot>PyList_GET_ITEM(slots, 0)
        s1 = <NSlot>PyList_GET_ITEM(slots, 1)
        s2 = <NSlot>PyList_GET_ITEM(slots, 2)
        s3 = <NSlot>PyList_GET_ITEM(slots, 3)
        lst = <tuple>PyTuple_GET_ITEM(args, 0)
        ln = PyTuple_GET_SIZE(lst)
        bud[0] = per_iter
        v = run_code(s0, list(args), bud, status)
        if status[0]:
            return None
        states = [v]
        env = [None] * (3 + nargs)
        for i in range(nargs):
            env[3 + i] = <object>PyTuple_GET_ITEM(args, i)
        for i in range(ln):
            env[0] = <object>PyTuple_GET_ITEM(lst, i)
            env[1] = lst[i + 1:]
            env[2] = v
            bud[0] = per_iter
            v = run_code(s1, env, bud, status)
            if status[0]:
                return None
            states.append(v)
        env = [None] * (1 + nargs)
        for i in range(nargs):
            env[1 + i] = <object>PyTuple_GET_ITEM(args, i)
        env[0] = v
        bud[0] = per_iter
        acc = run_code(s2, env, bud, status)
        if status[0]:
            return None
        env = [None] * (3 + nargs)
        for i in range(nargs):
            env[3 + i] = <object>PyTuple_GET_ITEM(args, i)
        for i in range(ln - 1, -1, -1):
            env[0] = <object>PyTuple_GET_ITEM(lst, i)
            env[1] = acc
            env[2] = <object>PyList_GET_ITEM(states, i)
            bud[0] = per_iter
            acc = run_code(s3, env, bud, status)
            if status[0]:
                return None
        return acc

    if kind == K_HYLO:
        s0 = <NSlot>PyList_GET_ITEM(slots, 0)
        s1 = <NSlot>PyList_GET_ITEM(slots, 1)
        s2 = <NSlot>PyList_GET_ITEM(slots, 2)
        s3 = <NSlot>PyList_GET_ITEM(slots, 3)
        s4 = <NSlot>PyList_GET_ITEM(slots, 4)
        seed = <object>PyTuple_GET_ITEM(args, 0)
        env = [None] * (1 + nargs)
        for i in range(nargs):
            env[1 + i] = <object>PyTuple_GET_ITEM(args, i)
        out = []
        while True:
            env[0] = seed
            bud[0] = per_iter
            v = run_code(s0, env, bud, status)
            if status[0]:
                return None
            if v is True:
                break
            if PyList_GET_SIZE(out) == iter_cap:
                status[0] = ST_ITER_CAP
                return None
            bud[0] = per_iter
            v = run_code(s1, env, bud, status)
            if status[0]:
                return None
            out.append(v)
            bud[0] = per_iter
            seed = run_code(s2, env, bud, status)
            if status[0]:
                return None
        bud[0] = per_iter
        acc = run_code(s3, [], bud, status)
        if status[0]:
            return None
        env = [None] * (2 + nargs)
        for i in range(nargs):
            env[2 + i] = <object>PyTuple_GET_ITEM(args, i)
        for i in range(PyList_GET_SIZE(out) - 1, -1, -1):
            env[0] = <object>PyList_GET_ITEM(out, i)
            env[1] = acc
            bud[0] = per_iter
            acc = run_code(s4, env, bud, status)
            if status[0]:
                return None
        return acc

    raise ValueError(f"unknown scheme kind {kind}")


# -- scoring ------------------------------------------------------------------


cdef int lev_c(tuple a, tuple b) except -1:
    cdef Py_ssize_t na = PyTuple_GET_SIZE(a), nb = PyTuple_GET_SIZE(b)
    cdef Py_ssize_t i, j
    cdef int cost, best, d_del, d_ins
    if na == 0:
        return <int>nb
    if nb == 0:
        return <int>na
    cdef Py_UCS4* ca = <Py_UCS4*>PyMem_Malloc(na * sizeof(Py_UCS4))
    cdef Py_UCS4* cb = <Py_UCS4*>PyMem_Malloc(nb * sizeof(Py_UCS4))
    cdef int* prev = <int*>PyMem_Malloc((nb + 1) * sizeof(int))
    cdef int* cur = <int*>PyMem_Malloc((nb + 1) * sizeof(int))
    if not (ca and cb and prev and cur):
        PyMem_Free(ca); PyMem_Free(cb); PyMem_Free(prev); PyMem_Free(cur)
        raise MemoryError()
    try:
        for i in range(na):
            ca[i] = (<str>PyTuple_GET_ITEM(a, i))[0]
        for j in range(nb):
            cb[j] = (<str>PyTuple_GET_ITEM(b, j))[0]
        for j in range(nb + 1):
            prev[j] = <int>j
        for i in range(1, na + 1):
            cur[0] = <int>i
            for j in range(1, nb + 1):
                cost = 0 if ca[i - 1] == cb[j - 1] else 1
                best = prev[j - 1] + cost
                d_del = prev[j] + 1
                d_ins = cur[j - 1] + 1
                if d_del < best:
                    best = d_del
                if d_ins < best:
                    best = d_ins
                cur[j] = best
            prev, cur = cur, prev
        return prev[nb]
    finally:
        PyMem_Free(ca); PyMem_Free(cb); PyMem_Free(prev); PyMem_Free(cur)


cdef double score_value_c(tuple metric, object expected, object actual) except -1.0:
    cdef int m = <object>PyTuple_GET_ITEM(metric, 0)
    cdef double raw, d
    cdef long long ie, ia, di
    cdef Py_ssize_t i, ne, na
    cdef object e, a
    if m == M_INT:
        ie = expected
        ia = actual
        if __builtin_sub_overflow(ie, ia, &di):
            raw = _PENALTY
        else:
            if di < 0:
                di = -di
            raw = <double>(di if di < _INT_CAP else _INT_CAP)
    elif m == M_FLOAT:
        d = fabs(<double>expected - <double>actual)
        raw = _PENALTY if isnan(d) else d
    elif m == M_BOOL:
        raw = 0.0 if expected is actual else 1.0
    elif m == M_LEV:
        raw = <double>lev_c(<tuple>expected, <tuple>actual)
    elif m == M_SEQNUM:
        ne = PyTuple_GET_SIZE(<tuple>expected)
        na = PyTuple_GET_SIZE(<tuple>actual)
        raw = (<double>(<object>PyTuple_GET_ITEM(metric, 1))) * <double>(ne - na if ne >= na else na - ne)
        for i in range(ne if ne <= na else na):
            e = <object>PyTuple_GET_ITEM(<tuple>expected, i)
            a = <object>PyTuple_GET_ITEM(<tuple>actual, i)
            if type(e) is int and type(a) is int:
                ie = e
                ia = a
                if __builtin_sub_overflow(ie, ia, &di):
                    raw += <double>_INT_CAP
                else:
                    if di < 0:
                        di = -di
                    raw += <double>(di if di < _INT_CAP else _INT_CAP)
            else:
                d = fabs(<double>e - <double>a)
                raw += <double>_INT_CAP if isnan(d) else (d if d < <double>_INT_CAP else <double>_INT_CAP)
    elif m == M_PAIR:
        raw = score_value_c(<tuple>PyTuple_GET_ITEM(metric, 1),
                            <object>PyTuple_GET_ITEM(<tuple>expected, 0),
                            <object>PyTuple_GET_ITEM(<tuple>actual, 0)) \
            + score_value_c(<tuple>PyTuple_GET_ITEM(metric, 2),
                            <object>PyTuple_GET_ITEM(<tuple>expected, 1),
                            <object>PyTuple_GET_ITEM(<tuple>actual, 1))
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return raw if raw < _PENALTY else _PENALTY


# -- public api ---------------------------------------------------------------


def run_case(int kind, slots, tuple args, limits):
    cdef list nslots = [s if type(s) is NSlot else NSlot(s) for s in slots]
    cdef long long iter_cap = limits[0], per_iter = limits[1], global_ops = limits[2]
    cdef int status = 0
    value = run_case_c(kind, nslots, args, iter_cap, per_iter, global_ops, &status)
    if status:
        return status, None
    return ST_OK, value


def run_fitness(int kind, slots, cases, tuple metric, limits):
    cdef list nslots = [s if type(s) is NSlot else NSlot(s) for s in slots]
    cdef long long iter_cap = limits[0], per_iter = limits[1], global_ops = limits[2]
    cdef double total = 0.0, sc
    cdef Py_ssize_t n_zero = 0, idx
    cdef int status
    cdef list case_list = cases if type(cases) is list else list(cases)
    cdef Py_ssize_t n = PyList_GET_SIZE(case_list)
    cdef tuple case
    for idx in range(n):
        case = <tuple>PyList_GET_ITEM(case_list, idx)
        status = 0
        value = run_case_c(kind, nslots, <tuple>PyTuple_GET_ITEM(case, 0),
                           iter_cap, per_iter, global_ops, &status)
        if status == 0:
            sc = score_value_c(metric, <object>PyTuple_GET_ITEM(case, 1), value)
        elif status == ST_PER_ITER:
            total += _PENALTY * <double>(n - idx)
            return total, n_zero
        else:
            sc = _PENALTY
        total += sc
        if sc == 0.0:
            n_zero += 1
    return total, n_zero


def eval_expr(compiled, env, long long ops_budget):
    cdef long long bud[2]
    cdef int status = 0
    bud[0] = ops_budget
    bud[1] = ops_budget
    value = run_code(NSlot(compiled), list(env), bud, &status)
    if status:
        return (ST_BUDGET if status == ST_PER_ITER else status), None, bud[1]
    return ST_OK, value, bud[1]


def apply_fun(fv, arg, long long ops_budget):
    cdef long long bud[2]
    cdef int status = 0
    bud[0] = ops_budget
    bud[1] = ops_budget
    value = apply_value_c(fv, arg, bud, &status)
    if status:
        return (ST_BUDGET if status == ST_PER_ITER else status), None, bud[1]
    return ST_OK, value, bud[1]


def score_value(tuple metric, expected, actual):
    return score_value_c(metric, expected, actual)


def opcode_table():
    """Constants as compiled, for the consistency test against opcodes.py."""
    out = {
        "OP_LOAD_VAR": OP_LOAD_VAR, "OP_LOAD_CONST": OP_LOAD_CONST,
        "OP_CALL": OP_CALL, "OP_JF": OP_JF, "OP_JMP": OP_JMP,
        "OP_MK_PARTIAL": OP_MK_PARTIAL,
        "ST_OK": ST_OK, "ST_DIV0": ST_DIV0, "ST_EMPTY": ST_EMPTY,
        "ST_CONV": ST_CONV, "ST_OVERFLOW": ST_OVERFLOW, "ST_BUDGET": ST_BUDGET,
        "ST_PER_ITER": ST_PER_ITER, "ST_ITER_CAP": ST_ITER_CAP,
        "K_NOSCHEME": K_NOSCHEME, "K_CATA": K_CATA, "K_CURRIED": K_CURRIED,
        "K_ANA": K_ANA, "K_ACCU": K_ACCU, "K_HYLO": K_HYLO,
        "M_INT": M_INT, "M_FLOAT": M_FLOAT, "M_BOOL": M_BOOL,
        "M_LEV": M_LEV, "M_SEQNUM": M_SEQNUM, "M_PAIR": M_PAIR,
        "N_PRIMS": N_PRIMS,
        "PRIM_IF": PRIM_IF, "PRIM_APPLY": PRIM_APPLY,
        "PRIM_REPLICATE": PRIM_REPLICATE,
        "PRIM_ENUMFROMTHENTO": PRIM_ENUMFROMTHENTO,
    }
    return out
