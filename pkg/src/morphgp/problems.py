"""The benchmark problem registry: signatures, samplers, reference oracles,
fixed edge cases, metrics and per-problem grammar extensions.

Each entry follows the published synthesis-benchmark description of the task;
the oracle is the single source of expected outputs.  Inputs use the runtime
value representation (strings are tuples of characters).  The registry covers
every scaffold kind; the handful of suite problems never solved by any
pattern are omitted (the registry is extensible).
"""
from __future__ import annotations

import random
import string as _string

from .benchmark import (
    AbsFloatDiff,
    AbsIntDiff,
    BoolMismatch,
    Composite,
    Levenshtein,
    Problem,
    SeqNumDiff,
)
from .schemes import PatternKind
from .types import BOOL, CHAR, FLOAT, INT, STRING, ListT, PairT, Signature

_VISIBLE = _string.ascii_letters + _string.digits + "!\"#$%&'()*+,-./:;<=>?@[]^_{}"
_LOWER = _string.ascii_lowercase


def _s(text: str) -> tuple:
    return tuple(text)


def _rand_string(rng, max_len, charset=_VISIBLE, min_len=0) -> tuple:
    n = rng.randint(min_len, max_len)
    return tuple(rng.choice(charset) for _ in range(n))


def _rand_ints(rng, max_len, lo=-1000, hi=1000, min_len=0) -> tuple:
    n = rng.randint(min_len, max_len)
    return tuple(rng.randint(lo, hi) for _ in range(n))


# scrabble letter values, indexed by character code (0 for non-letters)
_SCRABBLE = [0] * 128
for _c, _v in zip(
    _LOWER,
    (1, 3, 3, 2, 1, 4, 2, 4, 1, 8, 5, 1, 3, 1, 1, 3, 10, 1, 1, 1, 1, 4, 4, 8, 4, 10),
):
    _SCRABBLE[ord(_c)] = _v
    _SCRABBLE[ord(_c.upper())] = _v
SCRABBLE_TABLE = tuple(_SCRABBLE)


def _problems() -> list[Problem]:
    out = []

    # ---- straight-line problems (no recursion needed) ----

    out.append(Problem(
        name="number-io",
        signature=Signature((INT, FLOAT), FLOAT),
        metric=AbsFloatDiff(),
        oracle=lambda a: float(a[0]) + a[1],
        sampler=lambda r: (r.randint(-100, 100), r.uniform(-100.0, 100.0)),
        allowed_types=(INT, FLOAT),
        edge_cases=((0, 0.0), (-100, -100.0), (100, 100.0)),
        n_train=25, n_test=1000,
    ))

    out.append(Problem(
        name="smallest",
        signature=Signature((INT, INT, INT, INT), INT),
        metric=AbsIntDiff(),
        oracle=lambda a: min(a),
        sampler=lambda r: tuple(r.randint(-100, 100) for _ in range(4)),
        allowed_types=(INT, BOOL),
        edge_cases=((0, 0, 0, 0), (-100, 0, 0, 0), (0, 0, 0, -100), (100, 100, 100, 100)),
        n_train=100, n_test=1000,
    ))

    out.append(Problem(
        name="median",
        signature=Signature((INT, INT, INT), INT),
        metric=AbsIntDiff(),
        oracle=lambda a: sorted(a)[1],
        sampler=lambda r: tuple(r.randint(-100, 100) for _ in range(3)),
        allowed_types=(INT, BOOL),
        edge_cases=((0, 0, 0), (0, 0, 100), (-100, 0, 0), (-100, 0, 100)),
        n_train=100, n_test=1000,
    ))

    def _csl_sampler(r):
        if r.random() < 0.3:  # related lengths make ordering cases common
            n = r.randint(0, 25)
            deltas = [r.randint(-2, 2) for _ in range(2)]
            lens = [n, max(0, n + deltas[0]), max(0, n + deltas[0] + deltas[1])]
            return tuple(_rand_string(r, ln, min_len=ln) for ln in lens)
        return tuple(_rand_string(r, 49) for _ in range(3))

    out.append(Problem(
        name="compare-string-lengths",
        signature=Signature((STRING, STRING, STRING), BOOL),
        metric=BoolMismatch(),
        oracle=lambda a: len(a[0]) < len(a[1]) < len(a[2]),
        sampler=_csl_sampler,
        allowed_types=(INT, BOOL, STRING),
        edge_cases=(((), (), ()), ((), ("a",), ("a", "b")), (("a",), (), ())),
        n_train=100, n_test=1000,
    ))

    def _mirror_sampler(r):
        xs = _rand_ints(r, 50)
        roll = r.random()
        if roll < 0.4:
            return (xs, xs[::-1])
        if roll < 0.5:
            return (xs, xs)
        if roll < 0.65 and xs:
            ys = list(xs[::-1])
            ys[r.randrange(len(ys))] += r.choice((-1, 1))
            return (xs, tuple(ys))
        return (xs, _rand_ints(r, 50))

    out.append(Problem(
        name="mirror-image",
        signature=Signature((ListT(INT), ListT(INT)), BOOL),
        metric=BoolMismatch(),
        oracle=lambda a: a[0] == a[1][::-1],
        sampler=_mirror_sampler,
        allowed_types=(INT, BOOL, ListT(INT)),
        edge_cases=(((), ()), ((1,), (1,)), ((0,), (1,)), ((1, 2), (2, 1))),
        n_train=100, n_test=1000,
    ))

    def _sol_oracle(a):
        n = a[0]
        return _s("small") if n < 1000 else (_s("large") if n >= 2000 else ())

    def _sol_sampler(r):
        if r.random() < 0.3:
            return (r.randint(980, 1020) if r.random() < 0.5 else r.randint(1980, 2020),)
        return (r.randint(-10000, 10000),)

    out.append(Problem(
        name="small-or-large",
        signature=Signature((INT,), STRING),
        metric=Levenshtein(),
        oracle=_sol_oracle,
        sampler=_sol_sampler,
        allowed_types=(INT, BOOL, STRING),
        edge_cases=((999,), (1000,), (1001,), (1999,), (2000,), (2001,), (0,)),
        n_train=100, n_test=1000,
        extra_consts={STRING: (_s("small"), _s("large")), INT: (1000, 2000)},
    ))

    # ---- fold problems ----

    out.append(Problem(
        name="count-odds",
        signature=Signature((ListT(INT),), INT),
        metric=AbsIntDiff(),
        oracle=lambda a: sum(1 for x in a[0] if x % 2 != 0),
        sampler=lambda r: (_rand_ints(r, 50),),
        allowed_types=(INT, BOOL, ListT(INT)),
        edge_cases=(((),), ((0,),), ((1,),), ((-1,),), ((2,),), ((0, 1),)),
        n_train=200, n_test=2000,
    ))

    out.append(Problem(
        name="negative-to-zero",
        signature=Signature((ListT(INT),), ListT(INT)),
        metric=SeqNumDiff(),
        oracle=lambda a: tuple(max(x, 0) for x in a[0]),
        sampler=lambda r: (_rand_ints(r, 50),),
        allowed_types=(INT, BOOL, ListT(INT)),
        edge_cases=(((),), ((-1,),), ((0,),), ((1,),), ((-1, 0, 1),)),
        n_train=200, n_test=2000,
    ))

    out.append(Problem(
        name="scrabble-score",
        signature=Signature((STRING,), INT),
        metric=AbsIntDiff(),
        oracle=lambda a: sum(SCRABBLE_TABLE[ord(c)] if ord(c) < 128 else 0 for c in a[0]),
        sampler=lambda r: (_rand_string(r, 20, _VISIBLE + "  "),),
        allowed_types=(INT, CHAR, BOOL, STRING, ListT(INT)),
        edge_cases=(((),), (_s("a"),), (_s("Q"),), (_s("zx"),)),
        n_train=200, n_test=1000,
        extra_consts={ListT(INT): (SCRABBLE_TABLE,)},
    ))

    def _lioz_sampler(r):
        xs = list(_rand_ints(r, 50, -50, 50, min_len=1))
        if 0 not in xs:
            xs[r.randrange(len(xs))] = 0
        return (tuple(xs),)

    out.append(Problem(
        name="last-index-of-zero",
        signature=Signature((ListT(INT),), INT),
        metric=AbsIntDiff(),
        oracle=lambda a: max(i for i, x in enumerate(a[0]) if x == 0),
        sampler=_lioz_sampler,
        allowed_types=(INT, BOOL, ListT(INT)),
        edge_cases=(((0,),), ((0, 1),), ((1, 0),), ((0, 0),), ((7, 0, 7),)),
        n_train=150, n_test=1000,
    ))

    def _grade_oracle(a):
        thresholds, score = a
        for letter, t in zip("ABCD", thresholds):
            if score >= t:
                return _s(letter)
        return _s("F")

    def _grade_sampler(r):
        ts = sorted(r.sample(range(0, 101), 4), reverse=True)
        score = r.choice(ts) if r.random() < 0.2 else r.randint(0, 100)
        return (tuple(ts), score)

    out.append(Problem(
        name="grade",
        signature=Signature((ListT(INT), INT), STRING),
        metric=Levenshtein(),
        oracle=_grade_oracle,
        sampler=_grade_sampler,
        allowed_types=(INT, BOOL, ListT(INT), CHAR, STRING),
        edge_cases=(
            ((80, 60, 40, 20), 80), ((80, 60, 40, 20), 79), ((80, 60, 40, 20), 60),
            ((80, 60, 40, 20), 40), ((80, 60, 40, 20), 20), ((80, 60, 40, 20), 19),
            ((100, 99, 98, 97), 0), ((4, 3, 2, 1), 100),
        ),
        n_train=200, n_test=2000,
        extra_consts={
            INT: (65,),
            STRING: (_s("A"), _s("B"), _s("C"), _s("D"), _s("F")),
            CHAR: ("A", "B", "C", "D", "F"),
        },
    ))

    out.append(Problem(
        name="string-lengths-backwards",
        signature=Signature((ListT(STRING),), ListT(INT)),
        metric=SeqNumDiff(),
        oracle=lambda a: tuple(len(s) for s in reversed(a[0])),
        sampler=lambda r: (tuple(_rand_string(r, 50) for _ in range(r.randint(0, 50))),),
        allowed_types=(INT, BOOL, STRING, ListT(STRING), ListT(INT)),
        edge_cases=(((),), (((),),), ((_s("ab"), ()),)),
        n_train=100, n_test=1000,
    ))

    def _double_letters_oracle(a):
        out = []
        for c in a[0]:
            if c.isalpha():
                out += [c, c]
            elif c == "!":
                out += [c, c, c]
            else:
                out.append(c)
        return tuple(out)

    out.append(Problem(
        name="double-letters",
        signature=Signature((STRING,), STRING),
        metric=Levenshtein(),
        oracle=_double_letters_oracle,
        sampler=lambda r: (_rand_string(r, 20, _VISIBLE + "  "),),
        allowed_types=(CHAR, BOOL, STRING),
        edge_cases=(((),), (_s("a"),), (_s("!"),), (_s("a!b"),)),
        n_train=100, n_test=1000,
    ))

    out.append(Problem(
        name="syllables",
        signature=Signature((STRING,), INT),
        metric=AbsIntDiff(),
        oracle=lambda a: sum(1 for c in a[0] if c in "aeiouy"),
        sampler=lambda r: (_rand_string(r, 20, _LOWER + _string.digits + "  .,!?"),),
        allowed_types=(INT, CHAR, BOOL, STRING),
        edge_cases=(((),), (_s("y"),), (_s("aeiouy"),), (_s("bcd"),)),
        n_train=100, n_test=1000,
        extra_consts={STRING: (_s("aeiouy"),)},
    ))

    def _rswn_oracle(a):
        replaced = tuple("\n" if c == " " else c for c in a[0])
        return (replaced, sum(1 for c in a[0] if c != " "))

    out.append(Problem(
        name="replace-space-with-newline",
        signature=Signature((STRING,), PairT(STRING, INT)),
        metric=Composite(Levenshtein(), AbsIntDiff()),
        oracle=_rswn_oracle,
        sampler=lambda r: (_rand_string(r, 20, _VISIBLE + "     "),),
        allowed_types=(INT, CHAR, BOOL, STRING, PairT(STRING, INT)),
        edge_cases=(((),), ((" ",),), (_s("a b"),)),
        n_train=100, n_test=1000,
        extra_consts={CHAR: ("\n", " ")},
    ))

    # ---- curried fold problems ----

    def _superanagram_oracle(a):
        x, y = a
        pool = list(y)
        for c in x:
            if c in pool:
                pool.remove(c)
            else:
                return False
        return True

    def _superanagram_sampler(r):
        x = _rand_string(r, 20, _LOWER)
        roll = r.random()
        if roll < 0.5:
            extra = _rand_string(r, max(0, 20 - len(x)), _LOWER)
            y = list(x + extra)
            r.shuffle(y)
            return (x, tuple(y))
        if roll < 0.7 and x:
            y = list(x)
            y.remove(r.choice(x))
            r.shuffle(y)
            return (x, tuple(y))
        return (x, _rand_string(r, 20, _LOWER))

    out.append(Problem(
        name="super-anagrams",
        signature=Signature((STRING, STRING), BOOL),
        metric=BoolMismatch(),
        oracle=_superanagram_oracle,
        sampler=_superanagram_sampler,
        allowed_types=(INT, CHAR, BOOL, STRING),
        edge_cases=(((), ()), (_s("a"), ()), ((), _s("a")), (_s("ab"), _s("ba"))),
        n_train=200, n_test=2000,
    ))

    def _vs_sampler(r):
        n = r.randint(0, 50)
        return (_rand_ints(r, n, min_len=n), _rand_ints(r, n, min_len=n))

    out.append(Problem(
        name="vectors-summed",
        signature=Signature((ListT(INT), ListT(INT)), ListT(INT)),
        metric=SeqNumDiff(),
        oracle=lambda a: tuple(x + y for x, y in zip(a[0], a[1])),
        sampler=_vs_sampler,
        allowed_types=(INT, ListT(INT), BOOL),
        edge_cases=(((), ()), ((0,), (0,)), ((1, 2), (3, 4))),
        n_train=150, n_test=1500,
    ))

    # ---- unfold problems ----

    def _fli_sampler(r):
        step = r.randint(1, 10)
        count = r.randint(1, 20)
        start = r.randint(-500, 500)
        end = start + step * (count - 1) + r.randint(1, step)
        return (start, end, step)

    out.append(Problem(
        name="for-loop-index",
        signature=Signature((INT, INT, INT), ListT(INT)),
        metric=SeqNumDiff(),
        oracle=lambda a: tuple(range(a[0], a[1], a[2])),
        sampler=_fli_sampler,
        allowed_types=(INT, BOOL, ListT(INT)),
        edge_cases=((0, 1, 1), (0, 10, 1), (-5, 5, 3)),
        n_train=100, n_test=1000,
    ))

    def _even_squares_oracle(a):
        out, k = [], 2
        while k * k < a[0]:
            out.append(k * k)
            k += 2
        return tuple(out)

    out.append(Problem(
        name="even-squares",
        signature=Signature((INT,), ListT(INT)),
        metric=SeqNumDiff(),
        oracle=_even_squares_oracle,
        sampler=lambda r: (r.randint(1, 9999),),
        allowed_types=(INT, BOOL, ListT(INT)),
        edge_cases=((1,), (4,), (5,), (9999,)),
        n_train=100, n_test=1000,
    ))

    # ---- accumulation problems ----

    def _vector_average_oracle(a):
        acc = 0.0
        for v in a[0]:
            acc += v
        return acc / len(a[0])

    out.append(Problem(
        name="vector-average",
        signature=Signature((ListT(FLOAT),), FLOAT),
        metric=AbsFloatDiff(),
        oracle=_vector_average_oracle,
        sampler=lambda r: (tuple(r.uniform(-1000.0, 1000.0) for _ in range(r.randint(1, 50))),),
        allowed_types=(FLOAT, INT, BOOL, ListT(FLOAT)),
        edge_cases=(((0.0,),), ((1.0, 3.0),)),
        n_train=100, n_test=1000,
        unbound_types={PatternKind.ACCU: PairT(FLOAT, INT), PatternKind.HYLO: INT},
    ))

    def _checksum_oracle(a):
        total = sum(ord(c) for c in a[0])
        return _s("Check sum is ") + (chr(total % 64 + ord(" ")),)

    out.append(Problem(
        name="checksum",
        signature=Signature((STRING,), STRING),
        metric=Levenshtein(),
        oracle=_checksum_oracle,
        sampler=lambda r: (_rand_string(r, 50, _VISIBLE + "  "),),
        allowed_types=(INT, CHAR, BOOL, STRING),
        edge_cases=(((),), (_s("a"),), (_s("Check sum is "),)),
        n_train=100, n_test=1000,
        unbound_types={PatternKind.ACCU: INT, PatternKind.HYLO: INT},
        extra_consts={STRING: (_s("Check sum is "),), INT: (64, 32)},
    ))

    # ---- unfold-then-fold problems ----

    out.append(Problem(
        name="sum-of-squares",
        signature=Signature((INT,), INT),
        metric=AbsIntDiff(),
        oracle=lambda a: sum(k * k for k in range(a[0] + 1)),
        sampler=lambda r: (r.randint(1, 100),),
        allowed_types=(INT, BOOL),
        edge_cases=((1,), (100,)),
        n_train=50, n_test=50,
        unbound_types={PatternKind.HYLO: INT},
    ))

    def _collatz_oracle(a):
        n, count = a[0], 1
        while n != 1:
            n = n // 2 if n % 2 == 0 else 3 * n + 1
            count += 1
        return count

    out.append(Problem(
        name="collatz-numbers",
        signature=Signature((INT,), INT),
        metric=AbsIntDiff(),
        oracle=_collatz_oracle,
        sampler=lambda r: (r.randint(1, 10000),),
        allowed_types=(INT, BOOL),
        edge_cases=((1,), (2,), (3,)),
        n_train=200, n_test=2000,
        unbound_types={PatternKind.HYLO: INT},
    ))

    return out


_REGISTRY: dict[str, Problem] | None = None


def register_problems() -> dict[str, Problem]:
    global _REGISTRY
    if _REGISTRY is None:
        _REGISTRY = {p.name: p for p in _problems()}
    return _REGISTRY


def get_problem(name: str) -> Problem:
    reg = register_problems()
    if name not in reg:
        raise KeyError(
            f"unknown problem {name!r}; known: {', '.join(sorted(reg))}"
        )
    return reg[name]


def problem_names() -> list[str]:
    return sorted(register_problems())
