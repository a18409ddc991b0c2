"""Benchmark plumbing: fitness metrics, problem records, dataset
materialization and the JSON-lines dataset format.

Problem semantics live in problems.py; this module owns the machinery they
plug into.  Every oracle doubles as the data-generation reference: expected
outputs are always oracle(inputs), so oracle self-consistency (scoring the
oracle's own outputs gives zero error) holds by construction and is asserted
in the tests.
"""
from __future__ import annotations

import json
import random
import zlib
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .exec.backend import engine
from .exec import opcodes as oc
from .exec.pure import FAIL_PENALTY, score_value
from .expr import value_from_python, value_to_python
from .interp import EvalOutcome, Ok
from .schemes import Limits, PatternInstance, PatternKind, compile_slots
from .types import SemType, Signature, format_type, parse_type


# -- metrics -----------------------------------------------------------------


class FitnessMetric:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class AbsIntDiff(FitnessMetric):
    pass


@dataclass(frozen=True, slots=True)
class AbsFloatDiff(FitnessMetric):
    pass


@dataclass(frozen=True, slots=True)
class BoolMismatch(FitnessMetric):
    pass


@dataclass(frozen=True, slots=True)
class Levenshtein(FitnessMetric):
    pass


@dataclass(frozen=True, slots=True)
class SeqNumDiff(FitnessMetric):
    """Element-wise absolute difference over the aligned prefix plus a fixed
    penalty per element of length mismatch."""

    length_penalty: float = 1000.0


@dataclass(frozen=True, slots=True)
class Composite(FitnessMetric):
    """Sum of per-component metrics over a pair output."""

    fst: FitnessMetric
    snd: FitnessMetric


def metric_descriptor(m: FitnessMetric) -> tuple:
    """Engine-facing form of a metric."""
    if isinstance(m, AbsIntDiff):
        return (oc.M_INT,)
    if isinstance(m, AbsFloatDiff):
        return (oc.M_FLOAT,)
    if isinstance(m, BoolMismatch):
        return (oc.M_BOOL,)
    if isinstance(m, Levenshtein):
        return (oc.M_LEV,)
    if isinstance(m, SeqNumDiff):
        return (oc.M_SEQNUM, m.length_penalty)
    if isinstance(m, Composite):
        return (oc.M_PAIR, metric_descriptor(m.fst), metric_descriptor(m.snd))
    raise TypeError(f"unknown metric {m!r}")


def metric_value(m: FitnessMetric, expected, actual) -> float:
    """Error between an expected and an actual value (both well-typed)."""
    return score_value(metric_descriptor(m), expected, actual)


def score_case(m: FitnessMetric, expected, outcome: EvalOutcome) -> float:
    """Per-case score: the metric on an Ok value, the fixed penalty on any
    failure outcome."""
    if isinstance(outcome, Ok):
        return metric_value(m, expected, outcome.value)
    return FAIL_PENALTY


# -- problems and datasets ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class Problem:
    name: str
    signature: Signature
    metric: FitnessMetric
    oracle: Callable  # args tuple -> expected value
    sampler: Callable  # random.Random -> args tuple
    allowed_types: tuple[SemType, ...]
    edge_cases: tuple[tuple, ...] = ()
    n_train: int = 100
    n_test: int = 1000
    unbound_types: dict = field(default_factory=dict)  # PatternKind -> SemType
    extra_consts: dict = field(default_factory=dict)  # SemType -> tuple of values

    def unbound_for(self, kind: PatternKind) -> SemType:
        return self.unbound_types.get(kind, self.signature.out_type)


Row = tuple[tuple, object]  # (inputs, expected)


@dataclass(frozen=True)
class Dataset:
    problem: str
    seed: int
    train: tuple[Row, ...]
    test: tuple[Row, ...]

    def train_cases(self) -> list[Row]:
        return list(self.train)

    def test_cases(self) -> list[Row]:
        return list(self.test)


def _data_rng(problem: Problem, seed: int) -> random.Random:
    salt = zlib.crc32(problem.name.encode())
    return random.Random((seed * 1_000_003 + salt) & 0x7FFFFFFFFFFFFFFF)


def materialize(
    problem: Problem,
    seed: int,
    n_train: Optional[int] = None,
    n_test: Optional[int] = None,
) -> Dataset:
    """Deterministic in (problem, seed): fixed edge cases occupy the leading
    training rows, the rest is sampled; test inputs avoid training inputs
    where the domain permits."""
    n_train = problem.n_train if n_train is None else n_train
    n_test = problem.n_test if n_test is None else n_test
    rng = _data_rng(problem, seed)
    train_inputs = list(problem.edge_cases[:n_train])
    while len(train_inputs) < n_train:
        train_inputs.append(problem.sampler(rng))
    seen = set(train_inputs)
    test_inputs = []
    misses = 0
    while len(test_inputs) < n_test:
        x = problem.sampler(rng)
        if x in seen and misses < 200:
            misses += 1
            continue
        misses = 0
        test_inputs.append(x)
        seen.add(x)
    train = tuple((x, problem.oracle(x)) for x in train_inputs)
    test = tuple((x, problem.oracle(x)) for x in test_inputs)
    return Dataset(problem.name, seed, train, test)


def fitness(
    slot_exprs,
    inst: PatternInstance,
    rows: Sequence[Row],
    metric: FitnessMetric,
    limits: Limits = Limits(),
) -> float:
    """Sum of per-case scores over the rows (order-independent)."""
    total, _ = engine.run_fitness(
        inst.kind.engine_id,
        compile_slots(inst, slot_exprs),
        list(rows),
        metric_descriptor(metric),
        limits.as_tuple(),
    )
    return total


def test_errors(
    slot_exprs,
    inst: PatternInstance,
    rows: Sequence[Row],
    metric: FitnessMetric,
    limits: Limits = Limits(),
) -> int:
    """Number of rows whose score is not exactly zero."""
    _, n_zero = engine.run_fitness(
        inst.kind.engine_id,
        compile_slots(inst, slot_exprs),
        list(rows),
        metric_descriptor(metric),
        limits.as_tuple(),
    )
    return len(rows) - n_zero


def test_solved(slot_exprs, inst, rows, metric, limits: Limits = Limits()) -> bool:
    """All-or-nothing: true iff every row scores exactly zero."""
    return test_errors(slot_exprs, inst, rows, metric, limits) == 0


# -- JSON-lines dataset interchange ------------------------------------------


def write_dataset(ds: Dataset, sig: Signature, fh) -> None:
    header = {
        "problem": ds.problem,
        "seed": ds.seed,
        "signature": {
            "args": [format_type(t) for t in sig.arg_types],
            "out": format_type(sig.out_type),
        },
        "n_train": len(ds.train),
        "n_test": len(ds.test),
    }
    fh.write(json.dumps(header) + "\n")
    for inputs, expected in (*ds.train, *ds.test):
        rec = {
            "input": [value_to_python(v, t) for v, t in zip(inputs, sig.arg_types)],
            "output": value_to_python(expected, sig.out_type),
        }
        fh.write(json.dumps(rec) + "\n")


def read_dataset(fh) -> tuple[Dataset, Signature]:
    lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    header = json.loads(lines[0])
    sig = Signature(
        tuple(parse_type(s) for s in header["signature"]["args"]),
        parse_type(header["signature"]["out"]),
    )
    rows = []
    for ln in lines[1:]:
        rec = json.loads(ln)
        inputs = tuple(
            value_from_python(v, t) for v, t in zip(rec["input"], sig.arg_types)
        )
        rows.append((inputs, value_from_python(rec["output"], sig.out_type)))
    n_train = header["n_train"]
    ds = Dataset(
        header["problem"],
        header["seed"],
        tuple(rows[:n_train]),
        tuple(rows[n_train:]),
    )
    return ds, sig
