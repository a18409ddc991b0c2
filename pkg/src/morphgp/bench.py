"""Throughput comparison of the evaluation engines on representative
workloads: straight-line arithmetic, list folds and an unfold-refold.

Run as `morphgp bench` or `python -m morphgp.bench`.
"""
from __future__ import annotations

import random
import time

from .evolve import GenContext, GpConfig, init_population
from .exec import compile_expr
from .exec.backend import available_engines
from .benchmark import materialize, metric_descriptor
from .problems import get_problem
from .schemes import Limits, instantiate, PatternKind

_WORKLOADS = (
    ("smallest", PatternKind.NO_SCHEME, 200),
    ("count-odds", PatternKind.CATA, 60),
    ("sum-of-squares", PatternKind.HYLO, 60),
)


def _prepare(name: str, kind: PatternKind, n_individuals: int):
    problem = get_problem(name)
    unbound = problem.unbound_for(kind) if kind.needs_unbound else None
    inst = instantiate(kind, problem.signature, unbound)
    ctx = GenContext.for_instance(inst, problem.allowed_types, problem.extra_consts)
    cfg = GpConfig(pop_size=n_individuals, rng_seed=7)
    pop = init_population(inst, cfg, random.Random(7), ctx)
    dataset = materialize(problem, 7, 50, 1)
    compiled = [
        [compile_expr(e, spec.scope_names()) for e, spec in zip(ind.slots, inst.slots)]
        for ind in pop
    ]
    return inst, compiled, dataset.train_cases(), metric_descriptor(problem.metric)


def run_benchmark(repeats: int = 3) -> dict[str, dict[str, float]]:
    engines = available_engines()
    limits = Limits().as_tuple()
    results: dict[str, dict[str, float]] = {}
    print(f"engines: {', '.join(engines)}")
    for name, kind, n in _WORKLOADS:
        inst, compiled, cases, metric = _prepare(name, kind, n)
        results[name] = {}
        for eng_name, eng in engines.items():
            best = float("inf")
            for _ in range(repeats):
                t0 = time.perf_counter()
                for slots in compiled:
                    eng.run_fitness(inst.kind.engine_id, slots, cases, metric, limits)
                best = min(best, time.perf_counter() - t0)
            rate = len(compiled) * len(cases) / best
            results[name][eng_name] = rate
            print(f"{name:<16} {eng_name:<7} {best * 1e3:8.1f} ms  "
                  f"{rate:10.0f} case-evals/s")
        if {"pure", "native"} <= results[name].keys():
            speedup = results[name]["native"] / results[name]["pure"]
            print(f"{name:<16} native speedup: {speedup:.1f}x")
    return results


if __name__ == "__main__":
    run_benchmark()
