import random

import pytest

from morphgp.evolve import GenContext, GpConfig, init_population
from morphgp.problems import get_problem
from morphgp.schemes import PatternKind, instantiate


@pytest.fixture
def rng():
    return random.Random(12345)


def make_instance(problem_name: str, kind: PatternKind):
    p = get_problem(problem_name)
    unbound = p.unbound_for(kind) if kind.needs_unbound else None
    return p, instantiate(kind, p.signature, unbound)


def make_context(problem_name: str, kind: PatternKind):
    p, inst = make_instance(problem_name, kind)
    return p, inst, GenContext.for_instance(inst, p.allowed_types, p.extra_consts)


def random_individuals(problem_name, kind, n, seed=0):
    p, inst, ctx = make_context(problem_name, kind)
    cfg = GpConfig(pop_size=n, rng_seed=seed)
    return p, inst, ctx, init_population(inst, cfg, random.Random(seed), ctx)
