"""The genetic-programming engine: typed random generation, tournament
selection, slot-aware variation, generational replacement with early stop,
and greedy champion refinement.

All randomness flows through one sequential random.Random per run, so a
(problem, pattern, config, seed) quadruple fully determines the transcript.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

from .exec import compile_expr
from .exec.backend import engine
from .expr import App, Const, Expr, PartialApp, Var, iter_nodes, node_at, replace_at
from .primitives import TypeEnv, candidates_returning, partial_candidates, register_all
from .schemes import Limits, PatternInstance, SlotSpec, check_slots
from .types import (
    BOOL,
    CHAR,
    FLOAT,
    FunT,
    IntT,
    ListT,
    SemType,
    apply_subst,
)

DEFAULT_INT_POOL = (-1, 0, 1, 2, 3, 10, 100)
DEFAULT_FLOAT_POOL = (0.0, 1.0, 2.0, -1.0, 0.5)
DEFAULT_CHAR_POOL = ("a", "z", "A", "Z", "0", "9", " ", "\n", "*", "!")


@dataclass(frozen=True)
class GpConfig:
    pop_size: int = 1000
    tournament_k: int = 10
    crossover_rate: float = 0.5
    max_slot_depth: int = 5
    ramp_depths: tuple[int, ...] = (1, 2, 3, 4, 5)
    max_evaluations: int = 300_000
    rng_seed: int = 0
    var_prob: float = 0.7  # variable-vs-constant bias at terminals
    debug_typecheck: bool = False

    def __post_init__(self):
        if min(self.pop_size, self.tournament_k, self.max_slot_depth, self.max_evaluations) <= 0:
            raise ValueError("config values must be positive")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must be in [0, 1]")
        if not self.ramp_depths or min(self.ramp_depths) < 1:
            raise ValueError("ramp depths must be >= 1")


@dataclass
class Individual:
    """One candidate program: an expression per slot plus cached fitness."""

    slots: tuple[Expr, ...]
    fitness: Optional[float] = None
    n_zero: int = 0
    size: int = field(init=False)

    def __post_init__(self):
        self.size = sum(e.size for e in self.slots)

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None


class UnsatisfiableType(Exception):
    pass


class _DeadEnd(Exception):
    pass


class GenContext:
    """Per-(problem, pattern) generation tables: allowed-type environment and
    type-indexed constant pools."""

    def __init__(self, env: TypeEnv, extra_consts: dict[SemType, tuple] | None = None):
        self.env = env
        self.extra = dict(extra_consts or {})
        self._pools: dict[SemType, tuple] = {}

    @staticmethod
    def for_instance(inst: PatternInstance, allowed, extra_consts=None) -> "GenContext":
        types = list(allowed)
        types.extend(inst.signature.arg_types)
        types.append(inst.signature.out_type)
        if inst.unbound_type is not None:
            types.append(inst.unbound_type)
        for spec in inst.slots:
            types.append(spec.out_type)
            types.extend(t for _, t in spec.scope)
        return GenContext(TypeEnv.closing_over(types), extra_consts)

    def pool(self, t: SemType) -> tuple:
        cached = self._pools.get(t)
        if cached is None:
            vals: list = []
            if isinstance(t, IntT):
                vals += DEFAULT_INT_POOL
            elif t == FLOAT:
                vals += DEFAULT_FLOAT_POOL
            elif t == BOOL:
                vals += [True, False]
            elif t == CHAR:
                vals += DEFAULT_CHAR_POOL
            elif isinstance(t, ListT):
                vals.append(())
            vals += self.extra.get(t, ())
            cached = self._pools[t] = tuple(vals)
        return cached


def _terminal(target, scope, rng, ctx: GenContext, var_prob):
    vars_ = [(n, t) for n, t in scope if t == target]
    if isinstance(target, FunT):
        bare = [c for c in partial_candidates(target, ctx.env) if c[1] == 0]
        opts = len(vars_) + len(bare)
        if not opts:
            raise _DeadEnd
        k = rng.randrange(opts)
        if k < len(vars_):
            return Var(*vars_[k])
        prim, _, _ = bare[k - len(vars_)]
        return PartialApp(prim.id, (), target)
    consts = ctx.pool(target)
    if vars_ and consts:
        use_var = rng.random() < var_prob
    elif vars_ or consts:
        use_var = bool(vars_)
    else:
        raise _DeadEnd
    if use_var:
        return Var(*vars_[rng.randrange(len(vars_))])
    return Const(consts[rng.randrange(len(consts))], target)


def _gen(target, scope, depth, rng, ctx: GenContext, full: bool, var_prob):
    if isinstance(target, FunT):
        cands = [c for c in partial_candidates(target, ctx.env) if c[1] > 0]
    else:
        cands = candidates_returning(target, ctx.env)
    n_term = _terminal_count(target, scope, ctx)
    if depth <= 1 or not cands:
        return _terminal(target, scope, rng, ctx, var_prob)
    if full:
        go_deep = True
    else:
        # uniform over the union of terminals and operators
        go_deep = rng.randrange(n_term + len(cands)) >= n_term if n_term else True
    if not go_deep:
        return _terminal(target, scope, rng, ctx, var_prob)
    order = list(range(len(cands)))
    rng.shuffle(order)
    for idx in order:
        try:
            if isinstance(target, FunT):
                prim, n_sup, subst = cands[idx]
                params = [apply_subst(subst, p) for p in prim.params[:n_sup]]
                args = tuple(
                    _gen(p, scope, depth - 1, rng, ctx, full, var_prob) for p in params
                )
                return PartialApp(prim.id, args, target)
            prim, subst = cands[idx]
            params = [apply_subst(subst, p) for p in prim.params]
            args = tuple(
                _gen(p, scope, depth - 1, rng, ctx, full, var_prob) for p in params
            )
            return App(prim.id, args, target)
        except _DeadEnd:
            continue
    return _terminal(target, scope, rng, ctx, var_prob)


def _terminal_count(target, scope, ctx: GenContext) -> int:
    n = sum(1 for _, t in scope if t == target)
    if isinstance(target, FunT):
        return n + sum(1 for c in partial_candidates(target, ctx.env) if c[1] == 0)
    return n + len(ctx.pool(target))


def _tree(target, scope, max_depth, rng, ctx, full, var_prob=0.7) -> Expr:
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    for _ in range(50):
        try:
            return _gen(target, tuple(scope), max_depth, rng, ctx, full, var_prob)
        except _DeadEnd:
            continue
    raise UnsatisfiableType(f"no program of type {target} under depth {max_depth}")


def grow_tree(target, scope, max_depth, rng, ctx, var_prob=0.7) -> Expr:
    """Random tree of depth <= max_depth; interior nodes appear with
    probability proportional to the operator share of the candidate set."""
    return _tree(target, scope, max_depth, rng, ctx, False, var_prob)


def full_tree(target, scope, max_depth, rng, ctx, var_prob=0.7) -> Expr:
    """Random tree reaching max_depth along every path where an operator of
    the needed type exists."""
    return _tree(target, scope, max_depth, rng, ctx, True, var_prob)


def _gen_slot(spec: SlotSpec, depth, rng, ctx, full, cfg) -> Expr:
    return _tree(spec.out_type, spec.scope, depth, rng, ctx, full, cfg.var_prob)


def init_population(inst: PatternInstance, cfg: GpConfig, rng, ctx) -> list[Individual]:
    """Ramped half and half: even cycling over (method x ramp depth) cells,
    every slot generated independently."""
    cells = [(full, d) for full in (False, True) for d in cfg.ramp_depths]
    pop = []
    for idx in range(cfg.pop_size):
        full, depth = cells[idx % len(cells)]
        depth = min(depth, cfg.max_slot_depth)
        # a shallow ramp cell may be unsatisfiable for some slot types
        # (e.g. pair-typed output needs depth 2); restart one level deeper
        while True:
            try:
                slots = tuple(
                    _gen_slot(spec, depth, rng, ctx, full, cfg) for spec in inst.slots
                )
                break
            except UnsatisfiableType:
                if depth >= cfg.max_slot_depth:
                    raise
                depth += 1
        pop.append(Individual(slots))
    return pop


def tournament_select(pop: Sequence[Individual], k: int, rng) -> Individual:
    """k uniform draws with replacement; lowest fitness wins, ties broken by
    smaller program, then by draw order."""
    best = None
    for _ in range(k):
        cand = pop[rng.randrange(len(pop))]
        if (
            best is None
            or cand.fitness < best.fitness
            or (cand.fitness == best.fitness and cand.size < best.size)
        ):
            best = cand
    return best


def mutate(ind: Individual, inst: PatternInstance, cfg: GpConfig, rng, ctx) -> Individual:
    """Replaces one uniformly chosen node of one uniformly chosen slot with a
    grown subtree bounded by the remaining depth allowance."""
    slot_idx = rng.randrange(len(ind.slots))
    slot = ind.slots[slot_idx]
    nodes = list(iter_nodes(slot))
    path, node = nodes[rng.randrange(len(nodes))]
    allowance = cfg.max_slot_depth - len(path)
    if allowance < 1:
        allowance = 1
    spec = inst.slots[slot_idx]
    try:
        sub = grow_tree(node.type, spec.scope, allowance, rng, ctx, cfg.var_prob)
    except UnsatisfiableType:
        return Individual(ind.slots)
    new_slots = list(ind.slots)
    new_slots[slot_idx] = replace_at(slot, path, sub)
    return Individual(tuple(new_slots))


def crossover(
    p1: Individual, p2: Individual, inst: PatternInstance, cfg: GpConfig, rng
) -> Individual:
    """One child per call.  Either the whole chosen slot is taken from the
    second parent, or a same-typed subtree of it replaces a subtree of the
    first parent's slot (falling back to the slot swap when no compatible
    node or no depth-respecting pick exists)."""
    slot_idx = rng.randrange(len(p1.slots))

    def whole_swap():
        slots = list(p1.slots)
        slots[slot_idx] = p2.slots[slot_idx]
        return Individual(tuple(slots))

    if rng.random() < 0.5:
        return whole_swap()
    s1, s2 = p1.slots[slot_idx], p2.slots[slot_idx]
    donor_nodes = list(iter_nodes(s2))
    for _ in range(20):
        nodes1 = list(iter_nodes(s1))
        path, node = nodes1[rng.randrange(len(nodes1))]
        matches = [n for _, n in donor_nodes if n.type == node.type]
        if not matches:
            return whole_swap()
        sub = matches[rng.randrange(len(matches))]
        if len(path) + sub.depth <= cfg.max_slot_depth:
            slots = list(p1.slots)
            slots[slot_idx] = replace_at(s1, path, sub)
            return Individual(tuple(slots))
    return whole_swap()


@dataclass
class RunResult:
    champion: Individual
    evals_used: int
    generations: int
    stopped_early: bool


class Evaluator:
    """Compiles individuals and scores them on the training rows through the
    active engine."""

    def __init__(self, inst: PatternInstance, cases, metric, limits: Limits,
                 debug_typecheck: bool = False):
        self.inst = inst
        self.kind_id = inst.kind.engine_id
        self.scope_names = [spec.scope_names() for spec in inst.slots]
        self.cases = list(cases)
        self.metric = metric
        self.limits = limits.as_tuple()
        self.debug_typecheck = debug_typecheck

    def compile(self, ind: Individual):
        return [
            compile_expr(e, names) for e, names in zip(ind.slots, self.scope_names)
        ]

    def evaluate(self, ind: Individual) -> float:
        if self.debug_typecheck:
            check_slots(self.inst, ind.slots)
        fitness, n_zero = engine.run_fitness(
            self.kind_id, self.compile(ind), self.cases, self.metric, self.limits
        )
        ind.fitness = fitness
        ind.n_zero = n_zero
        return fitness

    def fitness_of(self, slots: tuple[Expr, ...]) -> float:
        compiled = [compile_expr(e, n) for e, n in zip(slots, self.scope_names)]
        fitness, _ = engine.run_fitness(
            self.kind_id, compiled, self.cases, self.metric, self.limits
        )
        return fitness


def refine(ind: Individual, inst: PatternInstance, evaluator: Evaluator) -> Individual:
    """Greedy post-run simplification: walking each slot from the root,
    replace a node with its best same-typed child while training fitness does
    not worsen, re-examining the replacement before descending."""
    if ind.fitness is None:
        evaluator.evaluate(ind)
    slots = list(ind.slots)
    fit = ind.fitness

    def try_path(slot_idx: int, path) -> tuple:
        nonlocal fit
        while True:
            node = node_at(slots[slot_idx], path)
            kids = (
                node.args if isinstance(node, App)
                else node.supplied if isinstance(node, PartialApp)
                else ()
            )
            best_child = None
            best_fit = fit
            for child in kids:
                if child.type != node.type:
                    continue
                trial = list(slots)
                trial[slot_idx] = replace_at(slots[slot_idx], path, child)
                f = evaluator.fitness_of(tuple(trial))
                if f <= best_fit and (best_child is None or f < best_fit):
                    best_child, best_fit = child, f
            if best_child is None:
                return node
            slots[slot_idx] = replace_at(slots[slot_idx], path, best_child)
            fit = best_fit

    def walk(slot_idx: int, path):
        node = try_path(slot_idx, path)
        kids = (
            node.args if isinstance(node, App)
            else node.supplied if isinstance(node, PartialApp)
            else ()
        )
        for i in range(len(kids)):
            walk(slot_idx, path + (i,))

    for k in range(len(slots)):
        walk(k, ())
    out = Individual(tuple(slots))
    out.fitness = fit
    evaluator.evaluate(out)  # rescore: refined champion's recorded fitness
    return out


def run(
    inst: PatternInstance,
    problem,
    cfg: GpConfig,
    limits: Limits = Limits(),
    progress: Optional[Callable] = None,
    dataset=None,
) -> RunResult:
    """Full generational loop.  Each individual evaluation debits one from
    the evaluation budget; the population is replaced wholesale each
    generation; stops early on a perfect training score; the best-ever
    individual is refined before being returned."""
    from .benchmark import materialize, metric_descriptor

    rng = random.Random(cfg.rng_seed)
    ctx = GenContext.for_instance(inst, problem.allowed_types, problem.extra_consts)
    if dataset is None:
        dataset = materialize(problem, cfg.rng_seed)
    cases = dataset.train_cases()
    evaluator = Evaluator(
        inst, cases, metric_descriptor(problem.metric), limits, cfg.debug_typecheck
    )

    pop = init_population(inst, cfg, rng, ctx)
    best: Optional[Individual] = None
    evals_used = 0
    generations = 0
    stopped_early = False

    while True:
        generations += 1
        for ind in pop:
            if evals_used >= cfg.max_evaluations:
                break
            evaluator.evaluate(ind)
            evals_used += 1
            if best is None or ind.fitness < best.fitness:
                best = ind
        if progress is not None:
            scored = [i.fitness for i in pop if i.evaluated]
            progress(generations, best.fitness, sum(scored) / len(scored), evals_used)
        if best is not None and best.fitness == 0.0:
            stopped_early = True
            break
        if evals_used + cfg.pop_size > cfg.max_evaluations:
            break
        offspring = []
        for _ in range(cfg.pop_size):
            if rng.random() < cfg.crossover_rate:
                a = tournament_select(pop, cfg.tournament_k, rng)
                b = tournament_select(pop, cfg.tournament_k, rng)
                offspring.append(crossover(a, b, inst, cfg, rng))
            else:
                a = tournament_select(pop, cfg.tournament_k, rng)
                offspring.append(mutate(a, inst, cfg, rng, ctx))
        pop = offspring

    champion = refine(best, inst, evaluator)
    if cfg.debug_typecheck:
        check_slots(inst, champion.slots)
    return RunResult(champion, evals_used, generations, stopped_early)
