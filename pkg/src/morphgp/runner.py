"""Campaign orchestration: pattern escalation over seeds, run records,
success-rate reporting and champion export.

A campaign walks the patterns in complexity order, skipping inapplicable
ones, runs every seed for the current pattern, and advances only while no
seed has succeeded.  Records append to a JSON-lines file; reruns skip
(problem, pattern, seed) triples already recorded, so campaigns resume.
"""
from __future__ import annotations

import dataclasses
import json
import logging
import multiprocessing
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import evolve
from .benchmark import Problem, materialize, test_errors
from .evolve import GpConfig
from .problems import get_problem
from .schemes import Limits, PatternKind, applicable, instantiate
from .syntax import format_champion, parse_champion_header, parse_scaffold

log = logging.getLogger("morphgp")

PATTERN_ORDER = tuple(PatternKind)


@dataclass(frozen=True)
class Campaign:
    problem: str
    pattern_policy: Optional[PatternKind] = None  # None = auto escalation
    seeds: tuple[int, ...] = tuple(range(30))
    cfg: GpConfig = GpConfig()
    limits: Limits = Limits()
    n_train: Optional[int] = None
    n_test: Optional[int] = None
    out_path: Optional[str] = None
    jobs: int = 1
    unbound_override: Optional[object] = None

    def __post_init__(self):
        if not self.seeds or len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be non-empty and distinct")


@dataclass(frozen=True)
class RunRecord:
    problem: str
    pattern: str
    seed: int
    success: bool
    evals_used: int
    generations: int
    wall_time_seconds: float
    champion_text: str
    train_fitness: float
    test_errors: int

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)

    @staticmethod
    def from_json(line: str) -> "RunRecord":
        return RunRecord(**json.loads(line))


def run_one(
    problem: Problem,
    kind: PatternKind,
    seed: int,
    cfg: GpConfig,
    limits: Limits = Limits(),
    n_train: Optional[int] = None,
    n_test: Optional[int] = None,
    unbound=None,
) -> RunRecord:
    """One deterministic GP run: materialize the seed's dataset, evolve,
    refine, score the champion on the held-out rows."""
    if unbound is None and kind.needs_unbound:
        unbound = problem.unbound_for(kind)
    inst = instantiate(kind, problem.signature, unbound)
    dataset = materialize(problem, seed, n_train, n_test)
    run_cfg = dataclasses.replace(cfg, rng_seed=seed)
    start = time.perf_counter()
    result = evolve.run(inst, problem, run_cfg, limits, dataset=dataset)
    wall = time.perf_counter() - start
    champ = result.champion
    errors = test_errors(champ.slots, inst, dataset.test, problem.metric, limits)
    success = champ.fitness == 0.0 and errors == 0
    record = RunRecord(
        problem=problem.name,
        pattern=kind.label,
        seed=seed,
        success=success,
        evals_used=result.evals_used,
        generations=result.generations,
        wall_time_seconds=round(wall, 3),
        champion_text=format_champion(problem.name, inst, champ.slots, seed),
        train_fitness=champ.fitness,
        test_errors=errors,
    )
    log.info(
        "%s/%s seed=%d success=%s train=%.1f test_errors=%d evals=%d gens=%d (%.1fs)",
        problem.name, kind.label, seed, success, champ.fitness, errors,
        result.evals_used, result.generations, wall,
    )
    return record


def _worker(payload):
    name, kind_value, seed, cfg, limits, n_train, n_test, unbound = payload
    return run_one(
        get_problem(name), PatternKind(kind_value), seed, cfg, limits,
        n_train, n_test, unbound,
    )


def _run_seeds(campaign: Campaign, problem: Problem, kind: PatternKind, seeds, sink):
    records = []
    unbound = campaign.unbound_override
    payloads = [
        (problem.name, int(kind), s, campaign.cfg, campaign.limits,
         campaign.n_train, campaign.n_test, unbound)
        for s in seeds
    ]
    if campaign.jobs > 1 and len(payloads) > 1:
        with multiprocessing.Pool(min(campaign.jobs, len(payloads))) as pool:
            for rec in pool.imap(_worker, payloads):
                records.append(rec)
                sink(rec)
    else:
        for p in payloads:
            rec = _worker(p)
            records.append(rec)
            sink(rec)
    return records


def escalate(campaign: Campaign, existing: Sequence[RunRecord] = (), sink=None) -> list[RunRecord]:
    """Auto mode: walk patterns in rank order, run all seeds per applicable
    pattern, stop after the first pattern with at least one success.
    `existing` records count toward the stopping rule and their (pattern,
    seed) pairs are not rerun."""
    problem = get_problem(campaign.problem)
    sink = sink or (lambda rec: None)
    done = {(r.pattern, r.seed) for r in existing if r.problem == problem.name}
    records = [r for r in existing if r.problem == problem.name]

    kinds = (
        [campaign.pattern_policy]
        if campaign.pattern_policy is not None
        else list(PATTERN_ORDER)
    )
    out = list(records)
    for kind in kinds:
        if not applicable(kind, problem.signature):
            if campaign.pattern_policy is not None:
                raise ValueError(
                    f"{kind.label} is not applicable to {problem.name}"
                )
            continue
        pending = [s for s in campaign.seeds if (kind.label, s) not in done]
        if pending:
            out.extend(_run_seeds(campaign, problem, kind, pending, sink))
        kind_records = [r for r in out if r.pattern == kind.label]
        if campaign.pattern_policy is None and any(r.success for r in kind_records):
            break
    return out


def load_records(path) -> list[RunRecord]:
    try:
        with open(path) as fh:
            return [RunRecord.from_json(ln) for ln in fh if ln.strip()]
    except FileNotFoundError:
        return []


def run_campaign(campaign: Campaign) -> list[RunRecord]:
    """Escalate with resume-from-file semantics; each finished record is
    appended to the output path immediately (single writer)."""
    existing = load_records(campaign.out_path) if campaign.out_path else []
    if campaign.out_path:
        fh = open(campaign.out_path, "a")

        def sink(rec):
            fh.write(rec.to_json() + "\n")
            fh.flush()

    else:
        fh = None
        sink = None
    try:
        return escalate(campaign, existing, sink)
    finally:
        if fh:
            fh.close()


def success_table(records: Sequence[RunRecord]) -> dict[str, dict[str, object]]:
    """problem -> pattern label -> integer success percentage over the seeds
    run for that cell; never-run cells are absent; 'best' holds the row max."""
    table: dict[str, dict[str, object]] = {}
    cells: dict[tuple[str, str], list[bool]] = {}
    for r in records:
        cells.setdefault((r.problem, r.pattern), []).append(r.success)
    for (problem, pattern), wins in sorted(cells.items()):
        pct = round(100 * sum(wins) / len(wins))
        table.setdefault(problem, {})[pattern] = pct
    for problem, row in table.items():
        row["best"] = max(v for k, v in row.items() if k != "best")
    return table


def report_markdown(records: Sequence[RunRecord]) -> str:
    table = success_table(records)
    labels = [k.label for k in PATTERN_ORDER]
    head = "| Dataset | " + " | ".join(labels) + " | Best |"
    sep = "|" + "---|" * (len(labels) + 2)
    lines = [head, sep]
    for problem in sorted(table):
        row = table[problem]
        cells = [str(row.get(lbl, "--")) for lbl in labels]
        lines.append(f"| {problem} | " + " | ".join(cells) + f" | {row['best']} |")
    return "\n".join(lines)


def report_csv(records: Sequence[RunRecord]) -> str:
    table = success_table(records)
    labels = [k.label for k in PATTERN_ORDER]
    lines = ["dataset," + ",".join(labels) + ",best"]
    for problem in sorted(table):
        row = table[problem]
        cells = [str(row.get(lbl, "--")) for lbl in labels]
        lines.append(f"{problem}," + ",".join(cells) + f",{row['best']}")
    return "\n".join(lines)


def score_champion_file(text: str, dataset=None, limits: Limits = Limits()):
    """Re-scores a pretty-printed champion: returns (train_fitness,
    test_errors, meta).  The dataset defaults to the one named by the
    champion's problem/seed header."""
    from .benchmark import fitness as fitness_of

    meta, body = parse_champion_header(text)
    problem = get_problem(meta["problem"])
    kind: PatternKind = meta["pattern"]
    unbound = meta.get("unbound")
    if unbound is None and kind.needs_unbound:
        unbound = problem.unbound_for(kind)
    inst = instantiate(kind, problem.signature, unbound)
    slots = parse_scaffold(body, inst)
    if dataset is None:
        seed = meta.get("seed", 0)
        dataset = materialize(problem, seed, meta.get("n_train"), meta.get("n_test"))
    train_fit = fitness_of(slots, inst, dataset.train, problem.metric, limits)
    errors = test_errors(slots, inst, dataset.test, problem.metric, limits)
    return train_fit, errors, meta
