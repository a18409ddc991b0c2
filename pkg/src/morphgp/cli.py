"""Command-line interface.

Subcommands:
  run      evolve a problem over seeds (auto pattern escalation or fixed)
  datagen  materialize a dataset to JSON-lines
  eval     re-score a pretty-printed champion file
  report   aggregate run records into a success-rate table
  bench    compare the native and pure evaluation engines
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .benchmark import materialize, write_dataset, read_dataset
from .evolve import GpConfig
from .problems import get_problem, problem_names
from .runner import (
    Campaign,
    Limits,
    load_records,
    report_csv,
    report_markdown,
    run_campaign,
)
from .schemes import PatternKind
from .types import parse_type

log = logging.getLogger("morphgp")

_CONFIG_KEYS = {
    "pop": int, "max_evals": int, "seeds": int, "jobs": int,
    "train": int, "test": int, "problem": str, "pattern": str,
    "out": str, "unbound_type": str, "tournament": int,
    "crossover_rate": float, "max_depth": int, "iter_cap": int,
}


def read_config(path: str) -> dict:
    """Flat key = value file mirroring the run flags; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, raw = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = _CONFIG_KEYS[key](raw.strip())
    return out


def _add_run_flags(p: argparse.ArgumentParser):
    p.add_argument("--problem", help="problem name")
    p.add_argument("--pattern", default="auto",
                   help="auto|noscheme|cata|curriedcata|ana|accu|hylo")
    p.add_argument("--seeds", type=int, default=30, help="number of seeds (0..N-1)")
    p.add_argument("--pop", type=int, help="population size")
    p.add_argument("--max-evals", type=int, help="evaluation budget")
    p.add_argument("--tournament", type=int, help="tournament size")
    p.add_argument("--crossover-rate", type=float)
    p.add_argument("--max-depth", type=int, help="maximum slot depth")
    p.add_argument("--train", type=int, help="training rows (default: recommended)")
    p.add_argument("--test", type=int, help="test rows (default: recommended)")
    p.add_argument("--iter-cap", type=int, help="unfold iteration cap")
    p.add_argument("--unbound-type", help="override the Accu/Hylo unbound type")
    p.add_argument("--out", help="run-record JSON-lines path (appended, resumable)")
    p.add_argument("--jobs", type=int, default=1, help="parallel seeds")
    p.add_argument("--config", help="flat key = value config file")


def _campaign_from_args(args) -> Campaign:
    merged = {}
    if args.config:
        merged.update(read_config(args.config))
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None and key != "pattern":
            merged[key] = flag
    if args.pattern != "auto" or "pattern" not in merged:
        merged["pattern"] = args.pattern
    if not merged.get("problem"):
        raise ValueError("--problem is required (or set it in --config)")
    problem = merged["problem"]
    get_problem(problem)  # validates the name, lists alternatives on error
    pattern = merged["pattern"]
    policy = None if pattern == "auto" else PatternKind.from_label(pattern)
    cfg_fields = {}
    if merged.get("pop"):
        cfg_fields["pop_size"] = merged["pop"]
    if merged.get("max_evals"):
        cfg_fields["max_evaluations"] = merged["max_evals"]
    if merged.get("tournament"):
        cfg_fields["tournament_k"] = merged["tournament"]
    if merged.get("crossover_rate") is not None:
        cfg_fields["crossover_rate"] = merged["crossover_rate"]
    if merged.get("max_depth"):
        cfg_fields["max_slot_depth"] = merged["max_depth"]
    limits = Limits()
    if merged.get("iter_cap"):
        limits = dataclasses.replace(limits, iter_cap=merged["iter_cap"])
    unbound = None
    if merged.get("unbound_type"):
        unbound = parse_type(merged["unbound_type"])
    return Campaign(
        problem=problem,
        pattern_policy=policy,
        seeds=tuple(range(merged.get("seeds", 30))),
        cfg=GpConfig(**cfg_fields),
        limits=limits,
        n_train=merged.get("train"),
        n_test=merged.get("test"),
        out_path=merged.get("out"),
        jobs=merged.get("jobs", 1),
        unbound_override=unbound,
    )


def cmd_run(args) -> int:
    campaign = _campaign_from_args(args)
    records = run_campaign(campaign)
    print(report_markdown(records))
    return 0


def cmd_datagen(args) -> int:
    problem = get_problem(args.problem)
    ds = materialize(problem, args.seed, args.train, args.test)
    with open(args.out, "w") as fh:
        write_dataset(ds, problem.signature, fh)
    print(f"wrote {len(ds.train)} train + {len(ds.test)} test rows to {args.out}")
    return 0


def cmd_eval(args) -> int:
    from .runner import score_champion_file

    with open(args.champion) as fh:
        text = fh.read()
    dataset = None
    if args.data:
        with open(args.data) as fh:
            dataset, _ = read_dataset(fh)
    train_fit, errors, meta = score_champion_file(text, dataset)
    print(f"problem: {meta['problem']}  pattern: {meta['pattern'].label}")
    print(f"train fitness: {train_fit}")
    print(f"test errors: {errors}")
    return 0


def cmd_report(args) -> int:
    records = load_records(args.records)
    if not records:
        print(f"no records in {args.records}", file=sys.stderr)
        return 1
    text = report_csv(records) if args.format == "csv" else report_markdown(records)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_bench(args) -> int:
    from .bench import run_benchmark

    run_benchmark(repeats=args.repeats)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="morphgp",
        description="Evolve typed functional programs inside recursion-scheme scaffolds.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a synthesis campaign")
    _add_run_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_gen = sub.add_parser("datagen", help="materialize a dataset")
    p_gen.add_argument("--problem", required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--train", type=int)
    p_gen.add_argument("--test", type=int)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_datagen)

    p_eval = sub.add_parser("eval", help="score a champion file")
    p_eval.add_argument("--champion", required=True)
    p_eval.add_argument("--data", help="dataset JSON-lines (default: regenerate)")
    p_eval.set_defaults(func=cmd_eval)

    p_rep = sub.add_parser("report", help="aggregate run records")
    p_rep.add_argument("--records", required=True)
    p_rep.add_argument("--format", choices=("markdown", "csv"), default="markdown")
    p_rep.add_argument("--out")
    p_rep.set_defaults(func=cmd_report)

    p_bench = sub.add_parser("bench", help="compare evaluation engines")
    p_bench.add_argument("--repeats", type=int, default=3)
    p_bench.set_defaults(func=cmd_bench)

    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else
        logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
