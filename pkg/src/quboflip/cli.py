"""Command-line benchmark harness.

Subcommands: generate, enumerate, sample-greedy, compare, oracle, transform,
grid, ttest. Exit codes: 0 success, 2 usage/argument error, 3 parse failure,
4 I/O failure, 5 size cap exceeded, 6 internal verification failure.

Structured outputs (solution files, grid result records) never contain
wall-clock values, so runs with seeded iteration budgets are byte-identical;
timings appear only in the human-readable summaries.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .analysis import (
    TransformConfig,
    frequency,
    improvement_pct,
    paired_t_test,
    t_critical_value,
    transform,
)
from .budget import Budget
from .enumeration import EnumerationConfig, VerificationError, enumerate_local_optima
from .io import (
    GeneratorConfig,
    ParseError,
    generate_instance,
    parse_instances,
    parse_solutions,
    write_instance,
    write_solutions,
)
from .model import LocalOptimaSet, QuboInstance, Solution, objective_value
from .oracle import CapExceededError, brute_force_local_optima
from .tabu import EliteSet, TabuParams, greedy_descent, run_variant, sample_greedy_restarts, tabu_search

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_IO = 4
EXIT_CAP = 5
EXIT_INTERNAL = 6

DEFAULT_ALPHAS = ["0.99", "0.975", "0.95"]
DEFAULT_DELTA_PCTS = [2, 5, 10]


def _load_instances(path: str, negate: bool) -> list[QuboInstance]:
    text = Path(path).read_text()
    instances = parse_instances(text, negate=negate)
    stem = Path(path).stem
    named = []
    for idx, inst in enumerate(instances, start=1):
        name = stem if len(instances) == 1 else f"{stem}#{idx}"
        named.append(QuboInstance(n=inst.n, linear=inst.linear, pairs=inst.pairs, name=name))
    return named


def _load_one(path: str, negate: bool, index: int) -> QuboInstance:
    instances = _load_instances(path, negate)
    if not 1 <= index <= len(instances):
        raise ValueError(f"--index {index} out of range; file holds {len(instances)} instance(s)")
    return instances[index - 1]


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _report_line(label: str, optima: LocalOptimaSet) -> str:
    count = len(optima)
    if count == 0:
        return f"{label}: solutions=0 mu_d=n/a mu_obj=n/a"
    mu_obj = f"{float(optima.mean_objective()):.4f}"
    mu_d = f"{float(optima.mean_pairwise_distance()):.4f}" if count >= 2 else "n/a"
    return f"{label}: solutions={count} mu_d={mu_d} mu_obj={mu_obj}"


def _require_budget(args) -> Budget:
    if args.iters is None and args.time is None:
        raise ValueError("a budget is required: pass --iters or --time")
    return Budget(max_units=args.iters, max_seconds=args.time)


# -- subcommands -----------------------------------------------------------


def cmd_generate(args) -> int:
    config = GeneratorConfig(
        n=args.n,
        m=args.m,
        lo=args.lo,
        hi=args.hi,
        diagonal_density=args.diag_density,
        seed=args.seed,
    )
    _emit(write_instance(generate_instance(config)), args.out)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    instance = _load_one(args.instance, args.negate, args.index)
    config = EnumerationConfig(
        top_k=args.top_k,
        max_nodes=args.iters,
        max_seconds=args.time,
        seed=args.seed,
        strict=args.strict,
    )
    optima = enumerate_local_optima(instance, config)
    _emit(write_solutions(optima), args.out)
    print(_report_line(instance.name or "cp", optima))
    return EXIT_OK


def cmd_oracle(args) -> int:
    instance = _load_one(args.instance, args.negate, args.index)
    optima = brute_force_local_optima(instance, strict=args.strict)
    _emit(write_solutions(optima), args.out)
    print(_report_line(instance.name or "oracle", optima))
    return EXIT_OK


def cmd_sample_greedy(args) -> int:
    instance = _load_one(args.instance, args.negate, args.index)
    budget = _require_budget(args)
    optima = sample_greedy_restarts(instance, budget, args.top_k, args.seed)
    _emit(write_solutions(optima), args.out)
    print(_report_line(instance.name or "greedy", optima))
    return EXIT_OK


def cmd_compare(args) -> int:
    instance = _load_one(args.instance, args.negate, args.index)
    if args.iters is None and args.time is None:
        raise ValueError("a budget is required: pass --iters or --time")
    config = EnumerationConfig(
        top_k=args.top_k, max_nodes=args.iters, max_seconds=args.time, seed=args.seed
    )
    cp = enumerate_local_optima(instance, config)
    greedy = sample_greedy_restarts(
        instance, Budget(max_units=args.iters, max_seconds=args.time), args.top_k, args.seed
    )
    if args.out_cp is not None:
        Path(args.out_cp).write_text(write_solutions(cp))
    if args.out_greedy is not None:
        Path(args.out_greedy).write_text(write_solutions(greedy))
    print(_report_line("cp", cp))
    print(_report_line("greedy", greedy))
    return EXIT_OK


def cmd_transform(args) -> int:
    instance = _load_one(args.instance, args.negate, args.index)
    optima = parse_solutions(Path(args.solutions).read_text(), instance=instance)
    if len(optima) == 0:
        raise ValueError("solutions file is empty")
    if args.alpha is not None and len(args.alpha) > 1:
        raise ValueError("transform takes a single --alpha")
    profile = frequency(optima)
    config = _transform_config(args.alpha[0] if args.alpha else "0.95", args.delta, args.delta_pct)
    q1, q2 = transform(instance, profile, config)
    out_q1 = args.out_q1 or f"{args.instance}.q1"
    out_q2 = args.out_q2 or f"{args.instance}.q2"
    Path(out_q1).write_text(write_instance(q1))
    Path(out_q2).write_text(write_instance(q2))
    print(f"delta={config.resolve_delta(instance)} q1={out_q1} q2={out_q2}")
    return EXIT_OK


def _transform_config(alpha: str, delta: int | None, delta_pct: int | None) -> TransformConfig:
    if delta is not None and delta_pct is not None:
        raise ValueError("pass either --delta or --delta-pct, not both")
    if delta is not None:
        return TransformConfig(alpha=alpha, delta=delta, delta_mode="absolute")
    if delta_pct is not None:
        return TransformConfig(alpha=alpha, delta=delta_pct, delta_mode="percent")
    return TransformConfig(alpha=alpha, delta=10, delta_mode="percent")


def cmd_ttest(args) -> int:
    rows = []
    for line in Path(args.results).read_text().splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        if record.get("type") == "row":
            rows.append(record)
    pairs = [
        (r["improv_q1"], r["improv_q2"])
        for r in rows
        if r.get("improv_q1") is not None and r.get("improv_q2") is not None
    ]
    if len(pairs) < 2:
        raise ValueError(f"need >= 2 complete result rows, found {len(pairs)}")
    t, df = paired_t_test([p[0] for p in pairs], [p[1] for p in pairs])
    critical = t_critical_value(df)
    verdict = "significant" if abs(t) > critical else "not significant"
    print(f"t={t:.6f} df={df} critical={critical} verdict={verdict}")
    return EXIT_OK


# -- grid -------------------------------------------------------------------


def _cell_seed(base_seed: int, inst_idx: int, alpha_idx: int, delta_idx: int, variant: int) -> int:
    return (
        base_seed
        + 7919 * (inst_idx + 1)
        + 104729 * (alpha_idx + 1)
        + 1299709 * (delta_idx + 1)
        + variant
    )


def _cell_worker(payload) -> int:
    (base, search, elite_members, max_units, max_seconds, seed, params_fields) = payload
    elite = EliteSet(capacity=max(len(elite_members), 1))
    for bits, obj in elite_members:
        elite.add(Solution(bits=bits, objective=obj))
    params = TabuParams(seed=seed, **params_fields)
    budget = Budget(max_units=max_units, max_seconds=max_seconds)
    result = run_variant(base, search, elite, budget, params)
    return result.best.objective


def _build_elite(
    instance, args, inst_idx: int, enum_units: int | None, enum_seconds: float | None
) -> tuple[EliteSet, LocalOptimaSet | None]:
    seed = _cell_seed(args.seed, inst_idx, 0, 0, 7)
    if args.elite == "random":
        rng = random.Random(seed)
        elite = EliteSet(capacity=args.elite_size)
        for _ in range(args.elite_size):
            bits = tuple(rng.randrange(2) for _ in range(instance.n))
            start = Solution(bits=bits, objective=objective_value(instance, bits))
            elite.add(greedy_descent(instance, start))
        return elite, None
    config = EnumerationConfig(
        top_k=args.top_k, max_nodes=enum_units, max_seconds=enum_seconds, seed=seed
    )
    optima = enumerate_local_optima(instance, config)
    elite = EliteSet.from_local_optima(optima, capacity=args.elite_size)
    if len(elite) == 0:
        rng = random.Random(seed)
        bits = tuple(rng.randrange(2) for _ in range(instance.n))
        start = Solution(bits=bits, objective=objective_value(instance, bits))
        elite.add(greedy_descent(instance, start))
    return elite, optima


def cmd_grid(args) -> int:
    if args.iters is None and args.time is None:
        raise ValueError("a per-cell budget is required: pass --iters or --time")
    alphas = args.alpha or list(DEFAULT_ALPHAS)
    if args.delta is not None:
        deltas = [("absolute", d) for d in args.delta]
    else:
        deltas = [("percent", d) for d in (args.delta_pct or list(DEFAULT_DELTA_PCTS))]
    instances: list[QuboInstance] = []
    for path in args.instances:
        instances.extend(_load_instances(path, args.negate))

    n_cells = len(alphas) * len(deltas)
    baseline_units = args.baseline_iters
    if baseline_units is None and args.iters is not None:
        baseline_units = n_cells * args.iters
    baseline_seconds = None if args.time is None else n_cells * args.time
    # The elite-set enumeration gets the same effort as the baseline run
    # unless overridden, mirroring the full-budget extraction of the set L.
    enum_units = args.enum_iters if args.enum_iters is not None else baseline_units
    enum_seconds = baseline_seconds

    params_fields = dict(
        tenure_base=args.tenure_base,
        tenure_span=args.tenure_span,
        backtrack_depth=args.backtrack_depth,
        aspiration=not args.no_aspiration,
    )

    records: list[dict] = []
    table_rows: list[dict] = []
    started = time.monotonic()
    for inst_idx, instance in enumerate(instances):
        elite, optima = _build_elite(instance, args, inst_idx, enum_units, enum_seconds)
        elite_members = tuple((s.bits, s.objective) for s in elite)
        profile = frequency_for(optima, elite)
        baseline_params = TabuParams(
            seed=_cell_seed(args.seed, inst_idx, 0, 0, 5), **params_fields
        )
        baseline = tabu_search(
            instance,
            elite,
            Budget(max_units=baseline_units, max_seconds=baseline_seconds),
            baseline_params,
        )
        obj_q = baseline.best.objective

        tasks = []
        for a_idx, alpha in enumerate(alphas):
            for d_idx, (mode, magnitude) in enumerate(deltas):
                config = TransformConfig(alpha=alpha, delta=magnitude, delta_mode=mode)
                resolved = config.resolve_delta(instance)
                q1, q2 = transform(instance, profile, config)
                for variant, search in (("q1", q1), ("q2", q2)):
                    seed = _cell_seed(args.seed, inst_idx, a_idx, d_idx, 1 if variant == "q1" else 2)
                    payload = (
                        instance,
                        search,
                        elite_members,
                        args.iters,
                        args.time,
                        seed,
                        params_fields,
                    )
                    tasks.append(
                        {
                            "alpha": alpha,
                            "delta_mode": mode,
                            "delta_magnitude": magnitude,
                            "delta": resolved,
                            "variant": variant,
                            "seed": seed,
                            "payload": payload,
                        }
                    )
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                objectives = list(pool.map(_cell_worker, [t["payload"] for t in tasks]))
        else:
            objectives = [_cell_worker(t["payload"]) for t in tasks]

        best = {"q1": None, "q2": None}
        for task, objective in zip(tasks, objectives):
            improv = None
            if obj_q != 0:
                improv = float(improvement_pct(obj_q, objective))
            record = {
                "type": "cell",
                "instance": instance.name,
                "variant": task["variant"],
                "alpha": task["alpha"],
                "delta": task["delta"],
                "delta_mode": task["delta_mode"],
                "delta_magnitude": task["delta_magnitude"],
                "objective": objective,
                "improv_pct": improv,
                "seed": task["seed"],
                "iters": args.iters,
            }
            records.append(record)
            current = best[task["variant"]]
            if current is None or objective > current["objective"]:
                best[task["variant"]] = record
        row = {
            "type": "row",
            "instance": instance.name,
            "obj_q": obj_q,
            "best_q1": best["q1"]["objective"],
            "improv_q1": best["q1"]["improv_pct"],
            "alpha_q1": best["q1"]["alpha"],
            "delta_q1": best["q1"]["delta"],
            "best_q2": best["q2"]["objective"],
            "improv_q2": best["q2"]["improv_pct"],
            "alpha_q2": best["q2"]["alpha"],
            "delta_q2": best["q2"]["delta"],
            "seed": args.seed,
            "cell_iters": args.iters,
            "baseline_iters": baseline_units,
            "top_k": args.top_k,
            "elite": args.elite,
        }
        records.append(row)
        table_rows.append(row)

    text = "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
    if args.out is None:
        sys.stdout.write(text)
        table_stream = sys.stderr
    else:
        Path(args.out).write_text(text)
        table_stream = sys.stdout
    _print_table(table_rows, time.monotonic() - started, table_stream)
    return EXIT_OK


def frequency_for(optima: LocalOptimaSet | None, elite: EliteSet):
    """Profile the enumerated set when present, otherwise the elite members."""
    if optima is not None and len(optima) > 0:
        return frequency(optima)
    return frequency(LocalOptimaSet(elite.members))


def _print_table(rows: list[dict], elapsed: float, stream) -> None:
    def fmt(value) -> str:
        return "n/a" if value is None else f"{value:.2f}"

    header = f"{'instance':<24} {'Obj_Q':>10} {'Improv_Q1':>10} {'(a,d)_Q1':>12} {'Improv_Q2':>10} {'(a,d)_Q2':>12}"
    print(header, file=stream)
    for row in rows:
        print(
            f"{row['instance']:<24} {row['obj_q']:>10} {fmt(row['improv_q1']):>10} "
            f"{'(' + row['alpha_q1'] + ',' + str(row['delta_q1']) + ')':>12} "
            f"{fmt(row['improv_q2']):>10} "
            f"{'(' + row['alpha_q2'] + ',' + str(row['delta_q2']) + ')':>12}",
            file=stream,
        )
    print(f"# {len(rows)} instance(s) in {elapsed:.1f}s", file=stream)


# -- parser -----------------------------------------------------------------


def _add_budget_flags(sub) -> None:
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--iters", type=int, default=None, help="deterministic unit budget")
    group.add_argument("--time", type=float, default=None, help="wall-clock budget in seconds")


def _add_common_instance_flags(sub) -> None:
    sub.add_argument("--negate", action="store_true", help="flip coefficient signs on ingest")
    sub.add_argument("--index", type=int, default=1, help="1-based instance index within the file")
    sub.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quboflip",
        description="One-flip local optima toolkit for QUBO maximization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random benchmark-like instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lo", type=int, default=-100)
    p.add_argument("--hi", type=int, default=100)
    p.add_argument("--diag-density", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("enumerate", help="enumerate one-flip local optima")
    p.add_argument("instance")
    _add_common_instance_flags(p)
    _add_budget_flags(p)
    p.add_argument("--top-k", type=int, default=500)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("oracle", help="brute-force all local optima (n <= 24)")
    p.add_argument("instance")
    _add_common_instance_flags(p)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sample-greedy", help="greedy-restart local optima sampler")
    p.add_argument("instance")
    _add_common_instance_flags(p)
    _add_budget_flags(p)
    p.add_argument("--top-k", type=int, default=500)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sample_greedy)

    p = sub.add_parser("compare", help="enumerator vs greedy sampler under equal budgets")
    p.add_argument("instance")
    _add_common_instance_flags(p)
    _add_budget_flags(p)
    p.add_argument("--top-k", type=int, default=500)
    p.add_argument("--out-cp", default=None)
    p.add_argument("--out-greedy", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("transform", help="reward/penalty transformed matrices Q1/Q2")
    p.add_argument("instance")
    _add_common_instance_flags(p)
    p.add_argument("--solutions", required=True, help="local-optima records for the instance")
    p.add_argument("--alpha", action="append", default=None)
    p.add_argument("--delta", type=int, default=None)
    p.add_argument("--delta-pct", type=int, default=None)
    p.add_argument("--out-q1", default=None)
    p.add_argument("--out-q2", default=None)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("grid", help="full (alpha, delta) experiment grid")
    p.add_argument("instances", nargs="+")
    p.add_argument("--negate", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    _add_budget_flags(p)
    p.add_argument("--baseline-iters", type=int, default=None)
    p.add_argument("--enum-iters", type=int, default=None)
    p.add_argument("--alpha", action="append", default=None, help="repeatable; default 0.99 0.975 0.95")
    p.add_argument("--delta", type=int, action="append", default=None, help="absolute delta grid")
    p.add_argument("--delta-pct", type=int, action="append", default=None, help="percent delta grid")
    p.add_argument("--top-k", type=int, default=500)
    p.add_argument("--elite", choices=("cp", "random"), default="cp")
    p.add_argument("--elite-size", type=int, default=10)
    p.add_argument("--tenure-base", type=int, default=10)
    p.add_argument("--tenure-span", type=int, default=None)
    p.add_argument("--backtrack-depth", type=int, default=20)
    p.add_argument("--no-aspiration", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("ttest", help="paired t-test over grid result improvements")
    p.add_argument("results")
    p.set_defaults(func=cmd_ttest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except VerificationError as exc:
        print(f"internal verification failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
