"""Command-line interface.

Commands: ``gen`` emits instances, ``solve`` runs the solver for a constraint
family, ``verify`` checks (delta, alpha)-core membership, ``fractional`` and
``mpf`` compute the fractional benchmarks, ``round`` runs the randomized
rounding pipeline, and ``bench`` sweeps seeded pools into CSV rows. Failures
exit nonzero with a machine-readable JSON error on stderr: validation 2,
size caps 3, convergence 4, infeasibility 5.
"""

import argparse
import csv
import io
import json
import sys
import time

from .errors import CoreFairError, ValidationError
from .fractional import fractional_mnw, mpf
from .generators import generate, generator_names
from .instance import Matching, Packing, normalize_utilities
from .matching import local_search_matching
from .matroid import local_search_matroid
from .reports import dump_json, jsonable
from .rounding import RoundingConfig, round_outcome, solve_packing
from .serialize import instance_to_json, load_instance
from .verifier import alpha_achieved, find_blocking_coalition


def _parse_value(text):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _parse_params(pairs):
    params = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValidationError(f"expected key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        params[key] = _parse_value(value)
    return params


def _load(args):
    if getattr(args, "instance", None):
        inst = load_instance(args.instance)
    elif getattr(args, "gen", None):
        name, *pairs = args.gen
        inst = generate(name, **_parse_params(pairs))
    else:
        raise ValidationError("provide --instance FILE or --gen NAME [key=val ...]")
    return normalize_utilities(inst)


def _emit(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _require_seed(args):
    if args.seed is None:
        raise ValidationError("--seed is required for randomized commands")
    return int(args.seed)


def _cmd_gen(args):
    inst = generate(args.name, **_parse_params(args.params))
    _emit(args, instance_to_json(inst))
    return 0


def _cmd_solve(args):
    inst = _load(args)
    if args.constraint == "matroid":
        report = local_search_matroid(inst, epsilon=args.epsilon)
    elif args.constraint == "matching":
        report = local_search_matching(inst, delta=args.delta)
    elif args.constraint == "packing":
        report = solve_packing(
            inst,
            delta=args.delta,
            seed=_require_seed(args),
            retries=args.retries,
            epsilon=args.epsilon if args.epsilon is not None else 0.01,
        )
    else:
        raise ValidationError(f"unknown solver family {args.constraint!r}")
    _emit(args, report.to_json())
    return 0


def _cmd_verify(args):
    inst = _load(args)
    if args.mode == "fractional":
        outcome = [float(v) for v in args.outcome.split(",")] if args.outcome else []
        import numpy as np

        outcome = np.asarray(outcome, dtype=float)
    else:
        outcome = (
            tuple(int(v) for v in args.outcome.split(",") if v != "")
            if args.outcome
            else ()
        )
    certificate = find_blocking_coalition(
        inst,
        outcome,
        delta=args.delta,
        alpha=args.alpha,
        mode=args.mode,
        allow_independent=args.independent_deviations,
    )
    _emit(args, certificate.to_json())
    return 0


def _cmd_fractional(args):
    inst = _load(args)
    weights, certificate = fractional_mnw(
        inst, delta=args.delta, epsilon=args.epsilon
    )
    payload = {
        "weights": jsonable(weights),
        "utilities": jsonable(certificate.utilities),
        "score": certificate.score,
        "threshold": certificate.threshold,
        "epsilon_prime": certificate.epsilon_prime,
        "worst_deviation": jsonable(certificate.worst_deviation),
        "rounds": len(certificate.ascent_trace),
    }
    _emit(args, dump_json(payload))
    return 0


def _cmd_mpf(args):
    inst = _load(args)
    result = mpf(inst)
    payload = {
        "value": result.value,
        "outcome": jsonable(result.outcome),
        "slacks": jsonable(result.slacks),
        "agent_optima": jsonable(result.agent_optima),
        "degenerate": result.degenerate,
    }
    _emit(args, dump_json(payload))
    return 0


def _cmd_round(args):
    inst = _load(args)
    seed = _require_seed(args)
    epsilon = args.epsilon if args.epsilon is not None else 0.01
    weights, _ = fractional_mnw(inst, delta=args.delta, epsilon=epsilon)
    fair = mpf(inst)
    config = RoundingConfig(delta=args.delta, seed=seed, retries=args.retries)
    report = round_outcome(
        inst,
        weights,
        fair.outcome,
        config,
        guarantee_value=fair.value,
        optima=fair.agent_optima,
    )
    _emit(args, report.to_json())
    return 0


_BENCH_FIELDS = (
    "instance_id",
    "solver",
    "delta",
    "alpha_achieved",
    "iterations",
    "wall_time_s",
    "seed",
)


def _bench_rows(args):
    seed = _require_seed(args)
    rows = []
    for index in range(args.trials):
        instance_seed = seed + index
        instance_id = f"{args.suite}-{index:04d}"
        started = time.perf_counter()
        if args.suite == "matroid":
            inst = generate("random_matroid", seed=instance_seed)
            epsilon = args.epsilon if args.epsilon is not None else 0.1
            report = local_search_matroid(inst, epsilon=epsilon)
            delta = 0.0
        elif args.suite == "matching":
            inst = generate("random_matching", seed=instance_seed)
            delta = args.delta if args.delta is not None else 1.0
            report = local_search_matching(inst, delta=delta)
        elif args.suite == "packing":
            inst = generate("random_knapsack", seed=instance_seed)
            delta = args.delta if args.delta is not None else 0.5
            report = solve_packing(inst, delta=delta, seed=instance_seed)
        else:
            raise ValidationError(f"unknown bench suite {args.suite!r}")
        achieved = alpha_achieved(inst, report.outcome, delta)
        elapsed = time.perf_counter() - started
        rows.append(
            {
                "instance_id": instance_id,
                "solver": report.solver,
                "delta": delta,
                "alpha_achieved": achieved,
                "iterations": report.iterations,
                "wall_time_s": f"{elapsed:.6f}" if args.timing else "",
                "seed": instance_seed,
            }
        )
    return sorted(rows, key=lambda row: row["instance_id"])


def _cmd_bench(args):
    rows = _bench_rows(args)
    if args.format == "json":
        _emit(args, dump_json(rows))
        return 0
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=_BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _emit(args, buffer.getvalue())
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="corefair",
        description="Approximate-core solvers and verifiers for public goods",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, instance=True):
        if instance:
            p.add_argument("--instance", help="instance JSON file")
            p.add_argument(
                "--gen",
                nargs="+",
                metavar=("NAME", "key=val"),
                help=f"generator name plus key=val parameters; one of "
                f"{', '.join(generator_names())}",
            )
        p.add_argument("--out", help="write output to a file instead of stdout")

    p_gen = sub.add_parser("gen", help="emit a generated instance as JSON")
    p_gen.add_argument("name", help=f"one of {', '.join(generator_names())}")
    p_gen.add_argument("params", nargs="*", metavar="key=val")
    add_common(p_gen, instance=False)
    p_gen.set_defaults(func=_cmd_gen)

    p_solve = sub.add_parser("solve", help="run a solver on an instance")
    add_common(p_solve)
    p_solve.add_argument(
        "--constraint", required=True, choices=("matroid", "matching", "packing")
    )
    p_solve.add_argument("--epsilon", type=float, default=None)
    p_solve.add_argument("--delta", type=float, default=0.5)
    p_solve.add_argument("--seed", type=int, default=None)
    p_solve.add_argument("--retries", type=int, default=200)
    p_solve.set_defaults(func=_cmd_solve, epsilon_default=0.1)

    p_verify = sub.add_parser("verify", help="check (delta, alpha)-core membership")
    add_common(p_verify)
    p_verify.add_argument("--outcome", required=True, help="comma-separated")
    p_verify.add_argument("--delta", type=float, required=True)
    p_verify.add_argument("--alpha", type=float, required=True)
    p_verify.add_argument("--mode", choices=("integral", "fractional"), default="integral")
    p_verify.add_argument("--independent-deviations", action="store_true")
    p_verify.set_defaults(func=_cmd_verify)

    p_frac = sub.add_parser("fractional", help="certified fractional core point")
    add_common(p_frac)
    p_frac.add_argument("--delta", type=float, required=True)
    p_frac.add_argument("--epsilon", type=float, required=True)
    p_frac.set_defaults(func=_cmd_fractional)

    p_mpf = sub.add_parser("mpf", help="fair-share guarantee benchmark")
    add_common(p_mpf)
    p_mpf.set_defaults(func=_cmd_mpf)

    p_round = sub.add_parser("round", help="randomized rounding pipeline")
    add_common(p_round)
    p_round.add_argument("--delta", type=float, required=True)
    p_round.add_argument("--epsilon", type=float, default=None)
    p_round.add_argument("--seed", type=int, default=None)
    p_round.add_argument("--retries", type=int, default=200)
    p_round.set_defaults(func=_cmd_round)

    p_bench = sub.add_parser("bench", help="seeded solver sweep to CSV")
    p_bench.add_argument(
        "--suite", required=True, choices=("matroid", "matching", "packing")
    )
    p_bench.add_argument("--trials", type=int, required=True)
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.add_argument("--epsilon", type=float, default=None)
    p_bench.add_argument("--delta", type=float, default=None)
    p_bench.add_argument(
        "--timing",
        action="store_true",
        help="fill the wall_time_s column (breaks byte-for-byte determinism)",
    )
    p_bench.add_argument("--format", choices=("csv", "json"), default="csv")
    p_bench.add_argument("--out", help="write output to a file instead of stdout")
    p_bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "constraint", None) == "matroid" and args.epsilon is None:
        args.epsilon = 0.1
    try:
        return args.func(args)
    except CoreFairError as exc:
        payload = {
            "error": {
                "kind": exc.kind,
                "code": exc.exit_code,
                "message": str(exc),
            }
        }
        sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
