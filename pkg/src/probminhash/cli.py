"""Command-line interface.

Subcommands: `sketch` computes one signature from "id weight" lines, `mse`,
`bench` and `buffer` run the experiment grids and emit CSV, `equivalence`
verifies the interleaved variants bit-exactly.  Exit codes: 0 on success,
1 on a failed verification, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import EmptyInputError, InvalidParamsError
from .estimate import bbit_reduce
from .harness import (
    ALGORITHM_IDS,
    FIXTURES,
    ExperimentConfig,
    WeightDistributionSpec,
    buffer_csv,
    mse_csv,
    run_buffer_experiment,
    run_equivalence_suite,
    run_mse_experiment,
    run_timing_experiment,
    timing_csv,
)
from .sketch import (
    WEIGHTED_ALGORITHMS,
    WeightedSet,
    minhash,
    oph_densified,
    superminhash,
)

_BASELINES = {"minhash": minhash, "superminhash": superminhash,
              "oph": oph_densified}


def _int_list(text: str):
    return tuple(int(p) for p in text.split(","))


def _str_list(text: str):
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _parse_distribution(text: str) -> WeightDistributionSpec:
    if text == "unweighted":
        return WeightDistributionSpec()
    if text.startswith("pareto:"):
        return WeightDistributionSpec("pareto", float(text.split(":", 1)[1]))
    raise InvalidParamsError(
        f"unknown distribution {text!r} (use 'unweighted' or 'pareto:<a>')")


def _read_weighted_lines(stream):
    entries = []
    for line in stream:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        eid = int(parts[0], 0)
        weight = float(parts[1]) if len(parts) > 1 else 1.0
        entries.append((eid, weight))
    return entries


def _emit(text: str, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def _cmd_sketch(args) -> int:
    if args.input == "-":
        entries = _read_weighted_lines(sys.stdin)
    else:
        with open(args.input) as f:
            entries = _read_weighted_lines(f)
    if not entries:
        raise EmptyInputError("no input entries")
    if args.algo in _BASELINES:
        ids = np.array([e for e, _ in entries], np.uint64)
        sig = _BASELINES[args.algo](ids, args.m)
    elif args.algo in WEIGHTED_ALGORITHMS:
        sig, _ = WEIGHTED_ALGORITHMS[args.algo](WeightedSet(entries), args.m)
    else:
        raise InvalidParamsError(f"unknown algorithm {args.algo!r}")
    if args.bbit is not None:
        reduced = bbit_reduce(sig, args.bbit)
        lines = (str(int(c)) for c in reduced.components)
    else:
        lines = (str(int(c)) for c in sig.components)
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_mse(args) -> int:
    fixtures = tuple(FIXTURES) if args.fixture == ("all",) else args.fixture
    cfg = ExperimentConfig(algorithms=args.algo, m_values=args.m,
                           s=args.pairs, seed=args.seed, fixtures=fixtures)
    _emit(mse_csv(run_mse_experiment(cfg)), args.out)
    return 0


def _cmd_bench(args) -> int:
    cfg = ExperimentConfig(algorithms=args.algo, m_values=args.m,
                           seed=args.seed, n_values=args.n, reps=args.reps,
                           distribution=_parse_distribution(args.distribution))
    _emit(timing_csv(run_timing_experiment(cfg)), args.out)
    return 0


def _cmd_buffer(args) -> int:
    cfg = ExperimentConfig(algorithms=args.algo, m_values=args.m,
                           s=args.sets, seed=args.seed, n_values=args.n,
                           distribution=_parse_distribution(args.distribution))
    _emit(buffer_csv(run_buffer_experiment(cfg)), args.out)
    return 0


def _cmd_equivalence(args) -> int:
    report = run_equivalence_suite(args.seed, args.trials)
    if report.ok:
        print(f"equivalence: OK ({report.trials} trials, 0 mismatches)")
        return 0
    print(f"equivalence: FAILED ({report.mismatches}/{report.trials} "
          f"mismatches, first failing trial seed "
          f"{report.first_failure_seed})", file=sys.stderr)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="probminhash",
        description="Weighted minwise hashing sketches and experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sketch", help="compute one signature")
    p.add_argument("--algo", default="probminhash2",
                   choices=sorted(set(WEIGHTED_ALGORITHMS) | set(_BASELINES)))
    p.add_argument("--m", type=int, default=256)
    p.add_argument("--bbit", type=int, default=None)
    p.add_argument("--input", default="-",
                   help="file of 'id weight' lines, or - for stdin")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sketch)

    p = sub.add_parser("mse", help="estimation-error grid, CSV output")
    p.add_argument("--algo", type=_str_list,
                   default=("pminhash", "probminhash1", "probminhash1a",
                            "probminhash2"))
    p.add_argument("--m", type=_int_list, default=(16, 64, 256))
    p.add_argument("--pairs", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fixture", type=_str_list, default=("all",),
                   help=f"comma list or 'all'; known: {','.join(FIXTURES)}")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_mse)

    p = sub.add_parser("bench", help="timing grid, CSV output")
    p.add_argument("--algo", type=_str_list,
                   default=("pminhash", "probminhash2", "probminhash3a"))
    p.add_argument("--m", type=_int_list, default=(256,))
    p.add_argument("--n", type=_int_list, default=(1000, 10000))
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--distribution", default="unweighted")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("buffer", help="interleaved buffer statistics, CSV")
    p.add_argument("--algo", type=_str_list, default=("probminhash3a",))
    p.add_argument("--m", type=_int_list, default=(256,))
    p.add_argument("--n", type=_int_list, default=(1000, 10000, 100000))
    p.add_argument("--sets", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--distribution", default="unweighted")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_buffer)

    p = sub.add_parser("equivalence",
                       help="bit-equivalence check of interleaved variants")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=_cmd_equivalence)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidParamsError, EmptyInputError, KeyError, ValueError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
