"""
Module for the command-line front end: points, propagate and benchmark subcommands.
"""
import argparse
import json
import logging
import sys

from .BenchmarkModels import available_cases
from .CoreTypes import ParameterError, QPEMError
from .PropagationWrappers import (
    VARIANTS_BY_LABEL, MethodOptions, RunConfig, build_points, propagate, run_benchmark, run_polynomial_sweep,
    write_benchmark_outputs, write_points_csv
)
from .QuadraticPEM import DEFAULT_R, DEFAULT_XI, DEFAULT_ZETA, stability_factor
from .SparseQuadUtils import GrowthOptions
from .SpaceTransform import FactorOptions

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _add_method_args(parser: argparse.ArgumentParser):
    parser.add_argument("--method", default=MethodOptions.QPEM, choices=[m.value for m in MethodOptions])
    parser.add_argument("--r", type=float, default=DEFAULT_R, help="QPEM axis radius, must exceed sqrt(2)")
    parser.add_argument("--zeta", type=float, default=DEFAULT_ZETA, help="third-order central weight shift")
    parser.add_argument("--xi", type=float, default=DEFAULT_XI, help="fourth-order central weight shift")
    parser.add_argument("--count", type=int, default=None, help="sample count for mc/lhs/sobol")
    parser.add_argument("--seed", type=int, default=None, help="seed for mc/lhs")
    parser.add_argument("--skip", type=int, default=1, help="leading Sobol points to drop")
    parser.add_argument("--level", type=int, default=2, help="Smolyak level")
    parser.add_argument("--growth", default=GrowthOptions.LINEAR, choices=[g.value for g in GrowthOptions])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpempy", description="Moment propagation with point estimate methods.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    points = sub.add_parser("points", help="write a point set and weight table to CSV")
    _add_method_args(points)
    points.add_argument("--dim", type=int, required=True)
    points.add_argument("--output", default="points.csv")

    prop = sub.add_parser("propagate", help="estimate output moments for a case or an external model")
    _add_method_args(prop)
    prop.add_argument("--case", choices=available_cases())
    prop.add_argument("--case-dim", type=int, default=None, help="dimension of the polynomial case")
    prop.add_argument("--external", default=None, help="command speaking the CSV line protocol")
    prop.add_argument("--input", dest="input_path", default=None, help="input distribution JSON")
    prop.add_argument("--timeout", type=float, default=60.0)
    prop.add_argument("--workers", type=int, default=1)
    prop.add_argument("--batch-size", type=int, default=None)
    prop.add_argument("--factor", default=FactorOptions.CHOLESKY, choices=[f.value for f in FactorOptions])
    prop.add_argument("--output", default=None, help="JSON report path")
    prop.add_argument("--check-mean-input", action="store_true", help="only evaluate the model at the input mean")

    bench = sub.add_parser("benchmark", help="compare methods on a benchmark case")
    bench.add_argument("--case", required=True, help=f"one of {', '.join(available_cases())}")
    bench.add_argument("--methods", default=None, help=f"comma list from {', '.join(VARIANTS_BY_LABEL)}")
    bench.add_argument("--dims", default=None, help="comma list of polynomial dimensions for a sweep")
    bench.add_argument("--case-dim", type=int, default=None)
    bench.add_argument("--factor", default=FactorOptions.CHOLESKY, choices=[f.value for f in FactorOptions])
    bench.add_argument("--seed", type=int, default=None)
    bench.add_argument("--output", default="benchmark.csv")
    bench.add_argument("--plot", action="store_true", help="also save a relative-error figure")
    return parser


def _config_from_args(args) -> RunConfig:
    fields = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in vars(args).items() if k in fields}).validate()


def cmd_points(args) -> int:
    config = _config_from_args(args)
    points, weights = build_points(config, args.dim)
    write_points_csv(points, weights, args.output)
    print(f"{points.count} points written to {args.output} (stability factor {stability_factor(weights):.6g})")
    return 0


def cmd_propagate(args) -> int:
    config = _config_from_args(args)
    report = propagate(config, check_mean_input=args.check_mean_input)
    print(json.dumps(report, indent=2, default=str))
    return 0


def cmd_benchmark(args) -> int:
    labels = args.methods.split(",") if args.methods else None
    if args.dims:
        if args.case != "polynomial":
            raise ParameterError("--dims applies to the polynomial case only.")
        long = run_polynomial_sweep([int(d) for d in args.dims.split(",")], labels)
        paths = write_benchmark_outputs(None, long, args.output, args.plot, by_dim=True)
    else:
        wide, long = run_benchmark(args.case, labels, args.factor, args.seed, args.case_dim)
        paths = write_benchmark_outputs(wide, long, args.output, args.plot)
        print(wide[["label", "points", "mean", "std", "skew", "kurt"]].to_string(index=False))
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    return 0


COMMANDS = {"points": cmd_points, "propagate": cmd_propagate, "benchmark": cmd_benchmark}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose == 1 else logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT)

    try:
        return COMMANDS[args.command](args)
    except QPEMError as err:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
