import argparse
import logging
import math
import sys
from typing import List, Optional

import numpy as np
from dotenv import load_dotenv

from config.experiment_config import default_spec
from config.settings import (
    SWEEP_METHODS, BadSetVariant, BoundMethod, ExperimentName, InterpolantKind, RuntimeConfig,
)
from models.errors import FourierCondError, InapplicableHypothesisError, NodeSetError
from models.fourier_models import LOG_FLOAT_MAX, NodeSet
from services.bounds_service import default_delta, robust_floor
from services.fourier_matrix import extreme_singular_values
from services.interpolation_service import (
    bad_general_l2_bound,
    bad_separated_l2_bound,
    bad_set_interpolant_general,
    bad_set_interpolant_separated,
    duality_lower_bound,
    good_set_bounds,
    good_set_interpolant,
    lagrange_family,
    min_norm_bounds,
    min_norm_interpolant,
)
from services.torus_geometry import local_sparsity, neighborhood_split, partition_by_gap, validate_clumps
from services.trig_poly import l2_norm, shift, sup_norm
from strategy.experiments import ExperimentRunner
from strategy.tau_sweep import TauSweepStrategy, dense_tau_grid, evaluate_bound
from utils.io_helper import (
    load_nodes, reports_frame, sweep_frame, sweep_payload, to_json, write_csv, write_json,
)

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_INAPPLICABLE = 2


def load_configuration() -> RuntimeConfig:
    """Load runtime configuration from environment variables"""
    return RuntimeConfig.from_env()


def setup_logging(runtime_config: RuntimeConfig):
    # stderr keeps stdout clean for JSON output
    logging.basicConfig(
        level=getattr(logging, runtime_config.log_level, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(runtime_config.log_file),
            logging.StreamHandler(sys.stderr)
        ]
    )


class CliParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the input-error code"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _optional_real(text: str) -> Optional[float]:
    """'auto' or a real number"""
    if text == "auto":
        return None
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}")


def _method(text: str) -> BoundMethod:
    try:
        return BoundMethod(text)
    except ValueError:
        choices = ", ".join(m.value for m in BoundMethod)
        raise argparse.ArgumentTypeError(f"unknown method {text!r} (choose from {choices})")


def _real_list(text: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _emit(payload, output: Optional[str] = None):
    if output:
        write_json(payload, output)
    else:
        print(to_json(payload))


def _resolve_delta(m: int, X: NodeSet, delta: Optional[float]) -> Optional[float]:
    if delta is not None or X.s < 2:
        return delta
    return default_delta(m, X)


# Commands

def cmd_bound(args, runtime_config: RuntimeConfig) -> int:
    """Evaluate one bound and print its report"""
    X = load_nodes(args.nodes)
    method = args.method
    payload = {}

    if method == BoundMethod.CLUMPS_COROLLARY:
        if args.clump_gap is None:
            raise NodeSetError("ClumpsCorollary needs --clump-gap to build the clump partition")
        delta = _resolve_delta(args.m, X, args.delta)
        clumps = validate_clumps(X, partition_by_gap(X, args.clump_gap), delta)
        report = evaluate_bound(method, args.m, X, clumps=clumps)
    elif method in SWEEP_METHODS and args.tau is None:
        result = TauSweepStrategy(runtime_config).best_bound(args.m, X, method=method, delta=args.delta)
        report = result.best_report
        payload['candidates'] = len(result.candidates)
    elif method == BoundMethod.SIGMA1_UPPER and args.tau is None:
        report = TauSweepStrategy(runtime_config).tightest_upper_bound(args.m, X)
    else:
        delta = args.delta
        if method in (BoundMethod.THM2_EQ3, BoundMethod.THM2_EQ4):
            delta = _resolve_delta(args.m, X, delta)
        report = evaluate_bound(method, args.m, X, args.tau, delta)

    payload.update(report.to_dict())
    if args.oracle:
        sigma = extreme_singular_values(args.m, X).sigma_s
        payload['sigma_min'] = sigma
        payload['inaccuracy_factor'] = None
        if report.applicable:
            log_factor = math.log(sigma) - report.log_value
            payload['log_inaccuracy_factor'] = log_factor
            payload['inaccuracy_factor'] = math.exp(log_factor) if log_factor < LOG_FLOAT_MAX else math.inf
    if args.csv:
        write_csv(reports_frame([report]), args.csv)
    print(to_json(payload))
    if not report.applicable:
        logger.warning(f"{method.value} not applicable: {report.reason}")
        return EXIT_INAPPLICABLE
    return EXIT_OK


def cmd_svd(args, runtime_config: RuntimeConfig) -> int:
    X = load_nodes(args.nodes)
    data = extreme_singular_values(args.m, X)
    payload = {'m': args.m, 's': X.s}
    payload.update(data.to_dict())
    print(to_json(payload))
    return EXIT_OK


def cmd_sweep(args, runtime_config: RuntimeConfig) -> int:
    X = load_nodes(args.nodes)
    if args.taus:
        T = args.taus
    elif args.grid:
        T = dense_tau_grid(args.grid)
    else:
        T = None
    result = TauSweepStrategy(runtime_config).best_bound(args.m, X, T, args.method, args.delta)
    payload = sweep_payload(result)
    if args.csv:
        write_csv(sweep_frame(result), args.csv)
    if args.json:
        write_json(payload, args.json)
    print(to_json(payload))
    return EXIT_OK


def cmd_experiment(args, runtime_config: RuntimeConfig) -> int:
    spec = default_spec(ExperimentName(args.name), args.output_dir or runtime_config.output_dir, args.tau_mode)
    outcome = ExperimentRunner(runtime_config).run(spec)
    print(to_json({'experiment': spec.name.value, 'rows': len(outcome.rows),
                   'files': outcome.paths, 'summary': outcome.summary}))
    return EXIT_OK


def _norms(f, certified_l2: Optional[float] = None, certified_sup: Optional[float] = None):
    return {
        'poly': f.to_dict(),
        'l2': l2_norm(f),
        'sup': sup_norm(f),
        'certified_l2': certified_l2,
        'certified_sup': certified_sup,
    }


def cmd_interpolant(args, runtime_config: RuntimeConfig) -> int:
    """Export one of the interpolant constructions with its certified and measured norms"""
    X = load_nodes(args.nodes)
    kind = InterpolantKind(args.kind)
    m, tau = args.m, args.tau
    payload = {'kind': kind.value, 'm': m, 'tau': tau}

    if kind == InterpolantKind.FAMILY:
        variant = BadSetVariant.SEPARATED if args.delta is not None else BadSetVariant.GENERAL
        family = lagrange_family(m, tau, X, variant, args.delta)
        payload['polys'] = [_norms(f) for f in family.polys]
        payload['duality_lower_bound'] = duality_lower_bound(family)
        _emit(payload, args.output)
        return EXIT_OK

    if args.point is not None:
        x_c = float(args.point) % 1.0
    else:
        if not (0 <= args.center < X.s):
            raise NodeSetError(f"--center {args.center} is not a node index (s={X.s})")
        x_c = X[args.center]
    payload['center'] = x_c

    if kind == InterpolantKind.MINNORM:
        if args.point is not None:
            raise NodeSetError("minnorm interpolates at a node; use --center")
        w = np.zeros(X.s)
        w[args.center] = 1.0
        f = min_norm_interpolant(m, X, w)
        payload.update(_norms(f, *min_norm_bounds(m, X, w)))
    elif kind == InterpolantKind.GOOD:
        _, good = neighborhood_split(x_c, tau, X)
        f = good_set_interpolant(tau, good, x_c)
        payload['nu'] = local_sparsity(tau, good)
        payload.update(_norms(f, *good_set_bounds(tau, payload['nu'])))
    else:
        bad, good = neighborhood_split(x_c, tau, X)
        n = robust_floor(m - 2 * local_sparsity(tau, good) / tau)
        local = bad.shifted(x_c)
        if kind == InterpolantKind.BAD_GENERAL:
            b = bad_set_interpolant_general(n, bad.s, local)
            certified = bad_general_l2_bound(n, bad.s, local)
        else:
            delta = _resolve_delta(m, X, args.delta)
            b = bad_set_interpolant_separated(n, bad.s, delta, local)
            certified = bad_separated_l2_bound(n, bad.s, delta)
            payload['delta'] = delta
        payload['n'] = n
        payload.update(_norms(shift(b, x_c), certified))
    _emit(payload, args.output)
    return EXIT_OK


def build_parser() -> CliParser:
    parser = CliParser(prog="fourier-cond",
                       description="Certified singular value bounds for non-harmonic Fourier matrices")
    sub = parser.add_subparsers(dest="command", parser_class=CliParser)

    def with_nodes(p):
        p.add_argument("--nodes", required=True, help="JSON array of node positions")
        p.add_argument("--m", type=int, required=True, help="number of Fourier rows")

    bound = sub.add_parser("bound", help="evaluate a lower/upper bound")
    with_nodes(bound)
    bound.add_argument("--method", type=_method, default=BoundMethod.MAIN1)
    bound.add_argument("--tau", type=_optional_real, default=None, help="real in (0, 1/2] or 'auto'")
    bound.add_argument("--delta", type=_optional_real, default=None, help="real or 'auto'")
    bound.add_argument("--oracle", action="store_true", help="append sigma_min and the inaccuracy factor")
    bound.add_argument("--csv", default=None,
                       help="write the report as one CSV row (method, m, tau, delta, value, log_value)")
    bound.add_argument("--clump-gap", type=float, default=None,
                       help="split nodes into clumps wherever consecutive gaps exceed this")

    svd = sub.add_parser("svd", help="exact extreme singular values")
    with_nodes(svd)

    sweep = sub.add_parser("sweep", help="maximise a bound over tau")
    with_nodes(sweep)
    sweep.add_argument("--method", type=_method, default=BoundMethod.MAIN1)
    sweep.add_argument("--delta", type=_optional_real, default=None)
    grid = sweep.add_mutually_exclusive_group()
    grid.add_argument("--taus", type=_real_list, default=None, help="comma-separated tau values")
    grid.add_argument("--grid", type=int, default=None, help="dense grid of N equispaced taus")
    sweep.add_argument("--csv", default=None, help="write per-tau values (columns tau, applicable, value)")
    sweep.add_argument("--json", default=None)

    experiment = sub.add_parser(
        "experiment", help="reproduce a numerical experiment",
        description="CSV columns: the grid parameter (m, eps, s or beta), tau, sigma_min, main1 (reference curve), "
                    "main1_certified, gautschi_bazan and per-experiment extras (inaccuracy factors; thm2_eq3, "
                    "spiketrain_exact, spiketrain_simplified and the reference-only barnett curves)")
    experiment.add_argument("name", choices=[e.value for e in ExperimentName])
    experiment.add_argument("--output-dir", default=None)
    experiment.add_argument("--tau-mode", choices=["schedule", "auto"], default="schedule")

    interp = sub.add_parser("interpolant", help="export an interpolant construction")
    with_nodes(interp)
    interp.add_argument("--tau", type=float, required=True)
    interp.add_argument("--kind", choices=[k.value for k in InterpolantKind], default="family")
    interp.add_argument("--center", type=int, default=0, help="node index to interpolate at")
    interp.add_argument("--point", type=float, default=None,
                        help="interpolate at this position instead of a node (good kind)")
    interp.add_argument("--delta", type=_optional_real, default=None)
    interp.add_argument("--output", default=None)
    return parser


COMMANDS = {
    "bound": cmd_bound,
    "svd": cmd_svd,
    "sweep": cmd_sweep,
    "experiment": cmd_experiment,
    "interpolant": cmd_interpolant,
}


def print_commands():
    print("Available commands:")
    print("  python main.py bound       - Evaluate a singular value bound")
    print("  python main.py svd         - Exact extreme singular values")
    print("  python main.py sweep       - Best bound over a set of taus")
    print("  python main.py experiment  - Reproduce a numerical experiment")
    print("  python main.py interpolant - Export an interpolant construction")


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if not argv:
        print_commands()
        return EXIT_OK

    args = build_parser().parse_args(argv)
    if args.command is None:
        print_commands()
        return EXIT_INPUT_ERROR

    runtime_config = load_configuration()
    setup_logging(runtime_config)
    try:
        return COMMANDS[args.command](args, runtime_config)
    except InapplicableHypothesisError as e:
        logger.error(f"Hypothesis not satisfied: {e}")
        return EXIT_INAPPLICABLE
    except (FourierCondError, ValueError) as e:
        logger.error(f"Input error: {e}")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
