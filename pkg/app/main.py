"""
Ring Walk Command Line
Entry point of the ringwalk tool: one subcommand per experiment table
"""

import argparse
import logging
import sys
from typing import List, Optional

import numpy as np

from models.errors import BudgetError, ConfigError, RingWalkError

from . import __version__
from .components import SUBCOMMANDS
from .utils.config import parse_config
from .utils.helpers import format_timestamp

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTATION = 2

SUBCOMMAND_HELP = {
    'spectrum': "energy levels lambda_j",
    'pdet-series': "F_m, P_det and S per attempt",
    'pdet-sweep': "P_det over a (phi, tau) grid",
    'pf-spectrum': "Perron-Frobenius eigenvalues and overlaps",
    'pf-sweep': "PF moduli, gap and t_as over a (phi, tau) grid",
    'dark-report': "dark basis and asymptotic detection probability",
    'dark-count': "phase-matched dark states in a phase window",
    'dark-curves': "dark-state curves tau(phi)",
    'tau-star': "analytic and empirical threshold tau*",
    'optimize': "optimal (phi, tau) under the budget",
    'tas-curve': "asymptotic time scale along tau",
    'tau-curve': "P_det along tau for several ring sizes",
    'tau-opt-trend': "optimal period against tau_PF over sizes and budgets",
    'size-budget': "P_det over ring sizes and budgets",
    'unitary-baseline': "unmonitored transfer probability",
}


def error_line(kind: str, key: str, message: str) -> str:
    """Machine-parsable error line"""
    return f"ringwalk: error: kind={kind} key={key} message={message}"


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, error_line("usage", "-", message) + "\n")


def _common_flags() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--n", dest="n", type=int, help="number of sites N")
    common.add_argument("--delta", type=int, help="target site")
    phase = common.add_mutually_exclusive_group()
    phase.add_argument("--phi", type=float, help="chiral phase in radians")
    phase.add_argument("--phi-over-pin", dest="phi_over_pin", type=float, help="phase as phi N / pi")
    common.add_argument("--tau", type=float, help="detection period")
    common.add_argument("--total-time", dest="total_time", type=float, help="observation budget T")
    common.add_argument("--phi-grid", dest="phi_grid", metavar="LO:HI:COUNT")
    common.add_argument("--tau-grid", dest="tau_grid", metavar="LO:HI:COUNT")
    common.add_argument("--n-values", dest="n_values", metavar="N1,N2,...")
    common.add_argument("--t-values", dest="t_values", metavar="T1,T2,...")
    common.add_argument("--k-max", dest="k_max", type=int, help="largest |k| in phase matching")
    common.add_argument("--n-max", dest="n_max", type=int, help="number of attempts for pdet-series")
    common.add_argument("--tol-degenerate", dest="tol_degenerate", type=float)
    common.add_argument("--tol-unit", dest="tol_unit", type=float)
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--workers", type=int, help="worker processes (default: core count)")
    common.add_argument(
        "--log-level",
        dest="log_level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    """Parser with every subcommand sharing the common flags"""
    parser = _Parser(prog="ringwalk", description="Monitored chiral quantum walk on a ring")
    parser.add_argument("--version", action="version", version=f"ringwalk {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")
    subparsers.required = True
    common = _common_flags()
    for name in SUBCOMMANDS:
        subparsers.add_parser(name, parents=[common], help=SUBCOMMAND_HELP[name])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        0 on success, 1 for usage or configuration errors, 2 when a
        computation fails
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )

    try:
        config = parse_config(args)
        table = SUBCOMMANDS[args.command](config)
        table.provenance = {
            "tool": f"ringwalk {__version__}",
            "command": args.command,
            "config": config.describe(),
            "timestamp": format_timestamp(),
            **table.provenance,
        }
        table.write(config.out)
    except ConfigError as e:
        where = f" (line {e.line})" if e.line is not None else ""
        print(error_line(e.kind, e.key, e.message + where), file=sys.stderr)
        return EXIT_USAGE
    except BudgetError as e:
        print(error_line(e.kind, "total_time", str(e)), file=sys.stderr)
        return EXIT_USAGE
    except (RingWalkError, np.linalg.LinAlgError) as e:
        kind = getattr(e, "kind", "linalg")
        logger.debug("computation failed", exc_info=True)
        print(error_line(kind, "-", str(e)), file=sys.stderr)
        return EXIT_COMPUTATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
