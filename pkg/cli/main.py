"""
Command-line front end

Exit codes: 0 success, 1 operation error, 2 input or I/O error,
3 a checked contract failed.
"""
import argparse
import logging
import sys

from config.harness_config import REPORT_FORMAT, validate_harness_config
from config.solver_config import validate_solver_config
from cli.commands import COMMANDS, run_command
from cli.problem import problem_from_args
from cli.report import FORMATS, write_report
from utils.errors import ContractViolation, DualSpaceError
from utils.logger import console_to, setup_logger

logger = setup_logger("dualspace")

EXIT_OK = 0
EXIT_IO = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualspace",
        description="Duality maps, Orlicz norms and the verification suites behind them",
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="Operation to run")
    parser.add_argument("module", nargs="?", help="verify: measure_space|young|norms|duality|mazur|"
                                                  "extension|convexity|all")
    parser.add_argument("--problem", help="Problem file holding any of the sections")
    parser.add_argument("--model", help="Model file: weights and structure")
    parser.add_argument("--input", help="Function file")
    parser.add_argument("--functional", help="Functional file")
    parser.add_argument("--subspace", help="Subspace basis file")
    parser.add_argument("--action", help="Sub-functional action file")
    parser.add_argument("--probe", type=int, help="extend: uniqueness probe trials")
    parser.add_argument("--seed", type=int, help="Generator seed (default: DUALSPACE_SEED)")
    parser.add_argument("--trials", type=int, help="Trials per property")
    parser.add_argument("--n", type=int, help="Dimension for generated spaces")
    parser.add_argument("--p", type=float, help="Exponent")
    parser.add_argument("--r", type=float, help="Second exponent of the mixed family")
    parser.add_argument("--eps", type=float, help="Separation ε")
    parser.add_argument("--v", type=float, help="conjugate: evaluation point")
    parser.add_argument("--family", choices=["power", "mixed", "exponential"], help="Young family")
    parser.add_argument("--samples", type=int, help="modulus: random pairs")
    parser.add_argument("--steps", type=int, help="probe-m: maximizing sequence length")
    parser.add_argument("--sizes", help="probe-m: comma separated perturbation sizes")
    parser.add_argument("--format", choices=FORMATS, default=REPORT_FORMAT, help="Report format")
    parser.add_argument("--out", help="Report path (stdout when omitted)")
    parser.add_argument("--log-level", type=str.upper, choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="Log level (default: DUALSPACE_LOG_LEVEL)")
    return parser


def main(argv: list[str] | None = None) -> int:
    """
    Parse arguments, run one command and write its report

    Returns:
        Process exit code
    """
    args = build_parser().parse_args(argv)
    if args.out and args.out != "-":
        return _run(args)
    # the report owns stdout
    with console_to(sys.stderr):
        return _run(args)


def _run(args: argparse.Namespace) -> int:
    if args.log_level:
        level = args.log_level
        for name in list(logging.root.manager.loggerDict):
            configured = logging.getLogger(name)
            if configured.handlers:
                configured.setLevel(level)
                for handler in configured.handlers:
                    handler.setLevel(level)

    try:
        validate_harness_config()
        validate_solver_config()
    except ValueError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_IO

    try:
        problem = problem_from_args(args)
        if args.module:
            problem.params["module"] = args.module
        report = run_command(args.command, problem)
        write_report(report, args.format, args.out)
    except DualSpaceError as e:
        logger.error(f"{type(e).__name__}: {e}")
        diagnostics = getattr(e, "diagnostics", None)
        if diagnostics:
            logger.error(f"Diagnostics: {diagnostics}")
        return e.exit_code
    except OSError as e:
        logger.error(f"Cannot write report: {e}")
        return EXIT_IO

    if not report.passed:
        return ContractViolation.exit_code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
