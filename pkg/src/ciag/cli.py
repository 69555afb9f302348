"""``ciag`` command line: solve, simulate, sweep and verify a scenario.

Exit codes: 0 success, 1 usage or parse error, 2 validation error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path

from . import report
from .equilibrium import solve_pbe
from .errors import CiagError, InvalidConfig, InvalidParamsError, MixedSolutionError, ParseError, ValidationError
from .montecarlo import SweepAxis, run_simulation, sweep
from .oracle import verification_checks
from .scenario import PRESETS, parse_scenario, parse_values

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", metavar="FILE", help="scenario document (key: value lines or JSON)")
    common.add_argument("--preset", choices=sorted(PRESETS), help="built-in parameter set; the scenario file overrides it")
    common.add_argument("--set", dest="overrides", metavar="KEY=VALUE", action="append", default=[],
                        help="override one scenario key (repeatable)")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--reps", type=int, help="repetitions per simulation")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--format", choices=("human", "csv", "json"), default=None)
    common.add_argument("--workers", type=int, default=1, help="threads for the simulator")

    parser = _Parser(prog="ciag", description="Cyber insurance audit game: equilibria and Monte Carlo comparison.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="print the equilibrium")
    sub.add_parser("simulate", parents=[common], help="simulate every strategy model, CSV out")
    sw = sub.add_parser("sweep", parents=[common], help="simulate across an axis, CSV out")
    sw.add_argument("--axis", help="audit-cost | discount | discount-pct | loss | repetitions | prior")
    sw.add_argument("--values", help="comma list, lo..hi (11 points) or lo..hi:n")
    vf = sub.add_parser("verify", parents=[common], help="check the equilibrium with the oracle")
    vf.add_argument("--grid-n", type=int, default=101)
    return parser


def _load(args):
    if args.scenario is None and args.preset is None:
        raise ParseError("give --scenario FILE and/or --preset NAME")
    base = dict(PRESETS[args.preset]) if args.preset else None
    text = Path(args.scenario).read_text(encoding="utf-8") if args.scenario else ""
    overrides = {}
    for item in args.overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ParseError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    scenario = parse_scenario(text, base, overrides)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.reps is not None:
        changes["repetitions"] = args.reps
    if changes:
        scenario = replace(scenario, **changes)
        problems = scenario.to_config().problems()
        if problems:
            raise ValidationError(problems)
    return scenario


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _solve(args, scenario):
    sol = solve_pbe(scenario.params, scenario.utility)
    fmt = args.format or "human"
    with _output(args.out or scenario.out) as fh:
        if fmt == "json":
            fh.write(report.solution_json(sol) + "\n")
        elif fmt == "csv":
            report.solution_csv(sol, fh)
        else:
            fh.write(report.solution_text(sol) + "\n")
    return EXIT_OK


def _simulate(args, scenario):
    summary = run_simulation(scenario.to_config(), workers=args.workers)
    with _output(args.out or scenario.out) as fh:
        report.write_summary_csv(summary, fh)
    return EXIT_OK


def _sweep(args, scenario):
    axis_text = args.axis or (scenario.axis.value if scenario.axis else None)
    if axis_text is None:
        raise ParseError("sweep needs --axis (or 'axis' in the scenario)")
    try:
        values = parse_values(args.values) if args.values else scenario.values
    except ValueError as exc:
        raise ParseError(str(exc), key="--values") from None
    if not values:
        raise ParseError("sweep needs --values (or 'values' in the scenario)")
    if axis_text.strip().lower().replace("_", "-") == "discount-pct":
        axis = SweepAxis.DISCOUNT
        values = [round(scenario.params.premium * v / 100, 2) for v in values]
    else:
        try:
            axis = SweepAxis.parse(axis_text)
        except ValueError:
            raise ParseError(f"unknown axis {axis_text!r}") from None

    table = sweep(scenario.to_config(), axis, values, workers=args.workers)
    out = args.out or scenario.out
    with _output(out) as fh:
        report.write_sweep_csv(table, fh)
    if out is not None:
        p = Path(out)
        with open(p.with_name(f"{p.stem}_gt_vs_never{p.suffix or '.csv'}"), "w", encoding="utf-8", newline="") as fh:
            report.write_comparison_csv(table, fh)
    return EXIT_OK


def _verify(args, scenario):
    sol = solve_pbe(scenario.params, scenario.utility)
    checks = verification_checks(sol, scenario.params, scenario.utility, args.grid_n)
    failed = False
    with _output(args.out) as fh:
        fh.write(f"region {sol.region.value}, phi* = {sol.phi_star:.6g}\n")
        for c in checks:
            status = "INFO" if c.passed is None else ("PASS" if c.passed else "FAIL")
            failed |= c.passed is False
            tol = "" if c.tol is None else f" (tol {c.tol:.1e})"
            fh.write(f"{status}  {c.name}: {c.value:.6e}{tol}\n")
        fh.write("FAIL\n" if failed else "PASS\n")
    return EXIT_VERIFY if failed else EXIT_OK


_COMMANDS = {"solve": _solve, "simulate": _simulate, "sweep": _sweep, "verify": _verify}


def run_command(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        scenario = _load(args)
        return _COMMANDS[args.command](args, scenario)
    except (ParseError, OSError) as exc:
        print(f"ciag: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, InvalidParamsError, InvalidConfig, MixedSolutionError) as exc:
        print(f"ciag: invalid: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CiagError as exc:
        print(f"ciag: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main(argv=None):
    sys.exit(run_command(argv))


if __name__ == "__main__":
    main()
