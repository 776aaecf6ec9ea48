"""
Command-line entry point. Each sub-command (dmc, verify-duality, ricean and
sideinfo) writes its table as CSV or JSON, to stdout or to a file with a JSON
mirror beside it.

Numerical failures exit with status 1 and usage errors with status 2.
"""

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Sequence, Tuple, Union

import numpy as np

from cutoff_duality.dmc.channel_io import channel_document, load_channel
from cutoff_duality.dmc.main import (
    CostSpec,
    Dmc,
    optimize_e0,
    random_coding_exponent,
    sphere_packing_exponent,
    verify_lagrange_duality,
)
from cutoff_duality.registry.registry_global import get_global_registry
from cutoff_duality.ricean.main import bracket_curve, figure_one_rows
from cutoff_duality.sideinfo.main import figure_two_rows, si_sweep
from cutoff_duality.types.error_types import (
    ConvergenceError,
    DomainError,
    ParameterError,
    PreconditionError,
    QuadratureAccuracyError,
    ValidationError,
)
from cutoff_duality.utils.main import (
    check_ascending,
    format_float,
    make_json_safe,
    parse_grid,
    write_csv,
    write_json,
)
from cutoff_duality.utils.typing.custom_typing import (
    CommandName,
    DmcRow,
    DualityTrialRow,
    E0Row,
    ExitCodeEnum,
    ExponentRow,
    FigureNumber,
    FigureOneRow,
    FigureTwoRow,
    LowerBoundMethod,
    LowerBoundMethodEnum,
    OutputFormat,
)

logger = logging.getLogger(__name__)

DEFAULT_RHO_GRID = "0,0.25,0.5,0.75,1,1.5,2"
DEFAULT_SNR_GRID = "1e4:1e14:6"
DEFAULT_D_GRID = "0,0.5,1,2,4,8"
DEFAULT_EPS2_GRID = "0.01,0.1,0.5,0.9,1"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


@dataclass
class RunConfig:
    """
    Settings of one CLI run, built from the parsed command line.

    Attributes:
        command (CommandName): Sub-command to run.
        channel (Union[str, None]): Channel JSON file (dmc, verify-duality).
        preset (Union[str, None]): ``NAME[:PARAM]`` channel preset instead of a file.
        out (Union[str, None]): Output path; standard output when omitted.
        output_format (OutputFormat): ``"csv"`` or ``"json"``.
        rho_grid (List[float]): rho values of the E0 table.
        rate_grid (Union[List[float], None]): Rates of the exponent table;
            ten points up to log N when omitted.
        snr_grid (List[float]): SNR values of the bracket curves.
        d (float): Specular component of the Ricean bracket.
        d_grid (List[float]): d values of figure 1.
        eps2_grid (List[float]): eps2 values of the side-information runs.
        sigma2 (float): Noise variance.
        delta (Union[float, None]): Fixed delta of the upper bound.
        m1 (Union[float, None]): Fixed m1 of the upper bound.
        lower_method (LowerBoundMethod): Lower-bound path of the Ricean bracket.
        rho (float): rho of the duality check.
        trials (int): Random channels of the duality check.
        num_inputs (int): Input alphabet of the random channels.
        num_outputs (int): Output alphabet of the random channels.
        tol (float): Largest acceptable duality gap.
        seed (int): Seed of the random channels.
        figure (Union[FigureNumber, None]): Emit the second-order constants
            of figure 1 (ricean) or 2 (sideinfo) instead of bracket curves.
        log_level (str): Root logging level.
    """

    command: CommandName
    channel: Union[str, None] = None
    preset: Union[str, None] = None
    out: Union[str, None] = None
    output_format: OutputFormat = "csv"
    rho_grid: List[float] = field(default_factory=lambda: parse_grid(DEFAULT_RHO_GRID))
    rate_grid: Union[List[float], None] = None
    snr_grid: List[float] = field(default_factory=lambda: parse_grid(DEFAULT_SNR_GRID))
    d: float = 0.0
    d_grid: List[float] = field(default_factory=lambda: parse_grid(DEFAULT_D_GRID))
    eps2_grid: List[float] = field(default_factory=lambda: parse_grid(DEFAULT_EPS2_GRID))
    sigma2: float = 1.0
    delta: Union[float, None] = None
    m1: Union[float, None] = None
    lower_method: LowerBoundMethod = "best"
    rho: float = 1.0
    trials: int = 20
    num_inputs: int = 3
    num_outputs: int = 4
    tol: float = 1e-5
    seed: int = 0
    figure: Union[FigureNumber, None] = None
    log_level: str = "WARNING"

    def __post_init__(self):
        """
        Checks the settings that argparse cannot check on its own.
        """
        if self.trials < 1:
            raise PreconditionError(f"--trials must be at least 1, got {self.trials}")
        if self.num_inputs < 1 or self.num_outputs < 1:
            raise PreconditionError("alphabet sizes must be at least 1")
        if not self.tol > 0:
            raise PreconditionError(f"--tol must be positive, got {self.tol}")
        if (self.delta is None) != (self.m1 is None):
            raise PreconditionError("--delta and --m1 must be given together")
        if self.figure == 1 and self.command != "ricean":
            raise PreconditionError("--figure 1 belongs to the ricean command")
        if self.figure == 2 and self.command != "sideinfo":
            raise PreconditionError("--figure 2 belongs to the sideinfo command")
        for name in ("rho_grid", "snr_grid", "d_grid", "eps2_grid"):
            check_ascending(getattr(self, name), name)
        if self.rate_grid is not None:
            check_ascending(self.rate_grid, "rate_grid")

    @classmethod
    def from_namespace(cls, args: argparse.Namespace) -> "RunConfig":
        values = {
            item.name: getattr(args, item.name)
            for item in fields(cls)
            if getattr(args, item.name, None) is not None
        }
        return cls(**values)


def _grid(text: str) -> List[float]:
    try:
        return parse_grid(text)
    except PreconditionError as error:
        raise argparse.ArgumentTypeError(str(error))


def build_parser() -> argparse.ArgumentParser:
    """
    Builds the argument parser with one sub-command per computation.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="Output path (default: standard output).")
    common.add_argument(
        "--format",
        dest="output_format",
        choices=["csv", "json"],
        default="csv",
        help="Output format; a CSV file gets a JSON mirror next to it.",
    )
    common.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING")

    parser = argparse.ArgumentParser(
        prog="cutoff-duality",
        description="E0, cut-off rate and error exponents of discrete and fading channels.",
        epilog="Numerical failures exit with status 1 and usage errors with status 2.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    dmc = commands.add_parser("dmc", parents=[common], help="E0 table and exponents of a DMC.")
    dmc.add_argument("channel", nargs="?", help="Channel JSON file.")
    dmc.add_argument("--preset", help="Channel preset NAME[:PARAM], e.g. bsc:0.1.")
    dmc.add_argument("--rho-grid", type=_grid, default=DEFAULT_RHO_GRID)
    dmc.add_argument("--rate-grid", type=_grid, help="Rates in nats (default: up to log N).")

    duality = commands.add_parser(
        "verify-duality", parents=[common], help="Check that the primal and dual E0 agree."
    )
    duality.add_argument("channel", nargs="?", help="Check this channel instead of random ones.")
    duality.add_argument("--preset", help="Check this channel preset instead of random ones.")
    duality.add_argument("--rho", type=float, default=RunConfig.rho)
    duality.add_argument("--trials", type=int, default=RunConfig.trials)
    duality.add_argument("--inputs", dest="num_inputs", type=int, default=RunConfig.num_inputs)
    duality.add_argument("--outputs", dest="num_outputs", type=int, default=RunConfig.num_outputs)
    duality.add_argument("--tol", type=float, default=RunConfig.tol)
    duality.add_argument("--seed", type=int, default=RunConfig.seed)

    ricean = commands.add_parser(
        "ricean", parents=[common], help="Bracket of R0 for Ricean fading, or figure 1 data."
    )
    ricean.add_argument("--snr-grid", type=_grid, default=DEFAULT_SNR_GRID)
    ricean.add_argument("--d", type=float, default=RunConfig.d)
    ricean.add_argument("--d-grid", type=_grid, default=DEFAULT_D_GRID)
    ricean.add_argument("--sigma2", type=float, default=RunConfig.sigma2)
    ricean.add_argument("--delta", type=float)
    ricean.add_argument("--m1", type=float)
    ricean.add_argument(
        "--lower-method",
        choices=[method.value for method in LowerBoundMethodEnum],
        default=RunConfig.lower_method,
    )
    ricean.add_argument("--figure", type=int, choices=[1])

    sideinfo = commands.add_parser(
        "sideinfo", parents=[common], help="R0 with side information, or figure 2 data."
    )
    sideinfo.add_argument("--snr-grid", type=_grid, default=DEFAULT_SNR_GRID)
    sideinfo.add_argument("--eps2-grid", type=_grid, default=DEFAULT_EPS2_GRID)
    sideinfo.add_argument("--sigma2", type=float, default=RunConfig.sigma2)
    sideinfo.add_argument("--delta", type=float)
    sideinfo.add_argument("--m1", type=float)
    sideinfo.add_argument("--figure", type=int, choices=[2])
    return parser


def _emit(
    config: RunConfig,
    columns: Sequence[str],
    rows: Sequence[Dict[str, Any]],
    payload: Dict[str, Any],
):
    """
    Writes the rows as CSV (plus a JSON mirror of ``payload`` when writing
    to a file) or writes ``payload`` as JSON.
    """
    if config.out is None:
        if config.output_format == "json":
            json.dump(make_json_safe(payload), sys.stdout, indent=2)
            sys.stdout.write("\n")
        else:
            writer = csv.writer(sys.stdout)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_float(row[column]) for column in columns])
        return
    path = Path(config.out)
    if config.output_format == "json":
        write_json(path, payload)
    else:
        write_csv(path, columns, rows)
        write_json(path.with_suffix(".json"), payload)
    logger.info("wrote %s", path)


def _load_channel(config: RunConfig) -> Tuple[Dmc, Union[CostSpec, None]]:
    if config.channel and config.preset:
        raise PreconditionError("give either a channel file or --preset, not both")
    if config.preset:
        return get_global_registry().resolve(config.preset), None
    if config.channel:
        return load_channel(config.channel)
    raise PreconditionError("a channel file or --preset is required")


def cmd_dmc(config: RunConfig) -> int:
    """
    E0 over the rho grid, the cut-off rate and the random-coding and
    sphere-packing exponents over the rate grid.
    """
    w, cost = _load_channel(config)
    e0_rows = []
    for rho in config.rho_grid:
        result = optimize_e0(rho, w, cost)
        e0_rows.append(
            E0Row(rho=rho, e0_nats=result.value, tilt_r=result.tilt_r, converged=result.converged)
        )
    r0 = optimize_e0(1.0, w, cost)
    rates = config.rate_grid
    if rates is None:
        rates = (math.log(w.num_inputs) * np.arange(1, 11) / 10).tolist()
    exponent_rows = []
    for rate in rates:
        random_coding = random_coding_exponent(rate, w, cost)
        sphere = sphere_packing_exponent(rate, w) if rate > 0 else None
        exponent_rows.append(
            ExponentRow(
                rate_nats=rate,
                random_coding_nats=random_coding.value,
                sphere_packing_nats=math.inf if sphere is None or sphere.infinite else sphere.value,
            )
        )
    logger.info("cut-off rate %.12f nats", r0.value)

    rows = [DmcRow(quantity="e0", parameter=row["rho"], value_nats=row["e0_nats"]) for row in e0_rows]
    rows.append(DmcRow(quantity="cutoff_rate", parameter=1.0, value_nats=r0.value))
    for row in exponent_rows:
        rows.append(
            DmcRow(quantity="random_coding", parameter=row["rate_nats"], value_nats=row["random_coding_nats"])
        )
        rows.append(
            DmcRow(quantity="sphere_packing", parameter=row["rate_nats"], value_nats=row["sphere_packing_nats"])
        )
    payload = {
        "channel": channel_document(w, cost),
        "cutoff_rate_nats": r0.value,
        "cutoff_rate_input": r0.optimizing_input,
        "e0": e0_rows,
        "exponents": exponent_rows,
    }
    _emit(config, tuple(DmcRow.__annotations__), rows, payload)
    return ExitCodeEnum.SUCCESS.value


def cmd_verify_duality(config: RunConfig) -> int:
    """
    Runs the primal/dual E0 check; fails when any gap exceeds ``--tol``.
    """
    channels = None
    if config.channel or config.preset:
        channels = [_load_channel(config)[0]]
    report = verify_lagrange_duality(
        rho=config.rho,
        trials=config.trials,
        num_inputs=config.num_inputs,
        num_outputs=config.num_outputs,
        seed=config.seed,
        tolerance=config.tol,
        channels=channels,
    )
    _emit(config, tuple(DualityTrialRow.__annotations__), report.trials, report.to_dict())
    if not report.passed:
        print(
            f"duality check failed: max gap {report.max_gap:.3g} exceeds {config.tol:.3g} "
            f"or pointwise slack {report.min_pointwise_slack:.3g} < 0",
            file=sys.stderr,
        )
        return ExitCodeEnum.CHECK_FAILED.value
    return ExitCodeEnum.SUCCESS.value


def cmd_ricean(config: RunConfig) -> int:
    """
    Figure 1 constants over the d grid, or the R0 bracket over the SNR grid.
    """
    if config.figure == 1:
        rows = figure_one_rows(config.d_grid)
        _emit(config, tuple(FigureOneRow.__annotations__), rows, {"figure": 1, "rows": rows})
        return ExitCodeEnum.SUCCESS.value
    curve = bracket_curve(
        config.snr_grid,
        d=config.d,
        sigma2=config.sigma2,
        method=config.lower_method,
        delta=config.delta,
        m1=config.m1,
    )
    _emit(config, curve.columns, curve.rows, curve.to_dict())
    return ExitCodeEnum.SUCCESS.value


def cmd_sideinfo(config: RunConfig) -> int:
    """
    Figure 2 constants over the eps2 grid, or the side-information bracket.
    """
    if config.figure == 2:
        rows = figure_two_rows(config.eps2_grid)
        _emit(config, tuple(FigureTwoRow.__annotations__), rows, {"figure": 2, "rows": rows})
        return ExitCodeEnum.SUCCESS.value
    curve = si_sweep(
        config.eps2_grid,
        config.snr_grid,
        sigma2=config.sigma2,
        delta=config.delta,
        m1=config.m1,
    )
    _emit(config, curve.columns, curve.rows, curve.to_dict())
    return ExitCodeEnum.SUCCESS.value


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "dmc": cmd_dmc,
    "verify-duality": cmd_verify_duality,
    "ricean": cmd_ricean,
    "sideinfo": cmd_sideinfo,
}

USAGE_ERRORS = (ValidationError, PreconditionError, DomainError)
NUMERICAL_ERRORS = (ParameterError, ConvergenceError, QuadratureAccuracyError)


def main(argv: Union[Sequence[str], None] = None) -> int:
    """
    Entry point of the ``cutoff-duality`` command.

    Returns:
        int: 0 on success, 1 when a numerical check or computation fails,
        2 on usage or input validation errors.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as error:
        return int(error.code or 0)

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = RunConfig.from_namespace(args)
        return COMMANDS[config.command](config)
    except USAGE_ERRORS as error:
        print(f"error: {error}", file=sys.stderr)
        return ExitCodeEnum.USAGE.value
    except NUMERICAL_ERRORS as error:
        print(f"error: {error}", file=sys.stderr)
        return ExitCodeEnum.CHECK_FAILED.value
