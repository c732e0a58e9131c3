from __future__ import annotations

import argparse
import logging
import math
import sys
from collections.abc import Awaitable, Callable, Sequence
from functools import partial
from itertools import islice
from pathlib import Path
from typing import Any, NamedTuple, TypeAlias, get_args

import anyio
from anyio import to_thread

from .analysis import (
    DEFAULT_SUPPORT_THRESHOLD,
    divergence_ordering,
    divergence_series,
    fidelity,
    position_distribution,
    series,
)
from .bloch import bloch_map, edge_overlap
from .characterize import REFERENCE_CLASSES, classify_report, sweep_all
from .config import ClassifierConfig, load_classifier_config
from .core import (
    CoinMode,
    CoinSpec,
    ExportError,
    InitialSpec,
    InvalidParameterError,
    Limits,
    ResourceLimitError,
    StepCoinError,
    evolve,
    iter_evolution,
)
from .decoherence import DecoherenceParams, decoherent_series, decoherent_walk
from .export import (
    chessboard_rows,
    distribution_rows,
    load_distribution_file,
    to_csv,
    to_json,
    write_output,
)
from .typing import OutputFormat
from .utils import parse_angle, parse_complex, run_in_threads
from .walker import BaselineWalker, Walker

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO_ERROR = 1
EXIT_BAD_ARGUMENTS = 2
EXIT_LIMIT_EXCEEDED = 3


class Context(NamedTuple):
    """Settings shared by every command."""

    limits: Limits
    config: ClassifierConfig


class Report(NamedTuple):
    """Rows produced by a command and the parameters they were produced with."""

    rows: list[dict[str, Any]]
    metadata: dict[str, Any]
    columns: tuple[str, ...] | None = None


Command: TypeAlias = Callable[[argparse.Namespace, Context], Awaitable[Report]]
"""Async command implementation."""


def threaded(func: Callable[[argparse.Namespace, Context], Report]) -> Command:
    """Turns a blocking command into an async one that runs in a worker thread."""

    async def command(args: argparse.Namespace, ctx: Context) -> Report:
        return await to_thread.run_sync(func, args, ctx)

    return command


# -- Helpers


def _coin(args: argparse.Namespace) -> CoinSpec:
    return CoinSpec(args.theta, CoinMode(args.mode))


def _initial(args: argparse.Namespace) -> InitialSpec:
    return InitialSpec.normalized(*args.initial)


def _walk_metadata(args: argparse.Namespace, **extra: Any) -> dict[str, Any]:
    return {
        "theta": args.theta,
        "mode": args.mode,
        "steps": args.steps,
        "initial": tuple(args.initial),
        **extra,
    }


# -- Commands


@threaded
def simulate(args: argparse.Namespace, ctx: Context) -> Report:
    """Position distributions of the steps `first_step..steps`."""
    spec, init = _coin(args), _initial(args)
    first = max(0, args.steps - 6) if args.first_step is None else args.first_step
    if not 0 <= first <= args.steps:
        raise InvalidParameterError(f"The first step must be in 0..{args.steps}, got {first}.")

    if args.engine == "baseline":
        walker = BaselineWalker(spec, limits=ctx.limits)
        states = [walker.evolve(init, step) for step in range(first, args.steps + 1)]
    else:
        states = list(islice(Walker(spec, limits=ctx.limits).iterate(init, args.steps), first, None))

    rows = distribution_rows((position_distribution(s) for s in states), theta=spec.theta, mode=spec.mode)
    return Report(rows, _walk_metadata(args, first_step=first, engine=args.engine))


@threaded
def chessboard(args: argparse.Namespace, ctx: Context) -> Report:
    """Step by position probability matrix of the steps `0..steps`."""
    states = iter_evolution(_initial(args), _coin(args), args.steps, limits=ctx.limits)
    rows = chessboard_rows([position_distribution(s) for s in states], args.steps)
    return Report(rows, _walk_metadata(args))


@threaded
def entropy(args: argparse.Namespace, ctx: Context) -> Report:
    """Position and coin entropy of every step."""
    records = series(_initial(args), _coin(args), args.steps, limits=ctx.limits)
    rows = [{"step": r.step, "theta": args.theta, "mode": args.mode, **r._asdict()} for r in records]
    return Report(rows, _walk_metadata(args))


@threaded
def kl(args: argparse.Namespace, ctx: Context) -> Report:
    """Divergence series of a step-dependent walk from the step-independent one, or an ordering check."""
    init = _initial(args)
    metadata = {"theta": tuple(args.theta), "steps": args.steps, "initial": tuple(args.initial)}
    if args.check_ordering:
        step = args.steps if args.at_step is None else args.at_step
        report = divergence_ordering(args.theta, step, init, limits=ctx.limits)
        divergences = report.divergences
        rows = [
            {
                "step": step,
                "theta": theta,
                "position_divergence": divergence,
                "increases": divergence < divergences[i + 1] if i + 1 < len(divergences) else None,
            }
            for i, (theta, divergence) in enumerate(zip(report.thetas, divergences, strict=True))
        ]
        return Report(rows, {**metadata, "at_step": step, "holds": report.holds})

    if len(args.theta) != 1:
        raise InvalidParameterError("Divergence series need exactly one angle.")

    theta = args.theta[0]
    records = divergence_series(init, theta, args.steps, epsilon=args.kl_epsilon, limits=ctx.limits)
    rows = [{"step": r.step, "theta": theta, **r._asdict()} for r in records]
    return Report(rows, {**metadata, "kl_epsilon": args.kl_epsilon})


async def compare(args: argparse.Namespace, ctx: Context) -> Report:
    """Fidelity of a walk with a reference walk or of two exported distributions."""
    if args.against == "file":
        return await _compare_files(args)

    if args.theta is None or args.steps is None:
        raise InvalidParameterError(f"--against {args.against} needs --theta and --steps.")

    return await to_thread.run_sync(_compare_walks, args, ctx)


async def _compare_files(args: argparse.Namespace) -> Report:
    if args.files is None or args.at_step is None:
        raise InvalidParameterError("--against file needs --files and --at-step.")

    distributions = []
    for path in args.files:
        try:
            distributions.append((await load_distribution_file(path))[args.at_step])
        except KeyError as e:
            raise InvalidParameterError(f"{path} has no distribution at step {args.at_step}.") from e

    value = fidelity(*distributions)
    first, second = (str(p) for p in args.files)
    row = {"step": args.at_step, "against": "file", "first": first, "second": second, "fidelity": value}
    return Report([row], {"against": "file", "files": (first, second), "at_step": args.at_step})


def _compare_walks(args: argparse.Namespace, ctx: Context) -> Report:
    init, spec = _initial(args), _coin(args)
    p = position_distribution(evolve(init, spec, args.steps, limits=ctx.limits))
    if args.against == "sic":
        against = CoinSpec.sic(args.theta if args.against_theta is None else args.against_theta)
        q = position_distribution(evolve(init, against, args.steps, limits=ctx.limits))
        params = DecoherenceParams()
    else:
        theta = math.pi / 4 if args.against_theta is None else args.against_theta
        against = CoinSpec(theta, CoinMode(args.against_mode))
        params = DecoherenceParams(args.q, args.s)
        q = decoherent_walk(init, against, params, args.steps, limits=ctx.limits)

    row = {
        "step": args.steps,
        "theta": spec.theta,
        "mode": spec.mode,
        "against": args.against,
        "against_theta": against.theta,
        "against_mode": against.mode,
        "q": params.q,
        "s": params.s,
        "fidelity": fidelity(p, q),
    }
    metadata = _walk_metadata(
        args,
        against=args.against,
        against_theta=against.theta,
        against_mode=against.mode,
        q=params.q,
        s=params.s,
    )
    return Report([row], metadata)


@threaded
def decohere(args: argparse.Namespace, ctx: Context) -> Report:
    """Position distribution and purity of the decoherent walk at every step."""
    params = DecoherenceParams(args.q, args.s)
    records = decoherent_series(_initial(args), _coin(args), params, args.steps, limits=ctx.limits)
    rows = [
        {**row, "purity": record.purity}
        for record in records
        for row in distribution_rows([record.distribution], theta=args.theta, mode=args.mode)
    ]
    return Report(rows, _walk_metadata(args, q=args.q, s=args.s))


async def classify(args: argparse.Namespace, ctx: Context) -> Report:
    """Walk classes of the given angles or of the reference angles."""
    references = REFERENCE_CLASSES if args.reference else ()
    thetas = [r.theta for r in references] if args.reference else args.theta
    if not thetas:
        raise InvalidParameterError("Nothing to classify, use --theta or --reference.")

    run = partial(classify_report, horizon=args.horizon, config=ctx.config, limits=ctx.limits)
    tasks = [partial(run, t) for t in thetas]
    reports = await run_in_threads(tasks)
    rows: list[dict[str, Any]] = []
    for i, report in enumerate(reports):
        row = report._asdict()
        if references:
            reference = references[i]
            if reference.label is not report.label:
                logger.warning("%s classified as %r", reference.expression, report.label.value)

            row = {"expression": reference.expression, **row, "expected": reference.label}

        rows.append(row)

    return Report(rows, {"horizon": args.horizon, "reference": args.reference, **ctx.config.thresholds})


@threaded
def bloch(args: argparse.Namespace, ctx: Context) -> Report:
    """Bloch vectors of the occupied positions and the edge overlap of every step."""
    rows: list[dict[str, Any]] = []
    for state in iter_evolution(_initial(args), _coin(args), args.steps, limits=ctx.limits):
        overlap = edge_overlap(state)
        rows.extend(
            {"step": state.step, "position": n, **v._asdict(), "edge_overlap": overlap}
            for n, v in bloch_map(state, args.threshold).items()
        )

    columns = ("step", "position", "x", "y", "z", "edge_overlap")
    return Report(rows, _walk_metadata(args, threshold=args.threshold), columns)


async def sweep(args: argparse.Namespace, ctx: Context) -> Report:
    """Distributions and walk classes of the angles `theta * (1 + j / 10)`, `j = 0..10`."""
    results = await sweep_all(
        args.theta, args.steps, horizon=args.horizon, config=ctx.config, limits=ctx.limits
    )
    rows = [
        row
        for r in results
        for row in distribution_rows([r.distribution], j=r.j, theta=r.theta, label=r.label)
    ]
    return Report(rows, {"theta": args.theta, "steps": args.steps, "horizon": args.horizon})


def render(report: Report, command: str, output_format: OutputFormat) -> str:
    """Formats the report of the given command."""
    if output_format == "json":
        return to_json(report.rows)

    return to_csv(report.rows, command, report.metadata, columns=report.columns)


# -- Parser


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", type=Path, default=None, help="Output file, stdout if omitted.")
    parser.add_argument("--format", choices=get_args(OutputFormat), default="csv", help="Output format.")
    parser.add_argument("--config", type=Path, default=None, help="JSON file with classifier thresholds.")
    parser.add_argument(
        "--log-level",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        default="WARNING",
        help="Log level of the messages written to standard error.",
    )


def _add_walk_arguments(
    parser: argparse.ArgumentParser,
    *,
    mode: bool = True,
    multiple: bool = False,
    required: bool = True,
) -> None:
    theta_help = "Coin angle, for example 1.0472, pi/3 or 3.59pi/5."
    if multiple:
        parser.add_argument("--theta", type=parse_angle, nargs="+", required=required, help=theta_help)
    else:
        parser.add_argument("--theta", type=parse_angle, required=required, help=theta_help)

    parser.add_argument("--steps", type=int, required=required, help="Number of steps.")
    if mode:
        parser.add_argument("--mode", choices=[m.value for m in CoinMode], default="sdc", help="Coin mode.")

    parser.add_argument(
        "--initial",
        type=parse_complex,
        nargs=2,
        metavar=("A", "B"),
        default=(1 + 0j, 0j),
        help="Initial coin state a|0> + b|1>, renormalized. |0> by default.",
    )


def build_parser() -> argparse.ArgumentParser:
    """Creates the argument parser of the command-line interface."""
    parser = argparse.ArgumentParser(
        prog="stepcoin",
        description="Simulate and characterize one-dimensional quantum walks with step-dependent coins.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    cmd = commands.add_parser("simulate", help="Position distributions of consecutive steps.")
    _add_walk_arguments(cmd)
    cmd.add_argument("--first-step", type=int, default=None, help="First exported step (steps - 6).")
    cmd.add_argument("--engine", choices=("default", "baseline"), default="default", help="Walker to use.")
    cmd.set_defaults(handler=simulate)

    cmd = commands.add_parser("chessboard", help="Step by position probability matrix.")
    _add_walk_arguments(cmd)
    cmd.set_defaults(handler=chessboard)

    cmd = commands.add_parser("entropy", help="Position and coin entropy series.")
    _add_walk_arguments(cmd)
    cmd.set_defaults(handler=entropy)

    cmd = commands.add_parser("kl", help="Divergence of step-dependent and step-independent walks.")
    _add_walk_arguments(cmd, mode=False, multiple=True)
    cmd.add_argument("--kl-epsilon", type=float, default=None, help="Uniform smoothing weight.")
    cmd.add_argument(
        "--check-ordering",
        action="store_true",
        help="Check that the divergence strictly increases along the given angles.",
    )
    cmd.add_argument("--at-step", type=int, default=None, help="Step of the ordering check (--steps).")
    cmd.set_defaults(handler=kl)

    cmd = commands.add_parser("fidelity", help="Fidelity of two position distributions.")
    _add_walk_arguments(cmd, required=False)
    cmd.add_argument("--against", choices=("sic", "decoherent", "file"), default="sic", help="Reference.")
    cmd.add_argument(
        "--against-theta",
        type=parse_angle,
        default=None,
        help="Reference angle, --theta for sic and pi/4 for decoherent references by default.",
    )
    cmd.add_argument(
        "--against-mode",
        choices=[m.value for m in CoinMode],
        default="sic",
        help="Coin mode of decoherent references.",
    )
    cmd.add_argument("--q", type=float, default=0.0, help="Coin dephasing rate.")
    cmd.add_argument("--s", type=float, default=0.0, help="Position dephasing rate.")
    cmd.add_argument("--files", type=Path, nargs=2, metavar=("A", "B"), help="Exported files.")
    cmd.add_argument("--at-step", type=int, default=None, help="Compared step of the exported files.")
    cmd.set_defaults(handler=compare)

    cmd = commands.add_parser("decohere", help="Decoherent walk distributions and purity.")
    _add_walk_arguments(cmd)
    cmd.add_argument("--q", type=float, default=0.0, help="Coin dephasing rate.")
    cmd.add_argument("--s", type=float, default=0.0, help="Position dephasing rate.")
    cmd.set_defaults(handler=decohere)

    cmd = commands.add_parser("classify", help="Walk classes of step-dependent walks.")
    cmd.add_argument("--theta", type=parse_angle, nargs="*", default=[], help="Coin angles.")
    cmd.add_argument("--horizon", type=int, default=30, help="Number of evolved steps.")
    cmd.add_argument(
        "--reference",
        "--table1",
        dest="reference",
        action="store_true",
        help="Classify the reference angles of every walk class.",
    )
    cmd.set_defaults(handler=classify)

    cmd = commands.add_parser("bloch", help="Bloch vectors of the coin states.")
    _add_walk_arguments(cmd)
    cmd.add_argument(
        "--threshold",
        type=float,
        default=DEFAULT_SUPPORT_THRESHOLD,
        help="Positions with a smaller probability are skipped.",
    )
    cmd.set_defaults(handler=bloch)

    cmd = commands.add_parser("sweep", help="Angle sweep theta * (1 + j / 10), j = 0..10.")
    cmd.add_argument("--theta", type=parse_angle, required=True, help="Base angle.")
    cmd.add_argument("--steps", type=int, required=True, help="Number of steps.")
    cmd.add_argument("--horizon", type=int, default=30, help="Number of steps of the classification.")
    cmd.set_defaults(handler=sweep)

    for subparser in commands.choices.values():
        _add_common_arguments(subparser)

    return parser


# -- Entry points


async def run(argv: Sequence[str] | None = None) -> int:
    """
    Runs the command-line interface with the given arguments.

    Returns:
        The exit code: 0 on success, 1 on I/O failures, 2 on invalid arguments,
        3 if a compute cap is exceeded.
    """
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_BAD_ARGUMENTS

    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s", level=args.log_level)
    try:
        if args.config is None:
            config = ClassifierConfig.default()
        else:
            config = await load_classifier_config(args.config)

        report = await args.handler(args, Context(Limits.from_env(), config))
        await write_output(args.output, render(report, args.command, args.format))
    except ExportError as e:
        return _fail(e, EXIT_IO_ERROR)
    except ResourceLimitError as e:
        return _fail(e, EXIT_LIMIT_EXCEEDED)
    except StepCoinError as e:
        return _fail(e, EXIT_BAD_ARGUMENTS)

    if args.output is not None:
        logger.info("Wrote %s", args.output)

    return EXIT_OK


def _fail(error: StepCoinError, code: int) -> int:
    logger.debug("Command failed", exc_info=error)
    cause = f" ({error.__cause__})" if error.__cause__ is not None else ""
    sys.stderr.write(f"stepcoin: error: {error}{cause}\n")
    return code


def main() -> None:
    """Console script entry point."""
    sys.exit(anyio.run(run, sys.argv[1:]))
