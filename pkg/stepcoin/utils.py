from __future__ import annotations

import math
import os
import re
from collections.abc import Sequence
from typing import TYPE_CHECKING, TypeVar, cast

from anyio import CapacityLimiter, create_task_group, to_thread

from .core import InvalidParameterError

if TYPE_CHECKING:
    from .typing import ThreadTask

T = TypeVar("T")

_angle_pattern = re.compile(
    r"(?P<sign>[+-])?\s*"
    r"(?P<coefficient>\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*"
    r"(?P<pi>pi|π)?"
    r"(?:\s*/\s*(?P<denominator>\d+(?:\.\d*)?|\.\d+))?"
)


def parse_angle(text: str) -> float:
    """
    Parses an angle literal in radians.

    Besides plain numbers, multiples and fractions of pi are accepted, for example
    `pi/3`, `2pi/5`, `3.59pi/5`, `-pi/4`, `2*pi/5`, or `π/12`.

    Raises:
        InvalidParameterError: If the text is not a finite angle literal.
    """
    literal = text.strip().lower()
    try:
        value = float(literal)
    except ValueError:
        match = _angle_pattern.fullmatch(literal)
        if match is None or (match["coefficient"] is None and match["pi"] is None):
            raise InvalidParameterError(f"Invalid angle: {text!r}") from None

        value = float(match["coefficient"] or 1.0) * (math.pi if match["pi"] else 1.0)
        if (denominator := match["denominator"]) is not None:
            if float(denominator) == 0.0:
                raise InvalidParameterError(f"Zero denominator in angle: {text!r}") from None

            value /= float(denominator)

        if match["sign"] == "-":
            value = -value

    if not math.isfinite(value):
        raise InvalidParameterError(f"The angle must be finite: {text!r}")

    return value


def parse_complex(text: str) -> complex:
    """
    Parses a complex literal such as `0.6`, `1j`, or `0.5+0.5i`.

    Both `i` and `j` are accepted as the imaginary unit.

    Raises:
        InvalidParameterError: If the text is not a finite complex literal.
    """
    literal = text.strip().replace(" ", "").replace("i", "j")
    try:
        value = complex(literal)
    except ValueError as e:
        raise InvalidParameterError(f"Invalid complex number: {text!r}") from e

    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise InvalidParameterError(f"The complex number must be finite: {text!r}")

    return value


async def run_in_threads(tasks: Sequence[ThreadTask[T]], *, limit: int | None = None) -> list[T]:
    """
    Runs the given tasks concurrently in worker threads.

    Arguments:
        tasks: The tasks to run.
        limit: The maximum number of concurrently running tasks, the CPU count by default.

    Returns:
        The results in task order.

    Raises:
        Exception: The first error raised by a task, after every task has finished.
    """
    limiter = CapacityLimiter(limit or os.cpu_count() or 1)
    results: list[T | None] = [None] * len(tasks)
    errors: list[Exception] = []

    async def run(index: int, task: ThreadTask[T]) -> None:
        try:
            results[index] = await to_thread.run_sync(task, limiter=limiter)
        except Exception as e:
            errors.append(e)

    async with create_task_group() as tg:
        for index, task in enumerate(tasks):
            tg.start_soon(run, index, task)

    if errors:
        raise errors[0]

    return cast(list[T], results)
