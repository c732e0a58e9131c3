from __future__ import annotations

import math
import threading

import pytest

from stepcoin import InvalidParameterError, parse_angle
from stepcoin.utils import parse_complex, run_in_threads


@pytest.mark.parametrize(
    ("text", "expected"),
    (
        ("0", 0.0),
        ("1.25", 1.25),
        ("-0.5", -0.5),
        ("pi", math.pi),
        ("π/12", math.pi / 12),
        ("pi/3", math.pi / 3),
        ("2pi/5", 2 * math.pi / 5),
        ("2*pi/5", 2 * math.pi / 5),
        ("3.59pi/5", 3.59 * math.pi / 5),
        ("-pi/4", -math.pi / 4),
        (" PI / 2 ", math.pi / 2),
        ("3/4", 0.75),
    ),
)
def test_parse_angle(text: str, expected: float) -> None:
    assert parse_angle(text) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("text", ("", "tau", "pi/0", "nan", "inf", "2pi/", "pi pi"))
def test_parse_angle_errors(text: str) -> None:
    with pytest.raises(InvalidParameterError):
        parse_angle(text)


@pytest.mark.parametrize(
    ("text", "expected"),
    (
        ("0.6", 0.6),
        ("1j", 1j),
        ("0.5+0.5i", 0.5 + 0.5j),
        ("-i", -1j),
        (" 0.3 - 0.4j ", 0.3 - 0.4j),
    ),
)
def test_parse_complex(text: str, expected: complex) -> None:
    assert parse_complex(text) == expected


@pytest.mark.parametrize("text", ("", "one", "nan", "1+infj"))
def test_parse_complex_errors(text: str) -> None:
    with pytest.raises(InvalidParameterError):
        parse_complex(text)


@pytest.mark.asyncio
async def test_run_in_threads() -> None:
    main_thread = threading.get_ident()
    results = await run_in_threads([lambda i=i: (i * i, threading.get_ident()) for i in range(8)], limit=3)
    assert [r for r, _ in results] == [i * i for i in range(8)]
    assert all(thread != main_thread for _, thread in results)
    assert await run_in_threads([]) == []


@pytest.mark.asyncio
async def test_run_in_threads_error() -> None:
    def fail() -> int:
        raise InvalidParameterError("failed")

    with pytest.raises(InvalidParameterError):
        await run_in_threads([lambda: 1, fail, lambda: 3])
