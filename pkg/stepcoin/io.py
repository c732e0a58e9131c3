from __future__ import annotations

from typing import TYPE_CHECKING

from anyio import open_file as open_file

from .core import ExportError

if TYPE_CHECKING:
    from pathlib import Path


async def read_text(path: Path) -> str:
    """
    Returns the content of the given UTF-8 text file.

    Raises:
        ExportError: If the file can't be read.
    """
    try:
        async with await open_file(path, "r", encoding="utf-8") as f:
            return await f.read()
    except OSError as e:
        raise ExportError(f"File can't be read: {str(path)}") from e


async def write_text(path: Path, text: str) -> None:
    """
    Writes the given text to the given file (UTF-8, `\\n` line endings), replacing its content.

    Raises:
        ExportError: If the file can't be written.
    """
    try:
        async with await open_file(path, "w", encoding="utf-8", newline="\n") as f:
            await f.write(text)
    except OSError as e:
        raise ExportError(f"File can't be written: {str(path)}") from e
