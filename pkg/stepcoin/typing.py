from collections.abc import Callable, Mapping
from typing import TYPE_CHECKING, Literal, Protocol, TypeAlias, TypeVar, runtime_checkable

import numpy as np
from numpy.typing import NDArray

if TYPE_CHECKING:
    from .core import InitialSpec, WalkerState

T = TypeVar("T")

# -- Lattice

Position: TypeAlias = int
"""Integer lattice position of the walker."""

Probability: TypeAlias = float
"""Probability in the `[0, 1]` interval."""

ProbabilityMapping: TypeAlias = Mapping[Position, Probability]
"""Position to probability mapping."""

Nats: TypeAlias = float
"""
Information measure in natural units.

Divergences use `math.inf` to flag a support mismatch.
"""

# -- Arrays

ComplexArray: TypeAlias = NDArray[np.complex128]
"""Complex array, typically a state vector, an operator or a density matrix."""

RealArray: TypeAlias = NDArray[np.float64]
"""Real array, typically probabilities over a dense range of positions."""

# -- Options

FitMethod: TypeAlias = Literal["moments", "least-squares"]
"""Gaussian fit method."""

OutputFormat: TypeAlias = Literal["csv", "json"]
"""Export file format."""

ThreadTask: TypeAlias = Callable[[], T]
"""Argument-less callable that is executed in a worker thread."""

# -- Walkers


@runtime_checkable
class Walk(Protocol):
    """Protocol definition for walkers that evolve an initial coin state from the origin."""

    def evolve(self, init: "InitialSpec", steps: int) -> "WalkerState":
        """Returns the walker state after the given number of steps."""
        ...

