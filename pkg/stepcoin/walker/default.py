from __future__ import annotations

from typing import TYPE_CHECKING

from stepcoin.core import evolve, iter_evolution

if TYPE_CHECKING:
    from collections.abc import Iterator

    from stepcoin.core import CoinSpec, InitialSpec, Limits, WalkerState


class Walker:
    """
    The default, sparse walker.

    Only occupied positions are stored and updated, so a step costs time proportional to the
    number of occupied positions. Localized walks stay cheap for any number of steps.
    """

    __slots__ = ("_spec", "_limits")

    def __init__(self, spec: CoinSpec, *, limits: Limits | None = None) -> None:
        """
        Initialization.

        Arguments:
            spec: The coin specification of the walk.
            limits: Compute caps, `Limits.default()` if not set.
        """
        self._spec = spec
        self._limits = limits

    @property
    def spec(self) -> CoinSpec:
        """The coin specification of the walk."""
        return self._spec

    def iterate(self, init: InitialSpec, steps: int) -> Iterator[WalkerState]:
        """
        Returns an iterator over the walker states of steps `0..steps`.

        Raises:
            InvalidParameterError: If an argument is invalid.
            ResourceLimitError: If `steps` exceeds the step cap.
        """
        return iter_evolution(init, self._spec, steps, limits=self._limits)

    def evolve(self, init: InitialSpec, steps: int) -> WalkerState:
        """
        Returns the walker state after the given number of steps.

        Raises:
            InvalidParameterError: If an argument is invalid.
            ResourceLimitError: If `steps` exceeds the step cap.
        """
        return evolve(init, self._spec, steps, limits=self._limits)
