"""Base distance backend with common functionality."""
from abc import ABC, abstractmethod
from typing import Any, Dict

from softspace.soft_reals import ParamSet, SoftReal
from softspace.soft_sets import SoftPoint, Universe


class DistanceBackend(ABC):
    """Base class for the ways a soft metric can be evaluated."""

    name: str = "base"
    exhaustive: bool = False

    def __init__(self, params: ParamSet, universe: Universe):
        """
        Initialize backend.

        Args:
            params: Parameter set indexing every soft real the backend returns
            universe: Universe the soft points are drawn from
        """
        self.params = params
        self.universe = universe

    @abstractmethod
    def normalize(self, point: SoftPoint) -> SoftPoint:
        """
        Validate a soft point and bring it into the backend's canonical form.

        Args:
            point: Soft point supplied by a caller

        Returns:
            Canonical soft point

        Raises:
            SoftDomainError: The point does not belong to the space
        """
        pass

    @abstractmethod
    def distance(self, p: SoftPoint, q: SoftPoint) -> SoftReal:
        """
        Evaluate the soft distance between two canonical soft points.

        Args:
            p: First soft point
            q: Second soft point

        Returns:
            Soft real distance
        """
        pass

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        """
        Summarize the backend for reports.

        Returns:
            JSON-safe description
        """
        pass
