"""Tabulated backend: every soft distance is stored in a dense table."""
from typing import Any, Dict, Tuple

import numpy as np

from backends.base import DistanceBackend
from core.exceptions import SoftDomainError
from softspace.soft_reals import ParamSet, SoftReal
from softspace.soft_sets import SoftPoint, Universe


class TabulatedBackend(DistanceBackend):
    """Soft metric over a finite universe stored as a |SP| x |SP| x |E| tensor."""

    name = "tabulated"
    exhaustive = True

    def __init__(self, params: ParamSet, universe: Universe, table: np.ndarray):
        """
        Initialize tabulated backend.

        Args:
            params: Parameter set (table's last axis)
            universe: Finite universe
            table: Distances indexed by soft point positions, label-major order
        """
        super().__init__(params, universe)
        if not universe.is_finite:
            raise SoftDomainError("tabulated spaces need a finite universe")

        self.points: Tuple[SoftPoint, ...] = tuple(
            SoftPoint(element, label) for label in params.labels for element in universe.elements
        )
        self._index: Dict[SoftPoint, int] = {p: i for i, p in enumerate(self.points)}

        size = len(self.points)
        data = np.array(table, dtype=float)
        if data.shape != (size, size, len(params)):
            raise SoftDomainError(
                f"distance table has shape {data.shape}, expected {(size, size, len(params))}"
            )
        if not np.all(np.isfinite(data)):
            raise SoftDomainError("distance table entries must be finite")
        data.setflags(write=False)
        self.table = data

    def index_of(self, point: SoftPoint) -> int:
        """Position of a soft point in the table."""
        try:
            return self._index[point]
        except (KeyError, TypeError):
            raise SoftDomainError(f"soft point {point} is not in the space") from None

    def normalize(self, point: SoftPoint) -> SoftPoint:
        self.index_of(point)
        return point

    def distance(self, p: SoftPoint, q: SoftPoint) -> SoftReal:
        return SoftReal(self.params, self.table[self.index_of(p), self.index_of(q)])

    def distances_from(self, point: SoftPoint) -> np.ndarray:
        """Row of the table for one soft point, shape (|SP|, |E|)."""
        return self.table[self.index_of(point)]

    def describe(self) -> Dict[str, Any]:
        return {
            "backend": self.name,
            "universe": [str(e) for e in self.universe.elements],
            "soft_points": len(self.points),
        }
