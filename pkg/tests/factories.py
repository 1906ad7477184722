"""Seeded builders for random spaces and mappings used across suites."""
import numpy as np

from softspace.mappings import SoftMapping, TableParamMap, TablePointMap
from softspace.metric import SoftMetricSpace, repair_to_metric
from softspace.soft_reals import ParamSet
from softspace.soft_sets import Universe


def random_repaired_space(rng: np.random.Generator, n_elements: int = 4, n_labels: int = 2) -> SoftMetricSpace:
    """Repair a uniform [0, 2) raw table over n_elements x n_labels soft points."""
    universe = Universe.finite([f"x{i}" for i in range(n_elements)])
    params = ParamSet.of([f"e{k}" for k in range(n_labels)])
    size = n_elements * n_labels
    raw = rng.uniform(0.0, 2.0, size=(size, size, n_labels))
    return repair_to_metric(raw, universe, params)


def random_table_mapping(rng: np.random.Generator, space: SoftMetricSpace) -> SoftMapping:
    """Uniformly random table maps on elements and labels."""
    elements = list(space.universe.elements)
    labels = list(space.params.labels)
    f = TablePointMap({e: elements[int(rng.integers(len(elements)))] for e in elements})
    phi = TableParamMap({l: labels[int(rng.integers(len(labels)))] for l in labels})
    return SoftMapping(f, phi)
