"""Soft mappings (f, phi): point images, set images and preimages, continuity checks."""
import itertools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from numbers import Real
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.config import get_settings
from core.exceptions import PreconditionError, SoftDomainError
from core.logging import logger
from softspace.metric import SoftMetricSpace
from softspace.sampling import SamplePlan, sample_near
from softspace.soft_reals import Label, SoftReal, sr_compare
from softspace.soft_sets import Element, SoftPoint, SoftSet
from softspace.topology import closure, interior, is_open

settings = get_settings()


class PointMap(ABC):
    """Point part f: X -> Y of a soft mapping."""

    kind: str = "point"

    @abstractmethod
    def __call__(self, element: Element) -> Element:
        pass

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        pass


class ParamMap(ABC):
    """Parameter part phi: E -> E' of a soft mapping."""

    kind: str = "param"
    numeric: bool = True

    @abstractmethod
    def __call__(self, label: Label) -> Label:
        pass

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        pass


def _as_vector(element: Element) -> np.ndarray:
    if isinstance(element, Real) and not isinstance(element, bool):
        element = (element,)
    try:
        return np.asarray(element, dtype=float)
    except (TypeError, ValueError):
        raise SoftDomainError(f"element {element!r} is not a numeric vector") from None


def _as_number(label: Label) -> float:
    if isinstance(label, Real) and not isinstance(label, bool):
        return float(label)
    raise SoftDomainError(f"label {label!r} has no numeric value; normalize the point through its space first")


class AffinePointMap(PointMap):
    """x -> A x + b on R^n."""

    kind = "affine"

    def __init__(self, matrix: Sequence[Sequence[float]], offset: Sequence[float]):
        self.matrix = np.array(matrix, dtype=float)
        self.offset = np.array(offset, dtype=float)
        n = self.offset.shape[0] if self.offset.ndim == 1 else -1
        if self.matrix.shape != (n, n):
            raise SoftDomainError(f"affine map needs an n x n matrix and an n-vector, got {self.matrix.shape} and {self.offset.shape}")
        if not (np.all(np.isfinite(self.matrix)) and np.all(np.isfinite(self.offset))):
            raise SoftDomainError("affine map coefficients must be finite")
        self.matrix.setflags(write=False)
        self.offset.setflags(write=False)

    @classmethod
    def scaling(cls, factor: float, dim: int = 1) -> "AffinePointMap":
        return cls(np.eye(dim) * factor, np.zeros(dim))

    @property
    def lipschitz(self) -> float:
        """Operator 2-norm of A."""
        return float(np.linalg.norm(self.matrix, 2))

    def __call__(self, element: Element) -> Element:
        x = _as_vector(element)
        if x.shape != self.offset.shape:
            raise SoftDomainError(f"element {element!r} does not have dimension {self.offset.shape[0]}")
        return tuple(float(c) for c in self.matrix @ x + self.offset)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "A": self.matrix.tolist(), "b": self.offset.tolist()}


class TablePointMap(PointMap):
    """Explicit element table on a finite universe."""

    kind = "table"

    def __init__(self, mapping: Mapping[Element, Element]):
        self.mapping = dict(mapping)

    def __call__(self, element: Element) -> Element:
        try:
            return self.mapping[element]
        except KeyError:
            raise SoftDomainError(f"point map has no image for element {element!r}") from None

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "map": {str(k): str(v) for k, v in self.mapping.items()}}


class AffineParamMap(ParamMap):
    """v -> a * v + c on numeric label values."""

    kind = "affine"

    def __init__(self, a: float, c: float = 0.0):
        if not (math.isfinite(a) and math.isfinite(c)):
            raise SoftDomainError("affine parameter map coefficients must be finite")
        self.a = float(a)
        self.c = float(c)

    def __call__(self, label: Label) -> Label:
        return self.a * _as_number(label) + self.c

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "a": self.a, "c": self.c}


class ReciprocalSumParamMap(ParamMap):
    """v -> v + 1 / v."""

    kind = "recip_sum"

    def __call__(self, label: Label) -> Label:
        v = _as_number(label)
        if v == 0:
            raise SoftDomainError("reciprocal-sum parameter map is undefined at 0")
        return v + 1.0 / v

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind}


class TableParamMap(ParamMap):
    """Explicit label table."""

    kind = "table"
    numeric = False

    def __init__(self, mapping: Mapping[Label, Label]):
        self.mapping = dict(mapping)

    def __call__(self, label: Label) -> Label:
        try:
            return self.mapping[label]
        except (KeyError, TypeError):
            raise SoftDomainError(f"parameter map has no image for label {label!r}") from None

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "map": {str(k): str(v) for k, v in self.mapping.items()}}


class IdentityPointMap(PointMap):
    kind = "identity"

    def __call__(self, element: Element) -> Element:
        return element

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind}


class IdentityParamMap(ParamMap):
    kind = "identity"
    numeric = False

    def __call__(self, label: Label) -> Label:
        return label

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind}


@dataclass(frozen=True)
class SoftMapping:
    """A soft mapping (f, phi) sending x_l to f(x)_phi(l)."""

    f: PointMap
    phi: ParamMap

    @classmethod
    def identity(cls) -> "SoftMapping":
        return cls(IdentityPointMap(), IdentityParamMap())

    def __call__(self, p: SoftPoint) -> SoftPoint:
        return apply_point(self, p)

    def describe(self) -> Dict[str, Any]:
        return {"f": self.f.describe(), "phi": self.phi.describe()}


def apply_point(m: SoftMapping, p: SoftPoint, space: Optional[SoftMetricSpace] = None) -> SoftPoint:
    """
    Image of one soft point: (f(x))_phi(l).

    Args:
        m: Soft mapping
        p: Soft point of the domain
        space: Domain space used to normalize p (seed labels to numeric values)

    Raises:
        SoftDomainError: phi or f has no image for the point
    """
    if space is not None:
        p = space.point(p.element, p.label)
    return SoftPoint(m.f(p.element), m.phi(p.label))


class Direction(str, Enum):
    IMAGE = "image"
    PREIMAGE = "preimage"


def image_preimage(
    m: SoftMapping,
    s: SoftSet,
    direction: Direction,
    frame: Optional[SoftMetricSpace] = None,
) -> SoftSet:
    """
    Image or preimage of a finite soft set.

    Args:
        m: Soft mapping
        s: Soft set (domain set for image, codomain set for preimage)
        direction: image or preimage
        frame: The other side's space; defaults to s's own universe and parameters

    Returns:
        Soft set in the frame
    """
    direction = Direction(direction)
    universe = frame.universe if frame is not None else s.universe
    params = frame.params if frame is not None else s.params

    if direction is Direction.IMAGE:
        return SoftSet.from_points(universe, params, (apply_point(m, p) for p in s.points()))

    members = []
    for label in params.labels:
        for element in universe.elements:
            p = SoftPoint(element, label)
            if apply_point(m, p) in s:
                members.append(p)
    return SoftSet.from_points(universe, params, members)


# --------------------------------------------------------------------------- epsilon-delta continuity


@dataclass(frozen=True)
class EpsilonVerdict:
    """Outcome for one epsilon: the witnessing delta or the failing sample."""

    epsilon: SoftReal
    delta: Optional[float]
    samples_checked: int
    failing_sample: Optional[SoftPoint] = None

    @property
    def witnessed(self) -> bool:
        return self.delta is not None

    def summary(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon.to_list(),
            "verdict": "witnessed delta" if self.witnessed else "no delta found at resolution",
            "delta": self.delta,
            "samples_checked": self.samples_checked,
            "failing_sample": None if self.failing_sample is None else str(self.failing_sample),
        }


@dataclass(frozen=True)
class ContinuityVerdict:
    point: SoftPoint
    per_epsilon: Tuple[EpsilonVerdict, ...]
    note: str = ""

    @property
    def continuous(self) -> bool:
        return all(v.witnessed for v in self.per_epsilon)

    def summary(self) -> Dict[str, Any]:
        return {
            "point": str(self.point),
            "continuous": self.continuous,
            "note": self.note,
            "per_epsilon": [v.summary() for v in self.per_epsilon],
        }


def check_continuity_at(
    dom: SoftMetricSpace,
    cod: SoftMetricSpace,
    m: SoftMapping,
    p: SoftPoint,
    eps_grid: Sequence[SoftReal],
    plan: Optional[SamplePlan] = None,
    halvings: Optional[int] = None,
) -> ContinuityVerdict:
    """
    Epsilon-delta continuity of (f, phi) at p, tested on seeded samples.

    For each epsilon the candidates delta = eps * 2^-k (k = 0..halvings) are tried in
    order; delta is witnessed when every sample q with d(p, q) <= delta maps inside the
    open epsilon-ball around the image of p. Finite spaces are discrete and pass trivially.

    Args:
        dom: Domain space
        cod: Codomain space
        m: Soft mapping
        p: Soft point of the domain
        eps_grid: Soft real radii over the codomain parameters
        plan: Sample count and seed; epsilon number i uses seed + i
        halvings: Number of delta halvings to try
    """
    if dom.is_tabulated:
        return ContinuityVerdict(p, (), note="discrete: trivially continuous")

    plan = plan or SamplePlan.default()
    halvings = settings.continuity_halvings if halvings is None else halvings
    p = dom.point(p.element, p.label)
    fp = apply_point(m, p)

    verdicts = []
    for i, eps in enumerate(eps_grid):
        if not eps.is_positive():
            raise SoftDomainError("continuity radii must be positive in every component")
        target = eps.inf()
        failing: Optional[SoftPoint] = None
        found: Optional[float] = None
        checked = 0
        for k in range(halvings + 1):
            delta = target * 2.0 ** -k
            samples = sample_near(dom, p, delta, plan.rng(i), plan.samples)
            checked += len(samples)
            bad = next((q for q in samples if not sr_compare(cod.distance(fp, apply_point(m, q)), eps).lt), None)
            if bad is None:
                found = delta
                break
            failing = failing or bad
        verdicts.append(EpsilonVerdict(eps, found, checked, None if found is not None else failing))

    verdict = ContinuityVerdict(p, tuple(verdicts))
    logger.info("Continuity check finished", extra={"point": str(p), "continuous": verdict.continuous, "seed": plan.seed})
    return verdict


# --------------------------------------------------------------------------- equivalent continuity clauses


CLAUSES = (
    "preimage_of_open_is_open",
    "preimage_of_closed_is_closed",
    "image_of_closure_in_closure_of_image",
    "closure_of_preimage_in_preimage_of_closure",
    "preimage_of_interior_in_interior_of_preimage",
)


@dataclass(frozen=True)
class EquivalenceReport:
    """Truth of each continuity clause, evaluated independently, and whether they agree."""

    clauses: Dict[str, bool]
    exhaustive: bool
    domain_subsets: int
    codomain_subsets: int

    @property
    def agree(self) -> bool:
        return len(set(self.clauses.values())) == 1

    def summary(self) -> Dict[str, Any]:
        return {
            "clauses": dict(self.clauses),
            "agree": self.agree,
            "exhaustive": self.exhaustive,
            "domain_subsets": self.domain_subsets,
            "codomain_subsets": self.codomain_subsets,
        }


def _subsets(space: SoftMetricSpace, cap: int, plan: SamplePlan, offset: int) -> Tuple[List[SoftSet], bool]:
    points = space.points()
    frame = (space.universe, space.params)
    if len(points) <= cap:
        chosen = [
            SoftSet.from_points(*frame, (p for p, keep in zip(points, mask) if keep))
            for mask in itertools.product((False, True), repeat=len(points))
        ]
        return chosen, True
    rng = plan.rng(offset)
    masks = rng.random((plan.samples, len(points))) < 0.5
    chosen = [SoftSet.from_points(*frame, (p for p, keep in zip(points, mask) if keep)) for mask in masks]
    chosen += [space.null(), space.absolute()]
    return chosen, False


def check_continuity_equivalences(
    dom: SoftMetricSpace,
    cod: SoftMetricSpace,
    m: SoftMapping,
    cap: Optional[int] = None,
    plan: Optional[SamplePlan] = None,
) -> EquivalenceReport:
    """
    Evaluate the five equivalent characterizations of continuity on finite spaces.

    Every soft subset is enumerated when a space has at most `cap` soft points;
    larger spaces use seeded random subsets.
    """
    dom._table_backend()
    cod._table_backend()
    cap = settings.subset_enumeration_cap if cap is None else cap
    plan = plan or SamplePlan.default()

    dom_sets, dom_all = _subsets(dom, cap, plan, 0)
    cod_sets, cod_all = _subsets(cod, cap, plan, 1)

    def pre(g: SoftSet) -> SoftSet:
        return image_preimage(m, g, Direction.PREIMAGE, dom)

    def img(f: SoftSet) -> SoftSet:
        return image_preimage(m, f, Direction.IMAGE, cod)

    @lru_cache(maxsize=None)
    def open_in(space: SoftMetricSpace, s: SoftSet) -> bool:
        return is_open(space, s).is_open

    @lru_cache(maxsize=None)
    def closure_in(space: SoftMetricSpace, s: SoftSet) -> SoftSet:
        return closure(space, s)

    @lru_cache(maxsize=None)
    def interior_in(space: SoftMetricSpace, s: SoftSet) -> SoftSet:
        return interior(space, s)

    results = {name: True for name in CLAUSES}
    for g in cod_sets:
        g_pre = pre(g)
        if open_in(cod, g) and not open_in(dom, g_pre):
            results[CLAUSES[0]] = False
        if open_in(cod, g.complement()) and not open_in(dom, g_pre.complement()):
            results[CLAUSES[1]] = False
        if not closure_in(dom, g_pre).issubset(pre(closure_in(cod, g))):
            results[CLAUSES[3]] = False
        if not pre(interior_in(cod, g)).issubset(interior_in(dom, g_pre)):
            results[CLAUSES[4]] = False
    for f in dom_sets:
        if not img(closure_in(dom, f)).issubset(closure_in(cod, img(f))):
            results[CLAUSES[2]] = False
            break

    report = EquivalenceReport(results, dom_all and cod_all, len(dom_sets), len(cod_sets))
    logger.info("Continuity clauses evaluated", extra={"clauses": results, "agree": report.agree})
    if not report.agree:
        logger.warning("Continuity clauses disagree", extra={"clauses": results})
    return report


# --------------------------------------------------------------------------- sequential probe


@dataclass(frozen=True)
class ProbeVerdict:
    passed: bool
    first_n: Optional[int]
    domain_gap: Optional[float]
    image_gap: Optional[float]
    note: str = ""

    def summary(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "first_n": self.first_n,
            "domain_gap": self.domain_gap,
            "image_gap": self.image_gap,
            "note": self.note,
        }


def _checkpoints(horizon: int) -> List[int]:
    raw = np.geomspace(1, horizon, num=64)
    return sorted({int(round(n)) for n in raw} | {horizon})


def sequential_probe(
    dom: SoftMetricSpace,
    cod: SoftMetricSpace,
    m: SoftMapping,
    seq: Callable[[int], SoftPoint],
    p: SoftPoint,
    tol: Optional[float] = None,
    horizon: Optional[int] = None,
) -> ProbeVerdict:
    """
    Check that images of a sequence converging to p converge to the image of p.

    The sequence is evaluated on log-spaced checkpoints n = 1..horizon. Its own
    distances to p must be non-increasing there and fall below tol by the horizon.
    The first checkpoint after which every image gap stays below tol is refined
    by bisection.

    Args:
        seq: n -> x_n for n >= 1
        tol: Tolerance for both decays
        horizon: Last index evaluated

    Raises:
        PreconditionError: The sequence itself does not visibly converge to p
    """
    if dom.is_tabulated:
        return ProbeVerdict(True, None, None, None, note="discrete: convergent sequences are eventually constant")

    tol = settings.probe_tolerance if tol is None else tol
    horizon = settings.probe_horizon if horizon is None else horizon
    margin = settings.comparison_margin
    p = dom.point(p.element, p.label)
    fp = apply_point(m, p)

    def domain_gap(n: int) -> float:
        return dom.distance(seq(n), p).sup()

    def image_gap(n: int) -> float:
        return cod.distance(apply_point(m, seq(n), dom), fp).sup()

    checkpoints = _checkpoints(horizon)
    gaps = [domain_gap(n) for n in checkpoints]
    if any(b > a + margin for a, b in zip(gaps, gaps[1:])) or gaps[-1] >= tol:
        raise PreconditionError(
            f"sequence does not decay monotonically below {tol:g} by n={horizon} (last gap {gaps[-1]:g})"
        )

    images = [image_gap(n) for n in checkpoints]
    below = [g < tol for g in images]
    start = next((i for i in range(len(below)) if all(below[i:])), None)
    if start is None:
        return ProbeVerdict(False, None, gaps[-1], images[-1], note=f"images stay above {tol:g} up to n={horizon}")

    lo = checkpoints[start - 1] if start > 0 else 0
    hi = checkpoints[start]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if image_gap(mid) < tol:
            hi = mid
        else:
            lo = mid
    logger.info("Sequential probe finished", extra={"first_n": hi, "horizon": horizon})
    return ProbeVerdict(True, hi, gaps[-1], images[-1])
