"""Soft real numbers: parameter-indexed vectors with pointwise arithmetic and order."""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Hashable, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from core.exceptions import InfeasibleError, SoftDomainError

Label = Hashable


@dataclass(frozen=True)
class ParamSet:
    """
    Ordered parameter labels, optionally carrying one numeric value per label.

    Attributes:
        labels: Unique labels in a fixed order
        values: Numeric value per label, or None when the labels are symbolic
    """

    labels: Tuple[Label, ...]
    values: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if not self.labels:
            raise SoftDomainError("parameter set must not be empty")
        if len(set(self.labels)) != len(self.labels):
            raise SoftDomainError(f"duplicate parameter labels in {list(self.labels)}")
        if self.values is not None:
            if len(self.values) != len(self.labels):
                raise SoftDomainError("either every label carries a value or none does")
            if not all(math.isfinite(v) for v in self.values):
                raise SoftDomainError("parameter values must be finite")

    @classmethod
    def of(cls, labels: Iterable[Label], values: Optional[Iterable[float]] = None) -> "ParamSet":
        """Build a parameter set from any iterables."""
        return cls(tuple(labels), None if values is None else tuple(float(v) for v in values))

    @classmethod
    def numeric(cls, mapping: Dict[Label, float]) -> "ParamSet":
        """Build a numeric parameter set from a label -> value mapping."""
        return cls.of(mapping.keys(), mapping.values())

    @property
    def is_numeric(self) -> bool:
        return self.values is not None

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def index(self, label: Label) -> int:
        """Position of a label; raises SoftDomainError for unknown labels."""
        try:
            return self.labels.index(label)
        except ValueError:
            raise SoftDomainError(f"unknown parameter label {label!r}") from None

    def value_of(self, label: Label) -> float:
        """Numeric value carried by a label."""
        if self.values is None:
            raise SoftDomainError(f"label {label!r} carries no numeric value")
        return self.values[self.index(label)]


class SoftReal:
    """
    A soft real number: one finite real per parameter label.

    Instances are immutable; the backing array is read-only.
    """

    __slots__ = ("params", "entries")

    def __init__(self, params: ParamSet, entries: Union[Sequence[float], np.ndarray]):
        array = np.array(entries, dtype=float).reshape(-1)
        if array.shape[0] != len(params):
            raise SoftDomainError(
                f"soft real has {array.shape[0]} entries for {len(params)} parameters"
            )
        if not np.all(np.isfinite(array)):
            raise SoftDomainError("soft real entries must be finite")
        array.setflags(write=False)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "entries", array)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("SoftReal is immutable")

    @classmethod
    def constant(cls, params: ParamSet, value: float) -> "SoftReal":
        """Soft real with every component equal to value."""
        return cls(params, np.full(len(params), float(value)))

    @classmethod
    def zero(cls, params: ParamSet) -> "SoftReal":
        return cls.constant(params, 0.0)

    @classmethod
    def one(cls, params: ParamSet) -> "SoftReal":
        return cls.constant(params, 1.0)

    def __getitem__(self, label: Label) -> float:
        return float(self.entries[self.params.index(label)])

    def __len__(self) -> int:
        return len(self.params)

    def __iter__(self):
        return iter(self.entries.tolist())

    def sup(self) -> float:
        """Largest component."""
        return float(self.entries.max())

    def inf(self) -> float:
        """Smallest component."""
        return float(self.entries.min())

    def is_zero(self, margin: float = 0.0) -> bool:
        """True iff every component is within margin of zero."""
        return bool(np.all(np.abs(self.entries) <= margin))

    def is_positive(self, margin: float = 0.0) -> bool:
        """True iff every component exceeds margin."""
        return bool(np.all(self.entries > margin))

    def is_constant(self) -> bool:
        return bool(np.all(self.entries == self.entries[0]))

    def to_list(self) -> list:
        return self.entries.tolist()

    def as_dict(self) -> Dict[str, float]:
        return {str(label): float(v) for label, v in zip(self.params.labels, self.entries)}

    def __add__(self, other: Union["SoftReal", float]) -> "SoftReal":
        return sr_arith(ArithMode.ADD, self, other)

    def __sub__(self, other: Union["SoftReal", float]) -> "SoftReal":
        return sr_arith(ArithMode.SUB, self, other)

    def __mul__(self, other: Union["SoftReal", float]) -> "SoftReal":
        if isinstance(other, SoftReal):
            return sr_arith(ArithMode.MUL, self, other)
        return sr_arith(ArithMode.SCALE, self, other)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["SoftReal", float]) -> "SoftReal":
        return sr_arith(ArithMode.DIV, self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SoftReal):
            return NotImplemented
        return self.params == other.params and bool(np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash((self.params, self.entries.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"{v:g}" for v in self.entries)
        return f"SoftReal({body})"


@dataclass(frozen=True)
class Ordering:
    """Verdict of a pointwise comparison between two soft reals."""

    le: bool
    ge: bool
    lt: bool
    gt: bool
    eq: bool
    incomparable: bool


class ArithMode(str, Enum):
    """Componentwise arithmetic operations."""

    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    SCALE = "scale"
    DIV = "div"


def _require_same_params(r: SoftReal, s: SoftReal) -> None:
    if r.params != s.params:
        raise SoftDomainError("soft reals are indexed by different parameter sets")


def sr_compare(r: SoftReal, s: SoftReal, margin: float = 0.0) -> Ordering:
    """
    Compare two soft reals in the pointwise partial order.

    Args:
        r: Left operand
        s: Right operand
        margin: eta >= 0; strict verdicts require r(e) < s(e) - eta (resp. > s(e) + eta)

    Returns:
        Ordering verdict
    """
    _require_same_params(r, s)
    if margin < 0:
        raise SoftDomainError("comparison margin must be non-negative")
    a, b = r.entries, s.entries
    le = bool(np.all(a <= b))
    ge = bool(np.all(a >= b))
    return Ordering(
        le=le,
        ge=ge,
        lt=bool(np.all(a < b - margin)),
        gt=bool(np.all(a > b + margin)),
        eq=bool(np.all(a == b)),
        incomparable=not le and not ge,
    )


def sr_arith(mode: ArithMode, r: SoftReal, s: Union[SoftReal, float]) -> SoftReal:
    """
    Componentwise arithmetic on soft reals.

    The second operand may be a scalar, broadcast to every component.

    Raises:
        SoftDomainError: Mismatched parameter sets or a zero divisor component
    """
    mode = ArithMode(mode)
    if isinstance(s, SoftReal):
        _require_same_params(r, s)
        other = s.entries
    else:
        other = np.full(len(r.params), float(s))

    if mode is ArithMode.ADD:
        result = r.entries + other
    elif mode is ArithMode.SUB:
        result = r.entries - other
    elif mode in (ArithMode.MUL, ArithMode.SCALE):
        result = r.entries * other
    else:
        zeros = np.flatnonzero(other == 0.0)
        if zeros.size:
            label = r.params.labels[int(zeros[0])]
            raise SoftDomainError(f"division by zero at parameter {label!r}")
        result = r.entries / other
    return SoftReal(r.params, result)


def geometric_tail_bound(alpha: SoftReal, m: int, base: SoftReal) -> SoftReal:
    """
    Majorant alpha^m / (1 - alpha) * base of a geometric tail, componentwise.

    Args:
        alpha: Rate, every component in [0, 1)
        m: Number of steps already taken
        base: Initial step distance, >= 0

    Raises:
        InfeasibleError: Some component of alpha is >= 1
    """
    _require_same_params(alpha, base)
    if m < 0:
        raise SoftDomainError("step count must be non-negative")
    if np.any(alpha.entries < 0):
        raise SoftDomainError("rate components must be non-negative")
    if np.any(base.entries < 0):
        raise SoftDomainError("base distance must be non-negative")
    over = np.flatnonzero(alpha.entries >= 1.0)
    if over.size:
        label = alpha.params.labels[int(over[0])]
        raise InfeasibleError(f"rate component at {label!r} is {alpha.entries[over[0]]:g} >= 1")
    a = alpha.entries
    return SoftReal(alpha.params, np.power(a, m) / (1.0 - a) * base.entries)
