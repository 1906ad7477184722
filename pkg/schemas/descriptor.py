"""Pydantic schemas for space descriptor files."""
import json
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic_core import PydanticCustomError

from core.exceptions import DescriptorError


class StrictModel(BaseModel):
    """Base for descriptor records: unknown fields rejected, numbers finite."""

    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)


class ParameterRecord(StrictModel):
    label: str = Field(..., min_length=1, description="Parameter label")
    value: Optional[float] = Field(None, description="Numeric value used by analytic metrics")


class DistanceEntry(StrictModel):
    """Soft distance between two soft points, one value per parameter."""

    p: Tuple[str, str] = Field(..., description="[element, label]")
    q: Tuple[str, str] = Field(..., description="[element, label]")
    value: List[float]


class TabulatedSpace(StrictModel):
    backend: Literal["tabulated"]
    universe: List[str] = Field(..., min_length=1)
    distances: List[DistanceEntry] = Field(default_factory=list)


class ParamPart(StrictModel):
    kind: Literal["abs_diff", "capped_abs_diff"]
    weight: float = Field(..., gt=0)
    cap: Optional[float] = Field(None, gt=0)


class PointPart(StrictModel):
    kind: Literal["euclidean", "discrete"]


class MetricRecord(StrictModel):
    family: Literal["sum", "power"]
    param: ParamPart
    point: PointPart


class AnalyticSpace(StrictModel):
    backend: Literal["analytic"]
    dim: int = Field(..., ge=1)
    metric: MetricRecord


SpaceRecord = Annotated[Union[TabulatedSpace, AnalyticSpace], Field(discriminator="backend")]


class AffinePointRecord(StrictModel):
    kind: Literal["affine"]
    A: List[List[float]]
    b: List[float]


class TablePointRecord(StrictModel):
    kind: Literal["table"]
    map: Dict[str, str]


class AffineParamRecord(StrictModel):
    kind: Literal["affine"]
    a: float
    c: float


class RecipSumParamRecord(StrictModel):
    kind: Literal["recip_sum"]


class TableParamRecord(StrictModel):
    kind: Literal["table"]
    map: Dict[str, str]


PointMapRecord = Annotated[Union[AffinePointRecord, TablePointRecord], Field(discriminator="kind")]
ParamMapRecord = Annotated[
    Union[AffineParamRecord, RecipSumParamRecord, TableParamRecord], Field(discriminator="kind")
]


class MappingRecord(StrictModel):
    f: PointMapRecord
    phi: ParamMapRecord


def _fail(code: str, message: str, path: str) -> PydanticCustomError:
    return PydanticCustomError(code, message, {"path": path})


class SpaceDescriptor(StrictModel):
    """
    A parameter set, a soft metric space and an optional soft mapping.

    Tabulated distance entries are ordered pairs; a missing reverse direction is
    mirrored and a missing diagonal entry is zero.
    """

    parameters: List[ParameterRecord] = Field(..., min_length=1)
    space: SpaceRecord
    mapping: Optional[MappingRecord] = None

    @property
    def labels(self) -> List[str]:
        return [p.label for p in self.parameters]

    @model_validator(mode="after")
    def check_references(self) -> "SpaceDescriptor":
        """Cross-field rules: unique labels, consistent values, dangling references."""
        seen = set()
        for i, record in enumerate(self.parameters):
            if record.label in seen:
                raise _fail("E_DUP_LABEL", f"duplicate parameter label {record.label!r}", f"parameters[{i}].label")
            seen.add(record.label)
        valued = [p.value is not None for p in self.parameters]
        if any(valued) and not all(valued):
            missing = valued.index(False)
            raise _fail("E_MIXED_VALUES", "either every parameter carries a value or none does", f"parameters[{missing}].value")

        if isinstance(self.space, TabulatedSpace):
            self._check_tabulated(self.space)
        else:
            self._check_analytic(self.space, all(valued))
        if self.mapping is not None:
            self._check_mapping(self.mapping)
        return self

    def _check_tabulated(self, space: TabulatedSpace) -> None:
        elements = set()
        for i, element in enumerate(space.universe):
            if element in elements:
                raise _fail("E_DUP_ELEMENT", f"duplicate universe element {element!r}", f"space.universe[{i}]")
            elements.add(element)

        labels = set(self.labels)
        ordered = set()
        for i, entry in enumerate(space.distances):
            for side in ("p", "q"):
                element, label = getattr(entry, side)
                if element not in elements:
                    raise _fail("E_DANGLING_REF", f"unknown element {element!r}", f"space.distances[{i}].{side}")
                if label not in labels:
                    raise _fail("E_DANGLING_REF", f"unknown label {label!r}", f"space.distances[{i}].{side}")
            if len(entry.value) != len(self.parameters):
                raise _fail(
                    "E_SCHEMA",
                    f"distance has {len(entry.value)} values for {len(self.parameters)} parameters",
                    f"space.distances[{i}].value",
                )
            if tuple(entry.p) == tuple(entry.q) and any(v != 0.0 for v in entry.value):
                raise _fail(
                    "E_SCHEMA",
                    f"distance from {entry.p} to itself must be zero",
                    f"space.distances[{i}].value",
                )
            key = (tuple(entry.p), tuple(entry.q))
            if key in ordered:
                raise _fail("E_DUP_PAIR", f"distance {entry.p} -> {entry.q} given twice", f"space.distances[{i}]")
            ordered.add(key)

        points = [(e, l) for l in self.labels for e in space.universe]
        for a in range(len(points)):
            for b in range(a + 1, len(points)):
                if (points[a], points[b]) not in ordered and (points[b], points[a]) not in ordered:
                    raise _fail(
                        "E_MISSING_PAIR",
                        f"no distance between {list(points[a])} and {list(points[b])}",
                        "space.distances",
                    )

    def _check_analytic(self, space: AnalyticSpace, numeric: bool) -> None:
        if not numeric:
            raise _fail("E_MISSING_VALUE", "analytic metrics need a numeric value for every parameter", "parameters")
        param = space.metric.param
        if param.kind == "capped_abs_diff" and param.cap is None:
            raise _fail("E_SCHEMA", "capped_abs_diff needs a cap", "space.metric.param.cap")

    def _check_mapping(self, mapping: MappingRecord) -> None:
        tabulated = isinstance(self.space, TabulatedSpace)
        f, phi = mapping.f, mapping.phi

        if tabulated != isinstance(f, TablePointRecord):
            raise _fail("E_BACKEND_MISMATCH", f"point map kind {f.kind!r} does not fit a {self.space.backend} space", "mapping.f")
        if tabulated != isinstance(phi, TableParamRecord):
            raise _fail("E_BACKEND_MISMATCH", f"parameter map kind {phi.kind!r} does not fit a {self.space.backend} space", "mapping.phi")

        if isinstance(f, AffinePointRecord):
            dim = self.space.dim
            if len(f.b) != dim or len(f.A) != dim or any(len(row) != dim for row in f.A):
                raise _fail("E_SCHEMA", f"affine point map must be {dim} x {dim} with a {dim}-vector offset", "mapping.f")
        else:
            universe = set(self.space.universe)
            self._check_table(f.map, universe, "element", "mapping.f.map")

        if isinstance(phi, TableParamRecord):
            self._check_table(phi.map, set(self.labels), "label", "mapping.phi.map")

    @staticmethod
    def _check_table(table: Dict[str, str], domain: set, what: str, path: str) -> None:
        for key, target in table.items():
            if key not in domain:
                raise _fail("E_DANGLING_REF", f"unknown {what} {key!r}", f"{path}.{key}")
            if target not in domain:
                raise _fail("E_DANGLING_REF", f"unknown {what} {target!r}", f"{path}.{key}")
        missing = sorted(domain - set(table))
        if missing:
            raise _fail("E_SCHEMA", f"table has no image for {what} {missing[0]!r}", path)


def _dotted(loc: Tuple[Union[int, str], ...]) -> str:
    path = ""
    for part in loc:
        path += f"[{part}]" if isinstance(part, int) else (f".{part}" if path else str(part))
    return path


def _reject_constant(name: str) -> float:
    raise DescriptorError("E_NONFINITE", f"{name} is not a finite number")


def parse_descriptor(text: bytes) -> SpaceDescriptor:
    """
    Parse and validate a UTF-8 JSON descriptor.

    Raises:
        DescriptorError: With a diagnostic code, field path and, for syntax errors, line
    """
    try:
        decoded = text.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DescriptorError("E_ENCODING", f"descriptor is not UTF-8: {exc.reason} at byte {exc.start}") from None
    try:
        raw = json.loads(decoded, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise DescriptorError("E_SYNTAX", f"{exc.msg} (column {exc.colno})", line=exc.lineno) from None

    try:
        return SpaceDescriptor.model_validate(raw)
    except ValidationError as exc:
        error = exc.errors()[0]
        code = error["type"]
        ctx = error.get("ctx") or {}
        path = ctx.get("path") or _dotted(error["loc"])
        if code.startswith("E_"):
            raise DescriptorError(code, error["msg"], path=path) from None
        if code == "finite_number":
            raise DescriptorError("E_NONFINITE", error["msg"], path=path) from None
        raise DescriptorError("E_SCHEMA", error["msg"], path=path) from None


def serialize_descriptor(descriptor: SpaceDescriptor) -> str:
    """JSON text with sorted keys and absent optional fields omitted."""
    payload = descriptor.model_dump(mode="json", exclude_none=True)
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
