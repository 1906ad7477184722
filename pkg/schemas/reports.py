"""Pydantic schema for machine-readable command reports."""
import json
import math
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class CommandReport(BaseModel):
    """Outcome of one CLI command; the human rendering is derived from the same details."""

    model_config = ConfigDict(extra="forbid")

    command: str = Field(..., description="Sub-command name")
    verdict: str = Field(..., description="One-line outcome")
    exit_code: int = Field(..., ge=0, le=2, description="0 holds, 1 violated, 2 input error")
    seed: Optional[int] = Field(None, description="Seed used by randomized steps")
    details: Dict[str, Any] = Field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(_json_safe(self.model_dump()), indent=2, sort_keys=True) + "\n"

    def render(self) -> str:
        """Human-readable text; floats printed to 12 decimals."""
        lines = [f"{self.command}: {self.verdict}"]
        if self.seed is not None:
            lines.append(f"  seed: {self.seed}")
        lines.extend(_render_mapping(self.details, indent=2))
        lines.append(f"  exit code: {self.exit_code}")
        return "\n".join(lines) + "\n"


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def format_value(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return str(value).lower() if value is not None else "-"
    if isinstance(value, float):
        return f"{value:.12f}" if math.isfinite(value) else str(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    return str(value)


def _render_mapping(details: Dict[str, Any], indent: int) -> List[str]:
    pad = " " * indent
    lines = []
    for key, value in details.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_render_mapping(value, indent + 2))
        elif isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
            lines.append(f"{pad}{key}:")
            for item in value:
                lines.extend(_render_mapping(item, indent + 2))
                lines.append(f"{pad}  --")
        else:
            lines.append(f"{pad}{key}: {format_value(value)}")
    return lines
