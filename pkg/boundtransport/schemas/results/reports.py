from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, model_validator


class PassStats(BaseModel):
    """Physical-field extrema after one solve pass or time step."""

    index: int
    min: float
    max: float
    neg_nodes: int = Field(ge=0)

    def log_line(self) -> str:
        return f"pass={self.index} min={self.min:.6e} max={self.max:.6e} neg_nodes={self.neg_nodes}"


class SolveReport(BaseModel):
    passes: list[PassStats] = Field(default_factory=list)
    elapsed_s: float = 0.0


class FieldStats(BaseModel):
    min: float
    max: float
    negative_node_count: int = Field(ge=0)
    negative_volume_fraction: float = Field(ge=0.0, le=1.0)

    @model_validator(mode="after")
    def check_order(self):
        if self.min > self.max:
            raise ValueError("min must not exceed max")
        return self


class OutflowSummary(BaseModel):
    marker: str
    ih_out: float
    delta_phb: Optional[float] = None


class RunSummary(BaseModel):
    """What a run produced, written next to its artifacts."""

    success: bool
    stats: FieldStats
    report: SolveReport
    artifacts: list[Path] = Field(default_factory=list)
    outflow: Optional[OutflowSummary] = None
