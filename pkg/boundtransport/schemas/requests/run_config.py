from pathlib import Path
from typing import Literal, Optional

from pydantic import Field, ValidationInfo, field_validator, model_validator

from boundtransport.common.constants import (
    DEFAULT_HEMOGLOBIN,
    MeshFormat,
    ReactionModelKind,
    StressMeasure,
    SurfaceAreaMethod,
    TransformKind,
)
from boundtransport.schemas.fem.settings import DCConfig, SolverConfig
from boundtransport.schemas.physics.cases import ChannelSpec
from boundtransport.schemas.physics.params import (
    POWER_LAW_PRESETS,
    FrozenModel,
    MorphologyParams,
    PoreModelParams,
    PowerLawParams,
)


def _existing(path: Optional[Path], info: ValidationInfo, what: str) -> Optional[Path]:
    """Resolve against the config directory and require the file to exist."""
    if path is None:
        return None
    base = (info.context or {}).get("base_dir")
    if base is not None and not path.is_absolute():
        path = Path(base) / path
    path = path.resolve()
    if not path.exists():
        raise ValueError(f"{what} not found: {path}")
    return path


class MeshConfig(FrozenModel):
    source: Literal["channel", "file"] = "channel"
    path: Optional[Path] = None
    format: MeshFormat = MeshFormat.GMSH_ASCII

    @field_validator("path")
    @classmethod
    def check_path(cls, path, info: ValidationInfo):
        return _existing(path, info, "mesh source")

    @model_validator(mode="after")
    def check_source(self):
        if self.source == "file" and self.path is None:
            raise ValueError("mesh.source 'file' needs mesh.path")
        return self


class VelocityConfig(FrozenModel):
    source: Literal["channel", "csv"] = "channel"
    path: Optional[Path] = None

    @field_validator("path")
    @classmethod
    def check_path(cls, path, info: ValidationInfo):
        return _existing(path, info, "velocity source")

    @model_validator(mode="after")
    def check_source(self):
        if self.source == "csv" and self.path is None:
            raise ValueError("velocity source not found: velocity.source 'csv' needs velocity.path")
        return self


class MorphologyConfig(FrozenModel):
    """Local shape-tensor integration under each node's frozen velocity gradient."""

    params: MorphologyParams = Field(default_factory=MorphologyParams)
    t_end: float = Field(default=2.0, gt=0.0, description="Integration horizon (s)")
    dt: float = Field(default=1e-3, gt=0.0, description="RK4 step (s)")
    steady_tol: float = Field(default=1e-8, gt=0.0, description="Stop once |dS/dt| falls below")
    area_method: SurfaceAreaMethod = SurfaceAreaMethod.THOMSEN
    reference_area: Optional[float] = Field(
        default=None, gt=0.0, description="A₀; defaults to the area of the initial sphere"
    )


class ModelConfig(FrozenModel):
    kind: ReactionModelKind = ReactionModelKind.POWER_LAW
    preset: Optional[str] = None
    powerlaw: Optional[PowerLawParams] = None
    stress: StressMeasure = StressMeasure.STRAIN_RATE
    viscosity: Optional[float] = Field(
        default=None, gt=0.0, description="g/cm/s; defaults to the channel or whole-blood value"
    )
    stress_field: Optional[Path] = Field(default=None, description="Nodal σ_eff CSV")
    strain_field: Optional[Path] = Field(default=None, description="Nodal area strain CSV")
    shear_rate_field: Optional[Path] = Field(default=None, description="Nodal G_f CSV")
    pore: PoreModelParams = Field(default_factory=PoreModelParams)
    morphology: MorphologyConfig = Field(default_factory=MorphologyConfig)
    drug_c0: float = Field(default=1.0, gt=0.0, description="Initial stent drug content")
    clamp_negative: bool = Field(default=True, description="Clamp negative l_IH before IH = l^β")

    @field_validator("preset")
    @classmethod
    def check_preset(cls, preset):
        if preset is not None and preset not in POWER_LAW_PRESETS:
            raise ValueError(
                f"unknown power-law preset {preset!r}; choose from {sorted(POWER_LAW_PRESETS)}"
            )
        return preset

    @field_validator("stress_field", "strain_field", "shear_rate_field")
    @classmethod
    def check_fields(cls, path, info: ValidationInfo):
        return _existing(path, info, f"{info.field_name.replace('_', ' ')}")

    @model_validator(mode="after")
    def check_combination(self):
        if self.preset is not None and self.powerlaw is not None:
            raise ValueError("give either model.preset or model.powerlaw, not both")
        if (
            self.kind is ReactionModelKind.POWER_LAW
            and self.stress is StressMeasure.FIELD
            and self.stress_field is None
        ):
            raise ValueError("model.stress 'field' needs model.stress_field")
        return self

    def saturation(self) -> float:
        """ν_r of the selected model."""
        if self.kind is ReactionModelKind.DRUG:
            return self.drug_c0
        if self.kind is ReactionModelKind.PORE:
            return 1.0 - self.pore.hct
        return 1.0

    def powerlaw_params(self, fallback: PowerLawParams) -> PowerLawParams:
        if self.preset is not None:
            return POWER_LAW_PRESETS[self.preset]
        return self.powerlaw or fallback


class TransformConfig(FrozenModel):
    kind: TransformKind = TransformKind.UPPER_BOUND
    nu: Optional[float] = Field(default=None, gt=0.0, description="Defaults to the model ν_r")
    k: float = Field(default=1.0, gt=0.0)


class ProbeLine(FrozenModel):
    name: str = Field(..., pattern=r"^[A-Za-z0-9_\-]+$")
    p0: tuple[float, ...]
    p1: tuple[float, ...]
    n: int = Field(default=101, ge=2)

    @model_validator(mode="after")
    def check_points(self):
        if len(self.p0) != len(self.p1) or len(self.p0) not in (2, 3):
            raise ValueError("probe endpoints need 2 or 3 matching coordinates")
        return self


class OutflowConfig(FrozenModel):
    marker: str
    hb: float = Field(default=DEFAULT_HEMOGLOBIN, gt=0.0, description="mg/dL")
    hct: float = Field(default=0.36, gt=0.0, lt=1.0)
    q_lpm: float = Field(default=6.0, ge=0.0, description="Flow rate (L/min)")
    t_min: float = Field(default=120.0, ge=0.0, description="Experiment duration (min)")
    v_loop_ml: float = Field(default=250.0, gt=0.0, description="Loop volume (mL)")


class OutputConfig(FrozenModel):
    dir: Optional[Path] = None
    vtk_name: str = "solution.vtk"
    write_fields: bool = Field(default=False, description="Also write nodal CSVs of c̄ and c")

    @field_validator("dir")
    @classmethod
    def resolve_dir(cls, path, info: ValidationInfo):
        base = (info.context or {}).get("base_dir")
        if path is not None and base is not None and not path.is_absolute():
            path = Path(base) / path
        return path


class RunConfig(FrozenModel):
    """One concentration run: geometry, flow, model, numerics and outputs."""

    mesh: MeshConfig = Field(default_factory=MeshConfig)
    channel: ChannelSpec = Field(default_factory=ChannelSpec)
    velocity: VelocityConfig = Field(default_factory=VelocityConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    transform: TransformConfig = Field(default_factory=TransformConfig)
    dc: DCConfig = Field(default_factory=DCConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    c_inflow: float = Field(default=0.0, ge=0.0)
    probes: list[ProbeLine] = Field(default_factory=list)
    outflow: Optional[OutflowConfig] = None
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def check_consistency(self):
        if self.velocity.source == "channel" and self.mesh.source != "channel":
            raise ValueError("the builtin channel velocity needs mesh.source 'channel'")
        nu = self.transform.nu or self.model.saturation()
        if self.transform.kind is TransformKind.LOGISTIC and not 0.0 < self.c_inflow < nu:
            raise ValueError(
                f"the logistic transform keeps c strictly inside (0, {nu:g}); "
                f"c_inflow = {self.c_inflow:g} cannot be imposed, choose a value in that interval"
            )
        if self.transform.kind is TransformKind.UPPER_BOUND and self.c_inflow >= nu:
            raise ValueError(
                f"the upper-bound transform needs c_inflow < {nu:g}, got {self.c_inflow:g}"
            )
        return self
