from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from boundtransport.common.constants import TransformKind


class FrozenModel(BaseModel):
    """Immutable parameter set; unknown keys are rejected."""

    model_config = ConfigDict(frozen=True, extra="forbid")


class Transform(FrozenModel):
    """Change of variable between the physical c and the solved c̄."""

    kind: TransformKind = Field(
        default=TransformKind.UPPER_BOUND, description="Change-of-variable formula"
    )
    nu: float = Field(default=1.0, gt=0.0, description="Saturation value ν")
    k: float = Field(default=1.0, gt=0.0, description="Scaling constant, units of c̄")


class PowerLawParams(FrozenModel):
    """Power-law hemolysis parameters IH = A σ^α t^β."""

    A: float = Field(..., gt=0.0, description="Dimensionless prefactor")
    alpha: float = Field(..., gt=0.0, description="Stress exponent")
    beta: float = Field(..., gt=0.0, le=1.0, description="Time exponent")


POWER_LAW_PRESETS: dict[str, PowerLawParams] = {
    "giersiepen": PowerLawParams(A=3.62e-7, alpha=2.416, beta=0.785),
    "song": PowerLawParams(A=1.8e-8, alpha=1.991, beta=0.765),
    "zhang": PowerLawParams(A=1.228e-7, alpha=1.9918, beta=0.6606),
    "ding_human": PowerLawParams(A=3.458e-8, alpha=2.0639, beta=0.2777),
    "ding_porcine": PowerLawParams(A=6.701e-6, alpha=1.0981, beta=0.2778),
}


class LinearPoreArea(FrozenModel):
    """A_p(ε) = c_p · max(0, ε − ε₀)."""

    kind: Literal["linear"] = "linear"
    c_p: float = Field(default=1.0e-8, ge=0.0, description="Pore area per unit strain (cm²)")

    def area(self, eps: np.ndarray | float, eps0: float) -> np.ndarray | float:
        return self.c_p * np.maximum(0.0, np.asarray(eps, dtype=float) - eps0)


class TabulatedPoreArea(FrozenModel):
    """Piecewise-linear A_p over (strain, area) points, zero up to ε₀."""

    kind: Literal["tabulated"] = "tabulated"
    points: tuple[tuple[float, float], ...] = Field(
        ..., min_length=2, description="(strain, area cm²) pairs"
    )

    @field_validator("points")
    @classmethod
    def check_monotone(cls, points: tuple[tuple[float, float], ...]):
        strain = np.array([p[0] for p in points])
        area = np.array([p[1] for p in points])
        if np.any(np.diff(strain) <= 0.0):
            raise ValueError("tabulated strains must be strictly increasing")
        if np.any(np.diff(area) < 0.0) or np.any(area < 0.0):
            raise ValueError("tabulated pore areas must be nonnegative and nondecreasing")
        return points

    def area(self, eps: np.ndarray | float, eps0: float) -> np.ndarray | float:
        strain = np.array([p[0] for p in self.points])
        area = np.array([p[1] for p in self.points])
        eps = np.asarray(eps, dtype=float)
        return np.where(eps <= eps0, 0.0, np.interp(eps, strain, area))


PoreAreaModel = Annotated[
    Union[LinearPoreArea, TabulatedPoreArea], Field(discriminator="kind")
]


class PoreModelParams(FrozenModel):
    """Membrane pore hemoglobin release (Fick's law through opened pores)."""

    h: float = Field(default=4.48e-8, ge=0.0, description="Mass-transfer prefactor")
    k_exp: float = Field(default=1.31, description="Mass-transfer shear-rate exponent")
    hct: float = Field(default=0.36, gt=0.0, lt=1.0, description="Hematocrit fraction")
    v_rbc: float = Field(default=9.0e-11, gt=0.0, description="RBC volume (cm³)")
    eps0: float = Field(default=0.0016, description="Threshold area strain ε₀")
    pore_area: PoreAreaModel = Field(default_factory=LinearPoreArea)


class MorphologyParams(FrozenModel):
    """Coefficients of the RBC shape-tensor relaxation/elongation/rotation model."""

    alpha1: float = Field(default=5.0, gt=0.0, description="Relaxation rate (1/s)")
    alpha2: float = Field(default=4.2298e-4, description="Elongation coefficient")
    alpha3: float = Field(default=4.2298e-4, description="Rotation coefficient")
