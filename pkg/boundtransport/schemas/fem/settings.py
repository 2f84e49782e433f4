from pydantic import Field, model_validator

from boundtransport.common.constants import (
    DCDiffusivity,
    DCOperator,
    LinearSolverKind,
    SolveMode,
)
from boundtransport.schemas.physics.params import FrozenModel

_PAIRINGS: dict[DCOperator, tuple[DCDiffusivity, ...]] = {
    DCOperator.NONE: tuple(DCDiffusivity),
    DCOperator.ISOTROPIC: (DCDiffusivity.DC_LIN, DCDiffusivity.DC_QUAD),
    DCOperator.CWD_REFERENCE: (DCDiffusivity.DC_LIN, DCDiffusivity.DC_QUAD),
    DCOperator.CWD_PHYSICAL: (DCDiffusivity.CODINA,),
}


class DCConfig(FrozenModel):
    """Discontinuity-capturing operator and diffusivity selection."""

    operator: DCOperator = Field(default=DCOperator.NONE)
    diffusivity: DCDiffusivity = Field(default=DCDiffusivity.DC_QUAD)
    codina_C: float = Field(default=0.7, gt=0.0, description="Codina element constant")
    grad_floor: float = Field(
        default=1e-24, gt=0.0, description="Relative floor on the gradient norm"
    )

    @model_validator(mode="after")
    def check_pairing(self):
        if self.diffusivity not in _PAIRINGS[self.operator]:
            raise ValueError(
                f"DC operator {self.operator.value} cannot be combined with "
                f"diffusivity {self.diffusivity.value}"
            )
        return self

    @property
    def enabled(self) -> bool:
        return self.operator is not DCOperator.NONE


class SolverConfig(FrozenModel):
    """Time stepping, lagged-DC passes and the linear-solve contract."""

    mode: SolveMode = Field(default=SolveMode.STEADY)
    dt: float | None = Field(default=None, gt=0.0, description="Time step (s)")
    n_steps: int = Field(default=1, ge=1)
    output_stride: int = Field(default=1, ge=1, description="Keep every n-th step")
    dc_passes: int = Field(default=3, ge=1, description="Steady solves with lagged ν_DC")
    linear_solver: LinearSolverKind = Field(default=LinearSolverKind.DIRECT)
    linear_tol: float = Field(default=1e-10, gt=0.0, description="Relative residual bound")
    max_linear_iters: int = Field(default=1000, ge=1)

    @model_validator(mode="after")
    def check_transient(self):
        if self.mode is SolveMode.TRANSIENT and self.dt is None:
            raise ValueError("transient mode needs solver.dt")
        return self
