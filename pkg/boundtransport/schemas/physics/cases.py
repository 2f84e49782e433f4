from pydantic import Field, model_validator

from boundtransport.schemas.physics.params import FrozenModel, PowerLawParams


class ChannelSpec(FrozenModel):
    """Planar channel with a parabolic boundary layer below y = 0.5 cm."""

    length: float = Field(default=2.0, gt=0.0, description="cm")
    height: float = Field(default=0.62, gt=0.0, description="cm")
    u_max: float = Field(default=300.0, gt=0.0, description="Plateau velocity (cm/s)")
    profile_coeff: float = Field(default=1000.0, ge=0.0, description="1/(cm·s)")
    layer_top: float = Field(default=0.5, gt=0.0, description="Edge of the shear layer (cm)")
    visc: float = Field(default=0.35, gt=0.0, description="Dynamic viscosity (g/cm/s)")
    powerlaw: PowerLawParams = Field(
        default_factory=lambda: PowerLawParams(A=1.0, alpha=2.0, beta=1.0)
    )
    c_inflow: float = Field(default=0.0, ge=0.0)
    nx: int = Field(default=100, ge=2)
    ny: int = Field(default=50, ge=2)
    grading: float = Field(default=1.5, ge=1.0, description="Row clustering toward layer_top")
    jitter: float = Field(
        default=0.125, ge=0.0, lt=0.5, description="Node shift near layer_top, in local spacings"
    )
    jitter_band: float = Field(default=0.06, ge=0.0, description="Half-width of the jittered band (cm)")
    jitter_phase: float = Field(default=0.5, ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def check_layer(self):
        if self.layer_top >= self.height:
            raise ValueError("layer_top must lie below the channel height")
        return self


class VortexSpec(FrozenModel):
    """Annulus driven by a central source and solid-body rotation."""

    r_in: float = Field(default=0.5, gt=0.0, description="Inlet radius (cm)")
    r_out: float = Field(default=2.0, gt=0.0, description="Outlet radius (cm)")
    flow_rate: float = Field(default=100.0, gt=0.0, description="Source strength per unit depth (cm²/s)")
    omega: float = Field(default=50.0, description="Angular velocity (1/s)")
    visc: float = Field(default=0.035, gt=0.0, description="Dynamic viscosity (g/cm/s)")
    nr: int = Field(default=24, ge=2)
    ntheta: int = Field(default=72, ge=6)
