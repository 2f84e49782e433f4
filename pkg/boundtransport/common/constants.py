from enum import Enum


class LogLevel(str, Enum):
    ERROR = "error"
    INFO = "info"
    DEBUG = "debug"


class MeshFormat(str, Enum):
    GMSH_ASCII = "gmsh_ascii"
    NATIVE_CSV = "native_csv"


class TransformKind(str, Enum):
    IDENTITY = "identity"
    UPPER_BOUND = "upper_bound"
    LOGISTIC = "logistic"


class DCOperator(str, Enum):
    NONE = "none"
    ISOTROPIC = "isotropic"
    CWD_REFERENCE = "cwd_reference"
    CWD_PHYSICAL = "cwd_physical"


class DCDiffusivity(str, Enum):
    DC_LIN = "dc_lin"
    DC_QUAD = "dc_quad"
    CODINA = "codina"


class SolveMode(str, Enum):
    STEADY = "steady"
    TRANSIENT = "transient"


class LinearSolverKind(str, Enum):
    DIRECT = "direct"
    GMRES = "gmres"


class ReactionModelKind(str, Enum):
    POWER_LAW = "powerlaw"
    PORE = "pore"
    DRUG = "drug"


class StressMeasure(str, Enum):
    STRAIN_RATE = "strain_rate"
    MORPHOLOGY = "morphology"
    FIELD = "field"


class SurfaceAreaMethod(str, Enum):
    THOMSEN = "thomsen"
    EXACT = "exact"


class ExitCode(int, Enum):
    SUCCESS = 0
    UNEXPECTED = 1
    CONFIG_ERROR = 2
    NUMERICAL_FAILURE = 3
    IO_ERROR = 4


# CLI shorthand for (operator, diffusivity) pairs
DC_VARIANTS: dict[str, tuple[DCOperator, DCDiffusivity]] = {
    "none": (DCOperator.NONE, DCDiffusivity.DC_QUAD),
    "iso-lin": (DCOperator.ISOTROPIC, DCDiffusivity.DC_LIN),
    "iso-quad": (DCOperator.ISOTROPIC, DCDiffusivity.DC_QUAD),
    "cwd-lin": (DCOperator.CWD_REFERENCE, DCDiffusivity.DC_LIN),
    "cwd-quad": (DCOperator.CWD_REFERENCE, DCDiffusivity.DC_QUAD),
    "codina": (DCOperator.CWD_PHYSICAL, DCDiffusivity.CODINA),
}

TRANSFORM_VARIANTS: dict[str, TransformKind] = {
    "identity": TransformKind.IDENTITY,
    "upper": TransformKind.UPPER_BOUND,
}

# Hemoglobin content assumed for the plasma-free hemoglobin conversion (mg/dL)
DEFAULT_HEMOGLOBIN = 15000.0
# Whole-blood viscosity used for pump flows (g/cm/s)
WHOLE_BLOOD_VISCOSITY = 0.035
