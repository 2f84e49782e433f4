"""Change of variable between the physical concentration c and the solved c̄.

upper_bound: c = ν(1 − exp(−c̄/k)), always below ν.
logistic:    c = ν / (1 + exp(−c̄/k)), always inside (0, ν).
"""

import numpy as np
from scipy.special import expit, logit

from boundtransport.common.constants import TransformKind
from boundtransport.common.errors import DomainError, UnsupportedTransformError
from boundtransport.schemas.physics.params import Transform

ArrayLike = np.ndarray | float


def _below(nu: float) -> float:
    return float(np.nextafter(nu, -np.inf))


def to_physical(t: Transform, cbar: ArrayLike) -> ArrayLike:
    cbar = np.asarray(cbar, dtype=float)
    if t.kind is TransformKind.IDENTITY:
        c = cbar.copy()
    elif t.kind is TransformKind.UPPER_BOUND:
        c = np.minimum(-t.nu * np.expm1(-cbar / t.k), _below(t.nu))
    else:
        c = np.clip(t.nu * expit(cbar / t.k), np.finfo(float).tiny, _below(t.nu))
    return c if c.ndim else float(c)


def to_transformed(t: Transform, c: ArrayLike) -> ArrayLike:
    c = np.asarray(c, dtype=float)
    if t.kind is TransformKind.IDENTITY:
        cbar = c.copy()
    elif t.kind is TransformKind.UPPER_BOUND:
        if np.any(c >= t.nu):
            raise DomainError(
                f"upper-bound transform needs c < ν = {t.nu}, got max {c.max()}",
                module="xform",
            )
        cbar = -t.k * np.log1p(-c / t.nu)
    else:
        if np.any(c <= 0.0) or np.any(c >= t.nu):
            raise DomainError(
                f"logistic transform needs 0 < c < ν = {t.nu}", module="xform"
            )
        cbar = t.k * logit(c / t.nu)
    return cbar if cbar.ndim else float(cbar)


def transformed_source(t: Transform, mu_r: ArrayLike) -> ArrayLike:
    """Source term of the transformed equation.

    upper_bound gives the constant k·μ_r. identity hands μ_r back unchanged;
    the reaction μ_r(ν_r − c̄) is then assembled by femcore. logistic is only
    admissible for reaction-free models.
    """
    mu = np.asarray(mu_r, dtype=float)
    if t.kind is TransformKind.UPPER_BOUND:
        out = t.k * mu
    elif t.kind is TransformKind.IDENTITY:
        out = mu.copy()
    else:
        if np.any(mu != 0.0):
            raise UnsupportedTransformError(
                "logistic transform with a nonzero reaction rate yields an "
                "exponentially large source for small concentrations",
                module="xform",
            )
        out = np.zeros_like(mu)
    return out if out.ndim else float(out)


def inflow_value(t: Transform, c_inflow: float) -> float:
    """Dirichlet value of c̄ for a physical inflow concentration."""
    return float(to_transformed(t, c_inflow))
