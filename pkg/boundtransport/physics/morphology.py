"""Local RBC morphology: shape-tensor ODE under a frozen velocity gradient.

All functions operate on the last two axes, so a stack of tensors (one per
mesh node) is integrated in a single call.
"""

import logging
import math

import numpy as np
from scipy.special import elliprg

from boundtransport.common.constants import SurfaceAreaMethod
from boundtransport.common.errors import (
    DegenerateTensorError,
    InstabilityError,
    SaturationError,
)
from boundtransport.schemas.physics.params import MorphologyParams

logger = logging.getLogger(__name__)

THOMSEN_EXPONENT = 1.6075
INVARIANT_TOL = 1e-300
SATURATION_TOL = 1e-12


def embed_gradient(grad_u: np.ndarray) -> np.ndarray:
    """Pad 2×2 planar velocity gradients to 3×3."""
    grad_u = np.asarray(grad_u, dtype=float)
    if grad_u.shape[-1] == 3:
        return grad_u
    out = np.zeros(grad_u.shape[:-2] + (3, 3))
    out[..., :2, :2] = grad_u
    return out


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def shape_invariants(S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Second invariant (sum of principal 2×2 minors) and determinant."""
    tr = np.trace(S, axis1=-2, axis2=-1)
    tr_sq = np.einsum("...ij,...ji->...", S, S)
    return 0.5 * (tr**2 - tr_sq), np.linalg.det(S)


def morphology_rhs(S: np.ndarray, grad_u: np.ndarray, p: MorphologyParams) -> np.ndarray:
    """dS/dt = −α₁(S − g(S)·1) + α₂(ES + SE) + α₃(WS − SW), g = 3·III_S/II_S."""
    S = np.asarray(S, dtype=float)
    grad_u = embed_gradient(grad_u)
    second, third = shape_invariants(S)
    if np.any(np.abs(second) <= INVARIANT_TOL):
        raise DegenerateTensorError("shape tensor has vanishing II_S", module="morphology")
    g = 3.0 * third / second
    E = _sym(grad_u)
    W = 0.5 * (grad_u - np.swapaxes(grad_u, -1, -2))
    eye = np.broadcast_to(np.eye(3), S.shape)
    return (
        -p.alpha1 * (S - g[..., None, None] * eye)
        + p.alpha2 * (E @ S + S @ E)
        + p.alpha3 * (W @ S - S @ W)
    )


def _check_positive(S: np.ndarray, t: float) -> None:
    try:
        np.linalg.cholesky(S)
    except np.linalg.LinAlgError as e:
        raise InstabilityError(
            f"shape tensor lost positive definiteness at t = {t:.6g} s; use a smaller dt",
            module="morphology",
        ) from e


def integrate_local(
    S0: np.ndarray,
    grad_u: np.ndarray,
    t_end: float,
    dt: float,
    p: MorphologyParams,
    steady_tol: float | None = None,
) -> np.ndarray:
    """Classical RK4 with a fixed step, symmetrised after every step.

    With ``steady_tol`` the integration stops once the largest rhs norm over
    the stack drops below it.
    """
    if dt <= 0.0 or t_end < 0.0:
        raise ValueError("need dt > 0 and t_end >= 0")
    S = _sym(np.array(S0, dtype=float))
    grad_u = embed_gradient(grad_u)
    _check_positive(S, 0.0)
    n_steps = math.ceil(t_end / dt - 1e-9) if t_end > 0.0 else 0
    h = t_end / n_steps if n_steps else 0.0

    def f(x: np.ndarray) -> np.ndarray:
        return morphology_rhs(x, grad_u, p)

    for step in range(n_steps):
        k1 = f(S)
        if steady_tol is not None and np.max(np.linalg.norm(k1, axis=(-2, -1))) < steady_tol:
            logger.debug(f"morphology steady after {step} steps")
            break
        k2 = f(S + 0.5 * h * k1)
        k3 = f(S + 0.5 * h * k2)
        k4 = f(S + h * k3)
        S = _sym(S + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
        _check_positive(S, (step + 1) * h)
    return S


def semi_axes(S: np.ndarray) -> tuple[np.ndarray | float, np.ndarray | float]:
    """Longest and shortest semi-axis; eigenvalues of S are squared semi-axes."""
    lam = _eigenvalues(S)
    L, W = np.sqrt(lam[..., -1]), np.sqrt(lam[..., 0])
    if np.ndim(L) == 0:
        return float(L), float(W)
    return L, W


def _eigenvalues(S: np.ndarray) -> np.ndarray:
    lam = np.linalg.eigvalsh(_sym(np.asarray(S, dtype=float)))
    if np.any(lam <= 0.0):
        raise DegenerateTensorError("shape tensor is not positive definite", module="morphology")
    return lam


def distortion(L, W):
    """D = (L − W)/(L + W)."""
    L, W = np.asarray(L, dtype=float), np.asarray(W, dtype=float)
    D = (L - W) / (L + W)
    return D if D.ndim else float(D)


def effective_stress(D, visc: float, p: MorphologyParams):
    """σ_eff = 2μα₁D / ((1 − D²)α₂)."""
    D = np.asarray(D, dtype=float)
    if np.any(D >= 1.0 - SATURATION_TOL):
        raise SaturationError(
            "distortion reached 1, the effective stress is singular", module="morphology"
        )
    sigma = 2.0 * visc * p.alpha1 * D / ((1.0 - D**2) * p.alpha2)
    return sigma if sigma.ndim else float(sigma)


def ellipsoid_area(a, b, c, method: SurfaceAreaMethod = SurfaceAreaMethod.THOMSEN):
    """Ellipsoid surface area from its semi-axes.

    Thomsen's approximation is within 1.1 %; the exact value uses Carlson's
    symmetric integral A = 4π·abc·R_G(a⁻², b⁻², c⁻²).
    """
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    if method is SurfaceAreaMethod.EXACT:
        area = 4.0 * np.pi * a * b * c * elliprg(a**-2, b**-2, c**-2)
    else:
        q = THOMSEN_EXPONENT
        mean = ((a * b) ** q + (a * c) ** q + (b * c) ** q) / 3.0
        area = 4.0 * np.pi * mean ** (1.0 / q)
    return area if area.ndim else float(area)


def area_strain(
    S: np.ndarray, A0: float, method: SurfaceAreaMethod = SurfaceAreaMethod.THOMSEN
):
    """ε = (A_S − A₀)/A₀ for the ellipsoid with squared semi-axes eig(S)."""
    if A0 <= 0.0:
        raise ValueError("reference area must be positive")
    axes = np.sqrt(_eigenvalues(S))
    area = ellipsoid_area(axes[..., 0], axes[..., 1], axes[..., 2], method)
    eps = (np.asarray(area) - A0) / A0
    return eps if eps.ndim else float(eps)


def steady_morphology(
    grad_u: np.ndarray,
    p: MorphologyParams,
    t_end: float,
    dt: float,
    S0: np.ndarray | None = None,
    steady_tol: float = 1e-10,
) -> np.ndarray:
    """Shape tensors reached under frozen gradients, one per leading index."""
    grad_u = embed_gradient(grad_u)
    if S0 is None:
        S0 = np.broadcast_to(np.eye(3), grad_u.shape).copy()
    return integrate_local(S0, grad_u, t_end, dt, p, steady_tol=steady_tol)
