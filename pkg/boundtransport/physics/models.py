"""Reaction models of the general residual form

    (∂/∂t + u·∇) c = μ_r (ν_r − c)

with the shear measures feeding them and the index-of-hemolysis conversion.
"""

from dataclasses import dataclass

import numpy as np

from boundtransport.common.errors import ComplexResultError
from boundtransport.schemas.physics.params import PoreModelParams, PowerLawParams

ArrayLike = np.ndarray | float


@dataclass(frozen=True, eq=False)
class ReactionCoefficients:
    """Reaction rate μ_r (1/s) and saturation ν_r, scalars or node-aligned arrays."""

    mu_r: ArrayLike
    nu_r: ArrayLike

    def __post_init__(self) -> None:
        if np.any(np.asarray(self.mu_r) < 0.0):
            raise ValueError("reaction rate must be nonnegative")
        if np.any(np.asarray(self.nu_r) <= 0.0):
            raise ValueError("saturation value must be positive")

    def on_nodes(self, n_nodes: int) -> "ReactionCoefficients":
        return ReactionCoefficients(
            mu_r=np.broadcast_to(np.asarray(self.mu_r, dtype=float), (n_nodes,)).copy(),
            nu_r=np.broadcast_to(np.asarray(self.nu_r, dtype=float), (n_nodes,)).copy(),
        )

    def rhs(self, c: ArrayLike) -> ArrayLike:
        return np.asarray(self.mu_r) * (np.asarray(self.nu_r) - c)


def _strain_rate_invariant(grad_u: np.ndarray) -> np.ndarray:
    grad_u = np.asarray(grad_u, dtype=float)
    E = 0.5 * (grad_u + np.swapaxes(grad_u, -1, -2))
    tr = np.trace(E, axis1=-2, axis2=-1)
    tr_sq = np.einsum("...ij,...ji->...", E, E)
    return 0.5 * (tr**2 - tr_sq)


def strain_rate_invariant_stress(grad_u: np.ndarray, visc: float) -> ArrayLike:
    """σ_s = 2μ√(−II_E) for the strain rate E = (∇u + ∇uᵀ)/2."""
    second = _strain_rate_invariant(grad_u)
    sigma = 2.0 * visc * np.sqrt(np.maximum(0.0, -second))
    return sigma if np.ndim(sigma) else float(sigma)


def shear_rate(grad_u: np.ndarray) -> ArrayLike:
    """Scalar fluid shear rate G_f = 2√(−II_E), i.e. σ_s/μ."""
    second = _strain_rate_invariant(grad_u)
    rate = 2.0 * np.sqrt(np.maximum(0.0, -second))
    return rate if np.ndim(rate) else float(rate)


def powerlaw_coefficients(sigma_s: ArrayLike, p: PowerLawParams) -> ReactionCoefficients:
    sigma_s = np.asarray(sigma_s, dtype=float)
    if np.any(sigma_s < 0.0):
        raise ValueError("scalar stress must be nonnegative")
    mu = np.power(p.A * np.power(sigma_s, p.alpha), 1.0 / p.beta)
    return ReactionCoefficients(mu_r=mu if mu.ndim else float(mu), nu_r=1.0)


def mass_transfer(G_f: ArrayLike, p: PoreModelParams) -> ArrayLike:
    """κ = h·G_f^k."""
    kappa = p.h * np.power(np.asarray(G_f, dtype=float), p.k_exp)
    return kappa if np.ndim(kappa) else float(kappa)


def pore_coefficients(eps: ArrayLike, G_f: ArrayLike, p: PoreModelParams) -> ReactionCoefficients:
    area = p.pore_area.area(eps, p.eps0)
    mu = mass_transfer(G_f, p) / (1.0 - p.hct) * area / p.v_rbc
    mu = np.asarray(mu, dtype=float)
    return ReactionCoefficients(mu_r=mu if mu.ndim else float(mu), nu_r=1.0 - p.hct)


def drug_coefficients(c_s0: float) -> ReactionCoefficients:
    """Drug release: no reaction, saturation at the initial stent charge."""
    return ReactionCoefficients(mu_r=0.0, nu_r=c_s0)


def ih_from_linearized(l: ArrayLike, beta: float, clamp_negative: bool = True) -> ArrayLike:
    """IH = l^β, with negative l either clamped to zero or rejected."""
    l = np.asarray(l, dtype=float)
    negative = l < 0.0
    if clamp_negative:
        l = np.where(negative, 0.0, l)
    elif np.any(negative) and float(beta) != round(beta):
        raise ComplexResultError(
            f"negative linearized index with β = {beta} has no real power",
            module="models",
        )
    ih = np.power(l, beta)
    return ih if ih.ndim else float(ih)
