"""SUPG and discontinuity-capturing kernels for the transformed
advection-reaction equation, and global sparse assembly.

The element residual is

    R = (c̄ − c̄_old)/Δt + u·∇c̄ + σ c̄ − f

where σ = μ_r and f = μ_r ν_r for the identity transform, and σ = 0 with
f the transformed source otherwise. Steady problems drop the time term.
Velocity is interpolated nodally inside the integrals; τ and the DC
direction tensor use the element-mean velocity.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from boundtransport.common.constants import DCDiffusivity, DCOperator, TransformKind
from boundtransport.common.errors import (
    DimensionMismatchError,
    NumericalError,
    StagnationError,
)
from boundtransport.common.quadrature import QuadratureRule, element_rule
from boundtransport.dependencies import get_executor
from boundtransport.fem.mesh import Mesh, inflow_nodes
from boundtransport.physics.models import ReactionCoefficients
from boundtransport.physics.xform import inflow_value, transformed_source
from boundtransport.schemas.fem.settings import DCConfig
from boundtransport.schemas.physics.params import Transform

logger = logging.getLogger(__name__)

CHUNK_SIZE = 20_000
TINY = np.finfo(float).tiny


def _inv_dt(dt: float | None) -> float:
    if dt is None or math.isinf(dt):
        return 0.0
    if dt <= 0.0:
        raise ValueError("time step must be positive")
    return 1.0 / dt


def _quadratic_form(a: np.ndarray, M: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    b = a if b is None else b
    return np.einsum("...i,...ij,...j->...", a, M, b)


def tau(u_e, G, dt: float | None = None, allow_stagnant: bool = False):
    """Shakib's τ = ((2/Δt)² + u·Gu)^(-1/2); dt None or ∞ is the steady limit.

    With ``allow_stagnant`` elements where both terms vanish get τ = 0
    instead of raising.
    """
    u_e = np.asarray(u_e, dtype=float)
    G = np.asarray(G, dtype=float)
    denom = (2.0 * _inv_dt(dt)) ** 2 + _quadratic_form(u_e, G)
    stagnant = denom <= 0.0
    if np.any(stagnant) and not allow_stagnant:
        raise StagnationError(
            "τ undefined: steady problem with zero element velocity", module="femcore"
        )
    out = np.where(stagnant, 0.0, 1.0 / np.sqrt(np.where(stagnant, 1.0, denom)))
    return out if out.ndim else float(out)


def dc_diffusivity(R, grad_cbar, G, tau_e, cfg: DCConfig, scale: float = 1.0, G_inv=None):
    """ν_DC from the element residual.

    dc_lin:  |R| / √(∇c̄·G⁻¹∇c̄)
    dc_quad: 2τR² / (∇c̄·G⁻¹∇c̄)

    Zero where ∇c̄·G⁻¹∇c̄ ≤ grad_floor·scale².
    """
    R = np.asarray(R, dtype=float)
    grad_cbar = np.asarray(grad_cbar, dtype=float)
    if G_inv is None:
        G_inv = np.linalg.inv(np.asarray(G, dtype=float))
    norm2 = _quadratic_form(grad_cbar, G_inv)
    floor = cfg.grad_floor * scale**2
    active = norm2 > floor
    safe = np.where(active, norm2, 1.0)
    if cfg.diffusivity is DCDiffusivity.DC_LIN:
        nu = np.abs(R) / np.sqrt(safe)
    elif cfg.diffusivity is DCDiffusivity.DC_QUAD:
        nu = 2.0 * np.asarray(tau_e, dtype=float) * R**2 / safe
    else:
        raise ValueError("use codina_diffusivity for the Codina variant")
    nu = np.where(active, nu, 0.0)
    return nu if nu.ndim else float(nu)


def codina_diffusivity(R, grad_cbar, u_e, h_e, cfg: DCConfig, scale: float = 1.0):
    """ν_Cod = ½ h_e C |R|/|∇c̄|.

    Without physical diffusion the element Péclet number is infinite, so
    ``u_e`` does not reduce C.
    """
    R = np.asarray(R, dtype=float)
    grad_cbar = np.asarray(grad_cbar, dtype=float)
    if np.any(np.asarray(h_e) <= 0.0):
        raise ValueError("element length must be positive")
    norm2 = np.einsum("...i,...i->...", grad_cbar, grad_cbar)
    active = norm2 > cfg.grad_floor * scale**2
    nu = 0.5 * np.asarray(h_e) * cfg.codina_C * np.abs(R) / np.sqrt(np.where(active, norm2, 1.0))
    nu = np.where(active, nu, 0.0)
    return nu if nu.ndim else float(nu)


def dc_tensor(u_e, G, J, cfg: DCConfig) -> np.ndarray:
    """Diffusion-direction matrix M of the DC term ∫ ν ∇w·M∇c̄."""
    u_e = np.asarray(u_e, dtype=float)
    J = np.asarray(J, dtype=float)
    d = u_e.shape[-1]
    eye = np.eye(d)
    Jt = np.swapaxes(J, -1, -2)
    if cfg.operator is DCOperator.NONE:
        raise ValueError("no DC tensor without a DC operator")
    if cfg.operator is DCOperator.ISOTROPIC:
        return J @ Jt
    if cfg.operator is DCOperator.CWD_PHYSICAL:
        norm2 = np.einsum("...i,...i->...", u_e, u_e)
        return eye - _dyad(u_e, norm2)
    # the dyad is built from the reference-frame velocity J⁻¹u so P is a projector
    ubar = np.linalg.solve(J, u_e[..., None])[..., 0]
    norm2 = np.einsum("...i,...i->...", ubar, ubar)
    P = eye - _dyad(ubar, norm2)
    return J @ P @ Jt


def _dyad(v: np.ndarray, norm2: np.ndarray) -> np.ndarray:
    moving = norm2 > TINY
    scale = np.where(moving, 1.0 / np.where(moving, norm2, 1.0), 0.0)
    return np.einsum("...i,...j->...ij", v, v) * np.asarray(scale)[..., None, None]


@dataclass(frozen=True, eq=False)
class ElementCoefficients:
    """Piecewise-constant σ (linear reaction in the residual) and source f."""

    sigma: np.ndarray
    source: np.ndarray


def element_coefficients(
    mesh: Mesh, reaction: ReactionCoefficients, transform: Transform
) -> ElementCoefficients:
    nodal = reaction.on_nodes(mesh.n_nodes)
    mu_e = nodal.mu_r[mesh.elements].mean(axis=1)
    nu_e = nodal.nu_r[mesh.elements].mean(axis=1)
    source = np.asarray(transformed_source(transform, mu_e), dtype=float)
    if transform.kind is TransformKind.IDENTITY:
        return ElementCoefficients(sigma=mu_e, source=mu_e * nu_e)
    return ElementCoefficients(sigma=np.zeros_like(mu_e), source=source)


@dataclass(frozen=True, eq=False)
class LocalSystem:
    """Element matrix and load vector, with the SUPG share kept apart."""

    matrix: np.ndarray
    vector: np.ndarray
    supg_matrix: np.ndarray
    supg_vector: np.ndarray
    dc_matrix: np.ndarray
    dc_nu: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class _Inputs:
    mesh: Mesh
    u: np.ndarray
    coeffs: ElementCoefficients
    inv_dt: float
    cbar_old: np.ndarray | None
    cbar_prev: np.ndarray | None
    cfg: DCConfig
    rule: QuadratureRule
    scale: float
    nu_floor: np.ndarray | None = None


def _element_block(inp: _Inputs, idx: np.ndarray) -> LocalSystem:
    mesh = inp.mesh
    geo = mesh.geometry
    conn = mesh.elements[idx]
    grads = geo.shape_gradients[idx]  # (E, n, d)
    vol = geo.volume[idx]
    N = inp.rule.shape_values  # (Q, n)
    wq = inp.rule.weights  # (Q,)

    u_nodes = inp.u[conn]
    u_q = np.einsum("qn,end->eqd", N, u_nodes)
    u_e = u_nodes.mean(axis=1)
    a = np.einsum("eqd,eid->eqi", u_q, grads)  # u·∇N_i at each point

    sigma = inp.coeffs.sigma[idx]
    f = inp.coeffs.source[idx]
    react = inp.inv_dt + sigma  # (E,)
    tau_e = tau(u_e, geo.metric[idx], None if inp.inv_dt == 0.0 else 1.0 / inp.inv_dt, True)

    wv = wq[None, :] * vol[:, None]  # (E, Q)
    galerkin = np.einsum("eq,qi,eqj->eij", wv, N, a)
    mass = np.einsum("eq,qi,qj->eij", wv, N, N) * react[:, None, None]
    supg = np.einsum("eq,eqi,eqj->eij", wv * tau_e[:, None], a, a + react[:, None, None] * N[None])

    load_q = np.broadcast_to(f[:, None], wv.shape).copy()
    if inp.cbar_old is not None and inp.inv_dt:
        load_q += inp.inv_dt * (inp.cbar_old[conn] @ N.T)
    rhs_galerkin = np.einsum("eq,qi,eq->ei", wv, N, load_q)
    rhs_supg = np.einsum("eq,eqi,eq->ei", wv * tau_e[:, None], a, load_q)

    dc = np.zeros_like(galerkin)
    nu = None
    if inp.cbar_prev is not None and inp.cfg.enabled:
        dc, nu = _dc_block(inp, idx, grads, vol, u_q, u_e, sigma, f, tau_e, load_q)

    return LocalSystem(
        matrix=galerkin + mass + supg + dc,
        vector=rhs_galerkin + rhs_supg,
        supg_matrix=supg,
        supg_vector=rhs_supg,
        dc_matrix=dc,
        dc_nu=nu,
    )


def _dc_block(inp, idx, grads, vol, u_q, u_e, sigma, f, tau_e, load_q):
    geo = inp.mesh.geometry
    N = inp.rule.shape_values
    prev = inp.cbar_prev[inp.mesh.elements[idx]]
    grad_prev = np.einsum("ei,eid->ed", prev, grads)
    prev_q = prev @ N.T
    # lagged residual; load_q already holds f + c̄_old/Δt
    R = (
        np.einsum("eqd,ed->eq", u_q, grad_prev)
        + (inp.inv_dt + sigma)[:, None] * prev_q
        - load_q
    )
    if inp.cfg.diffusivity is DCDiffusivity.CODINA:
        nu = codina_diffusivity(
            R,
            grad_prev[:, None, :],
            u_e[:, None, :],
            inp.mesh.longest_edge[idx][:, None],
            inp.cfg,
            scale=inp.scale / inp.mesh.length_scale,
        )
    else:
        nu = dc_diffusivity(
            R,
            grad_prev[:, None, :],
            None,
            tau_e[:, None],
            inp.cfg,
            scale=inp.scale,
            G_inv=geo.metric_inverse[idx][:, None],
        )
    if inp.nu_floor is not None:
        nu = np.maximum(nu, inp.nu_floor[idx])
    M = dc_tensor(u_e, geo.metric[idx], geo.jacobian[idx], inp.cfg)
    weight = vol * (nu @ inp.rule.weights)
    return np.einsum("e,eid,edk,ejk->eij", weight, grads, M, grads), nu


def supg_element(
    mesh: Mesh,
    e: int,
    u: np.ndarray,
    coeffs: ElementCoefficients,
    dt: float | None = None,
    cbar_old: np.ndarray | None = None,
    cbar_prev: np.ndarray | None = None,
    cfg: DCConfig | None = None,
    quad_degree: int = 2,
) -> LocalSystem:
    """Local Galerkin + SUPG (+ lagged DC) system of element ``e``."""
    u = _check_velocity(mesh, u)
    cbar_prev = _check_scalar(mesh, cbar_prev, "lagged field")
    inp = _Inputs(
        mesh=mesh,
        u=u,
        coeffs=coeffs,
        inv_dt=_inv_dt(dt),
        cbar_old=_check_scalar(mesh, cbar_old, "previous time level"),
        cbar_prev=cbar_prev,
        cfg=cfg or DCConfig(),
        rule=element_rule(mesh.dim, quad_degree),
        scale=_field_scale(cbar_prev),
    )
    block = _element_block(inp, np.array([e]))
    return LocalSystem(
        matrix=block.matrix[0],
        vector=block.vector[0],
        supg_matrix=block.supg_matrix[0],
        supg_vector=block.supg_vector[0],
        dc_matrix=block.dc_matrix[0],
        dc_nu=None if block.dc_nu is None else block.dc_nu[0],
    )


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    """Sparse system over the free nodes with Dirichlet values eliminated."""

    matrix: sparse.csr_matrix
    rhs: np.ndarray
    dirichlet: dict[int, float]
    free_nodes: np.ndarray
    n_nodes: int
    dc_nu: np.ndarray | None = None

    def expand(self, x_free: np.ndarray) -> np.ndarray:
        full = np.empty(self.n_nodes)
        full[self.free_nodes] = x_free
        if self.dirichlet:
            nodes = np.fromiter(self.dirichlet.keys(), dtype=np.int64)
            full[nodes] = np.fromiter(self.dirichlet.values(), dtype=float)
        return full


def _check_velocity(mesh: Mesh, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != mesh.nodes.shape:
        raise DimensionMismatchError(
            f"velocity has shape {u.shape}, expected {mesh.nodes.shape}", module="femcore"
        )
    return u


def _check_scalar(mesh: Mesh, field: np.ndarray | None, name: str) -> np.ndarray | None:
    if field is None:
        return None
    field = np.asarray(field, dtype=float)
    if field.shape != (mesh.n_nodes,):
        raise DimensionMismatchError(
            f"{name} has shape {field.shape}, expected ({mesh.n_nodes},)", module="femcore"
        )
    return field


def _check_nu_floor(mesh: Mesh, nu_floor: np.ndarray | None, active: bool) -> np.ndarray | None:
    if nu_floor is None or not active:
        return None
    nu_floor = np.asarray(nu_floor, dtype=float)
    if nu_floor.ndim != 2 or nu_floor.shape[0] != mesh.n_elements:
        raise DimensionMismatchError(
            f"ν_DC floor has shape {nu_floor.shape}, expected ({mesh.n_elements}, Q)",
            module="femcore",
        )
    return nu_floor


def _field_scale(field: np.ndarray | None) -> float:
    if field is None or field.size == 0:
        return 0.0
    return float(np.max(np.abs(field)))


def dirichlet_values(
    mesh: Mesh, u: np.ndarray, transform: Transform, c_inflow: float = 0.0
) -> dict[int, float]:
    """Transformed inflow value on every inflow node."""
    value = inflow_value(transform, c_inflow)
    return {n: value for n in sorted(inflow_nodes(mesh, u))}


def assemble(
    mesh: Mesh,
    u: np.ndarray,
    reaction: ReactionCoefficients,
    transform: Transform,
    dt: float | None = None,
    cbar_prev: np.ndarray | None = None,
    cbar_old: np.ndarray | None = None,
    cfg: DCConfig | None = None,
    dirichlet: Mapping[int, float] | None = None,
    c_inflow: float = 0.0,
    quad_degree: int = 2,
    nu_floor: np.ndarray | None = None,
) -> AssembledSystem:
    """Global system for one linear solve.

    ν_DC is evaluated on ``cbar_prev``; without it the DC term is off.
    ``nu_floor`` (elements × quadrature points) bounds ν_DC from below and
    the ν_DC actually used comes back as ``dc_nu``.
    Dirichlet values default to the transformed ``c_inflow`` on the inflow
    nodes of ``u``.
    """
    cfg = cfg or DCConfig()
    u = _check_velocity(mesh, u)
    cbar_prev = _check_scalar(mesh, cbar_prev, "lagged field")
    cbar_old = _check_scalar(mesh, cbar_old, "previous time level")
    inv_dt = _inv_dt(dt)
    if inv_dt and cbar_old is None:
        raise ValueError("a finite time step needs the previous time level")
    if dirichlet is None:
        dirichlet = dirichlet_values(mesh, u, transform, c_inflow)

    inp = _Inputs(
        mesh=mesh,
        u=u,
        coeffs=element_coefficients(mesh, reaction, transform),
        inv_dt=inv_dt,
        cbar_old=cbar_old,
        cbar_prev=cbar_prev,
        cfg=cfg,
        rule=element_rule(mesh.dim, quad_degree),
        scale=_field_scale(cbar_prev),
        nu_floor=_check_nu_floor(mesh, nu_floor, cbar_prev is not None and cfg.enabled),
    )
    chunks = [
        np.arange(lo, min(lo + CHUNK_SIZE, mesh.n_elements))
        for lo in range(0, mesh.n_elements, CHUNK_SIZE)
    ]
    executor = get_executor()
    if executor is not None and len(chunks) > 1:
        blocks = list(executor.map(lambda idx: _element_block(inp, idx), chunks))
    else:
        blocks = [_element_block(inp, idx) for idx in chunks]
    K_e = np.concatenate([b.matrix for b in blocks])
    F_e = np.concatenate([b.vector for b in blocks])
    dc_nu = None
    if blocks and blocks[0].dc_nu is not None:
        dc_nu = np.concatenate([b.dc_nu for b in blocks])

    conn = mesh.elements
    n = conn.shape[1]
    rows = np.repeat(conn, n, axis=1).ravel()
    cols = np.tile(conn, (1, n)).ravel()
    K = sparse.coo_matrix((K_e.ravel(), (rows, cols)), shape=(mesh.n_nodes,) * 2).tocsr()
    F = np.bincount(conn.ravel(), weights=F_e.ravel(), minlength=mesh.n_nodes)

    dir_nodes = np.fromiter(dirichlet.keys(), dtype=np.int64, count=len(dirichlet))
    dir_vals = np.fromiter(dirichlet.values(), dtype=float, count=len(dirichlet))
    is_free = np.ones(mesh.n_nodes, dtype=bool)
    is_free[dir_nodes] = False
    free = np.flatnonzero(is_free)
    A = K[free][:, free].tocsr()
    b = F[free] - K[free][:, dir_nodes] @ dir_vals
    if not (np.all(np.isfinite(A.data)) and np.all(np.isfinite(b))):
        raise NumericalError("assembled system has non-finite entries", module="femcore")
    logger.debug(
        f"assembled {mesh.n_elements} elements: {len(free)} free, {len(dir_nodes)} dirichlet"
    )
    return AssembledSystem(
        matrix=A,
        rhs=b,
        dirichlet={int(k): float(v) for k, v in zip(dir_nodes, dir_vals)},
        free_nodes=free,
        n_nodes=mesh.n_nodes,
        dc_nu=dc_nu,
    )


def recover_gradient(mesh: Mesh, field: np.ndarray) -> np.ndarray:
    """Nodal gradient as the volume-weighted mean of the element P1 gradients.

    Scalar fields give (N, d); vector fields give (N, c, d) with
    ``out[i, a, b] = ∂field_a/∂x_b``.
    """
    field = np.asarray(field, dtype=float)
    if field.shape[0] != mesh.n_nodes:
        raise DimensionMismatchError(
            f"field has {field.shape[0]} rows for {mesh.n_nodes} nodes", module="femcore"
        )
    geo = mesh.geometry
    local = field[mesh.elements]
    if field.ndim == 1:
        grad_e = np.einsum("ei,eid->ed", local, geo.shape_gradients)
    else:
        grad_e = np.einsum("eic,eid->ecd", local, geo.shape_gradients)
    weighted = grad_e * geo.volume.reshape((-1,) + (1,) * (grad_e.ndim - 1))
    acc = np.zeros((mesh.n_nodes,) + grad_e.shape[1:])
    weight = np.zeros(mesh.n_nodes)
    for i in range(mesh.dim + 1):
        np.add.at(acc, mesh.elements[:, i], weighted)
        np.add.at(weight, mesh.elements[:, i], geo.volume)
    return acc / weight.reshape((-1,) + (1,) * (acc.ndim - 1))
