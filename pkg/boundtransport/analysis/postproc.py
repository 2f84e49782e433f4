"""Field statistics, line probes, outflow averages and the ΔPHb conversion."""

import logging

import numpy as np
from scipy.spatial import cKDTree

from boundtransport.common.constants import DEFAULT_HEMOGLOBIN
from boundtransport.common.errors import (
    DimensionMismatchError,
    NoIntersectionError,
    ZeroFluxError,
)
from boundtransport.common.quadrature import facet_rule, p1_values
from boundtransport.fem.mesh import Mesh
from boundtransport.schemas.results.reports import FieldStats

logger = logging.getLogger(__name__)

INSIDE_TOL = 1e-10
CANDIDATES = 8


def _nodal(mesh: Mesh, field: np.ndarray) -> np.ndarray:
    field = np.asarray(field, dtype=float)
    if field.shape != (mesh.n_nodes,):
        raise DimensionMismatchError(
            f"field has shape {field.shape}, expected ({mesh.n_nodes},)", module="postproc"
        )
    return field


def field_stats(mesh: Mesh, field: np.ndarray) -> FieldStats:
    field = _nodal(mesh, field)
    negative = field < 0.0
    volume = mesh.geometry.volume
    touched = negative[mesh.elements].any(axis=1)
    return FieldStats(
        min=float(field.min()),
        max=float(field.max()),
        negative_node_count=int(negative.sum()),
        negative_volume_fraction=float(volume[touched].sum() / volume.sum()),
    )


def _barycentric(mesh: Mesh, elements: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of points[k] in elements[k], shape (k, d + 1)."""
    origin = mesh.nodes[mesh.elements[elements, 0]]
    jac = np.transpose(
        mesh.nodes[mesh.elements[elements, 1:]] - origin[:, None, :], (0, 2, 1)
    )
    xi = np.linalg.solve(jac, (points - origin)[..., None])[..., 0]
    return p1_values(xi)


def locate(mesh: Mesh, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Containing element (−1 when outside) and barycentric weights per point."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    tree = cKDTree(mesh.centroids)
    k = min(CANDIDATES, mesh.n_elements)
    _, near = tree.query(points, k=k)
    near = near.reshape(len(points), k)

    owner = np.full(len(points), -1)
    weights = np.zeros((len(points), mesh.dim + 1))
    for col in range(k):
        todo = np.flatnonzero(owner < 0)
        if todo.size == 0:
            break
        bary = _barycentric(mesh, near[todo, col], points[todo])
        hit = bary.min(axis=1) >= -INSIDE_TOL
        owner[todo[hit]] = near[todo[hit], col]
        weights[todo[hit]] = bary[hit]
    # nearest centroids can miss on stretched elements
    for p in np.flatnonzero(owner < 0):
        bary = _barycentric(
            mesh, np.arange(mesh.n_elements), np.broadcast_to(points[p], (mesh.n_elements, mesh.dim))
        )
        inside = np.flatnonzero(bary.min(axis=1) >= -INSIDE_TOL)
        if inside.size:
            owner[p] = inside[0]
            weights[p] = bary[inside[0]]
    return owner, weights


def sample_line(
    mesh: Mesh, field: np.ndarray, p0, p1, n: int
) -> list[tuple[float, float | None]]:
    """``n`` uniform samples on the segment p0→p1 as (arc length, value).

    Values are P1 interpolants; points outside the mesh carry ``None``.
    """
    field = _nodal(mesh, field)
    if n < 2:
        raise ValueError("need at least two samples")
    p0, p1 = np.asarray(p0, dtype=float), np.asarray(p1, dtype=float)
    if p0.shape != (mesh.dim,) or p1.shape != (mesh.dim,):
        raise DimensionMismatchError(
            f"probe endpoints must have {mesh.dim} coordinates", module="postproc"
        )
    t = np.linspace(0.0, 1.0, n)
    points = p0 + t[:, None] * (p1 - p0)
    arc = t * float(np.linalg.norm(p1 - p0))
    owner, weights = locate(mesh, points)
    if np.all(owner < 0):
        raise NoIntersectionError(
            f"probe line {p0.tolist()} -> {p1.tolist()} misses the mesh", module="postproc"
        )
    inside = owner >= 0
    values = np.full(n, np.nan)
    values[inside] = np.einsum(
        "pi,pi->p", weights[inside], field[mesh.elements[owner[inside]]]
    )
    return [
        (float(s), float(v) if ok else None) for s, v, ok in zip(arc, values, inside)
    ]


def outflow_average(mesh: Mesh, field_ih: np.ndarray, u: np.ndarray, marker: str) -> float:
    """Flux-weighted mean ∫ u·n IH dΓ / ∫ u·n dΓ over the marked facets."""
    field_ih = _nodal(mesh, field_ih)
    u = np.asarray(u, dtype=float)
    if u.shape != mesh.nodes.shape:
        raise DimensionMismatchError("velocity does not match the mesh", module="postproc")
    facets = mesh.facets_with_marker(marker)
    if facets.size == 0:
        raise ZeroFluxError(f"no boundary facets carry marker {marker!r}", module="postproc")

    rule = facet_rule(mesh.dim)
    N = rule.shape_values  # (Q, d)
    normals, measure = mesh.facet_normals
    conn = mesh.facets[facets]
    un_q = np.einsum("qi,fid,fd->fq", N, u[conn], normals[facets])
    ih_q = field_ih[conn] @ N.T
    w = rule.weights[None, :] * measure[facets, None]
    flux = float(np.sum(w * un_q))
    if flux <= 1e-14 * float(np.sum(w * np.abs(un_q)) or 1.0):
        raise ZeroFluxError(
            f"net flux through {marker!r} is {flux:.3e}, not an outflow", module="postproc"
        )
    average = float(np.sum(w * un_q * ih_q) / flux)
    logger.debug(f"outflow {marker}: flux={flux:.6e} average={average:.6e}")
    return average


def delta_phb(
    ih_out: float,
    hb: float = DEFAULT_HEMOGLOBIN,
    hct: float = 0.36,
    q_lpm: float = 6.0,
    t_min: float = 120.0,
    v_loop_ml: float = 250.0,
) -> float:
    """ΔPHb (mg/dL) = IH_out · Hb/(1 − Hct) · Q·T / V_loop, Q in L/min, V in mL."""
    if not 0.0 < hct < 1.0:
        raise ValueError("hematocrit must lie in (0, 1)")
    if v_loop_ml <= 0.0:
        raise ValueError("loop volume must be positive")
    pumped_ml = q_lpm * 1000.0 * t_min
    return ih_out * hb / (1.0 - hct) * pumped_ml / v_loop_ml
