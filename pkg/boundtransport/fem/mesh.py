"""Linear simplex meshes and their reference-element geometry.

The reference element is the symmetric simplex (unit-edge equilateral
triangle or regular tetrahedron), so the covariant metric tensor carries no
directional bias from the vertex numbering.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from boundtransport.common.errors import (
    DegenerateElementError,
    DimensionMismatchError,
    MeshParseError,
)
from boundtransport.common.quadrature import SYMMETRIC_SIMPLEX, p1_reference_gradients

logger = logging.getLogger(__name__)

UNTAGGED_MARKER = "boundary"
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ElementGeometry:
    """Mapping of one element from the symmetric reference simplex."""

    jacobian: np.ndarray
    covariant_metric: np.ndarray
    volume: float
    jacobian_inverse: np.ndarray
    shape_gradients: np.ndarray


@dataclass(frozen=True, eq=False)
class MeshGeometry:
    """Element geometry for the whole mesh, stacked along the first axis."""

    jacobian: np.ndarray  # (E, d, d), symmetric reference -> physical
    jacobian_inverse: np.ndarray  # (E, d, d)
    metric: np.ndarray  # (E, d, d), G = J^-T J^-1
    metric_inverse: np.ndarray  # (E, d, d), G^-1 = J J^T
    volume: np.ndarray  # (E,)
    shape_gradients: np.ndarray  # (E, d + 1, d), physical P1 gradients


@dataclass(frozen=True, eq=False)
class Mesh:
    """Unstructured mesh of linear triangles (2D) or tetrahedra (3D).

    Elements with negative signed volume are reordered on construction;
    zero-volume elements are rejected. Boundary faces missing from
    ``facets`` are added with the marker ``"boundary"``.
    """

    nodes: np.ndarray
    elements: np.ndarray
    facets: np.ndarray = field(default_factory=lambda: np.empty((0, 0), dtype=int))
    facet_markers: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        elements = np.ascontiguousarray(self.elements, dtype=np.int64)
        if nodes.ndim != 2 or nodes.shape[1] not in (2, 3):
            raise MeshParseError(
                f"nodes must have 2 or 3 coordinates, got shape {nodes.shape}",
                module="mesh",
            )
        dim = nodes.shape[1]
        if elements.ndim != 2 or elements.shape[1] != dim + 1 or len(elements) == 0:
            raise MeshParseError(
                f"{dim}D mesh needs elements with {dim + 1} nodes, got shape {elements.shape}",
                module="mesh",
            )
        if elements.min() < 0 or elements.max() >= len(nodes):
            raise MeshParseError("element references a missing node", module="mesh")

        elements = _orient(nodes, elements)
        facets, markers = _complete_facets(
            elements, np.asarray(self.facets, dtype=np.int64), tuple(self.facet_markers), dim
        )
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "facets", facets)
        object.__setattr__(self, "facet_markers", markers)

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def boundary_facets(self) -> list[tuple[tuple[int, ...], str]]:
        return [
            (tuple(int(n) for n in facet), marker)
            for facet, marker in zip(self.facets, self.facet_markers)
        ]

    @property
    def markers(self) -> list[str]:
        return sorted(set(self.facet_markers))

    @cached_property
    def centroids(self) -> np.ndarray:
        return self.nodes[self.elements].mean(axis=1)

    @cached_property
    def length_scale(self) -> float:
        """Bounding-box diagonal."""
        return float(np.linalg.norm(self.nodes.max(axis=0) - self.nodes.min(axis=0)))

    @cached_property
    def longest_edge(self) -> np.ndarray:
        pts = self.nodes[self.elements]
        n = self.dim + 1
        lengths = [
            np.linalg.norm(pts[:, i] - pts[:, j], axis=1)
            for i in range(n)
            for j in range(i + 1, n)
        ]
        return np.max(lengths, axis=0)

    @cached_property
    def geometry(self) -> MeshGeometry:
        pts = self.nodes[self.elements]
        jac_std = np.transpose(pts[:, 1:] - pts[:, :1], (0, 2, 1))
        det = np.linalg.det(jac_std)
        if np.any(det <= 0.0):
            bad = int(np.flatnonzero(det <= 0.0)[0])
            raise DegenerateElementError(
                f"element {bad} has a singular Jacobian", module="mesh"
            )
        jac_std_inv = np.linalg.inv(jac_std)
        sym_inv = np.linalg.inv(SYMMETRIC_SIMPLEX[self.dim])
        jacobian = jac_std @ sym_inv
        jacobian_inverse = SYMMETRIC_SIMPLEX[self.dim] @ jac_std_inv
        metric = np.transpose(jacobian_inverse, (0, 2, 1)) @ jacobian_inverse
        metric_inverse = jacobian @ np.transpose(jacobian, (0, 2, 1))
        grads = np.einsum("id,edk->eik", p1_reference_gradients(self.dim), jac_std_inv)
        return MeshGeometry(
            jacobian=jacobian,
            jacobian_inverse=jacobian_inverse,
            metric=metric,
            metric_inverse=metric_inverse,
            volume=det / math.factorial(self.dim),
            shape_gradients=grads,
        )

    @cached_property
    def facet_owners(self) -> np.ndarray:
        """Index of the single element each boundary facet belongs to."""
        lookup = _boundary_face_lookup(self.elements, self.dim)
        return np.array([lookup[tuple(sorted(f))] for f in self.facets.tolist()], dtype=np.int64)

    @cached_property
    def facet_normals(self) -> tuple[np.ndarray, np.ndarray]:
        """Outward unit normals and measures of the boundary facets."""
        pts = self.nodes[self.facets]
        if self.dim == 2:
            tangent = pts[:, 1] - pts[:, 0]
            raw = np.column_stack([tangent[:, 1], -tangent[:, 0]])
            measure = np.linalg.norm(tangent, axis=1)
        else:
            raw = np.cross(pts[:, 1] - pts[:, 0], pts[:, 2] - pts[:, 0])
            measure = 0.5 * np.linalg.norm(raw, axis=1)
        normals = raw / np.linalg.norm(raw, axis=1)[:, None]
        outward = pts.mean(axis=1) - self.centroids[self.facet_owners]
        flip = np.einsum("fd,fd->f", normals, outward) < 0.0
        normals[flip] *= -1.0
        return normals, measure

    def facets_with_marker(self, marker: str) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.facet_markers) == marker)

    def nodes_with_marker(self, marker: str) -> np.ndarray:
        return np.unique(self.facets[self.facets_with_marker(marker)])


def element_geometry(mesh: Mesh, e: int) -> ElementGeometry:
    geo = mesh.geometry
    if not 0 <= e < mesh.n_elements:
        raise IndexError(f"element {e} out of range")
    if geo.volume[e] <= 0.0:
        raise DegenerateElementError(f"element {e} has a singular Jacobian", module="mesh")
    return ElementGeometry(
        jacobian=geo.jacobian[e],
        covariant_metric=geo.metric[e],
        volume=float(geo.volume[e]),
        jacobian_inverse=geo.jacobian_inverse[e],
        shape_gradients=geo.shape_gradients[e],
    )


def inflow_nodes(mesh: Mesh, u: np.ndarray) -> frozenset[int]:
    """Nodes of boundary facets whose facet-averaged u·n is negative."""
    u = np.asarray(u, dtype=float)
    if u.shape != mesh.nodes.shape:
        raise DimensionMismatchError(
            f"velocity has shape {u.shape}, mesh nodes {mesh.nodes.shape}", module="mesh"
        )
    speed = float(np.max(np.linalg.norm(u, axis=1), initial=0.0))
    if speed == 0.0 or len(mesh.facets) == 0:
        return frozenset()
    normals, _ = mesh.facet_normals
    flux = np.einsum("fd,fd->f", u[mesh.facets].mean(axis=1), normals)
    inflow = mesh.facets[flux < -1e-12 * speed]
    return frozenset(int(n) for n in np.unique(inflow))


def _orient(nodes: np.ndarray, elements: np.ndarray) -> np.ndarray:
    pts = nodes[elements]
    jac = np.transpose(pts[:, 1:] - pts[:, :1], (0, 2, 1))
    det = np.linalg.det(jac)
    n = elements.shape[1]
    edges = [
        np.linalg.norm(pts[:, i] - pts[:, j], axis=1)
        for i in range(n)
        for j in range(i + 1, n)
    ]
    scale = np.max(edges, axis=0) ** (n - 1)
    degenerate = np.abs(det) <= DEGENERATE_TOL * scale
    if np.any(degenerate):
        bad = int(np.flatnonzero(degenerate)[0])
        raise DegenerateElementError(
            f"element {bad} is inverted or has zero volume", module="mesh"
        )
    flipped = det < 0.0
    if np.any(flipped):
        logger.debug(f"reordered {int(flipped.sum())} negatively oriented elements")
        elements = elements.copy()
        elements[flipped, 0], elements[flipped, 1] = (
            elements[flipped, 1],
            elements[flipped, 0].copy(),
        )
    return elements


def _local_faces(dim: int) -> list[list[int]]:
    return [[j for j in range(dim + 1) if j != i] for i in range(dim + 1)]


def _boundary_face_lookup(elements: np.ndarray, dim: int) -> dict[tuple[int, ...], int]:
    faces = np.concatenate([np.sort(elements[:, f], axis=1) for f in _local_faces(dim)])
    owners = np.tile(np.arange(len(elements)), dim + 1)
    _, inverse, counts = np.unique(faces, axis=0, return_inverse=True, return_counts=True)
    boundary = counts[inverse.ravel()] == 1
    return {
        tuple(face): int(owner)
        for face, owner in zip(faces[boundary].tolist(), owners[boundary].tolist())
    }


def _complete_facets(
    elements: np.ndarray, facets: np.ndarray, markers: tuple[str, ...], dim: int
) -> tuple[np.ndarray, tuple[str, ...]]:
    lookup = _boundary_face_lookup(elements, dim)
    given: list[list[int]] = []
    seen: set[tuple[int, ...]] = set()
    if facets.size:
        if facets.ndim != 2 or facets.shape[1] != dim or len(markers) != len(facets):
            raise MeshParseError(
                f"{dim}D mesh needs facets with {dim} nodes and one marker each",
                module="mesh",
            )
        for facet in facets.tolist():
            key = tuple(sorted(facet))
            if key not in lookup:
                raise MeshParseError(
                    f"boundary facet {facet} is not a face of exactly one element",
                    module="mesh",
                )
            seen.add(key)
            given.append(facet)
    extra = [list(face) for face in lookup if face not in seen]
    all_facets = np.array(given + extra, dtype=np.int64).reshape(-1, dim)
    return all_facets, tuple(markers) + (UNTAGGED_MARKER,) * len(extra)
