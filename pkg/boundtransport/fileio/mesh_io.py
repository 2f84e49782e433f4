"""Mesh readers (Gmsh MSH 2.2 ASCII through meshio, native CSV directory)
and the native CSV writer."""

import csv
import logging
from pathlib import Path

import meshio
import numpy as np

from boundtransport.common.constants import MeshFormat
from boundtransport.common.errors import (
    BoundTransportError,
    InputOutputError,
    MeshParseError,
    UnsupportedElementError,
)
from boundtransport.fem.mesh import UNTAGGED_MARKER, Mesh

logger = logging.getLogger(__name__)

SIMPLEX_TYPES = {2: "triangle", 3: "tetra"}
FACET_TYPES = {2: "line", 3: "triangle"}
IGNORED_TYPES = {"vertex"}


def load_mesh(path: str | Path, format: MeshFormat = MeshFormat.GMSH_ASCII) -> Mesh:
    path = Path(path)
    if not path.exists():
        raise MeshParseError(f"mesh source not found: {path}", module="mesh")
    try:
        if MeshFormat(format) is MeshFormat.NATIVE_CSV:
            mesh = _load_native(path)
        else:
            mesh = _load_gmsh(path)
    except BoundTransportError:
        raise
    except Exception as e:
        raise MeshParseError(f"cannot parse {path}: {e}", module="mesh") from e
    logger.debug(f"loaded {path}: {mesh.n_nodes} nodes, {mesh.n_elements} elements")
    return mesh


def _load_gmsh(path: Path) -> Mesh:
    try:
        mio = meshio.gmsh.read(path)
    except meshio.ReadError as e:
        raise MeshParseError(f"{path} is not a readable Gmsh file: {e}", module="mesh") from e
    types = {block.type for block in mio.cells}
    unsupported = types - set(SIMPLEX_TYPES.values()) - {"line"} - IGNORED_TYPES
    if unsupported:
        raise UnsupportedElementError(
            f"only linear triangles and tetrahedra are supported, found {sorted(unsupported)}",
            module="mesh",
        )
    dim = 3 if "tetra" in types else 2
    if SIMPLEX_TYPES[dim] not in types:
        raise MeshParseError(f"{path} contains no triangles or tetrahedra", module="mesh")

    names = {
        int(tag): name
        for name, (tag, tag_dim) in ((n, d[:2]) for n, d in mio.field_data.items())
        if int(tag_dim) == dim - 1
    }
    physical = mio.cell_data.get("gmsh:physical")
    elements, facets, markers = [], [], []
    for i, block in enumerate(mio.cells):
        if block.type == SIMPLEX_TYPES[dim]:
            elements.append(block.data)
        elif block.type == FACET_TYPES[dim]:
            facets.append(block.data)
            if physical is None:
                markers += [UNTAGGED_MARKER] * len(block.data)
            else:
                markers += [names.get(int(t), str(int(t))) for t in physical[i]]

    nodes = mio.points[:, :dim] if dim == 2 else mio.points
    if dim == 2 and mio.points.shape[1] == 3 and np.any(mio.points[:, 2] != 0.0):
        raise MeshParseError("2D mesh has nonzero z coordinates", module="mesh")
    return Mesh(
        nodes=nodes,
        elements=np.vstack(elements),
        facets=np.vstack(facets) if facets else np.empty((0, dim), dtype=int),
        facet_markers=tuple(markers),
    )


def _rows(path: Path) -> list[list[str]]:
    with path.open(newline="") as f:
        rows = [
            [cell.strip() for cell in row]
            for row in csv.reader(f)
            if row and not row[0].lstrip().startswith("#")
        ]
    if rows and not _is_number(rows[0][-1]):
        rows = rows[1:]
    return rows


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _load_native(directory: Path) -> Mesh:
    node_rows = _rows(directory / "nodes.csv")
    element_rows = _rows(directory / "elements.csv")
    if not node_rows or not element_rows:
        raise MeshParseError(f"{directory} has no nodes or elements", module="mesh")
    dim = len(node_rows[0]) - 1
    if any(len(r) != dim + 1 for r in node_rows):
        raise MeshParseError("nodes.csv rows must all have the same width", module="mesh")
    index = {r[0]: i for i, r in enumerate(node_rows)}
    nodes = np.array([[float(v) for v in r[1:]] for r in node_rows])

    width = len(element_rows[0]) - 1
    if width not in (3, 4):
        raise UnsupportedElementError(
            f"elements with {width} nodes are not linear simplices", module="mesh"
        )
    try:
        elements = np.array([[index[v] for v in r[1:]] for r in element_rows])
        facets, markers = np.empty((0, dim), dtype=int), ()
        facet_path = directory / "facets.csv"
        if facet_path.exists():
            facet_rows = _rows(facet_path)
            markers = tuple(r[0] for r in facet_rows)
            facets = np.array([[index[v] for v in r[1:]] for r in facet_rows]).reshape(-1, dim)
    except KeyError as e:
        raise MeshParseError(f"unknown node id {e} in {directory}", module="mesh") from e
    return Mesh(nodes, elements, facets, markers)


def write_native_mesh(mesh: Mesh, directory: str | Path) -> Path:
    """Write nodes.csv, elements.csv and facets.csv with 0-based ids."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        axes = ["x", "y", "z"][: mesh.dim]
        with (directory / "nodes.csv").open("w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["id", *axes])
            w.writerows([i, *map(repr, p)] for i, p in enumerate(mesh.nodes.tolist()))
        with (directory / "elements.csv").open("w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["id", *(f"n{k}" for k in range(mesh.dim + 1))])
            w.writerows([i, *e] for i, e in enumerate(mesh.elements.tolist()))
        with (directory / "facets.csv").open("w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["marker", *(f"n{k}" for k in range(mesh.dim))])
            w.writerows([m, *fc] for fc, m in zip(mesh.facets.tolist(), mesh.facet_markers))
    except OSError as e:
        raise InputOutputError(f"cannot write mesh to {directory}: {e}", module="io_cli") from e
    return directory
