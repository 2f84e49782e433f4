from collections.abc import Mapping
from pathlib import Path

import meshio
import numpy as np

from boundtransport.common.errors import DimensionMismatchError, InputOutputError
from boundtransport.fem.mesh import Mesh

CELL_TYPES = {2: "triangle", 3: "tetra"}


def _pad3(values: np.ndarray) -> np.ndarray:
    if values.ndim == 2 and values.shape[1] < 3:
        return np.hstack([values, np.zeros((len(values), 3 - values.shape[1]))])
    return values


def to_meshio(mesh: Mesh, fields: Mapping[str, np.ndarray] | None = None) -> meshio.Mesh:
    point_data = {}
    for name, values in (fields or {}).items():
        values = np.asarray(values, dtype=float)
        if values.shape[0] != mesh.n_nodes:
            raise DimensionMismatchError(
                f"field {name!r} has {values.shape[0]} values for {mesh.n_nodes} nodes",
                module="io_cli",
            )
        point_data[name] = _pad3(values)
    return meshio.Mesh(
        points=_pad3(mesh.nodes),
        cells=[(CELL_TYPES[mesh.dim], mesh.elements)],
        point_data=point_data,
    )


def write_vtk(mesh: Mesh, fields: Mapping[str, np.ndarray], path: str | Path) -> Path:
    """Legacy ASCII VTK unstructured grid with the fields as point data."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        meshio.write(path, to_meshio(mesh, fields), file_format="vtk42", binary=False)
    except (OSError, meshio.WriteError) as e:
        raise InputOutputError(f"cannot write {path}: {e}", module="io_cli") from e
    return path


def read_vtk(path: str | Path) -> tuple[Mesh, dict[str, np.ndarray]]:
    """Mesh and point data of a file written by ``write_vtk``."""
    path = Path(path)
    if not path.exists():
        raise InputOutputError(f"VTK file not found: {path}", module="io_cli")
    try:
        mio = meshio.vtk.read(path)
    except Exception as e:
        raise InputOutputError(f"cannot read {path}: {e}", module="io_cli") from e
    dim = 3 if any(block.type == "tetra" for block in mio.cells) else 2
    cells = [block.data for block in mio.cells if block.type == CELL_TYPES[dim]]
    if not cells:
        raise InputOutputError(f"{path} holds no triangles or tetrahedra", module="io_cli")
    mesh = Mesh(mio.points[:, :dim], np.vstack(cells))
    fields = {
        name: values[:, :dim] if values.ndim == 2 and values.shape[1] == 3 else values
        for name, values in mio.point_data.items()
    }
    return mesh, fields
