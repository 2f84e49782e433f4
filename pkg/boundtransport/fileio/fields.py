"""Nodal field CSVs and the tabular result files."""

import csv
from pathlib import Path

import numpy as np

from boundtransport.common.errors import FieldFileError, InputOutputError
from boundtransport.schemas.results.reports import FieldStats

STATS_HEADER = ["min", "max", "negative_node_count", "negative_volume_fraction"]


def read_nodal_field(path: str | Path, n_nodes: int, components: int | None = None) -> np.ndarray:
    """Rows ``node_id,value[,value_y[,value_z]]`` in mesh node order.

    Returns shape (n_nodes,) for one value per row, else (n_nodes, c).
    """
    path = Path(path)
    if not path.exists():
        raise FieldFileError(f"field file not found: {path}", module="io_cli")
    try:
        with path.open(newline="") as f:
            rows = [row for row in csv.reader(f) if row and not row[0].startswith("#")]
        if rows and not _numeric(rows[0]):
            rows = rows[1:]
        values = np.array([[float(v) for v in row[1:]] for row in rows])
    except ValueError as e:
        raise FieldFileError(f"malformed field file {path}: {e}", module="io_cli") from e
    if len(values) != n_nodes:
        raise FieldFileError(
            f"{path.name} has {len(values)} rows for a mesh with {n_nodes} nodes",
            module="io_cli",
        )
    width = values.shape[1] if values.ndim == 2 else 0
    if components is not None and width != components:
        raise FieldFileError(
            f"{path.name} has {width} values per row, expected {components}",
            module="io_cli",
        )
    return values[:, 0] if width == 1 else values


def _numeric(row: list[str]) -> bool:
    try:
        [float(v) for v in row]
    except ValueError:
        return False
    return True


def write_nodal_field(path: str | Path, values: np.ndarray) -> Path:
    path = Path(path)
    values = np.asarray(values, dtype=float)
    table = values[:, None] if values.ndim == 1 else values
    names = ["value", "value_y", "value_z"][: table.shape[1]]
    with _open_for_write(path) as f:
        w = csv.writer(f)
        w.writerow(["node_id", *names])
        w.writerows([i, *map(repr, row)] for i, row in enumerate(table.tolist()))
    return path


def write_stats_csv(path: str | Path, stats: FieldStats) -> Path:
    path = Path(path)
    with _open_for_write(path) as f:
        w = csv.writer(f)
        w.writerow(STATS_HEADER)
        w.writerow([repr(getattr(stats, name)) for name in STATS_HEADER])
    return path


def write_line_csv(path: str | Path, samples: list[tuple[float, float | None]]) -> Path:
    """Arc length (cm) and sampled value; points outside the mesh are left empty."""
    path = Path(path)
    with _open_for_write(path) as f:
        w = csv.writer(f)
        w.writerow(["s", "value"])
        w.writerows([repr(s), "" if v is None else repr(v)] for s, v in samples)
    return path


def read_line_csv(path: str | Path) -> list[tuple[float, float | None]]:
    with Path(path).open(newline="") as f:
        rows = list(csv.reader(f))[1:]
    return [(float(s), float(v) if v else None) for s, v in rows]


def _open_for_write(path: Path):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return path.open("w", newline="")
    except OSError as e:
        raise InputOutputError(f"cannot write {path}: {e}", module="io_cli") from e
