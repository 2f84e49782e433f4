"""Synthetic rotating-vortex flow on an annulus.

Fluid enters at the inner circle and leaves at the outer one. The velocity
u = q/r e_r + ω r e_θ (q = Q/2π) superposes a point source and solid-body
rotation; both parts are divergence free.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from boundtransport.common.errors import InputOutputError
from boundtransport.fem.mesh import Mesh
from boundtransport.fileio.fields import write_nodal_field
from boundtransport.fileio.mesh_io import write_native_mesh
from boundtransport.schemas.physics.cases import VortexSpec

DEFAULT_VORTEX = VortexSpec()


@dataclass(frozen=True, eq=False)
class VortexCase:
    mesh: Mesh
    velocity: np.ndarray
    spec: VortexSpec


def vortex_velocity(points: np.ndarray, spec: VortexSpec = DEFAULT_VORTEX) -> np.ndarray:
    x, y = np.asarray(points, dtype=float).T
    q = spec.flow_rate / (2.0 * np.pi)
    r2 = x**2 + y**2
    return np.column_stack([q * x / r2 - spec.omega * y, q * y / r2 + spec.omega * x])


def vortex_gradient(points: np.ndarray, spec: VortexSpec = DEFAULT_VORTEX) -> np.ndarray:
    """∂u_a/∂x_b at each point, shape (N, 2, 2)."""
    x, y = np.asarray(points, dtype=float).T
    q = spec.flow_rate / (2.0 * np.pi)
    r2 = x**2 + y**2
    r4 = r2**2
    grad = np.empty((len(x), 2, 2))
    grad[:, 0, 0] = q * (r2 - 2.0 * x**2) / r4
    grad[:, 0, 1] = -2.0 * q * x * y / r4 - spec.omega
    grad[:, 1, 0] = -2.0 * q * x * y / r4 + spec.omega
    grad[:, 1, 1] = q * (r2 - 2.0 * y**2) / r4
    return grad


def vortex_mesh(spec: VortexSpec = DEFAULT_VORTEX) -> Mesh:
    """Polar grid with radially graded rings, closed in θ."""
    if spec.r_out <= spec.r_in:
        raise ValueError("outer radius must exceed inner radius")
    nr, nt = spec.nr, spec.ntheta
    radii = spec.r_in * (spec.r_out / spec.r_in) ** np.linspace(0.0, 1.0, nr + 1)
    theta = np.linspace(0.0, 2.0 * np.pi, nt, endpoint=False)
    R, T = np.meshgrid(radii, theta, indexing="ij")
    nodes = np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])

    def node(i, j):
        return i * nt + j % nt

    i, j = np.meshgrid(np.arange(nr), np.arange(nt), indexing="ij")
    i, j = i.ravel(), j.ravel()
    a, b, c, d = node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)
    elements = np.concatenate([np.column_stack([a, b, c]), np.column_stack([a, c, d])])
    facets = [(node(0, k), node(0, k + 1)) for k in range(nt)]
    facets += [(node(nr, k), node(nr, k + 1)) for k in range(nt)]
    markers = ("inlet",) * nt + ("outlet",) * nt
    return Mesh(nodes, elements, np.array(facets), markers)


def build_vortex(spec: VortexSpec = DEFAULT_VORTEX) -> VortexCase:
    mesh = vortex_mesh(spec)
    return VortexCase(mesh=mesh, velocity=vortex_velocity(mesh.nodes, spec), spec=spec)


def write_vortex_case(
    directory: str | Path, spec: VortexSpec = DEFAULT_VORTEX, overrides: dict | None = None
) -> Path:
    """Write mesh/, velocity.csv and config.json for a file-driven run."""
    directory = Path(directory)
    case = build_vortex(spec)
    write_native_mesh(case.mesh, directory / "mesh")
    write_nodal_field(directory / "velocity.csv", case.velocity)
    config = {
        "mesh": {"source": "file", "path": "mesh", "format": "native_csv"},
        "velocity": {"source": "csv", "path": "velocity.csv"},
        "model": {"kind": "powerlaw", "preset": "giersiepen", "viscosity": spec.visc},
        "transform": {"kind": "upper_bound"},
        "dc": {"operator": "cwd_reference", "diffusivity": "dc_quad"},
        "outflow": {"marker": "outlet"},
        "probes": [{"name": "radial", "p0": [spec.r_in, 0.0], "p1": [spec.r_out, 0.0]}],
        "output": {"dir": "results"},
    }
    for key, value in (overrides or {}).items():
        config[key] = value
    path = directory / "config.json"
    try:
        path.write_text(json.dumps(config, indent=2), encoding="utf-8")
    except OSError as e:
        raise InputOutputError(f"cannot write {path}: {e}", module="cases") from e
    return path
