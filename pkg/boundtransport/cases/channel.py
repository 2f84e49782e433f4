"""Channel verification case with an analytic streamline solution.

The velocity is u_x(y) = u_max − b(y₀ − y)² below the layer edge y₀ and
u_max above it, so material is sheared only in the lower layer and the
linearized index grows along each streamline as 1 − exp(−r(y)·x/u(y)).
"""

import math
from dataclasses import dataclass

import numpy as np

from boundtransport.common.constants import TransformKind
from boundtransport.fem.mesh import Mesh
from boundtransport.physics.models import ReactionCoefficients, powerlaw_coefficients
from boundtransport.physics.xform import to_physical
from boundtransport.schemas.physics.cases import ChannelSpec
from boundtransport.schemas.physics.params import Transform

DEFAULT_CHANNEL = ChannelSpec()


@dataclass(frozen=True, eq=False)
class ChannelCase:
    mesh: Mesh
    velocity: np.ndarray
    reaction: ReactionCoefficients
    sigma_s: np.ndarray
    spec: ChannelSpec


def channel_velocity(y, spec: ChannelSpec = DEFAULT_CHANNEL):
    y = np.asarray(y, dtype=float)
    gap = np.maximum(spec.layer_top - y, 0.0)
    u = spec.u_max - spec.profile_coeff * gap**2
    return u if u.ndim else float(u)


def channel_shear_stress(y, spec: ChannelSpec = DEFAULT_CHANNEL):
    """σ_s = μ|du/dy|, zero above the layer."""
    y = np.asarray(y, dtype=float)
    gap = np.maximum(spec.layer_top - y, 0.0)
    sigma = spec.visc * 2.0 * spec.profile_coeff * gap
    return sigma if sigma.ndim else float(sigma)


def channel_analytic(x, y, spec: ChannelSpec = DEFAULT_CHANNEL):
    """Linearized index l_IH along the streamline through (x, y)."""
    x = np.asarray(x, dtype=float)
    rate = np.asarray(powerlaw_coefficients(channel_shear_stress(y, spec), spec.powerlaw).mu_r)
    exponent = rate * x / channel_velocity(y, spec)
    l_ih = to_physical(Transform(kind=TransformKind.UPPER_BOUND, nu=1.0, k=1.0), exponent)
    return l_ih


PLASTIC = 1.32471795724474602596


def channel_rows(spec: ChannelSpec = DEFAULT_CHANNEL) -> np.ndarray:
    """Row heights clustered toward layer_top, with one row exactly on it."""
    ny, top, H, p = spec.ny, spec.layer_top, spec.height, spec.grading
    nl = min(max(int(math.floor(ny * top / H + 0.5)), 1), ny - 1)
    j = np.arange(ny + 1, dtype=float)
    below = top * (1.0 - np.clip(1.0 - j / nl, 0.0, None) ** p)
    t = np.clip((j - nl) / (ny - nl), 0.0, None)
    above = top + (H - top) * t**p
    ys = np.where(j <= nl, below, above)
    ys[nl] = top
    return ys


def channel_mesh(spec: ChannelSpec = DEFAULT_CHANNEL) -> Mesh:
    """Rectangle of graded rows, every cell split along its rising diagonal.

    Interior nodes get a quasi-random shift: in x everywhere, in y only
    inside ``jitter_band`` of layer_top. The row on layer_top stays put so
    the velocity kink remains an element edge.
    """
    nx, ny = spec.nx, spec.ny
    xs = np.linspace(0.0, spec.length, nx + 1)
    ys = channel_rows(spec)
    X, Y = np.meshgrid(xs, ys, indexing="ij")

    if spec.jitter > 0.0:
        k = np.arange(X.size, dtype=float).reshape(X.shape)
        rx = np.mod(spec.jitter_phase + k / PLASTIC, 1.0) - 0.5
        ry = np.mod(spec.jitter_phase + k / (PLASTIC * PLASTIC), 1.0) - 0.5
        inner = np.zeros(X.shape, dtype=bool)
        inner[1:-1, 1:-1] = True
        X = np.where(inner, X + spec.jitter * (spec.length / nx) * rx, X)
        spacing = np.zeros(ny + 1)
        spacing[1:-1] = 0.5 * (ys[2:] - ys[:-2])
        near = (np.abs(ys - spec.layer_top) < spec.jitter_band) & (ys != spec.layer_top)
        Y = np.where(inner & near[None, :], Y + spec.jitter * spacing[None, :] * ry, Y)
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    def node(i, j):
        return i * (ny + 1) + j

    i, j = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    i, j = i.ravel(), j.ravel()
    n00, n10, n01, n11 = node(i, j), node(i + 1, j), node(i, j + 1), node(i + 1, j + 1)
    elements = np.concatenate(
        [np.column_stack([n00, n10, n11]), np.column_stack([n00, n11, n01])]
    )

    facets, markers = [], []
    for k in range(ny):
        facets.append((node(0, k), node(0, k + 1)))
        markers.append("inlet")
        facets.append((node(nx, k), node(nx, k + 1)))
        markers.append("outlet")
    for k in range(nx):
        facets.append((node(k, 0), node(k + 1, 0)))
        markers.append("bottom")
        facets.append((node(k, ny), node(k + 1, ny)))
        markers.append("top")
    return Mesh(nodes, elements, np.array(facets), tuple(markers))


def build_channel(spec: ChannelSpec = DEFAULT_CHANNEL) -> ChannelCase:
    mesh = channel_mesh(spec)
    y = mesh.nodes[:, 1]
    velocity = np.column_stack([channel_velocity(y, spec), np.zeros_like(y)])
    sigma_s = np.asarray(channel_shear_stress(y, spec))
    return ChannelCase(
        mesh=mesh,
        velocity=velocity,
        reaction=powerlaw_coefficients(sigma_s, spec.powerlaw),
        sigma_s=sigma_s,
        spec=spec,
    )
