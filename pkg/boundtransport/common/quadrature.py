"""Reference simplices, P1 shape functions and symmetric quadrature rules.

Coordinates are given on the standard unit simplex (vertex 0 at the origin,
vertex i at the i-th unit vector). Weights are fractions of the element
measure and sum to one.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SQRT3 = np.sqrt(3.0)
SQRT5 = np.sqrt(5.0)

# Columns map standard-simplex coordinates onto the unit-edge symmetric simplex
SYMMETRIC_SIMPLEX: dict[int, np.ndarray] = {
    2: np.array(
        [
            [1.0, 0.5],
            [0.0, SQRT3 / 2.0],
        ]
    ),
    3: np.array(
        [
            [1.0, 0.5, 0.5],
            [0.0, SQRT3 / 2.0, SQRT3 / 6.0],
            [0.0, 0.0, np.sqrt(2.0 / 3.0)],
        ]
    ),
}


@dataclass(frozen=True)
class QuadratureRule:
    """Points in standard-simplex coordinates with volume-fraction weights."""

    points: np.ndarray
    weights: np.ndarray
    degree: int

    @property
    def shape_values(self) -> np.ndarray:
        """P1 shape functions at the points, shape (n_points, d + 1)."""
        return p1_values(self.points)


def p1_values(xi: np.ndarray) -> np.ndarray:
    xi = np.atleast_2d(xi)
    return np.hstack([1.0 - xi.sum(axis=1, keepdims=True), xi])


def p1_reference_gradients(dim: int) -> np.ndarray:
    """Gradients of the P1 shape functions in standard coordinates, (d + 1, d)."""
    return np.vstack([-np.ones((1, dim)), np.eye(dim)])


def _from_barycentric(bary: list[tuple[float, ...]]) -> np.ndarray:
    return np.array([b[1:] for b in bary])


@lru_cache
def element_rule(dim: int, degree: int = 2) -> QuadratureRule:
    """Symmetric interior rule exact to at least ``degree`` on a simplex."""
    if dim == 2 and degree <= 2:
        s, t = 1.0 / 6.0, 2.0 / 3.0
        bary = [(t, s, s), (s, t, s), (s, s, t)]
        return QuadratureRule(_from_barycentric(bary), np.full(3, 1.0 / 3.0), 2)
    if dim == 2 and degree <= 4:
        a1, w1 = 0.445948490915965, 0.223381589678011
        a2, w2 = 0.091576213509771, 0.109951743655322
        bary = []
        weights = []
        for a, w in ((a1, w1), (a2, w2)):
            b = 1.0 - 2.0 * a
            bary += [(b, a, a), (a, b, a), (a, a, b)]
            weights += [w, w, w]
        weights = np.array(weights)
        return QuadratureRule(_from_barycentric(bary), weights / weights.sum(), 4)
    if dim == 3 and degree <= 2:
        a, b = (5.0 + 3.0 * SQRT5) / 20.0, (5.0 - SQRT5) / 20.0
        bary = [(a, b, b, b), (b, a, b, b), (b, b, a, b), (b, b, b, a)]
        return QuadratureRule(_from_barycentric(bary), np.full(4, 0.25), 2)
    if dim == 3 and degree <= 3:
        h, s = 0.5, 1.0 / 6.0
        bary = [
            (0.25, 0.25, 0.25, 0.25),
            (h, s, s, s),
            (s, h, s, s),
            (s, s, h, s),
            (s, s, s, h),
        ]
        weights = np.array([-0.8, 0.45, 0.45, 0.45, 0.45])
        return QuadratureRule(_from_barycentric(bary), weights, 3)
    raise ValueError(f"no quadrature rule of degree {degree} in {dim}D")


@lru_cache
def facet_rule(dim: int) -> QuadratureRule:
    """Rule on a boundary facet of a ``dim``-dimensional mesh, exact to degree 2."""
    if dim == 2:
        g = 0.5 / SQRT3
        return QuadratureRule(
            np.array([[0.5 - g], [0.5 + g]]), np.array([0.5, 0.5]), 3
        )
    if dim == 3:
        return element_rule(2, 2)
    raise ValueError(f"unsupported dimension {dim}")
