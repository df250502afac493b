"""Boundary families on planar discs used by scenarios and checks.

Node angles are measured about the disc center.  Every constructor declares
an analytic continuity constant for its family.
"""
from __future__ import annotations

import numpy as np

from .convex_core import DirectionGrid, Polytope, Zonotope
from .harmonic import BoundaryMesh
from .interpolation import BoundaryBodyFamily
from .zonoid_random import BoundaryDistributionFamily, DiscreteDistribution

# irregular pentagon: no symmetry, centroid away from the origin
PENTAGON = np.array([[0.0, 0.0], [1.2, -0.1], [1.5, 0.7], [0.6, 1.3], [-0.2, 0.8]])
TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.3, 0.8]])


def node_angles(mesh: BoundaryMesh) -> np.ndarray:
    rel = mesh.nodes - mesh.domain.center
    return np.arctan2(rel[:, 1], rel[:, 0])


def _radius(mesh: BoundaryMesh) -> float:
    return float(mesh.domain.radius)


def _rotation(t: float) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s], [s, c]])


def constant_family(mesh: BoundaryMesh, grid: DirectionGrid, vertices=PENTAGON) -> BoundaryBodyFamily:
    P = Polytope(vertices)
    return BoundaryBodyFamily.from_polytopes(mesh, grid, [P] * mesh.count, lipschitz=0.0)


def homothetic_scale(theta):
    return 2.0 + np.cos(theta)


def homothetic_offset(theta, offset: float = 0.5):
    theta = np.asarray(theta, dtype=float)
    return np.stack([offset * np.sin(theta), np.zeros_like(theta)], axis=-1)


def homothetic_family(mesh: BoundaryMesh, grid: DirectionGrid, vertices=TRIANGLE,
                      offset: float = 0.5) -> BoundaryBodyFamily:
    """``A_theta = (2 + cos theta) S + (offset sin theta, 0)``."""
    theta = node_angles(mesh)
    c, d = homothetic_scale(theta), homothetic_offset(theta, offset)
    S = np.asarray(vertices, dtype=float)
    polys = [Polytope(cj * S + dj) for cj, dj in zip(c, d)]
    lip = (np.abs(S).sum(axis=1).max() + abs(offset)) / _radius(mesh) * 1.01
    return BoundaryBodyFamily.from_polytopes(mesh, grid, polys, lipschitz=lip)


def rotating_segments(mesh: BoundaryMesh, grid: DirectionGrid, length: float = 1.0) -> BoundaryBodyFamily:
    """``A_theta = [0, length (cos theta, sin theta)]``."""
    theta = node_angles(mesh)
    Zs = [Zonotope([0.0, 0.0], [[length * np.cos(t), length * np.sin(t)]]) for t in theta]
    return BoundaryBodyFamily.from_zonotopes(mesh, grid, Zs, lipschitz=1.01 * length / _radius(mesh))


def rotating_rectangles(mesh: BoundaryMesh, grid: DirectionGrid, a: float = 2.0,
                        b: float = 0.5) -> BoundaryBodyFamily:
    """``[-a, a] x [-b, b]`` rotated by the node angle."""
    theta = node_angles(mesh)
    R0 = np.array([[-a, -b], [a, -b], [a, b], [-a, b]])
    polys = [Polytope(R0 @ _rotation(t).T) for t in theta]
    lip = 1.01 * np.hypot(a, b) / _radius(mesh)
    return BoundaryBodyFamily.from_polytopes(mesh, grid, polys, lipschitz=lip)


def random_zonotopes(mesh: BoundaryMesh, grid: DirectionGrid, generators: int = 6,
                     seed: int = 0, modes: int = 2) -> BoundaryBodyFamily:
    """Zonotopes whose generators are random trigonometric polynomials of the node angle."""
    rng = np.random.default_rng(seed)
    theta = node_angles(mesh)
    coef = rng.normal(scale=0.5, size=(generators, 2 * modes + 1, 2))
    base_coef = rng.normal(scale=0.3, size=(2 * modes + 1, 2))

    def trig(t):
        cols = [np.ones_like(t)]
        for k in range(1, modes + 1):
            cols += [np.cos(k * t), np.sin(k * t)]
        return np.stack(cols, axis=-1)

    T = trig(theta)
    G = np.einsum("jc,gcd->jgd", T, coef)
    B = T @ base_coef
    Zs = [Zonotope(B[j], G[j]) for j in range(mesh.count)]
    # |d/dtheta| of each trig coefficient is bounded by k |a_k|
    k = np.concatenate([[0.0], np.repeat(np.arange(1, modes + 1), 2)])
    speed = (np.linalg.norm(coef, axis=2) * k).sum() + (np.linalg.norm(base_coef, axis=1) * k).sum()
    return BoundaryBodyFamily.from_zonotopes(mesh, grid, Zs, lipschitz=1.01 * speed / _radius(mesh))


def rotating_atom_family(mesh: BoundaryMesh) -> BoundaryDistributionFamily:
    """``delta_{u(theta)}`` with ``u`` the unit vector at the node angle."""
    theta = node_angles(mesh)
    dists = [DiscreteDistribution([[np.cos(t), np.sin(t)]], [1.0]) for t in theta]
    # TV between distinct point masses is 1
    spacing = np.linalg.norm(mesh.nodes[1] - mesh.nodes[0])
    return BoundaryDistributionFamily(mesh, dists, lipschitz=1.01 / spacing)


BASE_LAW = DiscreteDistribution([[1.0, 0.0], [0.2, 1.0], [-0.6, 0.5]], [0.5, 0.3, 0.2])


def scaled_family(mesh: BoundaryMesh, base: DiscreteDistribution = BASE_LAW) -> BoundaryDistributionFamily:
    """``Y_theta = (2 + cos theta) Y_0``."""
    theta = node_angles(mesh)
    dists = [base.scaled(c) for c in homothetic_scale(theta)]
    spacing = np.linalg.norm(mesh.nodes[1] - mesh.nodes[0])
    return BoundaryDistributionFamily(mesh, dists, lipschitz=1.01 / spacing)


BODY_FAMILIES = {
    "constant": constant_family,
    "homothetic": homothetic_family,
    "rotating_segments": rotating_segments,
    "rotating_rectangles": rotating_rectangles,
    "random_zonotopes": random_zonotopes,
}

DISTRIBUTION_FAMILIES = {
    "rotating_atom": rotating_atom_family,
    "scaled": scaled_family,
}
