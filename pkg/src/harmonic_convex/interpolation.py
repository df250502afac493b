"""Minkowski integrals and harmonic interpolation of boundary body families.

Also hosts the numerical checks that go with harmonic interpolation: the
mean-value deficit of the root volume, body-level subharmonicity and the
homothety test for the harmonic (equality) case.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .convex_core import (
    ATOL,
    DirectionGrid,
    Polytope,
    SupportBody,
    Zonotope,
    body_from_support,
    centroid_polytope,
    support_of_polytope,
    support_volumes,
    volume_polytope,
    volume_zonotope,
)
from .harmonic import (
    BoundaryMesh,
    Domain,
    HarmonicMeasure,
    harmonic_measure,
    measure_matrix,
    sphere_points,
)

__all__ = [
    "BoundaryBodyFamily",
    "HomothetyFit",
    "SubharmonicReport",
    "SuperharmonicityReport",
    "EqualityReport",
    "minkowski_integral",
    "zonotope_integral",
    "harmonic_interpolation",
    "interpolated_family",
    "convex_interpolation_fiber",
    "subharmonic_check",
    "superharmonicity_report",
    "homothety_fit",
    "equality_case_check",
]


@dataclass(frozen=True, eq=False)
class BoundaryBodyFamily:
    """One convex body per boundary node, sampled on a common direction grid.

    ``values[j]`` holds the support samples of the body at node ``j``.
    ``lipschitz`` is the declared continuity constant: adjacent nodes must
    satisfy ``|h_i - h_j| <= lipschitz * |tau_i - tau_j|`` in every direction.
    """

    mesh: BoundaryMesh
    grid: DirectionGrid
    values: np.ndarray
    lipschitz: float
    zonotopes: Optional[tuple] = None
    vertex_sets: Optional[tuple] = None

    def __post_init__(self):
        H = np.asarray(self.values, dtype=float)
        if H.shape != (self.mesh.count, self.grid.count):
            raise ValueError(f"values must have shape {(self.mesh.count, self.grid.count)}")
        if not np.all(np.isfinite(H)):
            raise ValueError("support values must be finite")
        H.flags.writeable = False
        object.__setattr__(self, "values", H)
        for name in ("zonotopes", "vertex_sets"):
            extra = getattr(self, name)
            if extra is not None:
                if len(extra) != self.mesh.count:
                    raise ValueError(f"{name} needs one entry per node")
                object.__setattr__(self, name, tuple(extra))
        self._check_continuity()

    def _check_continuity(self):
        if self.mesh.domain.m == 1:
            return
        pairs = self.mesh.neighbours()
        gap = np.abs(self.values[pairs[:, 0]] - self.values[pairs[:, 1]]).max(axis=1)
        spacing = np.linalg.norm(self.mesh.nodes[pairs[:, 0]] - self.mesh.nodes[pairs[:, 1]], axis=1)
        bad = gap > self.lipschitz * spacing + 1e-12
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise ValueError(
                f"family violates declared continuity L={self.lipschitz} between nodes "
                f"{pairs[i, 0]} and {pairs[i, 1]} (ratio {gap[i] / spacing[i]:.6g})")

    @property
    def dim(self) -> int:
        return self.grid.dim

    def body(self, j: int) -> SupportBody:
        return SupportBody(self.grid, self.values[j])

    @classmethod
    def from_supports(cls, mesh, bodies: Sequence[SupportBody], lipschitz: float):
        grid = bodies[0].grid
        if any(b.grid != grid for b in bodies):
            raise ValueError("all bodies must share one grid")
        return cls(mesh, grid, np.vstack([b.values for b in bodies]), lipschitz)

    @classmethod
    def from_zonotopes(cls, mesh, grid, zonotopes: Sequence[Zonotope], lipschitz: float):
        H = np.vstack([Z.support(grid.directions) for Z in zonotopes])
        return cls(mesh, grid, H, lipschitz, zonotopes=tuple(zonotopes))

    @classmethod
    def from_polytopes(cls, mesh, grid, polytopes: Sequence[Polytope], lipschitz: float):
        H = np.vstack([support_of_polytope(P, grid).values for P in polytopes])
        return cls(mesh, grid, H, lipschitz, vertex_sets=tuple(P.vertices for P in polytopes))

    def transformed(self, T, shift=None) -> "BoundaryBodyFamily":
        """Image of every body under ``x -> T x + shift`` (needs zonotopes or vertex sets)."""
        T = np.asarray(T, dtype=float)
        shift = np.zeros(self.dim) if shift is None else np.asarray(shift, dtype=float)
        lip = self.lipschitz * np.linalg.norm(T, 2) + 0.0
        if self.zonotopes is not None:
            Zs = [Zonotope(T @ Z.base + shift, Z.generators @ T.T) for Z in self.zonotopes]
            return BoundaryBodyFamily.from_zonotopes(self.mesh, self.grid, Zs, lip)
        if self.vertex_sets is not None:
            Ps = [Polytope(V @ T.T + shift) for V in self.vertex_sets]
            return BoundaryBodyFamily.from_polytopes(self.mesh, self.grid, Ps, lip)
        raise ValueError("family carries support samples only; cannot transform exactly")


def _check_mesh(F: BoundaryBodyFamily, mu: HarmonicMeasure):
    if mu.mesh is not F.mesh:
        raise ValueError("measure and family live on different meshes")


def minkowski_integral(F: BoundaryBodyFamily, mu: HarmonicMeasure) -> SupportBody:
    """Body whose support is ``sum_j mu_j h_{A_j}``."""
    _check_mesh(F, mu)
    return SupportBody(F.grid, mu.weights @ F.values)


def zonotope_integral(F: BoundaryBodyFamily, mu: HarmonicMeasure) -> Zonotope:
    """Exact zonotope for the Minkowski integral of a zonotope family.

    Nodes with zero weight contribute nothing and are skipped.
    """
    _check_mesh(F, mu)
    if F.zonotopes is None:
        raise ValueError("family carries no zonotope representation")
    w = mu.weights
    base = sum(wj * Z.base for wj, Z in zip(w, F.zonotopes))
    gens = [wj * Z.generators for wj, Z in zip(w, F.zonotopes) if wj > 0]
    gens = np.vstack(gens) if gens else np.zeros((0, F.dim))
    return Zonotope(base, gens)


def harmonic_interpolation(F: BoundaryBodyFamily, D: Domain, x, **wos) -> SupportBody:
    """``A_x``: Minkowski integral of the boundary family against harmonic measure at ``x``."""
    return minkowski_integral(F, harmonic_measure(D, x, F.mesh, **wos))


def interpolated_family(F: BoundaryBodyFamily, D: Domain, **wos) -> Callable[[np.ndarray], SupportBody]:
    return lambda x: harmonic_interpolation(F, D, x, **wos)


def convex_interpolation_fiber(F: BoundaryBodyFamily, D: Domain, x) -> SupportBody:
    """Fiber over ``x`` of conv(∪_j A_j × {tau_j}), one LP per grid direction."""
    if not D.convex:
        raise ValueError("convex interpolation needs a convex parameter domain")
    if F.dim + D.m > 5:
        raise ValueError("convex interpolation is limited to n + m <= 5")
    if F.vertex_sets is not None:
        vsets = F.vertex_sets
    elif F.zonotopes is not None:
        vsets = [Z.corner_points() for Z in F.zonotopes]
    else:
        raise ValueError("convex interpolation needs vertex-sampled bodies")
    x = np.asarray(x, dtype=float).reshape(D.m)
    Zp = np.vstack(vsets)
    Q = np.vstack([np.repeat(F.mesh.nodes[j][None, :], len(V), axis=0) for j, V in enumerate(vsets)])
    A_eq = np.vstack([np.ones(len(Zp)), Q.T])
    b_eq = np.concatenate([[1.0], x])
    out = np.empty(F.grid.count)
    for k, xi in enumerate(F.grid.directions):
        res = linprog(-(Zp @ xi), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
        if res.status != 0:
            raise ValueError(f"convex interpolation LP failed at x={x}: {res.message}")
        out[k] = -res.fun
    return SupportBody(F.grid, out)


# ---------------------------------------------------------------------------
# checks


@dataclass
class SubharmonicReport:
    max_violation: float
    sphere_average: SupportBody

    @property
    def subharmonic(self) -> bool:
        return self.max_violation <= ATOL


def subharmonic_check(family_at: Callable, x, eps: float, K: int,
                      domain: Optional[Domain] = None) -> SubharmonicReport:
    """Largest amount by which the sphere average of the family escapes ``A_x``.

    ``max_violation <= 0`` (up to tolerance) is the containment
    ``A_x ⊇ avg_{|y-x|=eps} A_y``.
    """
    x = np.asarray(x, dtype=float)
    if domain is not None and not domain.contains_ball(x, eps):
        raise ValueError("ball B_eps(x) leaves the domain")
    Ax = family_at(x)
    ring = [family_at(y) for y in sphere_points(x, eps, K)]
    avg = np.mean(np.vstack([b.values for b in ring]), axis=0)
    V = SupportBody(Ax.grid, avg)
    return SubharmonicReport(float(np.max(V.values - Ax.values)), V)


@dataclass
class SuperharmonicityReport:
    """Per-point root-volume mean-value deficits."""

    points: np.ndarray
    volume: np.ndarray
    root_volume: np.ndarray
    sphere_mean: np.ndarray
    deficit: np.ndarray
    resolution: dict = field(default_factory=dict)

    @property
    def min_deficit(self) -> float:
        return float(self.deficit.min())

    @property
    def max_abs_deficit(self) -> float:
        return float(np.abs(self.deficit).max())


def _check_points(D: Domain, points: np.ndarray, eps: float):
    for p in points:
        if not D.contains_ball(p, eps):
            raise ValueError(f"ball of radius {eps} about {p} leaves the domain")


def _interp_volumes(F: BoundaryBodyFamily, W: np.ndarray, route: str) -> np.ndarray:
    if route == "support":
        return support_volumes(F.grid, W @ F.values)
    if route == "zonotope":
        mesh = F.mesh
        return np.array([volume_zonotope(zonotope_integral(F, HarmonicMeasure(mesh, w))) for w in W])
    raise ValueError(f"unknown volume route {route!r}")


def superharmonicity_report(F: BoundaryBodyFamily, D: Domain, points, eps: float, K: int,
                            route: str = "support", **wos) -> SuperharmonicityReport:
    """Mean-value deficit of x -> |A_x|^(1/n) on spheres of radius ``eps``.

    ``deficit(x) = |A_x|^(1/n) - mean_k |A_{y_k}|^(1/n)``; superharmonicity
    predicts ``deficit >= 0``.  ``route="zonotope"`` uses exact zonotope
    volumes instead of grid reconstruction.
    """
    if D is not F.mesh.domain:
        raise ValueError("domain does not match the family's mesh")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    _check_points(D, points, eps)
    n = F.dim
    Y = np.vstack([sphere_points(p, eps, K) for p in points])
    Kp = Y.shape[0] // points.shape[0]
    W = measure_matrix(D, np.vstack([points, Y]), F.mesh, **wos)
    vols = _interp_volumes(F, W, route)
    roots = np.maximum(vols, 0.0) ** (1.0 / n)
    P = points.shape[0]
    ring = roots[P:].reshape(P, Kp).mean(axis=1)
    return SuperharmonicityReport(points, vols[:P], roots[:P], ring, roots[:P] - ring,
                                  {"grid": F.grid.count, "mesh": F.mesh.count, "K": K, "eps": eps})


@dataclass
class HomothetyFit:
    """Fit of bodies as ``c_i B + d_i`` with ``|B| = 1`` and centroid of B at 0."""

    reference_body: SupportBody
    reference_index: int
    c: np.ndarray
    d: np.ndarray
    point_residual: np.ndarray

    @property
    def residual(self) -> float:
        return float(self.point_residual.max())


def homothety_fit(bodies: Sequence[SupportBody]) -> HomothetyFit:
    """Least-squares homothety fit of every body against a normalised reference.

    The reference is the first body, or the body of largest volume when the
    first one is degenerate.
    """
    if len(bodies) < 2:
        raise ValueError("need at least two bodies")
    grid = bodies[0].grid
    n = grid.dim
    H = np.vstack([b.values for b in bodies])
    ref = 0
    P = body_from_support(bodies[0])
    vol = volume_polytope(P)
    if vol <= 1e-12:
        vols = support_volumes(grid, H)
        ref = int(np.argmax(vols))
        P = body_from_support(bodies[ref])
        vol = volume_polytope(P)
        if vol <= 1e-12:
            raise ValueError("degenerate reference body (volume 0)")
    cen = centroid_polytope(P)
    hB = (bodies[ref].values - grid.directions @ cen) / vol ** (1.0 / n)
    B = SupportBody(grid, hB)
    design = np.column_stack([hB, grid.directions])
    coef, *_ = np.linalg.lstsq(design, H.T, rcond=None)
    resid = np.abs(design @ coef - H.T).max(axis=0)
    return HomothetyFit(B, ref, coef[0], coef[1:].T, resid)


@dataclass
class EqualityReport:
    points: np.ndarray
    deficit: np.ndarray
    fit: HomothetyFit
    c: np.ndarray
    d: np.ndarray
    c_extension: np.ndarray
    d_extension: np.ndarray
    fit_residual: np.ndarray
    superharmonicity: SuperharmonicityReport

    @property
    def defect(self) -> float:
        """Largest |mean-value deviation| of the root volume."""
        return float(np.abs(self.deficit).max())

    @property
    def residual(self) -> float:
        return self.fit.residual

    @property
    def c_mismatch(self) -> float:
        return float(np.abs(self.c - self.c_extension).max())

    @property
    def d_mismatch(self) -> float:
        return float(np.abs(self.d - self.d_extension).max())


def equality_case_check(F: BoundaryBodyFamily, D: Domain, points, eps: float = 0.1,
                        K: int = 64, **wos) -> EqualityReport:
    """Harmonicity defect of the root volume alongside a common homothety fit.

    Interior bodies and boundary bodies are fitted against one reference
    body, so the interior scale and offset can be compared with the harmonic
    extension of their boundary counterparts.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    rep = superharmonicity_report(F, D, points, eps, K, **wos)
    W = measure_matrix(D, points, F.mesh, **wos)
    Hx = W @ F.values
    bodies = [SupportBody(F.grid, h) for h in Hx] + [F.body(j) for j in range(F.mesh.count)]
    fit = homothety_fit(bodies)
    P = points.shape[0]
    c_in, c_bd = fit.c[:P], fit.c[P:]
    d_in, d_bd = fit.d[:P], fit.d[P:]
    return EqualityReport(points, rep.deficit, fit, c_in, d_in, W @ c_bd, W @ d_bd,
                          fit.point_residual[:P], rep)
