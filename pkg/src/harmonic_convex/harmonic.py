"""Harmonic measure on bounded domains.

Measures live on a fixed boundary mesh as node weights, so integrals against
harmonic measure become finite weighted sums.  Balls get the closed-form
Poisson kernel; other domains are sampled by walk-on-spheres.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    "Domain",
    "BoundaryMesh",
    "HarmonicMeasure",
    "ball",
    "ellipse",
    "make_boundary_mesh",
    "sphere_points",
    "polar_grid",
    "poisson_weights",
    "poisson_matrix",
    "wos_measure",
    "harmonic_measure",
    "measure_matrix",
    "mean_value_residual",
    "harmonic_extension",
    "total_variation",
    "tv_sampling_bound",
    "domain_to_json",
    "domain_from_json",
    "write_measure_csv",
]

WOS_BLOCK = 4096
WOS_STEP_BUDGET = 10**6


@dataclass(frozen=True, eq=False)
class Domain:
    """A bounded domain in R^m.

    ``kind`` is ``"ball"`` (``center``, ``radius``) or ``"general"``, in which
    case ``sdf`` maps an (N, m) array to signed distances (negative inside) and
    ``boundary`` maps parameters t in [0, 1) to boundary points.
    """

    m: int
    kind: str
    center: Optional[np.ndarray] = None
    radius: Optional[float] = None
    sdf: Optional[Callable[[np.ndarray], np.ndarray]] = None
    boundary: Optional[Callable[[np.ndarray], np.ndarray]] = None
    diameter: Optional[float] = None
    convex: bool = False

    def __post_init__(self):
        if self.kind == "ball":
            if self.radius is None or self.radius <= 0:
                raise ValueError("ball radius must be positive")
            if self.m not in (1, 2, 3):
                raise ValueError("balls are supported for m in {1, 2, 3}")
            c = np.asarray(self.center, dtype=float).reshape(self.m)
            object.__setattr__(self, "center", c)
            object.__setattr__(self, "diameter", 2.0 * float(self.radius))
            object.__setattr__(self, "convex", True)
        elif self.kind == "general":
            if self.m != 2:
                raise ValueError("general domains are supported for m = 2")
            if self.sdf is None or self.boundary is None or self.diameter is None:
                raise ValueError("general domains need sdf, boundary and diameter")
            t = np.linspace(0.0, 1.0, 64, endpoint=False)
            if np.max(np.abs(self.sdf(self.boundary(t)))) > 1e-6:
                raise ValueError("signed distance does not vanish on the boundary")
        else:
            raise ValueError(f"unknown domain kind {self.kind!r}")

    def signed_distance(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.kind == "ball":
            return np.linalg.norm(X - self.center, axis=1) - self.radius
        return np.asarray(self.sdf(X), dtype=float)

    def contains_ball(self, x, eps: float) -> bool:
        """Closed ball B_eps(x) inside the open domain."""
        return bool(-self.signed_distance(x)[0] > eps)


def ball(center, radius: float) -> Domain:
    center = np.atleast_1d(np.asarray(center, dtype=float))
    return Domain(m=center.shape[0], kind="ball", center=center, radius=float(radius))


def ellipse(a: float, b: float, center=(0.0, 0.0)) -> Domain:
    """Ellipse with semi-axes ``a`` (x) and ``b`` (y) as a general domain."""
    c = np.asarray(center, dtype=float)

    def boundary(t):
        t = np.asarray(t, dtype=float)
        return c + np.column_stack([a * np.cos(2 * np.pi * t), b * np.sin(2 * np.pi * t)])

    def sdf(X):
        P = np.atleast_2d(X) - c
        px, py = np.abs(P[:, 0]), np.abs(P[:, 1])
        # fixed-point iteration for the nearest point on the first-quadrant arc
        tx = np.full_like(px, math.sqrt(0.5))
        ty = np.full_like(py, math.sqrt(0.5))
        for _ in range(8):
            x, y = a * tx, b * ty
            ex = (a * a - b * b) * tx**3 / a
            ey = (b * b - a * a) * ty**3 / b
            rx, ry = x - ex, y - ey
            qx, qy = px - ex, py - ey
            r = np.hypot(rx, ry)
            q = np.maximum(np.hypot(qx, qy), 1e-300)
            tx = np.clip((qx * r / q + ex) / a, 0.0, 1.0)
            ty = np.clip((qy * r / q + ey) / b, 0.0, 1.0)
            t = np.maximum(np.hypot(tx, ty), 1e-300)
            tx, ty = tx / t, ty / t
        d = np.hypot(px - a * tx, py - b * ty)
        inside = (px / a) ** 2 + (py / b) ** 2 < 1.0
        return np.where(inside, -d, d)

    return Domain(m=2, kind="general", sdf=sdf, boundary=boundary,
                  diameter=2.0 * max(a, b), convex=True)


@dataclass(frozen=True, eq=False)
class BoundaryMesh:
    """Boundary nodes with the normalized surface measure as arc weights."""

    domain: Domain
    nodes: np.ndarray
    arc_weights: np.ndarray

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        w = np.asarray(self.arc_weights, dtype=float)
        if nodes.shape[0] != w.shape[0] or nodes.shape[1] != self.domain.m:
            raise ValueError("mesh nodes and weights are inconsistent")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("arc weights must be nonnegative and sum to 1")
        nodes.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "arc_weights", w)

    def __len__(self):
        return self.nodes.shape[0]

    @property
    def count(self) -> int:
        return self.nodes.shape[0]

    def neighbours(self) -> np.ndarray:
        """Index pairs of adjacent nodes (cyclic in the plane, nearest neighbour otherwise)."""
        J = self.count
        if self.domain.m == 2:
            i = np.arange(J)
            return np.column_stack([i, (i + 1) % J])
        if self.domain.m == 1:
            return np.array([[0, 1]])
        _, idx = cKDTree(self.nodes).query(self.nodes, k=2)
        return np.column_stack([np.arange(J), idx[:, 1]])


def _fibonacci_sphere(count: int) -> np.ndarray:
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    r = np.sqrt(1.0 - z * z)
    phi = np.pi * (3.0 - math.sqrt(5.0)) * np.arange(count)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def make_boundary_mesh(D: Domain, count: int) -> BoundaryMesh:
    if D.kind == "ball":
        if D.m == 1:
            nodes = D.center + D.radius * np.array([[-1.0], [1.0]])
            return BoundaryMesh(D, nodes, np.array([0.5, 0.5]))
        if count < 3:
            raise ValueError("mesh needs at least 3 nodes")
        if D.m == 2:
            ang = 2.0 * np.pi * np.arange(count) / count
            unit = np.column_stack([np.cos(ang), np.sin(ang)])
        else:
            unit = _fibonacci_sphere(count)
        return BoundaryMesh(D, D.center + D.radius * unit, np.full(count, 1.0 / count))
    t = np.arange(count) / count
    nodes = D.boundary(t)
    dt = 1e-6
    speed = np.linalg.norm(D.boundary(t + dt) - D.boundary(t - dt), axis=1) / (2 * dt)
    return BoundaryMesh(D, nodes, speed / speed.sum())


def sphere_points(x, eps: float, K: int) -> np.ndarray:
    """``K`` equal-weight quadrature nodes on the sphere of radius ``eps`` about ``x``."""
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    if m == 1:
        return x + eps * np.array([[-1.0], [1.0]])
    if m == 2:
        ang = 2.0 * np.pi * np.arange(K) / K
        return x + eps * np.column_stack([np.cos(ang), np.sin(ang)])
    return x + eps * _fibonacci_sphere(K)


def polar_grid(D: Domain, rings: int, per_ring: int, eps: float, fill: float = 0.9) -> np.ndarray:
    """Interior points on concentric rings of a planar ball, all at depth > ``eps``."""
    if D.kind != "ball" or D.m != 2:
        raise ValueError("polar grids are defined on planar balls")
    rmax = fill * (D.radius - eps)
    pts = []
    for i in range(1, rings + 1):
        r = rmax * i / rings
        ang = 2.0 * np.pi * (np.arange(per_ring) + 0.5 * (i % 2)) / per_ring
        pts.append(D.center + r * np.column_stack([np.cos(ang), np.sin(ang)]))
    return np.vstack(pts)


@dataclass(frozen=True, eq=False)
class HarmonicMeasure:
    mesh: BoundaryMesh
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.mesh.count,):
            raise ValueError("one weight per mesh node required")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
            raise ValueError("harmonic measure weights must be a probability vector")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)


def poisson_matrix(D: Domain, X, M: BoundaryMesh) -> np.ndarray:
    """Rows of Poisson-kernel node weights for each interior point in ``X``."""
    if D.kind != "ball":
        raise ValueError("closed-form kernel is available for balls only")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    r2 = D.radius**2 - np.sum((X - D.center) ** 2, axis=1)
    if np.any(r2 <= 0):
        raise ValueError("point is on or outside the boundary")
    dist = np.linalg.norm(X[:, None, :] - M.nodes[None, :, :], axis=2)
    W = M.arc_weights * r2[:, None] / dist**D.m
    return W / W.sum(axis=1, keepdims=True)


def poisson_weights(D: Domain, x, M: BoundaryMesh) -> HarmonicMeasure:
    return HarmonicMeasure(M, poisson_matrix(D, x, M)[0])


def _uniform_directions(rng: np.random.Generator, k: int, m: int) -> np.ndarray:
    if m == 2:
        a = rng.uniform(0.0, 2.0 * np.pi, k)
        return np.column_stack([np.cos(a), np.sin(a)])
    if m == 1:
        return np.where(rng.uniform(size=k) < 0.5, -1.0, 1.0)[:, None]
    g = rng.standard_normal((k, m))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def wos_measure(D: Domain, x, M: BoundaryMesh, trials: int, shell: Optional[float] = None,
                seed: int = 0, step_budget: int = WOS_STEP_BUDGET) -> HarmonicMeasure:
    """Empirical exit distribution of walk-on-spheres started at ``x``.

    Trials are processed in fixed blocks of ``WOS_BLOCK``; block ``b`` draws
    from its own Philox stream keyed by ``(seed, b)``, so the result depends
    only on ``(seed, trials, shell)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    x = np.asarray(x, dtype=float).reshape(D.m)
    if D.signed_distance(x)[0] >= 0:
        raise ValueError("start point must be interior")
    if shell is None:
        shell = 1e-4 * D.diameter
    if shell <= 0:
        raise ValueError("shell must be positive")
    tree = cKDTree(M.nodes)
    counts = np.zeros(M.count, dtype=np.int64)
    for b, start in enumerate(range(0, trials, WOS_BLOCK)):
        k = min(WOS_BLOCK, trials - start)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, b])))
        P = np.tile(x, (k, 1))
        active = np.arange(k)
        steps = 0
        while active.size:
            d = -D.signed_distance(P[active])
            done = d < shell
            active = active[~done]
            d = d[~done]
            if not active.size:
                break
            steps += 1
            if steps > step_budget:
                raise RuntimeError(f"walk-on-spheres trial {start + int(active[0])} "
                                   f"exceeded {step_budget} steps")
            P[active] += d[:, None] * _uniform_directions(rng, active.size, D.m)
        if D.kind == "ball":
            R = P - D.center
            P = D.center + D.radius * R / np.linalg.norm(R, axis=1, keepdims=True)
        _, idx = tree.query(P)
        counts += np.bincount(idx, minlength=M.count)
    return HarmonicMeasure(M, counts / counts.sum())


def harmonic_measure(D: Domain, x, M: BoundaryMesh, *, trials: Optional[int] = None,
                     seed: Optional[int] = None, shell: Optional[float] = None) -> HarmonicMeasure:
    """Closed form on balls, walk-on-spheres elsewhere."""
    if D.kind == "ball":
        return poisson_weights(D, x, M)
    if trials is None or seed is None:
        raise ValueError("walk-on-spheres needs trials and seed")
    return wos_measure(D, x, M, trials=trials, shell=shell, seed=seed)


def measure_matrix(D: Domain, X, M: BoundaryMesh, *, trials: Optional[int] = None,
                   seed: Optional[int] = None, shell: Optional[float] = None) -> np.ndarray:
    """Stacked harmonic-measure weights for the points in ``X``.

    Walk-on-spheres rows use independent seeds derived from ``(seed, row)``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if D.kind == "ball":
        return poisson_matrix(D, X, M)
    if trials is None or seed is None:
        raise ValueError("walk-on-spheres needs trials and seed")
    return np.vstack([wos_measure(D, x, M, trials=trials, shell=shell,
                                  seed=_mix_seed(seed, i)).weights
                      for i, x in enumerate(X)])


def _mix_seed(seed: int, i: int) -> int:
    return int(np.random.SeedSequence([seed, i]).generate_state(1)[0])


def total_variation(p, q) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def tv_sampling_bound(p, trials: int) -> float:
    """Approximate expected total-variation error of an empirical histogram."""
    p = np.asarray(p, dtype=float)
    return 0.5 * float(np.sqrt(2.0 * p * (1.0 - p) / (np.pi * trials)).sum())


def mean_value_residual(D: Domain, x, eps: float, M: BoundaryMesh, K: int, **wos) -> float:
    """Total variation between mu_x and the sphere average of mu_y, |y - x| = eps."""
    x = np.asarray(x, dtype=float).reshape(D.m)
    if D.m > 1 and K < 8:
        raise ValueError("need at least 8 quadrature points")
    if not D.contains_ball(x, eps):
        raise ValueError("ball B_eps(x) leaves the domain")
    Y = sphere_points(x, eps, K)
    W = measure_matrix(D, np.vstack([x, Y]), M, **wos)
    return total_variation(W[0], W[1:].mean(axis=0))


def harmonic_extension(M: BoundaryMesh, boundary_values, x, **wos) -> float:
    """Value at ``x`` of the harmonic function with the given boundary data."""
    f = np.asarray(boundary_values, dtype=float)
    if f.shape[0] != M.count or not np.all(np.isfinite(f)):
        raise ValueError("need one finite boundary value per node")
    mu = harmonic_measure(M.domain, x, M, **wos)
    return float(mu.weights @ f)


# ---------------------------------------------------------------------------
# I/O


def domain_to_json(D: Domain, mesh_count: int) -> dict:
    if D.kind != "ball":
        raise ValueError("only ball domains serialize")
    return {"kind": "ball", "center": D.center.tolist(), "radius": float(D.radius),
            "mesh_count": int(mesh_count)}


def domain_from_json(doc: dict) -> tuple[Domain, BoundaryMesh]:
    if doc.get("kind") != "ball":
        raise ValueError("only ball domains deserialize")
    D = ball(doc["center"], doc["radius"])
    return D, make_boundary_mesh(D, int(doc["mesh_count"]))


def write_measure_csv(mu: HarmonicMeasure, fh) -> None:
    """CSV columns: node_index, tau_0..tau_{m-1}, weight."""
    m = mu.mesh.domain.m
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["node_index"] + [f"tau_{i}" for i in range(m)] + ["weight"])
    for j, (tau, wt) in enumerate(zip(mu.mesh.nodes, mu.weights)):
        w.writerow([j] + [f"{v:.17g}" for v in tau] + [f"{wt:.17g}"])
