"""Convex bodies as support-function samples, zonotopes and polytopes.

A convex body is stored through its support function h(xi) = max_{z in A} z.xi
sampled on a centrally symmetric set of unit directions.  Minkowski sums and
non-negative scalings act linearly on these samples; volumes are obtained by
reconstructing the circumscribed polytope {x : x.xi_k <= h_k for all k}.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection
from scipy.stats import qmc

__all__ = [
    "ATOL",
    "EmptyBodyError",
    "UnboundedBodyError",
    "GuardError",
    "DirectionGrid",
    "SupportBody",
    "Zonotope",
    "Polytope",
    "make_direction_grid",
    "support_of_polytope",
    "support_of_zonotope",
    "support_of_zonotope_on_grid",
    "minkowski_combine",
    "body_from_support",
    "canonicalize",
    "volume_polytope",
    "centroid_polytope",
    "volume_zonotope",
    "support_volumes",
    "hausdorff_distance",
    "contains",
    "bm_deficit",
    "det_cofactor",
    "polytope_to_json",
    "polytope_from_json",
    "zonotope_to_json",
    "zonotope_from_json",
]

#: absolute tolerance for comparisons at unit scale
ATOL = 1e-9

MAX_SUBSETS = 10**8
# planar reconstruction error falls like 1/count^2; these keep 1e-6 checks within reach
DEFAULT_GRID_COUNT = {2: 256, 3: 2048, 4: 4096}


class EmptyBodyError(ValueError):
    """The halfspace system has no feasible point."""


class UnboundedBodyError(ValueError):
    """The directions do not positively span the space."""


class GuardError(ValueError):
    """A combinatorial or resource guard would be exceeded."""


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.flags.writeable = False
    return arr


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True, eq=False)
class DirectionGrid:
    """Symmetric set of unit directions with sphere-quadrature weights.

    ``antipode[k]`` is the index of ``-directions[k]``.
    """

    directions: np.ndarray
    quad_weights: np.ndarray
    antipode: np.ndarray = field(default=None)

    def __post_init__(self):
        dirs = np.atleast_2d(np.asarray(self.directions, dtype=float))
        w = np.asarray(self.quad_weights, dtype=float)
        if dirs.shape[0] != w.shape[0]:
            raise ValueError("one weight per direction required")
        if np.any(np.abs(np.linalg.norm(dirs, axis=1) - 1.0) > 1e-12):
            raise ValueError("directions must be unit vectors")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("quadrature weights must be nonnegative and sum to 1")
        anti = self.antipode
        if anti is None:
            anti = _pair_antipodes(dirs)
        anti = np.asarray(anti, dtype=np.intp)
        if np.any(np.abs(dirs[anti] + dirs) > 1e-12):
            raise ValueError("grid is not centrally symmetric")
        object.__setattr__(self, "directions", _frozen(dirs))
        object.__setattr__(self, "quad_weights", _frozen(w))
        object.__setattr__(self, "antipode", _frozen(anti, np.intp))

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    @property
    def count(self) -> int:
        return self.directions.shape[0]

    def __len__(self):
        return self.count

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, DirectionGrid):
            return NotImplemented
        return (self.directions.shape == other.directions.shape
                and np.array_equal(self.directions, other.directions))

    __hash__ = object.__hash__

    @property
    def angular_order(self) -> np.ndarray:
        """Indices sorting a planar grid counterclockwise (n = 2 only)."""
        return _angular_order(self)


def _pair_antipodes(dirs: np.ndarray) -> np.ndarray:
    from scipy.spatial import cKDTree

    dist, idx = cKDTree(dirs).query(-dirs)
    if np.any(dist > 1e-12):
        raise ValueError("grid is not centrally symmetric")
    return idx


@lru_cache(maxsize=64)
def _angular_order_cached(key: bytes, shape: tuple) -> np.ndarray:
    dirs = np.frombuffer(key, dtype=float).reshape(shape)
    order = np.argsort(np.arctan2(dirs[:, 1], dirs[:, 0]), kind="stable")
    order.flags.writeable = False
    return order


def _angular_order(grid: DirectionGrid) -> np.ndarray:
    if grid.dim != 2:
        raise ValueError("angular order is defined for planar grids only")
    return _angular_order_cached(grid.directions.tobytes(), grid.directions.shape)


@dataclass(frozen=True, eq=False)
class SupportBody:
    """Convex body given by support values ``h_k = h_A(xi_k)`` on a grid."""

    grid: DirectionGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.shape[0] != self.grid.count:
            raise ValueError(f"expected {self.grid.count} support values, got {v.shape[0]}")
        if not np.all(np.isfinite(v)):
            raise ValueError("support values must be finite")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def dim(self) -> int:
        return self.grid.dim

    def translate(self, v) -> "SupportBody":
        return SupportBody(self.grid, self.values + self.grid.directions @ np.asarray(v, float))

    def scale(self, t: float) -> "SupportBody":
        return minkowski_combine([self], [t])

    def __add__(self, other: "SupportBody") -> "SupportBody":
        return minkowski_combine([self, other], [1.0, 1.0])

    def is_feasible(self) -> bool:
        """True when the halfspace system x.xi_k <= h_k has a solution."""
        res = linprog(np.zeros(self.dim), A_ub=self.grid.directions, b_ub=self.values,
                      bounds=[(None, None)] * self.dim, method="highs")
        return res.status == 0

    def volume(self) -> float:
        return float(support_volumes(self.grid, self.values[None, :])[0])


@dataclass(frozen=True, eq=False)
class Zonotope:
    """``base + sum_i [0, g_i]``; generators are stored as rows."""

    base: np.ndarray
    generators: np.ndarray

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float).reshape(-1)
        gens = np.asarray(self.generators, dtype=float)
        if gens.size == 0:
            gens = np.zeros((0, base.shape[0]))
        gens = np.atleast_2d(gens)
        if gens.shape[1] != base.shape[0]:
            raise ValueError("generator dimension does not match base")
        object.__setattr__(self, "base", _frozen(base))
        object.__setattr__(self, "generators", _frozen(gens))

    @property
    def dim(self) -> int:
        return self.base.shape[0]

    def support(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return xi @ self.base + np.maximum(0.0, xi @ self.generators.T).sum(axis=-1)

    def corner_points(self) -> np.ndarray:
        """All points ``base + sum_{i in S} g_i`` (2^N of them)."""
        N = self.generators.shape[0]
        if N > 20:
            raise ValueError("too many generators to enumerate corners")
        masks = np.array(list(itertools.product((0.0, 1.0), repeat=N))).reshape(-1, N)
        return self.base + masks @ self.generators


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex hull of ``vertices``; canonical instances hold extreme points only.

    In the plane, canonical vertices are in counterclockwise order.
    """

    vertices: np.ndarray

    def __post_init__(self):
        V = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if V.size == 0:
            raise ValueError("empty vertex list")
        object.__setattr__(self, "vertices", _frozen(V))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @classmethod
    def from_points(cls, points) -> "Polytope":
        """Canonical polytope spanned by ``points`` (duplicates and interior points removed)."""
        return cls(_extreme_points(np.atleast_2d(np.asarray(points, dtype=float))))


def _affine_rank(P: np.ndarray) -> int:
    scale = max(1.0, float(np.abs(P).max()))
    s = np.linalg.svd(P - P.mean(axis=0), compute_uv=False)
    return int(np.sum(s > 1e-10 * scale))


def _extreme_points(P: np.ndarray) -> np.ndarray:
    n = P.shape[1]
    if P.shape[0] == 0:
        raise ValueError("empty vertex list")
    scale = max(1.0, float(np.abs(P).max()))
    center = P.mean(axis=0)
    Q = P - center
    _, s, Vt = np.linalg.svd(Q, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * scale))
    if rank == 0:
        return center[None, :]
    if rank < n:
        # lower-dimensional: hull in the affine span, mapped back
        basis = Vt[:rank]
        coords = Q @ basis.T
        if rank == 1:
            i, j = np.argmin(coords[:, 0]), np.argmax(coords[:, 0])
            return P[[i, j]]
        idx = ConvexHull(coords).vertices
        return P[idx]
    hull = ConvexHull(P)
    # qhull returns planar hull vertices counterclockwise
    return P[hull.vertices] if n == 2 else P[np.sort(hull.vertices)]


# ---------------------------------------------------------------------------
# grids


def make_direction_grid(n: int, count: Optional[int] = None) -> DirectionGrid:
    """Deterministic symmetric direction grid with uniform weights.

    ``count`` defaults to ``DEFAULT_GRID_COUNT[n]``.

    Planar grids are the ``count``-th roots of unity in counterclockwise
    order.  For ``n >= 3`` half the points come from a low-discrepancy set on
    the upper hemisphere and the rest are their antipodes.
    """
    if n not in (2, 3, 4):
        raise ValueError("direction grids are supported for n in {2, 3, 4}")
    if count is None:
        count = DEFAULT_GRID_COUNT[n]
    if count % 2 or count < 2 * n:
        raise ValueError(f"count must be even and at least {2 * n}, got {count}")
    half = count // 2
    if n == 2:
        ang = 2.0 * np.pi * np.arange(half) / count
        first = np.column_stack([np.cos(ang), np.sin(ang)])
    elif n == 3:
        # Fibonacci lattice restricted to z > 0
        i = np.arange(half) + 0.5
        z = 1.0 - i / half
        r = np.sqrt(1.0 - z * z)
        phi = np.pi * (3.0 - math.sqrt(5.0)) * np.arange(half)
        first = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    else:
        from scipy.special import ndtri

        u = qmc.Halton(d=n, scramble=False).random(half + 1)[1:]
        g = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
        g[np.all(np.abs(g) < 1e-12, axis=1)] = 1.0
        first = g / np.linalg.norm(g, axis=1, keepdims=True)
        first[first[:, 0] < 0] *= -1.0
    first = first / np.linalg.norm(first, axis=1, keepdims=True)
    dirs = np.vstack([first, -first])
    anti = np.concatenate([np.arange(half, count), np.arange(half)])
    if n >= 3 and np.linalg.matrix_rank(dirs) < n:
        raise ValueError("grid does not span the space")
    return DirectionGrid(dirs, np.full(count, 1.0 / count), anti)


# ---------------------------------------------------------------------------
# support functions


def support_of_polytope(P: Polytope, G: DirectionGrid) -> SupportBody:
    if P.dim != G.dim:
        raise ValueError("dimension mismatch")
    return SupportBody(G, (G.directions @ P.vertices.T).max(axis=1))


def support_of_zonotope(Z: Zonotope, xi) -> float:
    """``base.xi + sum_i max(0, g_i.xi)``."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != Z.dim:
        raise ValueError("dimension mismatch")
    return float(Z.support(xi))


def support_of_zonotope_on_grid(Z: Zonotope, G: DirectionGrid) -> SupportBody:
    if Z.dim != G.dim:
        raise ValueError("dimension mismatch")
    return SupportBody(G, Z.support(G.directions))


def minkowski_combine(bodies: Sequence[SupportBody], weights: Sequence[float]) -> SupportBody:
    """Support values of ``sum_j weights[j] * bodies[j]`` (weights >= 0).

    Summation is left to right so results are reproducible bit for bit.
    """
    if len(bodies) == 0 or len(bodies) != len(weights):
        raise ValueError("need one weight per body")
    grid = bodies[0].grid
    for b in bodies[1:]:
        if b.grid != grid:
            raise ValueError("bodies live on different grids")
    if any(w < 0 for w in weights):
        raise ValueError("Minkowski weights must be nonnegative")
    acc = float(weights[0]) * bodies[0].values
    for b, w in zip(bodies[1:], weights[1:]):
        acc = acc + float(w) * b.values
    return SupportBody(grid, acc)


def _check_same_grid(A: SupportBody, B: SupportBody):
    if A.grid != B.grid:
        raise ValueError("bodies live on different grids")


def hausdorff_distance(A: SupportBody, B: SupportBody) -> float:
    """Sup-norm of the support difference over the grid."""
    _check_same_grid(A, B)
    return float(np.max(np.abs(A.values - B.values)))


def contains(A: SupportBody, B: SupportBody, tol: float = ATOL) -> bool:
    """``A ⊇ B`` for the grid-reconstructed bodies, i.e. ``h_A >= h_B`` pointwise."""
    _check_same_grid(A, B)
    return bool(np.all(A.values >= B.values - tol))


# ---------------------------------------------------------------------------
# reconstruction


def _scale_of(h: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(h))))


def _planar_vertices_batch(dirs: np.ndarray, H: np.ndarray):
    """Consecutive-line intersections and edge lengths for angle-sorted normals.

    Returns ``(V, lengths)`` with ``V[b, k]`` the intersection of lines k and
    k+1, and ``lengths[b, k]`` the signed length of the edge carried by line k.
    A row is a valid polygon exactly when all its lengths are >= 0.
    """
    nxt = np.roll(dirs, -1, axis=0)
    det = dirs[:, 0] * nxt[:, 1] - dirs[:, 1] * nxt[:, 0]
    Hn = np.roll(H, -1, axis=-1)
    vx = (H * nxt[:, 1] - Hn * dirs[:, 1]) / det
    vy = (dirs[:, 0] * Hn - nxt[:, 0] * H) / det
    px, py = np.roll(vx, 1, axis=-1), np.roll(vy, 1, axis=-1)
    lengths = (vx - px) * (-dirs[:, 1]) + (vy - py) * dirs[:, 0]
    return np.stack([vx, vy], axis=-1), lengths


def _max_gap(angles: np.ndarray) -> float:
    a = np.sort(angles)
    gaps = np.diff(np.concatenate([a, [a[0] + 2 * np.pi]]))
    return float(gaps.max())


def _feasible_point(dirs: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, float]:
    """Chebyshev center and radius of {x : dirs x <= h}."""
    n = dirs.shape[1]
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A = np.hstack([dirs, np.linalg.norm(dirs, axis=1, keepdims=True)])
    bounds = [(None, None)] * n + [(0.0, None)]
    res = linprog(c, A_ub=A, b_ub=h, bounds=bounds, method="highs")
    if res.status == 2:
        raise EmptyBodyError("empty: halfspace system is infeasible")
    if res.status != 0:
        raise UnboundedBodyError(f"unbounded: {res.message}")
    return res.x[:n], float(res.x[n])


def _planar_prune(dirs: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Drop redundant halfplanes until consecutive intersections form a polygon."""
    scale = _scale_of(h)
    _feasible_point(dirs, h)
    keep = np.arange(dirs.shape[0])
    while True:
        d, hh = dirs[keep], h[keep]
        V, ell = _planar_vertices_batch(d, hh[None, :])
        V, ell = V[0], ell[0]
        bad = np.flatnonzero(ell < -ATOL * scale)
        if bad.size == 0:
            return V
        ang = np.arctan2(d[:, 1], d[:, 0])
        m = len(keep)
        # removing k is only justified by its neighbours if they span < pi
        span = (np.roll(ang, -1) - np.roll(ang, 1)) % (2 * np.pi)
        bad = bad[span[bad] < np.pi - 1e-12]
        if bad.size == 0:
            raise EmptyBodyError("empty: could not resolve halfplane system")
        bad = bad[np.argsort(ell[bad], kind="stable")]
        removed = np.zeros(m, dtype=bool)
        for k in bad:
            if not removed[(k - 1) % m] and not removed[(k + 1) % m]:
                removed[k] = True
        keep = keep[~removed]


def _dedupe_cyclic(V: np.ndarray, tol: float) -> np.ndarray:
    if len(V) <= 1:
        return V
    keep = np.linalg.norm(V - np.roll(V, 1, axis=0), axis=1) > tol
    if not keep.any():
        return V[:1]
    return V[keep]


def body_from_support(H: SupportBody) -> Polytope:
    """Polytope ``∩_k {x : x.xi_k <= h_k}``.

    Raises :class:`UnboundedBodyError` if the directions leave a hemisphere
    uncovered and :class:`EmptyBodyError` if the system is infeasible.
    """
    G, h = H.grid, H.values
    n = G.dim
    if n == 2:
        order = G.angular_order
        dirs = G.directions[order]
        if _max_gap(np.arctan2(dirs[:, 1], dirs[:, 0])) >= np.pi - 1e-12:
            raise UnboundedBodyError("unbounded: direction grid leaves a half-plane uncovered")
        hs = h[order]
        scale = _scale_of(hs)
        V, ell = _planar_vertices_batch(dirs, hs[None, :])
        if ell.min() >= -ATOL * scale:
            V = V[0]
        else:
            V = _planar_prune(dirs, hs)
        V = _dedupe_cyclic(V, 1e-12 * scale)
        return Polytope.from_points(V)
    if n == 3:
        return Polytope.from_points(_halfspace_vertices(G.directions, h))
    raise ValueError("reconstruction is supported for n in {2, 3}")


def _halfspace_vertices(dirs: np.ndarray, h: np.ndarray) -> np.ndarray:
    if np.linalg.matrix_rank(dirs) < dirs.shape[1]:
        raise UnboundedBodyError("unbounded: directions do not span the space")
    scale = _scale_of(h)
    center, radius = _feasible_point(dirs, h)
    if radius <= 1e-10 * scale:
        # lower-dimensional body: enumerate a slightly inflated copy
        delta = 1e-9 * scale
        center, radius = _feasible_point(dirs, h + delta)
        hs = HalfspaceIntersection(np.hstack([dirs, -(h + delta)[:, None]]), center)
        pts = hs.intersections
        return _merge_points(pts, 1e-7 * scale)
    hs = HalfspaceIntersection(np.hstack([dirs, -h[:, None]]), center)
    return hs.intersections


def _merge_points(P: np.ndarray, tol: float) -> np.ndarray:
    key = np.round(P / tol).astype(np.int64)
    _, idx = np.unique(key, axis=0, return_index=True)
    return P[np.sort(idx)]


def canonicalize(H: SupportBody) -> SupportBody:
    """Tighten ``H`` to the support function of its reconstruction."""
    return support_of_polytope(body_from_support(H), H.grid)


# ---------------------------------------------------------------------------
# volumes


def _shoelace(V: np.ndarray) -> np.ndarray:
    x, y = V[..., 0], V[..., 1]
    return 0.5 * np.sum(x * np.roll(y, -1, axis=-1) - np.roll(x, -1, axis=-1) * y, axis=-1)


def volume_polytope(P: Polytope) -> float:
    """Euclidean volume; lower-dimensional polytopes have volume 0."""
    n = P.dim
    if n not in (2, 3):
        raise ValueError("volume_polytope supports n in {2, 3}")
    V = _extreme_points(P.vertices)
    if V.shape[0] < n + 1 or _affine_rank(V) < n:
        return 0.0
    if n == 2:
        return abs(float(_shoelace(V)))
    hull = ConvexHull(V)
    c = V.mean(axis=0)
    tets = V[hull.simplices] - c
    return float(np.abs(np.linalg.det(tets)).sum() / 6.0)


def centroid_polytope(P: Polytope) -> np.ndarray:
    """Center of gravity of a full-dimensional polytope."""
    V = P.vertices
    if P.dim == 2:
        x, y = V[:, 0], V[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cross = x * yn - xn * y
        a = cross.sum() / 2.0
        if abs(a) < 1e-300:
            raise ValueError("degenerate polygon has no area centroid")
        return np.array([((x + xn) * cross).sum(), ((y + yn) * cross).sum()]) / (6.0 * a)
    if P.dim == 3:
        hull = ConvexHull(V)
        c = V.mean(axis=0)
        tets = V[hull.simplices]
        vols = np.abs(np.linalg.det(tets - c)) / 6.0
        cents = (tets.sum(axis=1) + c) / 4.0
        return (vols[:, None] * cents).sum(axis=0) / vols.sum()
    raise ValueError("centroid supports n in {2, 3}")


def support_volumes(G: DirectionGrid, H: np.ndarray) -> np.ndarray:
    """Volumes of the bodies whose support samples are the rows of ``H``.

    Planar rows use a vectorised consecutive-intersection pass and fall back
    to full reconstruction only for rows carrying redundant constraints.
    """
    H = np.atleast_2d(np.asarray(H, dtype=float))
    out = np.empty(H.shape[0])
    if G.dim == 2:
        order = G.angular_order
        dirs = G.directions[order]
        Hs = H[:, order]
        V, ell = _planar_vertices_batch(dirs, Hs)
        scale = np.maximum(1.0, np.abs(Hs).max(axis=1))
        ok = ell.min(axis=1) >= -ATOL * scale
        out[ok] = np.maximum(0.0, _shoelace(V[ok]))
        for i in np.flatnonzero(~ok):
            out[i] = volume_polytope(body_from_support(SupportBody(G, H[i])))
        return out
    for i in range(H.shape[0]):
        out[i] = volume_polytope(body_from_support(SupportBody(G, H[i])))
    return out


def det_cofactor(M: np.ndarray) -> np.ndarray:
    """Batched determinant by cofactor expansion, ``M`` of shape (..., n, n), n <= 4."""
    n = M.shape[-1]
    if n == 1:
        return M[..., 0, 0].copy()
    if n == 2:
        return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    if n > 4:
        raise ValueError("cofactor determinants are limited to n <= 4")
    total = np.zeros(M.shape[:-2])
    cols = np.arange(n)
    for j in range(n):
        minor = M[..., 1:, :][..., cols != j]
        term = M[..., 0, j] * det_cofactor(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


@lru_cache(maxsize=8)
def _subset_index(N: int, n: int) -> np.ndarray:
    flat = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(N), n)),
                       dtype=np.intp, count=math.comb(N, n) * n)
    # column-major so idx.T rows are contiguous gathers
    idx = np.asfortranarray(flat.reshape(-1, n))
    idx.flags.writeable = False
    return idx


_CHUNK = 1 << 18


def volume_zonotope(Z: Zonotope) -> float:
    """Exact volume ``sum_{|S| = n} |det(g_S)|``.

    Cost is C(N, n) determinants; subsets are visited in lexicographic order.
    """
    G = Z.generators
    N, n = G.shape
    if N < n:
        return 0.0
    ncomb = math.comb(N, n)
    if ncomb > MAX_SUBSETS:
        raise GuardError(f"C({N}, {n}) = {ncomb} subsets exceeds the guard {MAX_SUBSETS}")
    if n == 1:
        return float(np.abs(G[:, 0]).sum())
    if ncomb <= 200_000:
        idx = _subset_index(N, n)
        return float(np.abs(_det_rows(G, idx)).sum())
    total = 0.0
    combos = itertools.combinations(range(N), n)
    while True:
        chunk = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, _CHUNK)),
                            dtype=np.intp)
        if chunk.size == 0:
            break
        total += float(np.abs(_det_rows(G, chunk.reshape(-1, n))).sum())
    return total


def _det_rows(G: np.ndarray, idx: np.ndarray) -> np.ndarray:
    n = G.shape[1]
    if n == 2:
        i, j = idx.T
        x, y = np.ascontiguousarray(G[:, 0]), np.ascontiguousarray(G[:, 1])
        return x.take(i) * y.take(j) - y.take(i) * x.take(j)
    M = G[idx]
    return det_cofactor(M) if n <= 4 else np.linalg.det(M)


# ---------------------------------------------------------------------------
# Brunn-Minkowski


def bm_deficit(A: SupportBody, B: SupportBody) -> float:
    """``|A+B|^(1/n) - |A|^(1/n) - |B|^(1/n)`` on the reconstructed bodies."""
    _check_same_grid(A, B)
    n = A.dim
    vols = support_volumes(A.grid, np.vstack([A.values, B.values, A.values + B.values]))
    va, vb, vab = vols ** (1.0 / n)
    return float(vab - va - vb)


# ---------------------------------------------------------------------------
# serialization


def polytope_to_json(P: Polytope) -> dict:
    return {"dim": P.dim, "vertices": P.vertices.tolist()}


def polytope_from_json(doc: dict) -> Polytope:
    P = Polytope(doc["vertices"])
    if P.dim != doc["dim"]:
        raise ValueError("dim does not match vertex coordinates")
    return P


def zonotope_to_json(Z: Zonotope) -> dict:
    return {"dim": Z.dim, "base": Z.base.tolist(), "generators": Z.generators.tolist()}


def zonotope_from_json(doc: dict) -> Zonotope:
    Z = Zonotope(doc["base"], doc["generators"])
    if Z.dim != doc["dim"]:
        raise ValueError("dim does not match base")
    return Z
