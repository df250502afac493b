"""Expected absolute determinants of random matrices with iid columns.

For a discrete law nu the zonoid ``Z(nu) = sum_i p_i [0, y_i]`` is a
zonotope and ``E|det M| = n! |Z(nu)|`` holds exactly, so the enumeration
route (:func:`ead_exact`) and the zonotope route (:func:`ead_zonoid`) can be
compared to rounding error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .convex_core import GuardError, Zonotope, volume_zonotope
from .harmonic import BoundaryMesh, Domain, harmonic_measure, measure_matrix, sphere_points

__all__ = [
    "DiscreteDistribution",
    "BoundaryDistributionFamily",
    "vitale_zonoid",
    "ead_exact",
    "ead_zonoid",
    "ead_monte_carlo",
    "MonteCarloEstimate",
    "interpolate_distribution",
    "mixture",
    "RandomDetReport",
    "random_det_superharmonicity_report",
    "distribution_to_json",
    "distribution_from_json",
]

MERGE_TOL = 1e-12
MAX_TUPLES = 10**8
_CHUNK = 1 << 16


def _canonical(atoms: np.ndarray, probs: np.ndarray, tol: float):
    """Sort atoms lexicographically and merge neighbours closer than ``tol``."""
    order = np.lexsort(atoms.T[::-1])
    atoms, probs = atoms[order], probs[order]
    if len(atoms) > 1:
        new = np.concatenate([[True], np.abs(np.diff(atoms, axis=0)).max(axis=1) > tol])
        groups = np.cumsum(new) - 1
        merged = np.zeros(groups[-1] + 1)
        np.add.at(merged, groups, probs)
        atoms, probs = atoms[new], merged
    return atoms, probs


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Finitely supported law of a random vector in R^n.

    Atoms are stored in lexicographic order with coincident atoms merged, so
    any two constructions from the same atom multiset agree bit for bit.
    """

    atoms: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        atoms = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        probs = np.asarray(self.probs, dtype=float).reshape(-1)
        if atoms.shape[0] != probs.shape[0]:
            raise ValueError("one probability per atom required")
        if not np.all(np.isfinite(atoms)):
            raise ValueError("atoms must be finite")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        atoms, probs = _canonical(atoms, probs, MERGE_TOL)
        atoms.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    def __len__(self):
        return self.atoms.shape[0]

    def scaled(self, t: float) -> "DiscreteDistribution":
        return DiscreteDistribution(t * self.atoms, self.probs)


def mixture(dists: Sequence[DiscreteDistribution], weights) -> DiscreteDistribution:
    w = np.asarray(weights, dtype=float)
    atoms = np.vstack([d.atoms for d, wj in zip(dists, w) if wj > 0])
    probs = np.concatenate([wj * d.probs for d, wj in zip(dists, w) if wj > 0])
    return DiscreteDistribution(atoms, probs / probs.sum())


def vitale_zonoid(nu: DiscreteDistribution) -> Zonotope:
    """Zonotope ``sum_i p_i [0, y_i]``; zero-probability atoms are dropped."""
    keep = nu.probs > 0
    return Zonotope(np.zeros(nu.dim), nu.probs[keep, None] * nu.atoms[keep])


def _abs_det_of_tuples(atoms: np.ndarray, idx: np.ndarray) -> np.ndarray:
    # tuples repeating an atom index give two equal columns: exactly singular
    dets = np.abs(np.linalg.det(np.swapaxes(atoms[idx], 1, 2)))
    s = np.sort(idx, axis=1)
    repeated = np.any(s[:, 1:] == s[:, :-1], axis=1)
    dets[repeated] = 0.0
    return dets


def ead_exact(nu: DiscreteDistribution) -> float:
    """``E|det M|`` by enumerating all ordered column tuples."""
    N, n = nu.atoms.shape
    if n > 4:
        raise GuardError("ead_exact is limited to n <= 4")
    if N**n > MAX_TUPLES:
        raise GuardError(f"{N}^{n} tuples exceeds the enumeration guard {MAX_TUPLES}")
    if n == 1:
        return float(nu.probs @ np.abs(nu.atoms[:, 0]))
    total = 0.0
    radix = N ** np.arange(n - 1, -1, -1)
    for start in range(0, N**n, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, N**n))
        idx = (flat[:, None] // radix) % N
        weight = np.prod(nu.probs[idx], axis=1)
        total += float(weight @ _abs_det_of_tuples(nu.atoms, idx))
    return total


def ead_zonoid(nu: DiscreteDistribution) -> float:
    """``n! |Z(nu)|`` via the exact zonotope volume."""
    return math.factorial(nu.dim) * volume_zonotope(vitale_zonoid(nu))


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    stderr: float
    trials: int


def ead_monte_carlo(nu: DiscreteDistribution, trials: int, seed: int) -> MonteCarloEstimate:
    """Sample mean of |det| over ``trials`` matrices with iid columns drawn from ``nu``."""
    if trials < 100:
        raise ValueError("need at least 100 trials")
    rng = np.random.default_rng(seed)
    n = nu.dim
    s1 = s2 = 0.0
    for start in range(0, trials, _CHUNK):
        k = min(_CHUNK, trials - start)
        idx = rng.choice(len(nu), size=(k, n), p=nu.probs)
        d = _abs_det_of_tuples(nu.atoms, idx)
        s1 += float(d.sum())
        s2 += float((d * d).sum())
    mean = s1 / trials
    var = max(0.0, (s2 - trials * mean * mean) / (trials - 1))
    return MonteCarloEstimate(mean, math.sqrt(var / trials), trials)


@dataclass(frozen=True, eq=False)
class BoundaryDistributionFamily:
    """One discrete law per boundary node, with declared total-variation continuity."""

    mesh: BoundaryMesh
    distributions: tuple
    lipschitz: float

    def __post_init__(self):
        dists = tuple(self.distributions)
        if len(dists) != self.mesh.count:
            raise ValueError("need one distribution per mesh node")
        if len({d.dim for d in dists}) != 1:
            raise ValueError("distributions must share a dimension")
        object.__setattr__(self, "distributions", dists)
        if self.mesh.domain.m > 1:
            for i, j in self.mesh.neighbours():
                tv = _tv(dists[i], dists[j])
                if tv > self.lipschitz * np.linalg.norm(self.mesh.nodes[i] - self.mesh.nodes[j]) + 1e-12:
                    raise ValueError(f"family violates declared continuity between nodes {i} and {j}")

    @property
    def dim(self) -> int:
        return self.distributions[0].dim


def _tv(a: DiscreteDistribution, b: DiscreteDistribution) -> float:
    both = mixture([a, b], [0.5, 0.5])
    pa = _mass_on(both.atoms, a)
    pb = _mass_on(both.atoms, b)
    return 0.5 * float(np.abs(pa - pb).sum())


def _mass_on(support: np.ndarray, d: DiscreteDistribution) -> np.ndarray:
    out = np.zeros(len(support))
    for y, p in zip(d.atoms, d.probs):
        out[np.argmin(np.abs(support - y).max(axis=1))] += p
    return out


def interpolate_distribution(F: BoundaryDistributionFamily, D: Domain, x, **wos) -> DiscreteDistribution:
    """Mixture of the node laws weighted by harmonic measure at ``x``."""
    mu = harmonic_measure(D, x, F.mesh, **wos)
    return mixture(F.distributions, mu.weights)


@dataclass
class RandomDetReport:
    points: np.ndarray
    ead: np.ndarray
    ead_root: np.ndarray
    sphere_mean: np.ndarray
    deficit: np.ndarray

    @property
    def min_deficit(self) -> float:
        return float(self.deficit.min())

    @property
    def max_abs_deficit(self) -> float:
        return float(np.abs(self.deficit).max())


def random_det_superharmonicity_report(F: BoundaryDistributionFamily, D: Domain, points,
                                       eps: float, K: int, **wos) -> RandomDetReport:
    """Mean-value deficit of ``x -> ead(nu_x)^(1/n)`` using the zonoid route."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    for p in points:
        if not D.contains_ball(p, eps):
            raise ValueError(f"ball of radius {eps} about {p} leaves the domain")
    n = F.dim
    Y = np.vstack([sphere_points(p, eps, K) for p in points])
    P = points.shape[0]
    Kp = Y.shape[0] // P
    W = measure_matrix(D, np.vstack([points, Y]), F.mesh, **wos)
    eads = np.array([ead_zonoid(mixture(F.distributions, w)) for w in W])
    roots = eads ** (1.0 / n)
    ring = roots[P:].reshape(P, Kp).mean(axis=1)
    return RandomDetReport(points, eads[:P], roots[:P], ring, roots[:P] - ring)


def distribution_to_json(nu: DiscreteDistribution) -> dict:
    return {"dim": nu.dim, "atoms": nu.atoms.tolist(), "probs": nu.probs.tolist()}


def distribution_from_json(doc: dict) -> DiscreteDistribution:
    nu = DiscreteDistribution(doc["atoms"], doc["probs"])
    if nu.dim != doc["dim"]:
        raise ValueError("dim does not match atom coordinates")
    return nu
