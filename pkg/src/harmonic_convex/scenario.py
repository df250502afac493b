"""Scenario documents: validation, dispatch and report writing."""
from __future__ import annotations

import csv
import copy
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from . import fixtures
from .convex_core import (
    GuardError,
    Polytope,
    SupportBody,
    Zonotope,
    make_direction_grid,
)
from .harmonic import (
    Domain,
    ball,
    ellipse,
    make_boundary_mesh,
    polar_grid,
    poisson_weights,
    total_variation,
    wos_measure,
)
from .interpolation import (
    BoundaryBodyFamily,
    equality_case_check,
    interpolated_family,
    subharmonic_check,
)
from .zonoid_random import (
    BoundaryDistributionFamily,
    DiscreteDistribution,
    distribution_from_json,
    ead_exact,
    ead_monte_carlo,
    ead_zonoid,
    random_det_superharmonicity_report,
)

OUT_DIR_ENV = "HARMONIC_CONVEX_OUT_DIR"

MAX_GRID = 1 << 16
MAX_MESH = 1 << 16
MAX_K = 4096
MAX_POINTS = 10_000

DEFAULT_TOLERANCES = {
    "deficit": 1e-3,
    "defect": 1e-3,
    "residual": 1e-3,
    "c_match": 1e-6,
    "violation": 1e-3,
    "vitale_rel": 1e-10,
    "mc_sigmas": 4.0,
    "tv": 0.01,
    "refine_slack": 1e-9,
}

KINDS = ("superharmonicity", "equality_case", "subharmonicity", "random_det",
         "vitale_check", "monte_carlo", "wos")

_vec = {"type": "array", "items": {"type": "number"}}

SCHEMA = {
    "type": "object",
    "required": ["name", "kind"],
    "properties": {
        "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "kind": {"enum": list(KINDS)},
        "seed": {"type": "integer", "minimum": 0},
        "domain": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["ball", "ellipse"]},
                "center": _vec,
                "radius": {"type": "number", "exclusiveMinimum": 0},
                "a": {"type": "number", "exclusiveMinimum": 0},
                "b": {"type": "number", "exclusiveMinimum": 0},
                "mesh_count": {"type": "integer", "minimum": 2},
            },
        },
        "grid": {
            "type": "object",
            "required": ["n", "count"],
            "properties": {"n": {"type": "integer"}, "count": {"type": "integer"}},
        },
        "mesh_count": {"type": "integer", "minimum": 2},
        "family": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["parametric", "zonotope_nodes", "polytope_nodes",
                                  "distribution_nodes"]},
                "name": {"type": "string"},
                "params": {"type": "object"},
                "nodes": {"type": "array"},
                "lipschitz": {"type": "number", "minimum": 0},
            },
        },
        "interior_points": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["polar_grid", "list"]},
                "rings": {"type": "integer", "minimum": 1},
                "per_ring": {"type": "integer", "minimum": 1},
                "points": {"type": "array", "items": _vec},
            },
        },
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
        "K": {"type": "integer", "minimum": 2},
        "refine_check": {"type": "boolean"},
        "expect_homothetic": {"type": "boolean"},
        "expect_harmonic": {"type": "boolean"},
        "perturb": {
            "type": "object",
            "properties": {"kind": {"enum": ["shrink", "enlarge"]},
                           "factor": {"type": "number", "exclusiveMinimum": 0}},
        },
        "wos": {
            "type": "object",
            "properties": {"trials": {"type": "integer", "minimum": 1},
                           "shell": {"type": "number", "exclusiveMinimum": 0}},
        },
        "count": {"type": "integer", "minimum": 1},
        "dims": {"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": 4}},
        "max_atoms": {"type": "integer", "minimum": 1},
        "trials": {"type": "integer", "minimum": 100},
        "point": _vec,
        "tolerances": {"type": "object", "additionalProperties": {"type": "number"}},
    },
}


class ScenarioError(Exception):
    """Raised for invalid scenarios; ``exit_code`` follows the CLI contract."""

    exit_code = 2
    category = "schema"

    def record(self) -> dict:
        return {"error": self.category, "exit_code": self.exit_code, "message": str(self)}


class SchemaViolation(ScenarioError):
    exit_code = 2
    category = "schema"


class GuardViolation(ScenarioError):
    exit_code = 3
    category = "guard"


@dataclass
class Scenario:
    name: str
    config: dict
    path: Optional[Path] = None


@dataclass
class RunReport:
    scenario: str
    columns: list
    records: list
    summary: dict
    criteria: dict
    provenance: dict
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.criteria.values())

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for rec in self.records:
            w.writerow([_fmt(rec[c]) for c in self.columns])
        return buf.getvalue()

    def summary_doc(self) -> dict:
        return {"scenario": self.scenario, "passed": self.passed, "criteria": self.criteria,
                "summary": self.summary, "provenance": self.provenance}


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


# ---------------------------------------------------------------------------
# loading


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise SchemaViolation(f"scenario file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"invalid JSON: {exc}") from exc
    sc = scenario_from_dict(doc)
    sc.path = path
    return sc


def scenario_from_dict(doc: dict) -> Scenario:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaViolation(f"{where}: {exc.message}") from exc
    _require_fields(doc)
    return Scenario(doc["name"], doc)


_NEEDS = {
    "superharmonicity": ("domain", "grid", "family", "interior_points"),
    "equality_case": ("domain", "grid", "family", "interior_points"),
    "subharmonicity": ("domain", "grid", "family", "interior_points"),
    "random_det": ("domain", "family", "interior_points"),
    "vitale_check": ("count",),
    "monte_carlo": ("count",),
    "wos": ("domain", "point"),
}


def _require_fields(doc: dict):
    kind = doc["kind"]
    missing = [k for k in _NEEDS[kind] if k not in doc]
    if missing:
        raise SchemaViolation(f"scenario kind {kind!r} requires {missing}")
    if _is_stochastic(doc) and "seed" not in doc:
        raise SchemaViolation("seed is required for stochastic scenarios")


def _is_stochastic(doc: dict) -> bool:
    if doc["kind"] in ("vitale_check", "monte_carlo", "wos"):
        return True
    if doc.get("domain", {}).get("kind") == "ellipse":
        return True
    fam = doc.get("family", {})
    return fam.get("kind") == "parametric" and fam.get("name") == "random_zonotopes"


def effective_config(sc: Scenario, seed: Optional[int] = None, refine: int = 0) -> dict:
    """Config after CLI overrides; ``refine`` doubles every resolution ``refine`` times."""
    cfg = copy.deepcopy(sc.config)
    if seed is not None:
        cfg["seed"] = int(seed)
    if refine:
        f = 2**refine
        if "grid" in cfg:
            cfg["grid"]["count"] *= f
        if "K" in cfg:
            cfg["K"] *= f
        else:
            cfg["K"] = 64 * f
        fam_kind = cfg.get("family", {}).get("kind")
        # explicit node families fix the mesh
        if fam_kind not in ("zonotope_nodes", "polytope_nodes", "distribution_nodes"):
            cfg["mesh_count"] = _mesh_count(cfg) * f
    cfg["_refine"] = int(refine)
    return cfg


def _mesh_count(cfg: dict) -> int:
    return int(cfg.get("mesh_count", cfg.get("domain", {}).get("mesh_count", 256)))


def _tol(cfg: dict, key: str) -> float:
    return float(cfg.get("tolerances", {}).get(key, DEFAULT_TOLERANCES[key]))


def config_hash(cfg: dict) -> str:
    text = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


# ---------------------------------------------------------------------------
# builders


def _build_domain(cfg: dict) -> Domain:
    d = cfg["domain"]
    if d["kind"] == "ball":
        if "radius" not in d or "center" not in d:
            raise SchemaViolation("ball domains need center and radius")
        return ball(d["center"], d["radius"])
    if "a" not in d or "b" not in d:
        raise SchemaViolation("ellipse domains need a and b")
    return ellipse(d["a"], d["b"], d.get("center", (0.0, 0.0)))


def _wos_kwargs(cfg: dict, D: Domain) -> dict:
    if D.kind == "ball":
        return {}
    w = cfg.get("wos", {})
    return {"trials": int(w.get("trials", 20_000)), "seed": int(cfg["seed"]),
            "shell": w.get("shell")}


def _build_grid(cfg: dict):
    g = cfg["grid"]
    if g["count"] > MAX_GRID:
        raise GuardViolation(f"grid count {g['count']} exceeds {MAX_GRID}")
    try:
        return make_direction_grid(g["n"], g["count"])
    except ValueError as exc:
        raise SchemaViolation(f"grid: {exc}") from exc


def _build_mesh(cfg: dict, D: Domain):
    count = _mesh_count(cfg)
    fam = cfg.get("family", {})
    if fam.get("kind") in ("zonotope_nodes", "polytope_nodes", "distribution_nodes"):
        count = len(fam.get("nodes", []))
    if count > MAX_MESH:
        raise GuardViolation(f"mesh count {count} exceeds {MAX_MESH}")
    return make_boundary_mesh(D, count)


def _build_points(cfg: dict, D: Domain, eps: float) -> np.ndarray:
    ipts = cfg["interior_points"]
    if ipts["kind"] == "polar_grid":
        if D.kind != "ball" or D.m != 2:
            raise SchemaViolation("polar_grid points need a planar ball domain")
        pts = polar_grid(D, ipts.get("rings", 5), ipts.get("per_ring", 20), eps)
    else:
        pts = np.asarray(ipts.get("points", []), dtype=float)
        if pts.ndim != 2 or pts.shape[1] != D.m:
            raise SchemaViolation("interior point list has the wrong shape")
    if len(pts) > MAX_POINTS:
        raise GuardViolation(f"{len(pts)} interior points exceeds {MAX_POINTS}")
    for p in pts:
        if not D.contains_ball(p, eps):
            raise GuardViolation(f"ball of radius {eps} about {p.tolist()} leaves the domain")
    return pts


def _build_body_family(cfg: dict, mesh, grid) -> BoundaryBodyFamily:
    fam = cfg["family"]
    kind = fam["kind"]
    try:
        if kind == "parametric":
            name = fam.get("name")
            if name not in fixtures.BODY_FAMILIES:
                raise SchemaViolation(f"unknown body family {name!r}")
            if mesh.domain.kind != "ball" or mesh.domain.m != 2:
                raise SchemaViolation("parametric body families need a planar ball domain")
            params = dict(fam.get("params", {}))
            if name == "random_zonotopes":
                params.setdefault("seed", int(cfg["seed"]))
            return fixtures.BODY_FAMILIES[name](mesh, grid, **params)
        if "lipschitz" not in fam:
            raise SchemaViolation("explicit node families must declare lipschitz")
        nodes = fam.get("nodes", [])
        if kind == "zonotope_nodes":
            Zs = [Zonotope(nd.get("base", [0.0] * grid.dim), nd["generators"]) for nd in nodes]
            return BoundaryBodyFamily.from_zonotopes(mesh, grid, Zs, fam["lipschitz"])
        if kind == "polytope_nodes":
            Ps = [Polytope(nd["vertices"]) for nd in nodes]
            return BoundaryBodyFamily.from_polytopes(mesh, grid, Ps, fam["lipschitz"])
    except (KeyError, TypeError) as exc:
        raise SchemaViolation(f"family: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, GuardError):
            raise GuardViolation(str(exc)) from exc
        raise SchemaViolation(f"family: {exc}") from exc
    raise SchemaViolation(f"family kind {kind!r} does not describe convex bodies")


def _build_distribution_family(cfg: dict, mesh) -> BoundaryDistributionFamily:
    fam = cfg["family"]
    try:
        if fam["kind"] == "parametric":
            name = fam.get("name")
            if name not in fixtures.DISTRIBUTION_FAMILIES:
                raise SchemaViolation(f"unknown distribution family {name!r}")
            params = dict(fam.get("params", {}))
            if "base" in params:
                params["base"] = distribution_from_json(params["base"])
            return fixtures.DISTRIBUTION_FAMILIES[name](mesh, **params)
        if fam["kind"] == "distribution_nodes":
            if "lipschitz" not in fam:
                raise SchemaViolation("explicit node families must declare lipschitz")
            dists = [distribution_from_json(nd) for nd in fam["nodes"]]
            return BoundaryDistributionFamily(mesh, dists, fam["lipschitz"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation(f"family: {exc}") from exc
    raise SchemaViolation(f"family kind {fam['kind']!r} does not describe distributions")


# ---------------------------------------------------------------------------
# runners


def _resolution(cfg: dict) -> dict:
    out = {"refine": cfg.get("_refine", 0)}
    if "grid" in cfg:
        out["grid"] = cfg["grid"]["count"]
    if "domain" in cfg:
        out["mesh"] = _mesh_count(cfg)
    if "K" in cfg:
        out["K"] = cfg["K"]
    return out


def _point_columns(m: int) -> list:
    return [f"x{i}" for i in range(m)]


def _run_bodies(cfg: dict) -> tuple:
    D = _build_domain(cfg)
    grid = _build_grid(cfg)
    mesh = _build_mesh(cfg, D)
    eps = float(cfg.get("epsilon", 0.1))
    K = int(cfg.get("K", 64))
    if K > MAX_K:
        raise GuardViolation(f"K = {K} exceeds {MAX_K}")
    pts = _build_points(cfg, D, eps)
    F = _build_body_family(cfg, mesh, grid)
    return D, grid, mesh, eps, K, pts, F


def _body_report(cfg: dict):
    D, grid, mesh, eps, K, pts, F = _run_bodies(cfg)
    eq = equality_case_check(F, D, pts, eps, K, **_wos_kwargs(cfg, D))
    sh = eq.superharmonicity
    cols = _point_columns(D.m) + ["volume", "root_volume", "deficit", "fit_residual"]
    recs = []
    for i, p in enumerate(pts):
        rec = {f"x{k}": p[k] for k in range(D.m)}
        rec.update(volume=sh.volume[i], root_volume=sh.root_volume[i], deficit=sh.deficit[i],
                   fit_residual=eq.fit_residual[i])
        recs.append(rec)
    return eq, cols, recs


def run_superharmonicity(cfg: dict) -> tuple:
    eq, cols, recs = _body_report(cfg)
    tol = _tol(cfg, "deficit")
    min_def = float(eq.deficit.min())
    summary = {"min_deficit": min_def, "max_abs_deficit": eq.defect, "points": len(recs)}
    criteria = {"min_deficit_ge_minus_tol": min_def >= -tol}
    if cfg.get("refine_check"):
        finer = copy.deepcopy(cfg)
        finer["refine_check"] = False
        finer["_refine"] = cfg.get("_refine", 0) + 1
        finer["grid"]["count"] *= 2
        finer["K"] = int(cfg.get("K", 64)) * 2
        if finer.get("family", {}).get("kind") == "parametric":
            finer["mesh_count"] = _mesh_count(cfg) * 2
        eq2, _, _ = _body_report(finer)
        min_ref = float(eq2.deficit.min())
        summary["min_deficit_refined"] = min_ref
        slack = _tol(cfg, "refine_slack")
        criteria["refined_not_more_negative"] = min(min_ref, 0.0) >= min(min_def, 0.0) - slack
        criteria["refined_min_deficit_ge_minus_tol"] = min_ref >= -tol
    return cols, recs, summary, criteria


def run_equality_case(cfg: dict) -> tuple:
    eq, cols, recs = _body_report(cfg)
    summary = {"defect": eq.defect, "residual": eq.residual, "c_mismatch": eq.c_mismatch,
               "d_mismatch": eq.d_mismatch, "points": len(recs)}
    t_def, t_res, t_c = _tol(cfg, "defect"), _tol(cfg, "residual"), _tol(cfg, "c_match")
    if cfg.get("expect_homothetic", True):
        criteria = {
            "defect_le_tol": eq.defect <= t_def,
            "residual_le_tol": eq.residual <= t_res,
            "c_matches_extension": eq.c_mismatch <= t_c,
        }
    else:
        criteria = {
            "defect_ge_10x_tol": eq.defect >= 10 * t_def,
            "residual_ge_10x_tol": eq.residual >= 10 * t_res,
        }
    return cols, recs, summary, criteria


def run_subharmonicity(cfg: dict) -> tuple:
    D, grid, mesh, eps, K, pts, F = _run_bodies(cfg)
    base = interpolated_family(F, D, **_wos_kwargs(cfg, D))
    perturb = cfg.get("perturb")
    family_at = base
    if perturb:
        factor = float(perturb.get("factor", 0.9 if perturb.get("kind", "shrink") == "shrink" else 1.1))
        marked = {tuple(np.round(p, 12)) for p in pts}

        def perturbed(x, _base=base):
            A = _base(x)
            if tuple(np.round(np.asarray(x, float), 12)) in marked:
                return SupportBody(A.grid, factor * A.values)
            return A

        family_at = perturbed

    cols = _point_columns(D.m) + ["violation"]
    recs = []
    for p in pts:
        rep = subharmonic_check(family_at, p, eps, K, domain=D)
        rec = {f"x{k}": p[k] for k in range(D.m)}
        rec["violation"] = rep.max_violation
        recs.append(rec)
    worst = max(r["violation"] for r in recs)
    summary = {"max_violation": worst, "points": len(recs)}
    criteria = {"max_violation_le_tol": worst <= _tol(cfg, "violation")}
    return cols, recs, summary, criteria


def run_random_det(cfg: dict) -> tuple:
    D = _build_domain(cfg)
    mesh = _build_mesh(cfg, D)
    eps = float(cfg.get("epsilon", 0.1))
    K = int(cfg.get("K", 64))
    if K > MAX_K:
        raise GuardViolation(f"K = {K} exceeds {MAX_K}")
    pts = _build_points(cfg, D, eps)
    F = _build_distribution_family(cfg, mesh)
    try:
        rep = random_det_superharmonicity_report(F, D, pts, eps, K, **_wos_kwargs(cfg, D))
    except GuardError as exc:
        raise GuardViolation(str(exc)) from exc
    cols = _point_columns(D.m) + ["ead", "ead_root", "deficit"]
    recs = []
    for i, p in enumerate(pts):
        rec = {f"x{k}": p[k] for k in range(D.m)}
        rec.update(ead=rep.ead[i], ead_root=rep.ead_root[i], deficit=rep.deficit[i])
        recs.append(rec)
    tol = _tol(cfg, "deficit")
    summary = {"min_deficit": rep.min_deficit, "max_abs_deficit": rep.max_abs_deficit,
               "points": len(recs)}
    criteria = {"min_deficit_ge_minus_tol": rep.min_deficit >= -tol}
    if cfg.get("expect_harmonic"):
        criteria["abs_deficit_le_tol"] = rep.max_abs_deficit <= tol
    return cols, recs, summary, criteria


def random_distributions(count: int, dims, max_atoms: int, seed: int):
    """Seeded random discrete laws: Gaussian atoms, Dirichlet probabilities."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(dims[i % len(dims)])
        N = int(rng.integers(1, max_atoms + 1))
        atoms = rng.normal(size=(N, n))
        probs = rng.dirichlet(np.ones(N))
        out.append(DiscreteDistribution(atoms, probs / probs.sum()))
    return out


def run_vitale_check(cfg: dict) -> tuple:
    dists = random_distributions(cfg["count"], cfg.get("dims", [2, 3]), cfg.get("max_atoms", 12),
                                 cfg["seed"])
    recs = []
    try:
        for i, nu in enumerate(dists):
            a, b = ead_exact(nu), ead_zonoid(nu)
            gap = abs(a - b) / max(abs(a), 1e-300) if a != 0 else abs(b)
            recs.append({"index": i, "dim": nu.dim, "atoms": len(nu), "ead_exact": a,
                         "ead_zonoid": b, "rel_gap": gap})
    except GuardError as exc:
        raise GuardViolation(str(exc)) from exc
    worst = max(r["rel_gap"] for r in recs)
    cols = ["index", "dim", "atoms", "ead_exact", "ead_zonoid", "rel_gap"]
    summary = {"max_rel_gap": worst, "count": len(recs)}
    criteria = {"max_rel_gap_le_tol": worst <= _tol(cfg, "vitale_rel")}
    return cols, recs, summary, criteria


def run_monte_carlo(cfg: dict) -> tuple:
    dists = random_distributions(cfg["count"], cfg.get("dims", [2, 3]), cfg.get("max_atoms", 6),
                                 cfg["seed"])
    trials = int(cfg.get("trials", 100_000))
    ss = np.random.SeedSequence(cfg["seed"])
    seeds = [int(s.generate_state(1)[0]) for s in ss.spawn(len(dists))]
    recs = []
    for i, (nu, s) in enumerate(zip(dists, seeds)):
        exact = ead_exact(nu)
        mc = ead_monte_carlo(nu, trials, s)
        z = (mc.estimate - exact) / mc.stderr if mc.stderr > 0 else (0.0 if mc.estimate == exact else math.inf)
        recs.append({"index": i, "dim": nu.dim, "ead_exact": exact, "estimate": mc.estimate,
                     "stderr": mc.stderr, "z": z})
    worst = max(abs(r["z"]) for r in recs)
    cols = ["index", "dim", "ead_exact", "estimate", "stderr", "z"]
    summary = {"max_abs_z": worst, "count": len(recs), "trials": trials}
    criteria = {"all_within_sigmas": worst <= _tol(cfg, "mc_sigmas")}
    return cols, recs, summary, criteria


def run_wos(cfg: dict) -> tuple:
    D = _build_domain(cfg)
    mesh = _build_mesh(cfg, D)
    x = np.asarray(cfg["point"], dtype=float)
    w = cfg.get("wos", {})
    trials = int(w.get("trials", cfg.get("trials", 100_000)))
    mu = wos_measure(D, x, mesh, trials=trials, shell=w.get("shell"), seed=int(cfg["seed"]))
    cols = ["node_index"] + [f"tau_{i}" for i in range(D.m)] + ["weight"]
    recs = []
    for j, (tau, wt) in enumerate(zip(mesh.nodes, mu.weights)):
        rec = {"node_index": j, "weight": wt}
        rec.update({f"tau_{i}": tau[i] for i in range(D.m)})
        recs.append(rec)
    summary = {"trials": trials}
    criteria = {}
    if D.kind == "ball":
        tv = total_variation(mu.weights, poisson_weights(D, x, mesh).weights)
        summary["tv_to_kernel"] = tv
        criteria["tv_le_tol"] = tv <= _tol(cfg, "tv")
    return cols, recs, summary, criteria


RUNNERS = {
    "superharmonicity": run_superharmonicity,
    "equality_case": run_equality_case,
    "subharmonicity": run_subharmonicity,
    "random_det": run_random_det,
    "vitale_check": run_vitale_check,
    "monte_carlo": run_monte_carlo,
    "wos": run_wos,
}


def run_scenario(sc: Scenario, *, seed: Optional[int] = None, refine: int = 0) -> RunReport:
    """Execute a scenario; raises :class:`ScenarioError` for schema or guard problems."""
    cfg = effective_config(sc, seed=seed, refine=refine)
    try:
        cols, recs, summary, criteria = RUNNERS[cfg["kind"]](cfg)
    except GuardError as exc:
        raise GuardViolation(str(exc)) from exc
    provenance = {"config_sha256": config_hash(cfg), "seed": cfg.get("seed"),
                  "resolution": _resolution(cfg)}
    return RunReport(sc.name, cols, recs, _jsonable(summary),
                     {k: bool(v) for k, v in criteria.items()}, _jsonable(provenance))


def default_out_dir(sc: Scenario) -> Path:
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        return Path(env)
    if sc.path is not None:
        return sc.path.parent
    return Path.cwd()


def write_report(report: RunReport, out_dir) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{report.scenario}.csv"
    json_path = out_dir / f"{report.scenario}.summary.json"
    csv_path.write_text(report.csv_text())
    json_path.write_text(json.dumps(report.summary_doc(), indent=2, sort_keys=True) + "\n")
    return csv_path, json_path
