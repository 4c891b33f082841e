"""Config-driven experiment runner with presets for the benchmark problems.

A JSON config has the sections ``problem``, ``mesh``, ``space``, ``method``,
``solver``, ``output``; unknown keys anywhere are rejected.  Exactly one of
the polynomial degree, the central-element degree, or the mesh resolution
may be a list, giving one run per value and method variant.  Each run emits
a :class:`RunReport`; the collection is written as CSV (17 significant
digits, atomic replace).
"""

import json
import math
import os
import tempfile
import time
from dataclasses import dataclass

import numpy as np

from . import analysis, linalg
from .assembly import IPDG, RIPDG, RIPDG_DEG, MethodConfig, ProblemSpec, assemble
from .basis import DgSpace
from .mesh import (
    MeshError,
    agglomerate,
    build_nine_element,
    build_triangulated_squares,
    build_uniform_squares,
    build_zigzag_nine_element,
    mesh_from_loops,
    validate,
)

CSV_HEADER = (
    "run_id,method,p_min,p_max,dofs,err_l2,err_h1,err_dg,"
    "max_sigma_interior,max_sigma_global,cond2,iters,wall_ms"
)


class ConfigError(ValueError):
    pass


@dataclass
class RunReport:
    run_id: str
    method: str
    p_min: int
    p_max: int
    dofs: int
    err_l2: float
    err_h1: float
    err_dg: float
    max_sigma_interior: float
    max_sigma_global: float
    cond2: float
    iters: int
    wall_ms: float

    def csv_row(self) -> str:
        def fmt(x):
            return f"{x:.17g}"

        return ",".join(
            [
                self.run_id,
                self.method,
                str(self.p_min),
                str(self.p_max),
                str(self.dofs),
                fmt(self.err_l2),
                fmt(self.err_h1),
                fmt(self.err_dg),
                fmt(self.max_sigma_interior),
                fmt(self.max_sigma_global),
                fmt(self.cond2),
                str(self.iters),
                fmt(self.wall_ms),
            ]
        )


# ----------------------------------------------------------------------
# problem registry


def _layer_profile(eps):
    s = 1.0 / math.sqrt(eps)

    def X(t):
        return 1.0 - (math.exp((t - 1.0) * s) + math.exp(-(t + 1.0) * s)) / (
            1.0 + math.exp(-2.0 * s)
        )

    def dX(t):
        return -s * (math.exp((t - 1.0) * s) - math.exp(-(t + 1.0) * s)) / (
            1.0 + math.exp(-2.0 * s)
        )

    return X, dX


def _make_poisson_sin(params):
    u = lambda x, y: math.sin(math.pi * x) * math.sin(math.pi * y)
    return ProblemSpec(
        diffusion=1.0,
        source=lambda x, y: 2.0 * math.pi**2 * u(x, y),
        boundary=lambda x, y: 0.0,
        exact=u,
        exact_grad=lambda x, y: (
            math.pi * math.cos(math.pi * x) * math.sin(math.pi * y),
            math.pi * math.sin(math.pi * x) * math.cos(math.pi * y),
        ),
        key="poisson_sin",
    )


def _make_gaussian_bump(params):
    alpha = float(params.get("alpha", 100.0))
    u = lambda x, y: math.exp(-alpha * (x * x + y * y))
    return ProblemSpec(
        diffusion=1.0,
        source=lambda x, y: (4.0 * alpha - 4.0 * alpha**2 * (x * x + y * y)) * u(x, y),
        boundary=u,
        exact=u,
        exact_grad=lambda x, y: (-2 * alpha * x * u(x, y), -2 * alpha * y * u(x, y)),
        key="gaussian_bump",
    )


def _make_reaction_layer(params):
    eps = float(params.get("eps", 1e-5))
    X, dX = _layer_profile(eps)
    return ProblemSpec(
        diffusion=eps,
        reaction=lambda x, y: 1.0,
        source=lambda x, y: X(x) + X(y) - X(x) * X(y),
        boundary=lambda x, y: 0.0,
        exact=lambda x, y: X(x) * X(y),
        exact_grad=lambda x, y: (dX(x) * X(y), X(x) * dX(y)),
        key="reaction_layer",
    )


def _make_linear(params):
    u = lambda x, y: x + 2.0 * y
    return ProblemSpec(
        diffusion=1.0,
        boundary=u,
        exact=u,
        exact_grad=lambda x, y: (1.0, 2.0),
        key="linear",
    )


PROBLEMS = {
    "poisson_sin": (_make_poisson_sin, (0.0, 1.0, 0.0, 1.0), {"keys": set()}),
    "gaussian_bump": (_make_gaussian_bump, (-1.0, 1.0, -1.0, 1.0), {"keys": {"alpha"}}),
    "reaction_layer": (_make_reaction_layer, (-1.0, 1.0, -1.0, 1.0), {"keys": {"eps"}}),
    "linear": (_make_linear, (0.0, 1.0, 0.0, 1.0), {"keys": set()}),
}


# ----------------------------------------------------------------------
# config handling


def _check_keys(section, allowed, where):
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)} in {where}")


def _build_mesh(mesh_cfg, domain, p_for_layer, eps):
    kind = mesh_cfg.get("kind")
    if kind == "uniform":
        return build_uniform_squares(int(mesh_cfg["n"]), domain)
    if kind == "tensor":
        xs = [float(v) for v in mesh_cfg["xs"]]
        ys = [float(v) for v in mesh_cfg["ys"]]
        vid = lambda i, j: j * len(xs) + i
        verts = [[x, y] for y in ys for x in xs]
        loops = [
            [vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]
            for j in range(len(ys) - 1)
            for i in range(len(xs) - 1)
        ]
        return mesh_from_loops(np.array(verts), loops)
    if kind in ("nine", "zigzag"):
        if "l" in mesh_cfg:
            l = float(mesh_cfg["l"])
        else:
            lam = float(mesh_cfg.get("layer_lambda", 0.9))
            if eps is None:
                raise ConfigError("layer-adapted mesh needs a problem with eps")
            l = min(lam * p_for_layer * math.sqrt(eps), 0.5)
        if kind == "nine":
            return build_nine_element(l)
        return build_zigzag_nine_element(l, int(mesh_cfg.get("teeth", 4)))
    if kind == "agglomerated":
        fine = build_triangulated_squares(int(mesh_cfg["fine_n"]), domain)
        return agglomerate(fine, int(mesh_cfg["count"]), int(mesh_cfg.get("seed", 0)))
    raise ConfigError(f"unknown mesh kind {kind!r}")


def _validate_config(cfg):
    _check_keys(cfg, ("problem", "mesh", "space", "method", "solver", "output"), "config")
    for required in ("problem", "mesh", "space", "method"):
        if required not in cfg:
            raise ConfigError(f"missing config section {required!r}")
    prob = cfg["problem"]
    key = prob.get("key")
    if key not in PROBLEMS:
        raise ConfigError(f"unknown problem key {key!r}; known: {sorted(PROBLEMS)}")
    _check_keys(prob, {"key"} | PROBLEMS[key][2]["keys"], "problem")
    _check_keys(
        cfg["mesh"],
        ("kind", "n", "l", "layer_lambda", "teeth", "fine_n", "count", "seed", "xs", "ys"),
        "mesh",
    )
    _check_keys(cfg["space"], ("p", "center_p"), "space")
    _check_keys(
        cfg["method"],
        ("variants", "theta", "penalty_scale", "weight_scheme", "quad_inc",
         "linf_safety", "workers"),
        "method",
    )
    _check_keys(cfg.get("solver", {}), ("tol", "dense_limit", "compute_cond"), "solver")
    _check_keys(
        cfg.get("output", {}),
        ("csv", "error_quad_extra", "include_reaction_in_dg"),
        "output",
    )


def _sweep(cfg):
    """Yield (label_suffix, p, center_p, n) per run of the single sweep axis."""
    space = cfg["space"]
    mesh = cfg["mesh"]
    p = space.get("p", 1)
    center = space.get("center_p")
    n = mesh.get("n")
    lists = [isinstance(v, (list, tuple)) for v in (p, center, n)]
    if sum(lists) > 1:
        raise ConfigError("at most one of p, center_p, n may be a list")
    if isinstance(p, (list, tuple)):
        return [(f"-p{v}", int(v), center, n) for v in p]
    if isinstance(center, (list, tuple)):
        return [(f"-pc{v}", int(p), int(v), n) for v in center]
    if isinstance(n, (list, tuple)):
        return [(f"-n{v}", int(p), center, int(v)) for v in n]
    return [(f"-p{int(p)}", int(p), center, n)]


def _method_configs(cfg):
    m = cfg["method"]
    base = dict(
        theta=float(m.get("theta", 1.0)),
        penalty_scale=float(m.get("penalty_scale", 1.0)),
        weight_scheme=m.get("weight_scheme", "arithmetic"),
        quad_inc=int(m.get("quad_inc", 3)),
        linf_safety=float(m.get("linf_safety", 1.0)),
        workers=int(m.get("workers", 1)),
    )
    out = []
    for v in m.get("variants", [IPDG, RIPDG]):
        if isinstance(v, str):
            out.append(MethodConfig(variant=v, **base))
        else:
            _check_keys(v, ("variant", "penalty_scale", "weight_scheme"), "method.variants")
            params = dict(base)
            params.update(
                penalty_scale=float(v.get("penalty_scale", base["penalty_scale"])),
                weight_scheme=v.get("weight_scheme", base["weight_scheme"]),
            )
            out.append(MethodConfig(variant=v["variant"], **params))
    return out


def run_config(cfg, out_dir=None):
    """Execute all runs of a config; returns (reports, csv_path or None)."""
    if isinstance(cfg, (str, os.PathLike)):
        with open(cfg) as fh:
            cfg = json.load(fh)
    _validate_config(cfg)
    prob_cfg = dict(cfg["problem"])
    key = prob_cfg.pop("key")
    make, domain, _ = PROBLEMS[key]
    problem = make(prob_cfg)
    eps = float(prob_cfg["eps"]) if "eps" in prob_cfg else None
    solver = cfg.get("solver", {})
    tol = float(solver.get("tol", 1e-12))
    dense_limit = int(solver.get("dense_limit", linalg.DENSE_LIMIT))
    compute_cond = bool(solver.get("compute_cond", True))
    output = cfg.get("output", {})
    extra = int(output.get("error_quad_extra", 0))
    include_reaction = output.get("include_reaction_in_dg")

    reports = []
    for config in _method_configs(cfg):
        for suffix, p, center_p, n in _sweep(cfg):
            t0 = time.perf_counter()
            mesh_cfg = dict(cfg["mesh"])
            if n is not None:
                mesh_cfg["n"] = n
            mesh = _build_mesh(mesh_cfg, domain, p, eps)
            diags = validate(mesh)
            if diags:
                raise MeshError("; ".join(diags))
            degrees = np.full(len(mesh.elements), p)
            if center_p is not None:
                if len(mesh.elements) != 9:
                    raise ConfigError("center_p needs a 3x3 element layout")
                degrees[4] = center_p
            space = DgSpace(mesh, degrees)
            system = assemble(space, problem, config)
            x, info = linalg.solve(system.A, system.b, tol=tol, dense_limit=dense_limit)
            cond2 = (
                linalg.condition_number_2(system.A, dense_limit=dense_limit)
                if compute_cond
                else float("nan")
            )
            err_l2 = analysis.error_l2(space, x, problem.exact, extra_degree=extra)
            err_h1 = analysis.error_broken_h1(space, x, problem.exact_grad, extra_degree=extra)
            err_dg = analysis.error_dg(
                space, x, problem, system.face_weights,
                include_reaction=include_reaction, extra_degree=extra,
            )
            wall_ms = (time.perf_counter() - t0) * 1e3
            reports.append(
                RunReport(
                    run_id=f"{key}-{config.variant}{suffix}",
                    method=config.variant,
                    p_min=int(np.min(degrees)),
                    p_max=int(np.max(degrees)),
                    dofs=space.total_dofs,
                    err_l2=err_l2,
                    err_h1=err_h1,
                    err_dg=err_dg,
                    max_sigma_interior=system.max_sigma(interior_only=True),
                    max_sigma_global=system.max_sigma(),
                    cond2=cond2,
                    iters=info.iterations,
                    wall_ms=wall_ms,
                )
            )
    csv_path = None
    if output.get("csv"):
        target_dir = out_dir or "."
        os.makedirs(target_dir, exist_ok=True)
        csv_path = os.path.join(target_dir, output["csv"])
        write_csv(reports, csv_path)
    return reports, csv_path


def write_csv(reports, path):
    """Write reports atomically in run order."""
    body = "\n".join([CSV_HEADER] + [r.csv_row() for r in reports]) + "\n"
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(body)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ----------------------------------------------------------------------
# presets

PRESET_NAMES = ("ex1", "ex1zz", "ex2", "ex2qual", "ex3", "uniform-identity", "worked-quads")


def preset(name, p=None, eps=None, method=None):
    """Fully resolved config for a named experiment."""
    if name == "ex1":
        cfg = {
            "problem": {"key": "reaction_layer", "eps": 1e-5},
            "mesh": {"kind": "nine", "layer_lambda": 0.9},
            "space": {"p": list(range(1, 8))},
            "method": {"variants": [IPDG, RIPDG], "quad_inc": 50},
            # the exact solution's layer tail inside the big center element
            # dominates the high-p errors; resolving it needs ~70 nodes/axis
            "output": {"csv": "ex1.csv", "error_quad_extra": 120},
        }
    elif name == "ex1zz":
        cfg = {
            "problem": {"key": "reaction_layer", "eps": 1e-3},
            "mesh": {"kind": "zigzag", "layer_lambda": 0.9, "teeth": 4},
            "space": {"p": list(range(1, 7))},
            "method": {"variants": [IPDG, RIPDG], "quad_inc": 30},
            "output": {"csv": "ex1zz.csv", "error_quad_extra": 30},
        }
    elif name == "ex2":
        cfg = {
            "problem": {"key": "gaussian_bump", "alpha": 100.0},
            "mesh": {"kind": "uniform", "n": 3},
            "space": {"p": 2, "center_p": 30},
            "method": {"variants": [IPDG, RIPDG], "quad_inc": 36},
            "output": {"csv": "ex2.csv", "error_quad_extra": 30},
        }
    elif name == "ex2qual":
        cfg = {
            "problem": {"key": "gaussian_bump", "alpha": 10.0},
            "mesh": {"kind": "uniform", "n": 3},
            "space": {"p": 1, "center_p": [3, 5, 8]},
            "method": {"variants": [IPDG, RIPDG], "quad_inc": 24},
            "output": {"csv": "ex2qual.csv", "error_quad_extra": 20},
        }
    elif name == "ex3":
        cfg = {
            "problem": {"key": "poisson_sin"},
            "mesh": {"kind": "agglomerated", "fine_n": 16, "count": 16, "seed": 7},
            "space": {"p": [1, 2, 3, 4]},
            "method": {"variants": [IPDG, RIPDG], "quad_inc": 6},
            "output": {"csv": "ex3.csv", "error_quad_extra": 6},
        }
    elif name == "uniform-identity":
        cfg = {
            "problem": {"key": "poisson_sin"},
            "mesh": {"kind": "uniform", "n": 4},
            "space": {"p": 2},
            "method": {
                "variants": [
                    {"variant": IPDG, "penalty_scale": 1.0},
                    {"variant": RIPDG, "penalty_scale": 2.0},
                ],
                "quad_inc": 4,
            },
            "output": {"csv": "uniform_identity.csv", "error_quad_extra": 4},
        }
    elif name == "worked-quads":
        delta = 0.25
        cfg = {
            "problem": {"key": "linear"},
            "mesh": {"kind": "tensor", "xs": [0.0, 1.0 - delta, 1.0], "ys": [0.0, 1.0]},
            "space": {"p": 2},
            "method": {"variants": [IPDG, RIPDG]},
            "output": {"csv": "worked_quads.csv"},
        }
    else:
        raise ConfigError(f"unknown preset {name!r}; known: {PRESET_NAMES}")
    if p is not None:
        cfg["space"]["p"] = int(p)
    if eps is not None:
        if cfg["problem"]["key"] != "reaction_layer":
            raise ConfigError(f"preset {name!r} has no eps parameter")
        cfg["problem"]["eps"] = float(eps)
    if method is not None and method != "both":
        cfg["method"]["variants"] = [
            v
            for v in cfg["method"]["variants"]
            if (v if isinstance(v, str) else v["variant"]) == method
        ]
        if not cfg["method"]["variants"]:
            raise ConfigError(f"method {method!r} not part of preset {name!r}")
    return cfg
