"""Solve a plate problem described by a JSON config document.

Example::

    {
      "mesh": {"structured": {"lower": [0, 0], "upper": [1, 1], "nx": 8, "ny": 8}},
      "material": {"E": 1e5, "nu": 0.3, "t": 0.01, "law": "plate2d"},
      "formulation": "ans", "quadrature": "full",
      "loads": [{"type": "pressure", "q": -1.0}],
      "constraints": [{"on": "boundary", "dofs": "clamp"}],
      "probes": [[0.5, 0.5]]
    }
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import analysis
from .assembly import Constraint, ElementOptions, LineLoad, PointLoad, UniformPressure, run_static
from .material import material_from_config
from .mesh import (
    Rectangle,
    density_from_config,
    domain_from_config,
    generate_structured_mesh,
    generate_voronoi_mesh,
    load_mesh,
)
from .output import write_csv, write_vtk

CLAMP_DOFS = ("ux", "uy", "w", "bx", "by")


class ConfigError(ValueError):
    pass


def mesh_from_config(cfg: dict, base: Path = Path(".")):
    if "file" in cfg:
        return load_mesh(base / cfg["file"])
    if "structured" in cfg:
        s = cfg["structured"]
        rect = Rectangle(tuple(s.get("lower", (0.0, 0.0))), tuple(s.get("upper", (1.0, 1.0))))
        return generate_structured_mesh(rect, int(s["nx"]), int(s.get("ny", s["nx"])), s.get("shape", "quad"))
    if "voronoi" in cfg:
        v = cfg["voronoi"]
        return generate_voronoi_mesh(domain_from_config(v["domain"]), int(v["n"]), density_from_config(v.get("density")),
                                     max_lloyd_iters=int(v.get("lloyd", 100)), seed=int(v.get("seed", 0)))
    raise ConfigError("mesh block needs one of 'file', 'structured' or 'voronoi'")


def selector(spec, tol: float = 1e-9):
    """Turn ``"boundary"``, ``{"x": v}``, ``{"y": v}`` or ``{"circle": ...}`` into a point selector."""
    if isinstance(spec, str):
        return spec
    if isinstance(spec, list):
        return np.asarray(spec, dtype=np.int64)
    if "x" in spec:
        return lambda p, v=float(spec["x"]): np.abs(p[:, 0] - v) <= tol * max(1.0, abs(v))
    if "y" in spec:
        return lambda p, v=float(spec["y"]): np.abs(p[:, 1] - v) <= tol * max(1.0, abs(v))
    if "circle" in spec:
        c = np.asarray(spec["circle"]["center"], dtype=float)
        r = float(spec["circle"]["radius"])
        return lambda p: np.abs(np.hypot(*(p - c).T) - r) <= 1e-6 * max(1.0, r)
    raise ConfigError(f"cannot interpret selector {spec!r}")


def loads_from_config(items) -> list:
    loads = []
    for item in items:
        kind = item.get("type")
        if kind == "pressure":
            loads.append(UniformPressure(float(item["q"])))
        elif kind == "point":
            loads.append(PointLoad(tuple(item["point"]), float(item["value"]), item.get("dof", "w")))
        elif kind == "line":
            loads.append(LineLoad(selector(item["on"]), float(item["intensity"]), item.get("dof", "w")))
        else:
            raise ConfigError(f"unknown load type {kind!r}")
    return loads


def constraints_from_config(items, with_membrane: bool) -> list:
    out = []
    for item in items:
        dofs = item.get("dofs", "clamp")
        if dofs == "clamp":
            dofs = CLAMP_DOFS if with_membrane else CLAMP_DOFS[2:]
        out.append(Constraint(selector(item["on"]), tuple(dofs), float(item.get("value", 0.0))))
    return out


def solve_config(cfg: dict, base: Path = Path("."), threads: int = 1):
    mesh = mesh_from_config(cfg["mesh"], base)
    material = material_from_config(cfg["material"])
    options = ElementOptions(cfg.get("formulation", "ans"), cfg.get("quadrature", "full"))
    loads = loads_from_config(cfg.get("loads", []))
    constraints = constraints_from_config(cfg.get("constraints", []), material.with_membrane)
    return run_static(mesh, material, loads, constraints, options, threads)


def run_config_file(path, outdir, threads: int = 1) -> list[dict]:
    path = Path(path)
    cfg = json.loads(path.read_text())
    result = solve_config(cfg, path.parent, threads)
    probes = np.asarray(cfg.get("probes", []), dtype=float).reshape(-1, 2)
    rows = []
    if len(probes):
        values = analysis.evaluate_field(result, probes)
        rows = [{"x": x, "y": y, "w": v[0], "bx": v[1], "by": v[2]} for (x, y), v in zip(probes, values)]
    rows.append({"ndof": len(result.u), "residual": result.residual,
                 "max_abs_w": float(np.max(np.abs(result.nodal("w"))))})
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / f"{path.stem}.csv", rows)
    write_vtk(out / f"{path.stem}.vtk", result.mesh, {name: result.nodal(name) for name in ("w", "bx", "by")})
    return rows
