"""Benchmark cases: default setups, pipelines and pass/fail checks."""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import analysis
from .assembly import (
    Constraint,
    ElementOptions,
    FunctionLoad,
    LineLoad,
    MomentLineLoad,
    PointLoad,
    UniformPressure,
    clamp,
    run_static,
)
from .material import PlateMaterial2D, SolidMaterial3D, ThicknessMode, material_from_config
from .mesh import (
    Circle,
    DensityField,
    LBracket,
    MeshGenerationError,
    Rectangle,
    SingularConfigurationError,
    cantilever_six_polygons,
    distort_center_node,
    generate_structured_mesh,
    generate_voronoi_mesh,
)
from .output import write_csv, write_svg_plot, write_vtk

REF_ENV = "PLATEFORGE_REF_DATA"


def load_references(path=None) -> dict:
    path = path or os.environ.get(REF_ENV)
    if path:
        return json.loads(Path(path).read_text())
    return json.loads(resources.files("plateforge").joinpath("data/references.json").read_text())


# --------------------------------------------------------------------------- reports

@dataclass
class Check:
    name: str
    value: float
    target: object
    passed: bool

    def as_row(self) -> dict:
        return {"check": self.name, "value": self.value, "target": str(self.target), "passed": self.passed}


@dataclass
class RunReport:
    case: str
    params: dict
    rows: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    series: dict = field(default_factory=dict)
    wall_time: float = 0.0
    field_result: object = None
    plot: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name, value, target, passed):
        self.checks.append(Check(name, float(value) if value is not None else math.nan, target, bool(passed)))

    def summary(self) -> dict:
        return {"case": self.case, "params": self.params, "passed": self.passed,
                "wall_time": self.wall_time, "checks": [c.as_row() for c in self.checks]}

    def write(self, outdir) -> None:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        summary_row = {"case": self.case, "passed": self.passed, "n_checks": len(self.checks),
                       "n_failed": sum(not c.passed for c in self.checks)}
        write_csv(out / f"{self.case}.csv", self.rows + [summary_row])
        write_csv(out / f"{self.case}-checks.csv", [c.as_row() for c in self.checks])
        (out / f"{self.case}.json").write_text(json.dumps(self.summary(), indent=2, default=str))
        if self.series:
            write_svg_plot(out / f"{self.case}.svg", self.series, **self.plot)
        if self.field_result is not None:
            res = self.field_result
            cells = analysis.cell_resultants(res)
            write_vtk(out / f"{self.case}.vtk", res.mesh,
                      {name: res.nodal(name) for name in ("w", "bx", "by")},
                      {"m_xx": cells.m[:, 0], "m_yy": cells.m[:, 1], "m_xy": cells.m[:, 2],
                       "q_x": cells.q[:, 0], "q_y": cells.q[:, 1]})


# --------------------------------------------------------------------------- helpers

def on_x(value, tol=1e-9):
    return lambda p: np.abs(p[:, 0] - value) <= tol * max(1.0, abs(value))


def on_y(value, tol=1e-9):
    return lambda p: np.abs(p[:, 1] - value) <= tol * max(1.0, abs(value))


def quarter_constraints(half: float, clamped: bool = True, membrane: bool = False, hard: bool = True):
    """Edges x=0, y=0 supported; x=half and y=half are symmetry lines."""
    cons = []
    if clamped:
        cons += [clamp(on_x(0.0), membrane), clamp(on_y(0.0), membrane)]
    else:
        cons += [Constraint(on_x(0.0), ("w",) + (("by",) if hard else ())),
                 Constraint(on_y(0.0), ("w",) + (("bx",) if hard else ()))]
    cons += [Constraint(on_x(half), ("ux", "bx")), Constraint(on_y(half), ("uy", "by"))]
    return cons


def _free_edge_w(res, x):
    mask = np.isclose(res.mesh.nodes[:, 0], x)
    return float(np.mean(res.nodal("w")[mask]))


def _quarter_mesh(kind, half, n, seed=0):
    rect = Rectangle((0.0, 0.0), (half, half))
    if kind == "quad":
        return generate_structured_mesh(rect, n, n, "quad")
    if kind == "tri":
        return generate_structured_mesh(rect, n, n, "tri")
    if kind == "poly":
        return generate_voronoi_mesh(rect, n * n, seed=seed)
    raise ValueError(f"unknown mesh type {kind!r}")


def _material(p, t):
    return material_from_config({"E": p["E"], "nu": p["nu"], "t": t, "law": p.get("law", "plate2d"),
                                 "thickness_mode": p.get("thickness_mode", "linear")})


def _membrane(p) -> bool:
    return p.get("law", "plate2d") == "solid3d"


def _options(params):
    return ElementOptions(params.get("formulation", "ans"), params.get("quadrature", "full"))


# --------------------------------------------------------------------------- cases

def case_zero_energy(p, refs, threads=1):
    rep = RunReport("zero-energy", p)
    ref = refs["zero_energy"]
    mat = PlateMaterial2D(p["E"], p["nu"], p["t"])
    for n in p["shapes"]:
        eig = analysis.zero_energy_mode_test(n, mat, _options(p))
        rep.rows.append({"sides": n, "zero_count": eig.zero_count,
                         "eigenvalues": " ".join(f"{v:.10g}" for v in eig.eigenvalues)})
        rep.check(f"{n}-gon zero modes", eig.zero_count, 3, eig.zero_count == 3)
        expected = ref["nonzero"].get(str(n))
        if expected is not None and len(expected) == len(eig.nonzero):
            dev = np.max(np.abs(eig.nonzero - np.array(expected)) / np.array(expected))
            rep.check(f"{n}-gon spectrum", dev, f"<= {ref['rel_tol']}", dev <= ref["rel_tol"])
    return rep


def case_cantilever_moment(p, refs, threads=1):
    rep = RunReport("cantilever-moment", p)
    ref = refs["cantilever_moment"]
    length, width = 2.0, 1.0
    mesh = cantilever_six_polygons() if p["elements"] == 6 else generate_structured_mesh(
        Rectangle((0, 0), (length, width)), p["elements"], 1)
    for form in p["formulations"]:
        for t in p["thicknesses"]:
            mat = _material(p, t)
            res = run_static(mesh, mat, [MomentLineLoad(on_x(length), p["m"])], [clamp(on_x(0.0), _membrane(p))],
                             ElementOptions(form, p.get("quadrature", "full")), threads)
            w_ref = analysis.cantilever_moment_reference(p["m"], length, p["E"], t, width)
            err = (_free_edge_w(res, length) - w_ref) / w_ref
            rep.field_result = res
            rep.rows.append({"formulation": form, "t": t, "elements": mesh.n_elements, "w": _free_edge_w(res, length),
                             "w_ref": w_ref, "rel_error": err})
            if form == "ans":
                tol = ref["ans_six_polygons_tol"] if p["elements"] == 6 else ref["ans_one_element_tol"]
                rep.check(f"ans t={t}", abs(err), f"<= {tol}", abs(err) <= tol)
            elif p["elements"] == 1 and f"{t:g}" in ref["standard_one_element"]:
                target = ref["standard_one_element"][f"{t:g}"]
                rep.check(f"standard t={t}", err, f"{target} +- {ref['tol_abs']}", abs(err - target) <= ref["tol_abs"])
    return rep


def case_cantilever_udl(p, refs, threads=1):
    rep = RunReport("cantilever-udl", p, plot={"xlabel": "DOFs", "ylabel": "|w/w_ref - 1|", "logx": True, "logy": True})
    tol = refs["cantilever_udl"]["tol"]
    length, width = 2.0, 1.0

    def sweep(t, form, quad):
        mat = _material(p, t)
        w_ref = analysis.cantilever_udl_reference(p["q"], length, p["E"], p["nu"], t, width, mat.k)
        out = []
        for n in p["n_list"]:
            mesh = generate_structured_mesh(Rectangle((0, 0), (length, width)), n, 1)
            res = run_static(mesh, mat, [UniformPressure(p["q"])], [clamp(on_x(0.0), _membrane(p))], ElementOptions(form, quad), threads)
            ratio = _free_edge_w(res, length) / w_ref
            rep.field_result = res
            out.append((n, len(res.u), ratio))
            rep.rows.append({"t": t, "formulation": form, "quadrature": quad, "n": n, "dofs": len(res.u),
                             "w_ratio": ratio})
        return out

    for t in p["thicknesses"]:
        ser = sweep(t, "ans", "full")
        rep.check(f"ans t={t} finest ratio", ser[-1][2], f"1 +- {tol}", abs(ser[-1][2] - 1.0) <= tol)
    t = p["compare_t"]
    ans = sweep(t, "ans", "full")
    rep.series["ANS"] = ([s[1] for s in ans], [max(abs(s[2] - 1), 1e-16) for s in ans])
    for label, quad in (("R", "reduced"), ("SR", "selective")):
        alt = sweep(t, "standard", quad)
        rep.series[label] = ([s[1] for s in alt], [max(abs(s[2] - 1), 1e-16) for s in alt])
        worst = max(abs(a[2] - 1) - abs(b[2] - 1) for a, b in zip(ans, alt))
        rep.check(f"ans error <= {label} error at every sweep point", worst, "<= 0", worst <= 0.0)
    return rep


def case_clamped_square_udl(p, refs, threads=1):
    rep = RunReport("clamped-square-udl", p, plot={"xlabel": "DOFs", "ylabel": "w/w_ref", "logx": True})
    ref = refs["clamped_square_udl"]
    half = p["L"] / 2.0
    mat = _material(p, p["t"])
    loads = [UniformPressure(p["q"])]
    cons = quarter_constraints(half, membrane=_membrane(p))
    w_ref = ref["w_center"]
    errors = {}
    for kind in p["mesh_types"]:
        xs, ys = [], []
        for n in p["n_list"]:
            mesh = _quarter_mesh(kind, half, n, p["seed"])
            res = run_static(mesh, mat, loads, cons, _options(p), threads)
            w = res.at_node((half, half))
            rep.rows.append({"mesh": kind, "n": n, "elements": mesh.n_elements, "dofs": len(res.u), "w_center": w,
                             "ratio": w / w_ref})
            xs.append(len(res.u))
            ys.append(w / w_ref)
            errors[kind] = abs(w / w_ref - 1.0)
            if kind == "quad" and n == p["n_check"]:
                rep.check(f"quad {n}x{n} center deflection", w, f"{w_ref} +- {ref['tol'] * 100}%",
                          abs(w / w_ref - 1.0) <= ref["tol"])
                rep.field_result = res
        rep.series[kind] = (xs, ys)
    if {"quad", "tri", "poly"} <= set(errors):
        rep.check("quad <= poly <= tri error at finest level", errors["poly"],
                  f"[{errors['quad']:.4g}, {errors['tri']:.4g}]", errors["quad"] <= errors["poly"] <= errors["tri"])
    return rep


def case_distortion(p, refs, threads=1):
    rep = RunReport("distortion", p, plot={"xlabel": "s", "ylabel": "w(C)"})
    ref = refs["distortion"]
    half = p["L"] / 2.0
    mat = _material(p, p["t"])
    base = generate_structured_mesh(Rectangle((0, 0), (half, half)), 2, 2)
    fixed_centers = np.column_stack([p["fixed_x0"], p["fixed_y0"]])
    loads = [PointLoad((half, half), p["P"] / 4.0)]
    cons = quarter_constraints(half, membrane=_membrane(p))
    results = {}
    for policy in p["policies"]:
        xs, ys = [], []
        for s in p["s_values"]:
            try:
                mesh = distort_center_node(base, s, centers=fixed_centers if policy == "fixed" else "moving")
                res = run_static(mesh, mat, loads, cons, _options(p), threads)
                w = res.at_node((half, half))
                status = "ok"
                if s == 0:
                    rep.field_result = res
                xs.append(s)
                ys.append(w)
            except SingularConfigurationError:
                w, status = math.nan, "singular"
            results[(policy, s)] = (w, status)
            rep.rows.append({"sc": policy, "s": s, "w": w, "status": status})
        rep.series[f"{policy} SC"] = (xs, ys)
    if {"moving", "fixed"} <= set(p["policies"]) and 0 in p["s_values"]:
        wm, wf = results[("moving", 0)][0], results[("fixed", 0)][0]
        rep.check("s=0 policies agree", abs(wm - wf), "<= 1e-10", abs(wm - wf) <= 1e-10 * max(1.0, abs(wm)))
        rep.check("s=0 within band of w_ref", wm, f"{ref['w_center']} +- {ref['tol'] * 100}%",
                  abs(wm / ref["w_center"] - 1.0) <= ref["tol"])
    for s in p["singular_s"]:
        if ("fixed", s) in results:
            rep.check(f"fixed SC singular at s={s}", 0, "singular", results[("fixed", s)][1] == "singular")
        if ("moving", s) in results:
            rep.check(f"moving SC solves at s={s}", results[("moving", s)][0], "finite", results[("moving", s)][1] == "ok")
    return rep


def case_poisson_locking(p, refs, threads=1):
    rep = RunReport("poisson-locking", p, plot={"xlabel": "DOFs", "ylabel": "w/w_ref", "logx": True})
    ref = refs["poisson_locking"]
    half = p["L"] / 2.0
    loads = [PointLoad((half, half), p["P"] / 4.0)]
    cons = quarter_constraints(half, membrane=True)
    modes = [m for m in p["modes"]]
    w_by = {}
    for nu, w_ref in ((p["nu"], ref["w_ref_nu03"]), (0.0, ref["w_ref_nu0"])):
        for mode in modes:
            mat = SolidMaterial3D(p["E"], nu, p["t"], mode=ThicknessMode(mode))
            xs, ys = [], []
            for n in p["n_list"]:
                mesh = generate_structured_mesh(Rectangle((0, 0), (half, half)), n, n)
                res = run_static(mesh, mat, loads, cons, _options(p), threads)
                w = res.at_node((half, half))
                w_by[(nu, mode, n)] = w
                rep.field_result = res
                rep.rows.append({"nu": nu, "mode": mode, "n": n, "dofs": len(res.u), "w": w, "ratio": w / w_ref})
                xs.append(len(res.u))
                ys.append(w / w_ref)
            rep.series[f"nu={nu} {mode}"] = (xs, ys)
            if nu != 0.0:
                target = ref["constant_ratio"] if mode == "constant" else ref["linear_ratio"]
                rep.check(f"nu={nu} {mode} converged ratio", ys[-1], f"{target} +- {ref['tol']}",
                          abs(ys[-1] - target) <= ref["tol"])
    if {"linear", "constant"} <= set(modes):
        dev = max(abs(w_by[(0.0, "linear", n)] - w_by[(0.0, "constant", n)]) / abs(w_by[(0.0, "linear", n)])
                  for n in p["n_list"])
        rep.check("nu=0 modes identical", dev, "<= 1e-9", dev <= 1e-9)
    return rep


def _square_norms(p, t, n_list, threads):
    exact = analysis.SquareLoadFunction(p["E"], p["nu"], t)
    mat = _material(p, t)
    out = []
    for n in n_list:
        mesh = generate_structured_mesh(Rectangle((0, 0), (1, 1)), n, n)
        res = run_static(mesh, mat, [FunctionLoad(exact.load)], [clamp("boundary", _membrane(p))], _options(p), threads)
        out.append((n, analysis.error_norms(res, exact), res))
    return out


def case_square_load_function(p, refs, threads=1):
    rep = RunReport("square-load-function", p, plot={"xlabel": "h", "ylabel": "relative error", "logx": True, "logy": True})
    lo2, hi2 = refs["rates"]["l2"]
    lo1, hi1 = refs["rates"]["h1s"]
    for t in p["thicknesses"]:
        solved = _square_norms(p, t, p["n_list"], threads)
        norms = [(n, nr) for n, nr, _ in solved]
        rep.field_result = solved[-1][2]
        for n, nr in norms:
            rep.rows.append({"t": t, "n": n, "h": nr.h, "l2": nr.l2_rel, "h1s": nr.h1s_rel, "energy": nr.energy_rel})
        h = [nr.h for _, nr in norms]
        fit2 = analysis.fit_convergence_rate(h, [nr.l2_rel for _, nr in norms])
        fit1 = analysis.fit_convergence_rate(h, [nr.h1s_rel for _, nr in norms])
        rep.series[f"L2 t={t}"] = (h, [nr.l2_rel for _, nr in norms])
        rep.series[f"H1s t={t}"] = (h, [nr.h1s_rel for _, nr in norms])
        rep.check(f"t={t} L2 slope", fit2.slope, f"[{lo2}, {hi2}]", lo2 <= fit2.slope <= hi2)
        rep.check(f"t={t} H1s slope", fit1.slope, f"[{lo1}, {hi1}]", lo1 <= fit1.slope <= hi1)
    return rep


def case_energy_norm(p, refs, threads=1):
    rep = RunReport("energy-norm", p)
    ref = refs["energy_norm"]
    solved = _square_norms(p, p["t"], ref["n_per_side"], threads)
    norms = [(n, nr) for n, nr, _ in solved]
    rep.field_result = solved[-1][2]
    for (n, nr), target in zip(norms, ref["e_s"]):
        rep.rows.append({"n": n, "e_s": nr.energy_rel, "reference": target})
        rep.check(f"e_s n={n}", nr.energy_rel, f"{target} +- {ref['tol_abs']}", abs(nr.energy_rel - target) <= ref["tol_abs"])
    return rep


def case_simply_supported(p, refs, threads=1):
    rep = RunReport("simply-supported", p, plot={"xlabel": "DOFs", "ylabel": "100 D w_c / (q L^4)", "logx": True})
    ref = refs["simply_supported"]
    half = p["L"] / 2.0
    for t in p["thicknesses"]:
        mat = _material(p, t)
        xs, ys = [], []
        for n in p["n_list"]:
            mesh = _quarter_mesh(p["mesh"], half, n, p["seed"])
            res = run_static(mesh, mat, [UniformPressure(p["q"])],
                             quarter_constraints(half, clamped=False, membrane=_membrane(p), hard=p["support"] == "hard"), _options(p), threads)
            rep.field_result = res
            delta = 100.0 * mat.D * res.at_node((half, half)) / (p["q"] * p["L"] ** 4)
            rep.rows.append({"t": t, "n": n, "dofs": len(res.u), "delta": delta})
            xs.append(len(res.u))
            ys.append(delta)
        rep.series[f"t={t}"] = (xs, ys)
        target = ref["delta"].get(f"{t:g}")
        if target is not None:
            rep.check(f"t={t} deflection coefficient", ys[-1], f"{target} +- {ref['tol'] * 100}%",
                      abs(ys[-1] / target - 1.0) <= ref["tol"])
    return rep


def case_circular(p, refs, threads=1):
    rep = RunReport("circular", p, plot={"xlabel": "h", "ylabel": "relative error", "logx": True, "logy": True})
    lo2, hi2 = refs["rates"]["l2"]
    lo1, hi1 = refs["rates"]["h1s"]
    disk = Circle((0.0, 0.0), 1.0)
    meshes = [generate_voronoi_mesh(disk, n, seed=p["seed"], max_lloyd_iters=p["lloyd"]) for n in p["n_list"]]
    for t in p["thicknesses"]:
        exact = analysis.ClampedCircular(p["E"], p["nu"], t)
        mat = _material(p, t)
        h, l2, h1 = [], [], []
        for mesh in meshes:
            res = run_static(mesh, mat, [UniformPressure(p["q"])], [clamp("boundary", _membrane(p))], _options(p), threads)
            nr = analysis.error_norms(res, exact)
            rep.field_result = res
            rep.rows.append({"t": t, "elements": mesh.n_elements, "h": nr.h, "l2": nr.l2_rel, "h1s": nr.h1s_rel})
            h.append(nr.h)
            l2.append(nr.l2_rel)
            h1.append(nr.h1s_rel)
        fit2, fit1 = analysis.fit_convergence_rate(h, l2), analysis.fit_convergence_rate(h, h1)
        rep.series[f"L2 t={t}"] = (h, l2)
        rep.series[f"H1s t={t}"] = (h, h1)
        rep.check(f"t={t} L2 slope", fit2.slope, f"[{lo2}, {hi2}]", lo2 <= fit2.slope <= hi2)
        rep.check(f"t={t} H1s slope", fit1.slope, f"[{lo1}, {hi1}]", lo1 <= fit1.slope <= hi1)
    return rep


def bracket_setup(p):
    dom = LBracket(fillet=p["fillet"])
    clamp_holes = [dom.holes[i] for i in p["clamped_holes"]]

    def on_clamped_hole(pts):
        tol = 1e-6
        hit = np.zeros(len(pts), dtype=bool)
        for h in clamp_holes:
            hit |= np.abs(np.hypot(pts[:, 0] - h.center[0], pts[:, 1] - h.center[1]) - h.radius) <= tol
        return hit

    def on_loaded_edge(pts):
        return (np.abs(pts[:, 0] - dom.length) <= 1e-9) & (pts[:, 1] >= dom.height - dom.arm - 1e-9)

    return dom, [LineLoad(on_loaded_edge, p["line_load"])], [clamp(on_clamped_hole, _membrane(p))]


def bracket_density(p) -> DensityField:
    dom = LBracket(fillet=p["fillet"])
    attractors = [(h.center[0], h.center[1], p["sigma"]) for h in dom.holes]
    attractors.append((*p["stress_probe"], p["sigma"]))
    return DensityField(tuple(attractors), p["background"])


def solve_bracket(p, n, formulation, refined=False, threads=1, seed=None):
    dom, loads, cons = bracket_setup(p)
    density = bracket_density(p) if refined else DensityField()
    mesh = generate_voronoi_mesh(dom, n, density, max_lloyd_iters=p["lloyd"], seed=p["seed"] if seed is None else seed)
    mat = _material(p, p["t"])
    return run_static(mesh, mat, loads, cons, ElementOptions(formulation, "full"), threads)


def case_l_bracket(p, refs, threads=1):
    rep = RunReport("l-bracket", p)
    ref = refs["l_bracket"]
    w_ref = ref["w_probe"]
    probe = np.array([p["w_probe"]])

    def ratio(res):
        return float(analysis.evaluate_field(res, probe)[0, 0]) / w_ref

    r_ans = ratio(solve_bracket(p, p["n_ans"], "ans", threads=threads))
    r_std = ratio(solve_bracket(p, p["n_standard"], "standard", threads=threads))
    rep.rows += [{"mesh": "uniform", "elements": p["n_ans"], "formulation": "ans", "w_ratio": r_ans},
                 {"mesh": "uniform", "elements": p["n_standard"], "formulation": "standard", "w_ratio": r_std}]
    rep.check(f"ans {p['n_ans']} elements w ratio", r_ans, f">= {ref['ans_min_ratio']}", r_ans >= ref["ans_min_ratio"])
    rep.check(f"standard {p['n_standard']} elements w ratio", r_std, f"<= {ref['standard_max_ratio']}",
              r_std <= ref["standard_max_ratio"])
    r_uni = ratio(solve_bracket(p, p["n_compare"], "ans", threads=threads))
    r_ref = ratio(solve_bracket(p, p["n_compare"], "ans", refined=True, threads=threads))
    rep.rows += [{"mesh": "uniform", "elements": p["n_compare"], "formulation": "ans", "w_ratio": r_uni},
                 {"mesh": "refined", "elements": p["n_compare"], "formulation": "ans", "w_ratio": r_ref}]
    rep.check("refined error <= uniform error", abs(r_ref - 1), f"<= {abs(r_uni - 1):.4g}", abs(r_ref - 1) <= abs(r_uni - 1))
    res = solve_bracket(p, p["n_stress"], "ans", threads=threads)
    mxx = float(analysis.recover_stress_resultants(res, np.array([p["stress_probe"]])).m_xx[0])
    rep.rows.append({"mesh": "uniform", "elements": p["n_stress"], "formulation": "ans", "w_ratio": ratio(res), "m_xx": mxx})
    lo, hi = ref["mxx_band"]
    rep.check(f"m_xx at {tuple(p['stress_probe'])}", mxx, f"[{lo}, {hi}]", lo <= mxx <= hi)
    rep.field_result = res
    return rep


# --------------------------------------------------------------------------- registry

DEFAULTS = {
    "zero-energy": {"E": 1e5, "nu": 0.25, "t": 0.01, "shapes": [3, 4, 5, 6, 7, 8]},
    "cantilever-moment": {"E": 1e5, "nu": 0.0, "m": 1.0, "elements": 1, "thicknesses": [1.0, 0.1, 0.01, 0.001],
                          "formulations": ["standard", "ans"]},
    "cantilever-udl": {"E": 1e5, "nu": 0.0, "q": -10.0, "thicknesses": [1.0, 0.1, 0.01, 0.001],
                       "n_list": [1, 2, 4, 8, 16], "compare_t": 0.01},
    "clamped-square-udl": {"E": 10.92e6, "nu": 0.3, "t": 0.01, "L": 10.0, "q": -1.0, "n_list": [2, 4, 8, 16],
                           "n_check": 16, "mesh_types": ["quad", "tri", "poly"], "seed": 0},
    "distortion": {"E": 1e4, "nu": 0.3, "t": 1.0, "L": 100.0, "P": -16.367,
                   "s_values": sorted(set(range(-14, 15)) | {-12.5, 12.5}), "policies": ["moving", "fixed"],
                   "fixed_x0": [12.5, 37.5, 12.5, 37.5], "fixed_y0": [12.5, 12.5, 37.5, 37.5],
                   "singular_s": [-12.5, 12.5]},
    "poisson-locking": {"E": 1e4, "nu": 0.3, "t": 1.0, "L": 100.0, "P": -16.367, "n_list": [2, 4, 8, 16, 32],
                        "modes": ["linear", "constant"]},
    "square-load-function": {"E": 1.092e7, "nu": 0.3, "thicknesses": [0.2, 0.1, 0.001], "n_list": list(range(2, 21))},
    "energy-norm": {"E": 1.092e7, "nu": 0.3, "t": 0.2},
    "simply-supported": {"E": 10.92e5, "nu": 0.3, "L": 10.0, "q": 1.0, "thicknesses": [1.0, 0.01],
                         "n_list": [4, 8, 16, 32], "mesh": "quad", "support": "hard", "seed": 0},
    "circular": {"E": 10.92e6, "nu": 0.3, "q": 1.0, "thicknesses": [0.1, 0.2],
                 "n_list": [16, 32, 64, 128, 256, 512, 1024], "seed": 1, "lloyd": 100},
    "l-bracket": {"E": 200e9, "nu": 0.0, "t": 0.01, "line_load": -100.0, "fillet": 0.25, "clamped_holes": [0, 1],
                  "w_probe": [4.0, 6.0], "stress_probe": [0.75, 5.5], "n_ans": 500, "n_standard": 2000,
                  "n_compare": 300, "n_stress": 3000, "sigma": 0.3, "background": 0.2, "seed": 0, "lloyd": 100},
}

CASES = {
    "zero-energy": case_zero_energy,
    "cantilever-moment": case_cantilever_moment,
    "cantilever-udl": case_cantilever_udl,
    "clamped-square-udl": case_clamped_square_udl,
    "distortion": case_distortion,
    "poisson-locking": case_poisson_locking,
    "square-load-function": case_square_load_function,
    "energy-norm": case_energy_norm,
    "simply-supported": case_simply_supported,
    "circular": case_circular,
    "l-bracket": case_l_bracket,
}


def default_params(case: str) -> dict:
    if case not in DEFAULTS:
        raise KeyError(f"unknown benchmark case {case!r}; choose from {sorted(DEFAULTS)}")
    return json.loads(json.dumps(DEFAULTS[case]))


def run_benchmark(case: str, overrides: dict | None = None, outdir=None, threads: int = 1,
                  references: dict | None = None) -> RunReport:
    params = default_params(case)
    params.update(overrides or {})
    refs = references or load_references()
    start = time.perf_counter()
    try:
        report = CASES[case](params, refs, threads)
    except (MeshGenerationError, ArithmeticError, ValueError) as exc:
        raise RuntimeError(f"benchmark {case!r} failed: {exc}") from exc
    report.wall_time = time.perf_counter() - start
    if outdir is not None:
        report.write(outdir)
    return report


def compare_formulations(case: str, formulations, overrides: dict | None = None, outdir=None,
                         threads: int = 1) -> RunReport:
    """Run ``case`` once per formulation and merge the rows and series."""
    formulations = list(formulations)
    if len(formulations) == 1:
        return run_benchmark(case, {**(overrides or {}), "formulation": formulations[0]}, outdir, threads)
    merged = RunReport(f"{case}-compare", {"formulations": formulations, **(overrides or {})})
    start = time.perf_counter()
    for form in formulations:
        rep = run_benchmark(case, {**(overrides or {}), "formulation": form}, None, threads)
        merged.rows += [{"formulation": form, **row} for row in rep.rows]
        merged.series.update({f"{form} {k}": v for k, v in rep.series.items()})
        merged.checks += [Check(f"{form}: {c.name}", c.value, c.target, c.passed) for c in rep.checks]
        merged.plot = rep.plot
    merged.wall_time = time.perf_counter() - start
    if outdir is not None:
        merged.write(outdir)
    return merged
