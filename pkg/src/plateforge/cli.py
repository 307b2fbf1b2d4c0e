"""``plateforge`` command-line interface."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .benchmarks import CASES, compare_formulations, default_params, run_benchmark

log = logging.getLogger("plateforge")


class UsageError(Exception):
    pass


def _put(params: dict, case: str, keys, value, option: str) -> None:
    for key, wrap in keys:
        if key in params:
            params[key] = wrap(value)
            return
    raise UsageError(f"case {case!r} does not take {option}")


def overrides_from_args(case: str, args) -> dict:
    """Map command-line options onto the case's parameter names."""
    params = default_params(case)
    first = lambda v: v[0]  # noqa: E731
    same = lambda v: v  # noqa: E731
    if args.t:
        _put(params, case, [("thicknesses", same), ("t", first)], args.t, "--t")
    if args.n:
        _put(params, case, [("n_list", same), ("elements", first), ("n_per_side", same)], args.n, "--n")
    if args.elements is not None:
        _put(params, case, [("elements", same)], args.elements, "--elements")
    if args.mesh:
        _put(params, case, [("mesh_types", lambda v: [v]), ("mesh", same)], args.mesh, "--mesh")
    if args.sc:
        _put(params, case, [("policies", lambda v: [v])], args.sc, "--sc")
    if args.thickness_mode:
        if "modes" in params:
            params["modes"] = [args.thickness_mode]
        else:
            params["thickness_mode"] = args.thickness_mode
    if args.seed is not None:
        _put(params, case, [("seed", same)], args.seed, "--seed")
    if args.quadrature:
        params["quadrature"] = args.quadrature
    if args.law:
        params["law"] = args.law
    if args.formulation and "formulations" in params:
        params["formulations"] = args.formulation
    for item in args.set or []:
        key, _, raw = item.partition("=")
        if not raw:
            raise UsageError(f"--set expects KEY=JSON, got {item!r}")
        params[key] = json.loads(raw)
    changed = {k: v for k, v in params.items() if v != default_params(case).get(k, object())}
    return changed


def _print_checks(report) -> None:
    width = max((len(c.name) for c in report.checks), default=10)
    for c in report.checks:
        print(f"  {'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  value={c.value:.6g}  target={c.target}")
    status = "PASS" if report.passed else "FAIL"
    print(f"{report.case}: {status} in {report.wall_time:.2f} s")


def cmd_run(args) -> int:
    overrides = overrides_from_args(args.case, args)
    formulations = args.formulation or []
    if len(formulations) > 1 and "formulations" not in default_params(args.case):
        report = compare_formulations(args.case, formulations, overrides, args.output, args.threads)
    else:
        if len(formulations) == 1 and "formulations" not in default_params(args.case):
            overrides["formulation"] = formulations[0]
        report = run_benchmark(args.case, overrides, args.output, args.threads)
    _print_checks(report)
    return 0 if report.passed else 1


def cmd_mesh(args) -> int:
    from .mesh import (
        density_from_config,
        distort_center_node,
        domain_from_config,
        generate_structured_mesh,
        generate_voronoi_mesh,
        load_mesh,
        save_mesh,
        Rectangle,
    )

    if args.kind == "voronoi":
        spec = json.loads(Path(args.domain).read_text())
        density = density_from_config(spec.get("density"))
        domain = domain_from_config(spec.get("domain", spec))
        history: list = []
        mesh = generate_voronoi_mesh(domain, args.n, density, max_lloyd_iters=args.lloyd, seed=args.seed,
                                     history=history)
        log.info("lloyd iterations: %d, final measure %.3g", len(history), history[-1] if history else 0.0)
    elif args.kind == "structured":
        mesh = generate_structured_mesh(Rectangle(tuple(args.lower), tuple(args.upper)), args.nx, args.ny or args.nx,
                                        args.shape)
    else:
        mesh = distort_center_node(load_mesh(args.mesh), args.s, centers=args.sc)
    save_mesh(mesh, args.output)
    print(f"wrote {args.output}: {mesh.n_nodes} nodes, {mesh.n_elements} elements")
    return 0


def cmd_solve(args) -> int:
    from .config import run_config_file

    rows = run_config_file(args.config, args.output, args.threads)
    for row in rows:
        print("  " + ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in row.items()))
    return 0


def cmd_verify(args) -> int:
    from .verify import run_properties

    failures = 0
    start = time.perf_counter()
    print("property suite")
    for res in run_properties(args.seed):
        print("  " + res.line())
        failures += not res.passed
    if not args.quick:
        for case in CASES:
            report = run_benchmark(case, None, Path(args.output) / case if args.output else None, args.threads)
            _print_checks(report)
            failures += not report.passed
    print(f"verify: {failures} failing item(s) in {time.perf_counter() - start:.1f} s")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plateforge", description="Polygonal scaled-boundary Reissner-Mindlin plate solver")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a benchmark case")
    run.add_argument("case", choices=sorted(CASES))
    run.add_argument("--t", type=float, nargs="+", help="thickness value(s)")
    run.add_argument("--n", type=int, nargs="+", help="mesh size(s): elements per side or element count")
    run.add_argument("--elements", type=int, help="cantilever-moment mesh: 6 picks the six-polygon mesh, otherwise that many quads")
    run.add_argument("--mesh", choices=["quad", "tri", "poly"])
    run.add_argument("--formulation", choices=["standard", "ans"], nargs="+")
    run.add_argument("--quadrature", choices=["full", "reduced", "selective"])
    run.add_argument("--law", choices=["plate2d", "solid3d"])
    run.add_argument("--thickness-mode", "--mode", dest="thickness_mode", choices=["linear", "constant"])
    run.add_argument("--sc", choices=["moving", "fixed"])
    run.add_argument("--seed", type=int)
    run.add_argument("--set", action="append", metavar="KEY=JSON", help="override any case parameter")
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("-o", "--output", default="out")
    run.set_defaults(func=cmd_run)

    mesh = sub.add_parser("mesh", help="generate or transform meshes")
    msub = mesh.add_subparsers(dest="kind", required=True)
    vor = msub.add_parser("voronoi", help="centroidal Voronoi mesh of a domain")
    vor.add_argument("--domain", required=True, help="JSON domain spec (optionally with a density block)")
    vor.add_argument("--n", type=int, required=True)
    vor.add_argument("--seed", type=int, default=0)
    vor.add_argument("--lloyd", type=int, default=100)
    vor.add_argument("-o", "--output", required=True)
    st = msub.add_parser("structured", help="structured quad or triangle mesh of a rectangle")
    st.add_argument("--lower", type=float, nargs=2, default=[0.0, 0.0])
    st.add_argument("--upper", type=float, nargs=2, default=[1.0, 1.0])
    st.add_argument("--nx", type=int, required=True)
    st.add_argument("--ny", type=int)
    st.add_argument("--shape", choices=["quad", "tri"], default="quad")
    st.add_argument("-o", "--output", required=True)
    dis = msub.add_parser("distort", help="move the interior node shared by four elements")
    dis.add_argument("mesh")
    dis.add_argument("--s", type=float, required=True)
    dis.add_argument("--sc", choices=["moving", "fixed"], default="moving")
    dis.add_argument("-o", "--output", required=True)
    mesh.set_defaults(func=cmd_mesh)

    solve = sub.add_parser("solve", help="solve a problem described by a JSON config")
    solve.add_argument("config")
    solve.add_argument("--threads", type=int, default=1)
    solve.add_argument("-o", "--output", default="out")
    solve.set_defaults(func=cmd_solve)

    ver = sub.add_parser("verify", help="property suite plus every benchmark case")
    ver.add_argument("--quick", action="store_true", help="property suite only")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--threads", type=int, default=1)
    ver.add_argument("-o", "--output", help="write per-case reports here")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (RuntimeError, ValueError, ArithmeticError, OSError) as exc:
        print(f"plateforge: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
