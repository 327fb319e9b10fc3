"""Batch command line: ``banachic {fit,eval,kernel,bspline,pde,verify}``.

Exit codes: 0 ok, 2 input error, 3 convergence failure, 4 degeneracy,
5 property-suite failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import io
from .bsplines import BSplineSpec, bspline_banachic, bspline_classical, prop9_suite
from .errors import BanachicError, ConfigurationError, ConvergenceError, DegeneracyError, DomainError
from .functionals import DualFunctional, ProblemSpace, default_nodes
from .kernels import KernelContext, kernel_Ap, kernel_Cp
from .plaplace import TriangleGrid, _solve_linear, solve_kernel
from .solver import ConstraintSet, SolverOptions, SplineSolution, primal_objective, solve, spline_deriv_m, spline_eval

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONVERGENCE = 3
EXIT_DEGENERATE = 4
EXIT_SUITE = 5

log = logging.getLogger("banachic")


def example_path() -> Path:
    """Path of the bundled ``site,target`` example."""
    return Path(str(resources.files("banachic") / "data" / "example_constraints.csv"))


def _float_list(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def sample_grid(a: float, n: int) -> np.ndarray:
    """Cell midpoints ``-a + (i + 1/2) 2a/n``, all strictly inside ``(-a, a)``."""
    if n < 1:
        raise ConfigurationError(f"grid size must be >= 1, got {n}")
    return -a + (np.arange(n) + 0.5) * (2.0 * a / n)


def _space_for(args, cons: ConstraintSet) -> ProblemSpace:
    if args.nodes:
        return ProblemSpace.from_nodes(args.a, args.m, args.p, _float_list(args.nodes))
    return ProblemSpace.for_sites(args.a, args.m, args.p, cons.sites)


def _solution_doc(sol: SplineSolution, converged: bool, message: str = "") -> dict:
    cons = sol.constraints
    space = sol.space
    doc = {
        "a": space.a,
        "m": space.m,
        "p": space.p,
        "p_star": space.p_star,
        "mu": sol.mu,
        "residual": sol.residual,
        "iterations": sol.iterations,
        "converged": converged,
        "sites": list(cons.sites),
        "targets": list(cons.targets),
        "functionals": [io.functional_to_json(f) for f in cons.functionals],
        "lambdas": [io.functional_to_json(f) for f in space.lambdas],
    }
    if converged:
        doc["objective"] = primal_objective(sol)
    if message:
        doc["message"] = message
    return doc


def _solution_from_doc(doc: dict) -> SplineSolution:
    try:
        lambdas = [io.functional_from_json(f) for f in doc["lambdas"]]
        functionals = [io.functional_from_json(f) for f in doc["functionals"]]
        space = ProblemSpace.build(float(doc["a"]), int(doc["m"]), float(doc["p"]), lambdas)
        cons = ConstraintSet(tuple(functionals), tuple(float(v) for v in doc["targets"]))
        mu = np.array([float(v) for v in doc["mu"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"not a fit solution file: {exc}") from exc
    if mu.size != len(cons):
        raise ConfigurationError(f"{mu.size} coefficients for {len(cons)} constraints")
    return SplineSolution(mu, space, cons, int(doc.get("iterations", 0)), float(doc.get("residual", "nan")))


def _write_curve(args, sol: SplineSolution, t, title: str) -> None:
    sigma = np.atleast_1d(spline_eval(sol, t))
    sigma_m = np.atleast_1d(spline_deriv_m(sol, t))
    io.write_csv(f"{args.out}.csv", ["t", "sigma", "sigma_m"], zip(t, sigma, sigma_m))
    if args.svg:
        io.svg_polyline(f"{args.out}.svg", t, sigma, title)


def cmd_fit(args) -> int:
    cons = io.read_constraints(args.input or example_path())
    space = _space_for(args, cons)
    opts = SolverOptions(tol=args.tol, max_iter=args.max_iter)
    try:
        sol = solve(space, cons, opts)
    except ConvergenceError as exc:
        best = SplineSolution(exc.best, space, cons, exc.iterations, exc.residual, converged=False, options=opts)
        io.write_json(f"{args.out}.json", _solution_doc(best, False, str(exc)))
        print(f"fit: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    io.write_json(f"{args.out}.json", _solution_doc(sol, True))
    _write_curve(args, sol, sample_grid(space.a, args.samples), f"L^{space.p:g} spline, m={space.m}")
    print(f"fit: p={space.p:g} m={space.m} iterations={sol.iterations} residual={sol.residual:.3e}")
    return EXIT_OK


def cmd_eval(args) -> int:
    if not args.input:
        raise ConfigurationError("eval needs --in with a fit solution JSON")
    path = Path(args.input)
    if not path.is_file():
        raise ConfigurationError(f"{path} does not exist")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"cannot parse {path}: {exc}") from exc
    sol = _solution_from_doc(doc)
    t = np.array(_float_list(args.at)) if args.at else sample_grid(sol.space.a, args.samples)
    _write_curve(args, sol, t, f"L^{sol.p:g} spline, m={sol.space.m}")
    print(f"eval: {t.size} points written to {args.out}.csv")
    return EXIT_OK


def cmd_kernel(args) -> int:
    nodes = _float_list(args.nodes) if args.nodes else default_nodes(args.a, args.m)
    space = ProblemSpace.from_nodes(args.a, args.m, args.p, nodes)
    ctx = KernelContext(space)
    grid = sample_grid(space.a, args.grid)
    rows = []
    for s in grid:
        for t in grid:
            if args.kind == "A":
                val = kernel_Ap(ctx, float(s), float(t))
            else:
                val = kernel_Cp(ctx, DualFunctional.dirac(float(s)), DualFunctional.dirac(float(t)))
            rows.append((s, t, val))
    io.write_csv(f"{args.out}.csv", ["s", "t", "value"], rows)
    if args.svg:
        idx = np.arange(args.grid)
        I, J = np.meshgrid(idx, idx, indexing="ij")
        io.svg_heat(f"{args.out}.svg", I.ravel(), J.ravel(), [r[2] for r in rows],
                    f"{args.kind}_p kernel, p={space.p:g}, m={space.m}")
    print(f"kernel: {args.kind}_p on a {args.grid}x{args.grid} grid written to {args.out}.csv")
    return EXIT_OK


def cmd_bspline(args) -> int:
    if args.knots:
        try:
            spec = BSplineSpec(args.m, tuple(_float_list(args.knots)), args.p)
        except DomainError as exc:
            raise ConfigurationError(str(exc)) from exc
    else:
        spec = BSplineSpec.uniform(args.m, args.h, args.p, t0=args.t0)
    report = prop9_suite(spec)
    lo, hi = spec.support
    t = np.linspace(lo, hi, args.samples)
    io.write_csv(f"{args.out}.csv", ["t", "q2", "qp"], zip(t, bspline_classical(spec, t), bspline_banachic(spec, t)))
    doc = report.as_dict()
    doc["knots"] = list(spec.knots)
    doc["mu"] = spec.mu
    io.write_json(f"{args.out}.json", doc)
    if args.svg:
        io.svg_polyline(f"{args.out}.svg", t, bspline_banachic(spec, t), f"B-spline m={spec.m}, p={spec.p:g}")
    print(f"bspline: m={spec.m} h={spec.h:g} p={spec.p:g} integral={report.integral_p1:.12f} "
          f"lattice={report.lattice_sum:.12f} sup={report.sup_value:.12f} passed={report.passed}")
    return EXIT_OK if report.passed else EXIT_SUITE


def parse_load(spec: str, grid: TriangleGrid) -> np.ndarray:
    """``zero``, ``delta:i,j`` or ``const:c``."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "zero" and not rest:
            return np.zeros(grid.size)
        if kind == "const":
            return np.full(grid.size, float(rest))
        if kind == "delta":
            i, j = (int(v) for v in rest.split(","))
    except ValueError as exc:
        raise ConfigurationError(f"bad load spec {spec!r}") from exc
    if kind == "delta":
        if i < 0 or j < 0 or i + j > grid.n:
            raise ConfigurationError(f"load node ({i},{j}) is outside the triangle")
        return grid.delta(i, j).values
    raise ConfigurationError(f"bad load spec {spec!r}; use zero, delta:i,j or const:c")


def cmd_pde(args) -> int:
    if args.grid < 2:
        raise ConfigurationError(f"pde grid needs n >= 2, got {args.grid}")
    grid = TriangleGrid(args.grid)
    phi = parse_load(args.phi, grid)
    summary = {"n": grid.n, "p": args.p, "load": args.phi}
    code = EXIT_OK
    try:
        field = solve_kernel(grid, phi, args.p, tol=args.tol, max_iter=args.max_iter, method=args.method)
        u, info = field.values, field.info
    except ConvergenceError as exc:
        u, info = exc.best, {"method": args.method, "iterations": exc.iterations, "residual": exc.residual}
        summary["message"] = str(exc)
        code = EXIT_CONVERGENCE
    summary.update({k: info[k] for k in ("method", "iterations", "residual")})
    summary["converged"] = code == EXIT_OK
    summary["swap_asymmetry"] = float(np.max(np.abs(grid.swap(u) - u)))
    if args.p == 2:
        summary["linear_oracle_diff"] = float(np.max(np.abs(u - _solve_linear(grid, phi))))
    io.write_csv(f"{args.out}.csv", ["i", "j", "x", "y", "u"], zip(grid.i, grid.j, grid.x, grid.y, u))
    io.write_json(f"{args.out}.json", summary)
    if args.svg:
        io.svg_heat(f"{args.out}.svg", grid.i, grid.j, u, f"p-Laplacian kernel, p={args.p:g}, n={grid.n}")
    line = (f"pde: n={grid.n} p={args.p:g} method={info['method']} iterations={info['iterations']} "
            f"residual={info['residual']:.3e} swap_asymmetry={summary['swap_asymmetry']:.3e}")
    if "linear_oracle_diff" in summary:
        line += f" linear_oracle_diff={summary['linear_oracle_diff']:.3e}"
    print(line)
    return code


def cmd_verify(args) -> int:
    from .verify import SUITES, format_table, run_suites

    names = args.suite or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ConfigurationError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    checks = run_suites(names)
    table = format_table(checks)
    sys.stdout.write(table)
    if args.out:
        io.write_json(f"{args.out}.json", {"checks": [c.as_dict() for c in checks],
                                           "passed": all(c.passed for c in checks)})
        with open(f"{args.out}.txt", "w", newline="", encoding="utf-8") as fh:
            fh.write(table)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_SUITE


def _common(p: argparse.ArgumentParser, out: str | None, m: int = 2, samples: int = 512, grid: int = 21,
            tol: float = 1e-9) -> None:
    p.add_argument("--a", type=float, default=1.0, help="half-width of the interval (-a, a)")
    p.add_argument("--m", type=int, default=m, help="derivative order")
    p.add_argument("--p", type=float, default=2.0, help="Lebesgue exponent, p > 1")
    p.add_argument("--in", dest="input", default=None, help="input file")
    p.add_argument("--out", default=out, help="output prefix (PREFIX.csv, PREFIX.json, PREFIX.svg)")
    p.add_argument("--samples", type=int, default=samples, help="number of curve samples")
    p.add_argument("--grid", type=int, default=grid, help="grid size")
    p.add_argument("--tol", type=float, default=tol, help="solver tolerance")
    p.add_argument("--svg", action="store_true", help="also write PREFIX.svg")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="banachic", description="L^p interpolating splines and banachic kernels")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit an L^p interpolating spline to constraints")
    _common(p, "fit")
    p.add_argument("--nodes", default=None, help="comma-separated nodes fixing the polynomial part")
    p.add_argument("--max-iter", type=int, default=200)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="evaluate a fitted spline from its JSON")
    _common(p, "eval")
    p.add_argument("--at", default=None, help="comma-separated evaluation points")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("kernel", help="sample A_p or C_p pairings on a grid")
    _common(p, "kernel")
    p.add_argument("--nodes", default=None, help="comma-separated nodes fixing the polynomial part")
    p.add_argument("--kind", choices=("A", "C"), default="A")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("bspline", help="sample a banachic B-spline and check its identities")
    _common(p, "bspline", m=2, samples=401)
    p.add_argument("--h", type=float, default=1.0, help="knot spacing")
    p.add_argument("--t0", type=float, default=0.0, help="first knot")
    p.add_argument("--knots", default=None, help="explicit comma-separated knots (must be uniform)")
    p.set_defaults(func=cmd_bspline)

    p = sub.add_parser("pde", help="discrete p-Laplacian kernel on the unit triangle")
    _common(p, "pde", grid=33, tol=1e-8)
    p.add_argument("--phi", default="delta:11,11", help="load: zero, delta:i,j or const:c")
    p.add_argument("--method", choices=("auto", "bb"), default="auto")
    p.add_argument("--max-iter", type=int, default=5000)
    p.set_defaults(func=cmd_pde)

    p = sub.add_parser("verify", help="run the property suites")
    _common(p, None)
    p.add_argument("--suite", action="append", default=None, help="run only this suite (repeatable)")
    p.set_defaults(func=cmd_verify)
    return parser


def _validate(args) -> None:
    if not args.a > 0:
        raise ConfigurationError(f"--a must be positive, got {args.a}")
    if args.m < 1:
        raise ConfigurationError(f"--m must be >= 1, got {args.m}")
    if not args.p > 1:
        raise ConfigurationError(f"--p must exceed 1, got {args.p}")
    if args.samples < 1:
        raise ConfigurationError(f"--samples must be >= 1, got {args.samples}")
    if not args.tol > 0:
        raise ConfigurationError(f"--tol must be positive, got {args.tol}")
    if args.input is not None and not Path(args.input).is_file():
        raise ConfigurationError(f"input file {args.input} does not exist")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _validate(args)
        return args.func(args)
    except DegeneracyError as exc:
        print(f"{args.command}: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ConvergenceError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (BanachicError, OSError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
