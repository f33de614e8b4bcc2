"""Scenario runner and the ``biwave`` command."""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .duhamel import DuhamelConfig, solve_nonhomogeneous
from .elastokit import VectorFieldEvaluator, cks_displacement, memoized, navier_residual
from .fields import FieldError, ParamError, SolutionEvaluator
from .oracle import OracleError, forced_oracle_solution, oracle_solution
from .scenario import Scenario, ScenarioError, parse_scenario, serialize_scenario
from .solvers import SolverConfig, SolverError, solve
from .verification import VerificationError, biwave_residual, initial_probe

__all__ = ["RunResult", "run", "main", "bundled_scenarios", "load_bundled", "parse_scenario",
           "serialize_scenario"]

EXIT_OK, EXIT_TOLERANCE, EXIT_ERROR = 0, 1, 2

# grid points per evaluation block
_BLOCK = 64


@dataclass
class RunResult:
    exit_code: int
    csv: str | None = None
    report: dict = field(default_factory=dict)


def bundled_scenarios() -> list[str]:
    root = resources.files("biwave") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def load_bundled(name: str) -> str:
    return (resources.files("biwave") / "scenarios" / f"{name}.toml").read_text()


def _fmt(v: float) -> str:
    return "%.17g" % v


def _write_csv(header, columns) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in zip(*columns):
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _evaluate(u: SolutionEvaluator, xs, ts, threads: int) -> np.ndarray:
    """Evaluate u in fixed-size blocks, optionally on a thread pool.

    Block boundaries do not depend on the thread count, so vectorized
    evaluators see identical batches and the output is bit-for-bit stable.
    """
    blocks = [slice(i, i + _BLOCK) for i in range(0, len(ts), _BLOCK)]

    def one(sl):
        return np.asarray(u.fn(xs[sl], ts[sl]), dtype=float)

    if threads <= 1 or len(blocks) < 2:
        return np.concatenate([one(sl) for sl in blocks])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.concatenate(list(pool.map(one, blocks)))


def _solver_config(sc: Scenario, overrides: dict) -> DuhamelConfig:
    s = sc.section("solver")
    cfg = SolverConfig().with_overrides(
        quad_order=overrides.get("quad_order") or s.get("quad_order"),
        sphere_level=overrides.get("sphere_level") or s.get("sphere_level"),
        h_rel=overrides.get("h_rel") or s.get("h_rel"),
        t_eps=s.get("t_eps"),
    )
    return DuhamelConfig(tau_order=s.get("tau_order"), solver=cfg)


def _solution(sc, cfg):
    data, params, forcing = sc.initial_data(), sc.biwave_params(), sc.forcing_field()
    if forcing is not None:
        return solve_nonhomogeneous(data, forcing, params, cfg)
    return solve(data, params, cfg.solver)


def _oracle(sc):
    data, params, forcing = sc.initial_data(), sc.biwave_params(), sc.forcing_field()
    if forcing is not None:
        return forced_oracle_solution(data, forcing, params)
    return oracle_solution(data, params)


def _check(report, value, tol):
    report["tolerance"] = tol
    report["pass"] = tol is None or value <= tol
    return EXIT_OK if report["pass"] else EXIT_TOLERANCE


def run(sc: Scenario, overrides: dict | None = None, threads: int = 1) -> RunResult:
    """Execute the scenario's task.

    Exit code 0 on success, 1 when a declared tolerance is exceeded, 2 on
    errors (unsupported task/dimension, non-trig data for the oracle, ...).
    """
    overrides = overrides or {}
    task = sc.section("task")
    kind = task["kind"]
    tol = overrides.get("tolerance") or task.get("tolerance")
    cfg = _solver_config(sc, overrides)
    grid = sc.eval_grid()
    xs, ts = grid.points()
    n = sc.n
    xnames = [f"x{i + 1}" for i in range(n)] if n > 1 else ["x"]
    report: dict = {"task": kind, "n": n}

    try:
        if kind == "solve":
            u = _evaluate(_solution(sc, cfg), xs, ts, threads)
            csv = _write_csv(xnames + ["t", "u"], [*xs.T, ts, u])
            report["points"] = len(ts)
            return RunResult(EXIT_OK, csv, report)

        if kind == "oracle-compare":
            u = _evaluate(_solution(sc, cfg), xs, ts, threads)
            o = _evaluate(_oracle(sc), xs, ts, threads)
            err = np.abs(u - o)
            csv = _write_csv(xnames + ["t", "u", "oracle", "abs_err"], [*xs.T, ts, u, o, err])
            report.update(max_error=float(err.max()), mean_error=float(err.mean()))
            return RunResult(_check(report, report["max_error"], tol), csv, report)

        if kind == "residual":
            if sc.forcing_field() is not None:
                raise SolverError("residual task checks the homogeneous equation; drop [forcing]")
            res = biwave_residual(_solution(sc, cfg), (xs, ts), task.get("h", 1e-2))
            report.update(res.to_dict())
            return RunResult(_check(report, res.relative, tol), None, report)

        if kind == "initial-check":
            u, data = _solution(sc, cfg), sc.initial_data()
            pts = grid.spatial_points()
            eps = task.get("eps", 1e-3)
            devs = {f"k{k}": initial_probe(u, data, k, eps, pts) for k in range(4)}
            report.update(deviations=devs, eps=eps)
            return RunResult(_check(report, max(devs.values()), tol), None, report)

        if kind == "elastokit-demo":
            ep, params = sc.lame, sc.biwave_params()
            h = task.get("h", 1e-2)
            comps = [memoized(solve(d, params, cfg.solver).fn) for d in sc.potential_data()]
            u = cks_displacement(VectorFieldEvaluator(comps, n), params, h)
            res = navier_residual(u, None, ep, (xs, ts), h)
            report.update(res.to_dict())
            return RunResult(_check(report, res.relative, tol), None, report)
    except (SolverError, OracleError, FieldError, VerificationError, ParamError) as exc:
        report["error"] = str(exc)
        return RunResult(EXIT_ERROR, None, report)

    report["error"] = f"unsupported task {kind!r}"
    return RunResult(EXIT_ERROR, None, report)


def _read_scenario(arg: str) -> str:
    path = Path(arg)
    if path.exists():
        return path.read_text()
    if arg in bundled_scenarios():
        return load_bundled(arg)
    raise FileNotFoundError(f"no scenario file or bundled scenario named {arg!r}")


def _threads(arg) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("BIWAVE_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        raise SystemExit(f"BIWAVE_THREADS must be an integer, got {env!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="biwave", description="Biwave Cauchy problem solver")
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario file (or a bundled scenario by name)")
    r.add_argument("scenario")
    r.add_argument("--out", help="CSV output path (default: scenario output, else stdout)")
    r.add_argument("--quad-order", type=int)
    r.add_argument("--sphere-level", type=int)
    r.add_argument("--h-rel", type=float)
    r.add_argument("--tolerance", type=float)
    r.add_argument("--threads", type=int)
    sub.add_parser("list", help="list bundled scenarios")
    args = parser.parse_args(argv)

    if args.command == "list":
        print("\n".join(bundled_scenarios()))
        return EXIT_OK

    try:
        sc = parse_scenario(_read_scenario(args.scenario))
        result = run(sc, {"quad_order": args.quad_order, "sphere_level": args.sphere_level,
                          "h_rel": args.h_rel, "tolerance": args.tolerance},
                     threads=_threads(args.threads))
        out = args.out or sc.section("task").get("output")
        if result.csv is not None:
            if out:
                Path(out).write_text(result.csv)
            else:
                sys.stdout.write(result.csv)
    except (ScenarioError, OSError, ValueError) as exc:
        print(f"biwave: error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    stream = sys.stdout if (result.csv is None or out) else sys.stderr
    print(json.dumps(result.report, sort_keys=True), file=stream)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
