"""Command-line front end.

Exit codes: 0 pass, 1 usage or input error, 2 a check failed, 3 the
requested tolerance lies below the attainable floor and was not met.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any, Sequence

import click
import numpy as np

from . import expr as ex
from . import identities as ids
from .core import (R_MAX_DEFAULT, EvaluationGrid, ProblemData, SolutionField, TribvpError,
                   canonical_kind, spiral_points, validate)
from .quad import DEFAULT_BUDGET, IDENTITY_BUDGET, QuadratureBudget
from .solvers_tri import ComposedBudget, solution_evaluator, solve
from .verify import condition_sweep, manufacture, verify_solution

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_UNATTAINABLE = 0, 1, 2, 3
# Below this, roundoff in the quadrature sums dominates any check.
TOLERANCE_FLOOR = 1e-13
FIELD_MATCH_TOL = 1e-8


class InputError(Exception):
    pass


def _fail_code(tol: float) -> int:
    return EXIT_UNATTAINABLE if tol < TOLERANCE_FLOOR else EXIT_FAIL


def _dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        click.echo(text, nl=False)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _constant(text: str | None) -> complex | None:
    if text is None:
        return None
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
        if len(parts) == 1:
            return complex(parts[0].replace("i", "j"))
    except ValueError:
        pass
    raise InputError(f"cannot read constant {text!r}; use RE,IM")


def _problem_from_options(opts: dict[str, Any]) -> ProblemData:
    inline = {k: opts.get(k) for k in ("f", "gamma", "gamma0", "gamma1", "c", "c1")}
    given = {k: v for k, v in inline.items() if v is not None}
    if opts.get("json_path"):
        if given or opts.get("problem"):
            raise InputError("give either --json or inline data flags, not both")
        try:
            data = ProblemData.from_json(Path(opts["json_path"]).read_text(encoding="utf-8"))
        except OSError as err:
            raise InputError(str(err)) from err
        return validate(data)
    if not opts.get("problem"):
        raise InputError("missing --problem (or --json)")
    kind = canonical_kind(opts["problem"])
    if kind == "dirichlet_cr" and "gamma" in given and "gamma0" not in given:
        given["gamma0"] = given.pop("gamma")
    for name in ("c", "c1"):
        if name in given:
            given[name] = _constant(given[name])
    return validate(ProblemData.build(kind, **given))


def _grid(spec: str) -> EvaluationGrid:
    try:
        kind, _, rest = spec.partition(":")
        nums = [float(x) for x in rest.split(",") if x.strip()]
        if kind == "polar" and len(nums) in (2, 3):
            r = nums[2] if len(nums) == 3 else 0.7
            return EvaluationGrid.polar(int(nums[0]), int(nums[1]), r)
        if kind == "spiral" and len(nums) in (1, 2):
            r = nums[1] if len(nums) == 2 else 0.7
            return EvaluationGrid(spiral_points(int(nums[0]), r), {"type": "spiral", "n": int(nums[0]), "r_max": r})
    except ValueError as err:
        raise InputError(f"bad grid {spec!r}: {err}") from err
    raise InputError(f"bad grid {spec!r}; use polar:NR,NT[,RMAX] or spiral:N[,RMAX]")


def _rules(boundary_n, area_nr, area_ntheta, base: QuadratureBudget = DEFAULT_BUDGET) -> QuadratureBudget:
    return QuadratureBudget(boundary_n or base.boundary_n, area_nr or base.area_nr,
                            area_ntheta or base.area_ntheta, base.r_max)


def data_options(fn):
    opts = [
        click.option("--json", "json_path", type=click.Path(dir_okay=False), help="Problem JSON file."),
        click.option("--problem", help="Problem kind: ndn, dnd, dirichlet, neumann, bitsadze (or full names)."),
        click.option("--f", help="Right-hand side f(z)."),
        click.option("--gamma", help="Boundary data γ (written in z)."),
        click.option("--gamma0", help="Boundary data γ₀."),
        click.option("--gamma1", help="Boundary data γ₁."),
        click.option("--c", help="Constant c as RE,IM."),
        click.option("--c1", help="Constant c₁ as RE,IM."),
    ]
    for o in reversed(opts):
        fn = o(fn)
    return fn


def rule_options(fn):
    for o in reversed([
        click.option("--boundary-n", type=int, help="Boundary nodes."),
        click.option("--area-nr", type=int, help="Radial area nodes."),
        click.option("--area-ntheta", type=int, help="Angular area nodes."),
    ]):
        fn = o(fn)
    return fn


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="artifact")
def cli() -> None:
    """Solve and verify tri-analytic boundary value problems on the unit disc."""


@cli.command("solve")
@data_options
@rule_options
@click.option("--grid", "grid_spec", default="polar:10,16,0.7", show_default=True)
@click.option("--method", type=click.Choice(["direct", "composed"]), default="direct", show_default=True)
@click.option("--backend", type=click.Choice(["quadrature", "spectral"]), default="quadrature", show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True, help="Condition tolerance.")
@click.option("--out", default="solution.csv", show_default=True, help="CSV output path ('-' for stdout).")
@click.option("--sidecar", default=None, help="JSON sidecar path (default: OUT.json).")
def run_solve(boundary_n, area_nr, area_ntheta, grid_spec, method, backend, tol, out, sidecar, **opts) -> int:
    """Evaluate the representation formula on a grid."""
    data = _problem_from_options(opts)
    if method == "composed" and data.kind not in ("tri_ndn", "tri_dnd"):
        raise InputError("--method composed needs an ndn or dnd problem")
    rules = _rules(boundary_n, area_nr, area_ntheta)
    result = solve(data, _grid(grid_spec), method=method, backend=backend, rules=rules, tolerance=tol)
    ok = result.report.passed
    doc = {"problem": data.to_json_dict(), "provenance": dict(result.field.provenance),
           "report": result.report.to_json_dict(), "is_solution": ok,
           "status": "solution" if ok else "not a solution"}
    _write(out, result.field.to_csv())
    side = sidecar or (None if out == "-" else out + ".json")
    if side:
        _write(side, _dumps(doc))
    if not ok:
        click.echo(f"conditions fail: max residual {result.report.max_residual:.3e} > {tol:g}", err=True)
        return _fail_code(tol)
    return EXIT_OK


@cli.command("check")
@data_options
@rule_options
@click.option("--samples", type=int, default=64, show_default=True)
@click.option("--r-max", type=float, default=R_MAX_DEFAULT, show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--out", default="-", show_default=True)
def run_check(boundary_n, area_nr, area_ntheta, samples, r_max, tol, out, **opts) -> int:
    """Sample the solvability conditions."""
    data = _problem_from_options(opts)
    if samples < 1:
        raise InputError("--samples must be positive")
    rules = _rules(boundary_n, area_nr, area_ntheta)
    report = condition_sweep(data, None, spiral_points(samples, r_max), rules=rules, tolerance=tol)
    _write(out, _dumps(report.to_json_dict()))
    return EXIT_OK if report.passed else _fail_code(tol)


@cli.command("identities")
@rule_options
@click.option("--samples", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--only", multiple=True, help="Restrict to these identity ids (repeatable).")
@click.option("--out", default="-", show_default=True)
def run_identities(boundary_n, area_nr, area_ntheta, samples, seed, tol, only, out) -> int:
    """Check the integral identity catalog on seeded samples."""
    unknown = [i for i in only if i not in ids.BY_ID]
    if unknown:
        raise InputError(f"unknown identity id(s): {', '.join(unknown)}")
    if samples < 1:
        raise InputError("--samples must be positive")
    rules = _rules(boundary_n, area_nr, area_ntheta, IDENTITY_BUDGET)
    report = ids.sweep(list(only) or None, samples, seed, rules)
    _write(out, _dumps(report.to_json_dict()))
    bad = [r.id for r in report if r.max_err > tol]
    if bad:
        click.echo(f"identities above {tol:g}: {', '.join(bad)}", err=True)
        return _fail_code(tol)
    return EXIT_OK


@cli.command("manufacture")
@click.option("--omega", required=True, help="Polynomial in z and conj(z).")
@click.option("--kind", required=True, help="Problem kind.")
@click.option("--out", default="-", show_default=True, help="Problem JSON path.")
@click.option("--field-out", default=None, help="Reference field CSV path.")
@click.option("--grid", "grid_spec", default="polar:10,16,0.7", show_default=True)
def run_manufacture(omega, kind, out, field_out, grid_spec) -> int:
    """Derive problem data from an exact solution ω."""
    mp = manufacture(omega, kind)
    _write(out, _dumps(mp.data.to_json_dict()))
    if field_out:
        grid = _grid(grid_spec)
        ref = SolutionField(grid, mp.reference(grid.points), None,
                            {"solver": "reference", "omega": ex.to_string(mp.omega)})
        _write(field_out, ref.to_csv())
    return EXIT_OK


def _evaluator_from_provenance(data: ProblemData, prov: dict[str, Any]):
    solver = str(prov.get("solver", ""))
    kind, _, method = solver.partition(".")
    if kind != data.kind:
        return None
    quad = prov.get("quadrature", {})
    if method == "composed":
        budget = ComposedBudget(int(quad.get("boundary_n", 1024)), int(quad.get("area_ntheta", 128)),
                                int(quad.get("radial_nodes_per_side", 40)), int(quad.get("master_n_rho", 41)))
        return solution_evaluator(data, "composed", budget=budget)
    if method == "direct":
        # near-boundary samples need the Fourier-mode primitives
        return solution_evaluator(data, "direct", backend="spectral")
    raise InputError(f"unknown solver in provenance: {solver!r}")


@cli.command("verify")
@click.option("--json", "json_path", required=True, type=click.Path(dir_okay=False), help="Problem JSON.")
@click.option("--field", "field_path", required=True, type=click.Path(dir_okay=False), help="Field CSV.")
@click.option("--sidecar", default=None, help="Sidecar JSON (default: FIELD.json).")
@click.option("--out", default="-", show_default=True)
def run_verify(json_path, field_path, sidecar, out) -> int:
    """Check a solve output against problem data."""
    try:
        data = validate(ProblemData.from_json(Path(json_path).read_text(encoding="utf-8")))
        pts, vals = SolutionField.read_csv(Path(field_path).read_text(encoding="utf-8"))
        side = json.loads(Path(sidecar or field_path + ".json").read_text(encoding="utf-8"))
    except OSError as err:
        raise InputError(str(err)) from err
    field_fn = _evaluator_from_provenance(data, side.get("provenance", {}))
    if field_fn is None:
        _write(out, _dumps({"pass": False, "reason": "field was produced for a different problem kind"}))
        return EXIT_FAIL
    mismatch = float(np.max(np.abs(field_fn(pts) - vals))) if pts.size else 0.0
    doc: dict[str, Any] = {"field_mismatch": mismatch, "field_mismatch_tolerance": FIELD_MATCH_TOL}
    if mismatch > FIELD_MATCH_TOL:
        doc.update({"pass": False, "reason": "field values do not match these data"})
        _write(out, _dumps(doc))
        return EXIT_FAIL
    diag = verify_solution(field_fn, data)
    doc.update(diag.to_json_dict())
    _write(out, _dumps(doc))
    return EXIT_OK if diag.passed else EXIT_FAIL


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point returning the exit code instead of raising SystemExit."""
    try:
        code = cli.main(args=list(argv) if argv is not None else None, prog_name="tribvp",
                        standalone_mode=False)
    except click.exceptions.Exit as err:
        return int(err.exit_code)
    except (click.UsageError, click.BadParameter) as err:
        click.echo(f"error: {err.format_message()}", err=True)
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    except (InputError, TribvpError, ValueError, TypeError, json.JSONDecodeError) as err:
        click.echo(f"error: {err}", err=True)
        return EXIT_USAGE
    return int(code or 0)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
