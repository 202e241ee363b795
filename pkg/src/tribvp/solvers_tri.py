"""Combined boundary value problems for ∂z̄³ω = f on the unit disc.

NDN (Neumann outside, Dirichlet-Neumann inside)::

    ∂νω = γ, ω(0) = c, ∂z̄ω = γ₀, ∂ν∂z̄²ω = γ₁, ∂z̄²ω(0) = c₁

DND (Dirichlet-Neumann outside, Dirichlet inside)::

    ω = γ₀, ∂ν∂z̄ω = γ₁, ∂z̄ω(0) = c, ∂z̄²ω = γ

Each problem has a direct representation formula, three solvability
conditions, and a composed solver that chains the base solvers: for NDN,
φ = ∂z̄ω solves a Dirichlet-Neumann problem and ω a Neumann problem with
right side φ; for DND, φ = ∂z̄²ω solves a Dirichlet problem and ω a
Dirichlet-Neumann problem with right side φ.

Direct formulas, with L = log(1 - zζ̄), h = γ₁ - 2ζ̄f::

    NDN: c + c₁z̄²/2 - B[γL] + 2B[ζ̄γ₀L] - Bd[γ₀((ζ̄-z̄)/(ζ-z) - ζ̄/ζ)]
         - B[hK] - A[f(ζ̄(ζ̄-z̄)/(ζ-z) - ζ̄²/ζ - z(ζ̄²-z̄²)/(2ζ(ζ-z)))]
         K = ζ̄/(2z) + ζ̄²/4 + (1-|z|²)² L/(2z²)

    DND: c z̄ + Bd[γ₀/(ζ-z)] + ((1-|z|²)/z) B[(γ₁ - 2ζ̄γ) L]
         + Bd[γ M] - A[f M],   M = (ζ̄-z̄)²/(2(ζ-z)) + z̄ζ̄/ζ
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .core import (CONDITION_COUNT, R_MAX_DEFAULT, BudgetExceeded, ConditionResidual, ConditionSup,
                   DiscPoint, EvaluationGrid, SolutionField, SolvabilityReport, SolveOutput,
                   as_points, check_safe, spiral_points, unwrap, validate)
from .ops import make_integrals
from .quad import DEFAULT_BUDGET, QuadratureBudget
from .solvers_base import (CONDITION_IDS, ORIGIN, ConditionQuadrature, base_condition_values,
                           base_solution_values, bitsadze_values, dirichlet_values, neumann_values)
from .spectral import PolarField, SpectralIntegrals

TriSolveOutput = SolveOutput

MAX_KERNEL_EVALUATIONS = 5e7

CONDITION_IDS = dict(CONDITION_IDS)
CONDITION_IDS.update({"tri_ndn": ("ndn.1", "ndn.2", "ndn.3"), "tri_dnd": ("dnd.1", "dnd.2", "dnd.3")})


def _cz(g, p: int = 1):
    if hasattr(g, "times_conj"):
        return g.times_conj(p)
    return lambda s: np.conj(s) ** p * g(s)


# ---------------------------------------------------------------------------
# Direct formulas


def ndn_values(I, data, zs: np.ndarray) -> np.ndarray:
    f, gam, g0, g1 = data.f, data.gamma, data.gamma0, data.gamma1
    zb = np.conj(zs)
    az = np.abs(zs) ** 2
    h = lambda s: g1(s) - 2 * np.conj(s) * f(s)
    sg0 = _cz(g0)
    out = data.c + data.c1 * zb ** 2 / 2 - I.logrem(gam, zs, 0) + 2 * I.logrem(sg0, zs, 0)
    out = out - (I.cauchy(sg0, zs) - zb * I.cauchy(g0, zs) - I.bmean(sg0))
    # B[hK] with the removable 1/z, 1/z² parts folded into logrem(·, 2)
    out = out - (zb * (2 - az) / 2 * I.bmean(_cz(h)) + I.bmean(_cz(h, 2)) / 4
                 + (1 - az) ** 2 / 2 * I.logrem(h, zs, 2))
    f2, f1 = _cz(f, 2), _cz(f, 1)
    t2, t2_0 = I.area_cauchy(f2, zs), I.area_cauchy(f2, ORIGIN)[0]
    t1 = I.area_cauchy(f1, zs)
    t0, t0_0 = I.area_cauchy(f, zs), I.area_cauchy(f, ORIGIN)[0]
    area = t2 - zb * t1 - t2_0 - 0.5 * (t2 - t2_0) + 0.5 * zb ** 2 * (t0 - t0_0)
    return out - area


def dnd_values(I, data, zs: np.ndarray) -> np.ndarray:
    f, gam, g0, g1 = data.f, data.gamma, data.gamma0, data.gamma1
    zb = np.conj(zs)
    az = np.abs(zs) ** 2
    h = lambda s: g1(s) - 2 * np.conj(s) * gam(s)
    out = data.c * zb + I.cauchy(g0, zs) + (1 - az) * I.logrem(h, zs, 1)
    out = out + 0.5 * (I.cauchy(_cz(gam, 2), zs) - 2 * zb * I.cauchy(_cz(gam), zs)
                       + zb ** 2 * I.cauchy(gam, zs)) + zb * I.bmean(_cz(gam))
    area = 0.5 * (I.area_cauchy(_cz(f, 2), zs) - 2 * zb * I.area_cauchy(_cz(f), zs)
                  + zb ** 2 * I.area_cauchy(f, zs)) + zb * I.area_cauchy(_cz(f), ORIGIN)[0]
    return out - area


# ---------------------------------------------------------------------------
# Conditions


def ndn_condition_values(Q: ConditionQuadrature, data, zs: np.ndarray) -> np.ndarray:
    f, gam, g0, g1 = data.f, data.gamma, data.gamma0, data.gamma1
    zb = np.conj(zs)
    h = lambda s: g1(s) - 2 * np.conj(s) * f(s)
    r1 = (data.c1 - Q.boundary(g0, zs, 1, plain=True)
          + Q.area(lambda s: (1 - np.abs(s) ** 2) * f(s) / s, zs, 1))
    r2 = Q.boundary(h, zs) + zb * Q.area(f, zs, 2)
    r3 = (Q.boundary(gam, zs) + zb * Q.boundary(g0, zs) - 2 * Q.boundary(_cz(g0), zs)
          - zb / 2 * Q.bmean(_cz(h))
          + zb / 2 * (Q.area(_cz(f, 2), zs, 2) - 2 * zb * Q.area(_cz(f), zs, 2)
                      + zb ** 2 * Q.area(f, zs, 2)))
    return np.vstack([r1, r2, r3])


def dnd_condition_values(Q: ConditionQuadrature, data, zs: np.ndarray) -> np.ndarray:
    f, gam, g0, g1 = data.f, data.gamma, data.gamma0, data.gamma1
    zb = np.conj(zs)
    r1 = zb * Q.boundary(gam, zs, 1, plain=True) - zb * Q.area(f, zs, 1)
    # k = (2ζ̄/ζ - ζ̄² - z̄²) / (2(1 - z̄ζ))
    bk = 0.5 * (Q.boundary(lambda s: 2 * np.conj(s) / s * gam(s), zs, 1, plain=True)
                - Q.boundary(_cz(gam, 2), zs, 1, plain=True)
                - zb ** 2 * Q.boundary(gam, zs, 1, plain=True))
    ak = 0.5 * (Q.area(lambda s: 2 * np.conj(s) / s * f(s), zs, 1) - Q.area(_cz(f, 2), zs, 1)
                - zb ** 2 * Q.area(f, zs, 1))
    r2 = data.c - Q.boundary(g0, zs, 1, plain=True) + bk - ak
    r3 = (Q.boundary(g1, zs) + zb * Q.boundary(gam, zs) - 2 * Q.boundary(_cz(gam), zs)
          - zb * (Q.area(_cz(f), zs, 2) - zb * Q.area(f, zs, 2)))
    return np.vstack([r1, r2, r3])


def condition_values(data, zs: np.ndarray, rules: QuadratureBudget | None = None) -> np.ndarray:
    """All condition residuals of any problem kind, shape (n_conditions, n_z)."""
    rules = DEFAULT_BUDGET if rules is None else rules
    check_safe(zs, rules.r_max)
    if data.kind == "tri_ndn":
        return ndn_condition_values(ConditionQuadrature(rules), data, zs)
    if data.kind == "tri_dnd":
        return dnd_condition_values(ConditionQuadrature(rules), data, zs)
    return base_condition_values(data, zs, rules)


def condition_report(data, sample_points=None, *, rules: QuadratureBudget | None = None,
                     tolerance: float = 1e-6) -> SolvabilityReport:
    """Sup of each condition residual over the sample points."""
    zs = spiral_points(64, R_MAX_DEFAULT) if sample_points is None else as_points(sample_points)[0]
    vals = np.abs(condition_values(data, zs, rules))
    sups = []
    for cid, row in zip(CONDITION_IDS[data.kind], vals):
        k = int(np.argmax(row)) if row.size else 0
        sups.append(ConditionSup(cid, float(row[k]) if row.size else 0.0,
                                 DiscPoint(complex(zs[k]) if zs.size else 0j)))
    assert len(sups) == CONDITION_COUNT[data.kind]
    return SolvabilityReport(tuple(sups), tolerance)


def _residual_tuple(data, z, rules):
    validate(data)
    rules = DEFAULT_BUDGET if rules is None else rules
    zs, scalar = as_points(z)
    vals = condition_values(data, zs, rules)
    per_point = [tuple(ConditionResidual(complex(vals[i, j]), DiscPoint(complex(zs[j])))
                       for i in range(vals.shape[0])) for j in range(zs.size)]
    return per_point[0] if scalar else per_point


def ndn_conditions(data, z, *, rules: QuadratureBudget | None = None):
    """Three residuals of the NDN solvability conditions at z."""
    if data.kind != "tri_ndn":
        raise ValueError("ndn_conditions needs tri_ndn data")
    return _residual_tuple(data, z, rules)


def dnd_conditions(data, z, *, rules: QuadratureBudget | None = None):
    """Three residuals of the DND solvability conditions at z."""
    if data.kind != "tri_dnd":
        raise ValueError("dnd_conditions needs tri_dnd data")
    return _residual_tuple(data, z, rules)


def ndn_solve(data, z, *, rules: QuadratureBudget | None = None, backend: Any = None):
    validate(data)
    if data.kind != "tri_ndn":
        raise ValueError("ndn_solve needs tri_ndn data")
    zs, scalar = as_points(z)
    return unwrap(ndn_values(make_integrals(backend, rules), data, zs), scalar)


def dnd_solve(data, z, *, rules: QuadratureBudget | None = None, backend: Any = None):
    validate(data)
    if data.kind != "tri_dnd":
        raise ValueError("dnd_solve needs tri_dnd data")
    zs, scalar = as_points(z)
    return unwrap(dnd_values(make_integrals(backend, rules), data, zs), scalar)


# ---------------------------------------------------------------------------
# Composed solvers


@dataclass(frozen=True)
class ComposedBudget:
    boundary_n: int = 1024
    n_theta: int = 128
    n_sub: int = 40
    master_n_rho: int = 41
    max_kernel_evaluations: float = MAX_KERNEL_EVALUATIONS


class ComposedSolver:
    """Chain of two base solves with the inner solution cached on a polar
    master grid (Chebyshev radii including 0 and 1, uniform angles).

    Both stages use the Fourier-mode primitives, which stay accurate up to
    the circle, so the inner field can be sampled wherever the outer
    quadrature needs it, boundary included.
    """

    AREA_CALLS = {"tri_ndn": (3, 2), "tri_dnd": (1, 3)}

    def __init__(self, data, budget: ComposedBudget | None = None):
        validate(data)
        if data.kind not in ("tri_ndn", "tri_dnd"):
            raise ValueError("composed solvers exist for tri_ndn and tri_dnd only")
        self.data = data
        self.budget = ComposedBudget() if budget is None else budget
        b = self.budget
        self.inner = SpectralIntegrals(b.boundary_n, b.n_theta, b.n_sub)
        self.outer = SpectralIntegrals(b.boundary_n, b.n_theta, b.n_sub)
        self.kernel_evaluations = 0.0
        inner_calls, _ = self.AREA_CALLS[data.kind]
        self._charge(b.master_n_rho, inner_calls)
        if data.kind == "tri_ndn":
            inner = lambda zs: bitsadze_values(self.inner, data.f, data.gamma0, data.gamma1, data.c1, zs)
        else:
            inner = lambda zs: dirichlet_values(self.inner, data.f, data.gamma, zs)
        self.phi = PolarField(inner, b.master_n_rho, b.n_theta)

    def _charge(self, n_radii: int, area_calls: int) -> None:
        b = self.budget
        per_radius = area_calls * 2 * b.n_sub * b.n_theta + 4 * b.boundary_n
        cost = float(n_radii) * per_radius
        if self.kernel_evaluations + cost > b.max_kernel_evaluations:
            raise BudgetExceeded(self.kernel_evaluations + cost, b.max_kernel_evaluations)
        self.kernel_evaluations += cost

    def __call__(self, z):
        zs, scalar = as_points(z)
        if zs.size and np.max(np.abs(zs)) > 1.0 + 1e-12:
            raise ValueError("composed solvers are defined on the closed disc")
        n_radii = np.unique(np.round(np.abs(zs), 12)).size
        self._charge(n_radii, self.AREA_CALLS[self.data.kind][1])
        d = self.data
        if d.kind == "tri_ndn":
            vals = neumann_values(self.outer, self.phi, d.gamma, d.c, zs)
        else:
            vals = bitsadze_values(self.outer, self.phi, d.gamma0, d.gamma1, d.c, zs)
        return unwrap(vals, scalar)


def ndn_solve_composed(data, z, *, budget: ComposedBudget | None = None):
    if data.kind != "tri_ndn":
        raise ValueError("ndn_solve_composed needs tri_ndn data")
    return ComposedSolver(data, budget)(z)


def dnd_solve_composed(data, z, *, budget: ComposedBudget | None = None):
    if data.kind != "tri_dnd":
        raise ValueError("dnd_solve_composed needs tri_dnd data")
    return ComposedSolver(data, budget)(z)


# ---------------------------------------------------------------------------
# Uniform entry points


def solution_evaluator(data, method: str = "direct", *, backend: Any = None,
                       rules: QuadratureBudget | None = None, budget: ComposedBudget | None = None):
    """A vectorised callable z -> ω(z) for any problem kind."""
    validate(data)
    if method == "composed":
        return ComposedSolver(data, budget)
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    I = make_integrals(backend, rules)

    def field(z):
        arr = np.asarray(z, dtype=complex)
        flat = arr.ravel()
        if data.kind == "tri_ndn":
            vals = ndn_values(I, data, flat)
        elif data.kind == "tri_dnd":
            vals = dnd_values(I, data, flat)
        else:
            vals = base_solution_values(data, flat, I)
        return vals.reshape(arr.shape)

    return field


def solve(data, grid: EvaluationGrid, *, method: str = "direct", backend: Any = None,
          rules: QuadratureBudget | None = None, budget: ComposedBudget | None = None,
          tolerance: float = 1e-6, sample_points=None) -> SolveOutput:
    """Evaluate the representation on a grid and attach the condition report."""
    rules = DEFAULT_BUDGET if rules is None else rules
    field = solution_evaluator(data, method, backend=backend, rules=rules, budget=budget)
    values = field(grid.points)
    report = condition_report(data, sample_points, rules=rules, tolerance=tolerance)
    if method == "composed":
        b = budget or ComposedBudget()
        quad_desc: dict[str, Any] = {"backend": "spectral", "boundary_n": b.boundary_n,
                                     "area_ntheta": b.n_theta, "radial_nodes_per_side": b.n_sub,
                                     "master_n_rho": b.master_n_rho}
    else:
        quad_desc = make_integrals(backend, rules).descriptor()
    provenance = {"solver": f"{data.kind}.{method}", "quadrature": quad_desc,
                  "grid": dict(grid.descriptor)}
    sol = SolutionField(grid, values, {"is_solution": report.passed}, provenance)
    return SolveOutput(sol, report, method)
