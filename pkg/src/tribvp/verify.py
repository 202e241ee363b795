"""Manufactured problems and residual checks for computed solutions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from . import expr as ex
from .core import (PDE_ORDER, ProblemData, SolvabilityReport, StepTooLarge, canonical_kind,
                   spiral_points, validate)
from .ops import fd_wirtinger
from .quad import QuadratureBudget
from .solvers_tri import condition_report

# ---------------------------------------------------------------------------
# Manufactured solutions

# Data field -> (number of ∂z̄, apply ∂ν afterwards, where it lives)
_TRACES: dict[str, dict[str, tuple[int, bool, str]]] = {
    "dirichlet_cr": {"gamma0": (0, False, "boundary")},
    "neumann_cr": {"gamma": (0, True, "boundary"), "c": (0, False, "origin")},
    "bitsadze_dn": {"gamma0": (0, False, "boundary"), "gamma1": (1, True, "boundary"),
                    "c": (1, False, "origin")},
    "tri_ndn": {"gamma": (0, True, "boundary"), "c": (0, False, "origin"),
                "gamma0": (1, False, "boundary"), "gamma1": (2, True, "boundary"),
                "c1": (2, False, "origin")},
    "tri_dnd": {"gamma0": (0, False, "boundary"), "gamma1": (1, True, "boundary"),
                "c": (1, False, "origin"), "gamma": (2, False, "boundary")},
}


def _apply(omega: ex.Expression, k: int, normal: bool) -> ex.Expression:
    out = omega
    for _ in range(k):
        out = ex.dbar(out)
    return ex.normal_derivative(out) if normal else out


@dataclass(frozen=True)
class ManufacturedProblem:
    omega: ex.Expression
    kind: str
    data: ProblemData
    reference: Callable[[Any], Any]
    expressions: Mapping[str, ex.Expression] = field(default_factory=dict)


def manufacture(omega: ex.Expression | str, kind: str) -> ManufacturedProblem:
    """Derive f, the boundary data and the constants from a polynomial ω."""
    if isinstance(omega, str):
        omega = ex.parse(omega)
    kind = canonical_kind(kind)
    if not ex.is_polynomial(omega):
        raise ex.UnsupportedNode("manufactured solutions need a polynomial in z and conj(z)")
    exprs: dict[str, ex.Expression] = {"f": _apply(omega, PDE_ORDER[kind], False)}
    consts: dict[str, complex] = {}
    for name, (k, normal, where) in _TRACES[kind].items():
        e = _apply(omega, k, normal)
        if where == "origin":
            consts[name] = ex.value_at_zero(e)
        else:
            exprs[name] = ex.restrict_to_circle(e)
    data = ProblemData.build(kind, **{k: ex.to_string(v) for k, v in exprs.items()}, **consts)
    return ManufacturedProblem(omega, kind, data, lambda z: ex.evaluate(omega, z), exprs)


def random_polynomial(rng: np.random.Generator, degree: int = 3, scale: float = 1.0) -> ex.Expression:
    """A random polynomial in z and conj(z) of total degree <= degree."""
    terms = {}
    for p in range(degree + 1):
        for q in range(degree + 1 - p):
            c = complex(rng.normal(), rng.normal()) * scale / (1 + p + q)
            terms[(p, q)] = complex(round(c.real, 6), round(c.imag, 6))
    return ex.from_polynomial(terms)


def random_problem(kind: str, seed: int, degree: int = 3) -> ManufacturedProblem:
    return manufacture(random_polynomial(np.random.default_rng(seed), degree), kind)


# ---------------------------------------------------------------------------
# Polar spectral traces


class PolarPatch:
    """Samples of a field on Chebyshev radii in [r_in, r_out] times uniform
    angles, with spectral ∂z̄, ∂ν and extrapolation to the circle."""

    def __init__(self, field_fn: Callable, r_in: float = 0.3, r_out: float = 0.999,
                 n_r: int = 14, n_theta: int = 64):
        j = np.arange(n_r)
        x = np.cos(np.pi * j / (n_r - 1))  # 1 .. -1
        self.r = (r_out + r_in) / 2 + (r_out - r_in) / 2 * x
        self.a, self.b = r_in, r_out
        self.theta = 2 * np.pi * np.arange(n_theta) / n_theta
        self.k = np.fft.fftfreq(n_theta, 1.0 / n_theta)
        if n_theta % 2 == 0:
            self.k[n_theta // 2] = 0
        self.pts = self.r[:, None] * np.exp(1j * self.theta)[None, :]
        self.values = np.asarray(field_fn(self.pts.ravel()), dtype=complex).reshape(self.pts.shape)
        self._D = self._cheb_matrix(x) * (2 / (r_out - r_in))
        c = np.ones(n_r)
        c[0] = c[-1] = 0.5
        self._bary = c * (-1.0) ** j

    @staticmethod
    def _cheb_matrix(x: np.ndarray) -> np.ndarray:
        n = x.size
        c = np.ones(n)
        c[0] = c[-1] = 2
        c *= (-1.0) ** np.arange(n)
        dx = x[:, None] - x[None, :] + np.eye(n)
        D = np.outer(c, 1 / c) / dx
        return D - np.diag(D.sum(axis=1))

    def d_theta(self, u: np.ndarray) -> np.ndarray:
        return np.fft.ifft(1j * self.k * np.fft.fft(u, axis=1), axis=1)

    def d_r(self, u: np.ndarray) -> np.ndarray:
        return self._D @ u

    def dbar(self, u: np.ndarray) -> np.ndarray:
        e = np.exp(1j * self.theta)[None, :]
        return e / 2 * (self.d_r(u) + 1j / self.r[:, None] * self.d_theta(u))

    def normal(self, u: np.ndarray) -> np.ndarray:
        return self.r[:, None] * self.d_r(u)

    def at(self, u: np.ndarray, radius: float = 1.0) -> np.ndarray:
        """Row of u interpolated (or extrapolated) to the given radius."""
        diff = radius - self.r
        if np.any(diff == 0):
            return u[int(np.argmin(np.abs(diff)))]
        q = self._bary / diff
        return (q @ u) / q.sum()

    def trace(self, k: int, normal: bool, radius: float = 1.0) -> np.ndarray:
        u = self.values
        for _ in range(k):
            u = self.dbar(u)
        if normal:
            u = self.normal(u)
        return self.at(u, radius)

    @property
    def circle(self) -> np.ndarray:
        return np.exp(1j * self.theta)


# ---------------------------------------------------------------------------
# Residual checks


DEFAULT_TOLERANCES = {
    "pde.1": 1e-4, "pde.2": 1e-3, "pde.3": 1e-2,
    "trace": 1e-5, "constant": 1e-5, "conditions": 1e-6, "reproduction": 1e-4,
}
FD_STEP = {1: 1e-4, 2: 1e-3, 3: 1e-3}


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tolerance)

    def to_json_dict(self) -> dict[str, Any]:
        return {"name": self.name, "value": self.value, "tolerance": self.tolerance, "pass": self.passed}


@dataclass(frozen=True)
class Diagnostics:
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json_dict(self) -> dict[str, Any]:
        return {"pass": self.passed, "checks": [c.to_json_dict() for c in self.checks]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _richardson_derivative(field_fn: Callable, k: int, h: float) -> complex:
    """∂z̄^k at 0 from central differences at h and h/2."""
    a = complex(fd_wirtinger(field_fn, 0j, k, 0, h))
    b = complex(fd_wirtinger(field_fn, 0j, k, 0, h / 2))
    return (4 * b - a) / 3


def verify_solution(field_fn: Callable, data: ProblemData, grid=None, tolerances=None, *,
                    patch: PolarPatch | None = None) -> Diagnostics:
    """PDE residual on interior points, boundary traces extrapolated from a
    polar patch reaching r = 0.999, and the constants at the origin."""
    validate(data)
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    kind = data.kind
    order = PDE_ORDER[kind]
    zs = spiral_points(32, 0.75) if grid is None else np.asarray(getattr(grid, "points", grid), dtype=complex)
    h = FD_STEP[order]
    if np.max(np.abs(zs)) + 2 * order * h >= 1:
        raise StepTooLarge("grid leaves no room for the difference stencil")
    fd = np.asarray(fd_wirtinger(field_fn, zs, order, 0, h))
    checks = [Check(f"pde.order{order}", float(np.max(np.abs(fd - data.f(zs)))), tol[f"pde.{order}"])]
    patch = PolarPatch(field_fn) if patch is None else patch
    for name, (k, normal, where) in _TRACES[kind].items():
        if where == "origin":
            if k == 0:
                got = complex(np.asarray(field_fn(np.array([0j])))[0])
            else:
                got = _richardson_derivative(field_fn, k, 1e-2)
            checks.append(Check(f"constant.{name}", abs(got - getattr(data, name)), tol["constant"]))
        else:
            got = patch.trace(k, normal)
            want = getattr(data, name)(patch.circle)
            checks.append(Check(f"trace.{name}", float(np.max(np.abs(got - want))), tol["trace"]))
    return Diagnostics(tuple(checks))


def condition_sweep(data: ProblemData, kind: str | None = None, sample_points=None, *,
                    rules: QuadratureBudget | None = None, tolerance: float = 1e-6) -> SolvabilityReport:
    """Sup of every solvability residual over the sample points (64-point
    spiral on |z| <= 0.8 by default)."""
    if kind is not None and canonical_kind(kind) != data.kind:
        raise ValueError(f"data are for {data.kind}, not {kind}")
    return condition_report(data, sample_points, rules=rules, tolerance=tolerance)


# Data perturbations used as negative controls
PERTURBATIONS = {"gamma": "0.1*conj(z)^2", "gamma0": "0.1*conj(z)^2"}


def perturb(data: ProblemData, name: str, delta: str | None = None) -> ProblemData:
    """Add a boundary term to one data field (0.1ζ̄² by default)."""
    delta = PERTURBATIONS.get(name, "0.1*conj(z)^2") if delta is None else delta
    base = getattr(data, name)
    if base is None:
        raise ValueError(f"{data.kind} has no field {name}")
    src = base.source if isinstance(base.source, str) else None
    if src is not None:
        new: Any = f"({src}) + ({delta})"
    else:
        d = ex.parse(delta)
        new = lambda s: base(s) + ex.evaluate(d, s)
    return data.with_fields(**{name: new})
