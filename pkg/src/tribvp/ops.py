"""Named integral operators, finite-difference Wirtinger derivatives and the
quadrature implementation of the integral primitives used by the solvers.

Every solution formula in the package is written with five primitives:

    bmean(g)          B[g]
    cauchy(g, z)      Bd[g/(ζ - z)]
    logrem(g, z, m)   B[g (log(1 - zζ̄) + Σ_{n<m} (zζ̄)^n/n)] / z^m
    amean(g)          A[g]
    area_cauchy(g, z) A[g/(ζ - z)]

``logrem`` carries the removable 1/z^m singularities of the solution
formulas; at z = 0 its value is -B[g ζ̄^m]/m (or 0 for m = 0 and z = 0).
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable

import numpy as np

from .core import (BOUNDARY, DISC, ComplexFunction, StepTooLarge, as_function, as_points,
                   check_safe, thread_count, unwrap)
from .quad import (DEFAULT_BUDGET, PER_ZETA, AreaRule, QuadratureBudget, area_cauchy_kernel,
                   boundary_cauchy)

TAYLOR_RADIUS = 1e-3
TAYLOR_TERMS = 4


class KernelId(enum.Enum):
    """Kernels of the solution and condition formulas with their pole placement."""

    CAUCHY = "cauchy"                      # 1/(ζ - z), pole at z
    POMPEIU = "pompeiu"                    # area 1/(ζ - z), pole at z
    LOG_NEUMANN = "log_neumann"            # log(1 - zζ̄), smooth for |z| < 1
    SCHWARZ_CONDITION = "schwarz_condition"  # 1/(ζ(ζ - z)), poles at 0 and z
    EXTERIOR_POLE_1 = "exterior_pole_1"    # 1/(1 - z̄ζ), pole at 1/z̄
    EXTERIOR_POLE_2 = "exterior_pole_2"    # 1/(1 - z̄ζ)², pole at 1/z̄

    @property
    def interior_poles(self) -> tuple[str, ...]:
        return {"cauchy": ("z",), "pompeiu": ("z",), "schwarz_condition": ("0", "z")}.get(self.value, ())

    @property
    def needs_centered_rule(self) -> bool:
        return bool(self.interior_poles)


def _budget(rules: QuadratureBudget | None) -> QuadratureBudget:
    return DEFAULT_BUDGET if rules is None else rules


# ---------------------------------------------------------------------------
# Named operators


def cauchy_transform(gamma: Any, z, *, rules: QuadratureBudget | None = None):
    """(1/2πi) ∮ γ(ζ)/(ζ - z) dζ."""
    rules = _budget(rules)
    g = as_function(gamma, BOUNDARY)
    zs, scalar = as_points(z)
    check_safe(zs, rules.r_max)
    rule = rules.boundary_rule(PER_ZETA)
    out = np.array([boundary_cauchy(g, w, rule, r_max=rules.r_max) for w in zs])
    return unwrap(out, scalar)


def pompeiu_T(f: Any, z, *, rules: QuadratureBudget | None = None):
    """Tf(z) = -(1/π) ∬ f(ζ)/(ζ - z) dξ dη."""
    rules = _budget(rules)
    fn = as_function(f, DISC)
    zs, scalar = as_points(z)
    check_safe(zs, rules.r_max)
    out = np.array([-area_cauchy_kernel(fn, w, rules.area_rule(w), r_max=rules.r_max) for w in zs])
    return unwrap(out, scalar)


def log_kernel(z, zeta):
    """Principal log(1 - z ζ̄); no branch crossing since |z ζ̄| < 1."""
    return np.log1p(-np.asarray(z) * np.conj(np.asarray(zeta)))


# ---------------------------------------------------------------------------
# Finite differences


def _check_step(z: complex, h: float, reach: float) -> None:
    if not (h > 0) or abs(z) + reach * h >= 1.0:
        raise StepTooLarge(f"stencil of step {h:g} around {z!r} leaves the unit disc")


def _evaluate(field: Callable, pts: np.ndarray) -> np.ndarray:
    return np.asarray(field(pts), dtype=complex)


def _stencil(k: int, j: int) -> dict[tuple[int, int], complex]:
    """Weights on lattice offsets for ∂z̄^k ∂z^j with unit step, by repeated
    convolution of the central first-derivative stencils."""
    st: dict[tuple[int, int], complex] = {(0, 0): 1 + 0j}
    dbar_st = {(1, 0): 0.25, (-1, 0): -0.25, (0, 1): 0.25j, (0, -1): -0.25j}
    dz_st = {(1, 0): 0.25, (-1, 0): -0.25, (0, 1): -0.25j, (0, -1): 0.25j}
    for base in [dbar_st] * k + [dz_st] * j:
        nxt: dict[tuple[int, int], complex] = {}
        for (a, b), u in st.items():
            for (c, d), v in base.items():
                key = (a + c, b + d)
                nxt[key] = nxt.get(key, 0) + u * v
        st = {key: v for key, v in nxt.items() if v != 0}
    return st


def fd_wirtinger(field: Callable, z, k: int = 1, j: int = 0, h: float = 1e-4):
    """Central-difference ∂z̄^k ∂z^j of a field at interior points."""
    zs, scalar = as_points(z)
    st = _stencil(k, j)
    reach = max(max(abs(a), abs(b)) for a, b in st) * np.sqrt(2)
    for w in zs:
        _check_step(complex(w), h, reach)
    offsets = np.array([a + 1j * b for a, b in st]) * h
    weights = np.array(list(st.values())) / h ** (k + j)
    pts = zs[:, None] + offsets[None, :]
    vals = _evaluate(field, pts.ravel()).reshape(pts.shape)
    return unwrap(vals @ weights, scalar)


def fd_wirtinger_dbar(field: Callable, z, h: float = 1e-4):
    """½(D_x + i D_y) with central differences."""
    return fd_wirtinger(field, z, 1, 0, h)


def fd_wirtinger_dz(field: Callable, z, h: float = 1e-4):
    return fd_wirtinger(field, z, 0, 1, h)


def fd_normal_derivative(field: Callable, zeta, h: float = 1e-4):
    """One-sided 3-point radial derivative d/dr field(r ζ) at r = 1."""
    if not (0 < h <= 0.25):
        raise StepTooLarge(f"radial step {h:g} must lie in (0, 0.25]")
    zs, scalar = as_points(zeta)
    u = zs / np.abs(zs)
    vals = [_evaluate(field, (1 - m * h) * u) for m in range(3)]
    return unwrap((3 * vals[0] - 4 * vals[1] + vals[2]) / (2 * h), scalar)


# ---------------------------------------------------------------------------
# Primitive set, quadrature implementation


def logrem_taylor_coefficients(m: int, terms: int = TAYLOR_TERMS) -> list[tuple[int, float]]:
    """(n, -1/n) pairs so that logrem = Σ coeff · B[g ζ̄^n] z^(n-m) near z = 0."""
    start = max(m, 1)
    return [(n, -1.0 / n) for n in range(start, start + terms)]


class QuadratureIntegrals:
    """Primitives evaluated with the trapezoid and centred polar rules.

    Valid for |z| <= r_max; NearBoundary otherwise.
    """

    name = "quadrature"

    def __init__(self, rules: QuadratureBudget | None = None, threads: int | None = None):
        self.rules = _budget(rules)
        self.threads = thread_count() if threads is None else threads
        self._bnodes = self.rules.boundary_rule().nodes
        self._origin = self.rules.area_rule(0j)

    def descriptor(self) -> dict[str, Any]:
        return {"backend": self.name, **self.rules.to_json_dict()}

    def _check(self, zs: np.ndarray) -> None:
        check_safe(zs, self.rules.r_max)

    def _bvals(self, g: Callable) -> np.ndarray:
        return np.asarray(g(self._bnodes), dtype=complex)

    def bmean(self, g: Callable) -> complex:
        return complex(np.mean(self._bvals(g)))

    def cauchy(self, g: Callable, zs: np.ndarray) -> np.ndarray:
        self._check(zs)
        s = self._bnodes
        gv = self._bvals(g) * s
        return np.array([np.sum(gv / (s - w)) for w in zs]) / s.size

    def logrem(self, g: Callable, zs: np.ndarray, m: int) -> np.ndarray:
        self._check(zs)
        s = self._bnodes
        sb = np.conj(s)
        gv = self._bvals(g)
        out = np.empty(zs.size, dtype=complex)
        small = np.abs(zs) < TAYLOR_RADIUS
        if np.any(small):
            moments = {n: np.mean(gv * sb ** n) for n, _ in logrem_taylor_coefficients(m)}
            for idx in np.nonzero(small)[0]:
                w = zs[idx]
                if m == 0:
                    out[idx] = np.mean(gv * np.log1p(-w * sb))
                else:
                    out[idx] = sum(c * moments[n] * w ** (n - m) for n, c in logrem_taylor_coefficients(m))
        for idx in np.nonzero(~small)[0]:
            w = zs[idx]
            u = w * sb
            kern = np.log1p(-u)
            for n in range(1, m):
                kern = kern + u ** n / n
            out[idx] = np.mean(gv * kern) / w ** m
        return out

    def amean(self, g: Callable) -> complex:
        rule = self._origin
        return complex(np.sum(np.asarray(g(rule.nodes), dtype=complex) * rule.weights))

    def _area_cauchy_one(self, g: Callable, w: complex) -> complex:
        rule = self.rules.area_rule(w)
        return complex(np.sum(np.asarray(g(rule.nodes), dtype=complex) * rule.cauchy_weights))

    def area_cauchy(self, g: Callable, zs: np.ndarray) -> np.ndarray:
        self._check(zs)
        if self.threads > 1 and zs.size > 1:
            with ThreadPoolExecutor(self.threads) as pool:
                return np.array(list(pool.map(lambda w: self._area_cauchy_one(g, w), zs)))
        return np.array([self._area_cauchy_one(g, w) for w in zs])

    # Condition kernels have their poles outside the disc; they are sampled
    # on the origin-centred rules, vectorised over z.

    def boundary_matrix(self) -> np.ndarray:
        return self._bnodes

    def origin_rule(self) -> AreaRule:
        return self._origin


def make_integrals(backend: Any = None, rules: QuadratureBudget | None = None):
    """Resolve a backend name or instance to a primitive set."""
    if backend is None or backend == "quadrature":
        return QuadratureIntegrals(rules)
    if backend == "spectral":
        from .spectral import SpectralIntegrals

        return SpectralIntegrals()
    if hasattr(backend, "area_cauchy"):
        return backend
    raise ValueError(f"unknown backend {backend!r}")


def as_data_function(obj: Any, tag: str) -> ComplexFunction:
    return as_function(obj, tag)
