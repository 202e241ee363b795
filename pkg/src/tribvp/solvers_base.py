"""Solvers for the three lower-order problems on the unit disc.

* Dirichlet problem for ∂z̄ω = f with ω = γ on the circle.
* Neumann problem for ∂z̄ω = f with ∂νω = γ and ω(0) = c.
* Dirichlet-Neumann problem for ∂z̄²ω = f with ω = γ₀, ∂ν∂z̄ω = γ₁ and
  ∂z̄ω(0) = c.

Here ∂ν = z∂z + z̄∂z̄. Each problem has condition evaluators (residuals of
the solvability conditions, which must vanish for all |z| < 1) and a
representation formula. The formula is evaluated unconditionally; it is a
solution only when the residuals vanish.

With h = γ₁ - 2ζ̄f and L = log(1 - zζ̄) the representations are::

    Dirichlet : Bd[γ/(ζ-z)] - A[f/(ζ-z)]
    Neumann   : c - B[(γ - 2ζ̄f) L] - z A[f/(ζ(ζ-z))]
    Bitsadze  : c z̄ + Bd[γ₀/(ζ-z)] + ((1-|z|²)/z) B[h L]
                + A[(|ζ|²-|z|²) f/(ζ(ζ-z))]
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .core import (BOUNDARY, DISC, ComplexFunction, ConditionResidual, DiscPoint, as_function,
                   as_points, check_safe, unwrap)
from .ops import make_integrals
from .quad import DEFAULT_BUDGET, QuadratureBudget

ORIGIN = np.array([0j])


def _conj_times(g: ComplexFunction, power: int = 1):
    if hasattr(g, "times_conj"):
        return g.times_conj(power)
    return lambda s: np.conj(s) ** power * g(s)


def _fn(obj: Any, tag: str) -> ComplexFunction:
    return as_function(obj, tag)


# ---------------------------------------------------------------------------
# Representation formulas, written once against the primitive set


def dirichlet_values(I, f, gamma, zs: np.ndarray) -> np.ndarray:
    return I.cauchy(gamma, zs) - I.area_cauchy(f, zs)


def neumann_values(I, f, gamma, c: complex, zs: np.ndarray) -> np.ndarray:
    h = lambda s: gamma(s) - 2 * np.conj(s) * f(s)
    # z A[f/(ζ(ζ-z))] = A[f/(ζ-z)] - A[f/ζ]
    return c - I.logrem(h, zs, 0) - (I.area_cauchy(f, zs) - I.area_cauchy(f, ORIGIN)[0])


def bitsadze_values(I, f, gamma0, gamma1, c: complex, zs: np.ndarray) -> np.ndarray:
    zb = np.conj(zs)
    h = lambda s: gamma1(s) - 2 * np.conj(s) * f(s)
    area = (I.area_cauchy(_conj_times(f), zs)
            - zb * (I.area_cauchy(f, zs) - I.area_cauchy(f, ORIGIN)[0]))
    return c * zb + I.cauchy(gamma0, zs) + (1 - np.abs(zs) ** 2) * I.logrem(h, zs, 1) + area


# ---------------------------------------------------------------------------
# Condition integrals (poles outside the disc, origin-centred rules)


class ConditionQuadrature:
    """Sampler for condition kernels 1/(1 - z̄ζ)^p, vectorised over z."""

    def __init__(self, rules: QuadratureBudget | None = None, chunk: int = 16):
        self.rules = DEFAULT_BUDGET if rules is None else rules
        self.s = self.rules.boundary_rule().nodes
        rule = self.rules.area_rule(0j)
        self.p = rule.nodes
        self.w = rule.weights
        self.chunk = chunk

    def boundary(self, g, zs: np.ndarray, power: int = 1, plain: bool = False) -> np.ndarray:
        """B[g/(1 - z̄ζ)^p], or Bd[·] when plain."""
        gv = np.asarray(g(self.s), dtype=complex)
        if plain:
            gv = gv * self.s
        out = np.empty(zs.size, dtype=complex)
        for i in range(0, zs.size, self.chunk):
            zb = np.conj(zs[i:i + self.chunk])[:, None]
            out[i:i + self.chunk] = np.mean(gv[None, :] / (1 - zb * self.s[None, :]) ** power, axis=1)
        return out

    def area(self, g, zs: np.ndarray, power: int = 1) -> np.ndarray:
        """A[g/(1 - z̄ζ)^p] on the origin-centred rule."""
        gv = np.asarray(g(self.p), dtype=complex) * self.w
        out = np.empty(zs.size, dtype=complex)
        for i in range(0, zs.size, self.chunk):
            zb = np.conj(zs[i:i + self.chunk])[:, None]
            out[i:i + self.chunk] = np.sum(gv[None, :] / (1 - zb * self.p[None, :]) ** power, axis=1)
        return out

    def bmean(self, g) -> complex:
        return complex(np.mean(np.asarray(g(self.s), dtype=complex)))


def dirichlet_condition_values(Q: ConditionQuadrature, f, gamma, zs) -> np.ndarray:
    zb = np.conj(zs)
    return zb * Q.boundary(gamma, zs, 1, plain=True) - zb * Q.area(f, zs, 1)


def neumann_condition_values(Q: ConditionQuadrature, f, gamma, zs) -> np.ndarray:
    zb = np.conj(zs)
    return (Q.boundary(gamma, zs) - 2 * Q.boundary(_conj_times(f), zs)
            + zb * Q.area(f, zs, 2))


def bitsadze_condition_values(Q: ConditionQuadrature, f, gamma0, gamma1, c, zs) -> np.ndarray:
    zb = np.conj(zs)
    r1 = (c - Q.boundary(gamma0, zs, 1, plain=True)
          + Q.area(lambda s: (1 - np.abs(s) ** 2) * f(s) / s, zs, 1))
    h = lambda s: gamma1(s) - 2 * np.conj(s) * f(s)
    r2 = Q.boundary(h, zs) + zb * Q.area(f, zs, 2)
    return np.vstack([r1, r2])


# ---------------------------------------------------------------------------
# Public operations


def _residuals(values: np.ndarray, zs: np.ndarray, scalar: bool):
    res = [ConditionResidual(complex(v), DiscPoint(complex(w))) for v, w in zip(values, zs)]
    return res[0] if scalar else res


def _prepare(z, rules):
    rules = DEFAULT_BUDGET if rules is None else rules
    zs, scalar = as_points(z)
    check_safe(zs, rules.r_max)
    return rules, zs, scalar


def dirichlet_cr_condition(f, gamma, z, *, rules: QuadratureBudget | None = None):
    """Bd[z̄γ/(1 - z̄ζ)] - A[z̄f/(1 - z̄ζ)]."""
    rules, zs, scalar = _prepare(z, rules)
    vals = dirichlet_condition_values(ConditionQuadrature(rules), _fn(f, DISC), _fn(gamma, BOUNDARY), zs)
    return _residuals(vals, zs, scalar)


def dirichlet_cr_solve(f, gamma, z, *, rules: QuadratureBudget | None = None, backend: Any = None):
    rules = DEFAULT_BUDGET if rules is None else rules
    zs, scalar = as_points(z)
    I = make_integrals(backend, rules)
    return unwrap(dirichlet_values(I, _fn(f, DISC), _fn(gamma, BOUNDARY), zs), scalar)


def neumann_cr_condition(f, gamma, z, *, rules: QuadratureBudget | None = None):
    """B[γ/(1 - z̄ζ)] - 2B[ζ̄f/(1 - z̄ζ)] + z̄A[f/(1 - z̄ζ)²]."""
    rules, zs, scalar = _prepare(z, rules)
    vals = neumann_condition_values(ConditionQuadrature(rules), _fn(f, DISC), _fn(gamma, BOUNDARY), zs)
    return _residuals(vals, zs, scalar)


def neumann_cr_solve(f, gamma, c, z, *, rules: QuadratureBudget | None = None, backend: Any = None):
    rules = DEFAULT_BUDGET if rules is None else rules
    zs, scalar = as_points(z)
    I = make_integrals(backend, rules)
    return unwrap(neumann_values(I, _fn(f, DISC), _fn(gamma, BOUNDARY), complex(c), zs), scalar)


def bitsadze_dn_conditions(f, gamma0, gamma1, c, z, *, rules: QuadratureBudget | None = None):
    """Residual pair: c - Bd[γ₀/(1 - z̄ζ)] + A[(1-|ζ|²)f/(ζ(1 - z̄ζ))] and
    B[(γ₁ - 2ζ̄f)/(1 - z̄ζ)] + z̄A[f/(1 - z̄ζ)²]."""
    rules, zs, scalar = _prepare(z, rules)
    vals = bitsadze_condition_values(ConditionQuadrature(rules), _fn(f, DISC), _fn(gamma0, BOUNDARY),
                                     _fn(gamma1, BOUNDARY), complex(c), zs)
    first = _residuals(vals[0], zs, scalar)
    second = _residuals(vals[1], zs, scalar)
    return (first, second) if scalar else list(zip(first, second))


def bitsadze_dn_solve(f, gamma0, gamma1, c, z, *, rules: QuadratureBudget | None = None,
                      backend: Any = None):
    rules = DEFAULT_BUDGET if rules is None else rules
    zs, scalar = as_points(z)
    I = make_integrals(backend, rules)
    vals = bitsadze_values(I, _fn(f, DISC), _fn(gamma0, BOUNDARY), _fn(gamma1, BOUNDARY), complex(c), zs)
    return unwrap(vals, scalar)


CONDITION_IDS = {
    "dirichlet_cr": ("dirichlet",),
    "neumann_cr": ("neumann",),
    "bitsadze_dn": ("bitsadze.1", "bitsadze.2"),
}


def base_condition_values(data, zs: np.ndarray, rules: QuadratureBudget | None = None) -> np.ndarray:
    """Residuals of every condition of a base problem, shape (n_conditions, n_z)."""
    Q = ConditionQuadrature(rules)
    if data.kind == "dirichlet_cr":
        return dirichlet_condition_values(Q, data.f, data.gamma0, zs)[None, :]
    if data.kind == "neumann_cr":
        return neumann_condition_values(Q, data.f, data.gamma, zs)[None, :]
    if data.kind == "bitsadze_dn":
        return bitsadze_condition_values(Q, data.f, data.gamma0, data.gamma1, data.c, zs)
    raise ValueError(f"not a base problem kind: {data.kind}")


def base_solution_values(data, zs: np.ndarray, I) -> np.ndarray:
    if data.kind == "dirichlet_cr":
        return dirichlet_values(I, data.f, data.gamma0, zs)
    if data.kind == "neumann_cr":
        return neumann_values(I, data.f, data.gamma, data.c, zs)
    if data.kind == "bitsadze_dn":
        return bitsadze_values(I, data.f, data.gamma0, data.gamma1, data.c, zs)
    raise ValueError(f"not a base problem kind: {data.kind}")
