"""Quadrature on the unit circle and the unit disc.

Notation used across the package::

    B[g]  = (1/2πi) ∮ g(ζ) dζ/ζ      boundary mean
    Bd[g] = (1/2πi) ∮ g(ζ) dζ        plain boundary integral
    A[g]  = (1/π) ∬ g(ζ) dξ dη      area mean

The circle rule is the trapezoid rule. The disc rule is a polar tensor rule
(Gauss-Legendre in radius, trapezoid in angle) around an arbitrary centre;
the ray from the centre in direction θ leaves the disc at
R(θ) = -a + sqrt(a² + 1 - |c|²), a = Re(conj(c) e^{iθ}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Mapping

import numpy as np

from .core import R_MAX_DEFAULT, NearBoundary

PER_ZETA = "per-zeta"
PLAIN = "plain"


@dataclass(frozen=True)
class QuadratureBudget:
    """Node budgets and the safe radius used by every quadrature evaluation."""

    boundary_n: int = 1024
    area_nr: int = 120
    area_ntheta: int = 256
    r_max: float = R_MAX_DEFAULT

    def doubled(self) -> "QuadratureBudget":
        return QuadratureBudget(2 * self.boundary_n, 2 * self.area_nr, 2 * self.area_ntheta, self.r_max)

    def with_area_doubled(self) -> "QuadratureBudget":
        return QuadratureBudget(self.boundary_n, 2 * self.area_nr, 2 * self.area_ntheta, self.r_max)

    def to_json_dict(self) -> dict[str, Any]:
        return {"boundary_n": self.boundary_n, "area_nr": self.area_nr,
                "area_ntheta": self.area_ntheta, "r_max": self.r_max}

    @classmethod
    def from_json_dict(cls, doc: Mapping[str, Any]) -> "QuadratureBudget":
        return cls(int(doc.get("boundary_n", 1024)), int(doc.get("area_nr", 120)),
                   int(doc.get("area_ntheta", 256)), float(doc.get("r_max", R_MAX_DEFAULT)))

    def boundary_rule(self, measure: str = PER_ZETA) -> "BoundaryRule":
        return BoundaryRule.make(self.boundary_n, measure)

    def area_rule(self, center: complex = 0j) -> "AreaRule":
        return AreaRule.make(center, self.area_nr, self.area_ntheta)


DEFAULT_BUDGET = QuadratureBudget()
IDENTITY_BUDGET = DEFAULT_BUDGET.doubled()


# ---------------------------------------------------------------------------
# Rules


@dataclass(frozen=True, eq=False)
class BoundaryRule:
    n: int
    nodes: np.ndarray
    measure: str

    @staticmethod
    def make(n: int, measure: str = PER_ZETA) -> "BoundaryRule":
        return _boundary_rule(int(n), measure)


@lru_cache(maxsize=32)
def _boundary_rule(n: int, measure: str) -> BoundaryRule:
    if n < 1:
        raise ValueError("boundary rule needs n >= 1")
    if measure not in (PER_ZETA, PLAIN):
        raise ValueError(f"unknown measure {measure!r}")
    nodes = np.exp(2j * np.pi * np.arange(n) / n)
    nodes.setflags(write=False)
    return BoundaryRule(n, nodes, measure)


@lru_cache(maxsize=16)
def gauss_legendre_unit(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


@dataclass(frozen=True, eq=False)
class AreaRule:
    """Polar tensor rule tiling the unit disc around ``center``.

    Arrays have shape (n_r, n_theta) flattened radial-major. ``radius`` and
    ``direction`` are the polar coordinates relative to the centre, so a
    kernel 1/(ζ - center) equals conj(direction)/radius on the nodes.
    """

    center: complex
    n_r: int
    n_theta: int
    nodes: np.ndarray
    weights: np.ndarray
    radius: np.ndarray
    direction: np.ndarray
    # weights / radius, i.e. the rule without its Jacobian factor
    reduced_weights: np.ndarray

    @staticmethod
    def make(center: complex, n_r: int, n_theta: int) -> "AreaRule":
        c = complex(center)
        if abs(c) >= 1:
            raise ValueError("area rule centre must lie inside the disc")
        return _area_rule(c, int(n_r), int(n_theta))

    @property
    def cauchy_weights(self) -> np.ndarray:
        """Weights w_k / (ζ_k - center), computed without dividing by r."""
        return self.reduced_weights * np.conj(self.direction)


@lru_cache(maxsize=512)
def _area_rule(c: complex, n_r: int, n_theta: int) -> AreaRule:
    if n_r < 1 or n_theta < 1:
        raise ValueError("area rule needs n_r, n_theta >= 1")
    t = 2 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    e = np.exp(1j * t)
    a = np.real(np.conj(c) * e)
    R = -a + np.sqrt(a * a + 1 - abs(c) ** 2)
    x, w = gauss_legendre_unit(n_r)
    r = x[:, None] * R[None, :]
    reduced = (w[:, None] * R[None, :]) * (2 / n_theta) * np.ones_like(r)
    weights = reduced * r
    direction = np.broadcast_to(e[None, :], r.shape)
    nodes = c + r * direction
    arrays = [nodes.ravel(), weights.ravel(), r.ravel(), direction.ravel().copy(), reduced.ravel()]
    for arr in arrays:
        arr.setflags(write=False)
    return AreaRule(c, n_r, n_theta, *arrays)


# ---------------------------------------------------------------------------
# Integrals


def _sum(values: np.ndarray, compensated: bool) -> complex:
    if compensated:
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return complex(np.sum(values))


def boundary_mean(g: Callable, rule: BoundaryRule, *, compensated: bool = False) -> complex:
    """B[g] for the per-zeta measure, Bd[g] for the plain measure."""
    vals = np.asarray(g(rule.nodes), dtype=complex)
    if rule.measure == PLAIN:
        vals = vals * rule.nodes
    return _sum(vals, compensated) / rule.n


def boundary_cauchy(g: Callable, z: complex, rule: BoundaryRule, *,
                    r_max: float = R_MAX_DEFAULT) -> complex:
    """(1/2πi) ∮ g(ζ)/(ζ - z) dζ by the trapezoid rule."""
    z = complex(z)
    if abs(z) > r_max:
        raise NearBoundary(z, r_max)
    s = rule.nodes
    return complex(np.sum(np.asarray(g(s), dtype=complex) * s / (s - z))) / rule.n


def area_mean(g: Callable, rule: AreaRule, *, compensated: bool = False) -> complex:
    """A[g]. Integrands with a 1/(ζ - c) factor need a rule centred at c."""
    vals = np.asarray(g(rule.nodes), dtype=complex) * rule.weights
    return _sum(vals, compensated)


def area_cauchy_kernel(f: Callable, z: complex, rule_center_z: AreaRule, *,
                       r_max: float = R_MAX_DEFAULT) -> complex:
    """A[f/(ζ - z)] on a rule centred at z; the polar Jacobian absorbs the pole."""
    z = complex(z)
    if abs(z) > r_max:
        raise NearBoundary(z, r_max)
    if abs(rule_center_z.center - z) > 1e-15:
        raise ValueError("area_cauchy_kernel needs a rule centred at z")
    vals = np.asarray(f(rule_center_z.nodes), dtype=complex)
    return complex(np.sum(vals * rule_center_z.cauchy_weights))
