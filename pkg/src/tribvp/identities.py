"""Catalog of closed-form integral identities used by the solution formulas,
each checked as a quadrature left side against its closed-form right side.

Left sides with interior poles are split by partial fractions so every
area term has a single pole, integrated on a polar rule centred there.
In the entries below ``t`` stands for z̃ and L_t = log(1 - ζ t̄).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .core import NearBoundary
from .quad import DEFAULT_BUDGET, IDENTITY_BUDGET, QuadratureBudget

cj = np.conj
TAYLOR_RADIUS = 1e-3


class IdentityQuadrature:
    """B, Bd and A on the rules of one budget."""

    def __init__(self, rules: QuadratureBudget):
        self.rules = rules
        self.s = rules.boundary_rule().nodes

    def B(self, g: Callable) -> complex:
        return complex(np.mean(g(self.s)))

    def Bd(self, g: Callable) -> complex:
        return complex(np.mean(g(self.s) * self.s))

    def A(self, g: Callable, center: complex = 0j) -> complex:
        rule = self.rules.area_rule(center)
        return complex(np.sum(g(rule.nodes) * rule.weights))

    def A_pole(self, g: Callable, pole: complex) -> complex:
        """A[g/(ζ - pole)] with the pole absorbed by the centred rule."""
        rule = self.rules.area_rule(pole)
        return complex(np.sum(g(rule.nodes) * rule.cauchy_weights))

    def A_poles(self, h: Callable, poles: Sequence[complex]) -> complex:
        """A[h / Π(ζ - p)] for distinct simple poles p."""
        total = 0j
        for k, p in enumerate(poles):
            others = [q for j, q in enumerate(poles) if j != k]
            total += self.A_pole(h, p) / np.prod([p - q for q in others])
        return total


@dataclass(frozen=True)
class IdentityEntry:
    id: str
    statement: str
    lhs: Callable[[complex, complex, IdentityQuadrature], complex]
    rhs: Callable[[complex, complex], complex]
    uses_area: bool = True
    rhs_alternative: Callable[[complex, complex], complex] | None = None
    note: str = ""


def _log_t(t):
    return lambda s: np.log1p(-s * cj(t))


def _regular_part(z: complex, t: complex) -> complex:
    """t̄/(2z) + (1-|z|²)² log(1 - z t̄)/(2z²), removable at z = 0."""
    a = abs(z) ** 2
    tb = cj(t)
    if abs(z) < TAYLOR_RADIUS:
        # log(1 - u) + u = -Σ_{n≥2} u^n/n, u = z t̄
        r2 = -sum(z ** (n - 2) * tb ** n / n for n in range(2, 8))
        return cj(z) * tb * (2 - a) / 2 + (1 - a) ** 2 / 2 * r2
    return tb / (2 * z) + (1 - a) ** 2 * np.log1p(-z * tb) / (2 * z ** 2)


def _log_split(z, t, Q: IdentityQuadrature, c_pole: float, c_z: float):
    """c_pole·A[L/(ζ(ζ-z))] - A[L/ζ²] - c_z·A[ζ̄L/(ζ-z)] + A[ζ̄L/ζ]."""
    L = _log_t(t)
    sl = lambda s: cj(s) * L(s)
    if abs(z) < 1e-14:
        first = Q.A(lambda s: L(s) / s ** 2)
        third = Q.A_pole(sl, 0j)
    else:
        first = Q.A_poles(L, [0j, z])
        third = Q.A_pole(sl, z)
    return c_pole * first - Q.A(lambda s: L(s) / s ** 2) - c_z * third + Q.A_pole(sl, 0j)


def _times_z(z, value_fn):
    return 0j if z == 0 else value_fn()


def _catalog() -> list[IdentityEntry]:
    E = []
    add = E.append

    add(IdentityEntry(
        "L2.i", "A[ζ̄ z̄/(1 - z̄ζ)²] = z̄²",
        lambda z, t, Q: Q.A(lambda s: cj(s) * cj(z) / (1 - cj(z) * s) ** 2),
        lambda z, t: cj(z) ** 2))
    add(IdentityEntry(
        "L2.ii", "A[z̄/((t - ζ)(1 - z̄ζ)²)] = (z̄t̄ - 2z̄² + z̄³t)/(1 - z̄t)²",
        lambda z, t, Q: Q.A_poles(lambda s: -cj(z) / (1 - cj(z) * s) ** 2, [t]),
        lambda z, t: (cj(z) * cj(t) - 2 * cj(z) ** 2 + cj(z) ** 3 * t) / (1 - cj(z) * t) ** 2))
    add(IdentityEntry(
        "L2.iii", "A[(1 - |ζ|²)/ζ · L_t · z̄/(1 - z̄ζ)²] = -z̄t̄/2",
        lambda z, t, Q: Q.A_pole(lambda s: (1 - abs(s) ** 2) * _log_t(t)(s) * cj(z) / (1 - cj(z) * s) ** 2, 0j),
        lambda z, t: -cj(z) * cj(t) / 2))

    def iv_rhs(z, t):
        zb, tb, a = cj(z), cj(t), abs(t) ** 2
        return (zb * a * (tb - 4 * zb + 2 * t * zb ** 2) + 2 * zb ** 2 - zb ** 3 * t) / (2 * (1 - zb * t) ** 2)

    def iv_alternative(z, t):
        zb, tb, a = cj(z), cj(t), abs(t) ** 2
        return (zb * a * (2 * t - 4 * zb + 2 * t * zb ** 2 - tb) + 2 * zb ** 2) / (2 * (1 - zb * t) ** 2)

    add(IdentityEntry(
        "L2.iv", "A[(|t|² - |ζ|²)/(t - ζ) · z̄/(1 - z̄ζ)²]",
        lambda z, t, Q: Q.A_poles(lambda s: -(abs(t) ** 2 - abs(s) ** 2) * cj(z) / (1 - cj(z) * s) ** 2, [t]),
        iv_rhs, rhs_alternative=iv_alternative, note="right side corrected"))
    add(IdentityEntry(
        "L2.iv.a", "Bd[ζ̄/(ζ³(ζ̄ - z̄)²(1 - tζ̄))] = (2z̄ - tz̄²)/(1 - z̄t)²",
        lambda z, t, Q: Q.Bd(lambda s: cj(s) / (s ** 3 * (cj(s) - cj(z)) ** 2 * (1 - t * cj(s)))),
        lambda z, t: (2 * cj(z) - t * cj(z) ** 2) / (1 - cj(z) * t) ** 2, uses_area=False))
    add(IdentityEntry(
        "L2.iv.b", "Bd[ζζ̄²/(2(ζ - t)(1 - z̄ζ)²)]",
        lambda z, t, Q: Q.Bd(lambda s: s * cj(s) ** 2 / (2 * (s - t) * (1 - cj(z) * s) ** 2)),
        lambda z, t: (2 * cj(z) - t * cj(z) ** 2) / (2 * (1 - cj(z) * t) ** 2), uses_area=False,
        rhs_alternative=lambda z, t: 2 * cj(z) / (2 * (1 - cj(z) * t) ** 2), note="right side corrected"))
    add(IdentityEntry(
        "L2.v", "A[ζ̄z/(ζ(ζ - z))] = -z̄²/2",
        lambda z, t, Q: _times_z(z, lambda: z * Q.A_poles(cj, [0j, z])),
        lambda z, t: -cj(z) ** 2 / 2))
    add(IdentityEntry(
        "L2.vi", "A[z/((t - ζ)ζ(ζ - z))] = (t̄ - z̄)/(t - z) - t̄/t",
        lambda z, t, Q: _times_z(z, lambda: Q.A_poles(lambda s: -z + 0 * s, [t, 0j, z])),
        lambda z, t: (cj(t) - cj(z)) / (t - z) - cj(t) / t))
    add(IdentityEntry(
        "L2.vii", "(1/2π)∬ (ζ + z)/((ζ - z)ζ) · (1 - |ζ|²)/ζ · L_t",
        lambda z, t, Q: 0.5 * _log_split(z, t, Q, 2.0, 2.0),
        lambda z, t: _regular_part(z, t) + cj(t) ** 2 / 8,
        note="half-weight area measure"))

    def viii_rhs(z, t):
        tb, zb = cj(t), cj(z)
        return abs(t) ** 2 * ((tb - zb) / (t - z) - tb / t) - z * (tb ** 2 - zb ** 2) / (2 * (t - z))

    add(IdentityEntry(
        "L2.viii", "A[(|t|² - |ζ|²)z/((t - ζ)ζ(ζ - z))]",
        lambda z, t, Q: _times_z(z, lambda: Q.A_poles(lambda s: -(abs(t) ** 2 - abs(s) ** 2) * z, [t, 0j, z])),
        viii_rhs, note="bracket denominator read as t - z"))
    add(IdentityEntry(
        "L2.ix", "A[(1 - |ζ|²)/ζ · L_t · z/(ζ(ζ - z))]",
        lambda z, t, Q: 0j if z == 0 else _log_split(z, t, Q, 1.0, 1.0),
        lambda z, t: _regular_part(z, t) + cj(t) ** 2 / 4,
        rhs_alternative=lambda z, t: (cj(t) / 2 + 3 * cj(t) ** 2 / 4
                                  + (1 - abs(z) ** 2) ** 2 * np.log1p(-z * cj(t)) / (2 * z ** 2)),
        note="right side corrected"))

    add(IdentityEntry(
        "L3.i", "A[(1 - |ζ|²)/(ζ(1 - z̄ζ)(t - ζ))] = (2t̄ - t(t̄² + z̄²))/(2t(1 - z̄t))",
        lambda z, t, Q: Q.A_poles(lambda s: -(1 - abs(s) ** 2) / (1 - cj(z) * s), [0j, t]),
        lambda z, t: (2 * cj(t) - t * (cj(t) ** 2 + cj(z) ** 2)) / (2 * t * (1 - cj(z) * t)),
        note="denominator read as t - ζ"))

    def l3_ii(z, t, Q):
        if abs(z) < 1e-14:
            kern = lambda s: -cj(s)
        else:
            kern = lambda s: np.log1p(-z * cj(s)) / z
        return (1 - abs(z) ** 2) * Q.B(lambda s: cj(s) / (t - s) * kern(s))

    add(IdentityEntry("L3.ii", "B[ζ̄/(t - ζ) · (1 - |z|²)/z · log(1 - zζ̄)] = 0", l3_ii,
                      lambda z, t: 0j, uses_area=False))
    add(IdentityEntry(
        "L3.iii", "A[(|ζ|² - |z|²)/(ζ(ζ - z)(t - ζ))]",
        lambda z, t, Q: (Q.A_poles(lambda s: -cj(s), [0j, t]) if z == 0  # poles 0 and z merge
                         else Q.A_poles(lambda s: -(abs(s) ** 2 - abs(z) ** 2), [0j, z, t])),
        lambda z, t: (cj(t) - cj(z)) ** 2 / (2 * (t - z)) + cj(z) * cj(t) / t,
        rhs_alternative=lambda z, t: ((cj(t) * (abs(t) ** 2 - 2 * abs(z) ** 2) + cj(z) ** 2 * (2 - t))
                                  / (2 * t * (t - z))),
        note="right side corrected"))

    L = lambda z: (lambda s: np.log1p(-z * cj(s)))
    add(IdentityEntry(
        "AUX.1", "B[ζ̄/((t - ζ)(1 - z̄ζ))] = -z̄²/(1 - z̄t)",
        lambda z, t, Q: Q.B(lambda s: cj(s) / ((t - s) * (1 - cj(z) * s))),
        lambda z, t: -cj(z) ** 2 / (1 - cj(z) * t), uses_area=False))
    add(IdentityEntry(
        "AUX.2", "B[(|t|² - |ζ|²)/(t - ζ) · ζ̄/(1 - z̄ζ)] = z̄²(1 - |t|²)/(1 - z̄t)",
        lambda z, t, Q: Q.B(lambda s: (abs(t) ** 2 - abs(s) ** 2) / (t - s) * cj(s) / (1 - cj(z) * s)),
        lambda z, t: cj(z) ** 2 * (1 - abs(t) ** 2) / (1 - cj(z) * t), uses_area=False))
    add(IdentityEntry(
        "AUX.3a", "B[ζ̄² log(1 - zζ̄)] = 0",
        lambda z, t, Q: Q.B(lambda s: cj(s) ** 2 * L(z)(s)), lambda z, t: 0j, uses_area=False))
    add(IdentityEntry(
        "AUX.3b", "B[ζ̄ log(1 - zζ̄)/(t - ζ)] = 0",
        lambda z, t, Q: Q.B(lambda s: cj(s) * L(z)(s) / (t - s)), lambda z, t: 0j, uses_area=False))
    add(IdentityEntry(
        "AUX.3c", "B[(|t|² - |ζ|²)ζ̄ log(1 - zζ̄)/(t - ζ)] = 0",
        lambda z, t, Q: Q.B(lambda s: (abs(t) ** 2 - abs(s) ** 2) * cj(s) * L(z)(s) / (t - s)),
        lambda z, t: 0j, uses_area=False))
    add(IdentityEntry(
        "AUX.4", "B[ζ̄²/(1 - z̄ζ)] = z̄²",
        lambda z, t, Q: Q.B(lambda s: cj(s) ** 2 / (1 - cj(z) * s)),
        lambda z, t: cj(z) ** 2, uses_area=False))
    add(IdentityEntry(
        "AUX.5", "B[ζ̄ log(1 - zζ̄)/(t - ζ)] = 0 (Dirichlet-Neumann-Dirichlet composition)",
        lambda z, t, Q: Q.B(lambda s: cj(s) * L(z)(s) / (t - s)), lambda z, t: 0j, uses_area=False))
    return E


CATALOG: tuple[IdentityEntry, ...] = tuple(_catalog())
BY_ID = {e.id: e for e in CATALOG}


def l2_viii_rhs_zeta_reading(z: complex, t: complex, zeta: complex) -> complex:
    """Right side of L2.viii with the bracket denominator t - ζ; it depends on
    the integration variable, so no single value can match the left side."""
    tb, zb = cj(t), cj(z)
    return abs(t) ** 2 * ((tb - zb) / (t - zeta) - tb / t) - z * (tb ** 2 - zb ** 2) / (2 * (t - z))


def l3_i_lhs_display_reading(z: complex, t: complex, rules: QuadratureBudget | None = None) -> complex:
    """L3.i left side with a constant (t - z) denominator in place of (t - ζ)."""
    Q = IdentityQuadrature(IDENTITY_BUDGET if rules is None else rules)
    return Q.A_pole(lambda s: (1 - abs(s) ** 2) / (1 - cj(z) * s), 0j) / (t - z)


# ---------------------------------------------------------------------------
# Checks and sweeps


def check(entry: IdentityEntry | str, z: complex, zt: complex,
          rules: QuadratureBudget | None = None) -> tuple[complex, complex, float]:
    """(lhs, rhs, |lhs - rhs|) at one pair of points."""
    entry = BY_ID[entry] if isinstance(entry, str) else entry
    rules = IDENTITY_BUDGET if rules is None else rules
    z, zt = complex(z), complex(zt)
    for w in (z, zt):
        if abs(w) > rules.r_max:
            raise NearBoundary(w, rules.r_max)
    lhs = entry.lhs(z, zt, IdentityQuadrature(rules))
    rhs = complex(entry.rhs(z, zt))
    return lhs, rhs, abs(lhs - rhs)


def sample_pairs(n_samples: int, seed: int = 0, r_max: float = 0.8) -> np.ndarray:
    """Seeded (z, z̃) pairs, uniform in the disc of radius r_max."""
    rng = np.random.default_rng(seed)
    r = r_max * np.sqrt(rng.random((n_samples, 2)))
    a = 2 * np.pi * rng.random((n_samples, 2))
    return r * np.exp(1j * a)


@dataclass(frozen=True)
class IdentityResult:
    id: str
    max_err: float
    argmax_z: complex
    argmax_zt: complex

    def to_json_dict(self) -> dict[str, Any]:
        return {"id": self.id, "max_err": self.max_err,
                "argmax_z": [self.argmax_z.real, self.argmax_z.imag],
                "argmax_zt": [self.argmax_zt.real, self.argmax_zt.imag]}


@dataclass(frozen=True)
class SweepReport:
    results: tuple[IdentityResult, ...] = field(default_factory=tuple)

    def __iter__(self):
        return iter(self.results)

    def __len__(self) -> int:
        return len(self.results)

    def __getitem__(self, key: str) -> IdentityResult:
        for r in self.results:
            if r.id == key:
                return r
        raise KeyError(key)

    @property
    def max_err(self) -> float:
        return max((r.max_err for r in self.results), default=0.0)

    def to_json_dict(self) -> list[dict[str, Any]]:
        return [r.to_json_dict() for r in self.results]

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _resolve(entries: Iterable[IdentityEntry | str] | None) -> list[IdentityEntry]:
    if entries is None:
        return list(CATALOG)
    return [BY_ID[e] if isinstance(e, str) else e for e in entries]


def sweep(entries: Iterable[IdentityEntry | str] | None = None, n_samples: int = 100, seed: int = 0,
          rules: QuadratureBudget | None = None) -> SweepReport:
    """Max error of each entry over seeded sample pairs."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rules = IDENTITY_BUDGET if rules is None else rules
    pairs = sample_pairs(n_samples, seed, rules.r_max)
    Q = IdentityQuadrature(rules)
    out = []
    for e in _resolve(entries):
        errs = np.array([abs(e.lhs(complex(z), complex(t), Q) - complex(e.rhs(complex(z), complex(t))))
                         for z, t in pairs])
        k = int(np.argmax(errs))
        out.append(IdentityResult(e.id, float(errs[k]), complex(pairs[k, 0]), complex(pairs[k, 1])))
    return SweepReport(tuple(out))


@dataclass(frozen=True)
class ConvergenceRow:
    id: str
    coarse: float
    fine: float
    floor: float

    @property
    def passed(self) -> bool:
        return self.fine <= max(self.coarse / 4, self.floor)


def convergence(entries: Iterable[IdentityEntry | str] | None = None, n_samples: int = 100,
                seed: int = 0, coarse: QuadratureBudget | None = None,
                floor: float = 1e-9) -> list[ConvergenceRow]:
    """Max errors before and after doubling the area nodes; an entry passes
    when the error drops fourfold or is already below the floor."""
    coarse = DEFAULT_BUDGET if coarse is None else coarse
    fine = coarse.with_area_doubled()
    entries = _resolve(entries)
    a = sweep(entries, n_samples, seed, coarse)
    b = sweep(entries, n_samples, seed, fine)
    return [ConvergenceRow(x.id, x.max_err, y.max_err, floor) for x, y in zip(a, b)]
