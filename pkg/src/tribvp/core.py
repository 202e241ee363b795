"""Domain types shared by every module: points, data functions, problem
bundles, evaluation grids and reports."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Mapping

import numpy as np

R_MAX_DEFAULT = 0.8


# ---------------------------------------------------------------------------
# Errors


class TribvpError(Exception):
    """Base class for all library errors."""


class MissingField(TribvpError):
    def __init__(self, kind: str, field_name: str):
        super().__init__(f"problem kind {kind!r} requires field {field_name!r}")
        self.kind = kind
        self.field = field_name


class ExtraField(TribvpError):
    def __init__(self, kind: str, field_name: str):
        super().__init__(f"problem kind {kind!r} does not take field {field_name!r}")
        self.kind = kind
        self.field = field_name


class NearBoundary(TribvpError):
    """Raised when a quadrature evaluation point lies outside the safe disc."""

    def __init__(self, z: complex, r_max: float):
        super().__init__(f"|z| = {abs(z):.6g} exceeds r_max = {r_max:g}")
        self.z = z
        self.r_max = r_max


class StepTooLarge(TribvpError):
    """Raised when a finite-difference stencil would leave the closed disc."""


class BudgetExceeded(TribvpError):
    """Raised when a composed solve would need too many kernel evaluations."""

    def __init__(self, needed: float, limit: float):
        super().__init__(f"estimated {needed:.3g} kernel evaluations exceed the limit {limit:.3g}")
        self.needed = needed
        self.limit = limit


# ---------------------------------------------------------------------------
# Points


@dataclass(frozen=True)
class DiscPoint:
    """A point of the open unit disc."""

    value: complex

    def __post_init__(self) -> None:
        v = complex(self.value)
        if not np.isfinite(v.real) or not np.isfinite(v.imag) or abs(v) >= 1.0:
            raise ValueError(f"DiscPoint requires |z| < 1, got {v!r}")
        object.__setattr__(self, "value", v)

    def is_safe(self, r_max: float = R_MAX_DEFAULT) -> bool:
        return abs(self.value) <= r_max

    def __complex__(self) -> complex:
        return self.value


def as_points(z: Any) -> tuple[np.ndarray, bool]:
    """Normalise a scalar, DiscPoint or array-like into a flat complex array.

    The flag tells whether the input was a scalar so results can be unwrapped.
    """
    if isinstance(z, DiscPoint):
        return np.array([z.value]), True
    if np.isscalar(z):
        return np.array([complex(z)]), True
    if isinstance(z, (list, tuple)) and z and isinstance(z[0], DiscPoint):
        return np.array([p.value for p in z]), False
    arr = np.asarray(z, dtype=complex)
    return arr.ravel(), arr.ndim == 0


def unwrap(values: np.ndarray, scalar: bool):
    return complex(values[0]) if scalar else values


def check_safe(zs: np.ndarray, r_max: float) -> None:
    """Raise NearBoundary for the first point with |z| > r_max."""
    bad = np.nonzero(np.abs(zs) > r_max)[0]
    if bad.size:
        raise NearBoundary(complex(zs[bad[0]]), r_max)


def spiral_points(n: int = 64, r_max: float = R_MAX_DEFAULT) -> np.ndarray:
    """Fixed sample of the disc |z| <= r_max: a golden-angle spiral.

    Radii grow as sqrt so the sample is roughly area-uniform; the last point
    sits on |z| = r_max where the condition kernels are hardest.
    """
    k = np.arange(n)
    r = r_max * np.sqrt((k + 0.5) / n) if n > 1 else np.array([0.0])
    if n > 1:
        r[-1] = r_max
    golden = np.pi * (3.0 - np.sqrt(5.0))
    return r * np.exp(1j * golden * k)


def thread_count() -> int:
    """Worker count, capped by the TRIBVP_THREADS environment variable."""
    raw = os.environ.get("TRIBVP_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, min(4, os.cpu_count() or 1))


# ---------------------------------------------------------------------------
# Functions


DISC = "closed-disc"
BOUNDARY = "boundary"


class ComplexFunction:
    """A vectorised complex map tagged with the set it may be sampled on.

    Boundary-tagged functions are only evaluated on the unit circle; any
    other argument is a programming error and raises ValueError.
    """

    def __init__(self, evaluator: Callable[[np.ndarray], Any], domain_tag: str = DISC,
                 source: str | None = None):
        if domain_tag not in (DISC, BOUNDARY):
            raise ValueError(f"unknown domain tag {domain_tag!r}")
        self.evaluator = evaluator
        self.domain_tag = domain_tag
        self.source = source

    def __call__(self, z):
        arr = np.asarray(z, dtype=complex)
        if self.domain_tag == BOUNDARY and arr.size:
            dev = np.max(np.abs(np.abs(arr) - 1.0))
            if dev > 1e-9:
                raise ValueError("boundary function evaluated off the unit circle")
        out = np.asarray(self.evaluator(arr), dtype=complex)
        if out.shape != arr.shape:
            out = np.broadcast_to(out, arr.shape).copy()
        return out

    def on(self, domain_tag: str) -> "ComplexFunction":
        return ComplexFunction(self.evaluator, domain_tag, self.source)

    def __repr__(self) -> str:
        label = self.source if self.source is not None else getattr(self.evaluator, "__name__", "fn")
        return f"ComplexFunction({label!r}, {self.domain_tag})"


def as_function(obj: Any, domain_tag: str = DISC) -> ComplexFunction:
    """Coerce expressions, strings, constants and callables to ComplexFunction."""
    from .expr import Expression, parse  # local import: expr depends on core

    if obj is None:
        raise TypeError("cannot build a function from None")
    if isinstance(obj, ComplexFunction):
        return obj if obj.domain_tag == domain_tag else obj.on(domain_tag)
    if isinstance(obj, str):
        obj = parse(obj)
    if isinstance(obj, Expression):
        return ComplexFunction(obj.evaluator(), domain_tag, obj.to_string())
    if isinstance(obj, (int, float, complex, np.number)):
        const = complex(obj)
        return ComplexFunction(lambda s, c=const: np.full(np.shape(s), c, dtype=complex),
                               domain_tag, _format_complex(const))
    if callable(obj):
        return ComplexFunction(obj, domain_tag)
    raise TypeError(f"cannot interpret {type(obj).__name__} as a function")


def _format_complex(c: complex) -> str:
    from .expr import Num

    return Num(c).to_string()


# ---------------------------------------------------------------------------
# Problem data


KINDS = ("dirichlet_cr", "neumann_cr", "bitsadze_dn", "tri_ndn", "tri_dnd")
KIND_ALIASES = {"ndn": "tri_ndn", "dnd": "tri_dnd", "dirichlet": "dirichlet_cr",
                "neumann": "neumann_cr", "bitsadze": "bitsadze_dn"}
FUNCTION_FIELDS = ("f", "gamma", "gamma0", "gamma1")
CONSTANT_FIELDS = ("c", "c1")
REQUIRED_FIELDS = {
    "dirichlet_cr": ("f", "gamma0"),
    "neumann_cr": ("f", "gamma", "c"),
    "bitsadze_dn": ("f", "gamma0", "gamma1", "c"),
    "tri_ndn": ("f", "gamma", "gamma0", "gamma1", "c", "c1"),
    "tri_dnd": ("f", "gamma", "gamma0", "gamma1", "c"),
}
CONDITION_COUNT = {"dirichlet_cr": 1, "neumann_cr": 1, "bitsadze_dn": 2, "tri_ndn": 3, "tri_dnd": 3}
PDE_ORDER = {"dirichlet_cr": 1, "neumann_cr": 1, "bitsadze_dn": 2, "tri_ndn": 3, "tri_dnd": 3}


def canonical_kind(kind: str) -> str:
    k = KIND_ALIASES.get(kind, kind)
    if k not in KINDS:
        raise ValueError(f"unknown problem kind {kind!r}")
    return k


@dataclass(frozen=True)
class ProblemData:
    """Data bundle for one boundary value problem.

    For ``dirichlet_cr`` the boundary values live in ``gamma0``.
    """

    kind: str
    f: ComplexFunction | None = None
    gamma: ComplexFunction | None = None
    gamma0: ComplexFunction | None = None
    gamma1: ComplexFunction | None = None
    c: complex | None = None
    c1: complex | None = None

    @classmethod
    def build(cls, kind: str, **fields: Any) -> "ProblemData":
        """Convenience constructor accepting strings, numbers and callables."""
        kind = canonical_kind(kind)
        args: dict[str, Any] = {}
        for name, value in fields.items():
            if value is None:
                continue
            if name == "f":
                args[name] = as_function(value, DISC)
            elif name in FUNCTION_FIELDS:
                args[name] = as_function(value, BOUNDARY)
            elif name in CONSTANT_FIELDS:
                args[name] = complex(value)
            else:
                raise TypeError(f"unknown field {name!r}")
        return cls(kind=kind, **args)

    def present(self) -> tuple[str, ...]:
        return tuple(n for n in FUNCTION_FIELDS + CONSTANT_FIELDS if getattr(self, n) is not None)

    def with_fields(self, **changes: Any) -> "ProblemData":
        coerced = ProblemData.build(self.kind, **changes)
        return replace(self, **{name: getattr(coerced, name) for name in changes})

    def to_json_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind}
        for name in FUNCTION_FIELDS:
            fn = getattr(self, name)
            if fn is None:
                continue
            if fn.source is None:
                raise ValueError(f"field {name!r} has no expression source and cannot be serialised")
            out[name] = fn.source
        for name in CONSTANT_FIELDS:
            val = getattr(self, name)
            if val is not None:
                out[name] = [float(val.real), float(val.imag)]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    @classmethod
    def from_json_dict(cls, doc: Mapping[str, Any]) -> "ProblemData":
        if "kind" not in doc:
            raise ValueError("problem document lacks 'kind'")
        fields: dict[str, Any] = {}
        for name, value in doc.items():
            if name == "kind":
                continue
            if name in CONSTANT_FIELDS:
                fields[name] = _parse_constant(value)
            elif name in FUNCTION_FIELDS:
                if not isinstance(value, str):
                    raise ValueError(f"field {name!r} must be an expression string")
                fields[name] = value
            else:
                raise ExtraField(str(doc["kind"]), name)
        return cls.build(str(doc["kind"]), **fields)

    @classmethod
    def from_json(cls, text: str) -> "ProblemData":
        return cls.from_json_dict(json.loads(text))


def _parse_constant(value: Any) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)):
        return complex(value)
    raise ValueError(f"constant must be a [re, im] pair, got {value!r}")


def validate(data: ProblemData) -> ProblemData:
    """Check that the present fields match the problem kind exactly."""
    kind = data.kind
    if kind not in REQUIRED_FIELDS:
        raise ValueError(f"unknown problem kind {kind!r}")
    need = REQUIRED_FIELDS[kind]
    have = data.present()
    for name in need:
        if name not in have:
            raise MissingField(kind, name)
    for name in have:
        if name not in need:
            raise ExtraField(kind, name)
    return data


# ---------------------------------------------------------------------------
# Grids, reports, fields


@dataclass(frozen=True)
class EvaluationGrid:
    points: np.ndarray
    descriptor: Mapping[str, Any]

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=complex).ravel()
        if pts.size and np.max(np.abs(pts)) >= 1.0:
            raise ValueError("grid points must satisfy |z| < 1")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.size)

    @classmethod
    def polar(cls, n_r: int, n_theta: int, r_max: float = R_MAX_DEFAULT) -> "EvaluationGrid":
        """Rings at equispaced radii in (0, r_max] plus the origin."""
        if n_r < 1 or n_theta < 1:
            raise ValueError("polar grid needs n_r, n_theta >= 1")
        radii = r_max * np.arange(1, n_r + 1) / n_r
        theta = 2 * np.pi * np.arange(n_theta) / n_theta
        pts = np.concatenate([[0j], (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()])
        return cls(pts, {"type": "polar", "n_r": n_r, "n_theta": n_theta, "r_max": r_max})

    @classmethod
    def explicit(cls, points: Iterable[complex]) -> "EvaluationGrid":
        return cls(np.asarray(list(points), dtype=complex), {"type": "explicit"})


@dataclass(frozen=True)
class ConditionResidual:
    value: complex
    at: DiscPoint

    def __post_init__(self) -> None:
        if not np.isfinite(self.value):
            raise ValueError("condition residual is not finite")

    def __abs__(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class ConditionSup:
    condition_id: str
    sup_residual: float
    argmax_point: DiscPoint


@dataclass(frozen=True)
class SolvabilityReport:
    per_condition: tuple[ConditionSup, ...]
    tolerance_used: float

    @property
    def passed(self) -> bool:
        return all(c.sup_residual <= self.tolerance_used for c in self.per_condition)

    @property
    def max_residual(self) -> float:
        return max((c.sup_residual for c in self.per_condition), default=0.0)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "tolerance": self.tolerance_used,
            "passed": self.passed,
            "conditions": [
                {"id": c.condition_id, "sup_residual": c.sup_residual,
                 "argmax": [c.argmax_point.value.real, c.argmax_point.value.imag]}
                for c in self.per_condition
            ],
        }


@dataclass(frozen=True)
class SolutionField:
    grid: EvaluationGrid
    values: np.ndarray
    diagnostics: Mapping[str, Any] | None = None
    provenance: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=complex).ravel()
        if vals.size != len(self.grid):
            raise ValueError("values length must equal grid length")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def to_csv(self) -> str:
        lines = ["x,y,re,im"]
        for p, v in zip(self.grid.points, self.values):
            lines.append(f"{p.real:.17g},{p.imag:.17g},{v.real:.17g},{v.imag:.17g}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def read_csv(text: str) -> tuple[np.ndarray, np.ndarray]:
        rows = [ln for ln in text.splitlines() if ln.strip()]
        if not rows or rows[0].strip() != "x,y,re,im":
            raise ValueError("expected a CSV with header x,y,re,im")
        data = np.array([[float(t) for t in ln.split(",")] for ln in rows[1:]]).reshape(-1, 4)
        return data[:, 0] + 1j * data[:, 1], data[:, 2] + 1j * data[:, 3]


@dataclass(frozen=True)
class SolveOutput:
    """A solved field together with the solvability report of its data."""

    field: SolutionField
    report: SolvabilityReport
    method: str
