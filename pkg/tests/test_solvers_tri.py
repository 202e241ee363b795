import numpy as np
import pytest

from tribvp.core import BudgetExceeded, EvaluationGrid, ProblemData
from tribvp.solvers_base import ConditionQuadrature
from tribvp.solvers_tri import (ComposedBudget, ComposedSolver, condition_report, dnd_condition_values,
                                dnd_conditions, dnd_solve, dnd_solve_composed, dnd_values, ndn_conditions,
                                ndn_solve, ndn_solve_composed, solve)
from tribvp.ops import QuadratureIntegrals
from tribvp.verify import manufacture, perturb, random_problem

SAMPLE = np.array([0.0, 0.3 + 0.2j, -0.5j, 0.62 - 0.3j, 0.8, -0.8j])

NDN_ZBAR3 = dict(f="6", gamma="3*conj(z)^3", gamma0="3*conj(z)^2", gamma1="6*conj(z)", c=0, c1=0)
DND_ZBAR2Z = dict(f="0", gamma0="conj(z)", gamma1="4", gamma="2*z", c=0)


def ndn(**kw):
    return ProblemData.build("tri_ndn", **kw)


def dnd(**kw):
    return ProblemData.build("tri_dnd", **kw)


def _zero(kind, **kw):
    names = ("f", "gamma", "gamma0", "gamma1")
    base = {n: "0" for n in names}
    base.update(c=0)
    if kind == "tri_ndn":
        base.update(c1=0)
    base.update(kw)
    return ProblemData.build(kind, **base)


def _sup(triples):
    return max(abs(r) for t in triples for r in t)


# --- NDN -----------------------------------------------------------------


def test_ndn_constant_solution_forces_c1():
    # ω ≡ 5 has c = 5 and c₁ = ∂z̄²ω(0) = 0; condition 1 must read c₁, not c
    data = _zero("tri_ndn", c=5)
    assert _sup(ndn_conditions(data, SAMPLE)) < 1e-13
    swapped = data.with_fields(c1=data.c)
    first = [abs(t[0]) for t in ndn_conditions(swapped, SAMPLE)]
    assert min(first) == pytest.approx(5)


def test_ndn_manufactured_conditions_vanish():
    assert _sup(ndn_conditions(ndn(**NDN_ZBAR3), SAMPLE)) < 1e-12


def test_ndn_perturbed_gamma_fails_conditions():
    data = perturb(ndn(**NDN_ZBAR3), "gamma")
    assert _sup(ndn_conditions(data, SAMPLE)) >= 1e-2


def test_ndn_solution_examples(inner_points):
    np.testing.assert_allclose(ndn_solve(_zero("tri_ndn", c=3 - 1j), inner_points), 3 - 1j, atol=1e-15)
    np.testing.assert_allclose(ndn_solve(ndn(**NDN_ZBAR3), inner_points), np.conj(inner_points) ** 3,
                               atol=1e-8)


def test_ndn_c1_term_sign(inner_points):
    zb = np.conj(inner_points)
    # formula value for zero data with c₁ = 2 is +z̄², the c₁z̄²/2 term
    np.testing.assert_allclose(ndn_solve(_zero("tri_ndn", c1=2), inner_points), zb ** 2, atol=1e-15)
    # ω = z̄² has c₁ = ∂z̄²ω(0) = 2 and is reproduced only with the + sign
    mp = manufacture("conj(z)^2", "tri_ndn")
    assert mp.data.c1 == 2
    np.testing.assert_allclose(ndn_solve(mp.data, inner_points), zb ** 2, atol=1e-8)


def test_ndn_condition3_carries_doubled_gamma0_term():
    # ω = z̄²z: dropping the -2ζ̄γ₀ term breaks condition 3
    mp = manufacture("conj(z)^2*z", "tri_ndn")
    Q = ConditionQuadrature()
    missing = 2 * Q.boundary(lambda s: np.conj(s) * mp.data.gamma0(s), SAMPLE)
    assert condition_report(mp.data, SAMPLE).max_residual < 1e-12
    assert np.max(np.abs(missing)) > 0.5


# --- DND -----------------------------------------------------------------


def test_dnd_conditions_examples():
    assert _sup(dnd_conditions(_zero("tri_dnd"), SAMPLE)) == 0
    assert _sup(dnd_conditions(dnd(**DND_ZBAR2Z), SAMPLE)) < 1e-12


def test_dnd_perturbed_gamma0_fails_conditions():
    data = perturb(dnd(**DND_ZBAR2Z), "gamma0")
    assert _sup(dnd_conditions(data, SAMPLE)) >= 1e-2


def test_dnd_solution_examples(inner_points):
    zb = np.conj(inner_points)
    np.testing.assert_allclose(dnd_solve(dnd(**DND_ZBAR2Z), inner_points), zb ** 2 * inner_points, atol=1e-8)
    np.testing.assert_allclose(dnd_solve(_zero("tri_dnd", c=1), inner_points), zb, atol=1e-15)
    np.testing.assert_allclose(dnd_solve(_zero("tri_dnd", gamma0="z"), inner_points), inner_points, atol=1e-12)


def test_dnd_condition3_grouping():
    # (γ₁ + z̄γ) sits under the kernel 1/(ζ(1 - z̄ζ)) as a whole; leaving γ₁
    # outside turns B[γ₁/(1 - z̄ζ)] into Bd[γ₁] and breaks ω = z̄²z (γ₁ = 4)
    data = dnd(**DND_ZBAR2Z)
    Q = ConditionQuadrature()
    r3 = dnd_condition_values(Q, data, SAMPLE)[2]
    alt = r3 - Q.boundary(data.gamma1, SAMPLE) + Q.boundary(data.gamma1, SAMPLE, 1, plain=True)
    assert np.max(np.abs(r3)) < 1e-12
    np.testing.assert_allclose(alt, -4, atol=1e-12)


def test_dnd_log_factor_sign(inner_points):
    # ω = z̄²z³ has γ₁ - 2ζ̄γ = 4ζ², so the log term is live; the factor
    # must be (1 - |z|²)/z, and its negative misses the reference
    mp = manufacture("conj(z)^2*z^3", "tri_dnd")
    I = QuadratureIntegrals()
    zs = inner_points
    direct = dnd_values(I, mp.data, zs)
    h = lambda s: mp.data.gamma1(s) - 2 * np.conj(s) * mp.data.gamma(s)
    flipped = direct - 2 * (1 - np.abs(zs) ** 2) * I.logrem(h, zs, 1)
    ref = mp.reference(zs)
    assert np.max(np.abs(direct - ref)) < 1e-8
    assert np.max(np.abs(flipped - ref)) > 0.1


# --- composed solvers ----------------------------------------------------


@pytest.mark.parametrize("kind", ["tri_ndn", "tri_dnd"])
@pytest.mark.parametrize("seed", range(3))
def test_composed_matches_direct_on_random_data(kind, seed, inner_points):
    data = random_problem(kind, seed).data
    direct = (ndn_solve if kind == "tri_ndn" else dnd_solve)(data, inner_points)
    composed = (ndn_solve_composed if kind == "tri_ndn" else dnd_solve_composed)(data, inner_points)
    assert np.max(np.abs(direct - composed)) <= 1e-9


def test_composed_value_at_origin_matches_direct():
    data = random_problem("tri_ndn", 11).data
    assert abs(ndn_solve(data, 0j) - ndn_solve_composed(data, 0j)) <= 1e-10


def test_composed_reaches_the_circle():
    mp = manufacture("conj(z)^3 + 2*i*conj(z)*z^2", "tri_ndn")
    s = np.exp(1j * np.linspace(0, 6, 9))
    assert np.max(np.abs(ndn_solve_composed(mp.data, s) - mp.reference(s))) <= 1e-10


def test_composed_zero_data():
    np.testing.assert_allclose(dnd_solve_composed(_zero("tri_dnd"), SAMPLE), 0, atol=1e-15)
    np.testing.assert_allclose(ndn_solve_composed(_zero("tri_ndn", c=2j), SAMPLE), 2j, atol=1e-14)


def test_composed_budget_is_enforced():
    data = manufacture("conj(z)^3", "tri_ndn").data
    with pytest.raises(BudgetExceeded) as err:
        ComposedSolver(data, ComposedBudget(max_kernel_evaluations=1e5))
    assert err.value.needed > err.value.limit
    solver = ComposedSolver(data, ComposedBudget(max_kernel_evaluations=2e6))
    with pytest.raises(BudgetExceeded):
        solver(np.linspace(0, 0.9, 200))


def test_composed_rejects_wrong_kind():
    with pytest.raises(ValueError):
        ndn_solve_composed(dnd(**DND_ZBAR2Z), 0.1)


# --- linearity and the solve entry point --------------------------------


@pytest.mark.parametrize("kind", ["tri_ndn", "tri_dnd"])
def test_solution_is_linear_in_data(kind, inner_points):
    a, b = 0.7 - 1.3j, 2.1 + 0.4j
    d1, d2 = random_problem(kind, 21).data, random_problem(kind, 22).data
    fields = {n: (lambda n: lambda s: a * getattr(d1, n)(s) + b * getattr(d2, n)(s))(n)
              for n in ("f", "gamma", "gamma0", "gamma1")}
    consts = {n: a * getattr(d1, n) + b * getattr(d2, n) for n in (("c", "c1") if kind == "tri_ndn" else ("c",))}
    mixed = ProblemData.build(kind, **fields, **consts)
    fn = ndn_solve if kind == "tri_ndn" else dnd_solve
    lhs = fn(mixed, inner_points)
    rhs = a * fn(d1, inner_points) + b * fn(d2, inner_points)
    assert np.max(np.abs(lhs - rhs)) <= 1e-9


def test_solve_entry_point_reports_and_provenance():
    grid = EvaluationGrid.polar(3, 8, 0.7)
    out = solve(ndn(**NDN_ZBAR3), grid)
    assert out.report.passed
    assert out.field.provenance["solver"] == "tri_ndn.direct"
    assert np.max(np.abs(out.field.values - np.conj(grid.points) ** 3)) <= 1e-8
    bad = solve(perturb(ndn(**NDN_ZBAR3), "gamma"), grid)
    assert not bad.report.passed
    assert [c.condition_id for c in bad.report.per_condition] == ["ndn.1", "ndn.2", "ndn.3"]


def test_solve_composed_provenance():
    out = solve(dnd(**DND_ZBAR2Z), EvaluationGrid.explicit([0.1, 0.5j]), method="composed")
    assert out.field.provenance["solver"] == "tri_dnd.composed"
    assert out.field.provenance["quadrature"]["backend"] == "spectral"
