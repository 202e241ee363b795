import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tribvp.core import NearBoundary
from tribvp.quad import (DEFAULT_BUDGET, PLAIN, AreaRule, BoundaryRule, QuadratureBudget, area_cauchy_kernel,
                         area_mean, boundary_cauchy, boundary_mean, gauss_legendre_unit)

RULE = BoundaryRule.make(1024)
ORIGIN = AreaRule.make(0j, 120, 256)


@pytest.mark.parametrize("g,want", [
    (lambda s: np.ones_like(s), 1),
    (lambda s: s ** 3, 0),
    (lambda s: np.conj(s) * s, 1),
])
def test_boundary_mean_examples(g, want):
    assert abs(boundary_mean(g, RULE) - want) < 1e-14


def test_plain_measure_multiplies_by_zeta():
    # Bd[ζ̄] = B[1] = 1 and Bd[1] = B[ζ] = 0
    plain = BoundaryRule.make(64, PLAIN)
    assert abs(boundary_mean(np.conj, plain) - 1) < 1e-15
    assert abs(boundary_mean(lambda s: np.ones_like(s), plain)) < 1e-15


@pytest.mark.parametrize("g,z,want", [
    (lambda s: s ** 2, 0.3, 0.09),
    (lambda s: np.ones_like(s), 0.5 - 0.2j, 1),
    (np.conj, 0.6j, 0),
])
def test_boundary_cauchy_examples(g, z, want):
    assert abs(boundary_cauchy(g, z, RULE) - want) < 1e-12


def test_boundary_cauchy_refuses_points_near_circle():
    with pytest.raises(NearBoundary):
        boundary_cauchy(np.conj, 0.85, RULE)


def test_area_mean_examples():
    assert abs(area_mean(lambda s: np.ones_like(s), ORIGIN) - 1) < 1e-13
    assert abs(area_mean(lambda s: np.abs(s) ** 2, ORIGIN) - 0.5) < 1e-13
    z = 0.4
    centred = AreaRule.make(z, 120, 256)
    assert abs(area_mean(lambda s: 1 / (s - z), centred) - (-0.4)) < 1e-12


@pytest.mark.parametrize("p", range(9))
@pytest.mark.parametrize("q", range(9))
def test_area_moment_table(p, q):
    # (1/π)∬ ζ^p ζ̄^q = δ_pq/(p+1) in polar coordinates
    got = area_mean(lambda s: s ** p * np.conj(s) ** q, ORIGIN)
    assert abs(got - (1 / (p + 1) if p == q else 0)) < 1e-10


def test_area_cauchy_kernel_examples():
    z = 0.4
    rule = AreaRule.make(z, 120, 256)
    assert abs(area_cauchy_kernel(lambda s: np.ones_like(s), z, rule) + 0.4) < 1e-12
    assert area_cauchy_kernel(lambda s: np.zeros_like(s), z, rule) == 0
    assert abs(area_cauchy_kernel(lambda s: s - z, z, rule) - 1) < 1e-12


@pytest.mark.parametrize("k", range(4))
@pytest.mark.parametrize("z", [0.0, 0.3 - 0.5j, -0.75])
def test_area_cauchy_antiholomorphic_powers(k, z):
    # Cauchy-Pompeiu for ω = z̄^(k+1)/(k+1) with a vanishing boundary term
    rule = AreaRule.make(z, 120, 256)
    got = area_cauchy_kernel(lambda s: np.conj(s) ** k, z, rule)
    assert abs(got + np.conj(z) ** (k + 1) / (k + 1)) < 1e-11


def test_area_cauchy_kernel_requires_centred_rule():
    with pytest.raises(ValueError):
        area_cauchy_kernel(np.conj, 0.3, ORIGIN)


def test_boundary_rule_spectral_convergence_on_exp():
    # B[exp(ζ)] = 1; the n-point rule aliases the modes kn, error Σ 1/(kn)!
    errs = {}
    for n in (2, 4, 8, 16):
        errs[n] = abs(boundary_mean(np.exp, BoundaryRule.make(n)) - 1)
        alias = sum(1 / math.factorial(k * n) for k in range(1, 8))
        assert errs[n] == pytest.approx(alias, rel=1e-6, abs=1e-15)
    assert errs[4] < errs[2] / 10 and errs[8] < errs[4] / 1000
    assert errs[16] < 1e-13


@pytest.mark.parametrize("m", [0, 1, 5, 200, 511])
def test_boundary_rule_exact_for_low_modes(m):
    assert abs(boundary_mean(lambda s: s ** m, RULE) - (m == 0)) < 1e-13


@given(st.complex_numbers(max_magnitude=0.8, allow_nan=False, allow_infinity=False))
def test_area_mean_independent_of_rule_centre(c):
    # A[exp(ζ) ζ̄] = 1/2 from the moment table
    rule = AreaRule.make(c, 80, 160)
    assert abs(area_mean(lambda s: np.exp(s) * np.conj(s), rule) - 0.5) < 1e-8


def test_gauss_legendre_unit_interval():
    x, w = gauss_legendre_unit(7)
    assert np.all((x > 0) & (x < 1))
    assert abs(w.sum() - 1) < 1e-15
    assert abs(np.dot(w, x ** 13) - 1 / 14) < 1e-15


def test_compensated_sum_agrees():
    g = lambda s: np.exp(3 * s) * np.conj(s) ** 2
    a = area_mean(g, ORIGIN)
    b = area_mean(g, ORIGIN, compensated=True)
    assert abs(a - b) < 1e-13


def test_repeated_evaluation_bit_identical():
    g = lambda s: np.sin(s) * np.conj(s) + 1 / (2 - s)
    rule = AreaRule.make(0.3 + 0.2j, 120, 256)
    first = area_cauchy_kernel(g, 0.3 + 0.2j, rule)
    with ThreadPoolExecutor(4) as pool:
        again = list(pool.map(lambda _: area_cauchy_kernel(g, 0.3 + 0.2j, AreaRule.make(0.3 + 0.2j, 120, 256)),
                              range(8)))
    assert all(v == first for v in again)


def test_budget_json_and_doubling():
    b = QuadratureBudget(64, 20, 40, 0.7)
    assert QuadratureBudget.from_json_dict(b.to_json_dict()) == b
    assert b.doubled() == QuadratureBudget(128, 40, 80, 0.7)
    assert b.with_area_doubled() == QuadratureBudget(64, 40, 80, 0.7)
    assert DEFAULT_BUDGET.r_max == 0.8


def test_invalid_rules():
    with pytest.raises(ValueError):
        BoundaryRule.make(0)
    with pytest.raises(ValueError):
        AreaRule.make(1.0, 10, 10)
