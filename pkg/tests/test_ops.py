import numpy as np
import pytest

from tribvp.core import NearBoundary, StepTooLarge
from tribvp.ops import (KernelId, QuadratureIntegrals, cauchy_transform, fd_normal_derivative, fd_wirtinger,
                        fd_wirtinger_dbar, fd_wirtinger_dz, log_kernel, make_integrals, pompeiu_T)
from tribvp.quad import QuadratureBudget
from tribvp.spectral import SpectralIntegrals

PTS = np.array([0.0, 0.3, -0.2 + 0.5j, 0.6j, -0.45 - 0.3j])


@pytest.mark.parametrize("n", range(5))
def test_cauchy_transform_of_powers(n):
    np.testing.assert_allclose(cauchy_transform(lambda s: s ** n, PTS), PTS ** n, atol=1e-13)


def test_cauchy_transform_examples():
    np.testing.assert_allclose(cauchy_transform(np.conj, PTS), 0, atol=1e-14)
    np.testing.assert_allclose(cauchy_transform(lambda s: np.ones_like(s), PTS), 1, atol=1e-14)
    assert isinstance(cauchy_transform("z^2", 0.3), complex)


def test_pompeiu_examples():
    np.testing.assert_allclose(pompeiu_T("1", PTS), np.conj(PTS), atol=1e-12)
    np.testing.assert_allclose(pompeiu_T("0", PTS), 0, atol=0)


def test_operators_refuse_points_near_circle():
    with pytest.raises(NearBoundary):
        pompeiu_T("1", 0.9)
    with pytest.raises(NearBoundary):
        cauchy_transform("z", [0.1, 0.95j])


FIELDS = [
    lambda s: np.ones_like(s),
    lambda s: s * np.conj(s),
    lambda s: np.exp(s),
    lambda s: np.conj(s) ** 2 + 1j * s,
    lambda s: 1 / (2 - s),
]


@pytest.mark.parametrize("f", FIELDS)
def test_pompeiu_is_right_inverse_of_dbar(f):
    zs = np.array([0.1, -0.3 + 0.4j, 0.5j, 0.6])
    got = fd_wirtinger_dbar(lambda w: pompeiu_T(f, w), zs, h=1e-4)
    assert np.max(np.abs(got - f(zs))) <= 1e-4


@pytest.mark.parametrize("g", [np.conj, lambda s: np.exp(np.conj(s)), lambda s: 1 / (2 - s), lambda s: s ** 3])
def test_cauchy_transform_is_holomorphic(g):
    zs = np.array([0.0, 0.2 - 0.4j, 0.65])
    got = fd_wirtinger_dbar(lambda w: cauchy_transform(g, w), zs, h=1e-4)
    assert np.max(np.abs(got)) <= 1e-6


def test_log_kernel_examples():
    assert log_kernel(0, 0.3 + 0.1j) == 0
    assert abs(log_kernel(0.5, 1) - np.log(0.5)) < 1e-15


def test_log_kernel_matches_series():
    z, zeta = 0.7 - 0.4j, np.exp(2.1j)
    u = z * np.conj(zeta)
    series = -sum(u ** n / n for n in range(1, 200))
    assert abs(log_kernel(z, zeta) - series) < 1e-13


def test_fd_examples():
    assert abs(fd_wirtinger_dbar(lambda w: np.conj(w) ** 2, 0.3, h=1e-5) - 0.6) < 1e-8
    assert abs(fd_wirtinger_dbar(lambda w: w ** 3, 0.3 + 0.1j)) < 1e-8
    z = 0.2 + 0.1j
    assert abs(fd_wirtinger_dbar(lambda w: w * np.conj(w), z) - z) < 1e-8
    assert abs(fd_wirtinger_dz(lambda w: w * np.conj(w), z) - np.conj(z)) < 1e-8


@pytest.mark.parametrize("k,j", [(2, 0), (3, 0), (1, 1), (0, 2)])
def test_fd_higher_orders(k, j):
    # field z^a z̄^b with a = 3, b = 4: ∂z̄^k ∂z^j by hand
    z = 0.2 - 0.3j
    a, b = 3, 4
    coef = np.prod(range(b - k + 1, b + 1)) * np.prod(range(a - j + 1, a + 1))
    want = coef * z ** (a - j) * np.conj(z) ** (b - k)
    got = fd_wirtinger(lambda w: w ** a * np.conj(w) ** b, z, k, j, h=1e-3)
    assert abs(got - want) < 1e-4


def test_fd_step_too_large():
    with pytest.raises(StepTooLarge):
        fd_wirtinger_dbar(np.conj, 0.99995, h=1e-4)
    with pytest.raises(StepTooLarge):
        fd_wirtinger(np.conj, 0.8, 3, 0, h=0.1)
    with pytest.raises(StepTooLarge):
        fd_normal_derivative(np.conj, 1.0, h=0.5)


@pytest.mark.parametrize("theta", [0.0, np.pi / 4, 2.0, 5.5])
def test_fd_normal_derivative_examples(theta):
    s = np.exp(1j * theta)
    assert abs(fd_normal_derivative(lambda w: np.conj(w) ** 3, s) - 3 * np.conj(s) ** 3) < 1e-6
    assert abs(fd_normal_derivative(lambda w: 7 + 0 * w, s)) < 1e-10
    assert abs(fd_normal_derivative(lambda w: w, s) - s) < 1e-9


def test_kernel_pole_placement():
    assert KernelId.POMPEIU.needs_centered_rule
    assert KernelId.SCHWARZ_CONDITION.interior_poles == ("0", "z")
    assert not KernelId.EXTERIOR_POLE_2.needs_centered_rule
    assert not KernelId.LOG_NEUMANN.needs_centered_rule


# logrem(g, z, m) = B[g log(1 - zζ̄)] / z^m with the removable singularity filled in.
# For g = ζ^3 + ζ the series -Σ zⁿ/n B[g ζ̄ⁿ] gives -z³/3 - z.
LOGREM_ORACLE = {
    0: lambda z: -z ** 3 / 3 - z,
    1: lambda z: -z ** 2 / 3 - 1,
    2: lambda z: -z / 3 - 1 / z if z != 0 else np.nan,
}


@pytest.mark.parametrize("backend", [QuadratureIntegrals(), SpectralIntegrals()])
@pytest.mark.parametrize("m", [0, 1])
def test_logrem_series_oracle(backend, m):
    zs = np.array([0, 4e-4, 9.99e-4, 1.001e-3, 0.3 - 0.2j, 0.7j])
    got = backend.logrem(lambda s: s ** 3 + s, zs, m)
    np.testing.assert_allclose(got, LOGREM_ORACLE[m](zs), atol=1e-12)


@pytest.mark.parametrize("backend", [QuadratureIntegrals(), SpectralIntegrals()])
def test_logrem_second_order(backend):
    # g = ζ² gives B[gL] = -z²/2, so the m = 2 value is the constant -1/2
    zs = np.array([0, 5e-4, 0.2, -0.6j])
    np.testing.assert_allclose(backend.logrem(lambda s: s ** 2, zs, 2), -0.5, atol=1e-12)


def test_quadrature_threads_do_not_change_results():
    g = lambda s: np.exp(s) * np.conj(s) ** 2
    zs = np.array([0.1, 0.2j, -0.5 + 0.3j, 0.7])
    one = QuadratureIntegrals(threads=1).area_cauchy(g, zs)
    four = QuadratureIntegrals(threads=4).area_cauchy(g, zs)
    np.testing.assert_array_equal(one, four)


def test_make_integrals():
    assert isinstance(make_integrals(None), QuadratureIntegrals)
    assert isinstance(make_integrals("spectral"), SpectralIntegrals)
    custom = QuadratureIntegrals(QuadratureBudget(64, 10, 20))
    assert make_integrals(custom) is custom
    with pytest.raises(ValueError):
        make_integrals("monte-carlo")
