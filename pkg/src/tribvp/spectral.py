"""Fourier-mode implementation of the integral primitives, valid on the
closed disc.

Boundary primitives use the coefficients ĝ_n = B[g ζ̄^n] of the data:

    Bd[g/(ζ - w)]     = Σ_{n≥0} ĝ_n w^n
    B[g log(1 - wζ̄)] = -Σ_{n≥1} ĝ_n w^n / n

Area primitives expand g in angular modes g_k(ρ) and split the radial
integral at ρ = |w|, where 1/(ζ - w) changes its Laurent expansion:

    A[g/(ζ - w)] = 2 Σ_{k≥1} ∫_{|w|}^1 (w/ρ)^{k-1} g_k dρ
                 - 2 Σ_{k≤0} ∫_0^{|w|} (ρ/w)^{1-k} g_k dρ

Both radial pieces are smooth, so Gauss-Legendre converges spectrally for
every |w| <= 1, including targets on the circle itself.
"""

from __future__ import annotations

from typing import Any, Callable

import numpy as np

from .quad import gauss_legendre_unit


def _mode_numbers(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, 1.0 / n).round().astype(int)


def _polyval(coeffs: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """Σ_p coeffs[p] z^p by Horner's rule."""
    out = np.zeros(zs.shape, dtype=complex)
    for c in coeffs[::-1]:
        out = out * zs + c
    return out


class SpectralIntegrals:
    """Primitive set built on FFTs of boundary data and ring samples of area
    integrands. Cost per distinct target radius: 2·n_sub rings of n_theta
    samples per area integrand."""

    name = "spectral"

    def __init__(self, boundary_n: int = 1024, n_theta: int = 128, n_sub: int = 40):
        self.boundary_n = int(boundary_n)
        self.n_theta = int(n_theta)
        self.n_sub = int(n_sub)
        self._bnodes = np.exp(2j * np.pi * np.arange(self.boundary_n) / self.boundary_n)
        self._theta = 2 * np.pi * np.arange(self.n_theta) / self.n_theta
        self._unit = np.exp(1j * self._theta)
        self._k = _mode_numbers(self.n_theta)
        self.evaluations = 0

    def descriptor(self) -> dict[str, Any]:
        return {"backend": self.name, "boundary_n": self.boundary_n,
                "area_ntheta": self.n_theta, "radial_nodes_per_side": self.n_sub}

    # -- boundary ----------------------------------------------------------

    def coefficients(self, g: Callable) -> np.ndarray:
        """Discrete Fourier coefficients of g on the circle, FFT ordering."""
        vals = np.asarray(g(self._bnodes), dtype=complex)
        self.evaluations += self.boundary_n
        return np.fft.fft(vals) / self.boundary_n

    def bmean(self, g: Callable) -> complex:
        return complex(self.coefficients(g)[0])

    def cauchy(self, g: Callable, zs: np.ndarray) -> np.ndarray:
        ghat = self.coefficients(g)
        half = self.boundary_n // 2
        return _polyval(ghat[:half], zs)

    def logrem(self, g: Callable, zs: np.ndarray, m: int) -> np.ndarray:
        ghat = self.coefficients(g)
        half = self.boundary_n // 2
        n = np.arange(half)
        coeff = np.zeros(half, dtype=complex)
        keep = n >= max(m, 1)
        coeff[keep] = -ghat[:half][keep] / n[keep]
        # power of z is n - m
        return _polyval(coeff[m:], zs)

    # -- area --------------------------------------------------------------

    def ring_modes(self, g: Callable, radii: np.ndarray) -> np.ndarray:
        """g_k(ρ_j), shape (len(radii), n_theta), FFT ordering in k."""
        if getattr(g, "n_theta", None) == self.n_theta and hasattr(g, "ring_modes"):
            self.evaluations += radii.size * self.n_theta
            return g.ring_modes(radii)
        pts = radii[:, None] * self._unit[None, :]
        vals = np.asarray(g(pts), dtype=complex).reshape(pts.shape)
        self.evaluations += pts.size
        return np.fft.fft(vals, axis=1) / self.n_theta

    def amean(self, g: Callable) -> complex:
        x, w = gauss_legendre_unit(2 * self.n_sub)
        modes = self.ring_modes(g, x)
        return complex(2 * np.sum(w * x * modes[:, 0]))

    def _ring_coefficients(self, g: Callable, r: float) -> np.ndarray:
        """c_k with A[g/(ζ - w)] = Σ_k c_k e^{i(k-1)φ} for w = r e^{iφ}."""
        x, w = gauss_legendre_unit(self.n_sub)
        k = self._k
        coeff = np.zeros(self.n_theta, dtype=complex)
        if r < 1.0:
            rho = r + (1 - r) * x
            wt = (1 - r) * w
            modes = self.ring_modes(g, rho)
            pos = k >= 1
            ratio = (r / rho)[:, None] ** (k[pos] - 1)[None, :]
            coeff[pos] = 2 * np.sum(wt[:, None] * ratio * modes[:, pos], axis=0)
        if r > 0.0:
            rho = r * x
            wt = r * w
            modes = self.ring_modes(g, rho)
            neg = k <= 0
            ratio = (rho / r)[:, None] ** (1 - k[neg])[None, :]
            coeff[neg] = -2 * np.sum(wt[:, None] * ratio * modes[:, neg], axis=0)
        return coeff

    def area_cauchy(self, g: Callable, zs: np.ndarray) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        radii = np.abs(zs)
        if np.any(radii > 1.0 + 1e-12):
            raise ValueError("spectral area integrals need |z| <= 1")
        out = np.empty(zs.size, dtype=complex)
        # targets whose radii agree to rounding share one set of rings
        _, first, inv = np.unique(np.round(radii, 12), return_index=True, return_inverse=True)
        for idx, lead in enumerate(first):
            members = np.nonzero(inv == idx)[0]
            coeff = self._ring_coefficients(g, min(float(radii[lead]), 1.0))
            phase = np.angle(zs[members])
            expo = np.exp(1j * np.outer(phase, self._k - 1))
            out[members] = expo @ coeff
        return out


class PolarField:
    """Interpolant of a disc function sampled on a polar master grid.

    Radii are Chebyshev-Lobatto points on [0, 1] (both ends included),
    angles are uniform. Evaluation interpolates the angular Fourier
    coefficients in ρ with the barycentric formula and sums the Fourier
    series at the requested angles.
    """

    def __init__(self, values_on: Callable[[np.ndarray], np.ndarray], n_rho: int = 41,
                 n_theta: int = 128):
        self.n_rho = int(n_rho)
        self.n_theta = int(n_theta)
        j = np.arange(self.n_rho)
        self.rho = (1 - np.cos(np.pi * j / (self.n_rho - 1))) / 2
        self.theta = 2 * np.pi * np.arange(self.n_theta) / self.n_theta
        bw = (-1.0) ** j
        bw[0] *= 0.5
        bw[-1] *= 0.5
        self._bary = bw
        self._k = _mode_numbers(self.n_theta)
        pts = self.rho[1:, None] * np.exp(1j * self.theta)[None, :]
        vals = np.empty((self.n_rho, self.n_theta), dtype=complex)
        vals[1:] = np.asarray(values_on(pts.ravel()), dtype=complex).reshape(pts.shape)
        vals[0] = complex(np.asarray(values_on(np.array([0j])))[0])
        self.samples = vals
        self.coefficients = np.fft.fft(vals, axis=1) / self.n_theta

    @property
    def size(self) -> int:
        return self.samples.size

    def ring_modes(self, radii: np.ndarray) -> np.ndarray:
        """Angular Fourier coefficients on rings of the given radii."""
        return self._interp_matrix(np.minimum(np.asarray(radii, dtype=float), 1.0)) @ self.coefficients

    def times_conj(self, power: int = 1) -> "ConjProduct":
        return ConjProduct(self, power)

    def _interp_matrix(self, r: np.ndarray) -> np.ndarray:
        diff = r[:, None] - self.rho[None, :]
        exact = diff == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            q = self._bary[None, :] / diff
            mat = q / q.sum(axis=1, keepdims=True)
        hit = exact.any(axis=1)
        if np.any(hit):
            mat[hit] = exact[hit].astype(float)
        return mat

    def __call__(self, z):
        pts = np.asarray(z, dtype=complex)
        flat = pts.ravel()
        r = np.abs(flat)
        if np.any(r > 1.0 + 1e-12):
            raise ValueError("PolarField is defined on the closed unit disc only")
        r = np.minimum(r, 1.0)
        keys, first, inv = np.unique(np.round(r, 12), return_index=True, return_inverse=True)
        coeff = self._interp_matrix(r[first]) @ self.coefficients
        phase = np.angle(flat)
        out = np.einsum("ij,ij->i", coeff[inv], np.exp(1j * np.outer(phase, self._k)))
        return out.reshape(pts.shape)


class ConjProduct:
    """ζ̄^p·g for a field g exposing ring modes; on a uniform ring the
    product's discrete modes are those of g shifted by p, times ρ^p."""

    def __init__(self, base: Any, power: int):
        self.base = base
        self.power = int(power)
        self.n_theta = base.n_theta

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.conj(z) ** self.power * self.base(z)

    def ring_modes(self, radii: np.ndarray) -> np.ndarray:
        radii = np.asarray(radii, dtype=float)
        modes = np.roll(self.base.ring_modes(radii), -self.power, axis=1)
        return modes * (radii ** self.power)[:, None]

    def times_conj(self, power: int = 1) -> "ConjProduct":
        return ConjProduct(self.base, self.power + power)
