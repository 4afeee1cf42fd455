"""Periodic-box spectral grid and Fourier-transform conventions.

Continuum convention used throughout the package:

    f_hat(xi) = (2*pi)^(-d) * integral f(x) exp(-i x.xi) dx
    f(x)      = integral f_hat(xi) exp(i x.xi) dxi

On an n^d periodic box of side L this becomes

    f_hat[k] = (dx / (2*pi))^d * FFT(f)[k],        xi_k = (2*pi/L) * k,

so that every spectral sum weighted by d_eta = (2*pi/L)^d is a Riemann sum
of the corresponding continuum integral.  Two consequences the rest of the
code relies on:

  * the convolution theorem is exact without extra constants:
    (f*g)_hat[k] = sum_j f_hat[k-j] g_hat[j] * d_eta,
  * Parseval carries a factor (2*pi)^d:
    ||f||_{L^2}^2 = (2*pi)^d * sum_k |f_hat[k]|^2 * d_eta.
"""

import numpy as np
import scipy.fft

from .errors import GridMismatch


class SpectralGrid:
    """Uniform n^d lattice on a periodic box [0, L)^d.

    Dealiasing keeps integer modes with every |component| <= (n-1)//3,
    strictly below n/3, so quadratic products of kept modes can never wrap
    back onto the kept band (3*K < n).
    """

    def __init__(self, n, length, ndim=3):
        if n < 4:
            raise ValueError("grid needs at least 4 points per axis")
        self.n = int(n)
        self.length = float(length)
        self.ndim = int(ndim)
        self.shape = (self.n,) * self.ndim
        self.size = self.n ** self.ndim
        self.dx = self.length / self.n
        self.dk = 2.0 * np.pi / self.length
        self.volume = self.length ** self.ndim
        self.d_eta = self.dk ** self.ndim
        # forward-transform prefactor (dx / 2pi)^d
        self._fwd = (self.dx / (2.0 * np.pi)) ** self.ndim

        k1 = np.rint(np.fft.fftfreq(self.n) * self.n).astype(np.int64)
        self.k_int = k1
        mesh = np.meshgrid(*([k1] * self.ndim), indexing="ij")
        self.modes = np.stack(mesh, axis=-1)            # (*shape, d) integers
        self.xi = self.dk * self.modes                   # (*shape, d) wavevectors
        self.xi_norm = np.linalg.norm(self.xi, axis=-1)  # (*shape)

        self.dealias_limit = (self.n - 1) // 3
        self.dealias_mask = np.all(
            np.abs(self.modes) <= self.dealias_limit, axis=-1)

        x1 = np.arange(self.n) * self.dx
        self.x = np.meshgrid(*([x1] * self.ndim), indexing="ij")
        self.center = self.length / 2.0
        # coordinate weight centered at the box center
        self.x_centered = [xi_ax - self.center for xi_ax in self.x]
        self.r2_centered = sum(ax ** 2 for ax in self.x_centered)

    # -- transforms ---------------------------------------------------------

    def to_spectral(self, f):
        return scipy.fft.fftn(f, axes=range(-self.ndim, 0), workers=-1) * self._fwd

    def to_physical(self, fhat):
        return scipy.fft.ifftn(fhat, axes=range(-self.ndim, 0), workers=-1) / self._fwd

    # -- hygiene ------------------------------------------------------------

    def dealias(self, fhat):
        return np.where(self.dealias_mask, fhat, 0.0)

    def reflect(self, fhat):
        """fhat evaluated at -xi:  out[k] = fhat[(-k) mod n]."""
        axes = tuple(range(-self.ndim, 0))
        return np.roll(np.flip(fhat, axis=axes), 1, axis=axes)

    def conjugate_symmetrize(self, fhat):
        """Project onto conjugate-symmetric fields (real in physical space)."""
        return 0.5 * (fhat + np.conj(self.reflect(fhat)))

    def conjugate_symmetry_defect(self, fhat):
        return float(np.max(np.abs(fhat - np.conj(self.reflect(fhat)))))

    # -- misc ---------------------------------------------------------------

    @property
    def nyquist(self):
        return np.pi / self.dx

    def require_same(self, other):
        if (self.n, self.length, self.ndim) != (other.n, other.length, other.ndim):
            raise GridMismatch(
                f"grids differ: {self.n}^{self.ndim}/L={self.length} vs "
                f"{other.n}^{other.ndim}/L={other.length}")

    def __repr__(self):
        return f"SpectralGrid(n={self.n}, length={self.length}, ndim={self.ndim})"
