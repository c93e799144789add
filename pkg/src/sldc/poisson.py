"""Spectral Poisson solvers on periodic domains.

The 1-D solver supplies the electric field of the kinetic model from the
charge density; the 2-D solver supplies the stream-function field of the
guiding-center / incompressible-flow models.  Both subtract the source mean
(the periodic solvability condition; physically the neutralizing background)
and report it, fix the k = 0 gauge mode of the potential and field to zero,
and zero the Nyquist mode of spectral derivatives on even grids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Field1D:
    """Electric field on a periodic x-line, zero mean by construction."""

    E: np.ndarray
    phi: np.ndarray
    source_mean: float


@dataclass
class Field2D:
    """Potential gradient field on a periodic 2-D grid."""

    E1: np.ndarray
    E2: np.ndarray
    phi: np.ndarray
    source_mean: float

    def perp(self, sign=1.0):
        """Divergence-free drift velocity (-E2, E1), optionally negated."""
        return sign * -self.E2, sign * self.E1


def _wavenumbers(n, length):
    return 2.0 * np.pi * np.fft.rfftfreq(n, d=length / n)


def poisson_1d(rho, length) -> Field1D:
    """Solve phi'' = 1 - rho (mean-free) on a periodic line; E = -phi_x.

    A uniform neutralizing background equal to the mean of ``rho`` is
    implied: the solver works with the zero-mean part of the source and
    reports the subtracted mean so charge-neutrality drift stays observable.
    """
    rho = np.asarray(rho, dtype=float)
    n = rho.shape[0]
    source = 1.0 - rho
    mean = float(np.mean(source))
    shat = np.fft.rfft(source - mean)
    k = _wavenumbers(n, length)
    inv_k2 = np.zeros_like(k)
    inv_k2[1:] = 1.0 / k[1:] ** 2
    phihat = -shat * inv_k2
    ehat = -1j * k * phihat
    if n % 2 == 0:
        ehat[-1] = 0.0
    phi = np.fft.irfft(phihat, n)
    E = np.fft.irfft(ehat, n)
    return Field1D(E=E, phi=phi, source_mean=mean)


def poisson_2d(rho, lengths) -> Field2D:
    """Solve Lap(phi) = rho (mean-free) on a periodic box; E = -grad(phi)."""
    rho = np.asarray(rho, dtype=float)
    n1, n2 = rho.shape
    L1, L2 = lengths
    mean = float(np.mean(rho))
    shat = np.fft.rfft2(rho - mean)
    k1 = 2.0 * np.pi * np.fft.fftfreq(n1, d=L1 / n1)[:, None]
    k2 = _wavenumbers(n2, L2)[None, :]
    k_sq = k1**2 + k2**2
    inv = np.zeros_like(k_sq)
    nonzero = k_sq > 0
    inv[nonzero] = 1.0 / k_sq[nonzero]
    phihat = -shat * inv  # -k^2 phihat = rhohat
    d1 = 1j * k1 * np.ones_like(k2)
    d2 = 1j * k2 * np.ones_like(k1)
    if n1 % 2 == 0:
        d1[n1 // 2, :] = 0.0
    if n2 % 2 == 0:
        d2[:, -1] = 0.0
    e1hat = -d1 * phihat
    e2hat = -d2 * phihat
    phi = np.fft.irfft2(phihat, s=(n1, n2))
    E1 = np.fft.irfft2(e1hat, s=(n1, n2))
    E2 = np.fft.irfft2(e2hat, s=(n1, n2))
    return Field2D(E1=E1, E2=E2, phi=phi, source_mean=mean)
