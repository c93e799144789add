"""Von Neumann analysis of the composed linear one-step schemes.

The composed scheme for the model problem f_t + f_x = 0 on a periodic line
is linear and translation invariant, so its full one-interval update is a
circulant stencil f_j^{n+1} = sum_k C_k f_{j+k}^n.  Rather than composing
the stencil symbolically, the update is applied to a unit impulse on a probe
grid and the response row read off; a second, shifted impulse guards against
accidental nonlinearity or translation variance.  Amplification factors
follow by evaluating the symbol at sampled phases, and the largest stable
CFL number per sub-interval is located by a coarse scan plus bisection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .advect1d import AdvectionProblem, sweep
from .idc import quadrature_matrix
from .reconstruct import check_kind, flux_difference

XI_SAMPLES = 2000
AMP_TOL = 1e-12
NO_RESTRICTION = float("inf")


@dataclass
class LinearStencil:
    """Circulant one-step stencil at a fixed CFL number."""

    offsets: np.ndarray
    coeffs: np.ndarray
    lam: float

    def consistency_sum(self) -> float:
        return float(np.sum(self.coeffs))


@dataclass
class AmplificationProfile:
    xis: np.ndarray
    magnitudes: np.ndarray

    def max(self) -> float:
        return float(np.max(self.magnitudes))


def make_idc_advection_step(recon: str, M: int, K: int):
    """One-interval IDC step for f_t + f_x = 0 with unit spacing.

    Returns ``step(line, lam)`` advancing one full interval of M sub-steps
    at CFL number lam per sub-step, with K correction sweeps.  This is the
    same recurrence as the phase-space stepper with the field terms absent.
    """
    check_kind(recon)
    if recon == "weno5":
        raise ValueError("stability analysis applies to the linear kinds only")

    def step(line, lam):
        lam = float(lam)
        prob = AdvectionProblem(speed=1.0, dt=lam, spacing=1.0, kind=recon)
        etas = [np.asarray(line, dtype=float)]
        for _ in range(M):
            etas.append(sweep(etas[-1], prob))
        if K == 0:
            return etas[M]
        alpha = quadrature_matrix(M, lam)
        for _ in range(K):
            g = [flux_difference(eta, 1.0, recon, 1.0) for eta in etas]
            delta = np.zeros_like(etas[0])
            deltas = [delta]
            for m in range(M):
                dstar = sweep(delta, prob)
                quad = sum(alpha[m, ell] * g[ell] for ell in range(M + 1))
                delta = dstar - quad + etas[m] - etas[m + 1]
                deltas.append(delta)
            etas = [e + d for e, d in zip(etas, deltas)]
        return etas[M]

    return step


def extract_stencil(step, lam: float, n_probe: int = 256) -> LinearStencil:
    """Read the circulant coefficients of a linear step off an impulse.

    Verifies translation invariance with a second probe; raises ValueError
    if the probes disagree beyond 1e-12 (nonlinear or translation-variant
    step, or a probe grid smaller than the stencil).
    """
    center = n_probe // 2
    impulse = np.zeros(n_probe)
    impulse[center] = 1.0
    response = step(impulse, lam)
    shift = n_probe // 3
    impulse2 = np.roll(impulse, shift)
    response2 = step(impulse2, lam)
    if np.max(np.abs(np.roll(response2, -shift) - response)) > 1e-12:
        raise ValueError("step is not linear translation-invariant on the probe grid")
    # f^{n+1}_j = sum_k C_k f_{j+k}: impulse at c gives response[j] = C_{c-j},
    # offsets spanning [center - n + 1, center] without wrapping
    full_offsets = center - np.arange(n_probe)
    keep = np.abs(response) > 1e-14 * max(1.0, np.max(np.abs(response)))
    if not np.any(keep):
        keep = np.zeros_like(keep, dtype=bool)
        keep[center] = True
    order = np.argsort(full_offsets[keep])
    return LinearStencil(offsets=full_offsets[keep][order],
                         coeffs=response[keep][order], lam=float(lam))


def amplification(stencil: LinearStencil, xi) -> np.ndarray | float:
    """|a(xi)| = |sum_k C_k exp(i k xi)|."""
    scalar = np.ndim(xi) == 0
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    phases = np.exp(1j * np.outer(xi, stencil.offsets))
    mags = np.abs(phases @ stencil.coeffs)
    return float(mags[0]) if scalar else mags


def amplification_profile(stencil: LinearStencil, samples: int = XI_SAMPLES):
    xis = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    return AmplificationProfile(xis=xis, magnitudes=amplification(stencil, xis))


def _is_stable(step, lam, samples, n_probe):
    profile = amplification_profile(extract_stencil(step, lam, n_probe), samples)
    return profile.max() <= 1.0 + AMP_TOL


def max_cfl(step, lam_scan_max: float = 10.0, lam_step: float = 0.01,
            bisect_tol: float = 1e-3, samples: int = XI_SAMPLES,
            n_probe: int = 256) -> float:
    """Largest stable CFL number per sub-interval, or inf if none found.

    Scans lam in steps of ``lam_step`` until the first unstable value, then
    bisects the bracket.  Stable across the whole scan reports
    ``NO_RESTRICTION`` (the printed tables call it "no restriction").
    """
    lams = np.arange(lam_step, lam_scan_max + 0.5 * lam_step, lam_step)
    lo = None
    hi = None
    for lam in lams:
        if _is_stable(step, lam, samples, n_probe):
            lo = float(lam)
        else:
            hi = float(lam)
            break
    if hi is None:
        return NO_RESTRICTION
    if lo is None:
        return 0.0
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if _is_stable(step, mid, samples, n_probe):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def stability_table(recon_list=("linear3", "linear5"),
                    schemes=((1, 0), (1, 1), (2, 0), (2, 1), (2, 2)),
                    **kwargs):
    """CFL upper bounds, rows per reconstruction and columns per (M, K)."""
    table = {}
    for recon in recon_list:
        row = {}
        for M, K in schemes:
            step = make_idc_advection_step(recon, M, K)
            row[f"IDC{M + 1}J{K}"] = max_cfl(step, **kwargs)
        table[recon] = row
    return table
