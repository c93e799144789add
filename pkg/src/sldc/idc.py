"""Integral deferred correction for initial value problems.

One interval [t, t + M*dtau] carries M+1 uniformly spaced nodes.  A forward
Euler prediction fills the nodes; each correction sweep evolves the error
through the integral form of the residual,

    delta[m+1] = delta[m]
               + dtau*(g(tau_m, eta_m + delta_m) - g(tau_m, eta_m))
               + sum_l alpha[m, l] * g(tau_l, eta_l)
               + eta_m - eta_{m+1},

with alpha the exact sub-interval integrals of the degree-M Lagrange basis.
Each Euler sweep lifts the observed order by one until the uniform-node
collocation limit.  No continuous interpolant is ever built; the recurrence
uses nodal values only.

This module is deliberately independent of the PDE code: it is both the
supplier of the quadrature weights and the stand-alone oracle used to verify
the order-lifting property.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lagrange import uniform_subinterval_alpha


@dataclass(frozen=True)
class IdcNodes:
    """Uniform quadrature nodes of one interval."""

    M: int
    dtau: float
    start: float = 0.0

    @property
    def taus(self) -> np.ndarray:
        return self.start + self.dtau * np.arange(self.M + 1)


def quadrature_matrix(M: int, dtau: float) -> np.ndarray:
    """Weights alpha[m, l] with sum_l alpha[m, l]*p(l*dtau) = int over
    [m*dtau, (m+1)*dtau] of p, exact for polynomials of degree <= M."""
    rows = uniform_subinterval_alpha(M)
    return dtau * np.array([[float(w) for w in row] for row in rows])


def idc_interval(rhs, y0, nodes: IdcNodes, K: int, alpha=None):
    """Advance one IDC interval; returns the M+1 nodal solution values."""
    M, dtau = nodes.M, nodes.dtau
    taus = nodes.taus
    if alpha is None:
        alpha = quadrature_matrix(M, dtau)
    y0 = np.asarray(y0, dtype=float)
    eta = np.empty((M + 1,) + y0.shape)
    eta[0] = y0
    for m in range(M):
        eta[m + 1] = eta[m] + dtau * np.asarray(rhs(taus[m], eta[m]))
    for _ in range(K):
        g_nodes = np.array([rhs(taus[m], eta[m]) for m in range(M + 1)])
        delta = np.zeros_like(eta)
        for m in range(M):
            corr = dtau * (np.asarray(rhs(taus[m], eta[m] + delta[m])) - g_nodes[m])
            quad = np.tensordot(alpha[m], g_nodes, axes=(0, 0))
            delta[m + 1] = delta[m] + corr + quad + eta[m] - eta[m + 1]
        eta = eta + delta
    return eta


def idc_ode_solve(rhs, y0, T, intervals: int, M: int, K: int):
    """Integrate y' = rhs(t, y) over [0, T] with IDC(M+1)J(K).

    Returns ``(times, states)`` at interval endpoints, including t = 0.
    Stability is the caller's concern; the stepper never subdivides.
    """
    if intervals < 1:
        raise ValueError("need at least one interval")
    y = np.asarray(y0, dtype=float)
    dt = T / intervals
    dtau = dt / M
    alpha = quadrature_matrix(M, dtau)
    times = np.linspace(0.0, T, intervals + 1)
    states = np.empty((intervals + 1,) + y.shape)
    states[0] = y
    for n in range(intervals):
        nodes = IdcNodes(M=M, dtau=dtau, start=times[n])
        y = idc_interval(rhs, y, nodes, K, alpha=alpha)[M]
        states[n + 1] = y
    return times, states
