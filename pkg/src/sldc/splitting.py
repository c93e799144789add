"""Dimensional-splitting time steps for the two transport models.

The kinetic model advects x-lines at the node velocities and v-lines at the
self-consistent electric field; the guiding-center model advects both
directions with the perpendicular drift of the stream-function field, whose
components vary along the sweep and therefore take the traced
variable-coefficient path.  Lie sequencing is first order, Strang
(half/field/full/half) second order; the field is refreshed once per step,
between sweeps, and frozen within each sweep.
"""

from __future__ import annotations

import numpy as np

from .advect1d import AdvectionProblem, sweep
from .grid import ScalarField
from .poisson import Field1D, Field2D, poisson_1d, poisson_2d

MODELS = ("vlasov_poisson", "guiding_center")
SPLITS = ("lie", "strang")


def check_model(model):
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    return model


def check_split(split):
    if split not in SPLITS:
        raise ValueError(f"unknown split {split!r}")
    return split


def charge_density(f: ScalarField) -> np.ndarray:
    """Velocity-space marginal rho_i = sum_j f_ij * dv."""
    return np.sum(f.values, axis=1) * f.grid.d2


def vp_field(f: ScalarField) -> Field1D:
    return poisson_1d(charge_density(f), f.grid.hi1 - f.grid.lo1)


def gc_field(f: ScalarField) -> Field2D:
    g = f.grid
    return poisson_2d(f.values, (g.hi1 - g.lo1, g.hi2 - g.lo2))


def _sweep_x(values, speeds, dt, spacing, kind):
    return sweep(values, AdvectionProblem(speed=speeds, dt=dt, spacing=spacing, kind=kind))


def _sweep_y(values, speeds, dt, spacing, kind):
    s = speeds.T if np.ndim(speeds) == 2 else speeds
    return sweep(values.T, AdvectionProblem(speed=s, dt=dt, spacing=spacing, kind=kind)).T


def step_lie(f: ScalarField, model: str, dt: float, kind: str = "weno5",
             velocity_sign: float = 1.0) -> ScalarField:
    """One first-order split step: x-sweep, field solve, v/y-sweep."""
    check_model(model)
    g = f.grid
    if model == "vlasov_poisson":
        v = g.coords2()
        star = _sweep_x(f.values, v, dt, g.d1, kind)
        efield = poisson_1d(np.sum(star, axis=1) * g.d2, g.hi1 - g.lo1)
        out = _sweep_y(star, efield.E, dt, g.d2, kind)
        return ScalarField(g, out)
    field = gc_field(f)
    a1, _ = field.perp(velocity_sign)
    star = _sweep_x(f.values, a1, dt, g.d1, kind)
    field = poisson_2d(star, (g.hi1 - g.lo1, g.hi2 - g.lo2))
    _, a2 = field.perp(velocity_sign)
    out = _sweep_y(star, a2, dt, g.d2, kind)
    return ScalarField(g, out)


def step_strang(f: ScalarField, model: str, dt: float, kind: str = "weno5",
                velocity_sign: float = 1.0) -> ScalarField:
    """One second-order split step: x-half, field solve, full, x-half."""
    check_model(model)
    g = f.grid
    if model == "vlasov_poisson":
        v = g.coords2()
        star = _sweep_x(f.values, v, 0.5 * dt, g.d1, kind)
        efield = poisson_1d(np.sum(star, axis=1) * g.d2, g.hi1 - g.lo1)
        mid = _sweep_y(star, efield.E, dt, g.d2, kind)
        out = _sweep_x(mid, v, 0.5 * dt, g.d1, kind)
        return ScalarField(g, out)
    field = gc_field(f)
    a1, _ = field.perp(velocity_sign)
    star = _sweep_x(f.values, a1, 0.5 * dt, g.d1, kind)
    field = poisson_2d(star, (g.hi1 - g.lo1, g.hi2 - g.lo2))
    a1, a2 = field.perp(velocity_sign)
    mid = _sweep_y(star, a2, dt, g.d2, kind)
    out = _sweep_x(mid, a1, 0.5 * dt, g.d1, kind)
    return ScalarField(g, out)


def split_step(f: ScalarField, model: str, dt: float, split: str = "lie",
               kind: str = "weno5", velocity_sign: float = 1.0) -> ScalarField:
    check_split(split)
    if split == "lie":
        return step_lie(f, model, dt, kind, velocity_sign)
    return step_strang(f, model, dt, kind, velocity_sign)
