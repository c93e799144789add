"""Benchmark scenario seeds: initial data, domains and run defaults.

Kinetic cases live on [0, 2*pi/k] x [-v_max, v_max] with v_max = 2*pi; the
drift-transport cases on periodic boxes.  The incompressible-flow cases use
the stream-function convention u = (-phi_y, phi_x) (velocity_sign = -1
relative to the guiding-center drift (-E2, E1)); the steady eigenfunction
test keeps its initial state as the exact solution for all times.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import PhaseGrid, ScalarField, build_grid


@dataclass(frozen=True)
class Scenario:
    tag: str
    model: str
    bounds: tuple
    default_n: tuple
    default_cfl: float
    default_T: float
    default_recon: str
    init: Callable[[PhaseGrid], np.ndarray]
    velocity_sign: float = 1.0
    has_exact_steady_state: bool = False


def _landau(grid: PhaseGrid, alpha=0.5, k=0.5):
    x, v = grid.mesh()
    return (1.0 + alpha * np.cos(k * x)) * np.exp(-0.5 * v**2) / np.sqrt(2.0 * np.pi)


def _two_stream_1(grid: PhaseGrid, alpha=0.01, k=0.5):
    x, v = grid.mesh()
    mod = 1.0 + alpha * ((np.cos(2 * k * x) + np.cos(3 * k * x)) / 1.2 + np.cos(k * x))
    return 2.0 / (7.0 * np.sqrt(2.0 * np.pi)) * (1.0 + 5.0 * v**2) * mod * np.exp(-0.5 * v**2)


def _two_stream_2(grid: PhaseGrid, alpha=0.05, k=0.5):
    x, v = grid.mesh()
    return (1.0 + alpha * np.cos(k * x)) * v**2 * np.exp(-0.5 * v**2) / np.sqrt(2.0 * np.pi)


def _kelvin_helmholtz(grid: PhaseGrid, k=0.5):
    x, y = grid.mesh()
    return np.sin(y) + 0.015 * np.cos(k * x)


def _euler_accuracy(grid: PhaseGrid):
    x, y = grid.mesh()
    return -2.0 * np.sin(x) * np.sin(y)


def _shear_flow(grid: PhaseGrid, delta=0.05, rho=np.pi / 15.0):
    x, y = grid.mesh()
    lower = delta * np.cos(x) - np.cosh((y - 0.5 * np.pi) / rho) ** -2 / rho
    upper = delta * np.cos(x) + np.cosh((1.5 * np.pi - y) / rho) ** -2 / rho
    return np.where(y <= np.pi, lower, upper)


def _vortex_patch(grid: PhaseGrid):
    x, y = grid.mesh()
    out = np.zeros_like(x)
    in_x = (x >= 0.5 * np.pi) & (x <= 1.5 * np.pi)
    out[in_x & (y >= 0.25 * np.pi) & (y <= 0.75 * np.pi)] = -1.0
    out[in_x & (y >= 1.25 * np.pi) & (y <= 1.75 * np.pi)] = 1.0
    return out


_VMAX = 2.0 * np.pi
_KINETIC_BOUNDS = (0.0, 4.0 * np.pi, -_VMAX, _VMAX)
_BOX_2PI = (0.0, 2.0 * np.pi, 0.0, 2.0 * np.pi)

SCENARIOS = {
    "landau_strong": Scenario(
        "landau_strong", "vlasov_poisson", _KINETIC_BOUNDS, (256, 256), 0.6, 40.0,
        "weno5", _landau),
    "two_stream_1": Scenario(
        "two_stream_1", "vlasov_poisson", _KINETIC_BOUNDS, (256, 256), 0.6, 40.0,
        "weno5", _two_stream_1),
    "two_stream_2": Scenario(
        "two_stream_2", "vlasov_poisson", _KINETIC_BOUNDS, (256, 256), 0.6, 40.0,
        "weno5", _two_stream_2),
    "kelvin_helmholtz": Scenario(
        "kelvin_helmholtz", "guiding_center", (0.0, 4.0 * np.pi, 0.0, 2.0 * np.pi),
        (128, 128), 0.67, 40.0, "weno5", _kelvin_helmholtz),
    "euler_accuracy": Scenario(
        "euler_accuracy", "guiding_center", _BOX_2PI, (300, 300), 0.67, 1.0,
        "linear3", _euler_accuracy, velocity_sign=-1.0, has_exact_steady_state=True),
    "shear_flow": Scenario(
        "shear_flow", "guiding_center", _BOX_2PI, (128, 128), 0.67, 8.0,
        "weno5", _shear_flow, velocity_sign=-1.0),
    "vortex_patch": Scenario(
        "vortex_patch", "guiding_center", _BOX_2PI, (256, 256), 0.67, 10.0,
        "weno5", _vortex_patch, velocity_sign=-1.0),
}


def get_scenario(tag: str) -> Scenario:
    try:
        return SCENARIOS[tag]
    except KeyError:
        raise ValueError(f"unknown scenario {tag!r}; choose from {sorted(SCENARIOS)}")


def initial_field(scenario: Scenario, n1: int, n2: int) -> ScalarField:
    grid = build_grid(n1, n2, scenario.bounds)
    return ScalarField(grid, scenario.init(grid))
