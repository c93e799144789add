"""Uniform tensor-product phase-space grids and scalar fields.

The grid is periodic in both dimensions and stores one value per node with
the duplicate endpoint excluded, so ``x_i = lo1 + i*d1`` for ``i = 0..n1-1``
and the node at ``hi1`` is identified with the node at ``lo1``.  Sums over
nodes therefore count each physical location exactly once, which is what the
conservative sweeps and the mass diagnostics both rely on.

Fields are plain value containers; line views along either axis are numpy
views, so distinct lines may be handed to concurrent workers without any
shared mutable state beyond the array being swept.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_NODES = 4  # widest reconstruction stencil must fit


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform periodic grid on [lo1, hi1) x [lo2, hi2)."""

    n1: int
    n2: int
    lo1: float
    hi1: float
    lo2: float
    hi2: float

    @property
    def d1(self) -> float:
        return (self.hi1 - self.lo1) / self.n1

    @property
    def d2(self) -> float:
        return (self.hi2 - self.lo2) / self.n2

    @property
    def cell_volume(self) -> float:
        return self.d1 * self.d2

    def coords1(self) -> np.ndarray:
        return self.lo1 + self.d1 * np.arange(self.n1)

    def coords2(self) -> np.ndarray:
        return self.lo2 + self.d2 * np.arange(self.n2)

    def mesh(self):
        return np.meshgrid(self.coords1(), self.coords2(), indexing="ij")


def build_grid(n1, n2, bounds) -> PhaseGrid:
    """Build a grid from node counts and (lo1, hi1, lo2, hi2) bounds."""
    lo1, hi1, lo2, hi2 = (float(b) for b in bounds)
    n1, n2 = int(n1), int(n2)
    if n1 < MIN_NODES or n2 < MIN_NODES:
        raise ValueError(f"node counts must be >= {MIN_NODES}, got {n1}x{n2}")
    if not (hi1 > lo1 and hi2 > lo2):
        raise ValueError("upper bounds must exceed lower bounds")
    return PhaseGrid(n1, n2, lo1, hi1, lo2, hi2)


class ScalarField:
    """Point values f[i, j] on a PhaseGrid, row-major."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: PhaseGrid, values: np.ndarray | None = None):
        self.grid = grid
        if values is None:
            values = np.zeros((grid.n1, grid.n2))
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.n1, grid.n2):
            raise ValueError(f"values shape {values.shape} does not match grid "
                             f"({grid.n1}, {grid.n2})")
        self.values = values

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    def total(self) -> float:
        return float(np.sum(self.values))

    def mass(self) -> float:
        return self.total() * self.grid.cell_volume

    def check_finite(self):
        if not np.all(np.isfinite(self.values)):
            raise FloatingPointError("field contains NaN or Inf")
        return self


def line_view(field: ScalarField, axis: int, index: int) -> np.ndarray:
    """Writable view of one grid line.

    ``axis=1`` runs over the first dimension at fixed second index;
    ``axis=2`` the other way around.  Iteration order matches node order.
    """
    if axis == 1:
        if not 0 <= index < field.grid.n2:
            raise IndexError(f"line index {index} out of range for axis 1")
        return field.values[:, index]
    if axis == 2:
        if not 0 <= index < field.grid.n1:
            raise IndexError(f"line index {index} out of range for axis 2")
        return field.values[index, :]
    raise ValueError("axis must be 1 or 2")


# Snapshot files: text header `n1 n2 lo1 hi1 lo2 hi2 time`, then n1*n2 values
# in row-major order.  `.txt` stores one value per line with 17 significant
# digits; `.bin` stores raw little-endian float64.

def write_snapshot(path, field: ScalarField, time: float):
    path = str(path)
    g = field.grid
    header = f"{g.n1} {g.n2} {g.lo1:.17g} {g.hi1:.17g} {g.lo2:.17g} {g.hi2:.17g} {time:.17g}\n"
    if path.endswith(".txt"):
        with open(path, "w") as fh:
            fh.write(header)
            for v in field.values.reshape(-1):
                fh.write(f"{v:.17g}\n")
    elif path.endswith(".bin"):
        with open(path, "wb") as fh:
            fh.write(header.encode("ascii"))
            fh.write(field.values.astype("<f8").tobytes(order="C"))
    else:
        raise ValueError("snapshot path must end in .txt or .bin")


def read_snapshot(path):
    """Read a snapshot; returns (field, time)."""
    path = str(path)
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        n1, n2 = int(header[0]), int(header[1])
        lo1, hi1, lo2, hi2, time = (float(x) for x in header[2:7])
        grid = build_grid(n1, n2, (lo1, hi1, lo2, hi2))
        if path.endswith(".txt"):
            data = np.loadtxt(fh, dtype=float)
        elif path.endswith(".bin"):
            raw = fh.read(8 * n1 * n2)
            if len(raw) != 8 * n1 * n2:
                raise ValueError("snapshot payload truncated")
            data = np.frombuffer(raw, dtype="<f8")
        else:
            raise ValueError("snapshot path must end in .txt or .bin")
    field = ScalarField(grid, data.reshape(n1, n2))
    return field, time
