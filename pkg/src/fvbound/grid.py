"""Uniform 1D spatial grid and space-time bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid1D:
    """Uniform cell-centered grid on [x_min, x_max] with J cells.

    Cell j spans [x_min + j*dx, x_min + (j+1)*dx] for j = 0..J-1.
    """

    x_min: float
    x_max: float
    J: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError(f"need x_max > x_min, got [{self.x_min}, {self.x_max}]")
        if self.J < 1:
            raise ValueError(f"need at least one cell, got J={self.J}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.J

    def interfaces(self) -> np.ndarray:
        """Positions of the J+1 cell interfaces."""
        return np.linspace(self.x_min, self.x_max, self.J + 1)

    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.J) + 0.5) * self.dx

    def cell_bounds(self, j: int) -> tuple[float, float]:
        return (self.x_min + j * self.dx, self.x_min + (j + 1) * self.dx)


@dataclass(frozen=True)
class TimeLevels:
    """Strictly increasing time instants t^0 < ... < t^N."""

    t: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        object.__setattr__(self, "t", t)
        if t.ndim != 1 or t.size < 1:
            raise ValueError("need a 1D, non-empty sequence of times")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("time levels must be strictly increasing")

    @property
    def n_steps(self) -> int:
        return self.t.size - 1

    def dt(self, n: int) -> float:
        return float(self.t[n + 1] - self.t[n])


@dataclass(frozen=True)
class SpaceTimeCell:
    """Cell (j, n): [t^n, t^{n+1}) x (x_{j-1/2}, x_{j+1/2})."""

    j: int
    n: int

    def validate(self, grid: Grid1D, times: TimeLevels) -> None:
        if not 0 <= self.j < grid.J:
            raise IndexError(f"cell index j={self.j} outside 0..{grid.J - 1}")
        if not 0 <= self.n < times.n_steps:
            raise IndexError(f"time index n={self.n} outside 0..{times.n_steps - 1}")


def build_grid(x_min: float, x_max: float, level: int) -> Grid1D:
    """Grid with 2 * 2**level cells; level 0 gives the two-cell grid."""
    if level < 0:
        raise ValueError(f"refinement level must be >= 0, got {level}")
    return Grid1D(float(x_min), float(x_max), 2 * 2**level)


def cfl_timestep(
    states: np.ndarray,
    model,
    grid: Grid1D,
    cfl: float,
    ghost_left: np.ndarray | None = None,
    ghost_right: np.ndarray | None = None,
    max_dt: float = math.inf,
) -> float:
    """Largest stable explicit step: dt = cfl * dx / lambda_max.

    lambda_max is the max over all cells (ghost states included) of the
    sup-norm of the wave speeds.  A non-propagating solution (lambda_max = 0)
    gets the configured max_dt.
    """
    if cfl <= 0:
        raise ValueError(f"cfl must be positive, got {cfl}")
    states = np.atleast_2d(np.asarray(states, dtype=float))
    scan = [states]
    if ghost_left is not None:
        scan.append(np.atleast_2d(np.asarray(ghost_left, dtype=float)))
    if ghost_right is not None:
        scan.append(np.atleast_2d(np.asarray(ghost_right, dtype=float)))
    lam = 0.0
    for block in scan:
        model.check_domain(block)
        speeds = np.abs(model.wave_speeds(block))
        if speeds.size:
            lam = max(lam, float(speeds.max()))
    if lam == 0.0:
        return max_dt
    return min(cfl * grid.dx / lam, max_dt)
