"""First-order finite-volume time marching and the space-time solution record."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .grid import Grid1D, TimeLevels, SpaceTimeCell, cfl_timestep
from .models import DomainError, make_model, normalize_flux_kind, numerical_flux


@dataclass
class SpaceTimeSolution:
    """Piecewise-constant numerical solution on [t^0, T] x [x_min, x_max].

    states[n] holds the J cell values at time level n; the outer ghost states
    are constant in time (frozen at the initial first/last cell values).
    """

    grid: Grid1D
    times: TimeLevels
    states: np.ndarray  # (N+1, J, m)
    ghost_left: np.ndarray  # (m,)
    ghost_right: np.ndarray  # (m,)
    model: object
    flux_kind: str
    cfl: float
    flux_cache: list | None = field(default=None, repr=False)

    @property
    def n_steps(self) -> int:
        return self.times.n_steps

    @property
    def t0(self) -> float:
        return float(self.times.t[0])

    @property
    def t_final(self) -> float:
        return float(self.times.t[-1])

    def extended_states(self, n: int) -> np.ndarray:
        """Level-n states with the two ghost cells prepended/appended."""
        return np.vstack([self.ghost_left[None, :], self.states[n], self.ghost_right[None, :]])

    def interface_fluxes(self, n: int, kind: str | None = None) -> np.ndarray:
        """Numerical fluxes at the J+1 interfaces for level n.

        Fluxes cached during marching are reused when they match the
        requested kind.
        """
        kind = normalize_flux_kind(kind or self.flux_kind)
        if self.flux_cache is not None and kind == normalize_flux_kind(self.flux_kind):
            return self.flux_cache[n]
        ext = self.extended_states(n)
        return numerical_flux(kind, self.model, ext[:-1], ext[1:])

    def is_constant(self) -> bool:
        return bool(
            np.all(self.states == self.states[0, 0])
            and np.all(self.ghost_left == self.states[0, 0])
            and np.all(self.ghost_right == self.states[0, 0])
        )


def step(
    states: np.ndarray,
    model,
    flux_kind: str,
    grid: Grid1D,
    dt: float,
    ghost_left: np.ndarray,
    ghost_right: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """One conservative update; returns (new states, interface fluxes)."""
    ext = np.vstack([np.asarray(ghost_left)[None, :], states, np.asarray(ghost_right)[None, :]])
    fluxes = numerical_flux(flux_kind, model, ext[:-1], ext[1:])
    new = states - (dt / grid.dx) * (fluxes[1:] - fluxes[:-1])
    return new, fluxes


def run(
    initial: np.ndarray,
    model,
    flux_kind: str,
    grid: Grid1D,
    cfl: float,
    t0: float,
    t_final: float,
    store_fluxes: bool = True,
    max_steps: int = 10_000_000,
) -> SpaceTimeSolution:
    """March from t0 to exactly t_final (last step clipped)."""
    flux_kind = normalize_flux_kind(flux_kind)
    states = np.array(initial, dtype=float)
    if states.ndim == 1:
        states = states[:, None]
    if states.shape != (grid.J, model.m):
        raise ValueError(f"initial states have shape {states.shape}, expected {(grid.J, model.m)}")
    model.check_domain(states)
    ghost_left = states[0].copy()
    ghost_right = states[-1].copy()

    levels = [states]
    times = [t0]
    caches = [] if store_fluxes else None
    t = t0
    n = 0
    while t < t_final - 1e-14 * max(1.0, abs(t_final)):
        if n >= max_steps:
            raise RuntimeError(f"exceeded {max_steps} time steps before reaching t={t_final}")
        dt = cfl_timestep(states, model, grid, cfl, ghost_left, ghost_right,
                          max_dt=t_final - t)
        new, fluxes = step(states, model, flux_kind, grid, dt, ghost_left, ghost_right)
        bad = ~model.in_domain(new)
        if np.any(bad):
            j = int(np.nonzero(bad)[0][0])
            cell = SpaceTimeCell(j=j, n=n)
            raise DomainError(
                f"state left the model domain at cell j={cell.j}, step n={cell.n}, "
                f"t={t + dt:.6g}: {new[j]}"
            )
        if caches is not None:
            caches.append(fluxes)
        states = new
        t = t_final if t_final - (t + dt) <= 1e-14 * max(1.0, abs(t_final)) else t + dt
        levels.append(states)
        times.append(t)
        n += 1

    history = np.array(levels)
    history.setflags(write=False)  # levels are frozen once recorded
    ghost_left.setflags(write=False)
    ghost_right.setflags(write=False)
    return SpaceTimeSolution(
        grid=grid,
        times=TimeLevels(np.array(times)),
        states=history,
        ghost_left=ghost_left,
        ghost_right=ghost_right,
        model=model,
        flux_kind=flux_kind,
        cfl=cfl,
        flux_cache=caches,
    )


def march(
    initial: np.ndarray,
    model,
    flux_kind: str,
    grid: Grid1D,
    cfl: float,
    t0: float,
    t_final: float,
):
    """Generator yielding (t, states) per level without storing the history.

    Used for fine-grid reference runs that would not fit in memory as a full
    SpaceTimeSolution.
    """
    flux_kind = normalize_flux_kind(flux_kind)
    states = np.array(initial, dtype=float)
    if states.ndim == 1:
        states = states[:, None]
    model.check_domain(states)
    ghost_left = states[0].copy()
    ghost_right = states[-1].copy()
    t = t0
    yield t, states
    while t < t_final - 1e-14 * max(1.0, abs(t_final)):
        dt = cfl_timestep(states, model, grid, cfl, ghost_left, ghost_right,
                          max_dt=t_final - t)
        states, _ = step(states, model, flux_kind, grid, dt, ghost_left, ghost_right)
        if not np.all(model.in_domain(states)):
            raise DomainError(f"state left the model domain near t={t + dt:.6g}")
        t = t_final if t_final - (t + dt) <= 1e-14 * max(1.0, abs(t_final)) else t + dt
        yield t, states


def save_solution(sol: SpaceTimeSolution, path: str) -> None:
    """Dump the solution to a single text file: header, then one row per
    time level (t followed by the row-major J x m cell states)."""
    buf = io.StringIO()
    buf.write("# fvbound-solution 1\n")
    params = ",".join(f"{k}={v!r}" for k, v in sorted(sol.model.params().items()))
    buf.write(f"# model={sol.model.name} params={params}\n")
    buf.write(f"# flux={sol.flux_kind} cfl={sol.cfl!r}\n")
    buf.write(f"# x_min={sol.grid.x_min!r} x_max={sol.grid.x_max!r} J={sol.grid.J} m={sol.model.m}\n")
    buf.write(f"# ghost_left={','.join(repr(float(v)) for v in sol.ghost_left)}\n")
    buf.write(f"# ghost_right={','.join(repr(float(v)) for v in sol.ghost_right)}\n")
    for n, t in enumerate(sol.times.t):
        row = sol.states[n].reshape(-1)
        buf.write(repr(float(t)) + "," + ",".join(repr(float(v)) for v in row) + "\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def load_solution(path: str) -> SpaceTimeSolution:
    header: dict[str, str] = {}
    rows = []
    with open(path) as fh:
        magic = fh.readline().strip()
        if magic != "# fvbound-solution 1":
            raise ValueError(f"{path} is not a fvbound solution dump")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].strip().split(" "):
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        header[k] = v
            else:
                rows.append(np.array(line.split(","), dtype=float))
    params = {}
    if header.get("params"):
        for tok in header["params"].split(","):
            k, v = tok.split("=")
            params[k] = float(v)
    model = make_model(header["model"], **params)
    grid = Grid1D(float(header["x_min"]), float(header["x_max"]), int(header["J"]))
    m = int(header["m"])
    data = np.array(rows)
    times = TimeLevels(data[:, 0])
    states = data[:, 1:].reshape(len(rows), grid.J, m)
    return SpaceTimeSolution(
        grid=grid,
        times=times,
        states=states,
        ghost_left=np.array(header["ghost_left"].split(","), dtype=float),
        ghost_right=np.array(header["ghost_right"].split(","), dtype=float),
        model=model,
        flux_kind=header["flux"],
        cfl=float(header["cfl"]),
    )
