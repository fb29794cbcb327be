"""Jump detection, surge trapezoids, and the meso-timeslab decomposition.

A meso-timeslab (a strip of several consecutive time levels) is covered by
surge trapezoids around sufficiently isolated strong discontinuities and by
smooth trapezoids everywhere else.  Trapezoid slopes come from the extreme
wave speeds observed in the slab.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid1D
from .solver import SpaceTimeSolution


def inb(x: float, grid: Grid1D) -> float:
    """Clamp a coordinate into the domain."""
    return max(grid.x_min, min(float(x), grid.x_max))


@dataclass(frozen=True)
class JumpRegion:
    """Maximal run of flagged interfaces, spanning cells j1..j2."""

    j1: int
    j2: int
    x_left: float
    x_right: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.x_left + self.x_right)

    @property
    def width(self) -> float:
        return self.x_right - self.x_left


def detect_jumps(
    sol: SpaceTimeSolution,
    n: int,
    x_interval: tuple[float, float] | None,
    sigma0: float,
) -> list[JumpRegion]:
    """Flag interfaces whose relative jump exceeds sigma0; merge runs.

    The single-level Haar detail of component c at interface j+1/2 is
    |u_{c,j+1} - u_{c,j}| normalized by the value range of that component
    over the whole time level (so the threshold is invariant under solution
    rescaling and offsets); the detector takes the max over components.
    Only interfaces inside x_interval are considered.
    """
    if sigma0 <= 0:
        raise ValueError(f"sigma0 must be positive, got {sigma0}")
    states = sol.states[n]
    grid = sol.grid
    if grid.J < 2:
        return []
    span = states.max(axis=0) - states.min(axis=0)
    # components that are constant up to roundoff cannot carry a jump
    scale = np.where(span > 1e-12 * (1.0 + np.abs(states).max(axis=0)), span, np.inf)
    detail = (np.abs(np.diff(states, axis=0)) / scale).max(axis=1)
    flagged = detail > sigma0
    if x_interval is not None:
        pos = grid.interfaces()[1:-1]
        lo, hi = x_interval
        flagged &= (pos >= lo) & (pos <= hi)

    regions: list[JumpRegion] = []
    edges = grid.interfaces()
    idx = np.nonzero(flagged)[0]
    if idx.size == 0:
        return regions
    run_start = idx[0]
    prev = idx[0]
    for i in list(idx[1:]) + [None]:
        if i is not None and i == prev + 1:
            prev = i
            continue
        j1, j2 = int(run_start), int(prev) + 1
        regions.append(JumpRegion(j1, j2, float(edges[j1]), float(edges[j2 + 1])))
        if i is not None:
            run_start = prev = i
    return regions


@dataclass(frozen=True)
class Trapezoid:
    """Region between two linear boundaries over [t_bot, t_top]:
    bottom interval [a_bot, b_bot], top interval [a_top, b_top]."""

    t_bot: float
    t_top: float
    a_bot: float
    b_bot: float
    a_top: float
    b_top: float

    def left_at(self, t: float) -> float:
        w = (t - self.t_bot) / (self.t_top - self.t_bot)
        return (1.0 - w) * self.a_bot + w * self.a_top

    def right_at(self, t: float) -> float:
        w = (t - self.t_bot) / (self.t_top - self.t_bot)
        return (1.0 - w) * self.b_bot + w * self.b_top

    def to_json_dict(self) -> dict:
        return {
            "t_bot": self.t_bot,
            "t_top": self.t_top,
            "bottom": [self.a_bot, self.b_bot],
            "top": [self.a_top, self.b_top],
        }


def _cells_touching(grid: Grid1D, xlo: float, xhi: float) -> tuple[int, int] | None:
    """Closed range of cell indices whose closed cell touches [xlo, xhi]."""
    slop = 1e-9
    j_lo = int(np.ceil((xlo - grid.x_min) / grid.dx - 1.0 - slop))
    j_hi = int(np.floor((xhi - grid.x_min) / grid.dx + slop))
    j_lo = max(j_lo, 0)
    j_hi = min(j_hi, grid.J - 1)
    if j_lo > j_hi:
        return None
    return j_lo, j_hi


def trapezoid_cell_ranges(
    trap: Trapezoid, sol: SpaceTimeSolution, n_lo: int, n_hi: int
) -> list[tuple[int, int, int]]:
    """(level, j_lo, j_hi) for cells whose closed space-time rectangle meets
    the trapezoid; boundary touching counts."""
    times = sol.times.t
    out = []
    span = trap.t_top - trap.t_bot
    if span <= 0:
        return out
    for level in range(n_lo, n_hi):
        w_lo = max(float(times[level]), trap.t_bot)
        w_hi = min(float(times[level + 1]), trap.t_top)
        if w_lo > w_hi:
            continue
        # restrict to the sub-window where the trapezoid is non-degenerate
        g_lo = trap.right_at(w_lo) - trap.left_at(w_lo)
        g_hi = trap.right_at(w_hi) - trap.left_at(w_hi)
        if g_lo < 0.0 and g_hi < 0.0:
            continue
        if g_lo < 0.0 or g_hi < 0.0:
            # linear in t, single sign change
            t_root = w_lo + (w_hi - w_lo) * g_lo / (g_lo - g_hi)
            if g_lo < 0.0:
                w_lo = t_root
            else:
                w_hi = t_root
        xlo = min(trap.left_at(w_lo), trap.left_at(w_hi))
        xhi = max(trap.right_at(w_lo), trap.right_at(w_hi))
        rng = _cells_touching(sol.grid, xlo, xhi)
        if rng is not None:
            out.append((level, rng[0], rng[1]))
    return out


def _minmax_over_ranges(sol: SpaceTimeSolution, ranges) -> tuple[np.ndarray, np.ndarray] | None:
    mins = None
    maxs = None
    for level, j_lo, j_hi in ranges:
        block = sol.states[level][j_lo : j_hi + 1]
        bmin, bmax = block.min(axis=0), block.max(axis=0)
        if mins is None:
            mins, maxs = bmin, bmax
        else:
            mins = np.minimum(mins, bmin)
            maxs = np.maximum(maxs, bmax)
    if mins is None:
        return None
    return mins, maxs


def oscillation(sol: SpaceTimeSolution, trap: Trapezoid, n_lo: int, n_hi: int) -> float:
    """Sup-norm range of the solution over all cells meeting the trapezoid."""
    mm = _minmax_over_ranges(sol, trapezoid_cell_ranges(trap, sol, n_lo, n_hi))
    if mm is None:
        return 0.0
    return float((mm[1] - mm[0]).max())


@dataclass(frozen=True)
class SurgeTrapezoid:
    """Trapezoid enclosing one surge, with the strip of half-widths
    (delta_l, delta_r) around the approximate surge line x0 + lam*t excluded
    from the left/right sub-trapezoids."""

    outer: Trapezoid
    left: Trapezoid
    right: Trapezoid
    x0: float
    lam: float
    delta_l: float
    delta_r: float
    jump_width: float  # max width of the detected bottom/top jump regions
    bottom: JumpRegion
    top: JumpRegion

    @property
    def delta(self) -> float:
        return self.delta_l + self.delta_r

    def to_json_dict(self) -> dict:
        return {
            "outer": self.outer.to_json_dict(),
            "left": self.left.to_json_dict(),
            "right": self.right.to_json_dict(),
            "x0": self.x0,
            "lam": self.lam,
            "delta_l": self.delta_l,
            "delta_r": self.delta_r,
            "jump_width": self.jump_width,
        }


def build_surge_trapezoid(
    tau: float,
    bottom: JumpRegion,
    top: JumpRegion,
    delta_l: float,
    delta_r: float,
    lam_minus: float,
    lam_plus: float,
    grid: Grid1D,
    eps13: float,
    t_bot: float,
    t_top: float,
) -> SurgeTrapezoid:
    """Surge trapezoid with footpoint at the bottom jump midpoint; the slope
    of the strip is the secant through the bottom/top jump midpoints."""
    x0 = bottom.midpoint
    a_top = inb(x0 + lam_minus * tau - delta_l - eps13, grid)
    b_top = inb(x0 + lam_plus * tau + delta_r + eps13, grid)
    a_bot = inb(a_top - lam_plus * tau, grid)
    b_bot = inb(b_top - lam_minus * tau, grid)
    lam = (top.midpoint - x0) / tau
    left = Trapezoid(
        t_bot, t_top,
        a_bot, inb(x0 - delta_l, grid),
        a_top, inb(x0 - delta_l + lam * tau, grid),
    )
    right = Trapezoid(
        t_bot, t_top,
        inb(x0 + delta_r, grid), b_bot,
        inb(x0 + delta_r + lam * tau, grid), b_top,
    )
    outer = Trapezoid(t_bot, t_top, a_bot, b_bot, a_top, b_top)
    width = max(bottom.width, top.width)
    return SurgeTrapezoid(outer, left, right, x0, lam, delta_l, delta_r, width,
                          bottom, top)


def _accumulate_difference(sol, mins, maxs, new_ranges, old_ranges):
    """Extend running (min, max) with cells of new_ranges not in old_ranges."""
    old = {level: (a, b) for level, a, b in old_ranges}
    for level, a, b in new_ranges:
        segs = []
        if level not in old:
            segs.append((a, b))
        else:
            oa, ob = old[level]
            if a < oa:
                segs.append((a, min(b, oa - 1)))
            if b > ob:
                segs.append((max(a, ob + 1), b))
        for s_lo, s_hi in segs:
            if s_lo > s_hi:
                continue
            block = sol.states[level][s_lo : s_hi + 1]
            if mins is None:
                mins, maxs = block.min(axis=0), block.max(axis=0)
            else:
                mins = np.minimum(mins, block.min(axis=0))
                maxs = np.maximum(maxs, block.max(axis=0))
    return mins, maxs


def merge_close_regions(regions: list[JumpRegion], min_distance: float) -> list[JumpRegion]:
    """Agglomerate jump regions until consecutive midpoints are at least
    min_distance apart.

    Discontinuities closer than the slab's wave-speed spread cannot be
    treated as isolated surges; enclosing such a cluster in one candidate
    keeps the separation guarantee without discarding the cluster.
    """
    regions = list(regions)
    changed = True
    while changed and len(regions) > 1:
        changed = False
        merged: list[JumpRegion] = [regions[0]]
        for region in regions[1:]:
            prev = merged[-1]
            if region.midpoint - prev.midpoint < min_distance:
                merged[-1] = JumpRegion(prev.j1, region.j2, prev.x_left, region.x_right)
                changed = True
            else:
                merged.append(region)
        regions = merged
    return regions


def detect_surges(
    sol: SpaceTimeSolution,
    n_lo: int,
    n_hi: int,
    sigma0: float,
    lam_minus: float,
    lam_plus: float,
    eps: float,
) -> tuple[list[SurgeTrapezoid], list[float]]:
    """Confirmed surge trapezoids of a slab and their oscillations kappa'.

    A bottom candidate is confirmed as a surge when the cone of extreme wave
    speeds emanating from it contains exactly one jump region at the top
    level; jump regions closer than the minimal surge distance are merged
    into one candidate first.  The strip half-widths start at
    eps^(1/3) - eps^(2/3) per side and shrink by eps^(2/3) per side while
    the sub-trapezoid oscillations stay below tau, stopping once the total
    width reaches eps^(2/3); min/max values are accumulated incrementally
    over the newly added cells only.
    """
    grid = sol.grid
    times = sol.times.t
    t_bot, t_top = float(times[n_lo]), float(times[n_hi])
    tau = t_top - t_bot
    sep = (lam_plus - lam_minus) * tau

    bottom = merge_close_regions(detect_jumps(sol, n_lo, None, sigma0), sep)

    eps13 = eps ** (1.0 / 3.0)
    eps23 = eps ** (2.0 / 3.0)
    surges: list[SurgeTrapezoid] = []
    oscs: list[float] = []
    for region in bottom:
        cone = (region.x_left + lam_minus * tau, region.x_right + lam_plus * tau)
        top_jumps = merge_close_regions(detect_jumps(sol, n_hi, cone, sigma0), sep)
        if len(top_jumps) != 1:
            continue
        top = top_jumps[0]

        floor = 0.5 * eps23  # per side, so the total width stops at eps^(2/3)
        delta_l = delta_r = max(eps13 - eps23, floor)
        trap = build_surge_trapezoid(tau, region, top, delta_l, delta_r,
                                     lam_minus, lam_plus, grid, eps13, t_bot, t_top)
        ranges_l = trapezoid_cell_ranges(trap.left, sol, n_lo, n_hi)
        ranges_r = trapezoid_cell_ranges(trap.right, sol, n_lo, n_hi)
        mm_l = _minmax_over_ranges(sol, ranges_l)
        mm_r = _minmax_over_ranges(sol, ranges_r)
        mins_l, maxs_l = mm_l if mm_l else (None, None)
        mins_r, maxs_r = mm_r if mm_r else (None, None)

        def side_osc(mins, maxs) -> float:
            return float((maxs - mins).max()) if mins is not None else 0.0

        while (
            max(side_osc(mins_l, maxs_l), side_osc(mins_r, maxs_r)) <= tau
            and delta_l + delta_r > eps23 > 0.0
        ):
            new_l = max(delta_l - eps23, floor)
            new_r = max(delta_r - eps23, floor)
            if new_l == delta_l and new_r == delta_r:
                break
            delta_l, delta_r = new_l, new_r
            trap = build_surge_trapezoid(tau, region, top, delta_l, delta_r,
                                         lam_minus, lam_plus, grid, eps13, t_bot, t_top)
            new_ranges_l = trapezoid_cell_ranges(trap.left, sol, n_lo, n_hi)
            new_ranges_r = trapezoid_cell_ranges(trap.right, sol, n_lo, n_hi)
            mins_l, maxs_l = _accumulate_difference(sol, mins_l, maxs_l, new_ranges_l, ranges_l)
            mins_r, maxs_r = _accumulate_difference(sol, mins_r, maxs_r, new_ranges_r, ranges_r)
            ranges_l, ranges_r = new_ranges_l, new_ranges_r

        surges.append(trap)
        oscs.append(max(side_osc(mins_l, maxs_l), side_osc(mins_r, maxs_r)))
    return surges, oscs


@dataclass
class SlabPartition:
    """Trapezoidal cover of one meso-timeslab."""

    n_lo: int
    n_hi: int
    t_lo: float
    t_hi: float
    lam_minus: float
    lam_plus: float
    surges: list[SurgeTrapezoid]
    surge_oscillations: list[float]
    smooth: list[Trapezoid]

    def to_json_dict(self) -> dict:
        return {
            "t_lo": self.t_lo,
            "t_hi": self.t_hi,
            "lam_minus": self.lam_minus,
            "lam_plus": self.lam_plus,
            "surges": [s.to_json_dict() for s in self.surges],
            "surge_oscillations": list(self.surge_oscillations),
            "smooth": [g.to_json_dict() for g in self.smooth],
        }


def _span_union(t1: Trapezoid, t2: Trapezoid) -> Trapezoid:
    return Trapezoid(
        t1.t_bot, t1.t_top,
        min(t1.a_bot, t2.a_bot), max(t1.b_bot, t2.b_bot),
        min(t1.a_top, t2.a_top), max(t1.b_top, t2.b_top),
    )


def partition_meso_slab(
    sol: SpaceTimeSolution, n_lo: int, n_hi: int, eps: float, sigma0: float
) -> SlabPartition:
    """Cover the slab by surge trapezoids plus gap-filling smooth trapezoids.

    Without surges a single smooth trapezoid covers the whole slab.  Smooth
    trapezoids between two close surges whose bottom width is at most
    2*tau*(lam_plus - lam_minus) are merged into a neighbor so no point ends
    up in more than two smooth trapezoids.
    """
    if n_hi <= n_lo:
        raise ValueError("a slab must span at least one time step")
    grid = sol.grid
    times = sol.times.t
    t_bot, t_top = float(times[n_lo]), float(times[n_hi])
    tau = t_top - t_bot
    speeds = sol.model.wave_speeds(sol.states[n_lo : n_hi + 1])
    lam_minus = float(speeds.min())
    lam_plus = float(speeds.max())

    surges, oscs = detect_surges(sol, n_lo, n_hi, sigma0, lam_minus, lam_plus, eps)
    eps23 = eps ** (2.0 / 3.0)

    if not surges:
        whole = Trapezoid(t_bot, t_top, grid.x_min, grid.x_max, grid.x_min, grid.x_max)
        return SlabPartition(n_lo, n_hi, t_bot, t_top, lam_minus, lam_plus, [], [], [whole])

    raw: list[tuple[Trapezoid, bool]] = []
    first_a = surges[0].outer.a_top
    if grid.x_min < first_a:
        raw.append((
            Trapezoid(t_bot, t_top,
                      grid.x_min, inb(first_a - tau * lam_minus - eps23, grid),
                      grid.x_min, first_a),
            False,
        ))
    for k, surge in enumerate(surges):
        if surge.outer.b_top >= grid.x_max:
            break
        a = surge.outer.b_top
        b = grid.x_max if k == len(surges) - 1 else surges[k + 1].outer.a_top
        between = k < len(surges) - 1
        if a >= b:
            continue  # overlapping surge trapezoids, nothing to fill
        raw.append((
            Trapezoid(t_bot, t_top,
                      inb(a - tau * lam_plus - eps23, grid),
                      inb(b - tau * lam_minus - eps23, grid),
                      a, b),
            between,
        ))

    smooth: list[Trapezoid] = []
    pending: Trapezoid | None = None
    min_width = 2.0 * tau * (lam_plus - lam_minus)
    for trap, between in raw:
        if pending is not None:
            trap = _span_union(pending, trap)
            pending = None
        if between and (trap.b_bot - trap.a_bot) <= min_width:
            if smooth:
                smooth[-1] = _span_union(smooth[-1], trap)
            else:
                pending = trap
            continue
        smooth.append(trap)
    if pending is not None:
        smooth.append(pending)

    return SlabPartition(n_lo, n_hi, t_bot, t_top, lam_minus, lam_plus,
                         surges, oscs, smooth)


def cover_counts(sol: SpaceTimeSolution, part: SlabPartition) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell intersection counts with (surge, smooth) trapezoids; rows are
    the slab's cell levels."""
    rows = part.n_hi - part.n_lo
    surge_counts = np.zeros((rows, sol.grid.J), dtype=int)
    smooth_counts = np.zeros((rows, sol.grid.J), dtype=int)
    for counts, traps in (
        (surge_counts, [s.outer for s in part.surges]),
        (smooth_counts, part.smooth),
    ):
        for trap in traps:
            for level, j_lo, j_hi in trapezoid_cell_ranges(trap, sol, part.n_lo, part.n_hi):
                counts[level - part.n_lo, j_lo : j_hi + 1] += 1
    return surge_counts, smooth_counts
