"""Experiment harness: run the benchmark cases, measure L-inf/L1 errors, and
emit EoC tables (CSV), reports (JSON) and decomposition overlays (SVG)."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from .estimator import EstimateReport, error_estimator
from .grid import Grid1D, build_grid
from .models import make_model, normalize_flux_kind
from .riemann import WaveFan, cell_average_exact, solve_riemann
from .solver import SpaceTimeSolution, march, run, save_solution

SCHEMA_VERSION = 1

# Per-cell residual CSV cap: beyond this many cells the file is skipped.
MAX_RESIDUAL_CSV_CELLS = 500_000


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CaseConfig:
    case: str
    level: int
    cfl: float = 0.9
    sigma0: float = 0.1
    slab_mode: str = "eps13"
    flux: str = "llf"
    x_min: float = -5.0
    x_max: float = 5.0
    t0: float | None = None
    t_final: float | None = None
    ref: str = "default"  # exact | fine:<level> | none | default
    out_dir: str | None = None
    model: str | None = None  # custom case only
    left: tuple | None = None
    right: tuple | None = None
    origin: float = 0.0
    dump_solution: bool = False


_CASE_WINDOWS = {
    "psys-2raref": (0.5, 1.0),
    "psys-raref-shock": (0.0, 1.5),
    "burgers-curved": (0.0, 1.0),
    "custom": (0.0, 1.0),
}

_CASE_DEFAULT_REF = {
    "psys-2raref": "exact",
    "psys-raref-shock": "exact",
    "burgers-curved": "fine:14",
    "custom": "exact",
}


def _resolve(config: CaseConfig) -> CaseConfig:
    if config.case not in _CASE_WINDOWS:
        raise ConfigError(f"unknown case '{config.case}'")
    t0, t_final = _CASE_WINDOWS[config.case]
    updates = {}
    if config.t0 is None:
        updates["t0"] = t0
    if config.t_final is None:
        updates["t_final"] = t_final
    if config.ref == "default":
        updates["ref"] = _CASE_DEFAULT_REF[config.case]
    return replace(config, **updates) if updates else config


def _burgers_curved_averages(grid: Grid1D) -> np.ndarray:
    """Exact cell averages of the cut-off ramp data: 10 left of -4, the line
    -3x - 2 on (-4, 0], -7 right of 0."""
    lo = grid.interfaces()[:-1]
    hi = grid.interfaces()[1:]

    def clip_len(a, b):
        return np.maximum(np.minimum(hi, b) - np.maximum(lo, a), 0.0)

    total = 10.0 * clip_len(-np.inf, -4.0) - 7.0 * clip_len(0.0, np.inf)
    a = np.maximum(lo, -4.0)
    b = np.minimum(hi, 0.0)
    width = np.maximum(b - a, 0.0)
    midpoint = np.where(width > 0.0, 0.5 * (a + b), 0.0)
    total += (-3.0 * midpoint - 2.0) * width
    return (total / grid.dx)[:, None]


def _case_setup(config: CaseConfig, grid: Grid1D):
    """Model, initial cell averages at t0, and the exact fan when one exists."""
    if config.case == "psys-2raref":
        model = make_model("psystem", C=1.0, gamma=1.4)
        fan = solve_riemann(model, [1.0, -2.0], [1.0, 2.0])
        return model, cell_average_exact(fan, 0.0, config.t0, grid), fan
    if config.case == "psys-raref-shock":
        model = make_model("psystem", C=1.0, gamma=1.4)
        fan = solve_riemann(model, [0.15, 0.0], [0.1, 0.0])
        return model, cell_average_exact(fan, 0.0, config.t0, grid), fan
    if config.case == "burgers-curved":
        return make_model("burgers"), _burgers_curved_averages(grid), None
    if config.left is None or config.right is None or config.model is None:
        raise ConfigError("custom cases need model, left and right states")
    model = make_model(config.model)
    fan = solve_riemann(model, config.left, config.right)
    return model, cell_average_exact(fan, config.origin, config.t0, grid), fan


class ExactFanReference:
    """Reference via exact cell averages of a Riemann fan."""

    def __init__(self, fan: WaveFan, origin: float = 0.0):
        self.fan = fan
        self.origin = origin

    def cell_averages(self, t: float, grid: Grid1D) -> np.ndarray:
        return cell_average_exact(self.fan, self.origin, t, grid)


def restrict_to_coarse(states: np.ndarray, fine_grid: Grid1D, coarse_grid: Grid1D) -> np.ndarray:
    """Conservative restriction: mean over the fine cells nested in each
    coarse cell."""
    if (
        fine_grid.x_min != coarse_grid.x_min
        or fine_grid.x_max != coarse_grid.x_max
        or fine_grid.J % coarse_grid.J != 0
    ):
        raise ConfigError("fine reference grid does not nest the coarse grid")
    ratio = fine_grid.J // coarse_grid.J
    return states.reshape(coarse_grid.J, ratio, -1).mean(axis=1)


class SolutionReference:
    """Reference from a stored finer-grid solution, restricted to the coarse
    grid with linear interpolation in time between its levels."""

    def __init__(self, fine: SpaceTimeSolution):
        self.fine = fine

    def cell_averages(self, t: float, grid: Grid1D) -> np.ndarray:
        times = self.fine.times.t
        slop = 1e-10 * max(1.0, abs(float(times[-1])))
        if t < times[0] - slop or t > times[-1] + slop:
            raise ConfigError(f"time {t} outside the reference window")
        idx = int(np.searchsorted(times, t))
        idx = min(max(idx, 0), len(times) - 1)
        if abs(times[idx] - t) <= slop:
            states = self.fine.states[idx]
        else:
            lo = idx - 1
            w = (t - times[lo]) / (times[idx] - times[lo])
            states = (1.0 - w) * self.fine.states[lo] + w * self.fine.states[idx]
        return restrict_to_coarse(states, self.fine.grid, grid)


class TabulatedReference:
    """Coarse-grid averages precomputed at fixed times (streaming fine run)."""

    def __init__(self, times: np.ndarray, averages: list[np.ndarray]):
        self.times = np.asarray(times, dtype=float)
        self.averages = averages

    def cell_averages(self, t: float, grid: Grid1D) -> np.ndarray:
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > 1e-9 * max(1.0, abs(t)):
            raise ConfigError(f"no tabulated reference at t={t}")
        return self.averages[idx]


def streamed_fine_reference(
    initial_fine: np.ndarray,
    model,
    flux_kind: str,
    fine_grid: Grid1D,
    cfl: float,
    t0: float,
    t_final: float,
    eval_times: np.ndarray,
    coarse_grid: Grid1D,
) -> TabulatedReference:
    """March a fine run without storing it, capturing restricted averages at
    the requested times (linear interpolation between fine levels)."""
    eval_times = np.asarray(eval_times, dtype=float)
    averages: list[np.ndarray | None] = [None] * len(eval_times)
    pending = 0
    prev_t = None
    prev_states = None
    slop = 1e-12 * max(1.0, abs(t_final))
    for t, states in march(initial_fine, model, flux_kind, fine_grid, cfl, t0, t_final):
        while pending < len(eval_times) and eval_times[pending] <= t + slop:
            target = eval_times[pending]
            if prev_t is None or abs(t - target) <= slop:
                snap = states
            else:
                w = (target - prev_t) / (t - prev_t)
                snap = (1.0 - w) * prev_states + w * states
            averages[pending] = restrict_to_coarse(snap, fine_grid, coarse_grid)
            pending += 1
        prev_t, prev_states = t, states
    if pending < len(eval_times):
        raise ConfigError("fine reference run ended before the last eval time")
    return TabulatedReference(eval_times, averages)


def linf_l1_error(sol: SpaceTimeSolution, reference) -> float:
    """max over time levels of the componentwise L1 distance to the
    reference averages, reduced by the sup norm over components."""
    dx = sol.grid.dx
    worst = 0.0
    for n, t in enumerate(sol.times.t):
        ref = reference.cell_averages(float(t), sol.grid)
        err = float((np.abs(sol.states[n] - ref).sum(axis=0) * dx).max())
        worst = max(worst, err)
    return worst


def eoc(values) -> list[float | None]:
    """Empirical orders of convergence -log2(v_{k+1}/v_k); None where a value
    is non-positive."""
    out: list[float | None] = []
    for a, b in zip(values, values[1:]):
        if a is None or b is None or a <= 0 or b <= 0:
            out.append(None)
        else:
            out.append(-math.log2(b / a))
    return out


def _reference_for(config: CaseConfig, sol: SpaceTimeSolution, fan: WaveFan | None):
    if config.ref == "none":
        return None
    if config.ref == "exact":
        if fan is None:
            raise ConfigError("no exact solution available for this case")
        return ExactFanReference(fan, config.origin)
    if config.ref.startswith("fine:"):
        ref_level = int(config.ref.split(":", 1)[1])
        fine_grid = build_grid(config.x_min, config.x_max, ref_level)
        if fine_grid.J <= sol.grid.J:
            raise ConfigError("fine reference level must exceed the run level")
        model, initial, _ = _case_setup(config, fine_grid)
        return streamed_fine_reference(
            initial, model, config.flux, fine_grid, config.cfl,
            config.t0, config.t_final, sol.times.t, sol.grid,
        )
    raise ConfigError(f"unknown reference mode '{config.ref}'")


def run_case(config: CaseConfig):
    """Build, march, estimate and (optionally) write the report files.

    Returns (solution, estimate report, error or None, written paths).
    """
    config = _resolve(config)
    grid = build_grid(config.x_min, config.x_max, config.level)
    model, initial, fan = _case_setup(config, grid)
    flux_kind = normalize_flux_kind(config.flux)
    sol = run(initial, model, flux_kind, grid, config.cfl, config.t0, config.t_final)
    estimate = error_estimator(sol, config.sigma0, config.slab_mode)
    reference = _reference_for(config, sol, fan)
    err = linf_l1_error(sol, reference) if reference is not None else None

    paths: dict[str, str] = {}
    if config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
        tag = f"{config.case}_L{config.level}"
        report_path = os.path.join(config.out_dir, f"{tag}_report.json")
        with open(report_path, "w") as fh:
            json.dump(_report_dict(config, estimate, err), fh, indent=2)
            fh.write("\n")
        paths["report"] = report_path

        res = estimate.residual
        if res.cells_kept and res.bounds.shape[0] * res.bounds.shape[1] <= MAX_RESIDUAL_CSV_CELLS:
            csv_path = os.path.join(config.out_dir, f"{tag}_residuals.csv")
            res.write_cells_csv(csv_path)
            paths["residuals"] = csv_path

        slab_path = os.path.join(config.out_dir, f"{tag}_slabs.csv")
        write_slab_csv(estimate, slab_path)
        paths["slabs"] = slab_path

        svg_path = os.path.join(config.out_dir, f"{tag}_decomposition.svg")
        with open(svg_path, "w") as fh:
            fh.write(render_decomposition_svg(sol, estimate))
        paths["svg"] = svg_path

        if config.dump_solution:
            dump_path = os.path.join(config.out_dir, f"{tag}_solution.csv")
            save_solution(sol, dump_path)
            paths["solution"] = dump_path
    return sol, estimate, err, paths


def write_slab_csv(estimate: EstimateReport, path: str) -> None:
    """One row of oscillation/width diagnostics per meso-timeslab."""
    with open(path, "w", newline="") as fh:
        fh.write("slab,t_lo,t_hi,n_surges,kappa,kappa_prime_max,delta_max,c0\r\n")
        for slab in estimate.slabs:
            row = [
                str(slab.index),
                _format_value(slab.t_lo),
                _format_value(slab.t_hi),
                str(slab.n_surges),
                _format_value(slab.kappa),
                _format_value(slab.kappa_prime_max),
                _format_value(slab.delta_max),
                _format_value(slab.c0),
            ]
            fh.write(",".join(row) + "\r\n")


def _report_dict(config: CaseConfig, estimate: EstimateReport, err: float | None) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "case": config.case,
        "level": config.level,
        "cfl": config.cfl,
        "sigma0": config.sigma0,
        "flux": normalize_flux_kind(config.flux),
        "slab_mode": config.slab_mode,
        "t0": config.t0,
        "t_final": config.t_final,
        "reference": config.ref,
        "linf_l1_error": err,
        "estimate": estimate.to_json_dict(),
    }


@dataclass
class EoCTable:
    """Rows of (L, eps, EoC, eps^(1/3), E_S, EoC, E_G, EoC, error, EoC)."""

    levels: list[int]
    eps: list[float]
    e_surge: list[float]
    e_smooth: list[float]
    error: list[float | None]

    COLUMNS = ("L", "eps", "eoc_eps", "eps13", "E_S", "eoc_E_S",
               "E_G", "eoc_E_G", "err", "eoc_err")

    def rows(self) -> list[list]:
        eps_eoc = [None] + eoc(self.eps)
        es_eoc = [None] + eoc(self.e_surge)
        eg_eoc = [None] + eoc(self.e_smooth)
        err_eoc = [None] + eoc(self.error)
        out = []
        for k, level in enumerate(self.levels):
            out.append([
                level,
                self.eps[k], eps_eoc[k],
                self.eps[k] ** (1.0 / 3.0) if self.eps[k] > 0 else 0.0,
                self.e_surge[k], es_eoc[k],
                self.e_smooth[k], eg_eoc[k],
                self.error[k], err_eoc[k],
            ])
        return out

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(self.COLUMNS) + "\r\n")
            for row in self.rows():
                cells = [_format_value(v) for v in row]
                fh.write(",".join(cells) + "\r\n")

    def format(self) -> str:
        lines = ["  ".join(f"{c:>9}" for c in self.COLUMNS)]
        for row in self.rows():
            lines.append("  ".join(f"{_format_value(v):>9}" for v in row))
        return "\n".join(lines)


def _format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return f"{v:.5g}"


def converge(config: CaseConfig, l_min: int, l_max: int) -> EoCTable:
    """Run the case at levels l_min..l_max and assemble the EoC table."""
    if l_max < l_min + 1:
        raise ConfigError("need at least two levels for a convergence table")
    levels = list(range(l_min, l_max + 1))
    eps_vals, es_vals, eg_vals, errs = [], [], [], []
    for level in levels:
        _, estimate, err, _ = run_case(replace(config, level=level))
        eps_vals.append(estimate.epsilon_t)
        es_vals.append(estimate.e_surge)
        eg_vals.append(estimate.e_smooth)
        errs.append(err)
    table = EoCTable(levels, eps_vals, es_vals, eg_vals, errs)
    if config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
        path = os.path.join(config.out_dir, f"{config.case}_eoc.csv")
        table.to_csv(path)
    return table


# ---------------------------------------------------------------------------
# SVG rendering of the space-time raster and the trapezoid decomposition


def _downsample(states: np.ndarray, max_rows: int, max_cols: int) -> np.ndarray:
    n, j = states.shape
    row_stride = max(1, n // max_rows)
    col_stride = max(1, j // max_cols)
    trim = states[: (n // row_stride) * row_stride, : (j // col_stride) * col_stride]
    blocks = trim.reshape(trim.shape[0] // row_stride, row_stride,
                          trim.shape[1] // col_stride, col_stride)
    return blocks.mean(axis=(1, 3))


def render_decomposition_svg(sol: SpaceTimeSolution, estimate: EstimateReport,
                             width: int = 900, height: int = 620) -> str:
    """Cell raster of the first component with the trapezoid overlay."""
    pad = 40.0
    grid = sol.grid
    t0, t1 = sol.t0, sol.t_final
    span_t = max(t1 - t0, 1e-300)

    def sx(x: float) -> float:
        return pad + (x - grid.x_min) / (grid.x_max - grid.x_min) * (width - 2 * pad)

    def sy(t: float) -> float:
        return height - pad - (t - t0) / span_t * (height - 2 * pad)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]

    raster = _downsample(sol.states[:, :, 0], 160, 240)
    vmin, vmax = float(raster.min()), float(raster.max())
    vspan = vmax - vmin if vmax > vmin else 1.0
    n_rows, n_cols = raster.shape
    cell_w = (width - 2 * pad) / n_cols
    cell_h = (height - 2 * pad) / n_rows
    for r in range(n_rows):
        y = height - pad - (r + 1) * cell_h
        row = []
        for c in range(n_cols):
            shade = int(round(235 - 195 * (raster[r, c] - vmin) / vspan))
            row.append(
                f'<rect x="{pad + c * cell_w:.2f}" y="{y:.2f}" '
                f'width="{cell_w + 0.5:.2f}" height="{cell_h + 0.5:.2f}" '
                f'fill="rgb({shade},{shade},{shade})"/>'
            )
        parts.append("".join(row))

    def polygon(trap, color: str, fill: str = "none", opacity: str = "1.0", dash: str = ""):
        pts = (
            f"{sx(trap.a_bot):.2f},{sy(trap.t_bot):.2f} "
            f"{sx(trap.b_bot):.2f},{sy(trap.t_bot):.2f} "
            f"{sx(trap.b_top):.2f},{sy(trap.t_top):.2f} "
            f"{sx(trap.a_top):.2f},{sy(trap.t_top):.2f}"
        )
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(
            f'<polygon points="{pts}" fill="{fill}" fill-opacity="{opacity}" '
            f'stroke="{color}" stroke-width="1.2"{extra}/>'
        )

    for t in estimate.slab_times:
        y = sy(float(t))
        parts.append(
            f'<line x1="{pad:.2f}" y1="{y:.2f}" x2="{width - pad:.2f}" y2="{y:.2f}" '
            f'stroke="#555555" stroke-width="0.8" stroke-dasharray="6,4"/>'
        )

    for part in estimate.partitions or []:
        for trap in part.smooth:
            polygon(trap, "#1f77b4", dash="3,3")
        for surge in part.surges:
            polygon(surge.outer, "#ff7f0e")
            strip = type(surge.outer)(
                surge.outer.t_bot, surge.outer.t_top,
                surge.left.b_bot, surge.right.a_bot,
                surge.left.b_top, surge.right.a_top,
            )
            polygon(strip, "#d62728", fill="#d62728", opacity="0.25")

    parts.append(
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        f'fill="none" stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{pad}" y="{height - 8}" font-size="12" font-family="sans-serif">'
        f"x in [{grid.x_min:g}, {grid.x_max:g}], t in [{t0:g}, {t1:g}]; "
        f"surges outlined orange, strips red, smooth trapezoids blue</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# Command line


def _parse_state(text: str) -> tuple:
    return tuple(float(tok) for tok in text.split(","))


def _load_config_file(path: str) -> dict:
    values: dict[str, str] = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"bad config line: {raw.rstrip()}")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file; flags override it")
    parser.add_argument("--case", default=None,
                        choices=["psys-2raref", "psys-raref-shock", "burgers-curved", "custom"])
    parser.add_argument("--cfl", type=float, default=None)
    parser.add_argument("--sigma", type=float, default=None)
    parser.add_argument("--slab-size", dest="slab_size", choices=["eps13", "eps"], default=None)
    parser.add_argument("--flux", choices=["llf", "godunov", "eo"], default=None)
    parser.add_argument("--ref", default=None, help="exact | fine:<level> | none")
    parser.add_argument("--t0", type=float, default=None)
    parser.add_argument("--T", dest="t_final", type=float, default=None)
    parser.add_argument("--model", default=None, choices=["burgers", "psystem"])
    parser.add_argument("--left", default=None, help="comma-separated left state (custom case)")
    parser.add_argument("--right", default=None, help="comma-separated right state (custom case)")
    parser.add_argument("--out", default=None, help="output directory")


def _config_from_args(args, config_file: dict, level: int) -> CaseConfig:
    def pick(flag_value, key: str, default, cast):
        if flag_value is not None:
            return flag_value
        if key in config_file:
            return cast(config_file[key])
        return default

    case = pick(args.case, "case", None, str)
    if case is None:
        raise ConfigError("no case selected (use --case or a config file)")
    return CaseConfig(
        case=case,
        level=level,
        cfl=pick(args.cfl, "cfl", 0.9, float),
        sigma0=pick(args.sigma, "sigma", 0.1, float),
        slab_mode=pick(args.slab_size, "slab-size", "eps13", str),
        flux=pick(args.flux, "flux", "llf", str),
        ref=pick(args.ref, "ref", "default", str),
        t0=pick(args.t0, "t0", None, float),
        t_final=pick(args.t_final, "T", None, float),
        model=pick(args.model, "model", None, str),
        left=pick(_parse_state(args.left) if args.left else None, "left", None, _parse_state),
        right=pick(_parse_state(args.right) if args.right else None, "right", None, _parse_state),
        out_dir=pick(args.out, "out", None, str),
        dump_solution=bool(getattr(args, "dump_solution", False)
                           or config_file.get("dump-solution") == "true"),
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fvbound",
        description="Finite-volume runs with a-posteriori L-inf/L1 error bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one case at one refinement level")
    _add_common(p_run)
    p_run.add_argument("--level", type=int, required=True)
    p_run.add_argument("--dump-solution", action="store_true",
                       help="also write the space-time solution dump")

    p_conv = sub.add_parser("converge", help="refinement study over a level range")
    _add_common(p_conv)
    p_conv.add_argument("--levels", required=True, help="range A..B, e.g. 7..10")

    p_audit = sub.add_parser("audit", help="estimate a previously dumped solution")
    p_audit.add_argument("--solution", required=True, help="solution dump file")
    p_audit.add_argument("--sigma", type=float, default=0.1)
    p_audit.add_argument("--slab-size", dest="slab_size", choices=["eps13", "eps"],
                         default="eps13")
    p_audit.add_argument("--out", default=None)

    args = parser.parse_args(argv)
    config_file = _load_config_file(args.config) if getattr(args, "config", None) else {}

    try:
        if args.command == "audit":
            from .solver import load_solution

            sol = load_solution(args.solution)
            estimate = error_estimator(sol, args.sigma, args.slab_size)
            print(f"audited {args.solution}: eps={estimate.epsilon_t:.5g} "
                  f"E_S={estimate.e_surge:.5g} E_G={estimate.e_smooth:.5g}")
            if args.out:
                os.makedirs(args.out, exist_ok=True)
                base = os.path.splitext(os.path.basename(args.solution))[0]
                report_path = os.path.join(args.out, f"{base}_audit.json")
                with open(report_path, "w") as fh:
                    json.dump({"schema": SCHEMA_VERSION, "solution": args.solution,
                               "estimate": estimate.to_json_dict()}, fh, indent=2)
                    fh.write("\n")
                write_slab_csv(estimate, os.path.join(args.out, f"{base}_audit_slabs.csv"))
                with open(os.path.join(args.out, f"{base}_audit.svg"), "w") as fh:
                    fh.write(render_decomposition_svg(sol, estimate))
                print(f"  wrote report under {args.out}")
        elif args.command == "run":
            config = _config_from_args(args, config_file, args.level)
            _, estimate, err, paths = run_case(config)
            print(f"case={config.case} L={config.level} eps={estimate.epsilon_t:.5g} "
                  f"E_S={estimate.e_surge:.5g} E_G={estimate.e_smooth:.5g}"
                  + (f" err={err:.5g}" if err is not None else ""))
            for kind, path in paths.items():
                print(f"  wrote {kind}: {path}")
        else:
            lo, hi = args.levels.split("..")
            config = _config_from_args(args, config_file, int(lo))
            table = converge(config, int(lo), int(hi))
            print(table.format())
    except Exception as exc:  # surfaced as exit status for scripting
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
