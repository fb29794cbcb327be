import numpy as np
import pytest
from scipy.integrate import quad

import fvbound.riemann as riemann
from fvbound import (
    Grid1D,
    VacuumError,
    build_grid,
    cell_average_exact,
    make_model,
    sample,
    solve_riemann,
)


@pytest.fixture
def burgers():
    return make_model("burgers")


@pytest.fixture
def psystem():
    return make_model("psystem", C=1.0, gamma=1.4)


def test_equal_states_give_trivial_fan(psystem):
    fan = solve_riemann(psystem, [1.0, 2.0], [1.0, 2.0])
    assert all(w.kind == "none" for w in fan.waves)
    xi = np.linspace(-10.0, 10.0, 21)
    assert np.allclose(sample(fan, xi), [1.0, 2.0])


def test_burgers_stationary_shock(burgers):
    fan = solve_riemann(burgers, [1.0], [-1.0])
    (wave,) = fan.waves
    assert wave.kind == "shock"
    assert wave.speed == pytest.approx(0.0)
    assert sample(fan, -0.1) == pytest.approx([1.0])
    assert sample(fan, 0.1) == pytest.approx([-1.0])


def test_burgers_rarefaction_profile(burgers):
    fan = solve_riemann(burgers, [-1.0], [1.0])
    (wave,) = fan.waves
    assert wave.kind == "rarefaction"
    assert (wave.head, wave.tail) == (-1.0, 1.0)
    assert sample(fan, 0.5) == pytest.approx([0.5])


def test_psystem_two_rarefactions_star_state(psystem):
    fan = solve_riemann(psystem, [1.0, -2.0], [1.0, 2.0])
    assert [w.kind for w in fan.waves] == ["rarefaction", "rarefaction"]
    v_star = fan.star[1] / fan.star[0]
    assert abs(v_star) <= 1e-10
    # Riemann invariants constant across each fan
    g = psystem.gamma
    for family, (uK, sign) in enumerate([(fan.left, 1.0), (fan.right, -1.0)]):
        c_out = float(psystem.sound_speed(uK[0]))
        c_star = float(psystem.sound_speed(fan.star[0]))
        w_out = uK[1] / uK[0] + sign * 2.0 * c_out / (g - 1.0)
        w_star = v_star + sign * 2.0 * c_star / (g - 1.0)
        assert abs(w_out - w_star) <= 1e-10


def test_psystem_mirror_symmetry(psystem):
    fan = solve_riemann(psystem, [1.0, -2.0], [1.0, 2.0])
    xi = np.linspace(-4.0, 4.0, 401)
    left = sample(fan, xi)
    right = sample(fan, -xi)
    assert np.all(np.abs(left[:, 0] - right[:, 0]) <= 1e-10)
    v_l = left[:, 1] / left[:, 0]
    v_r = right[:, 1] / right[:, 0]
    assert np.all(np.abs(v_l + v_r) <= 1e-10)


def test_psystem_shock_satisfies_rankine_hugoniot(psystem):
    fan = solve_riemann(psystem, [0.15, 0.0], [0.1, 0.0])
    kinds = [w.kind for w in fan.waves]
    assert kinds == ["rarefaction", "shock"]
    shock = fan.waves[1]
    f_star = psystem.flux(fan.star)
    f_right = psystem.flux(fan.right)
    resid = np.abs(f_right - f_star - shock.speed * (fan.right - fan.star)).max()
    assert resid <= 1e-10 * (1.0 + np.abs(f_star).max())


def test_sampling_far_field_is_exact(psystem):
    fan = solve_riemann(psystem, [0.15, 0.0], [0.1, 0.0])
    speeds = fan.wave_speeds()
    assert np.array_equal(sample(fan, min(speeds) - 1.0), fan.left)
    assert np.array_equal(sample(fan, max(speeds) + 1.0), fan.right)


def test_vacuum_is_reported(psystem):
    with pytest.raises(VacuumError):
        solve_riemann(psystem, [1.0, -6.0], [1.0, 6.0])


def test_nonconvergence_is_reported(psystem, monkeypatch):
    monkeypatch.setattr(riemann, "MAX_ITER", 2)
    with pytest.raises(riemann.ConvergenceError):
        solve_riemann(psystem, [0.15, 0.0], [0.1, 0.0])


def test_cell_average_step_data(psystem):
    fan = solve_riemann(psystem, [1.0, -2.0], [1.0, 2.0])
    grid = Grid1D(0.0, 1.0, 4)
    avg = cell_average_exact(fan, 0.6, 0.0, grid)
    # cells fully left/right of the origin get the pure states; the cell
    # straddling x = 0.6 gets the width-weighted mix
    assert np.allclose(avg[0], fan.left)
    assert np.allclose(avg[1], fan.left)
    assert np.allclose(avg[2], (0.1 * fan.left + 0.15 * fan.right) / 0.25)
    assert np.allclose(avg[3], fan.right)


def test_cell_average_constant_fan(psystem):
    fan = solve_riemann(psystem, [1.0, 0.5], [1.0, 0.5])
    grid = build_grid(-5.0, 5.0, 3)
    for t in (0.0, 0.7):
        assert np.allclose(cell_average_exact(fan, 0.0, t, grid), [1.0, 0.5])


def test_cell_average_burgers_shock(burgers):
    fan = solve_riemann(burgers, [1.0], [-1.0])
    grid = build_grid(-5.0, 5.0, 4)  # 32 cells, shock stays at x = 0
    avg = cell_average_exact(fan, 0.0, 1.0, grid)
    assert np.all(avg[: grid.J // 2] == 1.0)
    assert np.all(avg[grid.J // 2:] == -1.0)


def test_cell_average_matches_adaptive_quadrature(psystem):
    fan = solve_riemann(psystem, [1.0, -2.0], [1.0, 2.0])
    grid = build_grid(-5.0, 5.0, 5)
    t = 0.5
    avg = cell_average_exact(fan, 0.0, t, grid)
    breakpoints = [t * s for s in fan.wave_speeds()]
    for j in (7, 12, 16, 20, 28):
        lo, hi = grid.cell_bounds(j)
        pts = [p for p in breakpoints if lo < p < hi]
        for comp in range(2):
            val, _ = quad(lambda x: float(sample(fan, x / t)[comp]), lo, hi,
                          points=pts, limit=200, epsabs=1e-13, epsrel=1e-13)
            assert avg[j, comp] == pytest.approx(val / grid.dx, rel=1e-10, abs=1e-12)


def test_fan_conservation(psystem):
    # integral over a window containing all waves changes by the flux difference
    fan = solve_riemann(psystem, [0.15, 0.0], [0.1, 0.0])
    grid = build_grid(-5.0, 5.0, 9)
    f_diff = psystem.flux(fan.left) - psystem.flux(fan.right)
    base = cell_average_exact(fan, 0.0, 0.0, grid).sum(axis=0) * grid.dx
    for t in (0.5, 1.5):
        total = cell_average_exact(fan, 0.0, t, grid).sum(axis=0) * grid.dx
        assert np.allclose(total, base + t * f_diff, rtol=1e-10, atol=1e-10)
