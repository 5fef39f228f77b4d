"""2D heat solver tests: exact formula, Crank-Nicolson error, refinement ladder."""

import numpy as np
import pytest

from eabf.errors import ContractError, SolverError
from eabf.forward import (
    Heat2dSolver,
    RefinementPolicy,
    heat2d_exact,
    heat2d_numeric,
    solve_to_budget,
)

ALPHA = 0.01  # diffusivity used across the 2D experiment
T1 = 0.3
OBS = np.array([(x, y) for x in np.linspace(0.1, 0.9, 5) for y in np.linspace(0.1, 0.9, 5)])


class TestExactSolution:
    def test_initial_condition(self):
        x, y = 0.3, 0.7
        val = heat2d_exact(3.0, 5.0, ALPHA, x, y, 0.0)
        expected = 3.0 * np.sin(np.pi * x) * np.sin(np.pi * y) + 5.0 * np.sin(
            2 * np.pi * x
        ) * np.sin(np.pi * y)
        assert val == pytest.approx(expected, abs=1e-14)

    def test_boundary_is_zero(self):
        for x, y in [(0.0, 0.4), (1.0, 0.2), (0.6, 0.0), (0.3, 1.0)]:
            assert heat2d_exact(3.0, 5.0, ALPHA, x, y, 0.5) == pytest.approx(0.0, abs=1e-14)

    def test_mode_decay_rates(self):
        # each mode decays with its own exponential rate
        x, y, t = 0.3, 0.6, 0.25
        only_b = heat2d_exact(2.0, 0.0, ALPHA, x, y, t)
        assert only_b == pytest.approx(
            2.0 * np.exp(-2 * ALPHA * np.pi**2 * t) * np.sin(np.pi * x) * np.sin(np.pi * y),
            rel=1e-14,
        )


class TestNumericSolver:
    def test_zero_initial_condition(self):
        u_obs, k0 = heat2d_numeric(0.0, 0.0, ALPHA, (0.1, 0.1, 0.268), T1, OBS)
        assert np.all(u_obs == 0.0)
        assert k0 == 0.0

    def test_paper_level_meets_bound(self):
        _, k0 = heat2d_numeric(3.0, 5.0, ALPHA, (0.025, 0.025, 0.067), T1, OBS)
        assert k0 <= 0.0015

    def test_coarse_level_exceeds_bound(self):
        _, k0 = heat2d_numeric(3.0, 5.0, ALPHA, (0.05, 0.05, 0.134), T1, OBS)
        assert k0 > 0.0015

    def test_second_order_error_reduction(self):
        _, k_coarse = heat2d_numeric(3.0, 5.0, ALPHA, (0.05, 0.05, 0.134), T1, OBS)
        _, k_fine = heat2d_numeric(3.0, 5.0, ALPHA, (0.025, 0.025, 0.067), T1, OBS)
        assert 3.0 <= k_coarse / k_fine <= 6.0

    def test_error_is_exact_max_gap_at_observations(self):
        u_obs, k0 = heat2d_numeric(3.0, 5.0, ALPHA, (0.05, 0.05, 0.134), T1, OBS)
        exact = heat2d_exact(3.0, 5.0, ALPHA, OBS[:, 0], OBS[:, 1], T1)
        assert k0 == pytest.approx(np.abs(u_obs - exact).max(), rel=1e-12)

    def test_rectangular_cells_rejected(self):
        with pytest.raises(ContractError):
            heat2d_numeric(1.0, 1.0, ALPHA, (0.1, 0.05, 0.1), T1, OBS)

    def test_backward_heat_blows_up(self):
        # negative diffusivity amplifies modes; the guard must trip
        with pytest.raises(SolverError):
            heat2d_numeric(3.0, 5.0, -1.0, (0.1, 0.1, 0.268 / 64), T1, OBS)

    def test_off_grid_observation_points_interpolate(self):
        # points between nodes pick up the bilinear interpolation error,
        # which stays within the coarse-grid error scale
        off = np.array([(0.137, 0.411), (0.733, 0.289)])
        u_obs, k0 = heat2d_numeric(3.0, 5.0, ALPHA, (0.05, 0.05, 0.134), T1, off)
        exact = heat2d_exact(3.0, 5.0, ALPHA, off[:, 0], off[:, 1], T1)
        assert np.all(np.abs(u_obs - exact) < 0.05)
        assert k0 == pytest.approx(np.abs(u_obs - exact).max(), rel=1e-12)


class TestHeat2dSolver:
    def test_matches_direct_numeric_path(self):
        solver = Heat2dSolver(ALPHA, T1, OBS)
        fs = solver.forward((3.0, 5.0), (0.05, 0.134))
        u_obs, k0 = heat2d_numeric(3.0, 5.0, ALPHA, (0.05, 0.05, 0.134), T1, OBS)
        np.testing.assert_allclose(fs.eta, u_obs, rtol=1e-12)
        assert fs.error_estimate == pytest.approx(k0, rel=1e-12)

    def test_linearity_in_parameters(self):
        solver = Heat2dSolver(ALPHA, T1, OBS)
        f1 = solver.forward((1.0, 0.0), (0.1, 0.268))
        f2 = solver.forward((0.0, 1.0), (0.1, 0.268))
        f12 = solver.forward((2.0, 3.0), (0.1, 0.268))
        np.testing.assert_allclose(f12.eta, 2 * f1.eta + 3 * f2.eta, rtol=1e-12)

    def test_halving_terminates_at_paper_level(self):
        solver = Heat2dSolver(ALPHA, T1, OBS)
        policy = RefinementPolicy.halving((0.1, 0.268), 4)
        solve = solve_to_budget(
            lambda theta, level: solver.forward(theta, level),
            (3.0, 5.0), K=0.0015, policy=policy,
        )
        assert solve.discretization["dx"] == pytest.approx(0.025)
        assert solve.discretization["dt"] == pytest.approx(0.067)
        assert solve.error_estimate <= 0.0015
