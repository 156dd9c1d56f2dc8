"""Tests for the log-barrier solver."""

import numpy as np
import pytest

from src.algorithms.barrier import BarrierSolver, Constraint, find_strictly_feasible


def affine(coeffs, offset, name="affine"):
    """Constraint coeffs . x + offset <= 0."""
    coeffs = np.asarray(coeffs, dtype=float)
    n = coeffs.size
    return Constraint(
        lambda x: float(coeffs @ x + offset),
        lambda x: coeffs.copy(),
        lambda x: np.zeros((n, n)),
        name,
    )


def quadratic_solver(target, constraints, positive):
    target = np.asarray(target, dtype=float)
    n = target.size
    return BarrierSolver(
        objective=lambda x: float(np.sum((x - target) ** 2)),
        gradient=lambda x: 2.0 * (x - target),
        hessian=lambda x: 2.0 * np.eye(n),
        constraints=constraints,
        positive=positive,
    )


class TestBarrierSolver:
    """Tests for central-path minimization."""

    def test_active_constraint(self):
        """Test that the bound x <= 1 stops the pull toward x = 2."""
        solver = quadratic_solver([2.0], [affine([1.0], -1.0)], np.array([True]))
        result = solver.minimize(np.array([0.5]))
        assert result.x[0] == pytest.approx(1.0, abs=1e-8)
        assert result.duals[0] == pytest.approx(2.0, rel=1e-3)
        assert result.kkt_residual <= 1e-6

    def test_inactive_constraint(self):
        """Test an interior optimum."""
        solver = quadratic_solver([0.5, 0.25], [affine([1.0, 1.0], -2.0)], np.array([True, True]))
        result = solver.minimize(np.array([0.1, 0.1]))
        np.testing.assert_allclose(result.x, [0.5, 0.25], atol=1e-8)

    def test_positivity_binds(self):
        """Test that a negative target is clipped at the positivity bound."""
        solver = quadratic_solver([-1.0], [], np.array([True]))
        result = solver.minimize(np.array([1.0]))
        assert result.x[0] == pytest.approx(0.0, abs=1e-8)
        assert result.x[0] > 0

    def test_rate_objective_reaches_small_gap(self):
        """Test water-filling on three gains, centered out to t of order 1e9."""
        gains = np.array([1.0, 0.5, 0.25])
        budget = 100.0
        solver = BarrierSolver(
            objective=lambda x: float(-np.sum(np.log2(1.0 + gains * x))),
            gradient=lambda x: -gains / ((1.0 + gains * x) * np.log(2.0)),
            hessian=lambda x: np.diag(gains**2 / ((1.0 + gains * x) ** 2 * np.log(2.0))),
            constraints=[affine(np.ones(3), -budget, "budget")],
            positive=np.ones(3, dtype=bool),
        )
        result = solver.minimize(np.full(3, 1.0))
        level = (budget + np.sum(1.0 / gains)) / 3.0
        np.testing.assert_allclose(result.x, level - 1.0 / gains, atol=1e-5)
        assert result.t >= 1e8
        assert result.kkt_residual <= 1e-6

    def test_gap_is_relative_to_objective(self):
        """Test that a large objective stops the schedule at a proportionally smaller t."""
        small = quadratic_solver([2.0], [affine([1.0], -1.0)], np.array([True])).minimize(np.array([0.5]))
        shifted = BarrierSolver(
            objective=lambda x: float((x[0] - 2.0) ** 2 + 1e6),
            gradient=lambda x: 2.0 * (x - 2.0),
            hessian=lambda x: 2.0 * np.eye(1),
            constraints=[affine([1.0], -1.0)],
            positive=np.array([True]),
        ).minimize(np.array([0.5]))
        assert shifted.t < small.t
        assert shifted.x[0] == pytest.approx(1.0, abs=1e-3)

    def test_infeasible_start(self):
        """Test that a start outside the constraints is rejected."""
        solver = quadratic_solver([2.0], [affine([1.0], -1.0)], np.array([True]))
        with pytest.raises(ValueError):
            solver.minimize(np.array([1.5]))


class TestPhaseOne:
    """Tests for the feasibility search."""

    def test_already_feasible(self):
        """Test that a strictly feasible start is returned unchanged."""
        point, s_star = find_strictly_feasible([affine([1.0], -1.0)], np.array([0.5]), np.array([True]))
        np.testing.assert_array_equal(point, [0.5])
        assert s_star == pytest.approx(-0.5)

    def test_moves_into_feasible_set(self):
        """Test that the search finds x >= 1 from x = 0.5."""
        constraints = [affine([-1.0], 1.0), affine([1.0], -3.0)]
        point, s_star = find_strictly_feasible(constraints, np.array([0.5]), np.array([True]))
        assert point is not None
        assert 1.0 < point[0] < 3.0
        assert s_star < 0

    def test_infeasible(self):
        """Test that x <= -1 with x > 0 is reported infeasible."""
        point, s_star = find_strictly_feasible([affine([1.0], 1.0)], np.array([0.5]), np.array([True]))
        assert point is None
        assert s_star > 0.9
