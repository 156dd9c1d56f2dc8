"""
Log-barrier interior-point method for small smooth convex programs.

Solves

    minimize f0(x)  subject to  f_j(x) <= 0,  x_i > 0 for i in ``positive``

by following the central path: for increasing t, minimize
t f0(x) - sum_j log(-f_j(x)) - sum_i log(x_i) with damped Newton steps,
until the duality gap m / t is below ``gap`` relative to max(1, |f0|).
Strictly feasible starting points come from a phase-I problem that
minimizes the largest constraint violation.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from ..errors import NumericalFailure

logger = logging.getLogger(__name__)

ScalarFn = Callable[[np.ndarray], float]
VectorFn = Callable[[np.ndarray], np.ndarray]

# Inside the quadratic-convergence region the full Newton step is taken.
QUADRATIC_REGION = 1e-6
MIN_STEP = 1e-14
EPS = float(np.finfo(float).eps)
GRADIENT_ULPS = 8.0
# Relative change of the barrier value below which a step counts as no decrease.
RESOLUTION = 1e-13


@dataclass(frozen=True)
class Constraint:
    """Smooth convex inequality ``value(x) <= 0`` with its derivatives."""

    value: ScalarFn
    gradient: VectorFn
    hessian: VectorFn
    name: str = "constraint"


@dataclass(frozen=True)
class BarrierSettings:
    t0: float = 1.0
    mu: float = 10.0
    gap: float = 1e-9
    newton_tol: float = 1e-9
    max_newton_steps: int = 200
    armijo: float = 0.25
    shrink: float = 0.5


@dataclass(frozen=True)
class BarrierResult:
    x: np.ndarray
    objective: float
    t: float
    newton_steps: int
    outer_iterations: int
    duals: np.ndarray
    kkt_residual: float


class BarrierSolver:
    """
    Central-path solver for one convex program.

    Args:
        objective: f0
        gradient: Gradient of f0
        hessian: Hessian of f0
        constraints: Inequality constraints f_j(x) <= 0
        positive: Boolean mask of coordinates kept strictly positive
        settings: Barrier schedule and Newton tolerances
    """

    def __init__(
        self,
        objective: ScalarFn,
        gradient: VectorFn,
        hessian: VectorFn,
        constraints: Sequence[Constraint],
        positive: np.ndarray,
        settings: Optional[BarrierSettings] = None,
    ):
        self.objective = objective
        self.gradient = gradient
        self.hessian = hessian
        self.constraints = list(constraints)
        self.positive = np.asarray(positive, dtype=bool)
        self.settings = settings or BarrierSettings()

    @property
    def num_inequalities(self) -> int:
        return len(self.constraints) + int(np.sum(self.positive))

    def is_strictly_feasible(self, x: np.ndarray) -> bool:
        if np.any(x[self.positive] <= 0):
            return False
        return all(c.value(x) < 0 for c in self.constraints)

    def barrier_value(self, x: np.ndarray, t: float) -> float:
        xp = x[self.positive]
        if np.any(xp <= 0):
            return np.inf
        total = t * self.objective(x) - np.sum(np.log(xp))
        for c in self.constraints:
            v = c.value(x)
            if not v < 0:
                return np.inf
            total -= np.log(-v)
        return float(total)

    def _derivatives(self, x: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """
        Gradient and Hessian of the barrier function with rounding estimates.

        Returns:
            (grad, hess, noise, directions): ``noise`` bounds the componentwise
            rounding of the gradient sum; the columns of ``directions`` are the
            gradient errors caused by rounding in each constraint value.
        """
        grad = t * self.gradient(x)
        hess = t * self.hessian(x)
        noise = np.abs(grad)
        directions = []
        for c in self.constraints:
            v = c.value(x)
            dv = c.gradient(x)
            term = dv / (-v)
            grad = grad + term
            hess = hess + np.outer(dv, dv) / v**2 + c.hessian(x) / (-v)
            noise = noise + np.abs(term)
            # v is a sum of terms about |dv| . |x| in size; near the boundary it loses their digits.
            spread = (1.0 + abs(v) + float(np.abs(dv) @ np.abs(x))) / abs(v)
            directions.append(GRADIENT_ULPS * EPS * spread * term)
        idx = np.flatnonzero(self.positive)
        xp = x[idx]
        grad[idx] -= 1.0 / xp
        hess[idx, idx] += 1.0 / xp**2
        noise[idx] += 1.0 / xp
        noise = GRADIENT_ULPS * EPS * noise
        directions = np.column_stack(directions) if directions else np.zeros((x.size, 0))
        return grad, hess, noise, directions

    def _newton_step(
        self, grad: np.ndarray, hess: np.ndarray, noise: np.ndarray, directions: np.ndarray
    ) -> Tuple[np.ndarray, float, float]:
        """Newton step, its decrement and the decrement that rounding alone can produce."""
        n = grad.size
        rhs = np.column_stack([-grad, np.eye(n), directions])
        try:
            sol = np.linalg.solve(hess, rhs)
        except np.linalg.LinAlgError:
            sol = np.linalg.lstsq(hess, rhs, rcond=None)[0]
        step = sol[:, 0]
        if not np.all(np.isfinite(step)):
            raise NumericalFailure("Newton system produced a non-finite step")
        inv_diag = np.abs(np.diag(sol[:, 1 : n + 1]))
        along = np.abs(np.einsum("ij,ij->j", directions, sol[:, n + 1 :]))
        floor = (float(noise @ np.sqrt(inv_diag)) + float(np.sum(np.sqrt(along)))) ** 2
        return step, float(-grad @ step), floor

    def _center(self, x: np.ndarray, t: float) -> Tuple[np.ndarray, int]:
        """
        Minimize the barrier function at fixed ``t``.

        Centering ends when half the Newton decrement drops below
        ``newton_tol`` or below the decrement that gradient rounding can
        explain, or when the line search finds no decrease that floating
        point resolves.
        """
        s = self.settings
        for step_count in range(1, s.max_newton_steps + 1):
            dx, decrement, floor = self._newton_step(*self._derivatives(x, t))
            if decrement / 2.0 <= max(s.newton_tol, floor):
                return x, step_count

            if decrement < QUADRATIC_REGION and self.is_strictly_feasible(x + dx):
                x = x + dx
                continue

            phi = self.barrier_value(x, t)
            step = 1.0
            while step > MIN_STEP:
                trial = self.barrier_value(x + step * dx, t)
                if trial <= phi - s.armijo * step * decrement:
                    break
                step *= s.shrink
            else:
                logger.debug("line search stalled at t=%.3e, decrement=%.3e", t, decrement)
                return x, step_count
            x = x + step * dx
            if phi - trial <= RESOLUTION * max(1.0, abs(phi)):
                logger.debug("no resolvable decrease at t=%.3e, decrement=%.3e", t, decrement)
                return x, step_count

        raise NumericalFailure(
            f"Newton centering did not converge in {s.max_newton_steps} steps at t={t:.3e}"
        )

    def kkt(self, x: np.ndarray, t: float) -> Tuple[np.ndarray, float]:
        """Central-path dual estimates and the KKT residual at ``x``."""
        duals = np.array([1.0 / (t * -c.value(x)) for c in self.constraints])
        residual = self.gradient(x).astype(float)
        for lam, c in zip(duals, self.constraints):
            residual = residual + lam * c.gradient(x)
        idx = np.flatnonzero(self.positive)
        residual[idx] -= 1.0 / (t * x[idx])
        stationarity = float(np.max(np.abs(residual))) if residual.size else 0.0
        return duals, max(stationarity, self.num_inequalities / t)

    def minimize(
        self, x0: np.ndarray, stop: Optional[Callable[[np.ndarray], bool]] = None
    ) -> BarrierResult:
        """
        Run the barrier method from a strictly feasible point.

        ``stop`` is checked after every centering step and ends the run early
        when it returns True.

        Raises:
            ValueError: If ``x0`` is not strictly feasible
            NumericalFailure: If a centering step fails to converge
        """
        x = np.asarray(x0, dtype=float).copy()
        if not self.is_strictly_feasible(x):
            raise ValueError("barrier start point is not strictly feasible")

        s = self.settings
        m = self.num_inequalities
        t = s.t0
        total_steps = 0
        outer = 0
        while True:
            x, steps = self._center(x, t)
            total_steps += steps
            outer += 1
            if m == 0 or m / t <= s.gap * max(1.0, abs(self.objective(x))):
                break
            if stop is not None and stop(x):
                break
            t *= s.mu

        duals, kkt_residual = self.kkt(x, t)
        logger.debug(
            "barrier: %d outer, %d Newton steps, f0=%.12g, kkt=%.2e",
            outer, total_steps, self.objective(x), kkt_residual,
        )
        return BarrierResult(
            x=x,
            objective=float(self.objective(x)),
            t=t,
            newton_steps=total_steps,
            outer_iterations=outer,
            duals=duals,
            kkt_residual=kkt_residual,
        )


def find_strictly_feasible(
    constraints: Sequence[Constraint],
    x0: np.ndarray,
    positive: np.ndarray,
    settings: Optional[BarrierSettings] = None,
    margin: float = 1e-9,
    floor: float = -1.0,
) -> Tuple[Optional[np.ndarray], float]:
    """
    Phase I: minimize s subject to f_j(x) <= s.

    The auxiliary variable is bounded below by ``floor`` so the problem
    always has a solution. ``x0`` must satisfy the positivity mask.

    Returns:
        (point, s_star): a strictly feasible point, or None when the
        smallest achievable violation s_star is not below ``-margin``
    """
    x0 = np.asarray(x0, dtype=float)
    positive = np.asarray(positive, dtype=bool)
    values = [c.value(x0) for c in constraints]
    worst = max(values) if values else -np.inf
    if worst < -margin:
        return x0.copy(), worst

    n = x0.size

    def lift(c: Constraint) -> Constraint:
        def value(z):
            return c.value(z[:n]) - z[n]

        def gradient(z):
            return np.append(c.gradient(z[:n]), -1.0)

        def hessian(z):
            h = np.zeros((n + 1, n + 1))
            h[:n, :n] = c.hessian(z[:n])
            return h

        return Constraint(value, gradient, hessian, name=f"phase1:{c.name}")

    def floor_value(z):
        return floor - z[n]

    def floor_gradient(z):
        g = np.zeros(n + 1)
        g[n] = -1.0
        return g

    lifted = [lift(c) for c in constraints]
    lifted.append(Constraint(floor_value, floor_gradient, lambda z: np.zeros((n + 1, n + 1)), "floor"))

    unit = np.zeros(n + 1)
    unit[n] = 1.0
    solver = BarrierSolver(
        objective=lambda z: float(z[n]),
        gradient=lambda z: unit.copy(),
        hessian=lambda z: np.zeros((n + 1, n + 1)),
        constraints=lifted,
        positive=np.append(positive, False),
        settings=settings,
    )
    z0 = np.append(x0, max(worst, floor) + 1.0)
    result = solver.minimize(z0, stop=lambda z: z[n] < 0.5 * floor)
    s_star = float(result.x[n])
    logger.debug("phase I: s*=%.3e after %d Newton steps", s_star, result.newton_steps)
    if s_star < -margin:
        return result.x[:n], s_star
    return None, s_star
