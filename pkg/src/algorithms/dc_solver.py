"""
Power allocation for one scheme at one multicast quality-of-service target.

The problem is

    maximize   sum_c log2(1 + pc c^2) - sum_c log2(1 + pc d^2)
    subject to sum_0 log2(1 + p0 c^2) >= r_ms,
               sum_0 log2(1 + p0 d^2) >= r_ms,
               a0 . p0 + ac . pc <= P,  p0, pc >= 0.

The objective is a difference of concave functions. Each DC step
linearizes the subtracted term at the previous powers and solves the
resulting convex program with the log-barrier method. The linearized
objective never exceeds the true objective and matches it at the
reference point, so the true objective never decreases across steps.
"""

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple, Union

import numpy as np

from ..errors import DimensionMismatch, DimensionTooLarge
from ..utils.config import DcConfig
from .barrier import BarrierSettings, BarrierSolver, Constraint, find_strictly_feasible
from .gsvd import GsvdFactors
from .rates import DcIterate, MessageAllocation, PowerSolution, sum_log2

logger = logging.getLogger(__name__)

LN2 = np.log(2.0)
# Confidential coordinates with c^2 at or below this are pinned to zero power.
DEAD_GAIN = 1e-15
FEASIBILITY_MARGIN = 1e-9
GAIN_TOL = 1e-12
ORACLE_MAX_DIMS = 4
ORACLE_MAX_POINTS = 64_000_000


@dataclass(frozen=True)
class SubproblemInstance:
    """Gains, weights, budget and target of one convex subproblem."""

    c2_conf: np.ndarray
    d2_conf: np.ndarray
    c2_mult: np.ndarray
    d2_mult: np.ndarray
    a_conf: np.ndarray
    a_mult: np.ndarray
    p_budget: float
    r_ms: float
    pc_ref: np.ndarray

    def __post_init__(self):
        for name in ("c2_conf", "d2_conf", "c2_mult", "d2_mult", "a_conf", "a_mult", "pc_ref"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(-1))
        n, m = self.c2_conf.size, self.c2_mult.size
        if self.d2_conf.size != n or self.a_conf.size != n or self.pc_ref.size != n:
            raise DimensionMismatch("confidential gains, weights and reference powers differ in length")
        if self.d2_mult.size != m or self.a_mult.size != m:
            raise DimensionMismatch("multicast gains and weights differ in length")
        gains = np.concatenate([self.c2_conf, self.d2_conf, self.c2_mult, self.d2_mult])
        if np.any(gains < -GAIN_TOL) or np.any(gains > 1 + GAIN_TOL):
            raise ValueError("squared gains must lie in [0, 1]")
        if np.any(np.concatenate([self.a_conf, self.a_mult]) <= 0):
            raise ValueError("power weights must be positive")
        if np.any(self.pc_ref < 0):
            raise ValueError("reference powers must be nonnegative")
        if self.p_budget < 0 or self.r_ms < 0:
            raise ValueError("power budget and multicast target must be nonnegative")

    @property
    def m(self) -> int:
        return self.c2_mult.size

    @property
    def n(self) -> int:
        return self.c2_conf.size

    @property
    def weights(self) -> np.ndarray:
        """Slopes of the linearized eavesdropper term at ``pc_ref``."""
        return self.d2_conf / (LN2 * (1.0 + self.pc_ref * self.d2_conf))

    def with_reference(self, pc_ref: np.ndarray) -> "SubproblemInstance":
        return replace(self, pc_ref=np.asarray(pc_ref, dtype=float))


@dataclass(frozen=True)
class Infeasible:
    """The multicast target cannot be met within the power budget."""

    reason: str
    phase1_value: float


def build_instance(
    f: GsvdFactors,
    alloc: MessageAllocation,
    r_ms: float,
    p_budget: float,
    pc_ref: Optional[np.ndarray] = None,
) -> SubproblemInstance:
    """Collect the subproblem data of ``alloc`` from a decomposition."""
    conf, mult = list(alloc.gammac), list(alloc.gamma0)
    norms = f.a_col_norm_sq
    return SubproblemInstance(
        c2_conf=f.c_sq[conf],
        d2_conf=f.d_sq[conf],
        c2_mult=f.c_sq[mult],
        d2_mult=f.d_sq[mult],
        a_conf=norms[conf],
        a_mult=norms[mult],
        p_budget=float(p_budget),
        r_ms=float(r_ms),
        pc_ref=np.zeros(len(conf)) if pc_ref is None else pc_ref,
    )


def true_objective(inst: SubproblemInstance, pc: np.ndarray) -> float:
    return sum_log2(pc, inst.c2_conf) - sum_log2(pc, inst.d2_conf)


def surrogate_objective(inst: SubproblemInstance, pc: np.ndarray) -> float:
    """Objective with the eavesdropper term linearized at ``inst.pc_ref``."""
    pc = np.asarray(pc, dtype=float)
    linear = sum_log2(inst.pc_ref, inst.d2_conf) + float(inst.weights @ (pc - inst.pc_ref))
    return sum_log2(pc, inst.c2_conf) - linear


def barrier_settings(cfg: DcConfig) -> BarrierSettings:
    return BarrierSettings(
        t0=cfg.t0,
        mu=cfg.mu,
        gap=cfg.gap,
        newton_tol=cfg.newton_tol,
        max_newton_steps=cfg.max_newton_steps,
    )


class _Layout:
    """Variable vector x = [p0, pc over live confidential coordinates]."""

    def __init__(self, inst: SubproblemInstance):
        self.m = inst.m
        self.live = np.flatnonzero(inst.c2_conf > DEAD_GAIN)
        self.size = self.m + self.live.size
        self.weights = np.concatenate([inst.a_mult, inst.a_conf[self.live]])

    def split(self, x: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
        p0 = np.maximum(x[: self.m], 0.0)
        pc = np.zeros(n)
        pc[self.live] = np.maximum(x[self.m :], 0.0)
        return p0, pc

    def start(self, p_budget: float) -> np.ndarray:
        # Half the budget, spread evenly.
        return p_budget / (2.0 * self.size * self.weights)


def _constraints(inst: SubproblemInstance, layout: _Layout) -> List[Constraint]:
    m, size = layout.m, layout.size

    def budget_value(x):
        return float(layout.weights @ x) - inst.p_budget

    constraints = [
        Constraint(
            budget_value,
            lambda x: layout.weights.copy(),
            lambda x: np.zeros((size, size)),
            "budget",
        )
    ]
    if inst.r_ms > 0:
        for label, gains in (("receiver", inst.c2_mult), ("eavesdropper", inst.d2_mult)):
            constraints.append(_rate_constraint(gains, inst.r_ms, m, size, f"multicast_{label}"))
    return constraints


def _rate_constraint(gains: np.ndarray, r_ms: float, m: int, size: int, name: str) -> Constraint:
    """r_ms - sum log2(1 + p0 g) <= 0 on the first ``m`` coordinates."""

    def value(x):
        return r_ms - sum_log2(x[:m], gains)

    def gradient(x):
        g = np.zeros(size)
        g[:m] = -gains / (LN2 * (1.0 + x[:m] * gains))
        return g

    def hessian(x):
        h = np.zeros((size, size))
        h[np.arange(m), np.arange(m)] = gains**2 / (LN2 * (1.0 + x[:m] * gains) ** 2)
        return h

    return Constraint(value, gradient, hessian, name)


def _full_power_rate_bound(inst: SubproblemInstance) -> float:
    if inst.m == 0:
        return 0.0
    p_max = inst.p_budget / inst.a_mult
    return min(sum_log2(p_max, inst.c2_mult), sum_log2(p_max, inst.d2_mult))


def find_feasible_point(inst: SubproblemInstance, cfg: DcConfig = DcConfig()) -> Union[np.ndarray, Infeasible]:
    """
    Strictly feasible variable vector for the subproblem's constraints.

    The returned point uses the internal layout [p0, live pc]. Phase I is
    skipped when the evenly spread half-budget point already qualifies.
    """
    layout = _Layout(inst)
    if inst.r_ms > 0 and inst.m == 0:
        return Infeasible("no multicast subchannel for a positive multicast target", np.inf)
    if inst.p_budget <= 0:
        return Infeasible("zero power budget", np.inf)
    bound = _full_power_rate_bound(inst)
    if inst.r_ms > 0 and inst.r_ms >= bound:
        return Infeasible(f"multicast target {inst.r_ms:g} exceeds full-power bound {bound:.6g}", np.inf)
    if layout.size == 0:
        return np.zeros(0)

    point, s_star = find_strictly_feasible(
        _constraints(inst, layout),
        layout.start(inst.p_budget),
        np.ones(layout.size, dtype=bool),
        barrier_settings(cfg),
        margin=FEASIBILITY_MARGIN,
    )
    if point is None:
        return Infeasible(f"multicast target {inst.r_ms:g} not reachable within the budget", s_star)
    return point


def solve_subproblem(
    inst: SubproblemInstance,
    cfg: DcConfig = DcConfig(),
    start: Optional[np.ndarray] = None,
) -> Union[PowerSolution, Infeasible]:
    """
    Maximize the linearized objective for one reference point.

    Args:
        inst: Subproblem data including the linearization point
        cfg: Barrier tolerances
        start: Strictly feasible point from ``find_feasible_point``; computed when omitted

    Returns:
        PowerSolution on the surrogate optimum, or Infeasible
    """
    if start is None:
        start = find_feasible_point(inst, cfg)
        if isinstance(start, Infeasible):
            return start

    layout = _Layout(inst)
    m = layout.m
    if layout.live.size == 0:
        # Nothing to optimize; any feasible point is optimal.
        p0, pc = layout.split(start, inst.n)
        return _solution(inst, p0, pc, kkt=0.0, newton_steps=0)

    c2 = inst.c2_conf[layout.live]
    w = inst.weights[layout.live]
    size = layout.size

    def objective(x):
        return -sum_log2(x[m:], c2) + float(w @ x[m:])

    def gradient(x):
        g = np.zeros(size)
        g[m:] = -c2 / (LN2 * (1.0 + x[m:] * c2)) + w
        return g

    def hessian(x):
        h = np.zeros((size, size))
        idx = np.arange(m, size)
        h[idx, idx] = c2**2 / (LN2 * (1.0 + x[m:] * c2) ** 2)
        return h

    solver = BarrierSolver(
        objective,
        gradient,
        hessian,
        _constraints(inst, layout),
        np.ones(size, dtype=bool),
        barrier_settings(cfg),
    )
    result = solver.minimize(start)
    p0, pc = layout.split(result.x, inst.n)
    return _solution(inst, p0, pc, kkt=result.kkt_residual, newton_steps=result.newton_steps)


def _solution(inst: SubproblemInstance, p0: np.ndarray, pc: np.ndarray, kkt: float, newton_steps: int) -> PowerSolution:
    return PowerSolution(
        p0=p0,
        pc=pc,
        secrecy_rate=true_objective(inst, pc),
        multicast_rate_1=sum_log2(p0, inst.c2_mult),
        multicast_rate_2=sum_log2(p0, inst.d2_mult),
        total_power=float(inst.a_mult @ p0 + inst.a_conf @ pc),
        kkt_residual=kkt,
        newton_steps=newton_steps,
    )


def dc_solve(
    f: GsvdFactors,
    alloc: MessageAllocation,
    r_ms: float,
    p_budget: float,
    cfg: DcConfig = DcConfig(),
    pc_init: Optional[np.ndarray] = None,
) -> Union[PowerSolution, Infeasible]:
    """
    Run DC iterations for one scheme at one multicast target.

    Iteration starts from ``pc_init`` (zero power by default) and stops
    when the true objective changes by less than ``cfg.epsilon`` or after
    ``cfg.max_dc_iters`` steps.

    Args:
        f: Decomposition result
        alloc: Scheme to solve
        r_ms: Multicast target in bits
        p_budget: Total power budget
        cfg: DC and barrier settings
        pc_init: Budget-feasible initial confidential powers

    Returns:
        PowerSolution with the iteration trace, or Infeasible
    """
    alloc.validate(f.q)
    inst = build_instance(f, alloc, r_ms, p_budget, pc_ref=pc_init)
    if float(inst.a_conf @ inst.pc_ref) > p_budget:
        raise ValueError("initial confidential powers exceed the budget")

    return dc_solve_instance(inst, cfg)


def dc_solve_multistart(
    f: GsvdFactors,
    alloc: MessageAllocation,
    r_ms: float,
    p_budget: float,
    cfg: DcConfig = DcConfig(),
) -> Tuple[Union[PowerSolution, Infeasible], float]:
    """
    Solve from zero and from uniform initial powers.

    Returns:
        (better solution, absolute disagreement of the two secrecy rates)
    """
    n = len(alloc.gammac)
    norms = f.a_col_norm_sq[list(alloc.gammac)]
    uniform = p_budget / (2.0 * n * norms) if n else np.zeros(0)
    zero_start = dc_solve(f, alloc, r_ms, p_budget, cfg)
    uniform_start = dc_solve(f, alloc, r_ms, p_budget, cfg, pc_init=uniform)
    if isinstance(zero_start, Infeasible) or isinstance(uniform_start, Infeasible):
        return zero_start, 0.0
    disagreement = abs(zero_start.secrecy_rate - uniform_start.secrecy_rate)
    if disagreement > cfg.epsilon:
        logger.info("initializations disagree by %.3e bits", disagreement)
    best = zero_start if zero_start.secrecy_rate >= uniform_start.secrecy_rate else uniform_start
    return best, disagreement


def _grid_points_per_axis(dims: int, grid_points: int) -> int:
    if dims == 0:
        return 1
    return max(2, min(grid_points, int(round(ORACLE_MAX_POINTS ** (1.0 / dims)))))


def _grid_chunks(upper: np.ndarray, points: int):
    """Yield blocks of grid points on the box [0, upper], split along the first axis."""
    axes = [np.linspace(0.0, u, points) for u in upper]
    if len(axes) == 1:
        yield axes[0][:, None]
        return
    rest = np.stack([g.reshape(-1) for g in np.meshgrid(*axes[1:], indexing="ij")], axis=1)
    for v in axes[0]:
        yield np.hstack([np.full((rest.shape[0], 1), v), rest])


def _grid_sum_log2(points: np.ndarray, gains: np.ndarray) -> np.ndarray:
    return np.sum(np.log2(1.0 + points * gains), axis=1)


def _min_multicast_power(inst: SubproblemInstance, points: int) -> float:
    """Smallest grid power a0 . p0 meeting the multicast target, inf if none."""
    if inst.r_ms <= 0:
        return 0.0
    if inst.m == 0:
        return np.inf
    best = np.inf
    for block in _grid_chunks(inst.p_budget / inst.a_mult, points):
        ok = (_grid_sum_log2(block, inst.c2_mult) >= inst.r_ms) & (
            _grid_sum_log2(block, inst.d2_mult) >= inst.r_ms
        )
        if np.any(ok):
            best = min(best, float(np.min(block[ok] @ inst.a_mult)))
    return best


def grid_oracle(inst: SubproblemInstance, cfg: DcConfig = DcConfig()) -> float:
    """
    Brute-force optimum of the true objective for small instances.

    Each power axis gets ``cfg.grid_points`` points, fewer when the grid
    would grow too large.

    The multicast powers only need to meet the target, so the oracle first
    finds the least grid power that does, then searches the confidential
    powers on a grid within the remaining budget.

    Returns:
        Best true objective on the grid, ``-inf`` if no grid point is feasible

    Raises:
        DimensionTooLarge: If M + N exceeds 4
    """
    if inst.m + inst.n > ORACLE_MAX_DIMS:
        raise DimensionTooLarge(
            f"grid oracle supports at most {ORACLE_MAX_DIMS} power variables, got {inst.m + inst.n}"
        )
    reserved = _min_multicast_power(inst, _grid_points_per_axis(inst.m, cfg.grid_points))
    remaining = inst.p_budget - reserved
    if not np.isfinite(reserved) or remaining < -1e-12:
        return -np.inf
    if inst.n == 0 or remaining <= 0:
        return 0.0

    best = -np.inf
    points = _grid_points_per_axis(inst.n, cfg.grid_points)
    for block in _grid_chunks(remaining / inst.a_conf, points):
        ok = block @ inst.a_conf <= remaining * (1.0 + 1e-12)
        if not np.any(ok):
            continue
        feasible = block[ok]
        values = _grid_sum_log2(feasible, inst.c2_conf) - _grid_sum_log2(feasible, inst.d2_conf)
        best = max(best, float(np.max(values)))
    return best


def dc_solve_instance(inst: SubproblemInstance, cfg: DcConfig = DcConfig()) -> Union[PowerSolution, Infeasible]:
    """DC iterations on a bare instance, starting from ``inst.pc_ref``."""
    start = find_feasible_point(inst, cfg)
    if isinstance(start, Infeasible):
        logger.debug("infeasible at r_ms=%g: %s", inst.r_ms, start.reason)
        return start

    pc_ref = inst.pc_ref
    previous = true_objective(inst, pc_ref)
    trace = [DcIterate(0, previous, previous, 0.0, 0)]
    solution = None
    converged = False
    for i in range(1, cfg.max_dc_iters + 1):
        step_inst = inst.with_reference(pc_ref)
        solution = solve_subproblem(step_inst, cfg, start=start)
        current = solution.secrecy_rate
        trace.append(
            DcIterate(
                iteration=i,
                true_objective=current,
                surrogate_objective=surrogate_objective(step_inst, solution.pc),
                step_norm=float(np.linalg.norm(solution.pc - pc_ref)),
                newton_steps=solution.newton_steps,
            )
        )
        if abs(current - previous) < cfg.epsilon:
            converged = True
            break
        previous = current
        pc_ref = solution.pc

    if not converged:
        logger.warning("DC iteration hit the limit of %d steps at r_ms=%g", cfg.max_dc_iters, inst.r_ms)

    return replace(
        solution,
        iterations=len(trace) - 1,
        converged=converged,
        newton_steps=sum(t.newton_steps for t in trace),
        trace=tuple(trace),
    )
