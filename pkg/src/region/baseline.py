"""
Time-division baseline.

One slot carries only the multicast message at its largest max-min rate,
the other only the confidential message at its largest secrecy rate.
Time sharing with fraction alpha gives the pairs
(alpha * R_mc, (1 - alpha) * R_c); alpha = 1/2 is the halved pair of an
equal two-slot split.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from ..algorithms.allocation import confidential_only, multicast_only
from ..algorithms.barrier import BarrierSolver, Constraint
from ..algorithms.dc_solver import Infeasible, barrier_settings, dc_solve
from ..algorithms.gsvd import ChannelPair, GsvdFactors, classify_subchannels, gsvd
from ..algorithms.rates import sum_log2
from ..utils.config import DcConfig
from .regions import RateRegion, RegionLabel, RegionPoint

logger = logging.getLogger(__name__)

LN2 = np.log(2.0)


def max_min_multicast(
    f: GsvdFactors, indices: Sequence[int], p_budget: float, cfg: DcConfig = DcConfig()
) -> Tuple[float, np.ndarray]:
    """
    Largest common multicast rate over the given subchannels.

    Solves max tau s.t. tau <= sum log2(1 + p c^2), tau <= sum log2(1 + p d^2),
    a . p <= P in epigraph form.

    Returns:
        (rate, powers aligned with ``indices``)
    """
    idx = list(indices)
    m = len(idx)
    if m == 0 or p_budget <= 0:
        return 0.0, np.zeros(m)

    c2, d2 = f.c_sq[idx], f.d_sq[idx]
    a = f.a_col_norm_sq[idx]
    size = m + 1

    def rate_constraint(gains, name):
        def value(x):
            return x[m] - sum_log2(x[:m], gains)

        def gradient(x):
            g = np.empty(size)
            g[:m] = -gains / (LN2 * (1.0 + x[:m] * gains))
            g[m] = 1.0
            return g

        def hessian(x):
            h = np.zeros((size, size))
            h[np.arange(m), np.arange(m)] = gains**2 / (LN2 * (1.0 + x[:m] * gains) ** 2)
            return h

        return Constraint(value, gradient, hessian, name)

    weights = np.append(a, 0.0)
    budget = Constraint(
        lambda x: float(weights @ x) - p_budget,
        lambda x: weights.copy(),
        lambda x: np.zeros((size, size)),
        "budget",
    )
    objective_grad = np.zeros(size)
    objective_grad[m] = -1.0
    solver = BarrierSolver(
        objective=lambda x: -float(x[m]),
        gradient=lambda x: objective_grad.copy(),
        hessian=lambda x: np.zeros((size, size)),
        constraints=[rate_constraint(c2, "receiver"), rate_constraint(d2, "eavesdropper"), budget],
        positive=np.append(np.ones(m, dtype=bool), False),
        settings=barrier_settings(cfg),
    )
    p_start = p_budget / (2.0 * m * a)
    tau_start = min(sum_log2(p_start, c2), sum_log2(p_start, d2)) - 1.0
    result = solver.minimize(np.append(p_start, tau_start))
    p = np.maximum(result.x[:m], 0.0)
    return min(sum_log2(p, c2), sum_log2(p, d2)), p


def tdma_point(alpha: float, r_mc_max: float, r_c_max: float) -> Tuple[float, float]:
    """Rate pair of time sharing with a fraction ``alpha`` spent on multicast."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha * r_mc_max, (1.0 - alpha) * r_c_max


def tdma_baseline(
    pair: ChannelPair,
    p_budget: float,
    cfg: DcConfig = DcConfig(),
    delta: float = 0.1,
    f: Optional[GsvdFactors] = None,
) -> RateRegion:
    """
    Time-division region on the multicast grid r_ms = k * delta.

    Args:
        pair: Channel pair
        p_budget: Total power budget (linear)
        cfg: Solver settings
        delta: Multicast grid step
        f: Precomputed decomposition of ``pair``

    Returns:
        RateRegion labelled TDMA; diagnostics hold both slot maxima and the halved pair
    """
    if p_budget <= 0:
        raise ValueError("power budget must be positive")
    f = f if f is not None else gsvd(pair)
    part = classify_subchannels(f)

    r_mc_max, _ = max_min_multicast(f, multicast_only(part).gamma0, p_budget, cfg)
    conf = dc_solve(f, confidential_only(f, part), 0.0, p_budget, cfg)
    r_c_max = 0.0 if isinstance(conf, Infeasible) else max(0.0, conf.secrecy_rate)

    points = []
    k = 0
    while k * delta <= r_mc_max + 1e-12:
        r_ms = k * delta
        alpha = r_ms / r_mc_max if r_mc_max > 0 else 0.0
        _, r_c = tdma_point(min(alpha, 1.0), r_mc_max, r_c_max)
        points.append(RegionPoint(r_ms=r_ms, r_c=r_c))
        k += 1

    halved = tdma_point(0.5, r_mc_max, r_c_max)
    logger.info("TDMA: R_mc=%.4f R_c=%.4f halved=(%.4f, %.4f)", r_mc_max, r_c_max, *halved)
    return RateRegion(
        label=RegionLabel.TDMA,
        delta=delta,
        p_budget=p_budget,
        points=tuple(points),
        diagnostics={"r_mc_max": r_mc_max, "r_c_max": r_c_max, "halved": halved},
    )
