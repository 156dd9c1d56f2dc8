"""
Rate-region sweep of GSVD-based service integration.

For r_ms = 0, delta, 2 delta, ... every remaining scheme is solved; the
best secrecy rate is the boundary value and schemes that cannot meet the
multicast target are dropped, since a larger target is harder still.
"""

import logging
from concurrent.futures import Executor
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from ..algorithms.allocation import SchemeSet, enumerate_schemes, remove_scheme
from ..algorithms.dc_solver import Infeasible, build_instance, dc_solve, find_feasible_point
from ..algorithms.gsvd import (
    ChannelPair,
    GsvdFactors,
    check_feasibility,
    classify_subchannels,
    expected_counts,
    gsvd,
)
from ..algorithms.rates import MessageAllocation, PowerSolution, clean_rate, sum_log2
from ..errors import NumericalFailure, PhySiInfeasible
from ..utils.config import DcConfig
from .baseline import max_min_multicast
from .regions import RateRegion, RegionLabel, RegionPoint

logger = logging.getLogger(__name__)

SchemeOutcome = Union[PowerSolution, Infeasible, NumericalFailure]


def multicast_rate_cap(f: GsvdFactors, cc: Tuple[int, ...], p_budget: float) -> float:
    """Upper bound on any multicast rate: every common subchannel at full power."""
    if not cc:
        return 0.0
    idx = list(cc)
    p_max = p_budget / f.a_col_norm_sq[idx]
    return min(sum_log2(p_max, f.c_sq[idx]), sum_log2(p_max, f.d_sq[idx]))


def _solve_scheme(
    f: GsvdFactors,
    alloc: MessageAllocation,
    r_ms: float,
    p_budget: float,
    cfg: DcConfig,
    pc_init: Optional[np.ndarray] = None,
) -> SchemeOutcome:
    try:
        return dc_solve(f, alloc, r_ms, p_budget, cfg, pc_init=pc_init)
    except NumericalFailure as exc:
        return exc


def _within_budget(f: GsvdFactors, alloc: MessageAllocation, pc: np.ndarray, p_budget: float) -> np.ndarray:
    # Interior solutions can land an ulp over the budget once p0 is dropped.
    pc = np.maximum(pc, 0.0)
    used = float(f.a_col_norm_sq[list(alloc.gammac)] @ pc)
    return pc * (p_budget * (1.0 - 1e-12) / used) if used > p_budget else pc


def _solve_point(
    f: GsvdFactors,
    schemes: SchemeSet,
    r_ms: float,
    p_budget: float,
    cfg: DcConfig,
    executor: Optional[Executor],
    starts: Dict[int, np.ndarray],
) -> List[SchemeOutcome]:
    args = [
        (f, alloc, r_ms, p_budget, cfg, starts.get(scheme_id))
        for scheme_id, alloc in zip(schemes.ids, schemes.schemes)
    ]
    if executor is None:
        return [_solve_scheme(*a) for a in args]
    return list(executor.map(_solve_scheme, *zip(*args)))


def _check_removed(
    f: GsvdFactors, removed: Dict[int, MessageAllocation], r_ms: float, p_budget: float, cfg: DcConfig
) -> List[int]:
    """Ids of removed schemes that are feasible again at ``r_ms``."""
    revived = []
    for scheme_id, alloc in removed.items():
        start = find_feasible_point(build_instance(f, alloc, r_ms, p_budget), cfg)
        if not isinstance(start, Infeasible):
            logger.warning("scheme %d was removed but is feasible at r_ms=%g", scheme_id, r_ms)
            revived.append(scheme_id)
    return revived


def sweep_region(
    pair: ChannelPair,
    p_budget: float,
    delta: float = 0.1,
    cfg: DcConfig = DcConfig(),
    *,
    tol: float = 1e-9,
    verify_removals: bool = False,
    warm_start: bool = True,
    executor: Optional[Executor] = None,
    f: Optional[GsvdFactors] = None,
) -> RateRegion:
    """
    Trace the boundary of the GSVD-based rate region.

    Args:
        pair: Channel pair
        p_budget: Total power budget (linear)
        delta: Multicast grid step in bits
        cfg: DC and barrier settings
        tol: Subchannel classification tolerance
        verify_removals: Re-test removed schemes at later grid points
        warm_start: Start each scheme's DC iteration from its powers at the previous grid point
        executor: Optional executor solving the schemes of one grid point in parallel
        f: Precomputed decomposition of ``pair``

    Returns:
        RateRegion labelled GSVD

    Raises:
        PhySiInfeasible: If the channel cannot carry both messages
    """
    if p_budget <= 0:
        raise ValueError("power budget must be positive")
    if delta <= 0:
        raise ValueError("delta must be positive")

    f = f if f is not None else gsvd(pair)
    part = classify_subchannels(f, tol)
    report = check_feasibility(f, part)
    if not report.phy_si_feasible:
        row = expected_counts(pair.nt, pair.nb, pair.ne)
        raise PhySiInfeasible(
            f"{report.describe()} (configuration {row.label}, "
            f"{len(part.cc)} common / {len(part.pc1)} receiver-only / {len(part.pc2)} eavesdropper-only subchannels)"
        )

    schemes = enumerate_schemes(f, part)
    r_cap = multicast_rate_cap(f, part.cc, p_budget)
    try:
        r_mc_max, _ = max_min_multicast(f, part.cc, p_budget, cfg)
    except NumericalFailure as exc:
        logger.warning("max-min multicast rate unavailable: %s", exc)
        r_mc_max = float("nan")
    logger.info(
        "sweep: %d schemes, multicast cap %.4f (max-min %.4f), delta=%g",
        len(schemes), r_cap, r_mc_max, delta,
    )

    points: List[RegionPoint] = []
    removed: Dict[int, MessageAllocation] = {}
    revived_log: List[Tuple[float, int]] = []
    starts: Dict[int, np.ndarray] = {}
    k = 0
    while not schemes.is_empty and k * delta <= r_cap + 1e-12:
        r_ms = k * delta
        if verify_removals and removed:
            revived_log.extend((r_ms, i) for i in _check_removed(f, removed, r_ms, p_budget, cfg))

        outcomes = _solve_point(f, schemes, r_ms, p_budget, cfg, executor, starts)
        best_pos, best = None, None
        failures, dropped = [], []
        for pos, outcome in enumerate(outcomes):
            scheme_id = schemes.ids[pos]
            if isinstance(outcome, Infeasible):
                dropped.append(pos)
            elif isinstance(outcome, NumericalFailure):
                failures.append({"scheme_id": scheme_id, "error": str(outcome)})
                logger.warning("scheme %d failed at r_ms=%g: %s", scheme_id, r_ms, outcome)
            else:
                if warm_start:
                    starts[scheme_id] = _within_budget(f, schemes.schemes[pos], outcome.pc, p_budget)
                if best is None or outcome.secrecy_rate > best.secrecy_rate:
                    best_pos, best = pos, outcome

        winner_id = schemes.ids[best_pos] if best_pos is not None else -1
        winner_alloc = schemes.schemes[best_pos] if best_pos is not None else None
        for pos in reversed(dropped):
            removed[schemes.ids[pos]] = schemes.schemes[pos]
            schemes = remove_scheme(schemes, pos)

        if best is None:
            if failures:
                logger.warning("no scheme solved at r_ms=%g; skipping point", r_ms)
                k += 1
                continue
            break

        points.append(
            RegionPoint(
                r_ms=r_ms,
                r_c=clean_rate(max(0.0, best.secrecy_rate)),
                scheme_id=winner_id,
                iterations=best.iterations,
                feasible_schemes_remaining=len(schemes),
                diagnostics={
                    "solution": best,
                    "allocation": winner_alloc,
                    "failures": failures,
                    "removed": sorted(removed),
                },
            )
        )
        logger.debug("r_ms=%.3f r_c=%.6f scheme=%d remaining=%d", r_ms, best.secrecy_rate, winner_id, len(schemes))
        k += 1

    return RateRegion(
        label=RegionLabel.GSVD,
        delta=delta,
        p_budget=p_budget,
        points=tuple(points),
        diagnostics={
            "multicast_cap": r_cap,
            "max_min_multicast": r_mc_max,
            "counts": part.counts,
            "revived_schemes": revived_log,
        },
    )
