"""
Brute-force reference region for very small antenna counts.

Transmit covariances are built from a dictionary of beam directions:
each direction carries either message with a power on a grid over the
budget simplex, and the Pareto frontier of all resulting rate pairs
approximates the best region any linear precoder reaches.
"""

import itertools
import logging
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

from ..algorithms.gsvd import ChannelPair, GsvdFactors, gsvd
from ..algorithms.rates import build_covariances, covariance_rates_batch
from ..errors import DimensionTooLarge
from .regions import RateRegion, RegionLabel, RegionPoint, frontier_on_grid, pareto_frontier

logger = logging.getLogger(__name__)

MAX_REFERENCE_DIM = 2
DICTIONARIES = ("full", "gsvd")


def _unit_columns(v: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(v, axis=0)
    return v / np.where(norms > 0, norms, 1.0)


def direction_dictionary(
    pair: ChannelPair, f: GsvdFactors, kind: str = "full", seed: int = 0, n_random: int = 8
) -> List[Tuple[str, np.ndarray]]:
    """
    Named sets of unit-norm transmit directions.

    ``"gsvd"`` holds only the GSVD precoder columns; ``"full"`` adds the
    right singular vectors of both channels, the identity and seeded
    random unitaries.
    """
    if kind not in DICTIONARIES:
        raise ValueError(f"Unknown dictionary: {kind}. Use one of {DICTIONARIES}")
    entries = [("gsvd", _unit_columns(f.a))]
    if kind == "gsvd":
        return entries

    for name, h in (("h1_right", pair.h1), ("h2_right", pair.h2)):
        _, _, vh = scipy.linalg.svd(h, full_matrices=True)
        entries.append((name, vh.conj().T))
    entries.append(("identity", np.eye(pair.nt, dtype=np.complex128)))
    if pair.nt > 1:
        rng = np.random.Generator(np.random.Philox(seed))
        for i in range(n_random):
            entries.append((f"random_{i}", unitary_group.rvs(pair.nt, random_state=rng)))
    return entries


def simplex_grid(k: int, grid: int, p_budget: float) -> np.ndarray:
    """Power vectors s >= 0 with sum(s) <= P on the lattice of step P / grid."""
    if k == 0:
        return np.zeros((1, 0))
    steps = [c for c in itertools.product(range(grid + 1), repeat=k) if sum(c) <= grid]
    return np.array(steps, dtype=float) * (p_budget / grid)


def _direction_pairs(pair: ChannelPair, directions: np.ndarray, grid: int, p_budget: float) -> np.ndarray:
    k = directions.shape[1]
    outer = np.einsum("ik,jk->kij", directions, directions.conj())
    powers = simplex_grid(k, grid, p_budget)
    out = []
    for roles in itertools.product((0, 1), repeat=k):
        conf = np.array(roles, dtype=float)
        q0 = np.einsum("bk,kij->bij", powers * (1.0 - conf), outer)
        qc = np.einsum("bk,kij->bij", powers * conf, outer)
        r0, rc = covariance_rates_batch(pair, q0, qc)
        out.append(np.column_stack([r0, rc]))
    return np.vstack(out)


def _region_pairs(pair: ChannelPair, f: GsvdFactors, region: RateRegion) -> np.ndarray:
    """Rate pairs of the operating points stored in a GSVD sweep."""
    q0s, qcs = [], []
    for point in region.points:
        solution = point.diagnostics.get("solution")
        alloc = point.diagnostics.get("allocation")
        if solution is None or alloc is None:
            continue
        q0, qc = build_covariances(f, alloc, solution.p0, solution.pc)
        q0s.append(q0)
        qcs.append(qc)
    if not q0s:
        return np.zeros((0, 2))
    r0, rc = covariance_rates_batch(pair, np.array(q0s), np.array(qcs))
    return np.column_stack([r0, rc])


def grid_reference_region(
    pair: ChannelPair,
    p_budget: float,
    grid: int = 100,
    delta: float = 0.1,
    *,
    dictionary: str = "full",
    include: Optional[RateRegion] = None,
    seed: int = 0,
    f: Optional[GsvdFactors] = None,
) -> RateRegion:
    """
    Reference region from an exhaustive dictionary search.

    Args:
        pair: Channel pair with Nt, Nb, Ne <= 2
        p_budget: Total power budget (linear, may be zero)
        grid: Number of power steps across the budget
        delta: Multicast grid step of the returned boundary
        dictionary: ``"full"`` or ``"gsvd"``
        include: GSVD region whose operating points join the search
        seed: Seed for the random directions
        f: Precomputed decomposition of ``pair``

    Raises:
        DimensionTooLarge: If any antenna count exceeds 2
    """
    if max(pair.nt, pair.nb, pair.ne) > MAX_REFERENCE_DIM:
        raise DimensionTooLarge(
            f"grid reference supports at most {MAX_REFERENCE_DIM} antennas per node, "
            f"got nt={pair.nt} nb={pair.nb} ne={pair.ne}"
        )
    if grid < 1:
        raise ValueError("grid must be at least 1")
    f = f if f is not None else gsvd(pair)

    collected = []
    for name, directions in direction_dictionary(pair, f, dictionary, seed):
        collected.append(_direction_pairs(pair, directions, grid, p_budget))
        logger.debug("reference: dictionary entry %s searched", name)
    if include is not None:
        collected.append(_region_pairs(pair, f, include))

    frontier = pareto_frontier(np.vstack(collected))
    points = tuple(RegionPoint(r_ms=r, r_c=rc) for r, rc in frontier_on_grid(frontier, delta))
    logger.info("reference: %d frontier vertices, %d boundary points", len(frontier), len(points))
    return RateRegion(
        label=RegionLabel.GRID_REFERENCE,
        delta=delta,
        p_budget=p_budget,
        points=points,
        diagnostics={"dictionary": dictionary, "grid": grid, "frontier": frontier},
    )
