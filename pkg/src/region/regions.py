"""
Rate-region containers and comparisons.

A region boundary is stored as points (r_ms, r_c) on a uniform multicast
grid r_ms = k * delta, k = 0, 1, ...
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

CSV_COLUMNS = ["r_ms", "r_c", "scheme_id", "iterations", "feasible_schemes_remaining"]


class RegionLabel(str, Enum):
    GSVD = "gsvd"
    TDMA = "tdma"
    GRID_REFERENCE = "grid_reference"


@dataclass(frozen=True)
class RegionPoint:
    r_ms: float
    r_c: float
    scheme_id: int = -1
    iterations: int = 0
    feasible_schemes_remaining: int = 0
    diagnostics: Dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class RateRegion:
    """Boundary of an achievable (multicast, confidential) rate region."""

    label: RegionLabel
    delta: float
    p_budget: float
    points: Tuple[RegionPoint, ...]
    diagnostics: Dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def r_ms(self) -> np.ndarray:
        return np.array([p.r_ms for p in self.points])

    @property
    def r_c(self) -> np.ndarray:
        return np.array([p.r_c for p in self.points])

    def grid_index(self, r_ms: float) -> int:
        return int(round(r_ms / self.delta))

    def lookup(self) -> Dict[int, float]:
        """Boundary values keyed by grid index."""
        return {self.grid_index(p.r_ms): p.r_c for p in self.points}

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "r_ms": p.r_ms,
                "r_c": p.r_c,
                "scheme_id": p.scheme_id,
                "iterations": p.iterations,
                "feasible_schemes_remaining": p.feasible_schemes_remaining,
            }
            for p in self.points
        ]
        return pd.DataFrame(rows, columns=CSV_COLUMNS)


@dataclass(frozen=True)
class DominanceReport:
    holds: bool
    compared: int
    strict_interior: int
    worst_margin: float


def dominates(upper: RateRegion, lower: RateRegion, slack: float = 1e-9, strict_tol: float = 1e-6) -> DominanceReport:
    """
    Compare two boundaries on their common grid points.

    ``upper`` dominates when its r_c is at least the r_c of ``lower`` minus
    ``slack`` wherever both have a point. Grid points of ``lower`` beyond the
    range of ``upper`` count as violations. Strict wins are counted on the
    interior points of ``lower`` (neither first nor last).
    """
    if not np.isclose(upper.delta, lower.delta):
        raise ValueError("regions use different multicast grids")
    up = upper.lookup()
    low = lower.lookup()
    keys = sorted(low)
    interior = set(keys[1:-1])

    holds = True
    strict = 0
    worst = np.inf
    for k in keys:
        if k not in up:
            if low[k] > slack:
                holds = False
                worst = min(worst, -low[k])
            continue
        margin = up[k] - low[k]
        worst = min(worst, margin)
        if margin < -slack:
            holds = False
        if k in interior and margin > strict_tol:
            strict += 1
    return DominanceReport(holds=holds, compared=len(keys), strict_interior=strict, worst_margin=float(worst))


def switching_points(region: RateRegion) -> List[float]:
    """Multicast rates at which the winning scheme changes."""
    out = []
    for prev, cur in zip(region.points, region.points[1:]):
        if cur.scheme_id != prev.scheme_id:
            out.append(cur.r_ms)
    return out


def region_gap(inner: RateRegion, outer: RateRegion) -> float:
    """Confidential-rate gap at zero multicast rate, ``outer - inner``."""
    if not inner.points or not outer.points:
        raise ValueError("both regions need at least one point")
    return float(outer.points[0].r_c - inner.points[0].r_c)


def upper_concave_hull(points: Sequence[Tuple[float, float]]) -> np.ndarray:
    """Vertices of the upper concave hull, sorted by the first coordinate."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    hull: List[Tuple[float, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # Drop the middle vertex when it lies on or below the chord.
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return np.array(hull)


def time_sharing_envelope(region: RateRegion, endpoint: Optional[Tuple[float, float]] = None) -> RateRegion:
    """
    Boundary reachable by time sharing between stored operating points.

    ``endpoint`` adds an extra achievable pair, typically the largest
    multicast rate with zero confidential rate.
    """
    pairs = [(p.r_ms, p.r_c) for p in region.points]
    if endpoint is not None:
        pairs.append(endpoint)
    if not pairs:
        return region
    hull = upper_concave_hull(pairs)
    last = int(np.floor(hull[-1, 0] / region.delta + 1e-9))
    grid = np.arange(last + 1) * region.delta
    values = np.interp(grid, hull[:, 0], hull[:, 1])
    points = tuple(RegionPoint(r_ms=float(r), r_c=max(0.0, float(v))) for r, v in zip(grid, values))
    return RateRegion(
        label=region.label,
        delta=region.delta,
        p_budget=region.p_budget,
        points=points,
        diagnostics={"envelope_of": region.label.value},
    )


def pareto_frontier(pairs: np.ndarray) -> np.ndarray:
    """
    Nondominated rows of an (n, 2) array of (r0, rc) pairs, maximizing both.

    Returns:
        Frontier sorted by increasing r0
    """
    pairs = np.asarray(pairs, dtype=float)
    if pairs.size == 0:
        return pairs.reshape(0, 2)
    order = np.lexsort((-pairs[:, 1], -pairs[:, 0]))
    frontier = []
    best_rc = -np.inf
    for i in order:
        if pairs[i, 1] > best_rc:
            frontier.append(pairs[i])
            best_rc = pairs[i, 1]
    return np.array(frontier[::-1])


def frontier_on_grid(frontier: np.ndarray, delta: float, slack: float = 1e-9) -> List[Tuple[float, float]]:
    """Sample max{rc : r0 >= r_ms} on the grid r_ms = k * delta."""
    if frontier.size == 0:
        return []
    out = []
    k = 0
    while True:
        r = k * delta
        ok = frontier[:, 0] >= r - slack
        if not np.any(ok):
            break
        out.append((r, max(0.0, float(np.max(frontier[ok, 1])))))
        k += 1
    return out
