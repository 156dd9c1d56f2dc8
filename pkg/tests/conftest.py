"""Pytest configuration and shared fixtures."""

import numpy as np
import pytest
from pathlib import Path

from src.algorithms.dc_solver import SubproblemInstance
from src.algorithms.gsvd import ChannelPair, check_feasibility, classify_subchannels, gsvd
from src.utils.data import generate_channels

# Antenna triples (nt, nb, ne) covering every configuration class.
CONFIGURATIONS = {
    "C1": (3, 4, 2),
    "C2": (3, 2, 4),
    "C3": (3, 4, 3),
    "C4": (4, 2, 3),
    "C5": (4, 2, 2),
}


def make_designed_pair(c_sq):
    """Diagonal pair whose subchannel gains are exactly ``c_sq`` and ``1 - c_sq``."""
    c_sq = np.asarray(c_sq, dtype=float)
    return ChannelPair(np.diag(np.sqrt(c_sq)), np.diag(np.sqrt(1.0 - c_sq)))


def find_feasible_seed(nt, nb, ne, start=0):
    """First seed at or after ``start`` whose channel supports both services."""
    for seed in range(start, start + 1000):
        f = gsvd(generate_channels(nt, nb, ne, seed))
        if check_feasibility(f, classify_subchannels(f)).phy_si_feasible:
            return seed
    raise RuntimeError("no feasible seed found")


@pytest.fixture
def designed_pair():
    """Factory for diagonal channel pairs with prescribed gains."""
    return make_designed_pair


@pytest.fixture
def two_cc_pair():
    """One weak and one free common subchannel."""
    return make_designed_pair([0.3, 0.7])


@pytest.fixture
def mixed_pair():
    """Subchannels of every kind: c^2 = 0, 0.2, 0.6, 0.8, 1."""
    return make_designed_pair([0.0, 0.2, 0.6, 0.8, 1.0])


@pytest.fixture
def single_confidential_pair():
    """One subchannel with c^2 = 0.9, d^2 = 0.1."""
    return ChannelPair(np.array([[np.sqrt(0.9)]]), np.array([[np.sqrt(0.1)]]))


@pytest.fixture
def identical_pair():
    """Both receivers see the same 2x2 identity channel."""
    return ChannelPair(np.eye(2), np.eye(2))


@pytest.fixture
def random_instance():
    """Factory for seeded subproblem instances with confidential gains favouring the receiver."""

    def make(seed, m, n, p_budget=100.0, r_ms=0.0):
        rng = np.random.Generator(np.random.Philox(seed))
        c2_conf = rng.uniform(0.55, 0.95, n)
        c2_mult = rng.uniform(0.1, 0.9, m)
        return SubproblemInstance(
            c2_conf=c2_conf,
            d2_conf=1.0 - c2_conf,
            c2_mult=c2_mult,
            d2_mult=1.0 - c2_mult,
            a_conf=rng.uniform(0.5, 2.0, n),
            a_mult=rng.uniform(0.5, 2.0, m),
            p_budget=p_budget,
            r_ms=r_ms,
            pc_ref=np.zeros(n),
        )

    return make


@pytest.fixture
def project_root():
    """Get project root directory."""
    return Path(__file__).parent.parent
