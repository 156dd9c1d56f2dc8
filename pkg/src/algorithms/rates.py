"""
Achievable rates of the integrated multicast/confidential transmission.

Rates are in bits per channel use. Subchannel-form rates work on the GSVD
gains directly; ``covariance_rates`` evaluates the same quantities from
transmit covariance matrices and serves as an independent check.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..errors import DimensionMismatch, NotPSD
from .gsvd import ChannelPair, GsvdFactors

logger = logging.getLogger(__name__)

# Rates below this print as zero.
RATE_EPS = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True)
class MessageAllocation:
    """Assignment of subchannel indices to the multicast (gamma0) or confidential (gammac) message."""

    gamma0: Tuple[int, ...]
    gammac: Tuple[int, ...]
    discarded: Tuple[int, ...] = ()

    def validate(self, q: int) -> None:
        """
        Check that the three index sets partition ``range(q)``.

        Raises:
            DimensionMismatch: On overlap, gaps or out-of-range indices
        """
        seen = list(self.gamma0) + list(self.gammac) + list(self.discarded)
        if sorted(seen) != list(range(q)):
            raise DimensionMismatch(
                f"allocation {self.gamma0}/{self.gammac}/{self.discarded} does not partition {q} subchannels"
            )


@dataclass(frozen=True)
class DcIterate:
    """One DC step: true and surrogate objective after the step."""

    iteration: int
    true_objective: float
    surrogate_objective: float
    step_norm: float
    newton_steps: int


@dataclass(frozen=True)
class PowerSolution:
    """Powers on the gamma0 and gammac subchannels with the rates they achieve."""

    p0: np.ndarray
    pc: np.ndarray
    secrecy_rate: float
    multicast_rate_1: float
    multicast_rate_2: float
    total_power: float
    iterations: int = 0
    converged: bool = True
    kkt_residual: float = 0.0
    newton_steps: int = 0
    trace: Tuple[DcIterate, ...] = field(default_factory=tuple)

    @property
    def multicast_rate(self) -> float:
        return min(self.multicast_rate_1, self.multicast_rate_2)


def clean_rate(rate: float) -> float:
    """Snap rates within RATE_EPS of zero to exactly zero."""
    return 0.0 if abs(rate) < RATE_EPS else float(rate)


def _check_powers(p: np.ndarray, size: int, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size != size:
        raise DimensionMismatch(f"{name} has {p.size} entries, expected {size}")
    return p


def sum_log2(p: np.ndarray, gains: np.ndarray) -> float:
    """Sum of log2(1 + p_i g_i)."""
    return float(np.sum(np.log2(1.0 + p * gains)))


def secrecy_rate(f: GsvdFactors, alloc: MessageAllocation, pc: np.ndarray) -> float:
    """
    Confidential rate over the gammac subchannels.

    Args:
        f: Decomposition result
        alloc: Message allocation
        pc: Powers aligned with ``alloc.gammac``

    Returns:
        sum log2(1 + pc c^2) - sum log2(1 + pc d^2), may be negative
    """
    idx = list(alloc.gammac)
    pc = _check_powers(pc, len(idx), "pc")
    return sum_log2(pc, f.c_sq[idx]) - sum_log2(pc, f.d_sq[idx])


def multicast_rates(f: GsvdFactors, alloc: MessageAllocation, p0: np.ndarray) -> Tuple[float, float]:
    """Multicast rates at the authorized and unauthorized receiver."""
    idx = list(alloc.gamma0)
    p0 = _check_powers(p0, len(idx), "p0")
    return sum_log2(p0, f.c_sq[idx]), sum_log2(p0, f.d_sq[idx])


def total_power(f: GsvdFactors, alloc: MessageAllocation, p0: np.ndarray, pc: np.ndarray) -> float:
    """Transmit power tr(A E P E^H A^H) of both messages."""
    norms = f.a_col_norm_sq
    p0 = _check_powers(p0, len(alloc.gamma0), "p0")
    pc = _check_powers(pc, len(alloc.gammac), "pc")
    return float(np.dot(norms[list(alloc.gamma0)], p0) + np.dot(norms[list(alloc.gammac)], pc))


def build_covariances(
    f: GsvdFactors, alloc: MessageAllocation, p0: np.ndarray, pc: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Transmit covariances (Q0, Qc) of a GSVD power allocation."""
    p0 = _check_powers(p0, len(alloc.gamma0), "p0")
    pc = _check_powers(pc, len(alloc.gammac), "pc")
    a0 = f.a[:, list(alloc.gamma0)]
    ac = f.a[:, list(alloc.gammac)]
    q0 = (a0 * p0) @ a0.conj().T
    qc = (ac * pc) @ ac.conj().T
    return q0, qc


def _check_psd(q: np.ndarray, nt: int, name: str) -> None:
    q = np.asarray(q)
    if q.shape[-2:] != (nt, nt):
        raise DimensionMismatch(f"{name} must be {nt}x{nt}, got {q.shape[-2:]}")
    scale = max(1.0, float(np.max(np.abs(q))) if q.size else 1.0)
    if np.max(np.abs(q - np.conj(np.swapaxes(q, -1, -2)))) > PSD_TOL * scale:
        raise NotPSD(f"{name} is not Hermitian")
    herm = 0.5 * (q + np.conj(np.swapaxes(q, -1, -2)))
    min_eig = np.linalg.eigvalsh(herm)[..., 0]
    trace = np.real(np.trace(herm, axis1=-2, axis2=-1))
    if np.any(min_eig < -PSD_TOL * np.maximum(trace, 1.0) / nt):
        raise NotPSD(f"{name} has a negative eigenvalue ({float(np.min(min_eig)):.3e})")


def _log2det(h: np.ndarray, q: np.ndarray) -> np.ndarray:
    eye = np.eye(h.shape[0])
    _, logabs = np.linalg.slogdet(eye + h @ q @ h.conj().T)
    return logabs / np.log(2.0)


def covariance_rates_batch(pair: ChannelPair, q0: np.ndarray, qc: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized ``covariance_rates`` over stacks of covariance pairs.

    Args:
        pair: Channel pair
        q0: Multicast covariances, shape (..., Nt, Nt)
        qc: Confidential covariances, same shape as ``q0``

    Returns:
        (multicast bound, confidential rate) arrays of shape ``q0.shape[:-2]``
    """
    q0 = np.asarray(q0, dtype=np.complex128)
    qc = np.asarray(qc, dtype=np.complex128)
    if q0.shape != qc.shape:
        raise DimensionMismatch(f"covariance stacks differ in shape: {q0.shape} vs {qc.shape}")
    _check_psd(q0, pair.nt, "Q0")
    _check_psd(qc, pair.nt, "Qc")

    r0 = None
    for h in (pair.h1, pair.h2):
        rk = _log2det(h, q0 + qc) - _log2det(h, qc)
        r0 = rk if r0 is None else np.minimum(r0, rk)
    rc = _log2det(pair.h1, qc) - _log2det(pair.h2, qc)
    return r0, rc


def covariance_rates(pair: ChannelPair, q0: np.ndarray, qc: np.ndarray) -> Tuple[float, float]:
    """
    Rates of a general covariance pair.

    The multicast bound treats the confidential stream as interference at
    both receivers; the confidential rate is the log-det secrecy expression.

    Raises:
        NotPSD: If either covariance is not Hermitian PSD
        DimensionMismatch: If a covariance is not Nt x Nt
    """
    r0, rc = covariance_rates_batch(pair, q0, qc)
    return float(r0), float(rc)


def evaluate_allocation(
    f: GsvdFactors, alloc: MessageAllocation, p0: np.ndarray, pc: np.ndarray
) -> PowerSolution:
    """Package a power allocation with the rates it achieves."""
    r1, r2 = multicast_rates(f, alloc, p0)
    return PowerSolution(
        p0=np.asarray(p0, dtype=float),
        pc=np.asarray(pc, dtype=float),
        secrecy_rate=secrecy_rate(f, alloc, pc),
        multicast_rate_1=r1,
        multicast_rate_2=r2,
        total_power=total_power(f, alloc, p0, pc),
    )


def format_rates(solution: PowerSolution, alloc: Optional[MessageAllocation] = None) -> str:
    """
    Format a solution for display.

    Args:
        solution: Power solution to print
        alloc: Optional allocation whose index sets are printed too

    Returns:
        Multi-line human-readable string
    """
    lines = []
    if alloc is not None:
        lines.append(f"gamma0:           {list(alloc.gamma0)}")
        lines.append(f"gammac:           {list(alloc.gammac)}")
        lines.append(f"discarded:        {list(alloc.discarded)}")
    lines.append(f"Secrecy rate:     {clean_rate(solution.secrecy_rate):.6f} bits")
    lines.append(f"Multicast rate:   {clean_rate(solution.multicast_rate):.6f} bits")
    lines.append(f"  receiver 1:     {clean_rate(solution.multicast_rate_1):.6f} bits")
    lines.append(f"  receiver 2:     {clean_rate(solution.multicast_rate_2):.6f} bits")
    lines.append(f"Total power:      {solution.total_power:.6f}")
    lines.append(f"p0:               {np.array2string(solution.p0, precision=6)}")
    lines.append(f"pc:               {np.array2string(solution.pc, precision=6)}")
    if solution.iterations:
        status = "converged" if solution.converged else "iteration limit"
        lines.append(f"DC iterations:    {solution.iterations} ({status})")
        lines.append(f"KKT residual:     {solution.kkt_residual:.3e}")
    return "\n".join(lines)


def solution_summary(solution: PowerSolution) -> Dict[str, float]:
    """Flat dictionary of the headline numbers."""
    return {
        "secrecy_rate": clean_rate(solution.secrecy_rate),
        "multicast_rate": clean_rate(solution.multicast_rate),
        "total_power": solution.total_power,
        "iterations": solution.iterations,
        "kkt_residual": solution.kkt_residual,
    }
