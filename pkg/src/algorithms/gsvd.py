"""
Generalized singular value decomposition of a two-receiver channel pair.

For channels H1 (Nb x Nt) and H2 (Ne x Nt) the decomposition finds
unitary Psi_r, Psi_e and an invertible precoder A with

    H1 A = Psi_r C,    H2 A = Psi_e D,    C^T C + D^T D = I_q,

so that both receivers see the same set of q = min(Nt, Nb + Ne)
independent subchannels with squared gains c_i^2 and d_i^2 = 1 - c_i^2.
Subchannels are ordered by nondecreasing c_i^2.

The factorization follows the QR + cosine-sine route: QR of the stacked
channel, then an SVD of the upper block of Q.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np
import scipy.linalg

from ..errors import DimensionMismatch, RankDeficient

logger = logging.getLogger(__name__)

RANK_TOL = 1e-12
# Subchannel amplitudes at or below this are exact zeros.
ZERO_GAIN = 1e-10
DEFAULT_CLASSIFY_TOL = 1e-9
# c^2 - d^2 must exceed this for confidential service.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class ChannelPair:
    """Channel matrices from the transmitter to both receivers."""

    h1: np.ndarray
    h2: np.ndarray

    def __post_init__(self):
        h1 = np.array(self.h1, dtype=np.complex128)
        h2 = np.array(self.h2, dtype=np.complex128)
        if h1.ndim != 2 or h2.ndim != 2:
            raise DimensionMismatch("channel matrices must be two-dimensional")
        if h1.shape[1] != h2.shape[1]:
            raise DimensionMismatch(
                f"transmit dimensions differ: H1 has {h1.shape[1]} columns, H2 has {h2.shape[1]}"
            )
        if 0 in h1.shape or 0 in h2.shape:
            raise DimensionMismatch("channel matrices must be non-empty")
        if not (np.all(np.isfinite(h1)) and np.all(np.isfinite(h2))):
            raise DimensionMismatch("channel matrices must be finite")
        h1.setflags(write=False)
        h2.setflags(write=False)
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", h2)

    @property
    def nt(self) -> int:
        return self.h1.shape[1]

    @property
    def nb(self) -> int:
        return self.h1.shape[0]

    @property
    def ne(self) -> int:
        return self.h2.shape[0]

    @property
    def q(self) -> int:
        return min(self.nt, self.nb + self.ne)


@dataclass(frozen=True)
class GsvdFactors:
    """
    Result of the decomposition.

    ``c_mat`` (Nb x q) and ``d_mat`` (Ne x q) are the rectangular gain
    matrices: column i holds c_i (resp. d_i) in the row of Psi_r (resp.
    Psi_e) paired with subchannel i, and is zero when that gain is zero.
    """

    psi_r: np.ndarray
    psi_e: np.ndarray
    c_diag: np.ndarray
    d_diag: np.ndarray
    a: np.ndarray
    c_mat: np.ndarray
    d_mat: np.ndarray

    @property
    def q(self) -> int:
        return self.c_diag.size

    @property
    def c_sq(self) -> np.ndarray:
        return self.c_diag**2

    @property
    def d_sq(self) -> np.ndarray:
        return self.d_diag**2

    @property
    def a_col_norm_sq(self) -> np.ndarray:
        return np.sum(np.abs(self.a) ** 2, axis=0)


@dataclass(frozen=True)
class SubchannelPartition:
    """Indices of common (CC), receiver-only (PC1) and eavesdropper-only (PC2) subchannels."""

    cc: Tuple[int, ...]
    pc1: Tuple[int, ...]
    pc2: Tuple[int, ...]
    tol: float = DEFAULT_CLASSIFY_TOL

    @property
    def counts(self) -> Tuple[int, int, int]:
        return len(self.cc), len(self.pc1), len(self.pc2)


@dataclass(frozen=True)
class FeasibilityReport:
    multicast_infeasible: bool
    confidential_infeasible: bool

    @property
    def phy_si_feasible(self) -> bool:
        return not (self.multicast_infeasible or self.confidential_infeasible)

    def describe(self) -> str:
        if self.phy_si_feasible:
            return "both services can be integrated"
        reasons = []
        if self.multicast_infeasible:
            reasons.append("no common subchannel can carry the multicast message")
        if self.confidential_infeasible:
            reasons.append("no subchannel favours the authorized receiver")
        return "; ".join(reasons)


@dataclass(frozen=True)
class TableRow:
    """Generic subchannel counts for an antenna configuration."""

    labels: Tuple[str, ...]
    cc: int
    pc1: int
    pc2: int

    @property
    def label(self) -> str:
        return "/".join(self.labels) if self.labels else "-"

    @property
    def counts(self) -> Tuple[int, int, int]:
        return self.cc, self.pc1, self.pc2


def _unitary_from_columns(w: np.ndarray, amp: np.ndarray, rows: int) -> Tuple[np.ndarray, List[int]]:
    """Orthonormal basis whose leading columns match the nonzero-gain columns of ``w``."""
    nonzero = [i for i in range(amp.size) if amp[i] > 0]
    if len(nonzero) > rows:
        raise RankDeficient(
            f"{len(nonzero)} nonzero gains cannot fit in a {rows}-dimensional receive space"
        )
    if not nonzero:
        return np.eye(rows, dtype=np.complex128), nonzero

    normalized = w[:, nonzero] / amp[nonzero]
    # Nearest matrix with orthonormal columns.
    basis, _ = scipy.linalg.polar(normalized)
    complement = scipy.linalg.null_space(basis.conj().T)
    return np.hstack([basis, complement]), nonzero


def _gain_matrix(amp: np.ndarray, nonzero: List[int], rows: int) -> np.ndarray:
    mat = np.zeros((rows, amp.size))
    for row, col in enumerate(nonzero):
        mat[row, col] = amp[col]
    return mat


def _fix_phases(psi: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real and nonnegative."""
    phases = np.ones(psi.shape[1], dtype=np.complex128)
    for j in range(psi.shape[1]):
        col = psi[:, j]
        pivot = col[np.argmax(np.abs(col))]
        if abs(pivot) > 0:
            phases[j] = np.conj(pivot) / abs(pivot)
    return phases


def gsvd(pair: ChannelPair, rank_tol: float = RANK_TOL) -> GsvdFactors:
    """
    Decompose a channel pair into parallel subchannels.

    Args:
        pair: Channel matrices H1, H2 sharing the transmit dimension
        rank_tol: Relative singular-value threshold for the rank test

    Returns:
        GsvdFactors with subchannels in nondecreasing order of c_i^2

    Raises:
        RankDeficient: If [H1; H2] does not have rank q
    """
    nb, ne, nt, q = pair.nb, pair.ne, pair.nt, pair.q
    g = np.vstack([pair.h1, pair.h2])

    sv = scipy.linalg.svdvals(g)
    if sv.size == 0 or sv[0] == 0:
        raise RankDeficient("stacked channel matrix is zero")
    rank = int(np.sum(sv > rank_tol * sv[0]))
    if rank < q:
        raise RankDeficient(f"stacked channel matrix has rank {rank}, expected {q}")

    qmat, r = scipy.linalg.qr(g, mode="economic")
    q1, q2 = qmat[:nb], qmat[nb:]

    _, sigma, vh = scipy.linalg.svd(q1, full_matrices=True)
    c_amp = np.zeros(q)
    c_amp[: sigma.size] = np.clip(sigma, 0.0, 1.0)
    # Ascending c; ties keep their SVD order.
    order = np.argsort(c_amp[::-1], kind="stable")
    z = vh.conj().T[:, ::-1][:, order]
    c_amp = c_amp[::-1][order]

    w1 = q1 @ z
    w2 = q2 @ z
    d_amp = np.clip(np.linalg.norm(w2, axis=0), 0.0, 1.0)

    c_zero = c_amp <= ZERO_GAIN
    d_zero = d_amp <= ZERO_GAIN
    c_amp[c_zero] = 0.0
    d_amp[c_zero] = 1.0
    d_amp[d_zero] = 0.0
    c_amp[d_zero] = 1.0
    # Rounding can break the ordering by a few ulps.
    d_amp = np.minimum.accumulate(d_amp)

    psi_r, nz_r = _unitary_from_columns(w1, c_amp, nb)
    psi_e, nz_e = _unitary_from_columns(w2, d_amp, ne)

    if q == nt:
        a = scipy.linalg.solve_triangular(r, z)
    else:
        a = scipy.linalg.lstsq(r, z)[0]

    # Pin the phase of each subchannel on its receiver-side column.
    pos_r = {col: row for row, col in enumerate(nz_r)}
    pos_e = {col: row for row, col in enumerate(nz_e)}
    col_phase_r = _fix_phases(psi_r)
    col_phase_e = _fix_phases(psi_e)
    for i in range(q):
        if i in pos_r:
            phase = col_phase_r[pos_r[i]]
        else:
            phase = col_phase_e[pos_e[i]]
        a[:, i] *= phase
        if i in pos_r:
            psi_r[:, pos_r[i]] *= phase
        if i in pos_e:
            psi_e[:, pos_e[i]] *= phase
    for j in range(len(nz_r), nb):
        psi_r[:, j] *= col_phase_r[j]
    for j in range(len(nz_e), ne):
        psi_e[:, j] *= col_phase_e[j]

    logger.debug("gsvd: nt=%d nb=%d ne=%d c^2=%s", nt, nb, ne, np.round(c_amp**2, 6))

    return GsvdFactors(
        psi_r=psi_r,
        psi_e=psi_e,
        c_diag=c_amp,
        d_diag=d_amp,
        a=a,
        c_mat=_gain_matrix(c_amp, nz_r, nb),
        d_mat=_gain_matrix(d_amp, nz_e, ne),
    )


def classify_subchannels(f: GsvdFactors, tol: float = DEFAULT_CLASSIFY_TOL) -> SubchannelPartition:
    """
    Partition subchannels by which receivers can hear them.

    Args:
        f: Decomposition result
        tol: Gains within ``tol`` of 0 or 1 count as private

    Returns:
        SubchannelPartition with ascending index tuples
    """
    if not 0 < tol < 0.5:
        raise ValueError(f"tol must lie in (0, 0.5), got {tol}")
    cc, pc1, pc2 = [], [], []
    for i, (c2, d2) in enumerate(zip(f.c_sq, f.d_sq)):
        if c2 >= 1.0 - tol:
            pc1.append(i)
        elif d2 >= 1.0 - tol:
            pc2.append(i)
        else:
            cc.append(i)
    return SubchannelPartition(tuple(cc), tuple(pc1), tuple(pc2), tol)


def check_feasibility(f: GsvdFactors, part: SubchannelPartition) -> FeasibilityReport:
    """Decide whether multicast and confidential service can share the channel."""
    diff = f.c_sq - f.d_sq
    return FeasibilityReport(
        multicast_infeasible=len(part.cc) == 0,
        confidential_infeasible=not bool(np.any(diff > TIE_TOL)),
    )


# Generic counts per configuration class: (condition, (cc, pc1, pc2)).
_TABLE = {
    "C1": (lambda nt, nb, ne: nt < nb and ne <= nt, lambda nt, nb, ne: (ne, nt - ne, 0)),
    "C2": (lambda nt, nb, ne: nt >= nb and ne > nt, lambda nt, nb, ne: (nb, 0, nt - nb)),
    "C3": (lambda nt, nb, ne: nt <= nb and ne >= nt, lambda nt, nb, ne: (nt, 0, 0)),
    "C4": (
        lambda nt, nb, ne: nb < nt and ne < nt and nb + ne > nt,
        lambda nt, nb, ne: (nb + ne - nt, nt - ne, nt - nb),
    ),
    "C5": (lambda nt, nb, ne: nb + ne <= nt, lambda nt, nb, ne: (0, nb, ne)),
}


def expected_counts(nt: int, nb: int, ne: int) -> TableRow:
    """
    Subchannel counts a generic channel of these dimensions produces.

    Counts come from the ranks of the two receive spaces; labels name the
    configuration classes whose conditions hold, or, on class boundaries
    that no condition covers, the classes whose counts agree.
    """
    if min(nt, nb, ne) < 1:
        raise DimensionMismatch("antenna counts must be positive")
    q = min(nt, nb + ne)
    pc2 = q - min(nb, q)
    pc1 = q - min(ne, q)
    cc = q - pc1 - pc2
    labels = tuple(name for name, (cond, _) in _TABLE.items() if cond(nt, nb, ne))
    if not labels:
        labels = tuple(
            name for name, (_, counts) in _TABLE.items() if counts(nt, nb, ne) == (cc, pc1, pc2)
        )
    return TableRow(labels=labels, cc=cc, pc1=pc1, pc2=pc2)


def generalized_singular_values(f: GsvdFactors) -> np.ndarray:
    """Ratios c_i / d_i, ``inf`` where d_i is zero."""
    with np.errstate(divide="ignore"):
        return np.where(f.d_diag > 0, f.c_diag / np.where(f.d_diag > 0, f.d_diag, 1.0), np.inf)


def reconstruction_residuals(pair: ChannelPair, f: GsvdFactors) -> Dict[str, float]:
    """Relative Frobenius residuals of both factorizations and of the gain identity."""
    def rel(x: np.ndarray, ref: np.ndarray) -> float:
        return float(np.linalg.norm(x) / max(np.linalg.norm(ref), np.finfo(float).tiny))

    eye_r = np.eye(pair.nb)
    eye_e = np.eye(pair.ne)
    return {
        "h1": rel(pair.h1 @ f.a - f.psi_r @ f.c_mat, pair.h1),
        "h2": rel(pair.h2 @ f.a - f.psi_e @ f.d_mat, pair.h2),
        "psi_r_unitarity": float(np.linalg.norm(f.psi_r.conj().T @ f.psi_r - eye_r)),
        "psi_e_unitarity": float(np.linalg.norm(f.psi_e.conj().T @ f.psi_e - eye_e)),
        "gain_identity": float(np.max(np.abs(f.c_sq + f.d_sq - 1.0))),
    }
