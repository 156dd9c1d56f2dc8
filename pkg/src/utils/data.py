"""
Channel generation and file input/output.

Channel files are plain text: a header line ``nt nb ne`` followed by the
rows of H1 and then H2, each row holding ``re im`` pairs. Floats are
written with ``repr`` so a save/load round trip is bit-exact.
"""

import hashlib
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
import pandas as pd

from ..algorithms.gsvd import ChannelPair
from ..algorithms.rates import PowerSolution
from ..errors import DimensionMismatch
from ..region.regions import CSV_COLUMNS, RateRegion, RegionLabel, RegionPoint

PathLike = Union[str, Path]


def generate_channels(nt: int, nb: int, ne: int, seed: int) -> ChannelPair:
    """
    Draw an i.i.d. Rayleigh channel pair.

    Entries are (x + i y) / sqrt(2) with x, y standard normal, drawn from a
    Philox generator in the order H1 real, H1 imaginary, H2 real, H2 imaginary.

    Args:
        nt: Transmit antennas
        nb: Authorized receiver antennas
        ne: Unauthorized receiver antennas
        seed: Nonnegative integer seed

    Returns:
        ChannelPair
    """
    if min(nt, nb, ne) < 1:
        raise DimensionMismatch("antenna counts must be positive")
    rng = np.random.Generator(np.random.Philox(seed))
    h1 = (rng.standard_normal((nb, nt)) + 1j * rng.standard_normal((nb, nt))) / np.sqrt(2.0)
    h2 = (rng.standard_normal((ne, nt)) + 1j * rng.standard_normal((ne, nt))) / np.sqrt(2.0)
    return ChannelPair(h1, h2)


def trial_seed(seed: int, trial: int) -> int:
    """Seed of trial ``trial`` in an experiment seeded with ``seed``."""
    return (seed + trial) % 2**64


def _format_row(row: np.ndarray) -> str:
    return " ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in row)


def save_channel_pair(pair: ChannelPair, path: PathLike) -> Path:
    """Write a channel pair in the text matrix format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{pair.nt} {pair.nb} {pair.ne}"]
    lines.extend(_format_row(row) for row in pair.h1)
    lines.extend(_format_row(row) for row in pair.h2)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _parse_row(line: str, nt: int, lineno: int) -> np.ndarray:
    try:
        values = [float(tok) for tok in line.split()]
    except ValueError as exc:
        raise DimensionMismatch(f"line {lineno}: non-numeric entry ({exc})") from exc
    if len(values) != 2 * nt:
        raise DimensionMismatch(f"line {lineno}: expected {2 * nt} numbers, got {len(values)}")
    pairs = np.array(values).reshape(nt, 2)
    return pairs[:, 0] + 1j * pairs[:, 1]


def load_channel_pair(path: PathLike) -> ChannelPair:
    """
    Read a channel pair from the text matrix format.

    Blank lines and lines starting with ``#`` are ignored.

    Raises:
        FileNotFoundError: If the file doesn't exist
        DimensionMismatch: If the header and the rows disagree
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Channel file not found: {path}")

    lines = [
        (i + 1, line.strip())
        for i, line in enumerate(path.read_text(encoding="utf-8").splitlines())
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not lines:
        raise DimensionMismatch(f"{path} is empty")

    header_no, header = lines[0]
    try:
        nt, nb, ne = (int(tok) for tok in header.split())
    except ValueError as exc:
        raise DimensionMismatch(f"line {header_no}: header must be 'nt nb ne'") from exc
    if min(nt, nb, ne) < 1:
        raise DimensionMismatch(f"line {header_no}: antenna counts must be positive")

    rows = lines[1:]
    if len(rows) != nb + ne:
        raise DimensionMismatch(f"{path}: expected {nb + ne} matrix rows, got {len(rows)}")
    parsed = [_parse_row(line, nt, lineno) for lineno, line in rows]
    return ChannelPair(np.array(parsed[:nb]), np.array(parsed[nb:]))


def channel_pair_from_rows(h1_rows: List[List[List[float]]], h2_rows: List[List[List[float]]]) -> ChannelPair:
    """Build a pair from nested ``[re, im]`` lists as used in JSON configs."""
    def to_matrix(rows):
        arr = np.array(rows, dtype=float)
        return arr[..., 0] + 1j * arr[..., 1]

    return ChannelPair(to_matrix(h1_rows), to_matrix(h2_rows))


def write_region_csv(region: RateRegion, path: PathLike) -> Path:
    """Write a region boundary as CSV with columns r_ms, r_c, scheme_id, iterations, feasible_schemes_remaining."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    region.to_frame().to_csv(path, index=False)
    return path


def read_region_csv(path: PathLike, label: RegionLabel, delta: float, p_budget: float) -> RateRegion:
    """
    Load a boundary written by ``write_region_csv``.

    Raises:
        FileNotFoundError: If the file doesn't exist
        ValueError: If required columns are missing
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"CSV file not found: {path}")
    df = pd.read_csv(path)
    for col in CSV_COLUMNS:
        if col not in df.columns:
            raise ValueError(f"CSV must have a '{col}' column")
    points = tuple(
        RegionPoint(
            r_ms=float(row.r_ms),
            r_c=float(row.r_c),
            scheme_id=int(row.scheme_id),
            iterations=int(row.iterations),
            feasible_schemes_remaining=int(row.feasible_schemes_remaining),
        )
        for row in df.itertuples(index=False)
    )
    return RateRegion(label=label, delta=delta, p_budget=p_budget, points=points)


def write_trace_csv(solution: PowerSolution, path: PathLike) -> Path:
    """Dump the per-iteration DC trace of a solution."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = pd.DataFrame(
        [
            {
                "iteration": it.iteration,
                "true_objective": it.true_objective,
                "surrogate_objective": it.surrogate_objective,
                "step_norm": it.step_norm,
                "newton_steps": it.newton_steps,
            }
            for it in solution.trace
        ],
        columns=["iteration", "true_objective", "surrogate_objective", "step_norm", "newton_steps"],
    )
    df.to_csv(path, index=False)
    return path


def sha256_file(path: PathLike, chunk_size: int = 1 << 16) -> str:
    """Hex SHA-256 digest of a file."""
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(chunk_size), b""):
            digest.update(chunk)
    return digest.hexdigest()


def resolve_channels(
    nt: Optional[int], nb: Optional[int], ne: Optional[int], seed: int, source: Optional[PathLike] = None
) -> ChannelPair:
    """
    Channels from a file when ``source`` is given, otherwise generated from ``seed``.

    A file sets its own dimensions; counts given as ``None`` are not checked.

    Raises:
        DimensionMismatch: If a loaded pair contradicts a requested count
        ValueError: If a count is missing for generated channels
    """
    if source is None or str(source) == "generated":
        if None in (nt, nb, ne):
            raise ValueError("generated channels need nt, nb and ne")
        return generate_channels(nt, nb, ne, seed)
    pair = load_channel_pair(source)
    found = (pair.nt, pair.nb, pair.ne)
    if any(want is not None and want != got for want, got in zip((nt, nb, ne), found)):
        nt, nb, ne = (got if want is None else want for want, got in zip((nt, nb, ne), found))
        raise DimensionMismatch(
            f"{source} holds a {pair.nt}x{pair.nb}x{pair.ne} pair, expected {nt}x{nb}x{ne}"
        )
    return pair
