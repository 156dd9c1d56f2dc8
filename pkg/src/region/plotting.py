"""SVG plots of rate-region boundaries."""

from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .regions import RateRegion, RegionLabel  # noqa: E402

# Fixed id salt keeps repeated runs byte-identical.
matplotlib.rcParams["svg.hashsalt"] = "rate-region"

_STYLE = {
    RegionLabel.GSVD: {"color": "tab:blue", "linestyle": "-", "marker": ""},
    RegionLabel.TDMA: {"color": "tab:orange", "linestyle": "--", "marker": ""},
    RegionLabel.GRID_REFERENCE: {"color": "tab:green", "linestyle": ":", "marker": ""},
}


def plot_regions(regions: Sequence[RateRegion], path: Union[str, Path], title: str = "") -> Path:
    """Draw region boundaries (multicast rate on x, secrecy rate on y) into an SVG file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for region in regions:
        if not region.points:
            continue
        ax.plot(region.r_ms, region.r_c, label=region.label.value, **_STYLE[region.label])
    ax.set_xlabel("multicast rate (bits/channel use)")
    ax.set_ylabel("secrecy rate (bits/channel use)")
    ax.set_xlim(left=0)
    ax.set_ylim(bottom=0)
    ax.grid(True, alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
