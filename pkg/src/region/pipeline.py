"""
Experiment orchestration.

Runs the GSVD sweep, the TDMA baseline and (for small antenna counts)
the grid reference for every trial of a configuration, writes one CSV
per region and an SVG plot per trial, and records everything in a
manifest with SHA-256 digests of the produced files.
"""

import json
import logging
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import matplotlib
import numpy as np
import pandas as pd
import pydantic
import scipy

from ..algorithms.gsvd import ChannelPair, classify_subchannels, expected_counts, gsvd
from ..algorithms.rates import solution_summary
from ..algorithms.dc_solver import dc_solve_multistart
from ..errors import ConfigError, PhySiError
from ..utils.config import ExperimentConfig
from ..utils.data import (
    channel_pair_from_rows,
    resolve_channels,
    save_channel_pair,
    sha256_file,
    trial_seed,
    write_region_csv,
)
from .baseline import tdma_baseline
from .plotting import plot_regions
from .reference import MAX_REFERENCE_DIM, grid_reference_region
from .regions import region_gap, switching_points
from .sweep import sweep_region

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
# Exit code of unreadable channel files and invalid inputs, as for ConfigError.
INPUT_ERROR_CODE = ConfigError.exit_code


@dataclass
class TrialResult:
    trial: int
    seed: int
    files: Dict[str, str] = field(default_factory=dict)
    summary: Dict = field(default_factory=dict)
    error: Optional[str] = None
    exit_code: int = 0
    wall_time: float = 0.0


@dataclass
class ExperimentResult:
    manifest_path: Path
    trials: List[TrialResult]

    @property
    def exit_code(self) -> int:
        codes = [t.exit_code for t in self.trials if t.exit_code]
        return max(codes) if codes else 0


class ExperimentPipeline:
    """
    Region experiment over one or more seeded trials.

    Args:
        config: Validated experiment configuration
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.output_dir = Path(config.output_dir)

    def channels_for(self, trial: int) -> ChannelPair:
        cfg = self.config
        if cfg.channels is not None:
            return channel_pair_from_rows(cfg.channels.h1, cfg.channels.h2)
        source = None if cfg.channel_source == "generated" else cfg.channel_source
        return resolve_channels(cfg.nt, cfg.nb, cfg.ne, trial_seed(cfg.seed, trial), source)

    def run_trial(self, trial: int) -> TrialResult:
        """Compute and write every region of one trial; errors are recorded, not raised."""
        cfg = self.config
        seed = trial_seed(cfg.seed, trial)
        result = TrialResult(trial=trial, seed=seed)
        started = time.perf_counter()
        try:
            self._run_trial(trial, result)
        except PhySiError as exc:
            logger.error("trial %d failed: %s", trial, exc)
            result.error = f"{type(exc).__name__}: {exc}"
            result.exit_code = exc.exit_code
        except (OSError, ValueError) as exc:
            logger.error("trial %d failed on its input: %s", trial, exc)
            result.error = f"{type(exc).__name__}: {exc}"
            result.exit_code = INPUT_ERROR_CODE
        result.wall_time = time.perf_counter() - started
        return result

    def _run_trial(self, trial: int, result: TrialResult) -> None:
        cfg = self.config
        p_budget = cfg.power_linear
        out = self.output_dir
        pair = self.channels_for(trial)
        result.files["channels"] = str(save_channel_pair(pair, out / f"channels_trial{trial}.txt"))

        f = gsvd(pair)
        part = classify_subchannels(f)
        row = expected_counts(pair.nt, pair.nb, pair.ne)
        result.summary["configuration"] = row.label
        result.summary["counts"] = {"cc": len(part.cc), "pc1": len(part.pc1), "pc2": len(part.pc2)}

        region = sweep_region(
            pair, p_budget, cfg.delta, cfg.dc, verify_removals=cfg.verify_removals, f=f
        )
        regions = [region]
        result.files["gsvd_region"] = str(write_region_csv(region, out / f"gsvd_region_trial{trial}.csv"))
        result.summary["gsvd_points"] = len(region)
        result.summary["switching_points"] = switching_points(region)
        result.summary["max_min_multicast"] = region.diagnostics["max_min_multicast"]
        if region.points:
            first = region.points[0]
            result.summary["zero_multicast"] = solution_summary(first.diagnostics["solution"])
            _, disagreement = dc_solve_multistart(f, first.diagnostics["allocation"], first.r_ms, p_budget, cfg.dc)
            result.summary["multistart_disagreement"] = disagreement

        if cfg.baseline:
            tdma = tdma_baseline(pair, p_budget, cfg.dc, cfg.delta, f=f)
            regions.append(tdma)
            result.files["tdma_region"] = str(write_region_csv(tdma, out / f"tdma_region_trial{trial}.csv"))
            result.summary["tdma"] = {
                "r_mc_max": tdma.diagnostics["r_mc_max"],
                "r_c_max": tdma.diagnostics["r_c_max"],
            }

        if cfg.grid_reference and max(pair.nt, pair.nb, pair.ne) <= MAX_REFERENCE_DIM:
            reference = grid_reference_region(
                pair, p_budget, cfg.reference_grid, cfg.delta, include=region, seed=result.seed, f=f
            )
            regions.append(reference)
            if region.points and reference.points:
                result.summary["reference_gap"] = region_gap(region, reference)
            result.files["grid_reference"] = str(
                write_region_csv(reference, out / f"grid_reference_trial{trial}.csv")
            )

        title = f"{pair.nt}x{pair.nb}x{pair.ne}, P={p_budget:g}, trial {trial}"
        result.files["plot"] = str(plot_regions(regions, out / f"regions_trial{trial}.svg", title))

    def run(self) -> ExperimentResult:
        """Run all trials, in a process pool when ``workers`` > 1, and write the manifest."""
        cfg = self.config
        self.output_dir.mkdir(parents=True, exist_ok=True)
        trials = range(cfg.trials)
        logger.info("running %d trial(s) with %d worker(s) into %s", cfg.trials, cfg.workers, self.output_dir)
        if cfg.workers > 1 and cfg.trials > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                results = list(pool.map(_run_trial, [cfg] * cfg.trials, trials))
        else:
            results = [self.run_trial(t) for t in trials]
        results.sort(key=lambda r: r.trial)
        return ExperimentResult(manifest_path=self.write_manifest(results), trials=results)

    def write_manifest(self, results: List[TrialResult]) -> Path:
        manifest = {
            "config": json.loads(self.config.model_dump_json()),
            "versions": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "pandas": pd.__version__,
                "pydantic": pydantic.VERSION,
                "matplotlib": matplotlib.__version__,
            },
            "trials": [
                {
                    "trial": r.trial,
                    "seed": r.seed,
                    "wall_time_s": round(r.wall_time, 6),
                    "summary": r.summary,
                    "error": r.error,
                    "files": {
                        name: {"path": Path(p).name, "sha256": sha256_file(p)} for name, p in sorted(r.files.items())
                    },
                }
                for r in results
            ],
        }
        path = self.output_dir / MANIFEST_NAME
        path.write_text(json.dumps(manifest, indent=2, default=float) + "\n", encoding="utf-8")
        return path


def _run_trial(config: ExperimentConfig, trial: int) -> TrialResult:
    return ExperimentPipeline(config).run_trial(trial)


def create_pipeline(config: ExperimentConfig) -> ExperimentPipeline:
    """
    Factory function to create an experiment pipeline.

    Args:
        config: Validated experiment configuration

    Returns:
        ExperimentPipeline instance
    """
    return ExperimentPipeline(config)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run a configured experiment end to end."""
    return create_pipeline(config).run()
