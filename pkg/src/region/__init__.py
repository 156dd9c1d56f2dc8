"""Rate-region sweeps, baselines, comparisons and experiment runs."""
