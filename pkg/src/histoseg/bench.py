"""Timing harness for full merge runs over synthetic histograms."""

import statistics
import time

import numpy as np

from .engine import Histogram, run_dendrogram, thresholds_at


def synthetic_histogram(bins: int, seed: int = 0) -> Histogram:
    """Dense histogram: `bins` occupied levels with seeded counts in [1, 256]."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    rng = np.random.default_rng([seed, bins])
    counts = rng.integers(1, 257, size=bins)
    return Histogram(tuple(int(c) for c in counts))


def run_benchmark(bins_list, repeat: int = 5, seed: int = 0) -> dict:
    """Time full dendrogram runs per histogram size.

    Returns one row per size with the median wall clock over `repeat`
    runs plus the 2-class thresholds as a determinism witness, and the
    slope of a log-log least-squares fit across sizes (None for a single
    size).
    """
    if repeat < 1:
        raise ValueError("repeat must be >= 1")
    rows = []
    for bins in bins_list:
        h = synthetic_histogram(bins, seed=seed)
        times = []
        trace = None
        for _ in range(repeat):
            t0 = time.perf_counter()
            trace = run_dendrogram(h)
            times.append(time.perf_counter() - t0)
        cuts = thresholds_at(trace, 2).cuts if trace.initial.K >= 2 else ()
        rows.append(
            {
                "bins": bins,
                "median_ms": statistics.median(times) * 1e3,
                "thresholds_2level": list(cuts),
            }
        )
    slope = None
    if len(rows) >= 2:
        xs = np.log([row["bins"] for row in rows])
        ys = np.log([row["median_ms"] for row in rows])
        slope = float(np.polyfit(xs, ys, 1)[0])
    return {"repeat": repeat, "rows": rows, "slope": slope}
