"""Brute-force reference implementations for cross-checking the engine.

Everything here recomputes from the raw histogram with the plain
definitions, sharing no state with the engine's incremental updates, so
the two routes stay independent checks of each other.
"""

import itertools
import math

from .engine import ClassArray, Histogram, ThresholdSet

MAX_ORACLE_BINS = 64
MAX_ORACLE_PIXELS = 100_000
MAX_COMBINATIONS = 10_000_000


class TooLarge(ValueError):
    """Input exceeds the brute-force size guards."""


class Infeasible(ValueError):
    """Fewer occupied gray levels than requested classes."""


def naive_variances(c: ClassArray, h: Histogram) -> tuple[float, float | None]:
    """Within/between-class variance summed straight from the histogram.

    Every pixel is materialized at its bin's gray level and measured
    against its class mean recomputed from scratch.  Returns (v, w) with
    w None for a single class; v is 0 when the within-class scatter
    vanishes, even if N equals K.
    """
    occupied = sum(1 for cnt in h.counts if cnt)
    if occupied > MAX_ORACLE_BINS or h.N > MAX_ORACLE_PIXELS:
        raise TooLarge(
            f"naive recomputation capped at {MAX_ORACLE_BINS} bins / {MAX_ORACLE_PIXELS} pixels"
        )
    n_total = h.N
    grand = sum(g * cnt for g, cnt in enumerate(h.counts)) / n_total
    ss_within = 0.0
    ss_between = 0.0
    k = c.K
    for rec in c.classes:
        span = range(rec.g_lo, rec.g_hi + 1)
        n_k = sum(h.counts[g] for g in span)
        if n_k != rec.n:
            raise ValueError("class array inconsistent with histogram")
        mean_k = sum(g * h.counts[g] for g in span) / n_k
        ss_within += sum(h.counts[g] * (g - mean_k) ** 2 for g in span)
        ss_between += n_k * (mean_k - grand) ** 2
    v = ss_within / (n_total - k) if n_total > k else 0.0
    w = ss_between / (k - 1) if k >= 2 else None
    return v, w


def _prefix_sums(h: Histogram) -> tuple[list[int], list[int]]:
    cum_n = [0]
    cum_s = [0]
    for g, cnt in enumerate(h.counts):
        cum_n.append(cum_n[-1] + cnt)
        cum_s.append(cum_s[-1] + g * cnt)
    return cum_n, cum_s


def exhaustive_otsu(h: Histogram, m: int) -> ThresholdSet:
    """Globally optimal m-class cut set by enumerating every combination.

    Candidate cuts are the occupied gray levels below the top one: any
    cut between two occupied levels classifies pixels identically to the
    occupied level beneath it, so nothing is lost and cut sets stay
    canonical.  Maximizes the size-weighted scatter of class means about
    the grand mean; exact ties keep the lexicographically smallest cut
    set (combinations enumerate in lexicographic order and only strict
    improvements replace the incumbent).
    """
    if m < 2:
        raise Infeasible(f"need at least two classes, got m={m}")
    if h.N == 0:
        raise Infeasible("histogram holds no pixels")
    occupied = [g for g, cnt in enumerate(h.counts) if cnt]
    if len(occupied) < m:
        raise Infeasible(
            f"{len(occupied)} occupied gray levels cannot form {m} classes"
        )
    if math.comb(h.G, m - 1) > MAX_COMBINATIONS:
        raise TooLarge(
            f"search space comb({h.G}, {m - 1}) exceeds {MAX_COMBINATIONS}"
        )

    cum_n, cum_s = _prefix_sums(h)
    n_total = h.N
    grand = cum_s[-1] / n_total
    top = occupied[-1]
    candidates = occupied[:-1]

    best = -1.0
    best_cuts: tuple[int, ...] | None = None
    for cuts in itertools.combinations(candidates, m - 1):
        scatter = 0.0
        prev = 0
        for cut in cuts + (top,):
            n_k = cum_n[cut + 1] - cum_n[prev]
            s_k = cum_s[cut + 1] - cum_s[prev]
            diff = s_k / n_k - grand
            scatter += n_k * (diff * diff)
            prev = cut + 1
        if scatter > best:
            best = scatter
            best_cuts = cuts

    assert best_cuts is not None
    means = []
    prev = 0
    for cut in best_cuts + (top,):
        n_k = cum_n[cut + 1] - cum_n[prev]
        s_k = cum_s[cut + 1] - cum_s[prev]
        means.append(s_k / n_k)
        prev = cut + 1
    return ThresholdSet(cuts=best_cuts, means=tuple(means), top=top)


def within_class_scatter(h: Histogram, t: ThresholdSet) -> float:
    """Total squared deviation of pixels about their class means.

    Evaluated directly from the histogram with class means recomputed
    per cut range, so it rates engine and oracle cut sets on equal
    footing.  Equals pixel count times the mean-quantization MSE.
    """
    edges = [-1, *t.cuts, h.G - 1]
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        span = range(lo + 1, hi + 1)
        n_k = sum(h.counts[g] for g in span)
        if n_k == 0:
            continue
        mean_k = sum(g * h.counts[g] for g in span) / n_k
        total += sum(h.counts[g] * (g - mean_k) ** 2 for g in span)
    return total
