"""Shared generators and assertion helpers for the test suite."""

import random

import numpy as np

from histoseg.engine import Histogram
from histoseg.metrics import GrayImage


def rel_err(value: float, reference: float) -> float:
    """Relative error against a reference, safe around zero."""
    if value == reference:
        return 0.0
    return abs(value - reference) / max(abs(reference), abs(value), 1e-30)


def sparse_histogram(rng: random.Random, max_bins: int = 12, max_pixels: int = 40,
                     g: int = 256) -> Histogram:
    """Random histogram with at most max_bins occupied levels and N <= max_pixels."""
    k = rng.randint(1, max_bins)
    levels = rng.sample(range(g), k)
    counts = [0] * g
    for lvl in levels:
        counts[lvl] = 1
    for _ in range(rng.randint(0, max_pixels - k)):
        counts[rng.choice(levels)] += 1
    return Histogram(tuple(counts))


def dense_histogram(rng: random.Random, bins: int = 256, max_count: int = 40) -> Histogram:
    """Histogram with every one of `bins` levels occupied."""
    return Histogram(tuple(rng.randint(1, max_count) for _ in range(bins)))


def hist_from(bins: dict, g: int = 256) -> Histogram:
    """Histogram from a {gray: count} mapping, zero elsewhere."""
    counts = [0] * g
    for gray, count in bins.items():
        counts[gray] = count
    return Histogram(tuple(counts))


def small_image(rng: np.random.Generator, side: int = 12, min_distinct: int = 4,
                max_distinct: int = 16) -> GrayImage:
    """Random image drawing pixels from a small palette of gray levels."""
    k = int(rng.integers(min_distinct, max_distinct + 1))
    palette = rng.choice(256, size=k, replace=False)
    px = rng.choice(palette, size=(side, side))
    # make sure every palette level appears so the distinct count is k
    flat = px.ravel()
    flat[rng.choice(flat.size, size=k, replace=False)] = palette
    return GrayImage(pixels=px.astype(np.uint8))


def standard_image(size: int = 512, seed: int = 7) -> GrayImage:
    """Deterministic stand-in for a natural 8-bit test photograph.

    A smooth sinusoid field plus mild noise gives a broad, bumpy
    histogram similar to the classic 512x512 test images.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size] / size
    base = (
        128
        + 58 * np.sin(2 * np.pi * (1.3 * xx + 0.4 * yy))
        + 36 * np.cos(2 * np.pi * (2.1 * yy + 1.7 * xx * xx))
    )
    px = np.clip(np.rint(base + rng.normal(0, 8, (size, size))), 0, 255)
    return GrayImage(pixels=px.astype(np.uint8))
