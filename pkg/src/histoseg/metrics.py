"""Image quality metrics and class-mean quantization."""

import math
from dataclasses import dataclass

import numpy as np

from .engine import ThresholdSet

# PSNR peak is pinned to the 8-bit maximum regardless of image content.
PEAK = 255.0


class DimensionMismatch(ValueError):
    """Images or masks must share width and height."""


class RangeMismatch(ValueError):
    """Pixel values fall outside the threshold set's gray range."""


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale image, row-major, shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.size == 0:
            raise ValueError("pixels must be a non-empty 2-D array")
        if not np.issubdtype(px.dtype, np.integer):
            raise ValueError("pixels must be integers")
        if int(px.min()) < 0 or int(px.max()) > 255:
            raise ValueError("pixel values must lie in [0, 255]")
        object.__setattr__(self, "pixels", px.astype(np.uint8))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Foreground/background labeling of an image, true = foreground."""

    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.ndim != 2 or b.size == 0:
            raise ValueError("bits must be a non-empty 2-D array")
        object.__setattr__(self, "bits", b.astype(bool))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]


@dataclass(frozen=True)
class MetricsReport:
    """ME, RAE and (optionally) MSE/PSNR for a reference/test image pair."""

    me: float
    rae: float
    mse: float | None = None
    psnr_db: float | None = None

    def to_dict(self) -> dict:
        psnr_val = self.psnr_db
        if psnr_val is not None and math.isinf(psnr_val):
            psnr_val = None
        return {"me": self.me, "rae": self.rae, "mse": self.mse, "psnr_db": psnr_val}


def foreground_of(img: GrayImage, invert: bool = False) -> BinaryMask:
    """Nonzero pixels as foreground; invert flips the polarity."""
    bits = img.pixels != 0
    return BinaryMask(bits=~bits if invert else bits)


def _class_index(img: GrayImage, t: ThresholdSet) -> np.ndarray:
    if int(img.pixels.max()) > t.top:
        raise RangeMismatch(
            f"pixel value {int(img.pixels.max())} exceeds threshold range top {t.top}"
        )
    return np.searchsorted(np.asarray(t.cuts), img.pixels, side="left")


def quantize(img: GrayImage, t: ThresholdSet) -> GrayImage:
    """Replace each pixel by its class mean, rounded half-up to 8 bits."""
    means = np.asarray(t.means, dtype=np.float64)
    rounded = np.floor(means + 0.5).astype(np.uint8)
    return GrayImage(pixels=rounded[_class_index(img, t)])


def map_to_class_means(img: GrayImage, t: ThresholdSet) -> np.ndarray:
    """Per-pixel real-valued class means (no rounding), for exact error sums."""
    return np.asarray(t.means, dtype=np.float64)[_class_index(img, t)]


def _check_dims(a, b):
    if a.bits.shape != b.bits.shape:
        raise DimensionMismatch(f"mask shapes differ: {a.bits.shape} vs {b.bits.shape}")


def misclassification_error(ref: BinaryMask, test: BinaryMask) -> float:
    """Fraction of pixels whose foreground/background label disagrees."""
    _check_dims(ref, test)
    mismatches = int(np.count_nonzero(ref.bits != test.bits))
    return mismatches / ref.bits.size


def relative_area_error(ref: BinaryMask, test: BinaryMask) -> float:
    """Normalized foreground-area discrepancy; 0 when both areas are empty."""
    _check_dims(ref, test)
    a_ref = int(np.count_nonzero(ref.bits))
    a_test = int(np.count_nonzero(test.bits))
    if a_ref == 0 and a_test == 0:
        return 0.0
    if a_ref > a_test:
        return (a_ref - a_test) / a_ref
    return (a_test - a_ref) / a_test


def psnr(src: GrayImage, test) -> tuple[float, float]:
    """Mean square error and peak signal-to-noise ratio in dB.

    `test` may be a GrayImage or a real-valued array of the same shape
    (e.g. class means from map_to_class_means).  A zero-error pair
    reports PSNR as math.inf.
    """
    t = test.pixels if isinstance(test, GrayImage) else np.asarray(test)
    if t.shape != src.pixels.shape:
        raise DimensionMismatch(f"image shapes differ: {src.pixels.shape} vs {t.shape}")
    diff = src.pixels.astype(np.float64) - t.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return 0.0, math.inf
    return mse, 10.0 * math.log10(PEAK * PEAK / mse)
