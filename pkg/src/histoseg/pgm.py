"""Minimal Netpbm PGM codec (binary P5 and ASCII P2), 8-bit only."""

import numpy as np

from .engine import Histogram
from .metrics import GrayImage

_WS = b" \t\n\r\x0b\x0c"


class PgmError(ValueError):
    """Base for PGM codec failures."""


class MalformedHeader(PgmError):
    """Magic number or header fields are unusable."""


class TruncatedPayload(PgmError):
    """Fewer samples than width * height."""


class UnsupportedMaxval(PgmError):
    """Sample depth beyond 8 bits."""


class MalformedPayload(PgmError):
    """Samples are non-numeric or exceed maxval."""


def _next_token(data: bytes, i: int) -> tuple[bytes, int]:
    # Skips whitespace and '#' comments (to end of line) before the token.
    n = len(data)
    while i < n:
        ch = data[i]
        if ch in _WS:
            i += 1
        elif ch == 0x23:  # '#'
            while i < n and data[i] not in b"\r\n":
                i += 1
        else:
            break
    if i >= n:
        raise MalformedHeader("unexpected end of input")
    j = i
    while j < n and data[j] not in _WS and data[j] != 0x23:
        j += 1
    return data[i:j], j


def read_pgm(data: bytes) -> GrayImage:
    """Decode P5 (binary) or P2 (ASCII) PGM bytes into a GrayImage.

    '#' comments may appear anywhere in the header.  For P5 the raster
    must start exactly one whitespace byte after the maxval token, so
    raster bytes that happen to look like whitespace survive.  A maxval
    below 255 is accepted as-is; samples are never rescaled.
    """
    magic, pos = _next_token(data, 0)
    if magic not in (b"P2", b"P5"):
        raise MalformedHeader(f"unsupported magic {magic!r}")
    fields = []
    for name in ("width", "height", "maxval"):
        tok, pos = _next_token(data, pos)
        try:
            fields.append(int(tok))
        except ValueError:
            raise MalformedHeader(f"non-numeric {name} token {tok!r}") from None
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise MalformedHeader("width and height must be positive")
    if maxval > 255:
        raise UnsupportedMaxval(f"maxval {maxval} exceeds 255")
    if maxval <= 0:
        raise MalformedHeader("maxval must be positive")

    expected = width * height
    if magic == b"P5":
        if pos >= len(data) or data[pos] not in _WS:
            raise MalformedHeader("missing whitespace after maxval")
        raster = data[pos + 1 : pos + 1 + expected]
        if len(raster) < expected:
            raise TruncatedPayload(f"expected {expected} bytes, found {len(raster)}")
        px = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    else:
        samples = []
        i = pos
        while len(samples) < expected:
            try:
                tok, i = _next_token(data, i)
            except MalformedHeader:
                raise TruncatedPayload(
                    f"expected {expected} samples, found {len(samples)}"
                ) from None
            try:
                samples.append(int(tok))
            except ValueError:
                raise MalformedPayload(f"non-numeric sample {tok!r}") from None
        px = np.array(samples, dtype=np.int64).reshape(height, width)

    if int(px.max()) > maxval or int(px.min()) < 0:
        raise MalformedPayload("sample outside [0, maxval]")
    return GrayImage(pixels=px)


def write_pgm(img: GrayImage, fmt: str = "P5") -> bytes:
    """Encode as 8-bit PGM; round-trips through read_pgm bit-exactly."""
    if fmt not in ("P5", "P2"):
        raise ValueError(f"format must be 'P5' or 'P2', got {fmt!r}")
    header = f"{fmt}\n{img.width} {img.height}\n255\n".encode("ascii")
    if fmt == "P5":
        return header + img.pixels.tobytes()
    # keep lines under the customary 70-character limit
    flat = [str(v) for v in img.pixels.ravel().tolist()]
    lines = [" ".join(flat[i : i + 17]) for i in range(0, len(flat), 17)]
    return header + "\n".join(lines).encode("ascii") + b"\n"


def histogram_of(img: GrayImage) -> Histogram:
    """256-bin gray-level occurrence counts; total equals width * height."""
    counts = np.bincount(img.pixels.ravel(), minlength=256)
    return Histogram(tuple(int(c) for c in counts))
