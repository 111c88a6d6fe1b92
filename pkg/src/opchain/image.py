"""Image substrate: decode/encode, grayscale conversion, patch extraction.

Pixel model: H x W x C arrays, 8-bit storage, float math in [0, 255].
Channel order is R,G,B for color. PPM (P5/P6, maxval 255) is the bit-exact
reference interchange format; PNG is supported for convenience via Pillow.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, DimensionError, ParameterError

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"

# BT.601 luma weights, the standard convention for forensics corpora.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def quantize_u8(x: np.ndarray) -> np.ndarray:
    """Half-up rounding to 8-bit: clip(floor(x + 0.5), 0, 255).

    Used everywhere a float working image is committed back to storage, so
    every operation quantizes identically.
    """
    return np.clip(np.floor(np.asarray(x, dtype=np.float64) + 0.5), 0.0, 255.0).astype(np.uint8)


class ImageBuffer:
    """8-bit image, shape (H, W, C) with C in {1, 3}."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        arr = np.asarray(data)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3 or arr.shape[2] not in (1, 3):
            raise DimensionError(f"expected (H, W, C) with C in {{1, 3}}, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if np.issubdtype(arr.dtype, np.floating):
                raise DimensionError("float pixels must be quantized explicitly (quantize_u8)")
            if arr.min() < 0 or arr.max() > 255:
                raise DimensionError("integer pixel values outside [0, 255]")
            arr = arr.astype(np.uint8)
        self.data = np.ascontiguousarray(arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def as_float(self) -> np.ndarray:
        """Float64 working copy in [0, 255]."""
        return self.data.astype(np.float64)

    @classmethod
    def from_float(cls, x: np.ndarray) -> "ImageBuffer":
        return cls(quantize_u8(x))

    def __eq__(self, other) -> bool:
        return isinstance(other, ImageBuffer) and self.data.shape == other.data.shape and bool(
            np.array_equal(self.data, other.data)
        )

    def __repr__(self) -> str:
        return f"ImageBuffer({self.height}x{self.width}x{self.channels})"


@dataclass(frozen=True)
class PatchSpec:
    """Square patch extraction plan: grid scan or one centered crop."""

    size: int
    stride: int = 1
    mode: str = "grid"

    def __post_init__(self):
        if self.size < 8:
            raise ParameterError(f"patch size must be >= 8, got {self.size}")
        if self.stride < 1:
            raise ParameterError(f"stride must be >= 1, got {self.stride}")
        if self.mode not in ("grid", "center-crop"):
            raise ParameterError(f"mode must be 'grid' or 'center-crop', got {self.mode!r}")


class _ByteCursor:
    """Tracks a read offset into a byte string for error reporting."""

    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def read(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise DecodeError(
                f"truncated stream: wanted {n} bytes, {len(self.buf) - self.pos} left",
                offset=self.pos,
            )
        out = self.buf[self.pos : self.pos + n]
        self.pos += n
        return out

    def skip_header_space(self):
        """Consume PNM header whitespace and '#' comments."""
        while self.pos < len(self.buf):
            c = self.buf[self.pos : self.pos + 1]
            if c in b" \t\r\n":
                self.pos += 1
            elif c == b"#":
                while self.pos < len(self.buf) and self.buf[self.pos : self.pos + 1] != b"\n":
                    self.pos += 1
            else:
                return

    def read_int(self) -> int:
        self.skip_header_space()
        start = self.pos
        while self.pos < len(self.buf) and self.buf[self.pos : self.pos + 1].isdigit():
            self.pos += 1
        if self.pos == start:
            raise DecodeError("expected decimal integer in PNM header", offset=start)
        return int(self.buf[start : self.pos])


def _decode_pnm(data: bytes) -> ImageBuffer:
    cur = _ByteCursor(data)
    magic = cur.read(2)
    channels = {b"P5": 1, b"P6": 3}.get(magic)
    if channels is None:
        raise DecodeError(f"unsupported PNM magic {magic!r}", offset=0)
    width = cur.read_int()
    height = cur.read_int()
    maxval = cur.read_int()
    if maxval != 255:
        raise DecodeError(f"unsupported bit depth: maxval {maxval} (only 255)", offset=cur.pos)
    if width < 1 or height < 1:
        raise DecodeError(f"bad dimensions {width}x{height}", offset=cur.pos)
    # Exactly one whitespace byte separates the header from the raster.
    sep = cur.read(1)
    if sep not in b" \t\r\n":
        raise DecodeError("missing whitespace before raster", offset=cur.pos - 1)
    raster = cur.read(width * height * channels)
    arr = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, channels)
    return ImageBuffer(arr.copy())


def _decode_png(data: bytes) -> ImageBuffer:
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            if im.mode == "P":
                im = im.convert("RGB")
            if im.mode == "L":
                arr = np.asarray(im, dtype=np.uint8)[:, :, None]
            elif im.mode == "RGB":
                arr = np.asarray(im, dtype=np.uint8)
            elif im.mode in ("I", "I;16", "I;16B"):
                raise DecodeError("unsupported bit depth: 16-bit PNG", offset=len(PNG_SIGNATURE))
            else:
                raise DecodeError(f"unsupported PNG mode {im.mode!r}", offset=len(PNG_SIGNATURE))
    except DecodeError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"malformed PNG stream: {exc}", offset=0) from exc
    return ImageBuffer(arr)


def decode_image(data: bytes) -> ImageBuffer:
    """Decode a PPM (P5/P6) or PNG byte stream to exact pixel values.

    No color management is applied; pixels pass through untouched.
    """
    if len(data) < 2:
        raise DecodeError("stream shorter than any known signature", offset=0)
    if data[:2] in (b"P5", b"P6"):
        return _decode_pnm(data)
    if data[: len(PNG_SIGNATURE)] == PNG_SIGNATURE:
        return _decode_png(data)
    raise DecodeError(f"unrecognized signature {data[:2]!r}", offset=0)


def encode_image(img: ImageBuffer, format: str = "ppm") -> bytes:
    """Serialize to 'ppm' (bit-exact reference) or 'png'. Deterministic."""
    if format == "ppm":
        magic = b"P5" if img.channels == 1 else b"P6"
        header = magic + b"\n%d %d\n255\n" % (img.width, img.height)
        return header + img.data.tobytes()
    if format == "png":
        if img.channels == 1:
            pil = Image.fromarray(img.data[:, :, 0], mode="L")
        else:
            pil = Image.fromarray(img.data, mode="RGB")
        out = io.BytesIO()
        pil.save(out, format="PNG")
        return out.getvalue()
    raise ParameterError(f"unknown format {format!r} (ppm or png)")


def to_grayscale(img: ImageBuffer) -> ImageBuffer:
    """BT.601 luma: Y = round(0.299 R + 0.587 G + 0.114 B)."""
    if img.channels != 3:
        raise DimensionError(f"grayscale conversion needs C=3, got C={img.channels}")
    f = img.as_float()
    y = LUMA_WEIGHTS[0] * f[:, :, 0] + LUMA_WEIGHTS[1] * f[:, :, 1] + LUMA_WEIGHTS[2] * f[:, :, 2]
    return ImageBuffer(quantize_u8(y)[:, :, None])


def extract_patches(img: ImageBuffer, spec: PatchSpec) -> list[tuple[ImageBuffer, tuple[int, int]]]:
    """Cut square patches, returning (patch, (y, x)) in scan order.

    Grid mode walks top-left corners at the given stride, left-to-right then
    top-to-bottom; center-crop yields the single patch whose top-left corner
    is (floor((H-size)/2), floor((W-size)/2)).
    """
    size = spec.size
    if size > img.height or size > img.width:
        raise DimensionError(
            f"patch size {size} exceeds image dims {img.height}x{img.width}"
        )
    out = []
    if spec.mode == "center-crop":
        y = (img.height - size) // 2
        x = (img.width - size) // 2
        out.append((ImageBuffer(img.data[y : y + size, x : x + size].copy()), (y, x)))
        return out
    for y in range(0, img.height - size + 1, spec.stride):
        for x in range(0, img.width - size + 1, spec.stride):
            out.append((ImageBuffer(img.data[y : y + size, x : x + size].copy()), (y, x)))
    return out
