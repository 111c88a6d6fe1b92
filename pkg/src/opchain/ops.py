"""Operation dictionary, single-op application, chain application, enumeration.

Supported operations and their stock parameter grids:

    MF    median filter, kernel 3 or 5
    GB    Gaussian blur, 5x5 kernel, sigma 0.7 / 1.0 / 1.1
    JPEG  baseline JPEG round trip, QF 70 / 75 / 80 / 85 / 90
    RS    bilinear resample by 1.2 or 1.5, center-cropped back to input size
    USM   unsharp masking, strength lambda = 1
    HE    per-channel histogram equalization
    AWGN  additive white Gaussian noise, sigma = 2, counter-based RNG

A chain is an ordered, repetition-free sequence of at most 5 operations; the
empty chain is the untouched class ("AU"). Text syntax: ``MF5>GB1.1>RS1.5``,
``JPEG85``, ``AWGN2``, ``AU``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._conv import bilinear_resize, correlate2d, gaussian_kernel, median2d
from .errors import DimensionError, ParameterError
from .image import ImageBuffer, quantize_u8
from .jpeg import jpeg_round_trip

KIND_ORDER = ("MF", "GB", "JPEG", "RS", "USM", "HE", "AWGN")

# Stock parameter grids; construction rejects anything else unless unsafe=True.
PARAM_GRID = {
    "MF": (3, 5),
    "GB": (0.7, 1.0, 1.1),
    "JPEG": (70, 75, 80, 85, 90),
    "RS": (1.2, 1.5),
    "USM": (1.0,),
    "HE": (),
    "AWGN": (2.0,),
}

_INT_PARAM_KINDS = ("MF", "JPEG")
_DEFAULT_PARAM = {"USM": 1.0, "AWGN": 2.0}

MAX_CHAIN_LEN = 5


@dataclass(frozen=True)
class OperationSpec:
    """One parameterized operation."""

    kind: str
    param: float | int | None = None

    def __post_init__(self):
        if self.kind not in KIND_ORDER:
            raise ParameterError(f"unknown operation kind {self.kind!r}")
        if self.kind == "HE":
            if self.param is not None:
                raise ParameterError("HE takes no parameter")
            return
        param = self.param
        if param is None:
            param = _DEFAULT_PARAM.get(self.kind)
            if param is None:
                raise ParameterError(f"{self.kind} requires a parameter")
        param = int(param) if self.kind in _INT_PARAM_KINDS else float(param)
        object.__setattr__(self, "param", param)

    @staticmethod
    def checked(kind: str, param=None, unsafe: bool = False) -> "OperationSpec":
        """Construct and, unless unsafe, enforce the stock parameter grid."""
        spec = OperationSpec(kind, param)
        if not unsafe and spec.kind != "HE" and spec.param not in PARAM_GRID[spec.kind]:
            raise ParameterError(
                f"{spec.kind} parameter {spec.param} outside the stock grid "
                f"{PARAM_GRID[spec.kind]} (pass unsafe to override)"
            )
        return spec

    def token(self) -> str:
        if self.kind == "HE":
            return "HE"
        p = self.param
        if isinstance(p, float) and p == int(p):
            p = int(p)
        return f"{self.kind}{p}"


@dataclass(frozen=True)
class Chain:
    """Ordered operation sequence; the class label of a sample."""

    ops: tuple[OperationSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        if len(self.ops) > MAX_CHAIN_LEN:
            raise ParameterError(f"chain length {len(self.ops)} exceeds {MAX_CHAIN_LEN}")
        kinds = [op.kind for op in self.ops]
        if len(set(kinds)) != len(kinds):
            raise ParameterError(f"operation kinds must be pairwise distinct, got {kinds}")

    def __len__(self) -> int:
        return len(self.ops)

    def kinds(self) -> tuple[str, ...]:
        return tuple(op.kind for op in self.ops)

    def text(self) -> str:
        if not self.ops:
            return "AU"
        return ">".join(op.token() for op in self.ops)


def parse_chain(text: str, unsafe: bool = False) -> Chain:
    """Parse chain text like ``MF5>GB1.1`` (``AU`` = empty chain)."""
    text = text.strip()
    if text == "AU" or text == "":
        return Chain(())
    ops = []
    for token in text.split(">"):
        token = token.strip()
        kind = None
        for k in sorted(KIND_ORDER, key=len, reverse=True):
            if token.startswith(k):
                kind = k
                break
        if kind is None:
            raise ParameterError(f"unparseable operation token {token!r}")
        rest = token[len(kind):]
        param = None
        if rest:
            try:
                param = float(rest)
            except ValueError:
                raise ParameterError(f"bad parameter {rest!r} in token {token!r}") from None
        ops.append(OperationSpec.checked(kind, param, unsafe=unsafe))
    return Chain(tuple(ops))


def apply_median_filter(img: ImageBuffer, kernel: int) -> ImageBuffer:
    """Per-channel sliding median, reflect-101 borders."""
    if kernel % 2 == 0:
        raise ParameterError(f"median kernel must be odd, got {kernel}")
    if kernel < 1:
        raise ParameterError(f"median kernel must be positive, got {kernel}")
    f = img.as_float()
    out = np.stack([median2d(f[:, :, c], kernel) for c in range(img.channels)], axis=2)
    return ImageBuffer(quantize_u8(out))


def apply_gaussian_blur(img: ImageBuffer, kernel: int = 5, sigma: float = 1.0) -> ImageBuffer:
    """Per-channel Gaussian blur with a renormalized sampled kernel."""
    return ImageBuffer(quantize_u8(_gaussian_blur_float(img.as_float(), kernel, sigma)))


def _gaussian_blur_float(f: np.ndarray, kernel: int, sigma: float) -> np.ndarray:
    if sigma <= 0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")
    if kernel % 2 == 0 or kernel < 1:
        raise ParameterError(f"blur kernel must be odd and positive, got {kernel}")
    k = gaussian_kernel(kernel, sigma)
    return np.stack([correlate2d(f[:, :, c], k) for c in range(f.shape[2])], axis=2)


def apply_resample(img: ImageBuffer, scale: float) -> ImageBuffer:
    """Bilinear rescale to round(dim * scale), then center-crop to input size.

    Sampling uses half-pixel-center alignment: src = (dst + 0.5) / ratio - 0.5,
    clamped to the source extent.
    """
    if scale <= 0:
        raise ParameterError(f"scale must be > 0, got {scale}")
    h, w = img.height, img.width
    h2 = int(math.floor(h * scale + 0.5))
    w2 = int(math.floor(w * scale + 0.5))
    if h2 < h or w2 < w:
        raise DimensionError(
            f"resampled dims {h2}x{w2} smaller than original {h}x{w}; cannot crop back"
        )
    resized = bilinear_resize(img.as_float(), h2, w2)
    y = (h2 - h) // 2
    x = (w2 - w) // 2
    return ImageBuffer(quantize_u8(resized[y : y + h, x : x + w]))


def apply_jpeg(img: ImageBuffer, qf: int, subsample_420: bool = False) -> ImageBuffer:
    """Baseline JPEG compress/decompress round trip (4:4:4 by default)."""
    return jpeg_round_trip(img, qf, subsample_420=subsample_420)


def apply_usm(img: ImageBuffer, strength: float = 1.0) -> ImageBuffer:
    """Unsharp masking: X + strength * (X - blur(X)), blur = 5x5 sigma 1.0."""
    if strength < 0:
        raise ParameterError(f"usm strength must be >= 0, got {strength}")
    f = img.as_float()
    return ImageBuffer(quantize_u8(f + strength * (f - _gaussian_blur_float(f, 5, 1.0))))


def apply_hist_eq(img: ImageBuffer) -> ImageBuffer:
    """Classic CDF remap per channel; constant channels pass through unchanged."""
    out = np.empty_like(img.data)
    n = img.height * img.width
    for c in range(img.channels):
        chan = img.data[:, :, c]
        hist = np.bincount(chan.ravel(), minlength=256)
        cdf = np.cumsum(hist)
        cdf_min = int(cdf[np.nonzero(hist)[0][0]])
        if cdf_min == n:
            out[:, :, c] = chan
            continue
        lut = quantize_u8(255.0 * (cdf - cdf_min) / (n - cdf_min))
        out[:, :, c] = lut[chan]
    return ImageBuffer(out)


def apply_awgn(img: ImageBuffer, sigma: float = 2.0, seed: int = 0) -> ImageBuffer:
    """Add i.i.d. N(0, sigma^2) noise from a Philox stream keyed by seed."""
    if sigma < 0:
        raise ParameterError(f"sigma must be >= 0, got {sigma}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    noise = rng.normal(0.0, sigma, size=img.data.shape)
    return ImageBuffer(quantize_u8(img.as_float() + noise))


def derive_seed(seed: int, *indices: int) -> int:
    """Mix a base seed with indices into a fresh 64-bit seed, platform-stable."""
    parts = [int(seed)] + [int(i) for i in indices]
    return int(np.random.SeedSequence(parts).generate_state(1, np.uint64)[0])


def apply_operation(img: ImageBuffer, spec: OperationSpec, seed: int = 0) -> ImageBuffer:
    if spec.kind == "MF":
        return apply_median_filter(img, int(spec.param))
    if spec.kind == "GB":
        return apply_gaussian_blur(img, 5, float(spec.param))
    if spec.kind == "JPEG":
        return apply_jpeg(img, int(spec.param))
    if spec.kind == "RS":
        return apply_resample(img, float(spec.param))
    if spec.kind == "USM":
        return apply_usm(img, float(spec.param))
    if spec.kind == "HE":
        return apply_hist_eq(img)
    if spec.kind == "AWGN":
        return apply_awgn(img, float(spec.param), seed=seed)
    raise ParameterError(f"unknown operation kind {spec.kind!r}")


def apply_chain(img: ImageBuffer, chain: Chain, seed: int = 0) -> ImageBuffer:
    """Apply operations left to right, re-quantizing to 8-bit after each step.

    AWGN steps draw from a sub-seed derived from (seed, step index), so a
    chain's output is a pure function of (image, chain, seed).
    """
    out = img
    for i, spec in enumerate(chain.ops):
        out = apply_operation(out, spec, seed=derive_seed(seed, i))
    return out


def enumerate_chains(
    kinds: list[OperationSpec], max_len: int, include_empty: bool = True
) -> list[Chain]:
    """All ordered, repetition-free chains up to max_len, in deterministic order.

    Ordering is by length first, then lexicographic in the canonical kind
    order (MF, GB, JPEG, RS, USM, HE, AWGN). Count = sum over n of
    |kinds|! / (|kinds| - n)!.
    """
    if max_len > len(kinds):
        raise ParameterError(f"max_len {max_len} exceeds number of kinds {len(kinds)}")
    seen = {op.kind for op in kinds}
    if len(seen) != len(kinds):
        raise ParameterError("universe operations must have pairwise distinct kinds")
    ordered = sorted(kinds, key=lambda op: KIND_ORDER.index(op.kind))
    chains = []
    start = 0 if include_empty else 1
    for n in range(start, max_len + 1):
        for combo in itertools.permutations(ordered, n):
            chains.append(Chain(combo))
    return chains
