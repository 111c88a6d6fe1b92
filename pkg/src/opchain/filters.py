"""Texture-suppression filter bank and noise-residual extraction.

Three fixed cross-channel 5x5 kernels predict each pixel from a Gaussian-
weighted neighborhood sampled on a cross or diagonal support, aggregated
over R, G and B with weight 1/3 per channel. Subtracting the prediction from
the channel mean leaves a noise residual in which image texture is strongly
suppressed. Two classical references ship alongside for comparison: a single
zero-sum high-pass kernel of the steganalysis rich-model family ("srm") and
a randomly initialized constrained kernel with center -1 and off-center sum
+1 ("ccl").
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._conv import correlate2d, gaussian_tap
from .analytics import pearson
from .errors import DimensionError, ParameterError
from .image import ImageBuffer

# Supported integer offsets (dy, dx) of each prediction pattern.
_CROSS_R1 = ((-1, 0), (1, 0), (0, -1), (0, 1))
_DIAGONAL = ((-1, -1), (-1, 1), (1, -1), (1, 1))
_CROSS_R2 = _CROSS_R1 + ((-2, 0), (2, 0), (0, -2), (0, 2))

_SRM_KV = np.array(
    [
        [-1, 2, -2, 2, -1],
        [2, -6, 8, -6, 2],
        [-2, 8, -12, 8, -2],
        [2, -6, 8, -6, 2],
        [-1, 2, -2, 2, -1],
    ],
    dtype=np.float64,
) / 12.0

DIRECTIONS = ("horizontal", "vertical", "diagonal")


@dataclass(frozen=True)
class FilterKernel:
    """One 5x5 spatial tap pattern shared by all three input channels.

    Each channel is filtered with taps/3 and the three results are summed,
    so `taps` describes the total weight a spatial offset receives across the
    3-channel neighborhood. `predictor` kernels have unit tap mass and their
    output is an estimate of the pixel (residual = channel mean - output);
    non-predictor kernels are prediction-error filters whose output already
    is the residual.
    """

    name: str
    taps: np.ndarray
    support: str
    predictor: bool
    sigma: float | None = None
    center_weight: int | None = None

    def per_channel(self) -> np.ndarray:
        return self.taps / 3.0

    def grid_text(self) -> str:
        """Plain-text 5x5 dump for inspection."""
        rows = [" ".join(f"{v: .6f}" for v in row) for row in self.taps]
        return "\n".join(rows)


@dataclass(frozen=True)
class FilterBank:
    """The three RGB predictor kernels plus the srm/ccl baselines."""

    rgb: tuple[FilterKernel, FilterKernel, FilterKernel]
    srm: FilterKernel
    ccl: FilterKernel
    ccl_seed: int

    def all_kernels(self) -> tuple[FilterKernel, ...]:
        return self.rgb + (self.srm, self.ccl)


def _pattern_kernel(name: str, offsets, support: str, sigma: float, c: int) -> FilterKernel:
    taps = np.zeros((5, 5), dtype=np.float64)
    for dy, dx in offsets:
        taps[2 + dy, 2 + dx] = gaussian_tap(dx, dy, sigma)
    mass = taps.sum()
    taps[2, 2] = c * mass
    taps /= taps.sum()
    return FilterKernel(name, taps, support, predictor=True, sigma=sigma, center_weight=c)


def build_rgb_filters(sigma: float = 1.0, c: int = 1, ccl_seed: int = 0) -> FilterBank:
    """Construct the bank: three RGB predictors plus baselines.

    Off-center taps are the Gaussian of width sigma sampled on the pattern
    support; the center carries c times the off-center mass; the whole
    pattern is normalized to unit sum so it acts as a pixel predictor.
    """
    if sigma <= 0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")
    if c < 1:
        raise ParameterError(f"center weight must be a positive integer, got {c}")
    rgb = (
        _pattern_kernel("rgb1", _CROSS_R1, "cross", sigma, c),
        _pattern_kernel("rgb2", _DIAGONAL, "diagonal", sigma, c),
        _pattern_kernel("rgb3", _CROSS_R2, "cross", sigma, c),
    )
    return FilterBank(rgb=rgb, srm=build_srm_baseline(), ccl=build_ccl_baseline(ccl_seed), ccl_seed=ccl_seed)


def apply_kernel(img: ImageBuffer, kernel: FilterKernel) -> np.ndarray:
    """Filter a color image with one kernel, aggregating the three channels.

    Output is float, same height/width as the input, reflect-101 borders.
    """
    if img.channels != 3:
        raise DimensionError("the filter bank is defined cross-channel; need C=3")
    f = img.as_float()
    per = kernel.per_channel()
    out = correlate2d(f[:, :, 0], per)
    out += correlate2d(f[:, :, 1], per)
    out += correlate2d(f[:, :, 2], per)
    return out


def apply_filter_bank(img: ImageBuffer, bank: FilterBank) -> np.ndarray:
    """The three RGB prediction maps M_j, stacked as (3, H, W) float."""
    return np.stack([apply_kernel(img, k) for k in bank.rgb], axis=0)


def compute_residual(img: ImageBuffer, maps: np.ndarray) -> np.ndarray:
    """Noise residuals r_j = mean over channels of the image minus each map."""
    if img.channels != 3:
        raise DimensionError("residuals are defined for color images")
    maps = np.asarray(maps, dtype=np.float64)
    if maps.ndim == 2:
        maps = maps[None]
    if maps.shape[-2:] != (img.height, img.width):
        raise DimensionError(f"map shape {maps.shape[-2:]} != image {img.height}x{img.width}")
    mean = img.as_float().mean(axis=2)
    return mean[None] - maps


def residual_maps(img: ImageBuffer, kernel: FilterKernel) -> np.ndarray:
    """Residual of a single kernel: prediction error either way."""
    out = apply_kernel(img, kernel)
    if kernel.predictor:
        return compute_residual(img, out)[0]
    return out


def bank_residuals(img: ImageBuffer, bank: FilterBank) -> np.ndarray:
    """The three RGB noise residual maps, stacked (3, H, W)."""
    return compute_residual(img, apply_filter_bank(img, bank))


def build_srm_baseline() -> FilterKernel:
    """Second-order zero-sum high-pass kernel, 1/12 normalization."""
    return FilterKernel("srm", _SRM_KV.copy(), "dense", predictor=False)


def build_ccl_baseline(seed: int = 0) -> FilterKernel:
    """Random prediction-error kernel: center -1, off-center taps sum to 1."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    while True:
        taps = rng.normal(0.0, 1.0, size=(5, 5))
        taps[2, 2] = 0.0
        # Rejection keeps the unit-sum projection numerically tame.
        if abs(taps.sum()) >= 0.5:
            break
    taps *= 1.0 / taps.sum()
    taps[2, 2] = -1.0
    return FilterKernel("ccl", taps, "dense", predictor=False)


def neighborhood_correlation(values: np.ndarray, direction: str) -> float:
    """Absolute Pearson correlation between a map and its 1-pixel shift."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"need a 2-D map, got shape {arr.shape}")
    if direction == "horizontal":
        if arr.shape[1] < 2:
            raise ParameterError("map too narrow for a horizontal shift")
        a, b = arr[:, :-1], arr[:, 1:]
    elif direction == "vertical":
        if arr.shape[0] < 2:
            raise ParameterError("map too short for a vertical shift")
        a, b = arr[:-1, :], arr[1:, :]
    elif direction == "diagonal":
        if arr.shape[0] < 2 or arr.shape[1] < 2:
            raise ParameterError("map too small for a diagonal shift")
        a, b = arr[:-1, :-1], arr[1:, 1:]
    else:
        raise ParameterError(f"unknown direction {direction!r}")
    return pearson(a, b)
