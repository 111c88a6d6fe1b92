"""Channel-correlation and pixel-intensity statistics.

The correlation convention is the absolute Pearson coefficient,
|cov(x, y)| / (std(x) std(y)), so values live in [0, 1] and anti-correlation
counts as correlation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, UndefinedCorrelationError
from .image import ImageBuffer
from .ops import Chain, apply_chain, derive_seed

CHANNEL_PAIRS = (("R/G", 0, 1), ("G/B", 1, 2), ("R/B", 0, 2))


def pearson(x, y) -> float:
    """Absolute Pearson correlation of two equal-length sequences."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise ParameterError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise ParameterError("need at least 2 samples")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt((xc * xc).sum()) * np.sqrt((yc * yc).sum())
    if denom == 0.0:
        raise UndefinedCorrelationError("zero variance input")
    return float(abs((xc * yc).sum()) / denom)


def channel_correlation(img: ImageBuffer) -> dict[str, float]:
    """Absolute Pearson correlation for the R/G, G/B, R/B channel pairs."""
    if img.channels != 3:
        raise ParameterError(f"need a color image, got C={img.channels}")
    f = img.as_float()
    return {name: pearson(f[:, :, a], f[:, :, b]) for name, a, b in CHANNEL_PAIRS}


@dataclass(frozen=True)
class CorrelationReport:
    """Corpus-level summary of one channel pair under one chain."""

    pair: str
    mean: float
    variance: float
    n: int


def correlation_stats(images: list[ImageBuffer], chain: Chain, seed: int = 0) -> list[CorrelationReport]:
    """Apply a chain to every image and summarize per-pair channel correlation.

    Deterministic given (image order, chain, seed): image i uses sub-seed
    derive_seed(seed, i) for any stochastic step.
    """
    if not images:
        raise ParameterError("empty corpus")
    values = {name: [] for name, _, _ in CHANNEL_PAIRS}
    for i, img in enumerate(images):
        processed = apply_chain(img, chain, seed=derive_seed(seed, i))
        for name, r in channel_correlation(processed).items():
            values[name].append(r)
    reports = []
    for name, _, _ in CHANNEL_PAIRS:
        arr = np.array(values[name], dtype=np.float64)
        reports.append(CorrelationReport(name, float(arr.mean()), float(arr.var()), arr.size))
    return reports


def intensity_histogram(
    values: np.ndarray,
    bins: int,
    value_range: tuple[float, float] | None = None,
    neighbor_diff: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Histogram of a map's values, or of its horizontal neighbor differences.

    Returns (counts, bin_edges). The range defaults to the data extent.
    """
    if bins < 2:
        raise ParameterError(f"bins must be >= 2, got {bins}")
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ParameterError("empty map")
    if neighbor_diff:
        if arr.ndim != 2 or arr.shape[1] < 2:
            raise ParameterError("neighbor-diff mode needs a 2-D map at least 2 wide")
        arr = arr[:, 1:] - arr[:, :-1]
    counts, edges = np.histogram(arr.ravel(), bins=bins, range=value_range)
    return counts, edges
