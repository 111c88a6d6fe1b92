"""Windowed 2-D helpers shared by the operation engine and the filter bank.

Border handling is reflect-101 throughout (mirror without repeating the edge
sample), which keeps residual statistics free of edge artifacts.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def reflect_pad(x: np.ndarray, ry: int, rx: int) -> np.ndarray:
    """Pad a 2-D map by (ry, rx) with reflect-101 borders."""
    return np.pad(x, ((ry, ry), (rx, rx)), mode="reflect")


def correlate2d(x: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Same-size cross-correlation of a 2-D map with reflect-101 padding."""
    kh, kw = kernel.shape
    padded = reflect_pad(np.asarray(x, dtype=np.float64), kh // 2, kw // 2)
    windows = sliding_window_view(padded, (kh, kw))
    return np.tensordot(windows, kernel, axes=([2, 3], [0, 1]))


def median2d(x: np.ndarray, k: int) -> np.ndarray:
    """Same-size k x k sliding median with reflect-101 padding."""
    padded = reflect_pad(np.asarray(x, dtype=np.float64), k // 2, k // 2)
    windows = sliding_window_view(padded, (k, k))
    return np.median(windows, axis=(2, 3))


def bilinear_resize(f: np.ndarray, h2: int, w2: int) -> np.ndarray:
    """Resize an (H, W, C) float array with half-pixel-center bilinear sampling."""
    h, w = f.shape[:2]
    sy = np.clip((np.arange(h2, dtype=np.float64) + 0.5) * h / h2 - 0.5, 0.0, h - 1.0)
    sx = np.clip((np.arange(w2, dtype=np.float64) + 0.5) * w / w2 - 0.5, 0.0, w - 1.0)
    y0 = np.floor(sy).astype(np.intp)
    x0 = np.floor(sx).astype(np.intp)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    wy = (sy - y0)[:, None, None] if f.ndim == 3 else (sy - y0)[:, None]
    wx = (sx - x0)[None, :, None] if f.ndim == 3 else (sx - x0)[None, :]
    top = f[y0][:, x0] * (1 - wx) + f[y0][:, x1] * wx
    bot = f[y1][:, x0] * (1 - wx) + f[y1][:, x1] * wx
    return top * (1 - wy) + bot * wy


def gaussian_tap(x: float, y: float, sigma: float) -> float:
    """Isotropic Gaussian weight at offset (x, y)."""
    return float(np.exp(-(x * x + y * y) / (2.0 * sigma * sigma)) / (2.0 * np.pi * sigma * sigma))


def gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    """Dense size x size Gaussian sampled at integer offsets, renormalized to sum 1."""
    r = size // 2
    offsets = np.arange(-r, r + 1, dtype=np.float64)
    yy, xx = np.meshgrid(offsets, offsets, indexing="ij")
    k = np.exp(-(xx * xx + yy * yy) / (2.0 * sigma * sigma)) / (2.0 * np.pi * sigma * sigma)
    return k / k.sum()
