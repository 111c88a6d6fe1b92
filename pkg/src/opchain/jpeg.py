"""In-memory baseline JPEG round trip.

Implements the lossy core only (color convert, 8x8 DCT, quantize, dequantize,
inverse): entropy coding is lossless and irrelevant to the pixel result, so
no bitstream is produced. Quantization tables are the stock luma/chroma
tables scaled by the IJG quality rule. Chroma is 4:4:4 unless subsample_420
is set, preserving cross-channel detail by default.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .image import ImageBuffer, quantize_u8

LUMA_TABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)

CHROMA_TABLE = np.array(
    [
        [17, 18, 24, 47, 99, 99, 99, 99],
        [18, 21, 26, 66, 99, 99, 99, 99],
        [24, 26, 56, 99, 99, 99, 99, 99],
        [47, 66, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
    ],
    dtype=np.float64,
)


def ijg_scale(qf: int) -> int:
    """IJG quality-to-scale rule."""
    if not 1 <= qf <= 100:
        raise ParameterError(f"JPEG quality factor must be in [1, 100], got {qf}")
    return 5000 // qf if qf < 50 else 200 - 2 * qf


def scaled_quant_table(base: np.ndarray, qf: int) -> np.ndarray:
    """Scale a base table by quality factor, entries clamped to [1, 255]."""
    scale = ijg_scale(qf)
    q = np.floor((base * scale + 50.0) / 100.0)
    return np.clip(q, 1.0, 255.0)


def _dct_matrix() -> np.ndarray:
    d = np.zeros((8, 8), dtype=np.float64)
    d[0, :] = 1.0 / np.sqrt(8.0)
    for k in range(1, 8):
        for j in range(8):
            d[k, j] = 0.5 * np.cos((2 * j + 1) * k * np.pi / 16.0)
    return d


_DCT = _dct_matrix()


def _to_blocks(plane: np.ndarray) -> tuple[np.ndarray, int, int]:
    """Pad a plane to 8x8 multiples (edge replication) and tile into blocks."""
    h, w = plane.shape
    ph = (-h) % 8
    pw = (-w) % 8
    if ph or pw:
        plane = np.pad(plane, ((0, ph), (0, pw)), mode="edge")
    hb, wb = plane.shape[0] // 8, plane.shape[1] // 8
    blocks = plane.reshape(hb, 8, wb, 8).transpose(0, 2, 1, 3)
    return blocks, h, w


def _from_blocks(blocks: np.ndarray, h: int, w: int) -> np.ndarray:
    hb, wb = blocks.shape[:2]
    plane = blocks.transpose(0, 2, 1, 3).reshape(hb * 8, wb * 8)
    return plane[:h, :w]


def _round_half_away(x: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def lossy_plane_round_trip(plane: np.ndarray, qtable: np.ndarray) -> np.ndarray:
    """DCT -> quantize -> dequantize -> inverse DCT for one sample plane."""
    blocks, h, w = _to_blocks(plane - 128.0)
    coef = np.einsum("ij,bcjk,lk->bcil", _DCT, blocks, _DCT)
    quantized = _round_half_away(coef / qtable)
    recon = np.einsum("ji,bcjk,kl->bcil", _DCT, quantized * qtable, _DCT)
    return _from_blocks(recon, h, w) + 128.0


def rgb_to_ycbcr(f: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    r, g, b = f[:, :, 0], f[:, :, 1], f[:, :, 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 - 0.168735892 * r - 0.331264108 * g + 0.5 * b
    cr = 128.0 + 0.5 * r - 0.418687589 * g - 0.081312411 * b
    return y, cb, cr


def ycbcr_to_rgb(y: np.ndarray, cb: np.ndarray, cr: np.ndarray) -> np.ndarray:
    r = y + 1.402 * (cr - 128.0)
    g = y - 0.344136286 * (cb - 128.0) - 0.714136286 * (cr - 128.0)
    b = y + 1.772 * (cb - 128.0)
    return np.stack([r, g, b], axis=2)


def _downsample2(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    if h % 2 or w % 2:
        plane = np.pad(plane, ((0, h % 2), (0, w % 2)), mode="edge")
        h, w = plane.shape
    return plane.reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))


def _upsample2(plane: np.ndarray, h: int, w: int) -> np.ndarray:
    return np.repeat(np.repeat(plane, 2, axis=0), 2, axis=1)[:h, :w]


def jpeg_round_trip(img: ImageBuffer, qf: int, subsample_420: bool = False) -> ImageBuffer:
    """Full deterministic compress/decompress cycle at quality qf."""
    qy = scaled_quant_table(LUMA_TABLE, qf)
    qc = scaled_quant_table(CHROMA_TABLE, qf)
    f = img.as_float()
    if img.channels == 1:
        out = lossy_plane_round_trip(f[:, :, 0], qy)[:, :, None]
        return ImageBuffer(quantize_u8(out))
    y, cb, cr = rgb_to_ycbcr(f)
    y2 = lossy_plane_round_trip(y, qy)
    if subsample_420:
        h, w = y.shape
        cb2 = _upsample2(lossy_plane_round_trip(_downsample2(cb), qc), h, w)
        cr2 = _upsample2(lossy_plane_round_trip(_downsample2(cr), qc), h, w)
    else:
        cb2 = lossy_plane_round_trip(cb, qc)
        cr2 = lossy_plane_round_trip(cr, qc)
    return ImageBuffer(quantize_u8(ycbcr_to_rgb(y2, cb2, cr2)))
