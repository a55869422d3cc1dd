"""Pure-numpy kernel implementations.

Fallback path for environments without numba (or with QPRESS_KERNELS=numpy).
Each function mirrors the numba twin in _kernels.numba_impl; per-block math
is kept identical (same matrix products in the same order) so both backends
produce the same bitstreams.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def dct_blocks(blocks: np.ndarray, dmat: np.ndarray, dmat_t: np.ndarray) -> np.ndarray:
    """(n, B, B) spatial blocks -> orthonormal 2-D DCT coefficients."""
    return np.matmul(np.matmul(dmat, blocks), dmat_t)


def idct_blocks(coeffs: np.ndarray, dmat: np.ndarray, dmat_t: np.ndarray) -> np.ndarray:
    return np.matmul(np.matmul(dmat_t, coeffs), dmat)


def quantize_refine(
    blocks: np.ndarray,
    base_step: float,
    weights: np.ndarray,
    dmat: np.ndarray,
    dmat_t: np.ndarray,
    cap: float,
    max_refine: int,
    level_shift: float,
    peak: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Transform and quantize level-shifted blocks, halving the step per
    block until the clamped reconstruction error is within ``cap``.

    The error check runs pre-rounding so each block's refinement threshold
    falls at its own step value (an integer-domain check would flip many
    blocks at the same step, putting cliffs into the quality response);
    the decoder's integer output then errs at most cap + 0.5 per sample.
    cap <= 0 disables refinement. Returns (q int32, levels uint8).
    """
    n = blocks.shape[0]
    coeffs = dct_blocks(blocks, dmat, dmat_t)
    levels = np.zeros(n, dtype=np.uint8)
    q = np.empty(blocks.shape, dtype=np.float64)
    pending = np.arange(n)
    orig = np.clip(blocks + level_shift, 0.0, peak)
    for r in range(max_refine + 1):
        div = (base_step / float(1 << r)) * weights
        cand_q = np.rint(coeffs[pending] / div)
        q[pending] = cand_q
        levels[pending] = r
        if cap <= 0 or r == max_refine:
            break
        rec = np.clip(idct_blocks(cand_q * div, dmat, dmat_t) + level_shift, 0.0, peak)
        err = np.abs(rec - orig[pending]).reshape(len(pending), -1).max(axis=1)
        pending = pending[err > cap]
        if len(pending) == 0:
            break
    return q.astype(np.int32), levels


def dequantize(
    q: np.ndarray, levels: np.ndarray, base_step: float, weights: np.ndarray
) -> np.ndarray:
    steps = base_step / (1 << levels.astype(np.int64))
    return q.astype(np.float64) * steps[:, None, None] * weights[None, :, :]


def zigzag_gather(q: np.ndarray, order: np.ndarray) -> np.ndarray:
    """(n, B, B) int32 -> flat int32 stream, blocks concatenated in scan order."""
    n = q.shape[0]
    return q.reshape(n, -1)[:, order].reshape(-1).astype(np.int32)


def zigzag_scatter(flat: np.ndarray, order: np.ndarray, n: int, block: int) -> np.ndarray:
    q = np.empty((n, block * block), dtype=np.int32)
    q[:, order] = flat.reshape(n, -1)
    return q.reshape(n, block, block)


def rle_encode(flat: np.ndarray) -> np.ndarray:
    """Zero-run-length coding: (zeros_before, nonzero_value) int32 pairs.

    Trailing zeros are implicit (the decoder knows the total length).
    """
    flat = np.asarray(flat, dtype=np.int32)
    nz = np.flatnonzero(flat)
    pairs = np.empty((len(nz), 2), dtype=np.int32)
    if len(nz):
        pairs[0, 0] = nz[0]
        pairs[1:, 0] = np.diff(nz) - 1
        pairs[:, 1] = flat[nz]
    return pairs


def rle_decode(pairs: np.ndarray, total: int) -> np.ndarray:
    flat = np.zeros(total, dtype=np.int32)
    if len(pairs):
        pos = np.cumsum(pairs[:, 0].astype(np.int64) + 1) - 1
        if pos[-1] >= total or np.any(pairs[:, 1] == 0):
            raise ValueError("corrupt run-length stream")
        flat[pos] = pairs[:, 1]
    return flat


def _vari(blocks: np.ndarray) -> np.ndarray:
    # matlab var(x(:)) * numel(x): sum of squared deviations scaled by N/(N-1)
    n = blocks.shape[-1] * blocks.shape[-2]
    mean = blocks.mean(axis=(-1, -2), keepdims=True)
    ss = ((blocks - mean) ** 2).sum(axis=(-1, -2))
    return ss * (n / (n - 1.0))


def hvs_accumulate(
    a: np.ndarray,
    b: np.ndarray,
    dmat8: np.ndarray,
    dmat8_t: np.ndarray,
    csf: np.ndarray,
    maskcof: np.ndarray,
) -> tuple[float, float, int]:
    """CSF-weighted and masking-reduced squared DCT differences over 8x8 tiles.

    Returns (masked_sum, plain_sum, coefficient_count); tiles step by 8 and
    trailing partial tiles are skipped.
    """
    h, w = a.shape
    ny, nx = h // 8, w // 8
    if ny == 0 or nx == 0:
        return 0.0, 0.0, 0
    ab = a[: ny * 8, : nx * 8].reshape(ny, 8, nx, 8).transpose(0, 2, 1, 3).reshape(-1, 8, 8)
    bb = b[: ny * 8, : nx * 8].reshape(ny, 8, nx, 8).transpose(0, 2, 1, 3).reshape(-1, 8, 8)
    adct = dct_blocks(ab, dmat8, dmat8_t)
    bdct = dct_blocks(bb, dmat8, dmat8_t)

    def mask_energy(dct: np.ndarray, spatial: np.ndarray) -> np.ndarray:
        m = (dct**2 * maskcof).sum(axis=(1, 2)) - dct[:, 0, 0] ** 2 * maskcof[0, 0]
        v = _vari(spatial)
        sub = (
            _vari(spatial[:, :4, :4])
            + _vari(spatial[:, :4, 4:])
            + _vari(spatial[:, 4:, 4:])
            + _vari(spatial[:, 4:, :4])
        )
        pop = np.where(v != 0, sub / np.where(v != 0, v, 1.0), 0.0)
        return np.sqrt(m * pop) / 32.0

    mask = np.maximum(mask_energy(adct, ab), mask_energy(bdct, bb))
    u = np.abs(adct - bdct)
    plain = ((u * csf) ** 2).sum()
    reduced = np.maximum(u - mask[:, None, None] / maskcof[None, :, :], 0.0)
    reduced[:, 0, 0] = u[:, 0, 0]  # DC is never masked
    masked = ((reduced * csf) ** 2).sum()
    return float(masked), float(plain), int(u.size)
