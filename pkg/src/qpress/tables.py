"""Constant tables for HVS-weighted coding and metrics.

CSF_COEFFS and MASK_COEFFS are the 8x8 per-frequency contrast-sensitivity
and contrast-masking tables of the PSNR-HVS metric family, copied from the
authors' public reference implementation (psnrhvsm.m, N. Ponomarenko et al.).
They are defined for the orthonormal 8x8 DCT over samples in the 0..255
range.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "CSF_COEFFS",
    "MASK_COEFFS",
    "dct_matrix",
    "zigzag_order",
    "csf_weight_table",
    "WEIGHT_TABLE_BLOCK_SIZES",
]

CSF_COEFFS = np.array(
    [
        [1.608443, 2.339554, 2.573509, 1.608443, 1.072295, 0.643377, 0.504610, 0.421887],
        [2.144591, 2.144591, 1.838221, 1.354478, 0.989811, 0.443708, 0.428918, 0.467911],
        [1.838221, 1.979622, 1.608443, 1.072295, 0.643377, 0.451493, 0.372972, 0.459555],
        [1.838221, 1.513829, 1.169777, 0.887417, 0.504610, 0.295806, 0.321689, 0.415082],
        [1.429727, 1.169777, 0.695543, 0.459555, 0.378457, 0.236102, 0.249855, 0.334222],
        [1.072295, 0.735288, 0.467911, 0.402111, 0.317717, 0.247453, 0.227744, 0.279729],
        [0.525206, 0.402111, 0.329937, 0.295806, 0.249855, 0.212687, 0.214459, 0.254803],
        [0.357432, 0.279729, 0.270896, 0.262603, 0.229778, 0.257351, 0.249855, 0.259950],
    ]
)
CSF_COEFFS.setflags(write=False)

MASK_COEFFS = np.array(
    [
        [0.390625, 0.826446, 1.000000, 0.390625, 0.173611, 0.062500, 0.038447, 0.026874],
        [0.694444, 0.694444, 0.510204, 0.277008, 0.147929, 0.029727, 0.027778, 0.033058],
        [0.510204, 0.591716, 0.390625, 0.173611, 0.062500, 0.030779, 0.021004, 0.031888],
        [0.510204, 0.346021, 0.206612, 0.118906, 0.038447, 0.013212, 0.015625, 0.026015],
        [0.308642, 0.206612, 0.073046, 0.031888, 0.021626, 0.008417, 0.009426, 0.016866],
        [0.173611, 0.081633, 0.033058, 0.024414, 0.015242, 0.009246, 0.007831, 0.011815],
        [0.041649, 0.024414, 0.016437, 0.013212, 0.009426, 0.006830, 0.006944, 0.009803],
        [0.019290, 0.011815, 0.011080, 0.010412, 0.007972, 0.010000, 0.009426, 0.010203],
    ]
)
MASK_COEFFS.setflags(write=False)


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis matrix; rows are basis vectors."""
    k = np.arange(n, dtype=np.float64)
    mat = np.cos(np.pi * (2.0 * k[None, :] + 1.0) * k[:, None] / (2.0 * n)) * np.sqrt(2.0 / n)
    mat[0, :] = 1.0 / np.sqrt(n)
    return mat


def zigzag_order(n: int) -> np.ndarray:
    """Flat indices of an n*n block in zig-zag (anti-diagonal) scan order."""
    idx = np.arange(n * n, dtype=np.int64).reshape(n, n)
    out = []
    for s in range(2 * n - 1):
        i_lo = max(0, s - n + 1)
        i_hi = min(s, n - 1)
        rng = range(i_lo, i_hi + 1)
        if s % 2 == 0:
            rng = reversed(rng)
        out.extend(idx[i, s - i] for i in rng)
    return np.array(out, dtype=np.int64)


WEIGHT_TABLE_BLOCK_SIZES = (8, 16, 32)


def csf_weight_table(block_size: int) -> np.ndarray:
    """Per-frequency quantization multipliers for the CSF-weighted codec.

    Derived from the reciprocal of CSF_COEFFS: the less sensitive the eye is
    to a frequency, the coarser it may be quantized. The 8x8 table is
    resampled bilinearly to the requested block size (frequencies above the
    table's grid clamp to its highest row/column), floored at 1 and made
    non-decreasing along both axes; the DC weight is exactly 1 so DC is never
    coarsened beyond the base step.
    """
    if block_size not in WEIGHT_TABLE_BLOCK_SIZES:
        raise ValueError(
            f"unsupported block size {block_size}; expected one of {WEIGHT_TABLE_BLOCK_SIZES}"
        )
    recip = CSF_COEFFS[0, 0] / CSF_COEFFS
    coords = np.minimum(np.arange(block_size) * 8.0 / block_size, 7.0)
    i0 = np.floor(coords).astype(np.int64)
    i1 = np.minimum(i0 + 1, 7)
    f = coords - i0
    w = (
        (1 - f[:, None]) * (1 - f[None, :]) * recip[np.ix_(i0, i0)]
        + (1 - f[:, None]) * f[None, :] * recip[np.ix_(i0, i1)]
        + f[:, None] * (1 - f[None, :]) * recip[np.ix_(i1, i0)]
        + f[:, None] * f[None, :] * recip[np.ix_(i1, i1)]
    )
    w = np.maximum(w, 1.0)
    w = np.maximum.accumulate(np.maximum.accumulate(w, axis=0), axis=1)
    w[0, 0] = 1.0
    return w
