"""Numba-accelerated kernel implementations.

Hot inner loops of the block-DCT codec and the HVS metric family. Math per
block matches _kernels.numpy_impl exactly (same matrix products in the same
order), so both backends emit identical bitstreams.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

BACKEND_NAME = "numba"

_JIT = dict(cache=True, fastmath=False)


@njit(**_JIT, parallel=True)
def dct_blocks(blocks, dmat, dmat_t):
    n = blocks.shape[0]
    out = np.empty_like(blocks)
    for i in prange(n):
        out[i] = np.dot(np.dot(dmat, blocks[i]), dmat_t)
    return out


@njit(**_JIT, parallel=True)
def idct_blocks(coeffs, dmat, dmat_t):
    n = coeffs.shape[0]
    out = np.empty_like(coeffs)
    for i in prange(n):
        out[i] = np.dot(np.dot(dmat_t, coeffs[i]), dmat)
    return out


@njit(**_JIT, parallel=True)
def quantize_refine(blocks, base_step, weights, dmat, dmat_t, cap, max_refine, level_shift, peak):
    n = blocks.shape[0]
    b = blocks.shape[1]
    q = np.empty((n, b, b), dtype=np.int32)
    levels = np.zeros(n, dtype=np.uint8)
    for i in prange(n):
        coeffs = np.dot(np.dot(dmat, blocks[i]), dmat_t)
        orig = np.minimum(np.maximum(blocks[i] + level_shift, 0.0), peak)
        for r in range(max_refine + 1):
            div = (base_step / (1 << r)) * weights
            cand = np.rint(coeffs / div)
            accept = cap <= 0 or r == max_refine
            if not accept:
                rec = np.dot(np.dot(dmat_t, cand * div), dmat)
                rec_c = np.minimum(np.maximum(rec + level_shift, 0.0), peak)
                err = np.abs(rec_c - orig).max()
                accept = err <= cap
            if accept:
                q[i] = cand.astype(np.int32)
                levels[i] = r
                break
    return q, levels


@njit(**_JIT, parallel=True)
def dequantize(q, levels, base_step, weights):
    n = q.shape[0]
    out = np.empty(q.shape, dtype=np.float64)
    for i in prange(n):
        step = base_step / (1 << np.int64(levels[i]))
        out[i] = q[i].astype(np.float64) * step * weights
    return out


@njit(**_JIT)
def zigzag_gather(q, order):
    n = q.shape[0]
    b = q.shape[1]
    bb = b * b
    flat = np.empty(n * bb, dtype=np.int32)
    for i in range(n):
        base = i * bb
        for j in range(bb):
            flat[base + j] = q[i, order[j] // b, order[j] % b]
    return flat


@njit(**_JIT)
def zigzag_scatter(flat, order, n, block):
    bb = block * block
    q = np.empty((n, block, block), dtype=np.int32)
    for i in range(n):
        base = i * bb
        for j in range(bb):
            q[i, order[j] // block, order[j] % block] = flat[base + j]
    return q


@njit(**_JIT)
def rle_encode(flat):
    m = 0
    for v in flat:
        if v != 0:
            m += 1
    pairs = np.empty((m, 2), dtype=np.int32)
    run = 0
    k = 0
    for v in flat:
        if v == 0:
            run += 1
        else:
            pairs[k, 0] = run
            pairs[k, 1] = v
            run = 0
            k += 1
    return pairs


@njit(**_JIT)
def rle_decode(pairs, total):
    flat = np.zeros(total, dtype=np.int32)
    pos = 0
    for k in range(pairs.shape[0]):
        pos += pairs[k, 0]
        if pos >= total or pairs[k, 1] == 0:
            raise ValueError("corrupt run-length stream")
        flat[pos] = pairs[k, 1]
        pos += 1
    return flat


@njit(**_JIT)
def _vari(block):
    n = block.size
    mean = block.mean()
    ss = 0.0
    for v in block.ravel():
        ss += (v - mean) ** 2
    return ss * (n / (n - 1.0))


@njit(**_JIT)
def _mask_energy(dct, spatial, maskcof):
    m = 0.0
    for k in range(8):
        for l in range(8):
            if k != 0 or l != 0:
                m += dct[k, l] ** 2 * maskcof[k, l]
    v = _vari(spatial)
    pop = 0.0
    if v != 0.0:
        sub = (
            _vari(spatial[:4, :4])
            + _vari(spatial[:4, 4:])
            + _vari(spatial[4:, 4:])
            + _vari(spatial[4:, :4])
        )
        pop = sub / v
    return np.sqrt(m * pop) / 32.0


@njit(**_JIT, parallel=True)
def hvs_accumulate(a, b, dmat8, dmat8_t, csf, maskcof):
    h, w = a.shape
    ny = h // 8
    nx = w // 8
    masked_parts = np.zeros(ny, dtype=np.float64)
    plain_parts = np.zeros(ny, dtype=np.float64)
    for iy in prange(ny):
        for ix in range(nx):
            ab = np.ascontiguousarray(a[iy * 8 : iy * 8 + 8, ix * 8 : ix * 8 + 8])
            bb = np.ascontiguousarray(b[iy * 8 : iy * 8 + 8, ix * 8 : ix * 8 + 8])
            adct = np.dot(np.dot(dmat8, ab), dmat8_t)
            bdct = np.dot(np.dot(dmat8, bb), dmat8_t)
            mask = max(_mask_energy(adct, ab, maskcof), _mask_energy(bdct, bb, maskcof))
            for k in range(8):
                for l in range(8):
                    u = abs(adct[k, l] - bdct[k, l])
                    plain_parts[iy] += (u * csf[k, l]) ** 2
                    if k != 0 or l != 0:
                        red = u - mask / maskcof[k, l]
                        u = red if red > 0.0 else 0.0
                    masked_parts[iy] += (u * csf[k, l]) ** 2
    return masked_parts.sum(), plain_parts.sum(), ny * nx * 64
