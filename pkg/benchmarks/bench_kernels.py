#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the hot kernels on synthetic data (per-kernel medians over several
repeats), then a full compress/decompress cycle per backend via
QPRESS_KERNELS subprocesses. Run:

    python benchmarks/bench_kernels.py [--size 512] [--repeats 5]
"""

from __future__ import annotations

import argparse
import os
import statistics
import subprocess
import sys
import time

import numpy as np

from qpress._kernels import numpy_impl
from qpress.tables import CSF_COEFFS, MASK_COEFFS, dct_matrix, zigzag_order

try:
    from qpress._kernels import numba_impl
except ImportError:
    numba_impl = None

BLOCK = 16


def timeit(fn, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def make_inputs(size: int):
    rng = np.random.default_rng(11)
    img = rng.integers(0, 256, (size, size)).astype(np.float64)
    n = (size // BLOCK) ** 2
    blocks = np.ascontiguousarray(
        img.reshape(size // BLOCK, BLOCK, size // BLOCK, BLOCK)
        .transpose(0, 2, 1, 3)
        .reshape(n, BLOCK, BLOCK)
        - 128.0
    )
    dmat = dct_matrix(BLOCK)
    dmat_t = np.ascontiguousarray(dmat.T)
    order = zigzag_order(BLOCK)
    weights = np.ones((BLOCK, BLOCK))
    noisy = np.clip(img + rng.normal(0, 6, img.shape), 0, 255)
    d8 = dct_matrix(8)
    d8_t = np.ascontiguousarray(d8.T)
    return img, noisy, blocks, dmat, dmat_t, order, weights, d8, d8_t


def kernel_benchmarks(size: int, repeats: int):
    img, noisy, blocks, dmat, dmat_t, order, weights, d8, d8_t = make_inputs(size)
    coeffs = numpy_impl.dct_blocks(blocks, dmat, dmat_t)
    q, levels = numpy_impl.quantize_refine(
        blocks, 8.0, weights, dmat, dmat_t, 4.0, 6, 128.0, 255.0
    )
    flat = numpy_impl.zigzag_gather(q, order)

    cases = [
        ("dct_blocks", lambda m: lambda: m.dct_blocks(blocks, dmat, dmat_t)),
        ("idct_blocks", lambda m: lambda: m.idct_blocks(coeffs, dmat, dmat_t)),
        (
            "quantize_refine",
            lambda m: lambda: m.quantize_refine(
                blocks, 8.0, weights, dmat, dmat_t, 4.0, 6, 128.0, 255.0
            ),
        ),
        ("dequantize", lambda m: lambda: m.dequantize(q, levels, 8.0, weights)),
        ("zigzag_gather", lambda m: lambda: m.zigzag_gather(q, order)),
        ("rle_encode", lambda m: lambda: m.rle_encode(flat)),
        (
            "hvs_accumulate",
            lambda m: lambda: m.hvs_accumulate(img, noisy, d8, d8_t, CSF_COEFFS, MASK_COEFFS),
        ),
    ]

    print(f"\nper-kernel medians, {size}x{size} input, {repeats} repeats")
    print(f"{'kernel':<18} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, make in cases:
        t_np = timeit(make(numpy_impl), repeats)
        if numba_impl is None:
            print(f"{name:<18} {t_np * 1e3:9.2f}ms {'n/a':>10} {'n/a':>8}")
            continue
        make(numba_impl)()  # JIT warmup
        t_nb = timeit(make(numba_impl), repeats)
        print(
            f"{name:<18} {t_np * 1e3:9.2f}ms {t_nb * 1e3:9.2f}ms {t_np / t_nb:7.1f}x"
        )


def end_to_end(size: int, repeats: int):
    code = (
        "import time, numpy as np\n"
        "import qpress\n"
        f"rng = np.random.default_rng(11)\n"
        f"img = qpress.RasterImage(rng.integers(0, 256, ({size}, {size})).astype(np.uint8), 8)\n"
        "codec = qpress.get_codec('bdct')\n"
        "p = qpress.ControlParameter('quantization_step', 8.0)\n"
        "blob = codec.compress(img, p)\n"
        "codec.decompress(blob)\n"
        "t0 = time.perf_counter()\n"
        f"for _ in range({repeats}):\n"
        "    blob = codec.compress(img, p)\n"
        "    codec.decompress(blob)\n"
        f"print((time.perf_counter() - t0) / {repeats})\n"
    )
    print(f"\nfull compress+decompress cycle, {size}x{size}")
    results = {}
    for backend in ("numpy", "numba"):
        env = dict(os.environ, QPRESS_KERNELS=backend)
        proc = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, env=env
        )
        if proc.returncode != 0:
            print(f"{backend:<8} unavailable: {proc.stderr.strip().splitlines()[-1]}")
            continue
        results[backend] = float(proc.stdout.strip().splitlines()[-1])
        print(f"{backend:<8} {results[backend] * 1e3:9.2f}ms")
    if len(results) == 2:
        print(f"speedup  {results['numpy'] / results['numba']:9.1f}x")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=512)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    print(f"numba available: {numba_impl is not None}")
    kernel_benchmarks(args.size, args.repeats)
    end_to_end(args.size, args.repeats)


if __name__ == "__main__":
    main()
