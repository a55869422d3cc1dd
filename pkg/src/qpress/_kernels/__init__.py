"""Kernel backend selection.

The hot numeric loops (block DCT, quantization with refinement, zig-zag /
run-length coding, HVS metric accumulation) exist twice: a numba @njit
build and a pure-numpy build. Selection, once at import time:

  * QPRESS_KERNELS=numpy  forces the pure-numpy path;
  * QPRESS_KERNELS=numba  requires numba (ImportError if missing);
  * unset: numba when importable, numpy otherwise.

Both backends produce identical bitstreams; benchmarks/bench_kernels.py
compares their throughput.
"""

from __future__ import annotations

import os

_choice = os.environ.get("QPRESS_KERNELS", "").strip().lower()

if _choice not in ("", "numpy", "numba"):
    raise ImportError(f"QPRESS_KERNELS must be 'numpy' or 'numba', not {_choice!r}")

if _choice == "numpy":
    from . import numpy_impl as impl
elif _choice == "numba":
    from . import numba_impl as impl
else:
    try:
        from . import numba_impl as impl
    except ImportError:
        from . import numpy_impl as impl

BACKEND = impl.BACKEND_NAME

dct_blocks = impl.dct_blocks
idct_blocks = impl.idct_blocks
quantize_refine = impl.quantize_refine
dequantize = impl.dequantize
zigzag_gather = impl.zigzag_gather
zigzag_scatter = impl.zigzag_scatter
rle_encode = impl.rle_encode
rle_decode = impl.rle_decode
hvs_accumulate = impl.hvs_accumulate

__all__ = [
    "BACKEND",
    "dct_blocks",
    "idct_blocks",
    "quantize_refine",
    "dequantize",
    "zigzag_gather",
    "zigzag_scatter",
    "rle_encode",
    "rle_decode",
    "hvs_accumulate",
]
