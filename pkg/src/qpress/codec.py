"""Codec contract and the built-in block-DCT codec.

A codec compresses one grayscale image under a single scalar control
parameter and can reconstruct it from the blob alone. The built-in codec is
a classic transform coder: edge-replicated padding to a block multiple,
level shift, orthonormal 2-D DCT per block, uniform mid-tread quantization,
zig-zag scan, zero run-length coding and a zlib entropy stage.

Two built-in profiles are registered:

  * ``bdct``      plain quantization plus a per-block step-refinement
                  backstop that bounds the worst-case sample error to about
                  max(2, 0.45 * QS); refined blocks carry their halving
                  level in the stream.
  * ``bdct-csf``  CSF-weighted quantization (coarser steps at frequencies
                  the eye resolves poorly) and no backstop; this profile
                  trades raw fidelity for perceptual efficiency the way the
                  HVS-aware coders it models do.
"""

from __future__ import annotations

import abc
import zlib
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .container import CompressedBlob
from .image import RasterImage
from .params import (
    ControlParameter,
    ParameterRange,
    ParamKind,
    QualityDirection,
    kinds_compatible,
)
from .tables import csf_weight_table, dct_matrix, zigzag_order

__all__ = [
    "CodecDescriptor",
    "Codec",
    "BlockDctCodec",
    "CodecError",
    "register_codec",
    "get_codec",
    "available_codecs",
    "decompress_with_registry",
]


class CodecError(ValueError):
    """Parameter/domain violations and corrupt payloads."""


@dataclass(frozen=True, slots=True)
class CodecDescriptor:
    codec_id: str
    param_kind: ParamKind
    default_range: ParameterRange
    quality_direction: QualityDirection

    def __post_init__(self):
        if self.param_kind is ParamKind.BITS_PER_PIXEL:
            expect = QualityDirection.INCREASES
        else:
            expect = QualityDirection.DECREASES
        if self.quality_direction is not expect:
            raise ValueError(
                f"{self.param_kind.value} codecs must declare {expect.value}"
            )


class Codec(abc.ABC):
    """Deterministic compress/decompress driven by one scalar parameter."""

    @property
    @abc.abstractmethod
    def descriptor(self) -> CodecDescriptor: ...

    @abc.abstractmethod
    def compress(self, image: RasterImage, param: ControlParameter) -> CompressedBlob: ...

    @abc.abstractmethod
    def decompress(self, blob: CompressedBlob) -> RasterImage: ...

    def _check_param(self, param: ControlParameter) -> None:
        desc = self.descriptor
        if not kinds_compatible(desc.param_kind, param.kind):
            raise CodecError(
                f"codec {desc.codec_id} takes {desc.param_kind.value} parameters, "
                f"got {param.kind.value}"
            )


_LEVEL_SHIFTS = {8: 128.0, 16: 32768.0}

# beyond peak * block_size every coefficient quantizes to zero; wider steps
# only waste header bits
_MAX_STEP_FACTOR = 4.0


class BlockDctCodec(Codec):
    def __init__(
        self,
        block_size: int = 16,
        csf_weighted: bool = False,
        error_backstop: float | None | str = "auto",
        max_refine: int = 6,
        codec_id: str | None = None,
    ):
        if block_size not in (8, 16, 32):
            raise ValueError(f"block_size must be 8, 16 or 32, got {block_size}")
        if not 0 <= max_refine <= 7:
            raise ValueError("max_refine must lie in [0, 7]")
        if error_backstop == "auto":
            # the perceptual profile deliberately allows large masked errors;
            # a raw-error backstop would undo its coarsening block by block
            error_backstop = None if csf_weighted else 0.45
        if error_backstop is not None and error_backstop <= 0:
            raise ValueError("error_backstop must be positive or None")
        self.block_size = block_size
        self.csf_weighted = csf_weighted
        self.error_backstop = error_backstop
        self.max_refine = max_refine
        if codec_id is None:
            codec_id = "bdct-csf" if csf_weighted else "bdct"
        self._descriptor = CodecDescriptor(
            codec_id=codec_id,
            param_kind=ParamKind.QUANTIZATION_STEP,
            default_range=ParameterRange(ParamKind.QUANTIZATION_STEP, 1.0, 64.0),
            quality_direction=QualityDirection.DECREASES,
        )
        self._dmat = dct_matrix(block_size)
        self._dmat_t = np.ascontiguousarray(self._dmat.T)
        self._order = zigzag_order(block_size)
        self._weights = (
            csf_weight_table(block_size) if csf_weighted else np.ones((block_size, block_size))
        )

    @property
    def descriptor(self) -> CodecDescriptor:
        return self._descriptor

    def _step_domain(self, bit_depth: int) -> tuple[float, float]:
        peak = float((1 << bit_depth) - 1)
        return 1e-3, peak * self.block_size * _MAX_STEP_FACTOR

    def _blockify(self, image: RasterImage) -> tuple[np.ndarray, int, int]:
        b = self.block_size
        h, w = image.height, image.width
        pad_h = (b - h % b) % b
        pad_w = (b - w % b) % b
        x = np.pad(image.as_float(), ((0, pad_h), (0, pad_w)), mode="edge")
        hh, ww = x.shape
        blocks = (
            x.reshape(hh // b, b, ww // b, b).transpose(0, 2, 1, 3).reshape(-1, b, b)
        )
        return np.ascontiguousarray(blocks), hh // b, ww // b

    def compress(self, image: RasterImage, param: ControlParameter) -> CompressedBlob:
        self._check_param(param)
        lo, hi = self._step_domain(image.bit_depth)
        if not lo <= param.value <= hi:
            raise CodecError(
                f"quantization step {param.value} outside codec domain [{lo}, {hi}] "
                f"for bit depth {image.bit_depth}"
            )
        shift = _LEVEL_SHIFTS[image.bit_depth]
        peak = float(image.peak)
        blocks, _, _ = self._blockify(image)
        blocks -= shift
        step = float(param.value)
        cap = 0.0
        if self.error_backstop is not None:
            cap = max(2.0, self.error_backstop * step)
        q, levels = K.quantize_refine(
            blocks, step, self._weights, self._dmat, self._dmat_t,
            cap, self.max_refine, shift, peak,
        )
        flat = K.zigzag_gather(q, self._order)
        pairs = K.rle_encode(flat)
        # run and value planes deflate better separately than interleaved
        stream = (
            levels.tobytes()
            + np.ascontiguousarray(pairs[:, 0]).astype("<i4").tobytes()
            + np.ascontiguousarray(pairs[:, 1]).astype("<i4").tobytes()
        )
        private = bytes((self.block_size, 1 if self.csf_weighted else 0))
        payload = private + zlib.compress(stream, 6)
        return CompressedBlob(
            codec_id=self._descriptor.codec_id,
            param=param,
            width=image.width,
            height=image.height,
            bit_depth=image.bit_depth,
            backend_id="zlib",
            payload=payload,
        )

    def decompress(self, blob: CompressedBlob) -> RasterImage:
        if blob.codec_id != self._descriptor.codec_id:
            raise CodecError(
                f"blob was written by {blob.codec_id!r}, not {self._descriptor.codec_id!r}"
            )
        if blob.backend_id != "zlib":
            raise CodecError(f"unknown entropy backend {blob.backend_id!r}")
        if len(blob.payload) < 3:
            raise CodecError("payload too short")
        b = blob.payload[0]
        csf = blob.payload[1]
        if b not in (8, 16, 32):
            raise CodecError(f"corrupt payload: bad block size {b}")
        try:
            stream = zlib.decompress(blob.payload[2:])
        except zlib.error as e:
            raise CodecError(f"corrupt payload: {e}") from None
        ny = -(-blob.height // b)
        nx = -(-blob.width // b)
        n = ny * nx
        if len(stream) < n or (len(stream) - n) % 8 != 0:
            raise CodecError("corrupt payload: bad stream length")
        levels = np.frombuffer(stream[:n], dtype=np.uint8)
        m = (len(stream) - n) // 8
        runs = np.frombuffer(stream[n : n + 4 * m], dtype="<i4")
        vals = np.frombuffer(stream[n + 4 * m :], dtype="<i4")
        pairs = np.stack([runs, vals], axis=1).astype(np.int32)
        if levels.max(initial=0) > self.max_refine:
            raise CodecError("corrupt payload: refinement level out of range")
        weights = csf_weight_table(b) if csf else np.ones((b, b))
        dmat = dct_matrix(b) if b != self.block_size else self._dmat
        dmat_t = np.ascontiguousarray(dmat.T)
        order = zigzag_order(b) if b != self.block_size else self._order
        try:
            flat = K.rle_decode(np.ascontiguousarray(pairs), n * b * b)
        except ValueError as e:
            raise CodecError(f"corrupt payload: {e}") from None
        q = K.zigzag_scatter(flat, order, n, b)
        coeffs = K.dequantize(q, np.ascontiguousarray(levels), float(blob.param.value), weights)
        rec = K.idct_blocks(coeffs, dmat, dmat_t)
        shift = _LEVEL_SHIFTS[blob.bit_depth]
        img = rec.reshape(ny, nx, b, b).transpose(0, 2, 1, 3).reshape(ny * b, nx * b)
        img = np.clip(np.rint(img + shift), 0, float((1 << blob.bit_depth) - 1))
        img = img[: blob.height, : blob.width]
        dtype = np.uint8 if blob.bit_depth == 8 else np.uint16
        return RasterImage(img.astype(dtype), blob.bit_depth)


# ---------------------------------------------------------------------------
# Registry

_REGISTRY: dict[str, Codec] = {}


def register_codec(codec: Codec, replace: bool = False) -> None:
    cid = codec.descriptor.codec_id
    if cid in _REGISTRY and not replace:
        raise ValueError(f"codec {cid!r} is already registered")
    _REGISTRY[cid] = codec


def get_codec(codec_id: str) -> Codec:
    try:
        return _REGISTRY[codec_id]
    except KeyError:
        raise CodecError(
            f"unknown codec {codec_id!r}; available: {sorted(_REGISTRY)}"
        ) from None


def available_codecs() -> dict[str, CodecDescriptor]:
    return {cid: c.descriptor for cid, c in sorted(_REGISTRY.items())}


def decompress_with_registry(blob: CompressedBlob) -> RasterImage:
    return get_codec(blob.codec_id).decompress(blob)


register_codec(BlockDctCodec(csf_weighted=False))
register_codec(BlockDctCodec(csf_weighted=True))
