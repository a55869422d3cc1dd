"""Self-describing container for compressed payloads.

Binary layout (all integers little-endian, documented bit-exactly in
docs/FORMATS.md):

    offset  size  field
    0       6     magic b"QPRESS"
    6       1     format version (1)
    7       1     codec_id length N
    8       N     codec_id (ascii)
    8+N     1     param kind code (0 = quantization_step, 1 = scaling_factor,
                  2 = bits_per_pixel)
    9+N     8     param value, IEEE-754 binary64
    17+N    4     width
    21+N    4     height
    25+N    1     bit depth
    26+N    1     backend id length M
    27+N    M     backend id (ascii, e.g. "zlib")
    27+N+M  8     payload length P
    35+N+M  P     payload

The payload is self-sufficient for the codec that wrote it; compression-size
accounting (CR, bpp) is measured over the payload bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .params import ControlParameter, ParamKind

__all__ = ["CompressedBlob", "ContainerError", "MAGIC", "FORMAT_VERSION"]

MAGIC = b"QPRESS"
FORMAT_VERSION = 1

_KIND_CODES = {
    ParamKind.QUANTIZATION_STEP: 0,
    ParamKind.SCALING_FACTOR: 1,
    ParamKind.BITS_PER_PIXEL: 2,
}
_CODES_KIND = {v: k for k, v in _KIND_CODES.items()}


class ContainerError(ValueError):
    """Corrupt or foreign container bytes."""


@dataclass(frozen=True, slots=True)
class CompressedBlob:
    """Compressed image plus everything needed to decode it."""

    codec_id: str
    param: ControlParameter
    width: int
    height: int
    bit_depth: int
    backend_id: str
    payload: bytes

    def __post_init__(self):
        if not self.codec_id or len(self.codec_id.encode("ascii")) > 255:
            raise ValueError("codec_id must be 1..255 ascii bytes")
        if not self.backend_id or len(self.backend_id.encode("ascii")) > 255:
            raise ValueError("backend_id must be 1..255 ascii bytes")
        if self.width < 1 or self.height < 1:
            raise ValueError("blob dimensions must be positive")
        if self.bit_depth not in (8, 16):
            raise ValueError("bit_depth must be 8 or 16")
        if len(self.payload) == 0:
            raise ValueError("payload must not be empty")

    @property
    def payload_size(self) -> int:
        return len(self.payload)

    def to_bytes(self) -> bytes:
        cid = self.codec_id.encode("ascii")
        bid = self.backend_id.encode("ascii")
        head = bytearray()
        head += MAGIC
        head.append(FORMAT_VERSION)
        head.append(len(cid))
        head += cid
        head.append(_KIND_CODES[self.param.kind])
        head += struct.pack("<d", self.param.value)
        head += struct.pack("<IIB", self.width, self.height, self.bit_depth)
        head.append(len(bid))
        head += bid
        head += struct.pack("<Q", len(self.payload))
        return bytes(head) + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "CompressedBlob":
        if len(data) < len(MAGIC) + 2 or data[: len(MAGIC)] != MAGIC:
            raise ContainerError("missing container magic")
        pos = len(MAGIC)
        version = data[pos]
        pos += 1
        if version != FORMAT_VERSION:
            raise ContainerError(f"unsupported container version {version}")
        try:
            n = data[pos]
            pos += 1
            codec_id = data[pos : pos + n].decode("ascii")
            if len(codec_id) != n:
                raise ContainerError("truncated codec id")
            pos += n
            kind_code = data[pos]
            pos += 1
            if kind_code not in _CODES_KIND:
                raise ContainerError(f"unknown param kind code {kind_code}")
            (value,) = struct.unpack_from("<d", data, pos)
            pos += 8
            width, height, depth = struct.unpack_from("<IIB", data, pos)
            pos += 9
            m = data[pos]
            pos += 1
            backend_id = data[pos : pos + m].decode("ascii")
            if len(backend_id) != m:
                raise ContainerError("truncated backend id")
            pos += m
            (plen,) = struct.unpack_from("<Q", data, pos)
            pos += 8
        except (struct.error, IndexError):
            raise ContainerError("truncated container header") from None
        payload = data[pos : pos + plen]
        if len(payload) != plen:
            raise ContainerError(f"truncated payload: header says {plen}, have {len(payload)}")
        if pos + plen != len(data):
            raise ContainerError(f"{len(data) - pos - plen} trailing bytes after payload")
        try:
            param = ControlParameter(_CODES_KIND[kind_code], value)
            return cls(codec_id, param, width, height, depth, backend_id, payload)
        except ValueError as e:
            raise ContainerError(str(e)) from None
