"""Raster and spectral-cube data model, PGM and RAW file I/O, size arithmetic.

Grayscale images are the unit of compression and metric evaluation.
Multichannel (hyperspectral) data is a stack of same-shaped bands stored
band-sequentially in a RAW file with a small text sidecar describing the
layout.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RasterImage",
    "SpectralCube",
    "RawDescriptor",
    "load_pgm",
    "store_pgm",
    "raw_to_cube",
    "cube_to_raw",
    "parse_raw_descriptor",
    "format_raw_descriptor",
    "compression_ratio",
    "bits_per_pixel",
]

SUPPORTED_DEPTHS = (8, 16)


class ImageFormatError(ValueError):
    """Malformed or unsupported image file content."""


def _dtype_for_depth(bit_depth: int):
    return np.uint8 if bit_depth == 8 else np.uint16


@dataclass(frozen=True, slots=True)
class RasterImage:
    """Single-channel raster with explicit bit depth.

    samples is a read-only (height, width) uint8/uint16 array; every sample
    must be < 2**bit_depth.
    """

    samples: np.ndarray
    bit_depth: int

    def __post_init__(self):
        if self.bit_depth not in SUPPORTED_DEPTHS:
            raise ValueError(f"bit_depth must be one of {SUPPORTED_DEPTHS}, got {self.bit_depth}")
        arr = np.asarray(self.samples)
        if arr.ndim != 2:
            raise ValueError(f"samples must be 2-D (height, width), got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"empty image shape {arr.shape}")
        want = _dtype_for_depth(self.bit_depth)
        if arr.dtype != want:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError(f"samples must be integer, got dtype {arr.dtype}")
            if arr.min() < 0 or arr.max() >= (1 << self.bit_depth):
                raise ValueError(f"samples out of range for bit_depth {self.bit_depth}")
            arr = arr.astype(want)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def peak(self) -> int:
        return (1 << self.bit_depth) - 1

    @property
    def raw_byte_size(self) -> int:
        return self.width * self.height * (self.bit_depth // 8)

    def as_float(self) -> np.ndarray:
        return self.samples.astype(np.float64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.bit_depth == other.bit_depth and np.array_equal(self.samples, other.samples)

    def __hash__(self):
        return hash((self.bit_depth, self.samples.shape, self.samples.tobytes()))


@dataclass(frozen=True, slots=True)
class SpectralCube:
    """Ordered stack of bands sharing width, height and bit depth."""

    bands: tuple[RasterImage, ...]
    band_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        bands = tuple(self.bands)
        if len(bands) < 1:
            raise ValueError("cube needs at least one band")
        first = bands[0]
        for i, b in enumerate(bands):
            if (b.width, b.height, b.bit_depth) != (first.width, first.height, first.bit_depth):
                raise ValueError(
                    f"band {i} shape/depth ({b.width}x{b.height}/{b.bit_depth}) differs from "
                    f"band 0 ({first.width}x{first.height}/{first.bit_depth})"
                )
        object.__setattr__(self, "bands", bands)
        if self.band_labels is not None:
            labels = tuple(self.band_labels)
            if len(labels) != len(bands):
                raise ValueError("band_labels length must match band count")
            object.__setattr__(self, "band_labels", labels)

    @property
    def width(self) -> int:
        return self.bands[0].width

    @property
    def height(self) -> int:
        return self.bands[0].height

    @property
    def bit_depth(self) -> int:
        return self.bands[0].bit_depth

    def __len__(self) -> int:
        return len(self.bands)


# ---------------------------------------------------------------------------
# PGM (binary P5)

_PGM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _read_pgm_token(buf: bytes, pos: int) -> tuple[bytes, int]:
    m = _PGM_TOKEN.match(buf, pos)
    if not m:
        raise ImageFormatError("truncated PGM header")
    return m.group(1), m.end()


def load_pgm(data: bytes) -> RasterImage:
    """Parse a binary-greyscale (P5) PGM file.

    Accepts comments and arbitrary whitespace in the header; maxval must be
    255 or 65535. 16-bit samples are read big-endian per the PGM convention.
    """
    if not data.startswith(b"P5"):
        raise ImageFormatError("not a binary PGM (missing P5 magic)")
    pos = 2
    fields = []
    for _ in range(3):
        tok, pos = _read_pgm_token(data, pos)
        try:
            fields.append(int(tok))
        except ValueError:
            raise ImageFormatError(f"non-numeric PGM header field {tok!r}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise ImageFormatError(f"bad PGM dimensions {width}x{height}")
    if maxval == 255:
        bit_depth = 8
    elif maxval == 65535:
        bit_depth = 16
    else:
        raise ImageFormatError(f"unsupported maxval {maxval} (expected 255 or 65535)")
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(data) or data[pos : pos + 1] not in (b"\n", b" ", b"\t", b"\r"):
        raise ImageFormatError("missing whitespace after PGM maxval")
    pos += 1
    nbytes = width * height * (bit_depth // 8)
    raster = data[pos : pos + nbytes]
    if len(raster) != nbytes:
        raise ImageFormatError(f"truncated PGM payload: need {nbytes} bytes, have {len(raster)}")
    dt = np.dtype(">u2") if bit_depth == 16 else np.dtype("u1")
    arr = np.frombuffer(raster, dtype=dt).reshape(height, width)
    return RasterImage(arr.astype(_dtype_for_depth(bit_depth)), bit_depth)


def store_pgm(image: RasterImage) -> bytes:
    """Serialize to canonical P5 bytes: ``P5\\n<w> <h>\\n<maxval>\\n`` + raster."""
    header = f"P5\n{image.width} {image.height}\n{image.peak}\n".encode("ascii")
    if image.bit_depth == 16:
        raster = image.samples.astype(">u2").tobytes()
    else:
        raster = image.samples.tobytes()
    return header + raster


# ---------------------------------------------------------------------------
# RAW band-sequential + sidecar descriptor

_BYTE_ORDERS = ("little", "big")


@dataclass(frozen=True, slots=True)
class RawDescriptor:
    """Sidecar description of a band-sequential RAW buffer."""

    width: int
    height: int
    bands: int
    bit_depth: int
    byte_order: str = "little"
    layout: str = "band_sequential"

    def __post_init__(self):
        if self.width < 1 or self.height < 1 or self.bands < 1:
            raise ValueError("width, height and bands must be positive")
        if self.bit_depth not in SUPPORTED_DEPTHS:
            raise ValueError(f"bit_depth must be one of {SUPPORTED_DEPTHS}")
        if self.byte_order not in _BYTE_ORDERS:
            raise ValueError(f"byte_order must be one of {_BYTE_ORDERS}")
        if self.layout != "band_sequential":
            raise ValueError("only band_sequential layout is supported")

    @property
    def byte_size(self) -> int:
        return self.width * self.height * self.bands * (self.bit_depth // 8)


_DESCRIPTOR_KEYS = ("width", "height", "bands", "bit_depth", "byte_order", "layout")


def parse_raw_descriptor(text: str) -> RawDescriptor:
    """Parse ``key: value`` sidecar lines. Unknown keys are rejected."""
    values: dict[str, str] = {}
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise ImageFormatError(f"descriptor line {ln} is not 'key: value': {line!r}")
        key, _, val = line.partition(":")
        key = key.strip()
        if key not in _DESCRIPTOR_KEYS:
            raise ImageFormatError(f"unknown descriptor key {key!r} on line {ln}")
        if key in values:
            raise ImageFormatError(f"duplicate descriptor key {key!r} on line {ln}")
        values[key] = val.strip()
    try:
        return RawDescriptor(
            width=int(values["width"]),
            height=int(values["height"]),
            bands=int(values["bands"]),
            bit_depth=int(values["bit_depth"]),
            byte_order=values.get("byte_order", "little"),
            layout=values.get("layout", "band_sequential"),
        )
    except KeyError as e:
        raise ImageFormatError(f"descriptor is missing required key {e.args[0]!r}") from None
    except ValueError as e:
        raise ImageFormatError(str(e)) from None


def format_raw_descriptor(desc: RawDescriptor) -> str:
    return (
        f"width: {desc.width}\n"
        f"height: {desc.height}\n"
        f"bands: {desc.bands}\n"
        f"bit_depth: {desc.bit_depth}\n"
        f"byte_order: {desc.byte_order}\n"
        f"layout: {desc.layout}\n"
    )


def raw_to_cube(data: bytes, desc: RawDescriptor) -> SpectralCube:
    """Decode a band-sequential RAW buffer into a cube (lossless bijection)."""
    if len(data) != desc.byte_size:
        raise ImageFormatError(
            f"RAW buffer is {len(data)} bytes but descriptor implies {desc.byte_size}"
        )
    if desc.bit_depth == 16:
        dt = np.dtype("<u2") if desc.byte_order == "little" else np.dtype(">u2")
    else:
        dt = np.dtype("u1")
    arr = np.frombuffer(data, dtype=dt).reshape(desc.bands, desc.height, desc.width)
    bands = tuple(
        RasterImage(arr[i].astype(_dtype_for_depth(desc.bit_depth)), desc.bit_depth)
        for i in range(desc.bands)
    )
    return SpectralCube(bands)


def cube_to_raw(cube: SpectralCube, byte_order: str = "little") -> tuple[bytes, RawDescriptor]:
    """Inverse of :func:`raw_to_cube`."""
    desc = RawDescriptor(
        width=cube.width,
        height=cube.height,
        bands=len(cube),
        bit_depth=cube.bit_depth,
        byte_order=byte_order,
    )
    if cube.bit_depth == 16:
        dt = np.dtype("<u2") if byte_order == "little" else np.dtype(">u2")
        chunks = [b.samples.astype(dt).tobytes() for b in cube.bands]
    else:
        chunks = [b.samples.tobytes() for b in cube.bands]
    return b"".join(chunks), desc


# ---------------------------------------------------------------------------
# Size arithmetic

def _payload_len(compressed) -> int:
    if isinstance(compressed, int):
        n = compressed
    else:
        n = len(compressed.payload)
    if n <= 0:
        raise ValueError("payload is empty")
    return n


def compression_ratio(image: RasterImage, compressed) -> float:
    """Uncompressed raw sample bytes divided by compressed payload bytes.

    ``compressed`` is a blob with a ``payload`` attribute or a plain byte count.
    """
    return image.raw_byte_size / _payload_len(compressed)


def bits_per_pixel(image: RasterImage, compressed) -> float:
    """Compressed bits per image pixel; bpp * CR == bit_depth."""
    return 8.0 * _payload_len(compressed) / (image.width * image.height)
