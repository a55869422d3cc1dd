"""Adapter exposing external command-line coders through the codec contract.

The adapter shells out to configured encode/decode command templates via
per-call temporary files; determinism is the external tool's business. The
config is a ``key = value`` text file:

    name = mytool
    encode_cmd = mytool encode --in {input} --out {output} --q {param}
    decode_cmd = mytool decode --in {input} --out {output}
    param_kind = quantization_step
    param_min = 1
    param_max = 64
    quality_direction = metric_decreases_with_param

Missing binaries are reported at registration, not mid-search. The blob
payload is the external tool's output file verbatim, so stored-file sizes
and CR accounting line up with what the tool itself would produce.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
import tempfile
from pathlib import Path

from .codec import Codec, CodecDescriptor, CodecError
from .container import CompressedBlob
from .image import RasterImage, load_pgm, store_pgm
from .params import ControlParameter, ParameterRange, ParamKind, QualityDirection

__all__ = ["ExternalCodec", "load_adapter_config", "AdapterConfigError"]

TMPDIR_ENV = "QPRESS_TMPDIR"

_REQUIRED_KEYS = ("name", "encode_cmd", "decode_cmd", "param_kind", "param_min", "param_max")


class AdapterConfigError(ValueError):
    pass


def load_adapter_config(text: str) -> dict:
    values: dict[str, str] = {}
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise AdapterConfigError(f"line {ln} is not 'key = value': {line!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    missing = [k for k in _REQUIRED_KEYS if k not in values]
    if missing:
        raise AdapterConfigError(f"config is missing keys: {', '.join(missing)}")
    return values


class ExternalCodec(Codec):
    def __init__(
        self,
        name: str,
        encode_cmd: str,
        decode_cmd: str,
        param_kind: ParamKind,
        param_range: ParameterRange,
        quality_direction: QualityDirection | None = None,
    ):
        if quality_direction is None:
            quality_direction = (
                QualityDirection.INCREASES
                if param_kind is ParamKind.BITS_PER_PIXEL
                else QualityDirection.DECREASES
            )
        self._descriptor = CodecDescriptor(
            codec_id=f"ext-{name}",
            param_kind=param_kind,
            default_range=param_range,
            quality_direction=quality_direction,
        )
        self.encode_cmd = encode_cmd
        self.decode_cmd = decode_cmd
        for template, placeholders in (
            (encode_cmd, ("{input}", "{output}", "{param}")),
            (decode_cmd, ("{input}", "{output}")),
        ):
            for ph in placeholders:
                if ph not in template:
                    raise AdapterConfigError(f"command {template!r} lacks placeholder {ph}")
        self._check_tool(encode_cmd)
        self._check_tool(decode_cmd)

    @classmethod
    def from_config(cls, text: str) -> "ExternalCodec":
        cfg = load_adapter_config(text)
        try:
            kind = ParamKind(cfg["param_kind"])
            prange = ParameterRange(kind, float(cfg["param_min"]), float(cfg["param_max"]))
            direction = (
                QualityDirection(cfg["quality_direction"])
                if "quality_direction" in cfg
                else None
            )
        except ValueError as e:
            raise AdapterConfigError(str(e)) from None
        return cls(cfg["name"], cfg["encode_cmd"], cfg["decode_cmd"], kind, prange, direction)

    @staticmethod
    def _check_tool(template: str) -> None:
        argv0 = shlex.split(template)[0]
        if shutil.which(argv0) is None:
            raise AdapterConfigError(f"tool not found: {argv0!r}")

    @property
    def descriptor(self) -> CodecDescriptor:
        return self._descriptor

    def _run(self, cmd: str) -> None:
        proc = subprocess.run(
            shlex.split(cmd), capture_output=True, text=True, check=False
        )
        if proc.returncode != 0:
            raise CodecError(
                f"external command failed with status {proc.returncode}: {cmd}\n"
                f"stderr: {proc.stderr.strip()[:2000]}"
            )

    def _tmpdir(self):
        return tempfile.TemporaryDirectory(
            prefix="qpress-ext-", dir=os.environ.get(TMPDIR_ENV) or None
        )

    def compress(self, image: RasterImage, param: ControlParameter) -> CompressedBlob:
        self._check_param(param)
        with self._tmpdir() as td:
            src = Path(td) / "input.pgm"
            dst = Path(td) / "output.bin"
            src.write_bytes(store_pgm(image))
            cmd = self.encode_cmd.format(input=src, output=dst, param=f"{param.value:g}")
            self._run(cmd)
            if not dst.exists():
                raise CodecError(f"encode command produced no output file: {cmd}")
            payload = dst.read_bytes()
        return CompressedBlob(
            codec_id=self._descriptor.codec_id,
            param=param,
            width=image.width,
            height=image.height,
            bit_depth=image.bit_depth,
            backend_id="external",
            payload=payload,
        )

    def decompress(self, blob: CompressedBlob) -> RasterImage:
        if blob.codec_id != self._descriptor.codec_id:
            raise CodecError(
                f"blob was written by {blob.codec_id!r}, not {self._descriptor.codec_id!r}"
            )
        with self._tmpdir() as td:
            src = Path(td) / "input.bin"
            dst = Path(td) / "output.pgm"
            src.write_bytes(blob.payload)
            cmd = self.decode_cmd.format(input=src, output=dst)
            self._run(cmd)
            if not dst.exists():
                raise CodecError(f"decode command produced no output file: {cmd}")
            image = load_pgm(dst.read_bytes())
        if (image.width, image.height) != (blob.width, blob.height):
            raise CodecError(
                f"decoded dimensions {image.width}x{image.height} disagree with the "
                f"container header {blob.width}x{blob.height}"
            )
        if image.bit_depth != blob.bit_depth:
            raise CodecError("decoded bit depth disagrees with the container header")
        return image
