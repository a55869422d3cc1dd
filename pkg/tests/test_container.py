"""Container header: bit-exact round trips and corruption handling."""

import pytest
from hypothesis import given, settings, strategies as st

from qpress import CompressedBlob, ContainerError, ControlParameter


def make_blob(**kw):
    args = dict(
        codec_id="bdct",
        param=ControlParameter("quantization_step", 8.0),
        width=64,
        height=32,
        bit_depth=8,
        backend_id="zlib",
        payload=b"\x01\x02\x03",
    )
    args.update(kw)
    return CompressedBlob(**args)


class TestContainer:
    def test_roundtrip(self):
        blob = make_blob()
        assert CompressedBlob.from_bytes(blob.to_bytes()) == blob

    def test_roundtrip_bytes_identical(self):
        blob = make_blob(param=ControlParameter("scaling_factor", 12.43))
        data = blob.to_bytes()
        assert CompressedBlob.from_bytes(data).to_bytes() == data

    def test_rejects_missing_magic(self):
        with pytest.raises(ContainerError, match="magic"):
            CompressedBlob.from_bytes(b"NOTQPRESS")

    def test_rejects_truncated_header(self):
        data = make_blob().to_bytes()
        with pytest.raises(ContainerError):
            CompressedBlob.from_bytes(data[:10])

    def test_rejects_truncated_payload(self):
        data = make_blob().to_bytes()
        with pytest.raises(ContainerError, match="payload"):
            CompressedBlob.from_bytes(data[:-1])

    def test_rejects_trailing_garbage(self):
        data = make_blob().to_bytes()
        with pytest.raises(ContainerError, match="trailing"):
            CompressedBlob.from_bytes(data + b"x")

    def test_rejects_unknown_version(self):
        data = bytearray(make_blob().to_bytes())
        data[6] = 99
        with pytest.raises(ContainerError, match="version"):
            CompressedBlob.from_bytes(bytes(data))

    def test_rejects_empty_payload(self):
        with pytest.raises(ValueError, match="payload"):
            make_blob(payload=b"")

    @settings(max_examples=40, deadline=None)
    @given(
        codec_id=st.text(
            alphabet=st.characters(min_codepoint=33, max_codepoint=126), min_size=1, max_size=24
        ),
        kind=st.sampled_from(["quantization_step", "scaling_factor", "bits_per_pixel"]),
        value=st.floats(1e-3, 8.0, allow_nan=False),
        width=st.integers(1, 10_000),
        height=st.integers(1, 10_000),
        depth=st.sampled_from([8, 16]),
        payload=st.binary(min_size=1, max_size=64),
    )
    def test_roundtrip_property(self, codec_id, kind, value, width, height, depth, payload):
        blob = make_blob(
            codec_id=codec_id,
            param=ControlParameter(kind, value),
            width=width,
            height=height,
            bit_depth=depth,
            payload=payload,
        )
        data = blob.to_bytes()
        again = CompressedBlob.from_bytes(data)
        assert again == blob
        assert again.to_bytes() == data
