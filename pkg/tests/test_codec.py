"""Built-in block-DCT codec: determinism, fidelity, error bounds, CSF table."""

import numpy as np
import pytest

import oracles
from qpress import (
    BlockDctCodec,
    CodecError,
    ControlParameter,
    RasterImage,
    get_codec,
    psnr,
)
from qpress.tables import WEIGHT_TABLE_BLOCK_SIZES, csf_weight_table

QS = lambda v: ControlParameter("quantization_step", v)  # noqa: E731


@pytest.fixture(scope="module")
def codec():
    return get_codec("bdct")


class TestConstantImages:
    @pytest.mark.parametrize("qs", [1, 3, 17, 63, 64])
    def test_constant_128_exact(self, codec, qs):
        img = RasterImage(np.full((48, 80), 128, dtype=np.uint8), 8)
        out = codec.decompress(codec.compress(img, QS(qs)))
        assert out == img

    def test_constant_16bit_exact(self, codec):
        img = RasterImage(np.full((32, 32), 32768, dtype=np.uint16), 16)
        out = codec.decompress(codec.compress(img, QS(64)))
        assert out == img


class TestDeterminism:
    def test_byte_identical_payloads(self, codec, camera):
        a = codec.compress(camera, QS(9.7))
        b = codec.compress(camera, QS(9.7))
        assert a.payload == b.payload
        assert a.to_bytes() == b.to_bytes()

    def test_header_roundtrip(self, codec, camera):
        blob = codec.compress(camera, QS(5))
        out = codec.decompress(blob)
        assert (out.width, out.height, out.bit_depth) == (
            camera.width, camera.height, camera.bit_depth,
        )


class TestFidelity:
    def test_qs1_high_quality_and_oracle_agreement(self, codec, camera):
        blob = codec.compress(camera, QS(1))
        out = codec.decompress(blob)
        value = psnr(camera, out).value
        assert value >= 50.0
        # independent transform path must reconstruct essentially the same image
        oracle_img = oracles.dct_codec_oracle(
            camera.as_float(), 1.0, codec.block_size, 255.0
        )
        oracle_psnr = oracles.psnr_oracle(camera.as_float(), oracle_img, 255.0)
        assert abs(oracle_psnr - value) < 0.5
        assert oracle_psnr >= 50.0

    def test_monotone_in_qs_with_small_violations(self, codec, natural_corpus):
        grid = [1, 2, 4, 8, 16, 32, 64]
        for img in natural_corpus.values():
            values = [
                psnr(img, codec.decompress(codec.compress(img, QS(q)))).value for q in grid
            ]
            for a, b in zip(values, values[1:]):
                assert b <= a + 0.2

    def test_error_bound_scales_with_qs(self, codec, camera):
        for q in [1, 2, 4, 8, 16, 32, 64]:
            out = codec.decompress(codec.compress(camera, QS(q)))
            max_err = np.abs(camera.as_float() - out.as_float()).max()
            assert max_err <= q * codec.block_size
            # the refinement backstop gives a far tighter guarantee
            assert max_err <= max(2.0, 0.45 * q) + 0.5 + 1e-9

    def test_16bit_roundtrip_quality(self, codec):
        rng = np.random.default_rng(8)
        yy, xx = np.mgrid[0:96, 0:128]
        base = 12000 + 9000 * np.sin(xx / 9.0) * np.cos(yy / 13.0)
        img16 = RasterImage(
            np.clip(np.rint(base + rng.normal(0, 300, base.shape)), 0, 65535).astype(np.uint16),
            16,
        )
        out = codec.decompress(codec.compress(img16, QS(2)))
        assert psnr(img16, out).value >= 80.0


class TestErrors:
    def test_param_kind_mismatch(self, codec, camera):
        with pytest.raises(CodecError, match="takes quantization_step"):
            codec.compress(camera, ControlParameter("bits_per_pixel", 1.0))

    def test_scaling_factor_is_synonym(self, codec, camera):
        blob = codec.compress(camera, ControlParameter("scaling_factor", 8.0))
        twin = codec.compress(camera, QS(8.0))
        assert blob.payload == twin.payload

    def test_param_out_of_domain(self, codec, camera):
        with pytest.raises(CodecError, match="domain"):
            codec.compress(camera, QS(1e9))

    def test_truncated_payload_is_error_not_crash(self, codec, camera):
        blob = codec.compress(camera, QS(8))
        broken = type(blob)(
            codec_id=blob.codec_id, param=blob.param, width=blob.width, height=blob.height,
            bit_depth=blob.bit_depth, backend_id=blob.backend_id,
            payload=blob.payload[: len(blob.payload) // 2],
        )
        with pytest.raises(CodecError, match="corrupt"):
            codec.decompress(broken)

    def test_garbage_payload_is_error(self, codec, camera):
        blob = codec.compress(camera, QS(8))
        broken = type(blob)(
            codec_id=blob.codec_id, param=blob.param, width=blob.width, height=blob.height,
            bit_depth=blob.bit_depth, backend_id=blob.backend_id,
            payload=bytes([16, 0]) + b"\x99" * 100,
        )
        with pytest.raises(CodecError):
            codec.decompress(broken)

    def test_wrong_codec_id_rejected(self, codec, camera):
        blob = codec.compress(camera, QS(8))
        foreign = type(blob)(
            codec_id="other", param=blob.param, width=blob.width, height=blob.height,
            bit_depth=blob.bit_depth, backend_id=blob.backend_id, payload=blob.payload,
        )
        with pytest.raises(CodecError, match="other"):
            codec.decompress(foreign)

    def test_bad_block_size_construction(self):
        with pytest.raises(ValueError):
            BlockDctCodec(block_size=12)


class TestNonMultipleDimensions:
    @pytest.mark.parametrize("shape", [(17, 33), (16, 17), (100, 99)])
    def test_edge_padding_roundtrip(self, codec, shape):
        rng = np.random.default_rng(shape[0] * 1000 + shape[1])
        img = RasterImage(rng.integers(0, 256, shape).astype(np.uint8), 8)
        out = codec.decompress(codec.compress(img, QS(2)))
        assert (out.height, out.width) == shape
        assert psnr(img, out).value > 40.0


class TestCsfWeightTable:
    @pytest.mark.parametrize("size", WEIGHT_TABLE_BLOCK_SIZES)
    def test_dc_is_one_and_floor(self, size):
        w = csf_weight_table(size)
        assert w[0, 0] == 1.0
        assert (w >= 1.0).all()

    @pytest.mark.parametrize("size", WEIGHT_TABLE_BLOCK_SIZES)
    def test_monotone_both_axes(self, size):
        w = csf_weight_table(size)
        assert (np.diff(w, axis=0) >= 0).all()
        assert (np.diff(w, axis=1) >= 0).all()

    def test_unsupported_size(self):
        with pytest.raises(ValueError, match="unsupported"):
            csf_weight_table(12)

    def test_csf_variant_decodes_its_own_stream(self, camera):
        csf = get_codec("bdct-csf")
        blob = csf.compress(camera, QS(8))
        out = csf.decompress(blob)
        assert psnr(camera, out).value > 28.0
        assert blob.codec_id == "bdct-csf"
