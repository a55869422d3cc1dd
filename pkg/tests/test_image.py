"""imagecore: raster/cube model, PGM and RAW round trips, size arithmetic."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpress import (
    ImageFormatError,
    RasterImage,
    RawDescriptor,
    SpectralCube,
    bits_per_pixel,
    compression_ratio,
    cube_to_raw,
    format_raw_descriptor,
    load_pgm,
    parse_raw_descriptor,
    raw_to_cube,
    store_pgm,
)


class TestRasterImage:
    def test_basic_fields(self):
        img = RasterImage(np.arange(12, dtype=np.uint8).reshape(3, 4), 8)
        assert (img.width, img.height) == (4, 3)
        assert img.peak == 255
        assert img.raw_byte_size == 12

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            RasterImage(np.array([[256, 0]], dtype=np.int32), 8)

    def test_rejects_bad_depth(self):
        with pytest.raises(ValueError):
            RasterImage(np.zeros((2, 2), dtype=np.uint8), 12)

    def test_rejects_wrong_ndim(self):
        with pytest.raises(ValueError):
            RasterImage(np.zeros(4, dtype=np.uint8), 8)

    def test_samples_read_only(self):
        img = RasterImage(np.zeros((2, 2), dtype=np.uint8), 8)
        with pytest.raises(ValueError):
            img.samples[0, 0] = 1

    def test_16bit(self):
        img = RasterImage(np.array([[65535, 0]], dtype=np.uint16), 16)
        assert img.peak == 65535
        assert img.raw_byte_size == 4


class TestSpectralCube:
    def test_mismatched_bands_rejected_at_construction(self):
        a = RasterImage(np.zeros((2, 2), dtype=np.uint8), 8)
        b = RasterImage(np.zeros((2, 3), dtype=np.uint8), 8)
        with pytest.raises(ValueError):
            SpectralCube((a, b))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            SpectralCube(())

    def test_labels_length_checked(self):
        a = RasterImage(np.zeros((2, 2), dtype=np.uint8), 8)
        with pytest.raises(ValueError):
            SpectralCube((a,), ("x", "y"))


class TestPgm:
    def test_minimal_header_example(self):
        data = b"P5\n2 2\n255\n" + bytes([0, 1, 2, 3])
        img = load_pgm(data)
        assert img.bit_depth == 8
        assert img.samples.ravel().tolist() == [0, 1, 2, 3]

    def test_store_minimal(self):
        img = RasterImage(np.zeros((1, 1), dtype=np.uint8), 8)
        assert store_pgm(img) == b"P5\n1 1\n255\n\x00"

    def test_16bit_big_endian(self):
        img = RasterImage(np.array([[256]], dtype=np.uint16), 16)
        assert store_pgm(img).endswith(b"\x01\x00")
        assert load_pgm(store_pgm(img)) == img

    def test_canonical_roundtrip_bytes(self):
        data = b"P5\n3 2\n255\n" + bytes(range(6))
        assert store_pgm(load_pgm(data)) == data

    def test_comments_and_whitespace_accepted(self):
        data = b"P5\n# a comment\n 2\t1 \n# more\n255\n" + bytes([9, 8])
        img = load_pgm(data)
        assert img.samples.ravel().tolist() == [9, 8]

    def test_unsupported_maxval(self):
        with pytest.raises(ImageFormatError, match="maxval"):
            load_pgm(b"P5\n1 1\n1023\n\x00\x00")

    def test_bad_magic(self):
        with pytest.raises(ImageFormatError):
            load_pgm(b"P6\n1 1\n255\n\x00")

    def test_truncated_payload(self):
        with pytest.raises(ImageFormatError, match="truncated"):
            load_pgm(b"P5\n4 4\n255\n\x00")

    @settings(max_examples=30, deadline=None)
    @given(
        w=st.integers(1, 40),
        h=st.integers(1, 40),
        depth=st.sampled_from([8, 16]),
        seed=st.integers(0, 2**31),
    )
    def test_roundtrip_property(self, w, h, depth, seed):
        rng = np.random.default_rng(seed)
        dtype = np.uint8 if depth == 8 else np.uint16
        img = RasterImage(rng.integers(0, 1 << depth, (h, w)).astype(dtype), depth)
        again = load_pgm(store_pgm(img))
        assert again == img
        assert store_pgm(again) == store_pgm(img)


class TestRaw:
    def test_direct_layout(self):
        desc = RawDescriptor(width=2, height=1, bands=1, bit_depth=8)
        cube = raw_to_cube(bytes([7, 9]), desc)
        assert cube.bands[0].samples.ravel().tolist() == [7, 9]
        data, desc2 = cube_to_raw(cube)
        assert data == bytes([7, 9])
        assert desc2 == desc

    def test_size_mismatch(self):
        desc = RawDescriptor(width=4, height=4, bands=3, bit_depth=8)
        with pytest.raises(ImageFormatError, match="descriptor implies"):
            raw_to_cube(bytes(40), desc)

    def test_byte_orders(self):
        desc_le = RawDescriptor(width=1, height=1, bands=1, bit_depth=16, byte_order="little")
        desc_be = RawDescriptor(width=1, height=1, bands=1, bit_depth=16, byte_order="big")
        assert raw_to_cube(b"\x01\x02", desc_le).bands[0].samples[0, 0] == 0x0201
        assert raw_to_cube(b"\x01\x02", desc_be).bands[0].samples[0, 0] == 0x0102

    def test_descriptor_text_roundtrip(self):
        desc = RawDescriptor(width=3, height=5, bands=2, bit_depth=16, byte_order="big")
        assert parse_raw_descriptor(format_raw_descriptor(desc)) == desc

    def test_descriptor_rejects_unknown_key(self):
        with pytest.raises(ImageFormatError, match="unknown"):
            parse_raw_descriptor("width: 1\nheight: 1\nbands: 1\nbit_depth: 8\nfoo: 1")

    def test_descriptor_missing_key(self):
        with pytest.raises(ImageFormatError, match="missing"):
            parse_raw_descriptor("width: 1\nheight: 1")

    @settings(max_examples=20, deadline=None)
    @given(
        w=st.integers(1, 16),
        h=st.integers(1, 16),
        bands=st.integers(1, 5),
        depth=st.sampled_from([8, 16]),
        order=st.sampled_from(["little", "big"]),
        seed=st.integers(0, 2**31),
    )
    def test_roundtrip_property(self, w, h, bands, depth, order, seed):
        rng = np.random.default_rng(seed)
        dtype = np.uint8 if depth == 8 else np.uint16
        cube = SpectralCube(
            tuple(
                RasterImage(rng.integers(0, 1 << depth, (h, w)).astype(dtype), depth)
                for _ in range(bands)
            )
        )
        data, desc = cube_to_raw(cube, byte_order=order)
        again = raw_to_cube(data, desc)
        assert all(a == b for a, b in zip(again.bands, cube.bands))
        assert cube_to_raw(again, byte_order=order)[0] == data


class TestSizeArithmetic:
    def test_cr_example(self):
        img = RasterImage(np.zeros((512, 512), dtype=np.uint8), 8)
        assert compression_ratio(img, 26214) == pytest.approx(262144 / 26214)

    def test_cr_identity(self):
        img = RasterImage(np.zeros((512, 512), dtype=np.uint8), 8)
        assert compression_ratio(img, img.raw_byte_size) == 1.0

    def test_cr_aviris_magnitude(self):
        # the scale of the published AVIRIS example: ~10 paid bytes per 126
        img = RasterImage(np.zeros((512, 512), dtype=np.uint8), 8)
        assert compression_ratio(img, 20739) == pytest.approx(12.64, abs=0.01)

    def test_bpp_examples(self):
        img = RasterImage(np.zeros((512, 512), dtype=np.uint8), 8)
        assert bits_per_pixel(img, 32768) == 1.0
        assert bits_per_pixel(img, img.raw_byte_size) == 8.0

    def test_bpp_cr_product_is_depth(self):
        rng = np.random.default_rng(3)
        for depth in (8, 16):
            dtype = np.uint8 if depth == 8 else np.uint16
            img = RasterImage(rng.integers(0, 1 << depth, (37, 53)).astype(dtype), depth)
            for size in (1, 17, 1000, 12345):
                prod = bits_per_pixel(img, size) * compression_ratio(img, size)
                assert prod == pytest.approx(depth, rel=1e-12)

    def test_empty_payload_rejected(self):
        img = RasterImage(np.zeros((2, 2), dtype=np.uint8), 8)
        with pytest.raises(ValueError):
            compression_ratio(img, 0)
