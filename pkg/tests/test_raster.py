import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labloop.raster import PpmError, RasterImage


def test_blank_fill():
    img = RasterImage.blank(4, 3, color=(10, 20, 30))
    assert img.width == 4 and img.height == 3
    assert img.pixels.shape == (3, 4, 3)
    assert (img.pixels == np.array([10, 20, 30], dtype=np.uint8)).all()


def test_ppm_header_and_payload():
    img = RasterImage.blank(2, 2, color=(255, 0, 128))
    data = img.to_ppm()
    assert data.startswith(b"P6\n2 2\n255\n")
    assert data[len(b"P6\n2 2\n255\n"):] == bytes([255, 0, 128]) * 4


def test_round_trip_exact():
    rng = np.random.default_rng(5)
    px = rng.integers(0, 256, size=(7, 9, 3), dtype=np.uint8)
    img = RasterImage(px)
    back = RasterImage.from_ppm(img.to_ppm())
    assert np.array_equal(back.pixels, px)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 16), st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_round_trip_random_sizes(w, h, seed):
    px = np.random.default_rng(seed).integers(0, 256, size=(h, w, 3), dtype=np.uint8)
    data = RasterImage(px).to_ppm()
    assert RasterImage.from_ppm(data).to_ppm() == data


def test_double_round_trip_is_byte_stable():
    img = RasterImage.blank(5, 5, color=(7, 7, 7))
    once = img.to_ppm()
    assert RasterImage.from_ppm(once).to_ppm() == once


def test_rejects_bad_magic():
    with pytest.raises(PpmError):
        RasterImage.from_ppm(b"P3\n1 1\n255\n\x00\x00\x00")


def test_rejects_truncated_payload():
    with pytest.raises(PpmError):
        RasterImage.from_ppm(b"P6\n2 2\n255\n\x00\x00\x00")


def test_rejects_bad_maxval():
    with pytest.raises(PpmError):
        RasterImage.from_ppm(b"P6\n1 1\n1023\n\x00\x00")


def test_rejects_wrong_shape_array():
    with pytest.raises(ValueError):
        RasterImage(np.zeros((4, 4), dtype=np.uint8))
    with pytest.raises(ValueError):
        RasterImage(np.zeros((4, 4, 4), dtype=np.uint8))


def test_pixels_are_read_only_until_requested():
    img = RasterImage.blank(3, 3)
    with pytest.raises((ValueError, RuntimeError)):
        img.pixels[0, 0] = 0
    mutable = img.mutable_pixels()
    mutable[0, 0] = 0  # the copy is writable
    assert img.pixels[0, 0, 0] == 255  # original untouched


def test_equality_is_content_based():
    a = RasterImage.blank(2, 2, color=(1, 2, 3))
    b = RasterImage.blank(2, 2, color=(1, 2, 3))
    c = RasterImage.blank(2, 2, color=(1, 2, 4))
    assert a == b and hash(a) == hash(b)
    assert a != c
