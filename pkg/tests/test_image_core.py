import numpy as np
import pytest
from PIL import Image

from cvxhallu.image_core import (
    ImageDecodeError,
    ImageNotFoundError,
    ImageWriteError,
    MultiImage,
    UnsupportedChannelsError,
    load_image,
    quantize,
    save_image,
)


def _write_gray(path, samples, shape):
    Image.fromarray(np.array(samples, dtype=np.uint8).reshape(shape)).save(path)


def test_load_8bit_gray_scaling(tmp_path):
    p = tmp_path / "g.png"
    _write_gray(p, [0, 128, 255, 64], (2, 2))
    img = load_image(p)
    assert img.n_channels == 1
    np.testing.assert_array_equal(img.data[0], [[0.0, 128 / 255], [1.0, 64 / 255]])


def test_load_black_is_zero(tmp_path):
    p = tmp_path / "b.png"
    _write_gray(p, [0] * 12, (3, 4))
    img = load_image(p)
    assert img.shape == (3, 4)
    assert not img.data.any()


def test_load_16bit(tmp_path):
    p = tmp_path / "w.png"
    Image.fromarray(np.array([[0, 65535], [32768, 1000]], dtype=np.uint16)).save(p)
    img = load_image(p)
    np.testing.assert_allclose(img.data[0], np.array([[0, 65535], [32768, 1000]]) / 65535.0)


def test_load_rgb_channel_order(tmp_path):
    arr = np.zeros((2, 3, 3), dtype=np.uint8)
    arr[..., 0], arr[..., 1], arr[..., 2] = 10, 20, 30
    p = tmp_path / "c.png"
    Image.fromarray(arr).save(p)
    img = load_image(p)
    assert img.n_channels == 3
    np.testing.assert_allclose(img.data[:, 0, 0], np.array([10, 20, 30]) / 255)


def test_load_errors(tmp_path):
    with pytest.raises(ImageNotFoundError):
        load_image(tmp_path / "missing.png")

    good = tmp_path / "g.png"
    _write_gray(good, list(range(64)), (8, 8))
    trunc = tmp_path / "t.png"
    trunc.write_bytes(good.read_bytes()[:40])
    with pytest.raises(ImageDecodeError):
        load_image(trunc)

    junk = tmp_path / "junk.png"
    junk.write_bytes(b"not an image at all")
    with pytest.raises(ImageDecodeError):
        load_image(junk)

    rgba = tmp_path / "a.png"
    Image.fromarray(np.zeros((2, 2, 4), dtype=np.uint8)).save(rgba)
    with pytest.raises(UnsupportedChannelsError):
        load_image(rgba)


@pytest.mark.parametrize("value, byte", [(0.5, 128), (1.2, 255), (-0.3, 0), (1.0, 255), (0.0, 0)])
def test_quantize_rule(value, byte):
    assert quantize(np.array([value]))[0] == byte


def test_every_byte_survives_roundtrip(tmp_path):
    levels = np.arange(256, dtype=np.float64).reshape(16, 16) / 255
    p = tmp_path / "all.png"
    save_image(MultiImage(levels), p)
    np.testing.assert_array_equal(load_image(p).data[0], levels)


def test_roundtrip_within_one_level(tmp_path, rng):
    data = rng.uniform(0, 1, (3, 9, 7))
    p = tmp_path / "r.png"
    save_image(MultiImage(data), p)
    back = load_image(p).data
    assert np.max(np.abs(back - data)) <= 1 / 255 + 1e-12


def test_save_load_is_idempotent(tmp_path, rng):
    data = rng.uniform(-0.2, 1.2, (3, 5, 6))
    p1, p2 = tmp_path / "1.png", tmp_path / "2.png"
    save_image(MultiImage(data), p1)
    once = load_image(p1)
    save_image(once, p2)
    np.testing.assert_array_equal(load_image(p2).data, once.data)


def test_unwritable_path(tmp_path):
    with pytest.raises(ImageWriteError):
        save_image(MultiImage(np.zeros((2, 2))), tmp_path / "nope" / "x.png")


def test_multiimage_validation():
    with pytest.raises(UnsupportedChannelsError):
        MultiImage(np.zeros((5, 2, 2)))
    with pytest.raises(ValueError):
        MultiImage(np.array([[np.nan, 0.0]]))
    with pytest.raises(ValueError):
        MultiImage.from_planes([np.zeros((2, 2)), np.zeros((2, 3))])
    img = MultiImage.from_planes([np.zeros((2, 3)), np.ones((2, 3))])
    assert (img.n_channels, img.height, img.width) == (2, 2, 3)
    with pytest.raises(ValueError):
        img.data[0, 0, 0] = 1.0
