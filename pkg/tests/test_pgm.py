import numpy as np
import pytest

from anisodiff import Image, PgmError, load_pgm, save_pgm

P5_BYTES = b"P5\n# test image\n2 2\n255\n" + bytes([0, 64, 128, 255])
P2_TEXT = b"P2\n2 2\n255\n0 64\n128 255\n"
EXPECTED = np.array([[0.0, 64.0], [128.0, 255.0]])


def test_load_p5(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(P5_BYTES)
    img = load_pgm(path)
    assert img.h == 1.0
    assert np.array_equal(img.values, EXPECTED)


def test_load_p2(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(P2_TEXT)
    assert np.array_equal(load_pgm(path).values, EXPECTED)


def test_load_p2_with_comments_and_odd_whitespace(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(b"P2 # magic\n#c\n 2\t2 #dims\n255\n0 64 128\t255")
    assert np.array_equal(load_pgm(path).values, EXPECTED)


def test_save_then_load_roundtrip(tmp_path):
    path = tmp_path / "r.pgm"
    rng = np.random.default_rng(2)
    img = Image(rng.integers(0, 256, (7, 5)).astype(np.float64))
    save_pgm(img, path)
    back = load_pgm(path)
    assert np.array_equal(back.values, img.values)


def test_save_clamps_and_rounds(tmp_path):
    path = tmp_path / "c.pgm"
    save_pgm(Image([[255.7, -3.0], [128.0, 1.5]]), path)
    data = path.read_bytes()
    assert data.startswith(b"P5\n2 2\n255\n")
    assert data[-4:] == bytes([255, 0, 128, 2])  # half-to-even rounding of 1.5


def test_16bit_roundtrip(tmp_path):
    path = tmp_path / "w.pgm"
    img = Image([[0.0, 300.0], [65535.0, 1234.0]])
    save_pgm(img, path, maxval=65535)
    back = load_pgm(path)
    assert np.array_equal(back.values, img.values)


def test_load_16bit_is_big_endian(tmp_path):
    path = tmp_path / "b.pgm"
    path.write_bytes(b"P5\n1 1\n65535\n" + bytes([0x01, 0x02]))
    assert load_pgm(path).values[0, 0] == 258.0


@pytest.mark.parametrize(
    "payload, match",
    [
        (b"P6\n2 2\n255\n" + bytes(12), "unsupported"),
        (b"P5\n2 x\n255\n" + bytes(4), "malformed"),
        (b"P5\n0 2\n255\n", "malformed"),
        (b"P5\n2 2\n70000\n" + bytes(8), "maxval"),
        (b"P5\n2 2\n255\n" + bytes(3), "truncated"),
        (b"P2\n2 2\n255\n0 1 2", "truncated"),
        (b"P2\n2 2\n255\n0 1 2 999", "exceeds maxval"),
        (b"", "truncated"),
    ],
)
def test_rejects_bad_input(tmp_path, payload, match):
    path = tmp_path / "bad.pgm"
    path.write_bytes(payload)
    with pytest.raises(PgmError, match=match):
        load_pgm(path)


def test_save_rejects_bad_maxval(tmp_path):
    with pytest.raises(ValueError):
        save_pgm(Image(np.zeros((2, 2))), tmp_path / "x.pgm", maxval=0)
