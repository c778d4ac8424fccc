import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tit import (BinaryImage, DimensionMismatchError, PBMError, read_pbm,
                 relative_distance, write_pbm)

from conftest import random_image


def test_distance_identity():
    m = random_image(8, 1)
    assert relative_distance(m, m) == 0


def test_distance_complement():
    assert relative_distance(BinaryImage.blank(4, 1), BinaryImage.blank(4, 0)) == 1.0


def test_distance_single_flip():
    a = np.ones((4, 4))
    a[0, 0] = 0
    assert relative_distance(BinaryImage.blank(4, 1), BinaryImage(a)) == 1 / 16


def test_distance_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        relative_distance(BinaryImage.blank(4), BinaryImage.blank(5))


@given(st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1))
@settings(max_examples=200, deadline=None)
def test_distance_is_a_metric(b1, b2, b3):
    def img(bits):
        return BinaryImage(np.array([(bits >> i) & 1 for i in range(16)]).reshape(4, 4))

    m1, m2, m3 = img(b1), img(b2), img(b3)
    d12 = relative_distance(m1, m2)
    d21 = relative_distance(m2, m1)
    assert d12 == d21
    assert (d12 == 0) == (b1 == b2)
    assert relative_distance(m1, m3) <= d12 + relative_distance(m2, m3) + 1e-12


def test_image_invariants():
    m = BinaryImage(np.eye(3))
    assert m.n == 3
    with pytest.raises(IndexError):
        m.get(3, 0)
    with pytest.raises(IndexError):
        m.get(0, -1)
    with pytest.raises(ValueError):
        BinaryImage(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        BinaryImage(np.zeros((0, 0)))
    assert not m.array.flags.writeable


def test_pbm_roundtrip(tmp_path):
    m = random_image(16, 7)
    for binary in (True, False):
        path = tmp_path / f"img_{binary}.pbm"
        write_pbm(m, path, binary=binary)
        assert read_pbm(path) == m


def test_pbm_p1_format(tmp_path):
    path = tmp_path / "tiny.pbm"
    path.write_text("P1\n2 2\n1 0\n0 1\n")
    m = read_pbm(path)
    assert m.get(0, 0) == 1 and m.get(1, 1) == 1
    assert m.get(1, 0) == 0 and m.get(0, 1) == 0


def test_pbm_p4_row_padding(tmp_path):
    # 9 columns pack into 2 bytes per row; pad bits must be ignored
    m = random_image(9, 3)
    path = tmp_path / "nine.pbm"
    write_pbm(m, path)
    raw = path.read_bytes()
    header_end = raw.index(b"9 9\n") + 4
    assert len(raw) - header_end == 2 * 9
    assert read_pbm(path) == m


def test_pbm_against_pillow(tmp_path):
    PIL = pytest.importorskip("PIL.Image")
    for seed in range(5):
        m = random_image(13, seed)
        path = tmp_path / f"x{seed}.pbm"
        write_pbm(m, path)
        with PIL.open(path) as im:
            arr = np.asarray(im.convert("1"))
        # PBM 1 = black; Pillow mode "1" maps black to 0
        assert np.array_equal(~arr, m.array)


def test_pbm_errors(tmp_path):
    cases = {
        "nonsquare.pbm": ("P1\n2 3\n1 0 0 1 1 0\n", "square"),
        "zerosize.pbm": ("P1\n0 0\n", "positive"),
        "badmagic.pbm": ("P7\n2 2\n1 0 0 1\n", "magic"),
        "nodim.pbm": ("P1\nxx yy\n", "dimensions"),
        "short.pbm": ("P1\n2 2\n1 0\n", "pixels"),
    }
    for name, (content, field) in cases.items():
        path = tmp_path / name
        path.write_text(content)
        with pytest.raises(PBMError, match=field):
            read_pbm(path)
    truncated = tmp_path / "trunc4.pbm"
    truncated.write_bytes(b"P4\n9 9\n\x00\x01")
    with pytest.raises(PBMError, match="pixels"):
        read_pbm(truncated)
