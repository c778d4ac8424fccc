import numpy as np
import pytest

from tit import (BinaryImage, sample_bernoulli, sample_block, sample_full,
                 sample_uniform)
from tit.halfplane import estimate_halfplane_distance

from conftest import random_image


def test_uniform_singleton_domain():
    s = sample_uniform(BinaryImage.blank(1, 1), 3, seed=0)
    assert len(s) == 3
    assert all(p.coord == (0, 0) and p.color == 1 for p in s)


def test_uniform_determinism():
    m = random_image(16, 2)
    a = sample_uniform(m, 50, seed=99)
    b = sample_uniform(m, 50, seed=99)
    assert np.array_equal(a.xs, b.xs) and np.array_equal(a.ys, b.ys)
    c = sample_uniform(m, 50, seed=100)
    assert not (np.array_equal(a.xs, c.xs) and np.array_equal(a.ys, c.ys))


def test_uniform_histogram_five_sigma():
    # 1e6 draws over 16 pixels: every per-pixel count within 5 sigma
    m = BinaryImage.blank(4)
    s = sample_uniform(m, 10**6, seed=5)
    counts = np.bincount(s.ys * 4 + s.xs, minlength=16)
    expect = 10**6 / 16
    sigma = np.sqrt(10**6 * (1 / 16) * (15 / 16))
    assert np.all(np.abs(counts - expect) <= 5 * sigma)


def test_uniform_labels_are_true_colors():
    m = random_image(8, 3)
    s = sample_uniform(m, 200, seed=1)
    for p in s:
        assert p.color == m.get(*p.coord)


def test_bernoulli_clamps_to_everything():
    m = random_image(4, 1)
    s = sample_bernoulli(m, 16, seed=0)
    assert len(s) == 16
    s = sample_bernoulli(m, 100, seed=0)
    assert len(s) == 16


def test_bernoulli_moments():
    # |samples| ~ Binomial(4096, 400/4096); check the mean over many seeds
    sizes = [len(sample_bernoulli(BinaryImage.blank(64), 400, seed=sd))
             for sd in range(10**4)]
    mean = float(np.mean(sizes))
    per_draw_sigma = np.sqrt(400 * (1 - 400 / 4096))
    assert abs(mean - 400) <= 5 * per_draw_sigma          # the stated loose bound
    assert abs(mean - 400) <= 5 * per_draw_sigma / 100    # tight bound over 1e4 seeds


def test_block_whole_image():
    m = random_image(4, 4)
    s = sample_block(m, 4, seed=0)
    assert len(s) == 16 and s.block_origin == (0, 0)


def test_block_specific_block():
    m = random_image(4, 0)
    for seed in range(200):
        s = sample_block(m, 2, seed=seed)
        if s.block_origin == (2, 2):
            assert sorted((p.coord for p in s)) == [(2, 2), (2, 3), (3, 2), (3, 3)]
            return
    pytest.fail("no seed produced block (1,1)")


def test_block_boundary_clipping():
    # n=9, r=4: ceil(9/4)=3 blocks per axis, clipped sizes 16/4/1
    m = random_image(9, 0)
    expected = {}
    for bx in range(3):
        for by in range(3):
            w = min(4, 9 - bx * 4)
            h = min(4, 9 - by * 4)
            expected[(bx * 4, by * 4)] = w * h
    seen = {}
    for seed in range(400):
        s = sample_block(m, 4, seed=seed)
        seen[s.block_origin] = len(s)
    assert seen == expected
    assert set(expected.values()) == {16, 4, 1}


def test_block_parameter_validation():
    with pytest.raises(ValueError):
        sample_block(random_image(4, 0), 5, seed=0)
    with pytest.raises(ValueError):
        sample_uniform(random_image(4, 0), 0, seed=0)


def test_full_mode_makes_estimators_deterministic():
    m = random_image(12, 9)
    s = sample_full(m)
    assert len(s) == 144 and s.size_param == 144
    e1 = estimate_halfplane_distance(m, 0.2, seed=1, mode="full")
    e2 = estimate_halfplane_distance(m, 0.2, seed=2, mode="full")
    assert e1.dhat == e2.dhat and e1.argmin == e2.argmin
