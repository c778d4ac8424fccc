import numpy as np
import pytest

from tit import (BinaryImage, OracleBudgetError, is_border_connected,
                 is_connected, is_convex, is_halfplane,
                 oracle_border_connectedness_distance,
                 oracle_connectedness_distance, oracle_convexity_distance,
                 oracle_halfplane_distance)
from tit.gen import gen_halfplane

from conftest import all_images, random_image


def test_zero_iff_predicate_exhaustive():
    for m in all_images(3):
        assert (oracle_halfplane_distance(m) == 0) == is_halfplane(m)
        assert (oracle_convexity_distance(m) == 0) == is_convex(m)
        assert (oracle_connectedness_distance(m) == 0) == is_connected(m)
        assert (oracle_border_connectedness_distance(m) == 0) == is_border_connected(m)


def test_convexity_at_most_halfplane():
    for m in all_images(3):
        assert oracle_convexity_distance(m) <= oracle_halfplane_distance(m) + 1e-12
    for seed in range(50):
        m = random_image(4, seed)
        assert oracle_convexity_distance(m) <= oracle_halfplane_distance(m) + 1e-12


def test_halfplane_2x2_diagonal():
    for m in all_images(2):
        d = oracle_halfplane_distance(m)
        assert (d == 0) == is_halfplane(m)
    diag = np.zeros((2, 2))
    diag[0, 0] = diag[1, 1] = 1
    assert oracle_halfplane_distance(BinaryImage(diag)) == 0.25


def test_halfplane_oracle_on_rendered():
    for seed in range(20):
        m = gen_halfplane(24, seed=seed)
        assert oracle_halfplane_distance(m) == 0.0


def test_convexity_examples():
    a = np.zeros((3, 3), dtype=bool)
    a[0, 0] = a[2, 2] = True  # corners (0,0) and (2,2)
    assert abs(oracle_convexity_distance(BinaryImage(a)) - 1 / 9) < 1e-12
    for seed in range(20):
        m = random_image(5, seed)
        density = m.black_count() / 25
        assert oracle_convexity_distance(m) <= density + 1e-12  # all-white is convex


def test_connectedness_example_bound():
    a = np.zeros((3, 3), dtype=bool)
    a[0, 0] = a[2, 2] = True
    d = oracle_connectedness_distance(BinaryImage(a))
    # no stronger assumption than: delete one endpoint or join them
    assert d <= min(1 / 9, 3 / 9) + 1e-12
    assert d > 0


def test_border_connectedness_center():
    a = np.zeros((3, 3))
    a[1, 1] = 1
    assert oracle_border_connectedness_distance(BinaryImage(a)) == 1 / 9


def test_budgets_enforced():
    with pytest.raises(OracleBudgetError):
        oracle_halfplane_distance(BinaryImage.blank(25))
    with pytest.raises(OracleBudgetError):
        oracle_convexity_distance(BinaryImage.blank(6))
    with pytest.raises(OracleBudgetError):
        oracle_connectedness_distance(BinaryImage.blank(5))
    with pytest.raises(OracleBudgetError):
        oracle_border_connectedness_distance(BinaryImage.blank(6))


def test_oracles_are_pure():
    m = random_image(4, 11)
    assert oracle_connectedness_distance(m) == oracle_connectedness_distance(m)
    assert oracle_halfplane_distance(m) == oracle_halfplane_distance(m)
