import numpy as np
import pytest

from tit import BinaryImage


def random_image(n: int, seed: int, density=None) -> BinaryImage:
    rng = np.random.default_rng(seed)
    p = rng.uniform(0.15, 0.85) if density is None else density
    return BinaryImage(rng.random((n, n)) < p)


def all_images(n: int):
    for bits in range(1 << (n * n)):
        a = np.array([(bits >> i) & 1 for i in range(n * n)]).reshape(n, n)
        yield BinaryImage(a)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
