"""Access models: how an estimator reads pixels of an image.

Four sources are supported.  ``uniform`` draws s pixels i.i.d. with
replacement; ``bernoulli`` includes each pixel independently with
probability min(1, s/n^2); ``block`` returns one uniformly random
axis-aligned r-block (clipped at the image boundary); ``full`` returns
every pixel exactly once.  Feeding a ``full`` sample to any estimator
makes it deterministic.

All randomness flows through a 64-bit seed; the same seed and
parameters reproduce the same SampleSet bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .image import BinaryImage

__all__ = [
    "PixelSample",
    "SampleSet",
    "rng_from_seed",
    "sample_uniform",
    "sample_bernoulli",
    "sample_block",
    "sample_full",
    "make_sample",
]

MODES = ("uniform", "bernoulli", "block", "full")


def rng_from_seed(seed: int) -> np.random.Generator:
    """Deterministic generator from a 64-bit seed value."""
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


@dataclass(frozen=True)
class PixelSample:
    coord: tuple[int, int]
    color: int


@dataclass(frozen=True)
class SampleSet:
    """Labeled pixel samples plus the parameters that produced them.

    ``xs``, ``ys`` and ``colors`` are parallel arrays (ordered multiset);
    ``size_param`` is the intended/expected count s, which estimators use
    as the normalizer 1/s for empirical errors regardless of the realized
    |samples| (this matters for bernoulli sources).
    """

    xs: np.ndarray
    ys: np.ndarray
    colors: np.ndarray
    source_mode: str
    size_param: int
    n: int
    block_origin: tuple[int, int] | None = field(default=None)

    def __len__(self) -> int:
        return len(self.xs)

    def __iter__(self):
        for x, y, c in zip(self.xs, self.ys, self.colors):
            yield PixelSample((int(x), int(y)), int(c))

    def samples(self) -> list[PixelSample]:
        return list(self)


def _labeled(image: BinaryImage, xs, ys, mode, s, origin=None) -> SampleSet:
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    colors = image.array[ys, xs].astype(np.int8) if len(xs) else np.zeros(0, np.int8)
    return SampleSet(xs, ys, colors, mode, int(s), image.n, origin)


def sample_uniform(image: BinaryImage, s: int, seed: int) -> SampleSet:
    """s i.i.d. uniform pixel positions, with replacement."""
    if s < 1:
        raise ValueError(f"sample count must be >= 1, got {s}")
    rng = rng_from_seed(seed)
    flat = rng.integers(0, image.n * image.n, size=int(s))
    return _labeled(image, flat % image.n, flat // image.n, "uniform", s)


def sample_bernoulli(image: BinaryImage, s: int, seed: int) -> SampleSet:
    """Each pixel included independently with probability min(1, s/n^2)."""
    if s < 1:
        raise ValueError(f"sample size parameter must be >= 1, got {s}")
    rng = rng_from_seed(seed)
    n = image.n
    p = min(1.0, s / (n * n))
    mask = rng.random((n, n)) < p
    ys, xs = np.nonzero(mask)
    return _labeled(image, xs, ys, "bernoulli", s)


def sample_block(image: BinaryImage, r: int, seed: int) -> SampleSet:
    """Every pixel of one uniformly drawn r-block, clipped to the image.

    The block index (x, y) is uniform over ceil(n/r)^2; the returned
    pixels are those with floor(i/r) = x and floor(j/r) = y.
    """
    n = image.n
    if not 1 <= r <= n:
        raise ValueError(f"block side must be in [1, {n}], got {r}")
    rng = rng_from_seed(seed)
    blocks = -(-n // r)
    bx, by = int(rng.integers(0, blocks)), int(rng.integers(0, blocks))
    xs = np.arange(bx * r, min((bx + 1) * r, n))
    ys = np.arange(by * r, min((by + 1) * r, n))
    gx, gy = np.meshgrid(xs, ys)
    return _labeled(image, gx.ravel(), gy.ravel(), "block",
                    len(xs) * len(ys), origin=(bx * r, by * r))


def sample_full(image: BinaryImage) -> SampleSet:
    """Every pixel exactly once; size_param = n^2."""
    n = image.n
    gx, gy = np.meshgrid(np.arange(n), np.arange(n))
    return _labeled(image, gx.ravel(), gy.ravel(), "full", n * n)


def make_sample(image: BinaryImage, mode: str, s: int, seed: int) -> SampleSet:
    """Dispatch on mode name; ``s`` is ignored for full mode."""
    if mode == "uniform":
        return sample_uniform(image, s, seed)
    if mode == "bernoulli":
        return sample_bernoulli(image, s, seed)
    if mode == "full":
        return sample_full(image)
    raise ValueError(f"unsupported sample mode {mode!r} here (expected uniform/bernoulli/full)")
