"""Planted-instance generators: clean images satisfying a target property,
exact-count noise, and square tilings for the deterministic
connectedness test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .halfplane import HalfPlaneRef, render_halfplane
from .image import BinaryImage
from .predicates import rasterize_hull
from .sampling import rng_from_seed

__all__ = [
    "PlantedInstance",
    "gen_halfplane",
    "gen_convex",
    "gen_connected",
    "add_noise",
    "tile_squares",
]


@dataclass(frozen=True)
class PlantedInstance:
    clean: BinaryImage
    noisy: BinaryImage
    rho: float
    flipped: tuple[tuple[int, int], ...]


def gen_halfplane(n: int, seed: int = 0) -> BinaryImage:
    """Random half-plane image: phi uniform in [0, 2*pi), offset uniform
    over the projection range of the pixel corners (so degenerate
    constant images occur with probability ~0)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = rng_from_seed(seed)
    phi = float(rng.uniform(0, 2 * np.pi))
    corners = np.array([[0, 0], [n - 1, 0], [0, n - 1], [n - 1, n - 1]], dtype=float)
    proj = corners[:, 0] * np.cos(phi) + corners[:, 1] * np.sin(phi)
    c = float(rng.uniform(proj.min(), proj.max()))
    return render_halfplane(HalfPlaneRef(phi=phi, c=c, n=n))


def gen_convex(n: int, vertex_count: int, seed: int = 0) -> BinaryImage:
    """Random convex image: lattice points in the closed hull of
    ``vertex_count`` random pixel positions (collinear draws give a
    segment image, which is still convex)."""
    if vertex_count < 3:
        raise ValueError("vertex_count must be >= 3")
    rng = rng_from_seed(seed)
    pts = rng.integers(0, n, size=(vertex_count, 2))
    return rasterize_hull([(int(x), int(y)) for x, y in pts], n)


def gen_connected(n: int, target_density: float, seed: int = 0) -> BinaryImage:
    """Random connected image grown from a seed pixel by frontier waves
    until the black count is round(target_density * n^2); the final wave
    is trimmed so the count is exact (within one pixel of the target)."""
    if not 0 < target_density <= 1:
        raise ValueError(f"target density must be in (0, 1], got {target_density}")
    rng = rng_from_seed(seed)
    target = max(1, round(target_density * n * n))
    a = np.zeros((n, n), dtype=bool)
    a[rng.integers(0, n), rng.integers(0, n)] = True
    count = 1
    while count < target:
        frontier = np.zeros_like(a)
        frontier[1:, :] |= a[:-1, :]
        frontier[:-1, :] |= a[1:, :]
        frontier[:, 1:] |= a[:, :-1]
        frontier[:, :-1] |= a[:, 1:]
        frontier &= ~a
        ys, xs = np.nonzero(frontier)
        if len(xs) == 0:
            break
        keep = rng.random(len(xs)) < 0.6
        if not keep.any():
            keep[rng.integers(0, len(xs))] = True
        idx = np.nonzero(keep)[0]
        if count + len(idx) > target:
            idx = rng.choice(idx, size=target - count, replace=False)
        a[ys[idx], xs[idx]] = True
        count += len(idx)
    return BinaryImage(a)


def add_noise(clean: BinaryImage, rho: float, seed: int = 0) -> PlantedInstance:
    """Flip exactly floor(rho * n^2) distinct uniformly chosen pixels.
    Sampling without replacement keeps the planted distance bound exact:
    dist(noisy, property) <= rho precisely."""
    if not 0 <= rho <= 1:
        raise ValueError(f"rho must be in [0, 1], got {rho}")
    rng = rng_from_seed(seed)
    n = clean.n
    flips = int(rho * n * n)
    chosen = rng.choice(n * n, size=flips, replace=False) if flips else np.array([], dtype=int)
    a = clean.array.copy()
    xs, ys = chosen % n, chosen // n
    a[ys, xs] = ~a[ys, xs]
    return PlantedInstance(
        clean=clean,
        noisy=BinaryImage(a),
        rho=rho,
        flipped=tuple((int(x), int(y)) for x, y in zip(xs, ys)),
    )


def tile_squares(content: BinaryImage, n: int, r: int) -> BinaryImage:
    """Image with every r-square equal to ``content`` and all grid pixels
    white.  Requires content side r-1 and n = 1 (mod r)."""
    if content.n != r - 1:
        raise ValueError(f"content side must be r-1 = {r - 1}, got {content.n}")
    if n % r != 1:
        raise ValueError(f"n must be 1 (mod r), got n={n}, r={r}")
    a = np.zeros((n, n), dtype=bool)
    for j in range(0, n - r, r):
        for i in range(0, n - r, r):
            a[j + 1: j + r, i + 1: i + r] = content.array
    return BinaryImage(a)
