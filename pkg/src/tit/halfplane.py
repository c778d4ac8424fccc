"""Distance approximation to the half-plane property, and the proper
agnostic half-plane learner built on the same candidate minimization.

A half-plane image is black exactly where x cos(phi) + y sin(phi) >= c.
The estimator discretizes directions to multiples of delta and offsets
to multiples of a = delta*n/sqrt(2), draws O(1/delta^2 log 1/delta)
uniform samples, and returns the smallest empirical distance over the
reference family.  Per direction the candidate offsets cover one step
beyond the projection range of the image corners, so an all-black and
an all-white candidate always exist; ties in the minimization break
toward the lowest (direction index, offset index).

Offsets use 64-bit floats; bucket boundaries resolve by floor.  This
trades exactness on boundary pixels for reproducibility, which the
estimator tolerates (the effect is O(1/n) per candidate).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, cos, floor, log, pi, sin, sqrt

import numpy as np

from .image import BinaryImage
from .sampling import SampleSet, make_sample

__all__ = [
    "DirectionSet",
    "HalfPlaneRef",
    "HalfPlaneEstimate",
    "direction_set",
    "render_halfplane",
    "halfplane_sample_size",
    "reference_offsets",
    "evaluate_direction",
    "estimate_halfplane_distance",
    "learn_halfplane",
]

REGIME_FLOOR = 90.0  # guarantee needs delta > 90/n; below that we warn


@dataclass(frozen=True)
class DirectionSet:
    delta: float
    directions: np.ndarray  # angles i*delta, i < ceil(2*pi/delta)

    def __len__(self) -> int:
        return len(self.directions)


def direction_set(delta: float) -> DirectionSet:
    if not 0 < delta < 0.25:
        raise ValueError(f"delta must be in (0, 1/4), got {delta}")
    count = ceil(2 * pi / delta)
    return DirectionSet(delta, np.arange(count) * delta)


@dataclass(frozen=True)
class HalfPlaneRef:
    """Reference half-plane: black set {(x, y) : x cos(phi) + y sin(phi) >= c}
    with c = offset_index * a, a = delta*n/sqrt(2)."""

    phi: float
    c: float
    n: int
    dir_index: int = -1
    offset_index: int = 0


@dataclass(frozen=True)
class HalfPlaneEstimate:
    dhat: float
    argmin: HalfPlaneRef
    sample_size: int
    realized_samples: int
    warnings: tuple[str, ...] = field(default=())


def render_halfplane(ref: HalfPlaneRef) -> BinaryImage:
    if ref.n < 1:
        raise ValueError("image side must be >= 1")
    xs = np.arange(ref.n)
    proj = np.add.outer(np.sin(ref.phi) * xs, np.cos(ref.phi) * xs)  # [y, x]
    return BinaryImage(proj >= ref.c)


def halfplane_sample_size(delta: float) -> int:
    """s = ceil((6/delta^2) ln(7/delta)); rounding up never under-samples."""
    return ceil(6 / (delta * delta) * log(7 / delta))


def _corner_projection_range(n: int, phi: float) -> tuple[float, float]:
    cs, sn = cos(phi), sin(phi)
    vals = [cx * cs + cy * sn for cx in (0.0, n - 1.0) for cy in (0.0, n - 1.0)]
    return min(vals), max(vals)


def reference_offsets(n: int, delta: float, phi: float) -> tuple[float, int, int]:
    """(a, j_min, j_max): candidate offsets c = j*a for j in [j_min, j_max],
    covering [min projection - a, max projection + a] of the image corners.
    j_min always renders all-black and j_max all-white."""
    a = delta * n / sqrt(2)
    lo, hi = _corner_projection_range(n, phi)
    return a, ceil(lo / a) - 1, floor(hi / a) + 1


def evaluate_direction(sample: SampleSet, n: int, delta: float,
                       dir_index: int, normalizer: int) -> tuple[np.ndarray, float, int, int]:
    """Empirical distances of every candidate offset of one direction.

    Buckets each sample by j = floor((x cos phi + y sin phi)/a) and scans
    prefix sums, so the cost is O(|sample| + candidates).
    Returns (dhat per offset, a, j_min, j_max).
    """
    phi = dir_index * delta
    a, j_min, j_max = reference_offsets(n, delta, phi)
    proj = sample.xs * cos(phi) + sample.ys * sin(phi)
    buckets = np.floor(proj / a)
    black_buckets = np.sort(buckets[sample.colors == 1])
    white_buckets = np.sort(buckets[sample.colors == 0])
    js = np.arange(j_min, j_max + 1)
    blacks_below = np.searchsorted(black_buckets, js, side="left")
    whites_above = len(white_buckets) - np.searchsorted(white_buckets, js, side="left")
    return (blacks_below + whites_above) / normalizer, a, j_min, j_max


def estimate_halfplane_distance(
    image: BinaryImage,
    delta: float,
    seed: int = 0,
    mode: str = "uniform",
) -> HalfPlaneEstimate:
    """Additive distance approximation to being a half-plane (within delta
    with probability >= 2/3 in the regime delta in (90/n, 1/4)).

    mode selects the access model: uniform (default), bernoulli, or full;
    with mode="full" the result is the exact minimum distance over the
    reference family and the run is deterministic.
    """
    if not 0 < delta < 0.25:
        raise ValueError(f"delta must be in (0, 1/4), got {delta}")
    n = image.n
    warnings = []
    if delta <= REGIME_FLOOR / n:
        warnings.append(
            f"delta={delta} <= 90/n={REGIME_FLOOR / n:.4g}: outside the paper regime, "
            "the additive guarantee weakens")
    s = n * n if mode == "full" else halfplane_sample_size(delta)
    sample = make_sample(image, mode, s, seed)
    dirs = direction_set(delta)
    best = None  # (dhat, dir_index, offset_index, a, j_min)
    for i in range(len(dirs)):
        dhats, a, j_min, _ = evaluate_direction(sample, n, delta, i, s)
        off = int(np.argmin(dhats))  # lowest offset index wins ties
        val = float(dhats[off])
        if best is None or val < best[0]:
            best = (val, i, j_min + off, a)
    val, dir_index, j, a = best
    ref = HalfPlaneRef(phi=dir_index * delta, c=j * a, n=n,
                       dir_index=dir_index, offset_index=j)
    return HalfPlaneEstimate(
        dhat=min(max(val, 0.0), 0.5),
        argmin=ref,
        sample_size=s,
        realized_samples=len(sample),
        warnings=tuple(warnings),
    )


def learn_halfplane(
    image: BinaryImage,
    delta: float,
    seed: int = 0,
    mode: str = "uniform",
) -> tuple[HalfPlaneRef, BinaryImage]:
    """Proper agnostic PAC learner: with probability >= 2/3 the rendered
    hypothesis is within delta of the best half-plane image."""
    est = estimate_halfplane_distance(image, delta, seed=seed, mode=mode)
    return est.argmin, render_halfplane(est.argmin)
