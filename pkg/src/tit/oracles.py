"""Exact brute-force distances to each property, for desk-scale ground truth.

Budgets are hard limits: a call above budget raises OracleBudgetError
rather than silently approximating.

The half-plane oracle does not enumerate 2^(n^2) images.  Every
half-plane dichotomy of a finite planar point set is realized by a
direction perpendicular to the difference vector of two pixel centers,
with the threshold swept across the sorted projections (ties broken
toward either end of the perpendicular, which captures the labelings
attained strictly between critical directions).  Sweeping all primitive
difference directions with both orientations and both tie-breaks, plus
the two constant images, is therefore exhaustive.  This raises the
usable budget to n = 24.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .image import BinaryImage

__all__ = [
    "OracleBudget",
    "OracleBudgetError",
    "DEFAULT_BUDGET",
    "oracle_halfplane_distance",
    "oracle_convexity_distance",
    "oracle_connectedness_distance",
    "oracle_border_connectedness_distance",
]


class OracleBudgetError(ValueError):
    """Requested instance exceeds the exact-enumeration budget."""


@dataclass(frozen=True)
class OracleBudget:
    halfplane: int = 24
    convexity: int = 5
    connectedness: int = 4
    border_connectedness: int = 5


DEFAULT_BUDGET = OracleBudget()


def _check(n: int, limit: int, what: str) -> None:
    if n > limit:
        raise OracleBudgetError(f"{what} oracle budget is n <= {limit}, got n = {n}")


# ---------------------------------------------------------------------------
# half-plane

def _primitive_directions(n: int) -> np.ndarray:
    out = []
    for dx in range(-(n - 1), n):
        for dy in range(-(n - 1), n):
            if (dx, dy) == (0, 0) or gcd(abs(dx), abs(dy)) != 1:
                continue
            if dx > 0 or (dx == 0 and dy > 0):  # one representative per +-pair
                out.append((dx, dy))
    return np.array(out, dtype=np.int64)


def oracle_halfplane_distance(image: BinaryImage, budget: OracleBudget = DEFAULT_BUDGET) -> float:
    _check(image.n, budget.halfplane, "half-plane")
    n = image.n
    gx, gy = np.meshgrid(np.arange(n, dtype=np.int64), np.arange(n, dtype=np.int64))
    px, py = gx.ravel(), gy.ravel()
    colors = image.array.ravel().astype(np.int64)
    total_black = int(colors.sum())
    m = n * n
    best = min(m - total_black, total_black)  # constant images

    dirs = _primitive_directions(n)
    # normal u = (-dy, dx); secondary key along d resolves tie groups.
    primary = -dirs[:, 1:2] * px + dirs[:, 0:1] * py      # (D, m)
    secondary = dirs[:, 0:1] * px + dirs[:, 1:2] * py     # (D, m)
    big = 8 * n * n
    for sec_sign in (1, -1):
        key = primary * big + sec_sign * secondary
        order = np.argsort(key, axis=1, kind="stable")
        ksort = np.take_along_axis(key, order, axis=1)
        csort = np.take_along_axis(np.broadcast_to(colors, key.shape), order, axis=1)
        blacks_below = np.cumsum(csort, axis=1)           # blacks among first i
        whites_below = np.arange(1, m + 1) - blacks_below
        cut_ok = np.ones_like(key, dtype=bool)
        cut_ok[:, :-1] = ksort[:, 1:] != ksort[:, :-1]    # cut only between distinct keys
        # black = high side: errors = blacks below cut + whites at/above.
        err_hi = blacks_below + ((m - total_black) - whites_below)
        # black = low side.
        err_lo = whites_below + (total_black - blacks_below)
        err = np.where(cut_ok, np.minimum(err_hi, err_lo), m)
        best = min(best, int(err.min()))
    return best / m


# ---------------------------------------------------------------------------
# convexity: enumerate every convex subset of the n x n grid once, cached.

_CONVEX_SETS_CACHE: dict[int, np.ndarray] = {}


def _convex_masks(n: int) -> np.ndarray:
    """All convex black sets of an n x n image, as sorted uint64 bitmasks
    (bit y*n+x).

    A convex set has one interval per occupied row, but occupied rows
    need not be contiguous: the hull of a thin set can cross a middle
    row strictly between lattice points.  Enumerate the occupied-row
    subset, then the interval per occupied row; a combination is convex
    iff every occupied row reaches the ceil/floor of the chords
    interpolated between the other occupied rows, and every skipped row
    inside the range has a lattice-free hull slice.
    """
    if n in _CONVEX_SETS_CACHE:
        return _CONVEX_SETS_CACHE[n]
    intervals = [(lo, hi) for lo in range(n) for hi in range(lo, n)]
    iv = np.array(intervals, dtype=np.int64)
    masks = [np.zeros(1, dtype=np.uint64)]
    for rowset in range(1, 1 << n):
        rows = [y for y in range(n) if rowset >> y & 1]
        k = len(rows)
        shape = (len(iv),) * k
        idx = np.indices(shape).reshape(k, -1)
        lo = iv[idx, 0]
        hi = iv[idx, 1]
        ok = np.ones(idx.shape[1], dtype=bool)

        def chord(arr, a_i, c_i, y):
            # exact rational interpolation between occupied rows a_i, c_i at row y
            a, c = rows[a_i], rows[c_i]
            num = arr[a_i] * (c - y) + arr[c_i] * (y - a)
            return num, c - a

        for b_i in range(1, k - 1):
            y = rows[b_i]
            for a_i in range(b_i):
                for c_i in range(b_i + 1, k):
                    lnum, den = chord(lo, a_i, c_i, y)
                    rnum, _ = chord(hi, a_i, c_i, y)
                    ok &= lo[b_i] <= -((-lnum) // den)    # lo_b <= ceil
                    ok &= hi[b_i] >= rnum // den          # hi_b >= floor
        # skipped rows inside the occupied range must have empty hull slices
        for y in range(rows[0] + 1, rows[-1]):
            if rowset >> y & 1:
                continue
            lo_ceil = None
            hi_floor = None
            for a_i in range(k):
                if rows[a_i] >= y:
                    break
                for c_i in range(a_i + 1, k):
                    if rows[c_i] <= y:
                        continue
                    lnum, den = chord(lo, a_i, c_i, y)
                    rnum, _ = chord(hi, a_i, c_i, y)
                    lc = -((-lnum) // den)
                    rf = rnum // den
                    lo_ceil = lc if lo_ceil is None else np.minimum(lo_ceil, lc)
                    hi_floor = rf if hi_floor is None else np.maximum(hi_floor, rf)
            ok &= lo_ceil > hi_floor
        lo, hi = lo[:, ok], hi[:, ok]
        row_masks = np.zeros(lo.shape[1], dtype=np.uint64)
        for r_i, y in enumerate(rows):
            seg = ((np.uint64(1) << (hi[r_i] - lo[r_i] + 1).astype(np.uint64)) - np.uint64(1)) \
                << (lo[r_i] + y * n).astype(np.uint64)
            row_masks |= seg
        masks.append(row_masks)
    arr = np.unique(np.concatenate(masks))
    _CONVEX_SETS_CACHE[n] = arr
    return arr


def _image_mask(image: BinaryImage) -> int:
    bits = image.array.ravel()
    return int.from_bytes(np.packbits(bits.astype(np.uint8), bitorder="little").tobytes(), "little")


def oracle_convexity_distance(image: BinaryImage, budget: OracleBudget = DEFAULT_BUDGET) -> float:
    _check(image.n, budget.convexity, "convexity")
    n = image.n
    masks = _convex_masks(n)
    target = np.uint64(_image_mask(image))
    diff = np.bitwise_count(masks ^ target)
    return int(diff.min()) / (n * n)


# ---------------------------------------------------------------------------
# connectedness / border connectedness: vectorized reachability over all
# 2^(k^2) colorings at once, cached per side length.

def _grid_shift_tables(k: int):
    full = (1 << (k * k)) - 1
    not_last_col = 0
    not_first_col = 0
    for y in range(k):
        for x in range(k):
            b = 1 << (y * k + x)
            if x < k - 1:
                not_last_col |= b
            if x > 0:
                not_first_col |= b
    return full, not_last_col, not_first_col


def _propagate_all(blacks: np.ndarray, seeds: np.ndarray, k: int) -> np.ndarray:
    """Grow each seed set within its black set by 4-adjacency to fixpoint."""
    full, nlc, nfc = _grid_shift_tables(k)
    full = np.uint64(full)
    nlc = np.uint64(nlc)
    nfc = np.uint64(nfc)
    reach = seeds & blacks
    for _ in range(k * k):
        grown = reach
        grown = grown | ((reach & nlc) << np.uint64(1))
        grown = grown | ((reach & nfc) >> np.uint64(1))
        grown = grown | ((reach << np.uint64(k)) & full)
        grown = grown | (reach >> np.uint64(k))
        grown &= blacks
        if np.array_equal(grown, reach):
            break
        reach = grown
    return reach


_CONNECTED_CACHE: dict[int, np.ndarray] = {}
_BORDER_CONNECTED_CACHE: dict[int, np.ndarray] = {}


def _connected_masks(k: int) -> np.ndarray:
    if k in _CONNECTED_CACHE:
        return _CONNECTED_CACHE[k]
    count = 1 << (k * k)
    all_masks = np.arange(count, dtype=np.uint64)
    lowest = all_masks & (~all_masks + np.uint64(1))
    reach = _propagate_all(all_masks, lowest, k)
    good = all_masks[reach == all_masks].astype(np.uint32)  # includes the empty image
    _CONNECTED_CACHE[k] = good
    return good


def _border_bits(k: int) -> int:
    bits = 0
    for y in range(k):
        for x in range(k):
            if x in (0, k - 1) or y in (0, k - 1):
                bits |= 1 << (y * k + x)
    return bits


def _border_connected_masks(k: int) -> np.ndarray:
    if k in _BORDER_CONNECTED_CACHE:
        return _BORDER_CONNECTED_CACHE[k]
    count = 1 << (k * k)
    border = np.uint64(_border_bits(k))
    chunk = 1 << 22
    goods = []
    for start in range(0, count, chunk):
        masks = np.arange(start, min(start + chunk, count), dtype=np.uint64)
        reach = _propagate_all(masks, masks & border, k)
        goods.append(masks[reach == masks].astype(np.uint32))
    good = np.concatenate(goods)
    _BORDER_CONNECTED_CACHE[k] = good
    return good


def _min_hamming(masks: np.ndarray, image: BinaryImage) -> float:
    target = masks.dtype.type(_image_mask(image))
    diff = np.bitwise_count(masks ^ target)
    return int(diff.min()) / (image.n * image.n)


def oracle_connectedness_distance(image: BinaryImage, budget: OracleBudget = DEFAULT_BUDGET) -> float:
    _check(image.n, budget.connectedness, "connectedness")
    return _min_hamming(_connected_masks(image.n), image)


def oracle_border_connectedness_distance(image: BinaryImage, budget: OracleBudget = DEFAULT_BUDGET) -> float:
    _check(image.n, budget.border_connectedness, "border-connectedness")
    return _min_hamming(_border_connected_masks(image.n), image)
