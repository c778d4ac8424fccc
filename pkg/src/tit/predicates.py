"""Structural predicates on binary images: half-plane, convex, connected.

All geometry here is exact integer arithmetic on pixel centers.  The
empty black set vacuously satisfies every predicate in this module.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy import ndimage

from .image import BinaryImage

__all__ = [
    "convex_hull",
    "hull_row_intervals",
    "rasterize_hull",
    "is_halfplane",
    "is_convex",
    "is_connected",
    "connected_components",
    "is_border_connected",
]

_FOUR_CONN = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list[tuple[int, int]]:
    """Convex hull of integer points (monotone chain), counterclockwise
    in the x-right/y-up sense; collinear interior points are dropped.
    Returns 1 or 2 points for degenerate inputs.
    """
    pts = sorted({(int(x), int(y)) for x, y in points})
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _row_extremes(image: BinaryImage) -> list[tuple[int, int]]:
    # Per-row min/max black columns: enough to determine the hull.
    a = image.array
    out = []
    for y in range(image.n):
        row = np.nonzero(a[y])[0]
        if len(row):
            out.append((int(row[0]), y))
            out.append((int(row[-1]), y))
    return out


def hull_row_intervals(hull: list[tuple[int, int]], n: int) -> dict[int, tuple[int, int]]:
    """For each image row y, the integer x interval covered by the closed
    hull, as exact rational endpoint rounding.  Rows the hull misses are
    absent from the result.
    """
    if not hull:
        return {}
    ys = [p[1] for p in hull]
    y0, y1 = min(ys), max(ys)
    out = {}
    for y in range(max(0, y0), min(n - 1, y1) + 1):
        lo, hi = None, None
        m = len(hull)
        for i in range(m):
            x1, yy1 = hull[i]
            x2, yy2 = hull[(i + 1) % m] if m > 1 else hull[i]
            if (x1, yy1) == (x2, yy2) and m > 1:
                continue
            ylo, yhi = min(yy1, yy2), max(yy1, yy2)
            if not (ylo <= y <= yhi):
                continue
            if yy1 == yy2:
                cand = [Fraction(x1), Fraction(x2)]
            else:
                cand = [Fraction(x1) + Fraction((x2 - x1) * (y - yy1), (yy2 - yy1))]
            for x in cand:
                lo = x if lo is None or x < lo else lo
                hi = x if hi is None or x > hi else hi
        if m == 1:
            lo = hi = Fraction(hull[0][0])
        if lo is None:
            continue
        xi_lo = int(-((-lo.numerator) // lo.denominator))  # ceil
        xi_hi = int(hi.numerator // hi.denominator)        # floor
        if xi_lo <= xi_hi:
            out[y] = (xi_lo, xi_hi)
    return out


def rasterize_hull(vertices, n: int) -> BinaryImage:
    """Image whose black set is every lattice point of [0,n-1]^2 inside or
    on the convex hull of ``vertices`` (which may be empty).
    """
    pts = list(vertices)
    a = np.zeros((n, n), dtype=bool)
    if pts:
        hull = convex_hull(pts)
        for y, (lo, hi) in hull_row_intervals(hull, n).items():
            a[y, max(0, lo): min(n - 1, hi) + 1] = True
    return BinaryImage(a)


def _point_in_hull(pts: np.ndarray, hull: list[tuple[int, int]]) -> np.ndarray:
    """Boolean mask: which of the (k,2) integer points lie in the closed hull."""
    if len(hull) == 0:
        return np.zeros(len(pts), dtype=bool)
    if len(hull) == 1:
        return (pts[:, 0] == hull[0][0]) & (pts[:, 1] == hull[0][1])
    if len(hull) == 2:
        (x1, y1), (x2, y2) = hull
        d = np.array([x2 - x1, y2 - y1], dtype=np.int64)
        rel = pts - np.array([x1, y1])
        online = rel[:, 0] * d[1] == rel[:, 1] * d[0]
        t = rel @ d
        return online & (t >= 0) & (t <= d @ d)
    inside = np.ones(len(pts), dtype=bool)
    m = len(hull)
    for i in range(m):
        x1, y1 = hull[i]
        x2, y2 = hull[(i + 1) % m]
        side = (x2 - x1) * (pts[:, 1] - y1) - (y2 - y1) * (pts[:, 0] - x1)
        inside &= side >= 0
    return inside


def is_halfplane(image: BinaryImage) -> bool:
    """True iff some closed half-plane {x cos(phi) + y sin(phi) >= c}
    contains exactly the black pixel centers.  Equivalent to the convex
    hulls of the black and white centers being disjoint; constant images
    qualify.
    """
    blacks = image.black_pixels()
    if len(blacks) == 0 or len(blacks) == image.n * image.n:
        return True
    whites_mask = ~image.array
    ys, xs = np.nonzero(whites_mask)
    whites = np.column_stack([xs, ys]).astype(np.int64)
    hb = convex_hull(blacks)
    hw = convex_hull(whites)
    # Disjoint compact convex sets are strictly separable and vice versa.
    if _point_in_hull(blacks, hw).any() or _point_in_hull(whites, hb).any():
        return False
    return not _hulls_edges_intersect(hb, hw)


def _segments_intersect(p1, p2, p3, p4) -> bool:
    d1 = _cross(p3, p4, p1)
    d2 = _cross(p3, p4, p2)
    d3 = _cross(p1, p2, p3)
    d4 = _cross(p1, p2, p4)
    if ((d1 > 0) != (d2 > 0)) and d1 != 0 and d2 != 0 and \
       ((d3 > 0) != (d4 > 0)) and d3 != 0 and d4 != 0:
        return True

    def on_seg(a, b, c):
        return _cross(a, b, c) == 0 and min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) \
            and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    return on_seg(p3, p4, p1) or on_seg(p3, p4, p2) or on_seg(p1, p2, p3) or on_seg(p1, p2, p4)


def _hulls_edges_intersect(h1, h2) -> bool:
    e1 = list(zip(h1, h1[1:] + h1[:1])) if len(h1) > 1 else []
    e2 = list(zip(h2, h2[1:] + h2[:1])) if len(h2) > 1 else []
    for a, b in e1:
        for c, d in e2:
            if _segments_intersect(a, b, c, d):
                return True
    return False


def is_convex(image: BinaryImage) -> bool:
    """True iff every lattice point inside/on the convex hull of the black
    pixel centers is itself black.
    """
    if image.black_count() == 0:
        return True
    hull = convex_hull(_row_extremes(image))
    intervals = hull_row_intervals(hull, image.n)
    a = image.array
    for y in range(image.n):
        row = np.nonzero(a[y])[0]
        want = intervals.get(y)
        if want is None:
            if len(row):
                return False
            continue
        lo, hi = want
        if len(row) != hi - lo + 1 or row[0] != lo or row[-1] != hi:
            return False
    return True


def connected_components(image: BinaryImage) -> list[set[tuple[int, int]]]:
    """4-neighbor components of the black set, as sets of (x, y) pixels."""
    labels, count = ndimage.label(image.array, structure=_FOUR_CONN)
    comps: list[set] = [set() for _ in range(count)]
    ys, xs = np.nonzero(labels)
    for x, y in zip(xs, ys):
        comps[labels[y, x] - 1].add((int(x), int(y)))
    return comps


def is_connected(image: BinaryImage) -> bool:
    """True iff the black set forms at most one 4-connected component."""
    _, count = ndimage.label(image.array, structure=_FOUR_CONN)
    return count <= 1


def is_border_connected(image: BinaryImage) -> bool:
    """True iff every black component contains a pixel on the image border."""
    labels, count = ndimage.label(image.array, structure=_FOUR_CONN)
    if count == 0:
        return True
    border = np.zeros_like(labels, dtype=bool)
    border[0, :] = border[-1, :] = border[:, 0] = border[:, -1] = True
    touching = np.unique(labels[border & (labels > 0)])
    return len(touching) == count
