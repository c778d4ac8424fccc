"""Distance approximation to convexity via dynamic programming over
reference polygons, plus the proper agnostic convex learner.

A candidate polygon is built from a reference box (two horizontal and
two vertical line-point pairs): the quadrilateral of the four points is
black, everything outside the box white, and each corner triangle is
resolved recursively by the moves of the reference-polygon grammar:
blacken a quadrilateral toward the apex (base change), split the rest
with a near-base-parallel reference line (subdivision), or whiten it
(end of processing).  The estimator returns the smallest fraction of
samples misclassified by any candidate.

All DP values are integer mismatch counts over the drawn sample; the
final estimate divides by the sample-size parameter and clamps to
[0, 1/2].  Region counts come from the bitmask machinery in refgrid,
so the regions of the winning decomposition partition the samples
exactly and the estimate equals the sum of their empirical errors.

Degenerate (zero-area) triangles are never enumerated as DP instances;
the one exception is the empty instance with both base points at the
apex, which represents blackening a corner triangle entirely.  The
public best_for_fixed_base still answers a degenerate triangle directly
(the cost of whitening its carrier segment).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import atan2, ceil, log, pi

import numpy as np

from .image import BinaryImage
from .predicates import convex_hull
from .refgrid import (PRACTICAL_CONSTANTS, TOL, ConvexityConstants, LineFamily,
                      LinePointPair, ReferenceGrid, SampleBits, _pack_bool,
                      build_reference_grid)
from .sampling import make_sample

__all__ = [
    "ReferenceBox",
    "TriangleInstance",
    "TraceRegion",
    "ConvexityEstimate",
    "ConvexityDP",
    "convexity_sample_size",
    "estimate_convexity_distance",
    "learn_convex",
    "render_convex_hypothesis",
]

_INF = 1 << 60


@dataclass(frozen=True)
class ReferenceBox:
    """Four line-point pairs delimiting a candidate polygon: two
    horizontal (b0 above b2) and two vertical (b1 left of b3)."""

    b0: LinePointPair
    b1: LinePointPair
    b2: LinePointPair
    b3: LinePointPair

    def vertex_set(self):
        return (self.b0, self.b1, self.b2, self.b3)


@dataclass(frozen=True)
class TriangleInstance:
    """A DP instance triangle: two line-point pairs whose lines meet at
    the apex.  Pairs are stored in canonical order so each geometric
    triangle has one key."""

    a: LinePointPair
    b: LinePointPair

    def __post_init__(self):
        ka = (self.a.family, self.a.line, self.a.point)
        kb = (self.b.family, self.b.line, self.b.point)
        if kb < ka:
            first, second = self.b, self.a
            object.__setattr__(self, "a", first)
            object.__setattr__(self, "b", second)


@dataclass(frozen=True)
class TraceRegion:
    label: str
    declared_black: bool
    mask: int
    black: int
    white: int

    @property
    def errors(self) -> int:
        return self.white if self.declared_black else self.black


@dataclass(frozen=True)
class ConvexityEstimate:
    dhat: float
    hypothesis_vertices: tuple[tuple[float, float], ...]
    trace: tuple[TraceRegion, ...]
    total_errors: int
    normalizer: int
    sample_size: int
    realized_samples: int
    winner: tuple | None
    # (parent area, child areas, base angles) of each subdivision step on
    # the winning decomposition, for the area-contraction invariant
    subdivisions: tuple[tuple, ...] = field(default=())
    warnings: tuple[str, ...] = field(default=())
    box: ReferenceBox | None = field(default=None)


def convexity_sample_size(delta: float,
                          constants: ConvexityConstants = PRACTICAL_CONSTANTS) -> int:
    """Expected sample size s = ceil(C * (1/delta^2) * ln(1/delta))."""
    return ceil(constants.sample_const / (delta * delta) * log(1 / delta))


class _PairTable:
    """Masks, counts and DP values for every triangle instance on one
    unordered pair of reference lines; entries are materialized in one
    vectorized pass on first touch."""

    __slots__ = ("dp", "ga", "gb", "fam_a", "fam_b", "line_a", "line_b",
                 "pts_a", "pts_b", "v", "parallel", "side_a", "side_b",
                 "corner_a", "corner_b", "flat_m", "mask_m",
                 "black_m", "white_m", "_row_built", "_nx", "_ny", "_c",
                 "_sv", "_scale", "_sel_a", "_sel_b", "_seg_cache",
                 "_bffb", "_bffb_choice", "_best", "_best_choice")

    def __init__(self, dp: "ConvexityDP", ga: int, gb: int):
        self.dp = dp
        self.ga, self.gb = ga, gb
        bits = dp.bits
        self.fam_a, self.line_a = dp.line_owner[ga]
        self.fam_b, self.line_b = dp.line_owner[gb]
        fa = dp.grid.families[self.fam_a]
        fb = dp.grid.families[self.fam_b]
        self.pts_a = fa.point_xy[self.line_a]
        self.pts_b = fb.point_xy[self.line_b]
        ka, kb = len(self.pts_a), len(self.pts_b)
        g1, g2 = bits.line_geometry(ga), bits.line_geometry(gb)
        det = g1[0] * g2[1] - g2[0] * g1[1]
        if abs(det) < 1e-12:
            self.parallel = True
            self.v = None
            self.side_a = self.side_b = None
            self.corner_a = self.corner_b = -1
            self.flat_m = np.ones((ka, kb), dtype=bool)
        else:
            self.parallel = False
            self.v = ((g1[2] * g2[1] - g2[2] * g1[1]) / det,
                      (g1[0] * g2[2] - g2[0] * g1[2]) / det)
            # side of the other line at each point; ~0 means the point sits
            # at the apex
            self.side_b = self.pts_a[:, 0] * g2[0] + self.pts_a[:, 1] * g2[1] - g2[2]
            self.side_a = self.pts_b[:, 0] * g1[0] + self.pts_b[:, 1] * g1[1] - g1[2]
            ca = np.nonzero(np.abs(self.side_b) <= TOL)[0]
            cb = np.nonzero(np.abs(self.side_a) <= TOL)[0]
            self.corner_a = int(ca[0]) if len(ca) else -1
            self.corner_b = int(cb[0]) if len(cb) else -1
            px, py = self.pts_a[:, 0], self.pts_a[:, 1]
            qx, qy = self.pts_b[:, 0], self.pts_b[:, 1]
            self._nx = qy[None, :] - py[:, None]          # (ka, kb)
            self._ny = -(qx[None, :] - px[:, None])
            self._c = self._nx * px[:, None] + self._ny * py[:, None]
            self._sv = self._nx * self.v[0] + self._ny * self.v[1] - self._c
            self._scale = np.maximum(np.maximum(np.abs(self._nx), np.abs(self._ny)), 1.0)
            flat = (np.abs(self._sv) <= TOL * self._scale) \
                | (np.abs(self.side_a)[None, :] <= TOL) \
                | (np.abs(self.side_b)[:, None] <= TOL)
            if self.corner_a >= 0 and self.corner_b >= 0:
                flat[self.corner_a, self.corner_b] = False
            self.flat_m = flat
        self.mask_m = [None] * ka
        self.black_m = np.zeros((ka, kb), dtype=np.int64)
        self.white_m = np.zeros((ka, kb), dtype=np.int64)
        self._row_built = [False] * ka
        self._sel_a = None
        self._seg_cache: dict = {}
        self._bffb = {}
        self._bffb_choice = {}
        self._best = {}
        self._best_choice = {}

    def ensure_row(self, i: int) -> None:
        built = self._row_built
        if built[i]:
            return
        built[i] = True
        bits = self.dp.bits
        kb = len(self.pts_b)
        if self.parallel:
            self.mask_m[i] = [None] * kb
            return
        if self._sel_a is None:
            a_pos = bits.line_ge(self.ga)
            a_neg = bits.full & ~bits.line_gt(self.ga)
            b_pos = bits.line_ge(self.gb)
            b_neg = bits.full & ~bits.line_gt(self.gb)
            self._sel_a = [a_pos if s > 0 else a_neg for s in self.side_a]
            self._sel_b = [b_pos if s > 0 else b_neg for s in self.side_b]
        xs, ys = bits.xs, bits.ys
        flat = self.flat_m[i]
        if len(xs):
            proj = self._nx[i][:, None] * xs[None, :] + self._ny[i][:, None] * ys[None, :]
            hi = proj > (self._c[i] + TOL * self._scale[i])[:, None]
            lo = proj < (self._c[i] - TOL * self._scale[i])[:, None]
            strict = np.where((self._sv[i] > 0)[:, None], hi, lo)
            ints = _pack_bool(strict)
        else:
            ints = [0] * kb
        row = []
        sb = self._sel_b[i]
        sel_a = self._sel_a
        blk, wht = bits.black, bits.white
        black_row = self.black_m[i]
        white_row = self.white_m[i]
        for j in range(kb):
            if flat[j]:
                row.append(None)
                continue
            m = sel_a[j] & sb & ints[j]
            row.append(m)
            black_row[j] = (m & blk).bit_count()
            white_row[j] = (m & wht).bit_count()
        if i == self.corner_a and self.corner_b >= 0:
            row[self.corner_b] = 0
            black_row[self.corner_b] = 0
            white_row[self.corner_b] = 0
        self.mask_m[i] = row

    def is_corner(self, i: int, j: int) -> bool:
        return i == self.corner_a and j == self.corner_b and i >= 0 and j >= 0

    def flat(self, i: int, j: int) -> bool:
        return bool(self.flat_m[i, j])

    def mask(self, i: int, j: int) -> int | None:
        self.ensure_row(i)
        return self.mask_m[i][j]

    def blacks(self, i: int, j: int) -> int:
        self.ensure_row(i)
        return int(self.black_m[i, j])

    def whites(self, i: int, j: int) -> int:
        self.ensure_row(i)
        return int(self.white_m[i, j])

    def seg_indices(self, line: str, idx: int) -> np.ndarray:
        """Grid-point indices on the segment from point ``idx`` toward the
        apex, ordered from idx inward, excluding the apex corner point."""
        key = (line, idx)
        hit = self._seg_cache.get(key)
        if hit is not None:
            return hit
        fam = self.dp.grid.families[self.fam_a if line == "a" else self.fam_b]
        li = self.line_a if line == "a" else self.line_b
        ts = fam.point_ts[li]
        vx, vy = self.v
        tv = vx * fam.ux + vy * fam.uy
        ti = ts[idx]
        if ti <= tv:
            sel = np.nonzero((ts >= ti - TOL) & (ts <= tv + TOL))[0]
        else:
            sel = np.nonzero((ts >= tv - TOL) & (ts <= ti + TOL))[0][::-1]
        corner = self.corner_a if line == "a" else self.corner_b
        if corner >= 0:
            sel = sel[sel != corner]
        self._seg_cache[key] = sel
        return sel


class ConvexityDP:
    """Shared state of one estimator run: grid, sample bitmasks, pair
    tables, and the memoized Best / BestForFixedBase values (integer
    mismatch counts over the sample)."""

    def __init__(self, grid: ReferenceGrid, bits: SampleBits):
        self.grid = grid
        self.bits = bits
        self.cutoff = grid.constants.height_factor * grid.pitch
        self.line_owner: dict[int, tuple[int, int]] = {}
        for fam in grid.families:
            for li in range(fam.line_count):
                self.line_owner[fam.line_gids[li]] = (fam.index, li)
        self._pairs: dict[tuple[int, int], _PairTable] = {}
        self._fam_cache: dict[int, LineFamily] = {}
        self._grow_cache: dict[tuple, np.ndarray] = {}
        self.depth = 0

    def pair(self, ga: int, gb: int) -> _PairTable:
        key = (ga, gb) if ga <= gb else (gb, ga)
        tab = self._pairs.get(key)
        if tab is None:
            tab = _PairTable(self, key[0], key[1])
            self._pairs[key] = tab
        return tab

    def family_for_inclination(self, alpha: float) -> LineFamily:
        key = round(alpha / pi * 46080) % 46080  # ~1/80 degree buckets
        fam = self._fam_cache.get(key)
        if fam is None:
            fam = self.grid.family_for_inclination(alpha)
            self._fam_cache[key] = fam
        return fam

    def g_row(self, tab: _PairTable, fixed_gid: int, idx: int):
        """Cached vector of Best - whites over the other line's points,
        filled lazily (NaN = not yet computed); plus the flat flags."""
        side = "a" if fixed_gid == tab.ga else "b"
        key = (tab.ga, tab.gb, side, idx)
        hit = self._grow_cache.get(key)
        if hit is not None:
            return hit
        if side == "a":
            row = np.full(len(tab.pts_b), np.nan)
            flat = tab.flat_m[idx, :]
        else:
            row = np.full(len(tab.pts_a), np.nan)
            flat = tab.flat_m[:, idx]
        out = (row, flat)
        self._grow_cache[key] = out
        return out

    def fill_g(self, tab: _PairTable, fixed_gid: int, idx: int,
               row: np.ndarray, idxs: np.ndarray) -> None:
        side_a = fixed_gid == tab.ga
        for t in idxs:
            t = int(t)
            if row[t] == row[t]:  # not NaN
                continue
            if side_a:
                row[t] = self._best(tab, idx, t) - tab.white_m[idx, t]
            else:
                row[t] = self._best(tab, t, idx) - tab.white_m[t, idx]

    def _oriented(self, tab: _PairTable, ga: int, i: int, j: int) -> tuple[int, int]:
        # translate (point-on-ga, point-on-gb) into the table's (a, b) order
        return (i, j) if ga == tab.ga else (j, i)

    # -- Best ---------------------------------------------------------------

    def best(self, ga: int, i: int, gb: int, j: int) -> int:
        """Smallest mismatch count achievable on the instance triangle with
        base points (point i of line ga, point j of line gb)."""
        tab = self.pair(ga, gb)
        ti, tj = self._oriented(tab, ga, i, j)
        return self._best(tab, ti, tj)

    def _best(self, tab: _PairTable, i: int, j: int) -> int:
        key = (i, j)
        hit = tab._best.get(key)
        if hit is not None:
            return hit
        if tab.is_corner(i, j):
            tab._best[key] = 0
            tab._best_choice[key] = (i, j)
            return 0
        if tab.flat(i, j):
            raise ValueError("degenerate triangle instance is not a DP key")
        self.depth += 1
        if self.depth > 300:
            raise RecursionError("convexity DP recursion ran away")
        whole_w = tab.whites(i, j)
        best = _INF
        choice = None
        if tab.blacks(i, j) == 0:
            # whiten everything via the no-op base change at zero cost
            best = 0
            choice = (i, j)
        else:
            ps = tab.seg_indices("a", i)
            qs = tab.seg_indices("b", j)
            can_corner = tab.corner_a >= 0 and tab.corner_b >= 0
            if can_corner and whole_w < best:
                best = whole_w  # blacken the whole triangle
                choice = (tab.corner_a, tab.corner_b)
            white_m = tab.white_m
            flat_m = tab.flat_m
            # the quad grows monotonically along each segment scan, so a
            # too-expensive quad ends the inner scan (and the outer one
            # when it happens at the first q)
            row_built = tab._row_built
            for p in ps:
                if not row_built[p]:
                    tab.ensure_row(p)
                first_q = True
                for q in qs:
                    if flat_m[p, q]:
                        first_q = False
                        continue
                    quad_w = whole_w - white_m[p, q]
                    if quad_w >= best:
                        if first_q:
                            ps = ()
                        break
                    first_q = False
                    val = quad_w + self._bffb(tab, int(p), int(q))
                    if val < best:
                        best = val
                        choice = (int(p), int(q))
                        if best == 0:
                            break
                if best == 0 or len(ps) == 0:
                    break
        tab._best[key] = best
        tab._best_choice[key] = choice
        self.depth -= 1
        return best

    # -- BestForFixedBase ---------------------------------------------------

    def _bffb(self, tab: _PairTable, i: int, j: int) -> int:
        key = (i, j)
        hit = tab._bffb.get(key)
        if hit is not None:
            return hit
        if tab.is_corner(i, j):
            tab._bffb[key] = 0
            tab._bffb_choice[key] = None
            return 0
        blacks = tab.blacks(i, j)
        best = blacks  # End of Processing: whiten the triangle
        choice = None
        p = tab.pts_a[i]
        q = tab.pts_b[j]
        v = tab.v
        if blacks > 0 and self._height(p, q, v) > self.cutoff + 1e-9:
            best, choice = self._subdivide(tab, i, j, best)
        tab._bffb[key] = best
        tab._bffb_choice[key] = choice
        return best

    @staticmethod
    def _height(p, q, v) -> float:
        base = ((q[0] - p[0]) ** 2 + (q[1] - p[1]) ** 2) ** 0.5
        if base < TOL:
            return 0.0
        area2 = abs((q[0] - p[0]) * (v[1] - p[1]) - (q[1] - p[1]) * (v[0] - p[0]))
        return area2 / base

    def _subdivide(self, tab: _PairTable, i: int, j: int, best: int):
        bits = self.bits
        p = tab.pts_a[i]
        q = tab.pts_b[j]
        v = tab.v
        mask = tab.mask(i, j)
        whole_w = tab.whites(i, j)
        alpha = atan2(q[1] - p[1], q[0] - p[0])
        fam = self.family_for_inclination(alpha)
        choice = None
        for li in range(fam.line_count):
            gid = fam.line_gids[li]
            if gid in (tab.ga, tab.gb):
                continue
            t1 = self._seg_crossing(p, v, fam, li)
            t2 = self._seg_crossing(q, v, fam, li)
            if t1 is None or t2 is None:
                continue
            sv = bits.side_of_line(gid, v[0], v[1])
            if abs(sv) <= TOL:
                continue
            beyond = bits.line_side_mask(gid, sv, strict=True)
            apex_mask = mask & beyond
            apex_b, apex_w = bits.count(apex_mask)
            if apex_b >= best:
                continue
            v1 = (p[0] + t1 * (v[0] - p[0]), p[1] + t1 * (v[1] - p[1]))
            v2 = (q[0] + t2 * (v[0] - q[0]), q[1] + t2 * (v[1] - q[1]))
            tab1 = self.pair(tab.ga, gid)
            tab2 = self.pair(gid, tab.gb)
            swap1 = tab.ga > gid
            swap2 = gid > tab.gb
            for b_idx in self._points_between(fam, li, v1, v2):
                b_idx = int(b_idx)
                i1, j1 = (b_idx, i) if swap1 else (i, b_idx)
                if tab1.flat_m[i1, j1]:
                    continue
                i2, j2 = (j, b_idx) if swap2 else (b_idx, j)
                if tab2.flat_m[i2, j2]:
                    continue
                if not tab1._row_built[i1]:
                    tab1.ensure_row(i1)
                if not tab2._row_built[i2]:
                    tab2.ensure_row(i2)
                blacken_w = whole_w - apex_w - int(tab1.white_m[i1, j1]) \
                    - int(tab2.white_m[i2, j2])
                partial = apex_b + blacken_w
                if partial >= best:
                    continue
                hit = tab1._best.get((i1, j1))
                partial += hit if hit is not None else self._best(tab1, i1, j1)
                if partial >= best:
                    continue
                hit = tab2._best.get((i2, j2))
                total = partial + (hit if hit is not None else self._best(tab2, i2, j2))
                if total < best:
                    best = total
                    choice = (gid, b_idx)
                    if best == 0:
                        return best, choice
        return best, choice

    @staticmethod
    def _seg_crossing(a, b, fam: LineFamily, li: int):
        c = fam.offsets[li]
        pa = a[0] * fam.nx + a[1] * fam.ny
        pb = b[0] * fam.nx + b[1] * fam.ny
        denom = pb - pa
        if abs(denom) < 1e-12:
            return None
        t = (c - pa) / denom
        return t if -1e-9 <= t <= 1 + 1e-9 else None

    @staticmethod
    def _points_between(fam: LineFamily, li: int, v1, v2) -> np.ndarray:
        ts = fam.point_ts[li]
        a0 = fam.anchors[li]
        t1 = (v1[0] - a0[0]) * fam.ux + (v1[1] - a0[1]) * fam.uy + ts[0]
        t2 = (v2[0] - a0[0]) * fam.ux + (v2[1] - a0[1]) * fam.uy + ts[0]
        lo, hi = (t1, t2) if t1 <= t2 else (t2, t1)
        return np.nonzero((ts >= lo - TOL) & (ts <= hi + TOL))[0]

    # -- public triangle API --------------------------------------------------

    def _locate(self, t: TriangleInstance):
        fa = self.grid.families[t.a.family]
        fb = self.grid.families[t.b.family]
        return fa.line_gids[t.a.line], t.a.point, fb.line_gids[t.b.line], t.b.point

    def best_triangle(self, t: TriangleInstance) -> float:
        ga, i, gb, j = self._locate(t)
        tab = self.pair(ga, gb)
        ti, tj = self._oriented(tab, ga, i, j)
        if tab.flat(ti, tj) and not tab.is_corner(ti, tj):
            # degenerate instance: only end-of-processing applies
            return self._flat_cost(t) / self.bits.sample.size_param
        return self._best(tab, ti, tj) / self.bits.sample.size_param

    def best_for_fixed_base(self, t: TriangleInstance) -> float:
        ga, i, gb, j = self._locate(t)
        tab = self.pair(ga, gb)
        ti, tj = self._oriented(tab, ga, i, j)
        if tab.flat(ti, tj) and not tab.is_corner(ti, tj):
            return self._flat_cost(t) / self.bits.sample.size_param
        return self._bffb(tab, ti, tj) / self.bits.sample.size_param

    def _flat_cost(self, t: TriangleInstance) -> int:
        # blacks on the carrier segment of a zero-area triangle
        from .refgrid import CountTables
        tabs = CountTables(self.bits)
        rc = tabs.triangle_counts(t.a, t.b)
        return rc.black


# ---------------------------------------------------------------------------
# the estimator

class _Assembly:
    """Top-level minimization over reference boxes for one DP context."""

    def __init__(self, dp: ConvexityDP):
        self.dp = dp
        grid, bits = dp.grid, dp.bits
        self.hfam = grid.families[grid.horizontal]
        self.vfam = grid.families[grid.vertical]
        self.hgids = list(self.hfam.line_gids)
        self.vgids = list(self.vfam.line_gids)
        self.band_cache: dict[tuple[int, int], int] = {}
        self.bits = bits
        # horizontal offsets ascending = top to bottom (y grows downward)
        self.h_order = np.argsort(self.hfam.offsets)
        self.v_order = np.argsort(self.vfam.offsets)

    def band_mask(self, gh0: int, gh2: int) -> int:
        key = (gh0, gh2)
        hit = self.band_cache.get(key)
        if hit is None:
            hit = self.bits.line_ge(gh0) & ~self.bits.line_gt(gh2) & self.bits.full
            self.band_cache[key] = hit
        return hit

    def run(self):
        dp, bits = self.dp, self.bits
        total_black = bits.black.bit_count()
        best = total_black  # the empty (all-white) convex image
        winner = None
        hf, vf = self.hfam, self.vfam
        for i0_ord in self.h_order:
            l0 = int(i0_ord)
            c0 = hf.offsets[l0]
            for l2 in (int(x) for x in self.h_order):
                if hf.offsets[l2] <= c0 + TOL:
                    continue
                band = self.band_mask(hf.line_gids[l0], hf.line_gids[l2])
                a_term = bits.blacks(bits.full & ~band)
                if a_term >= best:
                    continue
                res = self._best_box_for_lines(l0, l2, band, a_term, best)
                if res is not None and res[0] < best:
                    best, winner = res
        return best, winner

    def _best_box_for_lines(self, l0: int, l2: int, band: int, a_term: int, best: int):
        dp, bits = self.dp, self.bits
        hf, vf = self.hfam, self.vfam
        c0, c2 = hf.offsets[l0], hf.offsets[l2]
        pts0 = hf.point_xy[l0]
        pts2 = hf.point_xy[l2]
        out = None
        for i0 in range(len(pts0)):
            b0 = pts0[i0]
            for i2 in range(len(pts2)):
                b2 = pts2[i2]
                # strict west of the diagonal from b0 down to b2
                wd = bits.pair_side_mask(b0, b2, -1.0, strict=True)
                left = self._side_min(l0, i0, l2, i2, band, wd, a_term, best, west=True)
                if left is None:
                    continue
                dleft, lsel = left
                if a_term + dleft >= best:
                    continue
                right = self._side_min(l0, i0, l2, i2, band, wd, a_term + dleft, best, west=False)
                if right is None:
                    continue
                dright, rsel = right
                total = a_term + dleft + dright
                if total < best:
                    best = total
                    out = (total, (l0, i0, l2, i2, lsel, rsel))
        return out

    def _side_min(self, l0, i0, l2, i2, band, wd, base_cost, best, west: bool):
        """min over one vertical line-point pair of the side cost:
        W-strip blacks + mid-region whites + the two corner Best values
        (with the triangles' own whites removed, since the mid region is
        counted whole)."""
        dp, bits = self.dp, self.bits
        hf, vf = self.hfam, self.vfam
        c0, c2 = hf.offsets[l0], hf.offsets[l2]
        b0 = hf.point_xy[l0][i0]
        b2 = hf.point_xy[l2][i2]
        gh0, gh2 = hf.line_gids[l0], hf.line_gids[l2]
        lim = min(b0[0], b2[0]) if west else max(b0[0], b2[0])
        dx, dy = b2[0] - b0[0], b2[1] - b0[1]
        dscale = max(abs(dx), abs(dy), 1.0)
        side_best = None
        sel_best = None
        for lv in (int(x) for x in self.v_order):
            cv = vf.offsets[lv]
            if west and cv > lim + TOL:
                continue
            if not west and cv < lim - TOL:
                continue
            gv = vf.line_gids[lv]
            if west:
                w_strip = bits.blacks(band & ~bits.line_ge(gv))
                mid = band & bits.line_ge(gv) & wd
            else:
                w_strip = bits.blacks(band & bits.line_gt(gv))
                mid = band & ~bits.line_gt(gv) & ~wd & bits.full
            # every value of this strip is >= w_strip (the G terms cannot
            # undercut the mid whites they subtract from)
            if base_cost + w_strip >= best:
                continue
            if side_best is not None and w_strip >= side_best:
                continue
            pts_v = vf.point_xy[lv]
            inband = (pts_v[:, 1] >= c0 - TOL) & (pts_v[:, 1] <= c2 + TOL)
            if not inband.any():
                continue
            # canonical diagonal normal is (dy, -dx): positive side = east
            side = dy * (pts_v[:, 0] - b0[0]) - dx * (pts_v[:, 1] - b0[1])
            sane = inband & ((side <= TOL * dscale) if west else (side >= -TOL * dscale))
            if not sane.any():
                continue
            tab0 = dp.pair(gh0, gv)
            tab2 = dp.pair(gh2, gv)
            row0, flat0 = dp.g_row(tab0, gh0, i0)
            row2, flat2 = dp.g_row(tab2, gh2, i2)
            sane &= ~flat0 & ~flat2
            idxs = np.nonzero(sane)[0]
            if len(idxs) == 0:
                continue
            dp.fill_g(tab0, gh0, i0, row0, idxs)
            dp.fill_g(tab2, gh2, i2, row2, idxs)
            mid_w = bits.whites(mid)
            vals = row0[idxs] + row2[idxs]
            k = int(np.argmin(vals))
            val = w_strip + mid_w + int(vals[k])
            if side_best is None or val < side_best:
                side_best = val
                sel_best = (lv, int(idxs[k]))
        if side_best is None:
            return None
        return side_best, sel_best


def _no_candidate_estimate(bits: SampleBits, s: int, sample, warnings) -> ConvexityEstimate:
    blacks = bits.black.bit_count()
    trace = (TraceRegion("all", False, bits.full, blacks, bits.white.bit_count()),)
    return ConvexityEstimate(
        dhat=min(max(blacks / s, 0.0), 0.5),
        hypothesis_vertices=(),
        trace=trace,
        total_errors=blacks,
        normalizer=s,
        sample_size=s,
        realized_samples=len(sample),
        winner=None,
        warnings=tuple(warnings),
    )


def estimate_convexity_distance(
    image: BinaryImage,
    delta: float,
    seed: int = 0,
    constants: ConvexityConstants = PRACTICAL_CONSTANTS,
    mode: str = "bernoulli",
) -> ConvexityEstimate:
    """Estimate the relative distance of the image to convexity as the
    smallest fraction of samples misclassified by a reference polygon.

    mode selects bernoulli sampling (default), uniform, or full; with
    mode="full" every candidate's empirical error equals its true
    distance, so the estimate is a deterministic lower bound on nothing
    less than the true distance to convexity.
    """
    if not 0 < delta <= 0.25:
        raise ValueError(f"delta must be in (0, 1/4], got {delta}")
    n = image.n
    warnings = []
    if delta < n ** (-1 / 6):
        warnings.append(
            f"delta={delta} below n^(-1/6)={n ** (-1 / 6):.4g}: outside the paper regime")
    grid = build_reference_grid(n, delta, constants)
    if grid.clamped:
        warnings.append(
            "reference grid pitch clamped to one pixel (delta*n/divisor < 1)")
    s = n * n if mode == "full" else convexity_sample_size(delta, constants)
    sample = make_sample(image, mode, s, seed)
    bits = SampleBits(grid, sample)
    if bits.black == 0:
        return _no_candidate_estimate(bits, s, sample, warnings)
    dp = ConvexityDP(grid, bits)
    assembly = _Assembly(dp)
    total, winner = assembly.run()
    trace, vertices, subdivisions = _replay(dp, assembly, winner, bits)
    box = None
    if winner is not None:
        l0, i0, l2, i2, (lv1, iv1), (lv3, iv3) = winner
        box = ReferenceBox(
            grid.lpp(grid.horizontal, l0, i0),
            grid.lpp(grid.vertical, lv1, iv1),
            grid.lpp(grid.horizontal, l2, i2),
            grid.lpp(grid.vertical, lv3, iv3),
        )
    return ConvexityEstimate(
        dhat=min(max(total / s, 0.0), 0.5),
        hypothesis_vertices=vertices,
        trace=trace,
        total_errors=total,
        normalizer=s,
        sample_size=s,
        realized_samples=len(sample),
        winner=winner,
        subdivisions=subdivisions,
        warnings=tuple(warnings),
        box=box,
    )


def _replay(dp: ConvexityDP, assembly: _Assembly, winner, bits: SampleBits):
    """Reconstruct the winning decomposition: trace regions (each sample
    classified exactly once) and the polygon vertex set."""
    if winner is None:
        blacks = bits.black.bit_count()
        return ((TraceRegion("all", False, bits.full, blacks,
                             bits.white.bit_count()),), (), ())
    l0, i0, l2, i2, (lv0, iv0), (lv3, iv3) = winner
    hf, vf = assembly.hfam, assembly.vfam
    gh0, gh2 = hf.line_gids[l0], hf.line_gids[l2]
    gv1, gv3 = vf.line_gids[lv0], vf.line_gids[lv3]
    b0 = tuple(hf.point_xy[l0][i0])
    b2 = tuple(hf.point_xy[l2][i2])
    b1 = tuple(vf.point_xy[lv0][iv0])
    b3 = tuple(vf.point_xy[lv3][iv3])
    band = assembly.band_mask(gh0, gh2)
    wd = bits.pair_side_mask(b0, b2, -1.0, strict=True)
    regions: list[TraceRegion] = []
    points: list[tuple[float, float]] = [b0, b1, b2, b3]
    subdivisions: list[tuple] = []

    def tri_area(a, b, c):
        return abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])) / 2

    def tri_angle(at, other1, other2):
        u = (other1[0] - at[0], other1[1] - at[1])
        w = (other2[0] - at[0], other2[1] - at[1])
        nu = (u[0] ** 2 + u[1] ** 2) ** 0.5
        nw = (w[0] ** 2 + w[1] ** 2) ** 0.5
        if nu < TOL or nw < TOL:
            return 0.0
        c = max(-1.0, min(1.0, (u[0] * w[0] + u[1] * w[1]) / (nu * nw)))
        return float(np.arccos(c))

    def add(label, declared_black, mask):
        blk, wht = bits.count(mask)
        regions.append(TraceRegion(label, declared_black, mask, blk, wht))

    add("outside-band", False, bits.full & ~band)
    w1 = band & ~bits.line_ge(gv1)
    add("west-strip", False, w1)
    w3 = band & bits.line_gt(gv3)
    add("east-strip", False, w3)
    mid_w = band & bits.line_ge(gv1) & wd
    mid_e = band & ~bits.line_gt(gv3) & ~wd & bits.full

    def self_regions(tab, i, j, label):
        if tab.is_corner(i, j):
            return
        mask = tab.mask(i, j)
        choice = tab._best_choice.get((i, j))
        if choice is None:
            # never expanded: treat as end-of-processing on the whole
            add(label + "/eop", False, mask)
            return
        p, q = choice
        sub = tab.mask(p, q) if not tab.is_corner(p, q) else 0
        add(label + "/quad", True, mask & ~sub)
        if tab.is_corner(p, q):
            return
        bchoice = tab._bffb_choice.get((p, q))
        if bchoice is None:
            add(label + "/white", False, sub)
            return
        gid, b_idx = bchoice
        points.append(tuple(dp.grid.families[dp.line_owner[gid][0]]
                            .point_xy[dp.line_owner[gid][1]][b_idx]))
        sv = bits.side_of_line(gid, tab.v[0], tab.v[1])
        beyond = bits.line_side_mask(gid, sv, strict=True)
        apex = sub & beyond
        add(label + "/apex", False, apex)
        tab1 = dp.pair(tab.ga, gid)
        o1 = dp._oriented(tab1, tab.ga, p, b_idx)
        tab2 = dp.pair(gid, tab.gb)
        o2 = dp._oriented(tab2, gid, b_idx, q)
        c1 = tab1.mask(*o1)
        c2 = tab2.mask(*o2)
        add(label + "/blacken", True, sub & ~apex & ~c1 & ~c2)
        pa = tuple(tab.pts_a[p])
        qb = tuple(tab.pts_b[q])
        points.append(pa)
        points.append(qb)
        child1 = (tuple(tab1.pts_a[o1[0]]), tuple(tab1.pts_b[o1[1]]), tab1.v)
        child2 = (tuple(tab2.pts_a[o2[0]]), tuple(tab2.pts_b[o2[1]]), tab2.v)
        subdivisions.append((
            tri_area(pa, qb, tab.v),
            tri_area(*child1),
            tri_area(*child2),
            tri_angle(pa, qb, tab.v),
            tri_angle(qb, pa, tab.v),
        ))
        self_regions(tab1, *o1, label + "/c1")
        self_regions(tab2, *o2, label + "/c2")

    tab01 = dp.pair(gh0, gv1)
    o01 = dp._oriented(tab01, gh0, i0, iv0)
    tab12 = dp.pair(gh2, gv1)
    o12 = dp._oriented(tab12, gh2, i2, iv0)
    m01 = tab01.mask(*o01) or 0
    m12 = tab12.mask(*o12) or 0
    add("tri-west", True, mid_w & ~m01 & ~m12)
    self_regions(tab01, *o01, "t01")
    self_regions(tab12, *o12, "t12")
    tab03 = dp.pair(gh0, gv3)
    o03 = dp._oriented(tab03, gh0, i0, iv3)
    tab32 = dp.pair(gh2, gv3)
    o32 = dp._oriented(tab32, gh2, i2, iv3)
    m03 = tab03.mask(*o03) or 0
    m32 = tab32.mask(*o32) or 0
    add("tri-east", True, mid_e & ~m03 & ~m32)
    self_regions(tab03, *o03, "t03")
    self_regions(tab32, *o32, "t32")

    # vertex collection: base-change points along winning paths
    def collect(tab, i, j):
        if tab.is_corner(i, j) or tab.flat(i, j):
            return
        choice = tab._best_choice.get((i, j))
        if choice is None:
            return
        p, q = choice
        points.append(tuple(tab.pts_a[p]) if p != tab.corner_a else tuple(tab.v))
        points.append(tuple(tab.pts_b[q]) if q != tab.corner_b else tuple(tab.v))
        if tab.is_corner(p, q):
            return
        bchoice = tab._bffb_choice.get((p, q))
        if bchoice is None:
            return
        gid, b_idx = bchoice
        tab1 = dp.pair(tab.ga, gid)
        collect(tab1, *dp._oriented(tab1, tab.ga, p, b_idx))
        tab2 = dp.pair(gid, tab.gb)
        collect(tab2, *dp._oriented(tab2, gid, b_idx, q))

    collect(tab01, *o01)
    collect(tab12, *o12)
    collect(tab03, *o03)
    collect(tab32, *o32)
    scaled = [(round(x * (1 << 20)), round(y * (1 << 20))) for x, y in points]
    hull = convex_hull(scaled)
    vertices = tuple((x / (1 << 20), y / (1 << 20)) for x, y in hull)
    return tuple(regions), vertices, tuple(subdivisions)


def render_convex_hypothesis(vertices, n: int) -> BinaryImage:
    """Lattice points of [0, n-1]^2 in the closed hull of the (possibly
    fractional) vertices, with a small snap so grid-aligned edges keep
    their boundary pixels."""
    a = np.zeros((n, n), dtype=bool)
    pts = [(float(x), float(y)) for x, y in vertices]
    if not pts:
        return BinaryImage(a)
    if len(pts) == 1:
        x, y = pts[0]
        xi, yi = round(x), round(y)
        if abs(x - xi) < 1e-6 and abs(y - yi) < 1e-6 and 0 <= xi < n and 0 <= yi < n:
            a[yi, xi] = True
        return BinaryImage(a)
    scaled = [(round(x * (1 << 20)), round(y * (1 << 20))) for x, y in pts]
    hull = convex_hull(scaled)
    hx = np.array([p[0] / (1 << 20) for p in hull])
    hy = np.array([p[1] / (1 << 20) for p in hull])
    gx, gy = np.meshgrid(np.arange(n, dtype=float), np.arange(n, dtype=float))
    inside = np.ones((n, n), dtype=bool)
    m = len(hull)
    if m == 2:
        x1, y1 = hx[0], hy[0]
        x2, y2 = hx[1], hy[1]
        cross = (x2 - x1) * (gy - y1) - (y2 - y1) * (gx - x1)
        scale = max(abs(x2 - x1), abs(y2 - y1), 1.0)
        t = (gx - x1) * (x2 - x1) + (gy - y1) * (y2 - y1)
        inside = (np.abs(cross) <= 1e-6 * scale) & (t >= -1e-6) & \
            (t <= (x2 - x1) ** 2 + (y2 - y1) ** 2 + 1e-6)
    else:
        for k in range(m):
            x1, y1 = hx[k], hy[k]
            x2, y2 = hx[(k + 1) % m], hy[(k + 1) % m]
            side = (x2 - x1) * (gy - y1) - (y2 - y1) * (gx - x1)
            scale = max(abs(x2 - x1), abs(y2 - y1), 1.0)
            inside &= side >= -1e-6 * scale
    return BinaryImage(inside)


def learn_convex(
    image: BinaryImage,
    delta: float,
    seed: int = 0,
    constants: ConvexityConstants = PRACTICAL_CONSTANTS,
    mode: str = "bernoulli",
) -> tuple[tuple[tuple[float, float], ...], BinaryImage]:
    """Proper agnostic convex learner: the argmin reference polygon's
    vertex set and its rendering (closed-hull lattice membership, the
    same rule is_convex checks)."""
    est = estimate_convexity_distance(image, delta, seed=seed,
                                      constants=constants, mode=mode)
    return est.hypothesis_vertices, render_convex_hypothesis(est.hypothesis_vertices, image.n)
