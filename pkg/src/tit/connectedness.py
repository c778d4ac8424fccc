"""Distance approximation to connectedness via block sampling.

The estimator partitions the (padded) image into r-squares separated by
grid lines, samples squares uniformly, and computes each sampled
square's exact distance to border connectedness with a row-by-row
dynamic program whose state is the current row's coloring plus a status
vector over {0, 1, <, x, >} describing how its 1-blocks relate to the
border and to each other.  The estimate is the scaled mean of the
per-square distances.

The DP state space is exp(k) in the square side k, so the side is
capped (default 16).  A square that is already border-connected is
answered 0 without running the DP; this is exact and lets the
estimator run at any block size on conforming inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .image import BinaryImage
from .predicates import is_border_connected

__all__ = [
    "ResourceCapError",
    "SquarePartition",
    "RowConfiguration",
    "ConnectednessEstimate",
    "STATUS_SYMBOLS",
    "construct_graph",
    "compute_status",
    "border_connectedness_distance",
    "pad_and_partition",
    "estimate_connectedness_distance",
    "connectedness_square_sample_count",
]

STATUS_SYMBOLS = ("0", "1", "<", "x", ">")

INCONSISTENT = None  # the paper's bottom element


@dataclass(frozen=True)
class RowConfiguration:
    """One row's coloring plus the status of each of its 1-blocks with
    respect to the rows processed so far."""

    coloring: tuple[int, ...]
    status: tuple[str, ...]

    def __post_init__(self):
        k = len(self.coloring)
        cl = sum(1 << i for i, b in enumerate(self.coloring) if b)
        if len(self.status) != len(_blocks(cl, k)):
            raise ValueError("status length must equal the number of 1-blocks")

    def is_consistent(self) -> bool:
        """Whether the bracket symbols form a readable nesting."""
        return construct_graph(list(self.coloring), self.status) is not INCONSISTENT


class ResourceCapError(ValueError):
    """Square side exceeds the DP cap; use a larger delta."""


def _blocks(cl: int, k: int) -> list[tuple[int, int]]:
    """Maximal runs of 1s in the k-bit coloring, left to right, as
    (start, end) inclusive column ranges."""
    out = []
    x = 0
    while x < k:
        if cl >> x & 1:
            start = x
            while x < k and cl >> x & 1:
                x += 1
            out.append((start, x - 1))
        else:
            x += 1
    return out


def construct_graph(cl, st) -> set[frozenset] | None:
    """Edges joining same-component 1-blocks of one row, recovered from
    the status vector by its stack discipline; None when inconsistent.

    ``cl`` is a k-bit coloring (int or 0/1 sequence), ``st`` a sequence
    over {'0','1','<','x','>'} with one symbol per 1-block.
    """
    if not isinstance(cl, int):
        bits = list(cl)
        k = len(bits)
        cl = sum(1 << i for i, b in enumerate(bits) if b)
    else:
        k = max(cl.bit_length(), 1)
    blocks = _blocks(cl, k)
    st = tuple(st)
    if len(st) != len(blocks):
        raise ValueError(f"status length {len(st)} != block count {len(blocks)}")
    stack: list[int] = []
    edges: set[frozenset] = set()
    for j, sym in enumerate(st):
        if sym not in STATUS_SYMBOLS:
            raise ValueError(f"unknown status symbol {sym!r}")
        if sym == "1" and stack:
            return INCONSISTENT
        if sym in ("x", ">") and not stack:
            return INCONSISTENT
        if sym in ("<", "x"):
            stack.append(j)
        elif sym == ">":
            while True:
                p = stack.pop()
                edges.add(frozenset((p, j)))
                if st[p] == "<":
                    break
    if stack:
        return INCONSISTENT  # unmatched '<'
    return edges


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def compute_status(cl, st, cl_next, k: int, last_row: bool = False):
    """Status vector of the next row's coloring, given the current row's
    configuration; None when the configurations are inconsistent (some
    non-border component dies).

    Blocks of the new row touching column 0 or k-1 are border-connected;
    on the last row every block is border-connected.
    """
    if not isinstance(cl, int):
        cl = sum(1 << i for i, b in enumerate(cl) if b)
    if not isinstance(cl_next, int):
        cl_next = sum(1 << i for i, b in enumerate(cl_next) if b)
    edges = construct_graph(cl, tuple(st))
    if edges is INCONSISTENT:
        return INCONSISTENT
    old = _blocks(cl, k)
    new = _blocks(cl_next, k)
    n1, n2 = len(old), len(new)
    uf = _UnionFind(n1 + n2)
    for e in edges:
        a, b = tuple(e)
        uf.union(a, b)
    # vertical adjacency between the two rows
    col_old = {}
    for j, (s, e) in enumerate(old):
        for x in range(s, e + 1):
            col_old[x] = j
    for j2, (s, e) in enumerate(new):
        for x in range(s, e + 1):
            if x in col_old:
                uf.union(col_old[x], n1 + j2)
    comp_has_one: dict[int, bool] = {}
    comp_has_new: dict[int, bool] = {}
    for j in range(n1):
        r = uf.find(j)
        comp_has_one[r] = comp_has_one.get(r, False) or st[j] == "1"
    for j2 in range(n2):
        r = uf.find(n1 + j2)
        comp_has_new[r] = True
    for j in range(n1):
        r = uf.find(j)
        if st[j] != "1" and not comp_has_one.get(r) and not comp_has_new.get(r):
            return INCONSISTENT  # component can no longer reach the border
    if last_row:
        return ("1",) * n2
    groups: dict[int, list[int]] = {}
    marked = [False] * n2
    for j2, (s, e) in enumerate(new):
        r = uf.find(n1 + j2)
        groups.setdefault(r, []).append(j2)
        if s == 0 or e == k - 1 or comp_has_one.get(r):
            marked[j2] = True
    out = ["0"] * n2
    for members in groups.values():
        if any(marked[j2] for j2 in members):
            for j2 in members:
                out[j2] = "1"
        elif len(members) > 1:
            members.sort()
            out[members[0]] = "<"
            out[members[-1]] = ">"
            for j2 in members[1:-1]:
                out[j2] = "x"
        # singleton unmarked stays '0'
    return tuple(out)


# ---------------------------------------------------------------------------
# transition tables, shared by every DP run with the same square side

_TRANS_CACHE: dict[int, tuple] = {}


def _transition_tables(k: int):
    """Reachable (coloring, status) states and their row-to-row moves.

    Returns (states, init_index, src, clp, dst) where ``states`` is the
    list of reachable configurations, ``init_index[cl]`` the state index
    of (cl, all-1), and (src, clp, dst) parallel int arrays encoding
    every consistent interior transition.  The same (src, clp) pairs are
    exactly the consistent last-row moves.
    """
    if k in _TRANS_CACHE:
        return _TRANS_CACHE[k]
    states: list[tuple[int, tuple]] = []
    index: dict[tuple[int, tuple], int] = {}

    def intern(state) -> int:
        if state not in index:
            index[state] = len(states)
            states.append(state)
        return index[state]

    init_index = np.empty(1 << k, dtype=np.int64)
    frontier = []
    for cl in range(1 << k):
        st = ("1",) * len(_blocks(cl, k))
        idx = intern((cl, st))
        init_index[cl] = idx
        frontier.append(idx)
    src, clp, dst = [], [], []
    seen_src = set()
    while frontier:
        i = frontier.pop()
        if i in seen_src:
            continue
        seen_src.add(i)
        cl, st = states[i]
        for cl2 in range(1 << k):
            st2 = compute_status(cl, st, cl2, k, last_row=False)
            if st2 is INCONSISTENT:
                continue
            j = intern((cl2, st2))
            src.append(i)
            clp.append(cl2)
            dst.append(j)
            if j not in seen_src:
                frontier.append(j)
    tables = (
        states,
        init_index,
        np.array(src, dtype=np.int64),
        np.array(clp, dtype=np.int64),
        np.array(dst, dtype=np.int64),
    )
    _TRANS_CACHE[k] = tables
    return tables


_INF = np.iinfo(np.int64).max // 4


def _row_ints(image: BinaryImage) -> np.ndarray:
    k = image.n
    weights = (1 << np.arange(k, dtype=np.int64))
    return (image.array.astype(np.int64) * weights).sum(axis=1)


def _row_dp(image: BinaryImage) -> tuple[int, list[int]]:
    """Exact minimum recoloring cost to border-connectedness, plus the
    running minimum cost after each processed row (absolute counts)."""
    k = image.n
    states, init_index, src, clp, dst = _transition_tables(k)
    rows = _row_ints(image)
    all_cl = np.arange(1 << k, dtype=np.int64)
    cost = np.full(len(states), _INF, dtype=np.int64)
    ham0 = np.bitwise_count((all_cl ^ rows[0]).astype(np.uint64)).astype(np.int64)
    np.minimum.at(cost, init_index, ham0)
    minima = [int(cost.min())]
    if k == 1:
        return minima[-1], minima
    for i in range(1, k - 1):
        ham = np.bitwise_count((all_cl ^ rows[i]).astype(np.uint64)).astype(np.int64)
        new = np.full(len(states), _INF, dtype=np.int64)
        moved = cost[src] + ham[clp]
        np.minimum.at(new, dst, moved)
        cost = new
        minima.append(int(cost.min()))
    ham = np.bitwise_count((all_cl ^ rows[k - 1]).astype(np.uint64)).astype(np.int64)
    final = int((cost[src] + ham[clp]).min())
    minima.append(final)
    return final, minima


def border_connectedness_distance(image: BinaryImage, cap: int = 16) -> float:
    """Exact relative distance of a k x k image to border connectedness.

    Runs in time exponential in k; a border-connected input short-circuits
    to 0 before the cap applies.
    """
    if is_border_connected(image):
        return 0.0
    k = image.n
    if k > cap:
        raise ResourceCapError(
            f"square side {k} exceeds the DP cap {cap}; increase delta so 4/delta <= {cap + 1}")
    final, _ = _row_dp(image)
    return final / (k * k)


# ---------------------------------------------------------------------------
# partitioning and the estimator

@dataclass(frozen=True)
class SquarePartition:
    """r-partition of a padded image: (r-1)x(r-1) squares at offsets
    divisible by r, plus the grid pixels on the separating lines."""

    image: BinaryImage
    original_n: int
    r: int
    delta_effective: float
    delta_prime: float

    @property
    def n(self) -> int:
        return self.image.n

    @property
    def squares_per_side(self) -> int:
        return (self.image.n - 1) // self.r

    @property
    def square_count(self) -> int:
        return self.squares_per_side ** 2

    @property
    def grid_pixel_count(self) -> int:
        lines = (self.image.n - 1) // self.r + 1
        return 2 * lines * self.image.n - lines * lines

    def square_origin(self, bx: int, by: int) -> tuple[int, int]:
        return bx * self.r, by * self.r

    def square(self, bx: int, by: int) -> BinaryImage:
        if not (0 <= bx < self.squares_per_side and 0 <= by < self.squares_per_side):
            raise IndexError(f"square index ({bx}, {by}) out of range")
        i, j = self.square_origin(bx, by)
        sub = self.image.array[j + 1: j + self.r, i + 1: i + self.r]
        return BinaryImage(sub)

    def grid_pixels(self) -> np.ndarray:
        n, r = self.image.n, self.r
        xs, ys = np.meshgrid(np.arange(n), np.arange(n))
        mask = (xs % r == 0) | (ys % r == 0)
        return np.column_stack([xs[mask], ys[mask]])


@dataclass(frozen=True)
class ConnectednessEstimate:
    dhat: float
    per_square_distances: list[float]
    scaling: float
    sample_count: int
    r: int
    n_padded: int
    delta_effective: float
    delta_prime: float
    warnings: tuple[str, ...] = field(default=())


def pad_and_partition(image: BinaryImage, delta: float) -> SquarePartition:
    """Round the block side to r = round(4/delta), pad with white pixels on
    the high-index sides until n = 1 (mod r), and expose the square grid.
    The effective accuracy 4/r and the padding-adjusted accuracy
    delta * n^2 / n'^2 are reported on the partition.
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    r = max(2, round(4 / delta))
    delta_eff = 4 / r
    n = image.n
    n_prime = n if n % r == 1 else n + (r + 1 - n % r) % r
    if n_prime < r + 1:
        n_prime += r  # at least one full square
    if n_prime == n:
        padded = image
    else:
        a = np.zeros((n_prime, n_prime), dtype=bool)
        a[:n, :n] = image.array
        padded = BinaryImage(a)
    delta_prime = delta * n * n / (n_prime * n_prime)
    return SquarePartition(padded, n, r, delta_eff, delta_prime)


def connectedness_square_sample_count(delta: float) -> int:
    """Number of squares the estimator draws: ceil(4/delta^2)."""
    return int(np.ceil(4 / (delta * delta)))


def estimate_connectedness_distance(
    image: BinaryImage,
    delta: float,
    seed: int = 0,
    cap: int = 16,
) -> ConnectednessEstimate:
    """Estimate the relative distance of the image to connectedness.

    Samples ceil(4/delta^2) r-squares uniformly with replacement through
    the block access model, computes each one's exact distance to border
    connectedness, and returns the scaled mean clamped to [0, 1/2].
    Repeated square contents share one DP evaluation.
    """
    warnings = []
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if delta >= 0.25:
        warnings.append(f"delta={delta} outside the guarantee regime (0, 1/4); running anyway")
    part = pad_and_partition(image, delta)
    r, n_p = part.r, part.n
    k = r - 1
    s = connectedness_square_sample_count(delta)
    rng = np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))
    per_side = part.squares_per_side
    bxs = rng.integers(0, per_side, size=s)
    bys = rng.integers(0, per_side, size=s)
    memo: dict[bytes, float] = {}
    dists = []
    for bx, by in zip(bxs, bys):
        sq = part.square(int(bx), int(by))
        key = sq.array.tobytes()
        if key not in memo:
            if is_border_connected(sq):
                memo[key] = 0.0
            elif k > cap:
                raise ResourceCapError(
                    f"square side {k} exceeds the DP cap {cap}; increase delta")
            else:
                memo[key] = border_connectedness_distance(sq, cap=cap)
        dists.append(memo[key])
    scaling = ((1 - part.delta_effective / 4) * (1 - 1 / n_p)) ** 2
    dhat = scaling * float(np.mean(dists))
    dhat = min(max(dhat, 0.0), 0.5)
    return ConnectednessEstimate(
        dhat=dhat,
        per_square_distances=dists,
        scaling=scaling,
        sample_count=s,
        r=r,
        n_padded=n_p,
        delta_effective=part.delta_effective,
        delta_prime=part.delta_prime,
        warnings=tuple(warnings),
    )
