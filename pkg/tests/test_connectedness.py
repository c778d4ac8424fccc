import numpy as np
import pytest

from tit import (BinaryImage, ResourceCapError, border_connectedness_distance,
                 compute_status, connectedness_square_sample_count,
                 construct_graph, estimate_connectedness_distance, gen_connected,
                 is_border_connected, oracle_border_connectedness_distance,
                 pad_and_partition, tile_squares)
from tit.connectedness import _row_dp, _transition_tables

from conftest import all_images, random_image


# ---------------------------------------------------------------------------
# ConstructGraph

def test_construct_graph_matched_pair():
    edges = construct_graph([0, 1, 1, 0, 0, 1, 1], ("<", ">"))
    assert edges == {frozenset((0, 1))}


def test_construct_graph_pop_of_empty():
    assert construct_graph([0, 1, 1, 0, 0, 1, 1], (">", "0")) is None
    assert construct_graph([1, 0, 1], ("x", "0")) is None


def test_construct_graph_nested():
    edges = construct_graph([1, 0, 1, 0, 1], ("<", "x", ">"))
    assert edges == {frozenset((0, 2)), frozenset((1, 2))}


def test_construct_graph_one_inside_brackets_is_inconsistent():
    assert construct_graph([1, 0, 1, 0, 1], ("<", "1", ">")) is None


def test_construct_graph_unmatched_open():
    assert construct_graph([1, 0, 1], ("<", "0")) is None


def test_construct_graph_validates_lengths():
    with pytest.raises(ValueError):
        construct_graph([1, 0, 1], ("1",))


# ---------------------------------------------------------------------------
# ComputeStatus

def test_compute_status_full_rows():
    k = 5
    full = (1 << k) - 1
    assert compute_status(full, ("1",), full, k) == ("1",)


def test_compute_status_dying_block():
    # middle block with status 0 and an empty next row cannot survive
    assert compute_status(0b00100, ("0",), 0, 5) is None


def test_compute_status_last_row_all_one():
    st = compute_status(0b00100, ("0",), 0b00110, 5, last_row=True)
    assert st == ("1",)


def config_from_prefix(rows, k):
    """Flood-fill oracle: the configuration of the last row of a prefix."""
    h = len(rows)
    blacks = {(x, y) for y in range(h) for x in range(k) if rows[y] >> x & 1}
    comps = []
    seen = set()
    for p in sorted(blacks):
        if p in seen:
            continue
        comp = {p}
        stack = [p]
        while stack:
            x, y = stack.pop()
            for q in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if q in blacks and q not in comp:
                    comp.add(q)
                    stack.append(q)
        seen |= comp
        comps.append(comp)
    # blocks of the last row
    blocks = []
    x = 0
    while x < k:
        if rows[-1] >> x & 1:
            start = x
            while x < k and rows[-1] >> x & 1:
                x += 1
            blocks.append((start, x - 1))
        else:
            x += 1
    statuses = []
    for idx, (s, e) in enumerate(blocks):
        comp = next(c for c in comps if (s, h - 1) in c)
        border = any(x in (0, k - 1) or y == 0 for x, y in comp)
        if border:
            statuses.append("1")
            continue
        mates = [b for b in range(len(blocks))
                 if (blocks[b][0], h - 1) in comp]
        if len(mates) == 1:
            statuses.append("0")
        elif idx == min(mates):
            statuses.append("<")
        elif idx == max(mates):
            statuses.append(">")
        else:
            statuses.append("x")
    return tuple(statuses)


def _components(rows, k):
    h = len(rows)
    blacks = {(x, y) for y in range(h) for x in range(k) if rows[y] >> x & 1}
    seen = set()
    comps = []
    for p in sorted(blacks):
        if p in seen:
            continue
        comp = {p}
        stack = [p]
        while stack:
            x, y = stack.pop()
            for q in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if q in blacks and q not in comp:
                    comp.add(q)
                    stack.append(q)
        seen |= comp
        comps.append(comp)
    return comps


def prefix_is_alive(rows, k):
    # every component must touch the border seen so far or reach the last
    # row; otherwise the prefix extends no border-connected image and its
    # configuration is unreachable in the DP
    h = len(rows)
    for comp in _components(rows, k):
        border = any(x in (0, k - 1) or y == 0 for x, y in comp)
        reaches = any(y == h - 1 for _, y in comp)
        if not border and not reaches:
            return False
    return True


def transition_kills_component(rows, k, next_row):
    h = len(rows)
    for comp in _components(rows, k):
        border = any(x in (0, k - 1) or y == 0 for x, y in comp)
        continues = any(y == h - 1 and (next_row >> x & 1) for x, y in comp)
        if not border and not continues:
            return True
    return False


def test_compute_status_against_flood_fill_witnesses():
    # random alive prefixes: the transition must match statuses recomputed
    # from scratch on the extended prefix
    rng = np.random.default_rng(7)
    k = 5
    checked = killed = 0
    for _ in range(600):
        h = int(rng.integers(1, 4))
        rows = [int(rng.integers(0, 1 << k)) for _ in range(h)]
        if not prefix_is_alive(rows, k):
            continue
        cl = rows[-1]
        st = config_from_prefix(rows, k)
        nxt = int(rng.integers(0, 1 << k))
        got = compute_status(cl, st, nxt, k)
        if transition_kills_component(rows, k, nxt):
            assert got is None, (rows, nxt, got)
            killed += 1
            continue
        want = config_from_prefix(rows + [nxt], k)
        assert got == want, (rows, nxt, got, want)
        checked += 1
    assert checked > 100 and killed > 20


# ---------------------------------------------------------------------------
# the DP itself

def test_dp_trivials():
    assert border_connectedness_distance(BinaryImage.blank(3)) == 0.0
    center = np.zeros((3, 3))
    center[1, 1] = 1
    assert border_connectedness_distance(BinaryImage(center)) == pytest.approx(1 / 9)


def test_dp_exhaustive_k3():
    for m in all_images(3):
        dp = border_connectedness_distance(m)
        assert dp == pytest.approx(oracle_border_connectedness_distance(m))


@pytest.mark.parametrize("k", [4, 5])
def test_dp_random(k):
    rng = np.random.default_rng(k)
    for _ in range(60):
        m = BinaryImage(rng.random((k, k)) < rng.uniform(0.2, 0.8))
        assert border_connectedness_distance(m) == pytest.approx(
            oracle_border_connectedness_distance(m))


def test_dp_cap():
    a = np.zeros((20, 20))
    a[10, 10] = 1
    with pytest.raises(ResourceCapError, match="16"):
        border_connectedness_distance(BinaryImage(a), cap=16)


def test_dp_state_space_bound():
    for k in (3, 4, 5, 6, 7):
        states, *_ = _transition_tables(k)
        assert len(states) <= 4**k


def test_dp_row_minima_monotone():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = BinaryImage(rng.random((6, 6)) < 0.5)
        if is_border_connected(m):
            continue
        _, minima = _row_dp(m)
        assert all(b >= a for a, b in zip(minima, minima[1:]))


# ---------------------------------------------------------------------------
# partitioning and the estimator

def test_partition_no_padding():
    p = pad_and_partition(BinaryImage.blank(9), 0.5)
    assert p.r == 8 and p.n == 9 and p.square_count == 1
    assert p.square(0, 0).n == 7


def test_partition_padding_arithmetic():
    p = pad_and_partition(BinaryImage.blank(10), 0.5)
    assert p.n == 17 and p.square_count == 4
    assert p.delta_prime == pytest.approx(0.5 * 100 / 289)


def test_partition_grid_pixel_exact_count():
    p = pad_and_partition(BinaryImage.blank(33), 0.5)
    lines = (33 - 1) // 8 + 1
    assert p.grid_pixel_count == 2 * lines * 33 - lines * lines == 305
    assert len(p.grid_pixels()) == 305


def test_partition_tiles_everything():
    p = pad_and_partition(BinaryImage.blank(17), 0.5)
    covered = np.zeros((17, 17), dtype=int)
    for gx, gy in p.grid_pixels():
        covered[gy, gx] += 1
    for bx in range(p.squares_per_side):
        for by in range(p.squares_per_side):
            ox, oy = p.square_origin(bx, by)
            covered[oy + 1: oy + 8, ox + 1: ox + 8] += 1
    assert np.all(covered == 1)


def test_estimator_connected_images_zero():
    for seed, n in ((0, 33), (1, 65), (2, 129)):
        g = gen_connected(n, 0.3, seed=seed)
        est = estimate_connectedness_distance(g, 0.5, seed=seed)
        assert est.dhat == 0.0


def test_estimator_all_white_zero():
    est = estimate_connectedness_distance(BinaryImage.blank(33), 0.5, seed=3)
    assert est.dhat == 0.0


def test_estimator_tiled_exact_every_seed():
    content = random_image(7, 5, density=0.5)
    img = tile_squares(content, 97, 8)
    expect_sq = border_connectedness_distance(content)
    for seed in (0, 1, 2, 123):
        est = estimate_connectedness_distance(img, 0.5, seed=seed)
        assert est.dhat == pytest.approx(est.scaling * expect_sq)
        assert est.scaling == pytest.approx(((1 - 1 / 8) * (1 - 1 / 97)) ** 2)
        assert est.sample_count == connectedness_square_sample_count(0.5) == 16


def test_estimator_resource_cap():
    a = np.zeros((64, 64))
    a[30:33, 30:33] = 1  # interior blob, never border-connected
    with pytest.raises(ResourceCapError):
        estimate_connectedness_distance(BinaryImage(a), 0.05, seed=0)


def test_estimator_averaging_concentration():
    # two square types placed deterministically; the exact square mean is
    # known, and the sampled mean must be within delta/2 of it in >= 2/3
    # of the seeds
    delta = 0.5
    content_a = random_image(7, 1, density=0.55)
    content_b = random_image(7, 2, density=0.45)
    base = tile_squares(content_a, 97, 8).array.copy()
    part = pad_and_partition(BinaryImage(base), delta)
    arr = base.copy()
    for bx in range(part.squares_per_side):
        for by in range(part.squares_per_side):
            if (bx + by) % 2 == 0:
                ox, oy = part.square_origin(bx, by)
                arr[oy + 1: oy + 8, ox + 1: ox + 8] = content_b.array
    img = BinaryImage(arr)
    da = border_connectedness_distance(content_a)
    db = border_connectedness_distance(content_b)
    per_side = part.squares_per_side
    total, count = 0.0, 0
    for bx in range(per_side):
        for by in range(per_side):
            total += db if (bx + by) % 2 == 0 else da
            count += 1
    true_mean = total / count
    hits = 0
    trials = 60
    for seed in range(trials):
        est = estimate_connectedness_distance(img, delta, seed=seed)
        sampled_mean = float(np.mean(est.per_square_distances))
        if abs(sampled_mean - true_mean) <= delta / 2:
            hits += 1
    assert hits >= (2 * trials) // 3


def test_estimator_sandwich_on_known_families():
    # connected images: true distance 0 and the deterministic full average
    # lies in [d - delta/2, d]; isolated-pixel tiling: d is known too
    delta = 0.5
    content = np.zeros((7, 7), dtype=bool)
    content[3, 3] = True
    img = tile_squares(BinaryImage(content), 33, 8)
    part = pad_and_partition(img, delta)
    dists = [border_connectedness_distance(part.square(bx, by))
             for bx in range(part.squares_per_side)
             for by in range(part.squares_per_side)]
    scaling = ((1 - part.delta_effective / 4) * (1 - 1 / part.n)) ** 2
    det_value = scaling * float(np.mean(dists))
    d_m = part.square_count / (part.n * part.n)  # one flip per square suffices
    assert d_m - delta / 2 - 1e-9 <= det_value <= d_m + 1e-9
